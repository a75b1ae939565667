//! The dual orthogonal system and the checks that relate it to the primal.
//!
//! For a primal system `P` over `u`, the dual system `Q` lives over
//! `v = 1/(u π²)` and is normalized by `b_i = p_{M−i} / a_{M−i}`. It is built
//! by orthogonalizing `v` from scratch, so every relation checked by
//! [`verify_theorem1`] compares two independent computations.

use crate::error::Result;
use crate::grid::{dual_weight, WeightTable};
use crate::hypernum::{sign_power, Scalar};
use crate::orthopoly::{
    elementary_symmetric, interpolation_leading_coeffs, orthogonalize, Normalization, OrthoSystem,
};
use crate::report::{ClauseCheck, Tolerance, VerificationReport};

#[derive(Clone, Debug)]
pub struct DualPair<S> {
    primal: OrthoSystem<S>,
    dual: OrthoSystem<S>,
}

impl<S: Scalar> DualPair<S> {
    pub fn primal(&self) -> &OrthoSystem<S> {
        &self.primal
    }

    pub fn dual(&self) -> &OrthoSystem<S> {
        &self.dual
    }

    pub fn primal_weight(&self) -> &WeightTable<S> {
        self.primal.weight()
    }

    pub fn dual_weight(&self) -> &WeightTable<S> {
        self.dual.weight()
    }

    pub fn epsilons(&self) -> &[i32] {
        self.primal.grid().epsilons()
    }

    pub fn degree(&self) -> usize {
        self.primal.degree()
    }

    #[cfg(test)]
    pub(crate) fn from_parts(primal: OrthoSystem<S>, dual: OrthoSystem<S>) -> Self {
        Self { primal, dual }
    }
}

/// Orthogonalizes the dual weight and rescales to `b_i = p_{M−i} / a_{M−i}`.
pub fn dual_system<S: Scalar>(primal: &OrthoSystem<S>) -> Result<DualPair<S>> {
    let big_m = primal.degree();
    let v = dual_weight(primal.weight());
    let b: Vec<S> = (0..=big_m)
        .map(|i| primal.norms()[big_m - i].clone() / primal.leading()[big_m - i].clone())
        .collect();
    let dual = orthogonalize(&v, &Normalization::LeadingCoeffs(b))?;
    Ok(DualPair {
        primal: primal.clone(),
        dual,
    })
}

/// Coefficients of the polynomial interpolating `π_k P_{M−i}(x_k) u(x_k)`,
/// written through the moments `⟨P_{M−i}, x^r⟩_u`:
/// `c_n = Σ_{r=0}^{M−n} (−1)^{M−n−r} E_{M−n−r} ⟨P_{M−i}, x^r⟩`.
pub fn dual_coefficients_from_moments<S: Scalar>(primal: &OrthoSystem<S>, i: usize) -> Vec<S> {
    let big_m = primal.degree();
    let grid = primal.grid();
    let totals = elementary_symmetric(grid).totals().to_vec();
    let row = &primal.values()[big_m - i];
    let w = primal.weight().values();

    // moments[r] = Σ_k P_{M−i}(x_k) u_k x_k^r
    let mut moments = Vec::with_capacity(big_m + 1);
    let mut weighted: Vec<S> = row.iter().zip(w).map(|(p, u)| p.clone() * u.clone()).collect();
    for _ in 0..=big_m {
        moments.push(weighted.iter().cloned().fold(S::zero(), |a, b| a + b));
        weighted = weighted
            .into_iter()
            .zip(grid.points())
            .map(|(y, x)| y * x.clone())
            .collect();
    }

    (0..=big_m)
        .map(|n| {
            (0..=big_m - n).fold(S::zero(), |acc, r| {
                let term = totals[big_m - n - r].clone() * moments[r].clone();
                acc + sign_power::<S>(big_m - n - r) * term
            })
        })
        .collect()
}

/// Checks every clause of the duality relation between the two systems.
///
/// The root-free nodal identity `Q_{M−i}(x_k) = π_k P_i(x_k) u(x_k)` is
/// checked on every backend; the literal statement with `√u`, `√v` and `ε`
/// only on inexact backends.
pub fn verify_theorem1<S: Scalar>(pair: &DualPair<S>, tol: Tolerance) -> VerificationReport {
    let mut report = VerificationReport::new("theorem1");
    let big_m = pair.degree();
    let grid = pair.primal.grid();
    let (p, q) = (&pair.primal, &pair.dual);
    let u = p.weight().values();
    let v = q.weight().values();
    let size = big_m + 1;

    let mut weights = ClauseCheck::new("dual_weight");
    for k in 0..size {
        let pk = grid.node_product(k).clone();
        weights.compare(&[k], u[k].clone() * v[k].clone() * pk.clone() * pk, S::one());
    }
    report.push(weights.finish(tol));

    let mut nodal = ClauseCheck::new("nodal_identity");
    for i in 0..size {
        for k in 0..size {
            let rhs = grid.node_product(k).clone() * p.value(i, k).clone() * u[k].clone();
            nodal.compare(&[i, k], q.value(big_m - i, k).clone(), rhs);
        }
    }
    report.push(nodal.finish(tol));

    if !S::EXACT {
        let mut literal = ClauseCheck::new("sqrt_identity");
        for i in 0..size {
            for k in 0..size {
                let (Some(su), Some(sv)) = (u[k].sqrt(), v[k].sqrt()) else {
                    literal.flag(&[i, k], false);
                    continue;
                };
                let lhs = p.value(i, k).clone() * su;
                let rhs = S::from_i64(grid.epsilon(k) as i64) * q.value(big_m - i, k).clone() * sv;
                literal.compare(&[i, k], lhs, rhs);
            }
        }
        report.push(literal.finish(tol));
    }

    let mut norms = ClauseCheck::new("norm_duality");
    let mut coeff = ClauseCheck::new("coefficient_identity");
    let mut coeff_q = ClauseCheck::new("coefficient_norm_identity");
    for i in 0..size {
        norms.compare(&[i], q.norms()[i].clone(), p.norms()[big_m - i].clone());
        let ab = p.leading()[i].clone() * q.leading()[big_m - i].clone();
        coeff.compare(&[i], ab.clone(), p.norms()[i].clone());
        coeff_q.compare(&[i], ab, q.norms()[big_m - i].clone());
    }
    report.push(norms.finish(tol));
    report.push(coeff.finish(tol));
    report.push(coeff_q.finish(tol));

    // Degree and leading coefficient of the interpolated dual values, and the
    // moment form of the same coefficients.
    let mut degree = ClauseCheck::new("dual_degree");
    let mut moments = ClauseCheck::new("moment_formula");
    for i in 0..size {
        let dual_values: Vec<S> = (0..size)
            .map(|k| grid.node_product(k).clone() * p.value(big_m - i, k).clone() * u[k].clone())
            .collect();
        let coeffs = match interpolation_leading_coeffs(grid, &dual_values) {
            Ok(c) => c,
            Err(_) => {
                degree.flag(&[i], false);
                continue;
            }
        };
        let b_i = p.norms()[big_m - i].clone() / p.leading()[big_m - i].clone();
        for (n, c) in coeffs.iter().enumerate().skip(i) {
            let expected = if n == i { b_i.clone() } else { S::zero() };
            degree.compare(&[i, n], c.clone(), expected);
        }
        for (n, (c, via)) in coeffs
            .iter()
            .zip(dual_coefficients_from_moments(p, i))
            .enumerate()
        {
            moments.compare(&[i, n], via, c.clone());
        }
    }
    report.push(degree.finish(tol));
    report.push(moments.finish(tol));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grid};
    use crate::hypernum::{Float, FloatContext};
    use num_rational::BigRational;
    use proptest::prelude::*;
    use std::sync::Arc;

    type Q = BigRational;

    fn int(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn uniform3_pair() -> DualPair<Q> {
        let g = Arc::new(Grid::integers(2));
        let p = orthogonalize(&WeightTable::uniform(g), &Normalization::Monic).unwrap();
        dual_system(&p).unwrap()
    }

    #[test]
    fn uniform_three_point_dual() {
        let pair = uniform3_pair();
        assert_eq!(pair.dual_weight().values(), &[q(1, 4), int(1), q(1, 4)]);
        assert_eq!(pair.dual().values()[2], vec![int(2), int(-1), int(2)]);
        assert_eq!(pair.dual().leading()[2], int(3));
        assert_eq!(pair.dual().norms()[2], int(3));
        assert_eq!(pair.primal().norms()[0], int(3));
        let rep = verify_theorem1(&pair, Tolerance::Exact);
        assert!(rep.pass, "{}", rep.to_json());
        assert!(rep.clauses.iter().all(|c| c.max_residual == "0"));
        assert!(rep.clause("sqrt_identity").is_none());
    }

    #[test]
    fn single_point_dual() {
        let g = Arc::new(make_grid(vec![q(3, 2)]).unwrap());
        let w = WeightTable::new(g, vec![q(2, 5)]).unwrap();
        let p = orthogonalize(&w, &Normalization::Monic).unwrap();
        let pair = dual_system(&p).unwrap();
        assert_eq!(pair.dual().values()[0], vec![q(2, 5)]);
        assert_eq!(pair.dual().norms()[0], q(2, 5));
        assert!(verify_theorem1(&pair, Tolerance::Exact).pass);
    }

    #[test]
    fn perturbed_dual_is_flagged() {
        let mut pair = uniform3_pair();
        pair.dual.values_mut()[1][2] = int(7);
        let rep = verify_theorem1(&pair, Tolerance::Exact);
        assert!(!rep.pass);
        let nodal = rep.clause("nodal_identity").unwrap();
        // Q_1 sits opposite P_{M−1} = P_1
        assert_eq!(nodal.violations, vec![vec![1, 2]]);
    }

    #[test]
    fn float_backend_checks_literal_statement() {
        let ctx = FloatContext::default();
        let pts: Vec<Float> = [-3, -1, 0, 2, 5, 6]
            .iter()
            .map(|&x| Float::from_rational(&q(x, 2), &ctx))
            .collect();
        let g = Arc::new(make_grid(pts).unwrap());
        let w = WeightTable::new(
            g,
            (1..=6).map(|k| Float::from_rational(&q(k, 7), &ctx)).collect(),
        )
        .unwrap();
        let p = orthogonalize(&w, &Normalization::Monic).unwrap();
        let pair = dual_system(&p).unwrap();
        let rep = verify_theorem1(&pair, Tolerance::Relative(1e-30));
        assert!(rep.pass, "{}", rep.to_json());
        assert!(rep.clause("sqrt_identity").unwrap().pass);
    }

    fn instance() -> impl Strategy<Value = (Vec<Q>, Vec<Q>)> {
        (1usize..10).prop_flat_map(|n| {
            (
                proptest::collection::btree_set(-30i64..30, n),
                proptest::collection::vec((1i64..25, 1i64..25), n),
            )
                .prop_map(|(pts, ws)| {
                    (
                        pts.into_iter().map(|p| q(p, 3)).collect(),
                        ws.into_iter().map(|(a, b)| q(a, b)).collect(),
                    )
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn duality_holds_exactly((pts, ws) in instance()) {
            let g = Arc::new(make_grid(pts).unwrap());
            let w = WeightTable::new(g, ws).unwrap();
            let p = orthogonalize(&w, &Normalization::Monic).unwrap();
            let pair = dual_system(&p).unwrap();
            let rep = verify_theorem1(&pair, Tolerance::Exact);
            prop_assert!(rep.pass, "{}", rep.to_json());
        }

        #[test]
        fn double_dual_recovers_primal((pts, ws) in instance()) {
            let g = Arc::new(make_grid(pts).unwrap());
            let w = WeightTable::new(g, ws).unwrap();
            let p = orthogonalize(&w, &Normalization::Monic).unwrap();
            let pair = dual_system(&p).unwrap();
            let back = dual_system(pair.dual()).unwrap();
            prop_assert_eq!(back.dual_weight(), &w);
            for i in 0..=p.degree() {
                let ratio = back.dual().value(i, 0).clone() / p.value(i, 0).clone();
                for k in 0..=p.degree() {
                    prop_assert_eq!(back.dual().value(i, k).clone(), ratio.clone() * p.value(i, k).clone());
                }
            }
        }
    }
}
