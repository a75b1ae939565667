//! Krawtchouk and Hahn polynomials on `{0, …, N}`.
//!
//! Both families come with closed forms for values, leading coefficients,
//! squared norms and the dual weight. The verification routines check the
//! reflection identities
//!
//! ```text
//! K_n(x; p, N) = (−1)^x ((1−p)/p)^x K_{N−n}(x; 1−p, N)
//! H_n(x; α, β, N) = (−β−N)_x / (α+1)_x · H_{N−n}(x; −β−N−1, −α−N−1, N)
//! ```
//!
//! directly, through the Pfaff and Thomae transformations, and as instances of
//! the general duality on the generic orthogonal systems.

use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::duality::{dual_system, verify_theorem1, DualPair};
use crate::error::{Error, Result};
use crate::grid::{dual_weight, Grid, WeightTable};
use crate::hypernum::{
    binomial, binomial_shifted, factorial, pfaff_transform_lhs, pfaff_transform_rhs, pochhammer, powi,
    sign_power, thomae_transform_lhs, thomae_transform_rhs, HypTerminating, Scalar,
};
use crate::orthopoly::{orthogonalize, Normalization, OrthoSystem};
use crate::report::{ClauseCheck, ClauseResult, Tolerance, VerificationReport};

fn int<S: Scalar>(n: usize) -> S {
    S::from_i64(n as i64)
}

fn check_range(what: &str, value: usize, n: usize) -> Result<()> {
    if value > n {
        return Err(Error::InvalidArgument(format!("{what} = {value} exceeds N = {n}")));
    }
    Ok(())
}

/// Krawtchouk parameters: `0 < p < 1`, `N ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrawtchoukParams<S> {
    p: S,
    n: usize,
}

impl<S: Scalar> KrawtchoukParams<S> {
    pub fn new(p: S, n: usize) -> Result<Self> {
        if !(p.is_positive() && p < S::one()) {
            return Err(Error::InvalidArgument(format!("Krawtchouk p must lie in (0, 1), got {p}")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("Krawtchouk N must be positive".into()));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    #[allow(non_snake_case)]
    pub fn N(&self) -> usize {
        self.n
    }

    /// The same `N` with `p ↦ 1 − p`.
    pub fn reflected(&self) -> Self {
        Self {
            p: S::one() - self.p.clone(),
            n: self.n,
        }
    }

    /// Binomial weight `C(N, x) p^x (1−p)^{N−x}`.
    pub fn weight(&self) -> WeightTable<S> {
        let q = S::one() - self.p.clone();
        let values = (0..=self.n)
            .map(|x| binomial::<S>(self.n, x) * powi(&self.p, x) * powi(&q, self.n - x))
            .collect();
        WeightTable::new(Arc::new(Grid::integers(self.n)), values).expect("binomial weight is positive")
    }

    /// `C(N, x) (1−p)^x p^{N−x} / (N!² (p(1−p))^N)`.
    pub fn dual_weight_closed_form(&self) -> Vec<S> {
        let q = S::one() - self.p.clone();
        let scale = factorial::<S>(self.n) * factorial::<S>(self.n) * powi(&(self.p.clone() * q.clone()), self.n);
        (0..=self.n)
            .map(|x| binomial::<S>(self.n, x) * powi(&q, x) * powi(&self.p, self.n - x) / scale.clone())
            .collect()
    }

    /// `(−1)^N (1−p)^N N!`, the factor relating the dual system to
    /// `K_n(x; 1−p, N)`.
    pub fn dual_constant(&self) -> S {
        sign_power::<S>(self.n) * powi(&(S::one() - self.p.clone()), self.n) * factorial::<S>(self.n)
    }
}

/// `K_n(x; p, N) = 2F1(−n, −x; −N; 1/p)`.
pub fn krawtchouk_value<S: Scalar>(n: usize, x: usize, params: &KrawtchoukParams<S>) -> Result<S> {
    check_range("n", n, params.n)?;
    check_range("x", x, params.n)?;
    let h = HypTerminating::f21(
        -int::<S>(n),
        -int::<S>(x),
        -int::<S>(params.n),
        S::one() / params.p.clone(),
    )?;
    Ok(h.eval())
}

/// Leading coefficient `a_n = C(N,n)^{−1} (−1)^n / (n! p^n)` and squared norm
/// `p_n = C(N,n)^{−1} ((1−p)/p)^n`.
pub fn krawtchouk_data<S: Scalar>(n: usize, params: &KrawtchoukParams<S>) -> Result<(S, S)> {
    check_range("n", n, params.n)?;
    let p = &params.p;
    let c = binomial::<S>(params.n, n);
    let a = sign_power::<S>(n) / (c.clone() * factorial::<S>(n) * powi(p, n));
    let norm = powi(&((S::one() - p.clone()) / p.clone()), n) / c;
    Ok((a, norm))
}

fn table<S: Scalar>(size: usize, f: impl Fn(usize, usize) -> Result<S>) -> Result<Vec<Vec<S>>> {
    (0..size).map(|n| (0..size).map(|x| f(n, x)).collect()).collect()
}

/// Generic system built on a classical weight with the closed-form leading
/// coefficients, compared with the closed-form values and norms.
fn generic_consistency<S: Scalar>(
    report: &mut VerificationReport,
    system: &OrthoSystem<S>,
    values: &[Vec<S>],
    data: &[(S, S)],
    tol: Tolerance,
) {
    let mut vals = ClauseCheck::new("generic_values");
    let mut norms = ClauseCheck::new("generic_norms");
    for (n, row) in values.iter().enumerate() {
        for (x, v) in row.iter().enumerate() {
            vals.compare(&[n, x], system.value(n, x).clone(), v.clone());
        }
        norms.compare(&[n], system.norms()[n].clone(), data[n].1.clone());
    }
    report.push(vals.finish(tol));
    report.push(norms.finish(tol));
}

fn closed_form_dual<S: Scalar>(
    report: &mut VerificationReport,
    u: &WeightTable<S>,
    closed: &[S],
    tol: Tolerance,
) {
    let v = dual_weight(u);
    let mut check = ClauseCheck::new("dual_weight_closed_form");
    for (x, c) in closed.iter().enumerate() {
        check.compare(&[x], v.value(x).clone(), c.clone());
    }
    report.push(check.finish(tol));
}

/// `Q_n(x) = const · R_n(x)` over the whole table, where `R` is the reflected
/// family.
fn constant_check<S: Scalar>(pair: &DualPair<S>, reflected: &[Vec<S>], constant: &S, tol: Tolerance) -> ClauseResult {
    let mut check = ClauseCheck::new("normalization_constant");
    for (n, row) in reflected.iter().enumerate() {
        for (x, r) in row.iter().enumerate() {
            check.compare(&[n, x], pair.dual().value(n, x).clone(), constant.clone() * r.clone());
        }
    }
    check.finish(tol)
}

/// The Krawtchouk reflection identity, its Pfaff route, and its reading as
/// an instance of the general duality.
pub fn verify_identity_2<S: Scalar>(params: &KrawtchoukParams<S>, tol: Tolerance) -> Result<VerificationReport> {
    let big_n = params.n;
    let size = big_n + 1;
    let refl = params.reflected();
    let p = &params.p;
    let ratio = (S::one() - p.clone()) / p.clone();

    let k = table(size, |n, x| krawtchouk_value(n, x, params))?;
    let k_refl = table(size, |n, x| krawtchouk_value(n, x, &refl))?;

    let mut report = VerificationReport::new("identity_2");
    report.detail("p", p);
    report.detail("N", big_n);

    let mut eq = ClauseCheck::new("eq2");
    let mut pfaff = ClauseCheck::new("pfaff_route");
    let z = S::one() / p.clone();
    for n in 0..size {
        for x in 0..size {
            let rhs = sign_power::<S>(x) * powi(&ratio, x) * k_refl[big_n - n][x].clone();
            eq.compare(&[n, x], k[n][x].clone(), rhs.clone());
            let (a, b, c) = (-int::<S>(n), -int::<S>(x), -int::<S>(big_n));
            pfaff.compare(&[n, x], pfaff_transform_lhs(&a, &b, &c, &z)?, k[n][x].clone());
            pfaff.compare(&[n, x], pfaff_transform_rhs(&a, &b, &c, &z)?, rhs);
        }
    }
    report.push(eq.finish(tol));
    report.push(pfaff.finish(tol));

    let u = params.weight();
    closed_form_dual(&mut report, &u, &params.dual_weight_closed_form(), tol);

    let data: Vec<(S, S)> = (0..size).map(|n| krawtchouk_data(n, params)).collect::<Result<_>>()?;
    let leading: Vec<S> = data.iter().map(|d| d.0.clone()).collect();
    let system = orthogonalize(&u, &Normalization::LeadingCoeffs(leading))?;
    generic_consistency(&mut report, &system, &k, &data, tol);

    let pair = dual_system(&system)?;
    report.absorb("theorem1", verify_theorem1(&pair, tol));
    let constant = params.dual_constant();
    report.detail("normalization_constant", &constant);
    report.push(constant_check(&pair, &k_refl, &constant, tol));
    Ok(report)
}

/// Which of the two admissible parameter regions a Hahn family lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HahnBranch {
    /// `α, β > −1`: the weight is positive.
    Positive,
    /// `α, β < −N`: the weight has sign `(−1)^N`.
    Signed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HahnParams<S> {
    alpha: S,
    beta: S,
    n: usize,
    branch: HahnBranch,
}

impl<S: Scalar> HahnParams<S> {
    pub fn new(alpha: S, beta: S, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Hahn N must be positive".into()));
        }
        let minus_one = -S::one();
        let minus_n = -int::<S>(n);
        let branch = if alpha > minus_one && beta > minus_one {
            HahnBranch::Positive
        } else if alpha < minus_n && beta < minus_n {
            HahnBranch::Signed
        } else {
            return Err(Error::InvalidArgument(format!(
                "Hahn parameters need alpha, beta > -1 or alpha, beta < -N; got alpha = {alpha}, beta = {beta}, N = {n}"
            )));
        };
        Ok(Self { alpha, beta, n, branch })
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    #[allow(non_snake_case)]
    pub fn N(&self) -> usize {
        self.n
    }

    pub fn branch(&self) -> HahnBranch {
        self.branch
    }

    /// `(α, β) ↦ (−β−N−1, −α−N−1)`, which swaps the two branches.
    pub fn reflected(&self) -> Self {
        let shift = int::<S>(self.n + 1);
        let branch = match self.branch {
            HahnBranch::Positive => HahnBranch::Signed,
            HahnBranch::Signed => HahnBranch::Positive,
        };
        Self {
            alpha: -self.beta.clone() - shift.clone(),
            beta: -self.alpha.clone() - shift,
            n: self.n,
            branch,
        }
    }

    /// `C(α+x, x) C(β+N−x, N−x)` at every node.
    pub fn weight_values(&self) -> Vec<S> {
        (0..=self.n)
            .map(|x| binomial_shifted(&self.alpha, x) * binomial_shifted(&self.beta, self.n - x))
            .collect()
    }

    /// The weight as a table; only the positive branch is admissible.
    pub fn weight(&self) -> Result<WeightTable<S>> {
        WeightTable::new(Arc::new(Grid::integers(self.n)), self.weight_values())
    }

    /// `(−1)^N / ((α+1)_N (β+1)_N) · C(α'+x, x) C(β'+N−x, N−x)` with the
    /// reflected parameters `α', β'`.
    pub fn dual_weight_closed_form(&self) -> Vec<S> {
        let one = S::one();
        let prefactor = sign_power::<S>(self.n)
            / (pochhammer(&(self.alpha.clone() + one.clone()), self.n)
                * pochhammer(&(self.beta.clone() + one), self.n));
        self.reflected()
            .weight_values()
            .into_iter()
            .map(|w| prefactor.clone() * w)
            .collect()
    }

    /// `(−1)^N (β+1)_N`.
    pub fn dual_constant(&self) -> S {
        sign_power::<S>(self.n) * pochhammer(&(self.beta.clone() + S::one()), self.n)
    }

    /// `(−1)^N (β+1)^N`, the power reading of the same constant.
    pub fn dual_constant_power(&self) -> S {
        sign_power::<S>(self.n) * powi(&(self.beta.clone() + S::one()), self.n)
    }
}

/// `H_n(x; α, β, N) = 3F2(−n, n+α+β+1, −x; α+1, −N; 1)`.
pub fn hahn_value<S: Scalar>(n: usize, x: usize, params: &HahnParams<S>) -> Result<S> {
    check_range("n", n, params.n)?;
    check_range("x", x, params.n)?;
    let h = HypTerminating::f32(
        -int::<S>(n),
        int::<S>(n + 1) + params.alpha.clone() + params.beta.clone(),
        -int::<S>(x),
        params.alpha.clone() + S::one(),
        -int::<S>(params.n),
        S::one(),
    )?;
    Ok(h.eval())
}

/// Leading coefficient `a_n = (n+α+β+1)_n / ((α+1)_n (−N)_n)` and squared norm
/// `p_n = (−1)^n (n+α+β+1)_{N+1} (β+1)_n n! / ((2n+α+β+1) (α+1)_n (−N)_n N!)`.
/// At `n = 0` the norm is taken in the cancelled form `(α+β+2)_N / N!`.
pub fn hahn_data<S: Scalar>(n: usize, params: &HahnParams<S>) -> Result<(S, S)> {
    check_range("n", n, params.n)?;
    if params.branch != HahnBranch::Positive {
        return Err(Error::InvalidArgument("Hahn norms are defined for alpha, beta > -1".into()));
    }
    let (alpha, beta) = (&params.alpha, &params.beta);
    let one = S::one();
    let sum = alpha.clone() + beta.clone();
    let a1 = pochhammer(&(alpha.clone() + one.clone()), n);
    let minus_n = pochhammer(&-int::<S>(params.n), n);
    let a = pochhammer(&(int::<S>(n + 1) + sum.clone()), n) / (a1.clone() * minus_n.clone());
    let norm = if n == 0 {
        pochhammer(&(sum + int::<S>(2)), params.n) / factorial::<S>(params.n)
    } else {
        sign_power::<S>(n)
            * pochhammer(&(int::<S>(n + 1) + sum.clone()), params.n + 1)
            * pochhammer(&(beta.clone() + one), n)
            * factorial::<S>(n)
            / ((int::<S>(2 * n + 1) + sum) * a1 * minus_n * factorial::<S>(params.n))
    };
    Ok((a, norm))
}

/// The Hahn reflection identity, its Thomae route where no Gamma pole
/// intervenes, the dual-weight closed form and the duality instance.
///
/// The normalization constant of the dual system is measured, and both the
/// Pochhammer reading `(−1)^N (β+1)_N` and the power reading
/// `(−1)^N (β+1)^N` are reported in the details.
pub fn verify_identity_3<S: Scalar>(params: &HahnParams<S>, tol: Tolerance) -> Result<VerificationReport> {
    if params.branch != HahnBranch::Positive {
        return Err(Error::InvalidArgument("identity 3 is checked from the alpha, beta > -1 side".into()));
    }
    let big_n = params.n;
    let size = big_n + 1;
    let refl = params.reflected();
    let (alpha, beta) = (&params.alpha, &params.beta);
    let one = S::one();

    let h = table(size, |n, x| hahn_value(n, x, params))?;
    let h_refl = table(size, |n, x| hahn_value(n, x, &refl))?;

    let mut report = VerificationReport::new("identity_3");
    report.detail("alpha", alpha);
    report.detail("beta", beta);
    report.detail("N", big_n);

    let mut eq = ClauseCheck::new("eq3");
    let mut thomae = ClauseCheck::new("thomae_route");
    let mut skipped = 0usize;
    let s_shift = -beta.clone() - int::<S>(big_n);
    for n in 0..size {
        for x in 0..size {
            let factor = pochhammer(&s_shift, x) / pochhammer(&(alpha.clone() + one.clone()), x);
            let rhs = factor * h_refl[big_n - n][x].clone();
            eq.compare(&[n, x], h[n][x].clone(), rhs.clone());

            let a = -int::<S>(n);
            let b = int::<S>(n + 1) + alpha.clone() + beta.clone();
            let c = -int::<S>(x);
            let d = alpha.clone() + one.clone();
            let e = -int::<S>(big_n);
            match thomae_transform_rhs(&a, &b, &c, &d, &e) {
                Ok(t) => {
                    thomae.compare(&[n, x], thomae_transform_lhs(&a, &b, &c, &d, &e)?, h[n][x].clone());
                    thomae.compare(&[n, x], t, rhs);
                }
                Err(Error::GammaPole(_)) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    report.detail("thomae_skipped", skipped);
    report.push(eq.finish(tol));
    report.push(thomae.finish(tol));

    let u = params.weight()?;
    closed_form_dual(&mut report, &u, &params.dual_weight_closed_form(), tol);

    let data: Vec<(S, S)> = (0..size).map(|n| hahn_data(n, params)).collect::<Result<_>>()?;
    let leading: Vec<S> = data.iter().map(|d| d.0.clone()).collect();
    let system = orthogonalize(&u, &Normalization::LeadingCoeffs(leading))?;
    generic_consistency(&mut report, &system, &h, &data, tol);

    let pair = dual_system(&system)?;
    report.absorb("theorem1", verify_theorem1(&pair, tol));

    // H_n(0) = 1, so Q_n(0) is the constant itself
    let measured = pair.dual().value(0, 0).clone();
    let pochhammer_reading = params.dual_constant();
    let power_reading = params.dual_constant_power();
    report.detail("normalization_constant_measured", &measured);
    report.detail("normalization_constant_pochhammer", &pochhammer_reading);
    report.detail("normalization_constant_power", &power_reading);
    let reading = match (
        constant_check(&pair, &h_refl, &pochhammer_reading, tol).pass,
        constant_check(&pair, &h_refl, &power_reading, tol).pass,
    ) {
        (true, true) => "both",
        (true, false) => "pochhammer",
        (false, true) => "power",
        (false, false) => "neither",
    };
    report.detail("normalization_constant_reading", reading);
    report.push(constant_check(&pair, &h_refl, &pochhammer_reading, tol));
    Ok(report)
}

/// Deviation between Hahn at `α = pt, β = (1−p)t` and Krawtchouk at `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub t: String,
    pub max_deviation: String,
    pub max_deviation_f64: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub p: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log deviation` against `log t`.
    pub slope: f64,
    pub expected_slope: f64,
    pub slope_tolerance: f64,
    pub pass: bool,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Exact maximal deviation over `0 ≤ n, x ≤ N` for each `t`, and the fitted
/// log–log slope, expected to be `−1 ± 0.1`.
pub fn limit_transition_check(p: &BigRational, n: usize, t_values: &[BigRational]) -> Result<ConvergenceReport> {
    if t_values.len() < 2 {
        return Err(Error::InvalidArgument("limit check needs at least two values of t".into()));
    }
    if !t_values[0].is_positive() || t_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("t values must be positive and increasing".into()));
    }
    let kraw = KrawtchoukParams::new(p.clone(), n)?;
    let k = table(n + 1, |i, x| krawtchouk_value(i, x, &kraw))?;
    let q = <BigRational as Scalar>::one() - p.clone();
    let mut rows = Vec::with_capacity(t_values.len());
    for t in t_values {
        let hahn = HahnParams::new(p.clone() * t.clone(), q.clone() * t.clone(), n)?;
        let mut max = <BigRational as Scalar>::zero();
        for (i, row) in k.iter().enumerate() {
            for (x, kv) in row.iter().enumerate() {
                let d = (hahn_value(i, x, &hahn)? - kv.clone()).abs();
                if d > max {
                    max = d;
                }
            }
        }
        rows.push(ConvergenceRow {
            t: t.to_string(),
            max_deviation_f64: max.to_f64(),
            max_deviation: max.to_string(),
        });
    }
    let xs: Vec<f64> = t_values.iter().map(|t| t.to_f64().ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.max_deviation_f64.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let (expected_slope, slope_tolerance) = (-1.0, 0.1);
    Ok(ConvergenceReport {
        p: p.to_string(),
        n,
        pass: slope.is_finite() && (slope - expected_slope).abs() <= slope_tolerance,
        rows,
        slope,
        expected_slope,
        slope_tolerance,
    })
}
