//! Orthogonal polynomial systems on a grid, built by the Stieltjes
//! procedure, plus the interpolation machinery based on elementary
//! symmetric functions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, WeightTable};
use crate::hypernum::Scalar;

/// Scale of the polynomials returned by [`orthogonalize`].
#[derive(Clone, Debug, PartialEq)]
pub enum Normalization<S> {
    Monic,
    /// Prescribed leading coefficients `a_0, …, a_M` (all nonzero).
    LeadingCoeffs(Vec<S>),
}

/// `P_0, …, P_M` orthogonal with respect to a positive weight on the grid.
///
/// `P_i = a_i π_i` where `π_i` is the monic polynomial obeying
/// `π_{i+1}(x) = (x − α_i) π_i(x) − β_i π_{i−1}(x)`.
#[derive(Clone, Debug)]
pub struct OrthoSystem<S> {
    weight: WeightTable<S>,
    values: Vec<Vec<S>>,
    leading: Vec<S>,
    norms: Vec<S>,
    alpha: Vec<S>,
    beta: Vec<S>,
}

fn inner<S: Scalar>(f: &[S], g: &[S], w: &[S]) -> S {
    f.iter()
        .zip(g)
        .zip(w)
        .fold(S::zero(), |acc, ((a, b), c)| acc + a.clone() * b.clone() * c.clone())
}

/// Builds the orthogonal system for `w` under the requested normalization.
pub fn orthogonalize<S: Scalar>(
    w: &WeightTable<S>,
    normalization: &Normalization<S>,
) -> Result<OrthoSystem<S>> {
    let grid = w.grid();
    let xs = grid.points();
    let ws = w.values();
    let size = grid.len();

    let leading = match normalization {
        Normalization::Monic => vec![S::one(); size],
        Normalization::LeadingCoeffs(a) => {
            if a.len() != size {
                return Err(Error::LengthMismatch {
                    expected: size,
                    found: a.len(),
                });
            }
            if let Some(i) = a.iter().position(|c| c.is_zero()) {
                return Err(Error::InvalidArgument(format!("leading coefficient a_{i} is zero")));
            }
            a.clone()
        }
    };

    let mut monic: Vec<Vec<S>> = Vec::with_capacity(size);
    let mut monic_norms: Vec<S> = Vec::with_capacity(size);
    let mut alpha = Vec::with_capacity(size - 1);
    let mut beta = Vec::with_capacity(size - 1);

    monic.push(vec![S::one(); size]);
    monic_norms.push(ws.iter().cloned().fold(S::zero(), |a, b| a + b));

    for i in 0..size - 1 {
        let cur = &monic[i];
        let xcur: Vec<S> = cur.iter().zip(xs).map(|(c, x)| c.clone() * x.clone()).collect();
        let a_i = inner(&xcur, cur, ws) / monic_norms[i].clone();
        let b_i = if i == 0 {
            monic_norms[0].clone()
        } else {
            monic_norms[i].clone() / monic_norms[i - 1].clone()
        };
        let next: Vec<S> = (0..size)
            .map(|k| {
                let v = xcur[k].clone() - a_i.clone() * cur[k].clone();
                if i == 0 {
                    v
                } else {
                    v - b_i.clone() * monic[i - 1][k].clone()
                }
            })
            .collect();
        let norm = inner(&next, &next, ws);
        alpha.push(a_i);
        beta.push(b_i);
        monic.push(next);
        monic_norms.push(norm);
    }

    let values = monic
        .into_iter()
        .zip(&leading)
        .map(|(row, a)| row.into_iter().map(|v| v * a.clone()).collect())
        .collect();
    let norms = monic_norms
        .into_iter()
        .zip(&leading)
        .map(|(n, a)| n * a.clone() * a.clone())
        .collect();

    Ok(OrthoSystem {
        weight: w.clone(),
        values,
        leading,
        norms,
        alpha,
        beta,
    })
}

impl<S: Scalar> OrthoSystem<S> {
    pub fn grid(&self) -> &Arc<Grid<S>> {
        self.weight.grid()
    }

    pub fn weight(&self) -> &WeightTable<S> {
        &self.weight
    }

    /// `M`, the top degree.
    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    /// `V[i][k] = P_i(x_k)`.
    pub fn values(&self) -> &[Vec<S>] {
        &self.values
    }

    pub fn value(&self, i: usize, k: usize) -> &S {
        &self.values[i][k]
    }

    #[cfg(test)]
    pub(crate) fn values_mut(&mut self) -> &mut Vec<Vec<S>> {
        &mut self.values
    }

    /// Leading coefficients `a_i`.
    pub fn leading(&self) -> &[S] {
        &self.leading
    }

    /// Squared norms `p_i = Σ_k P_i(x_k)² w_k`.
    pub fn norms(&self) -> &[S] {
        &self.norms
    }

    /// Monic recurrence coefficients `α_0, …, α_{M−1}`.
    pub fn alpha(&self) -> &[S] {
        &self.alpha
    }

    /// Monic recurrence coefficients; `β_0 = Σ w_k`, `β_i = ‖π_i‖²/‖π_{i−1}‖²`.
    pub fn beta(&self) -> &[S] {
        &self.beta
    }

    /// `P_i(x)` at an arbitrary point, through the stored recurrence.
    pub fn evaluate(&self, i: usize, x: &S) -> Result<S> {
        if i > self.degree() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.degree() + 1,
            });
        }
        let mut prev = S::zero();
        let mut cur = S::one();
        for j in 0..i {
            let mut next = (x.clone() - self.alpha[j].clone()) * cur.clone();
            if j > 0 {
                next = next - self.beta[j].clone() * prev;
            }
            prev = cur;
            cur = next;
        }
        Ok(cur * self.leading[i].clone())
    }

    /// `Σ_{i<m} P_i(x_j) P_i(x_k) / p_i` (kernel without weight factors).
    pub fn kernel_sum(&self, m: usize, j: usize, k: usize) -> S {
        (0..m).fold(S::zero(), |acc, i| {
            acc + self.values[i][j].clone() * self.values[i][k].clone() / self.norms[i].clone()
        })
    }

    /// The same partial sum through the Christoffel–Darboux closed form,
    /// valid for `1 ≤ m ≤ M` and `j ≠ k`.
    pub fn cd_sum(&self, m: usize, j: usize, k: usize) -> Result<S> {
        let size = self.degree() + 1;
        for idx in [j, k] {
            if idx >= size {
                return Err(Error::IndexOutOfRange { index: idx, len: size });
            }
        }
        if m == 0 || m > self.degree() {
            return Err(Error::InvalidArgument(format!(
                "Christoffel-Darboux form needs 1 <= m <= {}, got {m}",
                self.degree()
            )));
        }
        if j == k {
            return Err(Error::InvalidArgument(
                "Christoffel-Darboux form is off-diagonal only".into(),
            ));
        }
        let v = &self.values;
        let xs = self.grid().points();
        let factor = self.leading[m - 1].clone() / (self.leading[m].clone() * self.norms[m - 1].clone());
        let numerator =
            v[m][j].clone() * v[m - 1][k].clone() - v[m - 1][j].clone() * v[m][k].clone();
        Ok(factor * numerator / (xs[j].clone() - xs[k].clone()))
    }
}

/// Kernel entry of order `m` at `(x_j, x_k)`, `j ≠ k`, via the
/// Christoffel–Darboux formula, in the requested weight form.
pub fn cd_kernel_offdiag<S: Scalar>(
    s: &OrthoSystem<S>,
    m: usize,
    j: usize,
    k: usize,
    form: KernelForm,
) -> Result<S> {
    let sum = s.cd_sum(m, j, k)?;
    weight_factor(s.weight(), j, k, form).map(|f| f * sum)
}

/// Weighting of a kernel entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelForm {
    /// `√(w_j w_k) · Σ …`; symmetric, needs square roots.
    Symmetric,
    /// `w_j · Σ …`; diagonal conjugate of the symmetric form, root-free.
    Conjugated,
}

pub(crate) fn weight_factor<S: Scalar>(
    w: &WeightTable<S>,
    j: usize,
    k: usize,
    form: KernelForm,
) -> Result<S> {
    match form {
        KernelForm::Conjugated => Ok(w.value(j).clone()),
        KernelForm::Symmetric => {
            let prod = w.value(j).clone() * w.value(k).clone();
            prod.sqrt().ok_or_else(|| Error::NotRepresentable(prod.to_string()))
        }
    }
}

/// `E_s = e_s(x_0, …, x_M)` for `s = 0..=M+1`.
#[derive(Clone, Debug)]
pub struct SymmetricTable<S> {
    points: Vec<S>,
    totals: Vec<S>,
}

impl<S: Scalar> SymmetricTable<S> {
    pub fn totals(&self) -> &[S] {
        &self.totals
    }

    /// `e_s(x_0, …, x̂_m, …, x_M)` for `s = 0..=M`, from
    /// `e_s(…x̂_m…) = E_s − x_m e_{s−1}(…x̂_m…)`.
    pub fn omitted(&self, m: usize) -> Vec<S> {
        let xm = &self.points[m];
        let mut out: Vec<S> = Vec::with_capacity(self.points.len());
        out.push(S::one());
        for s in 1..self.points.len() {
            let prev = out[s - 1].clone();
            out.push(self.totals[s].clone() - xm.clone() * prev);
        }
        out
    }
}

/// Elementary symmetric functions of the grid points, by expanding
/// `∏(1 + x_k t)` one factor at a time.
pub fn elementary_symmetric<S: Scalar>(g: &Grid<S>) -> SymmetricTable<S> {
    let mut e = vec![S::zero(); g.len() + 1];
    e[0] = S::one();
    for (count, x) in g.points().iter().enumerate() {
        for s in (1..=count + 1).rev() {
            e[s] = e[s].clone() + x.clone() * e[s - 1].clone();
        }
    }
    SymmetricTable {
        points: g.points().to_vec(),
        totals: e,
    }
}

/// Coefficients `c_0, …, c_M` (ascending powers) of the polynomial of degree
/// at most `M` through `(x_k, values_k)`:
/// `c_n = (−1)^{M−n} Σ_m values_m / π_m · e_{M−n}(x_0, …, x̂_m, …, x_M)`.
pub fn interpolation_leading_coeffs<S: Scalar>(g: &Grid<S>, values: &[S]) -> Result<Vec<S>> {
    if values.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            found: values.len(),
        });
    }
    let big_m = g.degree();
    let table = elementary_symmetric(g);
    let mut coeffs = vec![S::zero(); big_m + 1];
    for (m, val) in values.iter().enumerate() {
        let scaled = val.clone() / g.node_product(m).clone();
        let omitted = table.omitted(m);
        for (n, c) in coeffs.iter_mut().enumerate() {
            let term = scaled.clone() * omitted[big_m - n].clone();
            *c = if (big_m - n).is_multiple_of(2) {
                c.clone() + term
            } else {
                c.clone() - term
            };
        }
    }
    Ok(coeffs)
}
