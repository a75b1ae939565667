//! Discrete orthogonal polynomial ensembles on a grid.
//!
//! An ensemble of order `m` is the probability measure on `m`-point subsets
//! `A` of the grid proportional to `∏_{x<y ∈ A}(x−y)² · ∏_{x∈A} w(x)`. Its
//! correlation functions are computed two ways: by summing the measure over
//! supersets (the oracle), and as principal minors of the kernel
//! `K(x, y) = √(w(x)w(y)) Σ_{i<m} P_i(x)P_i(y)/p_i`.
//!
//! Subsets are bitmasks over node indices, enumerated in colexicographic
//! order (ascending mask value).

use std::collections::HashMap;
use std::sync::Arc;

use crate::duality::DualPair;
use crate::error::{Error, Result};
use crate::grid::{Grid, WeightTable};
use crate::hypernum::Scalar;
use crate::matrix::Matrix;
use crate::orthopoly::{weight_factor, KernelForm, OrthoSystem};
use crate::report::{ClauseCheck, Tolerance, VerificationReport};

pub const DEFAULT_BUDGET: u128 = 1_000_000;
const MAX_POINTS: usize = 63;

pub(crate) fn binomial_count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k`-subsets of `{0..n}` as ascending bitmasks (colex order).
pub(crate) fn subsets_colex(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut out = Vec::with_capacity(binomial_count(n, k) as usize);
    let mut x = (1u64 << k) - 1;
    while x < limit {
        out.push(x);
        // Gosper's hack: next integer with the same popcount
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

pub(crate) fn mask_of(indices: &[usize], n: usize) -> Result<u64> {
    let mut mask = 0u64;
    for &i in indices {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if mask >> i & 1 == 1 {
            return Err(Error::InvalidArgument(format!("index {i} repeated in subset")));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

pub(crate) fn indices_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

fn check_size<S: Scalar>(grid: &Grid<S>) -> Result<()> {
    if grid.points().len() > MAX_POINTS {
        return Err(Error::InvalidArgument(format!(
            "subset enumeration supports at most {MAX_POINTS} points"
        )));
    }
    Ok(())
}

/// Exact probability measure on the `m`-point subsets of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetMeasure<S> {
    grid: Arc<Grid<S>>,
    cardinality: usize,
    masks: Vec<u64>,
    probs: Vec<S>,
}

impl<S: Scalar> SubsetMeasure<S> {
    pub fn grid(&self) -> &Arc<Grid<S>> {
        &self.grid
    }

    /// Number of points in each subset of the support.
    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// `(subset indices, probability)` in colex order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &S)> + '_ {
        self.masks.iter().map(|&m| indices_of(m)).zip(&self.probs)
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn probabilities(&self) -> &[S] {
        &self.probs
    }

    /// Probability of one subset; zero off the support.
    pub fn probability(&self, subset: &[usize]) -> Result<S> {
        let mask = mask_of(subset, self.grid.len())?;
        Ok(self
            .masks
            .binary_search(&mask)
            .map(|i| self.probs[i].clone())
            .unwrap_or_else(|_| S::zero()))
    }

    pub fn total(&self) -> S {
        self.probs.iter().cloned().fold(S::zero(), |a, b| a + b)
    }
}

/// The orthogonal polynomial ensemble of order `m`, `1 ≤ m ≤ M`, normalized
/// by exact summation over all `C(M+1, m)` subsets.
pub fn ensemble<S: Scalar>(w: &WeightTable<S>, m: usize, budget: u128) -> Result<SubsetMeasure<S>> {
    let grid = w.grid();
    check_size(grid)?;
    let big_m = grid.degree();
    if m == 0 || m > big_m {
        return Err(Error::InvalidArgument(format!(
            "ensemble order must satisfy 1 <= m <= M = {big_m}, got {m}"
        )));
    }
    let required = binomial_count(grid.len(), m);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let xs = grid.points();
    let masks = subsets_colex(grid.len(), m);
    let unnormalized: Vec<S> = masks
        .iter()
        .map(|&mask| {
            let idx = indices_of(mask);
            let mut v = S::one();
            for (a, &i) in idx.iter().enumerate() {
                v = v * w.value(i).clone();
                for &j in &idx[a + 1..] {
                    let d = xs[i].clone() - xs[j].clone();
                    v = v * d.clone() * d;
                }
            }
            v
        })
        .collect();
    let z = unnormalized.iter().cloned().fold(S::zero(), |a, b| a + b);
    let probs = unnormalized.into_iter().map(|v| v / z.clone()).collect();
    Ok(SubsetMeasure {
        grid: Arc::clone(grid),
        cardinality: m,
        masks,
        probs,
    })
}

/// `μ̄(A) = μ(X ∖ A)`, a measure on `(M+1−m)`-subsets.
pub fn complement_measure<S: Scalar>(mu: &SubsetMeasure<S>) -> SubsetMeasure<S> {
    let n = mu.grid.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // complementing reverses the ascending mask order
    let masks = mu.masks.iter().rev().map(|m| full & !m).collect();
    let probs = mu.probs.iter().rev().cloned().collect();
    SubsetMeasure {
        grid: Arc::clone(&mu.grid),
        cardinality: n - mu.cardinality,
        masks,
        probs,
    }
}

/// `ρ(A | μ) = Σ_{B ⊇ A} μ(B)`.
pub fn correlation_bruteforce<S: Scalar>(mu: &SubsetMeasure<S>, subset: &[usize]) -> Result<S> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("correlation needs a non-empty subset".into()));
    }
    let a = mask_of(subset, mu.grid.len())?;
    Ok(mu
        .masks
        .iter()
        .zip(&mu.probs)
        .filter(|(&b, _)| b & a == a)
        .fold(S::zero(), |acc, (_, p)| acc + p.clone()))
}

/// `Σ_{D ⊆ A} (−1)^{|D|} ρ(D | μ)` with `ρ(∅ | μ)` the total mass. Equals the
/// probability that the random subset misses `A`.
pub fn inclusion_exclusion<S: Scalar>(mu: &SubsetMeasure<S>, subset: &[usize]) -> Result<S> {
    let a = mask_of(subset, mu.grid.len())?;
    let mut acc = S::zero();
    let mut d = a;
    loop {
        let term = if d == 0 {
            mu.total()
        } else {
            correlation_bruteforce(mu, &indices_of(d))?
        };
        acc = if d.count_ones() % 2 == 0 { acc + term } else { acc - term };
        if d == 0 {
            break;
        }
        d = (d - 1) & a;
    }
    Ok(acc)
}

/// The correlation kernel of order `m` as a dense matrix over the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<S> {
    weight: WeightTable<S>,
    order: usize,
    form: KernelForm,
    entries: Matrix<S>,
}

impl<S: Scalar> KernelMatrix<S> {
    /// Rank of the projection (`m`, or `M+1−m` after complementation).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn form(&self) -> KernelForm {
        self.form
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> &S {
        self.entries.get(j, k)
    }

    pub fn weight(&self) -> &WeightTable<S> {
        &self.weight
    }

    pub fn grid(&self) -> &Arc<Grid<S>> {
        self.weight.grid()
    }
}

/// `K^{(m)}` for `0 ≤ m ≤ M+1`. Diagonal and off-diagonal entries both use
/// the direct sum over `i < m`.
pub fn kernel<S: Scalar>(s: &OrthoSystem<S>, m: usize, form: KernelForm) -> Result<KernelMatrix<S>> {
    let size = s.degree() + 1;
    if m > size {
        return Err(Error::InvalidArgument(format!(
            "kernel order must satisfy 0 <= m <= M+1 = {size}, got {m}"
        )));
    }
    let mut factors = Vec::with_capacity(size * size);
    for j in 0..size {
        for k in 0..size {
            factors.push(weight_factor(s.weight(), j, k, form)?);
        }
    }
    let entries = Matrix::from_fn(size, |j, k| factors[j * size + k].clone() * s.kernel_sum(m, j, k));
    Ok(KernelMatrix {
        weight: s.weight().clone(),
        order: m,
        form,
        entries,
    })
}

/// `det [K(x_a, x_b)]_{a,b ∈ A}`.
pub fn correlation_determinantal<S: Scalar>(k: &KernelMatrix<S>, subset: &[usize]) -> Result<S> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("correlation needs a non-empty subset".into()));
    }
    mask_of(subset, k.entries.size())?;
    Ok(k.entries.principal(subset).det())
}

/// `I − K`, the kernel of the complementary process.
pub fn complement_kernel<S: Scalar>(k: &KernelMatrix<S>) -> KernelMatrix<S> {
    KernelMatrix {
        weight: k.weight.clone(),
        order: k.entries.size() - k.order,
        form: k.form,
        entries: k.entries.complement(),
    }
}

/// Projection laws of a kernel: `K² = K`, `trace K = order`, symmetry
/// (`Kᵀ = K`, or `Kᵀ = W⁻¹ K W` for the conjugated form), and on exact
/// backends `rank K = order`.
pub fn verify_kernel_laws<S: Scalar>(k: &KernelMatrix<S>, tol: Tolerance) -> VerificationReport {
    let mut report = VerificationReport::new("kernel_laws");
    let n = k.entries.size();
    let sq = k.entries.mul(&k.entries);
    let mut idem = ClauseCheck::new("idempotent");
    let mut sym = ClauseCheck::new("symmetry");
    for j in 0..n {
        for l in 0..n {
            idem.compare(&[j, l], sq.get(j, l).clone(), k.get(j, l).clone());
            let rhs = match k.form {
                KernelForm::Symmetric => k.get(l, j).clone(),
                KernelForm::Conjugated => {
                    k.get(l, j).clone() * k.weight.value(j).clone() / k.weight.value(l).clone()
                }
            };
            sym.compare(&[j, l], k.get(j, l).clone(), rhs);
        }
    }
    let mut trace = ClauseCheck::new("trace");
    trace.compare(&[], k.entries.trace(), S::from_i64(k.order as i64));
    report.push(idem.finish(tol));
    report.push(trace.finish(tol));
    if S::EXACT {
        let mut rank = ClauseCheck::<S>::new("rank");
        rank.flag(&[], k.entries.rank() == k.order);
        report.push(rank.finish(tol));
    }
    report.push(sym.finish(tol));
    report
}

/// One subset's correlation computed both ways, for the ensemble and its
/// complement.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRow<S> {
    pub subset: Vec<usize>,
    pub bruteforce: S,
    pub determinantal: S,
    pub complement_bruteforce: S,
    pub complement_determinantal: S,
}

/// Correlations of `P_w^{(m)}` and its complement for all subsets with
/// `1 ≤ |A| ≤ max_size`, in colex order by size.
pub fn correlation_table<S: Scalar>(
    s: &OrthoSystem<S>,
    m: usize,
    max_size: usize,
    form: KernelForm,
    budget: u128,
) -> Result<Vec<CorrelationRow<S>>> {
    let mu = ensemble(s.weight(), m, budget)?;
    let comp = complement_measure(&mu);
    let k = kernel(s, m, form)?;
    let kbar = complement_kernel(&k);
    let n = s.grid().len();
    let max_size = max_size.min(n);
    let required: u128 = (1..=max_size).map(|r| binomial_count(n, r)).sum();
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut rows = Vec::new();
    for size in 1..=max_size {
        for mask in subsets_colex(n, size) {
            let subset = indices_of(mask);
            rows.push(CorrelationRow {
                bruteforce: correlation_bruteforce(&mu, &subset)?,
                determinantal: correlation_determinantal(&k, &subset)?,
                complement_bruteforce: correlation_bruteforce(&comp, &subset)?,
                complement_determinantal: correlation_determinantal(&kbar, &subset)?,
                subset,
            });
        }
    }
    Ok(rows)
}

/// Determinantal correlations against the brute-force oracle, for the
/// ensemble and its complement, plus vanishing above order `m` and the
/// inclusion–exclusion identity for the complement.
pub fn verify_correlations<S: Scalar>(
    s: &OrthoSystem<S>,
    m: usize,
    max_size: usize,
    tol: Tolerance,
    budget: u128,
) -> Result<VerificationReport> {
    let form = if S::EXACT { KernelForm::Conjugated } else { KernelForm::Symmetric };
    let rows = correlation_table(s, m, max_size, form, budget)?;
    let total = ensemble(s.weight(), m, budget)?.total();
    let n = s.grid().len();
    let rho: HashMap<u64, &S> = rows
        .iter()
        .map(|r| (mask_of(&r.subset, n).expect("valid subset"), &r.bruteforce))
        .collect();

    let mut report = VerificationReport::new("correlations");
    let mut direct = ClauseCheck::new("determinantal");
    let mut complement = ClauseCheck::new("complement_determinantal");
    let mut vanish = ClauseCheck::new("vanishing_above_m");
    let mut incl = ClauseCheck::new("inclusion_exclusion");
    for row in &rows {
        direct.compare(&row.subset, row.determinantal.clone(), row.bruteforce.clone());
        complement.compare(
            &row.subset,
            row.complement_determinantal.clone(),
            row.complement_bruteforce.clone(),
        );
        if row.subset.len() > m {
            vanish.compare(&row.subset, row.determinantal.clone(), S::zero());
            vanish.compare(&row.subset, row.bruteforce.clone(), S::zero());
        }
        // every subset of A is itself a tabulated row
        let a = mask_of(&row.subset, n)?;
        let mut alternating = S::zero();
        let mut d = a;
        loop {
            let term = if d == 0 { total.clone() } else { rho[&d].clone() };
            alternating = if d.count_ones() % 2 == 0 { alternating + term } else { alternating - term };
            if d == 0 {
                break;
            }
            d = (d - 1) & a;
        }
        incl.compare(&row.subset, alternating, row.complement_bruteforce.clone());
    }
    report.detail("subsets", rows.len());
    report.push(direct.finish(tol));
    report.push(complement.finish(tol));
    report.push(vanish.finish(tol));
    report.push(incl.finish(tol));
    Ok(report)
}

/// `P_u^{(m)} = Q_v^{(M−m+1)}` subset by subset.
pub fn verify_prop2<S: Scalar>(
    u: &WeightTable<S>,
    m: usize,
    tol: Tolerance,
    budget: u128,
) -> Result<VerificationReport> {
    let v = crate::grid::dual_weight(u);
    let big_m = u.grid().degree();
    let p_u = ensemble(u, m, budget)?;
    let q_v = complement_measure(&ensemble(&v, big_m + 1 - m, budget)?);

    let mut report = VerificationReport::new("prop2");
    let mut support = ClauseCheck::<S>::new("same_support");
    support.flag(&[], p_u.masks() == q_v.masks());
    report.push(support.finish(tol));
    let mut eq = ClauseCheck::new("measure_equality");
    for ((mask, a), b) in p_u.masks().iter().zip(p_u.probabilities()).zip(q_v.probabilities()) {
        eq.compare(&indices_of(*mask), a.clone(), b.clone());
    }
    report.push(eq.finish(tol));
    Ok(report)
}

/// `K_u^{(m)} = D (I − K_v^{(M−m+1)}) D` with `D = diag(ε)`.
///
/// Inexact backends compare the symmetric kernels entrywise. Exact backends
/// work with the conjugated kernels and check the equivalent root-free
/// statements: equal principal minors, equal diagonals, equal squared
/// off-diagonal entries with the sign pattern `−ε_j ε_k`, and the linear
/// relation `u_k π_j π_k K̃_u[j][k] = −K̃_v[j][k] / v_j`. Principal minors of
/// all orders are enumerated while `2^{M+1} − 1 ≤ budget`; otherwise the
/// lowest orders that fit are checked.
pub fn verify_theorem5<S: Scalar>(
    pair: &DualPair<S>,
    m: usize,
    tol: Tolerance,
    budget: u128,
) -> Result<VerificationReport> {
    let big_m = pair.degree();
    if m > big_m {
        return Err(Error::InvalidArgument(format!(
            "kernel duality is stated for 0 <= m <= M = {big_m}, got {m}"
        )));
    }
    let n = big_m + 1;
    let grid = pair.primal().grid();
    let eps = grid.epsilons();
    let mut report = VerificationReport::new("theorem5");
    report.detail("m", m);

    if !S::EXACT {
        let ku = kernel(pair.primal(), m, KernelForm::Symmetric)?;
        let kv = kernel(pair.dual(), n - m, KernelForm::Symmetric)?;
        let kvbar = complement_kernel(&kv);
        let mut lit = ClauseCheck::new("matrix_identity").with_scale_floor(S::one());
        for j in 0..n {
            for k in 0..n {
                let rhs = S::from_i64((eps[j] * eps[k]) as i64) * kvbar.get(j, k).clone();
                lit.compare(&[j, k], ku.get(j, k).clone(), rhs);
            }
        }
        report.push(lit.finish(tol));
        return Ok(report);
    }

    let ku = kernel(pair.primal(), m, KernelForm::Conjugated)?;
    let kv = kernel(pair.dual(), n - m, KernelForm::Conjugated)?;
    let kvbar = complement_kernel(&kv);
    let u = pair.primal_weight().values();
    let v = pair.dual_weight().values();

    let mut diag = ClauseCheck::new("diagonal");
    let mut squares = ClauseCheck::new("offdiag_squared");
    let mut signs = ClauseCheck::<S>::new("offdiag_sign");
    let mut linear = ClauseCheck::new("offdiag_linear");
    for j in 0..n {
        diag.compare(&[j], ku.get(j, j).clone(), kvbar.get(j, j).clone());
        for k in 0..n {
            if j == k {
                continue;
            }
            let su = ku.get(j, k).clone() * ku.get(k, j).clone();
            let sv = kv.get(j, k).clone() * kv.get(k, j).clone();
            squares.compare(&[j, k], su, sv);
            let expected = -eps[j] * eps[k] * kv.get(j, k).sign();
            signs.flag(&[j, k], ku.get(j, k).sign() == expected);
            let lhs = u[k].clone()
                * grid.node_product(j).clone()
                * grid.node_product(k).clone()
                * ku.get(j, k).clone();
            linear.compare(&[j, k], lhs, -(kv.get(j, k).clone() / v[j].clone()));
        }
    }

    let mut minors = ClauseCheck::new("principal_minors");
    let mut covered = 0;
    let mut spent: u128 = 0;
    for size in 1..=n {
        let count = binomial_count(n, size);
        if spent + count > budget {
            break;
        }
        spent += count;
        covered = size;
        for mask in subsets_colex(n, size) {
            let idx = indices_of(mask);
            minors.compare(
                &idx,
                ku.entries().principal(&idx).det(),
                kvbar.entries().principal(&idx).det(),
            );
        }
    }
    report.detail("minor_orders_checked", covered);
    report.detail("minors_checked", spent);
    report.push(diag.finish(tol));
    report.push(squares.finish(tol));
    report.push(signs.finish(tol));
    report.push(linear.finish(tol));
    report.push(minors.finish(tol));
    Ok(report)
}
