//! Verification reports: one clause per identity, each with its maximal
//! residual and the offending indices.

use serde::Serialize;

use crate::hypernum::Scalar;

/// How a clause compares the two sides of an identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// Residual must be exactly zero.
    Exact,
    /// Normwise relative residual `max|l−r| / max(max|l|, max|r|)` must not
    /// exceed the bound. A clause may raise the denominator to a known floor.
    Relative(f64),
}

impl Tolerance {
    /// Exact for exact backends, `Relative(tol)` otherwise.
    pub fn for_backend<S: Scalar>(tol: f64) -> Self {
        if S::EXACT {
            Tolerance::Exact
        } else {
            Tolerance::Relative(tol)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub max_residual: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub report: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<(String, String)>,
    pub clauses: Vec<ClauseResult>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            report: name.into(),
            pass: true,
            details: Vec::new(),
            clauses: Vec::new(),
        }
    }

    pub fn push(&mut self, clause: ClauseResult) {
        self.pass &= clause.pass;
        self.clauses.push(clause);
    }

    pub fn detail(&mut self, key: impl Into<String>, value: impl ToString) {
        self.details.push((key.into(), value.to_string()));
    }

    /// Appends another report's clauses under `prefix/`.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.clauses {
            c.clause = format!("{prefix}/{}", c.clause);
            self.push(c);
        }
        for (k, v) in other.details {
            self.details.push((format!("{prefix}/{k}"), v));
        }
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

type EntryTest<S> = Box<dyn Fn(&S) -> bool>;

/// Accumulates `lhs ≟ rhs` comparisons for one clause.
pub struct ClauseCheck<S> {
    name: String,
    entries: Vec<(Vec<usize>, S, S)>,
    flags: Vec<(Vec<usize>, bool)>,
    scale_floor: Option<S>,
}

impl<S: Scalar> ClauseCheck<S> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            entries: Vec::new(),
            flags: Vec::new(),
            scale_floor: None,
        }
    }

    /// Lower bound for the normwise scale. Use it when the natural size of
    /// the compared quantities is known and both sides may vanish, as for
    /// projection kernels whose entries live on the scale of `I`.
    pub fn with_scale_floor(mut self, floor: S) -> Self {
        self.scale_floor = Some(floor);
        self
    }

    pub fn compare(&mut self, index: &[usize], lhs: S, rhs: S) {
        self.entries.push((index.to_vec(), lhs, rhs));
    }

    /// Records a boolean condition (sign patterns and the like).
    pub fn flag(&mut self, index: &[usize], ok: bool) {
        self.flags.push((index.to_vec(), ok));
    }

    pub fn finish(self, tol: Tolerance) -> ClauseResult {
        let mut violations: Vec<Vec<usize>> = self
            .flags
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(i, _)| i.clone())
            .collect();

        let mut max_diff = S::zero();
        let mut scale = self.scale_floor.clone().unwrap_or_else(S::zero);
        let diffs: Vec<S> = self
            .entries
            .iter()
            .map(|(_, l, r)| {
                for v in [l.abs(), r.abs()] {
                    if v > scale {
                        scale = v;
                    }
                }
                let d = (l.clone() - r.clone()).abs();
                if d > max_diff {
                    max_diff = d.clone();
                }
                d
            })
            .collect();

        let (residual, entry_ok): (String, EntryTest<S>) = match tol {
            Tolerance::Exact => (max_diff.to_string(), Box::new(|d: &S| d.is_zero())),
            Tolerance::Relative(bound) => {
                let rel = if scale.is_zero() {
                    S::zero()
                } else {
                    max_diff.clone() / scale.clone()
                };
                let scale = scale.clone();
                (
                    rel.to_string(),
                    Box::new(move |d: &S| d.is_zero() || (d.clone() / scale.clone()).to_f64() <= bound),
                )
            }
        };
        for ((index, _, _), d) in self.entries.iter().zip(&diffs) {
            if !entry_ok(d) {
                violations.push(index.clone());
            }
        }
        let flag_failures = self.flags.iter().filter(|(_, ok)| !ok).count();
        let max_residual = if self.entries.is_empty() {
            flag_failures.to_string()
        } else {
            residual
        };
        ClauseResult {
            clause: self.name,
            max_residual,
            pass: violations.is_empty(),
            violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypernum::{Float, FloatContext};
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn exact_clause_reports_offenders() {
        let mut c = ClauseCheck::<Q>::new("demo");
        c.compare(&[0, 1], Q::from_i64(2), Q::from_i64(2));
        c.compare(&[1, 0], Q::from_i64(2), Q::from_i64(3));
        let r = c.finish(Tolerance::Exact);
        assert!(!r.pass);
        assert_eq!(r.max_residual, "1");
        assert_eq!(r.violations, vec![vec![1, 0]]);
    }

    #[test]
    fn relative_clause_is_normwise() {
        let ctx = FloatContext::default();
        let tiny = Float::from_rational(&Q::new(1.into(), num_traits::pow(10.into(), 60)), &ctx);
        let mut c = ClauseCheck::<Float>::new("demo");
        c.compare(&[0], Float::from_i64(1), Float::from_i64(1) + tiny.clone());
        c.compare(&[1], Float::from_i64(0), tiny);
        let r = c.finish(Tolerance::Relative(1e-30));
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn flags_count_as_residual() {
        let mut c = ClauseCheck::<Q>::new("signs");
        c.flag(&[0, 1], true);
        c.flag(&[1, 2], false);
        let r = c.finish(Tolerance::Exact);
        assert_eq!(r.max_residual, "1");
        assert!(!r.pass);
    }

    #[test]
    fn json_shape() {
        let mut rep = VerificationReport::new("x");
        let mut c = ClauseCheck::<Q>::new("c");
        c.compare(&[0], Q::from_i64(1), Q::from_i64(1));
        rep.push(c.finish(Tolerance::Exact));
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["clauses"][0]["clause"], "c");
        assert_eq!(v["clauses"][0]["max_residual"], "0");
        assert_eq!(v["clauses"][0]["pass"], true);
        assert_eq!(v["pass"], true);
    }
}
