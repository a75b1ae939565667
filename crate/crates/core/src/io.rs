//! Reading grid/weight documents and writing kernels and tables.
//!
//! Input is JSON `{"points": [...], "weights": [...]}` with every entry a
//! string holding an exact rational `"p/q"`, an integer or a decimal literal.
//! Weights are paired with points by position; the pairs are sorted by point.
//! Output values are written with their `Display` form, so rationals appear
//! as `"p/q"` strings.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::ensembles::{CorrelationRow, KernelMatrix};
use crate::error::{Error, Result};
use crate::grid::{Grid, WeightTable};
use crate::hypernum::{parse_rational, Scalar};
use crate::orthopoly::OrthoSystem;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    points: Vec<String>,
    weights: Vec<String>,
}

/// Parses a grid/weight document into a weight table over its grid.
pub fn parse_instance<S: Scalar>(text: &str, ctx: &S::Context) -> Result<WeightTable<S>> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.points.len() != doc.weights.len() {
        return Err(Error::LengthMismatch {
            expected: doc.points.len(),
            found: doc.weights.len(),
        });
    }
    let mut pairs = doc
        .points
        .iter()
        .zip(&doc.weights)
        .map(|(p, w)| Ok((parse_rational(p)?, parse_rational(w)?)))
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let points = pairs.iter().map(|(p, _)| S::from_rational(p, ctx)).collect();
    let grid = Arc::new(Grid::new(points)?);
    let weights = pairs.iter().map(|(_, w)| S::from_rational(w, ctx)).collect();
    WeightTable::new(grid, weights)
}

fn strings<S: Scalar>(values: &[S]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

pub fn grid_json<S: Scalar>(g: &Grid<S>) -> Value {
    json!({
        "points": strings(g.points()),
        "node_products": strings(g.node_products()),
        "epsilons": g.epsilons(),
    })
}

/// `u`, its dual `v` and the node data.
pub fn dual_weight_json<S: Scalar>(u: &WeightTable<S>, v: &WeightTable<S>) -> Value {
    let mut doc = grid_json(u.grid());
    doc["u"] = json!(strings(u.values()));
    doc["v"] = json!(strings(v.values()));
    doc
}

pub fn dual_weight_csv<S: Scalar>(u: &WeightTable<S>, v: &WeightTable<S>) -> String {
    let g = u.grid();
    let mut out = String::from("x,node_product,epsilon,u,v\n");
    for k in 0..g.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            g.point(k),
            g.node_product(k),
            g.epsilon(k),
            u.value(k),
            v.value(k)
        );
    }
    out
}

pub fn system_json<S: Scalar>(s: &OrthoSystem<S>) -> Value {
    let mut doc = grid_json(s.grid());
    doc["weights"] = json!(strings(s.weight().values()));
    doc["leading"] = json!(strings(s.leading()));
    doc["norms"] = json!(strings(s.norms()));
    doc["alpha"] = json!(strings(s.alpha()));
    doc["beta"] = json!(strings(s.beta()));
    doc["values"] = json!(s.values().iter().map(|row| strings(row)).collect::<Vec<_>>());
    doc
}

/// One row per degree: `n, leading, norm, P_n(x_0), …`.
pub fn system_csv<S: Scalar>(s: &OrthoSystem<S>) -> String {
    let mut out = String::from("n,leading,norm");
    for x in s.grid().points() {
        let _ = write!(out, ",{x}");
    }
    out.push('\n');
    for (n, row) in s.values().iter().enumerate() {
        let _ = write!(out, "{n},{},{}", s.leading()[n], s.norms()[n]);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn kernel_json<S: Scalar>(k: &KernelMatrix<S>) -> Value {
    let n = k.entries().size();
    json!({
        "order": k.order(),
        "form": k.form(),
        "points": strings(k.grid().points()),
        "entries": (0..n).map(|j| strings(k.entries().row(j))).collect::<Vec<_>>(),
    })
}

/// Square table indexed by grid points on both axes.
pub fn kernel_csv<S: Scalar>(k: &KernelMatrix<S>) -> String {
    let points = k.grid().points();
    let mut out = String::from("x\\y");
    for y in points {
        let _ = write!(out, ",{y}");
    }
    out.push('\n');
    for (j, x) in points.iter().enumerate() {
        let _ = write!(out, "{x}");
        for v in k.entries().row(j) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn subset_points<S: Scalar>(g: &Grid<S>, subset: &[usize]) -> Vec<String> {
    subset.iter().map(|&i| g.point(i).to_string()).collect()
}

pub fn correlations_json<S: Scalar>(g: &Grid<S>, m: usize, rows: &[CorrelationRow<S>]) -> Value {
    json!({
        "m": m,
        "points": strings(g.points()),
        "rows": rows.iter().map(|r| json!({
            "subset": subset_points(g, &r.subset),
            "bruteforce": r.bruteforce.to_string(),
            "determinantal": r.determinantal.to_string(),
            "complement_bruteforce": r.complement_bruteforce.to_string(),
            "complement_determinantal": r.complement_determinantal.to_string(),
        })).collect::<Vec<_>>(),
    })
}

/// Subsets are written as their points joined by `;`.
pub fn correlations_csv<S: Scalar>(g: &Grid<S>, rows: &[CorrelationRow<S>]) -> String {
    let mut out =
        String::from("subset,bruteforce,determinantal,complement_bruteforce,complement_determinantal\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            subset_points(g, &r.subset).join(";"),
            r.bruteforce,
            r.determinantal,
            r.complement_bruteforce,
            r.complement_determinantal
        );
    }
    out
}
