//! Finite point sets, node products, signs, and the dual weight.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hypernum::Scalar;

/// The set `{x_0 < x_1 < … < x_M}` with cached node products
/// `π_k = ∏_{j≠k}(x_k − x_j)` and their signs `ε_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<S> {
    points: Vec<S>,
    node_products: Vec<S>,
    epsilons: Vec<i32>,
}

impl<S: Scalar> Grid<S> {
    /// Sorts the points ascending and precomputes node products.
    pub fn new(mut points: Vec<S>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("grid points must be comparable"));
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0].to_string()));
        }
        let node_products: Vec<S> = (0..points.len())
            .map(|k| {
                points
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .fold(S::one(), |acc, (_, xj)| acc * (points[k].clone() - xj.clone()))
            })
            .collect();
        let epsilons = node_products.iter().map(|p| p.sign()).collect();
        Ok(Self {
            points,
            node_products,
            epsilons,
        })
    }

    /// The integer grid `{0, 1, …, n}`.
    pub fn integers(n: usize) -> Self {
        Self::new((0..=n as i64).map(S::from_i64).collect()).expect("integer grid is valid")
    }

    /// `M`, one less than the number of points.
    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[S] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &S {
        &self.points[k]
    }

    pub fn node_products(&self) -> &[S] {
        &self.node_products
    }

    pub fn node_product(&self, k: usize) -> &S {
        &self.node_products[k]
    }

    pub fn epsilons(&self) -> &[i32] {
        &self.epsilons
    }

    pub fn epsilon(&self, k: usize) -> i32 {
        self.epsilons[k]
    }
}

/// A positive function on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable<S> {
    grid: Arc<Grid<S>>,
    values: Vec<S>,
}

impl<S: Scalar> WeightTable<S> {
    pub fn new(grid: Arc<Grid<S>>, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some((index, v)) = values.iter().enumerate().find(|(_, v)| !v.is_positive()) {
            return Err(Error::NonPositiveWeight {
                index,
                value: v.to_string(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn uniform(grid: Arc<Grid<S>>) -> Self {
        let values = vec![S::one(); grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid<S>> {
        &self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, k: usize) -> &S {
        &self.values[k]
    }
}

/// Builds a grid from unsorted points.
pub fn make_grid<S: Scalar>(points: Vec<S>) -> Result<Grid<S>> {
    Grid::new(points)
}

/// The weight `v` with `u(x_k) v(x_k) π_k² = 1` for every node.
pub fn dual_weight<S: Scalar>(u: &WeightTable<S>) -> WeightTable<S> {
    let grid = u.grid();
    let values = u
        .values()
        .iter()
        .zip(grid.node_products())
        .map(|(uk, pk)| S::one() / (uk.clone() * pk.clone() * pk.clone()))
        .collect();
    WeightTable {
        grid: Arc::clone(grid),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn int(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn three_point_grid() {
        let g = make_grid(vec![int(2), int(0), int(1)]).unwrap();
        assert_eq!(g.points(), &[int(0), int(1), int(2)]);
        assert_eq!(g.node_products(), &[int(2), int(-1), int(2)]);
        assert_eq!(g.epsilons(), &[1, -1, 1]);
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn single_point_grid() {
        let g = make_grid(vec![int(5)]).unwrap();
        assert_eq!(g.degree(), 0);
        assert_eq!(g.node_products(), &[int(1)]);
        assert_eq!(g.epsilons(), &[1]);
        let u = WeightTable::new(Arc::new(g), vec![q(3, 7)]).unwrap();
        assert_eq!(dual_weight(&u).values(), &[q(7, 3)]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(make_grid(vec![int(0), int(0), int(1)]), Err(Error::DuplicatePoint(_))));
        assert_eq!(make_grid::<Q>(vec![]), Err(Error::EmptyGrid));
        let g = Arc::new(Grid::<Q>::integers(2));
        assert!(matches!(
            WeightTable::new(g.clone(), vec![int(1), int(0), int(1)]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            WeightTable::new(g, vec![int(1)]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn uniform_dual_on_three_points() {
        let g = Arc::new(Grid::<Q>::integers(2));
        let v = dual_weight(&WeightTable::uniform(g));
        assert_eq!(v.values(), &[q(1, 4), int(1), q(1, 4)]);
    }

    fn grid_and_weight() -> impl Strategy<Value = (Vec<Q>, Vec<Q>)> {
        (1usize..8).prop_flat_map(|n| {
            (
                proptest::collection::btree_set(-50i64..50, n),
                proptest::collection::vec((1i64..30, 1i64..30), n),
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
        #[test]
        fn dual_weight_laws((pts, ws) in grid_and_weight()) {
            let m = pts.len() - 1;
            let g = Arc::new(make_grid(pts).unwrap());
            let u = WeightTable::new(g.clone(), ws).unwrap();
            let v = dual_weight(&u);
            prop_assert!(v.values().iter().all(|x| x.is_positive()));
            prop_assert_eq!(dual_weight(&v), u.clone());
            for k in 0..g.len() {
                let pk = g.node_product(k).clone();
                prop_assert_eq!(u.value(k).clone() * v.value(k).clone() * pk.clone() * pk, int(1));
                let expected = if (m - k) % 2 == 0 { 1 } else { -1 };
                prop_assert_eq!(g.epsilon(k), expected);
            }
        }
    }
}
