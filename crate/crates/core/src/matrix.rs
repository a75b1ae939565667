//! Small dense square matrices over a [`Scalar`].

use crate::hypernum::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            (0..self.n).fold(S::zero(), |acc, k| acc + self.get(i, k).clone() * other.get(k, j).clone())
        })
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// `I − self`.
    pub fn complement(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            let delta = if i == j { S::one() } else { S::zero() };
            delta - self.get(i, j).clone()
        })
    }

    /// Submatrix on rows and columns `idx`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// Rank by Gaussian elimination; entries are compared to zero exactly.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut a = self.data.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| !a[r * n + col].is_zero()) else {
                continue;
            };
            for j in 0..n {
                a.swap(p * n + j, rank * n + j);
            }
            let piv = a[rank * n + col].clone();
            for r in rank + 1..n {
                let factor = a[r * n + col].clone() / piv.clone();
                for j in col..n {
                    let v = a[r * n + j].clone() - factor.clone() * a[rank * n + j].clone();
                    a[r * n + j] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Determinant by Gaussian elimination with largest-magnitude pivoting.
    pub fn det(&self) -> S {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = S::one();
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a[r * n + col].is_zero())
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .abs()
                        .partial_cmp(&a[s * n + col].abs())
                        .expect("comparable entries")
                });
            let Some(p) = pivot else {
                return S::zero();
            };
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                }
                det = -det;
            }
            let piv = a[col * n + col].clone();
            det = det * piv.clone();
            for r in col + 1..n {
                let factor = a[r * n + col].clone() / piv.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col + 1..n {
                    let v = a[r * n + j].clone() - factor.clone() * a[col * n + j].clone();
                    a[r * n + j] = v;
                }
            }
        }
        det
    }
}
