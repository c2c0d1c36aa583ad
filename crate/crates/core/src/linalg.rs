//! Dense square systems solved by LU factorization with partial pivoting.

use crate::error::{Result, SfpError};

/// Relative pivot threshold below which a system is reported singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(SfpError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `matrix * a = rhs`.
///
/// Fails with [`SfpError::SingularSystem`] when a pivot falls below
/// `PIVOT_TOLERANCE` times the largest entry of `matrix`.
pub fn solve_dense(matrix: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = matrix.size();
    if rhs.len() != n {
        return Err(SfpError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let threshold = PIVOT_TOLERANCE * matrix.max_abs();
    let mut lu = matrix.data.clone();
    let mut x = rhs.to_vec();

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, lu[r * n + col]))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("non-empty column");
        if !(pivot.abs() > threshold) {
            return Err(SfpError::SingularSystem {
                column: col,
                pivot: pivot.abs(),
                threshold,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap(col * n + j, pivot_row * n + j);
            }
            x.swap(col, pivot_row);
        }
        let (head, tail) = lu.split_at_mut((col + 1) * n);
        let pivot_slice = &head[col * n..];
        for (r, row) in tail.chunks_exact_mut(n).enumerate() {
            let factor = row[col] / pivot;
            if factor == 0.0 {
                continue;
            }
            row[col] = factor;
            for j in col + 1..n {
                row[j] -= factor * pivot_slice[j];
            }
            x[col + 1 + r] -= factor * x[col];
        }
    }

    for i in (0..n).rev() {
        let row = &lu[i * n..(i + 1) * n];
        let s: f64 = row[i + 1..]
            .iter()
            .zip(&x[i + 1..])
            .map(|(a, b)| a * b)
            .sum();
        x[i] = (x[i] - s) / row[i];
    }
    Ok(x)
}

/// `max_i |(matrix * a - rhs)_i|`.
pub fn residual_inf(matrix: &DenseMatrix, a: &[f64], rhs: &[f64]) -> f64 {
    matrix
        .mul_vec(a)
        .iter()
        .zip(rhs)
        .fold(0.0_f64, |m, (l, r)| m.max((l - r).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_returns_rhs() {
        let r = vec![3.0, -1.5, 2.25, 0.0];
        assert_eq!(solve_dense(&DenseMatrix::identity(4), &r).unwrap(), r);
    }

    #[test]
    fn diagonal_system() {
        let m = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(solve_dense(&m, &[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn needs_pivoting() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(solve_dense(&m, &[5.0, 7.0]).unwrap(), vec![7.0, 5.0]);
    }

    #[test]
    fn random_well_conditioned_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 50;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rng.random_range(-1.0..1.0);
            }
            m[(i, i)] += n as f64;
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let a = solve_dense(&m, &rhs).unwrap();
        let rhs_norm = rhs.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        assert!(residual_inf(&m, &a, &rhs) <= 1e-8 * (1.0 + rhs_norm));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            solve_dense(&m, &[1.0, 1.0]),
            Err(SfpError::SingularSystem { column: 1, .. })
        ));
        assert!(matches!(
            solve_dense(&DenseMatrix::zeros(3), &[0.0; 3]),
            Err(SfpError::SingularSystem { column: 0, .. })
        ));
    }

    #[test]
    fn rhs_length_mismatch() {
        assert!(matches!(
            solve_dense(&DenseMatrix::identity(3), &[1.0]),
            Err(SfpError::DimensionMismatch {
                expected: 3,
                got: 1
            })
        ));
    }
}
