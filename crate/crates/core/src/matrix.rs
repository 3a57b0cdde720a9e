//! Dense matrix kernels on matricized tensors: elimination, rank, inverse,
//! full-rank factorization and the Moore–Penrose pseudoinverse.
//!
//! One elimination code path serves both scalar domains. Rational elimination
//! pivots on the first nonzero entry and is exact; float elimination uses
//! partial pivoting with a zero tolerance of max(rows,cols) * eps * max|entry|
//! of the input matrix (overridable).

use thiserror::Error;

use crate::scalar::{Domain, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch {lhs_rows}x{lhs_cols} vs {rhs_rows}x{rhs_cols}")]
    DimMismatch { op: &'static str, lhs_rows: usize, lhs_cols: usize, rhs_rows: usize, rhs_cols: usize },
    #[error("matrix is singular: rank {rank} of {dim} (deficit {deficit})")]
    Singular { rank: usize, dim: usize, deficit: usize },
    #[error("{op}: matrix {rows}x{cols} is not square")]
    NotSquare { op: &'static str, rows: usize, cols: usize },
}

/// Rank together with the pivot columns that witness it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>, // row-major
}

impl<T: Scalar> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|e| e.abs_f64()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimMismatch {
                op: "mul",
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let mut out: Matrix<T> = Matrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        self.zip(rhs, "add", |a, b| a.add(b))
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        self.zip(rhs, "sub", |a, b| a.sub(b))
    }

    fn zip(
        &self,
        rhs: &Matrix<T>,
        op: &'static str,
        f: impl Fn(&T, &T) -> T,
    ) -> Result<Matrix<T>, LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::DimMismatch {
                op,
                lhs_rows: self.rows,
                lhs_cols: self.cols,
                rhs_rows: rhs.rows,
                rhs_cols: rhs.cols,
            });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn power(&self, l: usize) -> Result<Matrix<T>, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { op: "power", rows: self.rows, cols: self.cols });
        }
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..l {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Zero tolerance for rank decisions: 0 in the exact domain, scaled ulp
    /// in float64.
    pub fn default_tolerance(&self) -> f64 {
        match T::DOMAIN {
            Domain::Rational => 0.0,
            Domain::Float64 => {
                self.rows.max(self.cols) as f64 * f64::EPSILON * self.max_abs()
            }
        }
    }

    fn treat_as_zero(v: &T, tol: f64) -> bool {
        if tol == 0.0 {
            v.is_zero()
        } else {
            v.abs_f64() <= tol
        }
    }

    /// Reduced row echelon form with the pivot profile, using the given zero
    /// tolerance (None = `default_tolerance`).
    pub fn rref_with_tol(&self, tol: Option<f64>) -> (Matrix<T>, RankProfile) {
        let tol = tol.unwrap_or_else(|| self.default_tolerance());
        let mut m = self.clone();
        let mut pivot_columns = Vec::new();
        let mut lead = 0usize;
        for col in 0..m.cols {
            if lead >= m.rows {
                break;
            }
            // pivot choice: first nonzero in the exact domain, largest
            // magnitude in float
            let pivot_row = match T::DOMAIN {
                Domain::Rational => (lead..m.rows).find(|&r| !m.get(r, col).is_zero()),
                Domain::Float64 => (lead..m.rows)
                    .max_by(|&a, &b| {
                        m.get(a, col).abs_f64().total_cmp(&m.get(b, col).abs_f64())
                    })
                    .filter(|&r| !Self::treat_as_zero(m.get(r, col), tol)),
            };
            let Some(pr) = pivot_row else { continue };
            m.swap_rows(lead, pr);
            let pivot = m.get(lead, col).clone();
            for c in 0..m.cols {
                let v = m.get(lead, c).div(&pivot).expect("nonzero pivot");
                m.set(lead, c, v);
            }
            for r in 0..m.rows {
                if r == lead {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..m.cols {
                    let v = m.get(r, c).sub(&factor.mul(m.get(lead, c)));
                    m.set(r, c, v);
                }
                m.set(r, col, T::zero());
            }
            pivot_columns.push(col);
            lead += 1;
        }
        let rank = pivot_columns.len();
        (m, RankProfile { rank, pivot_columns })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> RankProfile {
        self.rref_with_tol(None).1
    }

    /// Inverse of a square full-rank matrix via elimination on [M | I].
    pub fn inverse(&self) -> Result<Matrix<T>, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { op: "inverse", rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self.get(r, c).clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        // tolerance scaled by the left block only
        let tol = self.default_tolerance();
        let (reduced, profile) = aug.rref_with_tol(Some(tol));
        aug = reduced;
        let rank = profile.pivot_columns.iter().filter(|&&c| c < n).count();
        if rank < n {
            return Err(LinalgError::Singular { rank, dim: n, deficit: n - rank });
        }
        Ok(Matrix::from_fn(n, n, |r, c| aug.get(r, c + n).clone()))
    }

    /// M = F*G with F of full column rank r and G of full row rank r,
    /// r = rank(M). The zero matrix yields empty factors (r = 0).
    pub fn full_rank_factorization(&self) -> (Matrix<T>, Matrix<T>) {
        let (rref, profile) = self.rref_with_tol(None);
        let r = profile.rank;
        let f = Matrix::from_fn(self.rows, r, |i, j| {
            self.get(i, profile.pivot_columns[j]).clone()
        });
        let g = Matrix::from_fn(r, self.cols, |i, j| rref.get(i, j).clone());
        (f, g)
    }

    /// Moore–Penrose pseudoinverse via full-rank factorization:
    /// M+ = G' (G G')^-1 (F' F)^-1 F'. Exact in the rational domain.
    pub fn pseudoinverse(&self) -> Matrix<T> {
        let (f, g) = self.full_rank_factorization();
        if f.cols() == 0 {
            return Matrix::zero(self.cols, self.rows);
        }
        let ft = f.transpose();
        let gt = g.transpose();
        let ggt_inv = g.mul(&gt).unwrap().inverse().expect("G*G' invertible at full row rank");
        let ftf_inv = ft.mul(&f).unwrap().inverse().expect("F'*F invertible at full column rank");
        gt.mul(&ggt_inv).unwrap().mul(&ftf_inv).unwrap().mul(&ft).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn m(rows: usize, cols: usize, vals: &[&str]) -> Matrix<Rational> {
        Matrix::from_vec(rows, cols, vals.iter().map(|s| q(s)).collect())
    }

    #[test]
    fn rank_basics() {
        assert_eq!(Matrix::<Rational>::identity(6).rank().rank, 6);
        assert_eq!(Matrix::<Rational>::zero(3, 4).rank().rank, 0);
        let a = m(2, 2, &["1", "2", "2", "4"]);
        let profile = a.rank();
        assert_eq!(profile.rank, 1);
        assert_eq!(profile.pivot_columns, vec![0]);
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(3, 3, &["2", "1", "0", "1", "1", "0", "0", "3", "1"]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(3));
        assert_eq!(inv.mul(&a).unwrap(), Matrix::identity(3));
        assert_eq!(inv.inverse().unwrap(), a);
    }

    #[test]
    fn singular_inverse_reports_deficit() {
        let a = m(2, 2, &["1", "2", "2", "4"]);
        match a.inverse() {
            Err(LinalgError::Singular { rank, deficit, .. }) => {
                assert_eq!(rank, 1);
                assert_eq!(deficit, 1);
            }
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn full_rank_factorization_examples() {
        let a = m(2, 2, &["1", "2", "2", "4"]);
        let (f, g) = a.full_rank_factorization();
        assert_eq!(f, m(2, 1, &["1", "2"]));
        assert_eq!(g, m(1, 2, &["1", "2"]));
        assert_eq!(f.mul(&g).unwrap(), a);

        let i = Matrix::<Rational>::identity(3);
        let (f, g) = i.full_rank_factorization();
        assert_eq!(f, i);
        assert_eq!(g, i);

        let z = Matrix::<Rational>::zero(2, 2);
        let (f, g) = z.full_rank_factorization();
        assert_eq!((f.rows(), f.cols()), (2, 0));
        assert_eq!((g.rows(), g.cols()), (0, 2));
        assert_eq!(f.mul(&g).unwrap(), z);
    }

    #[test]
    fn pseudoinverse_examples() {
        let i = Matrix::<Rational>::identity(4);
        assert_eq!(i.pseudoinverse(), i);

        let p = m(2, 2, &["1", "0", "0", "0"]);
        assert_eq!(p.pseudoinverse(), p);

        let z = Matrix::<Rational>::zero(2, 3);
        assert_eq!(z.pseudoinverse(), Matrix::zero(3, 2));
    }

    #[test]
    fn penrose_equations_hold_exactly() {
        let a = m(
            4,
            3,
            &["1", "2", "3", "2", "4", "6", "0", "1", "-1", "1", "3", "2"],
        );
        let p = a.pseudoinverse();
        let apa = a.mul(&p).unwrap().mul(&a).unwrap();
        assert_eq!(apa, a);
        let pap = p.mul(&a).unwrap().mul(&p).unwrap();
        assert_eq!(pap, p);
        let ap = a.mul(&p).unwrap();
        assert_eq!(ap.transpose(), ap);
        let pa = p.mul(&a).unwrap();
        assert_eq!(pa.transpose(), pa);
    }

    #[test]
    fn float_rank_uses_tolerance() {
        let a = Matrix::<f64>::from_vec(2, 2, vec![1.0, 1.0, 1.0, 1.0 + 1e-18]);
        assert_eq!(a.rank().rank, 1);
        let b = Matrix::<f64>::from_vec(2, 2, vec![1.0, 1.0, 1.0, 2.0]);
        assert_eq!(b.rank().rank, 2);
    }

    #[test]
    fn float_inverse_residual_small() {
        let a = Matrix::<f64>::from_vec(3, 3, vec![4.0, -2.0, 1.0, 0.5, 3.0, -1.0, 2.0, 0.0, 5.0]);
        let inv = a.inverse().unwrap();
        let prod = a.mul(&inv).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((prod.get(r, c) - want).abs() < 1e-10);
            }
        }
    }
}
