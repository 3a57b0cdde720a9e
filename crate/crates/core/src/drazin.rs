//! Drazin inverse, group inverse, index and spectral projectors for square
//! even-order tensors, computed on the matricization.
//!
//! The Drazin inverse is obtained as A^k * (A^(2k+1))+ * A^k with k the index
//! of A; in the rational domain every step is exact, in float64 the same
//! path runs with tolerance-based rank decisions.

use thiserror::Error;

use crate::matrix::{LinalgError, Matrix};
use crate::scalar::Scalar;
use crate::tensor::{Tensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DrazinError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("tensor has index {index} > 1, group inverse does not exist")]
    NotGroupInvertible { index: usize },
}

/// A Drazin inverse with its index and the two spectral projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DrazinResult<T: Scalar> {
    /// A^D
    pub drazin: Tensor<T>,
    /// ind(A)
    pub index: usize,
    /// A^pi = I - A*A^D, projector onto the nilpotent part
    pub projector_pi: Tensor<T>,
    /// A^e = A*A^D, the complementary core projector
    pub projector_e: Tensor<T>,
}

fn require_square<T: Scalar>(a: &Tensor<T>, op: &'static str) -> Result<(), DrazinError> {
    if !a.shape().is_square() {
        return Err(TensorError::NotSquare { op, shape: a.shape().clone() }.into());
    }
    Ok(())
}

fn index_of_matrix<T: Scalar>(m: &Matrix<T>) -> usize {
    let n = m.rows();
    let mut prev_rank = n; // rank of A^0 = I
    let mut power = m.clone();
    for l in 0..=n {
        let rank = power.rank().rank;
        if rank == prev_rank {
            return l;
        }
        prev_rank = rank;
        power = power.mul(m).expect("square");
    }
    n
}

/// Smallest l with rank(A^l) = rank(A^(l+1)); 0 iff A is invertible.
pub fn index_of<T: Scalar>(a: &Tensor<T>) -> Result<usize, DrazinError> {
    require_square(a, "index_of")?;
    Ok(index_of_matrix(&a.matricize()))
}

/// Drazin inverse of a square tensor, with index and projectors.
pub fn drazin<T: Scalar>(a: &Tensor<T>) -> Result<DrazinResult<T>, DrazinError> {
    require_square(a, "drazin")?;
    let m = a.matricize();
    let k = index_of_matrix(&m);
    let d = if k == 0 {
        m.inverse()?
    } else {
        let mk = m.power(k)?;
        let core = m.power(2 * k + 1)?;
        mk.mul(&core.pseudoinverse())?.mul(&mk)?
    };
    let drazin_tensor = Tensor::dematricize(&d, a.shape().clone())?;
    let projector_e = a.einstein_product(&drazin_tensor)?;
    let identity = Tensor::identity(a.shape().row_dims())?;
    let projector_pi = identity.sub(&projector_e)?;
    Ok(DrazinResult { drazin: drazin_tensor, index: k, projector_pi, projector_e })
}

/// The Drazin inverse when ind(A) <= 1; errors with the actual index
/// otherwise.
pub fn group_inverse<T: Scalar>(a: &Tensor<T>) -> Result<Tensor<T>, DrazinError> {
    let result = drazin(a)?;
    if result.index > 1 {
        return Err(DrazinError::NotGroupInvertible { index: result.index });
    }
    Ok(result.drazin)
}

/// Do the three defining equations hold for X as the Drazin inverse of A,
/// in-domain (exactly for rationals, within a scaled tolerance for floats)?
pub fn satisfies_defining_equations<T: Scalar>(
    a: &Tensor<T>,
    x: &Tensor<T>,
) -> Result<bool, DrazinError> {
    require_square(a, "satisfies_defining_equations")?;
    if a.shape() != x.shape() {
        return Err(TensorError::ShapeMismatch {
            op: "satisfies_defining_equations",
            lhs: a.shape().clone(),
            rhs: x.shape().clone(),
        }
        .into());
    }
    let base = crate::scalar::ScalarDomain::of(T::DOMAIN).zero_tolerance;
    let scale = (a.max_abs() * x.max_abs()).max(1.0);
    let tol = base * scale;
    let k = index_of(a)?.max(1);
    let ak = a.power(k)?;
    let eq1 = ak
        .einstein_product(x)?
        .einstein_product(a)?
        .sub(&ak)?
        .is_zero_within(tol);
    let eq2 = x
        .einstein_product(a)?
        .einstein_product(x)?
        .sub(x)?
        .is_zero_within(tol);
    let eq3 = a
        .einstein_product(x)?
        .sub(&x.einstein_product(a)?)?
        .is_zero_within(tol);
    Ok(eq1 && eq2 && eq3)
}

/// Smallest l <= max_l with X^l = 0, if any. The default cap is the
/// matricized dimension, which bounds the degree of any nilpotent matrix.
pub fn nilpotency_degree<T: Scalar>(
    x: &Tensor<T>,
    max_l: Option<usize>,
) -> Result<Option<usize>, DrazinError> {
    require_square(x, "nilpotency_degree")?;
    let cap = max_l.unwrap_or_else(|| x.shape().row_len());
    let mut power = Tensor::identity(x.shape().row_dims())?;
    for l in 1..=cap {
        power = power.einstein_product(x)?;
        if power.is_zero() {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::tensor::Shape;

    fn q(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn t2(vals: [[i64; 2]; 2]) -> Tensor<Rational> {
        Tensor::new(
            Shape::square(vec![2]).unwrap(),
            vals.iter().flatten().map(|&v| Rational::from_integer(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn index_of_nilpotent_shift() {
        let n = t2([[0, 1], [0, 0]]);
        assert_eq!(index_of(&n).unwrap(), 2);
        let r = drazin(&n).unwrap();
        assert!(r.drazin.is_zero());
        assert_eq!(r.index, 2);
    }

    #[test]
    fn index_zero_for_invertible() {
        let a = t2([[2, 1], [1, 1]]);
        assert_eq!(index_of(&a).unwrap(), 0);
        let r = drazin(&a).unwrap();
        let prod = a.einstein_product(&r.drazin).unwrap();
        assert_eq!(prod, Tensor::identity(&[2]).unwrap());
    }

    #[test]
    fn idempotent_is_its_own_drazin() {
        let p = t2([[1, 0], [0, 0]]);
        let r = drazin(&p).unwrap();
        assert_eq!(r.drazin, p);
        assert_eq!(r.index, 1);
    }

    #[test]
    fn defining_equations_and_projectors() {
        // index-2 example mixing core and nilpotent parts
        let shape = Shape::square(vec![3]).unwrap();
        let a = Tensor::new(
            shape,
            ["2", "0", "0", "0", "0", "1", "0", "0", "0"].iter().map(|s| q(s)).collect(),
        )
        .unwrap();
        let r = drazin(&a).unwrap();
        assert_eq!(r.index, 2);
        let ak = a.power(r.index).unwrap();
        // A^l X A = A^l for l >= index
        assert_eq!(
            ak.einstein_product(&r.drazin).unwrap().einstein_product(&a).unwrap(),
            ak
        );
        // X A X = X
        assert_eq!(
            r.drazin.einstein_product(&a).unwrap().einstein_product(&r.drazin).unwrap(),
            r.drazin
        );
        // A X = X A
        assert_eq!(
            a.einstein_product(&r.drazin).unwrap(),
            r.drazin.einstein_product(&a).unwrap()
        );
        // projector algebra
        let pi2 = r.projector_pi.einstein_product(&r.projector_pi).unwrap();
        assert_eq!(pi2, r.projector_pi);
        let sum = r.projector_e.add(&r.projector_pi).unwrap();
        assert_eq!(sum, Tensor::identity(&[3]).unwrap());
    }

    #[test]
    fn group_inverse_rejects_higher_index() {
        let n = t2([[0, 1], [0, 0]]);
        match group_inverse(&n) {
            Err(DrazinError::NotGroupInvertible { index }) => assert_eq!(index, 2),
            other => panic!("expected index error, got {other:?}"),
        }
        let i = Tensor::<Rational>::identity(&[2]).unwrap();
        assert_eq!(group_inverse(&i).unwrap(), i);
    }

    #[test]
    fn group_inverse_satisfies_the_inner_equation() {
        // at index <= 1 the extra equation A*X*A = A holds as well
        let p = t2([[1, 1], [0, 0]]);
        assert_eq!(index_of(&p).unwrap(), 1);
        let x = group_inverse(&p).unwrap();
        assert_eq!(
            p.einstein_product(&x).unwrap().einstein_product(&p).unwrap(),
            p
        );
        assert_eq!(x, drazin(&p).unwrap().drazin);
    }

    #[test]
    fn drazin_of_power_equals_power_of_drazin() {
        let shape = Shape::square(vec![3]).unwrap();
        let a = Tensor::new(
            shape,
            ["2", "1", "0", "0", "1", "1", "0", "0", "0"].iter().map(|s| q(s)).collect(),
        )
        .unwrap();
        let ad = drazin(&a).unwrap().drazin;
        for j in [2usize, 3] {
            let lhs = drazin(&a.power(j).unwrap()).unwrap().drazin;
            let rhs = ad.power(j).unwrap();
            assert_eq!(lhs, rhs, "power {j}");
        }
    }

    #[test]
    fn nilpotency_degrees() {
        let z = Tensor::<Rational>::zero(Shape::square(vec![2]).unwrap());
        assert_eq!(nilpotency_degree(&z, None).unwrap(), Some(1));
        let n = t2([[0, 1], [0, 0]]);
        assert_eq!(nilpotency_degree(&n, None).unwrap(), Some(2));
        let i = Tensor::<Rational>::identity(&[2]).unwrap();
        assert_eq!(nilpotency_degree(&i, None).unwrap(), None);
        // cap respected
        assert_eq!(nilpotency_degree(&n, Some(1)).unwrap(), None);
    }

    #[test]
    fn drazin_of_drazin_identities() {
        let shape = Shape::square(vec![3]).unwrap();
        let a = Tensor::new(
            shape,
            ["2", "1", "0", "0", "1", "0", "0", "0", "0"].iter().map(|s| q(s)).collect(),
        )
        .unwrap();
        let r = drazin(&a).unwrap();
        let dd = drazin(&r.drazin).unwrap();
        // (A^D)^D = A^2 * A^D
        let core = a.power(2).unwrap().einstein_product(&r.drazin).unwrap();
        assert_eq!(dd.drazin, core);
    }
}
