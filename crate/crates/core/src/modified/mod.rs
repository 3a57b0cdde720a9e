//! The modified tensor S = A - C*D^D*B and the generalized Schur complement
//! Z = D - B*A^D*C: derived quantities, hypothesis checks, and one operation
//! per closed-form update formula.

mod conditions;
mod formulas;
mod generate;

pub use conditions::{check_conditions, ConditionReport};
pub use formulas::{
    applicable_formulas, auto_select, conditions_hold, direct_result, group_inverse_sae,
    pq_additive_drazin, sd_cor_one_condition_a, sd_cor_one_condition_b, sd_formula, sd_lemma22a,
    sd_lemma22b, sd_lemma23a, sd_lemma23b, sd_specialization, sd_thm31a, sd_thm31a_alt1,
    sd_thm31a_alt2, sd_thm31b, sd_thm32a, sd_thm32b, sd_thm33a, sd_thm33b, zd_dual_formula,
    Formula, FormulaError, SdSpecialization, Target, ZdDual,
};
pub use generate::{generate_instance, generate_pq_pair, GenerateError, InstanceKind};

use thiserror::Error;

use crate::drazin::{drazin, DrazinError, DrazinResult};
use crate::scalar::Scalar;
use crate::tensor::{Tensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModifiedError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Drazin(#[from] DrazinError),
    #[error("incompatible quadruple: {0}")]
    Incompatible(String),
}

/// The update quadruple (A, B, C, D) with the shape chain
/// C.cols = D.dims = B.rows and B.cols = A.dims = C.rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedProblem<T: Scalar> {
    a: Tensor<T>,
    b: Tensor<T>,
    c: Tensor<T>,
    d: Tensor<T>,
}

impl<T: Scalar> ModifiedProblem<T> {
    pub fn new(
        a: Tensor<T>,
        b: Tensor<T>,
        c: Tensor<T>,
        d: Tensor<T>,
    ) -> Result<Self, ModifiedError> {
        let fail = |msg: String| Err(ModifiedError::Incompatible(msg));
        if !a.shape().is_square() {
            return fail(format!("A must be square, got {}", a.shape()));
        }
        if !d.shape().is_square() {
            return fail(format!("D must be square, got {}", d.shape()));
        }
        let i_dims = a.shape().row_dims();
        let h_dims = d.shape().row_dims();
        if b.shape().row_dims() != h_dims || b.shape().col_dims() != i_dims {
            return fail(format!(
                "B must have shape ({h_dims:?}|{i_dims:?}), got {}",
                b.shape()
            ));
        }
        if c.shape().row_dims() != i_dims || c.shape().col_dims() != h_dims {
            return fail(format!(
                "C must have shape ({i_dims:?}|{h_dims:?}), got {}",
                c.shape()
            ));
        }
        Ok(ModifiedProblem { a, b, c, d })
    }

    pub fn a(&self) -> &Tensor<T> {
        &self.a
    }

    pub fn b(&self) -> &Tensor<T> {
        &self.b
    }

    pub fn c(&self) -> &Tensor<T> {
        &self.c
    }

    pub fn d(&self) -> &Tensor<T> {
        &self.d
    }

    /// The dual problem (D, C, B, A), whose derived quantities swap
    /// (S, Y, A) with (Z, R, D).
    pub fn dual(&self) -> ModifiedProblem<T> {
        ModifiedProblem {
            a: self.d.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            d: self.a.clone(),
        }
    }
}

/// Every symbol the formula ladder consumes, computed once from the
/// quadruple.
#[derive(Debug, Clone)]
pub struct DerivedQuantities<T: Scalar> {
    problem: ModifiedProblem<T>,
    a_dr: DrazinResult<T>,
    d_dr: DrazinResult<T>,
    z_dr: DrazinResult<T>,
    s: Tensor<T>,
    z: Tensor<T>,
    y: Tensor<T>,
    r: Tensor<T>,
    h: Tensor<T>,
    k: Tensor<T>,
    f: Tensor<T>,
    e: Tensor<T>,
    t: Tensor<T>,
}

/// Assemble S, Z, Y, R, H, K, F, E, T and the three Drazin inverses.
pub fn derive<T: Scalar>(problem: &ModifiedProblem<T>) -> Result<DerivedQuantities<T>, ModifiedError> {
    let a_dr = drazin(&problem.a)?;
    let d_dr = drazin(&problem.d)?;
    let ad = &a_dr.drazin;
    let dd = &d_dr.drazin;

    let e = problem.c.einstein_product(dd)?; // C*D^D
    let f = dd.einstein_product(&problem.b)?; // D^D*B
    let y = e.einstein_product(&problem.b)?; // C*D^D*B
    let h = problem.b.einstein_product(ad)?; // B*A^D
    let k = ad.einstein_product(&problem.c)?; // A^D*C
    let r = h.einstein_product(&problem.c)?; // B*A^D*C
    let s = problem.a.sub(&y)?;
    let z = problem.d.sub(&r)?;
    let z_dr = drazin(&z)?;
    let t = ad.add(&k.einstein_product(&z_dr.drazin)?.einstein_product(&h)?)?;

    Ok(DerivedQuantities {
        problem: problem.clone(),
        a_dr,
        d_dr,
        z_dr,
        s,
        z,
        y,
        r,
        h,
        k,
        f,
        e,
        t,
    })
}

impl<T: Scalar> DerivedQuantities<T> {
    pub fn problem(&self) -> &ModifiedProblem<T> {
        &self.problem
    }

    pub fn a(&self) -> &Tensor<T> {
        &self.problem.a
    }

    pub fn b(&self) -> &Tensor<T> {
        &self.problem.b
    }

    pub fn c(&self) -> &Tensor<T> {
        &self.problem.c
    }

    pub fn d(&self) -> &Tensor<T> {
        &self.problem.d
    }

    pub fn a_drazin(&self) -> &DrazinResult<T> {
        &self.a_dr
    }

    pub fn d_drazin(&self) -> &DrazinResult<T> {
        &self.d_dr
    }

    pub fn z_drazin(&self) -> &DrazinResult<T> {
        &self.z_dr
    }

    pub fn a_d(&self) -> &Tensor<T> {
        &self.a_dr.drazin
    }

    pub fn a_pi(&self) -> &Tensor<T> {
        &self.a_dr.projector_pi
    }

    pub fn a_e(&self) -> &Tensor<T> {
        &self.a_dr.projector_e
    }

    pub fn d_d(&self) -> &Tensor<T> {
        &self.d_dr.drazin
    }

    pub fn d_pi(&self) -> &Tensor<T> {
        &self.d_dr.projector_pi
    }

    pub fn d_e(&self) -> &Tensor<T> {
        &self.d_dr.projector_e
    }

    pub fn z_d(&self) -> &Tensor<T> {
        &self.z_dr.drazin
    }

    pub fn z_pi(&self) -> &Tensor<T> {
        &self.z_dr.projector_pi
    }

    pub fn z_e(&self) -> &Tensor<T> {
        &self.z_dr.projector_e
    }

    /// S = A - C*D^D*B
    pub fn s(&self) -> &Tensor<T> {
        &self.s
    }

    /// Z = D - B*A^D*C
    pub fn z(&self) -> &Tensor<T> {
        &self.z
    }

    /// Y = C*D^D*B
    pub fn y(&self) -> &Tensor<T> {
        &self.y
    }

    /// R = B*A^D*C
    pub fn r(&self) -> &Tensor<T> {
        &self.r
    }

    /// H = B*A^D
    pub fn h(&self) -> &Tensor<T> {
        &self.h
    }

    /// K = A^D*C
    pub fn k(&self) -> &Tensor<T> {
        &self.k
    }

    /// F = D^D*B
    pub fn f(&self) -> &Tensor<T> {
        &self.f
    }

    /// E = C*D^D
    pub fn e(&self) -> &Tensor<T> {
        &self.e
    }

    /// T = A^D + K*Z^D*H
    pub fn t(&self) -> &Tensor<T> {
        &self.t
    }

    /// S_{A^e} = A^e * S * A^e
    pub fn s_ae(&self) -> Tensor<T> {
        let ae = self.a_e();
        ae.einstein_product(&self.s)
            .and_then(|m| m.einstein_product(ae))
            .expect("validated shapes")
    }

    /// Z_{D^e} = D^e * Z * D^e
    pub fn z_de(&self) -> Tensor<T> {
        let de = self.d_e();
        de.einstein_product(&self.z)
            .and_then(|m| m.einstein_product(de))
            .expect("validated shapes")
    }
}
