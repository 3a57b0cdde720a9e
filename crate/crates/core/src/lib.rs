//! Drazin and group inverses of even-order tensors under the Einstein
//! product, with exact closed-form update formulas for the modified tensor
//! S = A - C*D^D*B in terms of A^D and the generalized Schur complement
//! Z = D - B*A^D*C.
//!
//! Everything runs domain-generically over exact rationals (arbitrary
//! precision) or binary64 floats; the exact domain is the default and the
//! reason this crate exists: formula outputs are verified bit-exactly
//! against direct Drazin computation.

pub mod drazin;
pub mod io;
pub mod matrix;
pub mod modified;
pub mod reference;
pub mod scalar;
pub mod tensor;
pub mod verify;

pub use drazin::{
    drazin, group_inverse, index_of, nilpotency_degree, satisfies_defining_equations, DrazinError,
    DrazinResult,
};
pub use matrix::{LinalgError, Matrix, RankProfile};
pub use modified::{
    check_conditions, derive, generate_instance, ConditionReport, DerivedQuantities, Formula,
    FormulaError, GenerateError, InstanceKind, ModifiedError, ModifiedProblem, SdSpecialization,
    ZdDual,
};
pub use scalar::{Domain, Rational, Scalar, ScalarDomain, ScalarError};
pub use tensor::{MatricizedMatrix, Shape, Tensor, TensorError};
pub use verify::{
    drazin_residuals, frobenius_norm, perturbation_bound_check, run_perturbation_experiment,
    spectral_norm, BoundCheck, ExperimentConfig, ExperimentReport, Method, PerturbationRow,
    ResidualReport, VerifyError,
};
