//! The bundled reference problem: a (2x3|2x3)-square base tensor with a
//! rank-structured update, together with the exact expected Drazin inverses
//! of A, D, Z and the modified tensor S. Used by the `example` command, the
//! acceptance suite and the perturbation experiment.
//!
//! Entries are stored matricized (6x6, row-major); dimensions are
//! A: (2,3|2,3), B: (3,2|2,3), C: (2,3|3,2), D: (3,2|3,2).

use crate::modified::ModifiedProblem;
use crate::scalar::{Rational, Scalar};
use crate::tensor::{Shape, Tensor};

const A_DIMS: [usize; 2] = [2, 3];
const D_DIMS: [usize; 2] = [3, 2];

#[rustfmt::skip]
const A_ENTRIES: [&str; 36] = [
    "1", "0", "0", "0", "0", "0",
    "0", "1", "0", "0", "0", "0",
    "0", "0", "1", "0", "0", "0",
    "0", "0", "1", "1", "0", "0",
    "0", "0", "0", "0", "1", "0",
    "0", "0", "0", "0", "0", "0",
];

#[rustfmt::skip]
const B_ENTRIES: [&str; 36] = [
    "0", "1/4", "0", "0",   "0",   "0",
    "0", "0",   "0", "0",   "0",   "0",
    "0", "0",   "0", "1/4", "0",   "0",
    "0", "0",   "0", "0",   "1/4", "0",
    "0", "0",   "0", "0",   "0",   "0",
    "0", "0",   "0", "0",   "0",   "0",
];

#[rustfmt::skip]
const C_ENTRIES: [&str; 36] = [
    "1/4", "0",   "0",   "0",   "0", "1/4",
    "0",   "0",   "1/4", "0",   "0", "1/4",
    "1/4", "0",   "0",   "0",   "0", "1/4",
    "0",   "0",   "0",   "1/4", "0", "1/4",
    "0",   "1/4", "0",   "0",   "0", "0",
    "0",   "0",   "0",   "1/4", "0", "1/4",
];

#[rustfmt::skip]
const D_ENTRIES: [&str; 36] = [
    "1/2", "0",   "0",   "0",   "0",   "0",
    "0",   "1/2", "0",   "0",   "0",   "0",
    "0",   "1/2", "1/2", "0",   "0",   "1/2",
    "0",   "0",   "0",   "1/2", "0",   "0",
    "0",   "0",   "0",   "0",   "1/2", "0",
    "0",   "0",   "0",   "1/2", "0",   "1/2",
];

#[rustfmt::skip]
const A_DRAZIN_ENTRIES: [&str; 36] = [
    "1", "0", "0",  "0", "0", "0",
    "0", "1", "0",  "0", "0", "0",
    "0", "0", "1",  "0", "0", "0",
    "0", "0", "-1", "1", "0", "0",
    "0", "0", "0",  "0", "1", "0",
    "0", "0", "0",  "0", "0", "0",
];

// D is invertible, so its Drazin inverse is its inverse; the (2,1,3,2)
// entry must be -2 or D*D^D = I fails (checked below).
#[rustfmt::skip]
const D_DRAZIN_ENTRIES: [&str; 36] = [
    "2", "0",  "0", "0",  "0", "0",
    "0", "2",  "0", "0",  "0", "0",
    "0", "-2", "2", "2",  "0", "-2",
    "0", "0",  "0", "2",  "0", "0",
    "0", "0",  "0", "0",  "2", "0",
    "0", "0",  "0", "-2", "0", "2",
];

#[rustfmt::skip]
const Z_DRAZIN_ENTRIES: [&str; 36] = [
    "128/65", "-63/260",  "16/65",  "2/65",   "0", "0",
    "0",      "2",        "0",      "0",      "0", "0",
    "-16/65", "-439/260", "128/65", "146/65", "0", "-2",
    "0",      "1/4",      "0",      "2",      "0", "0",
    "0",      "0",        "0",      "0",      "2", "0",
    "0",      "-1/4",     "0",      "-2",     "0", "2",
];

#[rustfmt::skip]
const S_DRAZIN_ENTRIES: [&str; 36] = [
    "1", "8/65",  "-1/65",  "1/65",  "-8/65", "0",
    "0", "64/65", "-8/65",  "8/65",  "1/65",  "0",
    "0", "8/65",  "64/65",  "1/65",  "-8/65", "0",
    "0", "-8/65", "-64/65", "64/65", "8/65",  "0",
    "0", "0",     "0",      "0",     "1",     "0",
    "0", "0",     "0",      "0",     "0",     "0",
];

fn build(rd: &[usize], cd: &[usize], entries: &[&str]) -> Tensor<Rational> {
    let shape = Shape::new(rd.to_vec(), cd.to_vec()).expect("static dims");
    let values = entries
        .iter()
        .map(|s| Rational::parse(s).expect("static entry"))
        .collect();
    Tensor::new(shape, values).expect("static entry count")
}

pub fn tensor_a() -> Tensor<Rational> {
    build(&A_DIMS, &A_DIMS, &A_ENTRIES)
}

pub fn tensor_b() -> Tensor<Rational> {
    build(&D_DIMS, &A_DIMS, &B_ENTRIES)
}

pub fn tensor_c() -> Tensor<Rational> {
    build(&A_DIMS, &D_DIMS, &C_ENTRIES)
}

pub fn tensor_d() -> Tensor<Rational> {
    build(&D_DIMS, &D_DIMS, &D_ENTRIES)
}

/// The full reference quadruple.
pub fn problem() -> ModifiedProblem<Rational> {
    ModifiedProblem::new(tensor_a(), tensor_b(), tensor_c(), tensor_d())
        .expect("static shapes")
}

pub fn expected_a_drazin() -> Tensor<Rational> {
    build(&A_DIMS, &A_DIMS, &A_DRAZIN_ENTRIES)
}

pub fn expected_d_drazin() -> Tensor<Rational> {
    build(&D_DIMS, &D_DIMS, &D_DRAZIN_ENTRIES)
}

pub fn expected_z_drazin() -> Tensor<Rational> {
    build(&D_DIMS, &D_DIMS, &Z_DRAZIN_ENTRIES)
}

pub fn expected_s_drazin() -> Tensor<Rational> {
    build(&A_DIMS, &A_DIMS, &S_DRAZIN_ENTRIES)
}

/// Printed norm approximations to reproduce at 1e-3 relative tolerance:
/// (||S^D - A^D||, ||A^D||, ||A^D*Y||).
pub fn printed_norms() -> (f64, f64, f64) {
    (341.0 / 972.0, 2158.0 / 881.0, 253.0 / 765.0)
}
