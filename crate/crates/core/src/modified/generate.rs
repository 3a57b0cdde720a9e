//! Deterministic generators for rational quadruples provably satisfying the
//! hypothesis set of a chosen formula.
//!
//! A is built block core-nilpotent (invertible core + strictly upper
//! nilpotent block) and conjugated by a unimodular matrix; the perturbation
//! Y = C*D^D*B is assembled from block-structured factors so the selected
//! annihilation conditions hold by construction. Every candidate is
//! re-verified through `check_conditions` and rejected on any miss, so the
//! recipes only have to make success likely, not certain.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::conditions::check_conditions;
use super::formulas::{conditions_hold, Formula};
use super::{derive, ModifiedError, ModifiedProblem};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::tensor::{Shape, Tensor};

const MAX_ATTEMPTS: u64 = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("no instance for {kind:?} within {attempts} attempts (seed {seed})")]
    Exhausted { kind: InstanceKind, seed: u64, attempts: u64 },
    #[error("unsupported kind {0:?}")]
    Unsupported(InstanceKind),
    #[error(transparent)]
    Modified(#[from] ModifiedError),
}

/// What the generated quadruple must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// hypotheses of the given formula hold
    ForFormula(Formula),
    /// unconstrained random quadruple
    Random,
    /// the given formula's hypothesis set fails
    Violating(Formula),
}

fn rand_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.gen_range(-3i64..=3);
    let den = if rng.gen_bool(0.3) { 2 } else { 1 };
    Rational::ratio(num, den)
}

fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<Rational> {
    Matrix::from_fn(rows, cols, |_, _| rand_rational(rng))
}

/// L*U with unit diagonals: determinant 1, exact integer inverse.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
    let mut l = Matrix::<Rational>::identity(n);
    let mut u = Matrix::<Rational>::identity(n);
    for r in 0..n {
        for c in 0..n {
            if r > c {
                l.set(r, c, Rational::from_integer(rng.gen_range(-2i64..=2)));
            } else if r < c {
                u.set(r, c, Rational::from_integer(rng.gen_range(-2i64..=2)));
            }
        }
    }
    l.mul(&u).expect("square")
}

fn invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
    let q = unimodular(rng, n);
    let mut d = Matrix::<Rational>::identity(n);
    for i in 0..n {
        let choices = ["1", "-1", "2", "-2", "1/2", "-1/2"];
        let pick = choices[rng.gen_range(0..choices.len())];
        d.set(i, i, Rational::parse(pick).unwrap());
    }
    q.mul(&d).expect("square")
}

fn strict_upper(rng: &mut ChaCha8Rng, m: usize, allow_zero: bool) -> Matrix<Rational> {
    let mut n = Matrix::<Rational>::zero(m, m);
    if m == 0 {
        return n;
    }
    let make_zero = allow_zero && rng.gen_bool(0.34);
    if !make_zero {
        for r in 0..m {
            for c in (r + 1)..m {
                if rng.gen_bool(0.7) {
                    n.set(r, c, Rational::from_integer(rng.gen_range(-2i64..=2)));
                }
            }
        }
    }
    n
}

fn block_diag(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Matrix<Rational> {
    let n = a.rows() + b.rows();
    Matrix::from_fn(n, n, |r, c| {
        if r < a.rows() && c < a.cols() {
            a.get(r, c).clone()
        } else if r >= a.rows() && c >= a.cols() {
            b.get(r - a.rows(), c - a.cols()).clone()
        } else {
            Rational::from_integer(0)
        }
    })
}

fn to_tensor(m: &Matrix<Rational>, rd: &[usize], cd: &[usize]) -> Tensor<Rational> {
    let shape = Shape::new(rd.to_vec(), cd.to_vec()).expect("valid dims");
    Tensor::dematricize(m, shape).expect("dims match")
}

#[derive(Clone, Copy, PartialEq)]
enum DKind {
    Invertible,
    Identity,
    Nilpotent,
}

#[derive(Clone, Copy)]
struct Plan {
    /// zero the nilpotent-row block of the left factor (kills Y21, Y22)
    u2_zero: bool,
    /// zero the nilpotent-column block of the right factor (kills Y12, Y22)
    v2_zero: bool,
    /// structured nonzero U2: only the leading kernel row of N, with the
    /// matching column of V2 zeroed, keeping the left annihilation
    /// conditions while exercising Y21 != 0
    u2_kernel: bool,
    a_invertible: bool,
    d_kind: DKind,
    /// zero the whole B factor (Y = 0, R = 0)
    b_zero: bool,
    /// zero the core-column block of B so that B*A^D = 0
    b_kills_core: bool,
}

impl Plan {
    fn plain() -> Plan {
        Plan {
            u2_zero: false,
            v2_zero: false,
            u2_kernel: false,
            a_invertible: false,
            d_kind: DKind::Invertible,
            b_zero: false,
            b_kills_core: false,
        }
    }
}

fn plan_for(formula: Formula, variant: bool) -> Plan {
    use super::formulas::SdSpecialization as S;
    use super::formulas::ZdDual as Z;
    use Formula::*;
    let mut plan = Plan::plain();
    match formula {
        Lemma22a | Thm31a | Thm31aAlt1 | Thm31aAlt2 | Specialization(S::Cor34a) => {
            if variant {
                plan.u2_kernel = true;
            } else {
                plan.u2_zero = true;
            }
        }
        Lemma22b | Thm31b | Specialization(S::Cor34b) => plan.v2_zero = true,
        Lemma23a | Thm32a => plan.v2_zero = true,
        // A^pi*Y*A^e*S = 0 needs the nilpotent-to-core coupling Y21 zeroed
        Lemma23b | Thm32b => plan.u2_zero = true,
        CorOneA | Thm33a => {
            if variant {
                plan.u2_kernel = true;
            } else {
                plan.u2_zero = true;
            }
        }
        CorOneB | Thm33b => plan.v2_zero = true,
        Specialization(S::Cor35a) | Specialization(S::Cor35aAlt) | Specialization(S::Cor33a) => {
            plan.u2_zero = true
        }
        Specialization(S::Cor35b) | Specialization(S::Cor33b) => plan.v2_zero = true,
        Specialization(S::ProjectorsEqual) => {
            if variant {
                plan.b_zero = true;
            } else {
                plan.u2_zero = true;
            }
        }
        Specialization(S::SchurSkew) => {
            plan.d_kind = DKind::Nilpotent;
            plan.b_kills_core = true;
        }
        Specialization(S::Di1a) => {
            plan.d_kind = DKind::Identity;
            plan.u2_zero = true;
        }
        Specialization(S::Di1b) => {
            plan.d_kind = DKind::Identity;
            plan.v2_zero = true;
        }
        Specialization(S::Di2a) => {
            plan.d_kind = DKind::Identity;
            plan.u2_zero = true;
        }
        Specialization(S::Di2b) => {
            plan.d_kind = DKind::Identity;
            plan.v2_zero = true;
        }
        Specialization(S::Di3) => {
            plan.d_kind = DKind::Identity;
            plan.u2_zero = true;
            plan.v2_zero = true;
        }
        Specialization(S::ZInv1a) => plan.u2_zero = true,
        Specialization(S::ZInv1b) => plan.v2_zero = true,
        Specialization(S::ZInv2) => {
            plan.u2_zero = true;
            plan.v2_zero = true;
        }
        Specialization(S::Smw) => plan.a_invertible = true,
        // dual kinds are generated through the swapped problem, see below
        Dual(Z::D21a) | Dual(Z::D21b) | Dual(Z::D22a) | Dual(Z::D22b) | Dual(Z::D23)
        | Dual(Z::D24) => unreachable!("duals generate via the swapped problem"),
        Direct => {}
    }
    plan
}

fn dual_source(which: super::formulas::ZdDual) -> Formula {
    use super::formulas::ZdDual as Z;
    match which {
        Z::D21a => Formula::Lemma22a,
        Z::D21b => Formula::Lemma22b,
        Z::D22a => Formula::Lemma23a,
        Z::D22b => Formula::Lemma23b,
        Z::D23 => Formula::CorOneA,
        Z::D24 => Formula::CorOneB,
    }
}

fn build_planned(
    plan: Plan,
    a_dims: &[usize],
    d_dims: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<ModifiedProblem<Rational>, ModifiedError> {
    let n: usize = a_dims.iter().product();
    let h: usize = d_dims.iter().product();

    // base tensor A = Q (Ac (+) N) Q^-1
    let r = if plan.a_invertible || n == 1 { n } else { rng.gen_range(1..n) };
    let core = invertible(rng, r);
    let nil = strict_upper(rng, n - r, true);
    let q = unimodular(rng, n);
    let q_inv = q.inverse().expect("unimodular");
    let a_mat = q.mul(&block_diag(&core, &nil)).unwrap().mul(&q_inv).unwrap();

    let d_mat = match plan.d_kind {
        DKind::Invertible => invertible(rng, h),
        DKind::Identity => Matrix::identity(h),
        DKind::Nilpotent => {
            // at least one nonzero entry so D itself is nonzero (unless h = 1)
            let mut m = strict_upper(rng, h, false);
            if h == 1 {
                m = Matrix::zero(1, 1);
            }
            m
        }
    };

    // left factor U (n x h) and right factor V (h x n), in A's eigenblock
    // coordinates; Y = Q U V Q^-1
    let mut u = rand_matrix(rng, n, h);
    let mut v = rand_matrix(rng, h, n);
    if plan.u2_zero {
        for row in r..n {
            for col in 0..h {
                u.set(row, col, Rational::from_integer(0));
            }
        }
    }
    if plan.v2_zero {
        for row in 0..h {
            for col in r..n {
                v.set(row, col, Rational::from_integer(0));
            }
        }
    }
    if plan.u2_kernel && r < n {
        // U2 supported on the kernel row of N, V2's matching column zeroed
        for row in (r + 1)..n {
            for col in 0..h {
                u.set(row, col, Rational::from_integer(0));
            }
        }
        for row in 0..h {
            v.set(row, r, Rational::from_integer(0));
        }
    }

    let (b_mat, c_mat) = if plan.b_zero {
        (Matrix::zero(h, n), rand_matrix(rng, n, h))
    } else if plan.b_kills_core {
        // B = Bt Q^-1 with the core columns of Bt zero, so B*A^D = 0
        let mut bt = rand_matrix(rng, h, n);
        for row in 0..h {
            for col in 0..r {
                bt.set(row, col, Rational::from_integer(0));
            }
        }
        (bt.mul(&q_inv).unwrap(), rand_matrix(rng, n, h))
    } else {
        // C = Q U and B = D V Q^-1 give Y = C D^D B = Q U V Q^-1 when D is
        // invertible (or the identity)
        let c = q.mul(&u).unwrap();
        let b = d_mat.mul(&v).unwrap().mul(&q_inv).unwrap();
        (b, c)
    };

    ModifiedProblem::new(
        to_tensor(&a_mat, a_dims, a_dims),
        to_tensor(&b_mat, d_dims, a_dims),
        to_tensor(&c_mat, a_dims, d_dims),
        to_tensor(&d_mat, d_dims, d_dims),
    )
}

fn build_random(
    a_dims: &[usize],
    d_dims: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<ModifiedProblem<Rational>, ModifiedError> {
    let n: usize = a_dims.iter().product();
    let h: usize = d_dims.iter().product();
    // bias toward singular A half the time via a low-rank product
    let a_mat = if n > 1 && rng.gen_bool(0.5) {
        let r = rng.gen_range(1..n);
        rand_matrix(rng, n, r).mul(&rand_matrix(rng, r, n)).unwrap()
    } else {
        rand_matrix(rng, n, n)
    };
    ModifiedProblem::new(
        to_tensor(&a_mat, a_dims, a_dims),
        to_tensor(&rand_matrix(rng, h, n), d_dims, a_dims),
        to_tensor(&rand_matrix(rng, n, h), a_dims, d_dims),
        to_tensor(&rand_matrix(rng, h, h), d_dims, d_dims),
    )
}

/// Generate a rational quadruple for the requested kind, deterministic in
/// the seed. Candidates failing the re-verification gate are rejected and
/// rebuilt from an evolved stream, up to a bounded number of attempts.
pub fn generate_instance(
    kind: InstanceKind,
    a_dims: &[usize],
    d_dims: &[usize],
    seed: u64,
) -> Result<ModifiedProblem<Rational>, GenerateError> {
    if let InstanceKind::ForFormula(Formula::Dual(which)) = kind {
        // a dual instance is the swapped image of a source instance with the
        // roles of (A, Y, S) and (D, R, Z) exchanged
        let source = generate_instance(
            InstanceKind::ForFormula(dual_source(which)),
            d_dims,
            a_dims,
            seed,
        )?;
        let problem = source.dual();
        let derived = derive(&problem)?;
        let rep = check_conditions(&derived);
        if !conditions_hold(Formula::Dual(which), &rep) {
            return Err(GenerateError::Exhausted { kind, seed, attempts: 1 });
        }
        return Ok(problem);
    }

    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let variant = rng.gen_bool(0.5);
        let candidate = match kind {
            InstanceKind::ForFormula(f) => build_planned(plan_for(f, variant), a_dims, d_dims, &mut rng),
            InstanceKind::Random | InstanceKind::Violating(_) => {
                build_random(a_dims, d_dims, &mut rng)
            }
        };
        let Ok(problem) = candidate else { continue };
        let Ok(derived) = derive(&problem) else { continue };
        let rep = check_conditions(&derived);
        let ok = match kind {
            InstanceKind::ForFormula(f) => conditions_hold(f, &rep),
            InstanceKind::Random => true,
            InstanceKind::Violating(f) => !conditions_hold(f, &rep),
        };
        if ok {
            return Ok(problem);
        }
    }
    Err(GenerateError::Exhausted { kind, seed, attempts: MAX_ATTEMPTS })
}

/// A pair (P, Q) of square tensors with P*Q = 0 and at least one of them
/// singular, for the additive formula.
pub fn generate_pq_pair(dims: &[usize], seed: u64) -> (Tensor<Rational>, Tensor<Rational>) {
    let n: usize = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let split = if n == 1 { 1 } else { rng.gen_range(1..n) };
    // P has columns only in the leading block, Q rows only in the trailing
    // block, so P*Q = 0 survives conjugation
    let mut p = Matrix::<Rational>::zero(n, n);
    for r in 0..n {
        for c in 0..split {
            p.set(r, c, rand_rational(&mut rng));
        }
    }
    let mut q = Matrix::<Rational>::zero(n, n);
    for r in split..n {
        for c in 0..n {
            q.set(r, c, rand_rational(&mut rng));
        }
    }
    let g = unimodular(&mut rng, n);
    let g_inv = g.inverse().expect("unimodular");
    let p = g.mul(&p).unwrap().mul(&g_inv).unwrap();
    let q = g.mul(&q).unwrap().mul(&g_inv).unwrap();
    (to_tensor(&p, dims, dims), to_tensor(&q, dims, dims))
}
