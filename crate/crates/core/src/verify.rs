//! Residual and norm diagnostics: defining-equation residuals, tensor norms,
//! the perturbation-error bound, and the seeded perturbation experiment.
//!
//! The norm used for all reported diagnostics is the Frobenius norm of the
//! matricization (the entrywise 2-norm of the tensor). A power-iteration
//! spectral norm is also provided.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::drazin::drazin;
use crate::modified::{derive, sd_thm33a, DerivedQuantities, ModifiedError, ModifiedProblem};
use crate::scalar::{Rational, Scalar};
use crate::tensor::{Tensor, TensorError};

pub const RESIDUAL_NORM_KIND: &str = "frobenius-of-matricization";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Modified(#[from] ModifiedError),
    #[error("residuals require index k >= 1, got {0}")]
    BadIndex(usize),
    #[error("structural identity {0} does not hold exactly")]
    IdentityFailed(&'static str),
    #[error("perturbation bound inapplicable: ||A^D*Y|| = {norm} >= 1")]
    BoundInapplicable { norm: f64 },
}

/// Frobenius norm of the matricization, evaluated in float.
pub fn frobenius_norm<T: Scalar>(x: &Tensor<T>) -> f64 {
    x.entries()
        .iter()
        .map(|e| {
            let v = e.to_f64();
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// Largest singular value of the matricization by power iteration on M'M:
/// deterministic all-ones start, relative tolerance 1e-12, cap 10000
/// iterations. Rational inputs are converted to float first.
pub fn spectral_norm<T: Scalar>(x: &Tensor<T>) -> f64 {
    let m = x.matricize();
    let (rows, cols) = (m.rows(), m.cols());
    let a: Vec<f64> = m.data().iter().map(|e| e.to_f64()).collect();
    if a.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    // w = M'M v without forming M'M
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut mv = vec![0.0; rows];
        for r in 0..rows {
            let mut acc = 0.0;
            for c in 0..cols {
                acc += a[r * cols + c] * v[c];
            }
            mv[r] = acc;
        }
        let mut out = vec![0.0; cols];
        for c in 0..cols {
            let mut acc = 0.0;
            for r in 0..rows {
                acc += a[r * cols + c] * mv[r];
            }
            out[c] = acc;
        }
        out
    };
    let mut v = vec![1.0; cols];
    let mut lambda = 0.0f64;
    for _ in 0..10_000 {
        let w = apply(&v);
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let vw: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        if vv == 0.0 {
            return 0.0;
        }
        let next = vw / vv;
        let norm_w = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm_w == 0.0 {
            return 0.0;
        }
        v = w.iter().map(|x| x / norm_w).collect();
        if (next - lambda).abs() <= 1e-12 * next.abs().max(f64::MIN_POSITIVE) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

/// The three defining-equation residuals of a candidate inverse X for S.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// ||X*S*X - X||
    pub r1: f64,
    /// ||S*X - X*S||
    pub r2: f64,
    /// ||S^k*X*S - S^k||
    pub r3: f64,
    pub index_used: usize,
    pub norm_kind: &'static str,
}

/// Residuals of X as a Drazin inverse of S at index k.
pub fn drazin_residuals<T: Scalar>(
    s: &Tensor<T>,
    x: &Tensor<T>,
    k: usize,
) -> Result<ResidualReport, VerifyError> {
    if k == 0 {
        return Err(VerifyError::BadIndex(k));
    }
    let xsx = x.einstein_product(s)?.einstein_product(x)?;
    let r1 = frobenius_norm(&xsx.sub(x)?);
    let sx = s.einstein_product(x)?;
    let xs = x.einstein_product(s)?;
    let r2 = frobenius_norm(&sx.sub(&xs)?);
    let sk = s.power(k)?;
    let skxs = sk.einstein_product(x)?.einstein_product(s)?;
    let r3 = frobenius_norm(&skxs.sub(&sk)?);
    Ok(ResidualReport { r1, r2, r3, index_used: k, norm_kind: RESIDUAL_NORM_KIND })
}

/// Outcome of the perturbation-error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// ||S^D - A^D|| / ||A^D||
    pub lhs: f64,
    /// ||A^D*Y|| / (1 - ||A^D*Y||)
    pub rhs: f64,
    pub holds: bool,
}

/// Verify the exact structural identities
/// S^D - A^D = S^D*Y*A^D = A^D*Y*S^D, then evaluate the norm bound
/// ||S^D - A^D||/||A^D|| <= ||A^D*Y||/(1 - ||A^D*Y||).
pub fn perturbation_bound_check<T: Scalar>(
    q: &DerivedQuantities<T>,
) -> Result<BoundCheck, VerifyError> {
    let sd = drazin(q.s()).map_err(ModifiedError::from)?.drazin;
    let ad = q.a_d();
    let y = q.y();
    let diff = sd.sub(ad)?;
    let tol = crate::scalar::ScalarDomain::of(T::DOMAIN).zero_tolerance;
    let right = sd.einstein_product(y)?.einstein_product(ad)?;
    if !diff.sub(&right)?.is_zero_within(tol) {
        return Err(VerifyError::IdentityFailed("S^D - A^D = S^D*Y*A^D"));
    }
    let left = ad.einstein_product(y)?.einstein_product(&sd)?;
    if !diff.sub(&left)?.is_zero_within(tol) {
        return Err(VerifyError::IdentityFailed("S^D - A^D = A^D*Y*S^D"));
    }
    let nady = frobenius_norm(&ad.einstein_product(y)?);
    if nady >= 1.0 {
        return Err(VerifyError::BoundInapplicable { norm: nady });
    }
    let nad = frobenius_norm(ad);
    let lhs = if nad == 0.0 { 0.0 } else { frobenius_norm(&diff) / nad };
    let rhs = nady / (1.0 - nady);
    Ok(BoundCheck { lhs, rhs, holds: lhs <= rhs + 1e-12 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Formula,
    Direct,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Formula => "formula",
            Method::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Max,
    Mean,
}

impl Aggregation {
    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Max => "max",
            Aggregation::Mean => "mean",
        }
    }
}

/// One aggregated row of the experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRow {
    pub epsilon: f64,
    pub method: Method,
    pub aggregation: Aggregation,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub trials: usize,
    pub skipped: usize,
}

/// One trial's raw residuals (None when the trial was skipped).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub epsilon: f64,
    pub trial: usize,
    pub c: f64,
    pub formula: Option<[f64; 3]>,
    pub direct: Option<[f64; 3]>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<PerturbationRow>,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { epsilons: vec![10.0, 1e-1, 1e-3, 1e-5], trials: 32, seed: 42 }
    }
}

/// Rerun the float64 update-vs-direct comparison: per trial, draw
/// c uniform in [-1,1] (a 1e-6 neighbourhood of zero excluded), replace
/// every nonzero entry of D with 1/(c*epsilon), and compare the
/// index-bounded formula's inverse against the direct Drazin computation.
/// Deterministic in the seed: each trial runs on its own (seed, epsilon,
/// trial) stream.
pub fn run_perturbation_experiment(
    base: &ModifiedProblem<Rational>,
    config: &ExperimentConfig,
) -> ExperimentReport {
    let a = base.a().to_float64();
    let b = base.b().to_float64();
    let c_t = base.c().to_float64();
    let d_base = base.d().to_float64();

    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for (ei, &eps) in config.epsilons.iter().enumerate() {
        let mut per_method: [Vec<[f64; 3]>; 2] = [Vec::new(), Vec::new()];
        let mut skipped = 0usize;
        for trial in 0..config.trials {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(((ei as u64) << 32) | trial as u64);
            let mut c_val: f64 = rng.gen_range(-1.0..=1.0);
            while c_val.abs() < 1e-6 {
                c_val = rng.gen_range(-1.0..=1.0);
            }
            let a_scale = c_val * eps;
            let d_mod = d_base.map(|&v| if v == 0.0 { 0.0 } else { 1.0 / a_scale });

            let mut record = TrialRecord {
                epsilon: eps,
                trial,
                c: c_val,
                formula: None,
                direct: None,
                skipped: None,
            };
            match trial_residuals(&a, &b, &c_t, &d_mod) {
                Ok((formula, direct)) => {
                    record.formula = Some(formula);
                    record.direct = Some(direct);
                    per_method[0].push(formula);
                    per_method[1].push(direct);
                }
                Err(reason) => {
                    record.skipped = Some(reason);
                    skipped += 1;
                }
            }
            trials.push(record);
        }
        for (mi, method) in [Method::Formula, Method::Direct].into_iter().enumerate() {
            let data = &per_method[mi];
            for agg in [Aggregation::Max, Aggregation::Mean] {
                let fold = |idx: usize| -> f64 {
                    if data.is_empty() {
                        return 0.0;
                    }
                    match agg {
                        Aggregation::Max => {
                            data.iter().map(|r| r[idx]).fold(0.0, f64::max)
                        }
                        Aggregation::Mean => {
                            data.iter().map(|r| r[idx]).sum::<f64>() / data.len() as f64
                        }
                    }
                };
                rows.push(PerturbationRow {
                    epsilon: eps,
                    method,
                    aggregation: agg,
                    r1: fold(0),
                    r2: fold(1),
                    r3: fold(2),
                    trials: data.len(),
                    skipped,
                });
            }
        }
    }
    ExperimentReport { rows, trials }
}

fn trial_residuals(
    a: &Tensor<f64>,
    b: &Tensor<f64>,
    c: &Tensor<f64>,
    d: &Tensor<f64>,
) -> Result<([f64; 3], [f64; 3]), String> {
    let problem = ModifiedProblem::new(a.clone(), b.clone(), c.clone(), d.clone())
        .map_err(|e| format!("assembly: {e}"))?;
    let q = derive(&problem).map_err(|e| format!("derive: {e}"))?;
    let x_formula = sd_thm33a(&q).map_err(|e| format!("hypothesis: {e}"))?;
    let s_dr = drazin(q.s()).map_err(|e| format!("direct: {e}"))?;
    let k = s_dr.index.max(1);
    let rf = drazin_residuals(q.s(), &x_formula, k).map_err(|e| format!("residuals: {e}"))?;
    let rd = drazin_residuals(q.s(), &s_dr.drazin, k).map_err(|e| format!("residuals: {e}"))?;
    Ok(([rf.r1, rf.r2, rf.r3], [rd.r1, rd.r2, rd.r3]))
}

impl ExperimentReport {
    pub fn row(&self, epsilon: f64, method: Method, agg: Aggregation) -> Option<&PerturbationRow> {
        self.rows
            .iter()
            .find(|r| r.epsilon == epsilon && r.method == method && r.aggregation == agg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    fn q(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn tensor(rd: &[usize], cd: &[usize], entries: &[&str]) -> Tensor<Rational> {
        let shape = Shape::new(rd.to_vec(), cd.to_vec()).unwrap();
        Tensor::new(shape, entries.iter().map(|s| q(s)).collect()).unwrap()
    }

    #[test]
    fn identity_norms() {
        let i = Tensor::<Rational>::identity(&[2, 3]).unwrap();
        assert_eq!(spectral_norm(&i), 1.0);
        assert!((frobenius_norm(&i) - 6f64.sqrt()).abs() < 1e-12);
        let z = Tensor::<Rational>::zero(Shape::new(vec![2], vec![2]).unwrap());
        assert_eq!(spectral_norm(&z), 0.0);
        assert_eq!(frobenius_norm(&z), 0.0);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = Tensor::<Rational>::diagonal(&[3], &[q("3"), q("-5"), q("2")]).unwrap();
        assert!((spectral_norm(&d) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn exact_inverse_gives_zero_residuals() {
        let s = tensor(&[2], &[2], &["2", "1", "1", "1"]);
        let x = drazin(&s).unwrap().drazin;
        let rep = drazin_residuals(&s, &x, 1).unwrap();
        assert_eq!((rep.r1, rep.r2, rep.r3), (0.0, 0.0, 0.0));
        assert_eq!(rep.norm_kind, RESIDUAL_NORM_KIND);
    }

    #[test]
    fn zero_candidate_shows_r3() {
        // S idempotent nonzero, X = 0: r3 = ||S^k||
        let s = tensor(&[2], &[2], &["1", "0", "0", "0"]);
        let x = Tensor::<Rational>::zero(Shape::new(vec![2], vec![2]).unwrap());
        let rep = drazin_residuals(&s, &x, 1).unwrap();
        assert_eq!(rep.r1, 0.0);
        assert!(rep.r3 > 0.0);
        assert!((rep.r3 - frobenius_norm(&s)).abs() < 1e-15);
    }

    #[test]
    fn residuals_reject_index_zero() {
        let s = tensor(&[2], &[2], &["1", "0", "0", "1"]);
        assert!(matches!(drazin_residuals(&s, &s, 0), Err(VerifyError::BadIndex(0))));
    }

    #[test]
    fn bound_check_trivial_when_y_zero() {
        let a = tensor(&[2], &[2], &["1", "0", "0", "0"]);
        let d = tensor(&[2], &[2], &["1", "0", "0", "1"]);
        let b = tensor(&[2], &[2], &["1", "0", "0", "1"]);
        let c = Tensor::zero(Shape::new(vec![2], vec![2]).unwrap());
        let qd = derive(&ModifiedProblem::new(a, b, c, d).unwrap()).unwrap();
        let check = perturbation_bound_check(&qd).unwrap();
        assert_eq!(check.lhs, 0.0);
        assert_eq!(check.rhs, 0.0);
        assert!(check.holds);
    }

    #[test]
    fn experiment_is_deterministic() {
        let base = crate::reference::problem();
        let cfg = ExperimentConfig { epsilons: vec![10.0], trials: 2, seed: 7 };
        let one = run_perturbation_experiment(&base, &cfg);
        let two = run_perturbation_experiment(&base, &cfg);
        assert_eq!(one.rows, two.rows);
        assert_eq!(one.trials, two.trials);
    }
}
