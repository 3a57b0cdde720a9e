//! Command-line front end: tensor file I/O, direct and formula-based Drazin
//! computation, hypothesis reports, the bundled worked example, and the
//! perturbation experiment.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 hypothesis violation,
//! 3 internal verification failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use eindrazin::drazin::satisfies_defining_equations;
use eindrazin::io::{read_tensor, write_tensor, AnyTensor, IoError};
use eindrazin::modified::{
    applicable_formulas, auto_select, check_conditions, derive, sd_formula, ConditionReport,
    Formula, FormulaError, ModifiedError, ModifiedProblem, Target,
};
use eindrazin::scalar::{Domain, Scalar};
use eindrazin::tensor::Tensor;
use eindrazin::verify::{
    drazin_residuals, frobenius_norm, perturbation_bound_check, run_perturbation_experiment,
    Aggregation, ExperimentConfig, ExperimentReport, Method,
};
use eindrazin::{drazin, reference};

#[derive(Parser)]
#[command(name = "eindrazin", version, about = "Drazin inverses of even-order tensors under the Einstein product")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Rational,
    Float64,
}

impl DomainArg {
    fn domain(self) -> Domain {
        match self {
            DomainArg::Rational => Domain::Rational,
            DomainArg::Float64 => Domain::Float64,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportArg {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Drazin inverse of a square tensor file
    Drazin {
        /// input tensor file
        input: PathBuf,
        /// computation domain (inputs are converted)
        #[arg(long, value_enum, default_value = "rational")]
        domain: DomainArg,
        /// write the inverse to this tensor file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute (A - C*D^D*B)^D by a selected or automatically chosen formula
    Modified {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        d: PathBuf,
        /// formula selector, or "auto" for the weakest applicable hypothesis
        #[arg(long, default_value = "auto")]
        formula: String,
        #[arg(long, value_enum, default_value = "rational")]
        domain: DomainArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report every hypothesis verdict and the applicable formulas
    Check {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        d: PathBuf,
        #[arg(long, value_enum, default_value = "rational")]
        domain: DomainArg,
    },
    /// Recompute the bundled worked example and diff against its expected
    /// inverses, norms and perturbation bound
    Example,
    /// Run the seeded perturbation experiment on the bundled example
    Perturb {
        /// comma-separated epsilon list
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        epsilons: Option<Vec<f64>>,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportArg,
    },
}

enum CliError {
    Io(String),
    Hypothesis(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Hypothesis(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Hypothesis(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ModifiedError> for CliError {
    fn from(e: ModifiedError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<FormulaError> for CliError {
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::Hypothesis { .. }
            | FormulaError::DegreeMismatch { .. }
            | FormulaError::InvalidK { .. } => CliError::Hypothesis(e.to_string()),
            FormulaError::Verification { .. } => CliError::Verification(e.to_string()),
            FormulaError::Modified(inner) => CliError::Io(inner.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Drazin { input, domain, out } => cmd_drazin(&input, domain, out.as_deref()),
        Command::Modified { a, b, c, d, formula, domain, out } => {
            cmd_modified(&a, &b, &c, &d, &formula, domain, out.as_deref())
        }
        Command::Check { a, b, c, d, domain } => cmd_check(&a, &b, &c, &d, domain),
        Command::Example => cmd_example(),
        Command::Perturb { epsilons, trials, seed, report } => {
            cmd_perturb(epsilons, trials, seed, report)
        }
    }
}

fn load(path: &Path, domain: Domain) -> Result<AnyTensor, CliError> {
    let tensor = read_tensor(path)?;
    Ok(match domain {
        Domain::Rational => AnyTensor::Rational(tensor.into_rational()?),
        Domain::Float64 => AnyTensor::Float64(tensor.into_float64()),
    })
}

fn cmd_drazin(input: &Path, domain: DomainArg, out: Option<&Path>) -> Result<(), CliError> {
    match load(input, domain.domain())? {
        AnyTensor::Rational(t) => drazin_report(&t, out, AnyTensor::Rational),
        AnyTensor::Float64(t) => drazin_report(&t, out, AnyTensor::Float64),
    }
}

fn drazin_report<T: Scalar>(
    t: &Tensor<T>,
    out: Option<&Path>,
    wrap: impl Fn(Tensor<T>) -> AnyTensor,
) -> Result<(), CliError> {
    let result = drazin(t).map_err(|e| CliError::Io(e.to_string()))?;
    println!("index: {}", result.index);
    let residuals = drazin_residuals(t, &result.drazin, result.index.max(1))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "residuals ({}): r1 = {:.3e}, r2 = {:.3e}, r3 = {:.3e}",
        residuals.norm_kind, residuals.r1, residuals.r2, residuals.r3
    );
    if let Some(path) = out {
        write_tensor(path, &wrap(result.drazin))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn load_problem<T: Scalar>(
    a: AnyTensor,
    b: AnyTensor,
    c: AnyTensor,
    d: AnyTensor,
    unwrap: impl Fn(AnyTensor) -> Option<Tensor<T>>,
) -> Result<ModifiedProblem<T>, CliError> {
    let take = |t: AnyTensor, name: &str| {
        unwrap(t).ok_or_else(|| CliError::Io(format!("{name}: unexpected domain")))
    };
    ModifiedProblem::new(
        take(a, "A")?,
        take(b, "B")?,
        take(c, "C")?,
        take(d, "D")?,
    )
    .map_err(CliError::from)
}

fn cmd_modified(
    a: &Path,
    b: &Path,
    c: &Path,
    d: &Path,
    formula: &str,
    domain: DomainArg,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let dom = domain.domain();
    let (ta, tb, tc, td) = (load(a, dom)?, load(b, dom)?, load(c, dom)?, load(d, dom)?);
    match dom {
        Domain::Rational => {
            let p = load_problem(ta, tb, tc, td, |t| match t {
                AnyTensor::Rational(t) => Some(t),
                _ => None,
            })?;
            modified_generic(&p, formula, out, AnyTensor::Rational)
        }
        Domain::Float64 => {
            let p = load_problem(ta, tb, tc, td, |t| match t {
                AnyTensor::Float64(t) => Some(t),
                _ => None,
            })?;
            modified_generic(&p, formula, out, AnyTensor::Float64)
        }
    }
}

fn modified_generic<T: Scalar>(
    problem: &ModifiedProblem<T>,
    formula: &str,
    out: Option<&Path>,
    wrap: impl Fn(Tensor<T>) -> AnyTensor,
) -> Result<(), CliError> {
    let q = derive(problem)?;
    let report = check_conditions(&q);
    print_conditions(&report);

    let selected = if formula == "auto" {
        let choice = auto_select(&report);
        if choice == Formula::Direct {
            println!("auto: no formula hypotheses hold, falling back to direct computation");
        } else {
            println!("auto: selected {choice}");
        }
        choice
    } else {
        formula
            .parse::<Formula>()
            .map_err(CliError::Io)?
    };

    let output = sd_formula(&q, selected)?;
    let target = match selected.target() {
        Target::SDrazin => q.s(),
        Target::ZDrazin => q.z(),
    };
    let verified = satisfies_defining_equations(target, &output)
        .map_err(|e| CliError::Io(e.to_string()))?;
    if !verified {
        return Err(CliError::Verification(format!(
            "{selected}: output failed the defining equations"
        )));
    }
    let k = eindrazin::index_of(target).map_err(|e| CliError::Io(e.to_string()))?;
    let residuals = drazin_residuals(target, &output, k.max(1))
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "computed {} via {selected}; residuals r1 = {:.3e}, r2 = {:.3e}, r3 = {:.3e}",
        match selected.target() {
            Target::SDrazin => "S^D",
            Target::ZDrazin => "Z^D",
        },
        residuals.r1,
        residuals.r2,
        residuals.r3
    );
    if let Some(path) = out {
        write_tensor(path, &wrap(output))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_conditions(report: &ConditionReport) {
    println!("conditions:");
    for (name, verdict) in report.entries() {
        println!("  {name:<32} {verdict}");
    }
}

fn cmd_check(a: &Path, b: &Path, c: &Path, d: &Path, domain: DomainArg) -> Result<(), CliError> {
    let dom = domain.domain();
    let (ta, tb, tc, td) = (load(a, dom)?, load(b, dom)?, load(c, dom)?, load(d, dom)?);
    let report = match dom {
        Domain::Rational => {
            let p = load_problem(ta, tb, tc, td, |t| match t {
                AnyTensor::Rational(t) => Some(t),
                _ => None,
            })?;
            check_conditions(&derive(&p)?)
        }
        Domain::Float64 => {
            let p = load_problem(ta, tb, tc, td, |t| match t {
                AnyTensor::Float64(t) => Some(t),
                _ => None,
            })?;
            check_conditions(&derive(&p)?)
        }
    };
    print_conditions(&report);
    let applicable = applicable_formulas(&report);
    if applicable.is_empty() {
        println!("applicable formulas: none (direct computation only)");
    } else {
        let names: Vec<&str> = applicable.iter().map(|f| f.name()).collect();
        println!("applicable formulas: {}", names.join(", "));
    }
    println!("auto would select: {}", auto_select(&report));
    Ok(())
}

fn first_mismatch<T: Scalar>(got: &Tensor<T>, want: &Tensor<T>) -> Option<(Vec<usize>, String, String)> {
    let shape = got.shape();
    let dims: Vec<usize> = shape
        .row_dims()
        .iter()
        .chain(shape.col_dims().iter())
        .copied()
        .collect();
    let mut idx = vec![1usize; dims.len()];
    loop {
        let g = got.get(&idx).expect("in range");
        let w = want.get(&idx).expect("in range");
        if g != w {
            return Some((idx.clone(), g.render(), w.render()));
        }
        // odometer increment over the 1-based multi-index
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            if idx[pos] < dims[pos] {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 1;
        }
    }
}

fn cmd_example() -> Result<(), CliError> {
    let p = reference::problem();
    let q = derive(&p)?;

    let mut verified = 0usize;
    let check = |name: &str,
                     got: &Tensor<eindrazin::Rational>,
                     want: &Tensor<eindrazin::Rational>|
     -> Result<usize, CliError> {
        if let Some((idx, g, w)) = first_mismatch(got, want) {
            return Err(CliError::Verification(format!(
                "{name} mismatch at multi-index {idx:?}: computed {g}, expected {w}"
            )));
        }
        Ok(got.entries().len())
    };
    verified += check("A^D", q.a_d(), &reference::expected_a_drazin())?;
    verified += check("D^D", q.d_d(), &reference::expected_d_drazin())?;
    verified += check("Z^D", q.z_d(), &reference::expected_z_drazin())?;
    let sd = sd_formula(&q, Formula::Thm33a)?;
    verified += check("S^D", &sd, &reference::expected_s_drazin())?;
    println!("36 + 36 + 36 + 36 entries verified, 0 mismatches ({verified} total)");

    let report = check_conditions(&q);
    println!("ind(A) = {}", report.index_a);
    println!("S*A^pi*Y = 0: {}", report.cond_s_api_y_zero);
    println!("K*D^pi*Z^D*H = K*D^D*Z^pi*H: {}", report.lemma27_c1);

    let diff = sd.sub(q.a_d()).map_err(|e| CliError::Io(e.to_string()))?;
    let n_diff = frobenius_norm(&diff);
    let n_ad = frobenius_norm(q.a_d());
    let ady = q
        .a_d()
        .einstein_product(q.y())
        .map_err(|e| CliError::Io(e.to_string()))?;
    let n_ady = frobenius_norm(&ady);
    let (print_diff, print_ad, print_ady) = reference::printed_norms();
    let mut norms_ok = true;
    for (name, measured, printed) in [
        ("||S^D - A^D||", n_diff, print_diff),
        ("||A^D||", n_ad, print_ad),
        ("||A^D*Y||", n_ady, print_ady),
    ] {
        let rel = (measured - printed).abs() / printed;
        let ok = rel <= 1e-3;
        norms_ok &= ok;
        println!("{name} = {measured:.6} (expected about {printed:.6}, relative error {rel:.1e})");
    }
    if !norms_ok {
        return Err(CliError::Verification("norm check beyond 1e-3".to_string()));
    }

    let bound = perturbation_bound_check(&q).map_err(|e| CliError::Verification(e.to_string()))?;
    println!(
        "perturbation bound: {:.4} <= {:.4} ({})",
        bound.lhs,
        bound.rhs,
        if bound.holds { "holds" } else { "violated" }
    );
    if !bound.holds {
        return Err(CliError::Verification("perturbation bound violated".to_string()));
    }
    Ok(())
}

fn cmd_perturb(
    epsilons: Option<Vec<f64>>,
    trials: usize,
    seed: u64,
    report: ReportArg,
) -> Result<(), CliError> {
    let config = ExperimentConfig {
        epsilons: epsilons.unwrap_or_else(|| ExperimentConfig::default().epsilons),
        trials,
        seed,
    };
    let outcome = run_perturbation_experiment(&reference::problem(), &config);
    match report {
        ReportArg::Structured => print!("{}", structured_table(&outcome)),
        ReportArg::Text => print!("{}", text_table(&config, &outcome)),
    }
    Ok(())
}

fn structured_table(outcome: &ExperimentReport) -> String {
    let mut out = String::from("epsilon,method,r1,r2,r3,trials,skipped\n");
    for row in &outcome.rows {
        if row.aggregation != Aggregation::Max {
            continue;
        }
        let _ = writeln!(
            out,
            "{:e},{},{:e},{:e},{:e},{},{}",
            row.epsilon,
            row.method.name(),
            row.r1,
            row.r2,
            row.r3,
            row.trials,
            row.skipped
        );
    }
    out
}

fn text_table(config: &ExperimentConfig, outcome: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "perturbation experiment: {} trials per epsilon, seed {}",
        config.trials, config.seed
    );
    let _ = writeln!(out, "{:>10}  {:>8}  {:>12} {:>12} {:>12}  {:>7}", "epsilon", "method", "r1", "r2", "r3", "skipped");
    for &eps in &config.epsilons {
        for method in [Method::Formula, Method::Direct] {
            if let Some(row) = outcome.row(eps, method, Aggregation::Max) {
                let _ = writeln!(
                    out,
                    "{:>10.0e}  {:>8}  {:>12.4e} {:>12.4e} {:>12.4e}  {:>7}",
                    row.epsilon, row.method.name(), row.r1, row.r2, row.r3, row.skipped
                );
            }
        }
    }
    let _ = writeln!(out, "(max over trials; means below)");
    for &eps in &config.epsilons {
        for method in [Method::Formula, Method::Direct] {
            if let Some(row) = outcome.row(eps, method, Aggregation::Mean) {
                let _ = writeln!(
                    out,
                    "{:>10.0e}  {:>8}  {:>12.4e} {:>12.4e} {:>12.4e}  {:>7}",
                    row.epsilon, row.method.name(), row.r1, row.r2, row.r3, row.skipped
                );
            }
        }
    }
    out
}
