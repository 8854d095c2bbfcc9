//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse/IO error or bad level, 2 verification or
//! bound failure, 3 algebra mismatch, 4 no convergence, 5 zero functional.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Tolerances;
use crate::error::Error;
use crate::functionals::{
    abs_continuous, gns, left_kernel_contained, order_leq, singular, FunctionalJson,
    PositiveFunctional,
};
use crate::lebesgue::{decompose, uniqueness_check, verify_decomposition};
use crate::nonuniq::{bound_report, write_csv, TruncationLab};
use crate::opdecomp::Mode;
use crate::staralg::{
    gamma_norm, group_algebra, irreducible_dimensions, seminorm_sigma_f, wedderburn_decompose,
    CayleyTable, ElementJson, GeneratorsJson, WedderburnOptions,
};

#[derive(Debug, Parser)]
#[command(
    name = "lebesgue",
    version,
    about = "Lebesgue decompositions of positive functionals on finite-dimensional C*-algebras"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative rank cutoff (default: dim * machine epsilon).
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    /// Threshold on the parallel sum below which operators count as singular.
    #[arg(long, global = true)]
    pub tol_singular: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Schur)]
    pub mode: ModeArg,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Round every number in JSON output to a multiple of this step.
    #[arg(long, global = true)]
    pub precision: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Schur,
    Iterative,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Schur => Mode::Schur,
            ModeArg::Iterative => Mode::Iterative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lebesgue decomposition of f with respect to g, with verification.
    Decompose {
        /// Functional JSON for f (`-` for stdin).
        f: PathBuf,
        /// Functional JSON for g.
        g: PathBuf,
    },
    /// Order, absolute continuity, singularity and uniqueness relations of f and g.
    Check { f: PathBuf, g: PathBuf },
    /// Block-diagonalize the *-algebra generated by a set of matrices.
    Wedderburn {
        /// Generators JSON (`-` for stdin).
        generators: PathBuf,
    },
    /// Regular representation of a finite group given by its Cayley table.
    GroupAlgebra { table: PathBuf },
    /// GNS representation of a positive functional.
    Gns { f: PathBuf },
    /// Bound table of the truncated non-uniqueness construction, as CSV.
    NonuniqReport {
        #[arg(long, value_delimiter = ',', default_values_t = vec![6usize, 12, 24])]
        levels: Vec<usize>,
    },
    /// σ_F seminorm and greatest C*-seminorm of an algebra element.
    SigmaNorm {
        element: PathBuf,
        /// 0-based block indices forming F.
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<usize>,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            code: 1,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::AlgebraMismatch => 3,
            Error::NoConvergence(_) => 4,
            Error::ZeroFunctional => 5,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs the command, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::io(path, e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::io(path, e))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_input(path)?).map_err(|e| CliError::io(path, e))
}

fn load_functional(path: &Path, tol: &Tolerances) -> CliResult<PositiveFunctional> {
    let j: FunctionalJson = parse_json(path)?;
    j.to_functional(tol).map_err(|e| match e {
        Error::AlgebraMismatch => CliError::from(e),
        other => CliError {
            code: 1,
            message: format!("{}: {other}", path.display()),
        },
    })
}

pub fn tolerances(g: &GlobalOpts) -> CliResult<Tolerances> {
    let mut tol = Tolerances::default();
    if let Some(t) = g.tol_rank {
        tol = tol.with_rank_rel(t);
    }
    if let Some(t) = g.tol_singular {
        tol = tol.with_singular(t);
    }
    for (name, v) in [
        ("--tol-rank", g.tol_rank),
        ("--tol-singular", g.tol_singular),
    ] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError {
                    code: 1,
                    message: format!("{name} must be positive, got {v}"),
                });
            }
        }
    }
    Ok(tol)
}

/// Rounds every finite number in a JSON tree to a multiple of `step`,
/// leaving `tolerances` objects untouched.
pub fn round_json(v: &mut Value, step: f64) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_u64() && !n.is_i64()) {
                let r = (x / step).round() * step;
                let r = if r == 0.0 { 0.0 } else { r };
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_json(x, step)),
        Value::Object(map) => map
            .iter_mut()
            .filter(|(k, _)| k.as_str() != "tolerances")
            .for_each(|(_, x)| round_json(x, step)),
        _ => {}
    }
}

struct Emitter<'a> {
    global: &'a GlobalOpts,
    stdout: &'a mut dyn Write,
}

impl Emitter<'_> {
    fn write_text(&mut self, text: &str) -> CliResult<()> {
        match &self.global.out {
            Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        }
    }

    fn write_json(&mut self, value: &impl Serialize) -> CliResult<()> {
        let mut v = serde_json::to_value(value).map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        })?;
        if let Some(step) = self.global.precision {
            round_json(&mut v, step);
        }
        let mut text = serde_json::to_string_pretty(&v).expect("values serialize");
        text.push('\n');
        self.write_text(&text)
    }

    fn note(&mut self, line: &str) {
        let _ = writeln!(self.stdout, "{line}");
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<i32> {
    let g = &cli.global;
    let tol = tolerances(g)?;
    let mut em = Emitter { global: g, stdout };
    match &cli.command {
        Command::Decompose { f, g: gpath } => {
            let f = load_functional(f, &tol)?;
            let gf = load_functional(gpath, &tol)?;
            let d = decompose(&f, &gf, g.mode.into(), &tol)?;
            let report = verify_decomposition(&f, &gf, &d, g.seed, &tol);
            let out = json!({
                "tolerances": tol,
                "decomposition": d.to_json(),
                "verification": report,
            });
            if g.format == Some(Format::Pretty) {
                em.note(&format!("alpha_min = {}", d.alpha_min));
                em.note(&format!("unique = {}", d.unique));
                for c in &report.checks {
                    em.note(&format!(
                        "{:<40} {}",
                        c.name,
                        if c.passed { "ok" } else { "FAIL" }
                    ));
                }
            } else {
                em.write_json(&out)?;
            }
            if !report.passed() {
                eprintln!("verification failed: {:?}", report.failures());
                return Ok(2);
            }
            Ok(0)
        }
        Command::Check { f, g: gpath } => {
            let f = load_functional(f, &tol)?;
            let gf = load_functional(gpath, &tol)?;
            let u = uniqueness_check(&f, &gf, g.seed, &tol)?;
            let out = json!({
                "tolerances": tol,
                "f_leq_g": order_leq(&f, &gf, &tol)?,
                "f_abs_continuous_g": abs_continuous(&f, &gf, &tol)?,
                "left_kernel_g_in_f": left_kernel_contained(&f, &gf, &tol)?,
                "f_singular_g": singular(&f, &gf, &tol)?,
                "uniqueness": u,
            });
            if g.format == Some(Format::Pretty) {
                for (k, v) in out
                    .as_object()
                    .expect("object")
                    .iter()
                    .filter(|(k, _)| *k != "tolerances")
                {
                    em.note(&format!("{k} = {v}"));
                }
            } else {
                em.write_json(&out)?;
            }
            Ok(if u.unique { 0 } else { 2 })
        }
        Command::Wedderburn { generators } => {
            let j: GeneratorsJson = parse_json(generators)?;
            let p = j.to_presentation()?;
            let res = wedderburn_decompose(&p, g.seed, &WedderburnOptions::default())?;
            let dims = irreducible_dimensions(&res);
            let certificate = format!(
                "uniqueness certificate: max irreducible dimension = {}",
                res.max_irreducible_dim()
            );
            if g.format == Some(Format::Json) {
                em.write_json(&json!({
                    "block_dims": res.block_dims,
                    "multiplicities": res.multiplicities,
                    "irreducible_dimensions": dims,
                    "null_dim": res.null_dim,
                    "residual": res.residual,
                    "max_irreducible_dim": res.max_irreducible_dim(),
                }))?;
            } else {
                let text = format!(
                    "block_dims: {:?}\nmultiplicities: {:?}\nnull_dim: {}\nresidual: {:.3e}\n{certificate}\n",
                    res.block_dims, res.multiplicities, res.null_dim, res.residual
                );
                em.write_text(&text)?;
            }
            Ok(0)
        }
        Command::GroupAlgebra { table } => {
            let t: CayleyTable = parse_json(table)?;
            let p = group_algebra(&t)?;
            em.write_json(&p.to_json())?;
            Ok(0)
        }
        Command::Gns { f } => {
            let f = load_functional(f, &tol)?;
            let data = gns(&f, &tol)?;
            let check = data.check(&f);
            em.write_json(&json!({
                "tolerances": tol,
                "gns": data.to_json(),
                "check": check,
            }))?;
            Ok(if check.passed(1e-8) { 0 } else { 2 })
        }
        Command::NonuniqReport { levels } => {
            let mut rows = Vec::new();
            for &level in levels {
                let lab = TruncationLab::build(level)?;
                rows.extend(bound_report(&lab)?);
            }
            let bad: Vec<_> = rows.iter().filter(|r| !r.violations().is_empty()).collect();
            for r in &bad {
                eprintln!("N={} n={}: {:?}", r.level, r.n, r.violations());
            }
            if g.format == Some(Format::Json) {
                em.write_json(&rows)?;
            } else {
                let mut buf = Vec::new();
                write_csv(&rows, &mut buf)?;
                em.write_text(&String::from_utf8(buf).expect("csv is utf-8"))?;
            }
            Ok(if bad.is_empty() { 0 } else { 2 })
        }
        Command::SigmaNorm { element, blocks } => {
            let j: ElementJson = parse_json(element)?;
            let x = j.to_element()?;
            let sigma = seminorm_sigma_f(&x, blocks)?;
            let gamma = gamma_norm(&x);
            if g.format == Some(Format::Json) {
                em.write_json(&json!({"blocks": blocks, "sigma_f": sigma, "gamma": gamma}))?;
            } else {
                em.write_text(&format!("sigma_F = {sigma}\ngamma = {gamma}\n"))?;
            }
            Ok(0)
        }
    }
}
