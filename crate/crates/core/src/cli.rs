//! The `grouptest` command line.
//!
//! Subcommands: `design`, `check`, `decode`, `mc`, `sweep` and `table1`.
//! Every randomized command needs `--seed` unless `--entropy` is given.
//!
//! A `--config FILE` holds `key = value` lines named like the long flags
//! (`n = 1000`, `model = rid`, `exact-utdq-sizing = true`); `#` starts a
//! comment. Flags given on the command line win over the file.
//!
//! Output schemas:
//! - `design` prints one JSON object: `model, n, d, delta, m, m_real,
//!   param_name, param, lambda, feasible, method, seed, out` and, when
//!   infeasible, `reason`.
//! - `mc` prints CSV `model,n,m,param,d,delta,trials,disjunct_successes,
//!   decode_successes,frequency,wilson_ci_low,wilson_ci_high,seed` or the
//!   trial report as JSON.
//! - `sweep` prints CSV `n,m_star,target,trials_per_probe,slope_over_d` or
//!   JSON `{points, slope_over_d, probes}`.
//! - `table1` prints the constants CSV, a blank line, and the comparison
//!   with published values (`--no-compare` drops it).
//!
//! Exit codes: 0 success, 2 usage or invalid parameters, 3 infeasible
//! sizing, 4 I/O or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bitmat::{self, or_columns, DefectiveSet, Matrix};
use crate::decode::{decode_eliminate, is_disjunct, is_separable};
use crate::designs::{
    optimal_param, upper_bound_m_with, DesignParam, DesignSpec, Model, SizingOptions, SizingResult,
};
use crate::error::Error;
use crate::sim::{reports_csv, slope_fit, sweep_csv, TrialRunner};
use crate::theory;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "grouptest",
    version,
    about = "Random pool designs for non-adaptive group testing"
)]
struct Cli {
    /// File of `key = value` defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size a design and draw a matrix.
    Design(DesignArgs),
    /// Report whether a matrix is disjunct (and separable) for a defective set.
    Check(CheckArgs),
    /// Decode answers by elimination.
    Decode(DecodeArgs),
    /// Monte Carlo success frequency of one design.
    Mc(McArgs),
    /// Empirical minimal test counts over several n, with the fitted slope.
    Sweep(SweepArgs),
    /// Leading constants per model.
    Table1(Table1Args),
}

#[derive(Args, Debug)]
struct SeedArgs {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Draw the seed from the operating system; it is echoed in the output.
    #[arg(long, conflicts_with = "seed")]
    entropy: bool,
}

impl SeedArgs {
    fn resolve(&self) -> Result<u64, Error> {
        match (self.seed, self.entropy) {
            (Some(s), _) => Ok(s),
            (None, true) => Ok(rand::random()),
            (None, false) => Err(Error::Parameter(
                "--seed is required (or pass --entropy for a random seed)".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// RID zero probability.
    #[arg(long)]
    p: Option<f64>,
    /// RrSD row weight.
    #[arg(long)]
    r: Option<usize>,
    /// RsSD column weight.
    #[arg(long)]
    s: Option<usize>,
    /// UTDq alphabet size.
    #[arg(long)]
    q: Option<u32>,
}

impl ParamArgs {
    /// The explicitly given parameter, checked against `model`.
    fn explicit(&self, model: Model) -> Result<Option<DesignParam>, Error> {
        let given: Vec<DesignParam> = [
            self.p.map(DesignParam::P),
            self.r.map(DesignParam::R),
            self.s.map(DesignParam::S),
            self.q.map(DesignParam::Q),
        ]
        .into_iter()
        .flatten()
        .collect();
        match given.as_slice() {
            [] => Ok(None),
            [p] if p.model() == model => Ok(Some(*p)),
            [p] => Err(Error::Parameter(format!(
                "--{} does not apply to {model}; use --{}",
                p.model().param_name(),
                model.param_name()
            ))),
            _ => Err(Error::Parameter(
                "give at most one of --p, --r, --s, --q".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Failure probability for auto-sizing.
    #[arg(long)]
    delta: Option<f64>,
    /// Test count; auto-sized from --delta when absent.
    #[arg(long)]
    m: Option<usize>,
    #[command(flatten)]
    param: ParamArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Where to write the matrix.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Size UTDq with the exact transversal bound instead of the simplified one.
    #[arg(long)]
    exact_utdq_sizing: bool,
}

#[derive(Args, Debug)]
#[group(id = "input", required = true, multiple = false, args = ["defectives", "answers"])]
struct InputArgs {
    /// Comma-separated 1-based defective items; answers are simulated.
    #[arg(long)]
    defectives: Option<String>,
    /// Answer file.
    #[arg(long)]
    answers: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Also test separability (exhaustive, size-guarded).
    #[arg(long)]
    separable: bool,
    /// Bound on candidate set size for separability; defaults to |I|.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Test count; auto-sized from --delta when absent.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    param: ParamArgs,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArgs,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    exact_utdq_sizing: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    d: usize,
    /// Comma-separated item counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 0.9)]
    target: f64,
    /// Trials per probed test count.
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct Table1Args {
    #[arg(long, default_value_t = 10)]
    dmax: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Omit the comparison with published values.
    #[arg(long)]
    no_compare: bool,
}

/// Command failure: an exit code and a message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            Error::Dimension(_)
            | Error::Parameter(_)
            | Error::SizeGuard(_)
            | Error::Capacity(_) => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Reads `key = value` lines into `--key value` arguments for every key not
/// already given on the command line.
fn config_args(path: &PathBuf, given: &[OsString]) -> Result<Vec<OsString>, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let source_name = path.display().to_string();
    let mut extra = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(&source_name, k + 1, "expected key = value"))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(Error::parse(
                &source_name,
                k + 1,
                "config files cannot nest",
            ));
        }
        let flag = format!("--{key}");
        let present = given.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        });
        if present {
            continue;
        }
        match value {
            "true" => extra.push(OsString::from(flag)),
            "false" => {}
            v => {
                extra.push(OsString::from(flag));
                extra.push(OsString::from(v));
            }
        }
    }
    Ok(extra)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Some(path) = config_path(&args) {
        match config_args(&path, &args) {
            Ok(extra) => args.extend(extra),
            Err(e) => {
                let f = Failure::from(e);
                let _ = writeln!(err, "error: {}", f.message);
                return f.code;
            }
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Design(a) => cmd_design(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Decode(a) => cmd_decode(a, out),
        Command::Mc(a) => cmd_mc(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Table1(a) => cmd_table1(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// The sizing for `design` and `mc`: explicit `m` (and parameter) or
/// auto-sizing from `delta`.
fn resolve_design(
    model: Model,
    n: usize,
    d: usize,
    m: Option<usize>,
    delta: Option<f64>,
    param: &ParamArgs,
    exact_utdq: bool,
) -> Result<SizingResult, Error> {
    let explicit = param.explicit(model)?;
    match m {
        Some(m) => {
            let param = match explicit {
                Some(p) => p,
                None => optimal_param(model, n, d, Some(m))?,
            };
            DesignSpec::new(n, m, param)?;
            Ok(SizingResult {
                model,
                n,
                d,
                delta,
                m,
                m_real: m as f64,
                param,
                lambda: None,
                feasible: true,
                method: crate::designs::SizingMethod::Manual,
                reason: None,
            })
        }
        None => {
            let delta = delta.ok_or_else(|| Error::Parameter("give --m or --delta".into()))?;
            let q = match explicit {
                None => None,
                Some(DesignParam::Q(q)) => Some(q),
                Some(p) => {
                    return Err(Error::Parameter(format!(
                        "--{} needs an explicit --m; auto-sizing uses the optimal parameter",
                        p.model().param_name()
                    )))
                }
            };
            upper_bound_m_with(model, n, d, delta, &SizingOptions { q, exact_utdq })
        }
    }
}

fn sizing_json(s: &SizingResult, seed: u64, out_path: Option<&PathBuf>) -> serde_json::Value {
    let mut v = json!({
        "model": s.model,
        "n": s.n,
        "d": s.d,
        "delta": s.delta,
        "m": s.m,
        "m_real": s.m_real,
        "param_name": s.model.param_name(),
        "param": s.param,
        "lambda": s.lambda,
        "feasible": s.feasible,
        "method": s.method,
        "seed": seed,
        "out": out_path.map(|p| p.display().to_string()),
    });
    if let Some(r) = &s.reason {
        v["reason"] = json!(r);
    }
    v
}

fn cmd_design(a: &DesignArgs, out: &mut dyn Write) -> CmdResult {
    let seed = a.seed.resolve()?;
    let sizing = resolve_design(
        a.model,
        a.n,
        a.d,
        a.m,
        a.delta,
        &a.param,
        a.exact_utdq_sizing,
    )?;
    let record = sizing_json(&sizing, seed, a.out.as_ref());
    writeln!(out, "{record}")?;
    if !sizing.feasible {
        return Err(Error::Infeasible(sizing.reason.clone().unwrap_or_default()).into());
    }
    if let Some(path) = &a.out {
        let spec = DesignSpec::new(a.n, sizing.m, sizing.param)?;
        let matrix = match spec.param {
            DesignParam::Q(q) => {
                Matrix::Qary(crate::designs::gen_utdq(a.n, spec.m / q as usize, q, seed)?)
            }
            _ => Matrix::Binary(spec.generate_seeded(seed)?),
        };
        bitmat::write_matrix(path, &matrix)?;
    }
    Ok(())
}

fn load_matrix(path: &PathBuf) -> Result<crate::bitmat::BitMatrix, Error> {
    Ok(bitmat::read_matrix(path)?.to_binary())
}

fn parse_defectives(text: &str, n: usize) -> Result<DefectiveSet, Error> {
    let set = DefectiveSet::parse_labels(text)?;
    set.check_range(n)?;
    Ok(set)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> CmdResult {
    let mat = load_matrix(&a.matrix)?;
    let Some(text) = &a.input.defectives else {
        return Err(Error::Parameter("check needs --defectives".into()).into());
    };
    let set = parse_defectives(text, mat.cols())?;
    writeln!(out, "disjunct={}", is_disjunct(&mat, &set)?)?;
    if a.separable {
        let d = a.d.unwrap_or(set.len());
        writeln!(out, "separable={}", is_separable(&mat, &set, d)?)?;
    }
    Ok(())
}

fn cmd_decode(a: &DecodeArgs, out: &mut dyn Write) -> CmdResult {
    let mat = load_matrix(&a.matrix)?;
    let answers = match (&a.input.defectives, &a.input.answers) {
        (Some(text), _) => or_columns(&mat, &parse_defectives(text, mat.cols())?)?,
        (None, Some(path)) => bitmat::read_answers(path, Some(mat.rows()))?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let items: Vec<String> = decode_eliminate(&mat, &answers)?
        .iter()
        .map(|i| (i + 1).to_string())
        .collect();
    writeln!(out, "[{}]", items.join(","))?;
    Ok(())
}

fn cmd_mc(a: &McArgs, out: &mut dyn Write) -> CmdResult {
    let seed = a.seed.resolve()?;
    let sizing = resolve_design(
        a.model,
        a.n,
        a.d,
        a.m,
        a.delta,
        &a.param,
        a.exact_utdq_sizing,
    )?;
    if !sizing.feasible {
        return Err(Error::Infeasible(sizing.reason.unwrap_or_default()).into());
    }
    let spec = DesignSpec::new(a.n, sizing.m, sizing.param)?;
    let runner = TrialRunner::new(a.jobs)?;
    let mut report = runner.run_trials(&spec, a.d, a.trials, seed)?;
    report.delta = a.delta;
    match a.format {
        Format::Csv => write!(out, "{}", reports_csv(&[report]))?,
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        )?,
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CmdResult {
    let seed = a.seed.resolve()?;
    let runner = TrialRunner::new(a.jobs)?;
    match a.format {
        Format::Csv => {
            let points = runner.sweep(a.model, a.d, &a.n_list, a.target, a.trials, seed)?;
            write!(out, "{}", sweep_csv(&points, a.d))?;
        }
        Format::Json => {
            let mut points = Vec::new();
            let mut probes = Vec::new();
            for &n in &a.n_list {
                let found = runner.find_min_m(a.model, n, a.d, a.target, a.trials, seed)?;
                points.push(crate::sim::SweepPoint {
                    n,
                    m_star: found.m_star,
                    target: a.target,
                    trials_per_probe: a.trials,
                });
                probes.push(json!({ "n": n, "probes": found.probes }));
            }
            let v = json!({
                "model": a.model,
                "d": a.d,
                "seed": seed,
                "points": points,
                "slope_over_d": slope_fit(&points, a.d).ok(),
                "probes": probes,
            });
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}

fn cmd_table1(a: &Table1Args, out: &mut dyn Write) -> CmdResult {
    let rows = theory::table1(a.dmax)?;
    let cmp = theory::compare_with_reference(&rows);
    match a.format {
        Format::Csv => {
            write!(out, "{}", theory::table1_csv(&rows))?;
            if !a.no_compare {
                writeln!(out)?;
                write!(out, "{}", theory::comparison_csv(&cmp))?;
            }
        }
        Format::Json => {
            let mut v = json!({ "rows": rows });
            if !a.no_compare {
                v["comparison"] = json!(cmp);
            }
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}
