//! Command-line front end. [`run`] is what the `markovscope` binary calls;
//! it writes to the given streams and returns the process exit code.
//!
//! Exit codes: 0 success (whatever the verdict), 1 malformed input or
//! arguments, 2 numerical failure, 3 input is not a channel.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::channel::{change_basis, determinant, verify_channel, BasisTag, ChannelMatrix, OperatorBasis};
use crate::config::Tolerances;
use crate::divisibility::td_markovian_check;
use crate::error::{Error, Result};
use crate::io;
use crate::markov::{markovian_check, MarkovOptions, MarkovReport};
use crate::spectral::{eigendecompose, fractional_power, BranchIndex};
use crate::zoo::{random_channel, sample_seed, Model};

pub const SCHEMA: u32 = 1;
pub const SCAN_HEADER: &str = "param,markovian,mu_min,measure,td_markovian,det";

#[derive(Parser, Debug)]
#[command(name = "markovscope", version, about = "Decide whether a quantum channel is Markovian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Markovianity verdict with witness branch and diagnostics.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        search: Search,
        /// Also print the clustered spectrum.
        #[arg(long)]
        dump_spectrum: bool,
        #[arg(long)]
        json: bool,
    },
    /// Markovianity measure M(T) and the noise rate μ_min.
    Measure {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        search: Search,
        #[arg(long)]
        json: bool,
    },
    /// Qubit time-dependent Markovianity (divisibility) test.
    Tdcheck {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Sweep one model parameter and write CSV.
    Scan {
        #[arg(long)]
        model: String,
        /// Parameter to sweep.
        #[arg(long)]
        sweep: String,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        step: f64,
        /// Fixed parameters, `key=value`.
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        #[command(flatten)]
        search: Search,
        #[arg(long)]
        threads: Option<usize>,
        /// CSV destination; stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo fractions over random channels.
    Sample {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        search: Search,
    },
    /// Fractional power T^s on a chosen logarithm branch.
    Power {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        s: f64,
        /// Branch index, one integer per conjugate pair.
        #[arg(long, num_args = 0.., allow_negative_numbers = true)]
        branch: Vec<i64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write a model channel to a file.
    Export {
        #[arg(long)]
        model: String,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        #[arg(long, value_enum, default_value_t = ExportRep::Transfer)]
        representation: ExportRep,
        #[arg(long, value_enum, default_value_t = ExportBasis::MatrixUnits)]
        basis: ExportBasis,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Channel file (JSON).
    #[arg(conflicts_with = "model", required_unless_present = "model")]
    file: Option<PathBuf>,
    /// Zoo model instead of a file.
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "param", value_parser = parse_kv, requires = "model")]
    params: Vec<(String, f64)>,
}

#[derive(Args, Debug)]
struct Search {
    /// Branch search box ‖m‖∞ ≤ m_max.
    #[arg(long, default_value_t = 2)]
    m_max: u32,
    #[arg(long, default_value_t = 100_000)]
    max_branches: usize,
    /// Relative tolerance for the channel checks.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExportRep {
    Transfer,
    Choi,
    Kraus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExportBasis {
    MatrixUnits,
    Pauli,
}

fn parse_kv(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{k}` must be finite"));
    }
    Ok((k.trim().to_string(), v))
}

fn tolerances(tol: Option<f64>) -> Result<Tolerances> {
    let mut t = Tolerances::from_env();
    if let Some(v) = tol {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::RangeError { name: "tol", value: v, expected: "finite tol > 0" });
        }
        t.check = v;
    }
    Ok(t)
}

impl Search {
    fn options(&self) -> Result<MarkovOptions> {
        Ok(MarkovOptions { m_max: self.m_max, max_branches: self.max_branches, tol: tolerances(self.tol)? })
    }
}

fn model_params(params: &[(String, f64)]) -> BTreeMap<String, f64> {
    params.iter().cloned().collect()
}

/// Loads the input and rejects maps that are not CPTP.
fn load(input: &Input, tol: &Tolerances) -> Result<ChannelMatrix<f64>> {
    let t = match (&input.file, &input.model) {
        (Some(path), _) => io::read_channel(path)?,
        (None, Some(name)) => Model::from_name(name, &model_params(&input.params))?.build()?,
        (None, None) => return Err(Error::Parse("no input given".into())),
    };
    let r = verify_channel(&t, tol.check);
    if !r.is_channel() {
        return Err(Error::NotAChannel(format!(
            "hermiticity violation {:e}, trace violation {:e}, min Choi eigenvalue {:e}",
            r.hermiticity_violation, r.trace_violation, r.min_choi_eigenvalue
        )));
    }
    Ok(t)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotAChannel(_) | Error::NotHermiticityPreserving { .. } => 3,
        e if e.is_numerical() => 2,
        _ => 1,
    }
}

fn print_report(out: &mut dyn Write, r: &MarkovReport<f64>) -> std::io::Result<()> {
    writeln!(out, "verdict: {}", r.verdict)?;
    writeln!(out, "measure: {}", r.measure)?;
    writeln!(out, "mu_min: {}", r.mu_min)?;
    writeln!(out, "max_min_eigenvalue: {}", r.max_min_eigenvalue)?;
    let branch = |b: &Option<BranchIndex>| b.as_ref().map_or("none".to_string(), |b| b.to_string());
    writeln!(out, "witness_branch: {}", branch(&r.witness_branch))?;
    writeln!(out, "best_branch: {}", branch(&r.best_branch))?;
    writeln!(out, "conjugate_pairs: {}", r.num_pairs)?;
    writeln!(out, "branches_searched: {} (m_max {})", r.branches_searched, r.m_max)?;
    if !r.diagnostics.is_empty() {
        writeln!(out, "diagnostics: {}", r.diagnostics)?;
    }
    Ok(())
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?)?;
    Ok(())
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::RangeError { name: "threads", value: 0.0, expected: "threads >= 1" });
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Parse(e.to_string()))
}

/// Number of grid points `start, start+step, …` not exceeding `stop`.
pub fn scan_points(start: f64, stop: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::RangeError { name: "step", value: step, expected: "finite step > 0" });
    }
    if !(start.is_finite() && stop.is_finite() && start <= stop) {
        return Err(Error::RangeError { name: "stop", value: stop, expected: "finite, stop >= start" });
    }
    let n = ((stop - start) / step + 1e-9).floor() + 1.0;
    if n > 1e7 {
        return Err(Error::RangeError { name: "step", value: step, expected: "at most 10^7 grid points" });
    }
    Ok(n as usize)
}

fn scan_row(model: &Model, param: f64, opts: &MarkovOptions) -> Result<String> {
    let t = model.build()?;
    let r = markovian_check(&t, opts)?;
    let td = if t.dim() == 2 {
        td_markovian_check(&t, opts.tol.check)?.td_markovian.to_string()
    } else {
        String::new()
    };
    let det = determinant(&t, opts.tol.check)?;
    Ok(format!("{param},{},{},{},{td},{det}", r.is_markovian(), r.mu_min, r.measure))
}

#[derive(Default)]
struct Tally {
    markovian: usize,
    td: usize,
    markovian_not_td: usize,
    failures: usize,
}

fn sample_one(d: usize, seed: u64, opts: &MarkovOptions) -> Result<(bool, Option<bool>)> {
    let t = random_channel::<f64>(d, seed)?;
    let m = markovian_check(&t, opts)?.is_markovian();
    let td = if d == 2 { Some(td_markovian_check(&t, opts.tol.check)?.td_markovian) } else { None };
    Ok((m, td))
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Check { input, search, dump_spectrum, json } => {
            let opts = search.options()?;
            let t = load(&input, &opts.tol)?;
            let report = markovian_check(&t, &opts)?;
            let spectrum = if dump_spectrum { Some(eigendecompose(&t, &opts.tol)?.to_json()) } else { None };
            if json {
                let mut v = json!({"schema": SCHEMA, "command": "check", "report": report});
                if let Some(s) = spectrum {
                    v["spectrum"] = s;
                }
                emit(out, &v)?;
            } else {
                print_report(out, &report)?;
                if let Some(s) = spectrum {
                    writeln!(out, "spectrum:")?;
                    emit(out, &s)?;
                }
            }
        }
        Command::Measure { input, search, json } => {
            let opts = search.options()?;
            let t = load(&input, &opts.tol)?;
            let report = markovian_check(&t, &opts)?;
            if json {
                emit(out, &json!({"schema": SCHEMA, "command": "measure", "measure": report.measure,
                    "mu_min": report.mu_min, "verdict": report.verdict}))?;
            } else {
                writeln!(out, "measure: {}", report.measure)?;
                writeln!(out, "mu_min: {}", report.mu_min)?;
            }
        }
        Command::Tdcheck { input, tol, json } => {
            let tol = tolerances(tol)?;
            let t = load(&input, &tol)?;
            let r = td_markovian_check(&t, tol.check)?;
            if json {
                emit(out, &json!({"schema": SCHEMA, "command": "tdcheck", "td_markovian": r.td_markovian,
                    "det": r.s.det_t, "s": r.s.s}))?;
            } else {
                writeln!(out, "td_markovian: {}", r.td_markovian)?;
                writeln!(out, "det: {}", r.s.det_t)?;
                let s: Vec<String> = r.s.s.iter().map(|v| v.to_string()).collect();
                writeln!(out, "s: {}", s.join(" "))?;
            }
        }
        Command::Scan { model, sweep, start, stop, step, params, search, threads, output } => {
            let opts = search.options()?;
            let n = scan_points(start, stop, step)?;
            let mut fixed = model_params(&params);
            // validate the model and parameter names once, up front
            fixed.insert(sweep.clone(), start);
            Model::from_name(&model, &fixed)?;
            // snapped so that 0.1 + 2·0.1 prints as 0.3
            let points: Vec<f64> = (0..n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect();
            let rows: Vec<Result<String>> = thread_pool(threads)?.install(|| {
                points
                    .par_iter()
                    .map(|&x| {
                        let mut p = fixed.clone();
                        p.insert(sweep.clone(), x);
                        scan_row(&Model::from_name(&model, &p)?, x, &opts)
                    })
                    .collect()
            });
            let mut csv = String::from(SCAN_HEADER);
            csv.push('\n');
            for (x, row) in points.iter().zip(rows) {
                match row {
                    Ok(line) => csv.push_str(&line),
                    Err(e @ (Error::RangeError { .. } | Error::Parse(_))) => return Err(e),
                    Err(e) => {
                        writeln!(err, "warning: {sweep}={x}: {e}")?;
                        csv.push_str(&format!("{x},,,,,"));
                    }
                }
                csv.push('\n');
            }
            match output {
                Some(path) => std::fs::write(path, csv)?,
                None => out.write_all(csv.as_bytes())?,
            }
        }
        Command::Sample { d, n, seed, threads, search } => {
            if n == 0 {
                return Err(Error::RangeError { name: "n", value: 0.0, expected: "n >= 1" });
            }
            if !(2..=8).contains(&d) {
                return Err(Error::RangeError { name: "d", value: d as f64, expected: "2 <= d <= 8" });
            }
            let opts = search.options()?;
            let results: Vec<Result<(bool, Option<bool>)>> = thread_pool(threads)?
                .install(|| (0..n as u64).into_par_iter().map(|i| sample_one(d, sample_seed(seed, i), &opts)).collect());
            let mut tally = Tally::default();
            for r in &results {
                match r {
                    Ok((m, td)) => {
                        tally.markovian += *m as usize;
                        tally.td += td.unwrap_or(false) as usize;
                        tally.markovian_not_td += (*m && *td == Some(false)) as usize;
                    }
                    Err(_) => tally.failures += 1,
                }
            }
            let frac = |k: usize| k as f64 / n as f64;
            let td = |k: usize| if d == 2 { json!(frac(k)) } else { Value::Null };
            emit(out, &json!({
                "schema": SCHEMA,
                "command": "sample",
                "d": d,
                "n": n,
                "seed": seed,
                "fraction_markovian": frac(tally.markovian),
                "fraction_td_markovian": td(tally.td),
                "fraction_markovian_and_not_td": td(tally.markovian_not_td),
                "failures": tally.failures,
            }))?;
        }
        Command::Power { input, s, branch, tol, output } => {
            let tol = tolerances(tol)?;
            let t = load(&input, &tol)?;
            let spec = eigendecompose(&t, &tol)?;
            let m = if branch.is_empty() { BranchIndex::zeros(spec.num_pairs()) } else { BranchIndex(branch) };
            let p = fractional_power(&t, s, &m, &tol)?;
            let v = io::channel_to_json(&p);
            match output {
                Some(path) => io::write_json(&path, &v)?,
                None => emit(out, &v)?,
            }
        }
        Command::Export { model, params, representation, basis, output } => {
            let t = Model::from_name(&model, &model_params(&params))?.build()?;
            let tag = match basis {
                ExportBasis::MatrixUnits => BasisTag::MatrixUnits,
                ExportBasis::Pauli => BasisTag::PauliNormalized,
            };
            let v = match representation {
                ExportRep::Transfer => io::channel_to_json(&change_basis(&t, OperatorBasis::new(tag, t.dim())?)?),
                ExportRep::Choi => io::choi_to_json(&t),
                ExportRep::Kraus => io::kraus_to_json(&t, 1e-9)?,
            };
            match output {
                Some(path) => io::write_json(&path, &v)?,
                None => emit(out, &v)?,
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
