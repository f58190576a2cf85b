//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification or I/O error, 2 usage or
//! input-schema error, 3 conditioning on a zero-probability event, 4 solver
//! non-convergence.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use alphaleak_core::capacity::{
    conditional_maximal_alpha_leakage, grid_oracle_capacity, maximal_alpha_leakage,
};
use alphaleak_core::measures::{
    arimoto_cond_entropy, arimoto_mi, conditional_arimoto_mi, event_conditional_sibson_mi,
    renyi_entropy, sibson_mi,
};
use alphaleak_core::{AlphaOrder, Axis, Error, Joint3, LogBase, SolverOptions};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::experiments::{self, BscTable, TrialConfig, TrialReport};
use crate::io::{load_joint, InputError};

pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ZERO_PROBABILITY: i32 = 3;
pub const EXIT_NON_CONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "alphaleak",
    version,
    about = "Maximal alpha-leakage and related information measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    RenyiEntropy,
    ArimotoCondEntropy,
    SibsonMi,
    ArimotoMi,
    CondArimotoMi,
    EventSibsonMi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LeakageKind {
    Max,
    CondMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    RenyiEntropy,
    ArimotoCondEntropy,
    SibsonMi,
    ArimotoMi,
    CondArimotoMi,
    EventSibsonMi,
    MaxLeakage,
    CondMaxLeakage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Robustness,
    Dpi,
    Composition,
    Witness,
    Bsc,
    Thm1,
    Counterexample,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an information measure of a distribution file.
    Measure {
        #[arg(value_enum)]
        measure: MeasureKind,
        file: PathBuf,
        /// Orders: a list like `1,2,inf` and/or `log:MIN:MAX:N`.
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value = "bits", value_parser = parse_base)]
        base: LogBase,
        /// Conditioning event for event-sibson-mi.
        #[arg(long)]
        z: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximal (or conditional maximal) alpha-leakage from X to Y.
    Leakage {
        #[arg(value_enum)]
        variant: LeakageKind,
        file: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value = "bits", value_parser = parse_base)]
        base: LogBase,
        /// Solver certificate tolerance, in output units.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Solver iteration cap; reaching it is an error (exit 4).
        #[arg(long, default_value_t = 100_000)]
        max_iterations: usize,
        /// Add a brute-force grid search column (alpha > 1, support <= 4).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        alpha: Option<String>,
        /// Violation tolerance (suite-specific default).
        #[arg(long)]
        tol: Option<f64>,
        /// Crossover probability of the worked examples.
        #[arg(long)]
        p: Option<f64>,
        /// Side-information crossover probability of the BSC example.
        #[arg(long)]
        q: Option<f64>,
        /// Alphabet sizes of random instances, `NX,NY,NZ`.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long, default_value = "bits", value_parser = parse_base)]
        base: LogBase,
        /// Include every trial in the output.
        #[arg(long)]
        per_trial: bool,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a quantity along a grid of orders (CSV by default).
    Sweep {
        #[arg(value_enum)]
        quantity: SweepKind,
        file: PathBuf,
        #[arg(long, default_value = "1,log:1.01:100:41,inf")]
        alpha: String,
        #[arg(long, default_value = "bits", value_parser = parse_base)]
        base: LogBase,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        z: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ZeroProbabilityEvent(_) => EXIT_ZERO_PROBABILITY,
            Error::NonConvergence { .. } => EXIT_NON_CONVERGENCE,
            Error::AlphaOutOfDomain { .. }
            | Error::InvalidParameter(_)
            | Error::UnknownLabel(_)
            | Error::SupportTooLarge { .. } => EXIT_USAGE,
            _ => EXIT_FAILED,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        let code = match e {
            InputError::Io { .. } => EXIT_FAILED,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Rendered output plus the exit code it should be reported with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

fn parse_base(s: &str) -> Result<LogBase, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `1,2,inf`, `log:MIN:MAX:N` (N log-spaced orders, both ends
/// included) or any comma-separated mix of the two.
pub fn parse_alpha_spec(spec: &str) -> Result<Vec<AlphaOrder>, String> {
    let mut out = Vec::new();
    for tok in spec.split(',').map(str::trim) {
        if let Some(rest) = tok.strip_prefix("log:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let [lo, hi, n] = parts[..] else {
                return Err(format!("`{tok}`: expected log:MIN:MAX:N"));
            };
            let lo: f64 = lo.parse().map_err(|_| format!("`{tok}`: bad MIN"))?;
            let hi: f64 = hi.parse().map_err(|_| format!("`{tok}`: bad MAX"))?;
            let n: usize = n.parse().map_err(|_| format!("`{tok}`: bad N"))?;
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) || n == 0 {
                return Err(format!("`{tok}`: need 0 < MIN <= MAX < inf and N >= 1"));
            }
            for k in 0..n {
                let a = if k == 0 {
                    lo
                } else if k + 1 == n {
                    hi
                } else {
                    (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp()
                };
                out.push(AlphaOrder::new(a).map_err(|e| e.to_string())?);
            }
        } else {
            out.push(tok.parse().map_err(|e: Error| format!("`{tok}`: {e}"))?);
        }
    }
    Ok(out)
}

fn alphas(spec: &str) -> Result<Vec<AlphaOrder>, CliError> {
    parse_alpha_spec(spec).map_err(|m| CliError::usage(format!("--alpha {m}")))
}

/// One output row of `measure`, `leakage` and `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub alpha: String,
    pub value: f64,
    pub base: &'static str,
    pub method: &'static str,
    pub gap: Option<f64>,
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_z: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
}

fn measure_row(alpha: AlphaOrder, value: f64, base: LogBase) -> Row {
    Row {
        alpha: alpha.to_string(),
        value,
        base: base.name(),
        method: "closed-form",
        gap: None,
        iterations: None,
        argmax_z: None,
        oracle: None,
    }
}

fn eval_measure(
    kind: MeasureKind,
    j: &Joint3,
    z: Option<&str>,
    alpha: AlphaOrder,
    base: LogBase,
) -> Result<Row, CliError> {
    if z.is_some() != (kind == MeasureKind::EventSibsonMi) {
        return Err(CliError::usage(if z.is_some() {
            "--z only applies to event-sibson-mi"
        } else {
            "event-sibson-mi needs --z"
        }));
    }
    let (px, ch) = j.xy_marginal().decompose();
    let v = match kind {
        MeasureKind::RenyiEntropy => renyi_entropy(&j.marginal(Axis::X), alpha, base)?,
        MeasureKind::ArimotoCondEntropy => arimoto_cond_entropy(&px, &ch, alpha, base)?,
        MeasureKind::SibsonMi => sibson_mi(&px, &ch, alpha, base)?,
        MeasureKind::ArimotoMi => arimoto_mi(&px, &ch, alpha, base)?,
        MeasureKind::CondArimotoMi => conditional_arimoto_mi(j, alpha, base)?,
        MeasureKind::EventSibsonMi => {
            event_conditional_sibson_mi(j, z.unwrap_or_default(), alpha, base)?
        }
    };
    Ok(measure_row(alpha, v.value, base))
}

fn eval_leakage(
    kind: LeakageKind,
    j: &Joint3,
    alpha: AlphaOrder,
    base: LogBase,
    opts: &SolverOptions,
    oracle: Option<usize>,
) -> Result<Row, CliError> {
    // the grid search computes a supremum, which is the leakage only for α > 1
    let oracle = oracle.filter(|_| alpha != AlphaOrder::One);
    match kind {
        LeakageKind::Max => {
            let (px, ch) = j.xy_marginal().decompose();
            let r = maximal_alpha_leakage(&px, &ch, alpha, base, opts)?;
            let oracle = match oracle {
                Some(res) => Some(
                    grid_oracle_capacity(&px.support(), &ch, alpha, base, res)?
                        .value
                        .value,
                ),
                None => None,
            };
            Ok(Row {
                alpha: alpha.to_string(),
                value: r.value.value,
                base: base.name(),
                method: r.method.name(),
                gap: Some(r.certificate_gap),
                iterations: Some(r.iterations),
                argmax_z: None,
                oracle,
            })
        }
        LeakageKind::CondMax => {
            let r = conditional_maximal_alpha_leakage(j, alpha, base, opts)?;
            let best = r
                .argmax_z
                .as_ref()
                .and_then(|z| r.per_z.iter().find(|(l, _)| l == z))
                .map(|(_, c)| c);
            let oracle = match oracle {
                Some(res) => {
                    let mut m = f64::NEG_INFINITY;
                    for z in j.marginal(Axis::Z).support() {
                        let (px, ch) = j.condition_on_event(&z)?.decompose();
                        m = m.max(
                            grid_oracle_capacity(&px.support(), &ch, alpha, base, res)?
                                .value
                                .value,
                        );
                    }
                    Some(m)
                }
                None => None,
            };
            Ok(Row {
                alpha: alpha.to_string(),
                value: r.value.value,
                base: base.name(),
                method: best.map_or("closed-form", |c| c.method.name()),
                gap: Some(best.map_or(0.0, |c| c.certificate_gap)),
                iterations: Some(r.per_z.iter().map(|(_, c)| c.iterations).sum()),
                argmax_z: r.argmax_z.clone(),
                oracle,
            })
        }
    }
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
fn num(v: f64) -> String {
    let m = v.abs();
    if m != 0.0 && m.is_finite() && !(1e-4..1e16).contains(&m) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or(String::new(), T::to_string)
}

fn num_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), num)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_rows(rows: &[Row], format: Format) -> String {
    let with_z = rows.iter().any(|r| r.argmax_z.is_some());
    let with_oracle = rows.iter().any(|r| r.oracle.is_some());
    let mut header = vec!["alpha", "value", "base", "method", "gap", "iterations"];
    if with_z {
        header.push("argmax_z");
    }
    if with_oracle {
        header.push("oracle");
    }
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = header.join(",");
            s.push('\n');
            for r in rows {
                let mut cells = vec![
                    r.alpha.clone(),
                    num(r.value),
                    r.base.to_string(),
                    r.method.to_string(),
                    num_opt(r.gap),
                    fmt_opt(&r.iterations),
                ];
                if with_z {
                    cells.push(csv_field(&fmt_opt(&r.argmax_z)));
                }
                if with_oracle {
                    cells.push(num_opt(r.oracle));
                }
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Table => {
            let mut table: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
            for r in rows {
                let mut cells = vec![
                    r.alpha.clone(),
                    format!("{:.6}", r.value),
                    r.base.to_string(),
                    r.method.to_string(),
                    r.gap.map_or("-".into(), |g| format!("{g:.1e}")),
                    r.iterations.map_or("-".into(), |i| i.to_string()),
                ];
                if with_z {
                    cells.push(r.argmax_z.clone().unwrap_or_else(|| "-".into()));
                }
                if with_oracle {
                    cells.push(r.oracle.map_or("-".into(), |o| format!("{o:.6}")));
                }
                table.push(cells);
            }
            align(&table)
        }
    }
}

fn align(table: &[Vec<String>]) -> String {
    let ncol = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|c| {
            table
                .iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    for row in table {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        s.push_str(line.join("  ").trim_end());
        s.push('\n');
    }
    s
}

fn render_report(
    report: &TrialReport,
    format: Format,
    per_trial: bool,
    bsc: Option<&BscTable>,
) -> String {
    let shown = if per_trial {
        report.clone()
    } else {
        report.clone().without_per_trial()
    };
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&shown).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv if per_trial => {
            let mut s = String::from("trial,alpha,label,lhs,rhs,violation,error,base\n");
            for r in report.records() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.trial,
                    r.alpha,
                    csv_field(&fmt_opt(&r.label)),
                    num_opt(r.lhs),
                    num_opt(r.rhs),
                    r.violation,
                    csv_field(&fmt_opt(&r.error)),
                    report.base
                );
            }
            s
        }
        Format::Csv => {
            let mut s = String::from(
                "suite,experimental,relation,base,tolerance,seed,trials,alpha,violations,max_violation,max_difference,failures\n",
            );
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                report.suite,
                report.experimental,
                serde_json::to_value(report.relation)
                    .expect("relation")
                    .as_str()
                    .unwrap_or_default(),
                report.base,
                num(report.tolerance),
                fmt_opt(&report.seed),
                report.trials,
                report.alpha.join(";"),
                report.violations,
                num(report.max_violation),
                num_opt(report.max_difference),
                report.failures
            );
            s
        }
        Format::Table => {
            let mut s = String::new();
            if let Some(t) = bsc {
                let mut table = vec![[
                    "alpha",
                    "uncond closed",
                    "uncond solver",
                    "|diff|",
                    "cond closed",
                    "cond solver",
                    "|diff|",
                ]
                .map(String::from)
                .to_vec()];
                for r in &t.rows {
                    table.push(vec![
                        r.alpha.clone(),
                        format!("{:.6}", r.unconditional_closed),
                        format!("{:.6}", r.unconditional_solver),
                        format!("{:.1e}", r.unconditional_diff),
                        format!("{:.6}", r.conditional_closed),
                        format!("{:.6}", r.conditional_solver),
                        format!("{:.1e}", r.conditional_diff),
                    ]);
                }
                let _ = writeln!(s, "BSC p = {}, q = {} ({})", t.p, t.q, t.base);
                s.push_str(&align(&table));
                s.push('\n');
            }
            if report.experimental {
                s.push_str("EXPERIMENTAL: this suite tests a conjecture; violations are findings, not errors.\n");
            }
            let relation = match report.relation {
                experiments::Relation::Le => "lhs <= rhs + tol",
                experiments::Relation::Eq => "|lhs - rhs| <= tol",
                experiments::Relation::Lt => "lhs < rhs - tol",
            };
            let mut lines = vec![
                ("suite", report.suite.clone()),
                ("relation", relation.to_string()),
                ("alpha", report.alpha.join(", ")),
                ("trials", report.trials.to_string()),
                ("seed", report.seed.map_or("-".into(), |v| v.to_string())),
                ("tolerance", format!("{:e}", report.tolerance)),
                ("violations", report.violations.to_string()),
                (
                    "max_violation",
                    format!("{:e} {}", report.max_violation, report.base),
                ),
                (
                    "max_difference",
                    report
                        .max_difference
                        .map_or("-".into(), |d| format!("{d:e} {}", report.base)),
                ),
                ("failures", report.failures.to_string()),
            ];
            if !report.experimental {
                lines.push((
                    "result",
                    if report.passed() { "PASS" } else { "FAIL" }.to_string(),
                ));
            }
            for (k, v) in lines {
                let _ = writeln!(s, "{k:<15}{v}");
            }
            if per_trial {
                let mut table = vec![["trial", "alpha", "label", "lhs", "rhs", "violation"]
                    .map(String::from)
                    .to_vec()];
                for r in report.records() {
                    table.push(vec![
                        r.trial.to_string(),
                        r.alpha.clone(),
                        r.label.clone().unwrap_or_else(|| "-".into()),
                        r.lhs.map_or_else(|| "-".into(), |v| format!("{v:.9}")),
                        r.rhs.map_or_else(|| "-".into(), |v| format!("{v:.9}")),
                        match (&r.error, r.violation) {
                            (Some(e), _) => format!("error: {e}"),
                            (None, true) => "yes".into(),
                            (None, false) => "no".into(),
                        },
                    ]);
                }
                s.push('\n');
                s.push_str(&align(&table));
            }
            s
        }
    }
}

fn parse_sizes(spec: &str) -> Result<(usize, usize, usize), CliError> {
    let v: Vec<usize> = spec
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("--sizes `{spec}`: expected NX,NY,NZ")))?;
    match v[..] {
        [a, b, c] if a > 0 && b > 0 && c > 0 => Ok((a, b, c)),
        _ => Err(CliError::usage(format!(
            "--sizes `{spec}`: expected three positive integers"
        ))),
    }
}

fn check_tol(tol: f64) -> Result<f64, CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(CliError::usage(format!(
            "--tol {tol}: must be positive and finite"
        )))
    }
}

fn load(path: &Path) -> Result<Joint3, CliError> {
    load_joint(path).map_err(CliError::from)
}

/// Runs a parsed command and renders its output.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let ok = |output| Outcome { output, code: 0 };
    match &cli.command {
        Command::Measure {
            measure,
            file,
            alpha,
            base,
            z,
            format,
            ..
        } => {
            let alphas = alphas(alpha)?;
            let j = load(file)?;
            let rows = alphas
                .iter()
                .map(|&a| eval_measure(*measure, &j, z.as_deref(), a, *base))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ok(render_rows(&rows, format.unwrap_or(Format::Table))))
        }
        Command::Leakage {
            variant,
            file,
            alpha,
            base,
            tol,
            max_iterations,
            oracle,
            resolution,
            format,
            ..
        } => {
            let alphas = alphas(alpha)?;
            let opts = SolverOptions {
                max_iterations: *max_iterations,
                ..SolverOptions::with_tol(check_tol(*tol)?)
            };
            let j = load(file)?;
            let rows = alphas
                .iter()
                .map(|&a| {
                    eval_leakage(*variant, &j, a, *base, &opts, oracle.then_some(*resolution))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ok(render_rows(&rows, format.unwrap_or(Format::Table))))
        }
        Command::Sweep {
            quantity,
            file,
            alpha,
            base,
            tol,
            z,
            format,
            ..
        } => {
            let alphas = alphas(alpha)?;
            let opts = SolverOptions::with_tol(check_tol(*tol)?);
            let j = load(file)?;
            let rows = alphas
                .iter()
                .map(|&a| {
                    let m = |k| eval_measure(k, &j, z.as_deref(), a, *base);
                    match quantity {
                        SweepKind::RenyiEntropy => m(MeasureKind::RenyiEntropy),
                        SweepKind::ArimotoCondEntropy => m(MeasureKind::ArimotoCondEntropy),
                        SweepKind::SibsonMi => m(MeasureKind::SibsonMi),
                        SweepKind::ArimotoMi => m(MeasureKind::ArimotoMi),
                        SweepKind::CondArimotoMi => m(MeasureKind::CondArimotoMi),
                        SweepKind::EventSibsonMi => m(MeasureKind::EventSibsonMi),
                        SweepKind::MaxLeakage => {
                            eval_leakage(LeakageKind::Max, &j, a, *base, &opts, None)
                        }
                        SweepKind::CondMaxLeakage => {
                            eval_leakage(LeakageKind::CondMax, &j, a, *base, &opts, None)
                        }
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ok(render_rows(&rows, format.unwrap_or(Format::Csv))))
        }
        Command::Verify {
            suite,
            trials,
            seed,
            alpha,
            tol,
            p,
            q,
            sizes,
            base,
            per_trial,
            format,
            ..
        } => {
            let default_alphas = match suite {
                Suite::Dpi => "0.5,1,1.5,2,5,inf",
                Suite::Composition => "1,2,inf",
                Suite::Witness => "2",
                Suite::Bsc => "1,1.5,2,5,20,inf",
                _ => "1,1.5,2,5,inf",
            };
            let alphas = alphas(alpha.as_deref().unwrap_or(default_alphas))?;
            let tol = check_tol(tol.unwrap_or(match suite {
                Suite::Robustness | Suite::Composition => 1e-7,
                Suite::Bsc => 1e-6,
                Suite::Witness => 1e-8,
                Suite::Dpi | Suite::Thm1 | Suite::Counterexample => 1e-9,
            }))?;
            let sizes = parse_sizes(sizes.as_deref().unwrap_or("2,2,2"))?;
            let trials = trials.unwrap_or(if *suite == Suite::Thm1 { 500 } else { 1000 });
            let cfg = TrialConfig::new(sizes, alphas.clone(), trials, *seed).with_tol(tol);
            let cfg = TrialConfig { base: *base, ..cfg };
            let p = p.unwrap_or(0.25);
            let q = q.unwrap_or(0.25);
            let mut bsc = None;
            let report = match suite {
                Suite::Robustness => experiments::verify_robustness_theorem(&cfg)?,
                Suite::Dpi => experiments::verify_sibson_dpi(&cfg)?,
                Suite::Thm1 => experiments::verify_thm1(&cfg)?,
                Suite::Composition => experiments::verify_composition_conjecture(&cfg)?,
                Suite::Bsc => {
                    bsc = Some(experiments::bsc_closed_forms(
                        p,
                        q,
                        &alphas,
                        *base,
                        &SolverOptions::default(),
                    )?);
                    experiments::verify_bsc(p, q, &alphas, *base, tol)?
                }
                Suite::Witness => {
                    let [a] = alphas[..] else {
                        return Err(CliError::usage("the witness suite takes a single --alpha"));
                    };
                    let j = experiments::bsc_markov_joint(p, q)?;
                    experiments::verify_witness(&j, a, &[100, 10_000, 1_000_000], *base, tol)?
                }
                Suite::Counterexample => {
                    let grid = if p_given(&cli.command) {
                        vec![p]
                    } else {
                        vec![0.1, 0.25, 0.4]
                    };
                    experiments::verify_counterexample_nonmarkov(&grid, &alphas, *base, tol)?
                }
            };
            let code = if report.experimental || report.passed() {
                0
            } else {
                EXIT_FAILED
            };
            Ok(Outcome {
                output: render_report(
                    &report,
                    format.unwrap_or(Format::Table),
                    *per_trial,
                    bsc.as_ref(),
                ),
                code,
            })
        }
    }
}

fn p_given(c: &Command) -> bool {
    matches!(c, Command::Verify { p: Some(_), .. })
}

fn out_path(c: &Command) -> Option<&Path> {
    match c {
        Command::Measure { out, .. }
        | Command::Leakage { out, .. }
        | Command::Verify { out, .. }
        | Command::Sweep { out, .. } => out.as_deref(),
    }
}

/// Parses `args`, runs the command, writes its output and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            match out_path(&cli.command) {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &outcome.output) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_FAILED;
                    }
                }
                None => print!("{}", outcome.output),
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
