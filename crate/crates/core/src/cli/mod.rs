//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check ran but failed its verdict, 2 bad
//! configuration or operator text, 3 a numerical precondition failed,
//! 4 output could not be written.

pub mod emit;
pub mod grammar;
mod run;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::group::Group;
use grammar::{parse_operator, OperatorAst};

pub use run::{run, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Both sides of the core identity for every irrep up to lambda-max.
    LemmaCheck,
    /// Partial traces and averages on a lambda grid.
    WeylScan,
    /// The sequence A_n with running averages.
    LimitSeq,
    /// Growth of the partial trace of a positive operator of order m > 0.
    Growth,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupName {
    T1,
    T2,
    Su2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "groupweyl", version, about = "Global symbols and local Weyl law checks on T^1, T^2 and SU(2)")]
#[command(allow_negative_numbers = true)]
pub struct Args {
    pub command: Command,
    #[arg(long, value_enum)]
    pub group: GroupName,
    /// Operator text, e.g. "prod(mult(cos(x1)), spec(t^2/(1+t^2)))".
    #[arg(long = "op")]
    pub op: String,
    #[arg(long = "lambda-max")]
    pub lambda_max: f64,
    /// First grid point; defaults to lambda-max / steps.
    #[arg(long = "lambda-min")]
    pub lambda_min: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Order m declared for spectral and symbol leaves; required by `growth`.
    #[arg(long)]
    pub order: Option<f64>,
    /// Limit at infinity of the spectral multipliers, for reference limits.
    #[arg(long = "f-inf")]
    pub f_inf: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Bandlimit of the quadrature rule used for x-integrals.
    #[arg(long = "quad-bandlimit")]
    pub quad_bandlimit: Option<u32>,
    /// Positive factor multiplying every Laplace eigenvalue.
    #[arg(long = "metric-scale", default_value_t = 1.0)]
    pub metric_scale: f64,
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub command: Command,
    pub group: Group,
    pub operator: OperatorAst,
    pub lambda_min: Option<f64>,
    pub lambda_max: f64,
    pub steps: usize,
    pub order: Option<f64>,
    pub f_inf: Option<f64>,
    pub format: Format,
    pub quad_bandlimit: Option<u32>,
}

impl CliConfig {
    pub fn from_args(args: &Args) -> Result<Self, String> {
        let group = match args.group {
            GroupName::T1 => Group::t1(),
            GroupName::T2 => Group::t2(),
            GroupName::Su2 => Group::su2(),
        }
        .with_metric_scale(args.metric_scale)
        .map_err(|e| e.to_string())?;
        if args.op.trim().is_empty() {
            return Err("--op must not be empty".into());
        }
        let operator = parse_operator(&args.op).map_err(|e| format!("{e}\n  {}\n  {}^", args.op, " ".repeat(e.offset())))?;
        let config = CliConfig {
            command: args.command,
            group,
            operator,
            lambda_min: args.lambda_min,
            lambda_max: args.lambda_max,
            steps: args.steps,
            order: args.order,
            f_inf: args.f_inf,
            format: args.format,
            quad_bandlimit: args.quad_bandlimit,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.lambda_max.is_finite() && self.lambda_max > 0.0) {
            return Err(format!("--lambda-max must be positive, got {}", self.lambda_max));
        }
        if self.steps < 1 {
            return Err("--steps must be at least 1".into());
        }
        if let Some(min) = self.lambda_min {
            if !(min.is_finite() && min >= 0.0 && min <= self.lambda_max) {
                return Err(format!("--lambda-min must lie in [0, lambda-max], got {min}"));
            }
        }
        if let Some(m) = self.order {
            if !m.is_finite() {
                return Err("--order must be finite".into());
            }
        }
        if let Some(f) = self.f_inf {
            if !f.is_finite() {
                return Err("--f-inf must be finite".into());
            }
        }
        if self.command == Command::Growth && self.order.is_none() {
            return Err("growth needs --order".into());
        }
        if self.quad_bandlimit == Some(0) && self.group.kind() == crate::GroupKind::Su2 {
            return Err("--quad-bandlimit must be at least 1 on su2".into());
        }
        self.operator
            .to_spec(self.order.unwrap_or(0.0))
            .validate(&self.group)
            .map_err(|e| e.to_string())
    }

    /// `lambda_min + (lambda_max - lambda_min) i / (steps - 1)`, or
    /// `lambda_max k / steps` for `k = 1..=steps` without a lower end.
    pub fn grid(&self) -> Vec<f64> {
        let (max, n) = (self.lambda_max, self.steps);
        match self.lambda_min {
            None => (1..=n).map(|k| max * k as f64 / n as f64).collect(),
            Some(min) if n == 1 => vec![min.max(max)],
            Some(min) => (0..n)
                .map(|i| if i + 1 == n { max } else { min + (max - min) * i as f64 / (n - 1) as f64 })
                .collect(),
        }
    }
}

/// Parses `argv`, runs the command and writes its output. Returns the exit code.
pub fn main_with_args<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let config = match CliConfig::from_args(&args) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let outcome = run(&config);
    for line in &outcome.diagnostics {
        let _ = writeln!(stderr, "{line}");
    }
    let Some(bytes) = outcome.output else {
        return outcome.code;
    };
    let written = match &args.out {
        Some(path) => std::fs::write(path, &bytes),
        None => stdout.write_all(&bytes).and_then(|_| stdout.flush()),
    };
    match written {
        Ok(()) => outcome.code,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            EXIT_IO
        }
    }
}
