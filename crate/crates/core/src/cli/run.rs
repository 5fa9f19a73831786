use std::sync::Arc;

use rayon::prelude::*;

use super::emit::{write_csv, write_json, Cell, Meta, Table};
use super::{CliConfig, Command, Format, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_VERDICT};
use crate::error::Error;
use crate::quantize::OperatorSpec;
use crate::weyl::{self, ReferenceKind, ReferenceLimit};
use crate::QuadratureRule;

/// Largest core-identity residual accepted by `lemma-check`.
pub const LEMMA_TOLERANCE: f64 = 1e-8;
/// Integration bandlimit used when symbols are available in closed form.
pub const DEFAULT_INTEGRATION_BANDLIMIT: u32 = 12;
/// Imaginary parts of partial traces above this are reported.
const IMAG_TOLERANCE: f64 = 1e-9;

/// Exit code, rendered output (absent on failure) and messages for stderr.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub output: Option<Vec<u8>>,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn failure(e: &Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_)
            | Error::CoordinateOutOfRange { .. }
            | Error::LabelMismatch { .. }
            | Error::InvalidBandlimit { .. } => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Outcome {
            code,
            output: None,
            diagnostics: vec![format!("error: {e}")],
        }
    }
}

fn kind_name(k: ReferenceKind) -> &'static str {
    match k {
        ReferenceKind::MultiplicationAvg => "multiplication",
        ReferenceKind::SpectralAvg => "spectral",
        ReferenceKind::ProductAvg => "product",
        ReferenceKind::Combination => "combination",
    }
}

/// Rule bandlimit: the override when given, otherwise a fixed integration
/// rule for closed-form symbols and twice the spectral range for anything
/// that needs operators applied to matrix coefficients.
fn bandlimit(config: &CliConfig, spec: &OperatorSpec) -> u32 {
    let resolving = DEFAULT_INTEGRATION_BANDLIMIT.max(2 * config.lambda_max.ceil() as u32);
    config.quad_bandlimit.unwrap_or(match config.command {
        Command::LemmaCheck => resolving,
        _ if spec.closed_form().is_some() => DEFAULT_INTEGRATION_BANDLIMIT,
        _ => resolving,
    })
}

pub fn run(config: &CliConfig) -> Outcome {
    let spec = config.operator.to_spec(config.order.unwrap_or(0.0));
    let rule = match config.group.haar_quadrature(bandlimit(config, &spec)) {
        Ok(r) => Arc::new(r),
        Err(e) => return Outcome::failure(&e),
    };
    let mut diagnostics = Vec::new();
    let result = match config.command {
        Command::LemmaCheck => lemma_check(config, &spec, &rule, &mut diagnostics),
        Command::WeylScan => weyl_scan(config, &spec, &rule, &mut diagnostics),
        Command::LimitSeq => limit_seq(config, &spec, &rule),
        Command::Growth => growth(config, &spec, &rule, &mut diagnostics),
    };
    let (table, code) = match result {
        Ok(v) => v,
        Err(e) => return Outcome::failure(&e),
    };
    let meta = Meta {
        group: config.group.kind().to_string(),
        operator: config.operator.to_string(),
        command: config.command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut bytes = Vec::new();
    let written = match config.format {
        Format::Csv => write_csv(&table, &mut bytes),
        Format::Json => write_json(&table, &meta, &mut bytes),
    };
    if let Err(e) = written {
        return Outcome {
            code: super::EXIT_IO,
            output: None,
            diagnostics: vec![format!("error: {e}")],
        };
    }
    Outcome {
        code,
        output: Some(bytes),
        diagnostics,
    }
}

type Run = Result<(Table, i32), Error>;

fn lemma_check(config: &CliConfig, spec: &OperatorSpec, rule: &Arc<QuadratureRule>, diag: &mut Vec<String>) -> Run {
    let labels = config.group.dual_enumerate(config.lambda_max);
    let results = labels
        .par_iter()
        .map(|l| weyl::verify_core_identity(spec, l, rule))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["label", "dim", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"]);
    let mut worst = 0.0_f64;
    for r in &results {
        worst = worst.max(r.residual);
        table.push(vec![
            r.label.to_string().into(),
            r.label.dim().into(),
            r.lhs.re.into(),
            r.lhs.im.into(),
            r.rhs.re.into(),
            r.rhs.im.into(),
            r.residual.into(),
        ]);
    }
    let pass = worst <= LEMMA_TOLERANCE;
    table.summary = vec![
        ("irreps", results.len().into()),
        ("max_residual", worst.into()),
        ("tolerance", LEMMA_TOLERANCE.into()),
        ("pass", pass.into()),
    ];
    diag.push(format!(
        "lemma-check: {} irreps, max residual {worst:.3e} ({})",
        results.len(),
        if pass { "pass" } else { "FAIL" }
    ));
    Ok((table, if pass { EXIT_OK } else { EXIT_VERDICT }))
}

fn reference(config: &CliConfig, spec: &OperatorSpec, rule: &QuadratureRule) -> Result<Option<ReferenceLimit>, Error> {
    ReferenceLimit::infer(spec, config.f_inf, rule)
}

fn reference_summary(r: Option<ReferenceLimit>) -> Vec<(&'static str, Cell)> {
    vec![
        ("reference_kind", r.map_or(Cell::Missing, |r| kind_name(r.kind).to_string().into())),
        ("reference", r.map(|r| r.value).into()),
    ]
}

fn weyl_scan(config: &CliConfig, spec: &OperatorSpec, rule: &Arc<QuadratureRule>, diag: &mut Vec<String>) -> Run {
    let r = reference(config, spec, rule)?;
    let rows = weyl::weyl_scan(spec, &config.grid(), r, rule)?;
    let mut table = Table::new(&["lambda", "N", "T", "avg", "ref", "abs_err"]);
    let mut imag = 0.0_f64;
    for row in &rows {
        imag = imag.max(row.t_imag.abs());
        table.push(vec![
            row.lambda.into(),
            row.n.into(),
            row.t.into(),
            row.avg.into(),
            row.reference.into(),
            row.abs_err.into(),
        ]);
    }
    table.summary = reference_summary(r);
    table.summary.push(("max_abs_T_imag", imag.into()));
    if imag > IMAG_TOLERANCE {
        diag.push(format!("warning: partial traces carry imaginary parts up to {imag:.3e}"));
    }
    Ok((table, EXIT_OK))
}

fn limit_seq(config: &CliConfig, spec: &OperatorSpec, rule: &Arc<QuadratureRule>) -> Run {
    let r = reference(config, spec, rule)?;
    let rows = weyl::corollary_sequence(spec, config.lambda_max, rule)?;
    let mut table = Table::new(&["n", "label", "dim", "A_n", "cesaro", "weyl_avg"]);
    for row in &rows {
        table.push(vec![
            row.n.into(),
            row.label.to_string().into(),
            row.dim.into(),
            row.a_n.into(),
            row.cesaro.into(),
            row.weyl_avg.into(),
        ]);
    }
    table.summary = reference_summary(r);
    Ok((table, EXIT_OK))
}

fn growth(config: &CliConfig, spec: &OperatorSpec, rule: &Arc<QuadratureRule>, diag: &mut Vec<String>) -> Run {
    let report = weyl::growth_check(spec, &config.grid(), rule)?;
    let mut table = Table::new(&["lambda", "T", "bound", "reduced"]);
    for row in &report.rows {
        table.push(vec![row.lambda.into(), row.t.into(), row.bound.into(), row.reduced.into()]);
    }
    table.summary = vec![
        ("order", report.order.into()),
        ("exponent", report.exponent.into()),
        ("slope", report.slope.into()),
        ("constant", report.constant.into()),
        ("degenerate", report.degenerate.into()),
        ("bound_ok", report.bound_ok.into()),
        ("reduction_ok", report.reduction_ok.into()),
    ];
    diag.push(match report.slope {
        Some(s) => format!(
            "growth: slope {s:.4} against n+m = {}, bound {}",
            report.exponent,
            if report.bound_ok { "ok" } else { "VIOLATED" }
        ),
        None => "growth: partial trace vanishes, slope undefined (degenerate)".to_string(),
    });
    Ok((table, if report.bound_ok { EXIT_OK } else { EXIT_VERDICT }))
}
