use thiserror::Error;

use crate::group::{GroupKind, IrrepLabel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("label {label} does not belong to group {group}")]
    LabelMismatch { group: GroupKind, label: IrrepLabel },

    #[error("group element coordinates do not match group {group}")]
    ElementMismatch { group: GroupKind },

    #[error("bandlimit {bandlimit} is not supported for {group}")]
    InvalidBandlimit { group: GroupKind, bandlimit: u32 },

    #[error("quadrature bandlimit {available} cannot resolve content up to |xi| = {required}")]
    InsufficientBandlimit { required: f64, available: u32 },

    #[error("grid functions and symbols live on different quadrature rules")]
    RuleMismatch,

    #[error("expression `{expr}` is not finite at node {node:?}, irrep {label:?}")]
    Evaluation {
        expr: String,
        node: Option<usize>,
        label: Option<IrrepLabel>,
    },

    #[error("coordinate x{index} does not exist on {group}")]
    CoordinateOutOfRange { index: usize, group: GroupKind },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symbol trace {trace:.3e} < 0 at node {node}, irrep {label}")]
    PositivityViolation {
        node: usize,
        label: IrrepLabel,
        trace: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
