//! Error type shared by every module of the crate.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Malformed structural input (non-increasing breakpoints, negative atom
    /// mass, ...); `index` names the offending entry.
    Structure { index: usize, reason: String },
    /// A parameter is outside its admissible range.
    Parameter(String),
    /// The absolutely continuous energy is incompatible with the wave
    /// profile: the slope-correction radicand came out negative beyond the
    /// floating-point guard. Violates the Cauchy–Schwarz relation between
    /// `u` increments and energy increments.
    InconsistentInput { cell: i64, radicand: f64 },
    /// A Lagrangian state stopped being a valid transported configuration
    /// (characteristics crossing beyond tolerance).
    CorruptedState(String),
    /// The dissipation-fraction iteration did not meet its stopping rule.
    NonContraction {
        interval: usize,
        t_start: f64,
        t_end: f64,
        iterations: u32,
        residual: f64,
        eps: f64,
    },
    /// A construction precondition failed (e.g. exact and projected
    /// characteristics disagree at a double-cell boundary).
    Precondition(String),
    /// The reference solution vanishes, so a relative error is undefined.
    DegenerateReference { t: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Structure { index, reason } => {
                write!(f, "structural error at entry {index}: {reason}")
            }
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InconsistentInput { cell, radicand } => write!(
                f,
                "inconsistent input on double-cell {cell}: slope-correction radicand {radicand:e} \
                 is negative beyond tolerance"
            ),
            Error::CorruptedState(msg) => write!(f, "corrupted Lagrangian state: {msg}"),
            Error::NonContraction {
                interval,
                t_start,
                t_end,
                iterations,
                residual,
                eps,
            } => write!(
                f,
                "dissipation iteration on interval {interval} ({t_start}, {t_end}] did not \
                 contract: residual {residual:e} > eps {eps:e} after {iterations} iterations"
            ),
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::DegenerateReference { t } => {
                write!(f, "reference solution has zero sup-norm at t = {t}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
