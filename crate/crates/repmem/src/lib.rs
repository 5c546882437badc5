//! Density-matrix simulator and closed-form analytic engine for repetition-code
//! quantum memories under relaxation, dephasing, and depolarizing gate noise.
//!
//! The crate has two halves that check each other:
//!
//! - an exact dense simulator ([`densmat`], [`channels`], [`circuits`]) that runs
//!   bit-flip and phase-flip repetition-code memory circuits with amplitude/phase
//!   damping during idle periods and depolarizing noise after every gate, and
//! - closed-form average-fidelity expressions ([`analytic`]) for the same
//!   protocols, together with break-even inequalities and optimal code-size /
//!   cycle-count selection.
//!
//! [`scan`] extracts first-order gate-error coefficients from the simulator,
//! sweeps parameter grids (optimal code size, optimal cycle count), and loads
//! hardware presets. [`acceptance`] bundles the full cross-validation suite used
//! by the `repmem verify` subcommand and the integration tests.
//!
//! ```
//! use repmem::analytic::{f_phase, ClosedFormParams};
//! use repmem::channels::NoiseParams;
//! use repmem::circuits::{average_fidelity, CodeKind, Decomposition, ProtocolSpec};
//!
//! // One phase-flip correction cycle in a dephasing-limited system,
//! // simulated exactly and compared with its closed form.
//! let spec = ProtocolSpec {
//!     code: CodeKind::PhaseFlip,
//!     n: 3,
//!     decomposition: Decomposition::Ideal,
//!     cycles: 1,
//!     reset: true,
//!     noise: NoiseParams::new(10.0, 1.0, 0.0, 0.0)?,
//!     t_tot: 0.5,
//! };
//! let simulated = average_fidelity(&spec)?;
//! let formula = f_phase(&ClosedFormParams::new(10.0, 1.0, 0.5)?);
//! assert!((simulated - formula).abs() < 1e-10);
//! # Ok::<(), repmem::Error>(())
//! ```

pub mod acceptance;
pub mod analytic;
pub mod channels;
pub mod circuits;
pub mod densmat;
pub mod scan;

pub use analytic::{BreakEvenLine, ClosedFormParams};
pub use channels::{KrausChannel, NoiseParams};
pub use circuits::{CodeKind, Decomposition, ProtocolSpec};
pub use densmat::{CMat, CVec, DensityMatrix, PureState};
pub use scan::{HardwarePreset, ScanResult};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("duplicate qubit index {0} in target list")]
    DuplicateTarget(usize),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("empty keep set for partial trace")]
    EmptyKeep,
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("Kraus operators violate completeness (deviation {0:.3e})")]
    NotCptp(f64),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid time parameter: {0}")]
    InvalidTime(String),
    #[error("channel arity {arity} does not match {targets} target qubit(s)")]
    ArityMismatch { arity: usize, targets: usize },
    #[error("code size n = {0} must be odd and within 1..=9")]
    InvalidCodeSize(usize),
    #[error("decomposition {0:?} requires n = 3")]
    DecompositionNeedsThreeQubits(crate::circuits::Decomposition),
    #[error("cycle count must be >= 1")]
    InvalidCycleCount,
    #[error("preset file line {line}: {msg}")]
    PresetParse { line: usize, msg: String },
    #[error("empty scan grid: {0}")]
    EmptyGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Formats a float with 12 significant digits, the precision used for all
/// numeric CLI and CSV output.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    // Keep plain decimal notation in the range where it stays readable.
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{:.11e}", x)
    }
}
