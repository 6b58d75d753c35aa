//! Deformed (nonlinear) coherent states on a truncated Fock basis.
//!
//! The crate builds normalized |z, f> states for a family of nonlinearity
//! functions f(n), evaluates the standard scalar non-classicality criteria
//! (quadrature and amplitude-squared squeezing, Mandel Q, g2(0), the A3
//! parameter), the Wigner distribution through the displaced-parity series,
//! the resolution-of-identity machinery for the q-exponential family
//! (generalized exponential, Hankel-Hadamard minors, the log-normal-type
//! weight function and its Stieltjes moments), and classicality scans
//! (criteria sweeps, threshold search, radius of coherence).
//!
//! Everything magnitude-sensitive runs in a log-domain representation so
//! that coherence amplitudes up to |z| ~ 1e12 stay representable.

pub mod error;
pub mod identity;
pub mod math;
pub mod moments;
pub mod nonlin;
pub mod quad;
pub mod scan;
pub mod state;
pub mod wigner;

pub use error::{Error, Result};
pub use identity::{LogDet, MomentCheckReport, WeightFunctionSample};
pub use math::LogComplex;
pub use moments::{CriteriaReport, MomentSet};
pub use nonlin::{Nonlinearity, SpectrumSlice};
pub use scan::{
    ClassicalityVerdict, Family, RadiusResult, SweepRow, SweepTable, ThresholdResult,
    VerdictConfig,
};
pub use state::{build_state, build_state_capped, kerr_evolve, DeformedState, DEFAULT_MAX_CUTOFF};
pub use wigner::{PhaseGrid, WignerGrid};
