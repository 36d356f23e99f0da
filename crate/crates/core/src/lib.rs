//! Finite-dimensional toolkit for reversibility (sufficiency) of quantum
//! channels.
//!
//! The crate covers the Petz recovery channel, complementary channels,
//! orthogonal decomposition of pure-state families, structural
//! reversibility criteria built on the complementary channel, and the
//! Holevo-quantity applications that follow from them. Everything is dense
//! and intended for dimensions up to a few dozen.

pub mod channels;
pub mod criteria;
pub mod divergences;
pub mod error;
pub mod io;
pub mod linalg;
pub mod petz;
pub mod random;
pub mod states;

pub use channels::{CqStructure, KrausChannel};
pub use criteria::{CriterionReport, Verdict};
pub use divergences::{ExtendedReal, LogBase};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64, DEFAULT_TOL};
pub use states::{DensityMatrix, DiscreteEnsemble, PureStateFamily};
