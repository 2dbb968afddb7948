//! Diffraction of Gaussian beams by spiral phase plates, computed two ways.
//!
//! A spiral phase plate (SPP) multiplies a transverse field by `exp(iqφ)`,
//! where the topological charge `q` may be fractional. This crate computes
//! the Laguerre-Gaussian (LG) spectrum of the transmitted beam by two
//! independent routes and checks them against each other:
//!
//! * **classical** — closed-form generalized Fourier coefficients of the
//!   (optionally displaced) Gaussian against the LG basis, with the radial
//!   coupling kernel expressed through a terminating Appell F₂ series;
//! * **quantum** — the beam as a state of the isotropic 2-d harmonic
//!   oscillator in circular modes, the plate as the two-mode phase operator
//!   `((â₊† + â₋)/(â₊ + â₋†))^{q/2}` expanded in Newton-binomial series of
//!   rational ladder powers.
//!
//! The [`oracle`] module carries brute-force quadrature of every overlap
//! integral; it is the reference all closed forms are tested against.
//!
//! Supporting machinery: special functions ([`specfun`]), paraxial beam
//! geometry, mode evaluation and field grids ([`paraxial`]).

pub mod classical;
pub mod error;
pub mod oracle;
pub mod paraxial;
pub mod quantum;
pub mod specfun;

pub use classical::{SpectralDecomposition, TruncationPolicy};
pub use error::CoreError;
pub use oracle::{EquivalenceReport, QuadratureSpec};
pub use paraxial::{BeamGeometry, FieldGrid, GridSpec, ModeIndex, SppSpec};
pub use quantum::{CircularOccupation, OperatorTruncation, TwoModeState};

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;
