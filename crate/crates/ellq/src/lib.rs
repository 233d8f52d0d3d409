//! Numerics for the elliptic gamma function and its allies.
//!
//! The crate evaluates the q-products `theta0`, `theta1`, `Gamma(z; tau, sigma)`
//! and the arithmetic products `Q_k`, the period functions built from them, the
//! Bloch-Wigner dilogarithm and its elliptic (poly)logarithm averages, and the
//! non-holomorphic Eisenstein lattice sums that tie everything together. On top
//! of the point evaluators sits a verification layer ([`suites`]) that checks a
//! family of functional equations connecting these objects, each identity
//! evaluated through two independent code paths.
//!
//! Conventions used throughout:
//!
//! * `x = exp(2 pi i z)`, `q = exp(2 pi i tau)` with `Im tau > 0`;
//! * lattice coordinates `A = Im z / Im tau`, `Ahat = A Re tau - Re z`, so that
//!   `z = A tau - Ahat` exactly;
//! * logarithms of infinite products are defined as term-wise principal-branch
//!   sums ([`types::LogValue`]);
//! * the involution `(z, tau) -> (z/tau, -1/tau)` maps `(A, Ahat)` to
//!   `(Ahat, -A)`.

pub mod cli;
pub mod epolylog;
pub mod error;
pub mod kahan;
pub mod lattice;
pub mod qk;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod suites;
pub mod theta;
pub mod types;

pub use error::{EllqError, Result};
pub use types::{
    EllipticArgument, EllipticSeriesValue, HalfPlanePoint, LatticeCoords, LogValue,
    TruncationPolicy, WeightPair, ZeroRowConvention,
};

pub type Complex = num_complex::Complex64;

/// `2 pi i`, the ubiquitous prefactor of every exponent in this crate.
pub const TWO_PI_I: Complex = Complex::new(0.0, std::f64::consts::TAU);
