//! Domain types: half-plane points, elliptic arguments with their lattice
//! coordinates, truncation policies and the log-value wrapper.

use crate::error::{EllqError, Result};
use crate::{Complex, TWO_PI_I};
use serde::Serialize;

/// A modular parameter `tau` with `Im tau > 0`, carrying its nome
/// `q = exp(2 pi i tau)`.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlanePoint {
    tau: Complex,
    q: Complex,
}

impl HalfPlanePoint {
    pub fn new(tau: Complex) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(EllqError::Domain(format!(
                "tau must lie in the upper half-plane, got {tau}"
            )));
        }
        Ok(Self {
            tau,
            q: (TWO_PI_I * tau).exp(),
        })
    }

    pub fn tau(&self) -> Complex {
        self.tau
    }

    /// Cached nome `q = exp(2 pi i tau)`, `|q| < 1`.
    pub fn q(&self) -> Complex {
        self.q
    }
}

/// Real lattice coordinates of `z` in the basis `(tau, -1)`:
/// `A = Im z / Im tau`, `Ahat = A Re tau - Re z`, so `z = A tau - Ahat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeCoords {
    pub a: f64,
    pub a_hat: f64,
}

/// Compute the lattice coordinates of `z` over `tau`.
pub fn lattice_coords(z: Complex, hp: &HalfPlanePoint) -> LatticeCoords {
    let a = z.im / hp.tau().im;
    LatticeCoords {
        a,
        a_hat: a * hp.tau().re - z.re,
    }
}

/// A complex argument `z` together with `x = exp(2 pi i z)` and its lattice
/// coordinates relative to a fixed half-plane point.
#[derive(Debug, Clone, Copy)]
pub struct EllipticArgument {
    z: Complex,
    x: Complex,
    coords: LatticeCoords,
}

impl EllipticArgument {
    pub fn from_z(z: Complex, hp: &HalfPlanePoint) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(EllqError::Domain(format!("z must be finite, got {z}")));
        }
        Ok(Self {
            z,
            x: (TWO_PI_I * z).exp(),
            coords: lattice_coords(z, hp),
        })
    }

    pub fn from_coords(a: f64, a_hat: f64, hp: &HalfPlanePoint) -> Result<Self> {
        let z = a * hp.tau() - a_hat;
        Self::from_z(z, hp)
    }

    pub fn z(&self) -> Complex {
        self.z
    }

    /// Cached `x = exp(2 pi i z)`.
    pub fn x(&self) -> Complex {
        self.x
    }

    pub fn a(&self) -> f64 {
        self.coords.a
    }

    pub fn a_hat(&self) -> f64 {
        self.coords.a_hat
    }

    pub fn coords(&self) -> LatticeCoords {
        self.coords
    }
}

/// Product/series cutoff control shared by all evaluators.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TruncationPolicy {
    /// Target absolute tolerance; truncation tails are kept below a tenth of it.
    pub target_tol: f64,
    /// Hard cap on product/series terms.
    pub max_product_terms: usize,
    /// Default lattice radius for shell sums.
    pub lattice_radius: usize,
    /// Treatment of the undefined m = 0 row of the log-Q_k lattice sum.
    pub zero_row_convention: ZeroRowConvention,
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.target_tol < 1e-15 {
            return Err(EllqError::Domain(format!(
                "target_tol must be >= 1e-15, got {}",
                self.target_tol
            )));
        }
        if self.max_product_terms < 8 {
            return Err(EllqError::Domain("max_product_terms must be >= 8".into()));
        }
        if self.lattice_radius < 16 {
            return Err(EllqError::Domain("lattice_radius must be >= 16".into()));
        }
        Ok(())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_tol = tol;
        self
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.lattice_radius = radius;
        self
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            target_tol: 1e-13,
            max_product_terms: 4096,
            lattice_radius: 512,
            zero_row_convention: ZeroRowConvention::BernoulliRow,
        }
    }
}

/// Convention for the m = 0 row of the log-Q_k lattice sum, where the printed
/// `1/m` factor is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroRowConvention {
    /// Sum over m != 0 only.
    Exclude,
    /// Add the calibrated completion `c * 2 pi i tau B_{k+2}(A) / (k+2)`.
    BernoulliRow,
}

/// A complex logarithm defined by term-wise principal-branch summation over a
/// product, tagged with instability sentinels.
#[derive(Debug, Clone, Copy)]
pub struct LogValue {
    /// Sum of term-wise principal logarithms (plus any exact prefactor).
    pub value: Complex,
    /// Number of factors whose principal log landed within 1e-9 of the +-pi
    /// argument cut; nonzero counts mark the point as unreliable for
    /// branch-sensitive identities.
    pub branch_offsets_detected: usize,
    /// Product terms consumed before the tail bound dropped below target.
    pub terms_used: usize,
}

impl LogValue {
    pub fn exp(&self) -> Complex {
        self.value.exp()
    }
}

/// Weight pair `(a, b)` with `a, b >= 1` for the `D_{a,b}` kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightPair {
    a: u32,
    b: u32,
}

impl WeightPair {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a < 1 || b < 1 {
            return Err(EllqError::Domain(format!(
                "weight pair needs a, b >= 1, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn total(&self) -> u32 {
        self.a + self.b
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }
}

/// Value of a geometrically convergent elliptic series together with its
/// truncation metadata.
#[derive(Debug, Clone, Copy)]
pub struct EllipticSeriesValue {
    pub value: Complex,
    pub terms_used: usize,
    pub tail_bound: f64,
}
