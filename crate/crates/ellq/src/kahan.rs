//! Compensated (Kahan-Babuska-Neumaier) accumulation.
//!
//! The lattice sums add up to ~3.6e7 terms at radius 3000; naive summation
//! loses about three digits there, so every accumulator in the crate is
//! compensated. Summation order is always fixed by the caller, which keeps
//! results bitwise reproducible.

use crate::Complex;

/// Neumaier-compensated scalar sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex {
        Complex::new(self.re.value(), self.im.value())
    }
}
