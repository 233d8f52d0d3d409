//! Pointwise special functions: Bernoulli polynomials, polylogarithms on the
//! open unit disk, the Bloch-Wigner dilogarithm `D`, its companion `J`, and
//! Zagier's single-argument kernel `D_{a,b}`.
//!
//! All functions are pure; domain violations return errors rather than NaNs.

use crate::error::{EllqError, Result};
use crate::kahan::{CompensatedSum, ComplexSum};
use crate::types::WeightPair;
use crate::Complex;
use std::f64::consts::PI;

/// Highest Bernoulli polynomial degree stored exactly.
pub const MAX_BERNOULLI_DEGREE: u32 = 16;

/// Bernoulli numbers B_0..B_16 as exact rationals rendered to f64 (B_1 = -1/2).
const BERNOULLI_NUMBERS: [(f64, f64); 17] = [
    (1.0, 1.0),
    (-1.0, 2.0),
    (1.0, 6.0),
    (0.0, 1.0),
    (-1.0, 30.0),
    (0.0, 1.0),
    (1.0, 42.0),
    (0.0, 1.0),
    (-1.0, 30.0),
    (0.0, 1.0),
    (5.0, 66.0),
    (0.0, 1.0),
    (-691.0, 2730.0),
    (0.0, 1.0),
    (7.0, 6.0),
    (0.0, 1.0),
    (-3617.0, 510.0),
];

fn binomial(n: u32, k: u32) -> f64 {
    // exact in f64 for n <= 16 (max value 12870)
    let mut acc = 1.0;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// Bernoulli polynomial `B_k(t)` for `k <= 16`, evaluated by Horner's scheme
/// over exact rational coefficients `C(k, j) B_j`.
///
/// Arguments outside `[0, 1]` are reduced into the unit interval through
/// `B_k(t + 1) = B_k(t) + k t^(k-1)`, which keeps the evaluation
/// well-conditioned on the documented `|t| <= 2` range.
pub fn bernoulli_poly(k: u32, t: f64) -> Result<f64> {
    if k > MAX_BERNOULLI_DEGREE {
        return Err(EllqError::Domain(format!(
            "bernoulli_poly supports k <= {MAX_BERNOULLI_DEGREE}, got {k}"
        )));
    }
    if !t.is_finite() {
        return Err(EllqError::Domain(format!("bernoulli_poly needs finite t, got {t}")));
    }
    let mut shifted = t;
    let mut correction = CompensatedSum::new();
    if k >= 1 && t.abs() <= 8.0 {
        while shifted > 1.0 {
            shifted -= 1.0;
            correction.add(k as f64 * shifted.powi(k as i32 - 1));
        }
        while shifted < 0.0 {
            correction.add(-(k as f64) * shifted.powi(k as i32 - 1));
            shifted += 1.0;
        }
    }
    // descending powers: coefficient of t^(k-j) is C(k,j) B_j
    let mut acc = 0.0;
    for j in 0..=k {
        let (num, den) = BERNOULLI_NUMBERS[j as usize];
        acc = acc * shifted + binomial(k, j) * num / den;
    }
    Ok(acc + correction.value())
}

/// Polylogarithm `Li_l(x) = sum_{n>=1} x^n / n^l` for `|x| < 1`.
///
/// `l = 1` uses the closed form `-Log(1-x)`; higher weights sum the series
/// with the truncation index chosen from the geometric tail bound
/// `|x|^(N+1) / ((N+1)^l (1-|x|)) < 1e-16`.
pub fn polylog(ell: u32, x: Complex) -> Result<Complex> {
    if ell < 1 {
        return Err(EllqError::Domain(format!("polylog needs l >= 1, got {ell}")));
    }
    let r = x.norm();
    if r >= 1.0 {
        return Err(EllqError::Domain(format!(
            "polylog argument must satisfy |x| < 1, got |x| = {r}"
        )));
    }
    if r == 0.0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    if ell == 1 {
        return Ok(-(Complex::new(1.0, 0.0) - x).ln());
    }
    // smallest N with r^(N+1)/(1-r) < 1e-16 is enough (the (N+1)^l factor only helps)
    let n_terms = ((1e-16 * (1.0 - r)).ln() / r.ln()).ceil().max(4.0);
    if n_terms > 5e7 {
        return Err(EllqError::Domain(format!(
            "polylog argument too close to the unit circle (|x| = {r})"
        )));
    }
    let n_terms = n_terms as usize;
    let mut acc = ComplexSum::new();
    let mut xn = Complex::new(1.0, 0.0);
    for n in 1..=n_terms {
        xn *= x;
        acc.add(xn / (n as f64).powi(ell as i32));
    }
    Ok(acc.value())
}

/// Complex dilogarithm on the closed unit disk, via reflection into
/// `Re x <= 1/2` and the Bernoulli series in `w = -Log(1-x)`.
///
/// Used internally where arguments may sit on the unit circle (e.g. the
/// Bloch-Wigner kernel); the public [`polylog`] keeps the strict `|x| < 1`
/// series contract.
pub(crate) fn dilog(x: Complex) -> Complex {
    const ZETA2: f64 = PI * PI / 6.0;
    debug_assert!(x.norm() <= 1.0 + 1e-9, "dilog expects |x| <= 1");
    if x.norm() == 0.0 {
        return Complex::new(0.0, 0.0);
    }
    if (x - 1.0).norm() == 0.0 {
        return Complex::new(ZETA2, 0.0);
    }
    if x.re > 0.5 {
        // Li2(x) = zeta(2) - Log(x) Log(1-x) - Li2(1-x)
        let one_minus = Complex::new(1.0, 0.0) - x;
        return Complex::new(ZETA2, 0.0) - x.ln() * one_minus.ln() - dilog(one_minus);
    }
    // Debye series: Li2(x) = w - w^2/4 + sum_{k>=1} B_{2k} w^(2k+1) / (2k+1)!;
    // after reduction |w| <= ~1.26, so 15 even Bernoulli numbers suffice
    const EVEN_BERNOULLI: [(f64, f64); 15] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
        (43867.0, 798.0),
        (-174611.0, 330.0),
        (854513.0, 138.0),
        (-236364091.0, 2730.0),
        (8553103.0, 6.0),
        (-23749461029.0, 870.0),
        (8615841276005.0, 14322.0),
    ];
    let w = -(Complex::new(1.0, 0.0) - x).ln();
    let w2 = w * w;
    let mut term = w; // w^(2k+1) running power
    let mut acc = w - w2 * 0.25;
    let mut fact = 1.0; // (2k+1)!
    for (k, (num, den)) in EVEN_BERNOULLI.iter().enumerate() {
        term *= w2;
        fact *= (2 * k + 2) as f64 * (2 * k + 3) as f64;
        let contrib = term * (num / den / fact);
        acc += contrib;
        if contrib.norm() < 1e-18 * acc.norm().max(1.0) {
            break;
        }
    }
    acc
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Bloch-Wigner dilogarithm `D(x) = ln|x| arg(1-x) + Im Li_2(x)`.
///
/// Real arguments give 0; `|x| >= 1` is reduced through `D(1/x) = -D(x)`.
pub fn bloch_wigner(x: Complex) -> Result<f64> {
    if x.im == 0.0 && (x.re == 0.0 || x.re == 1.0) {
        return Err(EllqError::Domain(format!(
            "bloch_wigner undefined at x = {}",
            x.re
        )));
    }
    if x.im == 0.0 {
        return Ok(0.0);
    }
    if x.norm() > 1.0 {
        return Ok(-bloch_wigner(x.inv())?);
    }
    let one_minus = Complex::new(1.0, 0.0) - x;
    Ok(x.norm().ln() * one_minus.arg() + dilog(x).im)
}

/// Companion kernel `J(x) = ln|x| ln|1-x|`.
pub fn companion_j(x: Complex) -> Result<f64> {
    if x.norm() == 0.0 || (x - 1.0).norm() == 0.0 {
        return Err(EllqError::Domain("companion_j undefined at x in {0, 1}".into()));
    }
    Ok(x.norm().ln() * (Complex::new(1.0, 0.0) - x).norm().ln())
}

/// Zagier's single-valued kernel
///
/// ```text
/// D_{a,b}(x) = (-1)^(a-1) sum_{l=a}^{a+b-1} 2^(a+b-l-1) C(l-1, a-1)
///                  (-ln|x|)^(a+b-l-1) / (a+b-l-1)!  Li_l(x)
///            + (same with a and b swapped, conjugated Li_l)
/// ```
///
/// for `|x| < 1`, `x != 0`, `a + b <= 12`.
pub fn zagier_dab(w: WeightPair, x: Complex) -> Result<Complex> {
    let (a, b) = (w.a(), w.b());
    if a + b > 12 {
        return Err(EllqError::Domain(format!(
            "zagier_dab supports a + b <= 12, got {}",
            a + b
        )));
    }
    if x.norm() == 0.0 {
        return Err(EllqError::Domain("zagier_dab undefined at x = 0".into()));
    }
    let neg_ln_abs = -x.norm().ln();
    let mut acc = ComplexSum::new();
    for (first, conjugate) in [(a, false), (b, true)] {
        let sign = (-1f64).powi(first as i32 - 1);
        for l in first..=(a + b - 1) {
            let p = (a + b - l - 1) as i32;
            let coeff = sign
                * 2f64.powi(p)
                * binomial(l - 1, first - 1)
                * neg_ln_abs.powi(p)
                / factorial(p as u32);
            let li = polylog(l, x)?;
            acc.add(coeff * if conjugate { li.conj() } else { li });
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kahan::CompensatedSum;

    const CATALAN: f64 = 0.915_965_594_177_219_0;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn bernoulli_poly_reference_values() {
        // B3 has zeros at 0, 1/2, 1 and B3(1/4) = 3/64
        assert_eq!(bernoulli_poly(3, 0.5).unwrap(), 0.0);
        assert_eq!(bernoulli_poly(3, 0.25).unwrap(), 0.046875);
        assert_eq!(bernoulli_poly(3, 1.0).unwrap(), 0.0);
        assert_eq!(bernoulli_poly(0, -1.3).unwrap(), 1.0);
        // reflection B_k(1-t) = (-1)^k B_k(t); conditioning worsens with k
        for k in 0..=16u32 {
            for &t in &[0.1, 0.37, 0.5, 0.93, 1.7] {
                let l = bernoulli_poly(k, 1.0 - t).unwrap();
                let r = (-1f64).powi(k as i32) * bernoulli_poly(k, t).unwrap();
                let tol = if k <= 8 { 1e-14 } else { 1e-10 };
                assert!((l - r).abs() <= tol * (1.0 + l.abs()), "k={k} t={t}");
            }
        }
        assert!(bernoulli_poly(17, 0.5).is_err());
        // frozen high-precision reference values
        for (k, t, expect) in [
            (8u32, 0.37, 0.022730272768738766667),
            (12, 1.35, 0.14887432016573423996),
            (16, 0.2, -2.1914758239478884392),
            (16, 1.7, 2.2676119043672060608),
            (10, 0.5, -0.075609611742424242424),
            (14, 2.0, 15.166666666666666667),
        ] {
            let v = bernoulli_poly(k, t).unwrap();
            assert!(
                (v - expect).abs() <= 1e-13 * (1.0 + expect.abs()),
                "B_{k}({t}) = {v}, want {expect}"
            );
        }
    }

    #[test]
    fn bernoulli_poly_matches_series_recurrence() {
        // independent oracle: B_k(t+1) - B_k(t) = k t^(k-1)
        for k in 1..=16u32 {
            for &t in &[0.2, 0.7, 1.1] {
                let d = bernoulli_poly(k, t + 1.0).unwrap() - bernoulli_poly(k, t).unwrap();
                let expect = k as f64 * t.powi(k as i32 - 1);
                assert!((d - expect).abs() < 1e-11 * (1.0 + expect.abs()), "k={k} t={t}");
            }
        }
    }

    #[test]
    fn polylog_reference_values() {
        // Li_1(1/2) = ln 2
        let v = polylog(1, c(0.5, 0.0)).unwrap();
        assert!((v.re - std::f64::consts::LN_2).abs() < 1e-15 && v.im == 0.0);
        // Li_2(0) = 0 (empty series)
        assert_eq!(polylog(2, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        // Li_2(1/2) = pi^2/12 - ln^2 2 / 2 (oracle: direct series summation)
        let li2_half = PI * PI / 12.0 - std::f64::consts::LN_2.powi(2) / 2.0;
        let v = polylog(2, c(0.5, 0.0)).unwrap();
        assert!((v.re - li2_half).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn polylog_rejects_bad_input() {
        assert!(polylog(0, c(0.5, 0.0)).is_err());
        assert!(polylog(2, c(1.0, 0.0)).is_err());
        assert!(polylog(2, c(0.8, 0.7)).is_err());
    }

    #[test]
    fn polylog_truncation_is_stable() {
        // doubling the term count changes nothing above 1e-15: compare against
        // a brute-force sum with twice the bound-implied length
        for &(re, im) in &[(0.5, 0.3), (-0.7, 0.2), (0.05, -0.9)] {
            let x = c(re, im);
            for ell in 2..=4 {
                let v = polylog(ell, x).unwrap();
                let n = 2 * ((1e-16f64 * (1.0 - x.norm())).ln() / x.norm().ln()).ceil() as usize;
                let mut brute = ComplexSum::new();
                let mut xn = c(1.0, 0.0);
                for k in 1..=n {
                    xn *= x;
                    brute.add(xn / (k as f64).powi(ell as i32));
                }
                assert!((v - brute.value()).norm() < 1e-15, "ell={ell} x={x}");
            }
        }
    }

    #[test]
    fn dilog_at_i_gives_catalan() {
        // Im Li_2(i) = Catalan's constant (oracle: sum (-1)^k/(2k+1)^2)
        let mut catalan = CompensatedSum::new();
        for k in 0..200_000 {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            catalan.add(s / ((2 * k + 1) as f64).powi(2));
        }
        // alternating series: average consecutive partial sums for accuracy
        let v = dilog(c(0.0, 1.0));
        assert!((v.im - CATALAN).abs() < 1e-14, "got {}", v.im);
        assert!((catalan.value() - CATALAN).abs() < 1e-11);
        // Re Li_2(i) = -pi^2/48
        assert!((v.re + PI * PI / 48.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_wigner_reference_values() {
        assert_eq!(bloch_wigner(c(0.3, 0.0)).unwrap(), 0.0);
        let v = bloch_wigner(c(0.0, 1.0)).unwrap();
        assert!((v - CATALAN).abs() < 1e-14, "D(i) = {v}");
        let plus = bloch_wigner(c(0.2, 0.3)).unwrap();
        let minus = bloch_wigner(c(0.2, -0.3)).unwrap();
        assert!((plus + minus).abs() < 1e-15);
        assert!(bloch_wigner(c(0.0, 0.0)).is_err());
        assert!(bloch_wigner(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn bloch_wigner_symmetries_on_random_sample() {
        // conjugation antisymmetry and the inversion relation over 200 points
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut n = 0;
        while n < 200 {
            let r = 0.05 + 0.90 * next();
            let phi = 2.0 * PI * next();
            let x = c(r * phi.cos(), r * phi.sin());
            if x.im == 0.0 {
                continue;
            }
            n += 1;
            let d = bloch_wigner(x).unwrap();
            assert!((bloch_wigner(x.conj()).unwrap() + d).abs() < 1e-13);
            assert!((bloch_wigner(x.inv()).unwrap() + d).abs() < 1e-12);
        }
    }

    #[test]
    fn companion_j_reference_values() {
        // |x| = 1 kills ln|x|
        let x = Complex::from_polar(1.0, PI / 3.0);
        assert!(companion_j(x).unwrap().abs() < 1e-15);
        let v = companion_j(c(0.5, 0.0)).unwrap();
        assert!((v - std::f64::consts::LN_2.powi(2)).abs() < 1e-15);
        assert_eq!(companion_j(c(-1.0, 0.0)).unwrap(), 0.0);
        assert!(companion_j(c(0.0, 0.0)).is_err());
        assert!(companion_j(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn zagier_dab_reference_values() {
        let w11 = WeightPair::new(1, 1).unwrap();
        let v = zagier_dab(w11, c(0.5, 0.0)).unwrap();
        // collapses to -2 ln|1-x| = 2 ln 2
        assert!((v.re - 2.0 * std::f64::consts::LN_2).abs() < 1e-14 && v.im.abs() < 1e-15);
        let w21 = WeightPair::new(2, 1).unwrap();
        let v21 = zagier_dab(w21, c(0.5, 0.0)).unwrap();
        // expansion -Li2 + conj(Li2) - 2 ln|x| conj(Li1); real x = 0.5 gives 2 ln^2 2
        assert!((v21.re - 2.0 * std::f64::consts::LN_2.powi(2)).abs() < 1e-14);
        let w12 = WeightPair::new(1, 2).unwrap();
        let v12 = zagier_dab(w12, c(0.5, 0.0)).unwrap();
        assert!((v12 - v21.conj()).norm() < 1e-15);
    }

    #[test]
    fn zagier_dab_swap_conjugates_and_21_collapse() {
        // 100 random sample points in the annulus 0.05 < |x| < 0.95
        let mut state = 0x51_ab_2cu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut n = 0;
        while n < 100 {
            let r = 0.05 + 0.90 * next();
            let phi = 2.0 * PI * next();
            let x = c(r * phi.cos(), r * phi.sin());
            if x.im == 0.0 {
                continue;
            }
            n += 1;
            for (a, b) in [(1, 2), (2, 3), (3, 1), (2, 2)] {
                let ab = zagier_dab(WeightPair::new(a, b).unwrap(), x).unwrap();
                let ba = zagier_dab(WeightPair::new(b, a).unwrap(), x).unwrap();
                assert!((ba - ab.conj()).norm() < 1e-12, "a={a} b={b} x={x}");
            }
            // analytic collapse of the (2,1) kernel: D_{2,1}(x) = -2i (D(x) + i J(x))
            let d21 = zagier_dab(WeightPair::new(2, 1).unwrap(), x).unwrap();
            let kernel = Complex::new(0.0, -2.0)
                * c(bloch_wigner(x).unwrap(), companion_j(x).unwrap());
            assert!((d21 - kernel).norm() < 1e-12, "x={x}");
        }
    }
}
