//! q-averaged elliptic functions: the elliptic dilogarithm `D(q; x)`, its
//! companion `J(q; x)`, and the series form of the elliptic polylogarithm
//! `D_{a,b}(q; x)`.
//!
//! All three are one-sided geometric sums over the orbit `x q^m`:
//!
//! ```text
//! D(q;x) = sum_{m>=0} (D(x q^m) - D(x^{-1} q^{m+1}))
//! J(q;x) = sum_{m>=0} (J(x q^m) - J(x^{-1} q^{m+1})) + (log^2|q| / 3) B_3(A)
//! D_{a,b}(q;x) = sum_{m>=0} (D_{a,b}(x q^m) + (-1)^(a+b) D_{a,b}(x^{-1} q^{m+1}))
//!                + (4 pi Im tau)^(a+b-1) / (a+b)!  B_{a+b}(A)
//! ```
//!
//! with `A = log|x| / log|q| = Im z / Im tau` (the correction terms always use
//! the Im-part form of `A`). Under `0 < A < 1` every kernel argument stays
//! strictly inside the unit disk, which the `D_{a,b}` sum requires.

use crate::error::{EllqError, Result};
use crate::kahan::{CompensatedSum, ComplexSum};
use crate::scalar::{bernoulli_poly, bloch_wigner, companion_j, zagier_dab};
use crate::types::{
    EllipticArgument, EllipticSeriesValue, HalfPlanePoint, TruncationPolicy, WeightPair,
};
use crate::Complex;
use std::f64::consts::PI;

fn check_interior(arg: &EllipticArgument, op: &str) -> Result<()> {
    let a = arg.a();
    if !(a > 0.0 && a < 1.0) {
        return Err(EllqError::Domain(format!(
            "{op} needs 0 < A < 1, got A = {a}"
        )));
    }
    Ok(())
}

/// Common truncation driver: sums `f(x q^m, x^{-1} q^{m+1})` until the
/// geometric tail (with a logarithmic weight allowance) is below target.
fn q_ladder<F>(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
    log_weight: i32,
    mut f: F,
) -> Result<(usize, f64)>
where
    F: FnMut(Complex, Complex) -> Result<()>,
{
    policy.validate()?;
    let x = arg.x();
    let x_inv = x.inv();
    let q = hp.q();
    let qn = q.norm();
    let ln_q = qn.ln().abs();
    let mut q_pow = Complex::new(1.0, 0.0);
    let mut m = 0usize;
    loop {
        f(x * q_pow, x_inv * q_pow * q)?;
        m += 1;
        q_pow *= q;
        // kernel bounds: |D(y)|, |J(y)| <= (|ln|y|| + pi) |y| / (1 - |y|) and the
        // D_{a,b} kernels pick up extra powers of |ln|y|| ~ (m ln|q|)^w
        let weight = (1.0 + (m as f64 + 2.0) * ln_q).powi(log_weight);
        let tail = 4.0 * weight * (x.norm() + x_inv.norm() * qn) * q_pow.norm() / (1.0 - qn);
        if m >= 2 && tail < policy.target_tol / 10.0 {
            return Ok((m, tail));
        }
        if m >= policy.max_product_terms {
            return Err(EllqError::Truncation(format!(
                "elliptic series needs more than {} terms",
                policy.max_product_terms
            )));
        }
    }
}

/// Elliptic dilogarithm `D(q; x)`; real-valued.
pub fn elliptic_d(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<EllipticSeriesValue> {
    check_interior(arg, "elliptic_d")?;
    let mut acc = CompensatedSum::new();
    let (terms, tail) = q_ladder(arg, hp, policy, 1, |num, den| {
        acc.add(bloch_wigner(num)?);
        acc.add(-bloch_wigner(den)?);
        Ok(())
    })?;
    Ok(EllipticSeriesValue {
        value: Complex::from(acc.value()),
        terms_used: terms,
        tail_bound: tail,
    })
}

/// Companion `J(q; x)` including the `(log^2|q| / 3) B_3(A)` correction;
/// real-valued.
pub fn elliptic_j(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<EllipticSeriesValue> {
    check_interior(arg, "elliptic_j")?;
    let mut acc = CompensatedSum::new();
    let (terms, tail) = q_ladder(arg, hp, policy, 1, |num, den| {
        acc.add(companion_j(num)?);
        acc.add(-companion_j(den)?);
        Ok(())
    })?;
    let ln_q = hp.q().norm().ln();
    let correction = ln_q * ln_q / 3.0 * bernoulli_poly(3, arg.a())?;
    Ok(EllipticSeriesValue {
        value: Complex::from(acc.value() + correction),
        terms_used: terms,
        tail_bound: tail,
    })
}

/// Series form of the elliptic polylogarithm `D_{a,b}(q; x)` for
/// `3 <= a + b <= 10`.
pub fn elliptic_dab_series(
    w: WeightPair,
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<EllipticSeriesValue> {
    check_interior(arg, "elliptic_dab_series")?;
    let total = w.total();
    if !(3..=10).contains(&total) {
        return Err(EllqError::Domain(format!(
            "elliptic_dab_series needs 3 <= a + b <= 10, got {total}"
        )));
    }
    let sign = if total % 2 == 0 { 1.0 } else { -1.0 };
    let mut acc = ComplexSum::new();
    let (terms, tail) = q_ladder(arg, hp, policy, total as i32 - 2, |num, den| {
        debug_assert!(num.norm() < 1.0 && den.norm() < 1.0);
        acc.add(zagier_dab(w, num)?);
        acc.add(sign * zagier_dab(w, den)?);
        Ok(())
    })?;
    let factorial: f64 = (1..=total).map(f64::from).product();
    let correction = (4.0 * PI * hp.tau().im).powi(total as i32 - 1) / factorial
        * bernoulli_poly(total, arg.a())?;
    Ok(EllipticSeriesValue {
        value: acc.value() + correction,
        terms_used: terms,
        tail_bound: tail,
    })
}
