//! The arithmetic products `Q_k` and the period functions built on them:
//! `T`, its dilogarithm representation, the `F_+` / `F_-` / `F` family and the
//! component expansion `(S, L, U)`.
//!
//! `log Q_k` is the term-wise sum
//!
//! ```text
//! log Q_k(z; tau) = 2 pi i tau B_{k+2}(A)/(k+2)
//!     + sum_{m>=0} [(m+A)^k Log(1 - x q^m) + (-1)^k (m+1-A)^k Log(1 - x^{-1} q^{m+1})]
//! ```
//!
//! For `A` in `(-1, 0)` (reached by the involution applied twice) the single
//! out-of-disk factor `1 - x` is assigned the continuation branch
//! `log(1 - x) := Log(1 - x^{-1}) + i pi + 2 pi i z`, the same function-of-z
//! convention used for the fractional powers in the theta transformation.
//! `Re log Q_k = ln|Q_k|` is invariant under `z -> z + tau` and `z -> z + 1`
//! exactly, which [`log_abs_qk`] uses to reduce any off-strip argument.

use crate::error::{EllqError, Result};
use crate::kahan::ComplexSum;
use crate::scalar::{bernoulli_poly, dilog};
use crate::theta::{log_one_minus, log_theta1};
use crate::types::{EllipticArgument, HalfPlanePoint, LogValue, TruncationPolicy};
use crate::{Complex, TWO_PI_I};

const DOMAIN_SLACK: f64 = 1e-12;

/// Highest product weight `k` supported by [`log_qk`].
pub const MAX_QK_WEIGHT: u32 = 8;

/// The calibrated weight exponent for `F_{k,+-}`: `tau^k`. (The printed
/// general-weight definition carries `tau^{k-2}`, which disagrees with the
/// `k = 1` prototype and fails the involution equations; calibration selects
/// `tau^k`.)
pub fn default_weight_exponent(k: u32) -> i32 {
    k as i32
}

/// Variant selector for the period function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodVariant {
    Plus,
    Minus,
    Mean,
}

/// A period-function value together with its weight index and variant.
#[derive(Debug, Clone, Copy)]
pub struct PeriodValue {
    pub value: Complex,
    pub k: u32,
    pub variant: PeriodVariant,
}

/// Term-wise `log Q_k` for `A` in `(-1, 0) u [0, 1]`; see the module docs for
/// the continuation convention on `(-1, 0)`.
pub fn log_qk(
    k: u32,
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<LogValue> {
    policy.validate()?;
    if k > MAX_QK_WEIGHT {
        return Err(EllqError::Domain(format!(
            "log_qk supports k <= {MAX_QK_WEIGHT}, got {k}"
        )));
    }
    let a = arg.a();
    let continued = (-1.0 + DOMAIN_SLACK..-DOMAIN_SLACK).contains(&a);
    if !continued && !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&a) {
        return Err(EllqError::Domain(format!(
            "log_qk needs A in (-1, 1]; got A = {a} — reduce z first"
        )));
    }

    let x = arg.x();
    let x_inv = x.inv();
    let q = hp.q();
    let qn = q.norm();
    let kf = k as i32;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };

    let mut acc = ComplexSum::new();
    let mut near_cut = 0usize;
    acc.add(TWO_PI_I * hp.tau() * bernoulli_poly(k + 2, a)? / (k + 2) as f64);

    // m = 0 factor of the (1 - x q^m) family, the only one that can leave the
    // unit disk
    if continued {
        let log_factor = log_one_minus(x_inv, &mut near_cut)?
            + Complex::new(0.0, std::f64::consts::PI)
            + TWO_PI_I * arg.z();
        acc.add(a.powi(kf) * log_factor);
    } else {
        acc.add(a.powi(kf) * log_one_minus(x, &mut near_cut)?);
    }

    let mut q_pow = q; // q^m for m >= 1
    let mut m = 1usize;
    loop {
        let mf = m as f64;
        acc.add((mf + a).powi(kf) * log_one_minus(x * q_pow, &mut near_cut)?);
        acc.add(sign * (mf - a).powi(kf) * log_one_minus(x_inv * q_pow, &mut near_cut)?);
        m += 1;
        q_pow *= q;
        // both term families sit at exponent m here (1 - x q^m and 1 - x^{-1} q^m)
        let growth = (mf + 2.0).powi(kf);
        let tail = 2.0 * growth * (x.norm() + x_inv.norm()) * q_pow.norm()
            / (1.0 - qn).powi(kf + 1);
        if m >= 2 && tail < policy.target_tol / 10.0 {
            break;
        }
        if m >= policy.max_product_terms {
            return Err(EllqError::Truncation(format!(
                "log_qk needs more than {} terms for tolerance {}",
                policy.max_product_terms, policy.target_tol
            )));
        }
    }
    Ok(LogValue {
        value: acc.value(),
        branch_offsets_detected: near_cut,
        terms_used: m,
    })
}

/// `ln |Q_k|`, defined for any `z` off the lattice through the exact
/// invariance of the modulus under `z -> z + tau` and `z -> z + 1`.
pub fn log_abs_qk(
    k: u32,
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let shift = -arg.a().floor();
    let reduced = if shift == 0.0 {
        *arg
    } else {
        EllipticArgument::from_z(arg.z() + shift * hp.tau(), hp)?
    };
    let a = reduced.a();
    if a.min(1.0 - a) < 1e-9 {
        return Err(EllqError::Singularity(format!(
            "ln|Q_k| evaluated within 1e-9 of the lattice row A = 0 (A mod 1 = {a})"
        )));
    }
    Ok(log_qk(k, &reduced, hp, policy)?.value.re)
}

/// `T(z; tau) = tau log theta1(z; tau) - log theta1(zhat; tauhat)`.
pub fn t_function(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<Complex> {
    let (arg_hat, hp_hat) = crate::theta::tau_involution(arg, hp)?;
    let t = hp.tau() * log_theta1(arg, hp, policy)?.value
        - log_theta1(&arg_hat, &hp_hat, policy)?.value;
    Ok(t)
}

/// Dilogarithm representation of `T`:
///
/// ```text
/// pi i (tau - 2z)(1 + 2 tau z - 2 z^2) / (12 tau) + z log theta0(z; tau)
///     - (1/2 pi i) sum_{m>=0} [Li_2(x^{-1} q^{m+1}) - Li_2(x q^m)]
/// ```
pub fn lemma3_rhs(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<Complex> {
    let z = arg.z();
    let tau = hp.tau();
    let cubic = Complex::i() * std::f64::consts::PI * (tau - 2.0 * z)
        * (1.0 + 2.0 * tau * z - 2.0 * z * z)
        / (12.0 * tau);
    let theta0 = crate::theta::log_theta0(arg, hp, policy)?.value;
    let l = dilog_ladder(arg, hp, policy)?;
    Ok(cubic + z * theta0 - l / TWO_PI_I)
}

/// `L(z, tau) = sum_{m>=0} [Li_2(x^{-1} q^{m+1}) - Li_2(x q^m)]`.
fn dilog_ladder(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<Complex> {
    let x = arg.x();
    let x_inv = x.inv();
    let q = hp.q();
    let qn = q.norm();
    let mut acc = ComplexSum::new();
    let mut q_pow = Complex::new(1.0, 0.0);
    let mut m = 0usize;
    loop {
        let y_num = x_inv * q_pow * q;
        let y_den = x * q_pow;
        for y in [y_num, y_den] {
            if (Complex::new(1.0, 0.0) - y).norm() < crate::theta::SINGULARITY_GUARD {
                return Err(EllqError::Singularity(format!(
                    "dilogarithm ladder argument at a product zero (y = {y})"
                )));
            }
        }
        acc.add(dilog(y_num) - dilog(y_den));
        m += 1;
        q_pow *= q;
        // |Li_2(y)| <= |y|/(1-|y|) termwise
        let tail = 2.0 * (x.norm() + x_inv.norm() * qn) * q_pow.norm() / (1.0 - qn).powi(2);
        if m >= 2 && tail < policy.target_tol / 10.0 {
            break;
        }
        if m >= policy.max_product_terms {
            return Err(EllqError::Truncation("dilogarithm ladder".into()));
        }
    }
    Ok(acc.value())
}

/// The Theorem-1 expansion components.
///
/// * `S`: the cubic polynomial `(-pi i/12)(2A-1)(6z^2 - 12 A tau z + 6z + 8A^2 tau^2 - 2A tau^2 - 6A tau + 1)`;
/// * `L`: the dilogarithm ladder;
/// * `U`: the weighted `Li_1` ladder `sum [ln|x^{-1} q^{m+1}| Li_1(x^{-1} q^{m+1}) - ln|x q^m| Li_1(x q^m)]`.
pub fn theorem1_components(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<(Complex, Complex, Complex)> {
    let a = arg.a();
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&a) {
        return Err(EllqError::Domain(format!(
            "theorem1_components needs A in [0, 1], got {a}"
        )));
    }
    let z = arg.z();
    let tau = hp.tau();
    let s = -Complex::i() * std::f64::consts::PI / 12.0
        * (2.0 * a - 1.0)
        * (6.0 * z * z - 12.0 * a * tau * z + 6.0 * z + 8.0 * a * a * tau * tau
            - 2.0 * a * tau * tau
            - 6.0 * a * tau
            + 1.0);
    let l = dilog_ladder(arg, hp, policy)?;

    let x = arg.x();
    let x_inv = x.inv();
    let q = hp.q();
    let qn = q.norm();
    let mut u = ComplexSum::new();
    let mut near_cut = 0usize;
    let mut q_pow = Complex::new(1.0, 0.0);
    let mut m = 0usize;
    loop {
        let y_num = x_inv * q_pow * q;
        let y_den = x * q_pow;
        u.add(-y_num.norm().ln() * log_one_minus(y_num, &mut near_cut)?);
        let ln_den = y_den.norm().ln();
        if ln_den != 0.0 {
            // the |y| = 1 boundary term carries a zero coefficient exactly
            u.add(ln_den * log_one_minus(y_den, &mut near_cut)?);
        }
        m += 1;
        q_pow *= q;
        let decay = q_pow.norm();
        let tail = 4.0 * (m as f64 + 2.0) * qn.ln().abs() * (x.norm() + x_inv.norm() * qn) * decay
            / (1.0 - qn).powi(2);
        if m >= 2 && tail < policy.target_tol / 10.0 {
            break;
        }
        if m >= policy.max_product_terms {
            return Err(EllqError::Truncation("theorem1 U ladder".into()));
        }
    }
    Ok((s, l, u.value()))
}

/// The period functions `F_{k,+}`, `F_{k,-}` and their mean
/// `F_k = ln|Q_k(zhat; tauhat)| - tau^k ln|Q_k(z; tau)|`, with the calibrated
/// weight `tau^k`.
pub fn period_f(
    k: u32,
    variant: PeriodVariant,
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<PeriodValue> {
    period_f_with_weight(k, default_weight_exponent(k), variant, arg, hp, policy)
}

/// [`period_f`] with an explicit weight exponent (used by calibration).
pub fn period_f_with_weight(
    k: u32,
    weight: i32,
    variant: PeriodVariant,
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<PeriodValue> {
    if k < 1 {
        return Err(EllqError::Domain("period_f needs k >= 1".into()));
    }
    let (arg_hat, hp_hat) = crate::theta::tau_involution(arg, hp)?;
    let w = hp.tau().powi(weight);
    let value = match variant {
        PeriodVariant::Plus => {
            log_qk(k, &arg_hat, &hp_hat, policy)?.value - w * log_qk(k, arg, hp, policy)?.value
        }
        PeriodVariant::Minus => {
            log_qk(k, &arg_hat, &hp_hat, policy)?.value.conj()
                - w * log_qk(k, arg, hp, policy)?.value.conj()
        }
        PeriodVariant::Mean => {
            Complex::from(log_abs_qk(k, &arg_hat, &hp_hat, policy)?)
                - w * log_abs_qk(k, arg, hp, policy)?
        }
    };
    Ok(PeriodValue { value, k, variant })
}
