//! The q-products: the short theta-function `theta0`, its weighted relative
//! `theta1`, and the elliptic gamma function `Gamma(z; tau, sigma)`, all as
//! term-wise principal-branch log sums.
//!
//! For `0 < A < 1` every product factor `1 - x q^m`, `1 - x^{-1} q^{m+1}`
//! stays strictly inside the unit disk, so each factor's `1 - y` lies in the
//! right half-plane and no principal log can cross the cut. The boundary
//! values `A = 0, 1` are admitted as long as no factor degenerates; outside
//! `[0, 1]` the caller is asked to reduce `z` first (`theta1` additionally
//! accepts `A` in `(-1, 0)` through its exact term-wise reflection).

use crate::error::{EllqError, Result};
use crate::kahan::ComplexSum;
use crate::types::{EllipticArgument, HalfPlanePoint, LogValue, TruncationPolicy};
use crate::{Complex, TWO_PI_I};

/// Distance below which a product factor counts as a zero of the product.
pub const SINGULARITY_GUARD: f64 = 1e-12;
/// Sentinel margin around the +-pi principal-argument cut.
pub const BRANCH_CUT_GUARD: f64 = 1e-9;
const DOMAIN_SLACK: f64 = 1e-12;

/// Principal log of `1 - y`, rejecting near-zeros of the factor and counting
/// near-cut evaluations.
pub(crate) fn log_one_minus(y: Complex, near_cut: &mut usize) -> Result<Complex> {
    let w = Complex::new(1.0, 0.0) - y;
    let r = w.norm();
    if r < SINGULARITY_GUARD {
        return Err(EllqError::Singularity(format!(
            "product factor 1 - y vanishes to within {SINGULARITY_GUARD} (y = {y})"
        )));
    }
    let l = w.ln();
    if std::f64::consts::PI - l.im.abs() < BRANCH_CUT_GUARD {
        *near_cut += 1;
    }
    Ok(l)
}

fn check_unit_range(a: f64, op: &str) -> Result<()> {
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&a) {
        return Err(EllqError::Domain(format!(
            "{op} needs lattice coordinate A in [0, 1]; got A = {a} — reduce z first"
        )));
    }
    Ok(())
}

/// `log theta0(z; tau) = sum_{m>=0} [Log(1 - x^{-1} q^{m+1}) + Log(1 - x q^m)]`.
pub fn log_theta0(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<LogValue> {
    policy.validate()?;
    check_unit_range(arg.a(), "log_theta0")?;
    let x = arg.x();
    let q = hp.q();
    let x_inv = x.inv();
    let qn = q.norm();
    let mut acc = ComplexSum::new();
    let mut near_cut = 0usize;
    let mut q_pow = Complex::new(1.0, 0.0); // q^m
    let mut m = 0usize;
    loop {
        acc.add(log_one_minus(x_inv * q_pow * q, &mut near_cut)?);
        acc.add(log_one_minus(x * q_pow, &mut near_cut)?);
        m += 1;
        q_pow *= q;
        // remaining terms have |y| <= (|x| + |x^{-1} q|) |q|^m, and
        // |Log(1 - y)| <= 2 |y| once |y| <= 1/2
        let tail = 2.0 * (x.norm() + x_inv.norm() * qn) * q_pow.norm() / (1.0 - qn);
        if m >= 2 && tail < policy.target_tol / 10.0 {
            break;
        }
        if m >= policy.max_product_terms {
            return Err(EllqError::Truncation(format!(
                "log_theta0 needs more than {} terms for tolerance {}",
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

/// `log theta1(z; tau) = sum_{m>=0} [(m+1) Log(1 - x^{-1} q^{m+1}) - m Log(1 - x q^m)]`.
///
/// For `A` in `(-1, 0)` the value is `-log theta1(-z; tau)`: the two term-wise
/// sums consist of literally identical principal logs (indices shuffled), so
/// the reflection is exact.
pub fn log_theta1(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<LogValue> {
    policy.validate()?;
    let a = arg.a();
    if (-1.0 + DOMAIN_SLACK..-DOMAIN_SLACK).contains(&a) {
        let reflected = EllipticArgument::from_z(-arg.z(), hp)?;
        let lv = log_theta1(&reflected, hp, policy)?;
        return Ok(LogValue {
            value: -lv.value,
            ..lv
        });
    }
    check_unit_range(a, "log_theta1")?;
    let x = arg.x();
    let q = hp.q();
    let x_inv = x.inv();
    let qn = q.norm();
    let mut acc = ComplexSum::new();
    let mut near_cut = 0usize;
    let mut q_pow = Complex::new(1.0, 0.0);
    let mut m = 0usize;
    loop {
        let mf = m as f64;
        acc.add((mf + 1.0) * log_one_minus(x_inv * q_pow * q, &mut near_cut)?);
        if m > 0 {
            acc.add(-mf * log_one_minus(x * q_pow, &mut near_cut)?);
        }
        m += 1;
        q_pow *= q;
        let tail = 2.0 * (m as f64 + 2.0) * (x.norm() + x_inv.norm() * qn) * q_pow.norm()
            / (1.0 - qn).powi(2);
        if m >= 2 && tail < policy.target_tol / 10.0 {
            break;
        }
        if m >= policy.max_product_terms {
            return Err(EllqError::Truncation(format!(
                "log_theta1 needs more than {} terms for tolerance {}",
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

/// `log Gamma(z; tau, sigma) = sum_{m,n>=0} [Log(1 - x^{-1} q^{m+1} p^{n+1}) - Log(1 - x q^m p^n)]`.
///
/// Domain: the corner factors must satisfy `|x| <= 1` and `|x^{-1} q p| <= 1`
/// with every non-corner argument strictly inside the disk (automatic for
/// `0 < A < 1` when `sigma = tau`).
pub fn log_elliptic_gamma(
    arg: &EllipticArgument,
    hp_tau: &HalfPlanePoint,
    hp_sigma: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<LogValue> {
    policy.validate()?;
    let x = arg.x();
    let x_inv = x.inv();
    let q = hp_tau.q();
    let p = hp_sigma.q();
    let r = q.norm().max(p.norm());
    let corner_num = (x_inv * q * p).norm();
    if x.norm() > 1.0 + DOMAIN_SLACK || corner_num > 1.0 + DOMAIN_SLACK {
        return Err(EllqError::Domain(format!(
            "log_elliptic_gamma corner factors out of range: |x| = {}, |x^-1 q p| = {}",
            x.norm(),
            corner_num
        )));
    }

    let mut acc = ComplexSum::new();
    let mut near_cut = 0usize;
    let mut terms = 0usize;

    if hp_tau.tau() == hp_sigma.tau() {
        // p = q: collapse the double product along diagonals m + n = s
        let mut q_pow = Complex::new(1.0, 0.0); // q^s
        let mut s = 0usize;
        loop {
            let mult = (s + 1) as f64;
            acc.add(mult * log_one_minus(x_inv * q_pow * q * q, &mut near_cut)?);
            acc.add(-mult * log_one_minus(x * q_pow, &mut near_cut)?);
            terms += 2;
            s += 1;
            q_pow *= q;
            let tail = 2.0 * (s as f64 + 2.0) * (x.norm() + corner_num) * q_pow.norm()
                / (1.0 - q.norm()).powi(2);
            if s >= 2 && tail < policy.target_tol / 10.0 {
                break;
            }
            if s >= policy.max_product_terms {
                return Err(EllqError::Truncation(format!(
                    "log_elliptic_gamma needs more than {} diagonals",
                    policy.max_product_terms
                )));
            }
        }
    } else {
        // triangular cut m + n <= cap, ascending m then n
        let tol = policy.target_tol / 10.0;
        let scale = 2.0 * (x.norm() + corner_num) / (1.0 - r).powi(2);
        let mut cap = 4usize;
        while scale * (cap as f64 + 2.0) * r.powf(cap as f64 + 1.0) >= tol {
            cap += 1;
            if cap >= policy.max_product_terms {
                return Err(EllqError::Truncation(format!(
                    "log_elliptic_gamma needs more than {} diagonals",
                    policy.max_product_terms
                )));
            }
        }
        let mut q_pow = Complex::new(1.0, 0.0); // q^m
        for m in 0..=cap {
            let mut qp_pow = q_pow; // q^m p^n
            for _n in 0..=(cap - m) {
                acc.add(log_one_minus(x_inv * qp_pow * q * p, &mut near_cut)?);
                acc.add(-log_one_minus(x * qp_pow, &mut near_cut)?);
                terms += 2;
                qp_pow *= p;
            }
            q_pow *= q;
        }
    }

    Ok(LogValue {
        value: acc.value(),
        branch_offsets_detected: near_cut,
        terms_used: terms,
    })
}

/// The tau-involution `(z, tau) -> (z/tau, -1/tau)`; lattice coordinates map
/// as `(A, Ahat) -> (Ahat, -A)`.
pub fn tau_involution(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
) -> Result<(EllipticArgument, HalfPlanePoint)> {
    let tau = hp.tau();
    let hp_hat = HalfPlanePoint::new(-tau.inv())?;
    let arg_hat = EllipticArgument::from_z(arg.z() / tau, &hp_hat)?;
    Ok((arg_hat, hp_hat))
}

/// Residual of the classical theta transformation
///
/// ```text
/// q^{1/12} x^{-1/2} theta0(z; tau) = i e^{-pi i z zhat} qhat^{1/12} xhat^{-1/2} theta0(zhat; tauhat)
/// ```
///
/// with every fractional power defined through the underlying `z`, `tau`:
/// `q^{1/12} = exp(2 pi i tau / 12)`, `x^{-1/2} = exp(-pi i z)`.
pub fn trans1_residual(
    arg: &EllipticArgument,
    hp: &HalfPlanePoint,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let (arg_hat, hp_hat) = tau_involution(arg, hp)?;
    let lhs = (TWO_PI_I * hp.tau() / 12.0).exp()
        * (-Complex::i() * std::f64::consts::PI * arg.z()).exp()
        * log_theta0(arg, hp, policy)?.exp();
    let phase = (-Complex::i() * std::f64::consts::PI * arg.z() * arg_hat.z()).exp();
    let rhs = Complex::i()
        * phase
        * (TWO_PI_I * hp_hat.tau() / 12.0).exp()
        * (-Complex::i() * std::f64::consts::PI * arg_hat.z()).exp()
        * log_theta0(&arg_hat, &hp_hat, policy)?.exp();
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(a: f64, a_hat: f64, tau: Complex) -> (EllipticArgument, HalfPlanePoint) {
        let hp = HalfPlanePoint::new(tau).unwrap();
        let arg = EllipticArgument::from_coords(a, a_hat, &hp).unwrap();
        (arg, hp)
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn theta0_tiny_nome_limit() {
        // tau = 10i, z = 1/4: |q| ~ 2e-28 leaves only the factor 1 - x = 1 - i
        let hp = HalfPlanePoint::new(Complex::new(0.0, 10.0)).unwrap();
        let arg = EllipticArgument::from_z(Complex::new(0.25, 0.0), &hp).unwrap();
        let v = log_theta0(&arg, &hp, &pol()).unwrap().exp();
        assert!((v - Complex::new(1.0, -1.0)).norm() < 1e-15, "got {v}");
        let t1 = log_theta1(&arg, &hp, &pol()).unwrap().value;
        assert!(t1.norm() < 1e-15, "log theta1 = {t1}");
    }

    #[test]
    fn theta0_approaches_zero_at_z_eq_tau() {
        // the m = 0 factor 1 - x^{-1} q vanishes at z = tau; exactly on the
        // zero the evaluation errors, nearby it is tiny
        let hp = HalfPlanePoint::new(Complex::new(0.1, 0.8)).unwrap();
        let exact = EllipticArgument::from_z(hp.tau(), &hp).unwrap();
        assert!(matches!(
            log_theta0(&exact, &hp, &pol()),
            Err(EllqError::Singularity(_))
        ));
        let near = EllipticArgument::from_z(hp.tau() + Complex::new(1e-9, 0.0), &hp).unwrap();
        let v = log_theta0(&near, &hp, &pol()).unwrap().exp();
        assert!(v.norm() < 1e-7, "theta0 near its zero: {v}");
    }

    #[test]
    fn theta0_rejects_unreduced_argument() {
        let hp = HalfPlanePoint::new(Complex::new(0.1, 0.8)).unwrap();
        let arg = EllipticArgument::from_coords(1.4, 0.3, &hp).unwrap();
        assert!(matches!(
            log_theta0(&arg, &hp, &pol()),
            Err(EllqError::Domain(_))
        ));
    }

    #[test]
    fn theta0_parity_via_lattice_reduction() {
        // theta0(-z) = -x^{-1} theta0(z), with theta0(-z) evaluated through
        // the reduced point w = tau + 1 - z (exact factor bookkeeping:
        // theta0(w) = theta0(z) term by term, theta0(-z) = -x^{-1} theta0(w))
        let (arg, hp) = setup(0.3, 0.4, Complex::new(0.1, 0.8));
        let w = EllipticArgument::from_z(hp.tau() + 1.0 - arg.z(), &hp).unwrap();
        let theta_w = log_theta0(&w, &hp, &pol()).unwrap().exp();
        let theta_z = log_theta0(&arg, &hp, &pol()).unwrap().exp();
        let x_inv = arg.x().inv();
        let theta_neg = -x_inv * theta_w;
        let resid = (theta_neg + x_inv * theta_z).norm();
        assert!(resid < 1e-12, "parity residual {resid}");
    }

    #[test]
    fn theta1_reflection_inverts_the_product() {
        // theta1(-z) = 1/theta1(z); -z evaluated through the exact reflection
        let (arg, hp) = setup(0.3, 0.4, Complex::new(0.1, 0.8));
        let neg = EllipticArgument::from_z(-arg.z(), &hp).unwrap();
        let prod = log_theta1(&arg, &hp, &pol()).unwrap().exp()
            * log_theta1(&neg, &hp, &pol()).unwrap().exp();
        assert!((prod - 1.0).norm() < 1e-12, "got {prod}");
    }

    #[test]
    fn theta1_factorises_through_theta0_and_gamma() {
        let (arg, hp) = setup(0.3, 0.4, Complex::new(0.1, 0.8));
        let t1 = log_theta1(&arg, &hp, &pol()).unwrap().exp();
        let t0 = log_theta0(&arg, &hp, &pol()).unwrap().exp();
        let g = log_elliptic_gamma(&arg, &hp, &hp, &pol()).unwrap().exp();
        assert!((t1 - t0 * g).norm() < 1e-11 * t1.norm().max(1.0));
        // theta1(z) = Gamma(z + tau; tau, tau)
        let shifted = EllipticArgument::from_z(arg.z() + hp.tau(), &hp).unwrap();
        let g2 = log_elliptic_gamma(&shifted, &hp, &hp, &pol()).unwrap().exp();
        assert!((t1 - g2).norm() < 1e-11 * t1.norm().max(1.0));
    }

    #[test]
    fn gamma_is_symmetric_in_its_nomes() {
        let hp_tau = HalfPlanePoint::new(Complex::new(0.1, 0.8)).unwrap();
        let hp_sigma = HalfPlanePoint::new(Complex::new(-0.2, 1.1)).unwrap();
        let arg = EllipticArgument::from_coords(0.3, 0.4, &hp_tau).unwrap();
        let a = log_elliptic_gamma(&arg, &hp_tau, &hp_sigma, &pol()).unwrap().exp();
        let b = log_elliptic_gamma(&arg, &hp_sigma, &hp_tau, &pol()).unwrap().exp();
        assert!((a - b).norm() < 1e-13 * a.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn gamma_tiny_nome_limit() {
        // tau = sigma = 10i, z = 1/4: only the (0,0) denominator survives
        let hp = HalfPlanePoint::new(Complex::new(0.0, 10.0)).unwrap();
        let arg = EllipticArgument::from_z(Complex::new(0.25, 0.0), &hp).unwrap();
        let v = log_elliptic_gamma(&arg, &hp, &hp, &pol()).unwrap().exp();
        let expect = (Complex::new(1.0, 0.0) - Complex::new(0.0, 1.0)).inv();
        assert!((v - expect).norm() < 1e-14, "got {v}");
    }

    #[test]
    fn involution_basics() {
        // z = 0.2 + 0.1i, tau = i: division by i
        let hp = HalfPlanePoint::new(Complex::new(0.0, 1.0)).unwrap();
        let arg = EllipticArgument::from_z(Complex::new(0.2, 0.1), &hp).unwrap();
        let (hat, hp_hat) = tau_involution(&arg, &hp).unwrap();
        assert!((hat.z() - Complex::new(0.1, -0.2)).norm() < 1e-16);
        assert!((hp_hat.tau() - Complex::new(0.0, 1.0)).norm() < 1e-16);

        // twice the involution lands at (-z, tau)
        let (arg2, hp2) = setup(0.3, 0.4, Complex::new(0.1, 0.8));
        let (h1, hp_h1) = tau_involution(&arg2, &hp2).unwrap();
        let (h2, hp_h2) = tau_involution(&h1, &hp_h1).unwrap();
        assert!((h2.z() + arg2.z()).norm() < 1e-14);
        assert!((hp_h2.tau() - hp2.tau()).norm() < 1e-14);

        // coordinates swap with a sign: (A, Ahat) -> (Ahat, -A)
        let (arg3, hp3) = setup(0.3, -0.4, Complex::new(0.1, 0.8));
        let (h3, _) = tau_involution(&arg3, &hp3).unwrap();
        assert!((h3.a() + 0.4).abs() < 1e-14);
        assert!((h3.a_hat() + 0.3).abs() < 1e-14);
    }

    #[test]
    fn trans1_residual_small_on_sample_points() {
        for (a, ah, tau) in [
            (0.3, 0.4, Complex::new(0.1, 0.8)),
            (0.5, 0.25, Complex::new(0.0, 1.0)),
        ] {
            let (arg, hp) = setup(a, ah, tau);
            let r = trans1_residual(&arg, &hp, &pol()).unwrap();
            assert!(r < 1e-10, "trans1 residual {r} at A={a} Ahat={ah} tau={tau}");
        }
    }

    #[test]
    fn trans1_residual_large_tau_limit() {
        // tau = iT with real offset z = -Ahat: both sides dominated by leading factors
        let hp = HalfPlanePoint::new(Complex::new(0.0, 6.0)).unwrap();
        let arg = EllipticArgument::from_coords(0.35, 0.27, &hp).unwrap();
        let r = trans1_residual(&arg, &hp, &pol()).unwrap();
        assert!(r < 1e-10, "got {r}");
    }

    #[test]
    fn truncation_doubling_is_stable() {
        // halving the tail target (more terms) moves theta logs by less than target_tol
        let (arg, hp) = setup(0.12, 0.85, Complex::new(-0.3, 0.62));
        let coarse = pol();
        let fine = pol().with_tol(1e-15);
        let a = log_theta0(&arg, &hp, &coarse).unwrap().value;
        let b = log_theta0(&arg, &hp, &fine).unwrap().value;
        assert!((a - b).norm() < coarse.target_tol);
        let a = log_theta1(&arg, &hp, &coarse).unwrap().value;
        let b = log_theta1(&arg, &hp, &fine).unwrap().value;
        assert!((a - b).norm() < coarse.target_tol);
    }

    #[test]
    fn no_branch_flags_on_the_sample_region() {
        let (arg, hp) = setup(0.1, 0.9, Complex::new(0.4, 0.6));
        assert_eq!(log_theta0(&arg, &hp, &pol()).unwrap().branch_offsets_detected, 0);
        assert_eq!(log_theta1(&arg, &hp, &pol()).unwrap().branch_offsets_detected, 0);
    }
}
