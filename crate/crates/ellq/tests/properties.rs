//! Property tests: the complex-literal parser is total and round-trips, the
//! term-wise product logs agree with direct product evaluation, and the
//! ln|Q_k| reduction is lattice-invariant.

use ellq::cli::parse_complex;
use ellq::qk::log_abs_qk;
use ellq::scalar::bloch_wigner;
use ellq::theta::{log_theta0, log_theta1};
use ellq::types::{EllipticArgument, HalfPlanePoint, TruncationPolicy};
use ellq::Complex;
use proptest::prelude::*;

fn admissible() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (
        0.08f64..0.92,
        0.08f64..0.92,
        -0.4f64..0.4,
        0.55f64..1.45,
    )
}

/// Direct product evaluation (no logarithms): the independent oracle for the
/// term-wise log sums.
fn theta0_direct(z: Complex, tau: Complex) -> Complex {
    let x = (ellq::TWO_PI_I * z).exp();
    let q = (ellq::TWO_PI_I * tau).exp();
    let mut acc = Complex::new(1.0, 0.0);
    let mut q_pow = Complex::new(1.0, 0.0);
    for _ in 0..200 {
        acc *= (Complex::new(1.0, 0.0) - q_pow * q / x) * (Complex::new(1.0, 0.0) - x * q_pow);
        q_pow *= q;
        if q_pow.norm() < 1e-18 {
            break;
        }
    }
    acc
}

fn theta1_direct(z: Complex, tau: Complex) -> Complex {
    let x = (ellq::TWO_PI_I * z).exp();
    let q = (ellq::TWO_PI_I * tau).exp();
    let mut acc = Complex::new(1.0, 0.0);
    let mut q_pow = Complex::new(1.0, 0.0);
    for m in 0..220u32 {
        let num = Complex::new(1.0, 0.0) - q_pow * q / x;
        let den = Complex::new(1.0, 0.0) - x * q_pow;
        acc *= num.powu(m + 1) / den.powu(m);
        q_pow *= q;
        if q_pow.norm() * (m as f64 + 3.0) < 1e-18 {
            break;
        }
    }
    acc
}

proptest! {
    #[test]
    fn complex_literals_round_trip(re in -1e9f64..1e9, im in -1e9f64..1e9) {
        let s = format!("{re}{im:+}i");
        let v = parse_complex(&s).unwrap();
        prop_assert_eq!(v, Complex::new(re, im));
        let plain = format!("{re}");
        prop_assert_eq!(parse_complex(&plain).unwrap(), Complex::new(re, 0.0));
    }

    #[test]
    fn complex_parser_is_total(s in "\\PC{0,24}") {
        // never panics, regardless of input
        let _ = parse_complex(&s);
    }

    #[test]
    fn theta_logs_match_direct_products(
        (a, a_hat, tau_re, tau_im) in admissible()
    ) {
        let hp = HalfPlanePoint::new(Complex::new(tau_re, tau_im)).unwrap();
        let arg = EllipticArgument::from_coords(a, a_hat, &hp).unwrap();
        let policy = TruncationPolicy::default();
        let t0 = log_theta0(&arg, &hp, &policy).unwrap().exp();
        let direct0 = theta0_direct(arg.z(), hp.tau());
        prop_assert!((t0 - direct0).norm() <= 1e-13 * direct0.norm().max(1.0),
            "theta0 {} vs direct {}", t0, direct0);
        let t1 = log_theta1(&arg, &hp, &policy).unwrap().exp();
        let direct1 = theta1_direct(arg.z(), hp.tau());
        prop_assert!((t1 - direct1).norm() <= 1e-12 * direct1.norm().max(1.0),
            "theta1 {} vs direct {}", t1, direct1);
    }

    #[test]
    fn log_abs_qk_is_invariant_under_lattice_shifts(
        (a, a_hat, tau_re, tau_im) in admissible(),
        m in -2i32..=2,
        n in -2i32..=2,
        k in 1u32..=3,
    ) {
        let hp = HalfPlanePoint::new(Complex::new(tau_re, tau_im)).unwrap();
        let arg = EllipticArgument::from_coords(a, a_hat, &hp).unwrap();
        let policy = TruncationPolicy::default();
        let base = log_abs_qk(k, &arg, &hp, &policy).unwrap();
        let shifted = EllipticArgument::from_z(
            arg.z() + hp.tau() * m as f64 + n as f64,
            &hp,
        ).unwrap();
        let moved = log_abs_qk(k, &shifted, &hp, &policy).unwrap();
        prop_assert!((moved - base).abs() <= 1e-10 * (1.0 + base.abs()),
            "k={} shift=({}, {}): {} vs {}", k, m, n, moved, base);
    }

    #[test]
    fn bloch_wigner_symmetries(re in -0.95f64..0.95, im in -0.95f64..0.95) {
        prop_assume!(im != 0.0);
        let x = Complex::new(re, im);
        prop_assume!(x.norm() > 0.05 && x.norm() < 0.95);
        let d = bloch_wigner(x).unwrap();
        prop_assert!((bloch_wigner(x.conj()).unwrap() + d).abs() < 1e-13);
        prop_assert!((bloch_wigner(x.inv()).unwrap() + d).abs() < 1e-12);
    }
}
