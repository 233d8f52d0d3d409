//! CLI support: complex-literal parsing and the point-evaluation registry
//! behind `ellq eval`.

use crate::epolylog::{elliptic_d, elliptic_dab_series, elliptic_j};
use crate::error::{EllqError, Result};
use crate::lattice::{eisenstein_e, lattice_dab, logqk_lattice, theorem3_f_lattice};
use crate::qk::{lemma3_rhs, log_abs_qk, log_qk, period_f, t_function, theorem1_components, PeriodVariant};
use crate::scalar::{bernoulli_poly, bloch_wigner, companion_j, polylog, zagier_dab};
use crate::theta::{log_elliptic_gamma, log_theta0, log_theta1, tau_involution, trans1_residual};
use crate::types::{
    EllipticArgument, HalfPlanePoint, TruncationPolicy, WeightPair,
};
use crate::Complex;

/// Parse a complex literal: `1.5`, `i`, `-i`, `2i`, `0.1+0.8i`, `1e-3-2.5i`.
///
/// Whitespace is not allowed; the imaginary unit is a trailing `i` (or `j`).
pub fn parse_complex(s: &str) -> Result<Complex> {
    let t = s.trim();
    if t.is_empty() {
        return Err(EllqError::Domain("empty complex literal".into()));
    }
    // split at the sign that separates real and imaginary parts (not a
    // leading sign, not an exponent sign)
    let bytes = t.as_bytes();
    let mut split = None;
    for (i, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
        }
    }
    let parse_imag_part = |p: &str| -> Result<f64> {
        let body = &p[..p.len() - 1];
        match body {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => body
                .parse::<f64>()
                .map_err(|_| EllqError::Domain(format!("bad imaginary part '{p}'"))),
        }
    };
    let value = match split {
        Some(i) if t.ends_with('i') || t.ends_with('j') => {
            let re: f64 = t[..i]
                .parse()
                .map_err(|_| EllqError::Domain(format!("bad real part in '{t}'")))?;
            Complex::new(re, parse_imag_part(&t[i..])?)
        }
        Some(_) | None if t.ends_with('i') || t.ends_with('j') => {
            Complex::new(0.0, parse_imag_part(t)?)
        }
        _ => Complex::new(
            t.parse()
                .map_err(|_| EllqError::Domain(format!("bad real literal '{t}'")))?,
            0.0,
        ),
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(EllqError::Domain(format!("non-finite complex literal '{t}'")));
    }
    Ok(value)
}

/// Parameters collected from the `eval` command line.
#[derive(Debug, Clone, Default)]
pub struct EvalParams {
    pub a: Option<f64>,
    pub a_hat: Option<f64>,
    pub z: Option<Complex>,
    pub tau: Option<Complex>,
    pub sigma: Option<Complex>,
    pub x: Option<Complex>,
    pub t: Option<f64>,
    pub k: Option<u32>,
    pub weight_a: Option<u32>,
    pub weight_b: Option<u32>,
    pub ell: Option<u32>,
    pub variant: Option<String>,
    pub radius: Option<usize>,
}

/// Registered function names for `ellq eval`.
pub const EVAL_FUNCTIONS: &[&str] = &[
    "bernoulli",
    "polylog",
    "bloch-wigner",
    "companion-j",
    "zagier-dab",
    "theta0",
    "theta1",
    "elliptic-gamma",
    "trans1",
    "tau-involution",
    "lattice-coords",
    "log-qk",
    "log-abs-qk",
    "t-function",
    "lemma3-rhs",
    "theorem1-components",
    "period-f",
    "elliptic-d",
    "elliptic-j",
    "elliptic-dab",
    "eisenstein",
    "lattice-dab",
    "theorem3-lattice",
    "logqk-lattice",
];

fn need<T: Copy>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| EllqError::Domain(format!("missing required parameter {what}")))
}

fn geometry(p: &EvalParams) -> Result<(EllipticArgument, HalfPlanePoint)> {
    let tau = need(p.tau, "--tau")?;
    let hp = HalfPlanePoint::new(tau)?;
    let arg = if let Some(z) = p.z {
        EllipticArgument::from_z(z, &hp)?
    } else {
        EllipticArgument::from_coords(need(p.a, "--A (or --z)")?, need(p.a_hat, "--Ahat")?, &hp)?
    };
    Ok((arg, hp))
}

fn fmt_c(v: Complex) -> String {
    format!("{} {:+}i", v.re, v.im)
}

/// Evaluate one registered function; returns printable lines
/// (value first, truncation metadata after).
pub fn eval_function(
    name: &str,
    p: &EvalParams,
    policy: &TruncationPolicy,
) -> Result<Vec<String>> {
    let policy = match p.radius {
        Some(r) => policy.with_radius(r),
        None => *policy,
    };
    let lines = match name {
        "bernoulli" => {
            let v = bernoulli_poly(need(p.k, "--k")?, need(p.t, "--t")?)?;
            vec![format!("value: {v}")]
        }
        "polylog" => {
            let v = polylog(need(p.ell, "--l")?, need(p.x, "--x")?)?;
            vec![format!("value: {}", fmt_c(v))]
        }
        "bloch-wigner" => {
            let v = bloch_wigner(need(p.x, "--x")?)?;
            vec![format!("value: {v}")]
        }
        "companion-j" => {
            let v = companion_j(need(p.x, "--x")?)?;
            vec![format!("value: {v}")]
        }
        "zagier-dab" => {
            let w = WeightPair::new(need(p.weight_a, "--a")?, need(p.weight_b, "--b")?)?;
            let v = zagier_dab(w, need(p.x, "--x")?)?;
            vec![format!("value: {}", fmt_c(v))]
        }
        "theta0" | "theta1" => {
            let (arg, hp) = geometry(p)?;
            let lv = if name == "theta0" {
                log_theta0(&arg, &hp, &policy)?
            } else {
                log_theta1(&arg, &hp, &policy)?
            };
            vec![
                format!("log value: {}", fmt_c(lv.value)),
                format!("product value: {}", fmt_c(lv.exp())),
                format!("terms_used: {}", lv.terms_used),
                format!("branch_offsets_detected: {}", lv.branch_offsets_detected),
            ]
        }
        "elliptic-gamma" => {
            let (arg, hp) = geometry(p)?;
            let hp_sigma = match p.sigma {
                Some(s) => HalfPlanePoint::new(s)?,
                None => hp,
            };
            let lv = log_elliptic_gamma(&arg, &hp, &hp_sigma, &policy)?;
            vec![
                format!("log value: {}", fmt_c(lv.value)),
                format!("product value: {}", fmt_c(lv.exp())),
                format!("terms_used: {}", lv.terms_used),
            ]
        }
        "trans1" => {
            let (arg, hp) = geometry(p)?;
            let r = trans1_residual(&arg, &hp, &policy)?;
            vec![format!("residual: {r:e}")]
        }
        "tau-involution" => {
            let (arg, hp) = geometry(p)?;
            let (hat, hp_hat) = tau_involution(&arg, &hp)?;
            vec![
                format!("zhat: {}", fmt_c(hat.z())),
                format!("tauhat: {}", fmt_c(hp_hat.tau())),
                format!("coords: A = {}, Ahat = {}", hat.a(), hat.a_hat()),
            ]
        }
        "lattice-coords" => {
            let (arg, _) = geometry(p)?;
            vec![format!("A = {}, Ahat = {}", arg.a(), arg.a_hat())]
        }
        "log-qk" => {
            let (arg, hp) = geometry(p)?;
            let lv = log_qk(need(p.k, "--k")?, &arg, &hp, &policy)?;
            vec![
                format!("log value: {}", fmt_c(lv.value)),
                format!("terms_used: {}", lv.terms_used),
                format!("branch_offsets_detected: {}", lv.branch_offsets_detected),
            ]
        }
        "log-abs-qk" => {
            let (arg, hp) = geometry(p)?;
            let v = log_abs_qk(need(p.k, "--k")?, &arg, &hp, &policy)?;
            vec![format!("value: {v}")]
        }
        "t-function" => {
            let (arg, hp) = geometry(p)?;
            vec![format!("value: {}", fmt_c(t_function(&arg, &hp, &policy)?))]
        }
        "lemma3-rhs" => {
            let (arg, hp) = geometry(p)?;
            vec![format!("value: {}", fmt_c(lemma3_rhs(&arg, &hp, &policy)?))]
        }
        "theorem1-components" => {
            let (arg, hp) = geometry(p)?;
            let (s, l, u) = theorem1_components(&arg, &hp, &policy)?;
            vec![
                format!("S: {}", fmt_c(s)),
                format!("L: {}", fmt_c(l)),
                format!("U: {}", fmt_c(u)),
            ]
        }
        "period-f" => {
            let (arg, hp) = geometry(p)?;
            let variant = match p.variant.as_deref().unwrap_or("mean") {
                "plus" => PeriodVariant::Plus,
                "minus" => PeriodVariant::Minus,
                "mean" => PeriodVariant::Mean,
                other => {
                    return Err(EllqError::Domain(format!(
                        "unknown variant '{other}' (plus|minus|mean)"
                    )))
                }
            };
            let v = period_f(need(p.k, "--k")?, variant, &arg, &hp, &policy)?;
            vec![format!("value: {}", fmt_c(v.value))]
        }
        "elliptic-d" | "elliptic-j" => {
            let (arg, hp) = geometry(p)?;
            let v = if name == "elliptic-d" {
                elliptic_d(&arg, &hp, &policy)?
            } else {
                elliptic_j(&arg, &hp, &policy)?
            };
            vec![
                format!("value: {}", v.value.re),
                format!("terms_used: {}", v.terms_used),
                format!("tail_bound: {:e}", v.tail_bound),
            ]
        }
        "elliptic-dab" => {
            let (arg, hp) = geometry(p)?;
            let w = WeightPair::new(need(p.weight_a, "--a")?, need(p.weight_b, "--b")?)?;
            let v = elliptic_dab_series(w, &arg, &hp, &policy)?;
            vec![
                format!("value: {}", fmt_c(v.value)),
                format!("terms_used: {}", v.terms_used),
                format!("tail_bound: {:e}", v.tail_bound),
            ]
        }
        "eisenstein" | "lattice-dab" | "theorem3-lattice" | "logqk-lattice" => {
            let (arg, hp) = geometry(p)?;
            let coords = arg.coords();
            let r = policy.lattice_radius;
            let res = match name {
                "eisenstein" => eisenstein_e(need(p.k, "--k")?, coords, &hp, r)?,
                "lattice-dab" => lattice_dab(
                    WeightPair::new(need(p.weight_a, "--a")?, need(p.weight_b, "--b")?)?,
                    coords,
                    &hp,
                    r,
                )?,
                "theorem3-lattice" => theorem3_f_lattice(coords, &hp, r)?,
                _ => logqk_lattice(
                    need(p.k, "--k")?,
                    coords,
                    &hp,
                    r,
                    policy.zero_row_convention,
                )?,
            };
            vec![
                format!("value: {}", fmt_c(res.value)),
                format!("raw: {}", fmt_c(res.raw)),
                format!("radius_used: {}", res.radius_used),
                format!("tail_estimate: {:e}", res.tail_estimate),
            ]
        }
        other => {
            return Err(EllqError::Unknown(format!(
                "function '{other}'; known: {}",
                EVAL_FUNCTIONS.join(", ")
            )))
        }
    };
    Ok(lines)
}
