//! The two constants forced on ε by its lowest Taylor coefficients, and the
//! function f(x) whose zeros at positive integers would reconcile them:
//!
//! f(x) = x(x+1) / (Γ(x+2,2x) − xΓ(x+1,2x))
//!      − 4x³(x+3) / ((x+2)(Γ(x+4,2x) − 3xΓ(x+3,2x) + 2x²Γ(x+2,2x))).
//!
//! With the recurrence Γ(a+1,b) = aΓ(a,b) + bᵃe^{−b} both denominators lose
//! their cancelling terms:
//!
//! Γ(x+2,2x) − xΓ(x+1,2x) = Γ(x+1,2x) + (2x)^{x+1}e^{−2x},
//! Γ(x+4,2x) − 3xΓ(x+3,2x) + 2x²Γ(x+2,2x) = (6−x)Γ(x+2,2x) + 3(2x)^{x+2}e^{−2x}.
//!
//! Everything is scaled by (2x)^x e^{−2x}, which makes f·(2x)^x e^{−2x} of
//! order one; f itself falls below the smallest double near x = 200, so it is
//! carried as a sign and a logarithm.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::{gamma_upper_scaled, gamma_upper_scaled_asymptotic, log_gamma_upper_int, ASYMPTOTIC_MIN_X};

/// A real number as sign · e^{ln_abs}; zero has sign 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: if v > 0.0 { 1 } else { -1 }, ln_abs: v.abs().ln() }
        }
    }

    /// The value as a double; may underflow to ±0.
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }
}

fn check_level(op: &'static str, m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain { op, reason: "m must be >= 1" });
    }
    Ok(())
}

/// ln(e^{a} − c·e^{b}) for a combination known to be positive.
fn log_diff(a: f64, c: f64, b: f64) -> f64 {
    a + (-c * (b - a).exp()).ln_1p()
}

/// ln C for C = (2m/e²)^m · m(m+1) / (Γ(m+2,2m) − mΓ(m+1,2m)).
pub fn log_c_candidate_e8(m: u32) -> Result<f64> {
    check_level("obstruction::c_candidate_e8", m)?;
    let mf = m as f64;
    let b = 2.0 * mf;
    let den = log_diff(log_gamma_upper_int(m + 1, b)?, mf, log_gamma_upper_int(m, b)?);
    Ok(mf * (b.ln() - 2.0) + (mf * (mf + 1.0)).ln() - den)
}

pub fn c_candidate_e8(m: u32) -> Result<f64> {
    Ok(log_c_candidate_e8(m)?.exp())
}

/// ln C for C = (2m/e²)^m · 4m³(m+3) / ((m+2)(Γ(m+4,2m) − 3mΓ(m+3,2m) + 2m²Γ(m+2,2m))).
pub fn log_c_candidate_e9(m: u32) -> Result<f64> {
    check_level("obstruction::c_candidate_e9", m)?;
    let mf = m as f64;
    let b = 2.0 * mf;
    let g4 = log_gamma_upper_int(m + 3, b)?;
    let g3 = log_gamma_upper_int(m + 2, b)?;
    let g2 = log_gamma_upper_int(m + 1, b)?;
    let den = g4 + (1.0 - 3.0 * mf * (g3 - g4).exp() + 2.0 * mf * mf * (g2 - g4).exp()).ln();
    Ok(mf * (b.ln() - 2.0) + (4.0 * mf.powi(3) * (mf + 3.0) / (mf + 2.0)).ln() - den)
}

pub fn c_candidate_e9(m: u32) -> Result<f64> {
    Ok(log_c_candidate_e9(m)?.exp())
}

/// Γ(x+k, 2x)·e^{2x}·(2x)^{−x}.
fn scaled_gamma(x: f64, k: f64) -> Result<f64> {
    Ok(gamma_upper_scaled(x + k, 2.0 * x)? * (2.0 * x).powf(k))
}

/// Same quantity from the large-x asymptotic series.
fn scaled_gamma_asymptotic(x: f64, k: i32) -> Result<f64> {
    Ok(gamma_upper_scaled_asymptotic(k, x)? * (2.0 * x).powi(k - 1))
}

/// Denominators below this magnitude are reported as singular.
const SINGULAR_THRESHOLD: f64 = 1e-300;

fn scaled_f_from(x: f64, g1: f64, g2: f64) -> Result<f64> {
    const OP: &str = "obstruction::f_of_x";
    let d1 = g1 + 2.0 * x;
    let d2 = (6.0 - x) * g2 + 12.0 * x * x;
    let ln_e0 = x * (2.0 * x).ln() - 2.0 * x;
    for d in [d1, d2] {
        if d == 0.0 || d.abs().ln() + ln_e0 < SINGULAR_THRESHOLD.ln() {
            return Err(Error::Singular { op: OP, reason: "denominator vanishes" });
        }
    }
    Ok(x * (x + 1.0) / d1 - 4.0 * x.powi(3) * (x + 3.0) / ((x + 2.0) * d2))
}

/// f(x)·(2x)^x·e^{−2x}, which tends to 1 as x → ∞.
pub fn f_scaled(x: f64) -> Result<f64> {
    check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    scaled_f_from(x, scaled_gamma(x, 1.0)?, scaled_gamma(x, 2.0)?)
}

/// [`f_scaled`] with the Gamma values taken from the asymptotic series;
/// needs x ≥ 30.
pub fn f_scaled_asymptotic(x: f64) -> Result<f64> {
    check_x(x)?;
    scaled_f_from(x, scaled_gamma_asymptotic(x, 1)?, scaled_gamma_asymptotic(x, 2)?)
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain { op: "obstruction::f_of_x", reason: "x must be finite and >= 0" });
    }
    Ok(())
}

/// f(x) as sign and logarithm of its magnitude.
pub fn f_log(x: f64) -> Result<SignedLog> {
    let s = f_scaled(x)?;
    if s == 0.0 {
        return Ok(SignedLog::ZERO);
    }
    let mut out = SignedLog::from_f64(s);
    out.ln_abs += 2.0 * x - x * (2.0 * x).ln();
    Ok(out)
}

/// f(x) as a double; underflows to ±0 beyond x ≈ 190.
pub fn f_of_x(x: f64) -> Result<f64> {
    Ok(f_log(x)?.value())
}

/// f(m) through the two constants: (e²/(2m))^m (C_e8(m) − C_e9(m)).
pub fn f_from_candidates(m: u32) -> Result<SignedLog> {
    let (a, b) = (log_c_candidate_e8(m)?, log_c_candidate_e9(m)?);
    let mf = m as f64;
    let scale = mf * (2.0 - (2.0 * mf).ln());
    if a == b {
        return Ok(SignedLog::ZERO);
    }
    let (hi, lo, sign) = if a > b { (a, b, 1) } else { (b, a, -1) };
    Ok(SignedLog { sign, ln_abs: scale + hi + (-(lo - hi).exp()).ln_1p() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FSample {
    pub x: f64,
    pub f: SignedLog,
}

/// An interval [a, b] with f(a)·f(b) < 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelValue {
    pub m: u32,
    pub f: SignedLog,
    /// f(m)·(2m)^m e^{−2m}.
    pub scaled: f64,
    pub log_c_e8: f64,
    pub log_c_e9: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDiagnostic {
    pub x_half: f64,
    pub f_half: SignedLog,
    pub x_max: f64,
    pub f_max: SignedLog,
    /// f·(2x)^x e^{−2x} at x_max, directly and from the asymptotic series
    /// (the latter only when x_max ≥ 30).
    pub scaled_direct: f64,
    pub scaled_asymptotic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
    pub samples: Vec<FSample>,
    /// Sample points where f could not be evaluated.
    pub failures: Vec<(f64, Error)>,
    pub sign_changes: Vec<SignChange>,
    pub levels: Vec<LevelValue>,
    pub tail: TailDiagnostic,
}

impl ObstructionReport {
    /// Levels with |f(m)| ≤ rel·max(1, |f(1)|).
    pub fn small_levels(&self, rel: f64) -> Vec<u32> {
        let ln_ref = f_log(1.0).map(|v| v.ln_abs.max(0.0)).unwrap_or(0.0);
        self.levels
            .iter()
            .filter(|l| l.f.sign == 0 || l.f.ln_abs <= ln_ref + rel.ln())
            .map(|l| l.m)
            .collect()
    }

    /// Levels where the scaled value f(m)·(2m)^m e^{−2m} is at most `rel`
    /// times its value at m = 1. Unlike f(m) itself, which decays like
    /// (e²/2m)^m, the scaled value tends to 1.
    pub fn vanishing_levels(&self, rel: f64) -> Vec<u32> {
        let reference = f_scaled(1.0).map(f64::abs).unwrap_or(1.0);
        self.levels.iter().filter(|l| l.scaled.abs() <= rel * reference).map(|l| l.m).collect()
    }
}

/// Sample points x_min + i·step up to x_max (inclusive, with the last point
/// pinned to x_max).
pub fn scan_grid(x_min: f64, x_max: f64, step: f64) -> Result<Vec<f64>> {
    const OP: &str = "obstruction::scan_f";
    if !(x_min >= 0.0 && x_min < x_max && x_max.is_finite()) {
        return Err(Error::Domain { op: OP, reason: "need 0 <= x_min < x_max" });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidStep { op: OP });
    }
    let n = ((x_max - x_min) / step - 1e-9).ceil() as usize;
    let mut xs: Vec<f64> = (0..n).map(|i| x_min + i as f64 * step).collect();
    xs.push(x_max);
    Ok(xs)
}

/// Shrink a sign-change bracket to width ≤ `tol`.
pub fn refine_bracket(mut a: f64, mut b: f64, sign_a: i8, tol: f64) -> Result<SignChange> {
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let s = f_log(mid)?.sign;
        if s == 0 {
            return Ok(SignChange { a: mid, b: mid });
        }
        if s == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(SignChange { a, b })
}

pub const BRACKET_TOL: f64 = 1e-10;

/// Assemble a report from evaluated samples in any order.
pub fn assemble_report(
    x_min: f64,
    x_max: f64,
    step: f64,
    mut evaluated: Vec<(f64, Result<SignedLog>)>,
) -> Result<ObstructionReport> {
    evaluated.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut samples = Vec::with_capacity(evaluated.len());
    let mut failures = Vec::new();
    for (x, r) in evaluated {
        match r {
            Ok(f) => samples.push(FSample { x, f }),
            Err(e) => failures.push((x, e)),
        }
    }

    let mut sign_changes = Vec::new();
    let mut last: Option<FSample> = None;
    for s in &samples {
        if s.f.sign == 0 {
            continue;
        }
        if let Some(p) = last {
            if p.f.sign != s.f.sign {
                sign_changes.push(refine_bracket(p.x, s.x, p.f.sign, BRACKET_TOL)?);
            }
        }
        last = Some(*s);
    }

    let first = (x_min.ceil() as u32).max(1);
    let levels = (first..=x_max.floor() as u32)
        .map(|m| {
            let x = m as f64;
            Ok(LevelValue {
                m,
                f: f_log(x)?,
                scaled: f_scaled(x)?,
                log_c_e8: log_c_candidate_e8(m)?,
                log_c_e9: log_c_candidate_e9(m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let x_half = 0.5 * x_max;
    let tail = TailDiagnostic {
        x_half,
        f_half: f_log(x_half)?,
        x_max,
        f_max: f_log(x_max)?,
        scaled_direct: f_scaled(x_max)?,
        scaled_asymptotic: if x_max >= ASYMPTOTIC_MIN_X { Some(f_scaled_asymptotic(x_max)?) } else { None },
    };
    Ok(ObstructionReport { x_min, x_max, step, samples, failures, sign_changes, levels, tail })
}

/// Sample f on [x_min, x_max] with spacing `step`, locate sign changes, and
/// evaluate f and both constants at every integer level in range.
pub fn scan_f(x_min: f64, x_max: f64, step: f64) -> Result<ObstructionReport> {
    let xs = scan_grid(x_min, x_max, step)?;
    let evaluated = xs.into_iter().map(|x| (x, f_log(x))).collect();
    assemble_report(x_min, x_max, step, evaluated)
}
