//! The Rawnsley function of h_m, summed over the monomial orthonormal basis:
//!
//! ε_m(x, y) = w_m(x + y) · Σ_{j+k≥m} xʲ yᵏ / ‖z₁ʲz₂ᵏ‖²,  x = |z₁|², y = |z₂|².
//!
//! Terms are grouped by total degree. The sum stops once the degree terms have
//! passed their maximum and decayed geometrically for several degrees; the
//! remainder is bounded by the geometric series through the last ratio.

use alloc::vec::Vec;
use core::cell::RefCell;


#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{levi_form_fd, Hermitian2, HermitianWeight, PointC2};
use crate::moments::MonomialNormTable;

/// Consecutive decaying degrees required before the tail is bounded.
pub const TAIL_RUN: usize = 5;
/// Largest degree-to-degree ratio accepted as decaying.
pub const TAIL_RATIO: f64 = 0.5;
/// Extra degrees allowed above m when no budget is given.
pub const DEFAULT_DEGREE_MARGIN: u32 = 200;
pub const DEFAULT_TOL: f64 = 1e-12;

pub fn default_dmax(m: u32) -> u32 {
    m + DEFAULT_DEGREE_MARGIN
}

/// One evaluation of ε. `tail_estimate` bounds the neglected degrees relative
/// to the partial sum; `degree` is the last total degree included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonValue {
    pub epsilon: f64,
    pub tail_estimate: f64,
    pub degree: u32,
}

fn check_point(op: &'static str, x: f64, y: f64) -> Result<()> {
    if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain { op, reason: "x, y must be finite and >= 0" });
    }
    if x == 0.0 && y == 0.0 {
        return Err(Error::Domain { op, reason: "(x, y) = (0, 0) lies on the exceptional divisor" });
    }
    Ok(())
}

/// n·ln v with 0⁰ = 1.
fn ln_pow(ln_v: f64, n: u32) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * ln_v
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// ln Σ_{j+k=d} xʲyᵏ/N_{j,k} from one table row.
fn log_degree_term(table: &MonomialNormTable, d: u32, ln_x: f64, ln_y: f64) -> f64 {
    let row = table.row(d).expect("degree inside table");
    log_sum_exp(row.iter().map(|e| {
        let l = ln_pow(ln_x, e.j) + ln_pow(ln_y, e.k);
        if l == f64::NEG_INFINITY {
            l
        } else {
            l - e.log_norm
        }
    }))
}

enum Scan {
    Done { log_sum: f64, tail: f64, degree: u32 },
    Exhausted,
}

fn scan_degrees(table: &MonomialNormTable, ln_x: f64, ln_y: f64, tol: f64) -> Scan {
    let m = table.level();
    let mut log_sum = f64::NEG_INFINITY;
    let mut peak = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    let mut run = 0usize;
    let mut worst_ratio = 0.0f64;
    for d in m..=table.max_degree() {
        let l = log_degree_term(table, d, ln_x, ln_y);
        log_sum = log_sum_exp([log_sum, l].into_iter());
        if l > peak {
            peak = l;
            run = 0;
            worst_ratio = 0.0;
        } else {
            let ratio = (l - prev).exp();
            if ratio < TAIL_RATIO {
                run += 1;
                worst_ratio = worst_ratio.max(ratio);
            } else {
                run = 0;
                worst_ratio = 0.0;
            }
        }
        prev = l;
        if run >= TAIL_RUN {
            let tail = (l - log_sum).exp() * worst_ratio / (1.0 - worst_ratio);
            if tail < tol {
                return Scan::Done { log_sum, tail, degree: d };
            }
        }
    }
    Scan::Exhausted
}

fn finish(table: &MonomialNormTable, x: f64, y: f64, log_sum: f64, tail: f64, degree: u32) -> EpsilonValue {
    let w = HermitianWeight::new(table.level()).expect("table level is >= 1");
    let epsilon = (w.log_radial(x + y) + log_sum).exp();
    EpsilonValue { epsilon, tail_estimate: tail, degree }
}

/// ε at (x, y) using only degrees already in `table`. Safe to call from many
/// threads at once; fails with a non-convergence error when the table ends
/// before the tail is certified.
pub fn epsilon_eval_in(table: &MonomialNormTable, x: f64, y: f64, tol: f64) -> Result<EpsilonValue> {
    const OP: &str = "epsilon::epsilon_eval";
    check_point(OP, x, y)?;
    check_tol(OP, tol)?;
    match scan_degrees(table, x.ln(), y.ln(), tol) {
        Scan::Done { log_sum, tail, degree } => Ok(finish(table, x, y, log_sum, tail, degree)),
        Scan::Exhausted => Err(Error::NonConvergence {
            op: OP,
            reason: "tail not certified within the degree budget",
        }),
    }
}

fn check_tol(op: &'static str, tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain { op, reason: "tol must lie in (0, 1)" });
    }
    Ok(())
}

/// ε at a point of C² \ {0}; only the moduli |z₁|², |z₂|² enter.
pub fn epsilon_at_point(table: &MonomialNormTable, p: &PointC2, tol: f64) -> Result<EpsilonValue> {
    epsilon_eval_in(table, p.z1().norm_sqr(), p.z2().norm_sqr(), tol)
}

/// ε_m at (x, y), growing `table` as needed up to total degree `dmax`.
pub fn epsilon_eval(
    m: u32,
    x: f64,
    y: f64,
    tol: f64,
    dmax: u32,
    table: &mut MonomialNormTable,
) -> Result<EpsilonValue> {
    const OP: &str = "epsilon::epsilon_eval";
    if table.level() != m {
        return Err(Error::Domain { op: OP, reason: "norm table level differs from m" });
    }
    if dmax < m {
        return Err(Error::Domain { op: OP, reason: "dmax must be >= m" });
    }
    check_point(OP, x, y)?;
    check_tol(OP, tol)?;
    if table.is_empty() {
        table.extend_to((m + 16).min(dmax))?;
    }
    loop {
        if let Scan::Done { log_sum, tail, degree } = scan_degrees(table, x.ln(), y.ln(), tol) {
            return Ok(finish(table, x, y, log_sum, tail, degree));
        }
        if table.max_degree() >= dmax {
            return Err(Error::NonConvergence {
                op: OP,
                reason: "tail not certified within the degree budget",
            });
        }
        let next = dmax.min(table.max_degree() + 2 * (table.max_degree() - m + 1));
        table.extend_to(next)?;
    }
}

/// ε truncated at a fixed total degree, in logarithmic form.
pub fn log_epsilon_truncated(table: &MonomialNormTable, x: f64, y: f64, degree: u32) -> Result<f64> {
    const OP: &str = "epsilon::epsilon_eval";
    check_point(OP, x, y)?;
    if degree > table.max_degree() || degree < table.level() {
        return Err(Error::Domain { op: OP, reason: "truncation degree outside the table" });
    }
    let (ln_x, ln_y) = (x.ln(), y.ln());
    let log_sum = log_sum_exp((table.level()..=degree).map(|d| log_degree_term(table, d, ln_x, ln_y)));
    let w = HermitianWeight::new(table.level())?;
    Ok(w.log_radial(x + y) + log_sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSample {
    pub x: f64,
    pub y: f64,
    pub epsilon: f64,
    pub tail_estimate: f64,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonProfile {
    pub m: u32,
    pub samples: Vec<EpsilonSample>,
}

impl EpsilonProfile {
    /// Collect samples; the order of `values` must follow `points`.
    pub fn from_values(m: u32, points: &[(f64, f64)], values: &[EpsilonValue]) -> Self {
        let samples = points
            .iter()
            .zip(values)
            .map(|(&(x, y), v)| EpsilonSample {
                x,
                y,
                epsilon: v.epsilon,
                tail_estimate: v.tail_estimate,
                degree: v.degree,
            })
            .collect();
        EpsilonProfile { m, samples }
    }
}

/// Sequential profile over a list of points.
pub fn epsilon_profile(
    m: u32,
    points: &[(f64, f64)],
    tol: f64,
    dmax: u32,
    table: &mut MonomialNormTable,
) -> Result<EpsilonProfile> {
    let values = points
        .iter()
        .map(|&(x, y)| epsilon_eval(m, x, y, tol, dmax, table))
        .collect::<Result<Vec<_>>>()?;
    Ok(EpsilonProfile::from_values(m, points, &values))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceReport {
    pub m: u32,
    pub min: f64,
    pub max: f64,
    pub relative_variation: f64,
    pub max_tail_estimate: f64,
}

impl BalanceReport {
    pub fn from_profile(profile: &EpsilonProfile) -> Result<Self> {
        if profile.samples.is_empty() {
            return Err(Error::Domain { op: "epsilon::balanced_test", reason: "grid is empty" });
        }
        let eps = profile.samples.iter().map(|s| s.epsilon);
        let min = eps.clone().fold(f64::INFINITY, f64::min);
        let max = eps.fold(f64::NEG_INFINITY, f64::max);
        let max_tail_estimate = profile.samples.iter().map(|s| s.tail_estimate).fold(0.0, f64::max);
        Ok(BalanceReport { m: profile.m, min, max, relative_variation: (max - min) / min, max_tail_estimate })
    }

    /// Whether ε is constant up to ten times the truncation error.
    pub fn passes(&self) -> bool {
        self.relative_variation <= 10.0 * self.max_tail_estimate
    }
}

/// Variation of ε_m over `grid`, with the default degree budget.
pub fn balanced_test(m: u32, grid: &[(f64, f64)], tol: f64) -> Result<BalanceReport> {
    if grid.is_empty() {
        return Err(Error::Domain { op: "epsilon::balanced_test", reason: "grid is empty" });
    }
    let mut table = MonomialNormTable::empty(m)?;
    let profile = epsilon_profile(m, grid, tol, default_dmax(m), &mut table)?;
    BalanceReport::from_profile(&profile)
}

/// Anything that yields ln ε at (|z₁|², |z₂|²).
pub trait EpsilonField {
    fn log_epsilon(&self, x: f64, y: f64) -> Result<f64>;
}

/// A field with ε identically equal to a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEpsilon(pub f64);

impl EpsilonField for ConstantEpsilon {
    fn log_epsilon(&self, _x: f64, _y: f64) -> Result<f64> {
        Ok(self.0.ln())
    }
}

/// ε_m truncated at a fixed degree, so that nearby evaluations share the
/// same set of terms.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedEpsilon<'a> {
    pub table: &'a MonomialNormTable,
    pub degree: u32,
}

impl EpsilonField for TruncatedEpsilon<'_> {
    fn log_epsilon(&self, x: f64, y: f64) -> Result<f64> {
        log_epsilon_truncated(self.table, x, y, self.degree)
    }
}

/// ∂_i∂̄_j ln ε at the point (√x, √y) by central differences with step `h`.
pub fn discrepancy_form_of<E: EpsilonField>(field: &E, x: f64, y: f64, h: f64) -> Result<Hermitian2> {
    const OP: &str = "epsilon::discrepancy_form";
    check_point(OP, x, y)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidStep { op: OP });
    }
    let u = [x.sqrt(), 0.0, y.sqrt(), 0.0];
    let failure = RefCell::new(None);
    let form = levi_form_fd(
        |v| {
            let a = v[0] * v[0] + v[1] * v[1];
            let b = v[2] * v[2] + v[3] * v[3];
            match field.log_epsilon(a, b) {
                Ok(l) => l,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        u,
        h,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    form
}

/// ∂_i∂̄_j ln ε_m at (√x, √y), without the 1/2π normalization.
pub fn discrepancy_form(m: u32, x: f64, y: f64, h: f64) -> Result<Hermitian2> {
    const OP: &str = "epsilon::discrepancy_form";
    check_point(OP, x, y)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidStep { op: OP });
    }
    let mut table = MonomialNormTable::empty(m)?;
    let (xs, ys) = ((x.sqrt() + 2.0 * h).powi(2), (y.sqrt() + 2.0 * h).powi(2));
    let reach = epsilon_eval(m, xs, ys, 1e-16, default_dmax(m), &mut table)?;
    let degree = (reach.degree + 8).min(default_dmax(m));
    table.extend_to(degree)?;
    discrepancy_form_of(&TruncatedEpsilon { table: &table, degree }, x, y, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{build_table, log_radial_integral};

    fn eval(m: u32, x: f64, y: f64) -> EpsilonValue {
        let mut table = MonomialNormTable::empty(m).unwrap();
        epsilon_eval(m, x, y, DEFAULT_TOL, default_dmax(m), &mut table).unwrap()
    }

    #[test]
    fn axis_limit_at_m1() {
        let v = eval(1, 1e-5, 0.0);
        assert!((v.epsilon - 4.0 / 7.0).abs() < 1e-4);
        assert!(v.tail_estimate < DEFAULT_TOL);
    }

    #[test]
    fn degree_sums_collapse_to_radial_moments() {
        // Σ_{j+k=d} xʲyᵏ/N = (d + 1)(x + y)ᵈ / (2 I_d)
        let (m, x, y) = (2, 0.7, 1.3);
        let v = eval(m, x, y);
        let t: f64 = x + y;
        let mut sum = 0.0;
        for d in m..=v.degree {
            let p = 2 * (d - m) + 3;
            sum += (d as f64 + 1.0) * t.powi(d as i32) / (2.0 * log_radial_integral(p, m).unwrap().exp());
        }
        let w = HermitianWeight::new(m).unwrap().log_radial(t).exp();
        assert!((w * sum / v.epsilon - 1.0).abs() < 1e-11);
    }

    #[test]
    fn positive_and_symmetric() {
        for m in 1..=4 {
            let a = eval(m, 1.0, 1.0);
            assert!(a.epsilon > 0.0);
            let b = eval(m, 0.3, 2.1);
            let c = eval(m, 2.1, 0.3);
            assert!((b.epsilon / c.epsilon - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_is_rejected() {
        let mut table = MonomialNormTable::empty(1).unwrap();
        let r = epsilon_eval(1, 0.0, 0.0, 1e-12, 201, &mut table);
        assert!(matches!(r, Err(Error::Domain { .. })));
        assert!(epsilon_eval(2, 1.0, 0.0, 1e-12, 201, &mut table).is_err());
    }

    #[test]
    fn budget_exhaustion_is_non_convergence() {
        let mut table = MonomialNormTable::empty(1).unwrap();
        let r = epsilon_eval(1, 50.0, 0.0, 1e-12, 10, &mut table);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
        assert!(r.unwrap_err().is_numerical());
    }

    #[test]
    fn truncation_error_within_estimate() {
        let mut table = MonomialNormTable::empty(3).unwrap();
        let v = epsilon_eval(3, 2.5, 0.5, 1e-8, 203, &mut table).unwrap();
        table.extend_to(203).unwrap();
        let full = log_epsilon_truncated(&table, 2.5, 0.5, 203).unwrap().exp();
        assert!((full - v.epsilon).abs() / v.epsilon <= v.tail_estimate);
    }

    #[test]
    fn read_only_evaluation_matches() {
        let table = build_table(2, 80).unwrap();
        let a = epsilon_eval_in(&table, 1.5, 0.5, 1e-12).unwrap();
        assert_eq!(a, eval(2, 1.5, 0.5));
        let short = build_table(2, 4).unwrap();
        assert!(epsilon_eval_in(&short, 1.5, 0.5, 1e-12).is_err());
    }

    #[test]
    fn balanced_verdicts() {
        let grid: Vec<(f64, f64)> = (0..100).map(|i| (0.01 + 3.99 * i as f64 / 99.0, 0.0)).collect();
        let r = balanced_test(1, &grid, DEFAULT_TOL).unwrap();
        assert!(r.relative_variation > 100.0 * r.max_tail_estimate);
        assert!(!r.passes());
        let single = balanced_test(1, &[(1.0, 0.0)], DEFAULT_TOL).unwrap();
        assert_eq!(single.relative_variation, 0.0);
        assert!(balanced_test(1, &[], DEFAULT_TOL).is_err());
    }

    #[test]
    fn constant_field_has_zero_form() {
        let form = discrepancy_form_of(&ConstantEpsilon(0.8), 1.0, 0.5, 1e-3).unwrap();
        assert!(form.max_abs_entry() < 1e-8);
    }

    #[test]
    fn discrepancy_at_m1() {
        let form = discrepancy_form(1, 1.0, 0.0, 1e-3).unwrap();
        assert!(form.a11.is_finite() && form.a22.is_finite());
        assert!(form.max_abs_entry() > 1e-3);
        let e = form.entry(0, 1) - form.entry(1, 0).conj();
        assert!(e.norm() < 1e-8);
        assert!(matches!(discrepancy_form(1, 1.0, 0.0, 0.0), Err(Error::InvalidStep { .. })));
    }
}
