//! Norms ‖z₁ʲz₂ᵏ‖²_{h_m} of the monomial basis of holomorphic sections.
//!
//! In polar coordinates the norm integral factors into an angular Beta
//! integral and a radial moment:
//!
//! ‖z₁ʲz₂ᵏ‖² = 4 β(j, k) · ∫₀^∞ e^{−m√(r⁴+1)} (1 + √(r⁴+1))^m r^p dr,
//! p = 2(j + k − m) + 3,
//!
//! with β(j, k) = j!k! / (2(j+k+1)!). The radial moment is computed by
//! adaptive quadrature, or exactly when j + k − m is even: the substitution
//! s = 1 + √(r⁴+1) turns it into a finite combination of Γ(n + 1, 2m), and for
//! integer arguments e^{2m} Γ(n + 1, 2m) is the integer Σ_k n!/k! (2m)^k.
//!
//! All norms are carried as natural logarithms.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{beta_angular, ln_biguint, ln_ratio, log_gamma_upper_int};

const QUAD_REL_TOL: f64 = 1e-14;
const QUAD_MAX_PANELS: usize = 4000;

/// Exponents of a monomial z₁ʲz₂ᵏ regarded as a section of L^m; the
/// monomial model requires j + k ≥ m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialIndex {
    j: u32,
    k: u32,
    m: u32,
}

impl MonomialIndex {
    pub fn new(j: u32, k: u32, m: u32) -> Result<Self> {
        const OP: &str = "moments::MonomialIndex";
        if m == 0 {
            return Err(Error::Domain { op: OP, reason: "m must be >= 1" });
        }
        if j + k < m {
            return Err(Error::Domain { op: OP, reason: "sections vanish to order m: need j + k >= m" });
        }
        Ok(MonomialIndex { j, k, m })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.j + self.k
    }

    /// j + k − m.
    pub fn gap(&self) -> u32 {
        self.j + self.k - self.m
    }

    /// Exponent p of r in the radial moment.
    pub fn radial_exponent(&self) -> u32 {
        2 * self.gap() + 3
    }

    pub fn swapped(&self) -> Self {
        MonomialIndex { j: self.k, k: self.j, m: self.m }
    }
}

fn check_radial(op: &'static str, p: u32, m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain { op, reason: "m must be >= 1" });
    }
    if p < 3 || p % 2 == 0 {
        return Err(Error::Domain { op, reason: "exponent p must be odd and >= 3 (j + k >= m)" });
    }
    Ok(())
}

/// ln of the radial integrand m(ln(1+t) − t) + p ln r, t = √(r⁴+1).
fn log_integrand(p: f64, m: f64, r: f64) -> f64 {
    let t = (r * r).hypot(1.0);
    m * (t.ln_1p() - t) + p * r.ln()
}

/// e^{−m√(r⁴+1)} (1 + √(r⁴+1))^m r^p, evaluated through its logarithm.
pub fn radial_integrand(p: u32, m: u32, r: f64) -> f64 {
    if r == 0.0 {
        return if p == 0 { (m as f64 * (2f64.ln() - 1.0)).exp() } else { 0.0 };
    }
    log_integrand(p as f64, m as f64, r).exp()
}

/// ln ∫₀^∞ e^{−m√(r⁴+1)} (1 + √(r⁴+1))^m r^p dr by adaptive quadrature.
///
/// The integrand peaks where √(r⁴+1) = 1 + p/(2m). It is rescaled by its peak
/// value, integrated on [0, r*], and on [r*, ∞) through r = r* + σ s/(1 − s)
/// with σ the peak width.
pub fn log_radial_integral(p: u32, m: u32) -> Result<f64> {
    const OP: &str = "moments::radial_integral";
    check_radial(OP, p, m)?;
    let (pf, mf) = (p as f64, m as f64);
    let t_peak = 1.0 + pf / (2.0 * mf);
    let r_peak = ((t_peak - 1.0) * (t_peak + 1.0)).sqrt().sqrt();
    let l_peak = log_integrand(pf, mf, r_peak);
    // Curvature of the log-integrand at the peak: −4m r⁶ / (t(1+t)²) − 6m r²/(1+t) − p/r²,
    // of which the middle term dominates; a rough width is enough for the map.
    let curvature = 6.0 * mf * r_peak * r_peak / (1.0 + t_peak) + pf / (r_peak * r_peak);
    let sigma = 1.0 / curvature.sqrt();

    let scaled = |r: f64| (log_integrand(pf, mf, r) - l_peak).exp();
    let map_err = |e: Error| match e {
        Error::NonConvergence { reason, .. } => Error::NonConvergence { op: OP, reason },
        other => other,
    };
    let head = quadrature::integrate(scaled, 0.0, r_peak, 0.0, QUAD_REL_TOL, QUAD_MAX_PANELS)
        .map_err(map_err)?;
    let tail = quadrature::integrate(
        |s: f64| {
            let w = 1.0 - s;
            scaled(r_peak + sigma * s / w) * sigma / (w * w)
        },
        0.0,
        1.0,
        0.0,
        QUAD_REL_TOL,
        QUAD_MAX_PANELS,
    )
    .map_err(map_err)?;
    Ok(l_peak + (head.value + tail.value).ln())
}

pub fn radial_integral(p: u32, m: u32) -> Result<f64> {
    let l = log_radial_integral(p, m)?;
    finite_exp("moments::radial_integral", l)
}

fn finite_exp(op: &'static str, l: f64) -> Result<f64> {
    let v = l.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { op })
    }
}

/// ln(4 β(j, k)) = ln(2 j! k! / (j+k+1)!), from the exact fraction.
pub fn log_angular_factor(j: u32, k: u32) -> f64 {
    ln_ratio(&beta_angular(j, k)) + core::f64::consts::LN_2 * 2.0
}

/// ln ‖z₁ʲz₂ᵏ‖²_{h_m} via quadrature of the radial moment.
pub fn log_norm_squared(idx: MonomialIndex) -> Result<f64> {
    Ok(log_angular_factor(idx.j, idx.k) + log_radial_integral(idx.radial_exponent(), idx.m)?)
}

/// ‖z₁ʲz₂ᵏ‖²_{h_m} via quadrature of the radial moment.
pub fn norm_squared(idx: MonomialIndex) -> Result<f64> {
    finite_exp("moments::norm_squared", log_norm_squared(idx)?)
}

/// ln of Γ(a + 1, b) − c·Γ(a, b)-style combinations: ln(e^{l0} − c e^{l1}).
fn log_diff(l0: f64, c: f64, l1: f64) -> f64 {
    l0 + (-c * (l1 - l0).exp()).ln_1p()
}

/// ln ‖z₁^m‖²_{h_m} = ln[(1/(m²(m+1))) (e/m)^m (Γ(m+2, 2m) − mΓ(m+1, 2m))].
pub fn log_closed_norm_min(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain { op: "moments::closed_norm_min", reason: "m must be >= 1" });
    }
    let mf = m as f64;
    let b = 2.0 * mf;
    let g2 = log_gamma_upper_int(m + 1, b)?;
    let g1 = log_gamma_upper_int(m, b)?;
    let lm = mf.ln();
    Ok(-2.0 * lm - (mf + 1.0).ln() + mf * (1.0 - lm) + log_diff(g2, mf, g1))
}

pub fn closed_norm_min(m: u32) -> Result<f64> {
    finite_exp("moments::closed_norm_min", log_closed_norm_min(m)?)
}

/// ln ‖z₁^{m+2}‖²_{h_m} = ln[(1/(m⁴(m+3))) (e/m)^m
/// (Γ(m+4, 2m) − 3mΓ(m+3, 2m) + 2m²Γ(m+2, 2m))].
pub fn log_closed_norm_gap2(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain { op: "moments::closed_norm_gap2", reason: "m must be >= 1" });
    }
    let mf = m as f64;
    let b = 2.0 * mf;
    let g4 = log_gamma_upper_int(m + 3, b)?;
    let g3 = log_gamma_upper_int(m + 2, b)?;
    let g2 = log_gamma_upper_int(m + 1, b)?;
    let combo = 1.0 - 3.0 * mf * (g3 - g4).exp() + 2.0 * mf * mf * (g2 - g4).exp();
    let lm = mf.ln();
    Ok(-4.0 * lm - (mf + 3.0).ln() + mf * (1.0 - lm) + g4 + combo.ln())
}

pub fn closed_norm_gap2(m: u32) -> Result<f64> {
    finite_exp("moments::closed_norm_gap2", log_closed_norm_gap2(m)?)
}

/// e^{b} Γ(n + 1, b) = Σ_{k=0}^{n} n!/k! b^k for integer b, via S(n) = n S(n−1) + b^n.
fn scaled_gamma_int_exact(n: u32, b: u32) -> BigUint {
    let b = BigUint::from(b);
    let mut s = BigUint::one();
    let mut power = BigUint::one();
    for i in 1..=n {
        power *= &b;
        s = s * i + &power;
    }
    s
}

/// Integer coefficients of (s − 2)^q (s − 1), lowest degree first.
fn gap_polynomial(q: u32) -> Vec<BigInt> {
    let mut poly = alloc::vec![BigInt::from(-1), BigInt::one()];
    for _ in 0..q {
        let mut next = alloc::vec![BigInt::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * 2;
        }
        poly = next;
    }
    poly
}

/// ln of the radial moment for an even gap j + k − m = 2q, exactly:
/// ln[e^{−m} / (2 m^{m+2q+2}) · Σ_i c_i m^{q+1−i} e^{2m}Γ(m+q+i+1, 2m)]
/// with c_i the coefficients of (s − 2)^q (s − 1).
pub fn log_radial_integral_even_gap(gap: u32, m: u32) -> Result<f64> {
    const OP: &str = "moments::closed_norm_even_gap";
    if m == 0 {
        return Err(Error::Domain { op: OP, reason: "m must be >= 1" });
    }
    if gap % 2 != 0 {
        return Err(Error::Parity { op: OP });
    }
    let q = gap / 2;
    let big_m = BigUint::from(m);
    let mut total = BigInt::zero();
    for (i, c) in gap_polynomial(q).iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let i = i as u32;
        let factor = big_m.pow(q + 1 - i) * scaled_gamma_int_exact(m + q + i, 2 * m);
        total += c * BigInt::from_biguint(Sign::Plus, factor);
    }
    let magnitude = match total.sign() {
        Sign::Plus => total.magnitude().clone(),
        _ => return Err(Error::Singular { op: OP, reason: "non-positive exact moment" }),
    };
    let mf = m as f64;
    Ok(-mf - core::f64::consts::LN_2 - (mf + 2.0 * q as f64 + 2.0) * mf.ln() + ln_biguint(&magnitude))
}

/// ln ‖z₁ʲz₂ᵏ‖²_{h_m} in closed form, for j + k − m even.
pub fn log_closed_norm_even_gap(idx: MonomialIndex) -> Result<f64> {
    Ok(log_angular_factor(idx.j, idx.k) + log_radial_integral_even_gap(idx.gap(), idx.m)?)
}

pub fn closed_norm_even_gap(idx: MonomialIndex) -> Result<f64> {
    finite_exp("moments::closed_norm_even_gap", log_closed_norm_even_gap(idx)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    ClosedForm,
    Quadrature,
}

impl NormMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMethod::ClosedForm => "closed-form",
            NormMethod::Quadrature => "quadrature",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "closed-form" => Some(NormMethod::ClosedForm),
            "quadrature" => Some(NormMethod::Quadrature),
            _ => None,
        }
    }
}

/// ln of the radial moment of total degree `d` at level `m`, closed form when
/// the gap is even, quadrature otherwise.
pub fn degree_log_radial(m: u32, d: u32) -> Result<(f64, NormMethod)> {
    if m == 0 || d < m {
        return Err(Error::Domain { op: "moments::build_table", reason: "need m >= 1 and degree >= m" });
    }
    let gap = d - m;
    if gap % 2 == 0 {
        Ok((log_radial_integral_even_gap(gap, m)?, NormMethod::ClosedForm))
    } else {
        Ok((log_radial_integral(2 * gap + 3, m)?, NormMethod::Quadrature))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEntry {
    pub j: u32,
    pub k: u32,
    pub log_norm: f64,
    pub method: NormMethod,
}

/// ln ‖z₁ʲz₂ᵏ‖² for every j + k from m through `max_degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialNormTable {
    m: u32,
    /// rows[d − m][j] holds the entry (j, d − j).
    rows: Vec<Vec<NormEntry>>,
}

impl MonomialNormTable {
    /// An empty table at level `m`, covering no degrees yet.
    pub fn empty(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain { op: "moments::build_table", reason: "m must be >= 1" });
        }
        Ok(MonomialNormTable { m, rows: Vec::new() })
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    /// Highest total degree present; m − 1 when empty.
    pub fn max_degree(&self) -> u32 {
        self.m + self.rows.len() as u32 - 1
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn log_norm(&self, j: u32, k: u32) -> Option<f64> {
        let d = j.checked_add(k)?;
        let row = self.rows.get(d.checked_sub(self.m)? as usize)?;
        Some(row[j as usize].log_norm)
    }

    /// Entries of total degree `d`, ordered by ascending j.
    pub fn row(&self, d: u32) -> Option<&[NormEntry]> {
        let i = d.checked_sub(self.m)? as usize;
        self.rows.get(i).map(Vec::as_slice)
    }

    /// All entries by ascending total degree, then ascending j.
    pub fn entries(&self) -> impl Iterator<Item = &NormEntry> + '_ {
        self.rows.iter().flatten()
    }

    /// Append the row of degree `max_degree() + 1` from its log radial moment.
    pub fn push_degree(&mut self, log_radial: f64, method: NormMethod) {
        let d = self.max_degree() + 1;
        let row = (0..=d)
            .map(|j| NormEntry { j, k: d - j, log_norm: log_angular_factor(j, d - j) + log_radial, method })
            .collect();
        self.rows.push(row);
    }

    /// Grow the table through degree `max_degree`, computing rows sequentially.
    pub fn extend_to(&mut self, max_degree: u32) -> Result<()> {
        while self.max_degree() < max_degree {
            let (l, method) = degree_log_radial(self.m, self.max_degree() + 1)?;
            self.push_degree(l, method);
        }
        Ok(())
    }

    /// Rebuild a table from entries in any order. Every (j, k) with
    /// m ≤ j + k ≤ max must be present exactly once, and the table must be
    /// symmetric.
    pub fn from_entries(m: u32, entries: &[NormEntry]) -> Result<Self> {
        const OP: &str = "moments::MonomialNormTable::from_entries";
        let mut table = Self::empty(m)?;
        let Some(max) = entries.iter().map(|e| e.j + e.k).max() else {
            return Ok(table);
        };
        if entries.iter().any(|e| e.j + e.k < m) {
            return Err(Error::Domain { op: OP, reason: "entry with j + k < m" });
        }
        let mut rows: Vec<Vec<Option<NormEntry>>> =
            (m..=max).map(|d| alloc::vec![None; d as usize + 1]).collect();
        for e in entries {
            let slot = &mut rows[(e.j + e.k - m) as usize][e.j as usize];
            if slot.is_some() {
                return Err(Error::Domain { op: OP, reason: "duplicate entry" });
            }
            if !e.log_norm.is_finite() {
                return Err(Error::Domain { op: OP, reason: "non-finite log norm" });
            }
            *slot = Some(*e);
        }
        for row in rows {
            let row: Option<Vec<NormEntry>> = row.into_iter().collect();
            table.rows.push(row.ok_or(Error::Domain { op: OP, reason: "missing entry" })?);
        }
        if !table.is_symmetric() {
            return Err(Error::Domain { op: OP, reason: "table is not symmetric in (j, k)" });
        }
        Ok(table)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows.iter().all(|row| {
            let n = row.len();
            (0..n).all(|j| row[j].log_norm == row[n - 1 - j].log_norm)
        })
    }
}

/// Norm table at level `m` for total degrees m..=max_degree.
pub fn build_table(m: u32, max_degree: u32) -> Result<MonomialNormTable> {
    if max_degree < m {
        return Err(Error::Domain { op: "moments::build_table", reason: "max_degree must be >= m" });
    }
    let mut table = MonomialNormTable::empty(m)?;
    table.extend_to(max_degree)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    fn idx(j: u32, k: u32, m: u32) -> MonomialIndex {
        MonomialIndex::new(j, k, m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn index_validation() {
        assert!(MonomialIndex::new(0, 0, 1).is_err());
        assert!(MonomialIndex::new(1, 0, 0).is_err());
        assert_eq!(idx(3, 1, 2).radial_exponent(), 7);
    }

    #[test]
    fn radial_examples() {
        assert!(rel(radial_integral(3, 1).unwrap(), 7.0 / (2.0 * E)) < 1e-12);
        assert_eq!(radial_integrand(3, 1, 0.0), 0.0);
        assert!(matches!(radial_integral(1, 1), Err(Error::Domain { .. })));
        assert!(matches!(radial_integral(4, 1), Err(Error::Domain { .. })));
    }

    #[test]
    fn norm_examples() {
        assert!(rel(norm_squared(idx(1, 0, 1)).unwrap(), 7.0 / (2.0 * E)) < 1e-12);
        assert!(rel(norm_squared(idx(3, 0, 1)).unwrap(), 74.0 / (4.0 * E)) < 1e-12);
        let a = log_norm_squared(idx(2, 3, 2)).unwrap();
        let b = log_norm_squared(idx(3, 2, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn closed_form_examples() {
        assert!(rel(closed_norm_min(1).unwrap(), 7.0 / (2.0 * E)) < 1e-13);
        // mpmath, 30 digits
        assert!(rel(closed_norm_min(2).unwrap(), 0.253_753_656_068_648_797_3) < 1e-13);
        assert!(rel(closed_norm_gap2(1).unwrap(), 74.0 / (4.0 * E)) < 1e-13);
        assert!(rel(closed_norm_gap2(2).unwrap(), 0.565_024_807_512_857_988_66) < 1e-12);
        assert!(closed_norm_min(0).is_err());
    }

    #[test]
    fn even_gap_reduces_to_low_cases() {
        for m in 1..=10 {
            let a = log_closed_norm_even_gap(idx(m, 0, m)).unwrap();
            assert!((a - log_closed_norm_min(m).unwrap()).abs() < 1e-12, "m={m}");
            let b = log_closed_norm_even_gap(idx(m + 2, 0, m)).unwrap();
            assert!((b - log_closed_norm_gap2(m).unwrap()).abs() < 1e-11, "m={m}");
        }
        assert!(matches!(log_closed_norm_even_gap(idx(2, 0, 1)), Err(Error::Parity { .. })));
    }

    #[test]
    fn even_gap_matches_quadrature() {
        let exact = closed_norm_even_gap(idx(3, 1, 2)).unwrap();
        assert!(rel(exact, norm_squared(idx(3, 1, 2)).unwrap()) < 1e-9);
        // mpmath
        assert!(rel(exact, 0.141_256_201_878_214_497_16) < 1e-13);
    }

    #[test]
    fn gap_polynomial_coefficients() {
        // (s − 2)(s − 1) = s² − 3s + 2
        let p = gap_polynomial(1);
        assert_eq!(p, alloc::vec![BigInt::from(2), BigInt::from(-3), BigInt::from(1)]);
        // e²Γ(3, 2) = 2!(1 + 2 + 2) = 10
        assert_eq!(scaled_gamma_int_exact(2, 2), BigUint::from(10u32));
    }

    #[test]
    fn table_examples() {
        let t = build_table(1, 1).unwrap();
        assert_eq!(t.len(), 2);
        let expect = (7.0 / (2.0 * E)).ln();
        assert!((t.log_norm(1, 0).unwrap() - expect).abs() < 1e-13);
        assert_eq!(t.log_norm(1, 0), t.log_norm(0, 1));

        let t2 = build_table(2, 4).unwrap();
        assert_eq!(t2.len(), 12);
        assert!(t2.is_symmetric());
        assert_eq!(t2.row(3).unwrap()[0].method, NormMethod::Quadrature);
        assert_eq!(t2.row(4).unwrap()[0].method, NormMethod::ClosedForm);
        assert!(t2.log_norm(1, 0).is_none());
        assert!(build_table(3, 2).is_err());
    }

    #[test]
    fn table_roundtrips_through_entries() {
        let t = build_table(2, 5).unwrap();
        let mut entries: Vec<NormEntry> = t.entries().copied().collect();
        entries.reverse();
        assert_eq!(MonomialNormTable::from_entries(2, &entries).unwrap(), t);
        entries.pop();
        assert!(MonomialNormTable::from_entries(2, &entries).is_err());
    }
}
