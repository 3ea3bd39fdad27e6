//! Truncated univariate power series and the expansion of e^{mΦ} at the origin.
//!
//! Since Φ is radial, e^{Φ} = t · A(t²) with t = |z₁|² + |z₂|² and
//! A(u) = e^{√(1+u)} / (1 + √(1+u)). Hence e^{mΦ} = Σ_n a_n t^{m+2n} where a_n
//! are the coefficients of A^m, and each power of t = x + y is distributed
//! over bidegrees (x, y) = (|z₁|², |z₂|²) by the binomial theorem.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry;
use crate::sum::{horner_compensated, Neumaier};

/// Power series c₀ + c₁u + … + c_D u^D modulo u^{D+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Series of truncation order `order`, padding or cutting `coeffs` to fit.
    pub fn from_coeffs(mut coeffs: Vec<f64>, order: usize) -> Self {
        coeffs.resize(order + 1, 0.0);
        TruncatedSeries { coeffs }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        Self::from_coeffs(vec![c], order)
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(1.0, order)
    }

    /// The series `u`.
    pub fn variable(order: usize) -> Self {
        Self::from_coeffs(vec![0.0, 1.0], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    /// Partial sum at `u`, by compensated Horner.
    pub fn eval(&self, u: f64) -> f64 {
        horner_compensated(&self.coeffs, u)
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    fn mul_series(&self, other: &Self) -> Self {
        let d = self.common_order(other);
        let coeffs = (0..=d)
            .map(|n| (0..=n).map(|k| self.coeffs[k] * other.coeffs[n - k]).collect::<Neumaier>().value())
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// e^f, from g' = f' g after factoring out e^{c₀}.
    pub fn exp(&self) -> Self {
        let d = self.order();
        let f = &self.coeffs;
        let mut g = vec![0.0; d + 1];
        g[0] = 1.0;
        for n in 1..=d {
            let acc: Neumaier = (1..=n).map(|k| k as f64 * f[k] * g[n - k]).collect();
            g[n] = acc.value() / n as f64;
        }
        TruncatedSeries { coeffs: g }.scale(f[0].exp())
    }

    /// √f from g² = f; requires c₀ > 0.
    pub fn sqrt(&self) -> Result<Self> {
        const OP: &str = "series::sqrt";
        let f = &self.coeffs;
        if f[0] == 0.0 {
            return Err(Error::ZeroConstantTerm { op: OP });
        }
        if f[0] < 0.0 {
            return Err(Error::Domain { op: OP, reason: "constant term must be positive" });
        }
        let d = self.order();
        let mut g = vec![0.0; d + 1];
        g[0] = f[0].sqrt();
        for n in 1..=d {
            let cross: Neumaier = (1..n).map(|k| g[k] * g[n - k]).collect();
            g[n] = (f[n] - cross.value()) / (2.0 * g[0]);
        }
        Ok(TruncatedSeries { coeffs: g })
    }

    /// 1/f; requires c₀ ≠ 0.
    pub fn reciprocal(&self) -> Result<Self> {
        let f = &self.coeffs;
        if f[0] == 0.0 {
            return Err(Error::ZeroConstantTerm { op: "series::reciprocal" });
        }
        let d = self.order();
        let mut g = vec![0.0; d + 1];
        g[0] = 1.0 / f[0];
        for n in 1..=d {
            let acc: Neumaier = (1..=n).map(|k| f[k] * g[n - k]).collect();
            g[n] = -acc.value() * g[0];
        }
        Ok(TruncatedSeries { coeffs: g })
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let d = self.common_order(rhs);
        TruncatedSeries { coeffs: (0..=d).map(|n| self.coeffs[n] + rhs.coeffs[n]).collect() }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let d = self.common_order(rhs);
        TruncatedSeries { coeffs: (0..=d).map(|n| self.coeffs[n] - rhs.coeffs[n]).collect() }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.mul_series(rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Power(u32),
    Exp,
    Sqrt,
    Reciprocal,
}

/// Apply `op` to `args`: binary ops fold left over all arguments, unary ops
/// take exactly one. Mixed orders truncate to the smallest.
pub fn series_arith(op: SeriesOp, args: &[&TruncatedSeries]) -> Result<TruncatedSeries> {
    const OP: &str = "series::series_arith";
    let (first, rest) = args
        .split_first()
        .ok_or(Error::Domain { op: OP, reason: "at least one argument required" })?;
    let unary = |f: &dyn Fn(&TruncatedSeries) -> Result<TruncatedSeries>| {
        if rest.is_empty() {
            f(first)
        } else {
            Err(Error::Domain { op: OP, reason: "unary operation takes one argument" })
        }
    };
    match op {
        SeriesOp::Add => Ok(rest.iter().fold((*first).clone(), |acc, s| &acc + s)),
        SeriesOp::Mul => Ok(rest.iter().fold((*first).clone(), |acc, s| &acc * s)),
        SeriesOp::Power(n) => unary(&|s| Ok(s.powi(n))),
        SeriesOp::Exp => unary(&|s| Ok(s.exp())),
        SeriesOp::Sqrt => unary(&|s| s.sqrt()),
        SeriesOp::Reciprocal => unary(&|s| s.reciprocal()),
    }
}

/// Coefficients of A(u) = e^{√(1+u)} / (1 + √(1+u)) through u^order.
pub fn expand_amplitude(order: usize) -> TruncatedSeries {
    let one = TruncatedSeries::one(order);
    let root = (&one + &TruncatedSeries::variable(order)).sqrt().expect("1 + u has unit constant term");
    let denom = (&one + &root).reciprocal().expect("1 + √(1+u) has constant term 2");
    &root.exp() * &denom
}

/// Coefficients of x^a y^b (x = |z₁|², y = |z₂|²) in e^{mΦ}, through total
/// degree `max_degree`. Only slices of degree m + 2n are nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct BidegreeExpansion {
    m: u32,
    max_degree: u32,
    coeffs: BTreeMap<(u32, u32), f64>,
}

impl BidegreeExpansion {
    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Coefficient of x^a y^b; zero outside the stored slices.
    pub fn coefficient(&self, a: u32, b: u32) -> f64 {
        self.coeffs.get(&(a, b)).copied().unwrap_or(0.0)
    }

    /// Coefficients of total degree `d`, indexed by the y-exponent s: entry s
    /// multiplies x^{d−s} y^s.
    pub fn slice(&self, d: u32) -> Vec<f64> {
        (0..=d).map(|s| self.coefficient(d - s, s)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    /// The truncated expansion evaluated at (x, y).
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(a, b), &c)| c * x.powi(a as i32) * y.powi(b as i32))
            .collect::<Neumaier>()
            .value()
    }
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expand e^{mΦ} into bidegrees through total degree `max_degree` ≥ m.
pub fn expand_exp_m_phi(m: u32, max_degree: u32) -> Result<BidegreeExpansion> {
    const OP: &str = "series::expand_exp_m_phi";
    if m == 0 {
        return Err(Error::Domain { op: OP, reason: "m must be >= 1" });
    }
    if max_degree < m {
        return Err(Error::Domain { op: OP, reason: "max_degree must be >= m" });
    }
    let steps = ((max_degree - m) / 2) as usize;
    let amp = expand_amplitude(steps).powi(m);
    let mut coeffs = BTreeMap::new();
    for n in 0..=steps {
        let d = m + 2 * n as u32;
        for s in 0..=d {
            coeffs.insert((d - s, s), amp.coeff(n) * binomial_f64(d, s));
        }
    }
    Ok(BidegreeExpansion { m, max_degree, coeffs })
}

/// Sign and size of the second nonzero slice (degree m + 2) of e^{mΦ}, from
/// two independent routes, set against the factor (m/4)(−e/2)^m printed in the
/// published expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondSliceFinding {
    pub m: u32,
    /// Slice coefficient divided by binom(m+2, s), from the series engine.
    pub series_value: f64,
    /// The same quantity from a least-squares fit of e^{mΦ} near the origin.
    pub fit_value: f64,
    /// (m/4)(−e/2)^m.
    pub printed_value: f64,
}

impl SecondSliceFinding {
    pub fn oracles_agree_in_sign(&self) -> bool {
        self.series_value.signum() == self.fit_value.signum()
    }

    pub fn matches_printed_sign(&self) -> bool {
        self.series_value.signum() == self.printed_value.signum()
    }
}

/// Radii used by [`fit_second_slice`].
const FIT_RADII: [f64; 8] = [0.004, 0.006, 0.008, 0.01, 0.012, 0.015, 0.02, 0.025];

/// Fit R(t) = (e^{m(Φ(t) − ln t)} − (e/2)^m) / t² ≈ c + d t² by least squares
/// over small t = |z|², returning c. Independent of the series engine: it
/// only evaluates the potential.
pub fn fit_second_slice(m: u32) -> Result<f64> {
    let lead = (core::f64::consts::E / 2.0).powi(m as i32);
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &t in &FIT_RADII {
        let psi = geometry::radial_potential(t)? - t.ln();
        let r = ((m as f64 * psi).exp() - lead) / (t * t);
        let x = t * t;
        sx += x;
        sy += r;
        sxx += x * x;
        sxy += x * r;
    }
    let n = FIT_RADII.len() as f64;
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok((sy - slope * sx) / n)
}

pub fn second_slice_finding(m: u32) -> Result<SecondSliceFinding> {
    let exp = expand_exp_m_phi(m, m + 2)?;
    let d = m + 2;
    let series_value = exp.coefficient(d, 0);
    let fit_value = fit_second_slice(m)?;
    let printed_value = m as f64 / 4.0 * (-core::f64::consts::E / 2.0).powi(m as i32);
    Ok(SecondSliceFinding { m, series_value, fit_value, printed_value })
}
