//! The Eguchi-Hanson Kähler potential on C² \ {0}, its pullbacks to the two
//! blow-up charts, the Hermitian weight of the prequantum bundle, and
//! finite-difference checks of the metric and its Ricci form.
//!
//! With t = |z₁|² + |z₂|² and s = √(t² + 1) the potential is
//! Φ = s + ln t − ln(1 + s). The metric matrix g_{ij̄} = ∂²Φ/∂z_i∂z̄_j is
//! returned without the 1/2π of the Kähler form, so it tends to the identity
//! as |z| → ∞.

use num_complex::Complex64;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Complex-step increment for first derivatives; small enough that the
/// O(δ²) error is below f64 resolution.
const COMPLEX_STEP: f64 = 1e-20;

/// Default finite-difference step for [`metric_matrix`] and [`ricci_defect`].
pub const DEFAULT_STEP: f64 = 1e-3;

/// A point of C² away from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointC2 {
    z1: Complex64,
    z2: Complex64,
}

impl PointC2 {
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self> {
        if !(z1.re.is_finite() && z1.im.is_finite() && z2.re.is_finite() && z2.im.is_finite()) {
            return Err(Error::Domain { op: "geometry::PointC2", reason: "coordinates must be finite" });
        }
        if z1.norm_sqr() + z2.norm_sqr() == 0.0 {
            return Err(Error::Domain { op: "geometry::PointC2", reason: "origin is excluded" });
        }
        Ok(PointC2 { z1, z2 })
    }

    /// Point from real coordinates (x₁, y₁, x₂, y₂).
    pub fn from_real(u: [f64; 4]) -> Result<Self> {
        Self::new(Complex64::new(u[0], u[1]), Complex64::new(u[2], u[3]))
    }

    /// The point (√x, √y) on the positive real axes with |z₁|² = x, |z₂|² = y.
    pub fn from_moduli_sqr(x: f64, y: f64) -> Result<Self> {
        if !(x >= 0.0 && y >= 0.0) {
            return Err(Error::Domain { op: "geometry::PointC2", reason: "squared moduli must be >= 0" });
        }
        Self::new(Complex64::new(x.sqrt(), 0.0), Complex64::new(y.sqrt(), 0.0))
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    pub fn z2(&self) -> Complex64 {
        self.z2
    }

    pub fn swapped(&self) -> Self {
        PointC2 { z1: self.z2, z2: self.z1 }
    }

    pub fn real_coords(&self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    /// |z|² = |z₁|² + |z₂|².
    pub fn norm_sqr(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// t₁ ≠ 0, coordinates (z₁, t₂/t₁).
    U1,
    /// t₂ ≠ 0, coordinates (t₁/t₂, z₂).
    U2,
}

/// A point of the blow-up in one of its two standard charts. The exceptional
/// divisor is w₁ = 0 in U1 and w₂ = 0 in U2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub w1: Complex64,
    pub w2: Complex64,
}

impl ChartPoint {
    pub fn new(chart: Chart, w1: Complex64, w2: Complex64) -> Self {
        ChartPoint { chart, w1, w2 }
    }

    pub fn on_exceptional_divisor(&self) -> bool {
        match self.chart {
            Chart::U1 => self.w1 == Complex64::new(0.0, 0.0),
            Chart::U2 => self.w2 == Complex64::new(0.0, 0.0),
        }
    }

    /// Image in C² \ {0} under the parametrization map, or `None` on the
    /// exceptional divisor.
    pub fn to_point(&self) -> Option<PointC2> {
        if self.on_exceptional_divisor() {
            return None;
        }
        let (z1, z2) = match self.chart {
            Chart::U1 => (self.w1, self.w1 * self.w2),
            Chart::U2 => (self.w1 * self.w2, self.w2),
        };
        PointC2::new(z1, z2).ok()
    }
}

/// √(t² + 1) − t, without cancellation for large t.
pub fn sqrt_gap(t: f64) -> f64 {
    1.0 / (t.hypot(1.0) + t)
}

/// Φ as a function of t = |z|² > 0.
pub fn radial_potential(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain { op: "geometry::potential", reason: "|z|^2 must be finite and > 0" });
    }
    Ok(radial_potential_unchecked(t))
}

fn radial_potential_unchecked(t: f64) -> f64 {
    let s = t.hypot(1.0);
    if t < 1.0 {
        s + t.ln() - s.ln_1p()
    } else {
        // ln t − ln(1 + s) = −ln(1 + (1 + s − t)/t)
        s - ((1.0 + sqrt_gap(t)) / t).ln_1p()
    }
}

/// The Eguchi-Hanson potential Φ(z) = √(|z|⁴+1) + ln|z|² − ln(1 + √(|z|⁴+1)).
pub fn potential(p: &PointC2) -> f64 {
    radial_potential_unchecked(p.norm_sqr())
}

/// Pullback of Φ to a chart, defined on the whole chart including the
/// exceptional divisor. In U1 with a = |w₁|², b = |w₂|²:
/// √(a²(1+b)² + 1) + ln((1 + b) / (1 + √(a²(1+b)² + 1))).
pub fn chart_potential(c: &ChartPoint) -> f64 {
    let (base, fiber) = match c.chart {
        Chart::U1 => (c.w1.norm_sqr(), c.w2.norm_sqr()),
        Chart::U2 => (c.w2.norm_sqr(), c.w1.norm_sqr()),
    };
    let root = (base * (1.0 + fiber)).hypot(1.0);
    root + fiber.ln_1p() - root.ln_1p()
}

/// The Hermitian weight w_m(z) = e^{−m√(|z|⁴+1)} ((1 + √(|z|⁴+1)) / |z|²)^m
/// of h_m on the trivialization over C² \ {0}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianWeight {
    m: u32,
}

impl HermitianWeight {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain { op: "geometry::HermitianWeight", reason: "m must be >= 1" });
        }
        Ok(HermitianWeight { m })
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    /// ln w_m as a function of t = |z|².
    pub fn log_radial(&self, t: f64) -> f64 {
        let s = t.hypot(1.0);
        let m = self.m as f64;
        -m * s + m * s.ln_1p() - m * t.ln()
    }

    pub fn log_value(&self, p: &PointC2) -> f64 {
        self.log_radial(p.norm_sqr())
    }

    pub fn value(&self, p: &PointC2) -> f64 {
        if self.m <= 20 {
            let t = p.norm_sqr();
            let s = t.hypot(1.0);
            ((-s).exp() * (1.0 + s) / t).powi(self.m as i32)
        } else {
            self.log_value(p).exp()
        }
    }
}

pub fn weight(w: &HermitianWeight, p: &PointC2) -> f64 {
    w.value(p)
}

pub fn log_weight(w: &HermitianWeight, p: &PointC2) -> f64 {
    w.log_value(p)
}

/// A 2×2 Hermitian matrix [[a11, a12], [conj(a12), a22]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    pub a11: f64,
    pub a22: f64,
    pub a12: Complex64,
}

impl Hermitian2 {
    pub fn zero() -> Self {
        Hermitian2 { a11: 0.0, a22: 0.0, a12: Complex64::new(0.0, 0.0) }
    }

    /// Entry (i, j), zero-based.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match (i, j) {
            (0, 0) => Complex64::new(self.a11, 0.0),
            (1, 1) => Complex64::new(self.a22, 0.0),
            (0, 1) => self.a12,
            (1, 0) => self.a12.conj(),
            _ => panic!("Hermitian2 index ({i}, {j}) out of range"),
        }
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12.norm_sqr()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * self.trace();
        let half_diff = 0.5 * (self.a11 - self.a22);
        let r = half_diff.hypot(self.a12.norm());
        [mean - r, mean + r]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues()[0] > 0.0
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a11.abs().max(self.a22.abs()).max(self.a12.norm())
    }

    /// ∂²f/∂z_i∂z̄_j from the real Hessian in (x₁, y₁, x₂, y₂):
    /// ¼ [f_{x_i x_j} + f_{y_i y_j} + i (f_{x_i y_j} − f_{y_i x_j})].
    pub fn from_real_hessian(hess: &[[f64; 4]; 4]) -> Self {
        let h = |a: usize, b: usize| 0.5 * (hess[a][b] + hess[b][a]);
        let block = |i: usize, j: usize| {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            Complex64::new(0.25 * (h(xi, xj) + h(yi, yj)), 0.25 * (h(xi, yj) - h(yi, xj)))
        };
        Hermitian2 { a11: block(0, 0).re, a22: block(1, 1).re, a12: block(0, 1) }
    }
}

fn check_step(op: &'static str, h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidStep { op });
    }
    Ok(())
}

fn shifted(u: [f64; 4], i: usize, d: f64) -> [f64; 4] {
    let mut v = u;
    v[i] += d;
    v
}

/// Real Hessian of `f` on R⁴ by second-order central differences.
pub fn real_hessian_fd<F>(f: F, u: [f64; 4], h: f64) -> [[f64; 4]; 4]
where
    F: Fn([f64; 4]) -> f64,
{
    let f0 = f(u);
    let mut hess = [[0.0; 4]; 4];
    for i in 0..4 {
        hess[i][i] = (f(shifted(u, i, h)) - 2.0 * f0 + f(shifted(u, i, -h))) / (h * h);
        for j in 0..i {
            let pp = f(shifted(shifted(u, i, h), j, h));
            let pm = f(shifted(shifted(u, i, h), j, -h));
            let mp = f(shifted(shifted(u, i, -h), j, h));
            let mm = f(shifted(shifted(u, i, -h), j, -h));
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// The complex Hessian ∂²f/∂z_i∂z̄_j of a real function on R⁴ ≅ C² by central
/// differences with step `h`.
pub fn levi_form_fd<F>(f: F, u: [f64; 4], h: f64) -> Result<Hermitian2>
where
    F: Fn([f64; 4]) -> f64,
{
    check_step("geometry::levi_form_fd", h)?;
    Ok(Hermitian2::from_real_hessian(&real_hessian_fd(f, u, h)))
}

/// Φ continued to complex values of the four real coordinates.
fn potential_complexified(u: [Complex64; 4]) -> Complex64 {
    let t = u.iter().map(|c| c * c).sum::<Complex64>();
    let s = (t * t + 1.0).sqrt();
    s + t.ln() - (s + 1.0).ln()
}

/// Mixed real Hessian of Φ: complex step along u_i, central difference of
/// width `h` along u_j.
fn potential_hessian_cs(u: [f64; 4], h: f64) -> [[f64; 4]; 4] {
    let mut hess = [[0.0; 4]; 4];
    for (i, row) in hess.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let eval = |d: f64| {
                let mut c = u.map(|x| Complex64::new(x, 0.0));
                c[i].im += COMPLEX_STEP;
                c[j].re += d;
                potential_complexified(c).im
            };
            *cell = (eval(h) - eval(-h)) / (2.0 * h * COMPLEX_STEP);
        }
    }
    hess
}

/// g_{ij̄} = ∂²Φ/∂z_i∂z̄_j at `p`, from complex-step/central differences with
/// step `h` and one Richardson extrapolation (h, h/2).
pub fn metric_matrix(p: &PointC2, h: f64) -> Result<Hermitian2> {
    check_step("geometry::metric_matrix", h)?;
    Ok(metric_at(p.real_coords(), h))
}

fn metric_at(u: [f64; 4], h: f64) -> Hermitian2 {
    let coarse = potential_hessian_cs(u, h);
    let fine = potential_hessian_cs(u, 0.5 * h);
    let mut hess = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            hess[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    Hermitian2::from_real_hessian(&hess)
}

/// Largest entry modulus of the Ricci tensor −∂_i∂̄_j ln det g at `p`.
///
/// The metric comes from [`metric_matrix`] with step `h`; the outer mixed
/// derivatives of ln det g are central differences with the same step. The
/// 1/2π normalization of the Ricci form is not applied, so the reported value
/// is 2π times the largest coefficient of −(i/2π)∂∂̄ ln det g.
pub fn ricci_defect(p: &PointC2, h: f64) -> Result<f64> {
    check_step("geometry::ricci_defect", h)?;
    let u = p.real_coords();
    if u.iter().map(|x| x * x).sum::<f64>().sqrt() <= 2.0 * h {
        return Err(Error::Domain { op: "geometry::ricci_defect", reason: "stencil reaches the origin" });
    }
    let log_det = |v: [f64; 4]| metric_at(v, h).det().ln();
    let ricci = levi_form_fd(log_det, u, h)?;
    Ok(ricci.max_abs_entry())
}
