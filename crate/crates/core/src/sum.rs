//! Compensated summation and polynomial evaluation.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl core::iter::FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// Compensated Horner scheme (Graillat, Langlois, Louvet): evaluates
/// Σ coeffs[i] x^i as if in twice the working precision.
pub fn horner_compensated(coeffs: &[f64], x: f64) -> f64 {
    let Some((&last, rest)) = coeffs.split_last() else {
        return 0.0;
    };
    let mut s = last;
    let mut c = 0.0;
    for &a in rest.iter().rev() {
        let (p, pi) = two_prod(s, x);
        let (t, sigma) = two_sum(p, a);
        s = t;
        c = c * x + (pi + sigma);
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_small_addend() {
        let acc: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn compensated_horner_on_ill_conditioned_polynomial() {
        // (x - 1)^5 expanded, evaluated near its root
        let c = [-1.0, 5.0, -10.0, 10.0, -5.0, 1.0];
        let x = 1.0 + 1e-3;
        let exact = 1e-15;
        assert!((horner_compensated(&c, x) - exact).abs() < 1e-25);
        assert_eq!(horner_compensated(&[], 3.0), 0.0);
    }
}
