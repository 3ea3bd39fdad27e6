//! Grids given as "x0:x1:n[,y0:y1:n]".

use std::str::FromStr;

use crate::error::AppError;

/// `n` evenly spaced values from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        let h = (self.end - self.start) / (self.n - 1) as f64;
        (0..self.n).map(|i| if i + 1 == self.n { self.end } else { self.start + i as f64 * h }).collect()
    }
}

impl FromStr for Axis {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        const OP: &str = "cli::parse_grid";
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(AppError::invalid(OP, format!("axis {s:?} is not start:end:n")));
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| AppError::invalid(OP, format!("{t:?} is not a finite number")))
        };
        let n: usize = n.parse().map_err(|_| AppError::invalid(OP, format!("{n:?} is not a point count")))?;
        if n == 0 {
            return Err(AppError::invalid(OP, "point count must be >= 1"));
        }
        let (start, end) = (num(a)?, num(b)?);
        if end < start {
            return Err(AppError::invalid(OP, "axis end lies below its start"));
        }
        Ok(Axis { start, end, n })
    }
}

/// Points (x, y); y is 0 when only one axis is given.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Option<Axis>,
}

impl GridSpec {
    /// x-major order: all y for the first x, then the next x.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ys = self.y.map(|a| a.values()).unwrap_or_else(|| vec![0.0]);
        self.x.values().into_iter().flat_map(|x| ys.iter().map(move |&y| (x, y))).collect()
    }
}

impl FromStr for GridSpec {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        let mut it = s.split(',');
        let x = it.next().unwrap_or_default().parse()?;
        let y = it.next().map(str::parse).transpose()?;
        if it.next().is_some() {
            return Err(AppError::invalid("cli::parse_grid", "at most two axes"));
        }
        Ok(GridSpec { x, y })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_one_and_two_axes() {
        let g: GridSpec = "0.01:4:100".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 100);
        assert_eq!(p[0], (0.01, 0.0));
        assert_eq!(p[99], (4.0, 0.0));
        let g: GridSpec = "1:2:2, 0:1:3".parse().unwrap();
        assert_eq!(g.points(), vec![(1.0, 0.0), (1.0, 0.5), (1.0, 1.0), (2.0, 0.0), (2.0, 0.5), (2.0, 1.0)]);
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "1:2", "1:2:0", "2:1:3", "a:1:2", "1:2:3,1:2:3,1:2:3", "0:inf:2"] {
            assert!(s.parse::<GridSpec>().is_err(), "{s}");
        }
    }
}
