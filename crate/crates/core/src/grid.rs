//! Uniform 1D grids for the truncated-line discretizations.
//!
//! A `Grid1D` covers `[s_min, s_max]` with `n` interior points; the two
//! endpoints carry homogeneous Dirichlet data and are never stored. The
//! spacing is `h = (s_max - s_min) / (n + 1)`.

use crate::error::{KltError, Result};

pub const MIN_INTERIOR_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    s_min: f64,
    s_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(s_min: f64, s_max: f64, n: usize) -> Result<Self> {
        if !(s_min < s_max) || !s_min.is_finite() || !s_max.is_finite() {
            return Err(KltError::invalid(format!(
                "grid endpoints must satisfy s_min < s_max, got [{s_min}, {s_max}]"
            )));
        }
        if n < MIN_INTERIOR_POINTS {
            return Err(KltError::invalid(format!(
                "grid needs at least {MIN_INTERIOR_POINTS} interior points, got {n}"
            )));
        }
        Ok(Grid1D { s_min, s_max, n })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn s_min(&self) -> f64 {
        self.s_min
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n as f64 + 1.0)
    }

    /// Coordinate of interior point `i`, `i` in `0..n`.
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.s_min + (i as f64 + 1.0) * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Grid with half the spacing over the same interval (`n -> 2n + 1`).
    /// Original interior points sit at the odd refined indices
    /// (refined index `2i + 1` is original index `i`).
    pub fn refined(&self) -> Grid1D {
        Grid1D {
            s_min: self.s_min,
            s_max: self.s_max,
            n: 2 * self.n + 1,
        }
    }

    /// Grid with doubled spacing, keeping every other interior point.
    /// Only exists when `n` is odd; coarse point `j` is fine point `2j + 1`.
    pub fn coarsened(&self) -> Option<Grid1D> {
        if self.n % 2 == 1 {
            Some(Grid1D {
                s_min: self.s_min,
                s_max: self.s_max,
                n: (self.n - 1) / 2,
            })
        } else {
            None
        }
    }
}

/// Composite trapezoid weight of interior samples that vanish at both
/// endpoints: every interior sample gets weight `h`.
pub fn trapezoid_sum(values: &[f64], h: f64) -> f64 {
    values.iter().sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_points() {
        let g = Grid1D::new(-2.0, 2.0, 19).unwrap();
        assert!((g.h() - 0.2).abs() < 1e-14);
        assert!((g.point(0) + 1.8).abs() < 1e-14);
        assert!((g.point(18) - 1.8).abs() < 1e-14);
    }

    #[test]
    fn refine_coarsen_roundtrip() {
        let g = Grid1D::new(0.0, 1.0, 31).unwrap();
        let f = g.refined();
        assert_eq!(f.n(), 63);
        assert!((f.h() - g.h() / 2.0).abs() < 1e-16);
        let c = f.coarsened().unwrap();
        assert_eq!(c.n(), g.n());
        assert!((c.point(4) - g.point(4)).abs() < 1e-14);
    }

    #[test]
    fn rejects_tiny_and_reversed() {
        assert!(Grid1D::new(0.0, 1.0, 4).is_err());
        assert!(Grid1D::new(1.0, 0.0, 64).is_err());
    }
}
