//! Uniform midpoint grids.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(LabError::Invalid(format!("grid needs lo < hi, got [{lo}, {hi}]")));
        }
        if !count.is_power_of_two() {
            return Err(LabError::Invalid(format!("grid count {count} is not a power of two")));
        }
        Ok(Self { lo, hi, count })
    }

    /// Smallest power-of-two grid with spacing at most `max_spacing`, but no fewer than `min_count` points.
    pub fn with_spacing(lo: f64, hi: f64, max_spacing: f64, min_count: usize) -> Result<Self> {
        let needed = if max_spacing.is_finite() && max_spacing > 0.0 {
            ((hi - lo) / max_spacing).ceil().max(1.0) as usize
        } else {
            1
        };
        Self::new(lo, hi, needed.max(min_count).next_power_of_two())
    }

    pub fn weight(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.weight()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// Cells `start..end` as a grid of their own; the count need not be a power of two.
    pub fn cells(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.count {
            return Err(LabError::Invalid(format!("cell range {start}..{end} outside 0..{}", self.count)));
        }
        let w = self.weight();
        Ok(Self { lo: self.lo + start as f64 * w, hi: self.lo + end as f64 * w, count: end - start })
    }

    pub fn refined(&self) -> Self {
        Self { count: self.count * 2, ..*self }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// Index of the cell containing `t`, if any.
    pub fn cell_of(&self, t: f64) -> Option<usize> {
        if t < self.lo || t >= self.hi {
            return None;
        }
        Some((((t - self.lo) / self.weight()) as usize).min(self.count - 1))
    }
}

/// Samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    pub grid: Grid1D,
    pub values: Vec<T>,
}

impl<T: Copy> GridFunction<T> {
    pub fn sample(grid: Grid1D, f: impl Fn(f64) -> T) -> Self {
        Self { grid, values: grid.points().into_iter().map(f).collect() }
    }
}

impl GridFunction<f64> {
    /// Weighted discrete `L^p` norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        weighted_lp_norm(self.values.iter().map(|v| v.abs()), self.grid.weight(), p)
    }
}

/// `(w Σ |v_i|^p)^{1/p}`; `p = ∞` gives the max.
pub fn weighted_lp_norm(abs_values: impl Iterator<Item = f64>, weight: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return abs_values.fold(0.0, f64::max);
    }
    let s: f64 = abs_values.map(|a| a.powf(p)).sum();
    (weight * s).powf(1.0 / p)
}
