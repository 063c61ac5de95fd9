use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sampling of `[x_min, x_max]` with `count` points, both ends
/// included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    count: usize,
}

impl Grid {
    /// Minimum number of points; the widest stencil spans nine nodes.
    pub const MIN_COUNT: usize = 9;

    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite (got [{x_min}, {x_max}])"
            )));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min must be < x_max (got [{x_min}, {x_max}])"
            )));
        }
        if count < Self::MIN_COUNT {
            return Err(Error::InvalidGrid(format!(
                "count must be >= {} (got {count})",
                Self::MIN_COUNT
            )));
        }
        Ok(Self { x_min, x_max, count })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.count - 1) as f64
    }

    /// `x_i = x_min + i·h`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.x(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * self.spacing();
        x >= self.x_min - slack && x <= self.x_max + slack
    }

    /// Index of the node at `x`, if `x` sits on one (to 1e-9 of a spacing).
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let h = self.spacing();
        let t = (x - self.x_min) / h;
        let i = t.round();
        if (t - i).abs() <= 1e-9 && i >= 0.0 && (i as usize) < self.count {
            Some(i as usize)
        } else {
            None
        }
    }

    /// True when both grids describe the same nodes.
    pub fn same_nodes(&self, other: &Grid) -> bool {
        self.count == other.count
            && (self.x_min - other.x_min).abs() <= 1e-12 * self.spacing()
            && (self.x_max - other.x_max).abs() <= 1e-12 * self.spacing()
    }
}
