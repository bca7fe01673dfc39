//! Uniform one-dimensional grids and samples on them.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Uniform grid `lo + i*h`, `i = 0..n`, with `h = (hi - lo) / (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {n}")));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("grid needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// The `i`-th node. The last node is `hi` exactly.
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Same interval, `2n - 1` nodes (every old node is kept).
    pub fn refined(&self) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi,
            n: 2 * self.n - 1,
        }
    }
}

/// Checked constructor; see [`Grid1D::new`].
pub fn make_grid(lo: f64, hi: f64, n: usize) -> Result<Grid1D> {
    Grid1D::new(lo, hi, n)
}

/// Finite samples of a real function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                at: grid.point(i),
                value: *v,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        let h = self.grid.step();
        let v = &self.values;
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        h * (inner + 0.5 * (v[0] + v[v.len() - 1]))
    }
}

/// Evaluate `f` at every node of `grid`; fails on the first non-finite value.
pub fn sample_on_grid<F: Fn(f64) -> f64>(f: F, grid: &Grid1D) -> Result<SampledField> {
    let values = grid.points().map(&f).collect();
    SampledField::new(*grid, values)
}
