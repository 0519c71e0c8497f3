//! Uniformly sampled real functions on a finite interval.
//!
//! Node convention:
//!
//! * `Periodic`: `M` nodes `x_i = lo + i·h` with `h = (hi - lo) / M`, `i = 0..M`.
//!   The node at `hi` is the same point as `lo` and is not stored.
//! * `ZeroExtend`: `M` nodes including both ends, `h = (hi - lo) / (M - 1)`.
//!   The function is taken to vanish outside `[lo, hi]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    Periodic,
    ZeroExtend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    samples: Vec<f64>,
    lo: f64,
    hi: f64,
    extension: Extension,
    boundary_band: usize,
}

impl SampledFunction {
    pub fn from_samples(samples: Vec<f64>, lo: f64, hi: f64, extension: Extension) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid("interval", format!("[{lo}, {hi}] is not a proper interval")));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            let x = lo + i as f64 * spacing(lo, hi, samples.len(), extension);
            return Err(Error::NonFinite { x });
        }
        Ok(Self {
            samples,
            lo,
            hi,
            extension,
            boundary_band: 0,
        })
    }

    /// Samples `f` on `m` nodes of `[lo, hi]`.
    ///
    /// Closed forms with jumps should return the midpoint of the lateral
    /// limits at the jump, see [`crate::shapes`].
    pub fn sample<F: Fn(f64) -> f64>(
        f: F,
        lo: f64,
        hi: f64,
        m: usize,
        extension: Extension,
    ) -> Result<Self> {
        if m < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        let h = spacing(lo, hi, m, extension);
        let samples = (0..m).map(|i| f(lo + i as f64 * h)).collect();
        Self::from_samples(samples, lo, hi, extension)
    }

    /// Periodic samples on the canonical interval `[-π, π)`.
    pub fn periodic<F: Fn(f64) -> f64>(f: F, m: usize) -> Result<Self> {
        use std::f64::consts::PI;
        Self::sample(f, -PI, PI, m, Extension::Periodic)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn spacing(&self) -> f64 {
        spacing(self.lo, self.hi, self.samples.len(), self.extension)
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.samples.len()).map(move |i| self.lo + i as f64 * h)
    }

    /// Number of nodes at each end whose filter window reached past the
    /// interval under zero extension. Always 0 for periodic functions and for
    /// functions that have not been filtered.
    pub fn boundary_band(&self) -> usize {
        self.boundary_band
    }

    pub fn is_boundary_affected(&self, i: usize) -> bool {
        i < self.boundary_band || i + self.boundary_band >= self.samples.len()
    }

    /// Trapezoid-rule integral over the interval (over one period for
    /// periodic functions).
    pub fn trapezoid_integral(&self) -> f64 {
        let h = self.spacing();
        let sum: f64 = self.samples.iter().sum();
        match self.extension {
            Extension::Periodic => h * sum,
            Extension::ZeroExtend => {
                let ends = self.samples[0] + self.samples[self.samples.len() - 1];
                h * (sum - 0.5 * ends)
            }
        }
    }

    pub(crate) fn with_samples(&self, samples: Vec<f64>, boundary_band: usize) -> Self {
        Self {
            samples,
            lo: self.lo,
            hi: self.hi,
            extension: self.extension,
            boundary_band,
        }
    }
}

fn spacing(lo: f64, hi: f64, m: usize, extension: Extension) -> f64 {
    match extension {
        Extension::Periodic => (hi - lo) / m as f64,
        Extension::ZeroExtend => (hi - lo) / (m - 1) as f64,
    }
}
