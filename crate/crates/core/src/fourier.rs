//! Truncated trigonometric series, quadrature of coefficients and
//! coefficient-decay diagnostics.
//!
//! A series on the periodic interval `[-P, P]` is
//!
//! ```text
//! f(x) = α₀/2 + Σ_{k=1..K} [ α_k cos(kπx/P) + β_k sin(kπx/P) ]
//! ```
//!
//! with `P = π` on the canonical interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sampled::{Extension, SampledFunction};

pub const DEFAULT_K_MAX: usize = 512;
pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRecord", into = "SeriesRecord")]
pub struct FourierSeries {
    half_mean: f64,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
    period_half_width: f64,
}

/// JSON layout of a series: `{half_mean, cos, sin, period_half_width}`.
#[derive(Serialize, Deserialize)]
struct SeriesRecord {
    half_mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    period_half_width: f64,
}

impl TryFrom<SeriesRecord> for FourierSeries {
    type Error = Error;

    fn try_from(r: SeriesRecord) -> Result<Self> {
        FourierSeries::with_period(r.half_mean, r.cos, r.sin, r.period_half_width)
    }
}

impl From<FourierSeries> for SeriesRecord {
    fn from(s: FourierSeries) -> Self {
        SeriesRecord {
            half_mean: s.half_mean,
            cos: s.cos_coeffs,
            sin: s.sin_coeffs,
            period_half_width: s.period_half_width,
        }
    }
}

impl FourierSeries {
    /// Series on the canonical interval `[-π, π]`. `cos[k-1]` holds `α_k`.
    pub fn new(half_mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        Self::with_period(half_mean, cos, sin, PI)
    }

    pub fn with_period(
        half_mean: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
        period_half_width: f64,
    ) -> Result<Self> {
        if cos.len() != sin.len() {
            return Err(invalid(
                "coefficients",
                format!("{} cosine vs {} sine coefficients", cos.len(), sin.len()),
            ));
        }
        if !(period_half_width.is_finite() && period_half_width > 0.0) {
            return Err(invalid("period_half_width", "must be a positive finite real"));
        }
        let finite = half_mean.is_finite() && cos.iter().chain(&sin).all(|c| c.is_finite());
        if !finite {
            return Err(invalid("coefficients", "all coefficients must be finite"));
        }
        Ok(Self {
            half_mean,
            cos_coeffs: cos,
            sin_coeffs: sin,
            period_half_width,
        })
    }

    pub fn zeros(k_max: usize) -> Self {
        Self {
            half_mean: 0.0,
            cos_coeffs: vec![0.0; k_max],
            sin_coeffs: vec![0.0; k_max],
            period_half_width: PI,
        }
    }

    /// The `α₀` coefficient; the constant term of the series is half of it.
    pub fn half_mean(&self) -> f64 {
        self.half_mean
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    pub fn period_half_width(&self) -> f64 {
        self.period_half_width
    }

    pub fn k_max(&self) -> usize {
        self.cos_coeffs.len()
    }

    /// `α_k` for `k ≥ 1`.
    pub fn alpha(&self, k: usize) -> f64 {
        self.cos_coeffs[k - 1]
    }

    /// `β_k` for `k ≥ 1`.
    pub fn beta(&self, k: usize) -> f64 {
        self.sin_coeffs[k - 1]
    }

    /// Applies `f(k, α_k, β_k) -> (α'_k, β'_k)` to every mode, keeping `α₀`.
    pub fn map_modes<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, f64, f64) -> (f64, f64),
    {
        let (cos, sin) = self
            .cos_coeffs
            .iter()
            .zip(&self.sin_coeffs)
            .enumerate()
            .map(|(i, (&a, &b))| f(i + 1, a, b))
            .unzip();
        Self {
            half_mean: self.half_mean,
            cos_coeffs: cos,
            sin_coeffs: sin,
            period_half_width: self.period_half_width,
        }
    }

    /// Partial sum through `k_upto` (all stored modes when `None`), summed in
    /// ascending `k`.
    pub fn evaluate(&self, x: f64, k_upto: Option<usize>) -> Result<f64> {
        let upto = k_upto.unwrap_or(self.k_max());
        if upto > self.k_max() {
            return Err(Error::TruncationOutOfRange {
                requested: upto,
                available: self.k_max(),
            });
        }
        let scale = PI / self.period_half_width;
        let mut sum = 0.5 * self.half_mean;
        for k in 1..=upto {
            let (s, c) = (k as f64 * x * scale).sin_cos();
            sum += self.cos_coeffs[k - 1] * c + self.sin_coeffs[k - 1] * s;
        }
        Ok(sum)
    }
}

/// Trapezoid-rule Fourier coefficients of periodic samples on `[-π, π)`.
///
/// On the uniform periodic grid this is the discrete orthogonality sum
/// `α_k = (2/M) Σ f_i cos(k x_i)`.
pub fn coefficients_from_samples(f: &SampledFunction, k_max: usize) -> Result<FourierSeries> {
    if f.extension() != Extension::Periodic {
        return Err(Error::WrongExtension {
            expected: "periodic",
        });
    }
    let tol = 1e-12 * PI;
    if (f.lo() + PI).abs() > tol || (f.hi() - PI).abs() > tol {
        return Err(invalid(
            "interval",
            format!("coefficients need the canonical interval [-π, π], got [{}, {}]", f.lo(), f.hi()),
        ));
    }
    let m = f.len();
    if m < 4 * k_max {
        return Err(Error::Aliasing {
            samples: m,
            k_max,
            required: 4 * k_max,
        });
    }
    let weight = 2.0 / m as f64;
    let nodes: Vec<f64> = f.nodes().collect();
    let samples = f.samples();
    let half_mean = weight * samples.iter().sum::<f64>();
    let (cos, sin) = (1..=k_max)
        .map(|k| {
            let kf = k as f64;
            let (mut a, mut b) = (0.0, 0.0);
            for (&x, &v) in nodes.iter().zip(samples) {
                let (s, c) = (kf * x).sin_cos();
                a += v * c;
                b += v * s;
            }
            (weight * a, weight * b)
        })
        .unzip();
    FourierSeries::new(half_mean, cos, sin)
}

/// Coefficient-decay classes, ordered from best to worst behaved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    AbsoluteUniform,
    PointwiseOnly,
    DivergentBoundedCoeffs,
    DivergentGrowingCoeffs,
}

impl Convergence {
    pub fn is_divergent(self) -> bool {
        matches!(
            self,
            Convergence::DivergentBoundedCoeffs | Convergence::DivergentGrowingCoeffs
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Convergence::AbsoluteUniform => "absolute_uniform",
            Convergence::PointwiseOnly => "pointwise_only",
            Convergence::DivergentBoundedCoeffs => "divergent_bounded",
            Convergence::DivergentGrowingCoeffs => "divergent_growing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub classification: Convergence,
    /// Least-squares decay exponent `p` in `c_k ~ k^{-p}` over the tail.
    pub decay_exponent: f64,
    pub tail_fraction: f64,
    pub notes: String,
}

/// Fraction of the coefficient sequence used for the decay fit.
pub const TAIL_FRACTION: f64 = 0.5;
/// Decay exponents at or above this are summable (Weierstrass M-test regime).
pub const ABSOLUTE_UNIFORM_EXPONENT: f64 = 1.5;
/// Decay exponents at or above this (and below the previous) are treated as
/// the Dirichlet-test regime of pointwise convergence.
pub const POINTWISE_EXPONENT: f64 = 0.5;
pub const MIN_K_FOR_CLASSIFICATION: usize = 32;

/// Classifies a series by the tail decay of `c_k = max(|α_k|, |β_k|)`.
///
/// The fit uses the upper envelope `sup_{j≥k} c_j`, so oscillating factors
/// such as `sin(kε)` do not drag the exponent down; growth is detected on the
/// raw magnitudes.
pub fn classify_convergence(series: &FourierSeries) -> Result<ConvergenceReport> {
    let k_max = series.k_max();
    if k_max < MIN_K_FOR_CLASSIFICATION {
        return Err(invalid(
            "k_max",
            format!("need at least {MIN_K_FOR_CLASSIFICATION} modes to classify, got {k_max}"),
        ));
    }
    let magnitudes: Vec<f64> = series
        .cos_coeffs()
        .iter()
        .zip(series.sin_coeffs())
        .map(|(a, b)| a.abs().max(b.abs()))
        .collect();
    Ok(classify_magnitudes(&magnitudes))
}

/// Same classification on a bare magnitude sequence `c_1, c_2, ...`.
pub fn classify_magnitudes(magnitudes: &[f64]) -> ConvergenceReport {
    let report = |classification, decay_exponent, notes: &str| ConvergenceReport {
        classification,
        decay_exponent,
        tail_fraction: TAIL_FRACTION,
        notes: notes.to_string(),
    };
    if magnitudes.iter().all(|&c| c == 0.0) {
        return report(Convergence::AbsoluteUniform, f64::INFINITY, "zero series");
    }
    let n = magnitudes.len();
    let start = n - ((n as f64 * TAIL_FRACTION).ceil() as usize).clamp(2, n);

    let raw: Vec<(f64, f64)> = (start..n)
        .filter(|&i| magnitudes[i] > 0.0)
        .map(|i| (((i + 1) as f64).ln(), magnitudes[i].ln()))
        .collect();
    if raw.len() >= 2 {
        let raw_exponent = -fit_slope(&raw);
        let quarter = ((n - start) / 4).max(1);
        let early = mean(&magnitudes[start..start + quarter]);
        let late = mean(&magnitudes[n - quarter..]);
        if raw_exponent < -0.05 && late > 1.05 * early {
            return report(
                Convergence::DivergentGrowingCoeffs,
                raw_exponent,
                "coefficients grow over the tail",
            );
        }
    }

    let mut envelope = magnitudes[start..].to_vec();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let points: Vec<(f64, f64)> = envelope
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0.0)
        .map(|(i, &c)| (((start + i + 1) as f64).ln(), c.ln()))
        .collect();
    if points.len() < 2 {
        return report(
            Convergence::AbsoluteUniform,
            f64::INFINITY,
            "trailing coefficients vanish",
        );
    }
    let p = -fit_slope(&points);
    if p >= ABSOLUTE_UNIFORM_EXPONENT {
        report(Convergence::AbsoluteUniform, p, "summable coefficient envelope")
    } else if p >= POINTWISE_EXPONENT {
        report(Convergence::PointwiseOnly, p, "slowly decaying coefficients")
    } else {
        report(
            Convergence::DivergentBoundedCoeffs,
            p,
            "coefficients bounded but not decaying",
        )
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Ordinary least-squares slope of `y` on `x`.
fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}
