//! The filter as an operator on samples, on series and on closed forms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::FourierSeries;
use crate::kernels::sinc;
use crate::sampled::{Extension, SampledFunction};

/// Default decreasing ranges for the `ε → 0` limit checks.
pub const DEFAULT_EPS_SEQUENCE: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

/// Order `N ≥ 1` and range `ε > 0`, constant-range convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub order: usize,
    pub range: f64,
}

impl FilterSpec {
    pub fn new(order: usize, range: f64) -> Result<Self> {
        let spec = Self { order, range };
        spec.validate()?;
        Ok(spec)
    }

    pub fn first_order(range: f64) -> Result<Self> {
        Self::new(1, range)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(invalid("order", "filter order must be at least 1"));
        }
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(invalid(
                "epsilon",
                format!("range must be positive and finite, got {}", self.range),
            ));
        }
        Ok(())
    }

    /// Range of each of the `N` first-order passes.
    pub fn sub_range(&self) -> f64 {
        self.range / self.order as f64
    }
}

/// Applies the filter to uniform samples.
///
/// Each first-order pass integrates the piecewise-linear interpolant of the
/// samples exactly over `[x_i - a, x_i + a]`, so fractional end cells are
/// handled by linear interpolation and linear functions pass unchanged.
/// Order `N` runs `N` passes at `a = ε/N`.
///
/// Under `ZeroExtend` the samples are taken to vanish outside the interval;
/// nodes closer than `ε` to either end are recorded in
/// [`SampledFunction::boundary_band`].
pub fn filter_samples(f: &SampledFunction, spec: FilterSpec) -> Result<SampledFunction> {
    spec.validate()?;
    let h = f.spacing();
    let sub = spec.sub_range();
    if sub < 2.0 * h * (1.0 - 1e-12) {
        return Err(Error::RangeBelowResolution {
            range: spec.range,
            minimum: 2.0 * h * spec.order as f64,
        });
    }
    if f.extension() == Extension::Periodic {
        let half_width = 0.5 * (f.hi() - f.lo());
        if spec.range > half_width * (1.0 + 1e-12) {
            return Err(Error::RangeExceedsPeriod {
                range: spec.range,
                half_width,
            });
        }
    }
    let mut samples = f.samples().to_vec();
    for _ in 0..spec.order {
        samples = window_average(&samples, h, sub, f.extension());
    }
    let band = match f.extension() {
        Extension::Periodic => 0,
        Extension::ZeroExtend => {
            let cells = spec.range / h;
            ((cells - 1e-9).ceil().max(0.0) as usize).min(f.len())
        }
    };
    Ok(f.with_samples(samples, band))
}

/// One first-order pass of half-width `a` over node values with spacing `h`.
fn window_average(values: &[f64], h: f64, a: f64, extension: Extension) -> Vec<f64> {
    let m = values.len();
    let cells = match extension {
        Extension::Periodic => m,
        Extension::ZeroExtend => m - 1,
    };
    let next = |j: usize| match extension {
        Extension::Periodic => values[(j + 1) % m],
        Extension::ZeroExtend => values[j + 1],
    };
    // prefix[j] = ∫ of the interpolant from node 0 to node j.
    let mut prefix = Vec::with_capacity(cells + 1);
    prefix.push(0.0);
    for j in 0..cells {
        prefix.push(prefix[j] + 0.5 * h * (values[j] + next(j)));
    }
    let total = prefix[cells];

    // Antiderivative at fractional node position s.
    let antiderivative = |s: f64| -> f64 {
        let j = s.floor();
        let theta = s - j;
        let j = j as i64;
        match extension {
            Extension::Periodic => {
                let q = j.div_euclid(cells as i64);
                let r = j.rem_euclid(cells as i64) as usize;
                let (v0, v1) = (values[r], next(r));
                q as f64 * total + prefix[r] + h * theta * (v0 + 0.5 * theta * (v1 - v0))
            }
            Extension::ZeroExtend => {
                if j < 0 {
                    0.0
                } else if j as usize >= cells {
                    total
                } else {
                    let r = j as usize;
                    let (v0, v1) = (values[r], values[r + 1]);
                    prefix[r] + h * theta * (v0 + 0.5 * theta * (v1 - v0))
                }
            }
        }
    };

    let offset = a / h;
    (0..m)
        .map(|i| {
            let s = i as f64;
            (antiderivative(s + offset) - antiderivative(s - offset)) / (2.0 * a)
        })
        .collect()
}

/// Range in the canonical angular variable for a series of half-period `P`.
pub fn angular_range(range: f64, period_half_width: f64) -> f64 {
    range * (PI / period_half_width)
}

/// Multiplies every mode of `series` by the order-`N` multiplier.
///
/// The first-order factor `sinc(k ε/N)` is applied `N` times in succession,
/// so two first-order passes at `ε/2` reproduce `N = 2` at `ε` bit for bit.
/// `α₀` is left untouched.
pub fn filter_series(series: &FourierSeries, spec: FilterSpec) -> Result<FourierSeries> {
    spec.validate()?;
    let p = series.period_half_width();
    if spec.range > p {
        return Err(Error::RangeExceedsPeriod {
            range: spec.range,
            half_width: p,
        });
    }
    let sub = angular_range(spec.range, p) / spec.order as f64;
    Ok(series.map_modes(|k, mut a, mut b| {
        let m = sinc(k as f64 * sub);
        for _ in 0..spec.order {
            a *= m;
            b *= m;
        }
        (a, b)
    }))
}

/// Derivative of the first-order filtered function:
/// `(f(x+ε) - f(x-ε)) / (2ε)`.
pub fn filtered_derivative_at<F: Fn(f64) -> f64>(f: F, eps: f64, x: f64) -> Result<f64> {
    check_eps(eps)?;
    let right = finite(&f, x + eps)?;
    let left = finite(&f, x - eps)?;
    Ok((right - left) / (2.0 * eps))
}

/// First-order filtered value `(1/2ε) ∫_{x-ε}^{x+ε} f`, by Gauss-Legendre
/// quadrature on each half-window. Nodes never land on `x` or `x ± ε`,
/// so a jump sitting there does not bias the result.
pub fn filtered_value_at<F: Fn(f64) -> f64>(f: F, eps: f64, x: f64) -> Result<f64> {
    check_eps(eps)?;
    const PANELS: usize = 64;
    const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let width = eps / PANELS as f64;
    let mut sum = 0.0;
    for start in [x - eps, x] {
        for p in 0..PANELS {
            let center = start + (p as f64 + 0.5) * width;
            for (t, w) in NODES.iter().zip(WEIGHTS) {
                sum += w * 0.5 * width * finite(&f, center + 0.5 * width * t)?;
            }
        }
    }
    Ok(sum / (2.0 * eps))
}

/// Limit of `f_ε(x0)` along `eps_sequence`: the last value, accepted when
/// the step between successive values is shrinking.
pub fn midpoint_limit_check<F: Fn(f64) -> f64>(f: F, x0: f64, eps_sequence: &[f64]) -> Result<f64> {
    limit_along(eps_sequence, |eps| filtered_value_at(&f, eps, x0))
}

/// Limit of `f_ε'(x0)` along `eps_sequence`, using [`filtered_derivative_at`].
pub fn derivative_limit_check<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    eps_sequence: &[f64],
) -> Result<f64> {
    limit_along(eps_sequence, |eps| filtered_derivative_at(&f, eps, x0))
}

fn limit_along<G: Fn(f64) -> Result<f64>>(eps_sequence: &[f64], g: G) -> Result<f64> {
    if eps_sequence.len() < 4 {
        return Err(invalid("eps_sequence", "need at least four ranges"));
    }
    let decreasing = eps_sequence.windows(2).all(|w| w[1] < w[0]);
    if !decreasing || !eps_sequence.iter().all(|&e| e > 0.0) {
        return Err(invalid(
            "eps_sequence",
            "ranges must be positive and strictly decreasing",
        ));
    }
    let values = eps_sequence.iter().map(|&e| g(e)).collect::<Result<Vec<_>>>()?;
    let n = values.len();
    let last = values[n - 1];
    let first_step = (values[1] - values[0]).abs();
    let last_step = (values[n - 1] - values[n - 2]).abs();
    if last_step <= 0.75 * first_step || last_step <= 1e-9 * (1.0 + last.abs()) {
        Ok(last)
    } else {
        Err(Error::NonConvergentTrend {
            first_step,
            last_step,
        })
    }
}

/// Term-wise second derivative: `α_k, β_k → -(kπ/P)² α_k, -(kπ/P)² β_k`.
pub fn second_derivative(series: &FourierSeries) -> FourierSeries {
    let scale = PI / series.period_half_width();
    series.map_modes(|k, a, b| {
        let w = k as f64 * scale;
        let f = -(w * w);
        (f * a, f * b)
    })
}

/// Largest coefficient difference between filtering the second derivative
/// and differentiating the filtered series.
pub fn commutation_residual(series: &FourierSeries, spec: FilterSpec) -> Result<f64> {
    let a = filter_series(&second_derivative(series), spec)?;
    let b = second_derivative(&filter_series(series, spec)?);
    let diff = a
        .cos_coeffs()
        .iter()
        .zip(b.cos_coeffs())
        .chain(a.sin_coeffs().iter().zip(b.sin_coeffs()))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(diff.max((a.half_mean() - b.half_mean()).abs()))
}

/// Filters `cos(kx)` and `sin(kx)` sampled on `samples` periodic nodes of
/// `[-π, π)` with the first-order filter and returns the least-squares
/// amplitude ratios `(cos, sin)`. Both approximate `sin(kε)/(kε)`.
pub fn eigenfunction_check(k: usize, eps: f64, samples: usize) -> Result<(f64, f64)> {
    if k < 1 {
        return Err(invalid("k", "mode index must be at least 1"));
    }
    if !(eps > 0.0 && eps <= PI) {
        return Err(invalid("epsilon", format!("need 0 < ε ≤ π, got {eps}")));
    }
    let kf = k as f64;
    let spec = FilterSpec::first_order(eps)?;
    let ratio = |g: &dyn Fn(f64) -> f64| -> Result<f64> {
        let input = SampledFunction::periodic(g, samples)?;
        let output = filter_samples(&input, spec)?;
        let (num, den) = input
            .samples()
            .iter()
            .zip(output.samples())
            .fold((0.0, 0.0), |(n, d), (u, v)| (n + u * v, d + u * u));
        Ok(num / den)
    };
    Ok((ratio(&|x| (kf * x).cos())?, ratio(&|x| (kf * x).sin())?))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(invalid("epsilon", format!("range must be positive and finite, got {eps}")))
    }
}

fn finite<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x })
    }
}
