//! Partial-sum (Cauchy) diagnostic along a curve of the solution domain.
//!
//! For each point the partial sums `S_n` over `K` modes are split into the
//! windows `(K/8, K/4]`, `(K/4, K/2]` and `(K/2, K]`. Let `osc_i` be the
//! spread `max - min` of `S_n` in window `i`. A convergent series has spreads
//! that shrink from window to window; a logarithmically divergent one keeps
//! them roughly constant, and a growing one makes them increase. A point is
//! flagged when the last spread is above `1e-3` of the local scale and the
//! spreads do not decay.
//!
//! Divergent points generally fall between grid nodes. When a node is not
//! flagged but its last spread is above threshold, the half-cell around it is
//! sub-sampled finely enough to resolve the highest mode, and the worst
//! sub-sample is refined once more.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::{Field, ModalSolution, Problem};
use crate::error::{invalid, Result};
use crate::fourier::{classify_magnitudes, Convergence, ConvergenceReport};

/// Default number of odd modes for scans.
pub const DEFAULT_SCAN_MODES: usize = 8192;

const RELATIVE_THRESHOLD: f64 = 1e-3;
const STEADY: (f64, f64) = (0.75, 1.5);
const GROWTH_FACTOR: f64 = 32.0;
const REFINE_POINTS: usize = 17;
const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanCurve {
    /// Box top wall `y = h`, coordinate `x ∈ [0, L]`.
    TopSurface,
    /// Cylinder surface `r = r₀`, coordinate `θ ∈ [-π, π]`.
    CylinderSurface,
    /// String at a fixed time, coordinate `x ∈ [0, L]`.
    StringAtTime(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub coord: f64,
    pub report: ConvergenceReport,
    /// Spread of the partial sums over the last half of the modes.
    pub oscillation: f64,
    pub flagged: bool,
}

struct Curve {
    lo: f64,
    hi: f64,
    /// Angular rate of the highest-frequency factor per unit coordinate and mode.
    rate: f64,
    point: Box<dyn Fn(f64) -> (f64, f64) + Sync>,
}

fn curve_for(s: &ModalSolution, field: Field, curve: ScanCurve) -> Result<Curve> {
    if !s.problem.fields().contains(&field) {
        return Err(crate::error::Error::FieldMismatch {
            field: field.name(),
            problem: s.problem.name(),
        });
    }
    let mismatch = || invalid("curve", format!("{curve:?} does not lie in the {} domain", s.problem.name()));
    match (curve, s.problem) {
        (ScanCurve::TopSurface, Problem::BoxPotential { length, height, .. }) => Ok(Curve {
            lo: 0.0,
            hi: length,
            rate: PI / length,
            point: Box::new(move |x| (x, height)),
        }),
        (ScanCurve::CylinderSurface, Problem::CylinderHeat { radius, .. }) => Ok(Curve {
            lo: -PI,
            hi: PI,
            rate: 1.0,
            point: Box::new(move |theta| (radius, theta)),
        }),
        (ScanCurve::StringAtTime(t), Problem::PluckedString { length, .. }) if t >= 0.0 => Ok(Curve {
            lo: 0.0,
            hi: length,
            rate: PI / length,
            point: Box::new(move |x| (x, t)),
        }),
        _ => Err(mismatch()),
    }
}

/// Window statistics of the partial sums at one point.
#[derive(Clone, Copy)]
struct Windows {
    osc: [f64; 3],
    last: f64,
    max_abs: f64,
}

fn windows(terms: impl Iterator<Item = f64>, k: usize) -> Windows {
    let bounds = [k / 8, k / 4, k / 2, k];
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut count = [0usize; 3];
    let mut sum = 0.0;
    let mut max_abs: f64 = 0.0;
    for (j, t) in terms.enumerate() {
        sum += t;
        max_abs = max_abs.max(sum.abs());
        let n = j + 1;
        for w in 0..3 {
            if n > bounds[w] && n <= bounds[w + 1] {
                lo[w] = lo[w].min(sum);
                hi[w] = hi[w].max(sum);
                count[w] += 1;
            }
        }
    }
    let mut osc = [0.0; 3];
    for w in 0..3 {
        if count[w] > 0 {
            osc[w] = hi[w] - lo[w];
        }
    }
    Windows {
        osc,
        last: sum,
        max_abs,
    }
}

struct Probe<'a> {
    curve: &'a Curve,
    modes: usize,
    amplitudes: Vec<f64>,
    amp_ref: f64,
    cosine: bool,
}

impl Probe<'_> {
    fn stats(&self, c: f64) -> Windows {
        windows(self.terms(c), self.modes)
    }

    /// Terms `amplitude_j · trig((2j+1)φ)` with the trig factor advanced by
    /// a rotation through `2φ` per mode.
    fn terms(&self, c: f64) -> impl Iterator<Item = f64> + '_ {
        let phi = self.curve.rate * c;
        let (s1, c1) = phi.sin_cos();
        let (s2, c2) = (2.0 * phi).sin_cos();
        let cosine = self.cosine;
        self.amplitudes.iter().scan((c1, s1), move |z, &a| {
            let (re, im) = *z;
            *z = (re * c2 - im * s2, re * s2 + im * c2);
            Some(a * if cosine { re } else { im })
        })
    }

    fn scale(&self, w: &Windows) -> f64 {
        w.max_abs.max(self.amp_ref)
    }

    fn above_threshold(&self, w: &Windows) -> bool {
        w.osc[2] > RELATIVE_THRESHOLD * self.scale(w)
    }

    fn non_decaying(&self, w: &Windows) -> bool {
        if !self.above_threshold(w) {
            return false;
        }
        let r32 = w.osc[2] / w.osc[1];
        let r21 = w.osc[1] / w.osc[0];
        let steady = |r: f64| (STEADY.0..=STEADY.1).contains(&r);
        let growing = r32 > STEADY.1 && r21 > STEADY.1 && w.last.abs() > GROWTH_FACTOR * self.amp_ref;
        (steady(r32) && steady(r21)) || growing
    }

    /// Searches `[c - half, c + half]` for a non-decaying point.
    fn search_cell(&self, c: f64, half: f64) -> Option<Windows> {
        let max_step = 1.0 / (2.0 * self.modes as f64 * self.curve.rate);
        let n = ((2.0 * half / max_step).ceil() as usize).max(2);
        let step = 2.0 * half / n as f64;
        let clamp = |x: f64| x.clamp(self.curve.lo, self.curve.hi);
        let (best, _) = (0..=n)
            .map(|i| clamp(c - half + i as f64 * step))
            .map(|x| (x, self.stats(x).osc[2]))
            .fold((c, f64::NEG_INFINITY), |acc, (x, o)| if o > acc.1 { (x, o) } else { acc });
        (0..REFINE_POINTS)
            .map(|i| clamp(best - step + 2.0 * step * i as f64 / (REFINE_POINTS - 1) as f64))
            .map(|x| self.stats(x))
            .find(|w| self.non_decaying(w))
    }
}

/// Runs the partial-sum diagnostic for `field` at `grid` equally spaced
/// points of `curve` (both ends included), using `modes` odd modes
/// ([`DEFAULT_SCAN_MODES`] when `None`).
///
/// Every point gets the coefficient-envelope classification of its terms;
/// flagged points are then marked divergent (growing if the terms grow,
/// bounded otherwise).
pub fn divergence_scan(
    s: &ModalSolution,
    field: Field,
    curve: ScanCurve,
    grid: usize,
    modes: Option<usize>,
) -> Result<Vec<ScanPoint>> {
    if grid < 2 {
        return Err(invalid("grid", "need at least two scan points"));
    }
    let modes = modes.unwrap_or(DEFAULT_SCAN_MODES);
    if modes < 32 {
        return Err(invalid("modes", "need at least 32 modes for the diagnostic"));
    }
    let curve = curve_for(s, field, curve)?;
    let p0 = (curve.point)(curve.lo);
    let amplitudes: Vec<f64> = (0..modes).map(|j| s.mode_parts(field, p0, j).0).collect();
    let amp_ref = amplitudes.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let probe = Probe {
        curve: &curve,
        modes,
        amplitudes,
        amp_ref,
        cosine: matches!(field, Field::Ex | Field::FluxTheta),
    };
    let spacing = (curve.hi - curve.lo) / (grid - 1) as f64;

    let points = (0..grid)
        .into_par_iter()
        .map(|i| {
            let c = if i + 1 == grid { curve.hi } else { curve.lo + i as f64 * spacing };
            let w = probe.stats(c);
            let found = if probe.non_decaying(&w) {
                Some(w)
            } else if probe.above_threshold(&w) {
                probe.search_cell(c, 0.5 * spacing)
            } else {
                None
            };
            let oscillation = w.osc[2];
            // Terms below rounding level relative to the largest amplitude
            // (e.g. sin(kπ) at the ends) are treated as exact zeros.
            let floor = NOISE_FLOOR * amp_ref;
            let magnitudes: Vec<f64> = probe
                .terms(c)
                .map(|t| if t.abs() <= floor { 0.0 } else { t.abs() })
                .collect();
            let mut report = classify_magnitudes(&magnitudes);
            if let Some(d) = &found {
                if report.classification != Convergence::DivergentGrowingCoeffs {
                    report.classification = Convergence::DivergentBoundedCoeffs;
                }
                report.notes = format!(
                    "partial-sum spreads {:.3e}, {:.3e}, {:.3e} do not decay",
                    d.osc[0], d.osc[1], d.osc[2]
                );
            }
            ScanPoint {
                coord: c,
                report,
                oscillation,
                flagged: found.is_some(),
            }
        })
        .collect();
    Ok(points)
}
