//! Separation-of-variables solutions of three boundary-value problems, in
//! unfiltered and filtered form.
//!
//! All three are series over odd modes `k = 2j + 1`. Filtering the boundary
//! or initial data with the first-order filter multiplies mode `k` by
//! `sin(πkε/L)/(πkε/L)` (string and box) or `sin(kϵ)/(kϵ)` (cylinder, with
//! an angular range).

mod scan;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::FourierSeries;
use crate::kernels::sinc;
use crate::ops::angular_range;

pub use scan::{divergence_scan, ScanCurve, ScanPoint, DEFAULT_SCAN_MODES};

/// Default number of odd modes for field evaluation.
pub const DEFAULT_MODES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Problem {
    /// String of length `L` released from rest from a triangle of height `h`;
    /// waves travel at speed `ν`.
    PluckedString { height: f64, length: f64, speed: f64 },
    /// Box `[0, L] × [0, h]` with the top wall at `V₀` and the others grounded.
    BoxPotential { v0: f64, length: f64, height: f64 },
    /// Cylinder of radius `r₀` with surface temperature `±u₀` on the upper
    /// and lower halves. `conductance` is the material constant `cμκ`.
    CylinderHeat { u0: f64, radius: f64, conductance: f64 },
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::PluckedString { .. } => "plucked_string",
            Problem::BoxPotential { .. } => "box_potential",
            Problem::CylinderHeat { .. } => "cylinder_heat",
        }
    }

    pub fn parameters(&self) -> BTreeMap<&'static str, f64> {
        match *self {
            Problem::PluckedString {
                height,
                length,
                speed,
            } => [("h", height), ("L", length), ("nu", speed)].into(),
            Problem::BoxPotential { v0, length, height } => {
                [("V0", v0), ("L", length), ("h", height)].into()
            }
            Problem::CylinderHeat {
                u0,
                radius,
                conductance,
            } => [("u0", u0), ("r0", radius), ("c_mu_kappa", conductance)].into(),
        }
    }

    pub fn fields(&self) -> &'static [Field] {
        match self {
            Problem::PluckedString { .. } => &[Field::Position, Field::Velocity, Field::Acceleration],
            Problem::BoxPotential { .. } => &[Field::Potential, Field::Ex, Field::Ey],
            Problem::CylinderHeat { .. } => &[Field::Temperature, Field::FluxR, Field::FluxTheta],
        }
    }

    /// Largest admissible filter range: `L/2` for string and box, `π/2` for
    /// the cylinder (exclusive).
    fn range_limit(&self) -> f64 {
        match *self {
            Problem::PluckedString { length, .. } | Problem::BoxPotential { length, .. } => {
                0.5 * length
            }
            Problem::CylinderHeat { .. } => 0.5 * PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Position,
    Velocity,
    Acceleration,
    Potential,
    Ex,
    Ey,
    Temperature,
    FluxR,
    FluxTheta,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Position => "position",
            Field::Velocity => "velocity",
            Field::Acceleration => "acceleration",
            Field::Potential => "potential",
            Field::Ex => "ex",
            Field::Ey => "ey",
            Field::Temperature => "temperature",
            Field::FluxR => "flux_r",
            Field::FluxTheta => "flux_theta",
        }
    }
}

/// A field and a point: `(x, t)` for the string, `(x, y)` for the box,
/// `(r, θ)` for the cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldQuery {
    pub field: Field,
    pub point: (f64, f64),
}

/// A partial sum with its convergence sidecar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldValue {
    pub value: f64,
    /// Spread `max - min` of the partial sums over the last half of the modes.
    pub oscillation: f64,
    /// Set when the series is divergent at this point and the value is only
    /// a partial sum.
    pub divergent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModalSolution {
    problem: Problem,
    filter_range: f64,
    modes: usize,
}

/// Validates and builds a solution family. `eps = 0` is the unfiltered case.
pub fn make_solution(problem: Problem, eps: f64, modes: usize) -> Result<ModalSolution> {
    ModalSolution::new(problem, eps, modes)
}

impl ModalSolution {
    pub fn new(problem: Problem, eps: f64, modes: usize) -> Result<Self> {
        for (name, value) in problem.parameters() {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(
                    "parameters",
                    format!("{name} must be positive and finite, got {value}"),
                ));
            }
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(invalid("epsilon", format!("range must be non-negative, got {eps}")));
        }
        let limit = problem.range_limit();
        if eps >= limit {
            return Err(invalid(
                "epsilon",
                format!("range {eps} must stay below {limit} for the {}", problem.name()),
            ));
        }
        if modes == 0 {
            return Err(invalid("modes", "need at least one mode"));
        }
        Ok(Self {
            problem,
            filter_range: eps,
            modes,
        })
    }

    pub fn problem(&self) -> Problem {
        self.problem
    }

    pub fn filter_range(&self) -> f64 {
        self.filter_range
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn is_filtered(&self) -> bool {
        self.filter_range > 0.0
    }

    /// Filter factor of odd mode `k`; 1 when unfiltered.
    pub fn filter_factor(&self, k: usize) -> f64 {
        if !self.is_filtered() {
            return 1.0;
        }
        let angle = match self.problem {
            Problem::PluckedString { length, .. } | Problem::BoxPotential { length, .. } => {
                angular_range(self.filter_range, length)
            }
            Problem::CylinderHeat { .. } => self.filter_range,
        };
        sinc(k as f64 * angle)
    }

    /// JSON-ready description of the solution family.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "problem": self.problem.name(),
            "parameters": self.problem.parameters(),
            "filter_range": self.filter_range,
            "modes": self.modes,
        })
    }

    fn check_field(&self, field: Field) -> Result<()> {
        if self.problem.fields().contains(&field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                field: field.name(),
                problem: self.problem.name(),
            })
        }
    }

    fn check_point(&self, (a, b): (f64, f64)) -> Result<()> {
        let tol = 1e-12;
        let inside = match self.problem {
            Problem::PluckedString { length, .. } => {
                (-tol..=length * (1.0 + tol)).contains(&a) && b >= 0.0
            }
            Problem::BoxPotential { length, height, .. } => {
                (-tol..=length * (1.0 + tol)).contains(&a) && (-tol..=height * (1.0 + tol)).contains(&b)
            }
            Problem::CylinderHeat { radius, .. } => {
                (0.0..=radius * (1.0 + tol)).contains(&a) && (-PI - tol..=PI + tol).contains(&b)
            }
        };
        if inside && a.is_finite() && b.is_finite() {
            Ok(())
        } else {
            Err(Error::OutsideDomain(a, b))
        }
    }

    /// Whether the unfiltered series for `field` diverges at `point`: the
    /// string acceleration everywhere, the box field on the top wall and the
    /// cylinder flux on the surface.
    pub fn is_divergent_series(&self, field: Field, point: (f64, f64)) -> bool {
        if self.is_filtered() {
            return false;
        }
        let on = |v: f64, target: f64| (v - target).abs() <= 1e-12 * target.max(1.0);
        match (self.problem, field) {
            (Problem::PluckedString { .. }, Field::Acceleration) => true,
            (Problem::BoxPotential { height, .. }, Field::Ex | Field::Ey) => on(point.1, height),
            (Problem::CylinderHeat { radius, .. }, Field::FluxR | Field::FluxTheta) => {
                on(point.0, radius)
            }
            _ => false,
        }
    }

    /// Term `j` (mode `k = 2j + 1`) split into an amplitude and the factor
    /// that oscillates along the scan coordinate. The term is their product.
    pub(crate) fn mode_parts(&self, field: Field, (a, b): (f64, f64), j: usize) -> (f64, f64) {
        let k = 2 * j + 1;
        let kf = k as f64;
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        let sigma = self.filter_factor(k);
        match self.problem {
            Problem::PluckedString {
                height,
                length,
                speed,
            } => {
                let (x, t) = (a, b);
                let w = PI * kf / length;
                let (st, ct) = (w * speed * t).sin_cos();
                let trig = (w * x).sin();
                let amp = match field {
                    Field::Position => 8.0 * height / (PI * PI) * sign / (kf * kf) * ct,
                    Field::Velocity => -8.0 * height * speed / (PI * length) * sign / kf * st,
                    _ => -8.0 * height * speed * speed / (length * length) * sign * ct,
                };
                (amp * sigma, trig)
            }
            Problem::BoxPotential { v0, length, height } => {
                let (x, y) = (a, b);
                let w = PI * kf / length;
                let (sx, cx) = (w * x).sin_cos();
                match field {
                    Field::Potential => (4.0 * v0 / PI / kf * sinh_ratio(w, y, height) * sigma, sx),
                    Field::Ex => (-4.0 * v0 / length * sinh_ratio(w, y, height) * sigma, cx),
                    _ => (-4.0 * v0 / length * cosh_ratio(w, y, height) * sigma, sx),
                }
            }
            Problem::CylinderHeat {
                u0,
                radius,
                conductance,
            } => {
                let (r, theta) = (a, b);
                let rho = r / radius;
                let (st, ct) = (kf * theta).sin_cos();
                let flux = -4.0 * conductance * u0 / (PI * radius) * rho.powi(k as i32 - 1) * sigma;
                match field {
                    Field::Temperature => (4.0 * u0 / PI / kf * rho.powi(k as i32) * sigma, st),
                    Field::FluxR => (flux, st),
                    _ => (flux, ct),
                }
            }
        }
    }

    /// Partial sum of the series for `q.field` at `q.point` through
    /// `modes_upto` odd modes (all modes when `None`), modes ascending.
    ///
    /// Where the unfiltered series diverges the caller must pass
    /// `acknowledge_divergent = true`; the result is then marked divergent.
    pub fn evaluate_field(
        &self,
        q: FieldQuery,
        modes_upto: Option<usize>,
        acknowledge_divergent: bool,
    ) -> Result<FieldValue> {
        self.check_field(q.field)?;
        self.check_point(q.point)?;
        let n = self.modes_upto(modes_upto)?;
        let divergent = self.is_divergent_series(q.field, q.point);
        if divergent && !acknowledge_divergent {
            return Err(Error::DivergentSeries(q.field.name()));
        }
        let (value, oscillation) = sum_with_spread(n, |j| {
            let (amp, trig) = self.mode_parts(q.field, q.point, j);
            amp * trig
        });
        Ok(FieldValue {
            value,
            oscillation,
            divergent,
        })
    }

    fn modes_upto(&self, modes_upto: Option<usize>) -> Result<usize> {
        let n = modes_upto.unwrap_or(self.modes);
        if n > self.modes {
            return Err(Error::TruncationOutOfRange {
                requested: n,
                available: self.modes,
            });
        }
        Ok(n)
    }

    fn require_filtered(&self, what: &'static str) -> Result<()> {
        if self.is_filtered() {
            Ok(())
        } else {
            Err(invalid("epsilon", format!("{what} needs a positive filter range")))
        }
    }

    /// Filtered string acceleration as a sum of eight travelling sine series.
    ///
    /// Each argument is `kπ(L/2 ± ε ± νt ± x)/L`; the shift by `L/2` absorbs
    /// the `(-1)^j` of the modal form.
    pub fn string_acceleration_traveling(&self, x: f64, t: f64, modes_upto: Option<usize>) -> Result<f64> {
        let Problem::PluckedString {
            height,
            length,
            speed,
        } = self.problem
        else {
            return Err(invalid("problem", "travelling form belongs to the plucked string"));
        };
        self.require_filtered("the travelling form")?;
        self.check_point((x, t))?;
        let n = self.modes_upto(modes_upto)?;
        let eps = self.filter_range;
        let a = 0.5 * length;
        let vt = speed * t;
        // (sign, ε sign, νt sign, x sign)
        const TERMS: [(f64, f64, f64, f64); 8] = [
            (1.0, 1.0, -1.0, -1.0),
            (1.0, -1.0, 1.0, 1.0),
            (-1.0, 1.0, 1.0, 1.0),
            (-1.0, -1.0, -1.0, -1.0),
            (-1.0, 1.0, -1.0, 1.0),
            (-1.0, -1.0, 1.0, -1.0),
            (1.0, 1.0, 1.0, -1.0),
            (1.0, -1.0, -1.0, 1.0),
        ];
        let args: Vec<(f64, f64)> = TERMS
            .iter()
            .map(|&(s, se, st, sx)| (s, (a + se * eps + st * vt + sx * x) / length))
            .collect();
        let mut sum = 0.0;
        for j in 0..n {
            let kf = (2 * j + 1) as f64;
            let bracket: f64 = args.iter().map(|&(s, u)| s * (kf * PI * u).sin()).sum();
            sum += bracket / kf;
        }
        Ok(-height * speed * speed / (length * PI * eps) * sum)
    }

    /// Filtered `E_x` on the top wall as a difference of two sine series.
    pub fn box_ex_top_pair_form(&self, x: f64, modes_upto: Option<usize>) -> Result<f64> {
        let Problem::BoxPotential { v0, length, height } = self.problem else {
            return Err(invalid("problem", "pair form belongs to the box potential"));
        };
        self.require_filtered("the pair form")?;
        self.check_point((x, height))?;
        let n = self.modes_upto(modes_upto)?;
        let eps = self.filter_range;
        let mut sum = 0.0;
        for j in 0..n {
            let kf = (2 * j + 1) as f64;
            let w = PI * kf / length;
            sum += ((w * (x - eps)).sin() - (w * (x + eps)).sin()) / kf;
        }
        Ok(2.0 * v0 / (PI * eps) * sum)
    }

    /// Filtered `j_θ` on the cylinder surface as a difference of two sine series.
    pub fn cylinder_flux_pair_form(&self, theta: f64, modes_upto: Option<usize>) -> Result<f64> {
        let Problem::CylinderHeat {
            u0,
            radius,
            conductance,
        } = self.problem
        else {
            return Err(invalid("problem", "pair form belongs to the cylinder"));
        };
        self.require_filtered("the pair form")?;
        self.check_point((radius, theta))?;
        let n = self.modes_upto(modes_upto)?;
        let eps = self.filter_range;
        let mut sum = 0.0;
        for j in 0..n {
            let kf = (2 * j + 1) as f64;
            sum += ((kf * (theta - eps)).sin() - (kf * (theta + eps)).sin()) / kf;
        }
        Ok(2.0 * conductance * u0 / (PI * radius * eps) * sum)
    }

    /// The string position at `t = 0` as a half-range sine series on
    /// `[-L, L]` (period half-width `L`), filter factors included.
    pub fn position_series_at_t0(&self) -> Result<FourierSeries> {
        let Problem::PluckedString { length, .. } = self.problem else {
            return Err(invalid("problem", "position series belongs to the plucked string"));
        };
        let k_max = 2 * self.modes - 1;
        let mut sin = vec![0.0; k_max];
        for j in 0..self.modes {
            let (amp, _) = self.mode_parts(Field::Position, (0.0, 0.0), j);
            sin[2 * j] = amp;
        }
        FourierSeries::with_period(0.0, vec![0.0; k_max], sin, length)
    }

    /// Largest relative residual of the governing equation over the retained
    /// modes. The operator is applied to each mode term by Richardson-extrapolated
    /// central differences at a generic interior point, with steps `0.02/w` for
    /// mode rate `w`; the result is relative to `w² · max|term|` on the stencil.
    pub fn equation_residual(&self) -> f64 {
        const STEP: f64 = 0.02;
        let field = self.problem.fields()[0];
        (0..self.modes)
            .map(|j| {
                let term = |a: f64, b: f64| {
                    let (amp, trig) = self.mode_parts(field, (a, b), j);
                    amp * trig
                };
                let kf = (2 * j + 1) as f64;
                let second = |f: &dyn Fn(f64) -> f64, c: f64, h: f64| {
                    let d = |h: f64| (f(c + h) - 2.0 * f(c) + f(c - h)) / (h * h);
                    (4.0 * d(0.5 * h) - d(h)) / 3.0
                };
                let first = |f: &dyn Fn(f64) -> f64, c: f64, h: f64| {
                    let d = |h: f64| (f(c + h) - f(c - h)) / (2.0 * h);
                    (4.0 * d(0.5 * h) - d(h)) / 3.0
                };
                let (residual, rate, samples) = match self.problem {
                    Problem::PluckedString { length, speed, .. } => {
                        let w = PI * kf / length;
                        let (x, t) = (0.37 * length, 0.23 * length / speed);
                        let (hx, ht) = (STEP / w, STEP / (w * speed));
                        let fxx = second(&|x| term(x, t), x, hx);
                        let ftt = second(&|t| term(x, t), t, ht);
                        let samples = [term(x, t), term(x + hx, t), term(x, t + ht)];
                        (fxx - ftt / (speed * speed), w, samples)
                    }
                    Problem::BoxPotential { length, height, .. } => {
                        let w = PI * kf / length;
                        let (x, y) = (0.37 * length, 0.97 * height);
                        let h = STEP / w;
                        let lap = second(&|x| term(x, y), x, h) + second(&|y| term(x, y), y, h);
                        (lap, w, [term(x, y), term(x + h, y), term(x, y + h)])
                    }
                    Problem::CylinderHeat { radius, .. } => {
                        let (r, theta) = (0.97 * radius, 0.41);
                        let (hr, ht) = (STEP * r / kf, STEP / kf);
                        let ur = first(&|r| term(r, theta), r, hr);
                        let lap = second(&|r| term(r, theta), r, hr)
                            + ur / r
                            + second(&|t| term(r, t), theta, ht) / (r * r);
                        (lap, kf / r, [term(r, theta), term(r + hr, theta), term(r, theta + ht)])
                    }
                };
                let scale = rate * rate * samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if scale > 1e-200 {
                    residual.abs() / scale
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `sinh(wy)/sinh(wh)` without overflow for large `w`.
pub fn sinh_ratio(w: f64, y: f64, h: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    (w * (y - h)).exp() * (-2.0 * w * y).exp_m1() / (-2.0 * w * h).exp_m1()
}

/// `cosh(wy)/sinh(wh)` without overflow for large `w`.
pub fn cosh_ratio(w: f64, y: f64, h: f64) -> f64 {
    (w * (y - h)).exp() * (1.0 + (-2.0 * w * y).exp()) / -(-2.0 * w * h).exp_m1()
}

/// Sum of `term(0..n)` and the spread of the partial sums over the last half.
fn sum_with_spread<F: Fn(usize) -> f64>(n: usize, term: F) -> (f64, f64) {
    let mut sum = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..n {
        sum += term(j);
        if j + 1 > n / 2 {
            lo = lo.min(sum);
            hi = hi.max(sum);
        }
    }
    let spread = if n == 0 { 0.0 } else { hi - lo };
    (sum, spread)
}
