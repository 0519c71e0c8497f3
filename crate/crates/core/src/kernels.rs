//! Exact piecewise-polynomial filter kernels.
//!
//! The order-`N` kernel of range `ε` is the `N`-fold convolution of the box
//! kernel of half-width `ε/N` (constant-range convention). Its support stays
//! `[-ε, ε]` for every `N`, split into `N` equal pieces of degree `N - 1`.
//! The growing-range variant of range `Nε` is `order_n_kernel(N, N * ε)`.
//!
//! Pieces store their polynomial in the centred local variable
//! `t = u - (lo + hi)/2`, which keeps high-order pieces well conditioned.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fourier::FourierSeries;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    /// `coeffs[i]` multiplies `t^i`, with `t = u - center()`.
    pub coeffs: Vec<f64>,
}

impl Piece {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Value of the polynomial at `u` (no support check).
    pub fn eval(&self, u: f64) -> f64 {
        horner(&self.coeffs, u - self.center())
    }

    /// `m`-th derivative of the polynomial at `u`.
    pub fn derivative(&self, m: usize, u: f64) -> f64 {
        let t = u - self.center();
        let mut acc = 0.0;
        for i in (m..self.coeffs.len()).rev() {
            acc = acc * t + self.coeffs[i] * falling(i, m);
        }
        acc
    }

    /// Exact integral of the polynomial over `[lo, hi]`.
    pub fn integral(&self) -> f64 {
        let half = 0.5 * self.width();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(i, c)| 2.0 * c * half.powi(i as i32 + 1) / (i + 1) as f64)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseKernel {
    order: usize,
    range: f64,
    pieces: Vec<Piece>,
    /// `(breakpoint, value)`, the value being the mean of the lateral limits.
    jump_values: Vec<(f64, f64)>,
}

impl PiecewiseKernel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Half-width of the support.
    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn jump_values(&self) -> &[(f64, f64)] {
        &self.jump_values
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().map(|p| p.lo).collect();
        b.extend(self.pieces.last().map(|p| p.hi));
        b
    }

    fn tolerance(&self) -> f64 {
        1e-12 * self.range.max(1.0)
    }

    /// Kernel value at `u = x - x'`. Breakpoints take the mean of their
    /// lateral limits.
    pub fn eval(&self, u: f64) -> f64 {
        let tol = self.tolerance();
        if let Some(&(_, v)) = self.jump_values.iter().find(|(b, _)| (u - b).abs() <= tol) {
            return v;
        }
        match self.pieces.iter().find(|p| p.lo < u && u < p.hi) {
            Some(p) => p.eval(u),
            None => 0.0,
        }
    }

    /// Exact integral over the support.
    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(Piece::integral).sum()
    }

    /// Left and right limits of the `m`-th derivative at breakpoint `index`.
    /// Outside the support both the kernel and its derivatives vanish.
    pub fn lateral_derivatives(&self, index: usize, m: usize) -> (f64, f64) {
        let n = self.pieces.len();
        let left = if index == 0 {
            0.0
        } else {
            let p = &self.pieces[index - 1];
            p.derivative(m, p.hi)
        };
        let right = if index == n {
            0.0
        } else {
            let p = &self.pieces[index];
            p.derivative(m, p.lo)
        };
        (left, right)
    }

    fn from_pieces(order: usize, range: f64, pieces: Vec<Piece>) -> Self {
        let mut kernel = Self {
            order,
            range,
            pieces,
            jump_values: Vec::new(),
        };
        let n = kernel.pieces.len();
        kernel.jump_values = (0..=n)
            .map(|i| {
                let (l, r) = kernel.lateral_derivatives(i, 0);
                let b = if i < n { kernel.pieces[i].lo } else { kernel.pieces[n - 1].hi };
                (b, 0.5 * (l + r))
            })
            .collect();
        kernel
    }
}

/// The box kernel `1/(2ε)` on `(-ε, ε)`, `1/(4ε)` at `±ε`.
pub fn first_order_kernel(eps: f64) -> Result<PiecewiseKernel> {
    check_range(eps)?;
    let piece = Piece {
        lo: -eps,
        hi: eps,
        coeffs: vec![1.0 / (2.0 * eps)],
    };
    Ok(PiecewiseKernel::from_pieces(1, eps, vec![piece]))
}

/// Exact convolution `(a * b)(u) = ∫ a(s) b(u - s) ds`.
pub fn convolve(a: &PiecewiseKernel, b: &PiecewiseKernel) -> PiecewiseKernel {
    let range = a.range + b.range;
    let tol = 1e-12 * range.max(1.0);
    let mut contributions: Vec<Piece> = Vec::new();
    for p in &a.pieces {
        for q in &b.pieces {
            convolve_pieces(p, q, tol, &mut contributions);
        }
    }

    let mut cuts: Vec<f64> = contributions.iter().flat_map(|c| [c.lo, c.hi]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= tol);

    let degree = contributions.iter().map(Piece::degree).max().unwrap_or(0);
    let mut pieces: Vec<Piece> = cuts
        .windows(2)
        .map(|w| Piece {
            lo: w[0],
            hi: w[1],
            coeffs: vec![0.0; degree + 1],
        })
        .collect();
    for c in &contributions {
        for piece in pieces
            .iter_mut()
            .filter(|g| g.lo >= c.lo - tol && g.hi <= c.hi + tol)
        {
            let shifted = taylor_shift(&c.coeffs, piece.center() - c.center());
            for (acc, v) in piece.coeffs.iter_mut().zip(shifted) {
                *acc += v;
            }
        }
    }
    PiecewiseKernel::from_pieces(a.order + b.order, range, pieces)
}

/// Order-`N` kernel of constant range `ε`: `N` box filters of range `ε/N`.
pub fn order_n_kernel(n: usize, eps: f64) -> Result<PiecewiseKernel> {
    if n < 1 {
        return Err(invalid("order", "kernel order must be at least 1"));
    }
    check_range(eps)?;
    let unit = first_order_kernel(eps / n as f64)?;
    let mut kernel = unit.clone();
    for _ in 1..n {
        kernel = convolve(&kernel, &unit);
    }
    // Snap the support ends onto ±ε; the iterated sums of ε/N can be off by an ulp.
    kernel.range = eps;
    if let Some(first) = kernel.pieces.first_mut() {
        first.lo = -eps;
    }
    if let Some(last) = kernel.pieces.last_mut() {
        last.hi = eps;
    }
    Ok(PiecewiseKernel::from_pieces(kernel.order, eps, kernel.pieces))
}

/// `sin(x)/x`, equal to 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// First-order multiplier `sinc(kε)` of mode `k`.
pub fn first_order_multiplier(eps: f64, k: usize) -> f64 {
    sinc(k as f64 * eps)
}

/// Fourier multiplier of the order-`N` filter of range `ε` on mode `k`:
/// `[sin(kε/N)/(kε/N)]^N`, and 1 for `N = 0` or `k = 0`.
///
/// The power is formed by `N` successive multiplications, matching the
/// coefficient update of `N` first-order passes bit for bit.
pub fn multiplier(n: usize, eps: f64, k: i64) -> Result<f64> {
    if k < 0 {
        return Err(invalid("k", format!("mode index must be non-negative, got {k}")));
    }
    if n == 0 || k == 0 {
        return Ok(1.0);
    }
    check_range(eps)?;
    let m = first_order_multiplier(eps / n as f64, k as usize);
    Ok((0..n).fold(1.0, |acc, _| acc * m))
}

/// Truncated Fourier series of the order-`N` kernel on `[-π, π]`.
///
/// `N = 0` gives the Dirac delta series with non-decaying coefficients `1/π`;
/// it is returned as is and classifies as divergent.
pub fn kernel_series(n: usize, eps: f64, k_max: usize) -> Result<FourierSeries> {
    check_range(eps)?;
    if eps > PI {
        return Err(invalid(
            "epsilon",
            format!("range {eps} must not exceed the periodic half-width π"),
        ));
    }
    let cos = (1..=k_max)
        .map(|k| multiplier(n, eps, k as i64).map(|m| m / PI))
        .collect::<Result<Vec<_>>>()?;
    FourierSeries::new(1.0 / PI, cos, vec![0.0; k_max])
}

fn check_range(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(invalid("epsilon", format!("range must be positive and finite, got {eps}")))
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// `i (i-1) ... (i-m+1)`
fn falling(i: usize, m: usize) -> f64 {
    (0..m).map(|j| (i - j) as f64).product()
}

fn binomial_row(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| (1..=k).fold(1.0, |acc, j| acc * (n + 1 - j) as f64 / j as f64).round())
        .collect()
}

/// Coefficients of `p(t + d)` given those of `p(t)`.
fn taylor_shift(coeffs: &[f64], d: f64) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    if d == 0.0 {
        return out;
    }
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            out[j] += d * out[j + 1];
        }
    }
    out
}

/// Multiplies two univariate polynomials.
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Integration limit in the local variable `σ = s - c_p` of the left factor:
/// either a constant or `t + offset`.
#[derive(Clone, Copy)]
enum Limit {
    Fixed(f64),
    Moving(f64),
}

/// Adds the pieces of `p * q` (each restricted to its interval) to `out`.
fn convolve_pieces(p: &Piece, q: &Piece, tol: f64, out: &mut Vec<Piece>) {
    let mut ends = [p.lo + q.lo, p.lo + q.hi, p.hi + q.lo, p.hi + q.hi];
    ends.sort_by(f64::total_cmp);
    let cp = p.center();
    let cq = q.center();
    for w in ends.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= tol {
            continue;
        }
        let co = 0.5 * (lo + hi);
        // s ranges over [max(p.lo, u - q.hi), min(p.hi, u - q.lo)].
        let lower = if p.lo >= co - q.hi {
            Limit::Fixed(p.lo - cp)
        } else {
            Limit::Moving(co - q.hi - cp)
        };
        let upper = if p.hi <= co - q.lo {
            Limit::Fixed(p.hi - cp)
        } else {
            Limit::Moving(co - q.lo - cp)
        };

        // q(u - s) = Q(t - σ + d) with d = c_o - c_p - c_q.
        let qd = taylor_shift(&q.coeffs, co - cp - cq);
        // Integrand as Σ B[a][b] t^a σ^b.
        let dp = p.coeffs.len();
        let dq = qd.len();
        let mut bivariate = vec![vec![0.0; dp + dq]; dq];
        for (j, &qj) in qd.iter().enumerate() {
            let binom = binomial_row(j);
            for (m, &c) in binom.iter().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                for (i, &pi) in p.coeffs.iter().enumerate() {
                    bivariate[j - m][i + m] += pi * qj * c * sign;
                }
            }
        }
        let antiderivative: Vec<Vec<f64>> = bivariate
            .iter()
            .map(|row| {
                let mut r = vec![0.0; row.len() + 1];
                for (b, &v) in row.iter().enumerate() {
                    r[b + 1] = v / (b + 1) as f64;
                }
                r
            })
            .collect();
        let at = |limit: Limit| -> Vec<f64> {
            let mut acc = vec![0.0; dp + 2 * dq + 2];
            for (a, row) in antiderivative.iter().enumerate() {
                match limit {
                    Limit::Fixed(c) => {
                        let v: f64 = row.iter().rev().fold(0.0, |s, &x| s * c + x);
                        acc[a] += v;
                    }
                    Limit::Moving(c) => {
                        // Σ_b row[b] (t + c)^b, times t^a.
                        let mut poly = vec![0.0];
                        for &x in row.iter().rev() {
                            poly = poly_mul(&poly, &[c, 1.0]);
                            poly[0] += x;
                        }
                        for (i, v) in poly.iter().enumerate() {
                            acc[a + i] += v;
                        }
                    }
                }
            }
            acc
        };
        let top = at(upper);
        let bottom = at(lower);
        let mut coeffs: Vec<f64> = top.iter().zip(&bottom).map(|(x, y)| x - y).collect();
        // Degree is at most deg p + deg q + 1.
        coeffs.truncate(dp + dq);
        out.push(Piece { lo, hi, coeffs });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_kernel_values() {
        let k = first_order_kernel(0.5).unwrap();
        assert_eq!(k.eval(0.0), 1.0);
        assert_eq!(k.eval(0.5), 0.5);
        assert_eq!(k.eval(-0.5), 0.5);
        assert_eq!(k.eval(0.7), 0.0);
        assert!(first_order_kernel(0.0).is_err());
        assert!(first_order_kernel(-1.0).is_err());
    }

    #[test]
    fn two_half_boxes_make_the_unit_triangle() {
        let half = first_order_kernel(0.5).unwrap();
        let tri = convolve(&half, &half);
        assert_eq!(tri.order(), 2);
        assert_eq!(tri.pieces().len(), 2);
        for &u in &[-1.0, -0.75, -0.3, 0.0, 0.2, 0.6, 1.0] {
            let expected = 1.0 - f64::abs(u);
            assert!((tri.eval(u) - expected).abs() < 1e-14, "u={u}");
        }
        assert_eq!(tri.eval(1.5), 0.0);
    }

    #[test]
    fn doubled_range_triangle() {
        let unit = first_order_kernel(0.5).unwrap();
        let tri = convolve(&unit, &unit);
        assert!((tri.eval(0.0) - 1.0).abs() < 1e-14);
        assert_eq!(tri.range(), 1.0);
        assert!((tri.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_one_matches_box() {
        assert_eq!(order_n_kernel(1, 0.5).unwrap(), first_order_kernel(0.5).unwrap());
        assert!(order_n_kernel(0, 0.5).is_err());
    }

    #[test]
    fn order_two_triangle_apex() {
        let k = order_n_kernel(2, 1.0).unwrap();
        assert!((k.eval(0.0) - 1.0).abs() < 1e-14);
        assert!((k.eval(0.5) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn multiplier_values() {
        assert!(multiplier(1, PI, 1).unwrap().abs() < 1e-15);
        assert_eq!(multiplier(1, 0.3, 0).unwrap(), 1.0);
        assert_eq!(multiplier(0, 0.3, 17).unwrap(), 1.0);
        assert!(multiplier(1, 0.3, -1).is_err());
        // sin(1.5)/1.5
        assert!((multiplier(1, 0.5, 3).unwrap() - 0.664_996_657_736_036_6).abs() < 1e-15);
        let m = sinc(0.25);
        assert_eq!(multiplier(2, 0.5, 1).unwrap(), m * m);
    }

    #[test]
    fn kernel_series_layout() {
        let s = kernel_series(1, 0.5, 8).unwrap();
        assert_eq!(s.half_mean(), 1.0 / PI);
        assert!(s.sin_coeffs().iter().all(|&b| b == 0.0));
        assert_eq!(s.alpha(2), sinc(1.0) / PI);
        assert!(kernel_series(1, 3.2, 8).is_err());
        let delta = kernel_series(0, 0.5, 8).unwrap();
        assert!(delta.cos_coeffs().iter().all(|&a| a == 1.0 / PI));
    }

    #[test]
    fn taylor_shift_matches_direct_evaluation() {
        let p = [1.0, -2.0, 0.5, 3.0];
        let shifted = taylor_shift(&p, 0.7);
        for &t in &[-1.0, 0.0, 0.3, 2.0] {
            assert!((horner(&shifted, t) - horner(&p, t + 0.7)).abs() < 1e-12);
        }
    }
}
