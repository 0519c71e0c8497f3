//! Closed-form test functions. Every jump takes the midpoint of its
//! lateral limits, the value a Fourier series converges to there.

use std::f64::consts::PI;

pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Unit step with value 1/2 at the origin.
pub fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `x` wrapped into `(-π, π]`.
pub fn wrap(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// 2π-periodic extension of `sign`, zero at every multiple of π.
pub fn square_wave(x: f64) -> f64 {
    let w = wrap(x);
    if w == PI {
        0.0
    } else {
        sign(w)
    }
}

/// 2π-periodic extension of `π/2 - |x|`, a continuous zero-mean triangle.
pub fn triangle_wave(x: f64) -> f64 {
    PI / 2.0 - wrap(x).abs()
}

/// Plucked-string initial shape: height `h` at `L/2`, zero at both ends.
pub fn plucked_triangle(x: f64, length: f64, height: f64) -> f64 {
    if !(0.0..=length).contains(&x) {
        return 0.0;
    }
    height * (1.0 - (2.0 * x / length - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_midpoints() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(step(0.0), 0.5);
        assert_eq!(square_wave(PI), 0.0);
        assert_eq!(square_wave(-PI), 0.0);
        assert_eq!(square_wave(1.0), 1.0);
        assert_eq!(square_wave(1.0 + 2.0 * PI), 1.0);
    }

    #[test]
    fn triangles() {
        assert_eq!(triangle_wave(0.0), PI / 2.0);
        assert_eq!(triangle_wave(PI), -PI / 2.0);
        assert_eq!(triangle_wave(-PI), -PI / 2.0);
        assert_eq!(plucked_triangle(0.5, 1.0, 2.0), 2.0);
        assert_eq!(plucked_triangle(0.0, 1.0, 2.0), 0.0);
        assert_eq!(plucked_triangle(0.25, 1.0, 2.0), 1.0);
    }
}
