use std::f64::consts::PI;

use lowpass::kernels::multiplier;
use lowpass::ops::{
    commutation_residual, derivative_limit_check, filter_samples, filter_series,
    midpoint_limit_check, FilterSpec, DEFAULT_EPS_SEQUENCE,
};
use lowpass::shapes::{square_wave, step, triangle_wave};
use lowpass::{
    classify_convergence, coefficients_from_samples, Extension, FourierSeries, SampledFunction,
};
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

/// A named test function.
type Shape = Box<dyn Fn(f64) -> f64>;

fn random_series(rng: &mut StdRng, k_max: usize) -> FourierSeries {
    let cos = (0..k_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sin = (0..k_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
    FourierSeries::new(rng.gen_range(-1.0..1.0), cos, sin).unwrap()
}

/// `Σ_j n! ε^{2j} x^{n-2j} / ((2j+1)! (n-2j)!)`, the window average of `x^n`.
fn filtered_power(n: i32, eps: f64, x: f64) -> f64 {
    let fact = |m: i32| (1..=m).map(f64::from).product::<f64>();
    (0..=n / 2)
        .map(|j| fact(n) * eps.powi(2 * j) * x.powi(n - 2 * j) / (fact(2 * j + 1) * fact(n - 2 * j)))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn linear_functions_pass_unchanged(a in -5.0f64..5.0, b in -5.0f64..5.0, eps in 0.01f64..1.0) {
        let f = SampledFunction::sample(|x| a + b * x, -PI, PI, 4001, Extension::ZeroExtend).unwrap();
        let g = filter_samples(&f, FilterSpec::first_order(eps).unwrap()).unwrap();
        for (i, x) in f.nodes().enumerate() {
            if x.abs() <= PI - eps - 1e-9 {
                prop_assert!((g.samples()[i] - f.samples()[i]).abs() < 1e-10);
            } else {
                prop_assert!(g.is_boundary_affected(i));
            }
        }
    }

    #[test]
    fn filtering_preserves_the_integral(eps in 0.05f64..1.0, order in 1usize..4, centre in -0.5f64..0.5) {
        // Compactly supported bump well inside the interval.
        let bump = |x: f64| {
            let r = (x - centre) / 1.5;
            if r.abs() < 1.0 { (1.0 - r * r).powi(3) } else { 0.0 }
        };
        let f = SampledFunction::sample(bump, -PI, PI, 8001, Extension::ZeroExtend).unwrap();
        let g = filter_samples(&f, FilterSpec::new(order, eps).unwrap()).unwrap();
        prop_assert!((g.trapezoid_integral() - f.trapezoid_integral()).abs() < 1e-10);
    }

    #[test]
    fn half_mean_is_untouched(seed in 0u64..1000, order in 1usize..5, eps in 0.01f64..3.1) {
        let s = random_series(&mut StdRng::seed_from_u64(seed), 16);
        let f = filter_series(&s, FilterSpec::new(order, eps).unwrap()).unwrap();
        prop_assert_eq!(f.half_mean(), s.half_mean());
        prop_assert_eq!(f.k_max(), s.k_max());
    }

    #[test]
    fn extra_damping_never_worsens_classification(p in -1.0f64..3.0, eps in 0.05f64..3.0, seed in 0u64..1000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let k_max = 256;
        let cos: Vec<f64> = (1..=k_max)
            .map(|k| rng.gen_range(0.5..1.0) * (k as f64).powf(-p))
            .collect();
        let s = FourierSeries::new(0.0, cos, vec![0.0; k_max]).unwrap();
        let before = classify_convergence(&s).unwrap().classification;
        let f = filter_series(&s, FilterSpec::first_order(eps).unwrap()).unwrap();
        let after = classify_convergence(&f).unwrap().classification;
        prop_assert!(after <= before, "{:?} -> {:?}", before, after);
    }
}

#[test]
fn powers_follow_the_closed_form() {
    let eps = 0.2;
    let f_grid = |n: i32| SampledFunction::sample(move |x| x.powi(n), -1.0, 1.0, 200_001, Extension::ZeroExtend);
    for n in 0..=6 {
        let f = f_grid(n).unwrap();
        let g = filter_samples(&f, FilterSpec::first_order(eps).unwrap()).unwrap();
        for (i, x) in f.nodes().enumerate().step_by(97) {
            if x.abs() <= 1.0 - eps - 1e-9 {
                let expected = filtered_power(n, eps, x);
                assert!((g.samples()[i] - expected).abs() < 1e-8, "n={n} x={x}");
            }
        }
    }
    // Spot check of the n = 2 closed form: x² + ε²/3.
    assert!((filtered_power(2, 0.3, 0.7) - (0.49 + 0.03)).abs() < 1e-15);
}

#[test]
fn multiplier_and_quadrature_agree_on_corpus() {
    let mut rng = StdRng::seed_from_u64(7);
    let random = random_series(&mut rng, 64);
    let corpus: Vec<(&str, Shape)> = vec![
        ("sign", Box::new(square_wave)),
        ("triangle", Box::new(triangle_wave)),
        ("square", Box::new(|x: f64| x * x)),
        ("cos3x", Box::new(|x: f64| (3.0 * x).cos())),
        ("random", Box::new(move |x| random.evaluate(x, None).unwrap())),
    ];
    for (name, f) in &corpus {
        let samples = SampledFunction::periodic(f, 1 << 16).unwrap();
        for spec in [FilterSpec::new(1, 0.5).unwrap(), FilterSpec::new(2, 0.5).unwrap()] {
            let via_samples = coefficients_from_samples(&filter_samples(&samples, spec).unwrap(), 64).unwrap();
            let via_series = filter_series(&coefficients_from_samples(&samples, 64).unwrap(), spec).unwrap();
            assert!((via_samples.half_mean() - via_series.half_mean()).abs() < 1e-6, "{name}");
            for k in 1..=64 {
                assert!((via_samples.alpha(k) - via_series.alpha(k)).abs() < 1e-6, "{name} alpha_{k}");
                assert!((via_samples.beta(k) - via_series.beta(k)).abs() < 1e-6, "{name} beta_{k}");
            }
        }
    }
}

#[test]
fn periodic_output_wraps_around() {
    // The node at hi is the node at lo; recompute it from a grid shifted by one period.
    let f = SampledFunction::periodic(|x| (x.sin() * 2.0).exp(), 1024).unwrap();
    let g = filter_samples(&f, FilterSpec::new(2, 0.7).unwrap()).unwrap();
    let shifted =
        SampledFunction::sample(|x| (x.sin() * 2.0).exp(), PI, 3.0 * PI, 1024, Extension::Periodic).unwrap();
    let gs = filter_samples(&shifted, FilterSpec::new(2, 0.7).unwrap()).unwrap();
    assert!((g.samples()[0] - gs.samples()[0]).abs() < 1e-12);
    assert_eq!(g.boundary_band(), 0);
    // Symmetric input gives symmetric output across the seam.
    let h = SampledFunction::periodic(|x| x.cos(), 1024).unwrap();
    let gh = filter_samples(&h, FilterSpec::first_order(0.9).unwrap()).unwrap();
    for i in 1..512 {
        assert!((gh.samples()[i] - gh.samples()[1024 - i]).abs() < 1e-12);
    }
}

#[test]
fn delta_spreads_into_the_box_kernel() {
    let m = 8193;
    let (lo, hi) = (-4.0, 4.0);
    let h = (hi - lo) / (m - 1) as f64;
    let mut samples = vec![0.0; m];
    samples[m / 2] = 1.0 / h;
    let f = SampledFunction::from_samples(samples, lo, hi, Extension::ZeroExtend).unwrap();
    let eps = 0.5;
    let g = filter_samples(&f, FilterSpec::first_order(eps).unwrap()).unwrap();
    assert!((g.trapezoid_integral() - 1.0).abs() < 1e-12);
    for (i, x) in g.nodes().enumerate() {
        let v = g.samples()[i];
        if x.abs() < eps - h {
            assert!((v - 1.0 / (2.0 * eps)).abs() < 1e-12, "x={x}");
        } else if x.abs() > eps + h {
            assert_eq!(v, 0.0, "x={x}");
        }
    }
}

#[test]
fn small_ranges_approach_identity_quadratically() {
    let f = SampledFunction::periodic(|x| x.cos() + 0.5 * (2.0 * x).sin(), 1 << 16).unwrap();
    let errors: Vec<f64> = [0.4, 0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&eps| {
            let g = filter_samples(&f, FilterSpec::first_order(eps).unwrap()).unwrap();
            g.samples().iter().zip(f.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    for w in errors.windows(2) {
        let slope = (w[0] / w[1]).log2();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }
}

#[test]
fn midpoint_and_derivative_limits() {
    let eps = DEFAULT_EPS_SEQUENCE;
    assert!((midpoint_limit_check(step, 0.0, &eps).unwrap() - 0.5).abs() < 1e-3);
    assert!(midpoint_limit_check(f64::signum, 0.0, &eps).unwrap().abs() < 1e-3);
    // Jump of height 3 at 1 with lateral limits 1 and 4.
    let jump = |x: f64| (if x < 1.0 { 1.0 } else { 4.0 }) + (x - 1.0) * 0.5;
    assert!((midpoint_limit_check(jump, 1.0, &eps).unwrap() - 2.5).abs() < 1e-3);
    assert!(derivative_limit_check(f64::abs, 0.0, &eps).unwrap().abs() < 1e-15);
    // Kink with lateral slopes 2 and -1: the limit is their mean.
    let kink = |x: f64| if x < 0.0 { 2.0 * x } else { -x };
    assert!((derivative_limit_check(kink, 0.0, &eps).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn commutation_over_random_series() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let s = random_series(&mut rng, 64);
        for order in 1..=3 {
            let r = commutation_residual(&s, FilterSpec::new(order, 0.7).unwrap()).unwrap();
            assert!(r <= 1e-12, "residual {r}");
        }
    }
}

#[test]
fn eigenvalues_separate_modes() {
    for k in 1..=64i64 {
        for kp in k + 1..=64 {
            let a = (multiplier(1, 0.49, k).unwrap() - multiplier(1, 0.49, kp).unwrap()).abs();
            let b = (multiplier(1, 0.50, k).unwrap() - multiplier(1, 0.50, kp).unwrap()).abs();
            assert!(a > 1e-9 || b > 1e-9, "k={k} k'={kp}");
        }
    }
}
