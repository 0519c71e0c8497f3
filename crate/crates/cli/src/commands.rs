use std::f64::consts::PI;

use lowpass::kernels::{kernel_series, multiplier, order_n_kernel, PiecewiseKernel};
use lowpass::ops::{angular_range, FilterSpec};
use lowpass::pde::{divergence_scan, Field, FieldQuery, ModalSolution, Problem, ScanCurve, ScanPoint};
use lowpass::{classify_convergence, Extension, FourierSeries};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::input::{read_samples, read_series};
use crate::output::{Cell, Format, Run, Table};
use crate::{
    BoxArgs, CylinderArgs, DiagnoseArgs, ExampleArgs, ExtensionArg, FilterSamplesArgs,
    FilterSeriesArgs, KernelsArgs, StringArgs,
};

/// Modes compared in the multiplier-vs-quadrature check.
const QUADRATURE_MODES: usize = 32;
const QUADRATURE_TOLERANCE: f64 = 1e-9;
/// Gauss-Legendre panels per kernel piece.
const PANELS: usize = 64;
/// Five-point Gauss-Legendre nodes and weights on [-1, 1].
const GAUSS: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

fn require_grid(name: &str, n: usize) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::usage(format!("--{name} must be at least 2, got {n}")));
    }
    Ok(())
}

/// `∫ K(u) cos(ku) du` by Gauss-Legendre quadrature on each polynomial piece.
fn cosine_moment(kernel: &PiecewiseKernel, k: usize) -> f64 {
    let kf = k as f64;
    let mut total = 0.0;
    for p in kernel.pieces() {
        let half = 0.5 * (p.hi - p.lo) / PANELS as f64;
        for i in 0..PANELS {
            let mid = p.lo + (2 * i + 1) as f64 * half;
            for (t, w) in GAUSS {
                let u = mid + t * half;
                total += w * half * p.eval(u) * (kf * u).cos();
            }
        }
    }
    total
}

pub fn kernels(a: &KernelsArgs) -> CliResult<()> {
    let eps = a.epsilon;
    if !(eps > 0.0 && eps <= PI) {
        return Err(CliError::usage(format!(
            "--epsilon must satisfy 0 < ε ≤ π (the range may not exceed the half-period), got {eps}"
        )));
    }
    require_grid("grid", a.grid)?;
    if a.kmax == 0 {
        return Err(CliError::usage("--kmax must be positive"));
    }
    let mut run = Run::new(&a.out.output, a.out.format)?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for &n in &a.orders.0 {
        let kernel = order_n_kernel(n, eps)?;
        let series = kernel_series(n, eps, a.kmax)?;
        let breaks = kernel.breakpoints();
        let mut table = Table::new(&["u", "value", "fourier"]);
        let (mut worst, mut worst_away) = (0.0f64, 0.0f64);
        for u in linspace(-eps, eps, a.grid) {
            let closed = kernel.eval(u);
            let partial = series.evaluate(u, None)?;
            let diff = (closed - partial).abs();
            worst = worst.max(diff);
            if breaks.iter().all(|b| (u - b).abs() > a.margin) {
                worst_away = worst_away.max(diff);
            }
            table.push(vec![Cell::Num(u), Cell::Num(closed), Cell::Num(partial)]);
        }
        let mut quadrature = 0.0f64;
        for k in 1..=QUADRATURE_MODES {
            let m = multiplier(n, eps, k as i64)?;
            quadrature = quadrature.max((m - cosine_moment(&kernel, k)).abs());
        }
        run.table(&format!("kernel_n{n}"), &table)?;
        let pass = worst_away <= a.tolerance && quadrature <= QUADRATURE_TOLERANCE;
        if worst_away > a.tolerance {
            failures.push(format!(
                "N={n}: closed form vs Fourier discrepancy {worst_away:.3e} > {:.1e}",
                a.tolerance
            ));
        }
        if quadrature > QUADRATURE_TOLERANCE {
            failures.push(format!("N={n}: multiplier vs quadrature {quadrature:.3e}"));
        }
        println!(
            "N={n}: max discrepancy {worst:.3e}, away from breakpoints {worst_away:.3e}, multiplier vs quadrature {quadrature:.3e}"
        );
        reports.push(json!({
            "order": n,
            "max_discrepancy": worst,
            "max_discrepancy_away_from_breakpoints": worst_away,
            "multiplier_vs_quadrature": quadrature,
            "pass": pass,
        }));
    }
    run.json(
        "kernels_report",
        &json!({
            "epsilon": eps,
            "kmax": a.kmax,
            "margin": a.margin,
            "tolerance": a.tolerance,
            "quadrature_modes": QUADRATURE_MODES,
            "quadrature_tolerance": QUADRATURE_TOLERANCE,
            "orders": reports,
        }),
    )?;
    run.finish("kernels", a, json!({ "failures": failures }))?;
    if a.self_check && !failures.is_empty() {
        return Err(CliError::SelfCheck(failures.join("; ")));
    }
    Ok(())
}

fn write_series(run: &mut Run, format: Format, series: &FourierSeries) -> CliResult<()> {
    match format {
        Format::Json => run.json("series", series),
        Format::Csv => {
            let mut table = Table::new(&["k", "alpha", "beta"]);
            table.push(vec![Cell::Int(0), Cell::Num(series.half_mean()), Cell::Num(0.0)]);
            for k in 1..=series.k_max() {
                table.push(vec![
                    Cell::Int(k as i64),
                    Cell::Num(series.alpha(k)),
                    Cell::Num(series.beta(k)),
                ]);
            }
            run.table("series", &table)
        }
    }
}

fn spec_json(spec: FilterSpec) -> Value {
    json!({ "order": spec.order, "range": spec.range, "sub_range": spec.sub_range() })
}

pub fn filter_series(a: &FilterSeriesArgs) -> CliResult<()> {
    let spec = FilterSpec::new(a.filter.order, a.filter.epsilon)?;
    let series = read_series(&a.input, a.half_width)?;
    let filtered = lowpass::filter_series(&series, spec)?;
    let mut run = Run::new(&a.out.output, a.out.format)?;
    write_series(&mut run, a.out.format, &filtered)?;
    let mut filter = spec_json(spec);
    filter["angular_range"] = json!(angular_range(spec.range, series.period_half_width()));
    run.finish(
        "filter-series",
        a,
        json!({ "filter": filter, "k_max": series.k_max(), "period_half_width": series.period_half_width() }),
    )?;
    println!("filtered {} modes", series.k_max());
    Ok(())
}

pub fn filter_samples(a: &FilterSamplesArgs) -> CliResult<()> {
    let spec = FilterSpec::new(a.filter.order, a.filter.epsilon)?;
    let extension = match a.extension {
        ExtensionArg::Periodic => Extension::Periodic,
        ExtensionArg::Zero => Extension::ZeroExtend,
    };
    let (xs, samples) = read_samples(&a.input, extension)?;
    let filtered = lowpass::filter_samples(&samples, spec)?;
    let mut table = Table::new(&["x", "f"]);
    for (x, v) in xs.iter().zip(filtered.samples()) {
        table.push(vec![Cell::Num(*x), Cell::Num(*v)]);
    }
    let mut run = Run::new(&a.out.output, a.out.format)?;
    run.table("samples", &table)?;
    let band = filtered.boundary_band();
    run.finish(
        "filter-samples",
        a,
        json!({
            "filter": spec_json(spec),
            "spacing": samples.spacing(),
            "boundary_band": band,
            "boundary_affected_x": if band == 0 { json!([]) } else {
                json!([[xs[0], xs[band.min(xs.len()) - 1]], [xs[xs.len().saturating_sub(band)], xs[xs.len() - 1]]])
            },
        }),
    )?;
    println!("filtered {} samples (boundary band {band})", xs.len());
    Ok(())
}

fn profile(s: &ModalSolution, field: Field, coords: &[f64], point: &dyn Fn(f64) -> (f64, f64)) -> CliResult<Table> {
    let mut table = Table::new(&["coord", "value", "oscillation", "divergent"]);
    for &c in coords {
        let q = FieldQuery {
            field,
            point: point(c),
        };
        let v = s.evaluate_field(q, None, true)?;
        table.push(vec![
            Cell::Num(c),
            Cell::Num(v.value),
            Cell::Num(v.oscillation),
            Cell::Flag(v.divergent),
        ]);
    }
    Ok(table)
}

fn scan_summary(points: &[ScanPoint]) -> Value {
    let flagged: Vec<f64> = points.iter().filter(|p| p.flagged).map(|p| p.coord).collect();
    let mut classes = serde_json::Map::new();
    for p in points {
        let label = p.report.classification.label();
        let n = classes.get(label).and_then(Value::as_u64).unwrap_or(0);
        classes.insert(label.to_string(), json!(n + 1));
    }
    let divergent = !flagged.is_empty() || points.iter().any(|p| p.report.classification.is_divergent());
    json!({
        "verdict": if divergent { "divergent" } else { "convergent" },
        "flagged": flagged.len(),
        "flagged_at": flagged,
        "classes": classes,
    })
}

/// What one example run tabulates.
struct Layout<'a> {
    name: &'static str,
    problem: Problem,
    epsilon: f64,
    /// Profile coordinate range and the map to a domain point.
    span: (f64, f64),
    point: &'a dyn Fn(f64) -> (f64, f64),
    scan: (Field, ScanCurve),
}

fn example(
    layout: Layout,
    args: &ExampleArgs,
    config: &impl Serialize,
    mut extra: impl FnMut(&mut Run, &str, &ModalSolution) -> CliResult<()>,
) -> CliResult<()> {
    if layout.epsilon.is_nan() || layout.epsilon <= 0.0 {
        return Err(CliError::usage(format!("--epsilon must be positive, got {}", layout.epsilon)));
    }
    require_grid("grid", args.grid)?;
    require_grid("scan-grid", args.scan_grid)?;
    let coords: Vec<f64> = linspace(layout.span.0, layout.span.1, args.grid).collect();
    let variants = [("unfiltered", 0.0), ("filtered", layout.epsilon)];
    let solutions = variants
        .iter()
        .map(|&(_, e)| ModalSolution::new(layout.problem, e, args.modes))
        .collect::<lowpass::Result<Vec<_>>>()?;
    let mut run = Run::new(&args.out.output, args.out.format)?;
    let mut manifests = serde_json::Map::new();
    let mut scans = serde_json::Map::new();
    let (scan_field, curve) = layout.scan;
    for ((variant, _), s) in variants.iter().zip(&solutions) {
        for &field in layout.problem.fields() {
            let table = profile(s, field, &coords, layout.point)?;
            run.table(&format!("{}_{}_{variant}", layout.name, field.name()), &table)?;
        }
        extra(&mut run, variant, s)?;
        let points = divergence_scan(s, scan_field, curve, args.scan_grid, Some(args.scan_modes))?;
        let mut table = Table::new(&["coord", "class", "oscillation"]);
        for p in &points {
            table.push(vec![
                Cell::Num(p.coord),
                Cell::Text(p.report.classification.label().into()),
                Cell::Num(p.oscillation),
            ]);
        }
        run.table(&format!("{}_scan_{variant}", layout.name), &table)?;
        let summary = scan_summary(&points);
        println!(
            "{variant} {}: {} ({} flagged points)",
            scan_field.name(),
            summary["verdict"].as_str().unwrap_or_default(),
            summary["flagged"]
        );
        scans.insert(variant.to_string(), summary);
        manifests.insert(variant.to_string(), s.manifest());
    }
    run.finish(
        layout.name,
        config,
        json!({
            "solutions": manifests,
            "scan": { "field": scan_field.name(), "curve": curve, "results": scans },
        }),
    )?;
    Ok(())
}

pub fn string(a: &StringArgs) -> CliResult<()> {
    let problem = Problem::PluckedString {
        height: a.height,
        length: a.length,
        speed: a.speed,
    };
    let t = a.time;
    let point = move |x: f64| (x, t);
    let layout = Layout {
        name: "string",
        problem,
        epsilon: a.epsilon,
        span: (0.0, a.length),
        point: &point,
        scan: (Field::Acceleration, ScanCurve::StringAtTime(t)),
    };
    let coords: Vec<f64> = linspace(0.0, a.length, a.example.grid.max(2)).collect();
    example(layout, &a.example, a, |run, variant, s| {
        let table = profile(s, Field::Position, &coords, &|x| (x, 0.0))?;
        run.table(&format!("string_initial_{variant}"), &table)
    })
}

pub fn boxed(a: &BoxArgs) -> CliResult<()> {
    let problem = Problem::BoxPotential {
        v0: a.v0,
        length: a.length,
        height: a.height,
    };
    let y = a.y.unwrap_or(a.height);
    let point = move |x: f64| (x, y);
    let layout = Layout {
        name: "box",
        problem,
        epsilon: a.epsilon,
        span: (0.0, a.length),
        point: &point,
        scan: (Field::Ey, ScanCurve::TopSurface),
    };
    example(layout, &a.example, a, |_, _, _| Ok(()))
}

pub fn cylinder(a: &CylinderArgs) -> CliResult<()> {
    let problem = Problem::CylinderHeat {
        u0: a.u0,
        radius: a.radius,
        conductance: a.conductance,
    };
    let r = a.r.unwrap_or(a.radius);
    let point = move |theta: f64| (r, theta);
    let layout = Layout {
        name: "cylinder",
        problem,
        epsilon: a.epsilon,
        span: (-PI, PI),
        point: &point,
        scan: (Field::FluxR, ScanCurve::CylinderSurface),
    };
    example(layout, &a.example, a, |_, _, _| Ok(()))
}

pub fn diagnose(a: &DiagnoseArgs) -> CliResult<()> {
    let mut series = read_series(&a.input, a.half_width)?;
    if let Some(k) = a.kmax {
        if k > series.k_max() {
            return Err(CliError::usage(format!(
                "--kmax {k} exceeds the {} modes in the input",
                series.k_max()
            )));
        }
        series = FourierSeries::with_period(
            series.half_mean(),
            series.cos_coeffs()[..k].to_vec(),
            series.sin_coeffs()[..k].to_vec(),
            series.period_half_width(),
        )?;
    }
    let mut stages = vec![("input", classify_convergence(&series)?)];
    if let Some(eps) = a.epsilon {
        let spec = FilterSpec::new(a.order, eps)?;
        stages.push(("filtered", classify_convergence(&lowpass::filter_series(&series, spec)?)?));
    }
    let mut table = Table::new(&["stage", "class", "decay_exponent", "tail_fraction"]);
    for (stage, r) in &stages {
        println!("{stage}: {} (decay exponent {:.3})", r.classification.label(), r.decay_exponent);
        table.push(vec![
            Cell::Text(stage.to_string()),
            Cell::Text(r.classification.label().into()),
            Cell::Num(r.decay_exponent),
            Cell::Num(r.tail_fraction),
        ]);
    }
    let mut run = Run::new(&a.out.output, a.out.format)?;
    run.table("diagnose", &table)?;
    let reports: serde_json::Map<String, Value> = stages
        .iter()
        .map(|(stage, r)| Ok((stage.to_string(), serde_json::to_value(r)?)))
        .collect::<CliResult<_>>()?;
    run.finish("diagnose", a, json!({ "k_max": series.k_max(), "reports": reports }))?;
    Ok(())
}
