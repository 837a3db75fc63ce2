//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits non-zero if any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::Matrix2;
use omech_core::dynamics::quad;
use omech_core::gaussian::{lyapunov_residual, PHYSICALITY_TOL};
use omech_core::sweep::table::to_csv_string;
use omech_core::{
    diffusion_matrix, drift_matrix, evaluate_point, integrate_covariance_oracle, log_negativity,
    preset, run_sweep, run_sweep_with, solve_lyapunov, stability, steady_state, thermal_occupation,
    BipartiteCm, Bipartition, Figure, Grid, OracleSettings, Parallelism, SweepRow, SweepSpec,
    SystemParams,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fig3_9ghz() -> SweepSpec {
    preset(Figure::Fig3)
        .unwrap()
        .into_iter()
        .find(|s| s.label == "9GHz")
        .expect("fig3 has a 9 GHz curve")
}

fn oracle_equivalence() -> Outcome {
    let spec = fig3_9ghz().with_grid_count(41);
    let mut worst_diff: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    for x in spec.grid.values() {
        let (p, det) = spec.point(x);
        let wm = p.omega_m;
        let op = steady_state(&p, det.delta_c * wm, det.delta_w.map(|d| d * wm));
        let a = drift_matrix(&p, &op);
        let d = diffusion_matrix(&p, &op);
        let v = solve_lyapunov(&a, &d).map_err(|e| format!("solver failed at {x}: {e}"))?;
        let oracle = integrate_covariance_oracle(&a, &d, OracleSettings::for_omega_m(wm))
            .map_err(|e| format!("oracle failed at {x}: {e}"))?;
        worst_diff = worst_diff.max((v.matrix() - oracle.matrix()).amax());
        let tol = 1e-10 * d.matrix().norm().max(1.0);
        worst_residual = worst_residual.max(lyapunov_residual(&a, &d, &v) / tol);
    }
    check(
        worst_diff <= 1e-6 && worst_residual <= 1.0,
        format!("max |V - V_oracle| = {worst_diff:.2e}, max residual/tol = {worst_residual:.2e}"),
    )
}

fn tmsv(r: f64) -> BipartiteCm {
    let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    BipartiteCm {
        v1: Matrix2::identity() * c,
        v2: Matrix2::identity() * c,
        v3: Matrix2::new(s, 0.0, 0.0, -s),
    }
}

fn closed_forms() -> Outcome {
    let vacuum = BipartiteCm {
        v1: Matrix2::identity() * 0.5,
        v2: Matrix2::identity() * 0.5,
        v3: Matrix2::zeros(),
    };
    let e_vac = log_negativity(&vacuum).map_err(|e| e.to_string())?;

    let mut worst_r = 0.0;
    let mut worst_tmsv: f64 = 0.0;
    for r in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let err = (log_negativity(&tmsv(r)).map_err(|e| e.to_string())? - 2.0 * r).abs();
        if err > worst_tmsv {
            (worst_r, worst_tmsv) = (r, err);
        }
    }

    // all couplings off: the mechanics sits in its thermal state
    let p = SystemParams {
        power_c: 0.0,
        power_w: [0.0; 2],
        ..SystemParams::reference()
    };
    let op = steady_state(&p, p.omega_m, [0.3 * p.omega_m, -0.3 * p.omega_m]);
    let v = solve_lyapunov(&drift_matrix(&p, &op), &diffusion_matrix(&p, &op))
        .map_err(|e| e.to_string())?;
    let expected = thermal_occupation(p.omega_m, p.temperature) + 0.5;
    let thermal_rel = [quad::Q, quad::P]
        .iter()
        .map(|&i| (v.get(i, i) / expected - 1.0).abs())
        .fold(0.0, f64::max);

    check(
        e_vac == 0.0 && worst_tmsv <= 1e-10 && thermal_rel <= 1e-10,
        format!(
            "vacuum E_N = {e_vac}, worst TMSV |E_N - 2r| = {worst_tmsv:.2e} (r = {worst_r}), \
             thermal block rel err = {thermal_rel:.2e}"
        ),
    )
}

fn physicality() -> Outcome {
    let mut points = 0;
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for fig in Figure::ALL {
        for spec in preset(fig).unwrap() {
            for row in run_sweep(&spec).map_err(|e| e.to_string())? {
                if let Some(err) = &row.error {
                    failures.push(format!("{fig}/{} #{}: {err}", spec.label, row.index));
                }
                if let Some(m) = row.min_uncertainty_eig {
                    points += 1;
                    worst = worst.min(m);
                }
            }
        }
    }
    check(
        failures.is_empty() && worst >= -PHYSICALITY_TOL,
        format!(
            "{points} stable covariances, min eig(V + iΩ/2) = {worst:.3e}, {} failures{}",
            failures.len(),
            failures
                .first()
                .map(|f| format!(" (first: {f})"))
                .unwrap_or_default()
        ),
    )
}

fn micro_negativity(rows: &[SweepRow]) -> Vec<Option<f64>> {
    rows.iter().map(|r| r.negativity[0]).collect()
}

fn fig3_symmetry() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut unstable = 0;
    for spec in preset(Figure::Fig3).unwrap() {
        let rows = run_sweep(&spec).map_err(|e| e.to_string())?;
        unstable += rows.iter().filter(|r| !r.stable).count();
        let en = micro_negativity(&rows);
        let n = en.len();
        for i in 0..n / 2 {
            if let (Some(a), Some(b)) = (en[i], en[n - 1 - i]) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    check(
        unstable == 0 && worst <= 1e-9,
        format!("max |E_N(Δ) - E_N(-Δ)| = {worst:.2e}, unstable points = {unstable}"),
    )
}

/// Stability edges of the 9/3 GHz pair, found once by bisection and frozen.
fn frozen_window() -> (f64, f64) {
    let text = include_str!("fixtures/fig2_instability_window.txt");
    let mut vals = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().nth(1).unwrap().parse::<f64>().unwrap());
    (vals.next().unwrap(), vals.next().unwrap())
}

fn is_stable(spec: &SweepSpec, x: f64) -> bool {
    let (p, det) = spec.point(x);
    let wm = p.omega_m;
    let op = steady_state(&p, det.delta_c * wm, det.delta_w.map(|d| d * wm));
    stability(&drift_matrix(&p, &op)).unwrap().stable
}

/// Edge between `lo` and `hi`, where stability differs at the two ends.
fn bisect(spec: &SweepSpec, mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = is_stable(spec, lo);
    assert_ne!(s_lo, is_stable(spec, hi));
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if is_stable(spec, mid) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn fig2_window() -> Outcome {
    let mut spec = preset(Figure::Fig2a)
        .unwrap()
        .into_iter()
        .find(|s| s.label == "9GHz_3GHz")
        .expect("9/3 GHz curve");
    spec.grid = Grid::new(-0.8, 0.8, 1601);
    let rows = run_sweep(&spec).map_err(|e| e.to_string())?;
    let unstable: Vec<usize> = rows.iter().filter(|r| !r.stable).map(|r| r.index).collect();
    let (Some(&first), Some(&last)) = (unstable.first(), unstable.last()) else {
        return Err("no unstable point found".into());
    };
    let contiguous = last - first + 1 == unstable.len();
    let positive = rows[first].axis_value > 0.0;
    let scan = (rows[first].axis_value, rows[last].axis_value);

    let en = micro_negativity(&rows);
    let left = en[..first].iter().any(|e| e.is_some_and(|e| e > 0.0));
    let right = en[last + 1..].iter().any(|e| e.is_some_and(|e| e > 0.0));

    let lower = bisect(&spec, rows[first - 1].axis_value, scan.0);
    let upper = bisect(&spec, scan.1, rows[last + 1].axis_value);
    let (f_lo, f_hi) = frozen_window();
    let edges_ok = (lower - f_lo).abs() <= 0.005
        && (upper - f_hi).abs() <= 0.005
        && (scan.0 - f_lo).abs() <= 0.005
        && (scan.1 - f_hi).abs() <= 0.005;

    check(
        contiguous && positive && left && right && edges_ok,
        format!(
            "window ({lower:.6}, {upper:.6}) ω_m vs frozen ({f_lo:.6}, {f_hi:.6}), contiguous = {contiguous}, \
             E_N > 0 left/right = {left}/{right}"
        ),
    )
}

fn fig4_ordering() -> Outcome {
    let curves: Vec<Vec<Option<f64>>> = preset(Figure::Fig4)
        .unwrap()
        .iter()
        .map(|s| run_sweep(s).map(|rows| micro_negativity(&rows)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut compared = 0;
    let mut violations = Vec::new();
    for (i, ((&a, &b), &c)) in curves[0].iter().zip(&curves[1]).zip(&curves[2]).enumerate() {
        if let (Some(a), Some(b), Some(c)) = (a, b, c) {
            compared += 1;
            if !(a >= b && b >= c) {
                violations.push((i, a, b, c));
            }
        }
    }
    check(
        violations.is_empty() && compared > 0,
        format!(
            "{compared} mutually stable points, {} violations{}",
            violations.len(),
            violations
                .first()
                .map(|v| format!(" (first #{}: {:.3e} {:.3e} {:.3e})", v.0, v.1, v.2, v.3))
                .unwrap_or_default()
        ),
    )
}

fn fig5_temperature() -> Outcome {
    let specs = preset(Figure::Fig5).unwrap();
    let hot = specs
        .iter()
        .find(|s| s.label == "300GHz")
        .expect("300 GHz curve");
    let (p, det) = hot.point(10.0);
    let at_10k = evaluate_point(&p, det, &[Bipartition::MICRO])
        .map_err(|e| e.to_string())?
        .negativity(Bipartition::MICRO)
        .ok_or("300 GHz point unstable at 10 K")?;

    let mut crossovers = Vec::new();
    for spec in &specs {
        let rows = run_sweep(spec).map_err(|e| e.to_string())?;
        // first temperature at which the pair is no longer entangled
        let t = rows
            .iter()
            .find(|r| r.negativity[0].is_none_or(|e| e == 0.0))
            .map_or(f64::INFINITY, |r| r.axis_value);
        crossovers.push(t);
    }
    let ordered = crossovers.windows(2).all(|w| w[0] <= w[1]);
    check(
        at_10k > 0.0 && ordered,
        format!("E_N(300 GHz, 10 K) = {at_10k:.4}, crossovers 3/30/300 GHz = {crossovers:.3?} K"),
    )
}

fn fig6_tradeoff() -> (Outcome, String) {
    let spec = preset(Figure::Fig6).unwrap().remove(0);
    let rows = match run_sweep(&spec) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), String::new()),
    };
    let nearest = |target: f64| {
        rows.iter()
            .min_by(|a, b| {
                (a.axis_value - target)
                    .abs()
                    .total_cmp(&(b.axis_value - target).abs())
            })
            .unwrap()
    };
    let col = |pair: &str| {
        spec.bipartitions
            .iter()
            .position(|b| b.label() == pair)
            .unwrap()
    };
    let (om1, om2, mm) = (col("Opto_Micro1"), col("Opto_Micro2"), col("Micro1_Micro2"));
    let describe = |row: &SweepRow| {
        let e = |c: usize| row.negativity[c].map_or("unstable".into(), |e| format!("{e:.4}"));
        format!(
            "Δ_w = {}: Opto_Micro1 = {}, Opto_Micro2 = {}, Micro1_Micro2 = {}",
            row.axis_value,
            e(om1),
            e(om2),
            e(mm)
        )
    };

    let row = nearest(1.0);
    let outcome = match (row.negativity[om1], row.negativity[mm]) {
        (Some(a), Some(b)) => check(a > b, describe(row)),
        _ => Err(format!("unstable: {}", describe(row))),
    };
    (outcome, describe(nearest(-1.0)))
}

fn determinism_and_throughput() -> Outcome {
    let specs = preset(Figure::Fig3).unwrap();
    let render = |par: Parallelism| -> Result<String, String> {
        let mut out = String::new();
        for spec in &specs {
            let rows = run_sweep_with(spec, par).map_err(|e| e.to_string())?;
            out.push_str(&to_csv_string(spec, &rows));
        }
        Ok(out)
    };
    let t0 = Instant::now();
    let serial = render(Parallelism::Serial)?;
    let elapsed = t0.elapsed().as_secs_f64();
    let again = render(Parallelism::Serial)?;
    let parallel = render(Parallelism::Parallel)?;
    let identical = serial == again && serial == parallel;
    check(
        identical && elapsed < 10.0,
        format!(
            "{} points serial in {elapsed:.2} s, repeat and parallel output identical = {identical}",
            specs.len() * specs[0].grid.count
        ),
    )
}

fn main() -> ExitCode {
    let (c8, mirrored) = fig6_tradeoff();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 oracle equivalence", oracle_equivalence()),
        ("2 closed-form Gaussian states", closed_forms()),
        ("3 physicality across presets", physicality()),
        ("4 fig3 detuning symmetry", fig3_symmetry()),
        ("5 fig2 instability window", fig2_window()),
        ("6 fig4 gap ordering", fig4_ordering()),
        ("7 fig5 temperature robustness", fig5_temperature()),
        ("8 fig6 opto-micro vs micro-micro", c8),
        ("9 determinism and throughput", determinism_and_throughput()),
    ];

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    println!("info  fig6 mirrored point, {mirrored}");
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
