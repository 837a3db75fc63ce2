//! Fast self-test run by `omech check`: the Lyapunov solver against the
//! time-domain oracle, closed-form Gaussian states and a few sweep
//! invariants on coarse grids.

use nalgebra::Matrix2;
use omech_core::gaussian::{lyapunov_residual, residual_tolerance, PHYSICALITY_TOL};
use omech_core::{
    diffusion_matrix, drift_matrix, integrate_covariance_oracle, log_negativity, preset,
    run_sweep_with, solve_lyapunov, steady_state, thermal_occupation, BipartiteCm, Figure,
    OracleSettings, Parallelism, SweepSpec, SystemParams,
};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail,
    }
}

fn failed(name: &'static str, detail: impl ToString) -> CheckResult {
    result(name, false, detail.to_string())
}

fn fig3_curve(label: &str, count: usize) -> SweepSpec {
    preset(Figure::Fig3)
        .expect("fig3 preset")
        .into_iter()
        .find(|s| s.label == label)
        .expect("fig3 curve")
        .with_grid_count(count)
}

fn oracle() -> CheckResult {
    const NAME: &str = "lyapunov solver vs time-domain oracle";
    let spec = fig3_curve("9GHz", 5);
    let mut worst: f64 = 0.0;
    for x in spec.grid.values() {
        let (p, det) = spec.point(x);
        let wm = p.omega_m;
        let op = steady_state(&p, det.delta_c * wm, det.delta_w.map(|d| d * wm));
        let (a, d) = (drift_matrix(&p, &op), diffusion_matrix(&p, &op));
        let v = match solve_lyapunov(&a, &d) {
            Ok(v) => v,
            Err(e) => return failed(NAME, e),
        };
        let o = match integrate_covariance_oracle(&a, &d, OracleSettings::for_omega_m(wm)) {
            Ok(o) => o,
            Err(e) => return failed(NAME, e),
        };
        if lyapunov_residual(&a, &d, &v) > residual_tolerance(&a, &d, &v) {
            return failed(NAME, format!("residual above tolerance at Δ_w = {x}"));
        }
        worst = worst.max((v.matrix() - o.matrix()).amax());
    }
    result(
        NAME,
        worst <= 1e-6,
        format!("max entry difference {worst:.2e} over 5 points"),
    )
}

fn closed_forms() -> CheckResult {
    const NAME: &str = "closed-form Gaussian states";
    let mut worst: f64 = 0.0;
    for r in [0.0f64, 0.1, 0.5, 1.0, 2.0] {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let b = BipartiteCm {
            v1: Matrix2::identity() * c,
            v2: Matrix2::identity() * c,
            v3: Matrix2::new(s, 0.0, 0.0, -s),
        };
        match log_negativity(&b) {
            Ok(e) => worst = worst.max((e - 2.0 * r).abs()),
            Err(e) => return failed(NAME, e),
        }
    }

    let p = SystemParams {
        power_c: 0.0,
        power_w: [0.0; 2],
        ..SystemParams::reference()
    };
    let op = steady_state(&p, p.omega_m, [0.0; 2]);
    let thermal = match solve_lyapunov(&drift_matrix(&p, &op), &diffusion_matrix(&p, &op)) {
        Ok(v) => v.get(0, 0),
        Err(e) => return failed(NAME, e),
    };
    let rel = (thermal / (thermal_occupation(p.omega_m, p.temperature) + 0.5) - 1.0).abs();
    result(
        NAME,
        worst <= 1e-10 && rel <= 1e-10,
        format!("TMSV (r ≤ 2) |E_N − 2r| ≤ {worst:.1e}, thermal mechanics rel. err {rel:.1e}"),
    )
}

fn symmetry() -> CheckResult {
    const NAME: &str = "equal-frequency curves symmetric in Δ_w";
    let mut worst: f64 = 0.0;
    for label in ["3GHz", "300GHz"] {
        let spec = fig3_curve(label, 41);
        let rows = match run_sweep_with(&spec, Parallelism::Parallel) {
            Ok(r) => r,
            Err(e) => return failed(NAME, e),
        };
        let n = rows.len();
        for i in 0..n {
            match (rows[i].negativity[0], rows[n - 1 - i].negativity[0]) {
                (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
                _ => return failed(NAME, format!("{label}: point {i} not solved")),
            }
        }
    }
    result(NAME, worst <= 1e-9, format!("max asymmetry {worst:.2e}"))
}

fn physical_and_deterministic() -> CheckResult {
    const NAME: &str = "physical covariances, serial = parallel";
    let mut min_eig = f64::INFINITY;
    for fig in [Figure::Fig2a, Figure::Fig2b, Figure::Fig6] {
        for spec in preset(fig).expect("preset") {
            let spec = spec.with_grid_count(21);
            let (Ok(a), Ok(b)) = (
                run_sweep_with(&spec, Parallelism::Serial),
                run_sweep_with(&spec, Parallelism::Parallel),
            ) else {
                return failed(NAME, format!("{fig}/{}: invalid spec", spec.label));
            };
            if format!("{a:?}") != format!("{b:?}") {
                return failed(
                    NAME,
                    format!("{fig}/{}: serial and parallel rows differ", spec.label),
                );
            }
            if let Some(e) = a.iter().find_map(|r| r.error.clone()) {
                return failed(NAME, format!("{fig}/{}: {e}", spec.label));
            }
            min_eig = a
                .iter()
                .filter_map(|r| r.min_uncertainty_eig)
                .fold(min_eig, f64::min);
        }
    }
    result(
        NAME,
        min_eig >= -PHYSICALITY_TOL,
        format!("min eig(V + iΩ/2) = {min_eig:.2e}"),
    )
}

pub fn run_all() -> Vec<CheckResult> {
    vec![
        oracle(),
        closed_forms(),
        symmetry(),
        physical_and_deterministic(),
    ]
}
