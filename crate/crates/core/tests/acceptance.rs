//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};

use common::*;
use dpg_coupling::assembly::{build_normal_equations, OperatorBlocks, ProblemData};
use dpg_coupling::bem::{self, slp_panel_integral, BasisOrder, BemMatrices, BemQuadrature};
use dpg_coupling::experiment::{
    run_convergence, ConvergenceReport, Domain, ExperimentConfig, Manufactured, SolverChoice,
};
use dpg_coupling::linalg::csc_symmetry_defect;
use dpg_coupling::mesh::{make_square_mesh, Mesh};
use dpg_coupling::solver::{galerkin_defect, solve_dpg, solve_spd};
use dpg_coupling::spaces::{interpolate_trial, TrialDofLayout};

const LEVELS: usize = 5;
const SMOOTH_WINDOW: (f64, f64) = (0.85, 1.15);
const SINGULAR_WINDOW: (f64, f64) = (0.55, 0.78);
const COINCIDENT_TOL: f64 = 1e-10;
const GRAM_SYMMETRY_TOL: f64 = 1e-13;
const DIPOLE_FACTOR: f64 = 1.8;
const A_SYMMETRY_TOL: f64 = 1e-12;
const ORTHOGONALITY_TOL: f64 = 1e-10;
const CONSTANT_DATA_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn run(domain: Domain, solver: SolverChoice) -> Result<ConvergenceReport, String> {
    let mut config = ExperimentConfig::new(domain, LEVELS);
    config.solver = solver;
    run_convergence(&config, |_, _| {}).map_err(|e| e.to_string())
}

/// Observed decay rates vs N between the last two levels.
fn last_rates(report: &ConvergenceReport) -> [f64; 3] {
    let r = report.rates_n().last().copied().unwrap();
    [-r[0], -r[1], -r[2]]
}

fn criterion_1(square: &ConvergenceReport) -> Outcome {
    let r = last_rates(square);
    let msg = format!("rates energy {:.3}, u {:.3}, sigma {:.3}", r[0], r[1], r[2]);
    if r.iter().all(|&x| within(x, SMOOTH_WINDOW)) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_2(lshape: &ConvergenceReport) -> Outcome {
    let r = last_rates(lshape);
    let msg = format!("rates energy {:.3}, u {:.3}, sigma {:.3}", r[0], r[1], r[2]);
    if within(r[0], SINGULAR_WINDOW) && within(r[2], SINGULAR_WINDOW) && within(r[1], SMOOTH_WINDOW) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3(reports: &[(&str, &ConvergenceReport)]) -> Outcome {
    let mut failures = Vec::new();
    for (name, rep) in reports {
        let trace: Vec<f64> = rep.records.iter().map(|r| r.err_trace_l2).collect();
        let flux: Vec<f64> = rep.records.iter().map(|r| r.err_flux_l2).collect();
        if rep.records.len() < 4 || !decreasing(&trace) {
            failures.push(format!("{name} trace {}", sci(&trace)));
        }
        if !decreasing(&flux) {
            failures.push(format!("{name} flux {}", sci(&flux)));
        }
        for k in 0..4 {
            let p: Vec<f64> = rep.records.iter().map(|r| r.probes[k].abs()).collect();
            if !decreasing(&p) {
                failures.push(format!("{name} probe {k} {}", sci(&p)));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{} levels, trace, flux and 4 probes decreasing on both domains", LEVELS))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_4(both: &ConvergenceReport) -> Outcome {
    let cross = both.cross.as_ref().ok_or("no reference results")?;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (r, c) in both.records.iter().zip(cross) {
        let bound = 2.0 * (r.err_trace_l2 + c.jn_err_trace_l2);
        worst = worst.max(c.gap_trace_l2 / bound);
        ok &= c.gap_trace_l2 <= bound;
    }
    let gaps: Vec<f64> = cross.iter().map(|c| c.gap_trace_l2).collect();
    let msg = format!("max gap / bound {worst:.3e}, gaps {}", sci(&gaps));
    if ok && decreasing(&gaps) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn coincident_closed_form(h: f64) -> f64 {
    h * h / (2.0 * PI) * (1.5 - h.ln())
}

fn criterion_5(meshes: &[Mesh]) -> Outcome {
    let quad = BemQuadrature::default();
    let mut failures = Vec::new();

    // closed form checked against the oracle first, then the code against it
    for h in [1.0, 0.3, 0.05, 0.003125] {
        let a = panel([0.0, 0.0], [h, 0.0]);
        let oracle: f64 = (0..4).map(|k| pair_oracle(&a, &a, k / 2, k % 2, slp_kernel)).sum();
        let exact = coincident_closed_form(h);
        if (oracle - exact).abs() > COINCIDENT_TOL * exact.abs() {
            failures.push(format!("closed form vs oracle at h={h}"));
        }
        let code = slp_panel_integral(&a, &a, BasisOrder::Constant, BasisOrder::Constant, &quad)
            .map_err(|e| e.to_string())?
            .get(0, 0);
        if (code - exact).abs() > COINCIDENT_TOL * exact.abs() {
            failures.push(format!("coincident entry {code} vs {exact} at h={h}"));
        }
    }

    for mesh in meshes {
        let bl = mesh.boundary_loop();
        let bem = match BemMatrices::assemble(bl, quad) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("G_psi on {} triangles: {e}", mesh.n_triangles()));
                continue;
            }
        };
        let g = bem.g_psi();
        let mut defect: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                defect = defect.max((g[(i, j)] - g[(j, i)]).abs());
            }
        }
        if defect > GRAM_SYMMETRY_TOL {
            failures.push(format!("G_psi symmetry {defect:e}"));
        }
        let k = bem.double_layer();
        for (p, a) in bl.panels.iter().enumerate() {
            for (q, b) in bl.panels.iter().enumerate() {
                let offset = dpg_coupling::geometry::sub(a.start, b.start);
                let collinear = a.normal == b.normal
                    && dpg_coupling::geometry::dot(offset, b.normal).abs() < 1e-15;
                if collinear {
                    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        if k[(2 * p + i, 2 * q + j)] != 0.0 {
                            failures.push(format!("collinear K block ({p},{q}) nonzero"));
                        }
                    }
                }
            }
        }
    }

    let dip = standard_dipole();
    let rule = quad.data_rule();
    let mut residuals = Vec::new();
    for n in [2, 4, 8, 16] {
        let mesh = make_square_mesh(0.1, n).map_err(|e| e.to_string())?;
        let bl = mesh.boundary_loop();
        let bem = BemMatrices::assemble(bl, quad).map_err(|e| e.to_string())?;
        let trace = bem::project_p1disc(bl, &rule, |p, _| dip.value(p));
        let flux = bem::project_p1disc(bl, &rule, |p, nrm| dip.normal_derivative(p, nrm));
        residuals.push(bem.residual_l2(&bem.representation_residual(&flux, &trace)));
    }
    let factors: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    if factors.iter().any(|&f| f < DIPOLE_FACTOR) {
        failures.push(format!("dipole residual factors {factors:.3?}"));
    }

    if failures.is_empty() {
        Ok(format!(
            "coincident entries, G_psi on {} meshes, collinear K, dipole factors {factors:.2?}",
            meshes.len()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_6(meshes: &[(Domain, Mesh)]) -> Outcome {
    let quad = BemQuadrature::default();
    let mut failures = Vec::new();
    let mut worst_sym: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut worst_const: f64 = 0.0;
    let constant = ProblemData::new(|_| 0.0, |_| 1.0, |_, _| 0.0);
    for (domain, mesh) in meshes {
        let exact = Manufactured::new(*domain);
        let data = exact.data();
        let bem = BemMatrices::assemble(mesh.boundary_loop(), quad).map_err(|e| e.to_string())?;
        let tri = mesh.n_triangles();

        let ops = OperatorBlocks::assemble(mesh, &bem, &data).map_err(|e| e.to_string())?;
        let normal = build_normal_equations(&ops).map_err(|e| e.to_string())?;
        let sym = csc_symmetry_defect(&normal.matrix);
        worst_sym = worst_sym.max(sym);
        if sym > A_SYMMETRY_TOL {
            failures.push(format!("{tri}: A symmetry {sym:e}"));
        }
        // the factorization fails unless A is SPD
        let x = match solve_spd(&normal.matrix, &normal.rhs) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("{tri}: {e}"));
                continue;
            }
        };
        let (res, scale) = galerkin_defect(&ops, &x).map_err(|e| e.to_string())?;
        worst_orth = worst_orth.max(res / scale);
        if res > ORTHOGONALITY_TOL * scale {
            failures.push(format!("{tri}: orthogonality {:e}", res / scale));
        }
        let layout = TrialDofLayout::new(mesh);
        let interp = interpolate_trial(mesh, &layout, |p| exact.u(p), |p| exact.grad(p));
        let e_sol = ops.energy_error(&x).map_err(|e| e.to_string())?;
        let e_int = ops.energy_error(&interp).map_err(|e| e.to_string())?;
        if e_sol > e_int {
            failures.push(format!("{tri}: energy {e_sol:e} > interpolant {e_int:e}"));
        }

        let (_, sol) = solve_dpg(mesh, &bem, &constant).map_err(|e| e.to_string())?;
        let mut dev: f64 = 0.0;
        for s in &sol.sigma {
            dev = dev.max(s[0].abs()).max(s[1].abs());
        }
        for v in sol.u.iter().chain(&sol.uhat) {
            dev = dev.max((v - 1.0).abs());
        }
        for v in &sol.sighat {
            dev = dev.max(v.abs());
        }
        worst_const = worst_const.max(dev);
        if dev > CONSTANT_DATA_TOL {
            failures.push(format!("{tri}: constant data deviation {dev:e}"));
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "{} meshes: symmetry {worst_sym:.1e}, orthogonality {worst_orth:.1e}, constant data {worst_const:.1e}",
            meshes.len()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_dpg-coupling"))
            .args(["--domain", "lshape", "--levels", "4", "--solver", "both", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("run {k} exited with {}", status.status));
        }
        let csv = std::fs::read(&out).map_err(|e| e.to_string())?;
        let aux = std::fs::read(dir.path().join(format!("run{k}.aux.csv"))).map_err(|e| e.to_string())?;
        outputs.push((csv, aux));
    }
    if outputs[0] == outputs[1] {
        Ok(format!("{} bytes identical across two runs", outputs[0].0.len()))
    } else {
        Err("CSV output differs between runs".into())
    }
}

fn report(n: usize, title: &str, outcome: Outcome) -> bool {
    match outcome {
        Ok(msg) => {
            println!("PASS [{n}] {title}: {msg}");
            true
        }
        Err(msg) => {
            println!("FAIL [{n}] {title}: {msg}");
            false
        }
    }
}

fn main() -> ExitCode {
    let square = run(Domain::Square, SolverChoice::Both);
    let lshape = run(Domain::Lshape, SolverChoice::Dpg);
    let family = domain_family(LEVELS);
    let meshes: Vec<Mesh> = family.iter().map(|(_, m)| m.clone()).collect();

    let mut ok = true;
    ok &= report(1, "smooth solution rates", square.as_ref().map_err(Clone::clone).and_then(criterion_1));
    ok &= report(2, "singular solution rates", lshape.as_ref().map_err(Clone::clone).and_then(criterion_2));
    let c3 = match (&square, &lshape) {
        (Ok(s), Ok(l)) => criterion_3(&[("square", s), ("lshape", l)]),
        _ => Err("experiment failed".into()),
    };
    ok &= report(3, "boundary Cauchy data and exterior probes", c3);
    ok &= report(4, "agreement with the reference coupling", square.as_ref().map_err(Clone::clone).and_then(criterion_4));
    ok &= report(5, "boundary element suite", criterion_5(&meshes));
    ok &= report(6, "DPG algebra suite", criterion_6(&family));
    ok &= report(7, "determinism", criterion_7());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
