//! Manufactured solutions and uniform-refinement convergence runs.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::assembly::ProblemData;
use crate::bem::{BemMatrices, BemQuadrature};
use crate::geometry::Point;
use crate::jn::{self, JnSolution};
use crate::mesh::{make_lshape_mesh, make_square_mesh, refine_uniform, Mesh};
use crate::solver::{self, ErrorQuadrature};
use crate::spaces::{TestDofLayout, TrialDofLayout};
use crate::{Error, Result};

/// Half width of the square `(−w, w)²`.
pub const SQUARE_HALF_WIDTH: f64 = 0.1;
/// Side of each of the three squares forming the L-shape
/// `(−q, q)² \ [0, q) × (−q, 0]`.
pub const LSHAPE_QUARTER: f64 = 0.25;

/// Largest number of levels accepted.
pub const MAX_LEVELS: usize = 9;

/// CSV header of the convergence table.
pub const CSV_HEADER: &str = "level,N,h,dim_trial,dim_test,err_energy_sq,err_u_l2_sq,\
err_sigma_l2_sq,err_trace_l2,err_flux_l2,rate_energy,rate_u,rate_sigma";

/// CSV header of the companion table.
pub const AUX_CSV_HEADER: &str = "level,N,rate_energy_h,rate_u_h,rate_sigma_h,\
probe_0,probe_1,probe_2,probe_3,jn_err_trace_l2,jn_err_flux_l2,jn_err_u_l2_sq,\
jn_err_h1_semi_sq,gap_trace_l2,gap_flux_l2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Domain {
    /// `(−0.1, 0.1)²` with `u = sin(πx) sin(πy)`.
    Square,
    /// `(−0.25, 0.25)² \ [0, 0.25) × (−0.25, 0]` with `u = r^{2/3} sin(2φ/3)`.
    Lshape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SolverChoice {
    Dpg,
    Jn,
    Both,
}

/// Exact interior solution with `u^c = 0`, so `u₀ = u|_Γ`, `φ₀ = ∂_n u|_Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Manufactured {
    pub domain: Domain,
}

impl Manufactured {
    pub fn new(domain: Domain) -> Self {
        Self { domain }
    }

    pub fn u(&self, p: Point) -> f64 {
        match self.domain {
            Domain::Square => (PI * p[0]).sin() * (PI * p[1]).sin(),
            Domain::Lshape => {
                let (r, phi) = polar(p);
                r.powf(2.0 / 3.0) * (2.0 * phi / 3.0).sin()
            }
        }
    }

    pub fn grad(&self, p: Point) -> Point {
        match self.domain {
            Domain::Square => [
                PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
                PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
            ],
            Domain::Lshape => {
                let (r, phi) = polar(p);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let s = 2.0 / 3.0 * r.powf(-1.0 / 3.0);
                [-s * (phi / 3.0).sin(), s * (phi / 3.0).cos()]
            }
        }
    }

    pub fn f(&self, p: Point) -> f64 {
        match self.domain {
            Domain::Square => 2.0 * PI * PI * self.u(p),
            Domain::Lshape => 0.0,
        }
    }

    /// Point where the solution is singular, if any.
    pub fn singular_point(&self) -> Option<Point> {
        match self.domain {
            Domain::Square => None,
            Domain::Lshape => Some([0.0, 0.0]),
        }
    }

    pub fn data(&self) -> ProblemData<'static> {
        let m = *self;
        ProblemData::new(
            move |p| m.f(p),
            move |p| m.u(p),
            move |p, n| {
                let g = m.grad(p);
                g[0] * n[0] + g[1] * n[1]
            },
        )
    }

    /// Level-0 mesh.
    pub fn initial_mesh(&self) -> Result<Mesh> {
        match self.domain {
            Domain::Square => make_square_mesh(SQUARE_HALF_WIDTH, 4),
            Domain::Lshape => make_lshape_mesh(LSHAPE_QUARTER, 2),
        }
    }

    /// Four exterior points at distance one from Γ.
    pub fn probes(&self) -> [Point; 4] {
        let d = 1.0
            + match self.domain {
                Domain::Square => SQUARE_HALF_WIDTH,
                Domain::Lshape => LSHAPE_QUARTER,
            };
        [[d, 0.0], [0.0, d], [-d, 0.0], [0.0, -d]]
    }
}

/// Polar coordinates with the angle in `[0, 2π)`.
fn polar(p: Point) -> (f64, f64) {
    let r = p[0].hypot(p[1]);
    let mut phi = p[1].atan2(p[0]);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    (r, phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub domain: Domain,
    pub levels: usize,
    pub solver: SolverChoice,
    pub quad_order: usize,
    pub stabilize_jn: bool,
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(domain: Domain, levels: usize) -> Self {
        Self {
            domain,
            levels,
            solver: SolverChoice::Dpg,
            quad_order: 8,
            stabilize_jn: true,
            output_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_LEVELS).contains(&self.levels) {
            return Err(Error::InvalidInput(format!(
                "levels must be between 2 and {MAX_LEVELS}, got {}",
                self.levels
            )));
        }
        if !(2..=64).contains(&self.quad_order) {
            return Err(Error::InvalidInput(format!(
                "quadrature order must be between 2 and 64, got {}",
                self.quad_order
            )));
        }
        Ok(())
    }
}

/// One row of the convergence table. With the DPG solver the errors are
/// those of the DPG solution; with the JN solver alone the energy and σ
/// columns hold the squared H¹ seminorm error of the P1 solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub level: usize,
    pub n_triangles: usize,
    pub h: f64,
    pub dim_trial: usize,
    pub dim_test: usize,
    pub err_energy_sq: f64,
    pub err_u_l2_sq: f64,
    pub err_sigma_l2_sq: f64,
    pub err_trace_l2: f64,
    pub err_flux_l2: f64,
    /// Exterior field at the probe points.
    pub probes: [f64; 4],
}

/// Errors of the reference solver and its distance to the DPG solution.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossRecord {
    pub jn_err_trace_l2: f64,
    pub jn_err_flux_l2: f64,
    pub jn_err_u_l2_sq: f64,
    pub jn_err_h1_semi_sq: f64,
    /// `‖û_DPG − u_JN‖_{L2(Γ)}`.
    pub gap_trace_l2: f64,
    /// `‖(σ̂_DPG − φ₀) − φ_JN‖_{L2(Γ)}`.
    pub gap_flux_l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub records: Vec<ConvergenceRecord>,
    /// Present when both solvers ran.
    pub cross: Option<Vec<CrossRecord>>,
}

/// Observed rate `log(e_k / e_{k−1}) / log(x_k / x_{k−1})`.
pub fn rate(e_prev: f64, e: f64, x_prev: f64, x: f64) -> f64 {
    (e / e_prev).ln() / (x / x_prev).ln()
}

impl ConvergenceReport {
    fn rates_by(&self, x: impl Fn(&ConvergenceRecord) -> f64) -> Vec<[f64; 3]> {
        let mut out = vec![[f64::NAN; 3]];
        for w in self.records.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let (xa, xb) = (x(a), x(b));
            out.push([
                rate(a.err_energy_sq, b.err_energy_sq, xa, xb),
                rate(a.err_u_l2_sq, b.err_u_l2_sq, xa, xb),
                rate(a.err_sigma_l2_sq, b.err_sigma_l2_sq, xa, xb),
            ]);
        }
        out.truncate(self.records.len());
        out
    }

    /// Rates of the squared energy, u and σ errors against N; NaN at level 0.
    pub fn rates_n(&self) -> Vec<[f64; 3]> {
        self.rates_by(|r| r.n_triangles as f64)
    }

    /// Same rates against h.
    pub fn rates_h(&self) -> Vec<[f64; 3]> {
        self.rates_by(|r| r.h)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for (r, q) in self.records.iter().zip(self.rates_n()) {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.level,
                r.n_triangles,
                fmt(r.h),
                r.dim_trial,
                r.dim_test,
                fmt(r.err_energy_sq),
                fmt(r.err_u_l2_sq),
                fmt(r.err_sigma_l2_sq),
                fmt(r.err_trace_l2),
                fmt(r.err_flux_l2),
                fmt(q[0]),
                fmt(q[1]),
                fmt(q[2]),
            );
        }
        s
    }

    /// Rates against h, probe values and the reference-solver columns.
    pub fn to_aux_csv(&self) -> String {
        let mut s = String::from(AUX_CSV_HEADER);
        s.push('\n');
        for (k, (r, q)) in self.records.iter().zip(self.rates_h()).enumerate() {
            let c = self.cross.as_ref().map(|c| &c[k]);
            let col = |f: fn(&CrossRecord) -> f64| c.map_or(f64::NAN, f);
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.level,
                r.n_triangles,
                fmt(q[0]),
                fmt(q[1]),
                fmt(q[2]),
                fmt(r.probes[0]),
                fmt(r.probes[1]),
                fmt(r.probes[2]),
                fmt(r.probes[3]),
                fmt(col(|c| c.jn_err_trace_l2)),
                fmt(col(|c| c.jn_err_flux_l2)),
                fmt(col(|c| c.jn_err_u_l2_sq)),
                fmt(col(|c| c.jn_err_h1_semi_sq)),
                fmt(col(|c| c.gap_trace_l2)),
                fmt(col(|c| c.gap_flux_l2)),
            );
        }
        s
    }

    /// Writes the table to `path` and the companion table next to it.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        std::fs::write(path, self.to_csv())?;
        let aux = aux_path(path);
        std::fs::write(&aux, self.to_aux_csv())?;
        Ok(aux)
    }
}

/// `results.csv` -> `results.aux.csv`.
pub fn aux_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.aux.csv"))
}

/// 17 significant digits; non-finite values as `nan`/`inf`/`-inf`.
fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Results of one solver run on one mesh.
struct LevelRun {
    record: ConvergenceRecord,
    cross: Option<CrossRecord>,
}

fn run_level(
    level: usize,
    mesh: &Mesh,
    exact: &Manufactured,
    config: &ExperimentConfig,
) -> Result<LevelRun> {
    let data = exact.data();
    let quad = BemQuadrature::with_order(config.quad_order);
    let bem = BemMatrices::assemble(mesh.boundary_loop(), quad)?;
    let eq = ErrorQuadrature::new(exact.singular_point());
    let u = |p: Point| exact.u(p);
    let g = |p: Point| exact.grad(p);

    let dpg = if config.solver != SolverChoice::Jn {
        let (ops, sol) = solver::solve_dpg(mesh, &bem, &data)?;
        let energy = solver::energy_error(&ops, &sol)?;
        let (eu, es) = solver::l2_errors(mesh, &sol, u, g, &eq);
        let (et, ef) = solver::boundary_cauchy_errors(mesh, &sol, &data, &bem);
        let probes =
            solver::eval_exterior_field(mesh, &sol.trace_c, &sol.flux_c, &exact.probes(), &bem)?;
        let record = ConvergenceRecord {
            level,
            n_triangles: mesh.n_triangles(),
            h: mesh.h(),
            dim_trial: TrialDofLayout::new(mesh).dim(),
            dim_test: TestDofLayout::new(mesh).dim(),
            err_energy_sq: energy * energy,
            err_u_l2_sq: eu * eu,
            err_sigma_l2_sq: es * es,
            err_trace_l2: et,
            err_flux_l2: ef,
            probes: [probes[0], probes[1], probes[2], probes[3]],
        };
        Some((record, sol))
    } else {
        None
    };

    let reference = if config.solver != SolverChoice::Dpg {
        let system = jn::assemble_jn(mesh, &bem, &data, config.stabilize_jn)?;
        let sol = jn::solve_jn(&system)?;
        let errors = jn_errors(mesh, &sol, exact, &bem, &eq);
        Some((system.dim(), sol, errors))
    } else {
        None
    };

    match (dpg, reference) {
        (Some((record, _)), None) => Ok(LevelRun {
            record,
            cross: None,
        }),
        (None, Some((dim, sol, e))) => {
            let probes = jn_probes(mesh, &sol, exact, &bem)?;
            Ok(LevelRun {
                record: ConvergenceRecord {
                    level,
                    n_triangles: mesh.n_triangles(),
                    h: mesh.h(),
                    dim_trial: dim,
                    dim_test: dim,
                    err_energy_sq: e.jn_err_h1_semi_sq,
                    err_u_l2_sq: e.jn_err_u_l2_sq,
                    err_sigma_l2_sq: e.jn_err_h1_semi_sq,
                    err_trace_l2: e.jn_err_trace_l2,
                    err_flux_l2: e.jn_err_flux_l2,
                    probes,
                },
                cross: None,
            })
        }
        (Some((record, dsol)), Some((_, jsol, mut e))) => {
            e.gap_trace_l2 = jn::boundary_hat_distance(
                &bem,
                &dsol.boundary_trace(mesh),
                &jsol.boundary_trace(mesh),
            );
            let boundary = mesh.boundary_loop();
            let rule = bem.quadrature().data_rule();
            let diff: Vec<f64> = dsol
                .boundary_flux(mesh)
                .iter()
                .zip(&jsol.phi)
                .map(|(s, p)| s - p)
                .collect();
            e.gap_flux_l2 = crate::bem::l2_error_on_boundary(
                boundary,
                &rule,
                &crate::bem::p0_to_p1disc(&diff),
                |p, n| (data.phi0)(p, n),
            );
            Ok(LevelRun {
                record,
                cross: Some(e),
            })
        }
        (None, None) => unreachable!("at least one solver runs"),
    }
}

fn jn_errors(
    mesh: &Mesh,
    sol: &JnSolution,
    exact: &Manufactured,
    bem: &BemMatrices,
    eq: &ErrorQuadrature,
) -> CrossRecord {
    let boundary = mesh.boundary_loop();
    let rule = bem.quadrature().data_rule();
    let trace = crate::bem::hats_to_p1disc(&sol.boundary_trace(mesh));
    let phi = crate::bem::p0_to_p1disc(&sol.phi);
    let h1 = jn::h1_seminorm_error(mesh, sol, |p| exact.grad(p), eq);
    let mut l2 = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let pts = mesh.triangle_points(t);
        eq.for_each_point(mesh, t, |p, w| {
            let l = barycentric(pts, p);
            let uh: f64 = (0..3).map(|i| l[i] * sol.u[tri[i]]).sum();
            let d = exact.u(p) - uh;
            l2 += w * d * d;
        });
    }
    CrossRecord {
        jn_err_trace_l2: crate::bem::l2_error_on_boundary(boundary, &rule, &trace, |p, _| {
            exact.u(p)
        }),
        // the exact exterior flux vanishes
        jn_err_flux_l2: crate::bem::l2_error_on_boundary(boundary, &rule, &phi, |_, _| 0.0),
        jn_err_u_l2_sq: l2,
        jn_err_h1_semi_sq: h1 * h1,
        gap_trace_l2: f64::NAN,
        gap_flux_l2: f64::NAN,
    }
}

fn jn_probes(
    mesh: &Mesh,
    sol: &JnSolution,
    exact: &Manufactured,
    bem: &BemMatrices,
) -> Result<[f64; 4]> {
    let boundary = mesh.boundary_loop();
    let rule = bem.quadrature().data_rule();
    let u0 = crate::bem::project_p1disc(boundary, &rule, |p, _| exact.u(p));
    let trace: Vec<f64> = crate::bem::hats_to_p1disc(&sol.boundary_trace(mesh))
        .iter()
        .zip(&u0)
        .map(|(a, b)| a - b)
        .collect();
    let flux = crate::bem::p0_to_p1disc(&sol.phi);
    let v = solver::eval_exterior_field(mesh, &trace, &flux, &exact.probes(), bem)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn barycentric(pts: [Point; 3], p: Point) -> [f64; 3] {
    let area = crate::geometry::signed_area(pts[0], pts[1], pts[2]);
    let l1 = crate::geometry::signed_area(pts[0], p, pts[2]) / area;
    let l2 = crate::geometry::signed_area(pts[0], pts[1], p) / area;
    [1.0 - l1 - l2, l1, l2]
}

/// Runs the refinement sequence. `progress` sees each finished record.
pub fn run_convergence(
    config: &ExperimentConfig,
    mut progress: impl FnMut(&ConvergenceRecord, Option<&CrossRecord>),
) -> Result<ConvergenceReport> {
    config.validate()?;
    let exact = Manufactured::new(config.domain);
    let mut mesh = exact.initial_mesh()?;
    let mut records = Vec::with_capacity(config.levels);
    let mut cross = Vec::new();
    for level in 0..config.levels {
        if level > 0 {
            mesh = refine_uniform(&mesh);
        }
        let run = run_level(level, &mesh, &exact, config)?;
        progress(&run.record, run.cross.as_ref());
        records.push(run.record);
        if let Some(c) = run.cross {
            cross.push(c);
        }
    }
    let report = ConvergenceReport {
        config: config.clone(),
        records,
        cross: (config.solver == SolverChoice::Both).then_some(cross),
    };
    if let Some(path) = &config.output_path {
        report.write(path)?;
    }
    Ok(report)
}
