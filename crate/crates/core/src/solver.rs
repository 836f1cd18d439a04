//! Solution of the normal equations, error measures and the exterior field.

use faer::sparse::SparseColMat;

use crate::assembly::{build_normal_equations, OperatorBlocks, ProblemData};
use crate::bem::{self, BemMatrices, Side};
use crate::geometry::Point;
use crate::linalg::{csc_mul, norm2, SparseCholesky};
use crate::mesh::Mesh;
use crate::quadrature::TriangleRule;
use crate::spaces::{ElementMap, TrialDofLayout};
use crate::{Error, Result};

/// Relative residual accepted from the direct solver.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

/// Solves a sparse SPD system by Cholesky with a few steps of iterative
/// refinement, and checks `‖A x − b‖ ≤ 1e-10 ‖b‖`.
pub fn solve_spd(a: &SparseColMat<usize, f64>, b: &[f64]) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() || a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "SPD solve",
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let llt = SparseCholesky::factor(a, "system not SPD")?;
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(vec![0.0; b.len()]);
    }
    let mut x = llt.solve(b);
    let mut rel = f64::INFINITY;
    for _ in 0..4 {
        let ax = csc_mul(a, &x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        rel = norm2(&r) / bnorm;
        if rel <= 1e-14 {
            break;
        }
        let dx = llt.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);
    }
    let ax = csc_mul(a, &x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    rel = rel.min(norm2(&r) / bnorm);
    if rel > SOLVE_TOLERANCE {
        return Err(Error::Residual {
            residual: rel,
            tolerance: SOLVE_TOLERANCE,
        });
    }
    Ok(x)
}

/// Discrete solution split into its fields, with the exterior Cauchy data.
#[derive(Debug, Clone)]
pub struct Solution {
    pub coefficients: Vec<f64>,
    /// Per triangle.
    pub sigma: Vec<[f64; 2]>,
    /// Per triangle.
    pub u: Vec<f64>,
    /// Per vertex.
    pub uhat: Vec<f64>,
    /// Per edge, against the global edge normal.
    pub sighat: Vec<f64>,
    /// `û|_Γ − u₀` as a discontinuous linear on the boundary loop, with `u₀`
    /// replaced by its panelwise L2 projection.
    pub trace_c: Vec<f64>,
    /// `σ̂|_Γ − φ₀`, likewise.
    pub flux_c: Vec<f64>,
}

impl Solution {
    pub fn from_coefficients(
        mesh: &Mesh,
        x: Vec<f64>,
        data: &ProblemData,
        bem: &BemMatrices,
    ) -> Result<Self> {
        let layout = TrialDofLayout::new(mesh);
        if x.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                context: "trial coefficients",
                expected: layout.dim(),
                found: x.len(),
            });
        }
        let sigma = (0..mesh.n_triangles())
            .map(|t| [x[layout.sigma(t, 0)], x[layout.sigma(t, 1)]])
            .collect();
        let u = (0..mesh.n_triangles()).map(|t| x[layout.u(t)]).collect();
        let uhat: Vec<f64> = (0..mesh.n_vertices()).map(|v| x[layout.uhat(v)]).collect();
        let sighat: Vec<f64> = (0..mesh.n_edges()).map(|e| x[layout.sighat(e)]).collect();
        let (trace_c, flux_c) = exterior_cauchy_data(mesh, &uhat, &sighat, data, bem);
        Ok(Self {
            coefficients: x,
            sigma,
            u,
            uhat,
            sighat,
            trace_c,
            flux_c,
        })
    }

    /// `û` at the boundary vertices, in loop order.
    pub fn boundary_trace(&self, mesh: &Mesh) -> Vec<f64> {
        let b = mesh.boundary_loop();
        (0..b.len()).map(|k| self.uhat[b.vertex(k)]).collect()
    }

    /// `σ̂` on the boundary panels (outward), in loop order.
    pub fn boundary_flux(&self, mesh: &Mesh) -> Vec<f64> {
        mesh.boundary_loop()
            .panels
            .iter()
            .map(|p| self.sighat[p.edge])
            .collect()
    }
}

/// Boundary trace `û|_Γ − u₀` and flux `σ̂|_Γ − φ₀` of the exterior solution.
pub fn exterior_cauchy_data(
    mesh: &Mesh,
    uhat: &[f64],
    sighat: &[f64],
    data: &ProblemData,
    bem: &BemMatrices,
) -> (Vec<f64>, Vec<f64>) {
    let boundary = mesh.boundary_loop();
    let rule = bem.quadrature().data_rule();
    let hats: Vec<f64> = (0..boundary.len())
        .map(|k| uhat[boundary.vertex(k)])
        .collect();
    let fluxes: Vec<f64> = boundary.panels.iter().map(|p| sighat[p.edge]).collect();
    let u0 = bem::project_p1disc(boundary, &rule, |p, _| (data.u0)(p));
    let phi0 = bem::project_p1disc(boundary, &rule, |p, n| (data.phi0)(p, n));
    let trace = bem::hats_to_p1disc(&hats)
        .iter()
        .zip(&u0)
        .map(|(a, b)| a - b)
        .collect();
    let flux = bem::p0_to_p1disc(&fluxes)
        .iter()
        .zip(&phi0)
        .map(|(a, b)| a - b)
        .collect();
    (trace, flux)
}

/// Assembles, solves and splits the DPG system on one mesh.
pub fn solve_dpg(
    mesh: &Mesh,
    bem: &BemMatrices,
    data: &ProblemData,
) -> Result<(OperatorBlocks, Solution)> {
    let ops = OperatorBlocks::assemble(mesh, bem, data)?;
    let normal = build_normal_equations(&ops)?;
    let x = solve_spd(&normal.matrix, &normal.rhs)?;
    let solution = Solution::from_coefficients(mesh, x, data, bem)?;
    Ok((ops, solution))
}

/// Enriched-test-space residual `sqrt(rᵀ G⁻¹ r)`, `r = ℓ − B x`.
pub fn energy_error(ops: &OperatorBlocks, solution: &Solution) -> Result<f64> {
    ops.energy_error(&solution.coefficients)
}

/// `(‖Bᵀ G⁻¹ r‖, ‖Bᵀ G⁻¹ ℓ‖)`; the first vanishes at the discrete minimizer.
pub fn galerkin_defect(ops: &OperatorBlocks, x: &[f64]) -> Result<(f64, f64)> {
    let r = ops.residual(x)?;
    let gr = ops.gram.solve(&r)?;
    let gl = ops.gram.solve(&ops.load)?;
    Ok((
        norm2(&ops.b.apply_transpose(&gr)?),
        norm2(&ops.b.apply_transpose(&gl)?),
    ))
}

/// Quadrature for field errors. Triangles with a vertex at `singular_point`
/// get a rule graded towards that vertex.
pub struct ErrorQuadrature {
    regular: TriangleRule,
    graded: TriangleRule,
    pub singular_point: Option<Point>,
}

impl ErrorQuadrature {
    pub fn new(singular_point: Option<Point>) -> Self {
        Self {
            regular: TriangleRule::collapsed(6),
            graded: TriangleRule::graded_at_vertex(8, 24, 0.2),
            singular_point,
        }
    }

    /// Calls `g(point, weight)` with weights that integrate over triangle `t`.
    pub fn for_each_point(&self, mesh: &Mesh, t: usize, mut g: impl FnMut(Point, f64)) {
        let pts = mesh.triangle_points(t);
        let corner = self
            .singular_point
            .and_then(|s| pts.iter().position(|&p| p == s));
        match corner {
            Some(k) => {
                let map = ElementMap::new([pts[k], pts[(k + 1) % 3], pts[(k + 2) % 3]]);
                for (l, w) in self.graded.iter() {
                    g(map.point(l), w * map.area);
                }
            }
            None => {
                let map = ElementMap::new(pts);
                for (l, w) in self.regular.iter() {
                    g(map.point(l), w * map.area);
                }
            }
        }
    }
}

/// `(‖u − u_h‖_{L2(Ω)}, ‖∇u − σ_h‖_{L2(Ω)})`.
pub fn l2_errors(
    mesh: &Mesh,
    solution: &Solution,
    exact_u: impl Fn(Point) -> f64,
    exact_grad: impl Fn(Point) -> Point,
    quad: &ErrorQuadrature,
) -> (f64, f64) {
    let (mut eu, mut es) = (0.0, 0.0);
    for t in 0..mesh.n_triangles() {
        let (uh, sh) = (solution.u[t], solution.sigma[t]);
        quad.for_each_point(mesh, t, |p, w| {
            let du = exact_u(p) - uh;
            let g = exact_grad(p);
            eu += w * du * du;
            es += w * ((g[0] - sh[0]).powi(2) + (g[1] - sh[1]).powi(2));
        });
    }
    (eu.sqrt(), es.sqrt())
}

/// `(‖û − u₀‖_{L2(Γ)}, ‖σ̂ − φ₀‖_{L2(Γ)})`, the exterior Cauchy data, which
/// vanish in the limit when the exact exterior solution is zero. The data
/// enter exactly (not projected).
pub fn boundary_cauchy_errors(
    mesh: &Mesh,
    solution: &Solution,
    data: &ProblemData,
    bem: &BemMatrices,
) -> (f64, f64) {
    let boundary = mesh.boundary_loop();
    let rule = bem.quadrature().data_rule();
    let trace = bem::hats_to_p1disc(&solution.boundary_trace(mesh));
    let flux = bem::p0_to_p1disc(&solution.boundary_flux(mesh));
    (
        bem::l2_error_on_boundary(boundary, &rule, &trace, |p, _| (data.u0)(p)),
        bem::l2_error_on_boundary(boundary, &rule, &flux, |p, n| (data.phi0)(p, n)),
    )
}

/// Exterior field from its Cauchy data: `u^c = −Ṽ(∂_n u^c) + D̃(u^c|_Γ)`.
pub fn eval_exterior_field(
    mesh: &Mesh,
    trace: &[f64],
    flux: &[f64],
    points: &[Point],
    bem: &BemMatrices,
) -> Result<Vec<f64>> {
    let slp: Vec<f64> = flux.iter().map(|v| -v).collect();
    points
        .iter()
        .map(|&x| {
            bem::eval_potentials(mesh.boundary_loop(), &slp, trace, x, Side::Exterior, bem.quadrature())
        })
        .collect()
}
