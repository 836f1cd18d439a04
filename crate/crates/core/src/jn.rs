//! Classical Johnson–Nédélec coupling with continuous P1 elements for `u`
//! and piecewise constants for `φ = ∂_n u^c` on Γ:
//!
//! ```text
//! (∇u, ∇v) − ⟨φ, v⟩                 = (f, v) + ⟨φ₀, v⟩
//! ⟨(1/2 − K) u, ψ⟩ + ⟨V φ, ψ⟩       = ⟨(1/2 − K) u₀, ψ⟩
//! ```
//!
//! The stabilized variant adds `⟨1, (1/2 − K) u + V φ⟩ ⟨1, (1/2 − K) v + V ψ⟩`
//! to the left and `⟨1, (1/2 − K) u₀⟩ ⟨1, (1/2 − K) v + V ψ⟩` to the right,
//! which leaves solutions of the plain system unchanged.

use faer::sparse::SparseColMat;

use crate::assembly::ProblemData;
use crate::bem::{self, BemMatrices};
use crate::geometry::{self, Point};
use crate::linalg::{csc_mul, norm2, SparseLu, TripletMatrix};
use crate::mesh::Mesh;
use crate::quadrature::TriangleRule;
use crate::solver::ErrorQuadrature;
use crate::spaces::ElementMap;
use crate::{Error, Result};

/// Assembled coupling system. Unknowns: one value per mesh vertex, then one
/// per boundary panel in loop order.
pub struct JnSystem {
    pub matrix: SparseColMat<usize, f64>,
    pub rhs: Vec<f64>,
    pub n_vertices: usize,
    pub n_panels: usize,
    /// `⟨1, (1/2 − K) v + V ψ⟩` for every basis function, when stabilized.
    pub stabilization: Option<Vec<f64>>,
}

impl JnSystem {
    pub fn dim(&self) -> usize {
        self.n_vertices + self.n_panels
    }
}

#[derive(Debug, Clone)]
pub struct JnSolution {
    /// Nodal values.
    pub u: Vec<f64>,
    /// `∂_n u^c` per boundary panel, loop order.
    pub phi: Vec<f64>,
}

impl JnSolution {
    /// `u` at the boundary vertices, loop order.
    pub fn boundary_trace(&self, mesh: &Mesh) -> Vec<f64> {
        let b = mesh.boundary_loop();
        (0..b.len()).map(|k| self.u[b.vertex(k)]).collect()
    }
}

/// Sums row pairs: discontinuous linear test functions to piecewise constants.
fn restrict_rows(m: &faer::Mat<f64>) -> faer::Mat<f64> {
    faer::Mat::<f64>::from_fn(m.nrows() / 2, m.ncols(), |p, j| {
        m[(2 * p, j)] + m[(2 * p + 1, j)]
    })
}

/// Barycentric gradients of a triangle.
fn p1_gradients(pts: [Point; 3]) -> [Point; 3] {
    let map = ElementMap::new(pts);
    [
        map.gradient([-1.0, -1.0]),
        map.gradient([1.0, 0.0]),
        map.gradient([0.0, 1.0]),
    ]
}

pub fn assemble_jn(
    mesh: &Mesh,
    bem: &BemMatrices,
    data: &ProblemData,
    stabilized: bool,
) -> Result<JnSystem> {
    let boundary = mesh.boundary_loop();
    let nb = boundary.len();
    if nb != bem.n_panels() {
        return Err(Error::DimensionMismatch {
            context: "boundary panels",
            expected: nb,
            found: bem.n_panels(),
        });
    }
    let nv = mesh.n_vertices();
    let n = nv + nb;
    let mut rhs = vec![0.0; n];
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();

    let rule = TriangleRule::collapsed(6);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let pts = mesh.triangle_points(t);
        let g = p1_gradients(pts);
        let area = mesh.triangle_area(t);
        for i in 0..3 {
            for j in 0..3 {
                entries.push((tri[i], tri[j], area * geometry::dot(g[i], g[j])));
            }
        }
        let map = ElementMap::new(pts);
        for (l, w) in rule.iter() {
            let fv = (data.f)(map.point(l));
            for i in 0..3 {
                rhs[tri[i]] += w * area * fv * l[i];
            }
        }
    }

    let data_rule = bem.quadrature().data_rule();
    for (p, panel) in boundary.panels.iter().enumerate() {
        let (a, b) = (boundary.vertex(p), boundary.vertex(boundary.next(p)));
        // −⟨φ, v⟩
        entries.push((a, nv + p, -0.5 * panel.length));
        entries.push((b, nv + p, -0.5 * panel.length));
        for (t, w) in data_rule.iter() {
            let v = (data.phi0)(panel.point(t), panel.normal) * w * panel.length;
            rhs[a] += v * (1.0 - t);
            rhs[b] += v * t;
        }
    }

    let hk = restrict_rows(&bem.half_minus_k());
    let v00 = restrict_rows(bem.v_ps());
    for p in 0..nb {
        for k in 0..nb {
            entries.push((nv + p, boundary.vertex(k), hk[(p, k)]));
            entries.push((nv + p, nv + k, v00[(p, k)]));
        }
    }
    let load2 = half_minus_k_data(mesh, bem, data);
    rhs[nv..nv + nb].copy_from_slice(&load2);

    let stabilization = if stabilized {
        let mut s = vec![0.0; n];
        for k in 0..nb {
            s[boundary.vertex(k)] = (0..nb).map(|p| hk[(p, k)]).sum();
            s[nv + k] = (0..nb).map(|p| v00[(p, k)]).sum();
        }
        let total: f64 = load2.iter().sum();
        let support: Vec<usize> = (0..n).filter(|&i| s[i] != 0.0).collect();
        for &i in &support {
            for &j in &support {
                entries.push((i, j, s[i] * s[j]));
            }
            rhs[i] += total * s[i];
        }
        Some(s)
    } else {
        None
    };

    let mut t = TripletMatrix::new(n, n);
    t.entries = entries;
    Ok(JnSystem {
        matrix: t.to_csc()?,
        rhs,
        n_vertices: nv,
        n_panels: nb,
        stabilization,
    })
}

/// `⟨(1/2 − K) u₀, ψ⟩` for piecewise constant `ψ`; the mass part is
/// integrated directly, `K` acts on the panelwise projection of `u₀`.
fn half_minus_k_data(mesh: &Mesh, bem: &BemMatrices, data: &ProblemData) -> Vec<f64> {
    let boundary = mesh.boundary_loop();
    let rule = bem.quadrature().data_rule();
    let proj = bem::project_p1disc(boundary, &rule, |p, _| (data.u0)(p));
    let k = bem.double_layer();
    let n = 2 * boundary.len();
    boundary
        .panels
        .iter()
        .enumerate()
        .map(|(p, panel)| {
            let mass: f64 = rule
                .iter()
                .map(|(t, w)| w * panel.length * (data.u0)(panel.point(t)))
                .sum();
            let kp: f64 = (0..n)
                .map(|c| (k[(2 * p, c)] + k[(2 * p + 1, c)]) * proj[c])
                .sum();
            0.5 * mass - kp
        })
        .collect()
}

/// Direct sparse LU solve with a relative residual check.
pub fn solve_jn(system: &JnSystem) -> Result<JnSolution> {
    let lu = SparseLu::factor(&system.matrix, "coupling matrix")?;
    let mut x = lu.solve(&system.rhs);
    let bnorm = norm2(&system.rhs);
    if bnorm > 0.0 {
        for _ in 0..2 {
            let ax = csc_mul(&system.matrix, &x);
            let r: Vec<f64> = system.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let dx = lu.solve(&r);
            x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);
        }
        let ax = csc_mul(&system.matrix, &x);
        let r: Vec<f64> = system.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let rel = norm2(&r) / bnorm;
        if !rel.is_finite() || rel > crate::solver::SOLVE_TOLERANCE {
            return Err(Error::Singular(format!(
                "coupling system residual {rel:e} after LU solve"
            )));
        }
    }
    let phi = x.split_off(system.n_vertices);
    Ok(JnSolution { u: x, phi })
}

/// `|u − u_h|_{H¹(Ω)}` for the nodal solution.
pub fn h1_seminorm_error(
    mesh: &Mesh,
    solution: &JnSolution,
    exact_grad: impl Fn(Point) -> Point,
    quad: &ErrorQuadrature,
) -> f64 {
    let mut s = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let g = p1_gradients(mesh.triangle_points(t));
        let mut gh = [0.0; 2];
        for i in 0..3 {
            gh[0] += solution.u[tri[i]] * g[i][0];
            gh[1] += solution.u[tri[i]] * g[i][1];
        }
        quad.for_each_point(mesh, t, |p, w| {
            let ge = exact_grad(p);
            s += w * ((ge[0] - gh[0]).powi(2) + (ge[1] - gh[1]).powi(2));
        });
    }
    s.sqrt()
}

/// `L2(Γ)` distance between two continuous piecewise linear boundary
/// functions given by their values at the boundary vertices (loop order).
pub fn boundary_hat_distance(bem: &BemMatrices, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let dd = bem::hats_to_p1disc(&d);
    let m = bem.mass();
    let mut s = 0.0;
    for i in 0..dd.len() {
        for j in 0..dd.len() {
            s += dd[i] * m[(i, j)] * dd[j];
        }
    }
    s.max(0.0).sqrt()
}
