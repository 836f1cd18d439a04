//! Discrete trial and test spaces.
//!
//! Trial space: piecewise constant `σ` (two components) and `u` per triangle,
//! continuous piecewise linear trace `û` (one hat per vertex) and edgewise
//! constant flux `σ̂` (one value per edge, measured against the global edge
//! normal).
//!
//! Test space: `P2` scalar `v` and `P2²` vector `τ` per triangle, and
//! discontinuous `P1` functions `ψ` on the boundary panels.

use crate::geometry::{self, Point};
use crate::mesh::Mesh;
use crate::quadrature::{LineRule, TriangleRule};

/// Index map for the trial unknowns `(σ, u, û, σ̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialDofLayout {
    pub n_triangles: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
}

impl TrialDofLayout {
    pub fn new(mesh: &Mesh) -> Self {
        Self {
            n_triangles: mesh.n_triangles(),
            n_vertices: mesh.n_vertices(),
            n_edges: mesh.n_edges(),
        }
    }

    /// Component `c` of `σ` on triangle `t`.
    pub fn sigma(&self, t: usize, c: usize) -> usize {
        2 * t + c
    }

    pub fn u(&self, t: usize) -> usize {
        2 * self.n_triangles + t
    }

    pub fn uhat(&self, vertex: usize) -> usize {
        3 * self.n_triangles + vertex
    }

    pub fn sighat(&self, edge: usize) -> usize {
        3 * self.n_triangles + self.n_vertices + edge
    }

    pub fn dim(&self) -> usize {
        3 * self.n_triangles + self.n_vertices + self.n_edges
    }
}

/// Index map for the test functions `(v, τ, ψ)`. The 18 element-local test
/// functions of a triangle are contiguous: six for `v`, then six per
/// component of `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestDofLayout {
    pub n_triangles: usize,
    pub n_boundary_edges: usize,
}

pub const LOCAL_TEST_DIM: usize = 18;

impl TestDofLayout {
    pub fn new(mesh: &Mesh) -> Self {
        Self {
            n_triangles: mesh.n_triangles(),
            n_boundary_edges: mesh.n_boundary_edges(),
        }
    }

    pub fn element_offset(&self, t: usize) -> usize {
        LOCAL_TEST_DIM * t
    }

    pub fn v(&self, t: usize, a: usize) -> usize {
        LOCAL_TEST_DIM * t + a
    }

    /// Test function `φ_a e_c` of triangle `t`.
    pub fn tau(&self, t: usize, a: usize, c: usize) -> usize {
        LOCAL_TEST_DIM * t + 6 + 6 * c + a
    }

    pub fn psi_offset(&self) -> usize {
        LOCAL_TEST_DIM * self.n_triangles
    }

    /// Local basis function `j` of boundary panel `p` (loop order).
    pub fn psi(&self, p: usize, j: usize) -> usize {
        self.psi_offset() + 2 * p + j
    }

    pub fn n_psi(&self) -> usize {
        2 * self.n_boundary_edges
    }

    pub fn dim(&self) -> usize {
        self.psi_offset() + self.n_psi()
    }
}

/// Quadratic Lagrange basis at a barycentric point: values and gradients
/// with respect to the reference coordinates `(ξ, η) = (λ1, λ2)`.
///
/// Nodes are the three vertices followed by the midpoints of the sides
/// `(0,1)`, `(1,2)`, `(2,0)`.
pub fn eval_p2_basis(bary: [f64; 3]) -> ([f64; 6], [[f64; 2]; 6]) {
    const GRAD_LAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let l = bary;
    let mut values = [0.0; 6];
    let mut grads = [[0.0; 2]; 6];
    for i in 0..3 {
        values[i] = l[i] * (2.0 * l[i] - 1.0);
        let s = 4.0 * l[i] - 1.0;
        grads[i] = [s * GRAD_LAMBDA[i][0], s * GRAD_LAMBDA[i][1]];
    }
    for k in 0..3 {
        let (i, j) = (k, (k + 1) % 3);
        values[3 + k] = 4.0 * l[i] * l[j];
        grads[3 + k] = [
            4.0 * (l[j] * GRAD_LAMBDA[i][0] + l[i] * GRAD_LAMBDA[j][0]),
            4.0 * (l[j] * GRAD_LAMBDA[i][1] + l[i] * GRAD_LAMBDA[j][1]),
        ];
    }
    (values, grads)
}

/// Barycentric coordinates of the point at parameter `t` on local side `k`
/// (running from vertex `k` to vertex `k + 1`).
pub fn side_barycentric(k: usize, t: f64) -> [f64; 3] {
    let mut l = [0.0; 3];
    l[k] = 1.0 - t;
    l[(k + 1) % 3] = t;
    l
}

/// Linear Lagrange basis on an edge at arc parameter `t ∈ [0, 1]`.
pub fn eval_trace_p1(t: f64) -> [f64; 2] {
    [1.0 - t, t]
}

/// Affine map of a triangle and the inverse transpose of its Jacobian.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub points: [Point; 3],
    pub area: f64,
    jinv_t: [[f64; 2]; 2],
}

impl ElementMap {
    pub fn new(points: [Point; 3]) -> Self {
        let d1 = geometry::sub(points[1], points[0]);
        let d2 = geometry::sub(points[2], points[0]);
        let det = d1[0] * d2[1] - d1[1] * d2[0];
        // J = [d1 d2] (columns); J^{-T} = 1/det [[d2y, -d2x], [-d1y, d1x]]^T
        let jinv_t = [[d2[1] / det, -d1[1] / det], [-d2[0] / det, d1[0] / det]];
        Self {
            points,
            area: 0.5 * det,
            jinv_t,
        }
    }

    pub fn point(&self, bary: [f64; 3]) -> Point {
        let p = self.points;
        [
            bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
            bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
        ]
    }

    /// Physical gradient from a reference gradient.
    pub fn gradient(&self, g: [f64; 2]) -> Point {
        [
            self.jinv_t[0][0] * g[0] + self.jinv_t[0][1] * g[1],
            self.jinv_t[1][0] * g[0] + self.jinv_t[1][1] * g[1],
        ]
    }

    pub fn side_length(&self, k: usize) -> f64 {
        geometry::dist(self.points[k], self.points[(k + 1) % 3])
    }

    /// Element outward unit normal on side `k`.
    pub fn side_normal(&self, k: usize) -> Point {
        geometry::right_normal(self.points[k], self.points[(k + 1) % 3])
    }
}

/// Discrete representative of an exact solution in the trial space:
/// element means of `u` and `∇u`, vertex values of `u` for `û`, and edge
/// means of `∇u · n_e` for `σ̂`.
pub fn interpolate_trial(
    mesh: &Mesh,
    layout: &TrialDofLayout,
    exact_u: impl Fn(Point) -> f64,
    exact_grad: impl Fn(Point) -> Point,
) -> Vec<f64> {
    let rule = TriangleRule::collapsed(6);
    let line = LineRule::gauss(8);
    let mut x = vec![0.0; layout.dim()];
    for t in 0..mesh.n_triangles() {
        let map = ElementMap::new(mesh.triangle_points(t));
        let (mut mu, mut mg) = (0.0, [0.0; 2]);
        for (l, w) in rule.iter() {
            let p = map.point(l);
            mu += w * exact_u(p);
            let g = exact_grad(p);
            mg[0] += w * g[0];
            mg[1] += w * g[1];
        }
        x[layout.sigma(t, 0)] = mg[0];
        x[layout.sigma(t, 1)] = mg[1];
        x[layout.u(t)] = mu;
    }
    for (v, &p) in mesh.vertices().iter().enumerate() {
        x[layout.uhat(v)] = exact_u(p);
    }
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let n = mesh.edge_normal(e);
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        x[layout.sighat(e)] = line
            .iter()
            .map(|(s, w)| w * geometry::dot(exact_grad(geometry::lerp(pa, pb, s)), n))
            .sum();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{make_lshape_mesh, make_square_mesh, refine_uniform};

    #[test]
    fn p2_lagrange_property() {
        let nodes = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ];
        for (i, &n) in nodes.iter().enumerate() {
            let (v, _) = eval_p2_basis(n);
            for (j, &vj) in v.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((vj - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn p2_partition_of_unity() {
        for &l in &[[0.2, 0.3, 0.5], [0.6, 0.1, 0.3], [1.0 / 3.0; 3]] {
            let (v, g) = eval_p2_basis(l);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let gs = g.iter().fold([0.0, 0.0], |a, b| [a[0] + b[0], a[1] + b[1]]);
            assert!(gs[0].abs() < 1e-14 && gs[1].abs() < 1e-14);
        }
    }

    #[test]
    fn p2_gradient_matches_finite_difference() {
        let l = [0.2, 0.3, 0.5];
        let (_, g) = eval_p2_basis(l);
        let eps = 1e-6;
        for (i, gi) in g.iter().enumerate() {
            // ξ = λ1, η = λ2
            let fx = |d: f64| eval_p2_basis([l[0] - d, l[1] + d, l[2]]).0[i];
            let fy = |d: f64| eval_p2_basis([l[0] - d, l[1], l[2] + d]).0[i];
            let dx = (fx(eps) - fx(-eps)) / (2.0 * eps);
            let dy = (fy(eps) - fy(-eps)) / (2.0 * eps);
            assert!((dx - gi[0]).abs() < 1e-8);
            assert!((dy - gi[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn trace_basis_values() {
        assert_eq!(eval_trace_p1(0.0), [1.0, 0.0]);
        assert_eq!(eval_trace_p1(1.0), [0.0, 1.0]);
        assert_eq!(eval_trace_p1(0.5), [0.5, 0.5]);
    }

    #[test]
    fn layout_dimensions() {
        for mesh in [
            make_square_mesh(0.1, 1).unwrap(),
            make_square_mesh(0.1, 4).unwrap(),
            refine_uniform(&make_lshape_mesh(0.25, 2).unwrap()),
        ] {
            let trial = TrialDofLayout::new(&mesh);
            let test = TestDofLayout::new(&mesh);
            assert_eq!(
                trial.dim(),
                3 * mesh.n_triangles() + mesh.n_vertices() + mesh.n_edges()
            );
            assert_eq!(test.dim(), 18 * mesh.n_triangles() + 2 * mesh.n_boundary_edges());
            assert!(test.dim() >= trial.dim());
            assert_eq!(trial.sighat(mesh.n_edges() - 1), trial.dim() - 1);
            assert_eq!(test.psi(mesh.n_boundary_edges() - 1, 1), test.dim() - 1);
        }
        let m = make_square_mesh(0.1, 1).unwrap();
        assert_eq!(TrialDofLayout::new(&m).dim(), 15);
    }

    #[test]
    fn interpolation_of_constant() {
        let mesh = make_square_mesh(0.1, 2).unwrap();
        let layout = TrialDofLayout::new(&mesh);
        let x = interpolate_trial(&mesh, &layout, |_| 1.0, |_| [0.0, 0.0]);
        for t in 0..mesh.n_triangles() {
            assert!((x[layout.u(t)] - 1.0).abs() < 1e-14);
            assert_eq!(x[layout.sigma(t, 0)], 0.0);
        }
        for v in 0..mesh.n_vertices() {
            assert_eq!(x[layout.uhat(v)], 1.0);
        }
        for e in 0..mesh.n_edges() {
            assert_eq!(x[layout.sighat(e)], 0.0);
        }
    }

    #[test]
    fn interpolation_of_linear_field() {
        let mesh = make_square_mesh(0.1, 2).unwrap();
        let layout = TrialDofLayout::new(&mesh);
        let x = interpolate_trial(&mesh, &layout, |p| p[0], |_| [1.0, 0.0]);
        for t in 0..mesh.n_triangles() {
            assert!((x[layout.sigma(t, 0)] - 1.0).abs() < 1e-14);
            assert!(x[layout.sigma(t, 1)].abs() < 1e-14);
        }
        for e in 0..mesh.n_edges() {
            assert!((x[layout.sighat(e)] - mesh.edge_normal(e)[0]).abs() < 1e-14);
        }
        for (v, p) in mesh.vertices().iter().enumerate() {
            assert_eq!(x[layout.uhat(v)], p[0]);
        }
    }

    #[test]
    fn element_map_gradient_of_affine_function() {
        let map = ElementMap::new([[0.1, 0.0], [0.4, 0.1], [0.0, 0.3]]);
        // λ1 as a function of x has gradient J^{-T} (1, 0)
        let g = map.gradient([1.0, 0.0]);
        let p0 = map.points[0];
        let p1 = map.points[1];
        // λ1 must be 1 at p1 and 0 at p0 along the affine map
        let val = g[0] * (p1[0] - p0[0]) + g[1] * (p1[1] - p0[1]);
        assert!((val - 1.0).abs() < 1e-14);
        assert!(map.area > 0.0);
    }
}
