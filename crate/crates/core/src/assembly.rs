//! The coupled ultra-weak bilinear form, the test Gram matrix, the load and
//! the practical DPG normal equations.
//!
//! Per triangle `T` the test functions `(v, τ)` only see the nine trial
//! unknowns attached to `T`:
//!
//! ```text
//! local columns: σx σy u û(v0) û(v1) û(v2) σ̂(side0) σ̂(side1) σ̂(side2)
//! v rows:        (σ, ∇v)_T − ⟨σ̂, v⟩_∂T
//! τ rows:        (σ, τ)_T + (u, div τ)_T − ⟨û, τ·n⟩_∂T
//! ```
//!
//! The boundary rows `⟨V σ̂, ψ⟩ + ⟨(1/2 − K) û, ψ⟩` form one dense block over
//! the boundary flux and trace unknowns.

use faer::sparse::SparseColMat;
use faer::Mat;
use rayon::prelude::*;

use crate::bem::{self, BemMatrices};
use crate::geometry::{self, Point};
use crate::linalg::{DenseCholesky, TripletMatrix};
use crate::mesh::Mesh;
use crate::quadrature::{LineRule, TriangleRule};
use crate::spaces::{
    eval_p2_basis, side_barycentric, ElementMap, TestDofLayout, TrialDofLayout, LOCAL_TEST_DIM,
};
use crate::{Error, Result};

/// Trial unknowns touched by one triangle.
pub const LOCAL_TRIAL_DIM: usize = 9;

/// Data of the transmission problem.
pub struct ProblemData<'a> {
    /// Interior source.
    pub f: Box<dyn Fn(Point) -> f64 + Sync + 'a>,
    /// Jump of the trace across Γ.
    pub u0: Box<dyn Fn(Point) -> f64 + Sync + 'a>,
    /// Jump of the normal derivative across Γ; receives the point and the
    /// outward unit normal.
    pub phi0: Box<dyn Fn(Point, Point) -> f64 + Sync + 'a>,
}

impl<'a> ProblemData<'a> {
    pub fn new(
        f: impl Fn(Point) -> f64 + Sync + 'a,
        u0: impl Fn(Point) -> f64 + Sync + 'a,
        phi0: impl Fn(Point, Point) -> f64 + Sync + 'a,
    ) -> Self {
        Self {
            f: Box::new(f),
            u0: Box::new(u0),
            phi0: Box::new(phi0),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, |_| 0.0, |_, _| 0.0)
    }
}

/// `b(·,·)` restricted to one triangle.
#[derive(Debug, Clone)]
pub struct ElementBlock {
    /// Global trial indices of the local columns.
    pub trial_dofs: [usize; LOCAL_TRIAL_DIM],
    /// Rows: six `v`, then six `τ_x`, then six `τ_y`.
    pub matrix: [[f64; LOCAL_TRIAL_DIM]; LOCAL_TEST_DIM],
}

/// Matrix of `b(·,·)` with rows indexed by test and columns by trial dofs.
pub struct BilinearForm {
    pub trial: TrialDofLayout,
    pub test: TestDofLayout,
    pub elements: Vec<ElementBlock>,
    /// Global trial indices of the boundary block columns: boundary `σ̂` in
    /// loop order, then boundary `û` in loop order.
    pub boundary_cols: Vec<usize>,
    /// Rows are the `ψ` test functions.
    pub boundary: Mat<f64>,
}

impl BilinearForm {
    /// `B x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("trial vector", self.trial.dim(), x.len())?;
        let mut y = vec![0.0; self.test.dim()];
        for (t, blk) in self.elements.iter().enumerate() {
            let off = self.test.element_offset(t);
            for (r, row) in blk.matrix.iter().enumerate() {
                y[off + r] = row
                    .iter()
                    .zip(&blk.trial_dofs)
                    .map(|(a, &j)| a * x[j])
                    .sum();
            }
        }
        let off = self.test.psi_offset();
        for r in 0..self.boundary.nrows() {
            y[off + r] = self
                .boundary_cols
                .iter()
                .enumerate()
                .map(|(c, &j)| self.boundary[(r, c)] * x[j])
                .sum();
        }
        Ok(y)
    }

    /// `Bᵀ y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("test vector", self.test.dim(), y.len())?;
        let mut x = vec![0.0; self.trial.dim()];
        for (t, blk) in self.elements.iter().enumerate() {
            let off = self.test.element_offset(t);
            for (r, row) in blk.matrix.iter().enumerate() {
                for (a, &j) in row.iter().zip(&blk.trial_dofs) {
                    x[j] += a * y[off + r];
                }
            }
        }
        let off = self.test.psi_offset();
        for (c, &j) in self.boundary_cols.iter().enumerate() {
            for r in 0..self.boundary.nrows() {
                x[j] += self.boundary[(r, c)] * y[off + r];
            }
        }
        Ok(x)
    }

    /// Global sparse copy of `B`, for inspection and tests.
    pub fn to_sparse(&self) -> Result<SparseColMat<usize, f64>> {
        let mut t = TripletMatrix::new(self.test.dim(), self.trial.dim());
        for (k, blk) in self.elements.iter().enumerate() {
            let off = self.test.element_offset(k);
            for (r, row) in blk.matrix.iter().enumerate() {
                for (a, &j) in row.iter().zip(&blk.trial_dofs) {
                    if *a != 0.0 {
                        t.push(off + r, j, *a);
                    }
                }
            }
        }
        let off = self.test.psi_offset();
        for (c, &j) in self.boundary_cols.iter().enumerate() {
            for r in 0..self.boundary.nrows() {
                t.push(off + r, j, self.boundary[(r, c)]);
            }
        }
        t.to_csc()
    }
}

/// Element Gram blocks with their Cholesky factors.
pub struct ElementGram {
    /// `(∇v, ∇v')_T + (v, v')_T` on P2.
    pub h1: Mat<f64>,
    /// `(τ, τ')_T + (div τ, div τ')_T` on P2².
    pub hdiv: Mat<f64>,
    pub h1_factor: DenseCholesky,
    pub hdiv_factor: DenseCholesky,
}

/// Block-diagonal test Gram matrix: two blocks per triangle and one
/// boundary block, the single-layer Gram matrix of `ψ`.
pub struct GramMatrix {
    pub test: TestDofLayout,
    pub elements: Vec<ElementGram>,
    pub boundary: Mat<f64>,
    pub boundary_factor: DenseCholesky,
}

impl GramMatrix {
    pub fn block_count(&self) -> usize {
        2 * self.elements.len() + 1
    }

    /// `L⁻¹ r` blockwise, where `G = L Lᵀ`.
    pub fn whiten(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("test vector", self.test.dim(), r.len())?;
        let mut out = r.to_vec();
        for (t, g) in self.elements.iter().enumerate() {
            let off = self.test.element_offset(t);
            forward(&g.h1_factor, &mut out[off..off + 6]);
            forward(&g.hdiv_factor, &mut out[off + 6..off + LOCAL_TEST_DIM]);
        }
        let off = self.test.psi_offset();
        forward(&self.boundary_factor, &mut out[off..]);
        Ok(out)
    }

    /// `G⁻¹ r` blockwise.
    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("test vector", self.test.dim(), r.len())?;
        let mut out = vec![0.0; r.len()];
        for (t, g) in self.elements.iter().enumerate() {
            let off = self.test.element_offset(t);
            out[off..off + 6].copy_from_slice(&g.h1_factor.solve(&r[off..off + 6]));
            out[off + 6..off + LOCAL_TEST_DIM]
                .copy_from_slice(&g.hdiv_factor.solve(&r[off + 6..off + LOCAL_TEST_DIM]));
        }
        let off = self.test.psi_offset();
        out[off..].copy_from_slice(&self.boundary_factor.solve(&r[off..]));
        Ok(out)
    }

    /// `rᵀ G⁻¹ r`.
    pub fn inverse_norm_sq(&self, r: &[f64]) -> Result<f64> {
        Ok(self.whiten(r)?.iter().map(|v| v * v).sum())
    }
}

fn forward(factor: &DenseCholesky, x: &mut [f64]) {
    let mut m = Mat::<f64>::from_fn(x.len(), 1, |i, _| x[i]);
    factor.forward_in_place(&mut m);
    for (i, v) in x.iter_mut().enumerate() {
        *v = m[(i, 0)];
    }
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Everything the normal equations need.
pub struct OperatorBlocks {
    pub b: BilinearForm,
    pub gram: GramMatrix,
    pub load: Vec<f64>,
}

impl OperatorBlocks {
    pub fn assemble(mesh: &Mesh, bem: &BemMatrices, data: &ProblemData) -> Result<Self> {
        let trial = TrialDofLayout::new(mesh);
        let test = TestDofLayout::new(mesh);
        Ok(Self {
            b: assemble_b(mesh, &trial, &test, bem)?,
            gram: assemble_gram(mesh, &test, bem)?,
            load: assemble_load(mesh, &test, data, bem)?,
        })
    }

    /// `ℓ − B x`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let bx = self.b.apply(x)?;
        Ok(self.load.iter().zip(&bx).map(|(l, b)| l - b).collect())
    }

    /// Dual-norm residual `sqrt(rᵀ G⁻¹ r)` with `r = ℓ − B x`.
    pub fn energy_error(&self, x: &[f64]) -> Result<f64> {
        Ok(self.gram.inverse_norm_sq(&self.residual(x)?)?.sqrt())
    }
}

/// Element quantities shared by `B`, the Gram matrix and the load.
struct ElementBasis {
    map: ElementMap,
    /// `∫_T φ_a`.
    mean: [f64; 6],
    /// `∫_T ∇φ_a`.
    grad_mean: [Point; 6],
    /// `∫_T φ_a φ_b`.
    mass: [[f64; 6]; 6],
    /// `∫_T ∇φ_a · e_c ∇φ_b · e_d`.
    stiff: [[[[f64; 2]; 2]; 6]; 6],
}

impl ElementBasis {
    fn new(points: [Point; 3]) -> Self {
        let map = ElementMap::new(points);
        let rule = TriangleRule::degree4();
        let mut mean = [0.0; 6];
        let mut grad_mean = [[0.0; 2]; 6];
        let mut mass = [[0.0; 6]; 6];
        let mut stiff = [[[[0.0; 2]; 2]; 6]; 6];
        for (l, w) in rule.iter() {
            let (phi, rg) = eval_p2_basis(l);
            let g: Vec<Point> = rg.iter().map(|&r| map.gradient(r)).collect();
            let wa = w * map.area;
            for a in 0..6 {
                mean[a] += wa * phi[a];
                grad_mean[a][0] += wa * g[a][0];
                grad_mean[a][1] += wa * g[a][1];
                for b in 0..6 {
                    mass[a][b] += wa * phi[a] * phi[b];
                    for c in 0..2 {
                        for d in 0..2 {
                            stiff[a][b][c][d] += wa * g[a][c] * g[b][d];
                        }
                    }
                }
            }
        }
        Self {
            map,
            mean,
            grad_mean,
            mass,
            stiff,
        }
    }
}

/// `∫_{side k} φ_a (1 − t)` and `∫_{side k} φ_a t` for every P2 basis `φ_a`.
fn side_moments(map: &ElementMap, k: usize) -> [[f64; 2]; 6] {
    let rule = LineRule::gauss(3);
    let len = map.side_length(k);
    let mut m = [[0.0; 2]; 6];
    for (t, w) in rule.iter() {
        let (phi, _) = eval_p2_basis(side_barycentric(k, t));
        for a in 0..6 {
            m[a][0] += w * len * phi[a] * (1.0 - t);
            m[a][1] += w * len * phi[a] * t;
        }
    }
    m
}

fn element_block(mesh: &Mesh, trial: &TrialDofLayout, t: usize) -> ElementBlock {
    let tri = mesh.triangles()[t];
    let edges = mesh.triangle_edges(t);
    let signs = mesh.triangle_signs(t);
    let basis = ElementBasis::new(mesh.triangle_points(t));
    let mut m = [[0.0; LOCAL_TRIAL_DIM]; LOCAL_TEST_DIM];
    let (sx, sy, u) = (0, 1, 2);
    let uhat = |vertex_slot: usize| 3 + vertex_slot;
    let sighat = |side: usize| 6 + side;
    for a in 0..6 {
        let (rv, rtx, rty) = (a, 6 + a, 12 + a);
        m[rv][sx] = basis.grad_mean[a][0];
        m[rv][sy] = basis.grad_mean[a][1];
        m[rtx][sx] = basis.mean[a];
        m[rty][sy] = basis.mean[a];
        m[rtx][u] = basis.grad_mean[a][0];
        m[rty][u] = basis.grad_mean[a][1];
    }
    for k in 0..3 {
        let mom = side_moments(&basis.map, k);
        let n = basis.map.side_normal(k);
        let sign = f64::from(signs[k]);
        let (v_start, v_end) = (k, (k + 1) % 3);
        for a in 0..6 {
            let full = mom[a][0] + mom[a][1];
            m[a][sighat(k)] -= sign * full;
            for (c, row) in [(0, 6 + a), (1, 12 + a)] {
                m[row][uhat(v_start)] -= n[c] * mom[a][0];
                m[row][uhat(v_end)] -= n[c] * mom[a][1];
            }
        }
    }
    let trial_dofs = [
        trial.sigma(t, 0),
        trial.sigma(t, 1),
        trial.u(t),
        trial.uhat(tri[0]),
        trial.uhat(tri[1]),
        trial.uhat(tri[2]),
        trial.sighat(edges[0]),
        trial.sighat(edges[1]),
        trial.sighat(edges[2]),
    ];
    ElementBlock {
        trial_dofs,
        matrix: m,
    }
}

/// Assembles `b(·,·)`.
pub fn assemble_b(
    mesh: &Mesh,
    trial: &TrialDofLayout,
    test: &TestDofLayout,
    bem: &BemMatrices,
) -> Result<BilinearForm> {
    if *trial != TrialDofLayout::new(mesh) {
        return Err(Error::InvalidInput("trial layout does not match the mesh".into()));
    }
    if *test != TestDofLayout::new(mesh) {
        return Err(Error::InvalidInput("test layout does not match the mesh".into()));
    }
    let boundary = mesh.boundary_loop();
    let nb = boundary.len();
    check_len("boundary panels", nb, bem.n_panels())?;
    let elements: Vec<ElementBlock> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| element_block(mesh, trial, t))
        .collect();

    // Boundary edges carry the outward normal as their global normal, so
    // boundary σ̂ coefficients are outward fluxes without sign changes.
    let mut boundary_cols = Vec::with_capacity(2 * nb);
    boundary_cols.extend(boundary.panels.iter().map(|p| trial.sighat(p.edge)));
    boundary_cols.extend((0..nb).map(|k| trial.uhat(boundary.vertex(k))));
    let hk = bem.half_minus_k();
    let vps = bem.v_ps();
    let block = Mat::<f64>::from_fn(2 * nb, 2 * nb, |r, c| {
        if c < nb {
            vps[(r, c)]
        } else {
            hk[(r, c - nb)]
        }
    });
    Ok(BilinearForm {
        trial: *trial,
        test: *test,
        elements,
        boundary_cols,
        boundary: block,
    })
}

fn element_gram(points: [Point; 3]) -> Result<ElementGram> {
    let basis = ElementBasis::new(points);
    let h1 = Mat::<f64>::from_fn(6, 6, |a, b| {
        basis.mass[a][b] + basis.stiff[a][b][0][0] + basis.stiff[a][b][1][1]
    });
    let hdiv = Mat::<f64>::from_fn(12, 12, |i, j| {
        let (a, c) = (i % 6, i / 6);
        let (b, d) = (j % 6, j / 6);
        let mass = if c == d { basis.mass[a][b] } else { 0.0 };
        mass + basis.stiff[a][b][c][d]
    });
    let h1_factor = DenseCholesky::factor(&h1, "element H1 Gram block")?;
    let hdiv_factor = DenseCholesky::factor(&hdiv, "element H(div) Gram block")?;
    Ok(ElementGram {
        h1,
        hdiv,
        h1_factor,
        hdiv_factor,
    })
}

/// Assembles and factorizes the block-diagonal test Gram matrix.
pub fn assemble_gram(mesh: &Mesh, test: &TestDofLayout, bem: &BemMatrices) -> Result<GramMatrix> {
    check_len("boundary panels", test.n_boundary_edges, bem.n_panels())?;
    let elements = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| element_gram(mesh.triangle_points(t)))
        .collect::<Result<Vec<_>>>()?;
    let boundary = bem.g_psi().clone();
    let boundary_factor = DenseCholesky::factor(&boundary, "single-layer Gram matrix")?;
    Ok(GramMatrix {
        test: *test,
        elements,
        boundary,
        boundary_factor,
    })
}

/// Assembles `ℓ(v, τ, ψ) = (f, v) + ⟨(1/2 − K) u₀ + V φ₀, ψ⟩`.
///
/// `(f, v)` uses a collapsed Gauss rule exact to degree 10. In the boundary
/// rows the mass part `⟨u₀, ψ⟩/2` is integrated directly, while `K u₀` and
/// `V φ₀` act on panelwise L2 projections of the data.
pub fn assemble_load(
    mesh: &Mesh,
    test: &TestDofLayout,
    data: &ProblemData,
    bem: &BemMatrices,
) -> Result<Vec<f64>> {
    check_len("boundary panels", test.n_boundary_edges, bem.n_panels())?;
    let mut load = vec![0.0; test.dim()];
    let rule = TriangleRule::collapsed(6);
    let rows: Vec<[f64; 6]> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let map = ElementMap::new(mesh.triangle_points(t));
            let mut r = [0.0; 6];
            for (l, w) in rule.iter() {
                let fv = (data.f)(map.point(l));
                let (phi, _) = eval_p2_basis(l);
                for a in 0..6 {
                    r[a] += w * map.area * fv * phi[a];
                }
            }
            r
        })
        .collect();
    for (t, r) in rows.iter().enumerate() {
        for (a, v) in r.iter().enumerate() {
            load[test.v(t, a)] = *v;
        }
    }

    let boundary = mesh.boundary_loop();
    let data_rule = bem.quadrature().data_rule();
    let u0 = |p: Point, _: Point| (data.u0)(p);
    let u0_proj = bem::project_p1disc(boundary, &data_rule, u0);
    let phi0_proj = bem::project_p1disc(boundary, &data_rule, |p, n| (data.phi0)(p, n));
    let k = bem.double_layer();
    let v = bem.g_psi();
    let n = 2 * boundary.len();
    for (p, panel) in boundary.panels.iter().enumerate() {
        let mut mass = [0.0; 2];
        for (t, w) in data_rule.iter() {
            let val = (data.u0)(panel.point(t));
            mass[0] += w * panel.length * val * (1.0 - t);
            mass[1] += w * panel.length * val * t;
        }
        for j in 0..2 {
            let i = 2 * p + j;
            let op: f64 = (0..n)
                .map(|c| v[(i, c)] * phi0_proj[c] - k[(i, c)] * u0_proj[c])
                .sum();
            load[test.psi(p, j)] = 0.5 * mass[j] + op;
        }
    }
    Ok(load)
}

/// Sparse normal equations `A = Bᵀ G⁻¹ B`, `rhs = Bᵀ G⁻¹ ℓ`.
pub struct NormalEquations {
    pub matrix: SparseColMat<usize, f64>,
    pub rhs: Vec<f64>,
}

/// Forms the normal equations block by block: with `G_k = L_k L_kᵀ` and
/// `W_k = L_k⁻¹ B_k`, `A = Σ W_kᵀ W_k`. Each contribution is symmetrised
/// explicitly, so `A` is symmetric to the last bit.
pub fn build_normal_equations(ops: &OperatorBlocks) -> Result<NormalEquations> {
    let b = &ops.b;
    let gram = &ops.gram;
    let test = &b.test;
    check_len("load vector", test.dim(), ops.load.len())?;
    let whitened_load = gram.whiten(&ops.load)?;
    let n = b.trial.dim();
    let mut rhs = vec![0.0; n];
    let mut triplets = TripletMatrix::new(n, n);

    let locals: Vec<([[f64; LOCAL_TRIAL_DIM]; LOCAL_TRIAL_DIM], [f64; LOCAL_TRIAL_DIM])> = b
        .elements
        .par_iter()
        .zip(&gram.elements)
        .enumerate()
        .map(|(t, (blk, g))| {
            let mut wv = Mat::<f64>::from_fn(6, LOCAL_TRIAL_DIM, |r, c| blk.matrix[r][c]);
            let mut wt = Mat::<f64>::from_fn(12, LOCAL_TRIAL_DIM, |r, c| blk.matrix[6 + r][c]);
            g.h1_factor.forward_in_place(&mut wv);
            g.hdiv_factor.forward_in_place(&mut wt);
            let w = Mat::<f64>::from_fn(LOCAL_TEST_DIM, LOCAL_TRIAL_DIM, |r, c| {
                if r < 6 {
                    wv[(r, c)]
                } else {
                    wt[(r - 6, c)]
                }
            });
            let off = test.element_offset(t);
            let mut r = [0.0; LOCAL_TRIAL_DIM];
            for (c, rc) in r.iter_mut().enumerate() {
                *rc = (0..LOCAL_TEST_DIM)
                    .map(|k| w[(k, c)] * whitened_load[off + k])
                    .sum();
            }
            (gram_of_columns(&w), r)
        })
        .collect();
    for (blk, (a, r)) in b.elements.iter().zip(&locals) {
        for ((&gi, row), ri) in blk.trial_dofs.iter().zip(a).zip(r) {
            for (&gj, v) in blk.trial_dofs.iter().zip(row) {
                triplets.push(gi, gj, *v);
            }
            rhs[gi] += ri;
        }
    }

    let mut wb = b.boundary.clone();
    gram.boundary_factor.forward_in_place(&mut wb);
    let ab = dense_gram_of_columns(&wb);
    let off = test.psi_offset();
    for (i, &gi) in b.boundary_cols.iter().enumerate() {
        for (j, &gj) in b.boundary_cols.iter().enumerate() {
            triplets.push(gi, gj, ab[(i, j)]);
        }
        rhs[gi] += (0..wb.nrows())
            .map(|r| wb[(r, i)] * whitened_load[off + r])
            .sum::<f64>();
    }
    Ok(NormalEquations {
        matrix: triplets.to_csc()?,
        rhs,
    })
}

/// `WᵀW` for a small dense `W`, computed once per unordered pair.
fn gram_of_columns(w: &Mat<f64>) -> [[f64; LOCAL_TRIAL_DIM]; LOCAL_TRIAL_DIM] {
    let mut a = [[0.0; LOCAL_TRIAL_DIM]; LOCAL_TRIAL_DIM];
    for i in 0..LOCAL_TRIAL_DIM {
        for j in i..LOCAL_TRIAL_DIM {
            let s: f64 = (0..w.nrows()).map(|r| w[(r, i)] * w[(r, j)]).sum();
            a[i][j] = s;
            a[j][i] = s;
        }
    }
    a
}

fn dense_gram_of_columns(w: &Mat<f64>) -> Mat<f64> {
    let n = w.ncols();
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| (0..w.nrows()).map(|r| w[(r, i)] * w[(r, j)]).sum())
                .collect()
        })
        .collect();
    let mut a = Mat::<f64>::zeros(n, n);
    for (i, col) in cols.iter().enumerate() {
        for (k, &s) in col.iter().enumerate() {
            a[(i, i + k)] = s;
            a[(i + k, i)] = s;
        }
    }
    a
}

/// Largest entry of `|A|`.
pub fn max_abs(a: &SparseColMat<usize, f64>) -> f64 {
    a.val().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Boundary-edge unit normal as seen from the only adjacent triangle; equal
/// to the global normal by the mesh orientation rule.
pub fn outward_normal(mesh: &Mesh, edge: usize) -> Point {
    let inc = mesh.incidence(edge).first;
    let pts = mesh.triangle_points(inc.triangle);
    geometry::right_normal(pts[inc.side], pts[(inc.side + 1) % 3])
}
