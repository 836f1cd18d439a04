//! Galerkin boundary element matrices for the 2D Laplacian on a polygon.
//!
//! Kernels, with `n(y)` the outward normal of the panel containing `y`:
//!
//! ```text
//! single layer  G(x - y)         = -1/(2π) log|x - y|
//! double layer  ∂_{n(y)} G(x - y) = (x - y)·n(y) / (2π |x - y|²)
//! ```
//!
//! All boundary functions are stored as discontinuous piecewise linears in
//! loop order: coefficient `2p + j` belongs to panel `p` and local basis
//! `1 - t` (`j = 0`) or `t` (`j = 1`). Piecewise constants and continuous hats
//! are embedded into this space by [`p0_to_p1disc`] and [`hats_to_p1disc`].

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;

use crate::geometry::{self, Point};
use crate::linalg::DenseCholesky;
use crate::mesh::{BoundaryLoop, BoundaryPanel};
use crate::quadrature::LineRule;
use crate::{Error, Result};

const INV_2PI: f64 = 0.5 / PI;

/// Separation, in panel lengths, beyond which plain tensor Gauss rules are
/// used; closer pairs get a closed-form inner integral.
const FAR_FIELD: f64 = 4.0;

/// Polynomial order of a panel basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisOrder {
    /// One constant function per panel.
    Constant,
    /// The two linear functions `1 - t` and `t`.
    Linear,
}

impl BasisOrder {
    /// Basis functions per panel.
    pub fn dim(self) -> usize {
        match self {
            BasisOrder::Constant => 1,
            BasisOrder::Linear => 2,
        }
    }
}

/// Which side of the boundary a field point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

/// Quadrature parameters for panel integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BemQuadrature {
    /// Gauss–Legendre points per direction for separated panels.
    pub order: usize,
    /// Gauss points per piece of the graded rules.
    pub grading_order: usize,
    /// Geometric refinement levels towards singular endpoints.
    pub grading_levels: usize,
    pub grading_ratio: f64,
}

impl Default for BemQuadrature {
    fn default() -> Self {
        Self {
            order: 8,
            grading_order: 16,
            grading_levels: 24,
            grading_ratio: 0.2,
        }
    }
}

impl BemQuadrature {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    /// Rule used for boundary data: Gauss points graded towards both panel
    /// ends, so data with corner singularities are integrated accurately.
    pub fn data_rule(&self) -> LineRule {
        LineRule::graded_both_ends(self.grading_order, self.grading_levels, self.grading_ratio)
    }
}

/// A small dense block of panel-pair integrals; rows follow the basis on the
/// first (test) panel, columns the basis on the second (trial) panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelBlock {
    pub rows: usize,
    pub cols: usize,
    data: [[f64; 2]; 2],
}

impl PanelBlock {
    fn from_linear(m: [[f64; 2]; 2], row: BasisOrder, col: BasisOrder) -> Self {
        let mut data = m;
        if row == BasisOrder::Constant {
            data[0] = [m[0][0] + m[1][0], m[0][1] + m[1][1]];
            data[1] = [0.0; 2];
        }
        if col == BasisOrder::Constant {
            for r in &mut data {
                r[0] += r[1];
                r[1] = 0.0;
            }
        }
        Self {
            rows: row.dim(),
            cols: col.dim(),
            data,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols);
        self.data[i][j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PairKind {
    /// Same segment; `reversed` when the second panel runs the other way.
    Coincident { reversed: bool },
    /// One common endpoint, given as the parameter (0 or 1) on each panel.
    SharedVertex { on_a: f64, on_b: f64 },
    Separated { distance: f64 },
}

fn classify(a: &BoundaryPanel, b: &BoundaryPanel) -> Result<PairKind> {
    let tol = 1e-12 * (a.length + b.length);
    let same = |p: Point, q: Point| geometry::dist(p, q) <= tol;
    let ends_a = [a.start, a.end];
    let ends_b = [b.start, b.end];
    if same(a.start, b.start) && same(a.end, b.end) {
        return Ok(PairKind::Coincident { reversed: false });
    }
    if same(a.start, b.end) && same(a.end, b.start) {
        return Ok(PairKind::Coincident { reversed: true });
    }
    for (i, &pa) in ends_a.iter().enumerate() {
        for (j, &pb) in ends_b.iter().enumerate() {
            if same(pa, pb) {
                let da = geometry::sub(ends_a[1 - i], pa);
                let db = geometry::sub(ends_b[1 - j], pb);
                let collinear = geometry::cross(da, db).abs() <= tol * (a.length + b.length);
                if collinear && geometry::dot(da, db) > 0.0 {
                    return Err(Error::Geometry("overlapping boundary panels".into()));
                }
                return Ok(PairKind::SharedVertex {
                    on_a: i as f64,
                    on_b: j as f64,
                });
            }
        }
    }
    let distance = geometry::segment_distance(a.start, a.end, b.start, b.end);
    if distance <= tol {
        return Err(Error::Geometry("intersecting boundary panels".into()));
    }
    Ok(PairKind::Separated { distance })
}

/// `(∫₀¹ log|x - y(t)| dt, ∫₀¹ t log|x - y(t)| dt)` for `y(t) = b0 + t (b1 - b0)`,
/// in closed form. Valid for any `x`, including points on the segment.
pub fn log_moments(x: Point, b0: Point, b1: Point) -> (f64, f64) {
    let d = geometry::sub(b1, b0);
    let l2 = geometry::dot(d, d);
    let l = l2.sqrt();
    let r = geometry::sub(x, b0);
    let t0 = geometry::dot(r, d) / l2;
    let delta = geometry::cross(d, r).abs() / l2;
    let dd = delta * delta;
    let f0 = |u: f64| {
        let q = u * u + dd;
        let ulog = if q > 0.0 { u * q.ln() } else { 0.0 };
        let at = if delta > 0.0 { 2.0 * delta * (u / delta).atan() } else { 0.0 };
        0.5 * (ulog - 2.0 * u + at)
    };
    let f1 = |u: f64| {
        let q = u * u + dd;
        let qlog = if q > 0.0 { q * q.ln() } else { 0.0 };
        0.25 * (qlog - u * u)
    };
    let i0 = f0(1.0 - t0) - f0(-t0);
    let i1 = f1(1.0 - t0) - f1(-t0) + t0 * i0;
    (l.ln() + i0, 0.5 * l.ln() + i1)
}

/// `(∫₀¹ k dt, ∫₀¹ t k dt)` times the panel length, for the double-layer
/// kernel `k = (x - y)·n / (2π|x - y|²)` on the segment `b0 -> b1` with unit
/// normal `n`. Exactly zero for `x` on the line through the segment.
pub fn dlp_moments(x: Point, b0: Point, b1: Point, n: Point) -> (f64, f64) {
    let d = geometry::sub(b1, b0);
    let l2 = geometry::dot(d, d);
    let l = l2.sqrt();
    let r = geometry::sub(x, b0);
    let c = geometry::dot(r, n);
    if c == 0.0 {
        return (0.0, 0.0);
    }
    let t0 = geometry::dot(r, d) / l2;
    let delta = c.abs() / l;
    let sgn = c.signum();
    let angle = sgn * (((1.0 - t0) / delta).atan() - (-t0 / delta).atan());
    let q1 = (1.0 - t0) * (1.0 - t0) + delta * delta;
    let q0 = t0 * t0 + delta * delta;
    let m0 = INV_2PI * angle;
    let m1 = INV_2PI * ((c / l) * 0.5 * (q1 / q0).ln() + t0 * angle);
    (m0, m1)
}

fn slp_kernel(x: Point, y: Point) -> f64 {
    -INV_2PI * geometry::dist(x, y).ln()
}

fn dlp_kernel(x: Point, y: Point, ny: Point) -> f64 {
    let r = geometry::sub(x, y);
    INV_2PI * geometry::dot(r, ny) / geometry::dot(r, r)
}

/// Closed form of `∫₀¹∫₀¹ log|s - t| φ_i(s) φ_j(t)` for `φ = (1 - s, s)`.
const COINCIDENT_LOG: [[f64; 2]; 2] = [[-7.0 / 16.0, -5.0 / 16.0], [-5.0 / 16.0, -7.0 / 16.0]];

fn tensor_gauss(
    a: &BoundaryPanel,
    b: &BoundaryPanel,
    order: usize,
    kernel: impl Fn(Point, Point) -> f64,
) -> [[f64; 2]; 2] {
    let g = LineRule::gauss(order);
    let mut m = [[0.0; 2]; 2];
    for (s, ws) in g.iter() {
        let x = a.point(s);
        let fa = [1.0 - s, s];
        for (t, wt) in g.iter() {
            let k = ws * wt * kernel(x, b.point(t));
            let fb = [1.0 - t, t];
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] += k * fa[i] * fb[j];
                }
            }
        }
    }
    let jac = a.length * b.length;
    m.iter_mut().flatten().for_each(|v| *v *= jac);
    m
}

/// Outer rule on the first panel for the semi-analytic route.
fn outer_rule(kind: PairKind, a: &BoundaryPanel, quad: &BemQuadrature) -> LineRule {
    match kind {
        PairKind::SharedVertex { on_a, .. } => {
            let r = LineRule::graded(quad.grading_order, quad.grading_levels, quad.grading_ratio);
            if on_a == 0.0 {
                r
            } else {
                r.reversed()
            }
        }
        PairKind::Separated { distance } => {
            // composite rule with pieces no longer than half the separation
            let pieces = ((2.0 * a.length / distance).ceil() as usize).clamp(1, 256);
            let g = LineRule::gauss(quad.order);
            let mut points = Vec::with_capacity(pieces * g.len());
            let mut weights = Vec::with_capacity(pieces * g.len());
            let hw = 1.0 / pieces as f64;
            for k in 0..pieces {
                for (x, w) in g.iter() {
                    points.push((k as f64 + x) * hw);
                    weights.push(w * hw);
                }
            }
            LineRule { points, weights }
        }
        PairKind::Coincident { .. } => unreachable!("coincident pairs use closed forms"),
    }
}

/// Outer quadrature on `a`, inner integral over `b` in closed form.
fn semi_analytic(
    a: &BoundaryPanel,
    rule: &LineRule,
    inner: impl Fn(Point) -> [f64; 2],
) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    for (s, w) in rule.iter() {
        let v = inner(a.point(s));
        let fa = [1.0 - s, s];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += w * fa[i] * v[j];
            }
        }
    }
    m.iter_mut().flatten().for_each(|v| *v *= a.length);
    m
}

fn slp_linear(a: &BoundaryPanel, b: &BoundaryPanel, quad: &BemQuadrature) -> Result<[[f64; 2]; 2]> {
    let kind = classify(a, b)?;
    Ok(match kind {
        PairKind::Coincident { reversed } => {
            let h = a.length;
            let mut m = [[0.0; 2]; 2];
            for (row, logs) in m.iter_mut().zip(&COINCIDENT_LOG) {
                for (j, c) in logs.iter().enumerate() {
                    let jj = if reversed { 1 - j } else { j };
                    row[jj] = -INV_2PI * h * h * (0.25 * h.ln() + c);
                }
            }
            m
        }
        PairKind::Separated { distance } if distance >= FAR_FIELD * a.length.max(b.length) => {
            tensor_gauss(a, b, quad.order, slp_kernel)
        }
        _ => {
            let rule = outer_rule(kind, a, quad);
            semi_analytic(a, &rule, |x| {
                let (m0, m1) = log_moments(x, b.start, b.end);
                let s = -INV_2PI * b.length;
                [s * (m0 - m1), s * m1]
            })
        }
    })
}

fn collinear(a: &BoundaryPanel, b: &BoundaryPanel) -> bool {
    // the normal of a short panel is only accurate to ~eps / length, which
    // the offset to the other panel amplifies
    let (ds, de) = (geometry::sub(a.start, b.start), geometry::sub(a.end, b.start));
    let tol = 1e-12 * b.length.max(geometry::norm(ds)).max(geometry::norm(de));
    geometry::dot(ds, b.normal).abs() <= tol && geometry::dot(de, b.normal).abs() <= tol
}

fn dlp_linear(a: &BoundaryPanel, b: &BoundaryPanel, quad: &BemQuadrature) -> Result<[[f64; 2]; 2]> {
    let kind = classify(a, b)?;
    if matches!(kind, PairKind::Coincident { .. }) || collinear(a, b) {
        return Ok([[0.0; 2]; 2]);
    }
    Ok(match kind {
        PairKind::Separated { distance } if distance >= FAR_FIELD * a.length.max(b.length) => {
            tensor_gauss(a, b, quad.order, |x, y| dlp_kernel(x, y, b.normal))
        }
        _ => {
            let rule = outer_rule(kind, a, quad);
            semi_analytic(a, &rule, |x| {
                let (m0, m1) = dlp_moments(x, b.start, b.end, b.normal);
                [m0 - m1, m1]
            })
        }
    })
}

/// `∫_a ∫_b G(x - y) φ_i(x) φ_j(y) ds_y ds_x` for the requested bases.
///
/// Coincident panels use the closed-form double integral; panels sharing a
/// vertex integrate the inner variable in closed form against a graded outer
/// Gauss rule; well-separated panels use a tensor Gauss rule.
pub fn slp_panel_integral(
    a: &BoundaryPanel,
    b: &BoundaryPanel,
    order_a: BasisOrder,
    order_b: BasisOrder,
    quad: &BemQuadrature,
) -> Result<PanelBlock> {
    Ok(PanelBlock::from_linear(slp_linear(a, b, quad)?, order_a, order_b))
}

/// `∫_x ∫_y ∂_{n(y)} G(x - y) φ_j(y) φ_i(x) ds_y ds_x`, with `panel_x`
/// carrying the test basis and `panel_y` the trace basis.
pub fn dlp_panel_integral(
    panel_x: &BoundaryPanel,
    panel_y: &BoundaryPanel,
    order_x: BasisOrder,
    order_y: BasisOrder,
    quad: &BemQuadrature,
) -> Result<PanelBlock> {
    Ok(PanelBlock::from_linear(
        dlp_linear(panel_x, panel_y, quad)?,
        order_x,
        order_y,
    ))
}

/// Embeds one value per panel into the discontinuous linear space.
pub fn p0_to_p1disc(values: &[f64]) -> Vec<f64> {
    values.iter().flat_map(|&v| [v, v]).collect()
}

/// Embeds continuous hat coefficients (one per boundary vertex, loop order).
pub fn hats_to_p1disc(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n).flat_map(|p| [values[p], values[(p + 1) % n]]).collect()
}

/// Panel-wise L2 projection of boundary data onto discontinuous linears.
/// The data callable receives a boundary point and the outward normal.
pub fn project_p1disc(
    boundary: &BoundaryLoop,
    rule: &LineRule,
    f: impl Fn(Point, Point) -> f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * boundary.len());
    for p in &boundary.panels {
        let (mut m0, mut m1) = (0.0, 0.0);
        for (t, w) in rule.iter() {
            let v = f(p.point(t), p.normal);
            m0 += w * (1.0 - t) * v;
            m1 += w * t * v;
        }
        // local mass (h/6)[[2,1],[1,2]] applied to moments scaled by h
        out.push(2.0 * (2.0 * m0 - m1));
        out.push(2.0 * (2.0 * m1 - m0));
    }
    out
}

/// `‖g - f‖_{L2(Γ)}` for a discontinuous linear `g` and boundary data `f`.
pub fn l2_error_on_boundary(
    boundary: &BoundaryLoop,
    rule: &LineRule,
    g: &[f64],
    f: impl Fn(Point, Point) -> f64,
) -> f64 {
    let mut s = 0.0;
    for (k, p) in boundary.panels.iter().enumerate() {
        for (t, w) in rule.iter() {
            let gv = g[2 * k] * (1.0 - t) + g[2 * k + 1] * t;
            let d = gv - f(p.point(t), p.normal);
            s += w * p.length * d * d;
        }
    }
    s.sqrt()
}

/// Dense Galerkin matrices on one boundary loop.
pub struct BemMatrices {
    n_panels: usize,
    quad: BemQuadrature,
    /// `⟨V ψ_j, ψ_i⟩` on discontinuous linears; the Gram matrix of `ψ`.
    single_layer: Mat<f64>,
    /// `⟨K w_j, ψ_i⟩` on discontinuous linears.
    double_layer: Mat<f64>,
    /// `⟨w_j, ψ_i⟩` on discontinuous linears.
    mass: Mat<f64>,
    v_ps: Mat<f64>,
    k_up: Mat<f64>,
    m_up: Mat<f64>,
    g_psi_factor: DenseCholesky,
}

fn assemble_pairs(
    boundary: &BoundaryLoop,
    quad: &BemQuadrature,
    block: impl Fn(&BoundaryPanel, &BoundaryPanel, &BemQuadrature) -> Result<[[f64; 2]; 2]> + Sync,
) -> Result<Mat<f64>> {
    let n = boundary.len();
    let rows: Vec<Vec<[[f64; 2]; 2]>> = boundary
        .panels
        .par_iter()
        .map(|a| boundary.panels.iter().map(|b| block(a, b, quad)).collect())
        .collect::<Result<_>>()?;
    let mut m = Mat::<f64>::zeros(2 * n, 2 * n);
    for (p, row) in rows.iter().enumerate() {
        for (q, blk) in row.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    m[(2 * p + i, 2 * q + j)] = blk[i][j];
                }
            }
        }
    }
    Ok(m)
}

/// Right-multiplies a `2n x 2n` matrix by an embedding given as column lists.
fn embed_columns(m: &Mat<f64>, ncols: usize, embed: impl Fn(usize) -> Vec<usize>) -> Mat<f64> {
    let mut out = Mat::<f64>::zeros(m.nrows(), ncols);
    for c in 0..ncols {
        for src in embed(c) {
            for r in 0..m.nrows() {
                out[(r, c)] += m[(r, src)];
            }
        }
    }
    out
}

impl BemMatrices {
    /// Assembles every matrix on the loop and factorizes the `ψ` Gram matrix.
    pub fn assemble(boundary: &BoundaryLoop, quad: BemQuadrature) -> Result<Self> {
        let n = boundary.len();
        if n < 3 {
            return Err(Error::Geometry(format!("boundary loop with {n} panels")));
        }
        let single_layer = assemble_pairs(boundary, &quad, slp_linear)?;
        let double_layer = assemble_pairs(boundary, &quad, dlp_linear)?;
        let mut mass = Mat::<f64>::zeros(2 * n, 2 * n);
        for (p, panel) in boundary.panels.iter().enumerate() {
            let h = panel.length;
            mass[(2 * p, 2 * p)] = h / 3.0;
            mass[(2 * p + 1, 2 * p + 1)] = h / 3.0;
            mass[(2 * p, 2 * p + 1)] = h / 6.0;
            mass[(2 * p + 1, 2 * p)] = h / 6.0;
        }
        let p0 = |c: usize| vec![2 * c, 2 * c + 1];
        // hat k lives on the end of panel k-1 and the start of panel k
        let hat = |k: usize| vec![2 * k, 2 * ((k + n - 1) % n) + 1];
        let v_ps = embed_columns(&single_layer, n, p0);
        let k_up = embed_columns(&double_layer, n, hat);
        let m_up = embed_columns(&mass, n, hat);
        let g_psi_factor = DenseCholesky::factor(&single_layer, "single-layer Gram matrix")
            .map_err(|_| {
                Error::NotSpd {
                    what: "single-layer Gram matrix (domain diameter must be < 1)".into(),
                }
            })?;
        Ok(Self {
            n_panels: n,
            quad,
            single_layer,
            double_layer,
            mass,
            v_ps,
            k_up,
            m_up,
            g_psi_factor,
        })
    }

    pub fn n_panels(&self) -> usize {
        self.n_panels
    }

    pub fn quadrature(&self) -> &BemQuadrature {
        &self.quad
    }

    /// `⟨V ψ_j, ψ_i⟩` on discontinuous linears.
    pub fn g_psi(&self) -> &Mat<f64> {
        &self.single_layer
    }

    pub fn g_psi_factor(&self) -> &DenseCholesky {
        &self.g_psi_factor
    }

    /// `⟨K w_j, ψ_i⟩` on discontinuous linears.
    pub fn double_layer(&self) -> &Mat<f64> {
        &self.double_layer
    }

    pub fn mass(&self) -> &Mat<f64> {
        &self.mass
    }

    /// `⟨V φ_j, ψ_i⟩` for piecewise constant `φ_j`.
    pub fn v_ps(&self) -> &Mat<f64> {
        &self.v_ps
    }

    /// `⟨K û_j, ψ_i⟩` for boundary hats `û_j`.
    pub fn k_up(&self) -> &Mat<f64> {
        &self.k_up
    }

    /// `⟨û_j, ψ_i⟩` for boundary hats `û_j`.
    pub fn m_up(&self) -> &Mat<f64> {
        &self.m_up
    }

    /// `⟨(1/2 - K) û_j, ψ_i⟩ = 1/2 M_up - K_up`.
    pub fn half_minus_k(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.m_up.nrows(), self.m_up.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] = 0.5 * self.m_up[(i, j)] - self.k_up[(i, j)];
            }
        }
        m
    }

    /// Galerkin residual `⟨V flux + (1/2 - K) trace, ψ_i⟩` for discontinuous
    /// linear Cauchy data.
    pub fn representation_residual(&self, flux: &[f64], trace: &[f64]) -> Vec<f64> {
        let n = 2 * self.n_panels;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.single_layer[(i, j)] * flux[j]
                            + (0.5 * self.mass[(i, j)] - self.double_layer[(i, j)]) * trace[j]
                    })
                    .sum()
            })
            .collect()
    }

    /// L2 norm of the Riesz representative of a Galerkin residual in the
    /// discontinuous linear space, `sqrt(rᵀ M⁻¹ r)`.
    pub fn residual_l2(&self, residual: &[f64]) -> f64 {
        // M is block diagonal with 2x2 blocks (h/6)[[2,1],[1,2]]
        let mut s = 0.0;
        for p in 0..self.n_panels {
            let h = 3.0 * self.mass[(2 * p, 2 * p)];
            let (r0, r1) = (residual[2 * p], residual[2 * p + 1]);
            s += (2.0 / h) * (2.0 * r0 * r0 - 2.0 * r0 * r1 + 2.0 * r1 * r1);
        }
        s.sqrt()
    }
}

/// Evaluates `∫_Γ G(x - y) slp(y) ds + ∫_Γ ∂_{n(y)} G(x - y) dlp(y) ds` for
/// discontinuous linear densities at a point off the boundary.
///
/// Panels closer than a few of their own lengths are integrated in closed
/// form, the rest with Gauss quadrature.
pub fn eval_potentials(
    boundary: &BoundaryLoop,
    slp: &[f64],
    dlp: &[f64],
    x: Point,
    side: Side,
    quad: &BemQuadrature,
) -> Result<f64> {
    let n = boundary.len();
    if slp.len() != 2 * n || dlp.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            context: "boundary density",
            expected: 2 * n,
            found: slp.len().min(dlp.len()),
        });
    }
    let h_min = boundary
        .panels
        .iter()
        .map(|p| p.length)
        .fold(f64::INFINITY, f64::min);
    if boundary.distance(x) <= 1e-10 * h_min {
        return Err(Error::InvalidInput(format!("point {x:?} lies on the boundary")));
    }
    let inside = boundary.winding_number(x) != 0;
    if inside != (side == Side::Interior) {
        return Err(Error::InvalidInput(format!(
            "point {x:?} is not on the {side:?} side"
        )));
    }
    let g = LineRule::gauss(quad.order);
    let mut sum = 0.0;
    for (k, p) in boundary.panels.iter().enumerate() {
        let (s0, s1) = (slp[2 * k], slp[2 * k + 1]);
        let (d0, d1) = (dlp[2 * k], dlp[2 * k + 1]);
        if geometry::point_segment_distance(x, p.start, p.end) < FAR_FIELD * p.length {
            let (l0, l1) = log_moments(x, p.start, p.end);
            sum += -INV_2PI * p.length * (s0 * (l0 - l1) + s1 * l1);
            let (k0, k1) = dlp_moments(x, p.start, p.end, p.normal);
            sum += d0 * (k0 - k1) + d1 * k1;
        } else {
            for (t, w) in g.iter() {
                let y = p.point(t);
                let sv = s0 * (1.0 - t) + s1 * t;
                let dv = d0 * (1.0 - t) + d1 * t;
                sum += w * p.length * (slp_kernel(x, y) * sv + dlp_kernel(x, y, p.normal) * dv);
            }
        }
    }
    Ok(sum)
}
