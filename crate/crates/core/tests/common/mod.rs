//! Independent oracles: double-exponential (tanh-sinh) quadrature, which
//! shares no code with the Gauss rules of the library and copes with
//! endpoint log and power singularities.

#![allow(dead_code)]

use std::f64::consts::PI;

use dpg_coupling::geometry::{self, Point};
use dpg_coupling::experiment::{Domain, Manufactured};
use dpg_coupling::mesh::{refine_uniform, BoundaryPanel, Mesh};

pub const TOL: f64 = 1e-15;

/// `∫_a^b f` by tanh-sinh quadrature.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, TOL).integral
}

/// `∫_0^1 f`, split at `c` when `c` lies strictly inside.
pub fn integrate_split(f: impl Fn(f64) -> f64, c: f64) -> f64 {
    if c > 0.0 && c < 1.0 {
        integrate(&f, 0.0, c) + integrate(&f, c, 1.0)
    } else {
        integrate(f, 0.0, 1.0)
    }
}

pub fn panel(a: Point, b: Point) -> BoundaryPanel {
    BoundaryPanel {
        start: a,
        end: b,
        length: geometry::dist(a, b),
        normal: geometry::right_normal(a, b),
        edge: 0,
        vertices: [0, 1],
        arc_start: 0.0,
    }
}

fn basis(i: usize, t: f64) -> f64 {
    if i == 0 {
        1.0 - t
    } else {
        t
    }
}

/// Parameter of the point of `b` closest to `x`.
fn closest_parameter(b: &BoundaryPanel, x: Point) -> f64 {
    let d = geometry::sub(b.end, b.start);
    (geometry::dot(geometry::sub(x, b.start), d) / geometry::dot(d, d)).clamp(0.0, 1.0)
}

/// `∫_a ∫_b k(x, y) φ_i(x) φ_j(y)` with nested adaptive quadrature.
pub fn pair_oracle(
    a: &BoundaryPanel,
    b: &BoundaryPanel,
    i: usize,
    j: usize,
    kernel: impl Fn(Point, Point) -> f64,
) -> f64 {
    let outer = |s: f64| {
        let x = a.point(s);
        let c = closest_parameter(b, x);
        basis(i, s) * integrate_split(|t| kernel(x, b.point(t)) * basis(j, t), c) * b.length
    };
    integrate(outer, 0.0, 1.0) * a.length
}

pub fn slp_kernel(x: Point, y: Point) -> f64 {
    -geometry::dist(x, y).ln() / (2.0 * PI)
}

pub fn dlp_kernel(ny: Point) -> impl Fn(Point, Point) -> f64 {
    move |x, y| {
        let r = geometry::sub(x, y);
        geometry::dot(r, ny) / (2.0 * PI * geometry::dot(r, r))
    }
}

/// `∫_T g` over a triangle through the collapsed map at vertex 0.
pub fn triangle_oracle(pts: [Point; 3], g: impl Fn(Point) -> f64) -> f64 {
    let area = geometry::signed_area(pts[0], pts[1], pts[2]);
    let inner = |u: f64| {
        integrate(
            |v| {
                let p = [
                    pts[0][0] + u * ((1.0 - v) * (pts[1][0] - pts[0][0]) + v * (pts[2][0] - pts[0][0])),
                    pts[0][1] + u * ((1.0 - v) * (pts[1][1] - pts[0][1]) + v * (pts[2][1] - pts[0][1])),
                ];
                g(p)
            },
            0.0,
            1.0,
        ) * u
    };
    2.0 * area * integrate(inner, 0.0, 1.0)
}

/// Level 0..levels meshes of the two experiment domains.
pub fn mesh_family(levels: usize) -> Vec<Mesh> {
    domain_family(levels).into_iter().map(|(_, m)| m).collect()
}

pub fn domain_family(levels: usize) -> Vec<(Domain, Mesh)> {
    let mut out = Vec::new();
    for domain in [Domain::Square, Domain::Lshape] {
        let mut m = Manufactured::new(domain).initial_mesh().unwrap();
        for l in 0..levels {
            if l > 0 {
                m = refine_uniform(&m);
            }
            out.push((domain, m.clone()));
        }
    }
    out
}

/// Dipole field `d·(x − x0) / (2π|x − x0|²)` and its gradient: harmonic off
/// `x0` and decaying like `1/|x|`.
pub struct Dipole {
    pub x0: Point,
    pub d: Point,
}

impl Dipole {
    pub fn value(&self, x: Point) -> f64 {
        let r = geometry::sub(x, self.x0);
        geometry::dot(self.d, r) / (2.0 * PI * geometry::dot(r, r))
    }

    pub fn grad(&self, x: Point) -> Point {
        let r = geometry::sub(x, self.x0);
        let r2 = geometry::dot(r, r);
        let dr = geometry::dot(self.d, r);
        [
            (self.d[0] * r2 - 2.0 * dr * r[0]) / (2.0 * PI * r2 * r2),
            (self.d[1] * r2 - 2.0 * dr * r[1]) / (2.0 * PI * r2 * r2),
        ]
    }

    pub fn normal_derivative(&self, x: Point, n: Point) -> f64 {
        geometry::dot(self.grad(x), n)
    }
}

pub fn standard_dipole() -> Dipole {
    let a: f64 = 0.3;
    Dipole {
        x0: [0.013, -0.021],
        d: [a.cos(), a.sin()],
    }
}
