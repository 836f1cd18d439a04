//! Conforming triangulations of polygonal domains with skeleton topology.
//!
//! Orientation conventions used everywhere downstream:
//!
//! - triangles are stored counterclockwise; local side `k` runs from
//!   vertex `k` to vertex `k + 1 (mod 3)`;
//! - every edge `[a, b]` carries the global unit normal `right_normal(a, b)`.
//!   Interior edges are stored with `a < b`; boundary edges are stored in the
//!   counterclockwise direction of the boundary loop, so their global normal
//!   is the outward normal of the domain;
//! - the sign stored for a (triangle, side) pair is `+1` when the element
//!   outward normal agrees with the global edge normal and `-1` otherwise.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::geometry::{self, Point};
use crate::{Error, Result};

/// One side of a triangle seen from an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub triangle: usize,
    pub side: usize,
    pub sign: i8,
}

/// Element-to-edge incidence for one edge: one entry on the boundary, two inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeIncidence {
    pub first: Incidence,
    pub second: Option<Incidence>,
}

impl EdgeIncidence {
    pub fn is_boundary(&self) -> bool {
        self.second.is_none()
    }
}

/// A boundary edge in loop order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPanel {
    pub start: Point,
    pub end: Point,
    pub length: f64,
    /// Outward unit normal.
    pub normal: Point,
    /// Global edge index.
    pub edge: usize,
    /// Global vertex indices of `start` and `end`.
    pub vertices: [usize; 2],
    /// Arc length of `start` measured along the loop.
    pub arc_start: f64,
}

impl BoundaryPanel {
    pub fn point(&self, t: f64) -> Point {
        geometry::lerp(self.start, self.end, t)
    }

    pub fn tangent(&self) -> Point {
        geometry::scale(geometry::sub(self.end, self.start), 1.0 / self.length)
    }
}

/// Closed counterclockwise boundary loop.
///
/// Panel `p` runs from boundary vertex `p` to boundary vertex `p + 1 (mod n)`,
/// so boundary vertices and panels share the same loop index.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLoop {
    pub panels: Vec<BoundaryPanel>,
}

impl BoundaryLoop {
    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.panels.iter().map(|p| p.length).sum()
    }

    /// Global vertex index of boundary vertex `k` (start of panel `k`).
    pub fn vertex(&self, k: usize) -> usize {
        self.panels[k].vertices[0]
    }

    /// Loop index of the vertex at the end of panel `p`.
    pub fn next(&self, p: usize) -> usize {
        (p + 1) % self.panels.len()
    }

    /// Winding number of the loop around `x` (1 inside, 0 outside).
    /// Undefined for points on the loop; see [`BoundaryLoop::distance`].
    pub fn winding_number(&self, x: Point) -> i32 {
        let mut w = 0;
        for p in &self.panels {
            let (a, b) = (p.start, p.end);
            let side = geometry::cross(geometry::sub(b, a), geometry::sub(x, a));
            if a[1] <= x[1] {
                if b[1] > x[1] && side > 0.0 {
                    w += 1;
                }
            } else if b[1] <= x[1] && side < 0.0 {
                w -= 1;
            }
        }
        w
    }

    /// Distance from `x` to the loop.
    pub fn distance(&self, x: Point) -> f64 {
        self.panels
            .iter()
            .map(|p| geometry::point_segment_distance(x, p.start, p.end))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Immutable conforming triangulation.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_normals: Vec<Point>,
    triangle_edges: Vec<[usize; 3]>,
    triangle_signs: Vec<[i8; 3]>,
    incidence: Vec<EdgeIncidence>,
    boundary: BoundaryLoop,
}

impl Mesh {
    /// Builds the skeleton topology for a list of counterclockwise triangles.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!("triangle {t} has an invalid vertex")));
            }
            let area =
                geometry::signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not counterclockwise (signed area {area:e})"
                )));
            }
        }

        // Edges are numbered in order of first appearance.
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut sides: Vec<Vec<(usize, usize, [usize; 2])>> = Vec::new();
        let mut triangle_edges = vec![[0usize; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                let e = *lookup.entry(key).or_insert_with(|| {
                    sides.push(Vec::new());
                    sides.len() - 1
                });
                sides[e].push((t, k, [a, b]));
                triangle_edges[t][k] = e;
            }
        }

        let mut edges = Vec::with_capacity(sides.len());
        let mut incidence = Vec::with_capacity(sides.len());
        let mut triangle_signs = vec![[0i8; 3]; triangles.len()];
        for (e, list) in sides.iter().enumerate() {
            let oriented = match list.as_slice() {
                [(_, _, ab)] => *ab,
                [(_, _, ab), (_, _, cd)] => {
                    if ab[0] != cd[1] || ab[1] != cd[0] {
                        return Err(Error::InvalidMesh(format!(
                            "edge {e} is traversed twice in the same direction"
                        )));
                    }
                    [ab[0].min(ab[1]), ab[0].max(ab[1])]
                }
                _ => {
                    return Err(Error::InvalidMesh(format!(
                        "edge {e} is shared by {} triangles",
                        list.len()
                    )))
                }
            };
            let mut inc = list.iter().map(|&(t, k, ab)| {
                let sign = if ab == oriented { 1 } else { -1 };
                triangle_signs[t][k] = sign;
                Incidence { triangle: t, side: k, sign }
            });
            let first = inc.next().expect("edge without triangle");
            let second = inc.next();
            edges.push(oriented);
            incidence.push(EdgeIncidence { first, second });
        }
        let edge_normals = edges
            .iter()
            .map(|&[a, b]| geometry::right_normal(vertices[a], vertices[b]))
            .collect();

        let boundary = build_loop(&vertices, &edges, &incidence)?;
        Ok(Self {
            vertices,
            triangles,
            edges,
            edge_normals,
            triangle_edges,
            triangle_signs,
            incidence,
            boundary,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Edges as oriented vertex pairs; see the module docs for the rule.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.boundary.len()
    }

    pub fn edge_normal(&self, e: usize) -> Point {
        self.edge_normals[e]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        geometry::dist(self.vertices[a], self.vertices[b])
    }

    pub fn incidence(&self, e: usize) -> &EdgeIncidence {
        &self.incidence[e]
    }

    /// Edge indices of the three sides of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// Sign of the global normal relative to the element outward normal,
    /// per side of triangle `t`.
    pub fn triangle_signs(&self, t: usize) -> [i8; 3] {
        self.triangle_signs[t]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        geometry::signed_area(a, b, c)
    }

    pub fn boundary_loop(&self) -> &BoundaryLoop {
        &self.boundary
    }

    /// Longest edge.
    pub fn h(&self) -> f64 {
        (0..self.n_edges())
            .map(|e| self.edge_length(e))
            .fold(0.0, f64::max)
    }

    /// Diameter of the domain, the largest distance between boundary vertices.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point> = self.boundary.panels.iter().map(|p| p.start).collect();
        let mut d: f64 = 0.0;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                d = d.max(geometry::dist(a, b));
            }
        }
        d
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    /// Debug dump: `v x y` per vertex, then `t i j k` per triangle.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.17e} {:.17e}", v[0], v[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "t {} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

fn build_loop(
    vertices: &[Point],
    edges: &[[usize; 2]],
    incidence: &[EdgeIncidence],
) -> Result<BoundaryLoop> {
    let boundary_edges: Vec<usize> = (0..edges.len())
        .filter(|&e| incidence[e].is_boundary())
        .collect();
    if boundary_edges.is_empty() {
        return Err(Error::InvalidMesh("mesh has no boundary".into()));
    }
    let mut by_start: HashMap<usize, usize> = HashMap::new();
    for &e in &boundary_edges {
        if by_start.insert(edges[e][0], e).is_some() {
            return Err(Error::InvalidMesh(format!(
                "boundary vertex {} starts two boundary edges",
                edges[e][0]
            )));
        }
    }
    // Start at the lowest, then leftmost, boundary vertex.
    let first = *boundary_edges
        .iter()
        .min_by(|&&a, &&b| {
            let pa = vertices[edges[a][0]];
            let pb = vertices[edges[b][0]];
            pa[1].total_cmp(&pb[1]).then(pa[0].total_cmp(&pb[0]))
        })
        .expect("non-empty");

    let mut panels = Vec::with_capacity(boundary_edges.len());
    let mut e = first;
    let mut arc = 0.0;
    loop {
        let [a, b] = edges[e];
        let (start, end) = (vertices[a], vertices[b]);
        let length = geometry::dist(start, end);
        panels.push(BoundaryPanel {
            start,
            end,
            length,
            normal: geometry::right_normal(start, end),
            edge: e,
            vertices: [a, b],
            arc_start: arc,
        });
        arc += length;
        e = *by_start
            .get(&b)
            .ok_or_else(|| Error::InvalidMesh(format!("boundary is open at vertex {b}")))?;
        if e == first {
            break;
        }
        if panels.len() > boundary_edges.len() {
            return Err(Error::InvalidMesh("boundary walk does not close".into()));
        }
    }
    if panels.len() != boundary_edges.len() {
        return Err(Error::InvalidMesh(format!(
            "boundary is disconnected: loop covers {} of {} boundary edges",
            panels.len(),
            boundary_edges.len()
        )));
    }
    Ok(BoundaryLoop { panels })
}

fn check_diameter(mesh: &Mesh) -> Result<()> {
    let d = mesh.diameter();
    if d >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "domain diameter {d} must be < 1 for an elliptic single-layer operator"
        )));
    }
    Ok(())
}

/// Structured grid on `[x0, x0 + n*step] x [y0, y0 + n*step]` cells, keeping
/// only the cells accepted by `keep`. Every cell is cut along its
/// lower-left to upper-right diagonal.
fn grid_mesh(
    cells_x: usize,
    cells_y: usize,
    origin: Point,
    step: f64,
    keep: impl Fn(usize, usize) -> bool,
) -> Result<Mesh> {
    let mut index = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut vid = |i: usize, j: usize, vertices: &mut Vec<Point>| -> usize {
        *index.entry((i, j)).or_insert_with(|| {
            vertices.push([origin[0] + i as f64 * step, origin[1] + j as f64 * step]);
            vertices.len() - 1
        })
    };
    for j in 0..cells_y {
        for i in 0..cells_x {
            if !keep(i, j) {
                continue;
            }
            let a = vid(i, j, &mut vertices);
            let b = vid(i + 1, j, &mut vertices);
            let c = vid(i + 1, j + 1, &mut vertices);
            let d = vid(i, j + 1, &mut vertices);
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh::from_triangles(vertices, triangles)
}

/// Structured mesh of `(-half_width, half_width)^2` with `n x n` cells, each
/// split into two triangles.
pub fn make_square_mesh(half_width: f64, n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidInput("square mesh needs n >= 1".into()));
    }
    if !half_width.is_finite() || half_width <= 0.0 {
        return Err(Error::InvalidInput(format!("half width {half_width} must be positive")));
    }
    let step = 2.0 * half_width / n as f64;
    let mesh = grid_mesh(n, n, [-half_width, -half_width], step, |_, _| true)?;
    check_diameter(&mesh)?;
    Ok(mesh)
}

/// Structured mesh of the L-shape `(-q, q)^2 \ (0, q) x (-q, 0)`: three
/// quarter squares with `n x n` cells each; the reentrant corner is the origin.
pub fn make_lshape_mesh(quarter: f64, n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidInput("L-shape mesh needs n >= 1".into()));
    }
    if !quarter.is_finite() || quarter <= 0.0 {
        return Err(Error::InvalidInput(format!("quarter size {quarter} must be positive")));
    }
    let step = quarter / n as f64;
    // drop the lower-right quarter
    let mesh = grid_mesh(2 * n, 2 * n, [-quarter, -quarter], step, |i, j| !(i >= n && j < n))?;
    check_diameter(&mesh)?;
    Ok(mesh)
}

/// Red refinement: every triangle is split into four similar children by
/// joining its edge midpoints.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let mut vertices = mesh.vertices.clone();
    let mut midpoint = Vec::with_capacity(mesh.n_edges());
    for &[a, b] in &mesh.edges {
        vertices.push(geometry::midpoint(mesh.vertices[a], mesh.vertices[b]));
        midpoint.push(vertices.len() - 1);
    }
    let mut triangles = Vec::with_capacity(4 * mesh.n_triangles());
    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        let [e0, e1, e2] = mesh.triangle_edges[t];
        let (mab, mbc, mca) = (midpoint[e0], midpoint[e1], midpoint[e2]);
        triangles.push([a, mab, mca]);
        triangles.push([mab, b, mbc]);
        triangles.push([mca, mbc, c]);
        triangles.push([mab, mbc, mca]);
    }
    Mesh::from_triangles(vertices, triangles)
        .expect("red refinement of a valid mesh is a valid mesh")
}
