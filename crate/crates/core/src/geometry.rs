//! Small helpers for points and segments in the plane.

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// z-component of the cross product.
#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

#[inline]
pub fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

/// Point at parameter `t` on the segment `a -> b`.
#[inline]
pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Unit normal on the right of the direction `a -> b`, i.e. `(t_y, -t_x)`.
/// For a counterclockwise boundary this is the outward normal.
#[inline]
pub fn right_normal(a: Point, b: Point) -> Point {
    let t = sub(b, a);
    let l = norm(t);
    [t[1] / l, -t[0] / l]
}

/// Signed area of the triangle `(a, b, c)`, positive when counterclockwise.
#[inline]
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = sub(b, a);
    let l2 = dot(d, d);
    let t = if l2 > 0.0 {
        (dot(sub(p, a), d) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, lerp(a, b, t))
}

/// Distance between the closed segments `[a0, a1]` and `[b0, b1]`.
pub fn segment_distance(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    if segments_intersect(a0, a1, b0, b1) {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Proper crossing test. Touching and collinear overlaps are left to the
/// endpoint distances in `segment_distance`, and cross products at rounding
/// level count as zero, so nearly collinear segments never report a crossing.
fn segments_intersect(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    let (da, db) = (sub(a1, a0), sub(b1, b0));
    let tol = 1e-13 * norm(da) * norm(db);
    let opposite = |x: f64, y: f64| (x > tol && y < -tol) || (x < -tol && y > tol);
    opposite(cross(da, sub(b0, a0)), cross(da, sub(b1, a0)))
        && opposite(cross(db, sub(a0, b0)), cross(db, sub(a1, b0)))
}
