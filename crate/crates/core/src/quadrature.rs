//! Quadrature rules on the unit interval and the reference triangle.

use std::f64::consts::PI;

/// A rule on `[0, 1]`: nodes and weights, weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    /// `n`-point Gauss–Legendre rule, exact for polynomials of degree `2n - 1`.
    pub fn gauss(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on the Legendre recurrence.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            points[i] = 0.5 * (1.0 - x);
            points[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        if n % 2 == 1 {
            points[n / 2] = 0.5;
        }
        Self { points, weights }
    }

    /// Composite Gauss rule refined geometrically towards `t = 0`.
    ///
    /// The subintervals are `[ratio^(k+1), ratio^k]` for `k < levels` plus
    /// `[0, ratio^levels]`, each carrying an `n`-point Gauss rule. Integrands
    /// with `t log t` or `t^a` behaviour at the origin converge exponentially.
    pub fn graded(n: usize, levels: usize, ratio: f64) -> Self {
        let base = Self::gauss(n);
        let mut points = Vec::with_capacity(n * (levels + 1));
        let mut weights = Vec::with_capacity(n * (levels + 1));
        let mut hi = 1.0;
        for _ in 0..levels {
            let lo = hi * ratio;
            for (x, w) in base.points.iter().zip(&base.weights) {
                points.push(lo + (hi - lo) * x);
                weights.push((hi - lo) * w);
            }
            hi = lo;
        }
        for (x, w) in base.points.iter().zip(&base.weights) {
            points.push(hi * x);
            weights.push(hi * w);
        }
        Self { points, weights }
    }

    /// Reflects the rule, `t -> 1 - t`.
    pub fn reversed(&self) -> Self {
        Self {
            points: self.points.iter().map(|t| 1.0 - t).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Rule graded towards both ends of `[0, 1]`.
    pub fn graded_both_ends(n: usize, levels: usize, ratio: f64) -> Self {
        let half = Self::graded(n, levels, ratio);
        let mut points = Vec::with_capacity(2 * half.len());
        let mut weights = Vec::with_capacity(2 * half.len());
        for (t, w) in half.points.iter().zip(&half.weights) {
            points.push(0.5 * t);
            weights.push(0.5 * w);
        }
        for (t, w) in half.points.iter().zip(&half.weights) {
            points.push(1.0 - 0.5 * t);
            weights.push(0.5 * w);
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A rule on the reference triangle in barycentric coordinates.
/// Weights sum to one, so integrals are `area * sum(w_i f(x_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Six-point symmetric rule exact for degree 4.
    pub fn degree4() -> Self {
        const A1: f64 = 0.445_948_490_915_964_9;
        const W1: f64 = 0.223_381_589_678_011_47;
        const A2: f64 = 0.091_576_213_509_770_74;
        const W2: f64 = 0.109_951_743_655_321_87;
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        for (a, w) in [(A1, W1), (A2, W2)] {
            let b = 1.0 - 2.0 * a;
            points.push([b, a, a]);
            points.push([a, b, a]);
            points.push([a, a, b]);
            weights.extend([w; 3]);
        }
        Self { points, weights }
    }

    /// Collapsed (Duffy) tensor Gauss rule with `n * n` points, exact for
    /// degree `2n - 2`.
    pub fn collapsed(n: usize) -> Self {
        let g = LineRule::gauss(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (u, wu) in g.iter() {
            for (v, wv) in g.iter() {
                let x = u;
                let y = v * (1.0 - u);
                points.push([1.0 - x - y, x, y]);
                // reference area is 1/2; normalise to unit total weight
                weights.push(2.0 * wu * wv * (1.0 - u));
            }
        }
        Self { points, weights }
    }

    /// Collapsed rule with the degenerate side at vertex 0 and the radial
    /// direction graded towards it. Integrands behaving like `r^a`, `a > -2`,
    /// at vertex 0 converge quickly.
    pub fn graded_at_vertex(n: usize, levels: usize, ratio: f64) -> Self {
        let radial = LineRule::graded(n, levels, ratio);
        let angular = LineRule::gauss(n);
        let mut points = Vec::with_capacity(radial.len() * n);
        let mut weights = Vec::with_capacity(radial.len() * n);
        for (u, wu) in radial.iter() {
            for (v, wv) in angular.iter() {
                points.push([1.0 - u, u * (1.0 - v), u * v]);
                weights.push(2.0 * wu * wv * u);
            }
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}
