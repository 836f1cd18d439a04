mod common;

use common::*;
use dpg_coupling::assembly::{OperatorBlocks, ProblemData};
use dpg_coupling::bem::{
    dlp_moments, dlp_panel_integral, log_moments, slp_panel_integral, BasisOrder, BemMatrices,
    BemQuadrature,
};
use dpg_coupling::geometry::{self, Point};
use dpg_coupling::mesh::{make_lshape_mesh, make_square_mesh, refine_uniform, Mesh};
use dpg_coupling::spaces::eval_p2_basis;
use proptest::prelude::*;

fn point(range: f64) -> impl Strategy<Value = Point> {
    (-range..range, -range..range).prop_map(|(x, y)| [x, y])
}

fn euler_and_measures(mesh: &Mesh) -> (i64, f64, f64) {
    let chi = mesh.n_vertices() as i64 - mesh.n_edges() as i64 + mesh.n_triangles() as i64;
    (chi, mesh.area(), mesh.boundary_loop().total_length())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn refinement_preserves_topology_and_measure(
        w in 0.02f64..0.3,
        n in 1usize..5,
        lshape in any::<bool>(),
    ) {
        let mesh = if lshape { make_lshape_mesh(w, n) } else { make_square_mesh(w, n) }.unwrap();
        let fine = refine_uniform(&mesh);
        let (chi, area, perimeter) = euler_and_measures(&mesh);
        let (chi_f, area_f, perimeter_f) = euler_and_measures(&fine);
        prop_assert_eq!(chi, 1);
        prop_assert_eq!(chi_f, 1);
        prop_assert_eq!(fine.n_triangles(), 4 * mesh.n_triangles());
        prop_assert_eq!(fine.n_vertices(), mesh.n_vertices() + mesh.n_edges());
        prop_assert_eq!(fine.n_boundary_edges(), 2 * mesh.n_boundary_edges());
        prop_assert!((area - area_f).abs() < 1e-12 * area);
        prop_assert!((perimeter - perimeter_f).abs() < 1e-12 * perimeter);
        prop_assert!((fine.h() - 0.5 * mesh.h()).abs() < 1e-12 * mesh.h());
        for t in 0..fine.n_triangles() {
            prop_assert!(fine.triangle_area(t) > 0.0);
        }
    }

    #[test]
    fn log_moments_match_quadrature(x in point(1.0), b0 in point(1.0), b1 in point(1.0)) {
        prop_assume!(geometry::dist(b0, b1) > 1e-2);
        prop_assume!(geometry::point_segment_distance(x, b0, b1) > 1e-3);
        let (m0, m1) = log_moments(x, b0, b1);
        let d = geometry::sub(b1, b0);
        let c = (geometry::dot(geometry::sub(x, b0), d) / geometry::dot(d, d)).clamp(0.0, 1.0);
        let f = |t: f64| geometry::dist(x, geometry::lerp(b0, b1, t)).ln();
        let o0 = integrate_split(f, c);
        let o1 = integrate_split(|t| t * f(t), c);
        prop_assert!((m0 - o0).abs() < 1e-11 * (1.0 + o0.abs()), "{} {}", m0, o0);
        prop_assert!((m1 - o1).abs() < 1e-11 * (1.0 + o1.abs()), "{} {}", m1, o1);
    }

    #[test]
    fn dlp_moments_match_quadrature(x in point(1.0), b0 in point(1.0), b1 in point(1.0)) {
        prop_assume!(geometry::dist(b0, b1) > 1e-2);
        prop_assume!(geometry::point_segment_distance(x, b0, b1) > 1e-2);
        let n = geometry::right_normal(b0, b1);
        let (m0, m1) = dlp_moments(x, b0, b1, n);
        let l = geometry::dist(b0, b1);
        let d = geometry::sub(b1, b0);
        let c = (geometry::dot(geometry::sub(x, b0), d) / geometry::dot(d, d)).clamp(0.0, 1.0);
        let k = dlp_kernel(n);
        let f = |t: f64| k(x, geometry::lerp(b0, b1, t)) * l;
        let o0 = integrate_split(f, c);
        let o1 = integrate_split(|t| t * f(t), c);
        prop_assert!((m0 - o0).abs() < 1e-10 * (1.0 + o0.abs()), "{} {}", m0, o0);
        prop_assert!((m1 - o1).abs() < 1e-10 * (1.0 + o1.abs()), "{} {}", m1, o1);
    }

    #[test]
    fn p2_basis_partitions_unity(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (l1, l2) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        let (v, g) = eval_p2_basis([1.0 - l1 - l2, l1, l2]);
        prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        prop_assert!(g.iter().map(|g| g[0]).sum::<f64>().abs() < 1e-13);
        prop_assert!(g.iter().map(|g| g[1]).sum::<f64>().abs() < 1e-13);
    }

    #[test]
    fn collinear_double_layer_is_zero(
        origin in point(1.0),
        angle in 0.0f64..std::f64::consts::TAU,
        s in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let dir = [angle.cos(), angle.sin()];
        let at = |t: f64| geometry::add(origin, geometry::scale(dir, t));
        let mut s = s;
        s.sort_by(f64::total_cmp);
        prop_assume!(s[1] - s[0] > 1e-3 && s[2] - s[1] > 1e-3 && s[3] - s[2] > 1e-3);
        let quad = BemQuadrature::default();
        let (a, b) = (panel(at(s[0]), at(s[1])), panel(at(s[2]), at(s[3])));
        for order in [BasisOrder::Constant, BasisOrder::Linear] {
            let m = dlp_panel_integral(&a, &b, order, order, &quad).unwrap();
            for i in 0..m.rows {
                for j in 0..m.cols {
                    prop_assert_eq!(m.get(i, j), 0.0);
                }
            }
        }
        let adjacent = panel(at(s[1]), at(s[3]));
        let m = dlp_panel_integral(&a, &adjacent, BasisOrder::Linear, BasisOrder::Linear, &quad).unwrap();
        prop_assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn single_layer_is_translation_invariant(
        a0 in point(0.3), a1 in point(0.3), b1 in point(0.3), shift in point(2.0),
    ) {
        prop_assume!(geometry::dist(a0, a1) > 1e-2 && geometry::dist(a1, b1) > 1e-2);
        // b shares the vertex a1 unless it degenerates onto a
        let cross = geometry::cross(geometry::sub(a1, a0), geometry::sub(b1, a1));
        prop_assume!(cross.abs() > 1e-3);
        let quad = BemQuadrature::default();
        let (a, b) = (panel(a0, a1), panel(a1, b1));
        let sa = panel(geometry::add(a0, shift), geometry::add(a1, shift));
        let sb = panel(geometry::add(a1, shift), geometry::add(b1, shift));
        for (x, y, sx, sy) in [(&a, &a, &sa, &sa), (&a, &b, &sa, &sb)] {
            let m = slp_panel_integral(x, y, BasisOrder::Linear, BasisOrder::Linear, &quad).unwrap();
            let ms = slp_panel_integral(sx, sy, BasisOrder::Linear, BasisOrder::Linear, &quad).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let (u, v) = (m.get(i, j), ms.get(i, j));
                    prop_assert!((u - v).abs() < 1e-12 * (1.0 + u.abs()), "{} {}", u, v);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transpose_is_adjoint(seed in prop::collection::vec(-1.0f64..1.0, 8)) {
        let mesh = make_lshape_mesh(0.25, 1).unwrap();
        let bem = BemMatrices::assemble(mesh.boundary_loop(), BemQuadrature::default()).unwrap();
        let ops = OperatorBlocks::assemble(&mesh, &bem, &ProblemData::zero()).unwrap();
        let (n, m) = (ops.b.trial.dim(), ops.b.test.dim());
        let x: Vec<f64> = (0..n).map(|i| seed[i % 8] * (1.0 + i as f64).sin()).collect();
        let y: Vec<f64> = (0..m).map(|i| seed[(i + 3) % 8] * (2.0 + i as f64).cos()).collect();
        let bx = ops.b.apply(&x).unwrap();
        let bty = ops.b.apply_transpose(&y).unwrap();
        let lhs: f64 = y.iter().zip(&bx).map(|(a, b)| a * b).sum();
        let rhs: f64 = bty.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() < 1e-13 * (1.0 + lhs.abs()));
    }
}
