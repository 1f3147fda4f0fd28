use bernoulli_core::geometry::{extract_level_curve, rasterize, ConvexPolygon, Grid2D, Label, Point, Polygon};
use bernoulli_core::pde::{gradient_magnitude_with_mask, solve_p_capacitary, PLaplaceConfig};
use bernoulli_core::radial::{radial_potential, RadialProblem};
use bernoulli_core::{RegionMask, ScalarField};

fn disk(r: f64) -> ConvexPolygon {
    ConvexPolygon::regular(Point::default(), r, 256).unwrap()
}

fn ring(inner: &Polygon, outer: &Polygon, h: f64, v_in: f64, v_out: f64) -> RegionMask {
    let grid = Grid2D::covering(&outer.bbox(), h, 2).unwrap();
    rasterize(inner, outer, &grid, v_in, v_out).unwrap()
}

fn radial_error(p: f64, h: f64) -> f64 {
    let mask = ring(&disk(0.25), &disk(1.0), h, 1.0, 0.0);
    let (u, _) = solve_p_capacitary(&mask, &PLaplaceConfig::with_p(p), None).unwrap();
    let prob = RadialProblem::exterior(p, 2, 0.25, 1.0, 0.5);
    mask.annulus_nodes()
        .map(|i| {
            let rho = mask.grid.node_point(i).norm().clamp(0.25, 1.0);
            (u.values[i] - radial_potential(&prob, rho).unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn discrete_maximum_principle() {
    for p in [1.5, 2.0, 4.0] {
        let inner = ConvexPolygon::square(Point::new(0.1, 0.0), 0.5).unwrap();
        let mask = ring(&inner, &disk(1.0), 1.0 / 48.0, 1.0, 0.0);
        let (u, _) = solve_p_capacitary(&mask, &PLaplaceConfig::with_p(p), None).unwrap();
        for i in mask.annulus_nodes() {
            assert!(u.values[i] > 0.0 && u.values[i] < 1.0, "p={p}: u={} at node {i}", u.values[i]);
        }
    }
}

#[test]
fn comparison_principle_for_nested_outer_bodies() {
    let h = 1.0 / 64.0;
    let k = ConvexPolygon::regular(Point::new(0.05, 0.0), 0.25, 64).unwrap();
    let small = ConvexPolygon::square(Point::default(), 1.4).unwrap();
    let large = disk(1.0);
    let grid = Grid2D::covering(&large.bbox(), h, 2).unwrap();
    for p in [2.0, 3.0] {
        let cfg = PLaplaceConfig::with_p(p);
        let m1 = rasterize(&k, &small, &grid, 1.0, 0.0).unwrap();
        let m2 = rasterize(&k, &large, &grid, 1.0, 0.0).unwrap();
        let (u1, _) = solve_p_capacitary(&m1, &cfg, None).unwrap();
        let (u2, _) = solve_p_capacitary(&m2, &cfg, None).unwrap();
        let grad = gradient_magnitude_with_mask(&u2, &m2);
        let lip = grad.range().unwrap().1;
        for i in m1.annulus_nodes().filter(|&i| m2.label(i) == Label::Annulus) {
            assert!(u1.values[i] <= u2.values[i] + 5.0 * h * lip, "p={p} node {i}");
        }
        // the ordering is in fact strict away from round-off
        let worst = m1.annulus_nodes().map(|i| u1.values[i] - u2.values[i]).fold(f64::MIN, f64::max);
        assert!(worst <= 1e-6, "p={p}: worst {worst}");
    }
}

#[test]
fn level_sets_of_convex_rings_are_convex() {
    let h = 1.0 / 64.0;
    let k = ConvexPolygon::new(vec![
        Point::new(-0.3, -0.1),
        Point::new(0.2, -0.25),
        Point::new(0.3, 0.1),
        Point::new(-0.1, 0.25),
    ])
    .unwrap();
    let omega = ConvexPolygon::regular(Point::new(0.05, 0.0), 1.0, 6).unwrap();
    for p in [2.0, 3.0] {
        let mask = ring(&k, &omega, h, 1.0, 0.0);
        let (u, _) = solve_p_capacitary(&mask, &PLaplaceConfig::with_p(p), None).unwrap();
        for l in [0.2, 0.4, 0.6, 0.8] {
            let curve = extract_level_curve(&u, l).unwrap();
            let r = curve.largest_ring().unwrap();
            assert!(r.closed);
            let poly = Polygon::new(r.points.clone()).unwrap();
            assert!(poly.is_convex(0.5 * h), "p={p} l={l}");
        }
    }
}

#[test]
fn error_decreases_under_refinement() {
    let errs: Vec<f64> = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0].iter().map(|&h| radial_error(2.0, h)).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn p3_radial_error_within_five_h() {
    let h = 1.0 / 64.0;
    let e = radial_error(3.0, h);
    assert!(e <= 5.0 * h, "error {e}");
}

#[test]
fn gradient_bounded_below_away_from_the_fringe() {
    let h = 1.0 / 64.0;
    let mask = ring(&disk(0.25), &disk(1.0), h, 1.0, 0.0);
    let (u, _) = solve_p_capacitary(&mask, &PLaplaceConfig::default(), None).unwrap();
    let grad = gradient_magnitude_with_mask(&u, &mask);
    // exact |∇u| = 1/(ρ log 4) >= 1/log 4 on the ring
    let m0 = 1.0 / 4f64.ln();
    for i in mask.annulus_nodes() {
        let rho = mask.grid.node_point(i).norm();
        if rho > 0.25 + 2.0 * h && rho < 1.0 - 2.0 * h {
            assert!(grad.values[i] >= 0.8 * m0, "|∇u|={} at ρ={rho}", grad.values[i]);
            let exact = 1.0 / (rho * 4f64.ln());
            assert!((grad.values[i] - exact).abs() <= 20.0 * h * exact, "ρ={rho}");
        }
    }
}

#[test]
fn regularization_does_not_change_the_solution() {
    let h = 1.0 / 64.0;
    let mask = ring(&disk(0.25), &disk(1.0), h, 1.0, 0.0);
    for p in [1.5, 3.0] {
        let (a, _) = solve_p_capacitary(&mask, &PLaplaceConfig { eps_reg: 1e-6, ..PLaplaceConfig::with_p(p) }, None).unwrap();
        let (b, _) = solve_p_capacitary(&mask, &PLaplaceConfig { eps_reg: 1e-8, ..PLaplaceConfig::with_p(p) }, None).unwrap();
        let diff = mask.annulus_nodes().map(|i| (a.values[i] - b.values[i]).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-4, "p={p}: {diff}");
    }
}

#[test]
fn warm_start_reproduces_the_solution_quickly() {
    let h = 1.0 / 64.0;
    let mask = ring(&disk(0.25), &disk(1.0), h, 1.0, 0.0);
    let cfg = PLaplaceConfig::with_p(3.0);
    let (u, cold) = solve_p_capacitary(&mask, &cfg, None).unwrap();
    let (v, warm) = solve_p_capacitary(&mask, &cfg, Some(&u)).unwrap();
    assert!(warm.picard_iterations < cold.picard_iterations);
    let diff = mask.annulus_nodes().map(|i| (u.values[i] - v.values[i]).abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-4);
    assert!(warm.residual < cfg.picard_tol);
}

#[test]
fn interior_orientation_matches_radial_profile() {
    // u = 0 on the inner disk, 1 on the outer one
    let h = 1.0 / 64.0;
    let mask = ring(&disk(0.25), &disk(1.0), h, 0.0, 1.0);
    let (u, _) = solve_p_capacitary(&mask, &PLaplaceConfig::default(), None).unwrap();
    let prob = RadialProblem::interior(2.0, 2, 0.25, 1.0, 0.5);
    let f = ScalarField::from_fn(u.grid, |x| radial_potential(&prob, x.norm().clamp(0.25, 1.0)).unwrap());
    let err = mask.annulus_nodes().map(|i| (u.values[i] - f.values[i]).abs()).fold(0.0, f64::max);
    assert!(err <= 5.0 * h, "{err}");
}
