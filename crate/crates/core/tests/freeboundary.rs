use bernoulli_core::freeboundary::{
    check_distance_condition, estimate_lambda_max, exterior_update, iterate_exterior, iterate_interior,
    two_phase_iterate, DistanceSpec, FreeBoundaryConfig, JoiningFunction, TwoPhaseOptions,
};
use bernoulli_core::geometry::{hausdorff, rasterize, BBox, ConvexPolygon, Grid2D, Point, Polygon};
use bernoulli_core::pde::{solve_p_capacitary, PLaplaceConfig};
use bernoulli_core::radial::{
    solve_exterior_radius, solve_interior_radii, two_phase_interface_radius, RadialProblem,
};
use bernoulli_core::Error;

const H: f64 = 1.0 / 64.0;

fn disk(r: f64, n: usize) -> ConvexPolygon {
    ConvexPolygon::regular(Point::default(), r, n).unwrap()
}

fn config(bbox: &BBox, h: f64) -> FreeBoundaryConfig {
    FreeBoundaryConfig::new(Grid2D::covering(bbox, h, 4).unwrap(), PLaplaceConfig::default())
}

fn radius_error(poly: &Polygon, r: f64) -> f64 {
    poly.sample_boundary(1e-3).iter().map(|p| (p.norm() - r).abs()).fold(0.0, f64::max)
}

#[test]
fn exterior_radial_solution_is_a_fixed_point() {
    let k = disk(0.3, 64);
    let rstar = solve_exterior_radius(2.0, 2, 0.3, 0.4, 0.2).unwrap();
    let omega0 = disk(rstar, 256);
    let cfg = config(&disk(1.2, 8).bbox(), H);
    let sol = iterate_exterior(&k, &DistanceSpec::constant(0.4, 0.2).unwrap(), &cfg, &omega0).unwrap();
    assert!(sol.trace.rows[0].hausdorff_step < 2.0 * H, "{:?}", sol.trace.rows[0]);
}

#[test]
fn exterior_iterates_from_a_supersolution_are_nested() {
    let k = disk(0.3, 64);
    let spec = DistanceSpec::constant(0.4, 0.2).unwrap();
    let r0 = solve_exterior_radius(2.0, 2, 0.3, 0.4, 1.5 * 0.2).unwrap();
    let mut omega: Polygon = disk(r0, 256).into();
    let cfg = config(&omega.bbox(), H);
    for _ in 0..4 {
        let next = exterior_update(&k, &spec, &cfg, &omega).unwrap();
        let excess = next.vertices().iter().map(|&v| omega.signed_distance(v)).fold(f64::MIN, f64::max);
        assert!(excess <= H, "left the previous set by {excess}");
        omega = next;
    }
}

#[test]
fn exterior_result_does_not_depend_on_the_starting_supersolution() {
    let k = disk(0.3, 64);
    let spec = DistanceSpec::constant(0.4, 0.2).unwrap();
    let cfg = config(&disk(1.5, 8).bbox(), H);
    let a = iterate_exterior(&k, &spec, &cfg, &disk(1.0, 128).into()).unwrap();
    let b = iterate_exterior(&k, &spec, &cfg, &ConvexPolygon::square(Point::new(0.05, 0.0), 2.6).unwrap().into())
        .unwrap();
    assert!(hausdorff(&a.boundary, &b.boundary, H / 4.0) <= 3.0 * H);
}

#[test]
fn constant_lambda_function_matches_constant_mode_bit_for_bit() {
    let k = ConvexPolygon::square(Point::default(), 0.5).unwrap();
    let omega0: Polygon = disk(1.1, 128).into();
    let cfg = config(&omega0.bbox(), H);
    let a = iterate_exterior(&k, &DistanceSpec::constant(0.3, 0.15).unwrap(), &cfg, &omega0).unwrap();
    let v = DistanceSpec::variable(0.3, |_| 0.15, 0.15, 0.15).unwrap();
    let b = iterate_exterior(&k, &v, &cfg, &omega0).unwrap();
    assert_eq!(a.boundary.vertices(), b.boundary.vertices());
    assert_eq!(a.field.values, b.field.values);
}

#[test]
fn exterior_square_is_convex_and_self_consistent() {
    let k = ConvexPolygon::square(Point::default(), 0.5).unwrap();
    let omega0: Polygon = disk(1.1, 128).into();
    let cfg = config(&omega0.bbox(), H);
    let spec = DistanceSpec::constant(0.3, 0.15).unwrap();
    let sol = iterate_exterior(&k, &spec, &cfg, &omega0).unwrap();
    let last = sol.trace.rows.last().unwrap();
    assert!(last.condition_residual <= 3.0 * H, "{last:?}");
    assert!(sol.boundary.is_convex(sol.boundary.tol_geo()));
    let (res, per) = check_distance_condition(&sol.field, &sol.boundary, &spec).unwrap();
    assert!(res <= 3.0 * H);
    assert!(!per.is_empty());
}

#[test]
fn exterior_with_affine_lambda_converges() {
    let k = disk(0.3, 64);
    let omega0: Polygon = disk(1.1, 128).into();
    let cfg = config(&omega0.bbox(), H);
    let spec = DistanceSpec::variable(0.4, |x| 0.2 + 0.05 * x.x, 0.14, 0.26).unwrap();
    let sol = iterate_exterior(&k, &spec, &cfg, &omega0).unwrap();
    assert!(sol.trace.rows.last().unwrap().condition_residual <= 3.0 * H);
    // larger λ on the right pushes the boundary out there
    let right = sol.boundary.vertices().iter().map(|v| v.x).fold(f64::MIN, f64::max);
    let left = -sol.boundary.vertices().iter().map(|v| v.x).fold(f64::MAX, f64::min);
    assert!(right > left + H);
}

#[test]
fn condition_checker_on_exact_and_dilated_rings() {
    let k = disk(0.3, 128);
    let spec = DistanceSpec::constant(0.4, 0.2).unwrap();
    let rstar = solve_exterior_radius(2.0, 2, 0.3, 0.4, 0.2).unwrap();
    let cfg = config(&disk(1.0, 8).bbox(), H);
    let omega = disk(rstar, 256);
    let mask = rasterize(&k, &omega, &cfg.grid, 1.0, 0.0).unwrap();
    let (u, _) = solve_p_capacitary(&mask, &cfg.pde, None).unwrap();
    let (exact, _) = check_distance_condition(&u, &omega, &spec).unwrap();
    assert!(exact <= 2.0 * H, "{exact}");
    let (dilated, _) = check_distance_condition(&u, &disk(rstar + 0.1, 256), &spec).unwrap();
    assert!(dilated >= 0.1 - 2.0 * H, "{dilated}");
}

#[test]
fn interior_selects_the_elliptic_branch() {
    let omega = disk(1.0, 64);
    let cfg = config(&omega.bbox(), H);
    let sol = iterate_interior(&omega, &DistanceSpec::constant(0.5, 0.2).unwrap(), &cfg).unwrap();
    let radii = solve_interior_radii(&RadialProblem::interior(2.0, 2, 0.5, 1.0, 0.5), 0.2).unwrap();
    let r1 = radii.r1.unwrap();
    let mean = {
        let s = sol.boundary.sample_boundary(1e-3);
        s.iter().map(|p| p.norm()).sum::<f64>() / s.len() as f64
    };
    assert!((mean - radii.r2).abs() < (mean - r1).abs());
    assert!(radius_error(&sol.boundary, radii.r2) <= 3.0 * H);
}

#[test]
fn interior_square_is_convex_and_self_consistent() {
    let omega = ConvexPolygon::square(Point::default(), 2.0).unwrap();
    let cfg = config(&omega.bbox(), H);
    let sol = iterate_interior(&omega, &DistanceSpec::constant(0.5, 0.2).unwrap(), &cfg).unwrap();
    assert!(sol.trace.rows.last().unwrap().condition_residual <= 3.0 * H);
    assert!(sol.boundary.is_convex(sol.boundary.tol_geo()));
    assert!(sol.boundary.vertices().iter().all(|&v| omega.contains(v, 0.0)));
}

#[test]
fn interior_rejects_lambda_above_the_maximum() {
    let omega = disk(1.0, 64);
    let cfg = config(&omega.bbox(), H);
    let r = iterate_interior(&omega, &DistanceSpec::constant(0.5, 0.3).unwrap(), &cfg);
    assert!(matches!(r, Err(Error::LambdaTooLarge { .. })), "{r:?}");
}

#[test]
fn lambda_below_two_grid_steps_is_rejected() {
    let omega = disk(1.0, 64);
    let cfg = config(&omega.bbox(), H);
    let r = iterate_interior(&omega, &DistanceSpec::constant(0.5, 1.5 * H).unwrap(), &cfg);
    assert!(matches!(r, Err(Error::GridTooCoarse { .. })));
}

#[test]
fn lambda_max_scales_with_the_disk() {
    for (radius, expected) in [(1.0, 0.25), (2.0, 0.5)] {
        let omega = disk(radius, 128);
        let cfg = config(&omega.bbox(), H);
        let est = estimate_lambda_max(&omega, 0.5, 2.0, &cfg).unwrap();
        assert!((est - expected).abs() <= 2.0 * H, "R={radius}: {est}");
    }
}

#[test]
fn lambda_max_of_a_square_lies_between_its_balls() {
    let omega = ConvexPolygon::square(Point::default(), 2.0).unwrap();
    let cfg = config(&omega.bbox(), H);
    let est = estimate_lambda_max(&omega, 0.5, 2.0, &cfg).unwrap();
    assert!(est >= 0.25 - 2.0 * H && est <= 0.25 * 2f64.sqrt() + 2.0 * H, "{est}");
    let below = iterate_interior(&omega, &DistanceSpec::constant(0.5, est - 2.0 * H).unwrap(), &cfg);
    assert!(below.is_ok(), "{below:?}");
}

#[test]
fn symmetric_two_phase_matches_radial_shooting() {
    let (k1, k3) = (disk(0.2, 64), disk(1.0, 256));
    let cfg = config(&k3.bbox(), H);
    let g = JoiningFunction::symmetric();
    let sol = two_phase_iterate(&k1, &k3, &g, 0.3, 2.0, &cfg, &TwoPhaseOptions::for_grid(&cfg.grid)).unwrap();
    let s = two_phase_interface_radius(2.0, 2, 0.2, 1.0, 0.3, |q| q).unwrap();
    assert!(sol.max_joining_residual <= 3.0 * H);
    assert!(radius_error(sol.k2.polygon(), s) <= 3.0 * H);
    assert!(sol.separation_ratio > 0.0);
}

#[test]
fn reciprocal_joining_matches_radial_shooting() {
    let h = 1.0 / 32.0;
    let (k1, k3) = (disk(0.5, 64), disk(3.0, 256));
    let cfg = config(&k3.bbox(), h);
    let g = JoiningFunction::new(|_, q| 1.0 / (1.0 + q), 0.0, 1.0, 0.0);
    let sol = two_phase_iterate(&k1, &k3, &g, 0.3, 2.0, &cfg, &TwoPhaseOptions::for_grid(&cfg.grid)).unwrap();
    let s = two_phase_interface_radius(2.0, 2, 0.5, 3.0, 0.3, |q| 1.0 / (1.0 + q)).unwrap();
    assert!(sol.max_joining_residual <= 3.0 * h);
    assert!(radius_error(sol.k2.polygon(), s) <= 3.0 * h);
}

#[test]
fn separation_ratio_stays_positive_across_configurations() {
    let h = 1.0 / 32.0;
    let cases = [
        (disk(0.2, 64), disk(1.0, 128)),
        (ConvexPolygon::square(Point::new(0.1, 0.0), 0.4).unwrap(), disk(1.0, 128)),
        (disk(0.25, 64), ConvexPolygon::square(Point::default(), 2.0).unwrap()),
    ];
    let mut ratios = Vec::new();
    for (k1, k3) in &cases {
        let cfg = config(&k3.bbox(), h);
        let sol = two_phase_iterate(k1, k3, &JoiningFunction::symmetric(), 0.3, 2.0, &cfg, &TwoPhaseOptions::for_grid(&cfg.grid))
            .unwrap();
        ratios.push(sol.separation_ratio);
    }
    let eta = ratios.iter().copied().fold(f64::MAX, f64::min);
    assert!(eta > 0.1, "{ratios:?}");
}

#[test]
fn enlarging_the_interface_raises_both_phase_potentials() {
    let h = 1.0 / 64.0;
    let (k1, k3) = (disk(0.2, 64), disk(1.0, 256));
    let (small, large) = (disk(0.45, 128), disk(0.55, 128));
    let cfg = config(&k3.bbox(), h);
    let solve = |a: &Polygon, b: &Polygon, vi: f64, vo: f64| {
        let m = rasterize(a, b, &cfg.grid, vi, vo).unwrap();
        let u = solve_p_capacitary(&m, &cfg.pde, None).unwrap().0;
        (m, u)
    };
    let (m1s, u1s) = solve(&k1, &small, 1.0, 0.0);
    let (_, u1l) = solve(&k1, &large, 1.0, 0.0);
    let (m2s, u2s) = solve(&small, &k3, 0.0, -1.0);
    let (m2l, u2l) = solve(&large, &k3, 0.0, -1.0);
    let tol = 1e-6;
    for i in m1s.annulus_nodes() {
        assert!(u1l.values[i] >= u1s.values[i] - tol);
    }
    for i in m2l.annulus_nodes().filter(|&i| m2s.label(i) == m2l.label(i)) {
        assert!(u2l.values[i] >= u2s.values[i] - tol);
    }
}

#[test]
fn joining_hypotheses_report() {
    let pts = [Point::default(), Point::new(0.5, 0.5)];
    let sym = JoiningFunction::symmetric().check_hypotheses(&pts);
    assert!(sym.positive && sym.nondecreasing && sym.growth_bounds);
    // the textbook example decreases in q
    let classical = JoiningFunction::classical(1.0, 1.0).check_hypotheses(&pts);
    assert!(classical.positive && !classical.nondecreasing);
}

#[test]
fn touching_bodies_are_rejected() {
    let cfg = config(&disk(1.0, 8).bbox(), H);
    let r = two_phase_iterate(&disk(0.98, 64), &disk(1.0, 64), &JoiningFunction::symmetric(), 0.3, 2.0, &cfg, &TwoPhaseOptions::for_grid(&cfg.grid));
    assert!(matches!(r, Err(Error::EmptyAnnulus { .. })), "{r:?}");
}
