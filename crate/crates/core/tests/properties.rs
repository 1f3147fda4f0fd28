use bernoulli_core::geometry::{
    convex_hull, distance_to_polyline, extract_level_curve, hausdorff, minkowski_combine, point_segment_distance,
    sample_segments, ConvexPolygon, Grid2D, Point,
};
use bernoulli_core::radial::{
    interior_extremum, interior_gap, radial_potential, solve_interior_radii, RadialProblem,
};
use bernoulli_core::ScalarField;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn point_in(r: f64) -> impl Strategy<Value = Point> {
    (-r..r, -r..r).prop_map(|(x, y)| Point::new(x, y))
}

/// Random convex polygon: hull of a handful of points spread around `center`.
fn convex(center: (f64, f64), spread: f64) -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec((0.0..std::f64::consts::TAU, 0.3..1.0f64), 5..12).prop_filter_map(
        "degenerate hull",
        move |pts| {
            let pts: Vec<Point> = pts
                .into_iter()
                .map(|(a, r)| Point::new(center.0 + spread * r * a.cos(), center.1 + spread * r * a.sin()))
                .collect();
            convex_hull(&pts).ok().filter(|p| p.area() > 1e-3 * spread * spread)
        },
    )
}

fn same_polygon(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> bool {
    a.vertices().iter().all(|&v| b.boundary_distance(v) <= tol)
        && b.vertices().iter().all(|&v| a.boundary_distance(v) <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minkowski_of_a_body_with_itself_is_the_body(p in convex((0.3, -0.2), 1.0), t in 0.0..=1.0f64) {
        let m = minkowski_combine(&p, &p, t).unwrap();
        prop_assert!(same_polygon(&m, &p, p.tol_geo()));
    }

    #[test]
    fn minkowski_respects_inclusion(
        p0 in convex((0.0, 0.0), 1.0),
        p1 in convex((0.5, 0.5), 0.7),
        g0 in 0.0..0.5f64,
        g1 in 0.0..0.5f64,
        t in 0.0..=1.0f64,
    ) {
        // Q_i = P_i dilated about a point it contains still contains P_i
        let c0 = p0.centroid();
        let c1 = p1.centroid();
        let q0 = p0.translated(Point::new(-c0.x, -c0.y)).scaled(1.0 + g0).unwrap().translated(c0);
        let q1 = p1.translated(Point::new(-c1.x, -c1.y)).scaled(1.0 + g1).unwrap().translated(c1);
        let inner = minkowski_combine(&p0, &p1, t).unwrap();
        let outer = minkowski_combine(&q0, &q1, t).unwrap();
        let tol = outer.tol_geo() * 10.0;
        for &v in inner.vertices() {
            prop_assert!(outer.contains(v, tol), "{v:?} escapes");
        }
    }

    #[test]
    fn hausdorff_is_symmetric_and_satisfies_the_triangle_inequality(
        a in convex((0.0, 0.0), 1.0),
        b in convex((0.2, 0.1), 0.8),
        c in convex((-0.1, 0.3), 1.2),
    ) {
        let h = 0.02;
        let pitch = h / 8.0;
        let ab = hausdorff(&a, &b, pitch);
        let ba = hausdorff(&b, &a, pitch);
        let bc = hausdorff(&b, &c, pitch);
        let ac = hausdorff(&a, &c, pitch);
        prop_assert!((ab - ba).abs() <= h / 2.0);
        prop_assert!(ac <= ab + bc + h / 2.0);
    }

    #[test]
    fn level_curve_of_linear_field_lies_on_the_level(
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        l in -0.5..0.5f64,
    ) {
        prop_assume!(a.hypot(b) > 0.1);
        let g = Grid2D::new(Point::new(-1.0, -1.0), 1.0 / 16.0, 33, 33).unwrap();
        let f = ScalarField::from_fn(g, |x| a * x.x + b * x.y);
        let (lo, hi) = f.range().unwrap();
        prop_assume!(l > lo + 1e-6 && l < hi - 1e-6);
        let curve = extract_level_curve(&f, l).unwrap();
        for p in curve.points() {
            prop_assert!((a * p.x + b * p.y - l).abs() <= 1e-12, "off level at {p:?}");
        }
    }

    #[test]
    fn distance_to_polyline_matches_brute_force(
        body in convex((0.0, 0.0), 1.0),
        x in point_in(2.0),
    ) {
        let h = 1.0 / 64.0;
        let g = Grid2D::new(Point::new(-1.5, -1.5), h, 193, 193).unwrap();
        // level set of a cone whose zero contour is the polygon boundary
        let f = ScalarField::from_fn(g, |q| body.signed_distance(q));
        let curve = extract_level_curve(&f, 0.0).unwrap();
        let segs = curve.segments();
        let brute = sample_segments(&segs, h / 8.0)
            .into_iter()
            .map(|s| s.dist(x))
            .fold(f64::INFINITY, f64::min);
        let d = distance_to_polyline(x, &curve);
        prop_assert!((d - brute).abs() <= h / 8.0);
        let exact = segs.iter().map(|&(a, b)| point_segment_distance(x, a, b)).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(d, exact);
    }

    #[test]
    fn radial_potential_is_monotone(p in 1.3..6.0f64, n in 2u32..4, r in 0.05..0.8f64, s in 0.0..1.0f64, ds in 1e-3..0.2f64) {
        let prob = RadialProblem::interior(p, n, r, 1.0, 0.5);
        let rho = r + s * (1.0 - r);
        let rho2 = (rho + ds).min(1.0);
        prop_assume!(rho2 > rho);
        prop_assert!(radial_potential(&prob, rho2).unwrap() >= radial_potential(&prob, rho).unwrap());
    }

    #[test]
    fn interior_radius_round_trip(p in 1.5..5.0f64, n in 2u32..4, l in 0.2..0.8f64, frac in 0.05..0.95f64) {
        let prob = RadialProblem::interior(p, n, 0.5, 1.0, l);
        let ext = interior_extremum(&prob);
        let lambda = ext.lambda_max * frac;
        let radii = solve_interior_radii(&prob, lambda).unwrap();
        prop_assert!((interior_gap(&prob, radii.r2) - lambda).abs() <= 1e-10);
        if let Some(r1) = radii.r1 {
            prop_assert!((interior_gap(&prob, r1) - lambda).abs() <= 1e-10);
            prop_assert!(r1 <= radii.r2);
        }
    }
}

#[test]
fn hull_contains_a_thousand_random_points() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let pts: Vec<Point> = (0..1000)
        .map(|_| {
            let (a, r) = (0.0..std::f64::consts::TAU, 0.0..1.0f64).new_tree(&mut runner).unwrap().current();
            Point::new(r.sqrt() * a.cos(), r.sqrt() * a.sin())
        })
        .collect();
    let hull = convex_hull(&pts).unwrap();
    let tol = hull.tol_geo();
    assert!(pts.iter().all(|&p| hull.contains(p, tol)));
}

/// Matrix sweep of the ball gap `Λ(r)` over `p`, `N` and `l`.
#[test]
fn gap_is_unimodal_and_bounded() {
    for &p in &[1.5, 2.0, 3.0, 4.0] {
        for &n in &[2u32, 3] {
            for &l in &[0.25, 0.5, 0.75] {
                let prob = RadialProblem::interior(p, n, 0.5, 1.0, l);
                let ext = interior_extremum(&prob);
                let m = 1000;
                let rs: Vec<f64> = (1..m).map(|k| k as f64 / m as f64).collect();
                let gaps: Vec<f64> = rs.iter().map(|&r| interior_gap(&prob, r)).collect();
                for k in 1..rs.len() {
                    let (r0, r1) = (rs[k - 1], rs[k]);
                    if r1 <= ext.r_max {
                        assert!(gaps[k] > gaps[k - 1], "not increasing at r={r1} (p={p}, N={n}, l={l})");
                    } else if r0 >= ext.r_max {
                        assert!(gaps[k] < gaps[k - 1], "not decreasing at r={r1} (p={p}, N={n}, l={l})");
                    }
                }
                for (&r, &g) in rs.iter().zip(&gaps) {
                    assert!(g + r <= 1.0 + 1e-12, "Λ(r)+r > R at r={r}");
                }
            }
        }
    }
}

#[test]
fn equal_exponent_branch_is_the_limit_of_the_power_branch() {
    for &n in &[2u32, 3] {
        let nf = n as f64;
        for &l in &[0.25, 0.5, 0.75] {
            let at = |p: f64| {
                let prob = RadialProblem::interior(p, n, 0.3, 1.0, l);
                let e = interior_extremum(&prob);
                [interior_gap(&prob, 0.3), radial_potential(&prob, 0.6).unwrap(), e.r_max, e.lambda_max]
            };
            let exact = at(nf);
            for p in [nf - 1e-6, nf + 1e-6] {
                for (a, b) in at(p).iter().zip(exact) {
                    assert!((a - b).abs() <= 1e-4 * b.abs(), "p={p}: {a} vs {b}");
                }
            }
        }
    }
}
