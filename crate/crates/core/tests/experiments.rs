use bernoulli_core::experiments::{run_brunn_minkowski, run_converge_bernoulli};
use bernoulli_core::freeboundary::FreeBoundaryConfig;
use bernoulli_core::geometry::{ConvexPolygon, Grid2D, Point};
use bernoulli_core::pde::PLaplaceConfig;
use bernoulli_core::radial::{exterior_bernoulli_radius, solve_exterior_radius};
use bernoulli_core::Error;

fn disk(r: f64) -> ConvexPolygon {
    ConvexPolygon::regular(Point::default(), r, 128).unwrap()
}

fn config(h: f64) -> FreeBoundaryConfig {
    let g = Grid2D::covering(&disk(1.0).bbox(), h, 2).unwrap();
    FreeBoundaryConfig::new(g, PLaplaceConfig::default())
}

fn mean_radius(p: &bernoulli_core::Polygon) -> f64 {
    let s = p.sample_boundary(1e-3);
    s.iter().map(|x| x.norm()).sum::<f64>() / s.len() as f64
}

#[test]
fn bernoulli_sequence_is_nested_with_rising_gradient() {
    let h = 1.0 / 96.0;
    let rep = run_converge_bernoulli(&disk(0.3), 2.0, 0.2, 3, &config(h)).unwrap();
    assert_eq!(rep.rows.len(), 3);
    assert!(rep.truncated.is_empty());
    assert!(rep.nested(h));
    let g: Vec<f64> = rep.rows.iter().map(|r| r.g_hat).collect();
    assert!(g[0] < g[1] && g[1] < g[2], "{g:?}");
    for r in &rep.rows {
        let exact = solve_exterior_radius(2.0, 2, 0.3, r.level, r.lambda).unwrap();
        assert!((mean_radius(&r.boundary) - exact).abs() <= 3.0 * h, "n={}", r.n);
    }
}

#[test]
fn small_lambdas_are_truncated() {
    let h = 1.0 / 32.0;
    // 0.2, 0.1, 0.05 survive 2h = 0.0625 only for the first two
    let rep = run_converge_bernoulli(&disk(0.3), 2.0, 0.2, 3, &config(h)).unwrap();
    assert_eq!(rep.rows.len(), 2);
    assert_eq!(rep.truncated, vec![0.05]);
    let r = run_converge_bernoulli(&disk(0.3), 2.0, 0.05, 3, &config(h));
    assert!(matches!(r, Err(Error::GridTooCoarse { .. })));
    let r = run_converge_bernoulli(&disk(0.3), 2.0, 0.2, 2, &config(h));
    assert!(matches!(r, Err(Error::InvalidParameter(_))));
}

/// Doubling ω thins the ring by the factor the radial oracle predicts.
#[test]
fn doubling_omega_thins_the_ring_like_the_radial_oracle() {
    let h = 1.0 / 96.0;
    let cfg = config(h);
    let a = run_converge_bernoulli(&disk(0.3), 2.0, 0.2, 3, &cfg).unwrap();
    let b = run_converge_bernoulli(&disk(0.3), 4.0, 0.2, 3, &cfg).unwrap();
    let (ra, rb) = (a.rows.last().unwrap(), b.rows.last().unwrap());
    let measured = (mean_radius(&rb.boundary) - 0.3) / (mean_radius(&ra.boundary) - 0.3);
    let oracle = (solve_exterior_radius(2.0, 2, 0.3, rb.level, rb.lambda).unwrap() - 0.3)
        / (solve_exterior_radius(2.0, 2, 0.3, ra.level, ra.lambda).unwrap() - 0.3);
    assert!((measured / oracle - 1.0).abs() <= 0.1, "measured {measured}, oracle {oracle}");
    // in the limit the ratio is not one half
    let limit = (exterior_bernoulli_radius(2.0, 2, 0.3, 4.0).unwrap() - 0.3)
        / (exterior_bernoulli_radius(2.0, 2, 0.3, 2.0).unwrap() - 0.3);
    assert!((limit - 0.5635).abs() < 1e-3, "{limit}");
}

#[test]
fn brunn_minkowski_equality_for_equal_disks() {
    let h = 1.0 / 32.0;
    let rep = run_brunn_minkowski(&disk(1.0), &disk(1.0), 0.5, 2.0, &[0.25, 0.5, 0.75], &config(h)).unwrap();
    for r in &rep.rows {
        assert!(r.deficit.abs() <= 4.0 * h, "t={}: {}", r.t, r.deficit);
        assert!(r.inclusion_margin >= -h, "t={}: {}", r.t, r.inclusion_margin);
    }
}

#[test]
fn brunn_minkowski_linear_for_homothetic_disks() {
    let h = 1.0 / 32.0;
    let rep = run_brunn_minkowski(&disk(1.0), &disk(2.0), 0.5, 2.0, &[0.25, 0.5, 0.75], &config(h)).unwrap();
    for r in &rep.rows {
        assert!(r.deficit.abs() <= 4.0 * h, "t={}: {}", r.t, r.deficit);
        assert!((r.lambda_max - 0.25 * (1.0 + r.t)).abs() <= 4.0 * h);
    }
}

#[test]
fn brunn_minkowski_rejects_t_outside_unit_interval() {
    let r = run_brunn_minkowski(&disk(1.0), &disk(1.0), 0.5, 2.0, &[1.5], &config(1.0 / 32.0));
    assert!(matches!(r, Err(Error::OutOfRange { .. })));
}
