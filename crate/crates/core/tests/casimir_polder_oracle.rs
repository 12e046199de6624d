use std::f64::consts::PI;

use wedge_casimir::casimir_polder::{
    transverse_force, u_closed, u_images_regularized, u_modesum, u_regularized_oracle,
    DipoleParams,
};
use wedge_casimir::geometry::{Medium, PointSplit, WedgeGeometry};
use wedge_casimir::quadrature::{ExtrapolationSpec, QuadratureSpec};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn wedge(p: u32) -> WedgeGeometry {
    WedgeGeometry::new(p).unwrap()
}

fn dip() -> DipoleParams {
    DipoleParams::new(1.0).unwrap()
}

#[test]
fn single_plate_law() {
    let g = wedge(1);
    for (r, theta) in [(1.0, 0.3), (2.5, 1.2), (0.7, PI / 2.0)] {
        let z: f64 = r * f64::sin(theta);
        let expect = -3.0 / (32.0 * PI * PI * z.powi(4));
        let u = u_closed(&g, &Medium::VACUUM, &dip(), r, theta).unwrap().u;
        assert!(rel(u, expect) < 1e-13, "{u} vs {expect}");
    }
}

#[test]
fn midplane_of_right_angle_wedge() {
    let g = wedge(2);
    let u = u_closed(&g, &Medium::VACUUM, &dip(), 1.0, PI / 4.0).unwrap();
    assert!(rel(u.u, -11.5 / (16.0 * PI * PI)) < 1e-13);
    assert!(u.force_theta.abs() < 1e-12);
}

#[test]
fn image_route_matches_closed_form() {
    let quad = QuadratureSpec::default();
    for p in [1u32, 2, 3, 4, 6] {
        let g = wedge(p);
        for frac in [0.1, 0.33, 0.5, 0.8] {
            let theta = frac * g.alpha();
            for r in [0.5, 1.0] {
                let img = u_images_regularized(&g, &Medium::VACUUM, &dip(), r, theta, &quad).unwrap();
                let closed = u_closed(&g, &Medium::VACUUM, &dip(), r, theta).unwrap().u;
                assert!(rel(img, closed) < 1e-8, "p={p} theta={theta}: {img} vs {closed}");
            }
        }
    }
}

#[test]
fn mode_sum_oracle_matches_closed_form() {
    let quad = QuadratureSpec::default();
    let extrap = ExtrapolationSpec::default();
    for p in [1u32, 2, 3] {
        let g = wedge(p);
        for theta in [g.alpha() / 3.0, g.alpha() / 2.0] {
            let oracle =
                u_regularized_oracle(&g, &Medium::VACUUM, &dip(), 1.0, theta, &quad, &extrap)
                    .unwrap();
            let closed = u_closed(&g, &Medium::VACUUM, &dip(), 1.0, theta).unwrap().u;
            assert!(rel(oracle, closed) < 1e-3, "p={p} theta={theta}: {oracle} vs {closed}");
        }
    }
}

#[test]
fn medium_prefactor() {
    let g = wedge(3);
    let quad = QuadratureSpec::default();
    let vac = u_closed(&g, &Medium::VACUUM, &dip(), 1.0, 0.4).unwrap().u;
    let split = PointSplit::new(&g, 1.0, 0.9, 0.4, 0.4).unwrap();
    let vac_ms = u_modesum(&g, &Medium::VACUUM, &dip(), &split, &quad).unwrap();
    for (eps, mu) in [(2.25, 1.0), (2.0, 2.0), (1.0, 5.0)] {
        let m = Medium::new(eps, mu).unwrap();
        let k = (eps * mu).sqrt() * eps;
        let u = u_closed(&g, &m, &dip(), 1.0, 0.4).unwrap().u;
        assert!(rel(u * k, vac) < 1e-14);
        let ms = u_modesum(&g, &m, &dip(), &split, &quad).unwrap();
        assert!(rel(ms * k, vac_ms) < 1e-12);
    }
}

#[test]
fn mirror_symmetry_and_attraction() {
    for p in [1u32, 2, 3, 5] {
        let g = wedge(p);
        for frac in [0.05, 0.2, 0.45] {
            let a = u_closed(&g, &Medium::VACUUM, &dip(), 1.3, frac * g.alpha()).unwrap();
            let b = u_closed(&g, &Medium::VACUUM, &dip(), 1.3, (1.0 - frac) * g.alpha()).unwrap();
            assert!(rel(a.u, b.u) < 1e-12);
            assert!(a.u < 0.0);
            // Azimuthal force points toward the nearer wall (theta = 0 here).
            assert!(a.force_theta < 0.0 && b.force_theta > 0.0);
        }
    }
}

#[test]
fn wall_divergence_coefficient() {
    let p = 3u32;
    let g = wedge(p);
    let pf = f64::from(p);
    let lead = -1.5 * pf.powi(4) / (16.0 * PI * PI);
    for theta in [1e-3, 1e-4] {
        let u = u_closed(&g, &Medium::VACUUM, &dip(), 1.0, theta).unwrap().u;
        let coeff = u * (pf * theta).powi(4);
        assert!(rel(coeff, lead) < 10.0 * (pf * theta).powi(2), "{coeff} vs {lead}");
    }
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let g = wedge(3);
    let m = Medium::VACUUM;
    let (r, theta) = (1.1, 0.37);
    let exact = u_closed(&g, &m, &dip(), r, theta).unwrap();
    let u = |r: f64, t: f64| u_closed(&g, &m, &dip(), r, t).unwrap().u;
    let mut errs = Vec::new();
    for h in [1e-3, 5e-4] {
        let fr = -(u(r + h, theta) - u(r - h, theta)) / (2.0 * h);
        let ft = -(u(r, theta + h) - u(r, theta - h)) / (2.0 * h * r);
        errs.push((rel(fr, exact.force_r), rel(ft, exact.force_theta)));
    }
    assert!(errs[1].0 < 1e-5 && errs[1].1 < 1e-5, "{errs:?}");
    let ratio = errs[0].1 / errs[1].1;
    assert!(ratio > 3.5 && ratio < 4.5, "{errs:?}");
    // r^-5 scaling of the radial force.
    let far = u_closed(&g, &m, &dip(), 2.0 * r, theta).unwrap();
    assert!(rel(far.force_r * 32.0, exact.force_r) < 1e-13);
}

#[test]
fn denser_medium_deflects_less() {
    let g = wedge(2);
    let mut last = f64::INFINITY;
    for eps in [1.0, 1.5, 2.25, 4.0, 9.0] {
        let m = Medium::new(eps, 1.0).unwrap();
        let (_, ft) = transverse_force(&g, &m, &dip(), 1.0, 0.3).unwrap();
        assert!(ft.abs() < last);
        last = ft.abs();
    }
}

#[test]
fn oracle_converges_away_from_the_wall_in_narrow_wedges() {
    let quad = QuadratureSpec::default();
    let extrap = ExtrapolationSpec::default();
    for (p, frac) in [(4u32, 0.5), (5, 0.25), (6, 0.5), (10, 0.5)] {
        let g = wedge(p);
        let theta = frac * g.alpha();
        let u = u_regularized_oracle(&g, &Medium::VACUUM, &dip(), 1.0, theta, &quad, &extrap)
            .unwrap();
        let expect = u_images_regularized(&g, &Medium::VACUUM, &dip(), 1.0, theta, &quad).unwrap();
        assert!(rel(u, expect) < 1e-7, "p={p}: {u} vs {expect}");
    }
}
