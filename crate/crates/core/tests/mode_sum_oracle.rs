use std::f64::consts::PI;

use wedge_casimir::geometry::{Medium, PointSplit, WedgeGeometry};
use wedge_casimir::mode_sum::{
    contact_term, graf_sides, regularized_tensor_oracle, regularized_tensor_via,
    regularized_thetatheta_oracle, s_tensor_images, s_tensor_modesum, s_thetatheta_images,
    s_thetatheta_modesum, thetatheta_spectral_term, DerivativeMode, Field, OracleRoute,
    RotatedProductKernel,
};
use wedge_casimir::quadrature::{ExtrapolationSpec, QuadratureSpec, SpectralPoint};
use wedge_casimir::specfun::bessel_ik;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn wedge(p: u32) -> WedgeGeometry {
    WedgeGeometry::new(p).unwrap()
}

// Closed-form coefficient, written out here so the test does not lean on
// the library's own closed-form module.
fn c_coeff(p: f64, n: f64, r: f64) -> f64 {
    (p * p + 11.0) * (p * p - 1.0) / (720.0 * PI * PI * n * r.powi(4))
}

#[test]
fn m_zero_term_reduces_to_i0k0_minus_i1k1() {
    let geom = wedge(3);
    let split = PointSplit::new(&geom, 0.8, 1.1, 0.4, 0.4).unwrap();
    let rho = 1.3;
    let t = thetatheta_spectral_term(geom.mode(0), SpectralPoint(rho), &split).unwrap();
    let a0 = bessel_ik(0, rho * 0.8).unwrap();
    let b0 = bessel_ik(0, rho * 1.1).unwrap();
    let a1 = bessel_ik(1, rho * 0.8).unwrap();
    let b1 = bessel_ik(1, rho * 1.1).unwrap();
    let expected = -rho * rho * (a0.value_i * b0.value_k - a1.value_i * b1.value_k);
    assert!(rel(t, expected) < 1e-14, "{t} vs {expected}");
}

#[test]
fn radial_derivative_matches_finite_differences() {
    // d_r d_r' [I_nu(rho r) K_nu(rho r')] = rho^2 I'K', r < r'
    let (rho, r, rp) = (1.7, 0.6, 1.0);
    let prod = |nu: u32, a: f64, b: f64| {
        bessel_ik(nu, rho * a).unwrap().value_i * bessel_ik(nu, rho * b).unwrap().value_k
    };
    for nu in [0, 1, 2, 6, 12] {
        let exact = rho * rho * bessel_ik(nu, rho * r).unwrap().deriv_i
            * bessel_ik(nu, rho * rp).unwrap().deriv_k;
        let mut errs = Vec::new();
        for h in [2e-4, 1e-4] {
            let fd = (prod(nu, r + h, rp + h) - prod(nu, r + h, rp - h) - prod(nu, r - h, rp + h)
                + prod(nu, r - h, rp - h))
                / (4.0 * h * h);
            errs.push(rel(fd, exact));
        }
        assert!(errs[1] < 1e-6, "nu={nu}: {errs:?}");
        // Second order: halving h cuts the error by about four.
        assert!(errs[0] / errs[1] > 3.0 && errs[0] / errs[1] < 5.0, "nu={nu}: {errs:?}");
    }
}

#[test]
fn kernels_assemble_to_the_thetatheta_bracket() {
    let geom = wedge(2);
    let split = PointSplit::new(&geom, 0.9, 1.0, 0.7, 0.7).unwrap();
    let mode = geom.mode(1);
    let rho = SpectralPoint(1.0);
    let k = |f| RotatedProductKernel::new(f).value(mode, rho, &split).unwrap();
    let assembled = 0.5
        * (k(Field::ElectricR) - k(Field::ElectricTheta) + k(Field::ElectricZ)
            + k(Field::MagneticR)
            - k(Field::MagneticTheta)
            + k(Field::MagneticZ));
    let direct = thetatheta_spectral_term(mode, rho, &split).unwrap();
    assert!(rel(assembled, direct) < 1e-13, "{assembled} vs {direct}");
}

#[test]
fn graf_identity_residuals() {
    let mut worst = 0.0f64;
    for p in [1, 2, 3, 4, 6] {
        for rho in [0.5, 1.0, 5.0] {
            for xi in [0.5, 0.9] {
                for psi in [0.0, 0.3] {
                    let (lhs, rhs) = graf_sides(p, rho, xi, 1.0, psi).unwrap();
                    worst = worst.max(rel(rhs, lhs));
                }
            }
        }
    }
    assert!(worst <= 1e-10, "worst residual {worst:e}");
    let (lhs, rhs) = graf_sides(3, 1.0, 0.7, 1.0, 0.3).unwrap();
    assert!(rel(rhs, lhs) <= 1e-10);
}

#[test]
fn routes_agree_on_split_points() {
    let quad = QuadratureSpec::default();
    let medium = Medium::VACUUM;
    for p in [1, 2, 3] {
        let geom = wedge(p);
        let theta = 0.5 * geom.alpha();
        let split = PointSplit::new(&geom, 1.0, 0.99, theta, theta).unwrap();
        let modes = s_thetatheta_modesum(&geom, &medium, &split, &quad).unwrap();
        let images = s_thetatheta_images(&geom, &medium, &split, &quad).unwrap();
        assert!(rel(modes, images) < 1e-8, "p={p}: {modes} vs {images}");
    }
}

#[test]
fn full_tensor_routes_agree_and_are_traceless_off_coincidence() {
    let quad = QuadratureSpec::default();
    let geom = wedge(3);
    let split = PointSplit::new(&geom, 1.0, 0.8, 0.3, 0.3).unwrap();
    let medium = Medium::VACUUM;
    let a = s_tensor_modesum(&geom, &medium, &split, &quad).unwrap();
    let b = s_tensor_images(&geom, &medium, &split, &quad, DerivativeMode::Analytic).unwrap();
    for (x, y) in a.components().iter().zip(b.components()) {
        assert!(rel(*x, y) < 1e-8, "{a:?} vs {b:?}");
    }
}

#[test]
fn finite_difference_image_mode_converges_to_analytic() {
    let quad = QuadratureSpec::default().with_rel_tol(1e-10);
    let geom = wedge(2);
    let split = PointSplit::new(&geom, 1.0, 0.6, 0.5, 0.9).unwrap();
    let medium = Medium::VACUUM;
    let exact = s_tensor_images(&geom, &medium, &split, &quad, DerivativeMode::Analytic).unwrap();
    let mut errs = Vec::new();
    for step in [1e-3, 5e-4] {
        let fd = s_tensor_images(
            &geom,
            &medium,
            &split,
            &quad,
            DerivativeMode::FiniteDifference { step },
        )
        .unwrap();
        errs.push(rel(fd.theta_theta, exact.theta_theta));
    }
    assert!(errs[1] < 1e-5, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0 && errs[0] / errs[1] < 5.0, "{errs:?}");
}

#[test]
fn medium_enters_only_through_the_index() {
    let quad = QuadratureSpec::default();
    let geom = wedge(2);
    let split = PointSplit::new(&geom, 1.0, 0.9, 0.6, 0.6).unwrap();
    let vac = s_thetatheta_modesum(&geom, &Medium::VACUUM, &split, &quad).unwrap();
    let diel = s_thetatheta_modesum(&geom, &Medium::new(4.0, 1.0).unwrap(), &split, &quad).unwrap();
    assert!(rel(vac / diel, 2.0) < 1e-12);
    let mixed = Medium::new(2.0, 3.0).unwrap();
    let reg_vac = regularized_thetatheta_oracle(
        &geom,
        &Medium::VACUUM,
        1.0,
        &quad,
        &ExtrapolationSpec::default(),
    )
    .unwrap();
    let reg = regularized_thetatheta_oracle(&geom, &mixed, 1.0, &quad, &ExtrapolationSpec::default())
        .unwrap();
    assert!(rel(reg * 6f64.sqrt(), reg_vac) < 1e-12);
}

#[test]
fn contact_term_is_the_direct_image() {
    let quad = QuadratureSpec::default();
    let medium = Medium::VACUUM;
    for p in [2, 4] {
        let geom = wedge(p);
        let split = PointSplit::new(&geom, 1.0, 0.95, 0.2, 0.2).unwrap();
        let contact = contact_term(&medium, &split, &quad).unwrap();
        let direct = s_thetatheta_images(&wedge(1), &medium, &split, &quad).unwrap();
        assert!(rel(contact, direct) < 1e-8);
        assert_eq!(contact - contact, 0.0);
    }
    // Grows without bound as the split closes.
    let geom = wedge(2);
    let mut last = 0.0f64;
    for h in [0.1, 0.05, 0.025] {
        let split = PointSplit::radial(&geom, 1.0, h, 0.5).unwrap();
        let c = contact_term(&medium, &split, &quad).unwrap().abs();
        assert!(c > 10.0 * last, "h={h}: {c} after {last}");
        last = c;
    }
}

#[test]
fn regularized_image_route_matches_closed_coefficient() {
    let quad = QuadratureSpec::default();
    let extrap = ExtrapolationSpec::default();
    for p in [1u32, 2, 3, 4, 6] {
        let t = regularized_tensor_oracle(&wedge(p), &Medium::VACUUM, 1.0, &quad, &extrap).unwrap();
        let c = c_coeff(f64::from(p), 1.0, 1.0);
        let expect = [c, -3.0 * c, c, c];
        for (x, y) in t.diagonal().iter().zip(expect) {
            assert!((x - y).abs() <= 1e-8 * c.max(1e-300), "p={p}: {t:?}");
        }
    }
    let t2 = regularized_thetatheta_oracle(&wedge(2), &Medium::VACUUM, 1.0, &quad, &extrap).unwrap();
    assert!((t2 + 0.018998).abs() < 1e-6, "{t2}");
    let t2r = regularized_thetatheta_oracle(&wedge(2), &Medium::VACUUM, 2.0, &quad, &extrap).unwrap();
    assert!(rel(t2r, t2 / 16.0) < 1e-9);
}

#[test]
fn extrapolated_mode_sum_route_agrees_with_images() {
    let quad = QuadratureSpec::default();
    let extrap = ExtrapolationSpec::default();
    for p in [2u32, 3] {
        let geom = wedge(p);
        let img = regularized_tensor_via(
            OracleRoute::Images,
            &geom,
            &Medium::VACUUM,
            1.0,
            0.5 * geom.alpha(),
            &quad,
            &extrap,
        )
        .unwrap();
        for theta in [0.25 * geom.alpha(), 0.5 * geom.alpha()] {
            let ms = regularized_tensor_via(
                OracleRoute::ExtrapolatedModeSum,
                &geom,
                &Medium::VACUUM,
                1.0,
                theta,
                &quad,
                &extrap,
            )
            .unwrap();
            for (x, y) in ms.tensor.components().iter().zip(img.tensor.components()) {
                assert!(rel(*x, y) < 1e-6, "p={p} theta={theta}: {ms:?} vs {img:?}");
            }
            assert!(ms.tensor.trace().abs() < 1e-6 * ms.tensor.r_r.abs());
        }
    }
}

#[test]
fn mode_sum_route_converges_for_narrow_wedges() {
    let quad = QuadratureSpec::default();
    let extrap = ExtrapolationSpec::default();
    for p in [6u32, 10] {
        let g = wedge(p);
        let est = regularized_tensor_via(
            OracleRoute::ExtrapolatedModeSum,
            &g,
            &Medium::VACUUM,
            1.0,
            0.5 * g.alpha(),
            &quad,
            &extrap,
        )
        .unwrap();
        let c = c_coeff(f64::from(p), 1.0, 1.0);
        assert!(rel(est.tensor.theta_theta, -3.0 * c) < 1e-7, "p={p}");
    }
}
