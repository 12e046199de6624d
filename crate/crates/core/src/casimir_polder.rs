//! Interaction energy of a static polarizable dipole inside the wedge,
//! `U = -alpha0 <E^2> / 2`, and the force it implies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GeometryError};
use crate::geometry::{image_distance, Medium, PointSplit, WedgeGeometry};
use crate::mode_sum::{
    electric_square, integrate_components, k0_square_derivs, ladder_for, min_distance,
    mode_sum_vec, SPLIT_REL_TOL_FLOOR,
};
use crate::quadrature::{extrapolate_coincidence, ExtrapolationSpec, QuadratureSpec};

/// Static polarizability (Heaviside-Lorentz, volume units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleParams {
    alpha0: f64,
}

impl DipoleParams {
    pub fn new(alpha0: f64) -> Result<Self, GeometryError> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(GeometryError::InvalidPolarizability(alpha0));
        }
        Ok(Self { alpha0 })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolderResult {
    pub u: f64,
    /// `-dU/dr`
    pub force_r: f64,
    /// `-(1/r) dU/dtheta`
    pub force_theta: f64,
}

/// The bracket `B(theta) = (3/2) p^4/s^4 - p^2 (p^2-1)/s^2 - (p^2+11)(p^2-1)/90`
/// with `s = sin(p theta)`, and `dB/dtheta`.
pub fn polder_bracket(p: f64, theta: f64) -> (f64, f64) {
    let (s, c) = (p * theta).sin_cos();
    let p2 = p * p;
    let b = 1.5 * p2 * p2 / s.powi(4) - p2 * (p2 - 1.0) / (s * s) - (p2 + 11.0) * (p2 - 1.0) / 90.0;
    let db = (-6.0 * p2 * p2 / s.powi(5) + 2.0 * p2 * (p2 - 1.0) / s.powi(3)) * p * c;
    (b, db)
}

fn check_point(geom: &WedgeGeometry, r: f64, theta: f64) -> crate::Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeometryError::InvalidRadius(r).into());
    }
    if theta == 0.0 || theta == geom.alpha() {
        return Err(Error::OnWall { theta });
    }
    if !geom.is_interior(theta) {
        return Err(GeometryError::NotInterior {
            theta,
            alpha: geom.alpha(),
        }
        .into());
    }
    Ok(())
}

/// `U = -alpha0 / (16 pi^2 n eps r^4) B(theta)` with its analytic gradient.
pub fn u_closed(
    geom: &WedgeGeometry,
    medium: &Medium,
    dip: &DipoleParams,
    r: f64,
    theta: f64,
) -> crate::Result<PolderResult> {
    check_point(geom, r, theta)?;
    let k = dip.alpha0() / (16.0 * PI * PI * medium.refractive_index() * medium.epsilon());
    let (b, db) = polder_bracket(f64::from(geom.p()), theta);
    let r4 = r.powi(4);
    Ok(PolderResult {
        u: -k * b / r4,
        force_r: -4.0 * k * b / (r4 * r),
        force_theta: k * db / (r4 * r),
    })
}

/// `(-dU/dr, -(1/r) dU/dtheta)` from [`u_closed`].
pub fn transverse_force(
    geom: &WedgeGeometry,
    medium: &Medium,
    dip: &DipoleParams,
    r: f64,
    theta: f64,
) -> crate::Result<(f64, f64)> {
    let res = u_closed(geom, medium, dip, r, theta)?;
    Ok((res.force_r, res.force_theta))
}

fn energy_prefactor(medium: &Medium, dip: &DipoleParams) -> f64 {
    -0.5 * dip.alpha0() / medium.epsilon()
}

/// Distances of the images entering `<E(r) E(r')>`: rotations of the second
/// point (`theta - theta'` family, from index `first_direct`) and of its
/// reflection (`theta + theta'` family).
fn field_image_distances(geom: &WedgeGeometry, split: &PointSplit, first_direct: u32) -> Vec<f64> {
    let p = geom.p();
    let step = 2.0 * PI / f64::from(p);
    let (r, rp) = (split.r(), split.r_prime());
    let direct = (first_direct..p).map(|n| image_distance(r, rp, split.psi() + step * f64::from(n)));
    let mirror = (0..p).map(|n| {
        image_distance(r, rp, split.theta() + split.theta_prime() + step * f64::from(n))
    });
    direct.chain(mirror).collect()
}

/// Unregularized point-split potential from the mode sum,
/// `-alpha0/(2 eps) * 1/(2 pi alpha n) int rho drho sum'_m eps<E E'>_m`.
pub fn u_modesum(
    geom: &WedgeGeometry,
    medium: &Medium,
    dip: &DipoleParams,
    split: &PointSplit,
    quad: &QuadratureSpec,
) -> crate::Result<f64> {
    if split.r() == split.r_prime() {
        return Err(Error::NeedsRadialSplit { r: split.r() });
    }
    let p = geom.p();
    let pref = energy_prefactor(medium, dip) / (2.0 * PI * geom.alpha() * medium.refractive_index());
    let decay = min_distance(&field_image_distances(geom, split, 0));
    let ([v], _) = integrate_components(
        |rho| {
            let mut ladder = ladder_for(rho, split)?;
            let [s] = mode_sum_vec(&mut ladder, p, rho, split, |k| [electric_square(k)])?;
            Ok([pref * rho * s])
        },
        decay,
        quad,
    )?;
    Ok(v)
}

/// `u_modesum(p) - u_modesum(1)` at one split, the subtraction done under the
/// spectral integral from a shared Bessel ladder. The relative tolerance is
/// floored at `1e-8` because of the cancellation involved.
pub fn u_difference_at_split(
    geom: &WedgeGeometry,
    medium: &Medium,
    dip: &DipoleParams,
    split: &PointSplit,
    quad: &QuadratureSpec,
) -> crate::Result<f64> {
    if split.r() == split.r_prime() {
        return Err(Error::NeedsRadialSplit { r: split.r() });
    }
    let p = geom.p();
    if p == 1 {
        return Ok(0.0);
    }
    let pref = energy_prefactor(medium, dip) / (2.0 * PI * PI * medium.refractive_index());
    let decay = min_distance(&field_image_distances(geom, split, 1));
    let pf = f64::from(p);
    let quad = quad.with_rel_tol(quad.rel_tol.max(SPLIT_REL_TOL_FLOOR));
    let ([v], _) = integrate_components(
        |rho| {
            let mut ladder = ladder_for(rho, split)?;
            let [wedge] = mode_sum_vec(&mut ladder, p, rho, split, |k| [electric_square(k)])?;
            let [plate] = mode_sum_vec(&mut ladder, 1, rho, split, |k| [electric_square(k)])?;
            Ok([pref * rho * (pf * wedge - plate)])
        },
        decay,
        &quad,
    )?;
    Ok(v)
}

/// Regularized potential from the image sum at coincidence: every mirror
/// image plus the rotated images `n >= 1`, each `rho` integral done
/// numerically with analytic derivatives of `K_0`.
pub fn u_images_regularized(
    geom: &WedgeGeometry,
    medium: &Medium,
    dip: &DipoleParams,
    r: f64,
    theta: f64,
    quad: &QuadratureSpec,
) -> crate::Result<f64> {
    check_point(geom, r, theta)?;
    let p = geom.p();
    let step = 2.0 * PI / f64::from(p);
    let mut total = 0.0;
    for n in 0..p {
        let chi = 2.0 * theta + step * f64::from(n);
        let ([v], _) = integrate_components(
            |rho| {
                let (f, g1, g2) = k0_square_derivs(rho, image_distance(r, r, chi))?;
                let (sc, cc) = chi.sin_cos();
                let t = 2.0 * r * r * sc;
                // Both points move together under the mirror map, so the
                // angular derivatives enter with the same sign.
                let dth = t * t * g2 + 2.0 * r * r * cc * g1;
                let d = 2.0 * r - 2.0 * r * cc;
                let drr = g2 * d * d - 2.0 * cc * g1;
                Ok([rho * (drr + dth / (r * r) + rho * rho * f)])
            },
            image_distance(r, r, chi),
            quad,
        )?;
        total += v;
        if n >= 1 {
            let chi = step * f64::from(n);
            let a = image_distance(r, r, chi);
            let ([v], _) = integrate_components(
                |rho| {
                    let (f, _, _) = k0_square_derivs(rho, a)?;
                    Ok([-rho * rho * rho * f])
                },
                a,
                quad,
            )?;
            total += v;
        }
    }
    Ok(energy_prefactor(medium, dip) * total / (4.0 * PI * PI * medium.refractive_index()))
}

/// Distance, relative to `r`, to the nearest image not shared with the
/// half space: rotations by `2 n alpha` and reflections other than the one
/// in the `theta = 0` wall.
pub fn polder_split_reach(geom: &WedgeGeometry, theta: f64) -> f64 {
    let alpha = geom.alpha();
    (1..geom.p())
        .flat_map(|n| {
            let a = f64::from(n) * alpha;
            [a.sin().abs(), (a - theta).sin().abs()]
        })
        .fold(f64::INFINITY, f64::min)
        * 2.0
}

/// Regularized potential at `(r, theta)` by the mode-sum route: the
/// `p`-minus-half-space difference at the radial splits in
/// `extrap.splittings` (relative to `r`, capped by
/// [`ExtrapolationSpec::splittings_for`]), extrapolated to zero splitting,
/// plus the half-space value from [`u_images_regularized`].
pub fn u_regularized_oracle(
    geom: &WedgeGeometry,
    medium: &Medium,
    dip: &DipoleParams,
    r: f64,
    theta: f64,
    quad: &QuadratureSpec,
    extrap: &ExtrapolationSpec,
) -> crate::Result<f64> {
    check_point(geom, r, theta)?;
    let plate = WedgeGeometry::new(1)?;
    let plate_value = u_images_regularized(&plate, medium, dip, r, theta, quad)?;
    if geom.p() == 1 {
        return Ok(plate_value);
    }
    let mut samples = Vec::with_capacity(extrap.splittings.len());
    for h in extrap.splittings_for(polder_split_reach(geom, theta)) {
        if !(h > 0.0 && h < 1.0) {
            return Err(GeometryError::InvalidSplitting(h).into());
        }
        let split = PointSplit::radial(geom, r, h * r, theta)?;
        samples.push((h, u_difference_at_split(geom, medium, dip, &split, quad)?));
    }
    let diff = extrapolate_coincidence(&samples, extrap)?;
    Ok(diff.value + plate_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midplane_bracket_for_p_two() {
        let (b, db) = polder_bracket(2.0, PI / 4.0);
        assert!((b - 11.5).abs() < 1e-12);
        assert!(db.abs() < 1e-12);
    }

    #[test]
    fn rejects_wall_points() {
        let g = WedgeGeometry::new(2).unwrap();
        let d = DipoleParams::new(1.0).unwrap();
        assert!(matches!(
            u_closed(&g, &Medium::VACUUM, &d, 1.0, 0.0),
            Err(Error::OnWall { .. })
        ));
        assert!(u_closed(&g, &Medium::VACUUM, &d, 1.0, 2.0).is_err());
        assert!(DipoleParams::new(0.0).is_err());
    }
}
