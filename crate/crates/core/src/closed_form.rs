//! Closed-form regularized tensor, wall force density, and the cosmic-string
//! analog.
//!
//! These are analytic in the opening angle, so they take a [`WedgeAngle`]
//! (any `alpha` in `(0, pi]`); a [`WedgeGeometry`] converts into one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::geometry::{Medium, UnitSystem, WedgeAngle};
use crate::mode_sum::StressTensor;

/// `C(p) = (p^2 + 11)(p^2 - 1) / (720 pi^2)`, the dimensionless amplitude of
/// the regularized tensor for `p = pi / alpha`.
pub fn amplitude(p: f64) -> f64 {
    let p2 = p * p;
    (p2 + 11.0) * (p2 - 1.0) / (720.0 * PI * PI)
}

fn check_radius(r: f64) -> Result<(), GeometryError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeometryError::InvalidRadius(r));
    }
    Ok(())
}

fn diag(c: f64) -> StressTensor {
    StressTensor {
        r_r: c,
        theta_theta: -3.0 * c,
        z_z: c,
        energy_density: -c,
    }
}

/// Regularized tensor `C diag(1, -3, 1, 1)` in the ordering
/// `(rr, theta theta, zz, -w)`, natural units, with
/// `C = (p^2 + 11)(p^2 - 1) / (720 pi^2 n r^4)`.
pub fn theta_tensor(
    angle: impl Into<WedgeAngle>,
    medium: &Medium,
    r: f64,
) -> Result<StressTensor, GeometryError> {
    check_radius(r)?;
    let angle = angle.into();
    Ok(diag(amplitude(angle.p()) / (medium.refractive_index() * r.powi(4))))
}

/// Normal Casimir pressure on a wall at distance `r` from the cusp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceForce {
    /// Pressure in `units` (positive: the walls attract).
    pub value: f64,
    pub units: UnitSystem,
    /// Distance from the cusp in the length unit of `units`.
    pub r: f64,
    pub alpha: f64,
    pub medium: Medium,
}

/// Wall force density `hbar c (p^2 + 11)(p^2 - 1) / (720 pi^2 n r^4)`.
///
/// `r` is read in the length unit of `units` (cm for cgs, m for SI). In
/// natural units the value equals the radial stress `Theta_rr`, which is
/// `-Theta_theta_theta / 3`.
pub fn surface_force_density(
    angle: impl Into<WedgeAngle>,
    medium: &Medium,
    r: f64,
    units: UnitSystem,
) -> Result<SurfaceForce, GeometryError> {
    check_radius(r)?;
    let angle = angle.into();
    let value =
        units.hbar_c() * amplitude(angle.p()) / (medium.refractive_index() * r.powi(4));
    Ok(SurfaceForce {
        value,
        units,
        r,
        alpha: angle.alpha(),
        medium: *medium,
    })
}

/// Parallel-plate Casimir pressure `pi^2 hbar c / (240 a^4)` for plate
/// separation `a` in the length unit of `units`, vacuum.
pub fn parallel_plate_pressure(a: f64, units: UnitSystem) -> Result<f64, GeometryError> {
    check_radius(a)?;
    Ok(PI * PI * units.hbar_c() / (240.0 * a.powi(4)))
}

/// Conical deficit parameter of a straight cosmic string,
/// `beta = 1 / (1 - 4 G mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StringParams {
    beta: f64,
}

impl StringParams {
    pub fn from_beta(beta: f64) -> Result<Self, GeometryError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(GeometryError::InvalidString(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    /// From the dimensionless string tension `G mu`, which must lie in
    /// `[0, 1/4)`.
    pub fn from_g_mu(g_mu: f64) -> Result<Self, GeometryError> {
        if !(0.0..0.25).contains(&g_mu) {
            return Err(GeometryError::InvalidString(format!(
                "G mu must lie in [0, 1/4), got {g_mu}"
            )));
        }
        Ok(Self {
            beta: 1.0 / (1.0 - 4.0 * g_mu),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn g_mu(&self) -> f64 {
        0.25 * (1.0 - 1.0 / self.beta)
    }
}

/// Vacuum tensor around the string,
/// `(beta^2 + 11)(beta^2 - 1) / (720 pi^2 r^4) diag(1, -3, 1, 1)`.
pub fn string_tensor(params: &StringParams, r: f64) -> Result<StressTensor, GeometryError> {
    check_radius(r)?;
    Ok(diag(amplitude(params.beta()) / r.powi(4)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WedgeGeometry;

    #[test]
    fn p_two_amplitude() {
        let t = theta_tensor(WedgeGeometry::new(2).unwrap(), &Medium::VACUUM, 1.0).unwrap();
        assert!((t.r_r - 1.0 / (16.0 * PI * PI)).abs() < 1e-17);
        assert!((t.theta_theta + 1.8998e-2).abs() < 1e-6);
    }

    #[test]
    fn half_space_is_zero() {
        let t = theta_tensor(WedgeGeometry::new(1).unwrap(), &Medium::VACUUM, 0.3).unwrap();
        assert_eq!(t.components(), [0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn string_parameters_round_trip() {
        let s = StringParams::from_g_mu(0.1).unwrap();
        assert!((s.beta() - 1.0 / 0.6).abs() < 1e-15);
        assert!((s.g_mu() - 0.1).abs() < 1e-15);
        assert_eq!(StringParams::from_g_mu(0.0).unwrap().beta(), 1.0);
        assert!(StringParams::from_g_mu(0.25).is_err());
        assert!(StringParams::from_beta(-1.0).is_err());
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(theta_tensor(WedgeGeometry::new(2).unwrap(), &Medium::VACUUM, 0.0).is_err());
        assert!(surface_force_density(
            WedgeAngle::new(0.1).unwrap(),
            &Medium::VACUUM,
            f64::NAN,
            UnitSystem::Cgs
        )
        .is_err());
    }
}
