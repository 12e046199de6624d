//! The point-split oracle: imaginary-frequency field products summed over
//! wedge modes, the equivalent image sums, and the subtraction of the
//! unbounded-medium (contact) part.
//!
//! All stress components are returned in natural units (`hbar = c = 1`),
//! as energy densities with dimension length^-4.

mod images;
mod kernels;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GeometryError};
use crate::geometry::{image_distances, ModeIndex, Medium, PointSplit, WedgeGeometry};
use crate::quadrature::{
    extrapolate_coincidence, integrate_semi_infinite, sum_primed, ExtrapolationSpec,
    QuadratureSpec, SpectralPoint, SumSpec,
};
use crate::specfun::{bessel_ik, IkLadder};

pub use images::{graf_sides, DerivativeMode};
pub use kernels::{Field, RotatedProductKernel};

pub(crate) use images::{image_brackets, k0_square_derivs};
pub(crate) use kernels::{electric_square, kernel_values};

/// Diagonal of the stress tensor in cylindrical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressTensor {
    pub r_r: f64,
    pub theta_theta: f64,
    pub z_z: f64,
    pub energy_density: f64,
}

impl StressTensor {
    /// From `[rr, theta theta, zz, w]`.
    pub fn from_components(c: [f64; 4]) -> Self {
        Self {
            r_r: c[0],
            theta_theta: c[1],
            z_z: c[2],
            energy_density: c[3],
        }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.r_r, self.theta_theta, self.z_z, self.energy_density]
    }

    /// `(rr, theta theta, zz, -w)`, the ordering in which the wedge result
    /// reads `C diag(1, -3, 1, 1)`.
    pub fn diagonal(&self) -> [f64; 4] {
        [self.r_r, self.theta_theta, self.z_z, -self.energy_density]
    }

    /// `Theta^mu_mu = -w + rr + theta theta + zz`.
    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_components(self.components().map(|c| c * k))
    }
}

/// Which independent route the regularized oracle takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleRoute {
    /// Nonzero images evaluated at coincidence.
    #[default]
    Images,
    /// Mode sum minus contact term at a sequence of radial splits,
    /// extrapolated to zero splitting.
    ExtrapolatedModeSum,
}

impl fmt::Display for OracleRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleRoute::Images => "images",
            OracleRoute::ExtrapolatedModeSum => "mode-sum",
        })
    }
}

impl FromStr for OracleRoute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "images" | "image" => Ok(OracleRoute::Images),
            "mode-sum" | "modesum" | "extrapolated" => Ok(OracleRoute::ExtrapolatedModeSum),
            other => Err(format!(
                "unknown oracle route {other:?} (expected images or mode-sum)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    pub tensor: StressTensor,
    /// Largest absolute error estimate over the four components.
    pub err_estimate: f64,
    pub route: OracleRoute,
}

pub(crate) const SPLIT_REL_TOL_FLOOR: f64 = 1e-8;

// Per-rho mode sums run to round-off; the quadrature sets the accuracy.
const MODE_SUM: SumSpec = SumSpec {
    rel_tol: 1e-15,
    abs_tol: 1e-300,
    max_terms: 400_000,
};

/// The `theta theta` bracket for one mode:
/// `[-rho^2 (I K + I' K') + nu^2/(r r') I K] cos(nu (theta - theta'))`,
/// with Bessel arguments `(rho r_<, rho r_>)`.
pub fn thetatheta_spectral_term(
    mode: ModeIndex,
    rho: SpectralPoint,
    split: &PointSplit,
) -> crate::Result<f64> {
    let x = rho.rho();
    let a = bessel_ik(mode.order, x * split.r_less())?;
    let b = bessel_ik(mode.order, x * split.r_greater())?;
    let ik = a.value_i * b.value_k;
    let dik = a.deriv_i * b.deriv_k;
    let nu = f64::from(mode.order);
    let rr = split.r() * split.r_prime();
    Ok((-x * x * (ik + dik) + nu * nu / rr * ik) * (nu * split.psi()).cos())
}

/// `sum'_m` over orders `nu = m p` of a projection of the six kernels, all
/// Bessel products taken from one ladder.
pub(crate) fn mode_sum_vec<const N: usize>(
    ladder: &mut IkLadder,
    p: u32,
    rho: f64,
    split: &PointSplit,
    project: impl Fn(&[f64; 6]) -> [f64; N],
) -> crate::Result<[f64; N]> {
    let mut acc = [0.0; N];
    sum_primed(
        |m| -> crate::Result<f64> {
            let nu = m * p as usize;
            let (ik, dik) = ladder.get(nu)?;
            let v = project(&kernel_values(nu as f64, rho, split, ik, dik));
            let w = if m == 0 { 0.5 } else { 1.0 };
            for (a, x) in acc.iter_mut().zip(v) {
                *a += w * x;
            }
            Ok(v.iter().map(|x| x.abs()).sum())
        },
        &MODE_SUM,
    )?;
    Ok(acc)
}

pub(crate) fn ladder_for(rho: f64, split: &PointSplit) -> crate::Result<IkLadder> {
    Ok(IkLadder::new(
        rho * split.r_less(),
        rho * split.r_greater(),
        64,
    )?)
}

/// Integrates each component of a vector integrand, sharing evaluations
/// between components through a cache keyed on `rho`.
pub(crate) fn integrate_components<const N: usize>(
    mut f: impl FnMut(f64) -> crate::Result<[f64; N]>,
    decay_length: f64,
    quad: &QuadratureSpec,
) -> crate::Result<([f64; N], f64)> {
    let mut cache: HashMap<u64, [f64; N]> = HashMap::new();
    let mut out = [0.0; N];
    let mut err = 0.0f64;
    for c in 0..N {
        let integral = integrate_semi_infinite(
            |s| {
                let key = s.rho().to_bits();
                if let Some(v) = cache.get(&key) {
                    return Ok(v[c]);
                }
                let v = f(s.rho())?;
                cache.insert(key, v);
                Ok(v[c])
            },
            decay_length,
            quad,
        )?;
        out[c] = integral.value;
        err = err.max(integral.err_estimate);
    }
    Ok((out, err))
}

fn require_radial_split(split: &PointSplit) -> crate::Result<()> {
    if split.r() == split.r_prime() {
        return Err(Error::NeedsRadialSplit { r: split.r() });
    }
    Ok(())
}

/// Unregularized point-split tensor from the wedge mode sum.
pub fn s_tensor_modesum(
    geom: &WedgeGeometry,
    medium: &Medium,
    split: &PointSplit,
    quad: &QuadratureSpec,
) -> crate::Result<StressTensor> {
    require_radial_split(split)?;
    let p = geom.p();
    let pref = 1.0 / (2.0 * PI * geom.alpha() * medium.refractive_index());
    let decay = min_distance(&image_distances(split, geom).distances);
    let (v, _) = integrate_components(
        |rho| {
            let mut ladder = ladder_for(rho, split)?;
            let s = mode_sum_vec(&mut ladder, p, rho, split, kernels::assemble)?;
            Ok(s.map(|x| pref * rho * x))
        },
        decay,
        quad,
    )?;
    Ok(StressTensor::from_components(v))
}

/// Unregularized `theta theta` point-split component from the wedge mode
/// sum. Needs `r != r'`: at equal radii the mode terms do not decay.
pub fn s_thetatheta_modesum(
    geom: &WedgeGeometry,
    medium: &Medium,
    split: &PointSplit,
    quad: &QuadratureSpec,
) -> crate::Result<f64> {
    require_radial_split(split)?;
    let p = geom.p();
    let pref = 1.0 / (2.0 * PI * geom.alpha() * medium.refractive_index());
    let decay = min_distance(&image_distances(split, geom).distances);
    let integral = integrate_semi_infinite(
        |s| {
            let rho = s.rho();
            let mut ladder = ladder_for(rho, split)?;
            let mut total = 0.0;
            sum_primed(
                |m| -> crate::Result<f64> {
                    let nu = m * p as usize;
                    let (ik, dik) = ladder.get(nu)?;
                    let nuf = nu as f64;
                    let rr = split.r() * split.r_prime();
                    let t = (-rho * rho * (ik + dik) + nuf * nuf / rr * ik)
                        * (nuf * split.psi()).cos();
                    total += if m == 0 { 0.5 * t } else { t };
                    Ok(t)
                },
                &MODE_SUM,
            )?;
            Ok(pref * rho * total)
        },
        decay,
        quad,
    )?;
    Ok(integral.value)
}

/// Unregularized point-split tensor as a sum over the `p` rotated images.
pub fn s_tensor_images(
    geom: &WedgeGeometry,
    medium: &Medium,
    split: &PointSplit,
    quad: &QuadratureSpec,
    mode: DerivativeMode,
) -> crate::Result<StressTensor> {
    let pref = 1.0 / (4.0 * PI * PI * medium.refractive_index());
    let p = geom.p();
    let mut total = [0.0; 4];
    for n in 0..p {
        let chi = split.psi() + 2.0 * PI * f64::from(n) / f64::from(p);
        let v = image_term(split.r(), split.r_prime(), chi, quad, mode)?;
        for (t, x) in total.iter_mut().zip(v) {
            *t += pref * x;
        }
    }
    Ok(StressTensor::from_components(total))
}

/// `theta theta` component of [`s_tensor_images`] with analytic derivatives.
pub fn s_thetatheta_images(
    geom: &WedgeGeometry,
    medium: &Medium,
    split: &PointSplit,
    quad: &QuadratureSpec,
) -> crate::Result<f64> {
    Ok(s_tensor_images(geom, medium, split, quad, DerivativeMode::Analytic)?.theta_theta)
}

/// The unbounded-medium part: the `p = 1` mode sum at the same split.
pub fn contact_term(medium: &Medium, split: &PointSplit, quad: &QuadratureSpec) -> crate::Result<f64> {
    s_thetatheta_modesum(&half_space(), medium, split, quad)
}

fn half_space() -> WedgeGeometry {
    WedgeGeometry::new(1).expect("p = 1 is valid")
}

fn image_term(
    r: f64,
    rp: f64,
    chi: f64,
    quad: &QuadratureSpec,
    mode: DerivativeMode,
) -> crate::Result<[f64; 4]> {
    let decay = crate::geometry::image_distance(r, rp, chi);
    if decay == 0.0 {
        return Err(Error::Coincident);
    }
    let (v, _) = integrate_components(|rho| image_brackets(rho, r, rp, chi, mode), decay, quad)?;
    Ok(v)
}

pub(crate) fn min_distance(d: &[f64]) -> f64 {
    d.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Distance, relative to `r`, from the split point to the nearest image
/// that survives the contact subtraction in the tensor.
pub fn tensor_split_reach(geom: &WedgeGeometry) -> f64 {
    2.0 * (PI / f64::from(geom.p())).sin()
}

/// Regularized `theta theta` component at radius `r` (image route).
pub fn regularized_thetatheta_oracle(
    geom: &WedgeGeometry,
    medium: &Medium,
    r: f64,
    quad: &QuadratureSpec,
    extrap: &ExtrapolationSpec,
) -> crate::Result<f64> {
    Ok(regularized_tensor_oracle(geom, medium, r, quad, extrap)?.theta_theta)
}

/// Regularized tensor at radius `r` (image route).
pub fn regularized_tensor_oracle(
    geom: &WedgeGeometry,
    medium: &Medium,
    r: f64,
    quad: &QuadratureSpec,
    extrap: &ExtrapolationSpec,
) -> crate::Result<StressTensor> {
    let theta = 0.5 * geom.alpha();
    Ok(regularized_tensor_via(OracleRoute::Images, geom, medium, r, theta, quad, extrap)?.tensor)
}

/// Regularized tensor at `(r, theta)` by the chosen route.
///
/// The image route drops the `n = 0` image (the contact term) and
/// integrates the remaining ones at coincidence. The mode-sum route forms
/// `wedge - contact` inside the spectral integrand, from one Bessel ladder
/// per `rho`, at each radial split in `extrap.splittings` (relative to `r`)
/// and extrapolates to zero splitting.
pub fn regularized_tensor_via(
    route: OracleRoute,
    geom: &WedgeGeometry,
    medium: &Medium,
    r: f64,
    theta: f64,
    quad: &QuadratureSpec,
    extrap: &ExtrapolationSpec,
) -> crate::Result<OracleEstimate> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeometryError::InvalidRadius(r).into());
    }
    if !geom.is_interior(theta) {
        return Err(GeometryError::NotInterior {
            theta,
            alpha: geom.alpha(),
        }
        .into());
    }
    let p = geom.p();
    if p == 1 {
        return Ok(OracleEstimate {
            tensor: StressTensor::from_components([0.0; 4]),
            err_estimate: 0.0,
            route,
        });
    }
    let (components, err_estimate) = match route {
        OracleRoute::Images => {
            let pref = 1.0 / (4.0 * PI * PI * medium.refractive_index());
            let mut total = [0.0; 4];
            let mut err = 0.0f64;
            for n in 1..p {
                let chi = 2.0 * PI * f64::from(n) / f64::from(p);
                let a = 2.0 * r * (PI * f64::from(n) / f64::from(p)).sin();
                let (v, e) = integrate_components(
                    |rho| image_brackets(rho, r, r, chi, DerivativeMode::Analytic),
                    a,
                    quad,
                )?;
                for (t, x) in total.iter_mut().zip(v) {
                    *t += pref * x;
                }
                err = err.max(pref * e);
            }
            (total, err)
        }
        OracleRoute::ExtrapolatedModeSum => {
            let mut samples: [Vec<(f64, f64)>; 4] = Default::default();
            for h in extrap.splittings_for(tensor_split_reach(geom)) {
                if !(h > 0.0 && h < 1.0) {
                    return Err(GeometryError::InvalidSplitting(h).into());
                }
                let split = PointSplit::radial(geom, r, h * r, theta)?;
                let v = regularized_at_split(geom, medium, &split, quad)?;
                for (s, x) in samples.iter_mut().zip(v) {
                    s.push((h, x));
                }
            }
            let mut out = [0.0; 4];
            let mut err = 0.0f64;
            for (o, s) in out.iter_mut().zip(&samples) {
                let e = extrapolate_coincidence(s, extrap)?;
                *o = e.value;
                err = err.max(e.err_estimate);
            }
            (out, err)
        }
    };
    Ok(OracleEstimate {
        tensor: StressTensor::from_components(components),
        err_estimate,
        route,
    })
}

/// `S(wedge) - S(contact)` at a non-coincident split, with the subtraction
/// done under the spectral integral:
/// `1/(2 pi^2 n) int rho drho [p sum'_m T(m p) - sum'_nu T(nu)]`.
///
/// Both sums are far larger than their difference at large `rho`, so the
/// integrand carries cancellation noise; the relative tolerance is floored
/// at `1e-8`.
pub fn regularized_at_split(
    geom: &WedgeGeometry,
    medium: &Medium,
    split: &PointSplit,
    quad: &QuadratureSpec,
) -> crate::Result<[f64; 4]> {
    require_radial_split(split)?;
    let p = geom.p();
    if p == 1 {
        return Ok([0.0; 4]);
    }
    let pref = 1.0 / (2.0 * PI * PI * medium.refractive_index());
    let decay = min_distance(&image_distances(split, geom).distances[1..]);
    let pf = f64::from(p);
    let quad = quad.with_rel_tol(quad.rel_tol.max(SPLIT_REL_TOL_FLOOR));
    let (v, _) = integrate_components(
        |rho| {
            let mut ladder = ladder_for(rho, split)?;
            let wedge = mode_sum_vec(&mut ladder, p, rho, split, kernels::assemble)?;
            let free = mode_sum_vec(&mut ladder, 1, rho, split, kernels::assemble)?;
            let mut out = [0.0; 4];
            for c in 0..4 {
                out[c] = pref * rho * (pf * wedge[c] - free[c]);
            }
            Ok(out)
        },
        decay,
        &quad,
    )?;
    Ok(v)
}
