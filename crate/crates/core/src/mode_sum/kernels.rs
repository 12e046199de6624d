use std::fmt;

use crate::geometry::{ModeIndex, PointSplit};
use crate::quadrature::SpectralPoint;
use crate::specfun::bessel_ik;

/// Field component of an equal-time product `<F_i(r) F_i(r')>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    ElectricR,
    ElectricTheta,
    ElectricZ,
    MagneticR,
    MagneticTheta,
    MagneticZ,
}

impl Field {
    pub const ALL: [Field; 6] = [
        Field::ElectricR,
        Field::ElectricTheta,
        Field::ElectricZ,
        Field::MagneticR,
        Field::MagneticTheta,
        Field::MagneticZ,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::ElectricR => "E_r",
            Field::ElectricTheta => "E_theta",
            Field::ElectricZ => "E_z",
            Field::MagneticR => "H_r",
            Field::MagneticTheta => "H_theta",
            Field::MagneticZ => "H_z",
        };
        f.write_str(s)
    }
}

/// Imaginary-frequency spectral density of one field product, with the
/// medium factor included (`eps` for electric, `mu` for magnetic fields).
///
/// For a wedge of opening `alpha` in a medium of index `n`,
/// `eps <E_i E_i'> = 1/(2 pi alpha n) int_0^inf rho drho sum'_m value`,
/// and likewise for `mu <H_i H_i'>`. The axial wavenumber and frequency
/// have been averaged over the quarter circle of radius `rho`, so the
/// value depends on them only through `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotatedProductKernel {
    pub field: Field,
}

impl RotatedProductKernel {
    pub fn new(field: Field) -> Self {
        Self { field }
    }

    pub fn value(
        &self,
        mode: ModeIndex,
        rho: SpectralPoint,
        split: &PointSplit,
    ) -> crate::Result<f64> {
        let x1 = rho.rho() * split.r_less();
        let x2 = rho.rho() * split.r_greater();
        let a = bessel_ik(mode.order, x1)?;
        let b = bessel_ik(mode.order, x2)?;
        let ik = a.value_i * b.value_k;
        let dik = a.deriv_i * b.deriv_k;
        Ok(kernel_values(f64::from(mode.order), rho.rho(), split, ik, dik)[self.field.slot()])
    }
}

/// All six kernels for Bessel order `nu`, given
/// `ik = I_nu(rho r_<) K_nu(rho r_>)` and `dik = I_nu'(rho r_<) K_nu'(rho r_>)`.
pub(crate) fn kernel_values(nu: f64, rho: f64, split: &PointSplit, ik: f64, dik: f64) -> [f64; 6] {
    let rr = split.r() * split.r_prime();
    let a = rho * rho * dik - nu * nu * ik / rr;
    let z = -2.0 * rho * rho * ik;
    let (s1, c1) = (nu * split.theta()).sin_cos();
    let (s2, c2) = (nu * split.theta_prime()).sin_cos();
    let cc = c1 * c2;
    let ss = s1 * s2;
    [-a * ss, a * cc, z * ss, -a * cc, a * ss, z * cc]
}

/// Diagonal stress combinations `(rr, theta theta, zz, w)` from the six
/// kernels; each is one half of a signed sum of `eps E_i^2 + mu H_i^2`.
pub(crate) fn assemble(k: &[f64; 6]) -> [f64; 4] {
    let sr = k[0] + k[3];
    let st = k[1] + k[4];
    let sz = k[2] + k[5];
    [
        0.5 * (-sr + st + sz),
        0.5 * (sr - st + sz),
        0.5 * (sr + st - sz),
        0.5 * (sr + st + sz),
    ]
}

/// `eps <E^2>` density alone (sum of the three electric kernels).
pub(crate) fn electric_square(k: &[f64; 6]) -> f64 {
    k[0] + k[1] + k[2]
}
