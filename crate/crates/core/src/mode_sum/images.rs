use crate::geometry::image_distance;
use crate::specfun::{bessel_k0, bessel_k0_k1, IkLadder};

/// How the two-point derivatives of `K_0(rho R)` are formed on the image
/// route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Chain rule through `R(r, r', theta - theta')`.
    Analytic,
    /// Centered differences; `step` is relative to the radii for radial
    /// derivatives and in radians for angular ones. Test mode only.
    FiniteDifference { step: f64 },
}

/// `rho * [rr, theta theta, zz, w]` brackets for one image at angle `chi`
/// from the first point, without the `1/(4 pi^2 n)` prefactor.
///
/// With `f = K_0(rho R)` the brackets are `-rho^2 f -+ (1/(r r')) d_th f
/// +- d_rr f` for `rr` and `theta theta`, `rho^2 f` for `zz` and
/// `-rho^2 f` for `w`.
pub(crate) fn image_brackets(
    rho: f64,
    r: f64,
    rp: f64,
    chi: f64,
    mode: DerivativeMode,
) -> crate::Result<[f64; 4]> {
    let big_r = image_distance(r, rp, chi);
    let (f, dth, drr) = match mode {
        DerivativeMode::Analytic => {
            let (k0, g1, g2) = k0_square_derivs(rho, big_r)?;
            let (sc, cc) = chi.sin_cos();
            let t = 2.0 * r * rp * sc;
            let dth = -t * t * g2 - 2.0 * r * rp * cc * g1;
            let drr = g2 * (2.0 * r - 2.0 * rp * cc) * (2.0 * rp - 2.0 * r * cc) - 2.0 * cc * g1;
            (k0, dth, drr)
        }
        DerivativeMode::FiniteDifference { step } => {
            let k = |a: f64, b: f64, c: f64| bessel_k0(rho * image_distance(a, b, c));
            let f = k(r, rp, chi)?;
            // theta shifts chi by +h, theta' by -h.
            let h = step;
            let dth = (k(r, rp, chi + h - h)? - k(r, rp, chi + h + h)? - k(r, rp, chi - h - h)?
                + k(r, rp, chi - h + h)?)
                / (4.0 * h * h);
            let (hr, hp) = (step * r, step * rp);
            let drr = (k(r + hr, rp + hp, chi)? - k(r + hr, rp - hp, chi)?
                - k(r - hr, rp + hp, chi)?
                + k(r - hr, rp - hp, chi)?)
                / (4.0 * hr * hp);
            (f, dth, drr)
        }
    };
    let rr = r * rp;
    let m = rho * rho * f;
    Ok([
        rho * (-m - dth / rr + drr),
        rho * (-m + dth / rr - drr),
        rho * m,
        rho * -m,
    ])
}

/// `K_0(rho R)` and its first two derivatives with respect to `s = R^2`.
pub(crate) fn k0_square_derivs(rho: f64, big_r: f64) -> crate::Result<(f64, f64, f64)> {
    let (k0, k1) = bessel_k0_k1(rho * big_r)?;
    let g1 = -rho * k1 / (2.0 * big_r);
    let g2 = rho * rho * k0 / (4.0 * big_r * big_r) + rho * k1 / (2.0 * big_r.powi(3));
    Ok((k0, g1, g2))
}

/// Both sides of the addition theorem
/// `sum_{n<p} K_0(rho R_n) = 2p sum'_m I_{mp}(rho r_<) K_{mp}(rho r_>) cos(m p psi)`,
/// each computed on its own (images by direct `K_0`, modes by the Bessel
/// ladder). Requires `r != r'`.
pub fn graf_sides(p: u32, rho: f64, r: f64, r_prime: f64, psi: f64) -> crate::Result<(f64, f64)> {
    let images = (0..p)
        .map(|n| {
            let chi = psi + 2.0 * std::f64::consts::PI * f64::from(n) / f64::from(p);
            bessel_k0(rho * image_distance(r, r_prime, chi))
        })
        .sum::<Result<f64, _>>()?;
    let mut ladder = IkLadder::new(rho * r.min(r_prime), rho * r.max(r_prime), 64)?;
    let modes = crate::quadrature::sum_primed(
        |m| -> crate::Result<f64> {
            let nu = m * p as usize;
            let (ik, _) = ladder.get(nu)?;
            Ok(ik * (nu as f64 * psi).cos())
        },
        &crate::quadrature::SumSpec::relative(1e-16),
    )?;
    Ok((images, 2.0 * f64::from(p) * modes))
}
