//! Wedge, medium and evaluation-point model shared by every computation.
//!
//! Lengths are dimensionless (natural units, hbar = c = 1) everywhere in the
//! numerical core; [`UnitSystem`] is only consulted when a result leaves the
//! library.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// A perfectly conducting wedge with opening angle `alpha = pi / p`, `p` a
/// positive integer.
///
/// `p = 1` is the half-space bounded by a single plane plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WedgeGeometry {
    p: u32,
}

impl WedgeGeometry {
    pub fn new(p: u32) -> Result<Self, GeometryError> {
        if p == 0 {
            return Err(GeometryError::InvalidP(p));
        }
        Ok(Self { p })
    }

    /// Builds the geometry for an opening angle, which must equal `pi / p` for
    /// some integer `p` to within `1e-12` relative. Arbitrary angles are
    /// rejected, never rounded.
    pub fn from_alpha(alpha: f64) -> Result<Self, GeometryError> {
        if !(alpha > 0.0 && alpha <= PI) {
            return Err(GeometryError::InvalidAlpha(alpha));
        }
        let p = PI / alpha;
        let rounded = p.round();
        if (p - rounded).abs() > 1e-12 * rounded || rounded > u32::MAX as f64 {
            return Err(GeometryError::NonIntegerP { alpha, p });
        }
        Self::new(rounded as u32)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        PI / self.p as f64
    }

    /// Bessel order `nu_m = m p` of mode `m`.
    pub fn mode(&self, m: u32) -> ModeIndex {
        ModeIndex { m, order: m * self.p }
    }

    /// Whether `theta` lies strictly inside the wedge.
    pub fn is_interior(&self, theta: f64) -> bool {
        theta > 0.0 && theta < self.alpha()
    }
}

impl fmt::Display for WedgeGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} (alpha={:.6})", self.p, self.alpha())
    }
}

/// Opening angle for the closed-form results, which are analytic in `alpha`
/// and accept any value in `(0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeAngle {
    alpha: f64,
}

impl WedgeAngle {
    pub fn new(alpha: f64) -> Result<Self, GeometryError> {
        if !(alpha > 0.0 && alpha <= PI) || !alpha.is_finite() {
            return Err(GeometryError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `pi / alpha`, not necessarily an integer.
    pub fn p(&self) -> f64 {
        PI / self.alpha
    }
}

impl From<WedgeGeometry> for WedgeAngle {
    fn from(g: WedgeGeometry) -> Self {
        Self { alpha: g.alpha() }
    }
}

/// Homogeneous, isotropic, nondispersive filling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    epsilon: f64,
    mu: f64,
}

impl Medium {
    pub const VACUUM: Medium = Medium {
        epsilon: 1.0,
        mu: 1.0,
    };

    pub fn new(epsilon: f64, mu: f64) -> Result<Self, GeometryError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) || !(mu > 0.0 && mu.is_finite()) {
            return Err(GeometryError::InvalidMedium { epsilon, mu });
        }
        Ok(Self { epsilon, mu })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Refractive index `sqrt(epsilon mu)`.
    pub fn refractive_index(&self) -> f64 {
        (self.epsilon * self.mu).sqrt()
    }
}

impl Default for Medium {
    fn default() -> Self {
        Self::VACUUM
    }
}

/// The two spatial points of a point-split product, at equal time and equal
/// axial coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSplit {
    r: f64,
    r_prime: f64,
    theta: f64,
    theta_prime: f64,
}

impl PointSplit {
    /// Interior split: both angles strictly inside the wedge.
    pub fn new(
        geom: &WedgeGeometry,
        r: f64,
        r_prime: f64,
        theta: f64,
        theta_prime: f64,
    ) -> Result<Self, GeometryError> {
        for radius in [r, r_prime] {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(GeometryError::InvalidRadius(radius));
            }
        }
        for angle in [theta, theta_prime] {
            if !geom.is_interior(angle) {
                return Err(GeometryError::NotInterior {
                    theta: angle,
                    alpha: geom.alpha(),
                });
            }
        }
        Ok(Self {
            r,
            r_prime,
            theta,
            theta_prime,
        })
    }

    /// Radial split symmetric about `r`: the points sit at `r - h` and
    /// `r + h` on the same ray.
    pub fn radial(geom: &WedgeGeometry, r: f64, h: f64, theta: f64) -> Result<Self, GeometryError> {
        if !(h >= 0.0 && h < r) {
            return Err(GeometryError::InvalidSplitting(h));
        }
        Self::new(geom, r - h, r + h, theta, theta)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_prime(&self) -> f64 {
        self.r_prime
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_prime(&self) -> f64 {
        self.theta_prime
    }

    pub fn r_less(&self) -> f64 {
        self.r.min(self.r_prime)
    }

    pub fn r_greater(&self) -> f64 {
        self.r.max(self.r_prime)
    }

    /// `r_< / r_>`, in `(0, 1]`.
    pub fn xi(&self) -> f64 {
        self.r_less() / self.r_greater()
    }

    /// Angular separation `theta - theta'`.
    pub fn psi(&self) -> f64 {
        self.theta - self.theta_prime
    }

    pub fn is_coincident(&self) -> bool {
        self.r == self.r_prime && self.theta == self.theta_prime
    }
}

/// Mode label `m` together with its Bessel order `nu_m = m p`.
///
/// In every primed sum the `m = 0` term carries half weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex {
    pub m: u32,
    pub order: u32,
}

impl ModeIndex {
    pub fn weight(&self) -> f64 {
        if self.m == 0 {
            0.5
        } else {
            1.0
        }
    }
}

/// Distances `R_n` from the first point to the `p` rotated images of the
/// second point.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSet {
    pub distances: Vec<f64>,
}

/// Image distances for a point split:
/// `R_n^2 = r^2 + r'^2 - 2 r r' cos(psi + 2 pi n / p)`, `n = 0 .. p-1`.
pub fn image_distances(split: &PointSplit, geom: &WedgeGeometry) -> ImageSet {
    let p = geom.p();
    let (r, rp, psi) = (split.r(), split.r_prime(), split.psi());
    let distances = (0..p)
        .map(|n| image_distance(r, rp, psi + 2.0 * PI * n as f64 / p as f64))
        .collect();
    ImageSet { distances }
}

/// Nonzero image distances at coincidence, `a_n = 2 r sin(pi n / p)` for
/// `n = 1 .. p-1`. Rejects `p = 1`, which has none.
pub fn coincidence_images(r: f64, geom: &WedgeGeometry) -> Result<ImageSet, GeometryError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeometryError::InvalidRadius(r));
    }
    let p = geom.p();
    if p < 2 {
        return Err(GeometryError::NoImages);
    }
    let distances = (1..p)
        .map(|n| 2.0 * r * (PI * n as f64 / p as f64).sin())
        .collect();
    Ok(ImageSet { distances })
}

/// Planar distance between `(r, phi)` and `(r', 0)`.
///
/// Written as `sqrt((r - r')^2 + 4 r r' sin^2(phi/2))` so that nearly
/// coincident points keep full relative precision.
pub(crate) fn image_distance(r: f64, r_prime: f64, phi: f64) -> f64 {
    let d = r - r_prime;
    let s = (0.5 * phi).sin();
    (d * d + 4.0 * r * r_prime * s * s).sqrt()
}

/// Output unit system. Natural units fix `hbar = c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Natural,
    /// Lengths in cm, pressures in dyn/cm^2.
    Cgs,
    /// Lengths in m, pressures in Pa.
    Si,
}

/// Reduced Planck constant, J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Speed of light, m/s.
pub const C_SI: f64 = 2.997_924_58e8;

impl UnitSystem {
    /// `hbar c` in the system's energy x length unit (J m, erg cm, or 1).
    pub fn hbar_c(&self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => HBAR_SI * C_SI,
            // 1 J m = 1e7 erg * 1e2 cm
            UnitSystem::Cgs => HBAR_SI * C_SI * 1e9,
        }
    }

    pub fn length_unit(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "1",
            UnitSystem::Si => "m",
            UnitSystem::Cgs => "cm",
        }
    }

    pub fn pressure_unit(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "1/length^4",
            UnitSystem::Si => "Pa",
            UnitSystem::Cgs => "dyn/cm^2",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UnitSystem::Natural => "natural",
            UnitSystem::Si => "si",
            UnitSystem::Cgs => "cgs",
        }
    }
}

impl FromStr for UnitSystem {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "natural" => Ok(UnitSystem::Natural),
            "cgs" => Ok(UnitSystem::Cgs),
            "si" => Ok(UnitSystem::Si),
            other => Err(GeometryError::UnknownUnits(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_times_p_is_pi() {
        for p in 1..=50 {
            let g = WedgeGeometry::new(p).unwrap();
            assert_relative_eq!(g.alpha() * p as f64, PI, max_relative = 1e-15);
        }
    }

    #[test]
    fn rejects_non_integer_alpha() {
        assert!(matches!(
            WedgeGeometry::from_alpha(1e-4),
            Err(GeometryError::NonIntegerP { .. })
        ));
        assert_eq!(WedgeGeometry::from_alpha(PI / 3.0).unwrap().p(), 3);
        assert!(WedgeGeometry::new(0).is_err());
        assert!(WedgeGeometry::from_alpha(4.0).is_err());
    }

    #[test]
    fn interior_points_only() {
        let g = WedgeGeometry::new(2).unwrap();
        assert!(PointSplit::new(&g, 1.0, 1.0, 0.0, 0.3).is_err());
        assert!(PointSplit::new(&g, 1.0, 1.0, g.alpha(), 0.3).is_err());
        assert!(PointSplit::new(&g, -1.0, 1.0, 0.3, 0.3).is_err());
        let s = PointSplit::new(&g, 2.0, 1.0, 0.3, 0.3).unwrap();
        assert_eq!(s.r_less(), 1.0);
        assert_eq!(s.r_greater(), 2.0);
        assert_eq!(s.xi(), 0.5);
    }

    #[test]
    fn images_at_coincidence() {
        let g1 = WedgeGeometry::new(1).unwrap();
        let s = PointSplit::new(&g1, 1.0, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(image_distances(&s, &g1).distances, vec![0.0]);

        let g2 = WedgeGeometry::new(2).unwrap();
        let s = PointSplit::new(&g2, 1.0, 1.0, 0.5, 0.5).unwrap();
        let d = image_distances(&s, &g2).distances;
        assert_eq!(d[0], 0.0);
        assert_relative_eq!(d[1], 2.0, max_relative = 1e-15);
    }

    #[test]
    fn image_distances_match_planar_geometry() {
        // Rotate the first point by 2 pi n / p and measure the Cartesian distance.
        let g = WedgeGeometry::new(3).unwrap();
        let s = PointSplit::new(&g, 1.0, 2.0, 0.6, 0.5).unwrap();
        let d = image_distances(&s, &g).distances;
        for (n, dn) in d.iter().enumerate() {
            let phi = 0.1 + 2.0 * PI * n as f64 / 3.0;
            let (x1, y1) = (phi.cos(), phi.sin());
            let (x2, y2) = (2.0, 0.0);
            let brute = ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt();
            assert_relative_eq!(*dn, brute, max_relative = 1e-13);
        }
    }

    #[test]
    fn coincidence_image_values() {
        let g2 = WedgeGeometry::new(2).unwrap();
        assert_relative_eq!(coincidence_images(1.0, &g2).unwrap().distances[0], 2.0);
        let g4 = WedgeGeometry::new(4).unwrap();
        let d = coincidence_images(1.0, &g4).unwrap().distances;
        let expect = [2f64.sqrt(), 2.0, 2f64.sqrt()];
        for (a, b) in d.iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-15);
        }
        assert!(matches!(
            coincidence_images(1.0, &WedgeGeometry::new(1).unwrap()),
            Err(GeometryError::NoImages)
        ));
    }

    #[test]
    fn coincidence_is_limit_of_split_images() {
        let g = WedgeGeometry::new(3).unwrap();
        let r = 0.5;
        let limit = coincidence_images(r, &g).unwrap().distances;
        let eps = 1e-14;
        let s = PointSplit::new(&g, r, r * (1.0 + eps), 0.4, 0.4 + eps).unwrap();
        let split = image_distances(&s, &g).distances;
        for (a, b) in limit.iter().zip(&split[1..]) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
    }

    #[test]
    fn image_set_reflection_symmetry() {
        let g = WedgeGeometry::new(5).unwrap();
        let a = PointSplit::new(&g, 0.7, 1.1, 0.5, 0.2).unwrap();
        let b = PointSplit::new(&g, 0.7, 1.1, 0.2, 0.5).unwrap();
        let mut da = image_distances(&a, &g).distances;
        let mut db = image_distances(&b, &g).distances;
        da.sort_by(f64::total_cmp);
        db.sort_by(f64::total_cmp);
        for (x, y) in da.iter().zip(&db) {
            assert_relative_eq!(x, y, max_relative = 1e-13);
        }
    }

    #[test]
    fn hbar_c_in_each_system() {
        assert_eq!(UnitSystem::Natural.hbar_c(), 1.0);
        assert_relative_eq!(UnitSystem::Si.hbar_c(), 3.161_526_773e-26, max_relative = 1e-9);
        assert_relative_eq!(UnitSystem::Cgs.hbar_c(), 3.161_526_773e-17, max_relative = 1e-9);
        assert_eq!("CGS".parse::<UnitSystem>().unwrap(), UnitSystem::Cgs);
    }
}
