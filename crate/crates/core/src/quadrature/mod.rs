//! Integration over the imaginary-frequency radial variable `rho` in
//! `[0, inf)`, primed mode sums, and extrapolation to coincident points.

mod gauss_kronrod;
mod richardson;
mod series;

use serde::{Deserialize, Serialize};

use crate::error::{Error, QuadratureError};
use gauss_kronrod::{qk21, Panel};

pub use richardson::{extrapolate_coincidence, ExtrapolationSpec, Extrapolated};
pub use series::{sum_primed, SumSpec};

/// Tolerances and limits for [`integrate_semi_infinite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// The finite part of the range ends at `rho = tail_cutoff_scale / L`,
    /// `L` being the integrand's decay length (`f ~ exp(-rho L)`).
    pub tail_cutoff_scale: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            tail_cutoff_scale: 60.0,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec(
                "rel_tol and abs_tol must be positive".into(),
            ));
        }
        if !(self.tail_cutoff_scale > 0.0) || self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec(
                "tail cutoff and subdivision limit must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Radial wavenumber in the `(sqrt(eps mu) w, k)` plane after the rotation to
/// imaginary frequency.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SpectralPoint(pub f64);

impl SpectralPoint {
    pub fn rho(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `[0, inf)` for an integrand decaying like
/// `exp(-rho * decay_length)`.
///
/// The range up to `tail_cutoff_scale / decay_length` is handled by adaptive
/// Gauss-Kronrod bisection; the remainder is bounded from the local decay
/// rate at the cutoff and the cutoff is pushed outward until that bound is
/// below tolerance. The bound is included in `err_estimate`.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    decay_length: f64,
    spec: &QuadratureSpec,
) -> crate::Result<Integral>
where
    F: FnMut(SpectralPoint) -> crate::Result<f64>,
{
    spec.validate()?;
    if !(decay_length > 0.0 && decay_length.is_finite()) {
        return Err(QuadratureError::InvalidSpec(format!(
            "decay length must be positive, got {decay_length}"
        ))
        .into());
    }
    let mut evaluations = 0usize;
    let mut g = |rho: f64| -> crate::Result<f64> {
        evaluations += 1;
        let v = f(SpectralPoint(rho))?;
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite { rho }.into());
        }
        Ok(v)
    };

    let mut cutoff = spec.tail_cutoff_scale / decay_length;
    let unit = cutoff / 60.0;
    let breaks = [0.0, 1.0, 3.0, 8.0, 16.0, 30.0, 60.0];
    let mut panels = Vec::with_capacity(64);
    for w in breaks.windows(2) {
        panels.push(qk21(&mut g, w[0] * unit, w[1] * unit)?);
    }

    let mut tail;
    let mut extensions = 0;
    loop {
        refine(&mut g, &mut panels, spec)?;
        let total = panels.iter().map(|p| p.value).sum::<f64>();
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        tail = tail_bound(&mut g, cutoff)?;
        if tail <= 0.25 * target {
            break;
        }
        extensions += 1;
        if extensions > 8 {
            let err = panels.iter().map(|p| p.error).sum::<f64>() + tail;
            return Err(QuadratureError::NotConverged {
                value: total,
                err_estimate: err,
                subdivisions: panels.len(),
            }
            .into());
        }
        panels.push(qk21(&mut g, cutoff, 2.0 * cutoff)?);
        cutoff *= 2.0;
    }

    // Fixed left-to-right order keeps the sum bit-reproducible.
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().map(|p| p.value).sum::<f64>();
    let err_estimate = panels.iter().map(|p| p.error).sum::<f64>() + tail;
    Ok(Integral {
        value,
        err_estimate,
        evaluations,
    })
}

fn refine<G>(g: &mut G, panels: &mut Vec<Panel>, spec: &QuadratureSpec) -> crate::Result<()>
where
    G: FnMut(f64) -> crate::Result<f64>,
{
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        // Cancellation between panels can put the requested accuracy below
        // what the samples carry; the floor stays in the reported error.
        let floor: f64 = 2.0 * panels.iter().map(|p| p.roundoff).sum::<f64>();
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()).max(floor) {
            return Ok(());
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::Quadrature(QuadratureError::NotConverged {
                value: total,
                err_estimate: err,
                subdivisions: panels.len(),
            }));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // Interval exhausted at machine resolution; keep it as is.
            panels.push(Panel { error: 0.0, ..p });
            continue;
        }
        panels.push(qk21(g, p.a, mid)?);
        panels.push(qk21(g, mid, p.b)?);
    }
}

/// Bound on `int_cutoff^inf |f|` from the decay rate measured just below the
/// cutoff. Returns infinity when `f` is not decaying there.
fn tail_bound<G>(g: &mut G, cutoff: f64) -> crate::Result<f64>
where
    G: FnMut(f64) -> crate::Result<f64>,
{
    let f_end = g(cutoff)?.abs();
    if f_end == 0.0 {
        return Ok(0.0);
    }
    let back = 0.1 * cutoff;
    let f_back = g(cutoff - back)?.abs();
    let rate = (f_back / f_end).ln() / back;
    if !(rate > 0.0) || !rate.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(f_end / rate)
}
