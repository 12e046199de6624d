use crate::error::SumError;

/// Stopping rule for [`sum_primed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumSpec {
    /// Stop once the estimated remainder is below `rel_tol * |sum|`.
    pub rel_tol: f64,
    /// ... or below this absolute floor.
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SumSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_terms: 200_000,
        }
    }
}

impl SumSpec {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

const WINDOW: usize = 4;

/// `sum'_{m >= 0} t_m`, the `m = 0` term taken with half weight.
///
/// Terms may oscillate (`cos(m p psi)` factors), so decay is judged on the
/// running maximum over windows of four terms: with per-term ratio `q`
/// estimated from consecutive windows, the remainder is bounded by
/// `W q / (1 - q)`.
pub fn sum_primed<F, E>(mut term: F, spec: &SumSpec) -> Result<f64, E>
where
    F: FnMut(usize) -> Result<f64, E>,
    E: From<SumError>,
{
    let mut sum = 0.5 * term(0)?;
    let mut window_prev = f64::NAN;
    let mut window = 0.0f64;
    let mut tail = f64::INFINITY;
    let mut last_ratio = f64::INFINITY;
    for m in 1..spec.max_terms {
        let t = term(m)?;
        sum += t;
        window = window.max(t.abs());
        if m % WINDOW != 0 {
            continue;
        }
        if window == 0.0 {
            tail = 0.0;
        } else if window_prev.is_finite() && window_prev > 0.0 {
            let q = (window / window_prev).powf(1.0 / WINDOW as f64);
            last_ratio = q;
            tail = if q < 1.0 {
                window * q / (1.0 - q)
            } else {
                f64::INFINITY
            };
        }
        if m >= 2 * WINDOW && tail <= spec.abs_tol.max(spec.rel_tol * sum.abs()) {
            return Ok(sum);
        }
        window_prev = window;
        window = 0.0;
    }
    if last_ratio >= 1.0 {
        Err(SumError::NonDecaying {
            partial: sum,
            terms: spec.max_terms,
        }
        .into())
    } else {
        Err(SumError::TruncationLimit {
            partial: sum,
            terms: spec.max_terms,
            tail,
        }
        .into())
    }
}
