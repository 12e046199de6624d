use serde::{Deserialize, Serialize};

use crate::error::ExtrapolationError;

/// How point-split samples are taken and extrapolated to coincidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationSpec {
    /// Splitting parameters, strictly monotone, coarsest first. For radial
    /// splits these are half-separations relative to `r`.
    pub splittings: Vec<f64>,
    /// Number of Richardson levels (columns of the Neville table) to use.
    pub order: usize,
    /// The error expansion runs in powers of `splitting^power`.
    pub power: i32,
    /// Relative size of the last-level correction accepted as converged.
    pub tol: f64,
    /// When set, the splittings are shrunk proportionally so the coarsest
    /// stays below this fraction of the distance (relative to `r`) to the
    /// nearest singularity left after subtraction.
    #[serde(default)]
    pub reach_fraction: Option<f64>,
}

impl Default for ExtrapolationSpec {
    fn default() -> Self {
        Self {
            splittings: vec![0.16, 0.08, 0.04, 0.02],
            order: 3,
            power: 2,
            tol: 1e-4,
            reach_fraction: Some(0.1),
        }
    }
}

impl ExtrapolationSpec {
    /// Splittings to sample for a geometry whose smooth remainder reaches
    /// `reach` (relative to `r`).
    pub fn splittings_for(&self, reach: f64) -> Vec<f64> {
        let coarsest = self.splittings.iter().fold(0.0f64, |m, h| m.max(h.abs()));
        match self.reach_fraction {
            Some(f) if coarsest > f * reach && reach > 0.0 => {
                let k = f * reach / coarsest;
                self.splittings.iter().map(|h| h * k).collect()
            }
            _ => self.splittings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    pub err_estimate: f64,
    /// Highest-order estimate from each prefix of the samples.
    pub diagonal: Vec<f64>,
}

/// Polynomial (Neville) extrapolation of `samples` to zero splitting in the
/// variable `splitting^power`.
pub fn extrapolate_coincidence(
    samples: &[(f64, f64)],
    spec: &ExtrapolationSpec,
) -> Result<Extrapolated, ExtrapolationError> {
    let n = samples.len();
    if n < 3 {
        return Err(ExtrapolationError::TooFewSamples(n));
    }
    let increasing = samples[1].0 > samples[0].0;
    let monotone = samples.windows(2).all(|w| {
        if increasing {
            w[1].0 > w[0].0
        } else {
            w[1].0 < w[0].0
        }
    });
    if !monotone || samples.iter().any(|s| s.0 == 0.0) {
        return Err(ExtrapolationError::NonMonotone);
    }
    let order = spec.order.clamp(1, n - 1);
    let t: Vec<f64> = samples.iter().map(|s| s.0.abs().powi(spec.power)).collect();
    // table[i][j]: degree-j extrapolant through samples i-j ..= i.
    let mut table = vec![vec![0.0; order + 1]; n];
    for i in 0..n {
        table[i][0] = samples[i].1;
        for j in 1..=order.min(i) {
            let (ta, tb) = (t[i - j], t[i]);
            table[i][j] = (ta * table[i][j - 1] - tb * table[i - 1][j - 1]) / (ta - tb);
        }
    }
    let diagonal: Vec<f64> = (0..n).map(|i| table[i][order.min(i)]).collect();
    let value = table[n - 1][order];
    let err_estimate = (value - table[n - 1][order - 1])
        .abs()
        .max((value - table[n - 2][order.min(n - 2)]).abs());
    if !value.is_finite() || err_estimate > spec.tol * value.abs().max(f64::MIN_POSITIVE) {
        return Err(ExtrapolationError::NotConverged {
            value,
            err_estimate,
            diagonal,
        });
    }
    Ok(Extrapolated {
        value,
        err_estimate,
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splittings_shrink_only_past_the_reach() {
        let s = ExtrapolationSpec::default();
        assert_eq!(s.splittings_for(2.0), s.splittings);
        let h = s.splittings_for(0.5);
        assert!((h[0] - 0.05).abs() < 1e-15);
        assert!((h[3] - 0.00625).abs() < 1e-15);
        let fixed = ExtrapolationSpec {
            reach_fraction: None,
            ..ExtrapolationSpec::default()
        };
        assert_eq!(fixed.splittings_for(0.5), fixed.splittings);
    }

    fn spec(tol: f64) -> ExtrapolationSpec {
        ExtrapolationSpec {
            tol,
            ..ExtrapolationSpec::default()
        }
    }

    #[test]
    fn quadratic_model_is_exact() {
        let samples: Vec<_> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&d: &f64| (d, 1.5 - 7.0 * d * d))
            .collect();
        let e = extrapolate_coincidence(&samples, &spec(1e-8)).unwrap();
        assert!((e.value - 1.5).abs() <= 1e-10, "{e:?}");
    }

    #[test]
    fn constant_samples() {
        let samples = [(0.3, 2.0), (0.2, 2.0), (0.1, 2.0), (0.05, 2.0)];
        let e = extrapolate_coincidence(&samples, &spec(1e-12)).unwrap();
        assert_eq!(e.value, 2.0);
        assert_eq!(e.err_estimate, 0.0);
    }

    #[test]
    fn higher_order_series() {
        let f = |d: f64| 0.7 + 0.3 * d * d - 2.0 * d.powi(4) + 5.0 * d.powi(6) - d.powi(8);
        let samples: Vec<_> = [0.16, 0.08, 0.04, 0.02].iter().map(|&d| (d, f(d))).collect();
        let e = extrapolate_coincidence(&samples, &spec(1e-5)).unwrap();
        assert!((e.value - 0.7).abs() < 1e-9, "{e:?}");
        // The estimate is conservative: it is the size of the last correction.
        assert!(e.err_estimate > (e.value - 0.7).abs());
    }

    #[test]
    fn errors() {
        assert_eq!(
            extrapolate_coincidence(&[(0.1, 1.0), (0.05, 1.0)], &spec(1e-6)),
            Err(ExtrapolationError::TooFewSamples(2))
        );
        assert_eq!(
            extrapolate_coincidence(&[(0.1, 1.0), (0.2, 1.0), (0.05, 1.0)], &spec(1e-6)),
            Err(ExtrapolationError::NonMonotone)
        );
        // 1/d diverges: no polynomial limit.
        let samples: Vec<_> = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&d: &f64| (d, 1.0 / d))
            .collect();
        assert!(matches!(
            extrapolate_coincidence(&samples, &spec(1e-6)),
            Err(ExtrapolationError::NotConverged { .. })
        ));
    }
}
