//! The `validate` subcommand: numeric checks with measured value, tolerance
//! and verdict.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::output::{Cell, Report};
use super::{CliError, RunConfig};
use crate::casimir_polder::{u_closed, u_regularized_oracle, DipoleParams};
use crate::closed_form::{
    parallel_plate_pressure, string_tensor, surface_force_density, theta_tensor, StringParams,
};
use crate::geometry::{Medium, PointSplit, UnitSystem, WedgeAngle, WedgeGeometry};
use crate::mode_sum::{
    graf_sides, regularized_tensor_via, s_thetatheta_images, s_thetatheta_modesum, OracleRoute,
    StressTensor,
};
use crate::quadrature::integrate_semi_infinite;
use crate::specfun::{bessel_ik, bessel_k0};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Deviation from the expected value (relative unless noted); NaN when
    /// the computation itself failed.
    pub measured: f64,
    pub tolerance: f64,
    pub note: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

type Job<'a> = Box<dyn Fn() -> crate::Result<f64> + Send + Sync + 'a>;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn componentwise(a: &StressTensor, b: &StressTensor) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .fold(0.0f64, |m, (x, y)| m.max(if y == 0.0 { x.abs() } else { rel(*x, y) }))
}

fn wedge(p: u32) -> crate::Result<WedgeGeometry> {
    Ok(WedgeGeometry::new(p)?)
}

const MEDIA: [(f64, f64); 3] = [(1.0, 1.0), (2.25, 1.0), (2.0, 2.0)];

fn oracle(run: &RunConfig, p: u32, medium: &Medium, r: f64, frac: f64) -> crate::Result<StressTensor> {
    let g = wedge(p)?;
    let est = regularized_tensor_via(
        run.route,
        &g,
        medium,
        r,
        frac * g.alpha(),
        &run.quad,
        &run.extrap,
    )?;
    Ok(est.tensor)
}

fn jobs(run: &RunConfig) -> Vec<(String, f64, Job<'_>)> {
    let mut v: Vec<(String, f64, Job<'_>)> = Vec::new();

    let sigma_cgs = || -> crate::Result<f64> {
        let a = WedgeAngle::new(1e-4)?;
        Ok(surface_force_density(a, &Medium::VACUUM, 1.0, UnitSystem::Cgs)?.value)
    };
    v.push(("force_cgs_value".into(), 0.05, Box::new(move || Ok(rel(sigma_cgs()?, 0.0043)))));
    v.push((
        "force_plate_ratio".into(),
        0.10,
        Box::new(move || Ok(rel(sigma_cgs()? / 0.013, 1.0 / 3.0))),
    ));
    v.push((
        "force_equals_radial_stress".into(),
        1e-14,
        Box::new(|| {
            let g = wedge(2)?;
            let s = surface_force_density(g, &Medium::VACUUM, 1.0, UnitSystem::Natural)?.value;
            let t = theta_tensor(g, &Medium::VACUUM, 1.0)?;
            Ok(rel(s, -t.theta_theta / 3.0).max(rel(s, t.r_r)))
        }),
    ));
    v.push((
        "plate_pressure_cgs".into(),
        1e-12,
        Box::new(|| {
            let hc = UnitSystem::Cgs.hbar_c();
            Ok(rel(parallel_plate_pressure(1e-4, UnitSystem::Cgs)?, PI * PI * hc / 240e-16))
        }),
    ));

    for &p in &run.p_set {
        v.push((
            format!("oracle_vs_closed_p{p}"),
            1e-6,
            Box::new(move || {
                let mut worst = 0.0f64;
                for (eps, mu) in MEDIA {
                    let m = Medium::new(eps, mu)?;
                    for r in [0.5, 1.0, 2.0] {
                        let o = oracle(run, p, &m, r, 0.5)?;
                        let c = theta_tensor(wedge(p)?, &m, r)?;
                        worst = worst.max(componentwise(&o, &c));
                    }
                }
                Ok(worst)
            }),
        ));
    }

    v.push((
        "route_equivalence".into(),
        1e-8,
        Box::new(|| {
            let mut worst = 0.0f64;
            for p in [1, 2, 3] {
                let g = wedge(p)?;
                let t = 0.5 * g.alpha();
                let split = PointSplit::new(&g, 1.0, 0.99, t, t)?;
                let a = s_thetatheta_modesum(&g, &Medium::VACUUM, &split, &run.quad)?;
                let b = s_thetatheta_images(&g, &Medium::VACUUM, &split, &run.quad)?;
                worst = worst.max(rel(a, b));
            }
            Ok(worst)
        }),
    ));
    v.push((
        "graf_residual".into(),
        1e-10,
        Box::new(|| {
            let mut worst = 0.0f64;
            for p in [1, 2, 3, 4, 6] {
                for rho in [0.5, 1.0, 5.0] {
                    for xi in [0.5, 0.9] {
                        for psi in [0.0, 0.3] {
                            let (lhs, rhs) = graf_sides(p, rho, xi, 1.0, psi)?;
                            worst = worst.max(rel(rhs, lhs));
                        }
                    }
                }
            }
            Ok(worst)
        }),
    ));

    v.push((
        "trace_zero".into(),
        4.0 * f64::EPSILON,
        Box::new(|| {
            let mut worst = 0.0f64;
            for p in [2u32, 3, 4, 6, 50] {
                let t = theta_tensor(wedge(p)?, &Medium::VACUUM, 1.0)?;
                worst = worst.max(t.trace().abs() / t.r_r.abs());
            }
            Ok(worst)
        }),
    ));
    // Components are integrated separately, so the oracle's trace is only
    // as small as the quadrature tolerance.
    v.push((
        "oracle_trace".into(),
        run.quad.rel_tol,
        Box::new(|| {
            let t = oracle(run, 3, &Medium::VACUUM, 1.0, 0.5)?;
            Ok(t.trace().abs() / t.r_r.abs())
        }),
    ));
    v.push((
        "theta_independence".into(),
        1e-6,
        Box::new(|| {
            let g = wedge(3)?;
            let at = |frac: f64| {
                regularized_tensor_via(
                    OracleRoute::ExtrapolatedModeSum,
                    &g,
                    &Medium::VACUUM,
                    1.0,
                    frac * g.alpha(),
                    &run.quad,
                    &run.extrap,
                )
            };
            Ok(componentwise(&at(0.25)?.tensor, &at(0.5)?.tensor))
        }),
    ));
    v.push((
        "r4_scaling".into(),
        1e-9,
        Box::new(|| {
            let a = oracle(run, 3, &Medium::VACUUM, 1.0, 0.5)?;
            let b = oracle(run, 3, &Medium::VACUUM, 2.0, 0.5)?;
            Ok(componentwise(&b.scaled(16.0), &a))
        }),
    ));
    v.push((
        "medium_scaling".into(),
        1e-9,
        Box::new(|| {
            let vac = oracle(run, 3, &Medium::VACUUM, 1.0, 0.5)?;
            let mut worst = 0.0f64;
            for (eps, mu) in MEDIA {
                let m = Medium::new(eps, mu)?;
                let t = oracle(run, 3, &m, 1.0, 0.5)?;
                worst = worst.max(componentwise(&t.scaled(m.refractive_index()), &vac));
            }
            Ok(worst)
        }),
    ));
    v.push((
        "half_space_zero".into(),
        0.0,
        Box::new(|| {
            let t = oracle(run, 1, &Medium::VACUUM, 1.0, 0.5)?;
            Ok(t.components().iter().fold(0.0f64, |m, x| m.max(x.abs())))
        }),
    ));
    v.push(("trig_sums".into(), 1e-10, Box::new(|| Ok(trig_sum_residual(50)))));

    for p in [2u32, 3] {
        v.push((
            format!("polder_oracle_p{p}"),
            1e-3,
            Box::new(move || {
                let g = wedge(p)?;
                let d = DipoleParams::new(1.0)?;
                let mut worst = 0.0f64;
                for theta in [g.alpha() / 3.0, g.alpha() / 2.0] {
                    let o = u_regularized_oracle(
                        &g,
                        &Medium::VACUUM,
                        &d,
                        1.0,
                        theta,
                        &run.quad,
                        &run.extrap,
                    )?;
                    let c = u_closed(&g, &Medium::VACUUM, &d, 1.0, theta)?.u;
                    worst = worst.max(rel(o, c));
                }
                Ok(worst)
            }),
        ));
    }
    v.push((
        "polder_plate_law".into(),
        1e-6,
        Box::new(|| {
            let g = wedge(1)?;
            let d = DipoleParams::new(1.0)?;
            let mut worst = 0.0f64;
            for theta in [0.3, PI / 2.0] {
                let z: f64 = theta.sin();
                let law = -3.0 / (32.0 * PI * PI * z.powi(4));
                let c = u_closed(&g, &Medium::VACUUM, &d, 1.0, theta)?.u;
                let o = u_regularized_oracle(&g, &Medium::VACUUM, &d, 1.0, theta, &run.quad, &run.extrap)?;
                worst = worst.max(rel(c, law)).max(rel(o, law));
            }
            Ok(worst)
        }),
    ));
    v.push((
        "polder_medium_prefactor".into(),
        1e-14,
        Box::new(|| {
            let g = wedge(3)?;
            let d = DipoleParams::new(1.0)?;
            let vac = u_closed(&g, &Medium::VACUUM, &d, 1.0, 0.4)?.u;
            let mut worst = 0.0f64;
            for (eps, mu) in MEDIA {
                let m = Medium::new(eps, mu)?;
                let u = u_closed(&g, &m, &d, 1.0, 0.4)?.u;
                worst = worst.max(rel(u * m.refractive_index() * eps, vac));
            }
            Ok(worst)
        }),
    ));
    v.push((
        "string_analogy".into(),
        1e-12,
        Box::new(|| {
            let mut worst = 0.0f64;
            for p in [1u32, 2, 3, 4, 6] {
                let s = string_tensor(&StringParams::from_beta(f64::from(p))?, 1.3)?;
                for (eps, mu) in MEDIA {
                    let m = Medium::new(eps, mu)?;
                    let w = theta_tensor(wedge(p)?, &m, 1.3)?.scaled(m.refractive_index());
                    worst = worst.max(componentwise(&s, &w));
                }
            }
            Ok(worst)
        }),
    ));

    v.push(("bessel_wronskian".into(), 1e-10, Box::new(wronskian_residual)));
    v.push(("bessel_recurrences".into(), 1e-12, Box::new(recurrence_residual)));
    v.push((
        "k0_moments".into(),
        run.quad.rel_tol,
        Box::new(|| {
            let mut worst = 0.0f64;
            for j in 0..=3 {
                for a in [0.5f64, 1.0, 2.0] {
                    let fact: f64 = (1..=j).map(f64::from).product();
                    let exact = 4f64.powi(j) * fact * fact / a.powi(2 * j + 2);
                    let got = integrate_semi_infinite(
                        |s| Ok(s.rho().powi(2 * j + 1) * bessel_k0(a * s.rho())?),
                        a,
                        &run.quad,
                    )?;
                    worst = worst.max(rel(got.value, exact));
                }
            }
            Ok(worst)
        }),
    ));
    v
}

/// Largest relative residual of the closed forms for
/// `sum_{n<p} sin^-2(pi n/p)` and `sum_{n<p} sin^-4(pi n/p)`, `2 <= p <= p_max`.
pub fn trig_sum_residual(p_max: u32) -> f64 {
    let mut worst = 0.0f64;
    for p in 2..=p_max {
        let pf = f64::from(p);
        let (mut s2, mut s4) = (0.0, 0.0);
        for n in 1..p {
            let s = (PI * f64::from(n) / pf).sin();
            s2 += 1.0 / (s * s);
            s4 += 1.0 / s.powi(4);
        }
        worst = worst
            .max(rel(s2, (pf * pf - 1.0) / 3.0))
            .max(rel(s4, (pf * pf + 11.0) * (pf * pf - 1.0) / 45.0));
    }
    worst
}

fn bessel_grid() -> impl Iterator<Item = (u32, f64)> {
    (0..=120u32)
        .step_by(4)
        .flat_map(|nu| (0..=40).map(move |k| (nu, 1e-6 * (7e8f64).powf(f64::from(k) / 40.0))))
}

fn wronskian_residual() -> crate::Result<f64> {
    let mut worst = 0.0f64;
    for (nu, x) in bessel_grid() {
        // Orders whose values leave the f64 range are skipped here.
        let Ok(b) = bessel_ik(nu, x) else { continue };
        let w = b.value_i * b.deriv_k - b.deriv_i * b.value_k;
        worst = worst.max((w * x + 1.0).abs());
    }
    Ok(worst)
}

fn recurrence_residual() -> crate::Result<f64> {
    let mut worst = 0.0f64;
    for (nu, x) in bessel_grid() {
        let nu = nu.max(1);
        let (Ok(lo), Ok(mid), Ok(hi)) = (bessel_ik(nu - 1, x), bessel_ik(nu, x), bessel_ik(nu + 1, x))
        else {
            continue;
        };
        let di = 0.5 * (lo.value_i + hi.value_i);
        let dk = -0.5 * (lo.value_k + hi.value_k);
        worst = worst.max(rel(mid.deriv_i, di)).max(rel(mid.deriv_k, dk));
    }
    for x in [1e-6, 0.01, 1.0, 30.0, 700.0] {
        let b0 = bessel_ik(0, x)?;
        let b1 = bessel_ik(1, x)?;
        worst = worst.max(rel(b0.deriv_i, b1.value_i)).max(rel(b0.deriv_k, -b1.value_k));
    }
    Ok(worst)
}

/// Runs every check; computation failures show up as NaN, which fails.
pub fn run_checks(run: &RunConfig) -> Vec<Check> {
    jobs(run)
        .into_par_iter()
        .map(|(name, tolerance, job)| match job() {
            Ok(measured) => Check {
                name,
                measured,
                tolerance,
                note: String::new(),
            },
            Err(e) => Check {
                name,
                measured: f64::NAN,
                tolerance,
                note: e.to_string(),
            },
        })
        .collect()
}

pub fn cmd_validate(run: &RunConfig) -> Result<(Report, bool), CliError> {
    let checks = run_checks(run);
    let ok = checks.iter().all(Check::passed);
    let mut report = Report::new("validate", &["check", "measured", "tolerance", "pass", "note"])
        .meta("route", run.route.to_string())
        .meta("rel_tol", run.quad.rel_tol)
        .meta("version", env!("CARGO_PKG_VERSION"));
    for c in &checks {
        report.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Num(c.measured),
            Cell::Num(c.tolerance),
            Cell::Bool(c.passed()),
            Cell::Text(c.note.clone()),
        ]);
    }
    Ok((report, ok))
}
