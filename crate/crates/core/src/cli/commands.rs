//! Row builders for each subcommand. Grids are evaluated in parallel and
//! emitted in input order.

use rayon::prelude::*;

use super::output::{Cell, Report};
use super::{Azimuths, CliError, Opening, Quantity, RunConfig};
use crate::casimir_polder::{u_closed, u_regularized_oracle, DipoleParams};
use crate::closed_form::{parallel_plate_pressure, string_tensor, surface_force_density, theta_tensor};
use crate::geometry::{Medium, WedgeGeometry};
use crate::mode_sum::{regularized_tensor_via, StressTensor};

/// Largest componentwise deviation relative to the largest reference
/// component; absolute when the reference vanishes.
pub(crate) fn tensor_deviation(got: &StressTensor, reference: &StressTensor) -> f64 {
    let scale = reference
        .components()
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let dev = got
        .components()
        .iter()
        .zip(reference.components())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if scale > 0.0 {
        dev / scale
    } else {
        dev
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn par_rows<T, F>(points: &[T], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    let results: Vec<_> = points.par_iter().map(f).collect();
    results.into_iter().collect()
}

fn opening_cells(o: &Opening) -> Result<Vec<Cell>, CliError> {
    let angle = o.angle()?;
    let p = match o {
        Opening::P(p) => Cell::from(*p),
        Opening::Alpha(_) => Cell::Num(angle.p()),
    };
    Ok(vec![p, Cell::Num(angle.alpha())])
}

fn medium_meta(report: Report, m: &Medium) -> Report {
    report
        .meta("eps", m.epsilon())
        .meta("mu", m.mu())
        .meta("version", env!("CARGO_PKG_VERSION"))
}

fn tensor_columns(oracle: bool) -> Vec<&'static str> {
    let mut c = vec!["p", "alpha", "r", "rr", "thetatheta", "zz", "w"];
    if oracle {
        c.extend([
            "theta",
            "oracle_rr",
            "oracle_thetatheta",
            "oracle_zz",
            "oracle_w",
            "oracle_err",
            "rel_dev",
        ]);
    }
    c
}

fn theta_of(az: &Azimuths, geom: &WedgeGeometry) -> Vec<f64> {
    match az {
        Azimuths::Radians(t) => t.clone(),
        Azimuths::Fractions(f) => f.iter().map(|x| x * geom.alpha()).collect(),
    }
}

fn tensor_row(run: &RunConfig, o: &Opening, r: f64) -> Result<Vec<Cell>, CliError> {
    let closed = theta_tensor(o.angle()?, &run.medium, r)?;
    let mut row = opening_cells(o)?;
    row.push(Cell::Num(r));
    row.extend(closed.components().map(Cell::Num));
    if run.oracle {
        let geom = o.geometry()?;
        let theta = theta_of(&run.azimuths, &geom)[0];
        let est = regularized_tensor_via(
            run.route,
            &geom,
            &run.medium,
            r,
            theta,
            &run.quad,
            &run.extrap,
        )?;
        row.push(Cell::Num(theta));
        row.extend(est.tensor.components().map(Cell::Num));
        row.push(Cell::Num(est.err_estimate));
        row.push(Cell::Num(tensor_deviation(&est.tensor, &closed)));
    }
    Ok(row)
}

fn tensor_report(run: &RunConfig, command: &str) -> Result<Report, CliError> {
    let mut report = medium_meta(Report::new(command, &tensor_columns(run.oracle)), &run.medium)
        .meta("quantity", "tensor")
        .meta("units", "natural");
    if run.oracle {
        report = report
            .meta("route", run.route.to_string())
            .meta("rel_tol", run.quad.rel_tol);
    }
    let points: Vec<(Opening, f64)> = run
        .openings
        .iter()
        .flat_map(|o| run.radii.iter().map(move |r| (*o, *r)))
        .collect();
    for row in par_rows(&points, |(o, r)| tensor_row(run, o, *r))? {
        report.push(row);
    }
    Ok(report)
}

fn force_row(run: &RunConfig, o: &Opening, r: f64) -> Result<Vec<Cell>, CliError> {
    let angle = o.angle()?;
    let sigma = surface_force_density(angle, &run.medium, r, run.units)?;
    // Vacuum plates separated by the wedge's arc width at r.
    let plate = parallel_plate_pressure(angle.alpha() * r, run.units)?;
    let mut row = opening_cells(o)?;
    row.extend([r, sigma.value, plate, sigma.value / plate].map(Cell::Num));
    Ok(row)
}

fn force_report(run: &RunConfig, command: &str) -> Result<Report, CliError> {
    let columns = ["p", "alpha", "r", "sigma", "plate_pressure", "plate_ratio"];
    let mut report = medium_meta(Report::new(command, &columns), &run.medium)
        .meta("quantity", "force")
        .meta("units", run.units.name())
        .meta("length_unit", run.units.length_unit())
        .meta("pressure_unit", run.units.pressure_unit());
    let points: Vec<(Opening, f64)> = run
        .openings
        .iter()
        .flat_map(|o| run.radii.iter().map(move |r| (*o, *r)))
        .collect();
    for row in par_rows(&points, |(o, r)| force_row(run, o, *r))? {
        report.push(row);
    }
    Ok(report)
}

fn polder_row(
    run: &RunConfig,
    geom: &WedgeGeometry,
    dip: &DipoleParams,
    r: f64,
    theta: f64,
) -> Result<Vec<Cell>, CliError> {
    let res = u_closed(geom, &run.medium, dip, r, theta)?;
    let mut row = vec![Cell::from(geom.p())];
    row.extend([r, theta, res.u, res.force_r, res.force_theta].map(Cell::Num));
    if run.oracle {
        let u = u_regularized_oracle(geom, &run.medium, dip, r, theta, &run.quad, &run.extrap)?;
        row.extend([u, rel_dev(u, res.u)].map(Cell::Num));
    }
    Ok(row)
}

fn polder_report(run: &RunConfig, command: &str) -> Result<Report, CliError> {
    let mut columns = vec!["p", "r", "theta", "u", "force_r", "force_theta"];
    if run.oracle {
        columns.extend(["oracle_u", "rel_dev"]);
    }
    let dip = DipoleParams::new(run.alpha0)?;
    let mut report = medium_meta(Report::new(command, &columns), &run.medium)
        .meta("quantity", "polder")
        .meta("alpha0", run.alpha0)
        .meta("units", "natural");
    let mut points = Vec::new();
    for o in &run.openings {
        let geom = o.geometry()?;
        for &r in &run.radii {
            for theta in theta_of(&run.azimuths, &geom) {
                points.push((geom, r, theta));
            }
        }
    }
    for row in par_rows(&points, |(g, r, t)| polder_row(run, g, &dip, *r, *t))? {
        report.push(row);
    }
    Ok(report)
}

pub fn cmd_tensor(run: &RunConfig) -> Result<Report, CliError> {
    tensor_report(run, "tensor")
}

pub fn cmd_force(run: &RunConfig) -> Result<Report, CliError> {
    force_report(run, "force")
}

pub fn cmd_polder(run: &RunConfig) -> Result<Report, CliError> {
    polder_report(run, "polder")
}

/// String tensor at each radius; for integer `beta` also the comparison
/// with the wedge of `p = beta` in the configured medium, rescaled by the
/// refractive index.
pub fn cmd_string(run: &RunConfig) -> Result<Report, CliError> {
    let params = run
        .string
        .ok_or_else(|| CliError::Usage("string parameters missing".into()))?;
    let beta = params.beta();
    let wedge_p = (beta.fract() == 0.0 && beta >= 1.0 && beta <= f64::from(u32::MAX))
        .then_some(beta as u32);
    let mut columns = vec!["r", "rr", "thetatheta", "zz", "w"];
    if wedge_p.is_some() {
        columns.extend(["wedge_thetatheta", "rel_dev"]);
    }
    let mut report = medium_meta(Report::new("string", &columns), &run.medium)
        .meta("beta", beta)
        .meta("g_mu", params.g_mu());
    if let Some(p) = wedge_p {
        report = report.meta("wedge_p", p);
    }
    for &r in &run.radii {
        let s = string_tensor(&params, r)?;
        let mut row = vec![Cell::Num(r)];
        row.extend(s.components().map(Cell::Num));
        if let Some(p) = wedge_p {
            let n = run.medium.refractive_index();
            let w = theta_tensor(WedgeGeometry::new(p)?, &run.medium, r)?.scaled(n);
            row.push(Cell::Num(w.theta_theta));
            row.push(Cell::Num(tensor_deviation(&s, &w)));
        }
        report.push(row);
    }
    Ok(report)
}

pub fn cmd_sweep(run: &RunConfig) -> Result<Report, CliError> {
    match run.quantity {
        Some(Quantity::Tensor) => tensor_report(run, "sweep"),
        Some(Quantity::Force) => force_report(run, "sweep"),
        Some(Quantity::Polder) => polder_report(run, "sweep"),
        None => Err(CliError::Usage("sweep needs --quantity".into())),
    }
}
