//! Data commands: analysis, synthesis and phase-space exports.

use std::f64::consts::SQRT_2;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use fockspace::decay::fit_envelope;
use fockspace::grid::AxisSpec;
use fockspace::hermite::{analyze as analyze_samples, fourier_in_coefficients, gauss_hermite_rule, synthesize as synth};
use fockspace::io;
use fockspace::phase_space::{
    ambiguity_of_coefficients, fourier_2d_numeric, marginals as grid_marginals, tilde_rescale, wigner_of_density,
    PhaseSpaceGrid,
};
use fockspace::states::{validate_density, DensityMatrix};
use fockspace::{Complex64, Error};
use serde::Serialize;

use crate::report::Report;
use crate::suites::counterexample_report;
use crate::{ConventionArg, Tolerances};

/// Relative distance within which a sample abscissa is taken to be a rule node.
const NODE_MATCH: f64 = 1e-12;
/// Rounding allowance for envelope checks on CSV-parsed coefficients.
const ENVELOPE_SLACK: f64 = 1e-12;

pub fn load<T>(path: &Path, read: impl FnOnce(BufReader<File>) -> fockspace::Result<T>) -> Result<T> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read(BufReader::new(file)).with_context(|| path.display().to_string())
}

fn store(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> fockspace::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    write(&mut w).with_context(|| path.display().to_string())?;
    w.flush().with_context(|| path.display().to_string())
}

pub fn analyze(samples: &Path, n_max: usize, order: Option<usize>, output: &Path) -> Result<Report> {
    let (xs, values) = load(samples, io::read_samples)?;
    let order = order.unwrap_or(n_max + 1);
    let rule = gauss_hermite_rule(order)?;
    if xs.len() != order {
        bail!("{}: {} samples, but the order-{order} rule has {order} nodes", samples.display(), xs.len());
    }
    let mut by_x: Vec<usize> = (0..xs.len()).collect();
    by_x.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let nodes = rule.nodes();
    let mut at_node = Vec::with_capacity(order);
    for (k, &node) in nodes.iter().enumerate() {
        let j = by_x[k];
        if (xs[j] - node).abs() > NODE_MATCH * node.abs().max(1.0) {
            bail!(
                "{}: sample {} at x = {} is not a node of the order-{order} rule (nearest node {node})",
                samples.display(),
                j + 1,
                xs[j]
            );
        }
        at_node.push(values[j]);
    }
    let lookup = |x: f64| match nodes.binary_search_by(|n| n.total_cmp(&x)) {
        Ok(k) => at_node[k],
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let alpha = analyze_samples(lookup, n_max, &rule)?;
    store(output, |w| io::write_coefficients(w, &alpha))?;
    let mut report = Report::new("analyze");
    report.data("n_max", n_max)?;
    report.data("order", order)?;
    report.data("norm_sqr", alpha.norm_sqr())?;
    report.note(format!("{} coefficients written to {}", n_max + 1, output.display()));
    Ok(report)
}

pub fn synthesize(
    coefficients: &Path,
    grid: Option<AxisSpec>,
    nodes: Option<usize>,
    fourier: bool,
    output: &Path,
) -> Result<Report> {
    let alpha = load(coefficients, io::read_coefficients)?;
    let xs = match (grid, nodes) {
        (Some(g), _) => g.points(),
        (None, Some(k)) => gauss_hermite_rule(k)?.nodes().to_vec(),
        (None, None) => bail!("either --grid or --nodes is required"),
    };
    let alpha = if fourier { fourier_in_coefficients(&alpha) } else { alpha };
    let values = synth(&alpha, &xs)?;
    store(output, |w| io::write_samples(w, &xs, &values))?;
    let mut report = Report::new("synthesize");
    report.data("n_max", alpha.n_max())?;
    report.data("points", xs.len())?;
    report.data("fourier", fourier)?;
    report.note(format!("{} samples written to {}", xs.len(), output.display()));
    Ok(report)
}

fn axes(grid: &AxisSpec, p_grid: Option<&AxisSpec>) -> (Vec<f64>, Vec<f64>) {
    let q = grid.points();
    let p = p_grid.map_or_else(|| q.clone(), AxisSpec::points);
    (q, p)
}

fn grid_summary(report: &mut Report, grid: &PhaseSpaceGrid) -> Result<()> {
    report.data("q_points", grid.q_axis().len())?;
    report.data("p_points", grid.p_axis().len())?;
    report.data("convention", grid.convention())?;
    report.data("imag_residue", grid.imag_residue())?;
    let (q0, p0) = (grid.q_axis()[0], grid.p_axis()[0]);
    let (q1, p1) = (grid.q_axis()[grid.q_axis().len() - 1], grid.p_axis()[grid.p_axis().len() - 1]);
    if (q0..=q1).contains(&0.0) && (p0..=p1).contains(&0.0) {
        let v = grid.nearest(0.0, 0.0);
        report.data("origin_value", [v.re, v.im])?;
        report.note(format!("value nearest the origin: {:.12} {:+.3e}i", v.re, v.im));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn wigner(
    density: Option<&Path>,
    coefficients: Option<&Path>,
    grid: &AxisSpec,
    p_grid: Option<&AxisSpec>,
    convention: ConventionArg,
    output: &Path,
    tol: &Tolerances,
) -> Result<Report> {
    let rho = match (density, coefficients) {
        (Some(d), _) => load(d, io::read_density)?,
        (None, Some(c)) => DensityMatrix::pure(&load(c, io::read_coefficients)?)?,
        (None, None) => bail!("either --density or --coefficients is required"),
    };
    let mut report = Report::new("wigner");
    let validation = validate_density(&rho);
    if !validation.all_pass() {
        report.note("the input is not a valid density matrix; see data.validation");
    }
    report.data("validation", &validation)?;
    let (q, p) = axes(grid, p_grid);
    let grid = match convention {
        ConventionArg::Plain => wigner_of_density(&rho, &q, &p)?,
        ConventionArg::Tilde => {
            let shrink = |a: &[f64]| a.iter().map(|v| v / SQRT_2).collect::<Vec<_>>();
            tilde_rescale(&wigner_of_density(&rho, &shrink(&q), &shrink(&p))?)?
        }
    };
    report.within(
        "imaginary_residue",
        grid.imag_residue(),
        tol.imag,
        format!("max |Im Φ| = {:.3e}", grid.imag_residue()),
    );
    grid_summary(&mut report, &grid)?;
    store(output, |w| io::write_phase_space(w, &grid))?;
    Ok(report)
}

pub fn ambiguity(
    coefficients: Option<&Path>,
    phase_space: Option<&Path>,
    grid: &AxisSpec,
    p_grid: Option<&AxisSpec>,
    output: &Path,
) -> Result<Report> {
    let (theta, varpi) = axes(grid, p_grid);
    let (values, source) = match (coefficients, phase_space) {
        (Some(c), _) => (ambiguity_of_coefficients(&load(c, io::read_coefficients)?, &theta, &varpi)?, "coefficients"),
        (None, Some(ps)) => (fourier_2d_numeric(&load(ps, io::read_phase_space)?, &theta, &varpi)?, "numeric"),
        (None, None) => bail!("either --coefficients or --phase-space is required"),
    };
    let mut report = Report::new("ambiguity");
    report.data("source", source)?;
    grid_summary(&mut report, &values)?;
    store(output, |w| io::write_phase_space(w, &values))?;
    Ok(report)
}

pub fn marginals(phase_space: &Path, output: &Path) -> Result<Report> {
    let grid = load(phase_space, io::read_phase_space)?;
    let m = grid_marginals(&grid)?;
    store(output, |w| {
        writeln!(w, "axis,x,value")?;
        for (q, v) in grid.q_axis().iter().zip(&m.q_marginal) {
            writeln!(w, "q,{q},{v}")?;
        }
        for (p, v) in grid.p_axis().iter().zip(&m.p_marginal) {
            writeln!(w, "p,{p},{v}")?;
        }
        Ok(())
    })?;
    let mut report = Report::new("marginals");
    report.data("boundary_magnitude", m.boundary_magnitude)?;
    if let Some(w) = &m.truncation_warning {
        report.note(w.clone());
    }
    Ok(report)
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
enum FitOutcome {
    Fitted { lambda_hat: f64, beta_hat: f64, c_hat: f64, residual: f64, support_count: usize },
    Degenerate { reason: String },
    InsufficientSupport { usable: usize, required: usize },
}

/// Envelope fit and, with a weight, the check sup_n |α_n| e^{ω(√n)} ≤ bound.
pub fn envelope_checks(report: &mut Report, coefficients: &Path, weight: Option<&str>, bound: f64) -> Result<()> {
    let alpha = load(coefficients, io::read_coefficients)?;
    let fit = match fit_envelope(&alpha) {
        Ok(e) => {
            report.note(format!(
                "fit: |α_n| ≈ {:.4e} e^(−{:.4} n^({:.4}/2)), residual {:.2e} over {} indices",
                e.c_hat, e.lambda_hat, e.beta_hat, e.residual, e.support_count
            ));
            FitOutcome::Fitted {
                lambda_hat: e.lambda_hat,
                beta_hat: e.beta_hat,
                c_hat: e.c_hat,
                residual: e.residual,
                support_count: e.support_count,
            }
        }
        Err(Error::FitDegenerate(reason)) => {
            report.note(format!("fit: no exponential-type envelope ({reason})"));
            FitOutcome::Degenerate { reason }
        }
        Err(Error::InsufficientSupport { usable, required }) => {
            report.note(format!("fit: {usable} usable indices, {required} required"));
            FitOutcome::InsufficientSupport { usable, required }
        }
        Err(e) => return Err(e.into()),
    };
    report.data("fit", fit)?;
    let Some(spec) = weight else {
        return Ok(());
    };
    if !(bound.is_finite() && bound > 0.0) {
        bail!("--bound must be positive, got {bound}");
    }
    let w = io::parse_weight(spec).context("--weight")?;
    let limit = bound.ln() + ENVELOPE_SLACK;
    let mut worst = (f64::NEG_INFINITY, 0usize);
    let mut violations = 0usize;
    for (n, a) in alpha.values().iter().enumerate().filter(|(_, a)| a.norm() > 0.0) {
        let log_ratio = a.norm().ln() + w.eval((n as f64).sqrt())?;
        violations += usize::from(log_ratio > limit);
        if log_ratio > worst.0 {
            worst = (log_ratio, n);
        }
    }
    let sup = worst.0.exp();
    report.check(
        "envelope_bound",
        violations == 0,
        sup,
        Some(bound),
        format!("sup |α_n| e^(ω(√n)) = {sup:.6e} at n = {}; violations: {violations}", worst.1),
    );
    Ok(())
}

pub fn envelope(coefficients: &Path, weight: Option<&str>, bound: f64) -> Result<Report> {
    let mut report = Report::new("envelope");
    envelope_checks(&mut report, coefficients, weight, bound)?;
    Ok(report)
}

/// Exit status depends on the bound and positivity only; the series and
/// slope checks are reported and gated by `verify --suite counterexample`.
pub fn counterexample(n_max: usize, grid: &AxisSpec, tol: &Tolerances) -> Result<Report> {
    let mut report = counterexample_report("counterexample", n_max, grid, tol)?;
    report.passed = report.checks.iter().filter(|c| c.name == "bound" || c.name == "positivity").all(|c| c.passed);
    Ok(report)
}
