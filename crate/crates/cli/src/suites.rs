//! Verification suites behind `verify --suite`.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, Result};
use fockspace::decay::{
    fit_envelope, moment_bound_check, tail_sum_check, verify_backward_bound, verify_forward_bound, TestFunction,
    DEFAULT_CBAR_GRID,
};
use fockspace::grid::AxisSpec;
use fockspace::hermite::{
    analyze, fourier_in_coefficients, fourier_numeric, gauss_hermite_rule, hermite_tail_envelope_check,
    hermite_values, minus_i_pow, synthesize, CoefficientSequence,
};
use fockspace::io;
use fockspace::phase_space::{
    ambiguity_of_coefficients, fourier_2d_numeric, krasikov_check, marginals, radial_bound_check, special_hermite,
    special_hermite_integral, tilde_rescale, wigner_of_density,
};
use fockspace::states::{decay_vs_wigner_experiment, DensityMatrix, DiagonalFit, SERIES_RADIUS};
use fockspace::weights::WeightFunction;
use fockspace::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands::envelope_checks;
use crate::report::Report;
use crate::{Suite, Tolerances};

pub struct SuiteOptions {
    pub nmax: Option<usize>,
    pub seed: u64,
    pub points: Option<usize>,
    pub coefficients: Option<PathBuf>,
    pub weight: Option<String>,
    pub bound: f64,
}

pub fn run(suite: Suite, opts: &SuiteOptions, tol: &Tolerances) -> Result<Report> {
    match suite {
        Suite::Hermite => hermite(opts.nmax.unwrap_or(200), tol),
        Suite::Laguerre => laguerre(opts.nmax.unwrap_or(100), opts.points.unwrap_or(10), opts.seed, tol),
        Suite::Wigner => wigner(opts.nmax.unwrap_or(16), opts.points.unwrap_or(10), opts.seed, tol),
        Suite::Tame => tame(opts.nmax.unwrap_or(256), opts.weight.as_deref(), tol),
        Suite::Counterexample => {
            counterexample_report("verify counterexample", opts.nmax.unwrap_or(400), &AxisSpec::new(0.0, 6.0, 0.05)?, tol)
        }
        Suite::Envelope => {
            let (Some(c), Some(w)) = (&opts.coefficients, &opts.weight) else {
                bail!("the envelope suite needs --coefficients and --weight");
            };
            let mut report = Report::new("verify envelope");
            envelope_checks(&mut report, c, Some(w), opts.bound)?;
            Ok(report)
        }
    }
}

fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    Ok(AxisSpec::new(lo, hi, step)?.points())
}

fn random_state(rng: &mut ChaCha8Rng, n_max: usize, normalize: bool) -> Result<CoefficientSequence> {
    let values =
        (0..=n_max).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let a = CoefficientSequence::new(values)?;
    let s = a.norm_sqr().sqrt();
    Ok(if normalize { a.map(|z| z / s) } else { a })
}

fn hermite(n_max: usize, tol: &Tolerances) -> Result<Report> {
    let mut report = Report::new("verify hermite");
    report.data("n_max", n_max)?;

    let rule = gauss_hermite_rule(n_max + 1)?;
    let hs: Vec<Vec<f64>> = rule.nodes().iter().map(|&x| hermite_values(n_max, x)).collect::<Result<_, _>>()?;
    let rows: Vec<(f64, usize, usize)> = (0..=n_max)
        .into_par_iter()
        .map(|m| {
            let mut worst = (0.0f64, m, 0);
            for n in 0..=m {
                let g: f64 = rule.function_weights().iter().zip(&hs).map(|(l, h)| l * h[m] * h[n]).sum();
                let d = (g - if m == n { 1.0 } else { 0.0 }).abs();
                if d > worst.0 {
                    worst = (d, m, n);
                }
            }
            worst
        })
        .collect();
    let (gram, gm, gn) = rows.iter().copied().fold((0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    report.within(
        "orthonormality",
        gram,
        tol.orthonormality,
        format!("max |G − I| = {gram:.3e} at ({gm}, {gn}), rule order {}", n_max + 1),
    );

    let xs = axis(-50.0, 50.0, 1.0 / 64.0)?;
    let sup = xs
        .par_iter()
        .map(|&x| Ok(hermite_values(n_max, x)?.iter().fold(0.0f64, |m, h| m.max(h.abs()))))
        .collect::<Result<Vec<f64>, fockspace::Error>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.check("uniform_bound", sup <= 1.0, sup, Some(1.0), format!("sup |h_n(x)| = {sup:.6} on |x| ≤ 50"));

    let s = (2.0 * n_max as f64 + 1.0).sqrt();
    let half = (s + 12.0).ceil();
    let xs = axis(-half, half, 1.0 / 16.0)?;
    let xis = axis(-half, half, 0.25)?;
    let hx: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_values(n_max, x)).collect::<Result<_, _>>()?;
    let hxi: Vec<Vec<f64>> = xis.iter().map(|&x| hermite_values(n_max, x)).collect::<Result<_, _>>()?;
    let per_n: Vec<(f64, bool)> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let samples: Vec<Complex64> = hx.iter().map(|h| Complex64::new(h[n], 0.0)).collect();
            let t = fourier_numeric(&xs, &samples, &xis)?;
            let err =
                t.values.iter().zip(&hxi).map(|(v, h)| (v - minus_i_pow(n) * h[n]).norm()).fold(0.0, f64::max);
            Ok((err, t.truncation_warning.is_some()))
        })
        .collect::<Result<_, fockspace::Error>>()?;
    let (worst_n, &(fourier_err, _)) =
        per_n.iter().enumerate().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).expect("n_max + 1 transforms");
    if per_n.iter().any(|p| p.1) {
        report.note("some sampled transforms were truncated at the grid ends");
    }
    report.within(
        "fourier_eigenrelation",
        fourier_err,
        tol.fourier,
        format!("sup |F h_n − (−i)^n h_n| = {fourier_err:.3e} at n = {worst_n}"),
    );

    let xs = axis(-(s + 12.0), s + 12.0, 1.0 / 64.0)?;
    let tails =
        (0..=n_max).into_par_iter().map(|n| hermite_tail_envelope_check(n, &xs)).collect::<Result<Vec<_>, _>>()?;
    let violations: usize = tails.iter().map(|t| t.violations.len()).sum();
    let checked: usize = tails.iter().map(|t| t.checked).sum();
    let tight = tails.iter().min_by(|a, b| a.min_slack.total_cmp(&b.min_slack)).expect("at least one order");
    report.check(
        "tail_envelope",
        violations == 0,
        violations as f64,
        Some(0.0),
        format!(
            "|h_n(x)| ≤ e^(−(|x|−s)²/2) beyond s = √(2n+1): {violations} violations over {checked} points, \
             min slack {:.3e} (n = {})",
            tight.min_slack, tight.n
        ),
    );
    let scaled: Vec<f64> = tails.iter().skip(1).map(|t| t.turning_point_scaled).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    report.note(format!("n^(1/12)·|h_n(√(2n+1))| ranges over [{lo:.4}, {hi:.4}] for 1 ≤ n ≤ {n_max} (recorded only)"));
    report.data("turning_point_scaled", scaled)?;
    Ok(report)
}

fn laguerre(n_max: usize, points: usize, seed: u64, tol: &Tolerances) -> Result<Report> {
    let mut report = Report::new("verify laguerre");
    report.data("n_max", n_max)?;
    let oracle_max = n_max.min(20);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(f64, f64)> =
        (0..points).map(|_| (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0))).collect();
    let worst = samples
        .par_iter()
        .map(|&(q, p)| {
            let mut w = (0.0f64, 0, 0, q, p);
            for m in 0..=oracle_max {
                for n in 0..=oracle_max {
                    let d = (special_hermite(m, n, q, p)? - special_hermite_integral(m, n, q, p)?).norm();
                    if d > w.0 {
                        w = (d, m, n, q, p);
                    }
                }
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>, fockspace::Error>>()?
        .into_iter()
        .fold((0.0, 0, 0, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    report.within(
        "special_hermite_oracle",
        worst.0,
        tol.oracle,
        format!(
            "max |closed form − integral| = {:.3e} at (m, n) = ({}, {}), (q, p) = ({:.4}, {:.4}); m, n ≤ {oracle_max}, {points} points",
            worst.0, worst.1, worst.2, worst.3, worst.4
        ),
    );

    let r_grid = axis(0.0, (2.0 * n_max as f64 + 1.0).sqrt() + 6.0, 1.0 / 64.0)?;
    let radial = radial_bound_check(n_max, &r_grid, None)?;
    report.check(
        "radial_bound",
        radial.pass,
        radial.k,
        None,
        format!(
            "l_mn(r) ≤ K b(r) with K = {:.6} (inner {:.6}, outer {:.6}) over {} points, m ≥ n, m ≤ {n_max}",
            radial.k, radial.k_inner, radial.k_outer, radial.grid_points
        ),
    );

    let alpha_max = 50;
    let xs = axis(0.0, 4.0 * (n_max + alpha_max) as f64 + 100.0, 0.125)?;
    let kr = krasikov_check(n_max.max(1), alpha_max, &xs)?;
    let worst_ratio = kr.worst.map_or(0.0, |w| w.log_ratio.exp());
    report.check(
        "krasikov",
        kr.holds,
        worst_ratio,
        Some(1.0),
        format!(
            "normalized form with constant {}: worst lhs/rhs = {worst_ratio:.4e} over {} points, n ≤ {}, α ≤ {alpha_max}",
            kr.constant,
            kr.checked,
            n_max.max(1)
        ),
    );
    if !kr.unnormalized_holds {
        report.note("the inequality without the n!/(n+α)! factor fails on this grid (recorded only)");
    }
    report.data("radial", &radial)?;
    report.data("krasikov", &kr)?;
    Ok(report)
}

fn wigner(n_max: usize, states: usize, seed: u64, tol: &Tolerances) -> Result<Report> {
    let mut report = Report::new("verify wigner");
    report.data("n_max", n_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (2.0 * n_max as f64 + 1.0).sqrt().max(5.0) + 7.0;
    let ax = axis(-half.ceil(), half.ceil(), 1.0 / 16.0)?;

    let mut marginal_err = 0.0f64;
    let mut ratios = Vec::with_capacity(states);
    for _ in 0..states {
        let alpha = random_state(&mut rng, n_max, false)?;
        let grid = wigner_of_density(&DensityMatrix::pure(&alpha)?, &ax, &ax)?;
        ratios.push(tilde_rescale(&grid)?.l2_norm_sqr()? / alpha.norm_sqr().powi(2));
        let m = marginals(&grid)?;
        let f = synthesize(&alpha, &ax)?;
        let ff = synthesize(&fourier_in_coefficients(&alpha), &ax)?;
        for k in 0..ax.len() {
            marginal_err = marginal_err.max((m.q_marginal[k] - f[k].norm_sqr()).abs());
            marginal_err = marginal_err.max((m.p_marginal[k] - ff[k].norm_sqr()).abs());
        }
    }
    report.within(
        "marginals",
        marginal_err,
        tol.marginal,
        format!("sup |∫Φ dp − |f|²|, |∫Φ dq − |Ff|²| = {marginal_err:.3e} over {states} states"),
    );
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let spread = (hi - lo) / lo;
    report.within(
        "isometry_ratio",
        spread,
        tol.isometry,
        format!("∬|Φ̃|² / ‖α‖⁴ ∈ [{lo:.12}, {hi:.12}], relative spread {spread:.3e}; 1/(4π) = {:.12}", 0.25 / PI),
    );

    let amb_max = (n_max / 2).clamp(1, 6);
    let amb_ax = axis(-10.0, 10.0, 1.0 / 16.0)?;
    let theta = axis(-8.0, 8.0, 0.5)?;
    let mut amb_err = 0.0f64;
    for _ in 0..5 {
        let alpha = random_state(&mut rng, amb_max, true)?;
        let grid = wigner_of_density(&DensityMatrix::pure(&alpha)?, &amb_ax, &amb_ax)?;
        let numeric = fourier_2d_numeric(&grid, &theta, &theta)?;
        let exact = ambiguity_of_coefficients(&alpha, &theta, &theta)?;
        for (a, b) in numeric.values().iter().zip(exact.values()) {
            amb_err = amb_err.max((a - b).norm());
        }
    }
    report.within(
        "ambiguity",
        amb_err,
        tol.ambiguity,
        format!("sup |A − F₂Φ| = {amb_err:.3e} over 5 states with n ≤ {amb_max}"),
    );

    let weights = [0.5, 0.3, 0.2];
    let mixture: Vec<CoefficientSequence> =
        (0..3).map(|_| random_state(&mut rng, n_max, true)).collect::<Result<_>>()?;
    let rho = DensityMatrix::explicit_from_fn(n_max, |m, n| {
        weights.iter().zip(&mixture).map(|(w, a)| a.get(m) * a.get(n).conj() * *w).sum()
    })?;
    let grid = wigner_of_density(&rho, &ax, &ax)?;
    report.within(
        "imaginary_residue",
        grid.imag_residue(),
        tol.imag,
        format!("max |Im Φ_ρ| = {:.3e} for a three-state mixture", grid.imag_residue()),
    );
    Ok(report)
}

fn tame(n_max: usize, weight: Option<&str>, tol: &Tolerances) -> Result<Report> {
    let mut report = Report::new("verify tame");
    report.data("n_max", n_max)?;
    let fixed = weight.map(io::parse_weight).transpose()?;
    report.note(match &fixed {
        Some(_) => "weight: as given by --weight for every member".to_string(),
        None => "weight: power(λ/16, β) for the member e^(−λ n^(β/2))".to_string(),
    });
    let rule = gauss_hermite_rule(n_max + 1)?;
    let half = ((2.0 * n_max as f64 + 1.0).sqrt() + 15.0).ceil();
    let xs = axis(-half, half, 1.0 / 16.0)?;
    let mut members = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        for beta in [0.5, 1.0, 1.5] {
            let tag = format!("λ={lambda},β={beta}");
            let alpha = CoefficientSequence::from_fn(n_max, |n| {
                Complex64::new((-lambda * (n as f64).powf(beta / 2.0)).exp(), 0.0)
            })?;
            let w = match &fixed {
                Some(w) => w.clone(),
                None => WeightFunction::power(lambda / 16.0, beta)?,
            };
            let f = TestFunction::from_coefficients(&alpha, &xs)?;
            let fwd = verify_forward_bound(&f, &w, &DEFAULT_CBAR_GRID, n_max, &rule)?;
            let bwd = verify_backward_bound(&alpha, &w, &DEFAULT_CBAR_GRID, &xs)?;
            for (name, r) in [("forward", &fwd), ("backward", &bwd)] {
                let detail = match (r.smallest_cbar, r.constant) {
                    (Some(c), Some(k)) => format!("C̄ = {c}, constant {k:.6}"),
                    _ => r.finding.clone().unwrap_or_default(),
                };
                report.check(
                    &format!("{name}[{tag}]"),
                    r.smallest_cbar.is_some_and(|c| c <= 8.0),
                    r.constant.unwrap_or(f64::INFINITY),
                    None,
                    detail,
                );
            }

            let samples = synthesize(&alpha, rule.nodes())?;
            let nodes = rule.nodes();
            let lookup = |x: f64| samples[nodes.partition_point(|&y| y < x).min(samples.len() - 1)];
            match fit_envelope(&analyze(lookup, n_max, &rule)?) {
                Ok(e) => {
                    let err = (e.lambda_hat - lambda).abs().max((e.beta_hat - beta).abs());
                    report.within(
                        &format!("round_trip_fit[{tag}]"),
                        err,
                        tol.fit,
                        format!("(λ̂, β̂) = ({:.6}, {:.6})", e.lambda_hat, e.beta_hat),
                    );
                }
                Err(e) => report.check(&format!("round_trip_fit[{tag}]"), false, f64::INFINITY, Some(tol.fit), e.to_string()),
            }

            let cbar = DEFAULT_CBAR_GRID[DEFAULT_CBAR_GRID.len() - 1];
            let tail = match tail_sum_check(&w, cbar, &[10.0, 100.0, 1000.0]) {
                Ok(t) => {
                    report.check(
                        &format!("tail_sum[{tag}]"),
                        t.holds,
                        t.constant,
                        None,
                        format!("Σ_(n≥y) e^(−C̄ω(√n)) ≤ C e^(−C̄ω(√y)/2) with C̄ = {cbar}: C = {:.6}", t.constant),
                    );
                    Some(t)
                }
                Err(Error::Data(reason)) => {
                    report.note(format!("tail_sum[{tag}] not computed by direct summation: {reason}"));
                    None
                }
                Err(e) => return Err(e.into()),
            };
            match moment_bound_check(&f, &w, 10) {
                Ok(m) => report.check(
                    &format!("moments[{tag}]"),
                    m.within_reference,
                    m.constant,
                    Some(m.reference_constant),
                    format!("‖x^ν f‖ ≤ C e^(Ω*(ν+1)) ‖f‖_ω for ν ≤ 10 with C = {:.6}", m.constant),
                ),
                Err(e) => report.check(&format!("moments[{tag}]"), false, f64::INFINITY, None, e.to_string()),
            }
            members.push(serde_json::json!({
                "lambda": lambda, "beta": beta, "forward": fwd, "backward": bwd, "tail_sum": tail,
            }));
        }
    }
    report.data("members", members)?;
    Ok(report)
}

/// The alternating-sign experiment with its five checks.
pub fn counterexample_report(command: &str, n_max: usize, grid: &AxisSpec, tol: &Tolerances) -> Result<Report> {
    let rep = decay_vs_wigner_experiment(n_max, &grid.points())?;
    let mut report = Report::new(command);
    let inner: Vec<(f64, f64)> =
        rep.series_deviation.iter().copied().filter(|(r, _)| *r <= SERIES_RADIUS).collect();
    let (worst_r, worst_dev) = inner.iter().copied().fold((0.0, 0.0f64), |a, b| if b.1.abs() > a.1.abs() { b } else { a });
    report.within(
        "series",
        worst_dev.abs(),
        tol.series,
        format!("truncated series (M = {n_max}) against the closed form, r ≤ {SERIES_RADIUS}: max deviation {:.3e} at r = {worst_r}", worst_dev.abs()),
    );
    report.check(
        "bound",
        rep.bound_holds,
        rep.bound_max_excess,
        Some(0.0),
        format!("Φ_ρ(r) ≤ e^(−r²)/π: max excess {:.3e}", rep.bound_max_excess),
    );
    report.check("positivity", rep.all_positive, f64::NAN, None, "Φ_ρ > 0 at every sampled radius");
    let (algebraic, fit_detail) = match &rep.diagonal_fit {
        DiagonalFit::Fitted { envelope } => {
            (false, format!("fitted e^(−{:.4} n^({:.4}/2))", envelope.lambda_hat, envelope.beta_hat))
        }
        DiagonalFit::Degenerate { reason } => (true, format!("no exponential-type envelope: {reason}")),
        DiagonalFit::InsufficientSupport { usable } => (true, format!("only {usable} usable indices")),
    };
    report.check("diagonal_non_exponential", algebraic, f64::NAN, None, fit_detail);
    let g = &rep.gaussian_fit;
    report.within(
        "gaussian_slope",
        (g.slope + 1.0).abs(),
        tol.slope,
        format!("slope of ln Φ_ρ against r² on [{}, {}] = {:.6} ({} points)", g.r_min, g.r_max, g.slope, g.points),
    );
    report.data("experiment", &rep)?;
    Ok(report)
}
