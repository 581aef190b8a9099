use std::io::Write;
use std::path::PathBuf;

use fourier_ratio::approx::{
    approximate, rate_distortion_encode, spectral_truncation, ApproxConfig, ApproxNorm,
};
use fourier_ratio::constants::{estimate_constants_with, ConstantConfig, GenericSampler};
use fourier_ratio::fr::FrReport;
use fourier_ratio::noise::{
    add_complex_gaussian, averaging_experiment, fr_of_average_experiment,
    gaussian_deviation_experiment, perturbation_bound,
};
use fourier_ratio::norms::lp_norm;
use fourier_ratio::recover::{
    certified_bounds, impute, recovery_sweep, restriction_coverage, sparse_spectrum_signal,
    unimodular_signal, RecoverySweepConfig, SolverConfig,
};
use fourier_ratio::{dft, Complex};
use serde_json::json;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::output::{to_value, Cell, Emitter, Output, Table};
use crate::series::{read_series, Detrend, SeriesArgs};

pub struct Context<'a> {
    pub emitter: Emitter,
    pub seed: u64,
    pub stdout: &'a mut dyn Write,
}

impl Context<'_> {
    fn emit(&mut self, out: Output<'_>) -> CliResult<Vec<PathBuf>> {
        self.emitter.emit(&out, self.stdout)
    }
}

fn solver_config(args: &SolverArgs) -> SolverConfig {
    SolverConfig {
        tol: args.solver_tol,
        max_iters: args.max_iters,
        ..SolverConfig::default()
    }
}

fn plain_series(path: PathBuf) -> SeriesArgs {
    SeriesArgs {
        input: path,
        column: None,
        imag_column: None,
        no_header: false,
        detrend: Detrend::None,
    }
}

pub fn analyze(ctx: &mut Context<'_>, args: &AnalyzeArgs) -> CliResult<()> {
    let series = read_series(&args.series, None, false)?;
    let f = series.signal()?;
    let report = FrReport::analyze(&f)?;
    let mut value = json!({ "preprocessing": series.preprocessing, "measures": report });
    let mut tables = vec![];
    if let Some(eta) = args.large_spectrum {
        let gamma = fourier_ratio::approx::large_spectrum(&f, eta)?;
        let spectrum = dft(&f)?;
        let mut table = Table::new("large_spectrum", &["frequency", "re", "im", "modulus"]);
        for m in gamma.iter() {
            let z = spectrum.values()[m];
            table.push(vec![m.into(), z.re.into(), z.im.into(), z.norm().into()]);
        }
        value["large_spectrum"] = json!({ "eta": eta, "frequencies": gamma.members() });
        tables.push(table);
    }
    ctx.emit(Output {
        command: "analyze",
        seed: None,
        config: to_value(args),
        report: value,
        tables,
    })?;
    Ok(())
}

pub fn approx(ctx: &mut Context<'_>, args: &ApproxArgs) -> CliResult<()> {
    let series = read_series(&args.series, None, false)?;
    let f = series.signal()?;
    let f_l2 = lp_norm(&f, 2.0)?;
    let (poly, mut report, success) = match args.mode {
        ApproxMode::Truncate => {
            let t = spectral_truncation(&f, args.eta)?;
            let report = json!({
                "mode": "truncate",
                "degree": t.poly.degree(),
                "large_spectrum": t.large_spectrum.members(),
                "error": t.error,
                "bound": t.bound,
            });
            (t.poly, report, true)
        }
        mode => {
            let norm = match mode {
                ApproxMode::L2 => ApproxNorm::L2,
                ApproxMode::Linf => ApproxNorm::Linf,
                _ => ApproxNorm::L1,
            };
            let cfg = ApproxConfig {
                max_attempts: args.max_attempts,
                ..ApproxConfig::default()
            };
            let out = approximate(&f, norm, args.eta, ctx.seed, &cfg)?;
            let report = json!({
                "mode": norm.to_string(),
                "k": out.k,
                "threshold": out.threshold,
                "degree": out.poly.degree(),
                "error_ratio": out.error_ratio,
                "attempts": out.attempts,
                "success": out.success,
            });
            (out.poly, report, out.success)
        }
    };
    report["preprocessing"] = to_value(&series.preprocessing);
    report["terms"] = json!(poly
        .canonicalize()
        .terms()
        .iter()
        .map(|(m, c)| json!([m, c.re, c.im]))
        .collect::<Vec<_>>());
    if args.encode && args.eta > 0.0 && args.eta < 1.0 && poly.term_count() > 0 {
        let rd = rate_distortion_encode(&poly, f_l2, args.eta)?;
        report["encoding"] = json!({
            "m_bits": rd.m_bits,
            "bit_length": rd.bit_length,
            "byte_length": rd.byte_length,
            "rate_shape": rd.rate_shape,
            "distortion": rd.distortion,
            "budget": rd.budget,
        });
    }
    let recon = poly.eval()?;
    let mut table = Table::new(
        "reconstruction",
        &[
            "index",
            "original",
            "reconstruction",
            "residual",
            "original_im",
            "reconstruction_im",
            "residual_im",
        ],
    );
    for (i, (a, b)) in f.values().iter().zip(recon.values()).enumerate() {
        let r = a - b;
        table.push(vec![
            i.into(),
            a.re.into(),
            b.re.into(),
            r.re.into(),
            a.im.into(),
            b.im.into(),
            r.im.into(),
        ]);
    }
    ctx.emit(Output {
        command: "approx",
        seed: Some(ctx.seed),
        config: to_value(args),
        report,
        tables: vec![table],
    })?;
    if success {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "no approximant reached η = {} in {} attempts",
            args.eta, args.max_attempts
        )))
    }
}

pub fn impute_cmd(ctx: &mut Context<'_>, args: &ImputeArgs) -> CliResult<()> {
    let series = read_series(&args.series, args.observed_column.as_deref(), true)?;
    let (observed, mask) = series.observed()?;
    if mask.is_empty() {
        return Err(CliError::Input("no observed values".into()));
    }
    if !(args.eta >= 0.0) || !args.eta.is_finite() {
        return Err(CliError::Usage(format!(
            "--eta must be finite and >= 0, got {}",
            args.eta
        )));
    }
    let bounds = (args.eta > 0.0)
        .then(|| certified_bounds(&observed, &mask, args.eta, args.reference_l2))
        .transpose()?;
    let eta_abs = bounds.map_or(0.0, |b| b.eta_leakage_free);
    let result = impute(&observed, &mask, eta_abs, &solver_config(&args.solver))?;
    let x_l2 = lp_norm(&result.x_star, 2.0)?;
    let report = json!({
        "preprocessing": series.preprocessing,
        "domain_size": observed.domain_size(),
        "observed": mask.len(),
        "eta_relative": args.eta,
        "eta_absolute": eta_abs,
        "objective": result.objective,
        "constraint_residual": result.constraint_residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "splitting_gap": result.splitting_gap,
        "bounds": {
            "leakage_free": bounds.map(|b| b.leakage_free),
            "oracle": bounds.and_then(|b| b.oracle),
            // ‖x*‖₂ stands in for the unknown ‖f‖₂.
            "oracle_plugin": bounds.map(|_| fourier_ratio::recover::RECOVERY_CONSTANT * args.eta * x_l2),
        },
    });
    let mut table = Table::new(
        "imputed",
        &["index", "imputed_re", "imputed_im", "was_observed"],
    );
    for (i, z) in result.x_star.values().iter().enumerate() {
        let obs = mask.contains(i);
        // Exact agreement on observed rows is the constraint; print the
        // observed value itself rather than the solver's approximation.
        let z = if obs && args.eta == 0.0 {
            series.values[i].unwrap_or(*z)
        } else {
            *z
        };
        table.push(vec![i.into(), z.re.into(), z.im.into(), obs.into()]);
    }
    ctx.emit(Output {
        command: "impute",
        seed: None,
        config: to_value(args),
        report,
        tables: vec![table],
    })?;
    if result.converged {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "solver did not converge in {} iterations",
            result.iterations
        )))
    }
}

pub fn sweep(ctx: &mut Context<'_>, args: &SweepArgs) -> CliResult<()> {
    let cfg = RecoverySweepConfig {
        domain_size: args.domain_size,
        sparsity: args.sparsity,
        q_values: args.q.clone(),
        trials: args.trials,
        eps: args.eta,
        success_tol: args.success_tol,
        seed: ctx.seed,
        solver: solver_config(&args.solver),
    };
    let sweep = recovery_sweep(&cfg)?;
    let mut table = Table::new(
        "phase",
        &[
            "q",
            "trials",
            "successes",
            "success_rate",
            "converged",
            "mean_distinct_samples",
            "median_relative_error",
            "bound_violations",
        ],
    );
    for p in &sweep.points {
        table.push(vec![
            p.q.into(),
            p.trials.into(),
            p.successes.into(),
            p.success_rate.into(),
            p.converged.into(),
            p.mean_distinct_samples.into(),
            p.median_relative_error.into(),
            p.bound_violations.into(),
        ]);
    }
    let report = json!({ "q_shape": sweep.q_shape, "points": sweep.points });
    ctx.emit(Output {
        command: "sweep",
        seed: Some(ctx.seed),
        config: to_value(args),
        report,
        tables: vec![table],
    })?;
    Ok(())
}

pub fn restrict(ctx: &mut Context<'_>, args: &RestrictArgs) -> CliResult<()> {
    let f = match &args.input {
        Some(path) => read_series(&plain_series(path.clone()), None, false)?.signal()?,
        None => unimodular_signal(
            args.domain_size,
            fourier_ratio::seed::child_seed(ctx.seed, &[u64::MAX]),
        )?,
    };
    let cov = restriction_coverage(&f, args.p, args.eps, args.u, args.trials, ctx.seed)?;
    let mut report = to_value(&cov);
    report["fr_within_allowance"] = json!(cov.fr_within_allowance());
    report["l2_within_allowance"] = json!(cov.l2_within_allowance());
    ctx.emit(Output {
        command: "restrict",
        seed: Some(ctx.seed),
        config: to_value(args),
        report,
        tables: vec![],
    })?;
    Ok(())
}

pub fn constants(ctx: &mut Context<'_>, args: &ConstantsArgs) -> CliResult<()> {
    let cfg = ConstantConfig {
        n_grid: args.n_grid.clone(),
        q_grid: args.q_grid.clone(),
        trials: args.trials,
        percentile: args.percentile,
        seed: ctx.seed,
        sampler: match args.sampler {
            SamplerArg::Fixed => GenericSampler::FixedSize,
            SamplerArg::Bernoulli => GenericSampler::Bernoulli,
        },
    };
    let est = estimate_constants_with(&cfg)?;
    let mut long = Table::new(
        "cells",
        &[
            "N",
            "q",
            "ct",
            "cq",
            "cq_exp",
            "holder_violations",
            "mean_set_size",
        ],
    );
    for (i, &n) in est.n_grid.iter().enumerate() {
        for (j, &q) in est.q_grid.iter().enumerate() {
            long.push(vec![
                n.into(),
                q.into(),
                est.ct_estimates[i][j].into(),
                est.cq_estimates[i][j].into(),
                est.cq_exp_estimates[i][j].into(),
                est.holder_violations[i][j].into(),
                est.mean_set_sizes[i][j].into(),
            ]);
        }
    }
    let heat = |name: &str, m: &[Vec<f64>]| {
        let mut headers = vec!["N".to_string()];
        headers.extend(est.q_grid.iter().map(|q| format!("q={q}")));
        let mut t = Table {
            name: name.to_string(),
            headers,
            rows: vec![],
        };
        for (i, &n) in est.n_grid.iter().enumerate() {
            let mut row: Vec<Cell> = vec![n.into()];
            row.extend(m[i].iter().map(|&v| Cell::from(v)));
            t.push(row);
        }
        t
    };
    let tables = vec![
        long,
        heat("ct", &est.ct_estimates),
        heat("cq", &est.cq_estimates),
        heat("cq_exp", &est.cq_exp_estimates),
    ];
    let mut report = to_value(&est);
    report["ct_below_cq_exp"] = json!(est.ct_below_cq_exp());
    ctx.emit(Output {
        command: "constants",
        seed: Some(ctx.seed),
        config: to_value(args),
        report,
        tables,
    })?;
    if est.total_holder_violations() > 0 {
        return Err(CliError::Numerical(format!(
            "{} Hölder-chain violations",
            est.total_holder_violations()
        )));
    }
    Ok(())
}

pub fn noise(ctx: &mut Context<'_>, args: &NoiseArgs) -> CliResult<()> {
    let f = match &args.input {
        Some(path) => read_series(&plain_series(path.clone()), None, false)?.signal()?,
        None => sparse_spectrum_signal(
            args.domain_size,
            args.sparsity,
            fourier_ratio::seed::child_seed(ctx.seed, &[u64::MAX]),
        )?
        .scaled(Complex::new(args.amplitude, 0.0)),
    };
    let seed = ctx.seed;
    let report = match args.experiment {
        NoiseExperiment::Perturb => {
            let noisy = add_complex_gaussian(&f, args.sigma, seed)?;
            to_value(&perturbation_bound(&f, &noisy.sub(&f)?)?)
        }
        NoiseExperiment::Gaussian => to_value(&gaussian_deviation_experiment(
            &f,
            args.sigma,
            args.gamma,
            args.trials,
            seed,
        )?),
        NoiseExperiment::Average => {
            let reports = args
                .copies
                .iter()
                .map(|&n| averaging_experiment(&f, args.sigma, n, args.gamma, args.trials, seed))
                .collect::<Result<Vec<_>, _>>()?;
            json!({ "points": reports })
        }
        NoiseExperiment::FrAverage => to_value(&fr_of_average_experiment(
            &f,
            args.sigma,
            &args.copies,
            args.gamma,
            args.trials,
            seed,
        )?),
    };
    ctx.emit(Output {
        command: "noise",
        seed: Some(seed),
        config: to_value(args),
        report,
        tables: vec![],
    })?;
    Ok(())
}
