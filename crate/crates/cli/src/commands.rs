use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use shadowcal::domain::{LinkConstants, ShadowedPathLossModel, SigmaModel, SigmaPolynomial};
use shadowcal::estimation::{
    calibrate as run_calibration, fit_path_loss, fit_sigma_polynomial, prr_correlations,
    CalibrationOptions, InterceptMode, SigmaFit, SigmaTarget,
};
use shadowcal::io::{
    all_datasets, embedded_dataset, model_from_json, model_to_json, save_stats_csv,
    save_survey_csv, DatasetRecord, FORMAT_VERSION,
};
use shadowcal::localization::{confidence_interval, max_range, z_for_outage};
use shadowcal::simulation::{simulate_survey, SimulationSpec};

use crate::source::{resolve, Source};
use crate::{Format, Intercept, RegressionArgs, Target};

/// Published exponents further than this from the computed one get a note.
const ETA_NOTE_THRESHOLD: f64 = 0.05;

/// Everything a command produces. Nothing is written until the command has
/// fully succeeded, so a failure never leaves half a document behind.
pub struct Outcome {
    stdout: String,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outcome {
    fn stdout(stdout: String) -> Self {
        Self {
            stdout,
            files: Vec::new(),
        }
    }

    fn with_file(mut self, path: Option<PathBuf>, bytes: Vec<u8>) -> Self {
        if let Some(path) = path {
            self.files.push((path, bytes));
        }
        self
    }

    pub fn commit(self) -> Result<()> {
        for (path, bytes) in &self.files {
            std::fs::write(path, bytes)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        let mut out = std::io::stdout().lock();
        out.write_all(self.stdout.as_bytes())?;
        out.flush()?;
        Ok(())
    }
}

fn document(command: &str, body: Value) -> String {
    let mut doc = json!({ "format_version": FORMAT_VERSION, "command": command });
    if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
        doc.extend(body);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

fn intercept_mode(i: Intercept) -> InterceptMode {
    match i {
        Intercept::Free => InterceptMode::Free,
        Intercept::Anchored => InterceptMode::Anchored,
    }
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::SampleSd => "sample-sd",
        Target::ResidualY => "residual-y",
    }
}

fn load_model(path: &Path) -> Result<ShadowedPathLossModel> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read model file {}", path.display()))?;
    model_from_json(&bytes).with_context(|| format!("in {}", path.display()))
}

fn curve_csv(d: &[f64], fitted: &[f64], observed: &[f64]) -> Vec<u8> {
    let mut s = String::from("distance_m,fitted,observed\n");
    for i in 0..d.len() {
        let _ = writeln!(s, "{},{},{}", d[i], fitted[i], observed[i]);
    }
    s.into_bytes()
}

fn discrepancy_note(source: &Source, eta: f64) -> Option<String> {
    let published = source.dataset.as_ref()?.published?;
    if (eta - published.eta).abs() <= ETA_NOTE_THRESHOLD {
        return None;
    }
    Some(format!(
        "NOTE: least squares on the tabulated means gives eta = {eta:.4}, the published \
         exponent is {:.4} (difference {:+.4}); the published fit used a procedure or \
         subset that the table alone does not reproduce",
        published.eta,
        eta - published.eta
    ))
}

pub fn fit(
    fmt: Format,
    source_arg: &str,
    reg: &RegressionArgs,
    compare: bool,
    emit_curve: Option<PathBuf>,
) -> Result<Outcome> {
    let source = resolve(source_arg)?;
    let mode = intercept_mode(reg.intercept);
    let (_, r) = fit_path_loss(&source.stats, reg.d0, mode)?;
    let note = discrepancy_note(&source, r.eta);
    let published = source
        .dataset
        .as_ref()
        .and_then(|d| d.published)
        .filter(|_| compare);

    let stdout = match fmt {
        Format::Json => {
            let rows: Vec<Value> = (0..r.distances.len())
                .map(|i| {
                    json!({
                        "distance_m": r.distances[i],
                        "observed_dbm": r.observed[i],
                        "fitted_dbm": r.fitted[i],
                        "residual_db": r.residuals[i],
                        "y": r.y_values[i],
                    })
                })
                .collect();
            document(
                "fit",
                json!({
                    "source": source.label,
                    "d0_m": r.d0,
                    "intercept_mode": mode.as_str(),
                    "eta": r.eta,
                    "rss_d0_dbm": r.rss_d0,
                    "r2": r.r2,
                    "rmse_db": r.rmse,
                    "rmse_unadjusted_db": r.rmse_unadjusted,
                    "condition_estimate": r.diagnostics.condition_estimate,
                    "residuals": rows,
                    "published": published.map(|p| json!({ "eta": p.eta })),
                    "note": note,
                }),
            )
        }
        Format::Csv => {
            let mut s = String::from("distance_m,observed_dbm,fitted_dbm,residual_db,y\n");
            for i in 0..r.distances.len() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.distances[i], r.observed[i], r.fitted[i], r.residuals[i], r.y_values[i]
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "source        {} ({} distances)",
                source.label,
                r.distances.len()
            );
            let _ = writeln!(s, "intercept     {} (d0 = {} m)", mode.as_str(), r.d0);
            let _ = writeln!(s, "eta           {:.6}", r.eta);
            if let Some(p) = published {
                let _ = writeln!(
                    s,
                    "eta published {:.4} (difference {:+.4})",
                    p.eta,
                    r.eta - p.eta
                );
            }
            let _ = writeln!(s, "rss_d0        {:.4} dBm", r.rss_d0);
            let _ = writeln!(s, "r2            {:.6}", r.r2);
            let _ = writeln!(s, "rmse          {:.6} dB", r.rmse);
            if let Some(n) = &note {
                let _ = writeln!(s, "{n}");
            }
            let _ = writeln!(s);
            let _ = writeln!(
                s,
                "{:>10} {:>12} {:>12} {:>12} {:>10}",
                "distance_m", "observed_dbm", "fitted_dbm", "residual_db", "y"
            );
            for i in 0..r.distances.len() {
                let _ = writeln!(
                    s,
                    "{:>10} {:>12.4} {:>12.4} {:>12.4} {:>10.4}",
                    r.distances[i], r.observed[i], r.fitted[i], r.residuals[i], r.y_values[i]
                );
            }
            s
        }
    };
    let curve = curve_csv(&r.distances, &r.fitted, &r.observed);
    Ok(Outcome::stdout(stdout).with_file(emit_curve, curve))
}

fn sigma_target(source: &Source, target: Target, reg: &RegressionArgs) -> Result<SigmaTarget> {
    Ok(match target {
        Target::SampleSd => SigmaTarget::SampleSd,
        Target::ResidualY => {
            let (model, _) = fit_path_loss(&source.stats, reg.d0, intercept_mode(reg.intercept))?;
            SigmaTarget::ResidualY(model)
        }
    })
}

fn sigma_text(s: &mut String, fit: &SigmaFit) {
    let names = ["a", "b", "c", "e", "f"];
    for (name, c) in names.iter().zip(fit.polynomial.coefficients()) {
        let _ = writeln!(s, "{name}             {c:.6e}");
    }
    let _ = writeln!(s, "r2            {:.6}", fit.goodness.r2);
    let _ = writeln!(
        s,
        "rmse          {:.6} dB (dfe {})",
        fit.goodness.rmse, fit.goodness.dfe
    );
    let _ = writeln!(s, "stationarity  max |sum| {:.3e}", fit.max_stationarity());
    let d = &fit.diagnostics;
    let _ = writeln!(
        s,
        "condition     {:.3e} ({}, {} refinement steps)",
        d.condition_estimate,
        if d.scaled {
            "scaled distances"
        } else {
            "raw distances"
        },
        d.refinement_steps
    );
}

pub fn sigma_fit(
    fmt: Format,
    source_arg: &str,
    target: Target,
    reg: &RegressionArgs,
    compare: bool,
    emit_curve: Option<PathBuf>,
) -> Result<Outcome> {
    let source = resolve(source_arg)?;
    let fit = fit_sigma_polynomial(&source.stats, sigma_target(&source, target, reg)?)?;
    let prr = if source.stats.iter().all(|s| s.prr.is_some()) {
        prr_correlations(&source.stats).ok()
    } else {
        None
    };
    let published = source
        .dataset
        .as_ref()
        .and_then(|d| d.published)
        .filter(|_| compare);
    let [a, b, c, e, f] = fit.polynomial.coefficients();

    let stdout = match fmt {
        Format::Json => document(
            "sigma-fit",
            json!({
                "source": source.label,
                "target": target_name(target),
                "coefficients": { "a": a, "b": b, "c": c, "e": e, "f": f },
                "d_min_m": fit.polynomial.d_min(),
                "d_max_m": fit.polynomial.d_max(),
                "r2": fit.goodness.r2,
                "rmse_db": fit.goodness.rmse,
                "rmse_unadjusted_db": fit.goodness.rmse_unadjusted(),
                "dfe": fit.goodness.dfe,
                "stationarity": fit.stationarity,
                "max_stationarity": fit.max_stationarity(),
                "condition_estimate": fit.diagnostics.condition_estimate,
                "scaled": fit.diagnostics.scaled,
                "refinement_steps": fit.diagnostics.refinement_steps,
                "prr_correlation": prr.map(|p| json!({
                    "prr_sd": p.prr_sd, "prr_mean": p.prr_mean, "rows": p.rows_used,
                })),
                "published": published.map(|p| {
                    let [a, b, c, e, f] = p.sigma_coeffs;
                    json!({
                        "coefficients": { "a": a, "b": b, "c": c, "e": e, "f": f },
                        "r2": p.r2,
                        "rmse_db": p.rmse,
                    })
                }),
            }),
        ),
        Format::Csv => {
            let mut s = String::from("distance_m,observed_db,fitted_db\n");
            for i in 0..fit.distances.len() {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    fit.distances[i], fit.observed[i], fit.fitted[i]
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "source        {} ({} distances)",
                source.label,
                fit.distances.len()
            );
            let _ = writeln!(s, "target        {}", target_name(target));
            sigma_text(&mut s, &fit);
            if let Some(p) = published {
                let _ = writeln!(s);
                let _ = writeln!(s, "published     {:?}", p.sigma_coeffs);
                let _ = writeln!(
                    s,
                    "published r2  {} (difference {:+.4})",
                    p.r2,
                    fit.goodness.r2 - p.r2
                );
                let _ = writeln!(
                    s,
                    "published rmse {} (difference {:+.4})",
                    p.rmse,
                    fit.goodness.rmse - p.rmse
                );
                let reference = SigmaPolynomial::new(
                    p.sigma_coeffs,
                    fit.polynomial.d_min(),
                    fit.polynomial.d_max(),
                )?;
                let gap = fit
                    .distances
                    .iter()
                    .map(|&d| {
                        (fit.polynomial.eval_unclamped(d) - reference.eval_unclamped(d)).abs()
                    })
                    .fold(0.0, f64::max);
                let _ = writeln!(
                    s,
                    "curve gap     {gap:.4} dB max over the surveyed distances"
                );
            }
            if let Some(p) = prr {
                let _ = writeln!(
                    s,
                    "prr corr      with sd {:.4}, with mean {:.4} ({} rows)",
                    p.prr_sd, p.prr_mean, p.rows_used
                );
            }
            s
        }
    };
    let curve = curve_csv(&fit.distances, &fit.fitted, &fit.observed);
    Ok(Outcome::stdout(stdout).with_file(emit_curve, curve))
}

pub fn calibrate(
    fmt: Format,
    source_arg: &str,
    target: Target,
    reg: &RegressionArgs,
    output: Option<PathBuf>,
) -> Result<Outcome> {
    let source = resolve(source_arg)?;
    let options = CalibrationOptions {
        d0: reg.d0,
        intercept_mode: intercept_mode(reg.intercept),
        sigma_from_residuals: target == Target::ResidualY,
    };
    let cal = run_calibration(&source.stats, &options)?;
    let model_doc = model_to_json(&cal.model);
    let stdout = match (fmt, &output) {
        (Format::Csv, _) => bail!("calibrate has no csv output; use --format text or json"),
        (Format::Json, _) => document(
            "calibrate",
            json!({
                "source": source.label,
                "model": serde_json::from_slice::<Value>(&model_doc)?,
                "path_r2": cal.path.r2,
                "sigma_r2": cal.sigma.goodness.r2,
                "sigma_rmse_db": cal.sigma.goodness.rmse,
                "output": output.as_ref().map(|p| p.display().to_string()),
            }),
        ),
        (Format::Text, None) => String::from_utf8(model_doc.clone())?,
        (Format::Text, Some(path)) => {
            let mut s = String::new();
            let _ = writeln!(s, "source        {}", source.label);
            let _ = writeln!(s, "eta           {:.6}", cal.model.eta());
            let _ = writeln!(
                s,
                "rss_d0        {:.4} dBm at d0 = {} m",
                cal.model.rss_d0(),
                cal.model.d0()
            );
            let _ = writeln!(s, "path r2       {:.6}", cal.path.r2);
            sigma_text(&mut s, &cal.sigma);
            let _ = writeln!(s, "model written to {}", path.display());
            s
        }
    };
    Ok(Outcome::stdout(stdout).with_file(output, model_doc))
}

pub fn predict(fmt: Format, model_path: &Path, distances: &[f64]) -> Result<Outcome> {
    let model = load_model(model_path)?;
    let mut rows = Vec::with_capacity(distances.len());
    for &d in distances {
        let mean = model.predict_mean_rss(d)?;
        let sigma = model.sigma_at(d)?;
        rows.push((d, mean, sigma));
    }
    let stdout = match fmt {
        Format::Json => document(
            "predict",
            json!({
                "predictions": rows.iter().map(|(d, m, s)| json!({
                    "distance_m": d,
                    "mean_rss_dbm": m,
                    "sigma_db": s.value,
                    "sigma_clamped": s.clamped,
                })).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut s = String::from("distance_m,mean_rss_dbm,sigma_db,sigma_clamped\n");
            for (d, m, sg) in &rows {
                let _ = writeln!(s, "{d},{m},{},{}", sg.value, sg.clamped);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (d, m, sg) in &rows {
                let _ = write!(
                    s,
                    "d = {d} m: mean RSS {m:.4} dBm, sigma {:.4} dB",
                    sg.value
                );
                if sg.clamped {
                    s.push_str(" (sigma clamped to calibrated range)");
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::stdout(stdout))
}

pub fn localize(fmt: Format, model_path: &Path, rss: f64, level: f64) -> Result<Outcome> {
    let model = load_model(model_path)?;
    let est = confidence_interval(&model, rss, level)?;
    let warning = est
        .clamped
        .then(|| "WARNING: estimate lies outside the distances sigma was calibrated on".to_owned());
    let stdout = match fmt {
        Format::Json => document(
            "localize",
            json!({
                "rss_dbm": rss,
                "level": est.level,
                "z": est.z,
                "d_hat_m": est.d_hat,
                "d_lo_m": est.d_lo,
                "d_hi_m": est.d_hi,
                "sigma_db": est.sigma_used,
                "sigma_clamped": est.clamped,
            }),
        ),
        Format::Csv => format!(
            "rss_dbm,level,z,d_hat_m,d_lo_m,d_hi_m,sigma_db,sigma_clamped\n{rss},{},{},{},{},{},{},{}\n",
            est.level, est.z, est.d_hat, est.d_lo, est.d_hi, est.sigma_used, est.clamped
        ),
        Format::Text => {
            let mut s = format!(
                "d_hat {:.4} m, {}% interval [{:.4}, {:.4}] m (z = {:.4}, sigma {:.4} dB)\n",
                est.d_hat,
                est.level * 100.0,
                est.d_lo,
                est.d_hi,
                est.z,
                est.sigma_used
            );
            if let Some(w) = warning {
                let _ = writeln!(s, "{w}");
            }
            s
        }
    };
    Ok(Outcome::stdout(stdout))
}

fn reference_ranges() -> Vec<(&'static str, f64, f64)> {
    all_datasets()
        .into_iter()
        .filter_map(|d| d.range_test.map(|r| (d.name, r.min_m, r.max_m)))
        .collect()
}

pub fn plan(
    fmt: Format,
    model_path: &Path,
    sensitivity: f64,
    z: f64,
    outage: Option<f64>,
) -> Result<Outcome> {
    let model = load_model(model_path)?;
    let z = match outage {
        Some(p) => z_for_outage(p)?,
        None => z,
    };
    let plan = max_range(&model, &LinkConstants::new(sensitivity)?, z)?;
    let warning = plan.extrapolated.then(|| {
        format!(
            "WARNING: range {:.2} m extrapolates past the {} m over which sigma was calibrated",
            plan.max_range,
            model.sigma().valid_up_to().unwrap_or(f64::NAN)
        )
    });
    let refs = reference_ranges();
    let stdout = match fmt {
        Format::Json => document(
            "plan",
            json!({
                "sensitivity_dbm": plan.sensitivity,
                "z": plan.outage_z,
                "outage": outage,
                "max_range_m": plan.max_range,
                "margin_db": plan.margin_db,
                "sigma_clamped": plan.sigma_clamped,
                "extrapolated": plan.extrapolated,
                "warnings": warning.iter().collect::<Vec<_>>(),
                "reference_range_tests": refs.iter().map(|(n, lo, hi)| json!({
                    "dataset": n, "min_m": lo, "max_m": hi,
                })).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => format!(
            "sensitivity_dbm,z,max_range_m,margin_db,sigma_clamped,extrapolated\n{},{},{},{},{},{}\n",
            plan.sensitivity, plan.outage_z, plan.max_range, plan.margin_db, plan.sigma_clamped, plan.extrapolated
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "max range     {:.4} m", plan.max_range);
            let _ = writeln!(s, "sensitivity   {} dBm", plan.sensitivity);
            let _ = writeln!(s, "fade margin   {:.4} dB (z = {:.4})", plan.margin_db, plan.outage_z);
            if let Some(w) = &warning {
                let _ = writeln!(s, "{w}");
            }
            let _ = writeln!(s);
            let _ = writeln!(s, "measured range tests (reference only, not model predictions):");
            for (n, lo, hi) in &refs {
                let _ = writeln!(s, "  {n:<18} {lo}-{hi} m");
            }
            s
        }
    };
    Ok(Outcome::stdout(stdout))
}

pub struct SimulateArgs {
    pub model: Option<PathBuf>,
    pub eta: Option<f64>,
    pub rss_d0: Option<f64>,
    pub d0: f64,
    pub sigma: Option<f64>,
    pub distances: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

pub fn simulate(fmt: Format, args: SimulateArgs) -> Result<Outcome> {
    let model = match &args.model {
        Some(path) => load_model(path)?,
        None => {
            let eta = args
                .eta
                .ok_or_else(|| anyhow!("--eta is required without --model"))?;
            let rss = args
                .rss_d0
                .ok_or_else(|| anyhow!("--rss-d0 is required without --model"))?;
            let sigma = SigmaModel::constant(args.sigma.unwrap_or(0.0))?;
            ShadowedPathLossModel::new(args.d0, rss, eta, sigma)?
        }
    };
    let distances = if args.distances.is_empty() {
        (1..=20).map(f64::from).collect()
    } else {
        args.distances
    };
    let survey = simulate_survey(&SimulationSpec {
        model,
        distances,
        samples_per_distance: args.samples,
        seed: args.seed,
    })?;
    let csv = save_survey_csv(&survey);
    let stdout = match (fmt, &args.output) {
        (Format::Json, _) => document(
            "simulate",
            json!({
                "seed": args.seed,
                "site": survey.site(),
                "rows": survey.rows().iter().map(|r| json!({
                    "distance_m": r.distance, "rssi_dbm": r.samples,
                })).collect::<Vec<_>>(),
                "output": args.output.as_ref().map(|p| p.display().to_string()),
            }),
        ),
        (_, None) => String::from_utf8(csv.clone())?,
        (_, Some(path)) => format!(
            "wrote {} samples at {} distances to {}\n",
            survey.sample_count(),
            survey.rows().len(),
            path.display()
        ),
    };
    Ok(Outcome::stdout(stdout).with_file(args.output, csv))
}

pub fn datasets_list(fmt: Format) -> Result<Outcome> {
    let all = all_datasets();
    let range = |d: &DatasetRecord| d.range_test.map(|r| (r.min_m, r.max_m));
    let stdout = match fmt {
        Format::Json => document(
            "datasets-list",
            json!({
                "datasets": all.iter().map(|d| json!({
                    "name": d.name,
                    "rows": d.stats.len(),
                    "range_test_m": range(d).map(|(lo, hi)| json!([lo, hi])),
                    "published_eta": d.published.map(|p| p.eta),
                    "provenance": d.provenance,
                })).collect::<Vec<_>>(),
            }),
        ),
        Format::Csv => {
            let mut s = String::from("name,rows,range_min_m,range_max_m\n");
            for d in &all {
                let (lo, hi) = range(d).map_or((String::new(), String::new()), |(a, b)| {
                    (a.to_string(), b.to_string())
                });
                let _ = writeln!(s, "{},{},{lo},{hi}", d.name, d.stats.len());
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for d in &all {
                let span = range(d).map_or("-".to_owned(), |(lo, hi)| format!("{lo}-{hi} m"));
                let _ = writeln!(
                    s,
                    "{:<18} {:>3} rows  range test {span}",
                    d.name,
                    d.stats.len()
                );
                let _ = writeln!(s, "  {}", d.provenance);
            }
            s
        }
    };
    Ok(Outcome::stdout(stdout))
}

fn tabulated(name: &str) -> Result<DatasetRecord> {
    let ds = embedded_dataset(name)?;
    if ds.stats.is_empty() {
        bail!("dataset {name} has no tabulated statistics (range test only)");
    }
    Ok(ds)
}

pub fn datasets_export(fmt: Format, name: &str, output: Option<PathBuf>) -> Result<Outcome> {
    let ds = tabulated(name)?;
    let csv = save_stats_csv(&ds.stats);
    let stdout = match (fmt, &output) {
        (Format::Json, _) => document(
            "datasets-export",
            json!({
                "name": ds.name,
                "rows": ds.stats.iter().map(|s| json!({
                    "distance_m": s.distance,
                    "mean_dbm": s.mean_rss,
                    "sd_db": s.sd,
                    "prr_pct": s.prr,
                    "n": s.n,
                })).collect::<Vec<_>>(),
                "output": output.as_ref().map(|p| p.display().to_string()),
            }),
        ),
        (_, None) => String::from_utf8(csv.clone())?,
        (_, Some(path)) => format!("wrote {} rows to {}\n", ds.stats.len(), path.display()),
    };
    Ok(Outcome::stdout(stdout).with_file(output, csv))
}

/// Model from a dataset's published exponent and σ quartic, referenced to
/// the first tabulated row.
pub fn published_model(ds: &DatasetRecord) -> Result<ShadowedPathLossModel> {
    let p = ds
        .published
        .ok_or_else(|| anyhow!("dataset {} has no published fit", ds.name))?;
    let first = &ds.stats[0];
    let d_max = ds.stats.iter().map(|s| s.distance).fold(f64::MIN, f64::max);
    let sigma = SigmaPolynomial::new(p.sigma_coeffs, first.distance, d_max)?;
    Ok(ShadowedPathLossModel::new(
        first.distance,
        first.mean_rss,
        p.eta,
        SigmaModel::Polynomial(sigma),
    )?)
}

pub fn datasets_model(fmt: Format, name: &str, output: Option<PathBuf>) -> Result<Outcome> {
    let ds = tabulated(name)?;
    let model = published_model(&ds)?;
    let doc = model_to_json(&model);
    let stdout = match (fmt, &output) {
        (Format::Csv, _) => bail!("datasets model has no csv output; use --format text or json"),
        (Format::Json, Some(path)) => document(
            "datasets-model",
            json!({
                "name": ds.name,
                "model": serde_json::from_slice::<Value>(&doc)?,
                "output": path.display().to_string(),
            }),
        ),
        (_, None) => String::from_utf8(doc.clone())?,
        (Format::Text, Some(path)) => {
            format!("wrote published {} model to {}\n", ds.name, path.display())
        }
    };
    Ok(Outcome::stdout(stdout).with_file(output, doc))
}
