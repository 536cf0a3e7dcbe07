//! Calibration of the shadowing model from survey statistics.
//!
//! Pipeline: raw samples → [`survey_stats`] → [`fit_path_loss`] (exponent and
//! reference RSS) → [`fit_sigma_polynomial`] (distance-dependent σ). All fits
//! accept [`DistanceStats`] directly so published per-distance tables can be
//! used without raw samples.

use crate::domain::{ShadowedPathLossModel, SigmaModel, SigmaPolynomial};
use crate::error::{require_positive, Error, Result};
use crate::io::RssiSurvey;
use crate::numerics::{
    moment_system, ols_line, pearson, polyfit_quartic, solve_dense, stationarity_sums, DenseSystem,
    SolveDiagnostics,
};

/// Two-sided 95% normal quantile used to turn a regression residual into a
/// σ-like quantity.
pub const RESIDUAL_Y_DIVISOR: f64 = 1.96;

/// Per-distance summary of a survey: one row of a calibration table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceStats {
    pub distance: f64,
    pub mean_rss: f64,
    pub sd: f64,
    pub n: u32,
    /// Packet received rate, percent.
    pub prr: Option<f64>,
}

impl DistanceStats {
    pub fn new(distance: f64, mean_rss: f64, sd: f64, n: u32, prr: Option<f64>) -> Result<Self> {
        let row = Self {
            distance,
            mean_rss,
            sd,
            n,
            prr,
        };
        row.validate().map_err(Error::InvalidInput)?;
        Ok(row)
    }

    /// Checks the row invariants, returning a message for the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return Err(format!("distance must be > 0, got {}", self.distance));
        }
        if !self.mean_rss.is_finite() {
            return Err(format!("mean RSS must be finite, got {}", self.mean_rss));
        }
        if !(self.sd >= 0.0 && self.sd.is_finite()) {
            return Err(format!("sd must be >= 0, got {}", self.sd));
        }
        if self.n < 1 {
            return Err("sample count must be >= 1".into());
        }
        if let Some(p) = self.prr {
            if !(0.0..=100.0).contains(&p) {
                return Err(format!("prr must lie in [0, 100], got {p}"));
            }
        }
        Ok(())
    }
}

/// Arithmetic mean and (n − 1) sample standard deviation at every surveyed
/// distance, sorted by distance.
pub fn survey_stats(survey: &RssiSurvey) -> Result<Vec<DistanceStats>> {
    let mut out = Vec::with_capacity(survey.rows().len());
    for row in survey.rows() {
        let n = row.samples.len();
        if n < 2 {
            return Err(Error::InsufficientSamples {
                distance: row.distance,
                got: n,
            });
        }
        let mean = row.samples.iter().sum::<f64>() / n as f64;
        let ss: f64 = row.samples.iter().map(|x| (x - mean).powi(2)).sum();
        out.push(DistanceStats {
            distance: row.distance,
            mean_rss: mean,
            sd: (ss / (n - 1) as f64).sqrt(),
            n: n as u32,
            prr: None,
        });
    }
    out.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterceptMode {
    /// Reference RSS estimated jointly with the slope.
    #[default]
    Free,
    /// Reference RSS pinned to the measured mean at the row nearest `d0`.
    Anchored,
}

impl InterceptMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InterceptMode::Free => "free",
            InterceptMode::Anchored => "anchored",
        }
    }
}

/// Goodness of fit with the degrees-of-freedom adjusted RMSE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodnessOfFit {
    pub r2: f64,
    /// `√(sse / dfe)`.
    pub rmse: f64,
    pub sse: f64,
    pub dfe: usize,
    pub n: usize,
}

impl GoodnessOfFit {
    /// `√(sse / n)`, for comparison with tools that do not adjust for
    /// fitted parameters.
    pub fn rmse_unadjusted(&self) -> f64 {
        (self.sse / self.n as f64).sqrt()
    }
}

/// `r² = 1 − sse/sst`, with `r² = 0` when the observations have no variance.
pub fn goodness_of_fit(observed: &[f64], fitted: &[f64], n_params: usize) -> Result<GoodnessOfFit> {
    if observed.len() != fitted.len() {
        return Err(Error::InvalidInput(format!(
            "{} observed values vs {} fitted values",
            observed.len(),
            fitted.len()
        )));
    }
    let n = observed.len();
    if n <= n_params {
        return Err(Error::InsufficientDof {
            len: n,
            params: n_params,
        });
    }
    let mean = observed.iter().sum::<f64>() / n as f64;
    let sst: f64 = observed.iter().map(|o| (o - mean).powi(2)).sum();
    let sse: f64 = observed
        .iter()
        .zip(fitted)
        .map(|(o, f)| (o - f).powi(2))
        .sum();
    let dfe = n - n_params;
    let r2 = if sst == 0.0 { 0.0 } else { 1.0 - sse / sst };
    Ok(GoodnessOfFit {
        r2,
        rmse: (sse / dfe as f64).sqrt(),
        sse,
        dfe,
        n,
    })
}

/// Output of the exponent regression.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub eta: f64,
    pub rss_d0: f64,
    pub d0: f64,
    pub intercept_mode: InterceptMode,
    pub distances: Vec<f64>,
    pub observed: Vec<f64>,
    pub fitted: Vec<f64>,
    /// `observed − fitted` in RSS space (dB). Path-loss residuals have the
    /// opposite sign.
    pub residuals: Vec<f64>,
    /// Residuals divided by [`RESIDUAL_Y_DIVISOR`].
    pub y_values: Vec<f64>,
    pub r2: f64,
    pub rmse: f64,
    pub rmse_unadjusted: f64,
    pub diagnostics: SolveDiagnostics,
}

fn check_distinct_distances(stats: &[DistanceStats]) -> Result<()> {
    let mut d: Vec<f64> = stats.iter().map(|s| s.distance).collect();
    d.sort_by(f64::total_cmp);
    if d.first() == d.last() {
        return Err(Error::DegenerateAbscissa);
    }
    if let Some(w) = d.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!(
            "distance {} m appears more than once; merge repeated distances first",
            w[0]
        )));
    }
    Ok(())
}

/// Regresses mean RSS on `10 log10(d / d0)`; the exponent is minus the slope.
pub fn fit_path_loss(
    stats: &[DistanceStats],
    d0: f64,
    mode: InterceptMode,
) -> Result<(ShadowedPathLossModel, FitReport)> {
    let d0 = require_positive("d0", d0)?;
    if stats.len() < 3 {
        return Err(Error::InsufficientData {
            what: "rows",
            needed: 3,
            got: stats.len(),
        });
    }
    check_distinct_distances(stats)?;

    let distances: Vec<f64> = stats.iter().map(|s| s.distance).collect();
    let observed: Vec<f64> = stats.iter().map(|s| s.mean_rss).collect();
    let x: Vec<f64> = distances.iter().map(|d| 10.0 * (d / d0).log10()).collect();

    let (slope, rss_d0, diagnostics, n_params) = match mode {
        InterceptMode::Free => {
            let line = ols_line(&x, &observed)?;
            let (_, diag) = solve_dense(&moment_system(&x, &observed, 1)?)?;
            (line.slope, line.intercept, diag, 2)
        }
        InterceptMode::Anchored => {
            let anchor = stats
                .iter()
                .min_by(|a, b| {
                    (a.distance - d0)
                        .abs()
                        .total_cmp(&(b.distance - d0).abs())
                        .then(a.distance.total_cmp(&b.distance))
                })
                .expect("at least three rows");
            let rss_d0 = anchor.mean_rss;
            let sxx: f64 = x.iter().map(|v| v * v).sum();
            let sxy: f64 = x.iter().zip(&observed).map(|(v, y)| v * (y - rss_d0)).sum();
            let (sol, diag) = solve_dense(&DenseSystem::new(vec![vec![sxx]], vec![sxy])?).map_err(
                |e| match e {
                    Error::Singular { .. } => Error::DegenerateAbscissa,
                    other => other,
                },
            )?;
            (sol[0], rss_d0, diag, 1)
        }
    };

    let eta = -slope;
    let model = ShadowedPathLossModel::new(d0, rss_d0, eta, SigmaModel::Constant(0.0))?;
    let fitted = distances
        .iter()
        .map(|&d| model.predict_mean_rss(d))
        .collect::<Result<Vec<f64>>>()?;
    let residuals: Vec<f64> = observed.iter().zip(&fitted).map(|(o, f)| o - f).collect();
    let y_values = residuals.iter().map(|r| r / RESIDUAL_Y_DIVISOR).collect();
    let gof = goodness_of_fit(&observed, &fitted, n_params)?;

    let report = FitReport {
        eta,
        rss_d0,
        d0,
        intercept_mode: mode,
        distances,
        observed,
        fitted,
        residuals,
        y_values,
        r2: gof.r2,
        rmse: gof.rmse,
        rmse_unadjusted: gof.rmse_unadjusted(),
        diagnostics,
    };
    Ok((model, report))
}

/// Residual of each row's mean RSS against the model's mean prediction,
/// optionally divided by [`RESIDUAL_Y_DIVISOR`].
///
/// Values are in RSS space (`measured − predicted`); the equivalent path-loss
/// residual is the negation.
pub fn residual_y(
    stats: &[DistanceStats],
    model: &ShadowedPathLossModel,
    scaled: bool,
) -> Result<Vec<f64>> {
    let divisor = if scaled { RESIDUAL_Y_DIVISOR } else { 1.0 };
    stats
        .iter()
        .map(|s| Ok((s.mean_rss - model.predict_mean_rss(s.distance)?) / divisor))
        .collect()
}

/// What the σ quartic is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SigmaTarget {
    /// The per-distance sample standard deviation column.
    #[default]
    SampleSd,
    /// Scaled regression residuals against the given mean model.
    ResidualY(ShadowedPathLossModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaFit {
    pub polynomial: SigmaPolynomial,
    pub goodness: GoodnessOfFit,
    pub diagnostics: SolveDiagnostics,
    /// `Σ rᵢ dᵢᵏ` for k = 4..0 at the returned coefficients.
    pub stationarity: [f64; 5],
    pub distances: Vec<f64>,
    pub observed: Vec<f64>,
    pub fitted: Vec<f64>,
}

impl SigmaFit {
    pub fn max_stationarity(&self) -> f64 {
        self.stationarity.iter().fold(0.0, |m, s| m.max(s.abs()))
    }
}

/// Fits `σ(d) = a d⁴ + b d³ + c d² + e d + f` by least squares through the
/// explicit normal equations. The returned polynomial's domain is the data's
/// distance range.
pub fn fit_sigma_polynomial(stats: &[DistanceStats], target: SigmaTarget) -> Result<SigmaFit> {
    let distances: Vec<f64> = stats.iter().map(|s| s.distance).collect();
    let observed = match target {
        SigmaTarget::SampleSd => stats.iter().map(|s| s.sd).collect(),
        SigmaTarget::ResidualY(model) => residual_y(stats, &model, true)?,
    };
    let quartic = polyfit_quartic(&distances, &observed)?;
    let d_min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let d_max = distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let polynomial = SigmaPolynomial::new(quartic.coeffs, d_min, d_max)?;
    let fitted: Vec<f64> = distances
        .iter()
        .map(|&d| polynomial.eval_unclamped(d))
        .collect();
    let goodness = goodness_of_fit(&observed, &fitted, 5)?;
    let stationarity = stationarity_sums(&distances, &observed, &quartic.coeffs);
    Ok(SigmaFit {
        polynomial,
        goodness,
        diagnostics: quartic.diagnostics,
        stationarity,
        distances,
        observed,
        fitted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrrCorrelations {
    pub prr_sd: f64,
    pub prr_mean: f64,
    pub rows_used: usize,
}

/// Pearson correlation of PRR with the SD column and with the mean RSS
/// column, over rows that carry a PRR value.
pub fn prr_correlations(stats: &[DistanceStats]) -> Result<PrrCorrelations> {
    let rows: Vec<&DistanceStats> = stats.iter().filter(|s| s.prr.is_some()).collect();
    if rows.len() < 3 {
        return Err(Error::InsufficientData {
            what: "rows with PRR",
            needed: 3,
            got: rows.len(),
        });
    }
    let prr: Vec<f64> = rows.iter().filter_map(|s| s.prr).collect();
    let sd: Vec<f64> = rows.iter().map(|s| s.sd).collect();
    let mean: Vec<f64> = rows.iter().map(|s| s.mean_rss).collect();
    let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    for (name, col) in [("prr", &prr), ("sd", &sd), ("mean_rss", &mean)] {
        if constant(col) {
            return Err(Error::UndefinedCorrelation { column: name });
        }
    }
    let undefined = Error::UndefinedCorrelation { column: "prr" };
    Ok(PrrCorrelations {
        prr_sd: pearson(&prr, &sd)?.ok_or_else(|| undefined.clone())?,
        prr_mean: pearson(&prr, &mean)?.ok_or(undefined)?,
        rows_used: rows.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub d0: f64,
    pub intercept_mode: InterceptMode,
    pub sigma_from_residuals: bool,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            d0: 1.0,
            intercept_mode: InterceptMode::Free,
            sigma_from_residuals: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub model: ShadowedPathLossModel,
    pub path: FitReport,
    pub sigma: SigmaFit,
}

/// Full calibration: exponent regression followed by the σ quartic.
pub fn calibrate(stats: &[DistanceStats], options: &CalibrationOptions) -> Result<Calibration> {
    let (mean_model, path) = fit_path_loss(stats, options.d0, options.intercept_mode)?;
    let target = if options.sigma_from_residuals {
        SigmaTarget::ResidualY(mean_model)
    } else {
        SigmaTarget::SampleSd
    };
    let sigma = fit_sigma_polynomial(stats, target)?;
    Ok(Calibration {
        model: mean_model.with_sigma(SigmaModel::Polynomial(sigma.polynomial)),
        path,
        sigma,
    })
}
