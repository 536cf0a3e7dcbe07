//! Inverting a calibrated model: distance from RSSI, shadowing-aware
//! confidence intervals and maximum-range planning.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::domain::{LinkConstants, ShadowedPathLossModel};
use crate::error::{require_finite, Error, Result};

/// Upper end of the range search (m).
pub const RANGE_SEARCH_LIMIT: f64 = 1e6;

const RANGE_GRID_POINTS: usize = 4096;
const RANGE_TOLERANCE: f64 = 1e-4;

fn invertible(model: &ShadowedPathLossModel) -> Result<()> {
    if model.eta() > 0.0 {
        Ok(())
    } else {
        Err(Error::NonInvertible { eta: model.eta() })
    }
}

/// Distance (m) at which the model's mean RSS equals `rss`.
pub fn estimate_distance(model: &ShadowedPathLossModel, rss: f64) -> Result<f64> {
    invertible(model)?;
    require_finite("rss", rss)?;
    Ok(model.d0() * 10f64.powf((model.rss_d0() - rss) / (10.0 * model.eta())))
}

/// Two-sided standard normal quantile for a central probability `level`.
pub fn two_sided_z(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain {
            quantity: "level",
            value: level,
            requirement: "must lie in (0, 1)",
        });
    }
    Ok(standard_normal().inverse_cdf(0.5 + level / 2.0))
}

/// One-sided quantile `z` with `P(Z > z) = outage`.
pub fn z_for_outage(outage: f64) -> Result<f64> {
    if !(outage > 0.0 && outage < 1.0) {
        return Err(Error::Domain {
            quantity: "outage probability",
            value: outage,
            requirement: "must lie in (0, 1)",
        });
    }
    Ok(standard_normal().inverse_cdf(1.0 - outage))
}

fn standard_normal() -> Normal {
    Normal::standard()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationEstimate {
    pub d_hat: f64,
    pub d_lo: f64,
    pub d_hi: f64,
    pub level: f64,
    pub z: f64,
    pub sigma_used: f64,
    /// σ was evaluated outside its calibrated distance range.
    pub clamped: bool,
}

/// Point estimate plus the interval obtained by shifting `rss` by `±z σ`,
/// with σ taken at the point estimate.
pub fn confidence_interval(
    model: &ShadowedPathLossModel,
    rss: f64,
    level: f64,
) -> Result<LocalizationEstimate> {
    let z = two_sided_z(level)?;
    let d_hat = estimate_distance(model, rss)?;
    let sigma = model.sigma_at(d_hat)?;
    if sigma.value < 0.0 {
        return Err(Error::Domain {
            quantity: "sigma at estimated distance",
            value: sigma.value,
            requirement: "must be >= 0",
        });
    }
    let spread = z * sigma.value;
    Ok(LocalizationEstimate {
        d_hat,
        // A stronger signal maps to a shorter distance.
        d_lo: estimate_distance(model, rss + spread)?,
        d_hi: estimate_distance(model, rss - spread)?,
        level,
        z,
        sigma_used: sigma.value,
        clamped: sigma.clamped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPlan {
    pub max_range: f64,
    /// Fade margin `z σ` at `max_range` (dB).
    pub margin_db: f64,
    pub outage_z: f64,
    pub sensitivity: f64,
    pub sigma_clamped: bool,
    /// The range lies past the distances σ was calibrated on.
    pub extrapolated: bool,
}

/// Largest distance at which the mean RSS minus the fade margin still meets
/// the receiver sensitivity.
///
/// The link budget is scanned on a logarithmic grid over
/// `[d0, RANGE_SEARCH_LIMIT]` to bracket the last crossing, then bisected.
/// Scanning first keeps the answer the *largest* covered distance even when a
/// clamped σ makes the budget non-monotone.
pub fn max_range(
    model: &ShadowedPathLossModel,
    constants: &LinkConstants,
    outage_z: f64,
) -> Result<LinkPlan> {
    invertible(model)?;
    require_finite("outage_z", outage_z)?;
    if outage_z < 0.0 {
        return Err(Error::Domain {
            quantity: "outage_z",
            value: outage_z,
            requirement: "must be >= 0",
        });
    }
    let sensitivity = constants.receiver_sensitivity();
    if sensitivity >= model.rss_d0() {
        return Err(Error::NoCoverage(format!(
            "sensitivity {sensitivity} dBm is not below the reference RSS {} dBm",
            model.rss_d0()
        )));
    }
    let d0 = model.d0();
    if d0 >= RANGE_SEARCH_LIMIT {
        return Err(Error::InvalidInput(format!(
            "reference distance {d0} m exceeds the range search limit"
        )));
    }

    let budget = |d: f64| -> Result<f64> {
        let sigma = model.sigma_at(d)?.value;
        Ok(model.predict_mean_rss(d)? - outage_z * sigma - sensitivity)
    };

    if budget(d0)? < 0.0 {
        return Err(Error::NoCoverage(format!(
            "fade margin at the reference distance already exceeds the {:.2} dB budget",
            model.rss_d0() - sensitivity
        )));
    }

    let ratio = (RANGE_SEARCH_LIMIT / d0).ln() / (RANGE_GRID_POINTS - 1) as f64;
    let grid = |i: usize| {
        if i == RANGE_GRID_POINTS - 1 {
            RANGE_SEARCH_LIMIT
        } else {
            d0 * (ratio * i as f64).exp()
        }
    };
    let mut last_ok = 0;
    for i in (0..RANGE_GRID_POINTS).rev() {
        if budget(grid(i))? >= 0.0 {
            last_ok = i;
            break;
        }
    }
    if last_ok == RANGE_GRID_POINTS - 1 {
        return Err(Error::InvalidInput(format!(
            "coverage extends past the {RANGE_SEARCH_LIMIT} m search limit"
        )));
    }

    let (mut lo, mut hi) = (grid(last_ok), grid(last_ok + 1));
    while hi - lo > RANGE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if budget(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let sigma = model.sigma_at(lo)?;
    let margin_db = outage_z * sigma.value;
    if margin_db < 0.0 {
        return Err(Error::Domain {
            quantity: "sigma at planned range",
            value: sigma.value,
            requirement: "must be >= 0",
        });
    }
    Ok(LinkPlan {
        max_range: lo,
        margin_db,
        outage_z,
        sensitivity,
        sigma_clamped: sigma.clamped,
        extrapolated: model.sigma().valid_up_to().is_some_and(|d| lo > d),
    })
}
