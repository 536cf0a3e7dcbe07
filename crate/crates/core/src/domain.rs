//! Propagation model types and forward evaluations.
//!
//! The calibrated model lives in RSS space (dBm): the surveys record received
//! signal strength and never the transmit power, so the reference term is the
//! mean RSS at `d0` rather than a path loss. Callers that know the transmit
//! power can move to path-loss space with [`path_loss_db`] or
//! [`ShadowedPathLossModel::path_loss_at`]; the exponent is the same in both.

use crate::error::{require_finite, require_positive, Error, Result};

/// Receiver sensitivity of the surveyed 2.4 GHz modules (1% packet error rate).
pub const DEFAULT_RECEIVER_SENSITIVITY_DBM: f64 = -92.0;

/// Path loss in dB between a transmit and a receive level, both in dBm.
pub fn path_loss_db(pt_dbm: f64, pr_dbm: f64) -> Result<f64> {
    require_finite("pt_dbm", pt_dbm)?;
    require_finite("pr_dbm", pr_dbm)?;
    Ok(pt_dbm - pr_dbm)
}

/// Zero-mean Gaussian density of the shadowing term `psi` (dB).
pub fn shadow_pdf(psi: f64, sigma: f64) -> Result<f64> {
    require_finite("psi", psi)?;
    require_positive("sigma", sigma)?;
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
    Ok(norm * (-(psi * psi) / (2.0 * sigma * sigma)).exp())
}

/// Line-of-sight inverse-square model in linear power units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSpaceModel {
    c_t: f64,
    tx_power: f64,
}

impl FreeSpaceModel {
    pub fn new(c_t: f64, tx_power: f64) -> Result<Self> {
        Ok(Self {
            c_t: require_positive("c_t", c_t)?,
            tx_power: require_positive("tx_power", tx_power)?,
        })
    }

    pub fn c_t(&self) -> f64 {
        self.c_t
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    /// Received power at distance `d` (m): `c_t * P_t / d^2`.
    pub fn rx_power(&self, d: f64) -> Result<f64> {
        let d = require_positive("distance", d)?;
        Ok(self.c_t * self.tx_power / (d * d))
    }
}

/// Two-ray ground reflection model, inverse fourth power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRayModel {
    c_t2: f64,
    tx_power: f64,
}

impl TwoRayModel {
    pub fn new(c_t2: f64, tx_power: f64) -> Result<Self> {
        Ok(Self {
            c_t2: require_positive("c_t2", c_t2)?,
            tx_power: require_positive("tx_power", tx_power)?,
        })
    }

    pub fn c_t2(&self) -> f64 {
        self.c_t2
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    /// Received power at distance `d` (m): `c_t2 * P_t / d^4`.
    pub fn rx_power(&self, d: f64) -> Result<f64> {
        let d = require_positive("distance", d)?;
        let d2 = d * d;
        Ok(self.c_t2 * self.tx_power / (d2 * d2))
    }
}

/// A σ value together with whether the evaluation distance was clamped into
/// the polynomial's validity domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaValue {
    pub value: f64,
    pub clamped: bool,
}

/// Quartic shadowing standard deviation `a d^4 + b d^3 + c d^2 + e d + f` (dB).
///
/// Evaluation clamps the distance to `[d_min, d_max]`: outside the surveyed
/// range a quartic runs away quickly (the longwall fit passes 100 dB before
/// 40 m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPolynomial {
    coeffs: [f64; 5],
    d_min: f64,
    d_max: f64,
}

impl SigmaPolynomial {
    /// `coeffs` is `[a, b, c, e, f]`, highest power first.
    pub fn new(coeffs: [f64; 5], d_min: f64, d_max: f64) -> Result<Self> {
        for c in coeffs {
            require_finite("sigma coefficient", c)?;
        }
        require_positive("d_min", d_min)?;
        require_finite("d_max", d_max)?;
        if d_max <= d_min {
            return Err(Error::InvalidInput(format!(
                "sigma domain must satisfy d_max > d_min, got [{d_min}, {d_max}]"
            )));
        }
        Ok(Self {
            coeffs,
            d_min,
            d_max,
        })
    }

    pub fn constant(f: f64, d_min: f64, d_max: f64) -> Result<Self> {
        Self::new([0.0, 0.0, 0.0, 0.0, f], d_min, d_max)
    }

    pub fn coefficients(&self) -> [f64; 5] {
        self.coeffs
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Horner evaluation with no clamping.
    pub fn eval_unclamped(&self, d: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * d + c)
    }

    pub fn clamp(&self, d: f64) -> f64 {
        d.clamp(self.d_min, self.d_max)
    }

    pub fn at(&self, d: f64) -> Result<SigmaValue> {
        let d = require_positive("distance", d)?;
        let dc = self.clamp(d);
        Ok(SigmaValue {
            value: self.eval_unclamped(dc),
            clamped: dc != d,
        })
    }
}

/// Distance dependence of the shadowing standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaModel {
    /// Same σ (dB) at every distance.
    Constant(f64),
    Polynomial(SigmaPolynomial),
}

impl SigmaModel {
    pub fn constant(sigma_db: f64) -> Result<Self> {
        require_finite("sigma", sigma_db)?;
        if sigma_db < 0.0 {
            return Err(Error::Domain {
                quantity: "sigma",
                value: sigma_db,
                requirement: "must be >= 0",
            });
        }
        Ok(SigmaModel::Constant(sigma_db))
    }

    pub fn at(&self, d: f64) -> Result<SigmaValue> {
        match self {
            SigmaModel::Constant(s) => {
                require_positive("distance", d)?;
                Ok(SigmaValue {
                    value: *s,
                    clamped: false,
                })
            }
            SigmaModel::Polynomial(p) => p.at(d),
        }
    }

    /// Upper end of the distance range σ was calibrated on, if bounded.
    pub fn valid_up_to(&self) -> Option<f64> {
        match self {
            SigmaModel::Constant(_) => None,
            SigmaModel::Polynomial(p) => Some(p.d_max()),
        }
    }
}

/// Log-distance model with zero-mean log-normal shadowing, in RSS space:
/// `RSS(d) = rss_d0 - 10 eta log10(d / d0) + sigma(d) * N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowedPathLossModel {
    d0: f64,
    rss_d0: f64,
    eta: f64,
    sigma: SigmaModel,
}

impl ShadowedPathLossModel {
    pub fn new(d0: f64, rss_d0: f64, eta: f64, sigma: SigmaModel) -> Result<Self> {
        Ok(Self {
            d0: require_positive("d0", d0)?,
            rss_d0: require_finite("rss_d0", rss_d0)?,
            eta: require_finite("eta", eta)?,
            sigma,
        })
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn rss_d0(&self) -> f64 {
        self.rss_d0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn sigma(&self) -> &SigmaModel {
        &self.sigma
    }

    pub fn with_sigma(self, sigma: SigmaModel) -> Self {
        Self { sigma, ..self }
    }

    /// Mean received signal strength (dBm) at distance `d` (m).
    pub fn predict_mean_rss(&self, d: f64) -> Result<f64> {
        let d = require_positive("distance", d)?;
        Ok(self.rss_d0 - 10.0 * self.eta * (d / self.d0).log10())
    }

    pub fn sigma_at(&self, d: f64) -> Result<SigmaValue> {
        self.sigma.at(d)
    }

    /// Mean path loss (dB) at `d` for a known transmit power.
    pub fn path_loss_at(&self, pt_dbm: f64, d: f64) -> Result<f64> {
        path_loss_db(pt_dbm, self.predict_mean_rss(d)?)
    }
}

/// Radio constants used for range planning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConstants {
    receiver_sensitivity: f64,
}

impl LinkConstants {
    pub fn new(receiver_sensitivity_dbm: f64) -> Result<Self> {
        require_finite("receiver_sensitivity", receiver_sensitivity_dbm)?;
        if receiver_sensitivity_dbm >= 0.0 {
            return Err(Error::Domain {
                quantity: "receiver_sensitivity",
                value: receiver_sensitivity_dbm,
                requirement: "must be < 0 dBm",
            });
        }
        Ok(Self {
            receiver_sensitivity: receiver_sensitivity_dbm,
        })
    }

    pub fn receiver_sensitivity(&self) -> f64 {
        self.receiver_sensitivity
    }
}

impl Default for LinkConstants {
    fn default() -> Self {
        Self {
            receiver_sensitivity: DEFAULT_RECEIVER_SENSITIVITY_DBM,
        }
    }
}
