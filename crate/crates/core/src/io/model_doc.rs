//! Versioned JSON document for a calibrated model.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "d0_m": 1.0,
//!   "rss_d0_dbm": -51.65,
//!   "eta": 2.14,
//!   "sigma": { "a": 2.626e-6, "b": 0.006176, "c": -0.2276, "e": 2.403,
//!              "f": -1.721, "d_min_m": 1.0, "d_max_m": 20.0 }
//! }
//! ```
//!
//! A constant σ is written as `"sigma": { "constant_db": 2.0 }`. Unknown
//! fields are rejected at every level.

use serde::{Deserialize, Serialize};

use crate::domain::{ShadowedPathLossModel, SigmaModel, SigmaPolynomial};
use crate::error::{Error, Result};

use super::FORMAT_VERSION;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format_version: u32,
    d0_m: f64,
    rss_d0_dbm: f64,
    eta: f64,
    sigma: SigmaDoc,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SigmaDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_min_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_max_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant_db: Option<f64>,
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_owned(),
        message: message.into(),
    }
}

pub fn model_to_json(model: &ShadowedPathLossModel) -> Vec<u8> {
    let sigma = match model.sigma() {
        SigmaModel::Constant(s) => SigmaDoc {
            constant_db: Some(*s),
            ..SigmaDoc::default()
        },
        SigmaModel::Polynomial(p) => {
            let [a, b, c, e, f] = p.coefficients();
            SigmaDoc {
                a: Some(a),
                b: Some(b),
                c: Some(c),
                e: Some(e),
                f: Some(f),
                d_min_m: Some(p.d_min()),
                d_max_m: Some(p.d_max()),
                constant_db: None,
            }
        }
    };
    let doc = ModelDoc {
        format_version: FORMAT_VERSION,
        d0_m: model.d0(),
        rss_d0_dbm: model.rss_d0(),
        eta: model.eta(),
        sigma,
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("model document serializes");
    out.push(b'\n');
    out
}

pub fn model_from_json(bytes: &[u8]) -> Result<ShadowedPathLossModel> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let doc: ModelDoc = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| schema(".", e.to_string()))?;

    if doc.format_version != FORMAT_VERSION {
        return Err(schema(
            "format_version",
            format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                doc.format_version
            ),
        ));
    }
    let s = &doc.sigma;
    let sigma = match s.constant_db {
        Some(c) => {
            let extra = [s.a, s.b, s.c, s.e, s.f, s.d_min_m, s.d_max_m];
            if extra.iter().any(Option::is_some) {
                return Err(schema(
                    "sigma",
                    "constant_db cannot be combined with polynomial fields",
                ));
            }
            SigmaModel::constant(c).map_err(|e| schema("sigma.constant_db", e.to_string()))?
        }
        None => {
            let named = [
                ("a", s.a),
                ("b", s.b),
                ("c", s.c),
                ("e", s.e),
                ("f", s.f),
                ("d_min_m", s.d_min_m),
                ("d_max_m", s.d_max_m),
            ];
            let mut values = [0.0; 7];
            for (slot, (name, v)) in values.iter_mut().zip(named) {
                *slot = v.ok_or_else(|| {
                    schema(&format!("sigma.{name}"), format!("missing field `{name}`"))
                })?;
            }
            let [a, b, c, e, f, d_min, d_max] = values;
            SigmaModel::Polynomial(
                SigmaPolynomial::new([a, b, c, e, f], d_min, d_max)
                    .map_err(|err| schema("sigma", err.to_string()))?,
            )
        }
    };
    ShadowedPathLossModel::new(doc.d0_m, doc.rss_d0_dbm, doc.eta, sigma).map_err(|e| {
        let path = match &e {
            Error::Domain { quantity: "d0", .. } => "d0_m",
            _ => ".",
        };
        schema(path, e.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sigma_document() {
        let m = model_from_json(
            br#"{"format_version":1,"d0_m":1,"rss_d0_dbm":-40,"eta":2,"sigma":{"constant_db":2}}"#,
        )
        .unwrap();
        for d in [0.5, 3.0, 250.0] {
            assert_eq!(m.sigma_at(d).unwrap().value, 2.0);
        }
        assert_eq!(model_from_json(&model_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn missing_eta_is_named() {
        let err = model_from_json(
            br#"{"format_version":1,"d0_m":1,"rss_d0_dbm":-40,"sigma":{"constant_db":2}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("eta"), "{err}");
    }

    #[test]
    fn schema_violations() {
        let cases: [(&[u8], &str); 6] = [
            (
                br#"{"format_version":2,"d0_m":1,"rss_d0_dbm":-40,"eta":2,"sigma":{"constant_db":2}}"#,
                "format_version",
            ),
            (
                br#"{"format_version":1,"d0_m":1,"rss_d0_dbm":-40,"eta":2,"extra":1,"sigma":{"constant_db":2}}"#,
                "extra",
            ),
            (
                br#"{"format_version":1,"d0_m":1,"rss_d0_dbm":-40,"eta":2,"sigma":{"constant_db":2,"bogus":1}}"#,
                "sigma",
            ),
            (
                br#"{"format_version":1,"d0_m":1,"rss_d0_dbm":-40,"eta":2,"sigma":{"a":0,"b":0,"c":0,"f":1,"d_min_m":1,"d_max_m":2}}"#,
                "sigma.e",
            ),
            (
                br#"{"format_version":1,"d0_m":0,"rss_d0_dbm":-40,"eta":2,"sigma":{"constant_db":2}}"#,
                "d0_m",
            ),
            (
                br#"{"format_version":1,"d0_m":1,"rss_d0_dbm":"x","eta":2,"sigma":{"constant_db":2}}"#,
                "rss_d0_dbm",
            ),
        ];
        for (doc, needle) in cases {
            let err = model_from_json(doc).unwrap_err();
            assert!(matches!(err, Error::Schema { .. }), "{err}");
            assert!(err.to_string().contains(needle), "{err} lacks {needle}");
        }
    }
}
