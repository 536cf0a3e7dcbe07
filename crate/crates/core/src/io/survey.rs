use crate::error::{Error, Result};

use super::{csv_error, parse_field, read_records, record_line, writer};

pub const SURVEY_HEADER: [&str; 3] = ["site", "distance_m", "rssi_dbm"];

/// All RSSI readings taken at one transmitter–receiver distance.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRow {
    pub distance: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurveyMetadata {
    pub frequency: Option<String>,
    pub notes: Option<String>,
}

/// Raw field measurements from one site.
///
/// Rows are unique by distance: repeated distances are merged at
/// construction, keeping the order in which distances first appear and the
/// order of samples within them.
#[derive(Debug, Clone, PartialEq)]
pub struct RssiSurvey {
    site: String,
    rows: Vec<SurveyRow>,
    metadata: Option<SurveyMetadata>,
}

impl RssiSurvey {
    pub fn new(site: impl Into<String>, rows: Vec<SurveyRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("survey has no rows".into()));
        }
        let mut merged: Vec<SurveyRow> = Vec::with_capacity(rows.len());
        for row in rows {
            if !(row.distance > 0.0 && row.distance.is_finite()) {
                return Err(Error::Domain {
                    quantity: "distance",
                    value: row.distance,
                    requirement: "must be > 0",
                });
            }
            if row.samples.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "no samples at distance {} m",
                    row.distance
                )));
            }
            if let Some(s) = row.samples.iter().find(|s| !s.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite sample {s} at distance {} m",
                    row.distance
                )));
            }
            match merged.iter_mut().find(|r| r.distance == row.distance) {
                Some(existing) => existing.samples.extend(row.samples),
                None => merged.push(row),
            }
        }
        Ok(Self {
            site: site.into(),
            rows: merged,
            metadata: None,
        })
    }

    pub fn with_metadata(mut self, metadata: SurveyMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn site(&self) -> &str {
        &self.site
    }

    pub fn rows(&self) -> &[SurveyRow] {
        &self.rows
    }

    pub fn metadata(&self) -> Option<&SurveyMetadata> {
        self.metadata.as_ref()
    }

    pub fn sample_count(&self) -> usize {
        self.rows.iter().map(|r| r.samples.len()).sum()
    }
}

/// Parses `site,distance_m,rssi_dbm` with one sample per line. Every line
/// must carry the same site. Metadata is not part of this format.
pub fn load_survey_csv(bytes: &[u8]) -> Result<RssiSurvey> {
    let records = read_records(bytes, &SURVEY_HEADER)?;
    let mut site: Option<String> = None;
    let mut rows: Vec<SurveyRow> = Vec::new();
    for rec in &records {
        let line = record_line(rec);
        let this_site = &rec[0];
        match &site {
            None => site = Some(this_site.to_owned()),
            Some(s) if s != this_site => {
                return Err(Error::Validation {
                    line,
                    message: format!("site `{this_site}` differs from `{s}`"),
                })
            }
            Some(_) => {}
        }
        let distance: f64 = parse_field(rec, 1, "distance")?;
        let rssi: f64 = parse_field(rec, 2, "RSSI value")?;
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::Validation {
                line,
                message: format!("distance must be > 0, got {distance}"),
            });
        }
        if !rssi.is_finite() {
            return Err(Error::Validation {
                line,
                message: format!("RSSI must be finite, got {rssi}"),
            });
        }
        match rows.iter_mut().find(|r| r.distance == distance) {
            Some(r) => r.samples.push(rssi),
            None => rows.push(SurveyRow {
                distance,
                samples: vec![rssi],
            }),
        }
    }
    let Some(site) = site else {
        return Err(Error::Validation {
            line: 2,
            message: "survey contains no samples".into(),
        });
    };
    RssiSurvey::new(site, rows)
}

pub fn save_survey_csv(survey: &RssiSurvey) -> Vec<u8> {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(SURVEY_HEADER)
            .map_err(csv_error)
            .expect("in-memory write");
        for row in survey.rows() {
            let d = row.distance.to_string();
            for s in &row.samples {
                w.write_record([survey.site(), d.as_str(), s.to_string().as_str()])
                    .expect("in-memory write");
            }
        }
        w.flush().expect("in-memory flush");
    }
    buf
}
