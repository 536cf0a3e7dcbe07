//! Surveys, embedded reference datasets and file codecs.
//!
//! All text formats are UTF-8 with `\n` line endings. Numbers are written
//! with the shortest decimal representation that parses back to the same
//! `f64`, so every codec round-trips exactly.

mod datasets;
mod model_doc;
mod stats_csv;
mod survey;

pub use datasets::{
    all_datasets, dataset_names, embedded_dataset, DatasetRecord, PublishedFit, RangeTest,
};
pub use model_doc::{model_from_json, model_to_json};
pub use stats_csv::{load_stats_csv, save_stats_csv, STATS_HEADER};
pub use survey::{
    load_survey_csv, save_survey_csv, RssiSurvey, SurveyMetadata, SurveyRow, SURVEY_HEADER,
};

/// Version stamped into model documents and structured CLI output.
pub const FORMAT_VERSION: u32 = 1;

use crate::error::Error;

pub(crate) fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    Error::Format {
        line,
        message: err.to_string(),
    }
}

pub(crate) fn parse_field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    column: usize,
    name: &str,
) -> Result<T, Error> {
    let line = record.position().map(|p| p.line()).unwrap_or(0);
    let raw = record.get(column).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line,
        column: column + 1,
        message: format!("`{raw}` is not a valid {name}"),
    })
}

pub(crate) fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Reads all records, checking the header row and the field count of every
/// data row.
pub(crate) fn read_records(bytes: &[u8], header: &[&str]) -> Result<Vec<csv::StringRecord>, Error> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r.map_err(csv_error)?,
        None => {
            return Err(Error::Format {
                line: 1,
                message: format!("missing header `{}`", header.join(",")),
            })
        }
    };
    if first.iter().ne(header.iter().copied()) {
        return Err(Error::Format {
            line: record_line(&first).max(1),
            message: format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                first.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        if rec.len() != header.len() {
            return Err(Error::Format {
                line: record_line(&rec),
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

pub(crate) fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}
