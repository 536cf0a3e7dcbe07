use std::path::Path;

use anyhow::{Context, Result};
use shadowcal::estimation::{survey_stats, DistanceStats};
use shadowcal::io::{
    dataset_names, embedded_dataset, load_stats_csv, load_survey_csv, DatasetRecord,
};

/// Calibration input: an embedded dataset or a CSV file on disk.
pub struct Source {
    pub label: String,
    pub stats: Vec<DistanceStats>,
    pub dataset: Option<DatasetRecord>,
}

/// Embedded names win over paths. Files whose header starts with `site,` are
/// read as raw surveys and reduced to per-distance statistics.
pub fn resolve(source_arg: &str) -> Result<Source> {
    if dataset_names().contains(&source_arg) {
        let ds = embedded_dataset(source_arg)?;
        return Ok(Source {
            label: source_arg.to_owned(),
            stats: ds.stats.clone(),
            dataset: Some(ds),
        });
    }
    let path = Path::new(source_arg);
    let bytes = std::fs::read(path).with_context(|| {
        format!(
            "cannot read `{source_arg}` (not a file, and not one of the datasets: {})",
            dataset_names().join(", ")
        )
    })?;
    let stats = if bytes.starts_with(b"site,") {
        let survey = load_survey_csv(&bytes).with_context(|| format!("in {source_arg}"))?;
        survey_stats(&survey).with_context(|| format!("in {source_arg}"))?
    } else {
        load_stats_csv(&bytes).with_context(|| format!("in {source_arg}"))?
    };
    Ok(Source {
        label: source_arg.to_owned(),
        stats,
        dataset: None,
    })
}
