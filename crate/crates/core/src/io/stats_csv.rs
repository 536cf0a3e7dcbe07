use crate::error::{Error, Result};
use crate::estimation::DistanceStats;

use super::{parse_field, read_records, record_line, writer};

pub const STATS_HEADER: [&str; 5] = ["distance_m", "mean_dbm", "sd_db", "prr_pct", "n"];

/// Parses a per-distance statistics table. An empty `prr_pct` field means
/// no PRR was recorded.
pub fn load_stats_csv(bytes: &[u8]) -> Result<Vec<DistanceStats>> {
    let records = read_records(bytes, &STATS_HEADER)?;
    records
        .iter()
        .map(|rec| {
            let prr = if rec[3].is_empty() {
                None
            } else {
                Some(parse_field::<f64>(rec, 3, "PRR percentage")?)
            };
            let row = DistanceStats {
                distance: parse_field(rec, 0, "distance")?,
                mean_rss: parse_field(rec, 1, "mean RSS")?,
                sd: parse_field(rec, 2, "standard deviation")?,
                n: parse_field(rec, 4, "sample count")?,
                prr,
            };
            row.validate().map_err(|message| Error::Validation {
                line: record_line(rec),
                message,
            })?;
            Ok(row)
        })
        .collect()
}

pub fn save_stats_csv(stats: &[DistanceStats]) -> Vec<u8> {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(STATS_HEADER).expect("in-memory write");
        for s in stats {
            w.write_record([
                s.distance.to_string(),
                s.mean_rss.to_string(),
                s.sd.to_string(),
                s.prr.map(|p| p.to_string()).unwrap_or_default(),
                s.n.to_string(),
            ])
            .expect("in-memory write");
        }
        w.flush().expect("in-memory flush");
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optional_prr() {
        let rows =
            load_stats_csv(b"distance_m,mean_dbm,sd_db,prr_pct,n\n3,-70.5,4.1,,12\n").unwrap();
        assert_eq!(rows[0].prr, None);
        assert_eq!(rows[0].n, 12);
        assert_eq!(
            save_stats_csv(&rows),
            b"distance_m,mean_dbm,sd_db,prr_pct,n\n3,-70.5,4.1,,12\n"
        );
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            load_stats_csv(b"distance_m,mean_dbm,sd_db,prr_pct,n\n3,-70.5,-1,,12\n"),
            Err(Error::Validation { line: 2, .. })
        ));
        assert!(matches!(
            load_stats_csv(b"distance_m,mean_dbm,sd_db,prr_pct,n\n3,-70.5,1,101,12\n"),
            Err(Error::Validation { line: 2, .. })
        ));
        assert!(matches!(
            load_stats_csv(b"distance_m,mean_dbm,sd_db,prr_pct,n\n3,-70.5,1,99,0\n"),
            Err(Error::Validation { line: 2, .. })
        ));
        assert!(matches!(
            load_stats_csv(b"distance_m,mean_dbm,sd_db,prr_pct,n\n3,-70.5,1,99,2.5\n"),
            Err(Error::Parse {
                line: 2,
                column: 5,
                ..
            })
        ));
        assert!(matches!(
            load_stats_csv(b"distance_m,mean_dbm,sd_db,prr,n\n"),
            Err(Error::Format { line: 1, .. })
        ));
    }
}
