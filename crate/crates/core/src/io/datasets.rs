//! Reference surveys from a 2.4 GHz ZigBee campaign in an underground
//! longwall coal mine (GDK 10A incline, SCCL, Godavari valley coalfield).
//!
//! Values are transcribed digit-for-digit from the published tables. Only
//! per-distance statistics were published; every row records the stated 20
//! readings per position.

use crate::error::{Error, Result};
use crate::estimation::DistanceStats;

/// Distance span (m) over which a link was observed to work in a range test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeTest {
    pub min_m: f64,
    pub max_m: f64,
}

/// Fit results published alongside a dataset, for side-by-side comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedFit {
    pub eta: f64,
    /// `[a, b, c, e, f]`.
    pub sigma_coeffs: [f64; 5],
    pub r2: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub name: &'static str,
    pub stats: Vec<DistanceStats>,
    pub range_test: Option<RangeTest>,
    pub provenance: &'static str,
    pub published: Option<PublishedFit>,
}

const READINGS_PER_POSITION: u32 = 20;

// (distance m, mean RSSI dBm, SD dB, PRR %)
const LONGWALL: [(f64, f64, f64, f64); 20] = [
    (1.0, -51.65, 0.48936, 100.0),
    (2.0, -57.65, 2.00722, 100.0),
    (3.0, -71.5, 4.54799, 96.59),
    (4.0, -69.8, 3.67924, 96.76),
    (5.0, -73.95, 5.78996, 96.29),
    (6.0, -76.1, 4.93004, 95.83),
    (7.0, -76.85, 5.83343, 95.7),
    (8.0, -78.45, 6.88665, 95.07),
    (9.0, -80.25, 6.04261, 95.08),
    (10.0, -76.55, 6.60522, 95.45),
    (11.0, -76.8, 5.94491, 95.65),
    (12.0, -81.15, 4.56828, 93.92),
    (13.0, -80.95, 3.64872, 93.89),
    (14.0, -81.85, 4.22119, 93.9),
    (15.0, -79.35, 3.54334, 94.2),
    (16.0, -80.95, 4.20443, 93.77),
    (17.0, -82.6, 4.87097, 92.71),
    (18.0, -81.6, 3.93901, 93.85),
    (19.0, -84.15, 4.51051, 90.05),
    (20.0, -86.85, 4.88041, 86.2),
];

const GATEROAD: [(f64, f64, f64, f64); 20] = [
    (1.0, -54.2857, 3.48056, 99.37),
    (2.0, -60.0952, 1.92106, 99.3),
    (3.0, -68.5714, 7.59402, 95.73),
    (4.0, -67.0476, 7.89087, 95.22),
    (5.0, -67.0, 7.75887, 96.19),
    (6.0, -73.0, 4.12311, 96.04),
    (7.0, -73.6667, 6.5904, 95.98),
    (8.0, -70.6191, 5.45414, 96.53),
    (9.0, -73.1905, 6.14261, 95.9),
    (10.0, -68.2381, 5.76052, 96.3),
    (11.0, -66.1905, 4.44491, 97.24),
    (12.0, -69.5714, 3.35517, 96.83),
    (13.0, -69.0, 3.6606, 96.89),
    (14.0, -75.0, 5.12119, 95.5),
    (15.0, -75.3333, 4.23478, 95.81),
    (16.0, -79.8095, 4.7394, 94.0),
    (17.0, -75.5714, 3.99464, 95.14),
    (18.0, -76.5714, 5.59081, 94.63),
    (19.0, -74.5455, 5.41363, 94.99),
    (20.0, -83.0, 5.54076, 92.8),
];

const NAMES: [&str; 3] = ["longwall-face", "gateroad-conveyor", "mine-car-pathway"];

fn table(rows: &[(f64, f64, f64, f64)]) -> Vec<DistanceStats> {
    rows.iter()
        .map(|&(distance, mean_rss, sd, prr)| DistanceStats {
            distance,
            mean_rss,
            sd,
            n: READINGS_PER_POSITION,
            prr: Some(prr),
        })
        .collect()
}

pub fn dataset_names() -> &'static [&'static str] {
    &NAMES
}

pub fn embedded_dataset(name: &str) -> Result<DatasetRecord> {
    let record = match name {
        "longwall-face" => DatasetRecord {
            name: NAMES[0],
            stats: table(&LONGWALL),
            range_test: Some(RangeTest {
                min_m: 40.0,
                max_m: 45.0,
            }),
            provenance: "Longwall face, GDK 10A incline: transmitter at the face start beside \
                         the powered roof supports, 1.5 m above floor; static, line-of-sight \
                         readings at 1-20 m in 1 m steps, 2.4 GHz XBee series-1 pair.",
            published: Some(PublishedFit {
                eta: 2.14,
                sigma_coeffs: [2.626e-6, 6.176e-3, -0.2276, 2.403, -1.721],
                r2: 0.8332,
                rmse: 0.6958,
            }),
        },
        "gateroad-conveyor" => DatasetRecord {
            name: NAMES[1],
            stats: table(&GATEROAD),
            range_test: Some(RangeTest {
                min_m: 60.0,
                max_m: 65.0,
            }),
            provenance: "Gate-road beside the running belt conveyor, GDK 10A incline: \
                         transmitter 1 m above floor and 0.5 m from the belt; readings at \
                         1-20 m along the passage, 2.4 GHz XBee series-1 pair. Several means \
                         (e.g. -54.2857) are multiples of 1/21, hinting at 21 readings at \
                         some positions; n is recorded as the stated 20.",
            published: Some(PublishedFit {
                eta: 1.568,
                sigma_coeffs: [-6.685e-4, 0.3418e-1, -0.5813, 3.599, -0.4563],
                r2: 0.474,
                rmse: 1.281,
            }),
        },
        "mine-car-pathway" => DatasetRecord {
            name: NAMES[2],
            stats: Vec::new(),
            range_test: Some(RangeTest {
                min_m: 75.0,
                max_m: 85.0,
            }),
            provenance: "Inclined mine-car pathway, GDK 10A incline: range test only, no \
                         RSSI table was published.",
            published: None,
        },
        other => {
            return Err(Error::NotFound {
                name: other.to_owned(),
                available: NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(record)
}

pub fn all_datasets() -> Vec<DatasetRecord> {
    NAMES
        .iter()
        .map(|n| embedded_dataset(n).expect("registered name"))
        .collect()
}
