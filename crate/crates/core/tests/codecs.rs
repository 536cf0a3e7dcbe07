use proptest::prelude::*;
use sha2::{Digest, Sha256};

use shadowcal::domain::{ShadowedPathLossModel, SigmaModel, SigmaPolynomial};
use shadowcal::estimation::DistanceStats;
use shadowcal::io::{
    embedded_dataset, load_stats_csv, load_survey_csv, model_from_json, model_to_json,
    save_stats_csv, save_survey_csv, RssiSurvey, SurveyRow,
};
use shadowcal::simulation::{simulate_survey, SimulationSpec};

const LONGWALL_CSV: &[u8] = include_bytes!("fixtures/longwall-face.csv");
const GATEROAD_CSV: &[u8] = include_bytes!("fixtures/gateroad-conveyor.csv");

const LONGWALL_SHA256: &str = "29df453cdf2827f41ce2e7d09409f63e2e27c05b592164c452fa10c781c99b0e";
const GATEROAD_SHA256: &str = "6822553c9df409c23caa66612a143a1addc1730f1b862cdd23de538d59800c26";

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn embedded_tables_export_canonically() {
    for (name, fixture, digest) in [
        ("longwall-face", LONGWALL_CSV, LONGWALL_SHA256),
        ("gateroad-conveyor", GATEROAD_CSV, GATEROAD_SHA256),
    ] {
        let exported = save_stats_csv(&embedded_dataset(name).unwrap().stats);
        assert_eq!(
            std::str::from_utf8(&exported).unwrap(),
            std::str::from_utf8(fixture).unwrap()
        );
        assert_eq!(sha256_hex(&exported), digest);
        assert_eq!(
            load_stats_csv(fixture).unwrap(),
            embedded_dataset(name).unwrap().stats
        );
    }
    let text = std::str::from_utf8(LONGWALL_CSV).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert_eq!(text.lines().nth(1), Some("1,-51.65,0.48936,100,20"));
}

#[test]
fn simulated_survey_round_trips() {
    let spec = SimulationSpec {
        model: ShadowedPathLossModel::new(1.0, -45.0, 2.3, SigmaModel::Constant(3.1)).unwrap(),
        distances: (1..=20).map(f64::from).collect(),
        samples_per_distance: 20,
        seed: 11,
    };
    let survey = simulate_survey(&spec).unwrap();
    assert_eq!(survey.sample_count(), 400);
    assert_eq!(load_survey_csv(&save_survey_csv(&survey)).unwrap(), survey);
}

#[test]
fn longwall_model_document_round_trips() {
    let ds = embedded_dataset("longwall-face").unwrap();
    let cal = shadowcal::estimation::calibrate(&ds.stats, &Default::default()).unwrap();
    let json = model_to_json(&cal.model);
    assert_eq!(model_from_json(&json).unwrap(), cal.model);
}

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    // Mix round decimals with full-precision values.
    prop_oneof![
        (lo..hi),
        ((lo * 100.0) as i64..(hi * 100.0) as i64).prop_map(|v| v as f64 / 100.0),
    ]
}

fn survey_strategy() -> impl Strategy<Value = RssiSurvey> {
    let row = (
        finite(0.01, 500.0),
        prop::collection::vec(finite(-130.0, 10.0), 1..6),
    );
    ("[a-zA-Z0-9 ,\"_-]{0,12}", prop::collection::vec(row, 1..8)).prop_filter_map(
        "positive distances",
        |(site, rows)| {
            let rows = rows
                .into_iter()
                .filter(|(d, _)| *d > 0.0)
                .map(|(distance, samples)| SurveyRow { distance, samples })
                .collect::<Vec<_>>();
            RssiSurvey::new(site, rows).ok()
        },
    )
}

fn stats_strategy() -> impl Strategy<Value = Vec<DistanceStats>> {
    let row = (
        finite(0.01, 500.0),
        finite(-130.0, 10.0),
        finite(0.0, 20.0),
        1u32..10_000,
        prop::option::of(finite(0.0, 100.0)),
    );
    prop::collection::vec(row, 0..25).prop_map(|rows| {
        rows.into_iter()
            .filter_map(|(d, m, s, n, p)| DistanceStats::new(d, m, s.abs(), n, p).ok())
            .collect()
    })
}

fn model_strategy() -> impl Strategy<Value = ShadowedPathLossModel> {
    let sigma = prop_oneof![
        finite(0.0, 15.0).prop_map(SigmaModel::Constant),
        (
            prop::array::uniform5(-10.0..10.0f64),
            finite(0.1, 10.0),
            finite(0.5, 200.0)
        )
            .prop_map(|(c, lo, span)| SigmaModel::Polynomial(
                SigmaPolynomial::new(c, lo, lo + span).unwrap()
            )),
    ];
    (
        finite(0.1, 100.0),
        finite(-120.0, 0.0),
        finite(-1.0, 6.0),
        sigma,
    )
        .prop_map(|(d0, rss, eta, sigma)| ShadowedPathLossModel::new(d0, rss, eta, sigma).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn survey_csv_round_trip(survey in survey_strategy()) {
        prop_assert_eq!(load_survey_csv(&save_survey_csv(&survey)).unwrap(), survey);
    }

    #[test]
    fn stats_csv_round_trip(stats in stats_strategy()) {
        let bytes = save_stats_csv(&stats);
        prop_assert_eq!(load_stats_csv(&bytes).unwrap(), stats);
    }

    #[test]
    fn model_json_round_trip(model in model_strategy()) {
        prop_assert_eq!(model_from_json(&model_to_json(&model)).unwrap(), model);
    }
}
