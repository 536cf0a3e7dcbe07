use proptest::prelude::*;

use shadowcal::domain::{ShadowedPathLossModel, SigmaModel, SigmaPolynomial};
use shadowcal::estimation::{fit_path_loss, goodness_of_fit, DistanceStats, InterceptMode};
use shadowcal::localization::{confidence_interval, estimate_distance};
use shadowcal::numerics::{
    ols_line, polyfit_quartic, solve_dense, solve_orthogonal, stationarity_sums, DenseSystem,
};

fn eval(c: &[f64; 5], d: f64) -> f64 {
    c.iter().fold(0.0, |acc, &k| acc * d + k)
}

#[test]
fn inversion_round_trip_on_log_grid() {
    for eta in [0.5, 1.0, 2.0, 2.14, 4.0] {
        let m = ShadowedPathLossModel::new(1.0, -51.65, eta, SigmaModel::Constant(0.0)).unwrap();
        for i in 0..50 {
            let d = 10f64.powf(2.0 * i as f64 / 49.0);
            let back = estimate_distance(&m, m.predict_mean_rss(d).unwrap()).unwrap();
            assert!(
                ((back - d) / d).abs() <= 1e-9,
                "eta={eta} d={d} back={back}"
            );
        }
    }
}

proptest! {
    #[test]
    fn solve_agrees_with_orthogonal_route(
        entries in prop::collection::vec(-10.0..10.0f64, 16),
        rhs in prop::collection::vec(-10.0..10.0f64, 4),
    ) {
        let mut rows: Vec<Vec<f64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] += 25.0;
        }
        let sys = DenseSystem::new(rows, rhs).unwrap();
        let (x, diag) = solve_dense(&sys).unwrap();
        prop_assume!(diag.condition_estimate < 1e10);
        let q = solve_orthogonal(&sys).unwrap();
        let num = x.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let den = q.iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!(num <= 1e-6 * den.max(f64::MIN_POSITIVE));
        let ax = sys.apply(&x);
        let res = ax.iter().zip(sys.rhs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let bn = sys.rhs().iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!(res <= 1e-10 * (sys.norm_inf() * xn + bn));
    }

    #[test]
    fn quartic_reproduces_generating_polynomial(
        a in -1e-4..1e-4f64, b in -1e-3..1e-3f64, c in -1e-2..1e-2f64,
        e in -1.0..1.0f64, f in -1.0..1.0f64,
    ) {
        let truth = [a, b, c, e, f];
        let d: Vec<f64> = (1..=20).map(f64::from).collect();
        let y: Vec<f64> = d.iter().map(|&v| eval(&truth, v)).collect();
        let fit = polyfit_quartic(&d, &y).unwrap();
        for &v in &d {
            prop_assert!((eval(&fit.coeffs, v) - eval(&truth, v)).abs() <= 1e-6);
        }
    }

    #[test]
    fn quartic_is_stationary(
        y in prop::collection::vec(0.0..10.0f64, 6..30),
        spacing in 0.2..2.0f64,
    ) {
        let d: Vec<f64> = (1..=y.len()).map(|i| i as f64 * spacing).collect();
        let fit = polyfit_quartic(&d, &y).unwrap();
        for s in stationarity_sums(&d, &y, &fit.coeffs) {
            prop_assert!(s.abs() <= 1e-6, "{}", s);
        }
    }

    #[test]
    fn line_slope_ignores_offsets(
        pts in prop::collection::vec((0.0..30.0f64, -100.0..-40.0f64), 3..25),
        offset in -50.0..50.0f64,
    ) {
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + offset).collect();
        let negated: Vec<f64> = y.iter().map(|v| offset - v).collect();
        if let Ok(a) = ols_line(&x, &y) {
            let b = ols_line(&x, &shifted).unwrap();
            let c = ols_line(&x, &negated).unwrap();
            prop_assert!((a.slope - b.slope).abs() <= 1e-9 * (1.0 + a.slope.abs()));
            prop_assert!((a.slope + c.slope).abs() <= 1e-9 * (1.0 + a.slope.abs()));
        }
    }

    #[test]
    fn exponent_unchanged_by_rss_offset(
        means in prop::collection::vec(-95.0..-40.0f64, 3..20),
        offset in -30.0..30.0f64,
    ) {
        let stats: Vec<DistanceStats> = means.iter().enumerate()
            .map(|(i, &m)| DistanceStats::new(i as f64 + 1.0, m, 1.0, 20, None).unwrap())
            .collect();
        let shifted: Vec<DistanceStats> = stats.iter()
            .map(|s| DistanceStats { mean_rss: s.mean_rss + offset, ..*s })
            .collect();
        let (a, ra) = fit_path_loss(&stats, 1.0, InterceptMode::Free).unwrap();
        let (b, _) = fit_path_loss(&shifted, 1.0, InterceptMode::Free).unwrap();
        prop_assert!((a.eta() - b.eta()).abs() <= 1e-12 * (1.0 + a.eta().abs()) * 10.0);
        prop_assert!(ra.residuals.iter().sum::<f64>().abs() <= 1e-9);
    }

    #[test]
    fn r2_matches_one_line_oracle(
        pairs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3..30),
    ) {
        let obs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let fit: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let g = goodness_of_fit(&obs, &fit, 1).unwrap();
        let mean = obs.iter().sum::<f64>() / obs.len() as f64;
        let oracle = 1.0 - obs.iter().zip(&fit).map(|(o, f)| (o - f).powi(2)).sum::<f64>()
            / obs.iter().map(|o| (o - mean).powi(2)).sum::<f64>();
        prop_assert!((g.r2 - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
        prop_assert!(g.r2 <= 1.0);
    }

    #[test]
    fn sigma_clamping_is_exact(d in 0.001..200.0f64, lo in 0.5..5.0f64, span in 1.0..30.0f64) {
        let p = SigmaPolynomial::new([1e-4, -3e-3, 0.02, 0.3, 1.0], lo, lo + span).unwrap();
        prop_assert_eq!(p.at(d).unwrap().value, p.at(p.clamp(d)).unwrap().value);
    }

    #[test]
    fn interval_contains_estimate_and_widens(
        eta in 0.5..4.0f64, rss in -100.0..-45.0f64, sigma in 0.0..8.0f64,
        l1 in 0.05..0.98f64, bump in 0.001..0.019f64,
    ) {
        let m = ShadowedPathLossModel::new(1.0, -45.0, eta, SigmaModel::Constant(sigma)).unwrap();
        let narrow = confidence_interval(&m, rss, l1).unwrap();
        let wide = confidence_interval(&m, rss, l1 + bump).unwrap();
        prop_assert!(narrow.d_lo <= narrow.d_hat && narrow.d_hat <= narrow.d_hi);
        prop_assert!(wide.d_lo <= narrow.d_lo && wide.d_hi >= narrow.d_hi);
        let m2 = m.with_sigma(SigmaModel::Constant(sigma + 0.5));
        let more = confidence_interval(&m2, rss, l1).unwrap();
        prop_assert!(more.d_hi - more.d_lo >= narrow.d_hi - narrow.d_lo);
        if sigma > 0.0 {
            let ratio = (narrow.d_hi / narrow.d_hat) / (narrow.d_hat / narrow.d_lo);
            prop_assert!((ratio - 1.0).abs() <= 1e-9);
        }
    }
}
