//! Property tests of index, merger, statistics and clustering invariants.

use market_concentration::bands::classify_hhi;
use market_concentration::clustering::{kmeans, FeaturePoint, KMeansConfig};
use market_concentration::indices::{
    cci, concentration_ratio, dominance_general, hhi, hhi_points, index_report, rosenbluth,
    RosenbluthVariant,
};
use market_concentration::market::{MarketSnapshot, RenormalizePolicy};
use market_concentration::merger::merge_firms;
use market_concentration::stats::{describe, five_number, ols_fit, pearson_r2, LabeledValue};
use proptest::prelude::*;

const EPS: f64 = 1e-12;

fn counts() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1000.0_f64, 1..40)
        .prop_filter("positive total", |v| v.iter().sum::<f64>() > 1e-6)
}

fn snapshot(counts: &[f64]) -> MarketSnapshot {
    MarketSnapshot::from_counts(
        counts
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("f{i:02}"), *c)),
        "m",
        "",
    )
    .unwrap()
}

fn labeled(values: &[f64]) -> Vec<LabeledValue> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| LabeledValue::new(format!("p{i:02}"), *v))
        .collect()
}

fn points() -> impl Strategy<Value = Vec<FeaturePoint>> {
    prop::collection::vec((0.0..1.0_f64, 0.0..1.0_f64), 3..12).prop_map(|xy| {
        xy.into_iter()
            .enumerate()
            .map(|(i, (x, y))| FeaturePoint::new(format!("p{i:02}"), vec![x, y]))
            .collect()
    })
}

proptest! {
    #[test]
    fn hhi_and_cci_bounds(c in counts()) {
        let s = snapshot(&c);
        let (h, k) = (hhi(&s), cci(&s));
        prop_assert!(h >= 1.0 / s.n() as f64 - EPS && h <= 1.0 + EPS);
        prop_assert!(h <= k + EPS && k <= 1.0 + EPS);
        prop_assert!((dominance_general(&s, 1.0).unwrap() - h).abs() <= EPS);
    }

    #[test]
    fn concentration_ratio_is_monotone(c in counts()) {
        let s = snapshot(&c);
        let crs: Vec<f64> = (1..=s.n()).map(|k| concentration_ratio(&s, k).unwrap().value).collect();
        prop_assert!(crs.windows(2).all(|w| w[1] >= w[0] - EPS));
        prop_assert_eq!(*crs.last().unwrap(), 1.0);
    }

    #[test]
    fn rosenbluth_bounds_and_zero_padding(c in counts(), pad in 1usize..5) {
        let s = snapshot(&c);
        let b = rosenbluth(&s, RosenbluthVariant::Standard).unwrap();
        prop_assert!(b >= 1.0 / s.n() as f64 - EPS && b <= 1.0 + EPS);
        let mut padded = c.clone();
        padded.extend(std::iter::repeat_n(0.0, pad));
        let bp = rosenbluth(&snapshot(&padded), RosenbluthVariant::Standard).unwrap();
        prop_assert!((b - bp).abs() <= EPS);
        prop_assert_eq!(rosenbluth(&s, RosenbluthVariant::PaperLiteral).unwrap(), 1.0);
    }

    #[test]
    fn indices_are_scale_invariant(c in counts(), scale in 0.01..1000.0_f64) {
        let s = snapshot(&c);
        let a = index_report(&s).unwrap();
        let scaled: Vec<f64> = c.iter().map(|x| x * scale).collect();
        let from_shares = MarketSnapshot::from_shares(
            s.firms().iter().map(|f| (f.firm_id.clone(), f.share)),
            "m",
            "",
            RenormalizePolicy::Strict,
        )
        .unwrap();
        for b in [index_report(&snapshot(&scaled)).unwrap(), index_report(&from_shares).unwrap()] {
            prop_assert!((a.hhi - b.hhi).abs() <= EPS);
            prop_assert!((a.di - b.di).abs() <= EPS);
            prop_assert!((a.cci - b.cci).abs() <= EPS);
            prop_assert!((a.rosenbluth_standard - b.rosenbluth_standard).abs() <= EPS);
            for (k, v) in &a.cr {
                prop_assert!((v - b.cr[k]).abs() <= EPS);
            }
        }
    }

    #[test]
    fn counts_are_reconstructed(c in counts()) {
        let s = snapshot(&c);
        let total: f64 = c.iter().sum();
        for (i, count) in c.iter().enumerate() {
            let back = s.share_of(&format!("f{i:02}")).unwrap() * total;
            prop_assert!((back - count).abs() <= 1e-9 * count.max(1e-300));
        }
    }

    #[test]
    fn snapshot_ignores_input_order(c in counts(), seed in any::<u64>()) {
        let entries: Vec<(String, f64)> =
            c.iter().enumerate().map(|(i, v)| (format!("f{i:02}"), *v)).collect();
        let mut shuffled = entries.clone();
        let len = shuffled.len();
        shuffled.rotate_left((seed as usize) % len);
        shuffled.reverse();
        let a = MarketSnapshot::from_counts(entries, "m", "").unwrap();
        let b = MarketSnapshot::from_counts(shuffled, "m", "").unwrap();
        prop_assert_eq!(&a, &b);
        let rebuilt = MarketSnapshot::from_shares(
            a.firms().iter().map(|f| (f.firm_id.clone(), f.share)),
            "m",
            "",
            RenormalizePolicy::Strict,
        )
        .unwrap();
        prop_assert_eq!(rebuilt.firms(), a.firms());
    }

    #[test]
    fn merger_delta_and_band_monotonicity(c in counts().prop_filter("two firms", |v| v.len() >= 2), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let s = snapshot(&c);
        let a = i.index(s.n());
        let mut b = j.index(s.n() - 1);
        if b >= a {
            b += 1;
        }
        let (fa, fb) = (&s.firms()[a].firm_id, &s.firms()[b].firm_id);
        let (post, v) = merge_firms(&s, fa, fb).unwrap();
        let expected = 2.0 * s.firms()[a].share * s.firms()[b].share;
        prop_assert!((v.delta - expected).abs() <= EPS);
        prop_assert_eq!(post.n(), s.n() - 1);
        prop_assert!(cci(&post) >= cci(&s) - EPS);
        let before = classify_hhi(hhi_points(&s)).unwrap();
        let after = classify_hhi(hhi_points(&post)).unwrap();
        prop_assert!(after >= before);
    }

    #[test]
    fn ols_recovers_exact_line(
        xs in prop::collection::vec(-100.0..100.0_f64, 3..30),
        slope in -10.0..10.0_f64,
        intercept in -10.0..10.0_f64,
    ) {
        prop_assume!(xs.iter().any(|x| (x - xs[0]).abs() > 1e-3));
        prop_assume!(slope.abs() > 1e-3);
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
        let fit = ols_fit(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() <= 1e-9);
        prop_assert!((fit.intercept - intercept).abs() <= 1e-9);
        prop_assert!((fit.r2 - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn r2_symmetric_and_affine_invariant(
        xy in prop::collection::vec((-10.0..10.0_f64, -10.0..10.0_f64), 3..30),
        a in 0.1..10.0_f64,
        shift in -10.0..10.0_f64,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-3));
        prop_assume!(y.iter().any(|v| (v - y[0]).abs() > 1e-3));
        let r = pearson_r2(&x, &y).unwrap();
        prop_assert!((r - pearson_r2(&y, &x).unwrap()).abs() <= 1e-9);
        let moved: Vec<f64> = x.iter().map(|v| -a * v + shift).collect();
        prop_assert!((r - pearson_r2(&moved, &y).unwrap()).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn describe_translation(values in prop::collection::vec(-100.0..100.0_f64, 2..30), shift in -100.0..100.0_f64) {
        let a = describe(&values).unwrap();
        let moved: Vec<f64> = values.iter().map(|v| v + shift).collect();
        let b = describe(&moved).unwrap();
        prop_assert!((b.mean - a.mean - shift).abs() <= 1e-9);
        prop_assert!((b.sample_std - a.sample_std).abs() <= 1e-9);
    }

    #[test]
    fn outliers_ignore_order(values in prop::collection::vec(-100.0..100.0_f64, 3..30), rot in any::<usize>()) {
        let series = labeled(&values);
        let mut shuffled = series.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        shuffled.reverse();
        prop_assert_eq!(five_number(&series).unwrap(), five_number(&shuffled).unwrap());
    }

    #[test]
    fn kmeans_result_is_a_lloyd_fixed_point(pts in points(), k in 1usize..4) {
        let r = kmeans(&pts, &KMeansConfig::new(k).with_restarts(10)).unwrap();
        for c in 0..k {
            let members: Vec<&FeaturePoint> =
                pts.iter().filter(|p| r.assignment[&p.label] == c).collect();
            prop_assert!(!members.is_empty());
            for d in 0..2 {
                let m = members.iter().map(|p| p.coords[d]).sum::<f64>() / members.len() as f64;
                prop_assert!((m - r.centroids[c][d]).abs() <= 1e-9);
            }
        }
        let dist = |p: &FeaturePoint, c: &[f64]| (p.coords[0] - c[0]).powi(2) + (p.coords[1] - c[1]).powi(2);
        for p in &pts {
            let own = dist(p, &r.centroids[r.assignment[&p.label]]);
            prop_assert!(r.centroids.iter().all(|c| own <= dist(p, c) + 1e-12));
        }
    }

    #[test]
    fn kmeans_ignores_input_order(pts in points(), k in 1usize..4, seed in any::<u64>()) {
        let config = KMeansConfig::new(k).with_restarts(10).with_seed(seed);
        let mut reversed = pts.clone();
        reversed.reverse();
        prop_assert_eq!(kmeans(&pts, &config).unwrap(), kmeans(&reversed, &config).unwrap());
    }
}
