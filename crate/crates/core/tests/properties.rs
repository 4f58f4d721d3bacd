use proptest::prelude::*;

use wtpc_core::curves::spline::bspline_basis;
use wtpc_core::curves::{constrained_samples, fit, ModelClass, ModelSpec, Support};
use wtpc_core::estimation::mse_lower_bound;
use wtpc_core::scada::{clean, OperationalState, Sample, ScadaRecord, SAMPLING_STEP_MINUTES};
use wtpc_core::synthetic::defect_free_base;

fn record_strategy() -> impl Strategy<Value = (u32, i32, f64, u8)> {
    (0u32..3, 40i32..60, -50.0f64..2500.0, 0u8..20)
}

fn build(raw: &[(u32, i32, f64, u8)]) -> Vec<ScadaRecord> {
    let mut t = 0i64;
    raw.iter()
        .map(|&(gap, wind, power, flag)| {
            t += (gap as i64 + 1) * SAMPLING_STEP_MINUTES;
            ScadaRecord {
                timestamp: t,
                wind: (flag != 1).then_some(wind as f64 / 10.0),
                angle: Some(0.0),
                temperature: Some(12.0),
                power: Some((power * 10.0).round() / 10.0),
                state: Some(if flag == 2 { OperationalState::Stopped } else { OperationalState::Normal }),
            }
        })
        .collect()
}

fn keys(samples: &[Sample]) -> Vec<i64> {
    samples.iter().map(|s| s.timestamp).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn report_accounts_for_every_slot(raw in prop::collection::vec(record_strategy(), 10..200)) {
        let records = build(&raw);
        if let Ok(d) = clean(&records, 3.0) {
            let r = d.report();
            prop_assert_eq!(r.raw - r.retained, r.discarded());
            prop_assert_eq!(r.retained, d.len());
            prop_assert!(r.proportion() > 0.0 && r.proportion() <= 1.0);
            prop_assert!(d.samples().windows(2).all(|w| w[0].timestamp < w[1].timestamp));
        }
    }

    #[test]
    fn wider_whiskers_never_remove_more(raw in prop::collection::vec(record_strategy(), 10..200), k in 0.1f64..4.0, dk in 0.0f64..3.0) {
        let records = build(&raw);
        if let (Ok(narrow), Ok(wide)) = (clean(&records, k), clean(&records, k + dk)) {
            prop_assert!(wide.report().outliers <= narrow.report().outliers);
            let kept = keys(wide.samples());
            prop_assert!(keys(narrow.samples()).iter().all(|t| kept.binary_search(t).is_ok()));
        }
    }

    #[test]
    fn second_pass_finds_no_new_defects_of_the_first_three_kinds(raw in prop::collection::vec(record_strategy(), 10..200)) {
        let records = build(&raw);
        if let Ok(first) = clean(&records, 3.0) {
            if let Ok(second) = clean(&first.to_records(), 3.0) {
                let r = second.report();
                prop_assert_eq!(r.incomplete, 0);
                prop_assert_eq!(r.not_normal, 0);
                let kept = first.samples();
                let span = (kept[kept.len() - 1].timestamp - kept[0].timestamp) / SAMPLING_STEP_MINUTES + 1;
                prop_assert_eq!(r.raw, span as usize);
                prop_assert_eq!(r.missing, span as usize - kept.len());
            }
        }
    }

    #[test]
    fn cleaning_is_idempotent_at_its_fixpoint(raw in prop::collection::vec(record_strategy(), 30..200)) {
        let records = build(&raw);
        if let Ok(base) = defect_free_base(&records, 3.0) {
            let once = clean(&base, 3.0).unwrap();
            prop_assert_eq!(once.report().discarded(), 0);
            let twice = clean(&once.to_records(), 3.0).unwrap();
            prop_assert_eq!(twice.samples(), once.samples());
            prop_assert_eq!(twice.report().discarded(), 0);
        }
    }

    #[test]
    fn basis_is_a_partition_of_unity(mut inner in prop::collection::vec(3.5f64..15.0, 0..25), x in 3.5f64..=15.0) {
        inner.sort_by(f64::total_cmp);
        let mut knots = vec![3.5; 4];
        knots.extend(inner);
        knots.extend([15.0; 4]);
        let mut total = 0.0;
        for i in 1..=knots.len() - 4 {
            let b = bspline_basis(i, &knots, 3, x).unwrap();
            prop_assert!(b >= 0.0);
            total += b;
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_ignores_record_order(raw in prop::collection::vec((35i32..150, -50.0f64..2500.0), 2..300), seed in any::<u64>()) {
        let samples: Vec<Sample> = raw
            .iter()
            .enumerate()
            .map(|(i, &(w, p))| Sample { timestamp: i as i64, wind: w as f64 / 10.0, angle: 0.0, temperature: 0.0, power: p })
            .collect();
        let mut shuffled = samples.clone();
        let n = shuffled.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let a = mse_lower_bound(&samples).unwrap();
        let b = mse_lower_bound(&shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn fits_never_beat_the_lower_bound(raw in prop::collection::vec((20i32..200, 0.0f64..2000.0), 60..400), order in 1usize..6) {
        let samples: Vec<Sample> = raw
            .iter()
            .enumerate()
            .map(|(i, &(w, p))| Sample { timestamp: i as i64, wind: w as f64 / 10.0, angle: 0.0, temperature: 0.0, power: p })
            .collect();
        let bound = mse_lower_bound(&constrained_samples(&samples, &Support::default()).unwrap()).unwrap();
        for class in [ModelClass::PiecewiseLinear, ModelClass::Polynomial, ModelClass::BSpline] {
            let Ok(spec) = ModelSpec::new(class, order + 3) else { continue };
            if let Ok(model) = fit(&spec, &samples) {
                prop_assert!(model.train_mse() >= bound * (1.0 - 1e-9), "{:?} {} < {}", class, model.train_mse(), bound);
            }
        }
    }
}
