use jellyfuse::activation::{bipolar_sigmoid, hyper_sig, hyper_sig_derivative, hyper_sig_rational, hyperbolic_activation};
use jellyfuse::fusion::{coefficient_cv, error_terms, fuse, improved_normalize, one_hot, ScoreBatch};
use jellyfuse::metrics::{confusion, metric_suite, run_statistics};
use jellyfuse::preprocess::{gaussian_blur, min_max_normalize, FrameBuffer};
use jellyfuse::sujfo::{boundary_reentry, Benchmark, Mode, Optimizer, SwarmConfig};
use proptest::prelude::*;

proptest! {
    #[test]
    fn hyper_sig_closed_form_matches_sum(x in -40.0f64..40.0) {
        let sum = bipolar_sigmoid(x).unwrap() + hyperbolic_activation(x).unwrap();
        prop_assert!((hyper_sig_rational(x).unwrap() - sum).abs() < 1e-12);
        prop_assert!((hyper_sig(x).unwrap() - sum).abs() < 1e-15);
    }

    #[test]
    fn hyper_sig_is_odd_bounded_and_increasing(x in -30.0f64..30.0, dx in 1e-3f64..1.0) {
        let y = hyper_sig(x).unwrap();
        prop_assert!(y > -2.0 && y < 2.0);
        prop_assert!((y + hyper_sig(-x).unwrap()).abs() < 1e-14);
        prop_assert!(hyper_sig(x + dx).unwrap() >= y);
        prop_assert!(hyper_sig_derivative(x).unwrap() > 0.0);
    }

    #[test]
    fn fused_score_is_convex(
        rows in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, any::<bool>()), 3..40)
    ) {
        let a: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let b: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let labels: Vec<bool> = rows.iter().map(|r| r.2).collect();
        let r = fuse(&ScoreBatch::new(a, b, &labels).unwrap(), 0.5).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.cv));
        for i in 0..labels.len() {
            let lo = r.sc_bigru[i].min(r.sc_dbn[i]);
            let hi = r.sc_bigru[i].max(r.sc_dbn[i]);
            prop_assert!(r.fused[i] >= lo - 1e-12 && r.fused[i] <= hi + 1e-12);
            prop_assert_eq!(r.decisions[i], r.fused[i] >= 0.5);
        }
    }

    #[test]
    fn raising_the_threshold_never_adds_positives(
        scores in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..30),
        t1 in 0.0f64..1.0, t2 in 0.0f64..1.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let labels: Vec<bool> = (0..scores.len()).map(|i| i % 2 == 0).collect();
        let batch = ScoreBatch::new(
            scores.iter().map(|s| s.0).collect(),
            scores.iter().map(|s| s.1).collect(),
            &labels,
        ).unwrap();
        let a = fuse(&batch, lo).unwrap();
        let b = fuse(&batch, hi).unwrap();
        for (x, y) in a.decisions.iter().zip(&b.decisions) {
            prop_assert!(*x || !*y);
        }
    }

    #[test]
    fn symmetric_scores_reduce_to_min_max(half in prop::collection::vec(0.0f64..0.5, 1..20)) {
        // mirrored around 0.5, so mean equals median and every local factor is 1
        let mut s: Vec<f64> = half.iter().map(|v| 0.5 - v).collect();
        s.extend(half.iter().map(|v| 0.5 + v));
        prop_assume!(s.iter().any(|&v| v != s[0]));
        let improved = improved_normalize(&s).unwrap().value;
        let plain = min_max_normalize(&s).unwrap().value;
        for (a, b) in improved.iter().zip(&plain) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn error_terms_of_one_hot_rows(labels in prop::collection::vec(any::<bool>(), 1..50)) {
        let t: Vec<[f64; 2]> = labels.iter().map(|&l| one_hot(l)).collect();
        let (ep, em) = error_terms(&t).unwrap();
        let n = (labels.len() as f64).sqrt();
        prop_assert!((ep - n).abs() < 1e-12 && (em - n).abs() < 1e-12);
        prop_assert!((coefficient_cv(ep, em).value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn confusion_rates_are_complementary(
        pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..80)
    ) {
        let d: Vec<bool> = pairs.iter().map(|p| p.0).collect();
        let l: Vec<bool> = pairs.iter().map(|p| p.1).collect();
        let c = confusion(&d, &l).unwrap();
        prop_assert_eq!(c.total(), pairs.len() as u64);
        let m = metric_suite(&c).unwrap();
        prop_assert!((-1.0..=1.0).contains(&m.mcc));
        if c.tp + c.fn_ > 0 {
            prop_assert!((m.fnr + m.sensitivity - 1.0).abs() < 1e-12);
        }
        if c.tn + c.fp > 0 {
            prop_assert!((m.fpr + m.specificity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn run_statistics_are_ordered(v in prop::collection::vec(-1e3f64..1e3, 1..40)) {
        let s = run_statistics(&v).unwrap();
        prop_assert!(s.minimum <= s.median && s.median <= s.maximum);
        prop_assert!(s.minimum <= s.mean + 1e-9 && s.mean <= s.maximum + 1e-9);
        prop_assert!(s.std_deviation >= 0.0);
    }

    #[test]
    fn boundary_reentry_lands_inside(
        x in prop::collection::vec(-50.0f64..50.0, 1..8), lo in -3.0f64..0.0, width in 0.1f64..4.0
    ) {
        let lower = vec![lo; x.len()];
        let upper = vec![lo + width; x.len()];
        for v in boundary_reentry(&x, &lower, &upper) {
            prop_assert!(v >= lo && v <= lo + width);
        }
    }

    #[test]
    fn blur_preserves_total_intensity(
        w in 3usize..12, h in 3usize..12, seed in any::<u64>(), sigma in 0.3f64..3.0, radius in 1usize..4
    ) {
        let mut state = seed | 1;
        let f = FrameBuffer::from_fn(w, h, |_, _| {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            (state % 256) as f64
        });
        let b = gaussian_blur(&f, sigma, radius).unwrap();
        prop_assert!((b.mean() - f.mean()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimizer_trace_is_monotone_and_in_bounds(seed in any::<u64>(), su in any::<bool>()) {
        let mode = if su { Mode::SuJfo } else { Mode::Baseline };
        for f in Benchmark::ALL {
            let (lower, upper) = f.bounds();
            let cfg = SwarmConfig { seed, lower, upper, max_iterations: 40, ..SwarmConfig::default() };
            let mut outside = 0usize;
            let r = Optimizer::new(cfg, mode)
                .with_observer(|s| {
                    outside += s.positions.iter().flatten().filter(|&&v| v < lower || v > upper).count();
                })
                .run(&|x: &[f64]| f.eval(x), 5)
                .unwrap();
            prop_assert_eq!(outside, 0);
            prop_assert!(r.trace.windows(2).all(|w| w[1].best_fitness <= w[0].best_fitness));
        }
    }
}
