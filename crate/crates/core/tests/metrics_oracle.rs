mod common;

use common::pair_count_auc;
use jellyfuse::metrics::{metric_suite, roc_curve, ConfusionCounts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn auc_matches_pair_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..100 {
        let n = rng.random_range(2..=200);
        let mut labels: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        labels[0] = true;
        labels[1] = false;
        let coarse = trial % 2 == 0;
        let scores: Vec<f64> = labels
            .iter()
            .map(|&l| {
                let s = rng.random::<f64>() + if l { 0.3 } else { 0.0 };
                if coarse { (s * 10.0).round() / 10.0 } else { s }
            })
            .collect();
        let roc = roc_curve(&scores, &labels).unwrap();
        assert!((roc.auc - pair_count_auc(&scores, &labels)).abs() < 1e-10);
        assert_eq!(roc.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(roc.points.last(), Some(&(1.0, 1.0)));
    }
}

#[test]
fn mcc_and_f_measure_identities_on_all_small_tables() {
    let mut checked = 0;
    for tp in 0..=30u64 {
        for tn in 0..=30 - tp {
            for fp in 0..=30 - tp - tn {
                for fn_ in 0..=30 - tp - tn - fp {
                    if tp + tn + fp + fn_ == 0 {
                        continue;
                    }
                    let m = metric_suite(&ConfusionCounts::new(tp, tn, fp, fn_)).unwrap();
                    let (tp, tn, fp, fn_) = (tp as f64, tn as f64, fp as f64, fn_ as f64);
                    if tp + fp > 0.0 && tp + fn_ > 0.0 && tp > 0.0 {
                        let harmonic = 2.0 * m.precision * m.sensitivity / (m.precision + m.sensitivity);
                        assert!((m.f_measure - harmonic).abs() < 1e-12);
                        assert!((m.f_measure - 2.0 * tp / (2.0 * tp + fp + fn_)).abs() < 1e-12);
                    }
                    let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
                    if den > 0.0 {
                        let direct = (tp * tn - fp * fn_) / den.sqrt();
                        assert!((m.mcc - direct).abs() < 1e-12);
                        // MCC = sqrt(PPV·TPR·TNR·NPV) - sqrt(FDR·FNR·FPR·FOR)
                        let good = (m.precision * m.sensitivity * m.specificity * m.npv).sqrt();
                        let bad = ((1.0 - m.precision) * m.fnr * m.fpr * (1.0 - m.npv)).sqrt();
                        assert!((m.mcc - (good - bad)).abs() < 1e-12);
                        checked += 1;
                    }
                    assert!((m.accuracy - (tp + tn) / (tp + tn + fp + fn_)).abs() < 1e-15);
                }
            }
        }
    }
    assert!(checked > 10_000);
}
