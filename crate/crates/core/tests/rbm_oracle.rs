mod common;

use common::*;
use jellyfuse::dbn::bits_to_vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn conditionals_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let nv = rng.random_range(1..=10);
        let nh = rng.random_range(1..=10);
        let rbm = random_rbm(&mut rng, nv, nh);
        for _ in 0..4 {
            let v: Vec<f64> = (0..nv).map(|_| f64::from(rng.random::<bool>())).collect();
            let h: Vec<f64> = (0..nh).map(|_| f64::from(rng.random::<bool>())).collect();
            for (a, b) in rbm.hidden_probs(&v).unwrap().iter().zip(enumerated_hidden(&rbm, &v)) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
            for (a, b) in rbm.visible_probs(&h).unwrap().iter().zip(enumerated_visible(&rbm, &h)) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn log_partition_matches_full_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (nv, nh) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let rbm = random_rbm(&mut rng, nv, nh);
        let mut z = 0.0;
        for vb in 0..1u64 << nv {
            for hb in 0..1u64 << nh {
                z += (-rbm.energy(&bits_to_vec(vb, nv), &bits_to_vec(hb, nh))).exp();
            }
        }
        assert!((rbm.exact_log_partition().unwrap() - z.ln()).abs() < 1e-10);
    }
}

#[test]
fn cd1_estimate_is_within_three_standard_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let rbm = random_rbm(&mut rng, 3, 2);
    let raw: Vec<f64> = (0..8).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let p_data: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let exact = exact_cd1_expectation(&rbm, &p_data);
    let (mean, se) = monte_carlo(&rbm, &p_data, 14);
    for k in 0..exact.len() {
        assert!((mean[k] - exact[k]).abs() <= 3.0 * se[k], "component {k}: {} vs {} (se {})", mean[k], exact[k], se[k]);
    }
}

#[test]
fn cd1_visible_bias_is_unbiased_at_equilibrium() {
    // data drawn from the model's own marginal: the likelihood gradient is 0,
    // and so is the expected visible-bias part of CD-1
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let rbm = random_rbm(&mut rng, 3, 2);
    let log_z = rbm.exact_log_partition().unwrap();
    let p_model: Vec<f64> =
        (0..8).map(|b| (rbm.log_unnormalized_marginal(&bits_to_vec(b, 3)) - log_z).exp()).collect();
    assert!((p_model.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let exact = exact_cd1_expectation(&rbm, &p_model);
    let (mean, se) = monte_carlo(&rbm, &p_model, 16);
    for k in 6..9 {
        assert!(exact[k].abs() < 1e-12);
        assert!(mean[k].abs() <= 3.0 * se[k]);
    }
}
