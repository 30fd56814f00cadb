use std::collections::HashMap;
use std::f64::consts::PI;

use wilson_loops::freeprob::FreeWord;
use wilson_loops::mc::{
    cos_moments, eigen_angles, estimate_word, estimate_word_with, haar_sample, haar_sample_seeded, ks_uniform,
    orthogonality_defect, plaquette_samples, rng_from_seed, word_trace, Estimate, McConfig,
};

/// Modified Bessel function of the first kind by its power series.
fn bessel_i(nu: u32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= (x / 2.0).powi(2) / (k as f64 * (k + nu) as f64);
        sum += term;
    }
    sum
}

#[test]
fn so2_haar_angles_are_uniform() {
    let mut rng = rng_from_seed(3);
    let angles: Vec<f64> = (0..10_000)
        .map(|_| {
            let q = haar_sample(2, &mut rng).unwrap();
            q[(1, 0)].atan2(q[(0, 0)])
        })
        .collect();
    let (d, p) = ks_uniform(&angles, -PI, PI);
    assert!(p > 1e-3, "D={d} p={p}");
}

#[test]
fn haar_trace_moments() {
    // For N ≥ 3, E Tr Q = 0 and E (Tr Q)² = 1.
    let mut rng = rng_from_seed(4);
    let (mut t1, mut t2) = (Vec::new(), Vec::new());
    for _ in 0..4000 {
        let q = haar_sample(5, &mut rng).unwrap();
        assert!(orthogonality_defect(&q) < 1e-10);
        assert!((q.determinant() - 1.0).abs() < 1e-9);
        t1.push(q.trace());
        t2.push(q.trace().powi(2));
    }
    let (e1, e2) = (Estimate::from_series(&t1), Estimate::from_series(&t2));
    assert!(e1.z_score(0.0).abs() < 4.0, "{e1:?}");
    assert!(e2.z_score(1.0).abs() < 4.0, "{e2:?}");
    assert_eq!(haar_sample_seeded(4, 9).unwrap(), haar_sample_seeded(4, 9).unwrap());
}

#[test]
fn so2_chain_matches_the_bessel_ratio() {
    // Q = rotation by θ with weight exp(4β cos θ), so E cos θ = I₁(4β)/I₀(4β).
    for beta in [0.15, 0.4] {
        let cfg = McConfig { n: 2, beta, burn_in: 2000, thin: 10, samples: 4000, seed: 12, ..McConfig::default() };
        let xs: Vec<f64> = plaquette_samples(&cfg).unwrap().iter().map(|q| q.trace() / 2.0).collect();
        let e = Estimate::from_series(&xs);
        let want = bessel_i(1, 4.0 * beta) / bessel_i(0, 4.0 * beta);
        assert!(e.z_score(want).abs() < 4.0, "β={beta}: {e:?} vs {want}");
    }
}

#[test]
fn conjugating_every_draw_leaves_word_traces_alone() {
    let cfg = McConfig { n: 6, beta: 0.3, burn_in: 300, thin: 5, samples: 60, seed: 5, ..McConfig::default() };
    let w: FreeWord<u8> = FreeWord::from_letters([(0, 1), (1, 2), (0, -1), (1, -1), (2, 1)]);
    let r = haar_sample_seeded(6, 77).unwrap();
    let plain = estimate_word(&w, &cfg).unwrap();
    let turned = estimate_word_with(&w, &cfg, |q| &r * q * r.transpose()).unwrap();
    assert!((plain.mean - turned.mean).abs() < 1e-9);
    let empty = estimate_word(&FreeWord::<u8>::new(), &cfg).unwrap();
    assert_eq!(empty.mean, 1.0);
}

#[test]
fn inverse_letters_use_the_transpose() {
    let a = haar_sample_seeded(4, 1).unwrap();
    let b = haar_sample_seeded(4, 2).unwrap();
    let mats = HashMap::from([(0u8, a.clone()), (1u8, b.clone())]);
    let w = FreeWord::from_letters([(0, 2), (1, -1)]);
    let want = (&a * &a * b.transpose()).trace() / 4.0;
    assert!((word_trace(&w, &mats) - want).abs() < 1e-12);
    let id = FreeWord::from_letters([(0, 1), (0, -1)]);
    assert!((word_trace(&id, &mats) - 1.0).abs() < 1e-12);
}

#[test]
fn angles_pair_up_and_match_cos_moments() {
    for n in [4, 5, 8] {
        let q = haar_sample_seeded(n, n as u64).unwrap();
        let mut t = eigen_angles(&q);
        assert_eq!(t.len(), n);
        let mut neg: Vec<f64> = t.iter().map(|x| -x).collect();
        t.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        for (a, b) in t.iter().zip(&neg) {
            // A fixed angle of π appears as π on both sides.
            assert!((a - b).abs() < 1e-8 || (a.abs() - PI).abs() < 1e-8, "{t:?}");
        }
        let m = cos_moments(&q, 4);
        for k in 1..=4 {
            let direct = t.iter().map(|x| x.cos().powi(k as i32)).sum::<f64>() / n as f64;
            assert!((m[k - 1] - direct).abs() < 1e-9);
        }
    }
}

#[test]
fn bad_configurations_are_rejected() {
    let ok = McConfig::default();
    assert!(ok.validate().is_ok());
    for bad in [
        McConfig { n: 1, ..ok.clone() },
        McConfig { thin: 0, ..ok.clone() },
        McConfig { samples: 1, ..ok.clone() },
        McConfig { proposal_scale: 0.0, ..ok.clone() },
        McConfig { beta: f64::NAN, ..ok.clone() },
    ] {
        assert!(bad.validate().is_err(), "{bad:?}");
        assert!(plaquette_samples(&bad).is_err());
    }
}
