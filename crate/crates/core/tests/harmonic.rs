use antitree_core::harmonic::{enumerate_moments, mc_moments, moment_bounds, moment_drift};
use antitree_core::rng::StreamKey;
use antitree_core::PotentialDistribution;

fn suite() -> Vec<(PotentialDistribution, f64, f64)> {
    vec![
        (PotentialDistribution::bernoulli(), 2.0, 1.0),
        (PotentialDistribution::bernoulli(), -1.7, 0.6),
        (PotentialDistribution::discrete(&[(-0.5, 0.5), (0.0, 0.25), (1.0, 0.25)]).unwrap(), 1.6, 1.0),
    ]
}

/// Direct sum over all `k^n` ordered outcomes.
fn brute_moments(d: &PotentialDistribution, e: f64, l: f64, n: u32) -> [f64; 2] {
    let atoms = d.atoms();
    let k = atoms.len();
    let h = d.harmonic_average(e, l).unwrap();
    let mut out = [0.0; 2];
    for code in 0..k.pow(n) {
        let mut c = code;
        let mut p = 1.0;
        let mut g = 0.0;
        for _ in 0..n {
            let (v, w) = atoms[c % k];
            p *= w;
            g += 1.0 / (e - l * v);
            c /= k;
        }
        let dev = n as f64 / g - h;
        out[0] += p * dev;
        out[1] += p * dev * dev;
    }
    out
}

#[test]
fn multiset_enumeration_matches_ordered_enumeration() {
    for (d, e, l) in suite() {
        for n in 1..=7 {
            let fast = enumerate_moments(&d, e, l, n).unwrap();
            let slow = brute_moments(&d, e, l, n);
            assert!((fast.moments[0] - slow[0]).abs() < 1e-12);
            assert!((fast.moments[1] - slow[1]).abs() < 1e-12);
        }
    }
}

#[test]
fn exact_moments_obey_bounds() {
    for (d, e, l) in suite() {
        for n in 1..=12u32 {
            let Ok(ex) = enumerate_moments(&d, e, l, n) else { continue };
            let b = moment_bounds(&d, e, l, n as u64).unwrap();
            assert!(ex.moments[0] * b.sign > 0.0);
            assert!(ex.moments[0].abs() <= b.m1_upper * (1.0 + 1e-12));
            assert!(ex.moments[1] >= b.m2_lo * (1.0 - 1e-12) && ex.moments[1] <= b.m2_hi * (1.0 + 1e-12));
            assert!(ex.moments[3] <= b.even_envelope(2));
        }
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    for (i, (d, e, l)) in suite().into_iter().enumerate() {
        for n in [2u64, 5, 8] {
            let r = mc_moments(&d, e, l, n, 100_000, StreamKey::new(40 + i as u64).child(n)).unwrap();
            let ex = r.exact.expect("enumerable");
            for j in 0..2 {
                let (m, se) = r.moments[j];
                assert!((m - ex.moments[j]).abs() < 4.0 * se, "law {i} n={n} j={j}: {m} ± {se} vs {}", ex.moments[j]);
            }
            assert!(r.first_moment_sign_ok && r.envelope_ok && r.fourth_moment_ok);
        }
    }
}

#[test]
fn continuous_law_flags() {
    for n in [3u64, 30, 300] {
        let r = mc_moments(&PotentialDistribution::uniform(), 1.9, 0.8, n, 20_000, StreamKey::new(n)).unwrap();
        assert!(r.exact.is_none());
        assert!(r.first_moment_sign_ok && r.envelope_ok && r.fourth_moment_ok);
    }
}

#[test]
fn scaled_moments_drift_toward_leading_terms() {
    let d = PotentialDistribution::bernoulli();
    let rows = moment_drift(&d, 2.0, 1.0, &[100, 1_000, 10_000], 50_000, StreamKey::new(9)).unwrap();
    let last = rows.last().unwrap();
    assert!((last.2 - 0.5625).abs() < 0.02);
    let n2m3: Vec<f64> = rows.iter().map(|r| r.3.abs()).collect();
    assert!(n2m3.iter().all(|v| *v < 50.0), "{n2m3:?}");
}
