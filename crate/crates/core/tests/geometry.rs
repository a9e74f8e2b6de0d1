use antitree_core::geometry::{
    binomial, zd_brute_force, zd_edges_in, zd_hopping, zd_points_with_zeros_shifted, zd_shell_counts,
};
use antitree_core::GrowthLaw;
use proptest::prelude::*;

#[test]
fn formula_matches_enumeration() {
    for d in 2..=4u32 {
        for n in 1..=8u64 {
            assert_eq!(zd_shell_counts(d, n).unwrap(), zd_brute_force(d, n).unwrap(), "d={d} n={n}");
        }
    }
}

#[test]
fn edges_counted_from_both_ends() {
    for d in 2..=4u32 {
        for n in 1..=8u64 {
            assert_eq!(zd_shell_counts(d, n).unwrap().edge_count_out, zd_edges_in(d, n).unwrap());
        }
    }
}

#[test]
fn shifted_formula_disagrees_only_in_the_middle() {
    for d in 2..=4u32 {
        for n in d as u64..=8 {
            let data = zd_brute_force(d, n).unwrap();
            for k in 0..=d {
                let same = zd_points_with_zeros_shifted(d, n, k) == data.by_zero_count[k as usize];
                if k == 0 || k + 1 >= d {
                    assert!(same, "d={d} n={n} k={k}");
                }
            }
        }
    }
    assert_ne!(zd_points_with_zeros_shifted(3, 3, 1), zd_brute_force(3, 3).unwrap().by_zero_count[1]);
}

#[test]
fn hopping_converges_quadratically() {
    for d in [2u32, 3] {
        let ns: Vec<f64> = (10..=200).map(|n| n as f64).collect();
        let devs: Vec<f64> = (10..=200u64).map(|n| (zd_hopping(d, n).unwrap() - d as f64).abs()).collect();
        let lx: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
        let ly: Vec<f64> = devs.iter().map(|v| v.ln()).collect();
        let mx = lx.iter().sum::<f64>() / lx.len() as f64;
        let my = ly.iter().sum::<f64>() / ly.len() as f64;
        let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / lx.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!(-slope >= 1.9, "d={d} exponent {}", -slope);
    }
}

#[test]
fn hopping_deviation_sums_have_cauchy_tails() {
    for d in [2u32, 3] {
        let mut partial = 0.0;
        let mut sums = Vec::new();
        for n in 2..=4000u64 {
            partial += (zd_hopping(d, n).unwrap() - d as f64).abs();
            sums.push((n, partial));
        }
        let at = |n: u64| sums.iter().find(|s| s.0 == n).unwrap().1;
        for n in [250u64, 500, 1000, 2000] {
            let tail = at(2 * n) - at(n);
            assert!(tail * n as f64 <= 2.0, "d={d} n={n} tail={tail}");
        }
    }
}

#[test]
fn leading_asymptotics() {
    for d in [2u32, 3] {
        let s = zd_shell_counts(d, 200).unwrap().s_n as f64;
        let fact: f64 = (1..d).map(f64::from).product();
        let lead = 2f64.powi(d as i32) * 200f64.powi(d as i32 - 1) / fact;
        assert!((s / lead - 1.0).abs() < 0.02);
    }
}

#[test]
fn binomial_table() {
    assert_eq!(binomial(10, 3), 120);
    assert_eq!(binomial(3, 5), 0);
    assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
}

proptest! {
    #[test]
    fn weights_normalize(d in 1.0f64..4.0, c in 0.1f64..50.0, n in 1u64..300) {
        let seq = GrowthLaw::uniform_power(d, c).unwrap().shells(n).unwrap();
        prop_assert_eq!(seq.sizes[0], 1);
        for (i, w) in seq.weights.iter().enumerate() {
            let prod = (seq.sizes[i] as f64) * (seq.sizes[i + 1] as f64);
            prop_assert!((w * w * prod - 1.0).abs() < 1e-14);
        }
        prop_assert!(seq.volumes.windows(2).all(|v| v[0] < v[1]));
        prop_assert!(seq.sizes.iter().all(|&s| s >= 1));
    }

    #[test]
    fn growth_constant_is_recovered(d in 1.2f64..3.5, c in 0.5f64..5.0) {
        let law = GrowthLaw::uniform_power(d, c).unwrap();
        let n = 20_000u64;
        let target = c * (n as f64).powf(d - 1.0);
        prop_assert!((law.size(n) as f64 - target).abs() <= 0.5 + 1e-9 * target);
    }
}
