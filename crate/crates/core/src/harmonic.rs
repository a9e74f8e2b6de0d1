//! Moments of the harmonic mean `M_n = n / Σ 1/X_j` of i.i.d. copies of
//! `X = E − λv` around the harmonic average `h`, exact and sampled.

use rayon::prelude::*;

use crate::distribution::PotentialDistribution;
use crate::engine::ShellSampler;
use crate::error::{Error, OutsideReason, Result};
use crate::rng::StreamKey;
use crate::stats;

const ENUMERATION_LIMIT: f64 = 1e7;
const MAX_ENUMERATION_N: u32 = 12;
const JACKKNIFE_BLOCK: usize = 100;

/// Deterministic envelopes for the moments of `M_n − h`.
///
/// `a ≤ |X| ≤ b` on the support and `sigma2 = Var(1/X)`. On the negative side
/// (`E < λ v_-`) all magnitudes refer to `|X|`, and `sign` is `−1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentBounds {
    pub n: u64,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub sigma2: f64,
    pub sign: f64,
    /// Upper bound for `|𝔼(M_n − h)|`: `b h² σ₂ / n`.
    pub m1_upper: f64,
    /// `a² h² σ₂ / n`.
    pub m2_lo: f64,
    /// `b² h² σ₂ / n`.
    pub m2_hi: f64,
    /// Leading term `h³ σ₂ / n` of the first moment.
    pub m1_asymptotic: f64,
    /// Leading term `h⁴ σ₂ / n` of the second moment.
    pub m2_asymptotic: f64,
}

impl MomentBounds {
    /// `(2m)! h^{2m} b^{2m} / (2^m m! a^{2m} n^m)`.
    pub fn even_envelope(&self, m: u32) -> f64 {
        let mut fact_ratio = 1.0;
        for j in (m + 1)..=(2 * m) {
            fact_ratio *= j as f64;
        }
        let r = (self.h * self.b / self.a).powi(2 * m as i32);
        fact_ratio * r / (2f64.powi(m as i32) * (self.n as f64).powi(m as i32))
    }
}

pub fn moment_bounds(dist: &PotentialDistribution, energy: f64, lambda: f64, n: u64) -> Result<MomentBounds> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let (lo, hi) = dist.scaled_hull(lambda);
    let (a, b, sign) = if energy > hi {
        (energy - hi, energy - lo, 1.0)
    } else if energy < lo {
        (lo - energy, hi - energy, -1.0)
    } else {
        return Err(Error::OutsideBand { energy, reason: OutsideReason::InsideSupport { lo, hi } });
    };
    let g = dist.inverse_moment(energy, lambda)?;
    let h = 1.0 / g;
    let sigma2 = if lambda == 0.0 {
        0.0
    } else {
        let mut s = 0.0;
        if dist.kind().is_discrete() {
            for &(v, w) in dist.atoms() {
                let d = 1.0 / (energy - lambda * v) - g;
                s += w * d * d;
            }
        } else {
            s = (dist.inverse_moment2(energy, lambda)? - g * g).max(0.0);
        }
        s
    };
    let nf = n as f64;
    let h2 = h * h;
    Ok(MomentBounds {
        n,
        a,
        b,
        h,
        sigma2,
        sign,
        m1_upper: b * h2 * sigma2 / nf,
        m2_lo: a * a * h2 * sigma2 / nf,
        m2_hi: b * b * h2 * sigma2 / nf,
        m1_asymptotic: h2 * h * sigma2 / nf,
        m2_asymptotic: h2 * h2 * sigma2 / nf,
    })
}

/// `𝔼((M_n − h)^j)` for `j = 1..=4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactMoments {
    pub n: u32,
    pub h: f64,
    pub moments: [f64; 4],
}

/// Exact moments by summing over occupation-count vectors, each weighted by
/// its multinomial probability.
pub fn enumerate_moments(dist: &PotentialDistribution, energy: f64, lambda: f64, n: u32) -> Result<ExactMoments> {
    if !dist.kind().is_discrete() {
        return Err(Error::Domain("exact enumeration needs a discrete law".into()));
    }
    let atoms = dist.atoms();
    let k = atoms.len();
    if n == 0 || n > MAX_ENUMERATION_N || (k as f64).powi(n as i32) > ENUMERATION_LIMIT {
        return Err(Error::SizeLimit(format!("{k}^{n} outcomes exceed the enumeration limit")));
    }
    let h = dist.harmonic_average(energy, lambda)?;
    let inv: Vec<f64> = atoms.iter().map(|&(v, _)| 1.0 / (energy - lambda * v)).collect();
    let log_fact: Vec<f64> = (0..=n)
        .scan(0.0, |acc, j| {
            if j > 0 {
                *acc += (j as f64).ln();
            }
            Some(*acc)
        })
        .collect();

    let mut moments = [0.0; 4];
    let mut counts = vec![0u32; k];
    // Iterate over compositions of n into k nonnegative parts.
    fn walk(idx: usize, left: u32, counts: &mut [u32], visit: &mut dyn FnMut(&[u32])) {
        if idx + 1 == counts.len() {
            counts[idx] = left;
            visit(counts);
            return;
        }
        for c in 0..=left {
            counts[idx] = c;
            walk(idx + 1, left - c, counts, visit);
        }
    }
    let mut total_p = 0.0;
    walk(0, n, &mut counts, &mut |c: &[u32]| {
        let mut logp = log_fact[n as usize];
        let mut g = 0.0;
        for (j, &cj) in c.iter().enumerate() {
            logp += cj as f64 * atoms[j].1.ln() - log_fact[cj as usize];
            g += cj as f64 * inv[j];
        }
        let p = logp.exp();
        total_p += p;
        let dev = n as f64 / g - h;
        let mut pw = 1.0;
        for m in moments.iter_mut() {
            pw *= dev;
            *m += p * pw;
        }
    });
    debug_assert!((total_p - 1.0).abs() < 1e-9);
    Ok(ExactMoments { n, h, moments })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub n: u64,
    pub trials: u64,
    pub h: f64,
    /// `(estimate, jackknife standard error)` of `𝔼((M_n − h)^j)`, `j = 1..=4`.
    pub moments: [(f64, f64); 4],
    pub bounds: MomentBounds,
    pub exact: Option<ExactMoments>,
    /// The first moment is not of the wrong sign by more than three standard
    /// errors.
    pub first_moment_sign_ok: bool,
    /// The second moment lies in `[m2_lo, m2_hi]` up to three standard errors.
    pub envelope_ok: bool,
    /// The fourth moment respects the even-moment envelope up to three
    /// standard errors.
    pub fourth_moment_ok: bool,
}

impl MomentReport {
    pub fn m1(&self) -> (f64, f64) {
        self.moments[0]
    }
    pub fn m2(&self) -> (f64, f64) {
        self.moments[1]
    }
    pub fn m3(&self) -> (f64, f64) {
        self.moments[2]
    }
    pub fn m4(&self) -> (f64, f64) {
        self.moments[3]
    }
}

/// Monte Carlo moments of `M_n − h` from `trials` independent means, trial
/// `t` keyed by `key.child(t)`.
pub fn mc_moments(
    dist: &PotentialDistribution,
    energy: f64,
    lambda: f64,
    n: u64,
    trials: u64,
    key: StreamKey,
) -> Result<MomentReport> {
    if trials < 2 {
        return Err(Error::InsufficientTrials { needed: 2, got: trials as usize });
    }
    let bounds = moment_bounds(dist, energy, lambda, n)?;
    let h = bounds.h;
    let sampler = ShellSampler::new(dist, lambda);
    let devs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| sampler.sample(key.child(t), 0, n, energy, None).map(|s| s.a - h))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = devs
        .iter()
        .map(|&d| {
            let d2 = d * d;
            vec![d, d2, d2 * d, d2 * d2]
        })
        .collect();
    let mut moments = [(0.0, 0.0); 4];
    for (j, m) in moments.iter_mut().enumerate() {
        *m = stats::jackknife(&rows, JACKKNIFE_BLOCK, |means| means[j]);
    }
    let exact = if dist.kind().is_discrete() && n <= MAX_ENUMERATION_N as u64 {
        enumerate_moments(dist, energy, lambda, n as u32).ok()
    } else {
        None
    };
    let (m1, se1) = moments[0];
    let (m2, se2) = moments[1];
    let (m4, se4) = moments[3];
    let first_moment_sign_ok = bounds.sigma2 == 0.0 || m1 * bounds.sign > -3.0 * se1;
    let envelope_ok = m2 + 3.0 * se2 >= bounds.m2_lo && m2 - 3.0 * se2 <= bounds.m2_hi;
    let fourth_moment_ok = m4 - 3.0 * se4 <= bounds.even_envelope(2);
    Ok(MomentReport { n, trials, h, moments, bounds, exact, first_moment_sign_ok, envelope_ok, fourth_moment_ok })
}

/// Scaled moments `(n, n·m1, n·m2, n²·m3)` across several `n`, to watch the
/// approach to `h³σ₂`, `h⁴σ₂` and the boundedness of `n² m3`.
pub fn moment_drift(
    dist: &PotentialDistribution,
    energy: f64,
    lambda: f64,
    ns: &[u64],
    trials: u64,
    key: StreamKey,
) -> Result<Vec<(u64, f64, f64, f64)>> {
    ns.iter()
        .map(|&n| {
            let r = mc_moments(dist, energy, lambda, n, trials, key.child(n))?;
            let nf = n as f64;
            Ok((n, nf * r.m1().0, nf * r.m2().0, nf * nf * r.m3().0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bernoulli_bounds() {
        let b = moment_bounds(&PotentialDistribution::bernoulli(), 2.0, 1.0, 2).unwrap();
        assert_eq!((b.a, b.b), (1.0, 3.0));
        assert_relative_eq!(b.m1_upper, 0.375, max_relative = 1e-14);
        assert_relative_eq!(b.m2_lo, 0.125, max_relative = 1e-14);
        assert_relative_eq!(b.m2_hi, 1.125, max_relative = 1e-14);
    }

    #[test]
    fn free_bounds_vanish() {
        let b = moment_bounds(&PotentialDistribution::uniform(), 2.0, 0.0, 5).unwrap();
        assert_eq!((b.m1_upper, b.m2_lo, b.m2_hi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bernoulli_enumeration() {
        let d = PotentialDistribution::bernoulli();
        let e2 = enumerate_moments(&d, 2.0, 1.0, 2).unwrap();
        assert_relative_eq!(e2.moments[0], 0.25, max_relative = 1e-13);
        assert_relative_eq!(e2.moments[1], 0.625, max_relative = 1e-13);
        let e1 = enumerate_moments(&d, 2.0, 1.0, 1).unwrap();
        assert_relative_eq!(e1.moments[0], 0.5, max_relative = 1e-13);
    }

    #[test]
    fn enumeration_guard() {
        let d = PotentialDistribution::bernoulli();
        assert!(matches!(enumerate_moments(&d, 2.0, 1.0, 13), Err(Error::SizeLimit(_))));
        assert!(enumerate_moments(&PotentialDistribution::uniform(), 2.0, 1.0, 2).is_err());
    }

    #[test]
    fn negative_side_sign() {
        let d = PotentialDistribution::bernoulli();
        let r = mc_moments(&d, -2.0, 1.0, 4, 20_000, StreamKey::new(5)).unwrap();
        assert_eq!(r.bounds.sign, -1.0);
        assert!(r.m1().0 < 0.0 && r.first_moment_sign_ok);
    }
}
