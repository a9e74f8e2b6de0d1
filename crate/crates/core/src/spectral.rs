//! Spectral statements built from transfer-matrix data: density estimates,
//! the almost-sure essential spectrum and the spectral-type classifier.

use rayon::prelude::*;

use crate::distribution::{bisect, PotentialDistribution};
use crate::engine::{linear_checkpoints, subordinacy_ratio, ShellSampler, SolutionPair};
use crate::error::{Error, Result};
use crate::geometry::GrowthLaw;
use crate::interval::{Interval, IntervalSet};
use crate::rng::StreamKey;
use crate::stats;

/// `√(4 − E²)/(2π)` on `[−2, 2]`, zero outside.
pub fn rho_free_theory(energy: f64) -> f64 {
    if energy.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - energy * energy).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOptions {
    pub n_max: u64,
    /// Averaging window over `n`; defaults to `[N/2, N]`.
    pub window: Option<(u64, u64)>,
    pub trials: u64,
    /// Half-width of the energy average around each grid point.
    pub smoothing_half_width: f64,
    /// Number of energy sub-intervals; `0` disables smoothing.
    pub smoothing_points: u32,
}

impl DensityOptions {
    pub fn new(n_max: u64, trials: u64) -> Self {
        Self { n_max, window: None, trials, smoothing_half_width: 0.01, smoothing_points: 16 }
    }

    fn window(&self) -> (u64, u64) {
        self.window.unwrap_or((self.n_max / 2, self.n_max))
    }

    fn sub_energies(&self, energy: f64) -> Vec<f64> {
        let m = self.smoothing_points;
        if m == 0 || self.smoothing_half_width == 0.0 {
            return vec![energy];
        }
        (0..=m).map(|j| energy + self.smoothing_half_width * (2.0 * j as f64 / m as f64 - 1.0)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub energies: Vec<f64>,
    pub rho_hat: Vec<f64>,
    pub n_range: (u64, u64),
    pub trials: u64,
}

impl DensityEstimate {
    /// Trapezoidal integral of `rho_hat` over the grid.
    pub fn mass(&self) -> f64 {
        self.energies.windows(2).zip(self.rho_hat.windows(2)).map(|(e, r)| 0.5 * (e[1] - e[0]) * (r[0] + r[1])).sum()
    }
}

fn window_average(
    sampler: &ShellSampler<'_>,
    law: &GrowthLaw,
    energy: f64,
    key: StreamKey,
    n_max: u64,
    (lo, hi): (u64, u64),
) -> Result<f64> {
    let mut pair = SolutionPair::identity();
    let mut acc = 0.0;
    let mut count = 0u64;
    for n in 0..hi {
        if pair.steps() >= lo {
            acc += (-2.0 * pair.log_norm_u()).exp();
            count += 1;
        }
        let shell = sampler.sample(key.child(n), n, law.size(n), energy, None)?;
        pair.step(shell.a);
    }
    debug_assert!(hi <= n_max);
    acc += (-2.0 * pair.log_norm_u()).exp();
    count += 1;
    Ok(acc / (count as f64 * std::f64::consts::PI))
}

/// Averages `1/(π (u_n² + u_{n−1}²))` over the `n` window, the trials and a
/// small energy neighbourhood of every grid point.
pub fn density_estimate(
    dist: &PotentialDistribution,
    lambda: f64,
    law: &GrowthLaw,
    grid: &[f64],
    opts: &DensityOptions,
    key: StreamKey,
) -> Result<DensityEstimate> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("energy grid must be strictly increasing".into()));
    }
    if opts.trials == 0 {
        return Err(Error::InsufficientTrials { needed: 1, got: 0 });
    }
    let sampler = ShellSampler::new(dist, lambda);
    let window = opts.window();
    let cells: Vec<(usize, u64)> = (0..grid.len()).flat_map(|i| (0..opts.trials).map(move |t| (i, t))).collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(i, t)| {
            let subs = opts.sub_energies(grid[i]);
            let mut sum = 0.0;
            for &e in &subs {
                sum += window_average(&sampler, law, e, key.child(t), opts.n_max, window)?;
            }
            Ok(sum / subs.len() as f64)
        })
        .collect::<Result<_>>()?;
    let t = opts.trials as usize;
    let rho_hat = values.chunks(t).map(|c| c.iter().sum::<f64>() / t as f64).collect();
    Ok(DensityEstimate { energies: grid.to_vec(), rho_hat, n_range: window, trials: opts.trials })
}

/// `λ·supp ∪ {E ∉ λ·supp : |h| ≤ 2}` as closed intervals.
pub fn essential_spectrum(dist: &PotentialDistribution, lambda: f64) -> IntervalSet {
    if lambda == 0.0 {
        return IntervalSet::from_intervals(vec![Interval::closed(-2.0, 2.0)]);
    }
    let mut parts: Vec<Interval> =
        dist.i_lambda(lambda).intervals().iter().map(|i| Interval::closed(i.lo, i.hi)).collect();
    if dist.kind().is_discrete() {
        for &(v, _) in dist.atoms() {
            parts.push(Interval::closed(lambda * v, lambda * v));
        }
        // In a gap g(E) = 𝔼[1/(E − λv)] falls from +∞ to −∞, and |h| ≤ 2 means |g| ≥ 1/2.
        let g = |e: f64| dist.inverse_moment_unchecked(e, lambda);
        for (p, q) in dist.scaled_gaps(lambda) {
            let w = q - p;
            let (near_p, near_q) = (p + 1e-12 * w, q - 1e-12 * w);
            let e1 = bisect(near_p, near_q, 1e-12, |e| g(e) >= 0.5);
            let e2 = bisect(near_q, near_p, 1e-12, |e| g(e) <= -0.5);
            parts.push(Interval::closed(p, e1));
            parts.push(Interval::closed(e2, q));
        }
    } else {
        let (lo, hi) = dist.scaled_hull(lambda);
        parts.push(Interval::closed(lo, hi));
    }
    IntervalSet::from_intervals(parts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Ac,
    Pp,
    Sc,
    Boundary,
    OutsideI,
    OpenRegion,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Ac => "ac",
            Verdict::Pp => "pp",
            Verdict::Sc => "sc",
            Verdict::Boundary => "boundary",
            Verdict::OutsideI => "outside_I",
            Verdict::OpenRegion => "open_region",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecayKind {
    None,
    /// `‖w_n‖ ≈ n^{−γ/C}`.
    PowerOfLogScale,
    /// `log ‖w_n‖ ≈ −γ/(C(2−d)) · n^{2−d}`.
    Stretched,
}

impl DecayKind {
    pub fn name(self) -> &'static str {
        match self {
            DecayKind::None => "none",
            DecayKind::PowerOfLogScale => "power_of_log_scale",
            DecayKind::Stretched => "stretched",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralClassification {
    pub energy: f64,
    pub lambda: f64,
    pub d: f64,
    pub c: f64,
    pub verdict: Verdict,
    pub gamma: Option<f64>,
    pub decay_kind: DecayKind,
    pub decay_constant: Option<f64>,
}

/// Spectral type at `E` for uniform `d`-dimensional growth with constant `C`.
///
/// At `d = 1` (bounded shells) the verdict is `pp` without a decay law, since
/// the growth formula does not apply there.
pub fn classify(dist: &PotentialDistribution, lambda: f64, d: f64, c: f64, energy: f64) -> SpectralClassification {
    classify_with(dist, lambda, d, c, energy, d > 2.0)
}

/// As [`classify`], with absolute continuity decided by summability of
/// `1/s_n` for the given law.
pub fn classify_law(dist: &PotentialDistribution, lambda: f64, law: &GrowthLaw, energy: f64) -> SpectralClassification {
    let (d, c) = match law {
        GrowthLaw::UniformPower { d, c } => (*d, *c),
        GrowthLaw::Custom(v) => fitted_growth(v),
    };
    classify_with(dist, lambda, d, c, energy, law.inverse_sum_converges())
}

fn fitted_growth(v: &[u64]) -> (f64, f64) {
    let n = v.len();
    if n < 8 {
        return (1.0, v.last().copied().unwrap_or(1) as f64);
    }
    let (i0, i1) = (n / 2, n - 1);
    let alpha = ((v[i1] as f64).ln() - (v[i0] as f64).ln()) / ((i1 as f64).ln() - (i0 as f64).ln());
    let c = v[i1] as f64 / (i1 as f64).powf(alpha);
    (1.0 + alpha, c)
}

fn classify_with(
    dist: &PotentialDistribution,
    lambda: f64,
    d: f64,
    c: f64,
    energy: f64,
    summable: bool,
) -> SpectralClassification {
    let mut out = SpectralClassification {
        energy,
        lambda,
        d,
        c,
        verdict: Verdict::OutsideI,
        gamma: None,
        decay_kind: DecayKind::None,
        decay_constant: None,
    };
    let eq = match dist.effective_quantities(energy, lambda) {
        Ok(q) => q,
        Err(_) => {
            let (lo, hi) = dist.scaled_hull(lambda);
            if lambda != 0.0 && energy >= lo && energy <= hi {
                out.verdict = Verdict::OpenRegion;
            }
            return out;
        }
    };
    let gamma = eq.gamma;
    out.gamma = Some(gamma);
    if summable {
        out.verdict = Verdict::Ac;
    } else if d == 2.0 {
        let r = gamma / c;
        if r < 0.5 {
            out.verdict = Verdict::Sc;
        } else if r == 0.5 {
            out.verdict = Verdict::Boundary;
        } else {
            out.verdict = Verdict::Pp;
            out.decay_kind = DecayKind::PowerOfLogScale;
            out.decay_constant = Some(-r);
        }
    } else if d > 1.0 && d < 2.0 {
        out.verdict = Verdict::Pp;
        out.decay_kind = DecayKind::Stretched;
        out.decay_constant = Some(-gamma / (c * (2.0 - d)));
    } else {
        out.verdict = Verdict::Pp;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub kind: DecayKind,
    pub per_trial: Vec<f64>,
    pub fitted_mean: f64,
    pub fitted_stderr: f64,
    pub theory: f64,
    pub fit_window: (u64, u64),
}

/// Fits `log ‖(w_n, w_{n−1})‖` of the subordinate solution against `n^{2−d}`
/// (`1 < d < 2`) or `ln n` (`d = 2`) over `n ∈ [N/100, N/2]`.
#[allow(clippy::too_many_arguments)]
pub fn decay_check(
    dist: &PotentialDistribution,
    lambda: f64,
    d: f64,
    c: f64,
    energy: f64,
    n_max: u64,
    trials: u64,
    key: StreamKey,
) -> Result<DecayReport> {
    if !(d > 1.0 && d <= 2.0) {
        return Err(Error::Domain(format!("decay fit needs 1 < d ≤ 2, got {d}")));
    }
    if trials == 0 {
        return Err(Error::InsufficientTrials { needed: 1, got: 0 });
    }
    let eq = dist.effective_quantities(energy, lambda)?;
    let law = GrowthLaw::uniform_power(d, c)?;
    let window = ((n_max / 100).max(2), n_max / 2);
    let cps = linear_checkpoints(window.0, window.1, 400);
    let (kind, theory) = if d < 2.0 {
        (DecayKind::Stretched, -eq.gamma / (c * (2.0 - d)))
    } else {
        (DecayKind::PowerOfLogScale, -eq.gamma / c)
    };
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let tr = subordinacy_ratio(dist, &law, energy, lambda, n_max, key.child(t), &cps)?;
            let xs: Vec<f64> =
                tr.n.iter().map(|&n| if d < 2.0 { (n as f64).powf(2.0 - d) } else { (n as f64).ln() }).collect();
            Ok(stats::linear_fit(&xs, &tr.log_sub_norm).0)
        })
        .collect::<Result<_>>()?;
    let (fitted_mean, fitted_stderr) = stats::mean_stderr(&per_trial);
    Ok(DecayReport { kind, per_trial, fitted_mean, fitted_stderr, theory, fit_window: window })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier_table() {
        let b = PotentialDistribution::bernoulli();
        assert_eq!(classify(&b, 1.0, 3.0, 1.0, 2.0).verdict, Verdict::Ac);
        let pp = classify(&b, 1.0, 1.5, 1.0, 2.0);
        assert_eq!((pp.verdict, pp.decay_kind), (Verdict::Pp, DecayKind::Stretched));
        assert!((pp.decay_constant.unwrap() + 9.0 / 28.0).abs() < 1e-12);
        assert_eq!(classify(&b, 1.0, 2.0, 1.0, 2.0).verdict, Verdict::Sc);
        let far = classify(&b, 1.0, 2.0, 1.0, 2.30);
        assert_eq!((far.verdict, far.decay_kind), (Verdict::Pp, DecayKind::PowerOfLogScale));
        assert_eq!(classify(&b, 1.0, 2.0, 1.0, 0.5).verdict, Verdict::OpenRegion);
        assert_eq!(classify(&b, 1.0, 2.0, 1.0, 3.0).verdict, Verdict::OutsideI);
        assert_eq!(classify(&b, 1.0, 1.0, 1.0, 2.0).decay_kind, DecayKind::None);
    }

    #[test]
    fn boundary_verdict() {
        let b = PotentialDistribution::bernoulli();
        let g = b.effective_quantities(2.0, 1.0).unwrap().gamma;
        assert_eq!(classify(&b, 1.0, 2.0, 2.0 * g, 2.0).verdict, Verdict::Boundary);
    }

    #[test]
    fn custom_law_summability() {
        let b = PotentialDistribution::bernoulli();
        let sq: Vec<u64> = (0..200u64).map(|n| (n * n).max(1)).collect();
        let c = classify_law(&b, 1.0, &GrowthLaw::Custom(sq), 2.0);
        assert_eq!(c.verdict, Verdict::Ac);
        let lin: Vec<u64> = (0..200u64).map(|n| n.max(1)).collect();
        let c = classify_law(&b, 1.0, &GrowthLaw::Custom(lin), 2.0);
        assert_eq!(c.verdict, Verdict::Sc);
    }

    #[test]
    fn essential_spectrum_examples() {
        let s2 = 2f64.sqrt();
        let b = essential_spectrum(&PotentialDistribution::bernoulli(), 1.0);
        let iv = b.intervals();
        assert_eq!(iv.len(), 2);
        assert!((iv[0].lo + 1.0 + s2).abs() < 1e-9 && (iv[0].hi - 1.0 + s2).abs() < 1e-9);
        assert!((iv[1].lo - s2 + 1.0).abs() < 1e-9 && (iv[1].hi - 1.0 - s2).abs() < 1e-9);
        let e = std::f64::consts::E;
        let u = essential_spectrum(&PotentialDistribution::uniform(), 1.0);
        assert_eq!(u.len(), 1);
        assert!((u.intervals()[0].hi - (e + 1.0) / (e - 1.0)).abs() < 1e-9);
        let t = essential_spectrum(&PotentialDistribution::triangular(), 3.0);
        assert_eq!(t.intervals(), &[Interval::closed(-3.0, 3.0)]);
    }
}
