//! Transfer matrices, modified Prüfer variables and truncated Weyl functions.
//!
//! On an antitree the eigenvalue equation at energy `E` reduces to the scalar
//! recursion `u_{n+1} = a_{E,n} u_n − u_{n−1}`, i.e. to products of
//!
//! ```text
//! T(n) = | a_{E,n}  −1 |
//!        |    1      0 |
//! ```
//!
//! where `a_{E,n}` is the reciprocal of the shell average of `1/(E − λv)`.
//! Shell potentials are never stored: shell `n` of a trial is regenerated from
//! the stream `key.child(n)`, which lets backward passes replay the exact
//! randomness of the forward pass.

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::distribution::{EffectiveQuantities, PotentialDistribution};
use crate::error::{Error, Result};
use crate::geometry::GrowthLaw;
use crate::rng::StreamKey;
use crate::stats;

const TWO_POW_512: f64 = 1.340_780_792_994_259_7e154;

/// `a_{E,n} = [(1/s) Σ 1/(E − λ v_j)]⁻¹`.
pub fn harmonic_a(energy: f64, lambda: f64, potentials: &[f64]) -> Result<f64> {
    let (g1, _) = inverse_sums(energy, lambda, potentials.iter().map(|&v| (v, 1)));
    finish_a(g1, potentials.len() as u64, energy, 0)
}

/// `‖ψ_{E,n}‖² = a² (1/s) Σ 1/(E − λ v_j)²`, which equals `d a_{E,n}/dE`.
pub fn psi_norm_sq(energy: f64, lambda: f64, potentials: &[f64]) -> Result<f64> {
    let s = potentials.len() as u64;
    let (g1, g2) = inverse_sums(energy, lambda, potentials.iter().map(|&v| (v, 1)));
    let a = finish_a(g1, s, energy, 0)?;
    Ok(a * a * g2 / s as f64)
}

fn inverse_sums(energy: f64, lambda: f64, items: impl Iterator<Item = (f64, u64)>) -> (f64, f64) {
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for (v, c) in items {
        let r = 1.0 / (energy - lambda * v);
        let c = c as f64;
        g1 += c * r;
        g2 += c * r * r;
    }
    (g1, g2)
}

fn finish_a(g1: f64, s: u64, energy: f64, shell: u64) -> Result<f64> {
    let a = s as f64 / g1;
    if g1 == 0.0 || !a.is_finite() {
        return Err(Error::SingularShell { shell, energy });
    }
    Ok(a)
}

/// One shell's contribution to the transfer matrix at a real energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellSample {
    pub n: u64,
    pub s: u64,
    pub a: f64,
    /// `(a − h)/sin k`; NaN when `E` is outside the effective band.
    pub x: f64,
    pub psi_norm_sq: f64,
}

/// Draws shell potentials from keyed streams.
///
/// Discrete laws are drawn as atom occupation counts via sequential binomials,
/// so the cost of a shell does not grow with its size.
#[derive(Clone, Debug)]
pub struct ShellSampler<'a> {
    dist: &'a PotentialDistribution,
    lambda: f64,
}

impl<'a> ShellSampler<'a> {
    pub fn new(dist: &'a PotentialDistribution, lambda: f64) -> Self {
        Self { dist, lambda }
    }

    /// Calls `f(v, multiplicity)` for the `s` potentials of the shell keyed
    /// by `key`.
    pub fn for_each_potential<F: FnMut(f64, u64)>(&self, key: StreamKey, s: u64, mut f: F) {
        let mut rng = key.rng();
        if self.dist.kind().is_discrete() {
            let atoms = self.dist.atoms();
            let mut remaining = s;
            let mut rest_weight = 1.0;
            for (i, &(v, w)) in atoms.iter().enumerate() {
                if remaining == 0 {
                    break;
                }
                let c = if i + 1 == atoms.len() {
                    remaining
                } else {
                    let p = (w / rest_weight).clamp(0.0, 1.0);
                    Binomial::new(remaining, p).expect("valid binomial").sample(&mut rng)
                };
                if c > 0 {
                    f(v, c);
                }
                remaining -= c;
                rest_weight -= w;
            }
        } else {
            for _ in 0..s {
                f(self.dist.sample(&mut rng), 1);
            }
        }
    }

    pub fn sample(
        &self,
        key: StreamKey,
        n: u64,
        s: u64,
        energy: f64,
        eq: Option<&EffectiveQuantities>,
    ) -> Result<ShellSample> {
        let (a, psi) = if self.lambda == 0.0 {
            (energy, 1.0)
        } else {
            let mut g1 = 0.0;
            let mut g2 = 0.0;
            self.for_each_potential(key, s, |v, c| {
                let r = 1.0 / (energy - self.lambda * v);
                let c = c as f64;
                g1 += c * r;
                g2 += c * r * r;
            });
            let a = finish_a(g1, s, energy, n)?;
            (a, a * a * g2 / s as f64)
        };
        let x = eq.map_or(f64::NAN, |q| (a - q.h) / q.k.sin());
        Ok(ShellSample { n, s, a, x, psi_norm_sq: psi })
    }

    /// `a_{z,n}` at a complex spectral parameter for the same shell.
    pub fn sample_complex(&self, key: StreamKey, n: u64, s: u64, z: Complex64) -> Result<Complex64> {
        if self.lambda == 0.0 {
            return Ok(z);
        }
        let mut g = Complex64::new(0.0, 0.0);
        self.for_each_potential(key, s, |v, c| g += c as f64 / (z - self.lambda * v));
        let a = s as f64 / g;
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::SingularShell { shell: n, energy: z.re });
        }
        Ok(a)
    }
}

/// The fundamental solutions `u` (`u_{−1}=0, u_0=1`) and `v` (`v_{−1}=1,
/// v_0=0`) after `n` steps, i.e. the columns of `T(n−1)⋯T(0)`.
///
/// The product is kept as `Q·R` with `Q` a rotation and `R` upper triangular,
/// storing `log r11`, `log r22` and `r12/r11`. The Wronskian is
/// `r11·r22`, so its drift measures accumulated rounding directly.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionPair {
    q: [f64; 2],
    log_r11: f64,
    log_r22: f64,
    c12: f64,
    n: u64,
}

impl Default for SolutionPair {
    fn default() -> Self {
        Self::identity()
    }
}

impl SolutionPair {
    pub fn identity() -> Self {
        Self { q: [1.0, 0.0], log_r11: 0.0, log_r22: 0.0, c12: 0.0, n: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.n
    }

    /// Applies `T = ((a, −1), (1, 0))` on the left.
    pub fn step(&mut self, a: f64) {
        let [c, s] = self.q;
        // T q1 and T q2 with q2 = (−s, c).
        let t1 = [a * c - s, c];
        let t2 = [-a * s - c, -s];
        let rho = t1[0].hypot(t1[1]);
        let q1 = [t1[0] / rho, t1[1] / rho];
        let alpha = q1[0] * t2[0] + q1[1] * t2[1];
        let beta = -q1[1] * t2[0] + q1[0] * t2[1];
        self.c12 += alpha * (self.log_r22 - self.log_r11).exp() / rho;
        self.log_r11 += rho.ln();
        // det T = 1 forces rho·beta = 1 > 0.
        self.log_r22 += beta.ln();
        self.q = q1;
        self.n += 1;
    }

    /// `log ‖(u_n, u_{n−1})‖`.
    pub fn log_norm_u(&self) -> f64 {
        self.log_r11
    }

    /// `log |u_n|`.
    pub fn log_abs_u_cur(&self) -> f64 {
        self.log_r11 + self.q[0].abs().ln()
    }

    /// `log` of the Wronskian `u_n v_{n−1} − v_n u_{n−1}`; zero in exact
    /// arithmetic.
    pub fn log_wronskian(&self) -> f64 {
        self.log_r11 + self.log_r22
    }

    /// `(u_n, u_{n−1}, v_n, v_{n−1})`, overflowing for long growing products.
    pub fn columns(&self) -> [f64; 4] {
        let r11 = self.log_r11.exp();
        let r22 = self.log_r22.exp();
        let r12 = self.c12 * r11;
        let [c, s] = self.q;
        [r11 * c, r11 * s, r12 * c - r22 * s, r12 * s + r22 * c]
    }

    pub fn u_cur(&self) -> f64 {
        self.columns()[0]
    }
    pub fn u_prev(&self) -> f64 {
        self.columns()[1]
    }
    pub fn v_cur(&self) -> f64 {
        self.columns()[2]
    }
    pub fn v_prev(&self) -> f64 {
        self.columns()[3]
    }
}

pub fn transfer_step(pair: &SolutionPair, a: f64) -> SolutionPair {
    let mut p = pair.clone();
    p.step(a);
    p
}

/// Modified Prüfer variables of the orbit of `u_θ = (cos θ, sin θ)` under the
/// conjugated matrices `M T M⁻¹ = shear(x)·rotation(k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrueferState {
    pub theta: f64,
    pub log_r: f64,
    pub n: u64,
    pub theta_bar: f64,
}

impl PrueferState {
    pub fn new(theta: f64, k: f64) -> Self {
        Self { theta, log_r: 0.0, n: 0, theta_bar: theta + k }
    }
}

/// `R²_{n+1} = R²_n (1 + x sin 2θ̄ + x² sin²θ̄)`, `cot θ_{n+1} = cot θ̄ + x`.
pub fn pruefer_step(state: &PrueferState, x: f64, k: f64) -> PrueferState {
    let tb = state.theta + k;
    let (sb, cb) = tb.sin_cos();
    // The log argument equals (cos θ̄ + x sin θ̄)² + sin²θ̄.
    let p = cb + x * sb;
    let q = sb;
    let log_r = state.log_r + 0.5 * (p * p + q * q).ln();
    let mut theta = q.atan2(p);
    let diff = theta - tb;
    theta -= std::f64::consts::PI * (diff / std::f64::consts::PI).round();
    if theta - tb <= -std::f64::consts::FRAC_PI_2 {
        theta += std::f64::consts::PI;
    }
    PrueferState { theta, log_r, n: state.n + 1, theta_bar: theta + k }
}

/// Conjugating matrix `M = ((1, −cos k), (0, sin k))`.
pub fn pruefer_conjugator(k: f64) -> [[f64; 2]; 2] {
    [[1.0, -k.cos()], [0.0, k.sin()]]
}

/// Shell indices `1, 2, 4, ...` refined to `per_octave` points per doubling,
/// always ending at `n_max`.
pub fn geometric_checkpoints(n_max: u64, per_octave: u32) -> Vec<u64> {
    let mut out = Vec::new();
    let ratio = 2f64.powf(1.0 / per_octave.max(1) as f64);
    let mut t = 1.0f64;
    while (t as u64) < n_max {
        let n = t as u64;
        if out.last() != Some(&n) {
            out.push(n);
        }
        t *= ratio;
    }
    out.push(n_max);
    out
}

/// `count` evenly spaced shell indices in `[lo, hi]`.
pub fn linear_checkpoints(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let mut out: Vec<u64> =
        (0..count).map(|i| lo + ((hi - lo) as f64 * i as f64 / (count.max(2) - 1) as f64).round() as u64).collect();
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    pub log_r: f64,
    /// `Σ_{j≤n} 1/s_j`.
    pub normalizer: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub energy: f64,
    pub lambda: f64,
    pub n_max: u64,
    pub checkpoints: Vec<Checkpoint>,
}

impl TrajectoryRecord {
    pub fn last(&self) -> Checkpoint {
        *self.checkpoints.last().expect("trajectory has checkpoints")
    }

    pub fn slope(&self) -> f64 {
        let c = self.last();
        c.log_r / c.normalizer
    }
}

fn band_quantities(dist: &PotentialDistribution, energy: f64, lambda: f64) -> Result<EffectiveQuantities> {
    dist.effective_quantities(energy, lambda)
}

/// Runs the Prüfer recursion over shells `0..n_max` from `θ_0 = 0`.
/// `log_r` at checkpoint `n` is `log R_n`, after shells `0..n−1`.
pub fn run_trajectory(
    dist: &PotentialDistribution,
    law: &GrowthLaw,
    energy: f64,
    lambda: f64,
    n_max: u64,
    key: StreamKey,
    checkpoints: &[u64],
) -> Result<TrajectoryRecord> {
    if n_max < 1 {
        return Err(Error::Domain("need at least one shell".into()));
    }
    let eq = band_quantities(dist, energy, lambda)?;
    let sampler = ShellSampler::new(dist, lambda);
    let mut state = PrueferState::new(0.0, eq.k);
    let mut normalizer = 0.0;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().filter(|&c| c <= n_max).peekable();
    for n in 0..n_max {
        let s = law.size(n);
        let shell = sampler.sample(key.child(n), n, s, energy, Some(&eq))?;
        state = pruefer_step(&state, shell.x, eq.k);
        normalizer += 1.0 / s as f64;
        while next.peek() == Some(&(n + 1)) {
            out.push(Checkpoint { n: n + 1, log_r: state.log_r, normalizer });
            next.next();
        }
    }
    if out.last().map(|c| c.n) != Some(n_max) {
        out.push(Checkpoint { n: n_max, log_r: state.log_r, normalizer });
    }
    Ok(TrajectoryRecord { energy, lambda, n_max, checkpoints: out })
}

/// Independent trajectories for trials `0..trials`, trial `t` keyed by
/// `key.child(t)`. Output is in trial order regardless of scheduling.
#[allow(clippy::too_many_arguments)]
pub fn run_ensemble(
    dist: &PotentialDistribution,
    law: &GrowthLaw,
    energy: f64,
    lambda: f64,
    n_max: u64,
    key: StreamKey,
    trials: u64,
    checkpoints: &[u64],
) -> Result<Vec<TrajectoryRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|t| run_trajectory(dist, law, energy, lambda, n_max, key.child(t), checkpoints))
        .collect()
}

/// Mean and standard error of the per-trial slopes `log R_N / Σ 1/s_j`.
pub fn lyapunov_estimate(records: &[TrajectoryRecord]) -> Result<(f64, f64)> {
    if records.len() < 2 {
        return Err(Error::InsufficientTrials { needed: 2, got: records.len() });
    }
    let slopes: Vec<f64> = records.iter().map(TrajectoryRecord::slope).collect();
    Ok(stats::mean_stderr(&slopes))
}

/// Norm comparison between the subordinate solution `w` and the Dirichlet
/// solution `u`, both normalized to `‖(·_0, ·_{−1})‖ = 1`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SubordinacyTrace {
    pub n: Vec<u64>,
    pub normalizer: Vec<f64>,
    /// `log(‖w‖_{E,n} / ‖u‖_{E,n})` with the ψ-weighted norms summed over `k ≤ n`.
    pub log_ratio_cumulative: Vec<f64>,
    /// `log(‖(w_n, w_{n−1})‖ / ‖(u_n, u_{n−1})‖)`.
    pub log_ratio_pointwise: Vec<f64>,
    /// `log ‖(w_n, w_{n−1})‖`.
    pub log_sub_norm: Vec<f64>,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Subordinacy diagnostic over shells `0..=n_max`.
///
/// The forward pass evolves `u`. The backward pass starts from
/// `(w_{N+1}, w_N) = (1, 0)` and applies `T(n)⁻¹ = ((0, 1), (−1, a_n))`,
/// regenerating every shell from its stream; since any solution that is not
/// subordinate grows backwards slower than the subordinate one, this
/// converges to the subordinate direction away from `N`.
#[allow(clippy::too_many_arguments)]
pub fn subordinacy_ratio(
    dist: &PotentialDistribution,
    law: &GrowthLaw,
    energy: f64,
    lambda: f64,
    n_max: u64,
    key: StreamKey,
    checkpoints: &[u64],
) -> Result<SubordinacyTrace> {
    let eq = band_quantities(dist, energy, lambda)?;
    let sampler = ShellSampler::new(dist, lambda);
    let cps: Vec<u64> = {
        let mut v: Vec<u64> = checkpoints.iter().copied().filter(|&c| c <= n_max).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let m = cps.len();

    // Forward: cumulative log ‖u‖² and pointwise log ‖(u_n, u_{n−1})‖.
    let mut pair = SolutionPair::identity();
    let mut log_cum_u = f64::NEG_INFINITY;
    let mut normalizer = 0.0;
    let mut fwd_cum = vec![0.0; m];
    let mut fwd_pt = vec![0.0; m];
    let mut norm_at = vec![0.0; m];
    let mut ci = 0;
    for n in 0..=n_max {
        let s = law.size(n);
        let shell = sampler.sample(key.child(n), n, s, energy, Some(&eq))?;
        log_cum_u = log_add(log_cum_u, 2.0 * pair.log_abs_u_cur() + shell.psi_norm_sq.ln());
        normalizer += 1.0 / s as f64;
        while ci < m && cps[ci] == n {
            fwd_cum[ci] = log_cum_u;
            fwd_pt[ci] = pair.log_norm_u();
            norm_at[ci] = normalizer;
            ci += 1;
        }
        pair.step(shell.a);
    }

    // Backward: suffix sums of |w_k|²‖ψ_k‖², stored at k = c + 1.
    let (mut p, mut q) = (1.0f64, 0.0f64);
    let mut log_scale = 0.0f64;
    let mut log_suffix = f64::NEG_INFINITY;
    let mut suffix_after = vec![f64::NEG_INFINITY; m];
    let mut bwd_pt = vec![0.0; m];
    let mut ci = m;
    for n in (0..=n_max).rev() {
        let s = law.size(n);
        let shell = sampler.sample(key.child(n), n, s, energy, Some(&eq))?;
        // Before the update (p, q) = (w_{n+1}, w_n).
        let hit = if ci > 0 && cps[ci - 1] == n {
            ci -= 1;
            suffix_after[ci] = log_suffix;
            Some(ci)
        } else {
            None
        };
        let (np, nq) = (q, shell.a * q - p);
        p = np;
        q = nq;
        let mag = p.abs().max(q.abs());
        if mag > TWO_POW_512 || (mag < 1.0 / TWO_POW_512 && mag > 0.0) {
            let e = mag.log2().floor() as i32;
            let f = 2f64.powi(-e);
            p *= f;
            q *= f;
            log_scale += e as f64 * std::f64::consts::LN_2;
        }
        // Now (p, q) = (w_n, w_{n−1}).
        let log_wn = log_scale + p.abs().ln();
        log_suffix = log_add(log_suffix, 2.0 * log_wn + shell.psi_norm_sq.ln());
        if let Some(j) = hit {
            bwd_pt[j] = log_scale + 0.5 * (p * p + q * q).ln();
        }
    }
    let log_w0 = log_scale + 0.5 * (p * p + q * q).ln();
    let log_total = log_suffix;

    let mut trace = SubordinacyTrace::default();
    for j in 0..m {
        let rest = suffix_after[j] - log_total;
        let log_prefix = if rest == f64::NEG_INFINITY { log_total } else { log_total + (-rest.exp_m1()).ln() };
        let log_cum_w = log_prefix - 2.0 * log_w0;
        let sub = bwd_pt[j] - log_w0;
        trace.n.push(cps[j]);
        trace.normalizer.push(norm_at[j]);
        trace.log_ratio_cumulative.push(0.5 * (log_cum_w - fwd_cum[j]));
        trace.log_ratio_pointwise.push(sub - fwd_pt[j]);
        trace.log_sub_norm.push(sub);
    }
    Ok(trace)
}

/// Value of the truncated Weyl function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylPoint {
    pub z: Complex64,
    pub beta: f64,
    pub n: u64,
    pub m: Complex64,
}

/// Complex solution pair with lossless power-of-two rescaling.
#[derive(Clone, Debug)]
struct ComplexPair {
    u: [Complex64; 2],
    v: [Complex64; 2],
}

impl ComplexPair {
    fn new() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { u: [one, zero], v: [zero, one] }
    }

    fn step(&mut self, a: Complex64) {
        self.u = [a * self.u[0] - self.u[1], self.u[0]];
        self.v = [a * self.v[0] - self.v[1], self.v[0]];
        let mag = self.u.iter().chain(&self.v).map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max);
        if mag > TWO_POW_512 {
            let f = 2f64.powi(-(mag.log2().floor() as i32));
            for c in self.u.iter_mut().chain(self.v.iter_mut()) {
                *c *= f;
            }
        }
    }

    fn weyl(&self, z: Complex64, beta: f64, n: u64) -> Result<WeylPoint> {
        // After n + 1 steps: u = (u_{n+1}, u_n), v = (v_{n+1}, v_n).
        let num = self.v[1] * beta + self.v[0];
        let den = self.u[1] * beta + self.u[0];
        let scale = self.u.iter().chain(&self.v).map(|c| c.norm()).fold(0.0, f64::max);
        if den.norm() <= 1e-14 * scale {
            return Err(Error::DegenerateDenominator { re: z.re, im: z.im });
        }
        Ok(WeylPoint { z, beta, n, m: num / den })
    }
}

/// `m_{N,β}(z) = (β v_N + v_{N+1}) / (β u_N + u_{N+1})` for given `a_{z,0..=N}`.
pub fn m_function_from_a(a: &[Complex64], z: Complex64, beta: f64) -> Result<WeylPoint> {
    if a.is_empty() {
        return Err(Error::Domain("need at least one shell".into()));
    }
    let mut pair = ComplexPair::new();
    for &an in a {
        pair.step(an);
    }
    pair.weyl(z, beta, a.len() as u64 - 1)
}

/// Truncated Weyl function for fixed shell potentials `potentials[n]`.
pub fn m_function_fixed(potentials: &[Vec<f64>], lambda: f64, z: Complex64, beta: f64) -> Result<WeylPoint> {
    let a: Result<Vec<Complex64>> = potentials
        .iter()
        .enumerate()
        .map(|(n, vs)| {
            let g: Complex64 = vs.iter().map(|&v| 1.0 / (z - lambda * v)).sum();
            let a = vs.len() as f64 / g;
            if a.re.is_finite() && a.im.is_finite() {
                Ok(a)
            } else {
                Err(Error::SingularShell { shell: n as u64, energy: z.re })
            }
        })
        .collect();
    m_function_from_a(&a?, z, beta)
}

/// Truncated Weyl function with shells drawn from `key` as in
/// [`run_trajectory`].
#[allow(clippy::too_many_arguments)]
pub fn m_function(
    dist: &PotentialDistribution,
    law: &GrowthLaw,
    lambda: f64,
    z: Complex64,
    n_max: u64,
    beta: f64,
    key: StreamKey,
) -> Result<WeylPoint> {
    let sampler = ShellSampler::new(dist, lambda);
    let mut pair = ComplexPair::new();
    for n in 0..=n_max {
        pair.step(sampler.sample_complex(key.child(n), n, law.size(n), z)?);
    }
    pair.weyl(z, beta, n_max)
}

/// Mean and standard error of `s·x` and `s·x²` over independent shells of
/// size `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XMoments {
    pub s: u64,
    pub trials: u64,
    pub s_mean_x: (f64, f64),
    pub s_mean_x2: (f64, f64),
}

pub fn shell_x_moments(
    dist: &PotentialDistribution,
    energy: f64,
    lambda: f64,
    s: u64,
    trials: u64,
    key: StreamKey,
) -> Result<XMoments> {
    let eq = band_quantities(dist, energy, lambda)?;
    let sampler = ShellSampler::new(dist, lambda);
    let xs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| sampler.sample(key.child(t), 0, s, energy, Some(&eq)).map(|sh| sh.x))
        .collect::<Result<_>>()?;
    let sf = s as f64;
    let a: Vec<f64> = xs.iter().map(|x| sf * x).collect();
    let b: Vec<f64> = xs.iter().map(|x| sf * x * x).collect();
    Ok(XMoments { s, trials, s_mean_x: stats::mean_stderr(&a), s_mean_x2: stats::mean_stderr(&b) })
}
