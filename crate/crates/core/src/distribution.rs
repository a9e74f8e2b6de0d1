//! Single-site potential laws and the effective quantities they induce.
//!
//! For an energy `E` outside the scaled support `λ·[v_-, v_+]` the key object
//! is the harmonic average
//!
//! ```text
//! h(E, λ) = 1 / 𝔼[1 / (E − λv)]
//! ```
//!
//! which plays the part of an effective energy `2 cos k`. Together with the
//! effective variance `σ²_eff = Var(1 / (E − λv))` it fixes the growth constant
//! `γ = h⁴ σ²_eff / (2 (4 − h²))`.

use rand::Rng;

use crate::error::{Error, OutsideReason, Result};
use crate::interval::{Interval, IntervalSet};
use crate::quadrature;

/// Closest approach to a support edge when evaluating `h`.
const EDGE_EPS: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-10;
const QUAD_TOL: f64 = 1e-12;
const J_SCAN_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PotentialKind {
    /// `±1` with probability one half each.
    Bernoulli,
    /// Uniform on `[-1, 1]`.
    Uniform,
    /// Density `1 − |v|` on `[-1, 1]`.
    Triangular,
    /// Finitely many weighted atoms.
    Discrete,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Bernoulli => "bernoulli",
            PotentialKind::Uniform => "uniform",
            PotentialKind::Triangular => "triangular",
            PotentialKind::Discrete => "discrete",
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, PotentialKind::Bernoulli | PotentialKind::Discrete)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialDistribution {
    kind: PotentialKind,
    /// `(value, weight)` pairs sorted by value; empty for continuous laws.
    atoms: Vec<(f64, f64)>,
    v_minus: f64,
    v_plus: f64,
    sigma2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveQuantities {
    pub energy: f64,
    pub lambda: f64,
    pub h: f64,
    pub sigma2_eff: f64,
    pub gamma: f64,
    pub k: f64,
}

impl EffectiveQuantities {
    pub fn sin_k(&self) -> f64 {
        self.k.sin()
    }
}

impl PotentialDistribution {
    pub fn bernoulli() -> Self {
        Self {
            kind: PotentialKind::Bernoulli,
            atoms: vec![(-1.0, 0.5), (1.0, 0.5)],
            v_minus: -1.0,
            v_plus: 1.0,
            sigma2: 1.0,
        }
    }

    pub fn uniform() -> Self {
        Self { kind: PotentialKind::Uniform, atoms: Vec::new(), v_minus: -1.0, v_plus: 1.0, sigma2: 1.0 / 3.0 }
    }

    pub fn triangular() -> Self {
        Self { kind: PotentialKind::Triangular, atoms: Vec::new(), v_minus: -1.0, v_plus: 1.0, sigma2: 1.0 / 6.0 }
    }

    /// A law with finitely many atoms. Values must lie in `[-1, 1]`, weights
    /// must be positive and sum to one, and the mean must vanish.
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidDistribution(m.to_string()));
        if atoms.len() < 2 {
            return bad("need at least two atoms");
        }
        if atoms.iter().any(|&(v, w)| !v.is_finite() || !(-1.0..=1.0).contains(&v) || !w.is_finite() || w <= 0.0) {
            return bad("atoms must lie in [-1, 1] with positive weights");
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(&format!("weights sum to {total}, not 1"));
        }
        let mean: f64 = atoms.iter().map(|&(v, w)| v * w).sum();
        if mean.abs() > 1e-12 {
            return bad(&format!("mean is {mean}, not 0"));
        }
        let mut sorted = atoms.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return bad("repeated atom value");
            }
        }
        let sigma2: f64 = sorted.iter().map(|&(v, w)| v * v * w).sum();
        let v_minus = sorted[0].0;
        let v_plus = sorted[sorted.len() - 1].0;
        if !(v_minus < 0.0 && v_plus > 0.0) {
            return bad("support must straddle zero");
        }
        Ok(Self { kind: PotentialKind::Discrete, atoms: sorted, v_minus, v_plus, sigma2 })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn v_minus(&self) -> f64 {
        self.v_minus
    }

    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Density on `[-1, 1]` for the continuous laws.
    pub fn density(&self, v: f64) -> Option<f64> {
        match self.kind {
            PotentialKind::Uniform => Some(if v.abs() <= 1.0 { 0.5 } else { 0.0 }),
            PotentialKind::Triangular => Some((1.0 - v.abs()).max(0.0)),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            PotentialKind::Bernoulli => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            PotentialKind::Uniform => 2.0 * rng.random::<f64>() - 1.0,
            PotentialKind::Triangular => rng.random::<f64>() + rng.random::<f64>() - 1.0,
            PotentialKind::Discrete => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(v, w) in &self.atoms {
                    acc += w;
                    if u < acc {
                        return v;
                    }
                }
                self.atoms[self.atoms.len() - 1].0
            }
        }
    }

    /// Closed hull of `λ·supp`.
    pub fn scaled_hull(&self, lambda: f64) -> (f64, f64) {
        let a = lambda * self.v_minus;
        let b = lambda * self.v_plus;
        (a.min(b), a.max(b))
    }

    /// Open gaps between consecutive atoms of `λ·supp` (discrete laws only).
    pub fn scaled_gaps(&self, lambda: f64) -> Vec<(f64, f64)> {
        if lambda == 0.0 {
            return Vec::new();
        }
        let mut pts: Vec<f64> = self.atoms.iter().map(|a| lambda * a.0).collect();
        pts.sort_by(f64::total_cmp);
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn check_outside(&self, energy: f64, lambda: f64) -> Result<()> {
        if lambda == 0.0 {
            return if energy == 0.0 {
                Err(Error::OutsideBand { energy, reason: OutsideReason::InsideSupport { lo: 0.0, hi: 0.0 } })
            } else {
                Ok(())
            };
        }
        let (lo, hi) = self.scaled_hull(lambda);
        if energy >= lo && energy <= hi {
            return Err(Error::OutsideBand { energy, reason: OutsideReason::InsideSupport { lo, hi } });
        }
        Ok(())
    }

    /// `𝔼[1/(E − λv)]` for `E` outside the scaled support hull.
    pub fn inverse_moment(&self, energy: f64, lambda: f64) -> Result<f64> {
        self.check_outside(energy, lambda)?;
        Ok(self.inverse_moment_unchecked(energy, lambda))
    }

    /// `𝔼[1/(E − λv)²]` for `E` outside the scaled support hull.
    pub fn inverse_moment2(&self, energy: f64, lambda: f64) -> Result<f64> {
        self.check_outside(energy, lambda)?;
        Ok(self.inverse_moment2_unchecked(energy, lambda))
    }

    /// As [`inverse_moment`](Self::inverse_moment) without the support check.
    /// For discrete laws this is also meaningful in the gaps between atoms.
    pub fn inverse_moment_unchecked(&self, energy: f64, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 1.0 / energy;
        }
        match self.kind {
            PotentialKind::Bernoulli | PotentialKind::Discrete => {
                self.atoms.iter().map(|&(v, w)| w / (energy - lambda * v)).sum()
            }
            PotentialKind::Uniform => {
                let x = lambda / energy;
                x.atanh() / (x * energy)
            }
            PotentialKind::Triangular => {
                let x = lambda / energy;
                triangular_n_over_x2(x) / energy
            }
        }
    }

    pub fn inverse_moment2_unchecked(&self, energy: f64, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 1.0 / (energy * energy);
        }
        match self.kind {
            PotentialKind::Bernoulli | PotentialKind::Discrete => self
                .atoms
                .iter()
                .map(|&(v, w)| {
                    let r = 1.0 / (energy - lambda * v);
                    w * r * r
                })
                .sum(),
            PotentialKind::Uniform => 1.0 / ((energy - lambda) * (energy + lambda)),
            PotentialKind::Triangular => {
                let x = lambda / energy;
                let x2 = x * x;
                let f = if x2 == 0.0 { 1.0 } else { -(-x2).ln_1p() / x2 };
                f / (energy * energy)
            }
        }
    }

    /// `𝔼[(E − λv)^(−power)]` by adaptive quadrature; `None` for discrete laws.
    pub fn inverse_moment_quadrature(&self, energy: f64, lambda: f64, power: i32) -> Option<f64> {
        let dens = |v: f64| self.density(v).unwrap_or(0.0);
        let f = |v: f64| dens(v) / (energy - lambda * v).powi(power);
        match self.kind {
            PotentialKind::Uniform => Some(quadrature::integrate(f, -1.0, 1.0, QUAD_TOL)),
            PotentialKind::Triangular => {
                Some(quadrature::integrate(f, -1.0, 0.0, QUAD_TOL) + quadrature::integrate(f, 0.0, 1.0, QUAD_TOL))
            }
            _ => None,
        }
    }

    /// Harmonic average from the quadrature route.
    pub fn h_quadrature(&self, energy: f64, lambda: f64) -> Option<f64> {
        self.inverse_moment_quadrature(energy, lambda, 1).map(|g| 1.0 / g)
    }

    /// `Var(1/(E − λv))`, computed to avoid cancellation where possible.
    fn sigma2_eff_unchecked(&self, energy: f64, lambda: f64, g: f64) -> f64 {
        if lambda == 0.0 {
            return 0.0;
        }
        match self.kind {
            PotentialKind::Bernoulli | PotentialKind::Discrete => self
                .atoms
                .iter()
                .map(|&(v, w)| {
                    let d = 1.0 / (energy - lambda * v) - g;
                    w * d * d
                })
                .sum(),
            _ => (self.inverse_moment2_unchecked(energy, lambda) - g * g).max(0.0),
        }
    }

    /// Harmonic average, or an error when `E` lies in the scaled support hull
    /// or the inverse moment vanishes.
    pub fn harmonic_average(&self, energy: f64, lambda: f64) -> Result<f64> {
        let g = self.inverse_moment(energy, lambda)?;
        if g == 0.0 {
            return Err(Error::InfiniteHarmonic { energy });
        }
        Ok(1.0 / g)
    }

    pub fn effective_quantities(&self, energy: f64, lambda: f64) -> Result<EffectiveQuantities> {
        if lambda == 0.0 {
            if energy.abs() >= 2.0 {
                return Err(Error::OutsideBand { energy, reason: OutsideReason::HarmonicTooLarge { h: energy } });
            }
            return Ok(EffectiveQuantities {
                energy,
                lambda,
                h: energy,
                sigma2_eff: 0.0,
                gamma: 0.0,
                k: (energy / 2.0).acos(),
            });
        }
        let g = self.inverse_moment(energy, lambda)?;
        if g == 0.0 {
            return Err(Error::InfiniteHarmonic { energy });
        }
        let h = 1.0 / g;
        if h.abs() >= 2.0 {
            return Err(Error::OutsideBand { energy, reason: OutsideReason::HarmonicTooLarge { h } });
        }
        let sigma2_eff = self.sigma2_eff_unchecked(energy, lambda, g);
        let h2 = h * h;
        let gamma = h2 * h2 * sigma2_eff / (2.0 * (4.0 - h2));
        Ok(EffectiveQuantities { energy, lambda, h, sigma2_eff, gamma, k: (h / 2.0).acos() })
    }

    /// The window `I_λ = {E ∉ λ·[v_-, v_+] : |h| < 2}` as at most two open
    /// intervals.
    pub fn i_lambda(&self, lambda: f64) -> IntervalSet {
        if lambda == 0.0 {
            return IntervalSet::from_intervals(vec![Interval::open(-2.0, 0.0), Interval::open(0.0, 2.0)]);
        }
        let (lo, hi) = self.scaled_hull(lambda);
        let mut parts = Vec::new();
        if let Some(c) = self.band_edge(lambda, hi, 1.0) {
            parts.push(Interval::open(hi, c));
        }
        if let Some(c) = self.band_edge(lambda, lo, -1.0) {
            parts.push(Interval::open(c, lo));
        }
        IntervalSet::from_intervals(parts)
    }

    /// Root of `|h| = 2` on the side `dir` of the hull edge `edge`.
    fn band_edge(&self, lambda: f64, edge: f64, dir: f64) -> Option<f64> {
        let near = edge + dir * EDGE_EPS.max(1e-12 * edge.abs());
        let far = edge + dir * 3.0;
        let absh = |e: f64| (1.0 / self.inverse_moment_unchecked(e, lambda)).abs();
        if absh(near) >= 2.0 {
            return None;
        }
        Some(bisect(near, far, ROOT_TOL, |e| absh(e) < 2.0))
    }

    /// `J_λ = {E ∈ I_λ : γ/C ≤ 1/2}`.
    pub fn j_lambda(&self, lambda: f64, c: f64) -> IntervalSet {
        let i = self.i_lambda(lambda);
        let inside = |e: f64| match self.effective_quantities(e, lambda) {
            Ok(q) => q.gamma / c <= 0.5,
            Err(_) => false,
        };
        let mut parts = Vec::new();
        for comp in i.intervals() {
            let width = comp.hi - comp.lo;
            let pad = EDGE_EPS.max(1e-12 * width);
            let grid: Vec<f64> = (0..=J_SCAN_POINTS)
                .map(|j| comp.lo + pad + (width - 2.0 * pad) * j as f64 / J_SCAN_POINTS as f64)
                .collect();
            let flags: Vec<bool> = grid.iter().map(|&e| inside(e)).collect();
            let mut start: Option<(f64, bool)> = None;
            if flags[0] {
                start = Some((comp.lo, false));
            }
            for j in 1..grid.len() {
                if flags[j] == flags[j - 1] {
                    continue;
                }
                let (a, b) = (grid[j - 1], grid[j]);
                if flags[j] {
                    let x = bisect(b, a, ROOT_TOL, inside);
                    start = Some((x, true));
                } else {
                    let x = bisect(a, b, ROOT_TOL, inside);
                    let (s, s_closed) = start.take().expect("crossing out of J without entry");
                    parts.push(Interval::new(s, x, s_closed, true));
                }
            }
            if let Some((s, s_closed)) = start {
                parts.push(Interval::new(s, comp.hi, s_closed, false));
            }
        }
        IntervalSet::from_intervals(parts)
    }
}

/// `N(x)/x²` with `N(x) = (1+x)ln(1+x) + (1−x)ln(1−x)`.
fn triangular_n_over_x2(x: f64) -> f64 {
    let x2 = x * x;
    if x2 < 2.5e-3 {
        // Σ_{m≥1} x^{2m−2} / (m(2m−1))
        let mut term = 1.0;
        let mut sum = 0.0;
        for m in 1..=12 {
            let mf = m as f64;
            sum += term / (mf * (2.0 * mf - 1.0));
            term *= x2;
        }
        sum
    } else if x.abs() >= 1.0 {
        // Edge value N(±1) = 2 ln 2.
        2.0 * std::f64::consts::LN_2 / x2
    } else {
        ((1.0 + x) * x.ln_1p() + (1.0 - x) * (-x).ln_1p()) / x2
    }
}

/// Bisection between a point `good` where `pred` holds and `bad` where it
/// fails; returns the last point where it holds.
pub(crate) fn bisect<F: Fn(f64) -> bool>(mut good: f64, mut bad: f64, tol: f64, pred: F) -> f64 {
    while (bad - good).abs() > tol {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if pred(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;
    use approx::assert_relative_eq;

    #[test]
    fn bernoulli_closed_values() {
        let d = PotentialDistribution::bernoulli();
        assert_relative_eq!(d.inverse_moment(2.0, 1.0).unwrap(), 2.0 / 3.0, max_relative = 1e-15);
        let q = d.effective_quantities(2.0, 1.0).unwrap();
        assert_relative_eq!(q.h, 1.5, max_relative = 1e-14);
        assert_relative_eq!(q.sigma2_eff, 1.0 / 9.0, max_relative = 1e-13);
        assert_relative_eq!(q.gamma, 9.0 / 56.0, max_relative = 1e-13);
        assert_relative_eq!(q.k, 0.75f64.acos(), max_relative = 1e-14);
    }

    #[test]
    fn degenerate_lambda() {
        for d in [PotentialDistribution::bernoulli(), PotentialDistribution::triangular()] {
            assert_eq!(d.inverse_moment(2.0, 0.0).unwrap(), 0.5);
            let q = d.effective_quantities(1.0, 0.0).unwrap();
            assert_eq!((q.h, q.sigma2_eff, q.gamma), (1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn inside_support_rejected() {
        let d = PotentialDistribution::uniform();
        assert!(matches!(d.inverse_moment(0.5, 1.0), Err(Error::OutsideBand { .. })));
        let err = d.effective_quantities(3.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::OutsideBand { reason: OutsideReason::HarmonicTooLarge { .. }, .. }));
    }

    #[test]
    fn uniform_log_form() {
        let d = PotentialDistribution::uniform();
        assert_relative_eq!(d.inverse_moment(2.0, 1.0).unwrap(), 3.0f64.ln() / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn triangular_second_moment_identity() {
        // −ln(1 − x²) = x N'(x) − N(x), checked against quadrature.
        let d = PotentialDistribution::triangular();
        for &(e, l) in &[(2.0, 1.0), (1.2, 1.0), (3.0, 0.01), (2.0, 1.999)] {
            let q = d.inverse_moment_quadrature(e, l, 2).unwrap();
            assert_relative_eq!(d.inverse_moment2(e, l).unwrap(), q, max_relative = 1e-9);
        }
    }

    #[test]
    fn discrete_validation() {
        assert!(PotentialDistribution::discrete(&[(-1.0, 0.5), (0.5, 0.5)]).is_err());
        assert!(PotentialDistribution::discrete(&[(-1.0, 0.3), (1.0, 0.3)]).is_err());
        let d = PotentialDistribution::discrete(&[(-0.5, 0.5), (0.0, 0.25), (1.0, 0.25)]).unwrap();
        assert_eq!((d.v_minus(), d.v_plus()), (-0.5, 1.0));
        assert_relative_eq!(d.sigma2(), 0.375, max_relative = 1e-15);
    }

    #[test]
    fn samples_stay_in_support() {
        let mut rng = StreamKey::new(1).rng();
        for d in
            [PotentialDistribution::bernoulli(), PotentialDistribution::uniform(), PotentialDistribution::triangular()]
        {
            for _ in 0..10_000 {
                let v = d.sample(&mut rng);
                assert!(v >= d.v_minus() && v <= d.v_plus());
            }
        }
        let b = PotentialDistribution::bernoulli();
        assert!((0..100).all(|_| b.sample(&mut rng).abs() == 1.0));
    }

    #[test]
    fn i_lambda_bernoulli() {
        let set = PotentialDistribution::bernoulli().i_lambda(1.0);
        let r = 1.0 + 2.0f64.sqrt();
        assert_eq!(set.len(), 2);
        let [a, b] = [set.intervals()[0], set.intervals()[1]];
        assert!((a.lo + r).abs() < 1e-9 && a.hi == -1.0);
        assert!(b.lo == 1.0 && (b.hi - r).abs() < 1e-9);
        assert!(!b.lo_closed && !b.hi_closed);
    }

    #[test]
    fn triangular_threshold() {
        let d = PotentialDistribution::triangular();
        assert!(d.i_lambda(3.0).is_empty());
        assert!(d.i_lambda(4.0 * std::f64::consts::LN_2 + 1e-6).is_empty());
        assert_eq!(d.i_lambda(2.7).len(), 2);
    }

    #[test]
    fn j_lambda_crossing() {
        let d = PotentialDistribution::bernoulli();
        let j = d.j_lambda(1.0, 1.0);
        assert!(j.contains(2.0) && j.contains(2.25) && !j.contains(2.30));
        let right = j.intervals().iter().find(|i| i.lo >= 1.0).unwrap();
        assert!(right.hi > 2.25 && right.hi < 2.30);
        assert!(right.hi_closed);
        let g = d.effective_quantities(right.hi, 1.0).unwrap().gamma;
        assert!((g - 0.5).abs() < 1e-7);
    }

    #[test]
    fn j_lambda_large_c_fills_i() {
        let d = PotentialDistribution::uniform();
        let i = d.i_lambda(0.3);
        let j = d.j_lambda(0.3, 1e6);
        assert_eq!(i.len(), j.len());
        for (a, b) in i.intervals().iter().zip(j.intervals()) {
            assert!(b.lo - a.lo < 1e-3 && a.hi - b.hi < 1e-3);
            assert!(b.hi < a.hi || b.lo > a.lo);
        }
    }
}
