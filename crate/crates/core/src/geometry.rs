//! Antitree shell sequences and the radial combinatorics of `Z^d`.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum GrowthLaw {
    /// `s_0 = 1`, `s_n = max(1, round(C·n^(d−1)))`.
    UniformPower { d: f64, c: f64 },
    /// Explicit sizes `s_0, s_1, ...`.
    Custom(Vec<u64>),
}

impl GrowthLaw {
    pub fn uniform_power(d: f64, c: f64) -> Result<Self> {
        if !d.is_finite() || d < 1.0 {
            return Err(Error::InvalidLaw(format!("dimension {d} must be at least 1")));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidLaw(format!("growth constant {c} must be positive")));
        }
        Ok(GrowthLaw::UniformPower { d, c })
    }

    pub fn custom(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidLaw("empty shell sequence".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidLaw(format!("shell {i} has size 0")));
        }
        Ok(GrowthLaw::Custom(sizes))
    }

    /// Parses one positive integer per line; blank lines and `#` comments are
    /// skipped.
    pub fn parse_custom(text: &str) -> Result<Self> {
        let mut sizes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let t = line.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            let v: i64 =
                t.parse().map_err(|_| Error::InvalidLaw(format!("line {}: not an integer: {t:?}", lineno + 1)))?;
            if v <= 0 {
                return Err(Error::InvalidLaw(format!("line {}: nonpositive size {v}", lineno + 1)));
            }
            sizes.push(v as u64);
        }
        Self::custom(sizes)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidLaw(format!("{}: {e}", path.display())))?;
        Self::parse_custom(&text)
    }

    /// Size of shell `n`. Custom sequences repeat their last entry past the end.
    pub fn size(&self, n: u64) -> u64 {
        match self {
            GrowthLaw::UniformPower { d, c } => {
                if n == 0 {
                    return 1;
                }
                let alpha = d - 1.0;
                let p = if alpha.fract() == 0.0 && alpha <= 64.0 {
                    (n as f64).powi(alpha as i32)
                } else {
                    (n as f64).powf(alpha)
                };
                // f64::round is half-away-from-zero.
                (c * p).round().max(1.0) as u64
            }
            GrowthLaw::Custom(v) => v.get(n as usize).copied().unwrap_or(*v.last().unwrap()),
        }
    }

    /// Sizes of shells `0..=n_max` as an iterator.
    pub fn sizes(&self, n_max: u64) -> impl Iterator<Item = u64> + '_ {
        (0..=n_max).map(move |n| self.size(n))
    }

    pub fn shells(&self, n_max: u64) -> Result<ShellSequence> {
        if let GrowthLaw::Custom(v) = self {
            if (v.len() as u64) <= n_max {
                return Err(Error::InvalidLaw(format!(
                    "custom sequence has {} shells, {} requested",
                    v.len(),
                    n_max + 1
                )));
            }
        }
        Ok(ShellSequence::new(self.sizes(n_max).collect()))
    }

    /// Whether `Σ 1/s_n` converges. Custom sequences are judged by the growth
    /// exponent fitted on their upper half.
    pub fn inverse_sum_converges(&self) -> bool {
        match self {
            GrowthLaw::UniformPower { d, .. } => *d > 2.0,
            GrowthLaw::Custom(v) => {
                let n = v.len();
                if n < 8 {
                    return false;
                }
                let (i0, i1) = (n / 2, n - 1);
                let alpha = ((v[i1] as f64).ln() - (v[i0] as f64).ln()) / ((i1 as f64).ln() - (i0 as f64).ln());
                alpha > 1.0
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GrowthLaw::UniformPower { d, c } => format!("uniform_power(d={d}, C={c})"),
            GrowthLaw::Custom(v) => format!("custom({} shells)", v.len()),
        }
    }
}

/// Materialized shells `s_0..s_N` with volumes `b_n = Σ_{j≤n} s_j` and edge
/// weights `1/√(s_n s_{n+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellSequence {
    pub sizes: Vec<u64>,
    pub volumes: Vec<u64>,
    pub weights: Vec<f64>,
}

impl ShellSequence {
    pub fn new(sizes: Vec<u64>) -> Self {
        let mut acc = 0u64;
        let volumes = sizes
            .iter()
            .map(|&s| {
                acc += s;
                acc
            })
            .collect();
        let weights = sizes.windows(2).map(|w| 1.0 / ((w[0] as f64) * (w[1] as f64)).sqrt()).collect();
        Self { sizes, volumes, weights }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Partial sums `Σ_{j≤n} 1/s_j`.
    pub fn inverse_partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.sizes
            .iter()
            .map(|&s| {
                acc += 1.0 / s as f64;
                acc
            })
            .collect()
    }
}

/// Radial data of the sphere `S_n = {x ∈ Z^d : ‖x‖₁ = n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZdShellData {
    pub d: u32,
    pub n: u64,
    pub s_n: u128,
    /// `by_zero_count[k]`: points of `S_n` with exactly `k` zero coordinates.
    pub by_zero_count: Vec<u128>,
    /// Number of lattice edges from `S_n` to `S_{n+1}`.
    pub edge_count_out: u128,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn check_zd(d: u32, n: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("lattice dimension {d} must be at least 2")));
    }
    if n < 1 {
        return Err(Error::Domain("shell index must be at least 1".into()));
    }
    Ok(())
}

/// `s_{n,k} = C(d,k)·2^(d−k)·C(n−1, d−k−1)`: choose the zero coordinates, the
/// signs of the rest, and a composition of `n` into `d−k` positive parts.
pub fn zd_points_with_zeros(d: u32, n: u64, k: u32) -> u128 {
    if k >= d {
        return 0;
    }
    let m = (d - k) as u64;
    binomial(d as u64, k as u64) * (1u128 << m) * binomial(n - 1, m - 1)
}

/// The variant whose last factor is `C(n−1−k, d−1−k)`. Kept for the audit
/// table; it disagrees with enumeration whenever `0 < k < d−1`.
pub fn zd_points_with_zeros_shifted(d: u32, n: u64, k: u32) -> u128 {
    if k >= d || (k as u64) > n - 1 {
        return 0;
    }
    let m = (d - k) as u64;
    binomial(d as u64, k as u64) * (1u128 << m) * binomial(n - 1 - k as u64, m - 1)
}

pub fn zd_shell_counts(d: u32, n: u64) -> Result<ZdShellData> {
    check_zd(d, n)?;
    let by_zero_count: Vec<u128> = (0..=d).map(|k| zd_points_with_zeros(d, n, k)).collect();
    let s_n = by_zero_count.iter().sum();
    // A point with k zero coordinates has d + k neighbours one step further out.
    let edge_count_out = by_zero_count.iter().enumerate().map(|(k, &c)| (d as u128 + k as u128) * c).sum();
    Ok(ZdShellData { d, n, s_n, by_zero_count, edge_count_out })
}

/// `α_n` counted from the outer shell: a point of `S_{n+1}` with `k` zero
/// coordinates has `d − k` neighbours in `S_n`.
pub fn zd_edges_in(d: u32, n: u64) -> Result<u128> {
    let outer = zd_shell_counts(d, n + 1)?;
    Ok(outer.by_zero_count.iter().enumerate().map(|(k, &c)| (d as u128 - k as u128) * c).sum())
}

/// `a_n = α_{n−1} / √(s_n s_{n−1})`.
pub fn zd_hopping(d: u32, n: u64) -> Result<f64> {
    check_zd(d, n)?;
    if n < 2 {
        return Err(Error::Domain("hopping is defined for n ≥ 2".into()));
    }
    let prev = zd_shell_counts(d, n - 1)?;
    let cur = zd_shell_counts(d, n)?;
    Ok(prev.edge_count_out as f64 / ((cur.s_n as f64) * (prev.s_n as f64)).sqrt())
}

/// Exhaustive enumeration of `S_n` with direct neighbour counting.
pub fn zd_brute_force(d: u32, n: u64) -> Result<ZdShellData> {
    check_zd(d, n)?;
    if d > 5 || n > 12 {
        return Err(Error::SizeLimit(format!("brute force limited to d ≤ 5, n ≤ 12 (got d={d}, n={n})")));
    }
    let n = n as i64;
    let d_us = d as usize;
    let mut by_zero_count = vec![0u128; d_us + 1];
    let mut s_n = 0u128;
    let mut edges = 0u128;
    let mut x = vec![-n; d_us];
    loop {
        if x.iter().map(|c| c.abs()).sum::<i64>() == n {
            s_n += 1;
            by_zero_count[x.iter().filter(|&&c| c == 0).count()] += 1;
            for i in 0..d_us {
                for step in [-1i64, 1] {
                    let mut y = x.clone();
                    y[i] += step;
                    if y.iter().map(|c| c.abs()).sum::<i64>() == n + 1 {
                        edges += 1;
                    }
                }
            }
        }
        // Odometer over the cube [-n, n]^d.
        let mut i = 0;
        loop {
            if i == d_us {
                return Ok(ZdShellData { d, n: n as u64, s_n, by_zero_count, edge_count_out: edges });
            }
            if x[i] < n {
                x[i] += 1;
                break;
            }
            x[i] = -n;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_sizes() {
        let s = |d, c, n| GrowthLaw::uniform_power(d, c).unwrap().shells(n).unwrap().sizes;
        assert_eq!(s(2.0, 1.0, 5), vec![1, 1, 2, 3, 4, 5]);
        assert_eq!(s(3.0, 1.0, 4), vec![1, 1, 4, 9, 16]);
        assert_eq!(s(1.0, 1.0, 3), vec![1, 1, 1, 1]);
        assert_eq!(s(2.0, 0.1, 3), vec![1, 1, 1, 1]);
    }

    #[test]
    fn invalid_laws() {
        assert!(GrowthLaw::uniform_power(0.5, 1.0).is_err());
        assert!(GrowthLaw::uniform_power(2.0, 0.0).is_err());
        assert!(GrowthLaw::custom(vec![1, 0, 3]).is_err());
        assert!(GrowthLaw::parse_custom("1\n-2\n").is_err());
        let law = GrowthLaw::parse_custom("# sizes\n1\n\n2 \n3\n").unwrap();
        assert_eq!(law, GrowthLaw::Custom(vec![1, 2, 3]));
        assert!(law.shells(3).is_err());
    }

    #[test]
    fn volumes_and_weights() {
        let seq = ShellSequence::new(vec![1, 2, 3]);
        assert_eq!(seq.volumes, vec![1, 3, 6]);
        assert!((seq.weights[1] * 6f64.sqrt() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lattice_examples() {
        let a = zd_shell_counts(2, 3).unwrap();
        assert_eq!((a.s_n, a.by_zero_count[0], a.by_zero_count[1]), (12, 8, 4));
        let b = zd_shell_counts(3, 3).unwrap();
        assert_eq!(b.s_n, 38);
        assert_eq!(&b.by_zero_count[..3], &[8, 24, 6]);
        let c = zd_shell_counts(2, 1).unwrap();
        assert_eq!((c.s_n, c.by_zero_count[0], c.by_zero_count[1]), (4, 0, 4));
        assert_eq!(zd_brute_force(3, 2).unwrap().s_n, 18);
        assert_eq!(zd_brute_force(2, 1).unwrap().edge_count_out, 12);
    }

    #[test]
    fn shifted_variant_differs() {
        assert_eq!(zd_points_with_zeros(3, 3, 1), 24);
        assert_eq!(zd_points_with_zeros_shifted(3, 3, 1), 12);
    }

    #[test]
    fn hopping_values() {
        assert!((zd_hopping(2, 2).unwrap() - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((zd_hopping(2, 3).unwrap() - 5.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((zd_hopping(2, 10).unwrap() - 19.0 / 90f64.sqrt()).abs() < 1e-15);
        assert!((zd_hopping(2, 100).unwrap() - 2.0).abs() < 3e-5);
        assert!(zd_hopping(2, 1).is_err());
        assert!(zd_shell_counts(1, 3).is_err());
        assert!(zd_brute_force(6, 2).is_err());
    }
}
