//! Keyed counter-based random streams.
//!
//! A stream is identified by a [`StreamKey`], derived from a master seed by
//! hashing in a path of identifiers (cell, trial, shell, ...). The n-th output
//! of a stream is a pure function of `(key, n)`, so any shell of any trial can
//! be regenerated without replaying the ones before it. Not cryptographic.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifier of one random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    k0: u64,
    k1: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64) -> Self {
        let k0 = mix64(master_seed ^ 0x6A09_E667_F3BC_C908);
        let k1 = mix64(k0.wrapping_add(GOLDEN) ^ 0xBB67_AE85_84CA_A73B);
        Self { k0, k1 }
    }

    /// Key of the sub-stream `id` below this one.
    pub fn child(self, id: u64) -> Self {
        let t = mix64(id.wrapping_mul(GOLDEN) ^ self.k1);
        let k0 = mix64(self.k0 ^ t);
        let k1 = mix64(self.k1.wrapping_add(t).rotate_left(23) ^ k0);
        Self { k0, k1 }
    }

    /// Key reached by descending through `path` in order.
    pub fn path(self, path: &[u64]) -> Self {
        path.iter().fold(self, |k, &id| k.child(id))
    }

    pub fn rng(self) -> CounterRng {
        CounterRng::new(self)
    }
}

/// Random stream whose state is only a key and a counter.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: StreamKey,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: StreamKey) -> Self {
        Self { key, counter: 0 }
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    pub fn position(&self) -> u64 {
        self.counter
    }

    pub fn seek(&mut self, position: u64) {
        self.counter = position;
    }

    #[inline(always)]
    pub fn at(key: StreamKey, position: u64) -> u64 {
        mix64(mix64(position.wrapping_mul(GOLDEN) ^ key.k0).wrapping_add(key.k1))
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let out = Self::at(self.key, self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    fn draws(key: StreamKey, n: usize) -> Vec<f64> {
        let mut r = key.rng();
        (0..n).map(|_| r.next_f64()).collect()
    }

    #[test]
    fn same_key_same_sequence() {
        let k = StreamKey::new(17).child(4);
        assert_eq!(draws(k, 1000), draws(k, 1000));
    }

    #[test]
    fn sibling_streams_decorrelated() {
        let base = StreamKey::new(17);
        let r = correlation(&draws(base.child(4), 100_000), &draws(base.child(5), 100_000));
        assert!(r.abs() < 0.01, "r = {r}");
    }

    #[test]
    fn adjacent_seeds_decorrelated() {
        let a = draws(StreamKey::new(17).child(4), 100_000);
        let b = draws(StreamKey::new(18).child(4), 100_000);
        assert!(correlation(&a, &b).abs() < 0.01);
    }

    #[test]
    fn seek_reproduces_tail() {
        let k = StreamKey::new(3).path(&[1, 2, 3]);
        let full = draws(k, 50);
        let mut r = k.rng();
        r.seek(20);
        assert_eq!(r.next_f64(), full[20]);
    }

    #[test]
    fn uniform_mean_and_variance() {
        let v = draws(StreamKey::new(99), 200_000);
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64;
        assert!((m - 0.5).abs() < 4.0 * (1.0 / 12.0f64).sqrt() / (v.len() as f64).sqrt());
        assert!((var - 1.0 / 12.0).abs() < 1e-3);
    }
}
