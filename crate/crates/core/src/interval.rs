//! Finite unions of real intervals.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self { lo, hi, lo_closed, hi_closed }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo || (self.hi == self.lo && !(self.lo_closed && self.hi_closed))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Sorted, pairwise disjoint intervals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary intervals, dropping empty ones and merging
    /// any that overlap or touch with a closed end.
    pub fn from_intervals(mut items: Vec<Interval>) -> Self {
        items.retain(|i| !i.is_empty());
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for it in items {
            if let Some(last) = out.last_mut() {
                let joins = it.lo < last.hi || (it.lo == last.hi && (last.hi_closed || it.lo_closed));
                if joins {
                    if it.hi > last.hi {
                        last.hi = it.hi;
                        last.hi_closed = it.hi_closed;
                    } else if it.hi == last.hi {
                        last.hi_closed |= it.hi_closed;
                    }
                    continue;
                }
            }
            out.push(it);
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::from_intervals(all)
    }

    /// True when every point of `self` lies in the closure of `other`, up to
    /// `tol` at the endpoints.
    pub fn is_subset_of(&self, other: &IntervalSet, tol: f64) -> bool {
        self.intervals.iter().all(|a| other.intervals.iter().any(|b| a.lo >= b.lo - tol && a.hi <= b.hi + tol))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, it) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{it}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn open_endpoints_excluded() {
        let i = Interval::open(1.0, 2.0);
        assert!(!i.contains(1.0) && i.contains(1.5) && !i.contains(2.0));
    }

    #[test]
    fn touching_closed_intervals_merge() {
        let s = IntervalSet::from_intervals(vec![Interval::closed(2.0, 3.0), Interval::closed(0.0, 2.0)]);
        assert_eq!(s.intervals(), &[Interval::closed(0.0, 3.0)]);
    }

    #[test]
    fn touching_open_intervals_stay_apart() {
        let s = IntervalSet::from_intervals(vec![Interval::open(0.0, 1.0), Interval::open(1.0, 2.0)]);
        assert_eq!(s.len(), 2);
        assert!(!s.contains(1.0));
    }

    proptest! {
        #[test]
        fn normalized_sets_are_sorted_and_disjoint(
            raw in prop::collection::vec((-10.0f64..10.0, 0.0f64..3.0, any::<bool>(), any::<bool>()), 0..12)
        ) {
            let items = raw.iter().map(|&(lo, w, a, b)| Interval::new(lo, lo + w, a, b)).collect::<Vec<_>>();
            let s = IntervalSet::from_intervals(items.clone());
            for w in s.intervals().windows(2) {
                prop_assert!(w[0].hi <= w[1].lo);
                prop_assert!(w[0].lo < w[0].hi);
            }
            for it in items.iter().filter(|i| !i.is_empty()) {
                let mid = 0.5 * (it.lo + it.hi);
                prop_assert!(s.contains(mid));
            }
        }
    }
}
