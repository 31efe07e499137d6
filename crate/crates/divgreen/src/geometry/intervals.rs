//! Finite unions of open intervals on a line, used for exact line sections.

use crate::scalar::Scalar;

/// Sorted, pairwise disjoint open intervals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Intervals<T>(pub Vec<(T, T)>);

impl<T: Scalar> Intervals<T> {
    pub fn empty() -> Self {
        Intervals(Vec::new())
    }

    pub fn single(a: T, b: T) -> Self {
        if a < b {
            Intervals(vec![(a, b)])
        } else {
            Intervals::empty()
        }
    }

    pub fn full() -> Self {
        Intervals(vec![(T::neg_infinity(), T::infinity())])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_length(&self) -> T {
        self.0.iter().fold(T::zero(), |s, &(a, b)| s + (b - a))
    }

    pub fn union(&self, o: &Self) -> Self {
        let mut all: Vec<(T, T)> = self.0.iter().chain(o.0.iter()).copied().collect();
        all.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut out: Vec<(T, T)> = Vec::with_capacity(all.len());
        for (a, b) in all {
            match out.last_mut() {
                // Touching open intervals leave out a single point, which is
                // irrelevant for every integral, so they are merged.
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        Intervals(out)
    }

    pub fn intersect(&self, o: &Self) -> Self {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < o.0.len() {
            let (a0, a1) = self.0[i];
            let (b0, b1) = o.0[j];
            let lo = if a0 > b0 { a0 } else { b0 };
            let hi = if a1 < b1 { a1 } else { b1 };
            if lo < hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Intervals(out)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        let mut cur = T::neg_infinity();
        for &(a, b) in &self.0 {
            if cur < a {
                out.push((cur, a));
            }
            cur = b;
        }
        if cur < T::infinity() {
            out.push((cur, T::infinity()));
        }
        Intervals(out)
    }

    pub fn minus(&self, o: &Self) -> Self {
        if o.is_empty() || self.is_empty() {
            return self.clone();
        }
        self.intersect(&o.complement())
    }

    pub fn contains(&self, t: T) -> bool {
        self.0.iter().any(|&(a, b)| a < t && t < b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra_on_small_cases() {
        let a = Intervals(vec![(0.0, 2.0), (3.0, 5.0)]);
        let b = Intervals(vec![(1.0, 4.0)]);
        assert_eq!(a.union(&b).0, vec![(0.0, 5.0)]);
        assert_eq!(a.intersect(&b).0, vec![(1.0, 2.0), (3.0, 4.0)]);
        assert_eq!(a.minus(&b).0, vec![(0.0, 1.0), (4.0, 5.0)]);
        assert_eq!(b.minus(&a).0, vec![(2.0, 3.0)]);
        assert_eq!(a.total_length(), 4.0);
    }
}
