//! Eventually periodic and finite-support sequences, indexed from 1.

use std::collections::BTreeMap;

/// A countable sequence described by a finite amount of data.
///
/// `Periodic` yields `prefix[j]` for `j <= prefix.len()` and then repeats
/// `cycle` forever; the cycle must be nonempty for the sequence to be total.
/// `FiniteSupport` yields values only at the listed indices and is absent
/// elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EpSeq<T> {
    Periodic { prefix: Vec<T>, cycle: Vec<T> },
    FiniteSupport(BTreeMap<u64, T>),
}

impl<T> EpSeq<T> {
    pub fn empty() -> Self {
        EpSeq::FiniteSupport(BTreeMap::new())
    }

    pub fn constant(value: T) -> Self {
        EpSeq::Periodic {
            prefix: Vec::new(),
            cycle: vec![value],
        }
    }

    /// Value at 1-based index `j`, or `None` where the sequence is absent
    /// (index 0 is always absent).
    pub fn at(&self, j: u64) -> Option<&T> {
        if j == 0 {
            return None;
        }
        match self {
            EpSeq::Periodic { prefix, cycle } => {
                let p = prefix.len() as u64;
                if j <= p {
                    prefix.get(j as usize - 1)
                } else if cycle.is_empty() {
                    None
                } else {
                    let k = (j - p - 1) % cycle.len() as u64;
                    cycle.get(k as usize)
                }
            }
            EpSeq::FiniteSupport(map) => map.get(&j),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, EpSeq::Periodic { .. })
    }

    /// Indices that must be inspected to see every value the sequence takes:
    /// the prefix plus one full cycle, or the whole support.
    pub fn inspection_horizon(&self) -> u64 {
        match self {
            EpSeq::Periodic { prefix, cycle } => (prefix.len() + cycle.len()) as u64,
            EpSeq::FiniteSupport(map) => map.keys().next_back().copied().unwrap_or(0),
        }
    }
}

impl<T: Clone + PartialEq> EpSeq<T> {
    /// Canonical form. The cycle is reduced to its primitive root and the
    /// prefix is folded into the cycle as far as possible, so two sequences
    /// describe the same function iff their canonical forms are equal.
    ///
    /// `trivial` marks values that count as absent: a periodic sequence whose
    /// cycle is entirely trivial degenerates to finite support, and trivial
    /// support entries are dropped.
    pub fn normalized_with(&self, trivial: impl Fn(&T) -> bool) -> Self {
        match self {
            EpSeq::FiniteSupport(map) => EpSeq::FiniteSupport(
                map.iter()
                    .filter(|(_, v)| !trivial(v))
                    .map(|(k, v)| (*k, v.clone()))
                    .collect(),
            ),
            EpSeq::Periodic { prefix, cycle } => {
                if cycle.is_empty() || cycle.iter().all(&trivial) {
                    let map = prefix
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !trivial(v))
                        .map(|(i, v)| (i as u64 + 1, v.clone()))
                        .collect();
                    return EpSeq::FiniteSupport(map);
                }
                let mut prefix = prefix.clone();
                let mut cycle = cycle.clone();
                for d in 1..=cycle.len() {
                    if cycle.len() % d == 0 && is_power_of(&cycle, d) {
                        cycle.truncate(d);
                        break;
                    }
                }
                while let Some(last) = prefix.last() {
                    if *last == cycle[cycle.len() - 1] {
                        prefix.pop();
                        cycle.rotate_right(1);
                    } else {
                        break;
                    }
                }
                EpSeq::Periodic { prefix, cycle }
            }
        }
    }

    pub fn normalized(&self) -> Self {
        self.normalized_with(|_| false)
    }

    /// Whether two sequences agree at every index.
    pub fn same_sequence(&self, other: &Self, trivial: impl Fn(&T) -> bool) -> bool {
        self.normalized_with(&trivial) == other.normalized_with(&trivial)
    }
}

fn is_power_of<T: PartialEq>(cycle: &[T], d: usize) -> bool {
    cycle.iter().enumerate().all(|(i, v)| *v == cycle[i % d])
}

/// How often a predicate holds along a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occurrences {
    Finite(u64),
    Infinite,
}

impl<T> EpSeq<T> {
    /// Counts indices where `pred` holds, detecting infinite recurrence
    /// through the cycle.
    pub fn occurrences(&self, pred: impl Fn(&T) -> bool) -> Occurrences {
        match self {
            EpSeq::FiniteSupport(map) => {
                Occurrences::Finite(map.values().filter(|v| pred(v)).count() as u64)
            }
            EpSeq::Periodic { prefix, cycle } => {
                if cycle.iter().any(&pred) {
                    Occurrences::Infinite
                } else {
                    Occurrences::Finite(prefix.iter().filter(|v| pred(v)).count() as u64)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_periodic() {
        let s = EpSeq::Periodic {
            prefix: vec!['a', 'b'],
            cycle: vec!['x', 'y'],
        };
        let got: Vec<char> = (1..=7).map(|j| *s.at(j).unwrap()).collect();
        assert_eq!(got, vec!['a', 'b', 'x', 'y', 'x', 'y', 'x']);
    }

    #[test]
    fn indexing_finite_support() {
        let s: EpSeq<u32> = EpSeq::FiniteSupport([(2u64, 7u32)].into_iter().collect());
        assert_eq!(s.at(1), None);
        assert_eq!(s.at(2), Some(&7));
        assert_eq!(s.at(3), None);
    }

    #[test]
    fn normalization_folds_prefix_and_reduces_cycle() {
        // a b (c a b c a b)^inf  ==  a b (cab)^inf  ==  (abc)^inf shifted:
        // folding pulls the whole prefix into the cycle.
        let s = EpSeq::Periodic {
            prefix: vec!['a', 'b'],
            cycle: vec!['c', 'a', 'b', 'c', 'a', 'b'],
        };
        let n = s.normalized();
        assert_eq!(
            n,
            EpSeq::Periodic {
                prefix: vec![],
                cycle: vec!['a', 'b', 'c'],
            }
        );
        // Normalization preserves the sequence.
        for j in 1..=12 {
            assert_eq!(s.at(j), n.at(j), "index {j}");
        }
    }

    #[test]
    fn normalization_is_canonical_for_equal_sequences() {
        let a = EpSeq::Periodic {
            prefix: vec![1, 2],
            cycle: vec![3, 1],
        };
        let b = EpSeq::Periodic {
            prefix: vec![1, 2, 3],
            cycle: vec![1, 3],
        };
        assert!(a.same_sequence(&b, |_| false));
        assert_eq!(a.normalized(), b.normalized());
    }

    #[test]
    fn all_trivial_cycle_degenerates() {
        let s = EpSeq::Periodic {
            prefix: vec![vec![1], vec![]],
            cycle: vec![Vec::<u32>::new()],
        };
        let n = s.normalized_with(|v| v.is_empty());
        assert_eq!(
            n,
            EpSeq::FiniteSupport([(1u64, vec![1])].into_iter().collect())
        );
    }

    #[test]
    fn occurrence_counting() {
        let s = EpSeq::Periodic {
            prefix: vec![0, 5],
            cycle: vec![0],
        };
        assert_eq!(s.occurrences(|v| *v == 5), Occurrences::Finite(1));
        assert_eq!(s.occurrences(|v| *v == 0), Occurrences::Infinite);
    }
}
