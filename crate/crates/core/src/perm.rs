//! Permutations in one-line notation, classical pattern containment, and
//! enumeration of pattern avoiders.
//!
//! Values and positions are 1-based throughout the public surface. The empty
//! permutation is legal and avoids every pattern.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("value {value} at position {position} is outside 1..={len}")]
    OutOfRange {
        position: usize,
        value: u32,
        len: usize,
    },
    #[error("value {0} appears more than once")]
    Repeated(u32),
    #[error("a pattern must have at least one entry")]
    EmptyPattern,
    #[error("cannot parse permutation from {0:?}")]
    Parse(String),
}

/// A permutation of `1..=n` stored in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    pub fn new(entries: Vec<u32>) -> Result<Self, PermError> {
        let len = entries.len();
        let mut seen = vec![false; len + 1];
        for (i, &v) in entries.iter().enumerate() {
            if v == 0 || v as usize > len {
                return Err(PermError::OutOfRange {
                    position: i + 1,
                    value: v,
                    len,
                });
            }
            if seen[v as usize] {
                return Err(PermError::Repeated(v));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { entries })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            entries: (1..=n as u32).collect(),
        }
    }

    // Callers guarantee the bijection.
    pub(crate) fn from_vec_unchecked(entries: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(entries.clone()).is_ok());
        Permutation { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Value at 1-based `position`.
    pub fn at(&self, position: usize) -> u32 {
        self.entries[position - 1]
    }

    /// The 1-based position holding `value`.
    pub fn position_of(&self, value: u32) -> usize {
        self.inverse_positions()[value as usize - 1]
    }

    /// `result[v - 1]` is the 1-based position of value `v`.
    pub fn inverse_positions(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.entries.iter().enumerate() {
            inv[v as usize - 1] = i + 1;
        }
        inv
    }

    /// The permutation order-isomorphic to an arbitrary sequence of distinct values.
    pub fn standardize(values: &[u32]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by_key(|&i| values[i]);
        let mut entries = vec![0; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            entries[i] = rank as u32 + 1;
        }
        Permutation { entries }
    }
}

impl fmt::Display for Permutation {
    /// Concatenated digits when every value fits in one digit, otherwise comma separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.entries {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.entries.iter().map(u32::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Accepts `3612745` (single digits) or `3,6,1,2,7,4,5` / whitespace separated.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let entries: Result<Vec<u32>, _> = if s.contains(|c: char| c == ',' || c.is_whitespace())
        {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| PermError::Parse(s.to_string())))
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| PermError::Parse(s.to_string()))
                })
                .collect()
        };
        Permutation::new(entries?)
    }
}

/// A non-empty permutation used as a pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern(Permutation);

impl Pattern {
    pub fn new(perm: Permutation) -> Result<Self, PermError> {
        if perm.is_empty() {
            return Err(PermError::EmptyPattern);
        }
        Ok(Pattern(perm))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[u32] {
        self.0.entries()
    }

    pub fn as_permutation(&self) -> &Permutation {
        &self.0
    }

    /// The pattern 1324.
    pub fn p1324() -> Self {
        Pattern(Permutation::from_vec_unchecked(vec![1, 3, 2, 4]))
    }
}

impl FromStr for Pattern {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pattern::new(s.parse()?)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Extends a partial embedding of `q[..chosen.len()]` into `values` and reports
/// whether it completes. Each new index is checked for relative order against
/// every entry already placed, so inconsistent branches die immediately.
fn embed(values: &[u32], q: &[u32], chosen: &mut Vec<usize>, start: usize) -> bool {
    let depth = chosen.len();
    if depth == q.len() {
        return true;
    }
    let remaining = q.len() - depth;
    if values.len() < start + remaining {
        return false;
    }
    for idx in start..=values.len() - remaining {
        let v = values[idx];
        let consistent = chosen
            .iter()
            .zip(q)
            .all(|(&ci, &qv)| (values[ci] < v) == (qv < q[depth]));
        if consistent {
            chosen.push(idx);
            if embed(values, q, chosen, idx + 1) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn contains_values(values: &[u32], q: &[u32]) -> bool {
    if q.len() > values.len() {
        return false;
    }
    let mut chosen = Vec::with_capacity(q.len());
    embed(values, q, &mut chosen, 0)
}

/// True iff some subsequence of `p` is order-isomorphic to `q`.
pub fn contains(p: &Permutation, q: &Pattern) -> bool {
    contains_values(p.entries(), q.entries())
}

/// Same as [`contains`] for any sequence of distinct values (e.g. the red or blue
/// subsequence of a permutation).
pub fn sequence_contains(values: &[u32], q: &Pattern) -> bool {
    contains_values(values, q.entries())
}

/// Checks every `k`-subset of positions. Exponentially slower than [`contains`];
/// used as its cross-check.
pub fn contains_naive(p: &Permutation, q: &Pattern) -> bool {
    let (n, k) = (p.len(), q.len());
    if k > n {
        return false;
    }
    let vals = p.entries();
    let qv = q.entries();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let iso = (0..k).all(|a| (0..k).all(|b| (vals[idx[a]] < vals[idx[b]]) == (qv[a] < qv[b])));
        if iso {
            return true;
        }
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Does `prefix` contain an occurrence of `q` whose last entry is the last entry
/// of `prefix`? Prefixes are extended one entry at a time, so this is the only
/// new occurrence that can appear.
fn completes_occurrence(prefix: &[u32], q: &[u32]) -> bool {
    let k = q.len();
    let n = prefix.len();
    if k > n {
        return false;
    }
    let last = prefix[n - 1];
    let head = &q[..k - 1];
    let q_last = q[k - 1];
    // Only entries on the correct side of `last` can stand for each q value.
    let mut chosen = Vec::with_capacity(k - 1);
    embed_with_last(&prefix[..n - 1], head, q_last, last, &mut chosen, 0)
}

fn embed_with_last(
    values: &[u32],
    q: &[u32],
    q_last: u32,
    last: u32,
    chosen: &mut Vec<usize>,
    start: usize,
) -> bool {
    let depth = chosen.len();
    if depth == q.len() {
        return true;
    }
    let remaining = q.len() - depth;
    if values.len() < start + remaining {
        return false;
    }
    for idx in start..=values.len() - remaining {
        let v = values[idx];
        if (v < last) != (q[depth] < q_last) {
            continue;
        }
        let consistent = chosen
            .iter()
            .zip(q)
            .all(|(&ci, &qv)| (values[ci] < v) == (qv < q[depth]));
        if consistent {
            chosen.push(idx);
            if embed_with_last(values, q, q_last, last, chosen, idx + 1) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn count_from_prefix(prefix: &mut Vec<u32>, used: &mut [bool], n: usize, q: &[u32]) -> u64 {
    if prefix.len() == n {
        return 1;
    }
    let mut total = 0;
    for v in 1..=n as u32 {
        if used[v as usize] {
            continue;
        }
        prefix.push(v);
        if !completes_occurrence(prefix, q) {
            used[v as usize] = true;
            total += count_from_prefix(prefix, used, n, q);
            used[v as usize] = false;
        }
        prefix.pop();
    }
    total
}

/// Number of `n`-permutations avoiding `q`, by prefix backtracking that prunes
/// any prefix already containing `q`. Sharded by first entry across the rayon
/// pool; the total does not depend on the shard layout.
pub fn count_avoiders(n: usize, q: &Pattern) -> BigUint {
    if n == 0 {
        return BigUint::from(1u32);
    }
    let qv = q.entries();
    let total: u64 = (1..=n as u32)
        .into_par_iter()
        .map(|first| {
            let mut prefix = vec![first];
            let mut used = vec![false; n + 1];
            used[first as usize] = true;
            if completes_occurrence(&prefix, qv) {
                return 0;
            }
            count_from_prefix(&mut prefix, &mut used, n, qv)
        })
        .sum();
    BigUint::from(total)
}

/// Filters all `n!` permutations through [`contains_naive`]. Independent of the
/// backtracking path; only practical for small `n`.
pub fn count_avoiders_naive(n: usize, q: &Pattern) -> BigUint {
    let total: u64 = AllPermutations::new(n)
        .filter(|p| !contains_naive(p, q))
        .map(|_| 1u64)
        .sum();
    BigUint::from(total)
}

/// All permutations of length `n` in lexicographic order.
pub struct AllPermutations {
    current: Option<Vec<u32>>,
}

impl AllPermutations {
    pub fn new(n: usize) -> Self {
        AllPermutations {
            current: Some((1..=n as u32).collect()),
        }
    }
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.current.take()?;
        let out = Permutation::from_vec_unchecked(cur.clone());
        let mut next = cur;
        let n = next.len();
        if n > 1 {
            let mut i = n - 1;
            while i > 0 && next[i - 1] >= next[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while next[j] <= next[i - 1] {
                    j -= 1;
                }
                next.swap(i - 1, j);
                next[i..].reverse();
                self.current = Some(next);
            }
        }
        Some(out)
    }
}

/// Streams the `q`-avoiding permutations of length `n` in lexicographic order.
pub fn enumerate_avoiders(n: usize, q: &Pattern) -> Avoiders {
    Avoiders {
        n,
        q: q.entries().to_vec(),
        prefix: Vec::with_capacity(n),
        used: vec![false; n + 1],
        next_candidate: vec![1],
        done: false,
    }
}

/// Iterator returned by [`enumerate_avoiders`]; a depth-first walk over
/// avoiding prefixes with an explicit stack.
pub struct Avoiders {
    n: usize,
    q: Vec<u32>,
    prefix: Vec<u32>,
    used: Vec<bool>,
    // next value to try at each depth
    next_candidate: Vec<u32>,
    done: bool,
}

impl Iterator for Avoiders {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        if self.n == 0 {
            self.done = true;
            return Some(Permutation::identity(0));
        }
        loop {
            let depth = self.prefix.len();
            if depth == self.n {
                let out = Permutation::from_vec_unchecked(self.prefix.clone());
                let v = self.prefix.pop().unwrap();
                self.used[v as usize] = false;
                return Some(out);
            }
            let start = self.next_candidate[depth];
            let mut advanced = false;
            for v in start..=self.n as u32 {
                if self.used[v as usize] {
                    continue;
                }
                self.prefix.push(v);
                if completes_occurrence(&self.prefix, &self.q) {
                    self.prefix.pop();
                    continue;
                }
                self.used[v as usize] = true;
                self.next_candidate[depth] = v + 1;
                if self.next_candidate.len() == depth + 1 {
                    self.next_candidate.push(1);
                } else {
                    self.next_candidate[depth + 1] = 1;
                }
                advanced = true;
                break;
            }
            if !advanced {
                if depth == 0 {
                    self.done = true;
                    return None;
                }
                let v = self.prefix.pop().unwrap();
                self.used[v as usize] = false;
            }
        }
    }
}

/// 1-based positions of left-to-right minima.
pub fn left_to_right_minima(p: &Permutation) -> Vec<usize> {
    let mut out = Vec::new();
    let mut min = u32::MAX;
    for (i, &v) in p.entries().iter().enumerate() {
        if v < min {
            min = v;
            out.push(i + 1);
        }
    }
    out
}

/// 1-based positions of right-to-left maxima, in increasing position order.
pub fn right_to_left_maxima(p: &Permutation) -> Vec<usize> {
    let mut out = Vec::new();
    let mut max = 0;
    for (i, &v) in p.entries().iter().enumerate().rev() {
        if v > max {
            max = v;
            out.push(i + 1);
        }
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(matches!(
            Permutation::new(vec![1, 1]),
            Err(PermError::Repeated(1))
        ));
        assert!(matches!(
            Permutation::new(vec![0, 1]),
            Err(PermError::OutOfRange { .. })
        ));
        assert!(matches!(
            Permutation::new(vec![3, 1]),
            Err(PermError::OutOfRange { .. })
        ));
        assert!("12a".parse::<Permutation>().is_err());
        assert_eq!("".parse::<Pattern>(), Err(PermError::EmptyPattern));
    }

    #[test]
    fn parses_both_notations() {
        assert_eq!(perm("312"), perm("3,1,2"));
        let big = perm("10 1 2 3 4 5 6 7 8 9");
        assert_eq!(big.at(1), 10);
        assert_eq!(big.to_string(), "10,1,2,3,4,5,6,7,8,9");
        assert_eq!(perm("3612745").to_string(), "3612745");
    }

    #[test]
    fn containment_examples() {
        assert!(!contains(&perm("2537164"), &pat("1234")));
        assert!(contains(&perm("1324"), &pat("1324")));
        assert!(!contains(&perm("3612745"), &pat("1324")));
        assert!(!contains(&perm("12"), &pat("123")));
        assert!(!contains(&Permutation::identity(0), &pat("1")));
        assert!(contains(&perm("1"), &pat("1")));
    }

    #[test]
    fn pruned_matches_naive_exhaustively() {
        let patterns = ["1", "12", "21", "132", "213", "1324", "4231", "2413"];
        for n in 0..=7 {
            for p in AllPermutations::new(n) {
                for q in patterns {
                    let q = pat(q);
                    assert_eq!(contains(&p, &q), contains_naive(&p, &q), "{p} {q}");
                }
            }
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count_avoiders(4, &Pattern::p1324()), BigUint::from(23u32));
        assert_eq!(count_avoiders(0, &Pattern::p1324()), BigUint::from(1u32));
        assert_eq!(count_avoiders(5, &pat("132")), BigUint::from(42u32));
        assert_eq!(count_avoiders(3, &pat("1324")), BigUint::from(6u32));
    }

    #[test]
    fn enumeration_examples() {
        let one: Vec<_> = enumerate_avoiders(1, &Pattern::p1324()).collect();
        assert_eq!(one, vec![perm("1")]);
        let three: Vec<_> = enumerate_avoiders(3, &Pattern::p1324()).collect();
        assert_eq!(three, AllPermutations::new(3).collect::<Vec<_>>());
        let four: Vec<_> = enumerate_avoiders(4, &Pattern::p1324()).collect();
        assert_eq!(four.len(), 23);
        assert!(!four.contains(&perm("1324")));
        let zero: Vec<_> = enumerate_avoiders(0, &Pattern::p1324()).collect();
        assert_eq!(zero, vec![Permutation::identity(0)]);
    }

    #[test]
    fn enumeration_is_lexicographic_filter() {
        let q = pat("231");
        for n in 0..=6 {
            let streamed: Vec<_> = enumerate_avoiders(n, &q).collect();
            let filtered: Vec<_> = AllPermutations::new(n)
                .filter(|p| !contains_naive(p, &q))
                .collect();
            assert_eq!(streamed, filtered);
        }
    }

    #[test]
    fn extremal_entries() {
        let p = perm("3612745");
        assert_eq!(left_to_right_minima(&p), vec![1, 3]);
        assert_eq!(right_to_left_maxima(&p), vec![5, 7]);
        assert_eq!(left_to_right_minima(&perm("123")), vec![1]);
        assert_eq!(right_to_left_maxima(&perm("123")), vec![3]);
        assert_eq!(left_to_right_minima(&perm("321")), vec![1, 2, 3]);
        assert_eq!(right_to_left_maxima(&perm("321")), vec![1, 2, 3]);
        assert!(left_to_right_minima(&Permutation::identity(0)).is_empty());
    }

    #[test]
    fn standardize_keeps_relative_order() {
        assert_eq!(Permutation::standardize(&[36, 12, 7, 45]), perm("3214"));
        assert_eq!(perm("3612745").position_of(7), 5);
    }
}
