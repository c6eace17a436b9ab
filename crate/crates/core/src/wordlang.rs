//! Words over `{A, B, C, D}`: CB-factors, segments, CAB^k runs and the pair
//! conditions that define the counting sequences h, k and t.
//!
//! A pair `(w, z)` is admissible when
//!
//! * (i) both words are non-empty and start with `A`,
//! * (ii) they contain the same number of `A`s,
//! * (iii) neither contains a `CB` factor,
//!
//! and, depending on the [`ConstraintSet`], the `i`-th `A` from the *right* of
//! `w` constrains the `i`-th segment from the *left* of `z`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::encoder::{encode, MarkingMode, WordPair};
use crate::perm::{enumerate_avoiders, Pattern, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("invalid letter {0:?}; expected one of A, B, C, D")]
    InvalidLetter(char),
    #[error("A-index {index} out of range; the word has {a_count} letters A")]
    AIndexOutOfRange { index: usize, a_count: usize },
    #[error("total length {n} exceeds the brute-force cap {cap}")]
    AboveCap { n: usize, cap: usize },
    #[error("total length {0} is below the minimum of 2")]
    BelowMinimum(usize),
    #[error("word has {0} letters before its first A")]
    LeadingPrefix(usize),
    #[error("lemma verification is limited to n <= {max}, got {n}")]
    LemmaSizeTooLarge { n: usize, max: usize },
    #[error("unknown constraint {0:?}; expected iv, v or vi")]
    UnknownConstraint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
            Letter::D => 'D',
        }
    }

    pub fn from_char(c: char) -> Result<Self, WordError> {
        match c {
            'A' => Ok(Letter::A),
            'B' => Ok(Letter::B),
            'C' => Ok(Letter::C),
            'D' => Ok(Letter::D),
            other => Err(WordError::InvalidLetter(other)),
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_char(self.as_char())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A finite word over `{A, B, C, D}`. Serialized as a plain string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    pub fn starts_with_a(&self) -> bool {
        self.0.first() == Some(&Letter::A)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars().map(Letter::from_char).collect::<Result<_, _>>().map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn letters_have_cb(letters: &[Letter]) -> bool {
    letters
        .windows(2)
        .any(|p| p[0] == Letter::C && p[1] == Letter::B)
}

/// True iff some `C` is immediately followed by a `B`.
pub fn has_cb_factor(v: &Word) -> bool {
    letters_have_cb(v.letters())
}

/// Number of letters before the first `A` (the whole length if there is none).
pub fn leading_prefix_len(v: &Word) -> usize {
    v.letters()
        .iter()
        .position(|&l| l == Letter::A)
        .unwrap_or(v.len())
}

/// Splits `v` into segments: each starts at an `A` and runs up to the next `A`
/// or the end. Letters before the first `A` belong to no segment and are
/// dropped; see [`segments_strict`].
pub fn segments(v: &Word) -> Vec<Word> {
    let start = leading_prefix_len(v);
    let mut out: Vec<Word> = Vec::new();
    for &l in &v.letters()[start..] {
        if l == Letter::A {
            out.push(Word(vec![l]));
        } else {
            out.last_mut().expect("segment started").0.push(l);
        }
    }
    out
}

/// Like [`segments`] but rejects words with letters before the first `A`.
pub fn segments_strict(v: &Word) -> Result<Vec<Word>, WordError> {
    match leading_prefix_len(v) {
        0 => Ok(segments(v)),
        k => Err(WordError::LeadingPrefix(k)),
    }
}

/// Number of CB-free segments of length `n`: `s_0 = 0`, `s_1 = 1`,
/// `s_n = 3 s_{n-1} - s_{n-2}`.
pub fn count_segments_nocb(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    let (mut prev, mut cur) = (BigUint::zero(), BigUint::one());
    for _ in 1..n {
        let next = &cur * 3u32 - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `|NO(CB)_n|`, by a two-state transfer count (last letter `C` or not).
pub fn count_nocb_words(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    // words ending in C, words ending in anything else
    let (mut ends_c, mut other) = (BigUint::one(), BigUint::from(3u32));
    for _ in 1..n {
        let next_c = &ends_c + &other;
        let next_other = &ends_c * 2u32 + &other * 3u32;
        ends_c = next_c;
        other = next_other;
    }
    ends_c + other
}

/// Length of the maximal `B` run after the `i`-th `A` from the right of `w`,
/// provided that `A` is immediately preceded by `C`; 0 otherwise.
pub fn cab_run_length(w: &Word, i: usize) -> Result<usize, WordError> {
    let letters = w.letters();
    let a_positions: Vec<usize> = letters
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == Letter::A)
        .map(|(j, _)| j)
        .collect();
    if i == 0 || i > a_positions.len() {
        return Err(WordError::AIndexOutOfRange {
            index: i,
            a_count: a_positions.len(),
        });
    }
    Ok(cab_run_at(letters, a_positions[a_positions.len() - i]))
}

fn cab_run_at(letters: &[Letter], j: usize) -> usize {
    if j == 0 || letters[j - 1] != Letter::C {
        return 0;
    }
    letters[j + 1..]
        .iter()
        .take_while(|&&l| l == Letter::B)
        .count()
}

/// Which of the optional conditions (iv), (v), (vi) are active on top of the
/// always-on (i)-(iii).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub cond_iv: bool,
    pub cond_v: bool,
    pub cond_vi: bool,
}

impl ConstraintSet {
    /// Conditions (i)-(iv); counted by h.
    pub const H: ConstraintSet = ConstraintSet {
        cond_iv: true,
        cond_v: false,
        cond_vi: false,
    };
    /// Conditions (i)-(v); counted by k.
    pub const K: ConstraintSet = ConstraintSet {
        cond_iv: true,
        cond_v: true,
        cond_vi: false,
    };
    /// Conditions (i)-(iii) and (vi); counted by t.
    pub const T: ConstraintSet = ConstraintSet {
        cond_iv: false,
        cond_v: false,
        cond_vi: true,
    };
    /// Only (i)-(iii).
    pub const BASE: ConstraintSet = ConstraintSet {
        cond_iv: false,
        cond_v: false,
        cond_vi: false,
    };

    /// Does a CAB run of length `run` at the `i`-th A allow `b_count` letters
    /// B in the matching segment?
    fn allows(&self, run: u8, b_count: u8) -> bool {
        !(self.cond_iv && run >= 1 && b_count < 1)
            && !(self.cond_v && run >= 2 && b_count < 2)
            && !(self.cond_vi && b_count < run)
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.cond_iv {
            parts.push("iv");
        }
        if self.cond_v {
            parts.push("v");
        }
        if self.cond_vi {
            parts.push("vi");
        }
        f.write_str(&parts.join(","))
    }
}

impl FromStr for ConstraintSet {
    type Err = WordError;

    /// Comma-separated flags, e.g. `iv,v`; also accepts the names `h`, `k`, `t`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "h" => return Ok(ConstraintSet::H),
            "k" => return Ok(ConstraintSet::K),
            "t" => return Ok(ConstraintSet::T),
            "" | "base" => return Ok(ConstraintSet::BASE),
            _ => {}
        }
        let mut c = ConstraintSet::BASE;
        for part in s.split(',').map(str::trim) {
            match part.to_ascii_lowercase().as_str() {
                "iv" => c.cond_iv = true,
                "v" => c.cond_v = true,
                "vi" => c.cond_vi = true,
                _ => return Err(WordError::UnknownConstraint(part.to_string())),
            }
        }
        Ok(c)
    }
}

/// Longest word the brute-force counter will profile.
pub const MAX_PROFILE_LEN: usize = 32;

/// Default cap on the total length `|w| + |z|` for [`brute_count_pairs`].
pub const DEFAULT_PAIR_CAP: usize = 14;

/// Everything about one word that the pair conditions look at.
#[derive(Debug, Clone, Copy)]
struct Profile {
    starts_with_a: bool,
    has_cb: bool,
    a_count: u8,
    /// `cab[i - 1]` = CAB run length at the i-th A from the right.
    cab: [u8; MAX_PROFILE_LEN],
    /// `seg_b[i - 1]` = letters B in the i-th segment from the left.
    seg_b: [u8; MAX_PROFILE_LEN],
}

impl Profile {
    fn of(letters: &[Letter]) -> Self {
        assert!(letters.len() <= MAX_PROFILE_LEN, "word too long to profile");
        let mut p = Profile {
            starts_with_a: letters.first() == Some(&Letter::A),
            has_cb: letters_have_cb(letters),
            a_count: 0,
            cab: [0; MAX_PROFILE_LEN],
            seg_b: [0; MAX_PROFILE_LEN],
        };
        let mut a_positions = [0usize; MAX_PROFILE_LEN];
        for (j, &l) in letters.iter().enumerate() {
            match l {
                Letter::A => {
                    a_positions[p.a_count as usize] = j;
                    p.a_count += 1;
                }
                Letter::B if p.a_count > 0 => p.seg_b[p.a_count as usize - 1] += 1,
                _ => {}
            }
        }
        let a = p.a_count as usize;
        for i in 1..=a {
            p.cab[i - 1] = cab_run_at(letters, a_positions[a - i]) as u8;
        }
        p
    }
}

fn profiles_admissible(w: &Profile, z: &Profile, c: ConstraintSet) -> bool {
    if !(w.starts_with_a && z.starts_with_a) || w.a_count != z.a_count || w.has_cb || z.has_cb {
        return false;
    }
    (0..w.a_count as usize).all(|i| c.allows(w.cab[i], z.seg_b[i]))
}

/// Checks conditions (i)-(iii) plus whichever of (iv), (v), (vi) `c` activates.
pub fn check_pair(w: &Word, z: &Word, c: ConstraintSet) -> bool {
    if w.len() > MAX_PROFILE_LEN || z.len() > MAX_PROFILE_LEN {
        return check_pair_direct(w, z, c);
    }
    profiles_admissible(&Profile::of(w.letters()), &Profile::of(z.letters()), c)
}

/// Literal restatement of [`check_pair`] through [`cab_run_length`] and
/// [`segments`]; no length limit.
fn check_pair_direct(w: &Word, z: &Word, c: ConstraintSet) -> bool {
    if !w.starts_with_a() || !z.starts_with_a() {
        return false;
    }
    let a = w.count(Letter::A);
    if a != z.count(Letter::A) || has_cb_factor(w) || has_cb_factor(z) {
        return false;
    }
    let segs = segments(z);
    (1..=a).all(|i| {
        let run = cab_run_length(w, i).expect("index in range");
        let b = segs[i - 1].count(Letter::B);
        !(c.cond_iv && run >= 1 && b < 1)
            && !(c.cond_v && run >= 2 && b < 2)
            && !(c.cond_vi && b < run)
    })
}

/// Calls `f` on every CB-free word of length `len` that starts with `prefix`.
/// `prefix` must itself be CB-free.
fn for_each_nocb_extension(prefix: &mut Vec<Letter>, len: usize, f: &mut impl FnMut(&[Letter])) {
    if prefix.len() == len {
        f(prefix);
        return;
    }
    let last = prefix.last().copied();
    for l in Letter::ALL {
        if last == Some(Letter::C) && l == Letter::B {
            continue;
        }
        prefix.push(l);
        for_each_nocb_extension(prefix, len, f);
        prefix.pop();
    }
}

/// CB-free words of length `len` starting with `A`, truncated to `depth`
/// letters; the seeds for parallel enumeration.
fn nocb_prefixes(len: usize, depth: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut start = vec![Letter::A];
    for_each_nocb_extension(&mut start, depth.min(len).max(1), &mut |w| out.push(w.to_vec()));
    out
}

/// Profiles of all admissible-shape words of length `len`, bucketed by A-count.
fn profiles_by_a_count(len: usize) -> Vec<Vec<Profile>> {
    let mut buckets = vec![Vec::new(); len + 1];
    let mut start = vec![Letter::A];
    for_each_nocb_extension(&mut start, len, &mut |w| {
        let p = Profile::of(w);
        buckets[p.a_count as usize].push(p);
    });
    buckets
}

/// Exhaustive count of pairs with `|w| + |z| = n` passing [`check_pair`] under
/// `c`, using the default cap.
pub fn brute_count_pairs(n: usize, c: ConstraintSet) -> Result<BigUint, WordError> {
    brute_count_pairs_capped(n, c, DEFAULT_PAIR_CAP)
}

pub fn brute_count_pairs_capped(
    n: usize,
    c: ConstraintSet,
    cap: usize,
) -> Result<BigUint, WordError> {
    Ok(brute_count_pairs_multi(n, &[c], cap)?.remove(0))
}

/// Counts admissible pairs of total length `n` for several constraint sets in
/// one enumeration.
///
/// Only words that start with `A` and avoid `CB` are generated; every other
/// word fails (i) or (iii) whatever its partner is. For each split
/// `|w| = m`, `|z| = n - m`, the shorter side is profiled into A-count buckets
/// and the longer side is streamed in parallel, so every surviving pair is
/// visited once.
pub fn brute_count_pairs_multi(
    n: usize,
    cs: &[ConstraintSet],
    cap: usize,
) -> Result<Vec<BigUint>, WordError> {
    let cap = cap.min(MAX_PROFILE_LEN + 1);
    if n > cap {
        return Err(WordError::AboveCap { n, cap });
    }
    if n < 2 {
        return Err(WordError::BelowMinimum(n));
    }
    let mut totals = vec![0u64; cs.len()];
    for w_len in 1..n {
        let z_len = n - w_len;
        let stored_is_w = w_len <= z_len;
        let (stored_len, streamed_len) = if stored_is_w {
            (w_len, z_len)
        } else {
            (z_len, w_len)
        };
        let stored = profiles_by_a_count(stored_len);
        let split: Vec<u64> = nocb_prefixes(streamed_len, 5)
            .into_par_iter()
            .map(|mut prefix| {
                let mut local = vec![0u64; cs.len()];
                for_each_nocb_extension(&mut prefix, streamed_len, &mut |word| {
                    let streamed = Profile::of(word);
                    let Some(bucket) = stored.get(streamed.a_count as usize) else {
                        return;
                    };
                    for other in bucket {
                        let (wp, zp) = if stored_is_w {
                            (other, &streamed)
                        } else {
                            (&streamed, other)
                        };
                        for (slot, &c) in local.iter_mut().zip(cs) {
                            if profiles_admissible(wp, zp, c) {
                                *slot += 1;
                            }
                        }
                    }
                });
                local
            })
            .reduce(
                || vec![0u64; cs.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        totals.iter_mut().zip(split).for_each(|(t, s)| *t += s);
    }
    Ok(totals.into_iter().map(BigUint::from).collect())
}

/// Which lemma to check on encoded avoiders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// A CAB factor at the i-th A forces a B into the i-th segment of z.
    Cab,
    /// A CAB^k factor forces at least k letters B.
    CabK,
}

impl LemmaKind {
    pub fn constraints(self) -> ConstraintSet {
        match self {
            LemmaKind::Cab => ConstraintSet::H,
            LemmaKind::CabK => ConstraintSet::T,
        }
    }
}

pub const LEMMA_MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaViolation {
    pub permutation: String,
    pub pair: WordPair,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub kind: LemmaKind,
    pub checked: u64,
    pub violations: Vec<LemmaViolation>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Encodes every 1324-avoider of length `n` (rule (4') marking) and checks the
/// pair against (iv) or (vi).
pub fn verify_lemma_on_avoiders(n: usize, kind: LemmaKind) -> Result<LemmaReport, WordError> {
    if n > LEMMA_MAX_N {
        return Err(WordError::LemmaSizeTooLarge {
            n,
            max: LEMMA_MAX_N,
        });
    }
    let c = kind.constraints();
    let mut checked = 0;
    let mut violations = Vec::new();
    let avoiders: Box<dyn Iterator<Item = Permutation>> = if n == 0 {
        Box::new(std::iter::empty())
    } else {
        Box::new(enumerate_avoiders(n, &Pattern::p1324()))
    };
    for p in avoiders {
        checked += 1;
        let pair = encode(&p, MarkingMode::Rule4Prime);
        if !check_pair(&pair.w, &pair.z, c) {
            violations.push(LemmaViolation {
                permutation: p.to_string(),
                pair,
            });
        }
    }
    Ok(LemmaReport {
        n,
        kind,
        checked,
        violations,
    })
}
