//! Red/blue colouring of a permutation, the A/B/C/D marking, and the word pair
//! `(w(p), z(p))`.
//!
//! Colouring is greedy from left to right: an entry is blue exactly when
//! appending it to the red entries seen so far would complete a red 132.
//! Red entries are then lettered `A` (left-to-right minimum among reds) or
//! `B`; blue entries `D` (right-to-left maximum among blues) or `C`. With
//! [`MarkingMode::Rule4Prime`] every right-to-left maximum of the whole
//! permutation that is not a left-to-right minimum is then forced to a blue `D`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::perm::{
    left_to_right_minima, right_to_left_maxima, sequence_contains, Pattern, Permutation,
};
use crate::wordlang::{has_cb_factor, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn as_char(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkingMode {
    /// Rules (1)-(4) only.
    Plain,
    /// Rules (1)-(4) followed by the right-to-left-maximum override.
    #[default]
    Rule4Prime,
}

impl FromStr for MarkingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(MarkingMode::Plain),
            "rule4prime" => Ok(MarkingMode::Rule4Prime),
            other => Err(format!("unknown mode {other:?}; expected plain or rule4prime")),
        }
    }
}

impl fmt::Display for MarkingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarkingMode::Plain => "plain",
            MarkingMode::Rule4Prime => "rule4prime",
        })
    }
}

/// Would appending `x` to `red` complete a 132, i.e. is there an earlier red
/// `a` before a red `c` with `a < x < c`? Pairing each `c` with the running
/// minimum before it covers every candidate pair.
fn completes_red_132(red: &[u32], x: u32) -> bool {
    let mut low = u32::MAX;
    for &c in red {
        if low < x && x < c {
            return true;
        }
        low = low.min(c);
    }
    false
}

/// Per-position colours of `p`.
pub fn color(p: &Permutation) -> Vec<Color> {
    let mut red = Vec::with_capacity(p.len());
    p.entries()
        .iter()
        .map(|&x| {
            if completes_red_132(&red, x) {
                Color::Blue
            } else {
                red.push(x);
                Color::Red
            }
        })
        .collect()
}

/// An entry whose letter was overridden by rule (4').
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Override {
    /// 1-based position.
    pub position: usize,
    pub previous: Letter,
}

/// A permutation with its colours and letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPermutation {
    base: Permutation,
    colors: Vec<Color>,
    letters: Vec<Letter>,
    overrides: Vec<Override>,
}

impl MarkedPermutation {
    pub fn base(&self) -> &Permutation {
        &self.base
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Entries whose letter changed under rule (4'). Empty in plain mode.
    pub fn overrides(&self) -> &[Override] {
        &self.overrides
    }

    /// Overrides that did not turn a `B` into a `D`. Always empty for
    /// 1324-avoiders; a `C` here would mean rule (4') hit a blue non-maximum.
    pub fn anomalous_overrides(&self) -> Vec<Override> {
        self.overrides
            .iter()
            .filter(|o| o.previous != Letter::B)
            .copied()
            .collect()
    }

    pub fn color_string(&self) -> String {
        self.colors.iter().map(|c| c.as_char()).collect()
    }

    pub fn values_with(&self, color: Color) -> Vec<u32> {
        self.base
            .entries()
            .iter()
            .zip(&self.colors)
            .filter(|(_, &c)| c == color)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Letters read by position.
    pub fn position_word(&self) -> Word {
        Word::new(self.letters.clone())
    }

    /// Letters read by value: the `i`-th letter is the type of the entry `i`.
    pub fn value_word(&self) -> Word {
        Word::new(
            self.base
                .inverse_positions()
                .into_iter()
                .map(|pos| self.letters[pos - 1])
                .collect(),
        )
    }
}

#[derive(Serialize)]
struct MarkedJson<'a> {
    entries: &'a [u32],
    colors: String,
    letters: String,
}

impl Serialize for MarkedPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MarkedJson {
            entries: self.base.entries(),
            colors: self.color_string(),
            letters: self.position_word().to_string(),
        }
        .serialize(s)
    }
}

/// Colours and letters `p` under the given rules.
pub fn mark(p: &Permutation, mode: MarkingMode) -> MarkedPermutation {
    let mut colors = color(p);
    let vals = p.entries();
    let n = vals.len();
    let mut letters = vec![Letter::A; n];

    let mut red_min = u32::MAX;
    for i in 0..n {
        if colors[i] == Color::Red {
            letters[i] = if vals[i] < red_min {
                red_min = vals[i];
                Letter::A
            } else {
                Letter::B
            };
        }
    }
    let mut blue_max = 0;
    for i in (0..n).rev() {
        if colors[i] == Color::Blue {
            letters[i] = if vals[i] > blue_max {
                blue_max = vals[i];
                Letter::D
            } else {
                Letter::C
            };
        }
    }

    let mut overrides = Vec::new();
    if mode == MarkingMode::Rule4Prime {
        let mut is_lr_min = vec![false; n + 1];
        for pos in left_to_right_minima(p) {
            is_lr_min[pos] = true;
        }
        for pos in right_to_left_maxima(p) {
            if is_lr_min[pos] {
                continue;
            }
            let i = pos - 1;
            colors[i] = Color::Blue;
            if letters[i] != Letter::D {
                overrides.push(Override {
                    position: pos,
                    previous: letters[i],
                });
                letters[i] = Letter::D;
            }
        }
    }

    MarkedPermutation {
        base: p.clone(),
        colors,
        letters,
        overrides,
    }
}

/// The pair of type words: `w` by position, `z` by value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordPair {
    pub w: Word,
    pub z: Word,
}

pub fn encode(p: &Permutation, mode: MarkingMode) -> WordPair {
    let m = mark(p, mode);
    WordPair {
        w: m.position_word(),
        z: m.value_word(),
    }
}

/// A property of the encoding that failed for a particular permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodingFault {
    RedContains132,
    BlueContains213,
    CbFactorInW,
    CbFactorInZ,
    /// A blue entry is followed by a larger red one.
    BlueClosure { blue: usize, later: usize },
    /// An entry lettered C has no later, larger D (rule (4') mode only).
    UnmatchedC { position: usize },
    APositionsNotMinima,
    /// Rule (4') should have made this entry a blue D.
    MissedOverride { position: usize },
    AnomalousOverride { position: usize, previous: Letter },
    LetterMultisetMismatch,
}

/// Checks every structural guarantee the encoding gives for 1324-avoiders.
/// An empty result means `p` passed.
pub fn audit(p: &Permutation, mode: MarkingMode) -> Vec<EncodingFault> {
    let m = mark(p, mode);
    let mut faults = Vec::new();
    let vals = p.entries();
    let n = vals.len();

    if sequence_contains(&m.values_with(Color::Red), &Pattern::new(perm![1, 3, 2]).unwrap()) {
        faults.push(EncodingFault::RedContains132);
    }
    if sequence_contains(&m.values_with(Color::Blue), &Pattern::new(perm![2, 1, 3]).unwrap()) {
        faults.push(EncodingFault::BlueContains213);
    }

    let pair = WordPair {
        w: m.position_word(),
        z: m.value_word(),
    };
    if has_cb_factor(&pair.w) {
        faults.push(EncodingFault::CbFactorInW);
    }
    if has_cb_factor(&pair.z) {
        faults.push(EncodingFault::CbFactorInZ);
    }
    let mut w_sorted = pair.w.letters().to_vec();
    let mut z_sorted = pair.z.letters().to_vec();
    w_sorted.sort();
    z_sorted.sort();
    if w_sorted != z_sorted {
        faults.push(EncodingFault::LetterMultisetMismatch);
    }

    // smallest blue seen so far
    let mut blue_min: Option<(usize, u32)> = None;
    for (j, (&v, &c)) in vals.iter().zip(&m.colors).enumerate() {
        if let Some((bi, bv)) = blue_min {
            if v > bv && c == Color::Red {
                faults.push(EncodingFault::BlueClosure {
                    blue: bi + 1,
                    later: j + 1,
                });
            }
        }
        if c == Color::Blue && blue_min.is_none_or(|(_, bv)| v < bv) {
            blue_min = Some((j, v));
        }
    }

    let a_positions: Vec<usize> = (1..=n).filter(|&i| m.letters[i - 1] == Letter::A).collect();
    if a_positions != left_to_right_minima(p) {
        faults.push(EncodingFault::APositionsNotMinima);
    }

    if mode == MarkingMode::Rule4Prime {
        for i in 0..n {
            if m.letters[i] == Letter::C {
                let matched = (i + 1..n).any(|j| m.letters[j] == Letter::D && vals[j] > vals[i]);
                if !matched {
                    faults.push(EncodingFault::UnmatchedC { position: i + 1 });
                }
            }
        }
        let lr_min = left_to_right_minima(p);
        for pos in right_to_left_maxima(p) {
            if !lr_min.contains(&pos)
                && (m.letters[pos - 1] != Letter::D || m.colors[pos - 1] != Color::Blue)
            {
                faults.push(EncodingFault::MissedOverride { position: pos });
            }
        }
        for o in m.anomalous_overrides() {
            faults.push(EncodingFault::AnomalousOverride {
                position: o.position,
                previous: o.previous,
            });
        }
    }
    faults
}
