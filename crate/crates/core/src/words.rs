// SPDX-License-Identifier: Apache-2.0

//! Words in a free group of finite rank.
//!
//! A [`Word`] is always freely reduced and remembers the rank `k` of the
//! ambient free group. Generators are numbered from 1; the textual form is
//! `x1 X2 x1` where an uppercase `X` marks an inverse. The compact alias
//! `aB` (lowercase `a..z` for `x1..x26`, uppercase for inverses) is accepted
//! on input.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its formal inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    generator: u32,
    inverse: bool,
}

impl Letter {
    /// Panics if `generator` is zero.
    pub fn new(generator: u32, inverse: bool) -> Self {
        assert!(generator >= 1, "generators are numbered from 1");
        Letter { generator, inverse }
    }

    pub fn pos(generator: u32) -> Self {
        Letter::new(generator, false)
    }

    pub fn neg(generator: u32) -> Self {
        Letter::new(generator, true)
    }

    pub fn generator(self) -> u32 {
        self.generator
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    /// +1 or -1.
    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = if self.inverse { 'X' } else { 'x' };
        write!(f, "{x}{}", self.generator)
    }
}

/// A freely reduced word of the free group `F_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
    rank: u32,
}

/// Free reduction by a single left-to-right stack pass.
pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

impl Word {
    /// The identity of `F_rank`.
    pub fn identity(rank: u32) -> Self {
        Word {
            letters: Vec::new(),
            rank,
        }
    }

    /// Reduces `letters` and checks every generator against `rank`.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I, rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        let letters = reduce(letters);
        if let Some(l) = letters.iter().find(|l| l.generator > rank) {
            return Err(Error::GeneratorOutOfRange {
                index: l.generator,
                rank,
            });
        }
        Ok(Word { letters, rank })
    }

    /// Shorthand for tests and examples: `Word::from_signed(&[1, 2, -1, -2], 2)`.
    pub fn from_signed(indices: &[i32], rank: u32) -> Result<Self> {
        let letters = indices
            .iter()
            .map(|&i| {
                if i == 0 {
                    Err(Error::OutOfRange {
                        what: "generator index 0",
                    })
                } else {
                    Ok(Letter::new(i.unsigned_abs(), i < 0))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_letters(letters, rank)
    }

    pub fn parse(text: &str, rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        let mut letters = Vec::new();
        for (position, token) in text.split_whitespace().enumerate() {
            let syntax = |reason| Error::Syntax {
                position,
                token: token.to_string(),
                reason,
            };
            let mut chars = token.chars();
            let head = chars.next().expect("split_whitespace yields nonempty tokens");
            let tail = chars.as_str();
            if (head == 'x' || head == 'X') && !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) {
                if tail.starts_with('0') {
                    return Err(syntax("generator index must be a positive integer without leading zeros"));
                }
                let index: u32 = tail.parse().map_err(|_| syntax("generator index too large"))?;
                letters.push(Letter::new(index, head == 'X'));
            } else if token.bytes().all(|b| b.is_ascii_alphabetic()) {
                for b in token.bytes() {
                    let inverse = b.is_ascii_uppercase();
                    let index = u32::from(b.to_ascii_lowercase() - b'a') + 1;
                    letters.push(Letter::new(index, inverse));
                }
            } else {
                return Err(syntax("expected x<i>, X<i>, or compact letters a..z/A..Z"));
            }
        }
        Word::from_letters(letters, rank)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
            rank: self.rank,
        }
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * exponent.unsigned_abs() as usize);
        for _ in 0..exponent.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Word {
            letters: reduce(letters),
            rank: self.rank,
        }
    }

    /// Image under the homomorphism `x_i -> images[i - 1]`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        if images.len() != self.rank as usize {
            return Err(Error::LengthMismatch {
                expected: self.rank as usize,
                actual: images.len(),
            });
        }
        let target_rank = match images.first() {
            Some(w) => w.rank,
            None => return Err(Error::InvalidRank),
        };
        if let Some(w) = images.iter().find(|w| w.rank != target_rank) {
            return Err(Error::RankMismatch {
                left: target_rank,
                right: w.rank,
            });
        }
        let mut letters = Vec::new();
        for l in &self.letters {
            let image = &images[(l.generator - 1) as usize];
            if l.inverse {
                letters.extend(image.letters.iter().rev().map(|x| x.inv()));
            } else {
                letters.extend_from_slice(&image.letters);
            }
        }
        Ok(Word {
            letters: reduce(letters),
            rank: target_rank,
        })
    }

    /// The cyclically reduced core `u` of `w = t u t^-1`.
    pub fn cyclic_core(&self) -> Word {
        let mut lo = 0;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo].cancels(self.letters[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        Word {
            letters: self.letters[lo..hi].to_vec(),
            rank: self.rank,
        }
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        assert_eq!(self.rank, rhs.rank, "words from different free groups");
        Word {
            letters: reduce(self.letters.iter().chain(&rhs.letters).copied()),
            rank: self.rank,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// All nonempty reduced words of length at most `max_len` in `F_rank`,
/// ordered by length and then lexicographically by (generator, sign).
pub fn reduced_words(rank: u32, max_len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (1..=rank)
        .flat_map(|g| [Letter::pos(g), Letter::neg(g)])
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.last().is_some_and(|&last| last.cancels(l)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|letters| Word {
            letters: letters.clone(),
            rank,
        }));
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(text: &str, k: u32) -> Word {
        Word::parse(text, k).unwrap()
    }

    #[test]
    fn parse_cancels() {
        assert_eq!(w("x1 X1 x2", 2), Word::from_signed(&[2], 2).unwrap());
        let comm = w("x1 x2 X1 X2", 2);
        assert_eq!(comm.len(), 4);
        assert_eq!(comm.to_string(), "x1 x2 X1 X2");
        assert_eq!(w("x1 x2 x2 X2 x1", 2).to_string(), "x1 x2 x1");
    }

    #[test]
    fn parse_compact_alias() {
        assert_eq!(w("abAB", 2), w("x1 x2 X1 X2", 2));
        assert_eq!(w("ab x1", 2), w("x1 x2 x1", 2));
        assert_eq!(w("z", 26).letters()[0].generator(), 26);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Word::parse("x3", 2), Err(Error::GeneratorOutOfRange { index: 3, rank: 2 })));
        assert!(matches!(Word::parse("x1 y2", 2), Err(Error::Syntax { position: 1, .. })));
        assert!(matches!(Word::parse("x0", 2), Err(Error::Syntax { .. })));
        assert!(matches!(Word::parse("x1", 0), Err(Error::InvalidRank)));
        assert!(matches!(Word::parse("c", 2), Err(Error::GeneratorOutOfRange { index: 3, .. })));
    }

    #[test]
    fn empty_word_is_valid() {
        let e = w("", 3);
        assert!(e.is_identity());
        assert_eq!(e.to_string(), "");
        assert_eq!(w("x1 X1", 3), e);
        let images = [w("x1", 2), w("x2", 2), w("x1 x2", 2)];
        assert_eq!(e.substitute(&images).unwrap(), Word::identity(2));
        assert_eq!(e.inverse(), e);
    }

    #[test]
    fn reduce_examples() {
        assert!(reduce(Vec::new()).is_empty());
        let a = Letter::pos(1);
        let b = Letter::pos(2);
        assert_eq!(reduce([a, a.inv(), a]), vec![a]);
        assert_eq!(reduce([a, b, b.inv(), a]), vec![a, a]);
    }

    #[test]
    fn substitute_examples() {
        let x1x2 = w("x1 x2", 2);
        let x1 = w("x1", 2);
        let x2 = w("x2", 2);
        assert_eq!(x1x2.substitute(&[x1.clone(), x2.clone()]).unwrap(), x1x2);
        assert_eq!(x1.substitute(&[x1x2.clone(), x2.clone()]).unwrap(), x1x2);
        assert_eq!(w("x1 X2", 2).substitute(&[x1x2.clone(), x2.clone()]).unwrap(), x1);
        assert!(matches!(
            x1.substitute(std::slice::from_ref(&x1)),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn cyclic_core_strips_conjugator() {
        assert_eq!(w("x2 x1 x1 X2", 2).cyclic_core(), w("x1 x1", 2));
        assert_eq!(w("x1 x2 X1", 2).cyclic_core(), w("x2", 2));
    }

    #[test]
    fn reduced_word_counts() {
        // 2k(2k-1)^(L-1) words of length L.
        let words = reduced_words(2, 4);
        assert_eq!(words.len(), 4 + 12 + 36 + 108);
        assert!(words.iter().all(|w| reduce(w.letters().iter().copied()).len() == w.len()));
    }

    fn raw_letters(k: u32) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((1..=k, any::<bool>()).prop_map(|(g, i)| Letter::new(g, i)), 0..24)
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_parity_preserving(s in raw_letters(3)) {
            let r = reduce(s.clone());
            prop_assert_eq!(reduce(r.clone()), r.clone());
            prop_assert!(r.len() <= s.len());
            prop_assert_eq!(r.len() % 2, s.len() % 2);
            prop_assert!(r.windows(2).all(|p| !p[0].cancels(p[1])));
        }

        #[test]
        fn print_parse_round_trip(s in raw_letters(3)) {
            let word = Word::from_letters(s, 3).unwrap();
            prop_assert_eq!(Word::parse(&word.to_string(), 3).unwrap(), word);
        }

        #[test]
        fn substitute_respects_concatenation(
            u in raw_letters(2),
            v in raw_letters(2),
            a in raw_letters(3),
            b in raw_letters(3),
        ) {
            let u = Word::from_letters(u, 2).unwrap();
            let v = Word::from_letters(v, 2).unwrap();
            let images = [Word::from_letters(a, 3).unwrap(), Word::from_letters(b, 3).unwrap()];
            let lhs = (&u * &v).substitute(&images).unwrap();
            let rhs = &u.substitute(&images).unwrap() * &v.substitute(&images).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
