//! Words over a generator alphabet, stored run-length encoded.
//!
//! The word `w1 w2 ... wn` denotes the composition `w1 ∘ w2 ∘ ... ∘ wn`, so
//! the rightmost letter acts first.

use crate::error::{Error, Result};
use crate::mobius::Moebius;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Letter names by generator index.
pub const LETTERS: &[u8] = b"FGHKLMNPQRSTUVWXYZ";

/// Words longer than this are written with exponents instead of spelled out.
pub const SPELL_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    runs: Vec<(u8, u64)>,
}

impl Word {
    pub fn empty() -> Word {
        Word { runs: Vec::new() }
    }

    pub fn letter(i: u8) -> Word {
        Word { runs: vec![(i, 1)] }
    }

    /// `letter^n`; the empty word when `n = 0`.
    pub fn power(i: u8, n: u64) -> Word {
        if n == 0 {
            Word::empty()
        } else {
            Word { runs: vec![(i, n)] }
        }
    }

    pub fn from_letters(letters: &[u8]) -> Word {
        let mut w = Word::empty();
        for &l in letters {
            w.push(l, 1);
        }
        w
    }

    pub fn push(&mut self, i: u8, n: u64) {
        if n == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((l, k)) if *l == i => *k = k.saturating_add(n),
            _ => self.runs.push((i, n)),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(l, n) in &other.runs {
            w.push(l, n);
        }
        w
    }

    pub fn runs(&self) -> &[(u8, u64)] {
        &self.runs
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().fold(0u64, |acc, r| acc.saturating_add(r.1))
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of distinct letters used.
    pub fn distinct_letters(&self) -> usize {
        let mut seen: Vec<u8> = self.runs.iter().map(|r| r.0).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// The letters in order; `None` if longer than `limit`.
    pub fn letters(&self, limit: u64) -> Option<Vec<u8>> {
        if self.len() > limit {
            return None;
        }
        let mut out = Vec::with_capacity(self.len() as usize);
        for &(l, n) in &self.runs {
            out.extend(std::iter::repeat(l).take(n as usize));
        }
        Some(out)
    }

    /// Evaluates the word on the given generators.
    pub fn eval(&self, gens: &[Moebius]) -> Result<Moebius> {
        let mut acc = Moebius::IDENTITY;
        for &(l, n) in &self.runs {
            let g = gens.get(l as usize).ok_or(Error::EmptyInput)?;
            acc = acc.compose(&g.pow(n));
        }
        Ok(acc)
    }

    /// Replaces every letter `i` by `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::empty();
        for &(l, n) in &self.runs {
            let img = &images[l as usize];
            if img.runs.len() == 1 {
                let (m, k) = img.runs[0];
                out.push(m, k.saturating_mul(n));
            } else {
                for _ in 0..n {
                    out = out.concat(img);
                }
            }
        }
        out
    }

    /// Exponent notation, e.g. `F^12G`.
    pub fn compact(&self) -> String {
        let mut s = String::new();
        for &(l, n) in &self.runs {
            s.push(letter_char(l));
            if n > 1 {
                s.push('^');
                s.push_str(&n.to_string());
            }
        }
        s
    }

    pub fn parse(s: &str) -> Result<Word> {
        let bytes = s.trim().as_bytes();
        let mut w = Word::empty();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let idx = LETTERS
                .iter()
                .position(|&x| x == c)
                .ok_or_else(|| Error::BadWord(format!("unknown letter {:?}", c as char)))?;
            i += 1;
            let mut n = 1u64;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                n = s.trim()[start..i]
                    .parse()
                    .map_err(|_| Error::BadWord("bad exponent".into()))?;
            }
            w.push(idx as u8, n);
        }
        Ok(w)
    }
}

pub fn letter_char(i: u8) -> char {
    LETTERS.get(i as usize).map(|&c| c as char).unwrap_or('?')
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.letters(SPELL_LIMIT) {
            Some(ls) => {
                for l in ls {
                    write!(f, "{}", letter_char(l))?;
                }
                Ok(())
            }
            None => write!(f, "{}", self.compact()),
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        let w = Word::from_letters(&[0, 0, 1, 0]);
        assert_eq!(w.to_string(), "FFGF");
        assert_eq!(w.compact(), "F^2GF");
        assert_eq!(Word::parse("FFGF").unwrap(), w);
        assert_eq!(Word::parse("F^2GF").unwrap(), w);
        assert!(Word::parse("FXZ!").is_err());
    }

    #[test]
    fn long_words_use_exponents() {
        let w = Word::power(0, 5_000_000).concat(&Word::letter(1));
        assert_eq!(w.to_string(), "F^5000000G");
    }

    #[test]
    fn rightmost_letter_acts_first() {
        let f = Moebius::translation(1.0);
        let g = Moebius::dilation(2.0).unwrap();
        let fg = Word::parse("FG").unwrap().eval(&[f, g]).unwrap();
        // f(g(1)) = 3
        let v = fg.apply_real(1.0).t().unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn substitution() {
        let w = Word::parse("FG").unwrap();
        let images = [Word::parse("F").unwrap(), Word::parse("FG").unwrap()];
        assert_eq!(w.substitute(&images).to_string(), "FFG");
    }
}
