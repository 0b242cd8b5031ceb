//! Reduced words in a free group `F_n` with basis `a1, ..., an`.
//!
//! A [`Word`] always carries its rank and is always freely reduced. Letters
//! are stored as signed generator indices so reduction is a single stack pass.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: u32, rank: u32 },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u32, right: u32 },
    #[error("rank must be positive")]
    ZeroRank,
    #[error("cannot embed rank {from} word into rank {to}")]
    Shrink { from: u32, to: u32 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A generator or inverse generator. Stored as `+i` for `a_i`, `-i` for `a_i^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn gen(index: u32) -> Self {
        assert!(index > 0, "generator indices start at 1");
        Letter(index as i32)
    }

    pub fn inv_gen(index: u32) -> Self {
        assert!(index > 0, "generator indices start at 1");
        Letter(-(index as i32))
    }

    pub fn with_sign(index: u32, sign: i8) -> Self {
        if sign >= 0 {
            Self::gen(index)
        } else {
            Self::inv_gen(index)
        }
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0.unsigned_abs()
    }

    #[inline]
    pub fn sign(self) -> i8 {
        if self.0 > 0 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: u32,
    letters: Vec<Letter>,
}

/// Pushes `l` onto a reduced stack, cancelling against the top if possible.
#[inline]
fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inverse()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

impl Word {
    pub fn identity(rank: u32) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// The basis element `a_index`.
    pub fn generator(rank: u32, index: u32) -> Result<Self, WordError> {
        Self::reduce(rank, [Letter::gen(index)])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I>(rank: u32, raw: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        if rank == 0 {
            return Err(WordError::ZeroRank);
        }
        let mut stack = Vec::new();
        for l in raw {
            if l.index() > rank {
                return Err(WordError::IndexOutOfRange {
                    index: l.index(),
                    rank,
                });
            }
            push_reduced(&mut stack, l);
        }
        Ok(Word {
            rank,
            letters: stack,
        })
    }

    /// Builds a word from `(index, exponent)` syllables, e.g. `[(1, 2), (3, -1)]` is `a1^2 a3^-1`.
    pub fn from_syllables(rank: u32, syllables: &[(u32, i64)]) -> Result<Self, WordError> {
        let raw = syllables.iter().flat_map(|&(i, e)| {
            let l = Letter::with_sign(i, if e < 0 { -1 } else { 1 });
            std::iter::repeat_n(l, e.unsigned_abs() as usize)
        });
        Self::reduce(rank, raw)
    }

    #[inline]
    pub fn rank(&self) -> u32 {
        self.rank
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &Word) -> Result<(), WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    /// Concatenates and reduces; only the seam can cancel.
    pub fn mul(&self, other: &Word) -> Result<Word, WordError> {
        self.check_rank(other)?;
        let mut stack = self.letters.clone();
        stack.reserve(other.letters.len());
        for &l in &other.letters {
            push_reduced(&mut stack, l);
        }
        Ok(Word {
            rank: self.rank,
            letters: stack,
        })
    }

    pub fn inv(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `g w g^-1`.
    pub fn conj(&self, g: &Word) -> Result<Word, WordError> {
        g.mul(self)?.mul(&g.inv())
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(&self, other: &Word) -> Result<Word, WordError> {
        self.mul(other)?.mul(&self.inv())?.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Exponent sum of each generator.
    pub fn ab_vector(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank as usize];
        for l in &self.letters {
            v[l.index() as usize - 1] += l.sign() as i64;
        }
        v
    }

    /// Exponent sum of a single generator.
    pub fn exponent_sum(&self, index: u32) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.index() == index)
            .map(|l| l.sign() as i64)
            .sum()
    }

    /// Reinterprets the word in a free group of larger rank with the same first generators.
    pub fn embed(&self, new_rank: u32) -> Result<Word, WordError> {
        if new_rank < self.rank {
            let max = self.letters.iter().map(|l| l.index()).max().unwrap_or(0);
            if max > new_rank {
                return Err(WordError::Shrink {
                    from: self.rank,
                    to: new_rank,
                });
            }
        }
        if new_rank == 0 {
            return Err(WordError::ZeroRank);
        }
        Ok(Word {
            rank: new_rank,
            letters: self.letters.clone(),
        })
    }

    /// Renames generators `a_i -> a_{i+offset}` inside a group of rank `new_rank`.
    pub fn shift(&self, offset: u32, new_rank: u32) -> Result<Word, WordError> {
        let raw = self
            .letters
            .iter()
            .map(|l| Letter::with_sign(l.index() + offset, l.sign()));
        Word::reduce(new_rank, raw)
    }

    /// Writes the word as `u c u^-1` with `c` cyclically reduced.
    pub fn cyclic_split(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        let u = Word {
            rank: self.rank,
            letters: self.letters[..k].to_vec(),
        };
        let c = Word {
            rank: self.rank,
            letters: self.letters[k..n - k].to_vec(),
        };
        (u, c)
    }

    /// Largest generator index that occurs, or 0 for the empty word.
    pub fn support_max(&self) -> u32 {
        self.letters.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    /// Formats with generator `a_i` printed as `a{i + base - 1}`; `base = 1` is the usual naming.
    pub fn format_from(&self, base: i64) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * l.sign() as i64;
            let name = l.index() as i64 + base - 1;
            if run == 1 {
                out.push(format!("a{name}"));
            } else {
                out.push(format!("a{name}^{run}"));
            }
            i = j;
        }
        out.join(" ")
    }

    /// Parses the token grammar: `a3`, `a3^2`, `a3^-1`, `A3` (= `a3^-1`), `A3^2`.
    /// The empty string and `1` both denote the identity.
    pub fn parse(rank: u32, text: &str) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for (pos, tok) in tokens(text) {
            if tok == "1" {
                continue;
            }
            let (index, exp) = parse_token(pos, tok)?;
            if index == 0 || index > rank {
                return Err(WordError::Parse {
                    pos,
                    msg: format!("generator a{index} not in rank {rank}"),
                });
            }
            let l = Letter::with_sign(index, if exp < 0 { -1 } else { 1 });
            raw.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Word::reduce(rank, raw)
    }
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_whitespace()
        .map(move |t| (t.as_ptr() as usize - text.as_ptr() as usize, t))
}

fn parse_token(pos: usize, tok: &str) -> Result<(u32, i64), WordError> {
    let err = |msg: &str| WordError::Parse {
        pos,
        msg: format!("{msg} in token `{tok}`"),
    };
    let (head, exp) = match tok.split_once('^') {
        Some((h, e)) => {
            let e: i64 = e.parse().map_err(|_| err("bad exponent"))?;
            (h, e)
        }
        None => (tok, 1),
    };
    let (inverted, digits) = if let Some(d) = head.strip_prefix('a') {
        (false, d)
    } else if let Some(d) = head.strip_prefix('A') {
        (true, d)
    } else {
        return Err(err("expected `a<digits>` or `A<digits>`"));
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("expected generator digits"));
    }
    let index: u32 = digits.parse().map_err(|_| err("generator index too large"))?;
    Ok((index, if inverted { -exp } else { exp }))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_from(1))
    }
}

/// Panics on rank mismatch; use [`Word::mul`] for the checked version.
impl Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        Word::mul(self, rhs).expect("rank mismatch in word product")
    }
}
