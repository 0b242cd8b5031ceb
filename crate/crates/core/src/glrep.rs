//! The index-two subgroup `H = ker(ν)` of `F_3`, where `ν` counts `a3` mod 2, and the
//! integer representations it carries.
//!
//! `H` has free basis `x1 = a1, x2 = a2, x3 = a3², x4 = a3 a1 a3⁻¹, x5 = a3 a2 a3⁻¹`
//! (Schreier transversal `{1, a3}`). An automorphism that preserves `ν` acts on
//! `H_1(H) = Z^5`; the deck involution `σ = ad_{a3}` splits this into eigenspaces, and `μ`
//! is the action on the `(-1)`-eigenspace in the basis `e1 = x1 - x4`, `e2 = x2 - x5`.
//! Matrices act on column vectors, so `ab5(φψ) = ab5(φ) ab5(ψ)`.

use serde::Serialize;
use thiserror::Error;

use crate::autgroup::{inner, AutError, Endo};
use crate::freeword::{Letter, Word, WordError};
use crate::intmat::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlError {
    #[error("expected a rank 3 word or automorphism, got rank {0}")]
    NotRankThree(u32),
    #[error("word {0} is not in the index-two subgroup (odd a3 exponent sum)")]
    OddCoset(String),
    #[error("automorphism does not preserve the index-two subgroup")]
    NotStabilizing,
    #[error("the (-1)-eigenspace is not preserved: image {0:?}")]
    EigenspaceNotPreserved(Vec<i64>),
    #[error("k must be at least 2, got {0}")]
    KTooSmall(u32),
    #[error("matrix {0} is not invertible over the integers")]
    NotUnimodular(String),
    #[error("integer overflow while multiplying matrices")]
    Overflow,
    #[error(transparent)]
    Aut(#[from] AutError),
}

impl From<WordError> for GlError {
    fn from(e: WordError) -> Self {
        GlError::Aut(e.into())
    }
}

fn require_rank3(rank: u32) -> Result<(), GlError> {
    if rank != 3 {
        return Err(GlError::NotRankThree(rank));
    }
    Ok(())
}

/// Exponent sum of `a3` mod 2.
pub fn nu(w: &Word) -> Result<u8, GlError> {
    require_rank3(w.rank())?;
    Ok(w.exponent_sum(3).rem_euclid(2) as u8)
}

/// True iff `ν ∘ e = ν`, i.e. `e` maps `H` onto itself.
pub fn stabilizes(e: &Endo) -> Result<bool, GlError> {
    require_rank3(e.rank())?;
    for i in 1..=3 {
        let expected = if i == 3 { 1 } else { 0 };
        if nu(e.image(i))? != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The free basis `x1..x5` of `H`, as words in `F_3`.
pub fn subgroup_basis() -> [Word; 5] {
    let p = |s: &str| Word::parse(3, s).expect("static word");
    [p("a1"), p("a2"), p("a3^2"), p("a3 a1 A3"), p("a3 a2 A3")]
}

/// Schreier generator `t a_i rep(t a_i)^-1` for coset `t ∈ {1, a3}` and generator `a_i`,
/// written over `x1..x5`. `None` is the trivial generator `1 · a3 · a3^-1`.
fn schreier_letter(coset: u8, gen: u32) -> Option<u32> {
    match (coset, gen) {
        (0, 1) => Some(1),
        (0, 2) => Some(2),
        (0, 3) => None,
        (1, 1) => Some(4),
        (1, 2) => Some(5),
        (1, 3) => Some(3),
        _ => unreachable!("coset and generator are range checked"),
    }
}

/// Reidemeister–Schreier rewriting of `w ∈ H` as a reduced word of rank 5 over `x1..x5`.
pub fn rewrite(w: &Word) -> Result<Word, GlError> {
    if nu(w)? != 0 {
        return Err(GlError::OddCoset(w.to_string()));
    }
    let mut coset = 0u8;
    let mut out = Vec::with_capacity(w.len());
    for &l in w.letters() {
        let flips = l.index() == 3;
        if l.sign() > 0 {
            if let Some(x) = schreier_letter(coset, l.index()) {
                out.push(Letter::gen(x));
            }
            if flips {
                coset ^= 1;
            }
        } else {
            // t a^-1 rep(t a^-1)^-1 = (s a rep(s a)^-1)^-1 with s = rep(t a^-1)
            if flips {
                coset ^= 1;
            }
            if let Some(x) = schreier_letter(coset, l.index()) {
                out.push(Letter::inv_gen(x));
            }
        }
    }
    debug_assert_eq!(coset, 0);
    Ok(Word::reduce(5, out)?)
}

/// Evaluates a word over `x1..x5` back in `F_3`.
pub fn evaluate(x: &Word) -> Result<Word, GlError> {
    if x.rank() != 5 {
        return Err(WordError::RankMismatch { left: 5, right: x.rank() }.into());
    }
    let basis = subgroup_basis();
    let mut out = Word::identity(3);
    for &l in x.letters() {
        let b = &basis[(l.index() - 1) as usize];
        out = if l.sign() > 0 { &out * b } else { &out * &b.inv() };
    }
    Ok(out)
}

/// Action of a `ν`-preserving automorphism on `H_1(H) = Z^5`; column `i` is the image of `x_i`.
pub fn ab5(e: &Endo) -> Result<IntMatrix, GlError> {
    if !stabilizes(e)? {
        return Err(GlError::NotStabilizing);
    }
    let cols = subgroup_basis()
        .iter()
        .map(|x| Ok(rewrite(&e.apply(x)?)?.ab_vector()))
        .collect::<Result<Vec<_>, GlError>>()?;
    Ok(IntMatrix::from_columns(&cols).expect("five columns of length five"))
}

/// The deck involution `σ = ad_{a3}` restricted to `H`.
pub fn sigma() -> Endo {
    inner(&Word::generator(3, 3).expect("in range"))
}

pub fn sigma_star() -> IntMatrix {
    ab5(&sigma()).expect("ad_a3 preserves the cover")
}

/// The `(-1)`-eigenspace basis `e1 = x1 - x4`, `e2 = x2 - x5` as coordinate vectors.
pub const MINUS_BASIS: [[i64; 5]; 2] = [[1, 0, 0, -1, 0], [0, 1, 0, 0, -1]];

/// Integer kernel of `σ_* + I`, computed exactly.
pub fn minus_eigenspace() -> Vec<Vec<i64>> {
    sigma_star().add_identity(1).kernel()
}

/// Checks that the computed eigenspace basis equals `{e1, e2}` up to the sign of each vector.
pub fn eigenspace_matches_basis() -> bool {
    let k = minus_eigenspace();
    k.len() == 2
        && k.iter().zip(MINUS_BASIS.iter()).all(|(v, b)| {
            let neg: Vec<i64> = b.iter().map(|x| -x).collect();
            v.as_slice() == b.as_slice() || *v == neg
        })
}

/// Coordinates `(c1, c2)` of `v` in `{e1, e2}` if `v` lies in their span.
fn minus_coords(v: &[i64]) -> Option<[i64; 2]> {
    let (c1, c2) = (v[0], v[1]);
    let back: Vec<i64> = (0..5).map(|i| c1 * MINUS_BASIS[0][i] + c2 * MINUS_BASIS[1][i]).collect();
    (back == v).then_some([c1, c2])
}

/// `μ(e)`: the restriction of `ab5(e)` to the `(-1)`-eigenspace, in the basis `{e1, e2}`.
pub fn mu(e: &Endo) -> Result<IntMatrix, GlError> {
    let m = ab5(e)?;
    let mut cols = Vec::with_capacity(2);
    for b in MINUS_BASIS {
        let img = m.mul_vec(&b);
        let c = minus_coords(&img).ok_or(GlError::EigenspaceNotPreserved(img))?;
        cols.push(c.to_vec());
    }
    Ok(IntMatrix::from_columns(&cols).expect("two columns of length two"))
}

/// Free basis `{a^i b a^-i : 0 <= i <= k-2} ∪ {a^(k-1)}` of the index `k - 1` subgroup `L_k`
/// of `F_2 = <a, b>` (`a = a1`, `b = a2`).
pub fn lk_basis(k: u32) -> Result<Vec<Word>, GlError> {
    if k < 2 {
        return Err(GlError::KTooSmall(k));
    }
    let a = Word::generator(2, 1)?;
    let b = Word::generator(2, 2)?;
    let mut out: Vec<Word> = (0..k as i64 - 1).map(|i| b.conj(&a.pow(i)).expect("rank 2")).collect();
    out.push(a.pow(k as i64 - 1));
    Ok(out)
}

/// A relation found by [`shortest_relation`]: letters are `(generator 0 or 1, ±1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixRelation {
    pub letters: Vec<(u8, i8)>,
}

impl MatrixRelation {
    pub fn describe(&self) -> String {
        self.letters
            .iter()
            .map(|&(g, s)| {
                let c = if g == 0 { 'A' } else { 'B' };
                if s > 0 {
                    c.to_string()
                } else {
                    format!("{c}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Depth-first search over nonempty freely reduced words of length `<= max_len` in
/// `m1^{±1}, m2^{±1}`; returns the first one evaluating to the identity.
pub fn shortest_relation(m1: &IntMatrix, m2: &IntMatrix, max_len: usize) -> Result<Option<MatrixRelation>, GlError> {
    let inv = |m: &IntMatrix| m.inverse2().ok_or_else(|| GlError::NotUnimodular(m.to_string()));
    // letter index: 2 * generator + (0 for +1, 1 for -1)
    let mats = [m1.clone(), inv(m1)?, m2.clone(), inv(m2)?];
    let id = IntMatrix::identity(2);
    // iterative deepening keeps the returned relation shortest
    for len in 1..=max_len {
        let mut word = Vec::with_capacity(len);
        if let Some(rel) = dfs(&mats, &id, &id, &mut word, len)? {
            return Ok(Some(rel));
        }
    }
    Ok(None)
}

fn dfs(
    mats: &[IntMatrix; 4],
    id: &IntMatrix,
    acc: &IntMatrix,
    word: &mut Vec<usize>,
    len: usize,
) -> Result<Option<MatrixRelation>, GlError> {
    if word.len() == len {
        if acc == id {
            return Ok(Some(MatrixRelation {
                letters: word.iter().map(|&l| ((l / 2) as u8, if l % 2 == 0 { 1 } else { -1 })).collect(),
            }));
        }
        return Ok(None);
    }
    for l in 0..4 {
        if let Some(&prev) = word.last() {
            if prev ^ 1 == l {
                continue;
            }
        }
        let next = acc.checked_mul(&mats[l]).ok_or(GlError::Overflow)?;
        word.push(l);
        let found = dfs(mats, id, &next, word, len)?;
        word.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// True iff no nonempty reduced word of length `<= max_len` in `m1^{±1}, m2^{±1}` is the identity.
pub fn no_short_relation(m1: &IntMatrix, m2: &IntMatrix, max_len: usize) -> Result<bool, GlError> {
    Ok(shortest_relation(m1, m2, max_len)?.is_none())
}
