//! Automorphisms of `F_n` as formal products of elementary generators.
//!
//! Composition convention: `(φψ)(x) = φ(ψ(x))`, and `ad_g(x) = g x g^-1`.
//! Under it `ad_{gh} = ad_g ∘ ad_h` and `φ ad_g φ^-1 = ad_{φ(g)}`.

use std::fmt;

use serde_json::json;
use thiserror::Error;

use crate::freeword::{Letter, Word, WordError};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("invalid elementary automorphism {0} in rank {1}")]
    InvalidGenerator(String, u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemKind {
    /// `λ_ij : a_i -> a_j a_i`
    NielsenLeft(u32, u32),
    /// `ρ_ij : a_i -> a_i a_j`
    NielsenRight(u32, u32),
    /// `ε_i : a_i -> a_i^-1`
    Inversion(u32),
    /// swaps `a_i` and `a_j`
    Transposition(u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElemAut {
    kind: ElemKind,
    rank: u32,
}

impl ElemAut {
    pub fn new(kind: ElemKind, rank: u32) -> Result<Self, AutError> {
        let ok_pair = |i: u32, j: u32| i != j && (1..=rank).contains(&i) && (1..=rank).contains(&j);
        let ok = match kind {
            ElemKind::NielsenLeft(i, j) | ElemKind::NielsenRight(i, j) | ElemKind::Transposition(i, j) => {
                ok_pair(i, j)
            }
            ElemKind::Inversion(i) => (1..=rank).contains(&i),
        };
        if !ok {
            return Err(AutError::InvalidGenerator(format!("{kind:?}"), rank));
        }
        Ok(ElemAut { kind, rank })
    }

    pub fn kind(&self) -> ElemKind {
        self.kind
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Right-composes `self^{±1}` onto `acc`, i.e. replaces `acc` by `acc ∘ self^{±1}`.
    fn compose_onto(&self, acc: &mut Endo, inverse: bool) {
        let at = |k: u32| (k - 1) as usize;
        match self.kind {
            ElemKind::NielsenLeft(i, j) => {
                let aj = if inverse { acc.images[at(j)].inv() } else { acc.images[at(j)].clone() };
                acc.images[at(i)] = &aj * &acc.images[at(i)];
            }
            ElemKind::NielsenRight(i, j) => {
                let aj = if inverse { acc.images[at(j)].inv() } else { acc.images[at(j)].clone() };
                acc.images[at(i)] = &acc.images[at(i)] * &aj;
            }
            ElemKind::Inversion(i) => {
                acc.images[at(i)] = acc.images[at(i)].inv();
            }
            ElemKind::Transposition(i, j) => {
                acc.images.swap(at(i), at(j));
            }
        }
    }

    fn token(&self) -> String {
        let two = |c: char, i: u32, j: u32| {
            if i < 10 && j < 10 {
                format!("{c}{i}{j}")
            } else {
                format!("{c}{i},{j}")
            }
        };
        match self.kind {
            ElemKind::NielsenLeft(i, j) => two('L', i, j),
            ElemKind::NielsenRight(i, j) => two('R', i, j),
            ElemKind::Inversion(i) => format!("E{i}"),
            ElemKind::Transposition(i, j) => two('P', i, j),
        }
    }
}

/// A formal product of powers of elementary automorphisms, read left to right
/// as composition (`x = f1^k1 f2^k2 ...` acts by applying the rightmost factor first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AutExpr {
    rank: u32,
    factors: Vec<(ElemAut, i64)>,
}

impl AutExpr {
    pub fn identity(rank: u32) -> Self {
        AutExpr {
            rank,
            factors: Vec::new(),
        }
    }

    pub fn elem(e: ElemAut) -> Self {
        AutExpr {
            rank: e.rank,
            factors: vec![(e, 1)],
        }
    }

    pub fn lambda(rank: u32, i: u32, j: u32) -> Result<Self, AutError> {
        Ok(Self::elem(ElemAut::new(ElemKind::NielsenLeft(i, j), rank)?))
    }

    pub fn rho(rank: u32, i: u32, j: u32) -> Result<Self, AutError> {
        Ok(Self::elem(ElemAut::new(ElemKind::NielsenRight(i, j), rank)?))
    }

    pub fn epsilon(rank: u32, i: u32) -> Result<Self, AutError> {
        Ok(Self::elem(ElemAut::new(ElemKind::Inversion(i), rank)?))
    }

    pub fn transposition(rank: u32, i: u32, j: u32) -> Result<Self, AutError> {
        Ok(Self::elem(ElemAut::new(ElemKind::Transposition(i, j), rank)?))
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn factors(&self) -> &[(ElemAut, i64)] {
        &self.factors
    }

    /// Formal product; adjacent equal generators merge their exponents.
    pub fn mul(&self, other: &AutExpr) -> Result<AutExpr, AutError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch {
                left: self.rank,
                right: other.rank,
            }
            .into());
        }
        let mut out = self.clone();
        for &(e, k) in &other.factors {
            out.push_factor(e, k);
        }
        Ok(out)
    }

    fn push_factor(&mut self, e: ElemAut, k: i64) {
        if k == 0 {
            return;
        }
        if let Some(last) = self.factors.last_mut() {
            if last.0 == e {
                last.1 += k;
                if last.1 == 0 {
                    self.factors.pop();
                }
                return;
            }
        }
        self.factors.push((e, k));
    }

    /// Syntactic inverse: reversed factors with negated exponents.
    pub fn inv(&self) -> AutExpr {
        AutExpr {
            rank: self.rank,
            factors: self.factors.iter().rev().map(|&(e, k)| (e, -k)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> AutExpr {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = AutExpr::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base).expect("same rank");
        }
        out
    }

    /// `[x, y] = x y x^-1 y^-1`.
    pub fn commutator(&self, other: &AutExpr) -> Result<AutExpr, AutError> {
        self.mul(other)?.mul(&self.inv())?.mul(&other.inv())
    }

    /// `x y x^-1`.
    pub fn conjugate_by(&self, x: &AutExpr) -> Result<AutExpr, AutError> {
        x.mul(self)?.mul(&x.inv())
    }

    /// Parses tokens `L21`, `R21`, `E2`, `P12` with optional `^k`; `L2,1` for multi-digit indices.
    pub fn parse(rank: u32, text: &str) -> Result<AutExpr, AutError> {
        let mut out = AutExpr::identity(rank);
        for tok in text.split_whitespace() {
            let pos = tok.as_ptr() as usize - text.as_ptr() as usize;
            if tok == "1" {
                continue;
            }
            let err = |msg: &str| AutError::Parse {
                pos,
                msg: format!("{msg} in token `{tok}`"),
            };
            let (head, exp) = match tok.split_once('^') {
                Some((h, e)) => (h, e.parse::<i64>().map_err(|_| err("bad exponent"))?),
                None => (tok, 1),
            };
            let mut chars = head.chars();
            let c = chars.next().ok_or_else(|| err("empty token"))?;
            let rest = chars.as_str();
            let num = |s: &str| s.parse::<u32>().map_err(|_| err("bad index"));
            let pair = |s: &str| -> Result<(u32, u32), AutError> {
                if let Some((i, j)) = s.split_once(',') {
                    Ok((num(i)?, num(j)?))
                } else if s.len() == 2 && s.bytes().all(|b| b.is_ascii_digit()) {
                    Ok((num(&s[..1])?, num(&s[1..])?))
                } else {
                    Err(err("expected two single-digit indices or `i,j`"))
                }
            };
            let kind = match c {
                'L' => {
                    let (i, j) = pair(rest)?;
                    ElemKind::NielsenLeft(i, j)
                }
                'R' => {
                    let (i, j) = pair(rest)?;
                    ElemKind::NielsenRight(i, j)
                }
                'P' => {
                    let (i, j) = pair(rest)?;
                    ElemKind::Transposition(i, j)
                }
                'E' => ElemKind::Inversion(num(rest)?),
                _ => return Err(err("expected one of L, R, E, P")),
            };
            let e = ElemAut::new(kind, rank).map_err(|e| err(&e.to_string()))?;
            out.push_factor(e, exp);
        }
        Ok(out)
    }
}

impl fmt::Display for AutExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let toks: Vec<String> = self
            .factors
            .iter()
            .map(|(e, k)| if *k == 1 { e.token() } else { format!("{}^{k}", e.token()) })
            .collect();
        f.write_str(&toks.join(" "))
    }
}

/// An endomorphism of `F_n` given by the images of the basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Endo {
    rank: u32,
    images: Vec<Word>,
}

impl Endo {
    pub fn identity(rank: u32) -> Self {
        Endo {
            rank,
            images: (1..=rank).map(|i| Word::generator(rank, i).expect("in range")).collect(),
        }
    }

    pub fn from_images(rank: u32, images: Vec<Word>) -> Result<Self, AutError> {
        if images.len() != rank as usize {
            return Err(AutError::Precondition(format!(
                "expected {rank} images, got {}",
                images.len()
            )));
        }
        for w in &images {
            if w.rank() != rank {
                return Err(WordError::RankMismatch {
                    left: rank,
                    right: w.rank(),
                }
                .into());
            }
        }
        Ok(Endo { rank, images })
    }

    /// Identity except `a_index -> image`.
    pub fn with_image(rank: u32, index: u32, image: Word) -> Result<Self, AutError> {
        let mut e = Self::identity(rank);
        if index == 0 || index > rank {
            return Err(WordError::IndexOutOfRange { index, rank }.into());
        }
        if image.rank() != rank {
            return Err(WordError::RankMismatch {
                left: rank,
                right: image.rank(),
            }
            .into());
        }
        e.images[(index - 1) as usize] = image;
        Ok(e)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Image of `a_index`.
    pub fn image(&self, index: u32) -> &Word {
        &self.images[(index - 1) as usize]
    }

    pub fn apply(&self, w: &Word) -> Result<Word, AutError> {
        if w.rank() != self.rank {
            return Err(WordError::RankMismatch {
                left: self.rank,
                right: w.rank(),
            }
            .into());
        }
        let mut out = Vec::new();
        for &l in w.letters() {
            let img = &self.images[(l.index() - 1) as usize];
            if l.sign() > 0 {
                out.extend_from_slice(img.letters());
            } else {
                out.extend(img.letters().iter().rev().map(|x| x.inverse()));
            }
        }
        Ok(Word::reduce(self.rank, out)?)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endo) -> Result<Endo, AutError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch {
                left: self.rank,
                right: other.rank,
            }
            .into());
        }
        let images = other
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Endo {
            rank: self.rank,
            images,
        })
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: u32) -> Endo {
        let mut out = Endo::identity(self.rank);
        for _ in 0..k {
            out = out.compose(self).expect("same rank");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.len() == 1 && w.letters()[0] == Letter::gen(i as u32 + 1))
    }

    /// Images rendered as `a_i -> w` strings, with generator names offset by `base - 1`.
    pub fn describe(&self, base: i64) -> Vec<String> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("a{} -> {}", i as i64 + base, w.format_from(base)))
            .collect()
    }
}

/// Equality of automorphisms is equality of basis images.
pub fn equal(e1: &Endo, e2: &Endo) -> bool {
    e1 == e2
}

pub fn endo_of(x: &AutExpr) -> Endo {
    let mut acc = Endo::identity(x.rank);
    for &(e, k) in &x.factors {
        for _ in 0..k.unsigned_abs() {
            e.compose_onto(&mut acc, k < 0);
        }
    }
    acc
}

/// The inner automorphism `ad_g : x -> g x g^-1`.
pub fn inner(g: &Word) -> Endo {
    let rank = g.rank();
    let gi = g.inv();
    let images = (1..=rank)
        .map(|i| {
            let a = Word::generator(rank, i).expect("in range");
            &(g * &a) * &gi
        })
        .collect();
    Endo { rank, images }
}

/// Returns `g` with `e = ad_g` if `e` is inner. For rank 1 the conjugator is normalized to the empty word.
pub fn is_inner(e: &Endo) -> Option<Word> {
    let rank = e.rank;
    if rank == 1 {
        return e.is_identity().then(|| Word::identity(1));
    }
    let a1 = Word::generator(rank, 1).expect("rank >= 1");
    let (u, core) = e.image(1).cyclic_split();
    if core != a1 {
        return None;
    }
    // g = u a1^k; read k from u^-1 e(a2) u = a1^k a2 a1^-k
    let twisted = &(&u.inv() * e.image(2)) * &u;
    let letters = twisted.letters();
    let lead = letters.first().copied()?;
    let k: i64 = if lead.index() == 1 {
        let run = letters.iter().take_while(|&&l| l == lead).count() as i64;
        run * lead.sign() as i64
    } else {
        0
    };
    let g = &u * &a1.pow(k);
    (inner(&g) == *e).then_some(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationMode {
    /// equality in `Aut(F_n)`
    Aut,
    /// equality modulo inner automorphisms
    Out,
}

pub fn verify_relation(lhs: &AutExpr, rhs: &AutExpr, mode: RelationMode) -> Result<bool, AutError> {
    let quotient = lhs.mul(&rhs.inv())?;
    Ok(match mode {
        RelationMode::Aut => endo_of(lhs) == endo_of(rhs),
        RelationMode::Out => is_inner(&endo_of(&quotient)).is_some(),
    })
}

/// How a claimed identity `lhs = rhs` holds: as stated, only after inverting `rhs`, or not at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    AsStated,
    InvertedRhs,
    Neither,
}

pub fn orientation(lhs: &AutExpr, rhs: &AutExpr, mode: RelationMode) -> Result<Orientation, AutError> {
    if verify_relation(lhs, rhs, mode)? {
        Ok(Orientation::AsStated)
    } else if verify_relation(lhs, &rhs.inv(), mode)? {
        Ok(Orientation::InvertedRhs)
    } else {
        Ok(Orientation::Neither)
    }
}

/// Checks the relations `[t, α] = 1`, `t β t^-1 = β α^p`, `t γ t^-1 = γ α^q` for given images.
/// `t_inv` must be the inverse of `t`; this is verified as part of the report.
fn gpq_relations(
    report: &mut Report,
    anchor: &str,
    base: i64,
    alpha: &Endo,
    beta: &Endo,
    gamma: &Endo,
    t: &Endo,
    t_inv: &Endo,
    alpha_inv: &Endo,
    p: i64,
    q: i64,
) -> Result<(), AutError> {
    let id = Endo::identity(alpha.rank());
    report.check(
        "t_inverse",
        anchor,
        t.compose(t_inv)? == id && t_inv.compose(t)? == id,
        json!(t_inv.describe(base)),
    );
    report.check(
        "alpha_inverse",
        anchor,
        alpha.compose(alpha_inv)? == id && alpha_inv.compose(alpha)? == id,
        json!(alpha_inv.describe(base)),
    );
    let power = |k: i64| if k >= 0 { alpha.pow(k as u32) } else { alpha_inv.pow((-k) as u32) };

    // [t, α] = t α t^-1 α^-1
    let comm = t.compose(alpha)?.compose(t_inv)?.compose(alpha_inv)?;
    report.check(
        "t_commutes_with_alpha",
        anchor,
        comm.is_identity(),
        json!({ "lhs": comm.describe(base), "rhs": "identity" }),
    );
    for (name, x, k) in [("t_beta", beta, p), ("t_gamma", gamma, q)] {
        let lhs = t.compose(x)?.compose(t_inv)?;
        let rhs = x.compose(&power(k))?;
        report.check(
            name,
            anchor,
            lhs == rhs,
            json!({ "exponent": k, "lhs": lhs.describe(base), "rhs": rhs.describe(base) }),
        );
    }
    Ok(())
}

/// Checks that `α = R_w, β = R_{a_{n-1}}, γ = R_{a_n}, t = T` satisfy the `G_{p,q}` relations in `Aut(F_{n+1})`.
///
/// Here `F_{n+1}` has basis `a_0, ..., a_n`, and `w` is given as a word of rank `n` (generators
/// `a_1..a_n`) that must only involve `a_1, ..., a_{n-2}`. Internally `a_k` is generator `k + 1`.
/// `R_u` fixes every generator except `a_0 -> a_0 u`; `T` sends `a_{n-1} -> a_{n-1} w^p`,
/// `a_n -> a_n w^q` and fixes the rest.
pub fn gpq_check(n: u32, p: i64, q: i64, w: &Word) -> Result<Report, AutError> {
    if n < 3 {
        return Err(AutError::Precondition(format!("n must be at least 3, got {n}")));
    }
    if p == 0 || q == 0 {
        return Err(AutError::Precondition("p and q must be nonzero".into()));
    }
    if w.rank() != n {
        return Err(AutError::Precondition(format!("w must be a word of rank {n}")));
    }
    if w.support_max() > n - 2 {
        return Err(AutError::Precondition(format!(
            "w = {w} must lie in the free factor <a1..a{}>",
            n - 2
        )));
    }
    let rank = n + 1;
    let a = |k: u32| Word::generator(rank, k + 1).expect("in range");
    let w = w.shift(1, rank)?;
    let r = |u: &Word| Endo::with_image(rank, 1, &a(0) * u);

    let alpha = r(&w)?;
    let alpha_inv = r(&w.inv())?;
    let beta = r(&a(n - 1))?;
    let gamma = r(&a(n))?;
    // a_{n-1} and a_n sit at internal positions n and n + 1
    let t_with = |p: i64, q: i64| {
        let mut images: Vec<Word> = (0..=n).map(a).collect();
        images[n as usize - 1] = &a(n - 1) * &w.pow(p);
        images[n as usize] = &a(n) * &w.pow(q);
        Endo::from_images(rank, images)
    };
    let t = t_with(p, q)?;
    let t_inv = t_with(-p, -q)?;

    let mut report = Report::new("gpq");
    gpq_relations(
        &mut report,
        "gpq-free-factor-embedding",
        0,
        &alpha,
        &beta,
        &gamma,
        &t,
        &t_inv,
        &alpha_inv,
        p,
        q,
    )?;
    Ok(report.with_data(json!({
        "n": n,
        "p": p,
        "q": q,
        "w": w.format_from(0),
        "alpha": alpha.describe(0),
        "beta": beta.describe(0),
        "gamma": gamma.describe(0),
        "t": t.describe(0),
    })))
}

/// Checks the `G_{p,q}` relations for `α = ad_a, β = ad_b, γ = ad_c, t = τ` in `Aut(F_3)`,
/// where `τ : a -> a, b -> b a^p, c -> c a^q` and `a, b, c = a1, a2, a3`.
pub fn inner_gpq_check(p: i64, q: i64) -> Result<Report, AutError> {
    if p == 0 || q == 0 {
        return Err(AutError::Precondition("p and q must be nonzero".into()));
    }
    let g = |k: u32| Word::generator(3, k).expect("in range");
    let (a, b, c) = (g(1), g(2), g(3));
    let tau = Endo::from_images(3, vec![a.clone(), &b * &a.pow(p), &c * &a.pow(q)])?;
    let tau_inv = Endo::from_images(3, vec![a.clone(), &b * &a.pow(-p), &c * &a.pow(-q)])?;
    let mut report = Report::new("inner-gpq");
    gpq_relations(
        &mut report,
        "gpq-inner-embedding",
        1,
        &inner(&a),
        &inner(&b),
        &inner(&c),
        &tau,
        &tau_inv,
        &inner(&a.inv()),
        p,
        q,
    )?;
    Ok(report.with_data(json!({ "p": p, "q": q, "tau": tau.describe(1) })))
}

/// The four generators of the Nielsen `Z^4`, in the order `λ21, ρ21, λ31, ρ31`.
pub fn nielsen_z4_generators() -> [(&'static str, AutExpr); 4] {
    [
        ("L21", AutExpr::lambda(3, 2, 1).expect("valid")),
        ("R21", AutExpr::rho(3, 2, 1).expect("valid")),
        ("L31", AutExpr::lambda(3, 3, 1).expect("valid")),
        ("R31", AutExpr::rho(3, 3, 1).expect("valid")),
    ]
}

/// Pairwise commutation of `λ21, ρ21, λ31, ρ31`, and identification of
/// `λ21^-1 ρ21 λ31^-1 ρ31` as an inner automorphism `ad_{a1}^{±1}`.
pub fn nielsen_z4_check() -> Report {
    let mut report = Report::new("nielsen-z4");
    let gens = nielsen_z4_generators();
    for i in 0..4 {
        for j in i + 1..4 {
            let (ni, x) = &gens[i];
            let (nj, y) = &gens[j];
            let comm = x.commutator(y).expect("same rank");
            report.check(
                format!("commute_{ni}_{nj}"),
                "nielsen-z4-abelian",
                endo_of(&comm).is_identity(),
                json!({ "commutator": comm.to_string() }),
            );
        }
    }
    let product = AutExpr::parse(3, "L21^-1 R21 L31^-1 R31").expect("valid");
    let e = endo_of(&product);
    let conj = is_inner(&e);
    let a1 = Word::generator(3, 1).expect("in range");
    let sign = match &conj {
        Some(g) if *g == a1 => Some(1),
        Some(g) if *g == a1.inv() => Some(-1),
        _ => None,
    };
    report.check(
        "product_is_ad_a1_power",
        "nielsen-product-inner",
        sign.is_some(),
        json!({
            "product": product.to_string(),
            "images": e.describe(1),
            "conjugator": conj.as_ref().map(|g| g.to_string()),
            "ad_a1_exponent": sign,
        }),
    );
    report.check(
        "product_trivial_in_out",
        "nielsen-product-inner",
        verify_relation(&product, &AutExpr::identity(3), RelationMode::Out).expect("same rank"),
        json!({ "product": product.to_string() }),
    );
    report.with_data(json!({ "ad_a1_exponent": sign }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: u32, s: &str) -> Word {
        Word::parse(rank, s).unwrap()
    }

    fn x(rank: u32, s: &str) -> AutExpr {
        AutExpr::parse(rank, s).unwrap()
    }

    #[test]
    fn endo_of_examples() {
        let e = endo_of(&x(3, "L21"));
        assert_eq!(e.image(1), &w(3, "a1"));
        assert_eq!(e.image(2), &w(3, "a1 a2"));
        assert_eq!(e.image(3), &w(3, "a3"));
        assert!(endo_of(&x(3, "E2^2")).is_identity());
        let r = endo_of(&x(3, "R21^-1"));
        assert_eq!(r.image(2), &w(3, "a2 A1"));
        // substitution check: ρ21 undoes it
        assert!(endo_of(&x(3, "R21")).compose(&r).unwrap().is_identity());
    }

    #[test]
    fn apply_compose_equal_examples() {
        let l = endo_of(&x(2, "L21"));
        assert_eq!(l.apply(&w(2, "a2 a2")).unwrap(), w(2, "a1 a2 a1 a2"));
        let a1 = w(3, "a1");
        let a2 = w(3, "a2");
        assert_eq!(inner(&a1).compose(&inner(&a2)).unwrap(), inner(&(&a1 * &a2)));
        let lr = endo_of(&x(3, "L21 R21"));
        assert!(equal(&lr, &endo_of(&x(3, "R21 L21"))));
        assert_eq!(lr.image(2), &w(3, "a1 a2 a1"));
        assert!(l.apply(&w(3, "a1")).is_err());
    }

    #[test]
    fn inner_examples() {
        assert!(inner(&Word::identity(3)).is_identity());
        assert_eq!(inner(&w(3, "a1")).image(2), &w(3, "a1 a2 A1"));
    }

    #[test]
    fn is_inner_examples() {
        assert_eq!(is_inner(&Endo::identity(3)), Some(Word::identity(3)));
        let g = w(3, "a1 A2");
        assert_eq!(is_inner(&inner(&g)), Some(g));
        assert_eq!(is_inner(&endo_of(&x(3, "L21"))), None);
        // rank one normalization
        assert_eq!(is_inner(&Endo::identity(1)), Some(Word::identity(1)));
        // conjugators ending in a1 powers
        let g = w(3, "a2 a3 a1^3");
        assert_eq!(is_inner(&inner(&g)), Some(g));
    }

    #[test]
    fn commutator_relations() {
        let lhs = x(3, "L23^-1").commutator(&x(3, "L31^-1")).unwrap();
        assert!(verify_relation(&lhs, &x(3, "L21^-1"), RelationMode::Aut).unwrap());
        let lhs = x(3, "R23^-1").commutator(&x(3, "R31^-1")).unwrap();
        assert!(verify_relation(&lhs, &x(3, "R21^-1"), RelationMode::Aut).unwrap());
    }

    #[test]
    fn epsilon_swap() {
        let e2 = x(3, "E2");
        let lhs = x(3, "L21^-1").conjugate_by(&e2).unwrap();
        assert!(verify_relation(&lhs, &x(3, "R21"), RelationMode::Aut).unwrap());
        let lhs = x(3, "L31").conjugate_by(&e2).unwrap();
        assert!(verify_relation(&lhs, &x(3, "L31"), RelationMode::Aut).unwrap());
    }

    #[test]
    fn orientation_reports_inverted() {
        let product = x(3, "L21^-1 R21 L31^-1 R31");
        // product equals ad_{a1}^{-1}; compare against an expression for ad_{a1}
        let ad_a1 = product.inv();
        assert_eq!(orientation(&product, &ad_a1, RelationMode::Aut).unwrap(), Orientation::InvertedRhs);
        assert_eq!(orientation(&product, &product, RelationMode::Aut).unwrap(), Orientation::AsStated);
        assert_eq!(orientation(&product, &x(3, "L21"), RelationMode::Aut).unwrap(), Orientation::Neither);
    }

    #[test]
    fn gpq_examples() {
        let r = gpq_check(4, 1, 2, &w(4, "a1")).unwrap();
        assert!(r.pass, "{}", r.to_json());
        let r = gpq_check(4, 3, 3, &w(4, "a1")).unwrap();
        assert!(r.pass);
        let r = gpq_check(5, 2, 3, &w(5, "a1 A2")).unwrap();
        assert!(r.pass);
        assert!(gpq_check(4, 1, 2, &w(4, "a3")).is_err());
        assert!(gpq_check(4, 0, 2, &w(4, "a1")).is_err());
        assert!(gpq_check(2, 1, 2, &w(2, "1")).is_err());
    }

    #[test]
    fn gpq_detects_wrong_exponent() {
        // deliberately mismatched T: use p+1 in T but p in the relation
        let n = 4;
        let rank = n + 1;
        let a = |k: u32| Word::generator(rank, k + 1).unwrap();
        let w = a(1);
        let alpha = Endo::with_image(rank, 1, &a(0) * &w).unwrap();
        let alpha_inv = Endo::with_image(rank, 1, &a(0) * &w.inv()).unwrap();
        let beta = Endo::with_image(rank, 1, &a(0) * &a(n - 1)).unwrap();
        let gamma = Endo::with_image(rank, 1, &a(0) * &a(n)).unwrap();
        let t = Endo::with_image(rank, n, &a(n - 1) * &w.pow(2)).unwrap();
        let t_inv = Endo::with_image(rank, n, &a(n - 1) * &w.pow(-2)).unwrap();
        let mut report = Report::new("neg");
        gpq_relations(&mut report, "x", 0, &alpha, &beta, &gamma, &t, &t_inv, &alpha_inv, 1, 1).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn inner_gpq_examples() {
        for (p, q) in [(1, 2), (3, 3), (-1, 4)] {
            let r = inner_gpq_check(p, q).unwrap();
            assert!(r.pass, "{}", r.to_json());
        }
        assert!(inner_gpq_check(0, 1).is_err());
    }

    #[test]
    fn nielsen_z4() {
        let r = nielsen_z4_check();
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.data["ad_a1_exponent"], json!(-1));
        assert_eq!(r.checks.len(), 8);
    }

    #[test]
    fn parse_format_round_trip() {
        let e = x(4, "L21 R34^-2 E3 P12^3");
        assert_eq!(e.to_string(), "L21 R34^-2 E3 P12^3");
        assert_eq!(AutExpr::parse(4, &e.to_string()).unwrap(), e);
        assert_eq!(AutExpr::parse(12, "L11,2").unwrap().to_string(), "L11,2");
        assert!(matches!(AutExpr::parse(3, "L21 L22"), Err(AutError::Parse { pos: 4, .. })));
        assert!(matches!(AutExpr::parse(3, "Q12"), Err(AutError::Parse { .. })));
        assert_eq!(x(3, "L21 L21^-1").factors().len(), 0);
    }
}
