//! Euclidean models: translation actions of `Z^r` on `Q^k`, affine isometries with
//! signed-permutation linear part, induced actions on products, the equidistance
//! degeneracy for three collinear translations, and the flat of the Nielsen `Z^4`.
//!
//! Lengths are always squared rationals.

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::latgeom::{self, classify, lattice_from, q, q_str, Classification, GeomError, Lattice, OctoReport, Polytope, Q, Vec3};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear part is not a signed permutation")]
    NotSignedPermutation,
    #[error("linear part does not permute blocks of size {0}")]
    NotBlockPermutation(usize),
    #[error("invalid coset action: {0}")]
    InvalidCosetAction(String),
    #[error("degenerate input: {reason}")]
    Degenerate { reason: String, witness: Option<Vec<String>> },
    #[error("scale must be at least 1, got {0}")]
    ScaleTooSmall(i64),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).fold(q(0), |acc, x| acc + x)
}

pub fn norm_sq(a: &[Q]) -> Q {
    dot(a, a)
}

fn strings(v: &[Q]) -> Vec<String> {
    v.iter().map(q_str).collect()
}

/// `Z^r` acting on `Q^k` by translations: `(n_1..n_r)` translates by `Σ n_i vectors[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationAction {
    k: usize,
    vectors: Vec<Vec<Q>>,
}

impl TranslationAction {
    pub fn new(k: usize, vectors: Vec<Vec<Q>>) -> Result<Self, FlatError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != k) {
            return Err(FlatError::DimensionMismatch(format!("vector of length {} in dimension {k}", v.len())));
        }
        Ok(TranslationAction { k, vectors })
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn vectors(&self) -> &[Vec<Q>] {
        &self.vectors
    }

    pub fn translation(&self, exponents: &[i64]) -> Result<Vec<Q>, FlatError> {
        if exponents.len() != self.vectors.len() {
            return Err(FlatError::DimensionMismatch(format!(
                "{} exponents for rank {}",
                exponents.len(),
                self.vectors.len()
            )));
        }
        let mut out = vec![q(0); self.k];
        for (n, v) in exponents.iter().zip(&self.vectors) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * q(*n);
            }
        }
        Ok(out)
    }

    pub fn in_kernel(&self, exponents: &[i64]) -> Result<bool, FlatError> {
        Ok(self.translation(exponents)?.iter().all(Zero::is_zero))
    }

    /// As a pure-translation isometry of `Q^k`.
    pub fn isometry(&self, exponents: &[i64]) -> Result<AffineIsometry, FlatError> {
        Ok(AffineIsometry::translation(self.translation(exponents)?))
    }
}

/// `x -> O x + t` where `O e_i = sign_i e_{target_i}` permutes blocks of `block_dim` coordinates.
/// Equality compares the map only.
#[derive(Debug, Clone)]
pub struct AffineIsometry {
    block_dim: usize,
    linear: Vec<(usize, i8)>,
    translation: Vec<Q>,
}

impl PartialEq for AffineIsometry {
    fn eq(&self, other: &Self) -> bool {
        self.linear == other.linear && self.translation == other.translation
    }
}

impl Eq for AffineIsometry {}

impl AffineIsometry {
    pub fn new(block_dim: usize, linear: Vec<(usize, i8)>, translation: Vec<Q>) -> Result<Self, FlatError> {
        let n = linear.len();
        if translation.len() != n {
            return Err(FlatError::DimensionMismatch(format!(
                "linear part on {n} coordinates, translation of length {}",
                translation.len()
            )));
        }
        if block_dim == 0 || !n.is_multiple_of(block_dim) {
            return Err(FlatError::NotBlockPermutation(block_dim));
        }
        let mut seen = vec![false; n];
        for &(t, s) in &linear {
            if t >= n || seen[t] || (s != 1 && s != -1) {
                return Err(FlatError::NotSignedPermutation);
            }
            seen[t] = true;
        }
        for b in 0..n / block_dim {
            let targets: Vec<usize> = (0..block_dim).map(|c| linear[b * block_dim + c].0 / block_dim).collect();
            if targets.iter().any(|&t| t != targets[0]) {
                return Err(FlatError::NotBlockPermutation(block_dim));
            }
        }
        Ok(AffineIsometry {
            block_dim,
            linear,
            translation,
        })
    }

    pub fn identity(dim: usize) -> Self {
        AffineIsometry {
            block_dim: dim.max(1),
            linear: (0..dim).map(|i| (i, 1)).collect(),
            translation: vec![q(0); dim],
        }
    }

    pub fn translation(t: Vec<Q>) -> Self {
        let mut g = Self::identity(t.len());
        g.translation = t;
        g
    }

    /// Permutes blocks (`block j -> block perm[j]`, coordinates kept in order) then translates.
    pub fn block_permutation(block_dim: usize, perm: &[usize], translation: Vec<Q>) -> Result<Self, FlatError> {
        let linear = perm
            .iter()
            .flat_map(|&p| (0..block_dim).map(move |c| (p * block_dim + c, 1i8)))
            .collect();
        Self::new(block_dim, linear, translation)
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn translation_part(&self) -> &[Q] {
        &self.translation
    }

    pub fn linear_part(&self) -> &[(usize, i8)] {
        &self.linear
    }

    pub fn apply_linear(&self, x: &[Q]) -> Vec<Q> {
        let mut out = vec![q(0); x.len()];
        for (i, &(t, s)) in self.linear.iter().enumerate() {
            out[t] = if s > 0 { x[i].clone() } else { -x[i].clone() };
        }
        out
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        let mut out = self.apply_linear(x);
        for (o, t) in out.iter_mut().zip(&self.translation) {
            *o += t;
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineIsometry) -> Result<AffineIsometry, FlatError> {
        if self.dim() != other.dim() {
            return Err(FlatError::DimensionMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        let linear = other
            .linear
            .iter()
            .map(|&(t, s)| {
                let (t2, s2) = self.linear[t];
                (t2, s * s2)
            })
            .collect();
        Ok(AffineIsometry {
            block_dim: gcd(self.block_dim, other.block_dim),
            linear,
            translation: self.apply(&other.translation),
        })
    }

    pub fn pow(&self, m: u32) -> AffineIsometry {
        let mut out = AffineIsometry::identity(self.dim());
        out.block_dim = self.block_dim;
        for _ in 0..m {
            out = self.compose(&out).expect("same dimension");
        }
        out
    }

    /// Order of the linear part.
    pub fn linear_order(&self) -> u32 {
        let lin = AffineIsometry {
            block_dim: self.block_dim,
            linear: self.linear.clone(),
            translation: vec![q(0); self.dim()],
        };
        let id = AffineIsometry::identity(self.dim());
        let mut acc = lin.clone();
        let mut m = 1;
        while acc.linear != id.linear {
            acc = lin.compose(&acc).expect("same dimension");
            m += 1;
        }
        m
    }

    /// Signed cycles of the linear part: `(coordinates in cycle order, signs along the cycle)`.
    fn cycles(&self) -> Vec<(Vec<usize>, Vec<i8>)> {
        let n = self.dim();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut coords = Vec::new();
            let mut signs = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                coords.push(i);
                let (t, s) = self.linear[i];
                signs.push(s);
                i = t;
            }
            out.push((coords, signs));
        }
        out
    }

    /// Orthogonal projection of `v` onto the fixed space of the linear part.
    pub fn project_to_fixed(&self, v: &[Q]) -> Vec<Q> {
        let mut out = vec![q(0); self.dim()];
        for (coords, signs) in self.cycles() {
            if signs.iter().filter(|&&s| s < 0).count() % 2 == 1 {
                continue;
            }
            // fixed vector f with f[coords[0]] = 1 and f[coords[j+1]] = signs[j] f[coords[j]]
            let mut f = Vec::with_capacity(coords.len());
            let mut c: i64 = 1;
            for (j, _) in coords.iter().enumerate() {
                f.push(c);
                c *= signs[j] as i64;
            }
            let m = q(coords.len() as i64);
            let coef = coords.iter().zip(&f).fold(q(0), |acc, (&i, &fi)| acc + &v[i] * q(fi)) / m;
            for (&i, &fi) in coords.iter().zip(&f) {
                out[i] = &coef * q(fi);
            }
        }
        out
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Squared translation length with a witness point of the minimal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationLength {
    pub length_sq: Q,
    pub min_point: Vec<Q>,
    /// Translation vector along the minimal set (projection onto the fixed space).
    pub axis_translation: Vec<Q>,
}

impl TranslationLength {
    pub fn is_hyperbolic(&self) -> bool {
        self.length_sq.is_positive()
    }
}

/// `‖g‖²` = squared norm of the fixed-space component of the translation part; the witness
/// solves `(O - I) x = t_fix - t`, so `g(x) - x = t_fix`.
pub fn trans_length_sq(g: &AffineIsometry) -> TranslationLength {
    let t = &g.translation;
    let t_fix = g.project_to_fixed(t);
    let r: Vec<Q> = t_fix.iter().zip(t).map(|(a, b)| a - b).collect();
    let mut x = vec![q(0); g.dim()];
    for (coords, signs) in g.cycles() {
        let m = coords.len();
        // x[coords[j]] = alpha_j c + beta_j, using s_j x[c_j] - x[c_{j+1}] = r[c_{j+1}]
        let mut alpha = vec![q(1)];
        let mut beta = vec![q(0)];
        for j in 0..m - 1 {
            let s = q(signs[j] as i64);
            alpha.push(&s * &alpha[j]);
            beta.push(&s * &beta[j] - &r[coords[j + 1]]);
        }
        // closing equation: s_{m-1} x[c_{m-1}] - x[c_0] = r[c_0]
        let s = q(signs[m - 1] as i64);
        let coeff = &s * &alpha[m - 1] - q(1);
        let c = if coeff.is_zero() { q(0) } else { (&r[coords[0]] - &s * &beta[m - 1]) / coeff };
        for j in 0..m {
            x[coords[j]] = &alpha[j] * &c + &beta[j];
        }
    }
    TranslationLength {
        length_sq: norm_sq(&t_fix),
        min_point: x,
        axis_translation: t_fix,
    }
}

/// Induction data for one generator `g` of `G` relative to a transversal `t_0..t_{d-1}` of `H`:
/// `g t_j = t_{perm[j]} h_j` with `h_j ∈ H`, and `cocycle[j]` the isometry of `h_j` on the base space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAction {
    pub perm: Vec<usize>,
    pub cocycle: Vec<AffineIsometry>,
}

/// The induced isometry of `g` on the `d`-fold product: block `j` is carried to block
/// `perm[j]` by the isometry of `h_j`.
pub fn induced_action(data: &CosetAction) -> Result<AffineIsometry, FlatError> {
    let d = data.perm.len();
    if d == 0 || data.cocycle.len() != d {
        return Err(FlatError::InvalidCosetAction(format!(
            "{} cosets but {} cocycle entries",
            d,
            data.cocycle.len()
        )));
    }
    let mut seen = vec![false; d];
    for &p in &data.perm {
        if p >= d || seen[p] {
            return Err(FlatError::InvalidCosetAction(format!("{:?} is not a permutation", data.perm)));
        }
        seen[p] = true;
    }
    let k = data.cocycle[0].dim();
    if data.cocycle.iter().any(|h| h.dim() != k) {
        return Err(FlatError::DimensionMismatch("base isometries of different dimensions".into()));
    }
    let mut linear = Vec::with_capacity(d * k);
    let mut translation = vec![q(0); d * k];
    for (j, h) in data.cocycle.iter().enumerate() {
        let target = data.perm[j];
        for &(t, s) in &h.linear {
            linear.push((target * k + t, s));
        }
        for (c, x) in h.translation.iter().enumerate() {
            translation[target * k + c] = x.clone();
        }
    }
    AffineIsometry::new(k, linear, translation)
}

/// Induction from `H = dZ` to `G = Z` with transversal `g^0..g^{d-1}`: `base` is the isometry of `g^d`.
pub fn cyclic_induction(d: usize, base: &AffineIsometry) -> Result<AffineIsometry, FlatError> {
    if d == 0 {
        return Err(FlatError::InvalidCosetAction("index must be positive".into()));
    }
    let id = AffineIsometry::identity(base.dim());
    let data = CosetAction {
        perm: (0..d).map(|j| (j + 1) % d).collect(),
        cocycle: (0..d).map(|j| if j + 1 == d { base.clone() } else { id.clone() }).collect(),
    };
    induced_action(&data)
}

/// Block-diagonal isometry applying `base` in every one of `d` blocks.
pub fn diagonal(d: usize, base: &AffineIsometry) -> Result<AffineIsometry, FlatError> {
    induced_action(&CosetAction {
        perm: (0..d).collect(),
        cocycle: vec![base.clone(); d],
    })
}

/// Coefficients of a constraint `linear · (τ·a) + quadratic · |a|² = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub linear: i64,
    pub quadratic: i64,
}

/// Certificate that `|τ + p a|² = |τ + q a|² = |τ|²` forces `a = 0` when `p ≠ q` are nonzero.
///
/// Expanding gives `E_k : 2k (τ·a) + k² |a|² = 0` for `k = p, q`; the combination
/// `p E_q - q E_p` kills the `τ·a` term and leaves `pq(q - p) |a|² = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquidistanceCertificate {
    pub tau: Vec<String>,
    pub p: i64,
    pub q: i64,
    pub constraint_p: Constraint,
    pub constraint_q: Constraint,
    /// Multipliers of `(E_p, E_q)`.
    pub multipliers: (i64, i64),
    /// The eliminant `linear (τ·a) + quadratic |a|²`.
    pub eliminant: Constraint,
    pub conclusion: String,
}

impl EquidistanceCertificate {
    /// Recomputes the elimination and checks that it leaves a nonzero multiple of `|a|²`.
    pub fn validate(&self) -> bool {
        let cp = constraint(self.p);
        let cq = constraint(self.q);
        let (mp, mq) = self.multipliers;
        let lin = mp * cp.linear + mq * cq.linear;
        let quad = mp * cp.quadratic + mq * cq.quadratic;
        cp == self.constraint_p
            && cq == self.constraint_q
            && lin == 0
            && quad != 0
            && self.eliminant == Constraint { linear: lin, quadratic: quad }
    }
}

fn constraint(k: i64) -> Constraint {
    Constraint {
        linear: 2 * k,
        quadratic: k * k,
    }
}

pub fn equidistant_forces_zero(tau: &[Q], p: i64, q_: i64) -> Result<EquidistanceCertificate, FlatError> {
    if p == 0 || q_ == 0 {
        return Err(FlatError::Degenerate {
            reason: "multipliers must be nonzero".into(),
            witness: None,
        });
    }
    if p == q_ {
        // a = -(2/p) τ satisfies both (identical) constraints
        let witness = (!tau.iter().all(Zero::is_zero)).then(|| strings(&tau.iter().map(|t| t * Q::new((-2).into(), p.into())).collect::<Vec<_>>()));
        return Err(FlatError::Degenerate {
            reason: format!("p = q = {p}: the two constraints coincide"),
            witness,
        });
    }
    let cp = constraint(p);
    let cq = constraint(q_);
    let multipliers = (-q_, p);
    let eliminant = Constraint {
        linear: multipliers.0 * cp.linear + multipliers.1 * cq.linear,
        quadratic: multipliers.0 * cp.quadratic + multipliers.1 * cq.quadratic,
    };
    Ok(EquidistanceCertificate {
        tau: strings(tau),
        p,
        q: q_,
        constraint_p: cp,
        constraint_q: cq,
        multipliers,
        conclusion: format!("{} |a|^2 = 0, hence a = 0", eliminant.quadratic),
        eliminant,
    })
}

/// Evaluates `|τ + p a|² = |τ|²` and `|τ + q a|² = |τ|²` on an explicit `a`.
pub fn equidistance_holds(tau: &[Q], p: i64, q_: i64, a: &[Q]) -> bool {
    let t2 = norm_sq(tau);
    let shifted = |k: i64| -> Vec<Q> { tau.iter().zip(a).map(|(t, x)| t + x * q(k)).collect() };
    norm_sq(&shifted(p)) == t2 && norm_sq(&shifted(q_)) == t2
}

/// Names of the four generators of the Nielsen `Z^4`, in translation-vector order.
pub const NIELSEN_GENERATORS: [&str; 4] = ["L21", "R21", "L31", "R31"];

/// Exponent vector of `λ21^-1 ρ21 λ31^-1 ρ31` in the generators above.
pub const INNER_RELATION: [i64; 4] = [-1, 1, -1, 1];

#[derive(Debug, Clone)]
pub struct NielsenFlat {
    pub scale: i64,
    pub action: TranslationAction,
    pub lattice: Lattice,
    pub cell: Polytope,
    pub classification: Classification,
    pub octo: OctoReport,
}

/// The translation model of the Nielsen `Z^4` on `E^3` at scale `s`:
/// `λ21 -> -s(1,1,0)`, `ρ21 -> s(1,-1,0)`, `λ31 -> -s(-1,0,1)`, `ρ31 -> s(-1,0,-1)`.
pub fn nielsen_flat(s: i64) -> Result<NielsenFlat, FlatError> {
    if s < 1 {
        return Err(FlatError::ScaleTooSmall(s));
    }
    let raw = [[-1, -1, 0], [1, -1, 0], [1, 0, -1], [-1, 0, -1]];
    let vecs: Vec<Vec3> = raw.iter().map(|c| Vec3::ints(s * c[0], s * c[1], s * c[2])).collect();
    let action = TranslationAction::new(3, vecs.iter().map(|v| v.0.to_vec()).collect())?;
    let lattice = lattice_from(&vecs)?;
    let cell = latgeom::voronoi_cell(&lattice)?;
    let classification = classify(&cell)?;
    // α1 = λ21^-1, α2 = ρ21, β1 = λ31^-1, β2 = ρ31 translate by u1, u2, v1, v2; the octahedral
    // conditions hold for {u1, u2, -v1, -v2}
    let u1 = -&vecs[0];
    let u2 = vecs[1].clone();
    let v1 = -&vecs[2];
    let v2 = vecs[3].clone();
    let octo = latgeom::octo_check(&u1, &u2, &-&v1, &-&v2);
    Ok(NielsenFlat {
        scale: s,
        action,
        lattice,
        cell,
        classification,
        octo,
    })
}

impl NielsenFlat {
    pub fn to_report(&self) -> Report {
        let mut r = Report::new("nielsen-flat");
        let norms: Vec<Q> = self.action.vectors().iter().map(|v| norm_sq(v)).collect();
        r.check(
            "equal_translation_lengths",
            "conjugate-generators-equal-length",
            norms.iter().all(|n| n == &norms[0] && n.is_positive()),
            json!(norms.iter().map(q_str).collect::<Vec<_>>()),
        );
        let kernel = self.action.in_kernel(&INNER_RELATION).unwrap_or(false);
        r.check(
            "inner_relation_in_kernel",
            "ad-a1-elliptic",
            kernel,
            json!({ "exponents": INNER_RELATION }),
        );
        r.check(
            "effective_lattice_rank_3",
            "flat-dimension-3",
            self.lattice.rank() == 3,
            json!({ "rank": self.lattice.rank(), "covolume": self.lattice.covolume().as_ref().map(q_str) }),
        );
        r.check(
            "volume_equals_covolume",
            "dirichlet-domain-tiles",
            self.lattice.covolume().as_ref() == Some(&self.cell.volume()),
            json!(q_str(&self.cell.volume())),
        );
        r.absorb("octo", self.octo.to_report("octo"));
        r.check(
            "dirichlet_domain_rhombic_dodecahedron",
            "rhombic-dodecahedron-dirichlet-domain",
            self.classification.is_rhombic_dodecahedron,
            json!({ "f_vector": self.classification.f_vector }),
        );
        r.with_data(json!({
            "scale": self.scale,
            "generators": NIELSEN_GENERATORS,
            "translations": self.action.vectors().iter().map(|v| strings(v)).collect::<Vec<_>>(),
            "basis": self.lattice.basis(),
            "classification": self.classification,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latgeom::qr;

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn pure_translation() {
        let g = AffineIsometry::translation(qs(&[3, 4]));
        let t = trans_length_sq(&g);
        assert_eq!(t.length_sq, q(25));
        assert!(t.is_hyperbolic());
    }

    #[test]
    fn permutation_without_translation_is_elliptic() {
        let g = AffineIsometry::block_permutation(1, &[1, 2, 0], qs(&[0, 0, 0])).unwrap();
        let t = trans_length_sq(&g);
        assert_eq!(t.length_sq, q(0));
        assert_eq!(g.apply(&t.min_point), t.min_point);
    }

    #[test]
    fn cyclic_block_translation() {
        let l = qr(5, 2);
        let g = AffineIsometry::block_permutation(1, &[1, 2, 0], vec![q(0), q(0), l.clone()]).unwrap();
        let t = trans_length_sq(&g);
        assert_eq!(t.length_sq, &l * &l / q(3));
        let moved = g.apply(&t.min_point);
        let disp: Vec<Q> = moved.iter().zip(&t.min_point).map(|(a, b)| a - b).collect();
        assert_eq!(norm_sq(&disp), t.length_sq);
        assert_eq!(disp, t.axis_translation);
    }

    #[test]
    fn negative_cycle_has_no_fixed_direction() {
        // x -> -x + t on E^1 is a reflection through t/2
        let g = AffineIsometry::new(1, vec![(0, -1)], qs(&[6])).unwrap();
        let t = trans_length_sq(&g);
        assert_eq!(t.length_sq, q(0));
        assert_eq!(t.min_point, qs(&[3]));
    }

    #[test]
    fn rejects_non_block_maps() {
        assert!(matches!(AffineIsometry::new(1, vec![(0, 1), (0, 1)], qs(&[0, 0])), Err(FlatError::NotSignedPermutation)));
        // coordinates 0,1 form a block but go to different blocks
        let bad = AffineIsometry::new(2, vec![(0, 1), (2, 1), (1, 1), (3, 1)], qs(&[0, 0, 0, 0]));
        assert!(matches!(bad, Err(FlatError::NotBlockPermutation(2))));
        assert!(matches!(AffineIsometry::new(1, vec![(0, 1)], qs(&[0, 0])), Err(FlatError::DimensionMismatch(_))));
    }

    #[test]
    fn induction_examples() {
        let base = AffineIsometry::translation(vec![q(2)]);
        let one = cyclic_induction(1, &base).unwrap();
        assert_eq!(one, base);
        let g = cyclic_induction(3, &base).unwrap();
        assert_eq!(trans_length_sq(&g).length_sq, qr(4, 3));
        let cube = g.pow(3);
        assert_eq!(cube, AffineIsometry::translation(qs(&[2, 2, 2])));
        assert_eq!(trans_length_sq(&cube).length_sq, q(12));
        assert_eq!(cube, diagonal(3, &base).unwrap());
    }

    #[test]
    fn induced_action_validation() {
        let id = AffineIsometry::identity(1);
        let bad = CosetAction {
            perm: vec![0, 0],
            cocycle: vec![id.clone(), id.clone()],
        };
        assert!(induced_action(&bad).is_err());
        let short = CosetAction {
            perm: vec![1, 0],
            cocycle: vec![id.clone()],
        };
        assert!(induced_action(&short).is_err());
        let mixed = CosetAction {
            perm: vec![1, 0],
            cocycle: vec![id, AffineIsometry::identity(2)],
        };
        assert!(matches!(induced_action(&mixed), Err(FlatError::DimensionMismatch(_))));
    }

    #[test]
    fn linear_order() {
        let g = AffineIsometry::block_permutation(2, &[1, 2, 3, 0], qs(&[0; 8])).unwrap();
        assert_eq!(g.linear_order(), 4);
        let r = AffineIsometry::new(1, vec![(1, -1), (0, 1)], qs(&[0, 0])).unwrap();
        assert_eq!(r.linear_order(), 4);
    }

    #[test]
    fn certificate_examples() {
        let tau = qs(&[1, 0]);
        let c = equidistant_forces_zero(&tau, 1, 2).unwrap();
        assert!(c.validate());
        assert_eq!(c.eliminant, Constraint { linear: 0, quadratic: 2 });
        // the only solution of the 2x2 system is a = 0:
        // 2a_x + |a|^2 = 0 and 4a_x + 4|a|^2 = 0 give |a|^2 = 0
        assert!(equidistance_holds(&tau, 1, 2, &qs(&[0, 0])));
        assert!(!equidistance_holds(&tau, 1, 2, &qs(&[-2, 0])));
        assert!(equidistance_holds(&tau, 1, 1, &qs(&[-2, 0])));

        match equidistant_forces_zero(&qs(&[3, 1]), 2, 2) {
            Err(FlatError::Degenerate { witness: Some(w), .. }) => {
                assert_eq!(w, vec!["-3", "-1"]);
                assert!(equidistance_holds(&qs(&[3, 1]), 2, 2, &qs(&[-3, -1])));
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(equidistant_forces_zero(&tau, 0, 2).is_err());

        let c = equidistant_forces_zero(&qs(&[0, 0, 0]), 1, 3).unwrap();
        assert!(c.validate());
        assert!(!equidistance_holds(&qs(&[0, 0, 0]), 1, 3, &qs(&[1, 0, 0])));
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut c = equidistant_forces_zero(&qs(&[1, 0]), 1, 2).unwrap();
        c.multipliers = (1, 1);
        assert!(!c.validate());
    }

    #[test]
    fn nielsen_flat_examples() {
        let f = nielsen_flat(1).unwrap();
        assert_eq!(f.lattice.covolume().unwrap(), q(2));
        assert!(f.classification.is_rhombic_dodecahedron);
        assert!(f.octo.pass);
        let r = f.to_report();
        assert!(r.pass, "{}", r.to_json());
        let f2 = nielsen_flat(2).unwrap();
        assert_eq!(f2.cell.volume(), q(16));
        assert!(f2.classification.faces.iter().all(|x| x.diagonal_ratio_sq.as_deref() == Some("2")));
        assert!(f2.action.in_kernel(&INNER_RELATION).unwrap());
        assert!(matches!(nielsen_flat(0), Err(FlatError::ScaleTooSmall(0))));
    }
}
