//! Exact rational lattice geometry in `Q^3`: lattice bases, Voronoi (Dirichlet) cells,
//! and polytope classification.
//!
//! Everything is computed over [`BigRational`]; lengths are compared through their squares.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::report::Report;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("lattice has rank {0}, expected 3")]
    RankDeficient(usize),
    #[error("Voronoi cell failed exact verification: {0}")]
    VerificationFailed(String),
    #[error("degenerate face {0}")]
    DegenerateFace(usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exact string form: `3`, `-1/2`.
pub fn q_str(x: &Q) -> String {
    x.to_string()
}

/// Decimal rendering rounded half away from zero to `precision` fractional digits.
pub fn q_decimal(x: &Q, precision: usize) -> String {
    let scale = BigInt::from(10u32).pow(precision as u32);
    let scaled = x.abs() * Q::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = &scaled - Q::from_integer(floor.clone());
    let rounded = if frac * q(2) >= q(1) { floor + 1 } else { floor };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded_is_zero(&int_part, &frac_part) { "-" } else { "" };
    if precision == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = precision)
    }
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec3(pub [Q; 3]);

impl Vec3 {
    pub fn new(x: Q, y: Q, z: Q) -> Self {
        Vec3([x, y, z])
    }

    pub fn ints(x: i64, y: i64, z: i64) -> Self {
        Vec3([q(x), q(y), q(z)])
    }

    pub fn zero() -> Self {
        Self::ints(0, 0, 0)
    }

    pub fn dot(&self, o: &Vec3) -> Q {
        &self.0[0] * &o.0[0] + &self.0[1] * &o.0[1] + &self.0[2] * &o.0[2]
    }

    pub fn norm_sq(&self) -> Q {
        self.dot(self)
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a, b, c] = &self.0;
        let [x, y, z] = &o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn scale(&self, s: &Q) -> Vec3 {
        Vec3([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// `m · self` for a row-major 3×3 matrix.
    pub fn transform(&self, m: &[[Q; 3]; 3]) -> Vec3 {
        Vec3(std::array::from_fn(|i| {
            &m[i][0] * &self.0[0] + &m[i][1] * &self.0[1] + &m[i][2] * &self.0[2]
        }))
    }

    pub fn to_strings(&self) -> [String; 3] {
        std::array::from_fn(|i| q_str(&self.0[i]))
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Serialize for Vec3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl Add for &Vec3 {
    type Output = Vec3;
    fn add(self, o: &Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }
}

impl Sub for &Vec3 {
    type Output = Vec3;
    fn sub(self, o: &Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

impl Neg for &Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3(std::array::from_fn(|i| -&self.0[i]))
    }
}

pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> Q {
    a.dot(&b.cross(c))
}

/// Parses `x,y,z` with each coordinate an integer or a fraction `p/q`.
pub fn parse_vec3(text: &str) -> Result<Vec3, GeomError> {
    parse_vec3_at(text, 0)
}

fn parse_vec3_at(text: &str, offset: usize) -> Result<Vec3, GeomError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(GeomError::Parse {
            pos: offset,
            msg: format!("expected three comma-separated coordinates, got `{text}`"),
        });
    }
    let mut coords = Vec::with_capacity(3);
    let mut pos = offset;
    for p in parts {
        let t = p.trim();
        let v = Q::from_str(t).map_err(|_| GeomError::Parse {
            pos,
            msg: format!("bad rational `{t}`"),
        })?;
        coords.push(v);
        pos += p.len() + 1;
    }
    let [x, y, z]: [Q; 3] = coords.try_into().expect("three coordinates");
    Ok(Vec3([x, y, z]))
}

/// Parses `;`-separated vectors, e.g. `1,1,0; 1,-1,0`.
pub fn parse_vec3_list(text: &str) -> Result<Vec<Vec3>, GeomError> {
    let mut out = Vec::new();
    let mut pos = 0;
    for chunk in text.split(';') {
        if !chunk.trim().is_empty() {
            out.push(parse_vec3_at(chunk, pos)?);
        }
        pos += chunk.len() + 1;
    }
    Ok(out)
}

/// Rotation matrix of the quaternion `(a, b, c, d)`; rational and orthogonal for any nonzero integer quaternion.
pub fn quaternion_rotation(a: i64, b: i64, c: i64, d: i64) -> [[Q; 3]; 3] {
    let n = a * a + b * b + c * c + d * d;
    assert!(n > 0, "zero quaternion");
    let e = |x: i64| qr(x, n);
    [
        [e(a * a + b * b - c * c - d * d), e(2 * (b * c - a * d)), e(2 * (b * d + a * c))],
        [e(2 * (b * c + a * d)), e(a * a - b * b + c * c - d * d), e(2 * (c * d - a * b))],
        [e(2 * (b * d - a * c)), e(2 * (c * d + a * b)), e(a * a - b * b - c * c + d * d)],
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    generators: Vec<Vec3>,
    basis: Vec<Vec3>,
}

impl Lattice {
    pub fn generators(&self) -> &[Vec3] {
        &self.generators
    }

    /// Hermite-reduced basis (row echelon with positive pivots).
    pub fn basis(&self) -> &[Vec3] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Determinant of the Gram matrix of the basis: the squared covolume in the span.
    pub fn covolume_sq(&self) -> Q {
        let b = &self.basis;
        let g: Vec<Vec<Q>> = b.iter().map(|x| b.iter().map(|y| x.dot(y)).collect()).collect();
        det_dense(g)
    }

    /// `|det basis|` for rank 3.
    pub fn covolume(&self) -> Option<Q> {
        (self.rank() == 3).then(|| det3(&self.basis[0], &self.basis[1], &self.basis[2]).abs())
    }

    /// Integer coordinates of `v` in the echelon basis, if `v` is a lattice vector.
    pub fn coordinates(&self, v: &Vec3) -> Option<Vec<BigInt>> {
        let mut rest = v.clone();
        let mut coeffs = Vec::with_capacity(self.basis.len());
        for b in &self.basis {
            let col = (0..3).find(|&k| !b.0[k].is_zero()).expect("basis vectors are nonzero");
            let c = &rest.0[col] / &b.0[col];
            if !c.is_integer() {
                return None;
            }
            rest = &rest - &b.scale(&c);
            coeffs.push(c.to_integer());
        }
        rest.is_zero().then_some(coeffs)
    }

    pub fn contains(&self, v: &Vec3) -> bool {
        self.coordinates(v).is_some()
    }
}

fn det_dense(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = q(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return q(0);
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let d = &f * &m[c][k];
                m[r][k] -= d;
            }
        }
    }
    det
}

/// Integer row reduction of the generators to Hermite form, followed by a two-way
/// membership check between generators and basis.
pub fn lattice_from(gens: &[Vec3]) -> Result<Lattice, GeomError> {
    if gens.is_empty() {
        return Err(GeomError::NoGenerators);
    }
    let denom = gens
        .iter()
        .flat_map(|g| g.0.iter())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let dq = Q::from_integer(denom.clone());
    let mut rows: Vec<[BigInt; 3]> = gens
        .iter()
        .map(|g| std::array::from_fn(|k| (&g.0[k] * &dq).to_integer()))
        .collect();
    // transform[i] expresses row i as an integer combination of the generators
    let m = rows.len();
    let mut transform: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();

    let mut pivot_row = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..3 {
        if pivot_row == m {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below pivot_row
            let best = (pivot_row..m)
                .filter(|&r| !rows[r][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            transform.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..m {
                if rows[r][col].is_zero() {
                    continue;
                }
                let f = rows[r][col].div_floor(&rows[pivot_row][col]);
                sub_row(&mut rows, &mut transform, r, pivot_row, &f);
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[pivot_row][col].is_zero() {
            continue;
        }
        if rows[pivot_row][col].is_negative() {
            for x in rows[pivot_row].iter_mut() {
                *x = -x.clone();
            }
            for x in transform[pivot_row].iter_mut() {
                *x = -x.clone();
            }
        }
        for r in 0..pivot_row {
            let f = rows[r][col].div_floor(&rows[pivot_row][col]);
            if !f.is_zero() {
                sub_row(&mut rows, &mut transform, r, pivot_row, &f);
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
    }

    let basis: Vec<Vec3> = rows[..pivot_row]
        .iter()
        .map(|r| Vec3(std::array::from_fn(|k| Q::new(r[k].clone(), denom.clone()))))
        .collect();
    let lattice = Lattice {
        generators: gens.to_vec(),
        basis,
    };

    // two-way membership
    for (i, b) in lattice.basis.iter().enumerate() {
        let combo = gens
            .iter()
            .zip(&transform[i])
            .fold(Vec3::zero(), |acc, (g, c)| &acc + &g.scale(&Q::from_integer(c.clone())));
        if &combo != b {
            return Err(GeomError::VerificationFailed(format!("basis vector {i} is not the tracked combination")));
        }
    }
    if let Some(g) = gens.iter().find(|g| !lattice.contains(g)) {
        return Err(GeomError::VerificationFailed(format!("generator {g} not in basis span")));
    }
    Ok(lattice)
}

fn sub_row(rows: &mut [[BigInt; 3]], transform: &mut [Vec<BigInt>], target: usize, source: usize, f: &BigInt) {
    for k in 0..3 {
        let d = f * &rows[source][k];
        rows[target][k] -= d;
    }
    for k in 0..transform[target].len() {
        let d = f * &transform[source][k];
        transform[target][k] -= d;
    }
}

/// LLL reduction (δ = 3/4) of a list of independent vectors, exact.
pub fn lll_reduce(basis: &[Vec3]) -> Vec<Vec3> {
    let mut b = basis.to_vec();
    let n = b.len();
    let delta = qr(3, 4);
    let gso = |b: &[Vec3]| {
        let mut star: Vec<Vec3> = Vec::with_capacity(b.len());
        let mut mu = vec![vec![q(0); b.len()]; b.len()];
        for i in 0..b.len() {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = b[i].dot(&star[j]) / star[j].norm_sq();
                v = &v - &star[j].scale(&mu[i][j]);
            }
            star.push(v);
        }
        (star, mu)
    };
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (_, mu) = gso(&b);
            let r = mu[k][j].round();
            if !r.is_zero() {
                b[k] = &b[k] - &b[j].scale(&r);
            }
        }
        let (star, mu) = gso(&b);
        let lhs = star[k].norm_sq();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * star[k - 1].norm_sq();
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// A closed halfspace `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Halfspace {
    pub normal: Vec3,
    #[serde(serialize_with = "ser_q")]
    pub offset: Q,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q_str(x))
}

impl Halfspace {
    pub fn contains(&self, x: &Vec3) -> bool {
        self.normal.dot(x) <= self.offset
    }

    pub fn on_boundary(&self, x: &Vec3) -> bool {
        self.normal.dot(x) == self.offset
    }
}

/// A convex 3-polytope: vertices, faces as counter-clockwise (seen from outside)
/// index cycles, and one supporting halfspace per face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
    pub halfspaces: Vec<Halfspace>,
}

impl Polytope {
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for f in &self.faces {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                out.insert((a.min(b), a.max(b)));
            }
        }
        out
    }

    /// `(V, E, F)`.
    pub fn f_vector(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges().len(), self.faces.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.f_vector();
        v as i64 - e as i64 + f as i64
    }

    /// Exact volume, as a sum of signed tetrahedra from the origin.
    pub fn volume(&self) -> Q {
        let mut vol = q(0);
        for f in &self.faces {
            let v0 = &self.vertices[f[0]];
            for w in f[1..].windows(2) {
                vol += det3(v0, &self.vertices[w[0]], &self.vertices[w[1]]);
            }
        }
        vol / q(6)
    }

    /// Applies `x -> m x` to every vertex and halfspace normal (`m` orthogonal).
    pub fn transformed(&self, m: &[[Q; 3]; 3]) -> Polytope {
        Polytope {
            vertices: self.vertices.iter().map(|v| v.transform(m)).collect(),
            faces: self.faces.clone(),
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: h.normal.transform(m),
                    offset: h.offset.clone(),
                })
                .collect(),
        }
    }

    pub fn vertex_set(&self) -> BTreeSet<Vec3> {
        self.vertices.iter().cloned().collect()
    }

    /// OFF text; coordinates rendered as decimals with `precision` fractional digits.
    pub fn to_off(&self, precision: usize) -> String {
        let (v, e, f) = self.f_vector();
        let mut s = format!("OFF\n{v} {f} {e}\n");
        for p in &self.vertices {
            let c: Vec<String> = p.0.iter().map(|x| q_decimal(x, precision)).collect();
            s.push_str(&c.join(" "));
            s.push('\n');
        }
        for face in &self.faces {
            s.push_str(&face.len().to_string());
            for i in face {
                s.push_str(&format!(" {i}"));
            }
            s.push('\n');
        }
        s
    }

    /// Exact sidecar: every coordinate as a `[numerator, denominator]` pair of decimal integer strings.
    pub fn to_exact_json(&self) -> Value {
        let pair = |x: &Q| json!([x.numer().to_string(), x.denom().to_string()]);
        json!({
            "format": "exact-rational-polytope",
            "vertices": self.vertices.iter().map(|v| v.0.iter().map(pair).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "faces": self.faces,
            "halfspaces": self.halfspaces.iter().map(|h| json!({
                "normal": h.normal.0.iter().map(pair).collect::<Vec<_>>(),
                "offset": pair(&h.offset),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Solves `n_i · x = o_i` for three halfspaces by Cramer's rule.
fn intersect3(a: &Halfspace, b: &Halfspace, c: &Halfspace) -> Option<Vec3> {
    let d = det3(&a.normal, &b.normal, &c.normal);
    if d.is_zero() {
        return None;
    }
    // x = (o_a (n_b × n_c) + o_b (n_c × n_a) + o_c (n_a × n_b)) / det
    let x = &(&b.normal.cross(&c.normal).scale(&a.offset) + &c.normal.cross(&a.normal).scale(&b.offset))
        + &a.normal.cross(&b.normal).scale(&c.offset);
    Some(x.scale(&d.recip()))
}

/// Orders coplanar points counter-clockwise around their centroid as seen from `normal`.
fn order_face(points: &[(usize, Vec3)], normal: &Vec3) -> Vec<usize> {
    // drop the axis along which the normal is largest
    let drop = (0..3).max_by(|&i, &j| normal.0[i].abs().cmp(&normal.0[j].abs())).expect("three axes");
    let (u, v) = match drop {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let n = q(points.len() as i64);
    let cu = points.iter().fold(q(0), |acc, (_, p)| acc + &p.0[u]) / &n;
    let cv = points.iter().fold(q(0), |acc, (_, p)| acc + &p.0[v]) / &n;
    let rel = |p: &Vec3| (&p.0[u] - &cu, &p.0[v] - &cv);
    let half = |(x, y): &(Q, Q)| if y.is_positive() || (y.is_zero() && x.is_positive()) { 0 } else { 1 };
    let mut items: Vec<(usize, (Q, Q))> = points.iter().map(|(i, p)| (*i, rel(p))).collect();
    items.sort_by(|(_, a), (_, b)| {
        half(a).cmp(&half(b)).then_with(|| {
            let cross = &a.0 * &b.1 - &a.1 * &b.0;
            Q::zero().cmp(&cross)
        })
    });
    // (u, v, drop) is a cyclic permutation of (0, 1, 2), so the 2D orientation agrees with the
    // 3D one exactly when the dropped normal component is positive
    let mut order: Vec<usize> = items.into_iter().map(|(i, _)| i).collect();
    if normal.0[drop].is_negative() {
        order.reverse();
    }
    order
}

/// Builds the polytope cut out by `halfspaces` (assumed bounded, containing the origin in its interior).
pub fn polytope_from_halfspaces(halfspaces: &[Halfspace]) -> Polytope {
    let mut verts = BTreeSet::new();
    let n = halfspaces.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let Some(x) = intersect3(&halfspaces[i], &halfspaces[j], &halfspaces[k]) {
                    if halfspaces.iter().all(|h| h.contains(&x)) {
                        verts.insert(x);
                    }
                }
            }
        }
    }
    let vertices: Vec<Vec3> = verts.into_iter().collect();
    let mut faces = Vec::new();
    let mut used = Vec::new();
    for h in halfspaces {
        let on: Vec<(usize, Vec3)> = vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| h.on_boundary(v))
            .map(|(i, v)| (i, v.clone()))
            .collect();
        if on.len() >= 3 {
            faces.push(order_face(&on, &h.normal));
            used.push(h.clone());
        }
    }
    Polytope {
        vertices,
        faces,
        halfspaces: used,
    }
}

/// Lattice points `c · basis` for all nonzero `c ∈ [-radius, radius]^3`.
fn box_points(basis: &[Vec3], radius: i64) -> Vec<([i64; 3], Vec3)> {
    let mut out = Vec::new();
    for i in -radius..=radius {
        for j in -radius..=radius {
            for k in -radius..=radius {
                if (i, j, k) == (0, 0, 0) {
                    continue;
                }
                let v = &(&basis[0].scale(&q(i)) + &basis[1].scale(&q(j))) + &basis[2].scale(&q(k));
                out.push(([i, j, k], v));
            }
        }
    }
    out
}

/// Voronoi-relevant vectors among the box candidates: a vector is relevant iff `±v` are the only
/// shortest vectors of its class modulo `2L`.
fn relevant_vectors(candidates: &[([i64; 3], Vec3)]) -> Vec<Vec3> {
    let mut classes: BTreeMap<[i64; 3], Vec<(Q, &Vec3)>> = BTreeMap::new();
    for (c, v) in candidates {
        let parity = c.map(|x| x.rem_euclid(2));
        if parity == [0, 0, 0] {
            continue;
        }
        classes.entry(parity).or_default().push((v.norm_sq(), v));
    }
    let mut out = Vec::new();
    for members in classes.values() {
        let min = members.iter().map(|(n, _)| n).min().expect("nonempty class");
        let shortest: Vec<&Vec3> = members.iter().filter(|(n, _)| n == min).map(|(_, v)| *v).collect();
        if shortest.len() == 2 {
            out.extend(shortest.into_iter().cloned());
        }
    }
    out
}

fn bisector(a: &Vec3) -> Halfspace {
    Halfspace {
        normal: a.clone(),
        offset: a.norm_sq() / q(2),
    }
}

/// The Dirichlet domain `{x : |x| <= |x - a| for all a ∈ L}` of a rank-3 lattice, exactly.
///
/// Candidates come from an LLL-reduced basis with coefficients in `[-2, 2]^3`. The result is
/// accepted only if every vertex is at least as close to 0 as to every lattice point in a larger
/// box and the volume equals the covolume; otherwise the search box is widened.
pub fn voronoi_cell(lattice: &Lattice) -> Result<Polytope, GeomError> {
    if lattice.rank() != 3 {
        return Err(GeomError::RankDeficient(lattice.rank()));
    }
    let reduced = lll_reduce(lattice.basis());
    let covolume = lattice.covolume().expect("rank 3");
    let mut last_failure = String::new();
    for radius in 2..=4 {
        let candidates = box_points(&reduced, radius);
        let halfspaces: Vec<Halfspace> = relevant_vectors(&candidates).iter().map(bisector).collect();
        let cell = polytope_from_halfspaces(&halfspaces);
        match verify_cell(&cell, &reduced, radius + 1, &covolume) {
            Ok(()) => return Ok(cell),
            Err(msg) => last_failure = msg,
        }
    }
    Err(GeomError::VerificationFailed(last_failure))
}

fn verify_cell(cell: &Polytope, reduced: &[Vec3], radius: i64, covolume: &Q) -> Result<(), String> {
    if cell.faces.is_empty() {
        return Err("no faces".into());
    }
    let vol = cell.volume();
    if &vol != covolume {
        return Err(format!("volume {vol} differs from covolume {covolume}"));
    }
    for (_, a) in box_points(reduced, radius) {
        let h = bisector(&a);
        if let Some(v) = cell.vertices.iter().find(|v| !h.contains(v)) {
            return Err(format!("vertex {v} is closer to lattice point {a}"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    RhombicDodecahedron,
    Cube,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceInfo {
    pub vertex_count: usize,
    pub is_rhombus: bool,
    /// Common squared edge length when the face is a rhombus.
    pub edge_len_sq: Option<String>,
    /// Longer over shorter squared diagonal, for quadrilaterals.
    pub diagonal_ratio_sq: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub f_vector: (usize, usize, usize),
    pub euler_characteristic: i64,
    pub faces: Vec<FaceInfo>,
    pub shape: Shape,
    pub is_rhombic_dodecahedron: bool,
    pub volume: String,
}

pub fn classify(p: &Polytope) -> Result<Classification, GeomError> {
    let mut faces = Vec::with_capacity(p.faces.len());
    let mut ratios = Vec::new();
    for (fi, f) in p.faces.iter().enumerate() {
        if f.len() < 3 {
            return Err(GeomError::DegenerateFace(fi));
        }
        let pt = |i: usize| &p.vertices[f[i % f.len()]];
        let edges: Vec<Q> = (0..f.len()).map(|i| (pt(i + 1) - pt(i)).norm_sq()).collect();
        if edges.iter().any(Zero::is_zero) {
            return Err(GeomError::DegenerateFace(fi));
        }
        let e0 = pt(1) - pt(0);
        if (0..f.len()).all(|i| e0.cross(&(pt(i) - pt(0))).is_zero()) {
            return Err(GeomError::DegenerateFace(fi));
        }
        let is_rhombus = f.len() == 4 && edges.iter().all(|e| e == &edges[0]);
        let ratio = (f.len() == 4).then(|| {
            let d1 = (pt(2) - pt(0)).norm_sq();
            let d2 = (pt(3) - pt(1)).norm_sq();
            if d1 >= d2 {
                d1 / d2
            } else {
                d2 / d1
            }
        });
        faces.push(FaceInfo {
            vertex_count: f.len(),
            is_rhombus,
            edge_len_sq: is_rhombus.then(|| q_str(&edges[0])),
            diagonal_ratio_sq: ratio.as_ref().map(q_str),
        });
        ratios.push(ratio);
    }
    let f_vector = p.f_vector();
    let all_rhombi = faces.iter().all(|f| f.is_rhombus);
    let all_ratio = |r: &Q| ratios.iter().all(|x| x.as_ref() == Some(r));
    let is_rd = f_vector == (14, 24, 12) && all_rhombi && all_ratio(&q(2));
    let shape = if is_rd {
        Shape::RhombicDodecahedron
    } else if f_vector == (8, 12, 6) && all_rhombi && all_ratio(&q(1)) {
        Shape::Cube
    } else {
        Shape::Other
    };
    Ok(Classification {
        f_vector,
        euler_characteristic: p.euler_characteristic(),
        faces,
        shape,
        is_rhombic_dodecahedron: is_rd,
        volume: q_str(&p.volume()),
    })
}

/// Outcome of testing four vectors against the octahedral conditions
/// `u1 + u2 = v1 + v2`, `u1 ⊥ u2`, `v1 ⊥ v2`, `(u1 - u2) ⊥ (v1 - v2)`, with all four of a
/// common nonzero length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OctoReport {
    /// Common squared norm, when all four agree and are nonzero.
    pub common_norm_sq: Option<String>,
    pub equal_nonzero_norms: bool,
    pub sums_agree: bool,
    pub pairs_orthogonal: bool,
    pub differences_orthogonal: bool,
    pub pass: bool,
}

pub fn octo_check(u1: &Vec3, u2: &Vec3, v1: &Vec3, v2: &Vec3) -> OctoReport {
    let n = u1.norm_sq();
    let equal = !n.is_zero() && [u2, v1, v2].iter().all(|x| x.norm_sq() == n);
    let sums_agree = u1 + u2 == v1 + v2;
    let pairs_orthogonal = u1.dot(u2).is_zero() && v1.dot(v2).is_zero();
    let differences_orthogonal = (u1 - u2).dot(&(v1 - v2)).is_zero();
    OctoReport {
        common_norm_sq: equal.then(|| q_str(&n)),
        equal_nonzero_norms: equal,
        sums_agree,
        pairs_orthogonal,
        differences_orthogonal,
        pass: equal && sums_agree && pairs_orthogonal && differences_orthogonal,
    }
}

impl OctoReport {
    pub fn to_report(&self, command: &str) -> Report {
        let mut r = Report::new(command);
        let anchor = "octahedral-conditions";
        r.check("equal_nonzero_norms", anchor, self.equal_nonzero_norms, json!(self.common_norm_sq));
        r.check("sums_agree", anchor, self.sums_agree, Value::Null);
        r.check("pairs_orthogonal", anchor, self.pairs_orthogonal, Value::Null);
        r.check("differences_orthogonal", anchor, self.differences_orthogonal, Value::Null);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64, z: i64) -> Vec3 {
        Vec3::ints(x, y, z)
    }

    fn fcc() -> Vec<Vec3> {
        vec![v(1, 1, 0), v(1, -1, 0), v(1, 0, 1), v(1, 0, -1)]
    }

    #[test]
    fn lattice_examples() {
        let l = lattice_from(&fcc()).unwrap();
        assert_eq!(l.rank(), 3);
        assert_eq!(l.covolume().unwrap(), q(2));
        assert_eq!(l.covolume_sq(), q(4));
        let c = lattice_from(&[v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]).unwrap();
        assert_eq!(c.covolume().unwrap(), q(1));
        let line = lattice_from(&[v(1, 0, 0), v(2, 0, 0)]).unwrap();
        assert_eq!(line.rank(), 1);
        assert_eq!(line.basis(), &[v(1, 0, 0)]);
        assert!(matches!(lattice_from(&[]), Err(GeomError::NoGenerators)));
        // the FCC lattice is the even-coordinate-sum sublattice of Z^3
        assert!(l.contains(&v(2, 0, 0)));
        assert!(l.contains(&v(0, 1, 1)));
        assert!(!l.contains(&v(1, 0, 0)));
    }

    #[test]
    fn lattice_rational_generators() {
        let l = lattice_from(&[Vec3::new(qr(1, 2), q(0), q(0)), Vec3::new(qr(1, 3), q(0), q(0))]).unwrap();
        assert_eq!(l.basis(), &[Vec3::new(qr(1, 6), q(0), q(0))]);
        let plane = lattice_from(&[v(2, 0, 0), v(0, 3, 0), v(1, 1, 0)]).unwrap();
        assert_eq!(plane.rank(), 2);
        // index of <(2,0),(0,3),(1,1)> in Z^2 is 1
        assert_eq!(plane.covolume_sq(), q(1));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(q_decimal(&qr(1, 2), 3), "0.500");
        assert_eq!(q_decimal(&qr(-1, 3), 4), "-0.3333");
        assert_eq!(q_decimal(&qr(2, 3), 2), "0.67");
        assert_eq!(q_decimal(&qr(-1, 1000), 2), "0.00");
        assert_eq!(q_decimal(&q(7), 0), "7");
        assert_eq!(q_decimal(&qr(-5, 2), 0), "-3");
    }

    #[test]
    fn parse_vectors() {
        assert_eq!(parse_vec3("1, -1/2, 0").unwrap(), Vec3::new(q(1), qr(-1, 2), q(0)));
        let l = parse_vec3_list("1,1,0;1,-1,0; 1,0,1").unwrap();
        assert_eq!(l.len(), 3);
        assert!(matches!(parse_vec3_list("1,1,0;1,x,0"), Err(GeomError::Parse { pos: 8, .. })));
        assert!(parse_vec3("1,2").is_err());
    }

    #[test]
    fn cube_cell() {
        let l = lattice_from(&[v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]).unwrap();
        let cell = voronoi_cell(&l).unwrap();
        assert_eq!(cell.volume(), q(1));
        let h = qr(1, 2);
        for x in &cell.vertices {
            assert!(x.0.iter().all(|c| c.abs() == h));
        }
        let c = classify(&cell).unwrap();
        assert_eq!(c.f_vector, (8, 12, 6));
        assert_eq!(c.shape, Shape::Cube);
        assert!(!c.is_rhombic_dodecahedron);
    }

    #[test]
    fn fcc_cell() {
        let cell = voronoi_cell(&lattice_from(&fcc()).unwrap()).unwrap();
        assert_eq!(cell.f_vector(), (14, 24, 12));
        assert_eq!(cell.volume(), q(2));
        assert_eq!(cell.euler_characteristic(), 2);
        let c = classify(&cell).unwrap();
        assert!(c.is_rhombic_dodecahedron);
        assert!(c.faces.iter().all(|f| f.diagonal_ratio_sq.as_deref() == Some("2")));
        // vertices: the six (±1,0,0)-type points and the eight (±1/2,±1/2,±1/2)
        let expected: BTreeSet<Vec3> = {
            let mut s = BTreeSet::new();
            for k in 0..3 {
                for sgn in [-1, 1] {
                    let mut c = [q(0), q(0), q(0)];
                    c[k] = q(sgn);
                    s.insert(Vec3(c));
                }
            }
            for a in [-1, 1] {
                for b in [-1, 1] {
                    for c in [-1, 1] {
                        s.insert(Vec3::new(qr(a, 2), qr(b, 2), qr(c, 2)));
                    }
                }
            }
            s
        };
        assert_eq!(cell.vertex_set(), expected);
    }

    #[test]
    fn faces_are_outward_ccw() {
        let cell = voronoi_cell(&lattice_from(&fcc()).unwrap()).unwrap();
        for (f, h) in cell.faces.iter().zip(&cell.halfspaces) {
            let p = |i: usize| &cell.vertices[f[i]];
            let n = (p(1) - p(0)).cross(&(p(2) - p(0)));
            assert!(n.dot(&h.normal).is_positive());
        }
    }

    #[test]
    fn scaled_cube_is_not_dodecahedron() {
        let l = lattice_from(&[v(2, 0, 0), v(0, 2, 0), v(0, 0, 2)]).unwrap();
        let c = classify(&voronoi_cell(&l).unwrap()).unwrap();
        assert_eq!(c.shape, Shape::Cube);
        assert_eq!(c.volume, "8");
    }

    #[test]
    fn rank_deficient_voronoi() {
        let l = lattice_from(&[v(1, 0, 0), v(0, 1, 0)]).unwrap();
        assert!(matches!(voronoi_cell(&l), Err(GeomError::RankDeficient(2))));
    }

    #[test]
    fn octo_examples() {
        let r = octo_check(&v(1, 1, 0), &v(1, -1, 0), &v(1, 0, 1), &v(1, 0, -1));
        assert!(r.pass);
        assert_eq!(r.common_norm_sq.as_deref(), Some("2"));
        let r = octo_check(&v(1, 0, 0), &v(0, 1, 0), &v(1, 0, 0), &v(0, 1, 0));
        assert!(r.sums_agree && r.pairs_orthogonal && r.equal_nonzero_norms);
        assert!(!r.differences_orthogonal);
        assert!(!r.pass);
        let r = octo_check(&v(2, 2, 0), &v(2, -2, 0), &v(2, 0, 2), &v(2, 0, -2));
        assert!(r.pass);
        assert_eq!(r.common_norm_sq.as_deref(), Some("8"));
        let r = octo_check(&v(0, 0, 0), &v(0, 0, 0), &v(0, 0, 0), &v(0, 0, 0));
        assert!(!r.equal_nonzero_norms);
    }

    #[test]
    fn quaternion_rotation_is_orthogonal() {
        let m = quaternion_rotation(1, 2, 3, 4);
        for i in 0..3 {
            for j in 0..3 {
                let dot = (0..3).fold(q(0), |acc, k| acc + &m[i][k] * &m[j][k]);
                assert_eq!(dot, q((i == j) as i64));
            }
        }
        let det = det3(&Vec3(m[0].clone()), &Vec3(m[1].clone()), &Vec3(m[2].clone()));
        assert_eq!(det, q(1));
    }

    #[test]
    fn lll_shortens_skewed_basis() {
        let b = vec![v(1, 0, 0), v(7, 1, 0), v(12, 5, 1)];
        let r = lll_reduce(&b);
        assert_eq!(det3(&r[0], &r[1], &r[2]).abs(), q(1));
        assert!(r.iter().all(|x| x.norm_sq() <= q(2)));
    }

    #[test]
    fn off_export() {
        let l = lattice_from(&[v(1, 0, 0), v(0, 1, 0), v(0, 0, 1)]).unwrap();
        let cell = voronoi_cell(&l).unwrap();
        let off = cell.to_off(2);
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("8 6 12"));
        assert_eq!(lines.next(), Some("-0.50 -0.50 -0.50"));
        assert_eq!(off.lines().filter(|l| l.starts_with("4 ")).count(), 6);
        let j = cell.to_exact_json();
        assert_eq!(j["vertices"][0][0], json!(["-1", "2"]));
        assert_eq!(j["faces"].as_array().unwrap().len(), 6);
    }
}
