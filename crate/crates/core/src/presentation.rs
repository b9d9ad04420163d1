//! Symbolic presentations: the Serre algebra on one vertex, the f families,
//! and the weight-window quiver with commutator and Serre relations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::qfield::{qbinom, qint, QPoint, QScalar};
use crate::rootdata::CartanDatum;

/// A generator family member: `X(i)` raises weight by `e_i`, `Y(i)` lowers it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    X(usize),
    Y(usize),
}

impl Gen {
    pub fn index(&self) -> usize {
        match self {
            Gen::X(i) | Gen::Y(i) => *i,
        }
    }

    pub fn sign(&self) -> i64 {
        match self {
            Gen::X(_) => 1,
            Gen::Y(_) => -1,
        }
    }

    pub fn chirality(&self) -> Chirality {
        match self {
            Gen::X(_) => Chirality::X,
            Gen::Y(_) => Chirality::Y,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::X(i) => write!(f, "x{}", i + 1),
            Gen::Y(i) => write!(f, "y{}", i + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chirality {
    X,
    Y,
}

impl Chirality {
    pub fn gen(&self, i: usize) -> Gen {
        match self {
            Chirality::X => Gen::X(i),
            Chirality::Y => Gen::Y(i),
        }
    }
}

/// Quantum parameter regime: an indeterminate, or a fixed evaluation point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QMode {
    Generic,
    At(QPoint),
}

impl QMode {
    pub fn apply(&self, s: &QScalar) -> Result<QScalar> {
        match self {
            QMode::Generic => Ok(s.clone()),
            QMode::At(p) => Ok(QScalar::from_rational(s.specialize(p)?)),
        }
    }

    /// Rejects 0, ±1 and any value whose power of order ≤ 24 equals one.
    pub fn validate(&self) -> Result<()> {
        if let QMode::At(QPoint::Rational(r)) = self {
            let one = BigRational::from_integer(1.into());
            let zero = BigRational::from_integer(0.into());
            let bad = |reason: &str| Err(Error::Config {
                field: "q".into(),
                reason: reason.into(),
            });
            if *r == zero {
                return bad("q = 0 is not allowed");
            }
            if *r == one || *r == -one.clone() {
                return bad("q = ±1 is not a generic specialization; use `one` for the classical point");
            }
            let mut p = r.clone();
            for order in 1..=24 {
                if p == one {
                    return bad(&format!("q is a root of unity of order {order}"));
                }
                p = &p * r;
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            QMode::Generic => "generic".into(),
            QMode::At(p) => p.to_string(),
        }
    }
}

/// The parameter family `f = (f_1..f_r)`, `f_j: Z^r -> Q(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FSpec {
    /// `f_j(n) = Σ_i a_ij n_i`.
    ClassicalLinear,
    /// `f_j(n) = [Σ_i a_ij n_i]` at base `q^{d_j}`.
    QInteger,
    /// `f_j(n) = Σ_i m_ij n_i + c_j` with rational `m`.
    AffineLinear { m: Vec<Vec<QScalar>>, c: Vec<QScalar> },
    /// Explicit values on a finite set of weights.
    Table {
        #[serde(with = "weight_map")]
        values: BTreeMap<Vec<i64>, Vec<QScalar>>,
    },
}

mod weight_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        weight: Vec<i64>,
        values: Vec<QScalar>,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<i64>, Vec<QScalar>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<Entry> = m
            .iter()
            .map(|(w, v)| Entry {
                weight: w.clone(),
                values: v.clone(),
            })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Vec<i64>, Vec<QScalar>>, D::Error> {
        let list = Vec::<Entry>::deserialize(d)?;
        Ok(list.into_iter().map(|e| (e.weight, e.values)).collect())
    }
}

impl FSpec {
    pub fn zero(rank: usize) -> FSpec {
        FSpec::AffineLinear {
            m: vec![vec![QScalar::zero(); rank]; rank],
            c: vec![QScalar::zero(); rank],
        }
    }

    /// Shape and rationality checks against a Cartan datum.
    pub fn validate(&self, c: &CartanDatum) -> Result<()> {
        let r = c.rank();
        let bad = |reason: String| Err(Error::Config {
            field: "f".into(),
            reason,
        });
        match self {
            FSpec::ClassicalLinear | FSpec::QInteger => Ok(()),
            FSpec::AffineLinear { m, c: cv } => {
                if m.len() != r || m.iter().any(|row| row.len() != r) || cv.len() != r {
                    return bad(format!("affine family needs an {r}x{r} matrix and {r} constants"));
                }
                if m.iter().flatten().any(|x| !x.is_constant()) {
                    return bad("affine matrix entries must be rational".into());
                }
                Ok(())
            }
            FSpec::Table { values } => {
                if values.is_empty() {
                    return bad("table family is empty".into());
                }
                for (w, v) in values {
                    if w.len() != r || v.len() != r {
                        return bad(format!("table entry {w:?} has the wrong length"));
                    }
                }
                Ok(())
            }
        }
    }

    /// True when every value is q-free.
    pub fn is_classical(&self) -> bool {
        match self {
            FSpec::ClassicalLinear => true,
            FSpec::QInteger => false,
            FSpec::AffineLinear { c, .. } => c.iter().all(|x| x.is_constant()),
            FSpec::Table { values } => values.values().flatten().all(|x| x.is_constant()),
        }
    }

    pub fn default_qmode(&self) -> QMode {
        if self.is_classical() {
            QMode::At(QPoint::One)
        } else {
            QMode::Generic
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FSpec::ClassicalLinear => "classical",
            FSpec::QInteger => "qinteger",
            FSpec::AffineLinear { .. } => "affine",
            FSpec::Table { .. } => "table",
        }
    }

    /// Reads `classical`, `qinteger`, `zero`, or a JSON object.
    pub fn parse(s: &str, rank: usize) -> Result<FSpec> {
        let t = s.trim();
        match t {
            "classical" | "classical-linear" => Ok(FSpec::ClassicalLinear),
            "qinteger" | "qint" | "quantum" => Ok(FSpec::QInteger),
            "zero" => Ok(FSpec::zero(rank)),
            _ if t.starts_with('{') => serde_json::from_str(t).map_err(|e| Error::Config {
                field: "f".into(),
                reason: e.to_string(),
            }),
            _ => Err(Error::Config {
                field: "f".into(),
                reason: format!("unknown family {t:?}; expected classical, qinteger, zero or a JSON object"),
            }),
        }
    }

    /// `f_j(n)` as a generic scalar.
    pub fn eval(&self, c: &CartanDatum, j: usize, n: &[i64]) -> Result<QScalar> {
        let r = c.rank();
        if j >= r {
            return Err(Error::IndexOutOfRange { index: j, rank: r });
        }
        let pairing = || (0..r).map(|i| c.a[i][j] * n[i]).sum::<i64>();
        match self {
            FSpec::ClassicalLinear => Ok(QScalar::from_int(pairing())),
            FSpec::QInteger => Ok(qint(pairing(), c.d[j])),
            FSpec::AffineLinear { m, c: cv } => {
                let mut acc = cv[j].clone();
                for i in 0..r {
                    acc = &acc + &(&m[i][j] * &QScalar::from_int(n[i]));
                }
                Ok(acc)
            }
            FSpec::Table { values } => values
                .get(n)
                .map(|v| v[j].clone())
                .ok_or_else(|| Error::TableLookup { weight: n.to_vec() }),
        }
    }
}

/// Cartan datum, f family and q regime bundled for the constructors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub cartan: CartanDatum,
    pub f: FSpec,
    pub q: QMode,
}

impl Params {
    pub fn new(cartan: CartanDatum, f: FSpec) -> Params {
        let q = f.default_qmode();
        Params { cartan, f, q }
    }

    pub fn with_q(cartan: CartanDatum, f: FSpec, q: QMode) -> Params {
        Params { cartan, f, q }
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    /// `f_j(n)` in the active q regime.
    pub fn f_at(&self, j: usize, n: &[i64]) -> Result<QScalar> {
        self.q.apply(&self.f.eval(&self.cartan, j, n)?)
    }

    /// Serre coefficients `(−1)^k [b choose k]_{q^{d_i}}` in the active regime.
    pub fn serre_coeffs(&self, i: usize, j: usize) -> Result<Vec<QScalar>> {
        serre_coefficients(&self.cartan, i, j)?
            .iter()
            .map(|x| self.q.apply(x))
            .collect()
    }
}

/// `f_j(n)` for a generic family.
pub fn eval_f(f: &FSpec, c: &CartanDatum, j: usize, n: &[i64]) -> Result<QScalar> {
    f.eval(c, j, n)
}

/// Coefficient of `z_i^k z_j z_i^{b-k}` for `k = 0..=b`.
pub fn serre_coefficients(c: &CartanDatum, i: usize, j: usize) -> Result<Vec<QScalar>> {
    let r = c.rank();
    for idx in [i, j] {
        if idx >= r {
            return Err(Error::IndexOutOfRange { index: idx, rank: r });
        }
    }
    if i == j {
        return Err(Error::SerreIndex(i));
    }
    let b = c.b(i, j);
    Ok((0..=b)
        .map(|k| {
            let v = qbinom(b, k as i64, c.d[i]);
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect())
}

/// Generator words (operator order) of the Serre relation for `(i, j)`.
pub fn serre_words(c: &CartanDatum, i: usize, j: usize) -> Vec<Vec<usize>> {
    let b = c.b(i, j) as usize;
    (0..=b)
        .map(|k| {
            let mut w = vec![i; k];
            w.push(j);
            w.extend(std::iter::repeat(i).take(b - k));
            w
        })
        .collect()
}

/// An arrow of a quiver; ids are assigned in precedence order (smaller id ranks higher).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub gen: Gen,
    pub src: u32,
    pub tgt: u32,
}

/// A path `word[0] ∘ … ∘ word[k-1]` starting at `src`; `word[k-1]` is applied first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub src: u32,
    pub word: Vec<u32>,
}

impl Path {
    pub fn vertex(v: u32) -> Path {
        Path { src: v, word: vec![] }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// Degree-lexicographic with smaller arrow ids ranking higher; ties on empty words by vertex.
impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| {
                for (a, b) in self.word.iter().zip(&other.word) {
                    match b.cmp(a) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
            .then_with(|| self.src.cmp(&other.src))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Linear combination of paths; terms are kept in increasing monomial order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NCPoly {
    #[serde(with = "path_map")]
    pub terms: BTreeMap<Path, QScalar>,
}

mod path_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<Path, QScalar>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<(&Path, &QScalar)> = m.iter().collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Path, QScalar>, D::Error> {
        let list = Vec::<(Path, QScalar)>::deserialize(d)?;
        Ok(list.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}

impl NCPoly {
    pub fn zero() -> NCPoly {
        NCPoly::default()
    }

    pub fn monomial(p: Path, c: QScalar) -> NCPoly {
        let mut out = NCPoly::zero();
        out.add_term(p, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, p: Path, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), -c);
        }
        out
    }

    pub fn scale(&self, s: &QScalar) -> NCPoly {
        if s.is_zero() {
            return NCPoly::zero();
        }
        NCPoly {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect(),
        }
    }

    pub fn lead(&self) -> Option<(&Path, &QScalar)> {
        self.terms.iter().next_back()
    }

    /// `u · self · v` on letter sequences; the source is `v`'s source when `v` is nonempty.
    pub fn sandwich(&self, u: &[u32], v: &[u32], v_src: Option<u32>) -> NCPoly {
        let mut out = NCPoly::zero();
        for (p, c) in &self.terms {
            let mut word = Vec::with_capacity(u.len() + p.word.len() + v.len());
            word.extend_from_slice(u);
            word.extend_from_slice(&p.word);
            word.extend_from_slice(v);
            let src = if v.is_empty() { p.src } else { v_src.unwrap_or(p.src) };
            out.add_term(Path { src, word }, c.clone());
        }
        out
    }

    pub fn map_coeffs<F: Fn(&QScalar) -> Result<QScalar>>(&self, f: F) -> Result<NCPoly> {
        let mut out = NCPoly::zero();
        for (p, c) in &self.terms {
            out.add_term(p.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn max_bits(&self) -> u64 {
        self.terms.values().map(|c| c.max_bits()).max().unwrap_or(0)
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|p| p.len()).max().unwrap_or(0)
    }
}

/// Vertices and arrows; `vertices[v]` is the weight of vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub rank: usize,
    pub vertices: Vec<Vec<i64>>,
    pub arrows: Vec<Arrow>,
    #[serde(skip)]
    vertex_index: HashMap<Vec<i64>, u32>,
    #[serde(skip)]
    out_index: HashMap<(u32, Gen), u32>,
}

impl Quiver {
    pub fn new(rank: usize, vertices: Vec<Vec<i64>>, arrows: Vec<Arrow>) -> Quiver {
        let mut q = Quiver {
            rank,
            vertices,
            arrows,
            vertex_index: HashMap::new(),
            out_index: HashMap::new(),
        };
        q.reindex();
        q
    }

    pub fn reindex(&mut self) {
        self.vertex_index = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        self.out_index = self
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| ((a.src, a.gen), i as u32))
            .collect();
    }

    pub fn vertex(&self, w: &[i64]) -> Option<u32> {
        self.vertex_index.get(w).copied()
    }

    pub fn weight(&self, v: u32) -> &[i64] {
        &self.vertices[v as usize]
    }

    /// Arrow of generator `g` leaving `v`.
    pub fn arrow_from(&self, v: u32, g: Gen) -> Option<u32> {
        self.out_index.get(&(v, g)).copied()
    }

    pub fn target(&self, p: &Path) -> u32 {
        match p.word.first() {
            Some(&a) => self.arrows[a as usize].tgt,
            None => p.src,
        }
    }

    /// Source of the letter sequence `word`, or `fallback` when empty.
    pub fn word_src(&self, word: &[u32], fallback: u32) -> u32 {
        match word.last() {
            Some(&a) => self.arrows[a as usize].src,
            None => fallback,
        }
    }

    /// Concrete path for a generator word starting at `v`, if it stays in the quiver.
    pub fn path_of(&self, v: u32, gens: &[Gen]) -> Option<Path> {
        let mut cur = v;
        let mut word = vec![0u32; gens.len()];
        for (k, g) in gens.iter().enumerate().rev() {
            let a = self.arrow_from(cur, *g)?;
            word[k] = a;
            cur = self.arrows[a as usize].tgt;
        }
        Some(Path { src: v, word })
    }

    pub fn gens_of(&self, p: &Path) -> Vec<Gen> {
        p.word.iter().map(|&a| self.arrows[a as usize].gen).collect()
    }

    /// Z^r multidegree of a path: the sum of generator shifts.
    pub fn multidegree(&self, p: &Path) -> Vec<i64> {
        let mut out = vec![0; self.rank];
        for &a in &p.word {
            let g = self.arrows[a as usize].gen;
            out[g.index()] += g.sign();
        }
        out
    }

    pub fn render_path(&self, p: &Path) -> String {
        let body = if p.word.is_empty() {
            "e".to_string()
        } else {
            p.word
                .iter()
                .map(|&a| self.arrows[a as usize].gen.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.vertices.len() > 1 {
            format!("{body}@{:?}", self.vertices[p.src as usize])
        } else {
            body
        }
    }

    pub fn render(&self, poly: &NCPoly) -> String {
        if poly.is_zero() {
            return "0".into();
        }
        poly.terms
            .iter()
            .rev()
            .map(|(p, c)| format!("({}) {}", c, self.render_path(p)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelKind {
    Commutator,
    SerreX,
    SerreY,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelKind,
    pub i: usize,
    pub j: usize,
    /// Source vertex of every term.
    pub vertex: u32,
    pub poly: NCPoly,
}

impl Relation {
    pub fn name(&self) -> String {
        let k = match self.kind {
            RelKind::Commutator => "comm",
            RelKind::SerreX => "serre-x",
            RelKind::SerreY => "serre-y",
        };
        format!("{k}({},{})", self.i + 1, self.j + 1)
    }
}

/// Window bookkeeping carried by windowed presentations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub radius: i64,
    pub margin: i64,
}

/// Quiver with relations. Single-vertex presentations model free algebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub window: Option<WindowInfo>,
    pub q: QMode,
    pub precedence: Vec<Gen>,
    pub label: String,
}

pub type WindowedQuiver = Presentation;

impl Presentation {
    /// Canonical text used for hashing.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("label {}\nq {}\n", self.label, self.q.label()));
        if let Some(w) = &self.window {
            s.push_str(&format!("window {} {}\n", w.radius, w.margin));
        }
        s.push_str(&format!(
            "order deglex {}\n",
            self.precedence.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(">")
        ));
        for v in &self.quiver.vertices {
            s.push_str(&format!("v {v:?}\n"));
        }
        for a in &self.quiver.arrows {
            s.push_str(&format!("a {} {} {}\n", a.gen, a.src, a.tgt));
        }
        for r in &self.relations {
            s.push_str(&format!("r {} {}", r.name(), r.vertex));
            for (p, c) in r.poly.terms.iter().rev() {
                s.push_str(&format!(" | {} {:?} {}", p.src, p.word, c));
            }
            s.push('\n');
        }
        s
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    /// Applies a specialization to every coefficient.
    pub fn specialize(&self, q: &QMode) -> Result<Presentation> {
        if *q == QMode::Generic {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        out.q = q.clone();
        for r in &mut out.relations {
            r.poly = r.poly.map_coeffs(|c| q.apply(c))?;
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.quiver.rank
    }
}

/// Default precedence `x1 > x2 > … > y1 > y2 > …`.
pub fn default_precedence(rank: usize) -> Vec<Gen> {
    (0..rank).map(Gen::X).chain((0..rank).map(Gen::Y)).collect()
}

fn check_precedence(rank: usize, precedence: &[Gen]) -> Result<()> {
    let mut sorted = precedence.to_vec();
    sorted.sort();
    let mut expect = default_precedence(rank);
    expect.sort();
    if sorted != expect {
        return Err(Error::Config {
            field: "order".into(),
            reason: "precedence must list every generator exactly once".into(),
        });
    }
    Ok(())
}

/// Serre relation on the free algebra whose letter `k` is generator `k` of the chirality.
pub fn serre_relation(c: &CartanDatum, i: usize, j: usize, _chirality: Chirality) -> Result<NCPoly> {
    let coeffs = serre_coefficients(c, i, j)?;
    let mut out = NCPoly::zero();
    for (w, coef) in serre_words(c, i, j).into_iter().zip(coeffs) {
        let word = w.into_iter().map(|g| g as u32).collect();
        out.add_term(Path { src: 0, word }, coef);
    }
    Ok(out)
}

/// One-vertex quiver with loops `z_1..z_r` and the Serre relations of one chirality.
pub fn serre_algebra(c: &CartanDatum, chirality: Chirality) -> Presentation {
    let r = c.rank();
    let arrows = (0..r)
        .map(|i| Arrow {
            gen: chirality.gen(i),
            src: 0,
            tgt: 0,
        })
        .collect();
    let quiver = Quiver::new(r, vec![vec![0; r]], arrows);
    let kind = match chirality {
        Chirality::X => RelKind::SerreX,
        Chirality::Y => RelKind::SerreY,
    };
    let mut relations = vec![];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                relations.push(Relation {
                    kind,
                    i,
                    j,
                    vertex: 0,
                    poly: serre_relation(c, i, j, chirality).expect("indices are distinct and in range"),
                });
            }
        }
    }
    let precedence = (0..r).map(|i| chirality.gen(i)).collect();
    Presentation {
        quiver,
        relations,
        window: None,
        q: QMode::Generic,
        precedence,
        label: format!("U({})-{:?}", c.label, chirality),
    }
}

/// The algebra generated by the `x_i` subject to the quantum Serre relations.
pub fn un_presentation(c: &CartanDatum) -> Presentation {
    serre_algebra(c, Chirality::X)
}

/// All weights of the box `[−N, N]^r` in lexicographic order.
pub fn box_weights(rank: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|w| {
                (-radius..=radius).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Weight-window presentation with the default precedence.
pub fn instantiate_window(p: &Params, radius: i64, margin: i64) -> Result<WindowedQuiver> {
    instantiate_window_with(p, radius, margin, &default_precedence(p.rank()))
}

/// Weight-window presentation; arrow ids follow `precedence`, then source vertex.
pub fn instantiate_window_with(p: &Params, radius: i64, margin: i64, precedence: &[Gen]) -> Result<WindowedQuiver> {
    let c = &p.cartan;
    let r = c.rank();
    check_precedence(r, precedence)?;
    if margin < 0 || radius < margin {
        return Err(Error::WindowTooSmall(format!(
            "need N ≥ m ≥ 0, got N = {radius}, m = {margin}"
        )));
    }
    let vertices = box_weights(r, radius);
    let index: HashMap<Vec<i64>, u32> = vertices.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
    let mut arrows = vec![];
    for g in precedence {
        for (v, w) in vertices.iter().enumerate() {
            let mut t = w.clone();
            t[g.index()] += g.sign();
            if let Some(&tv) = index.get(&t) {
                arrows.push(Arrow {
                    gen: *g,
                    src: v as u32,
                    tgt: tv,
                });
            }
        }
    }
    let quiver = Quiver::new(r, vertices, arrows);
    let mut relations = vec![];
    let serre: Vec<Vec<Option<Vec<QScalar>>>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { None } else { p.serre_coeffs(i, j).ok() }).collect())
        .collect();
    for v in 0..quiver.vertices.len() as u32 {
        let n = quiver.weight(v).to_vec();
        for i in 0..r {
            for j in 0..r {
                let a = quiver.path_of(v, &[Gen::X(i), Gen::Y(j)]);
                let b = quiver.path_of(v, &[Gen::Y(j), Gen::X(i)]);
                if let (Some(a), Some(b)) = (a, b) {
                    let mut poly = NCPoly::monomial(a, QScalar::one());
                    poly.add_term(b, -QScalar::one());
                    if i == j {
                        poly.add_term(Path::vertex(v), -p.f_at(j, &n)?);
                    }
                    relations.push(Relation {
                        kind: RelKind::Commutator,
                        i,
                        j,
                        vertex: v,
                        poly,
                    });
                }
            }
        }
        for (kind, chir) in [(RelKind::SerreX, Chirality::X), (RelKind::SerreY, Chirality::Y)] {
            for i in 0..r {
                for j in 0..r {
                    let Some(coeffs) = &serre[i][j] else { continue };
                    let paths: Option<Vec<Path>> = serre_words(c, i, j)
                        .iter()
                        .map(|w| {
                            let gens: Vec<Gen> = w.iter().map(|&g| chir.gen(g)).collect();
                            quiver.path_of(v, &gens)
                        })
                        .collect();
                    if let Some(paths) = paths {
                        let mut poly = NCPoly::zero();
                        for (path, coef) in paths.into_iter().zip(coeffs) {
                            poly.add_term(path, coef.clone());
                        }
                        relations.push(Relation {
                            kind,
                            i,
                            j,
                            vertex: v,
                            poly,
                        });
                    }
                }
            }
        }
    }
    Ok(Presentation {
        quiver,
        relations,
        window: Some(WindowInfo { radius, margin }),
        q: p.q.clone(),
        precedence: precedence.to_vec(),
        label: format!("{}-{}-N{}", c.label, p.f.label(), radius),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::build_cartan;

    fn a(s: char, n: usize) -> CartanDatum {
        build_cartan(s, n).unwrap()
    }

    #[test]
    fn serre_a2() {
        let c = a('A', 2);
        let rel = serre_relation(&c, 0, 1, Chirality::X).unwrap();
        let q2 = QScalar::parse("q + q^-1").unwrap();
        let coef = |w: Vec<u32>| rel.terms.get(&Path { src: 0, word: w }).cloned().unwrap();
        assert_eq!(coef(vec![1, 0, 0]), QScalar::one());
        assert_eq!(coef(vec![0, 1, 0]), -q2);
        assert_eq!(coef(vec![0, 0, 1]), QScalar::one());
        let classical = rel.map_coeffs(|x| Ok(QScalar::from_rational(x.specialize(&QPoint::One)?))).unwrap();
        assert_eq!(classical.terms.get(&Path { src: 0, word: vec![0, 1, 0] }), Some(&QScalar::from_int(-2)));
        assert!(matches!(serre_relation(&c, 1, 1, Chirality::X), Err(Error::SerreIndex(1))));
    }

    #[test]
    fn un_presentations() {
        let a1 = un_presentation(&a('A', 1));
        assert_eq!(a1.quiver.arrows.len(), 1);
        assert!(a1.relations.is_empty());
        let a2 = un_presentation(&a('A', 2));
        let degs: Vec<Vec<i64>> = a2.relations.iter().map(|r| a2.quiver.multidegree(r.poly.lead().unwrap().0)).collect();
        assert_eq!(degs, vec![vec![2, 1], vec![1, 2]]);
        let b2 = un_presentation(&a('B', 2));
        let degs: Vec<Vec<i64>> = b2.relations.iter().map(|r| b2.quiver.multidegree(r.poly.lead().unwrap().0)).collect();
        assert_eq!(degs, vec![vec![2, 1], vec![1, 3]]);
    }

    #[test]
    fn f_families() {
        let c = a('A', 1);
        assert_eq!(eval_f(&FSpec::ClassicalLinear, &c, 0, &[3]).unwrap(), QScalar::from_int(6));
        assert_eq!(eval_f(&FSpec::ClassicalLinear, &c, 0, &[0]).unwrap(), QScalar::zero());
        assert_eq!(eval_f(&FSpec::QInteger, &c, 0, &[1]).unwrap(), QScalar::parse("q + q^-1").unwrap());
        let table = FSpec::Table {
            values: BTreeMap::from([(vec![0], vec![QScalar::one()])]),
        };
        assert!(matches!(eval_f(&table, &c, 0, &[1]), Err(Error::TableLookup { .. })));
        assert!(FSpec::QInteger.default_qmode() == QMode::Generic);
        assert!(FSpec::ClassicalLinear.default_qmode() == QMode::At(QPoint::One));
    }

    #[test]
    fn window_counts_a1() {
        let p = Params::new(a('A', 1), FSpec::ClassicalLinear);
        let w = instantiate_window(&p, 2, 1).unwrap();
        assert_eq!(w.quiver.vertices.len(), 5);
        let xs = w.quiver.arrows.iter().filter(|a| matches!(a.gen, Gen::X(_))).count();
        assert_eq!(xs, 4);
        assert_eq!(w.quiver.arrows.len(), 8);
        let at: Vec<Vec<i64>> = w.relations.iter().map(|r| w.quiver.weight(r.vertex).to_vec()).collect();
        assert_eq!(at, vec![vec![-1], vec![0], vec![1]]);
        let w0 = instantiate_window(&p, 0, 0).unwrap();
        assert_eq!((w0.quiver.vertices.len(), w0.quiver.arrows.len(), w0.relations.len()), (1, 0, 0));
        assert!(matches!(instantiate_window(&p, 1, 2), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn commutator_shape() {
        let p = Params::new(a('A', 1), FSpec::ClassicalLinear);
        let w = instantiate_window(&p, 2, 0).unwrap();
        let r = &w.relations[2];
        assert_eq!(w.quiver.weight(r.vertex), &[1]);
        assert_eq!(r.poly.len(), 3);
        assert_eq!(r.poly.terms.get(&Path::vertex(r.vertex)), Some(&QScalar::from_int(-2)));
        let (lead, _) = r.poly.lead().unwrap();
        assert_eq!(w.quiver.gens_of(lead), vec![Gen::X(0), Gen::Y(0)]);
    }

    #[test]
    fn qmode_validation() {
        let bad = ["0", "1", "-1"];
        for b in bad {
            let r = QScalar::parse(b).unwrap().as_rational().unwrap();
            assert!(QMode::At(QPoint::Rational(r)).validate().is_err());
        }
        let ok = QScalar::parse("7/3").unwrap().as_rational().unwrap();
        QMode::At(QPoint::Rational(ok)).validate().unwrap();
    }
}
