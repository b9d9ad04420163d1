//! Finite-dimensional weight-graded modules with operators `x_i`, `y_i`:
//! constructors, exact relation checking, and simplicity certification.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbasis::{groebner, DegreeCap, GBResult};
use crate::linalg::{Echelon, Matrix};
use crate::presentation::{serre_algebra, serre_words, Chirality, Gen, NCPoly, Params, Path, Presentation};
use crate::qfield::QScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    Trivial,
    Simple,
    VermaTruncated,
    Custom,
}

/// Layers at depth ≥ `depth` below `top` are cut; `y` leaving the last layer is not represented.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub top: Vec<i64>,
    pub depth: usize,
}

impl Truncation {
    pub fn depth_of(&self, n: &[i64]) -> i64 {
        self.top.iter().zip(n).map(|(t, x)| t - x).sum()
    }
}

/// `V = ⊕ V(n)` with `x_i: V(n) → V(n+e_i)` and `y_i: V(n) → V(n−e_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModuleFile", into = "ModuleFile")]
pub struct GradedModule {
    pub rank: usize,
    pub label: String,
    pub kind: ModuleKind,
    pub dims: BTreeMap<Vec<i64>, usize>,
    /// Nonzero operator blocks keyed by generator and source weight.
    pub ops: BTreeMap<(Gen, Vec<i64>), Matrix>,
    pub truncation: Option<Truncation>,
}

#[derive(Serialize, Deserialize)]
struct DimEntry {
    weight: Vec<i64>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct OpEntry {
    gen: String,
    weight: Vec<i64>,
    rows: Vec<Vec<QScalar>>,
}

#[derive(Serialize, Deserialize)]
struct ModuleFile {
    rank: usize,
    label: String,
    kind: ModuleKind,
    dims: Vec<DimEntry>,
    ops: Vec<OpEntry>,
    #[serde(default)]
    truncation: Option<Truncation>,
}

impl From<GradedModule> for ModuleFile {
    fn from(m: GradedModule) -> ModuleFile {
        ModuleFile {
            rank: m.rank,
            label: m.label,
            kind: m.kind,
            dims: m.dims.into_iter().map(|(weight, dim)| DimEntry { weight, dim }).collect(),
            ops: m
                .ops
                .into_iter()
                .map(|((g, weight), mat)| OpEntry {
                    gen: g.to_string(),
                    weight,
                    rows: mat.to_rows(),
                })
                .collect(),
            truncation: m.truncation,
        }
    }
}

fn parse_gen(s: &str) -> Result<Gen> {
    let bad = || Error::Parse(format!("bad generator {s:?}"));
    if s.len() < 2 {
        return Err(bad());
    }
    let (c, i) = s.split_at(1);
    let i: usize = i.parse().map_err(|_| bad())?;
    if i == 0 {
        return Err(bad());
    }
    match c {
        "x" => Ok(Gen::X(i - 1)),
        "y" => Ok(Gen::Y(i - 1)),
        _ => Err(bad()),
    }
}

impl TryFrom<ModuleFile> for GradedModule {
    type Error = Error;

    fn try_from(f: ModuleFile) -> Result<GradedModule> {
        let mut m = GradedModule::empty(f.rank, &f.label, f.kind);
        for d in f.dims {
            if d.weight.len() != f.rank {
                return Err(Error::Parse(format!("weight {:?} has the wrong length", d.weight)));
            }
            if d.dim > 0 {
                m.dims.insert(d.weight, d.dim);
            }
        }
        for op in f.ops {
            let g = parse_gen(&op.gen)?;
            if g.index() >= f.rank {
                return Err(Error::IndexOutOfRange {
                    index: g.index(),
                    rank: f.rank,
                });
            }
            let src = m.dim(&op.weight);
            let tgt = m.dim(&m.shift(g, &op.weight));
            if op.rows.len() != tgt || op.rows.iter().any(|r| r.len() != src) {
                return Err(Error::Parse(format!(
                    "operator {} at {:?} must be {}x{}",
                    op.gen, op.weight, tgt, src
                )));
            }
            m.set_op(g, &op.weight, Matrix::from_rows(op.rows, src));
        }
        m.truncation = f.truncation;
        Ok(m)
    }
}

impl GradedModule {
    pub fn empty(rank: usize, label: &str, kind: ModuleKind) -> GradedModule {
        GradedModule {
            rank,
            label: label.to_string(),
            kind,
            dims: BTreeMap::new(),
            ops: BTreeMap::new(),
            truncation: None,
        }
    }

    pub fn dim(&self, n: &[i64]) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.dims.keys().cloned().collect()
    }

    pub fn shift(&self, g: Gen, n: &[i64]) -> Vec<i64> {
        let mut t = n.to_vec();
        t[g.index()] += g.sign();
        t
    }

    /// Operator block `V(n) → V(n ± e_i)`; zero of the right shape when absent.
    pub fn op(&self, g: Gen, n: &[i64]) -> Matrix {
        match self.ops.get(&(g, n.to_vec())) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.dim(&self.shift(g, n)), self.dim(n)),
        }
    }

    pub fn set_op(&mut self, g: Gen, n: &[i64], m: Matrix) {
        if m.rows == 0 || m.cols == 0 || m.is_zero() {
            self.ops.remove(&(g, n.to_vec()));
        } else {
            self.ops.insert((g, n.to_vec()), m);
        }
    }

    /// Operator of a generator word (operator order) starting at `n`, and its target.
    pub fn word_op(&self, gens: &[Gen], n: &[i64]) -> (Matrix, Vec<i64>) {
        let mut cur = n.to_vec();
        let mut acc = Matrix::identity(self.dim(n));
        for g in gens.iter().rev() {
            let m = self.op(*g, &cur);
            acc = m.mul(&acc);
            cur = self.shift(*g, &cur);
        }
        (acc, cur)
    }

    pub fn specialize(&self, q: &crate::presentation::QMode) -> Result<GradedModule> {
        let mut out = self.clone();
        for m in out.ops.values_mut() {
            for x in m.data.iter_mut() {
                *x = q.apply(x)?;
            }
        }
        out.ops.retain(|_, m| !m.is_zero());
        Ok(out)
    }

    pub fn direct_sum(&self, other: &GradedModule) -> GradedModule {
        let mut out = GradedModule::empty(self.rank, &format!("{}+{}", self.label, other.label), ModuleKind::Custom);
        let weights: BTreeSet<Vec<i64>> = self.dims.keys().chain(other.dims.keys()).cloned().collect();
        for n in &weights {
            out.dims.insert(n.clone(), self.dim(n) + other.dim(n));
        }
        for n in &weights {
            for i in 0..self.rank {
                for g in [Gen::X(i), Gen::Y(i)] {
                    let a = self.op(g, n);
                    let b = other.op(g, n);
                    let t = out.shift(g, n);
                    let mut m = Matrix::zeros(out.dim(&t), out.dim(n));
                    for r in 0..a.rows {
                        for c in 0..a.cols {
                            m.set(r, c, a.get(r, c).clone());
                        }
                    }
                    for r in 0..b.rows {
                        for c in 0..b.cols {
                            m.set(a.rows + r, a.cols + c, b.get(r, c).clone());
                        }
                    }
                    out.set_op(g, n, m);
                }
            }
        }
        out
    }

    /// True at weights whose relations are unaffected by the truncation cut.
    fn is_reliable(&self, n: &[i64]) -> bool {
        match &self.truncation {
            None => true,
            Some(t) => t.depth_of(n) < t.depth as i64,
        }
    }

    /// Largest `r` with every support weight at distance ≥ `r` from the boundary of `[−N,N]^rank`.
    pub fn boundary_distance(&self, radius: i64) -> i64 {
        self.dims
            .keys()
            .flat_map(|n| n.iter().map(move |&x| radius - x.abs()))
            .min()
            .unwrap_or(radius)
    }
}

fn pole_to_singular(e: Error) -> Error {
    match e {
        Error::Pole { point } => Error::SingularParameter(format!("f has a pole at q = {point}")),
        other => other,
    }
}

/// One-dimensional module at `n0` with all operators zero.
pub fn trivial_module(p: &Params, n0: &[i64]) -> Result<GradedModule> {
    check_weight(p, n0)?;
    for j in 0..p.rank() {
        let v = p.f_at(j, n0).map_err(pole_to_singular)?;
        if !v.is_zero() {
            return Err(Error::NotTrivial {
                weight: n0.to_vec(),
                j: j + 1,
                value: v.to_string(),
            });
        }
    }
    let mut m = GradedModule::empty(p.rank(), &format!("trivial{n0:?}"), ModuleKind::Trivial);
    m.dims.insert(n0.to_vec(), 1);
    Ok(m)
}

fn check_weight(p: &Params, n0: &[i64]) -> Result<()> {
    if n0.len() != p.rank() {
        return Err(Error::Config {
            field: "weight".into(),
            reason: format!("weight {:?} must have {} coordinates", n0, p.rank()),
        });
    }
    Ok(())
}

/// Layered Verma-type module generated by `v0` at `n0` with `x_i v0 = 0`.
/// Layer `k` has basis the normal y-words of length `k`, in increasing word order.
struct VermaLayers {
    params: Params,
    top: Vec<i64>,
    ypres: Presentation,
    gb: GBResult,
    /// `basis[k]` lists normal words of length `k`.
    basis: Vec<Vec<Path>>,
    /// Weight of each basis word; index within its weight space.
    weight_of: Vec<Vec<(Vec<i64>, usize)>>,
    /// Per weight, the words spanning it.
    spaces: BTreeMap<Vec<i64>, Vec<Path>>,
    /// `x_i` on each basis word, as a map word → coefficient in the layer above.
    xact: BTreeMap<(usize, Path), NCPoly>,
}

impl VermaLayers {
    fn new(params: &Params, top: &[i64], max_depth: usize) -> Result<VermaLayers> {
        let c = &params.cartan;
        let ypres = serre_algebra(c, Chirality::Y).specialize(&params.q)?;
        let gb = groebner(&ypres, DegreeCap::len(max_depth + 1))?;
        let mut me = VermaLayers {
            params: params.clone(),
            top: top.to_vec(),
            ypres,
            gb,
            basis: vec![],
            weight_of: vec![],
            spaces: BTreeMap::new(),
            xact: BTreeMap::new(),
        };
        me.push_layer()?;
        Ok(me)
    }

    fn weight(&self, w: &Path) -> Vec<i64> {
        let deg = self.ypres.quiver.multidegree(w);
        self.top.iter().zip(&deg).map(|(t, d)| t + d).collect()
    }

    fn depth(&self) -> usize {
        self.basis.len() - 1
    }

    /// `y_j · w` in normal-word coordinates.
    fn y_mul(&self, j: usize, w: &Path) -> NCPoly {
        let mut word = vec![j as u32];
        word.extend_from_slice(&w.word);
        self.gb.reduce(&NCPoly::monomial(Path { src: 0, word }, QScalar::one()))
    }

    fn push_layer(&mut self) -> Result<()> {
        let k = self.basis.len();
        let words: Vec<Path> = if k == 0 {
            vec![Path::vertex(0)]
        } else {
            let r = self.params.rank();
            let mut set = BTreeSet::new();
            for w in &self.basis[k - 1] {
                for j in 0..r {
                    let mut word = vec![j as u32];
                    word.extend_from_slice(&w.word);
                    if self.gb.is_normal(&word) {
                        set.insert(Path { src: 0, word });
                    }
                }
            }
            set.into_iter().collect()
        };
        let mut wof = vec![];
        for w in &words {
            let n = self.weight(w);
            let list = self.spaces.entry(n.clone()).or_default();
            list.push(w.clone());
            wof.push((n, list.len() - 1));
        }
        // x-action by commutation: x_i (y_j w') = y_j (x_i w') + δ_ij f_j(wt w') w'
        for w in &words {
            for i in 0..self.params.rank() {
                let val = if w.is_empty() {
                    NCPoly::zero()
                } else {
                    let j = w.word[0] as usize;
                    let rest = Path {
                        src: 0,
                        word: w.word[1..].to_vec(),
                    };
                    let inner = self.xact[&(i, rest.clone())].clone();
                    let mut acc = NCPoly::zero();
                    for (u, cu) in &inner.terms {
                        acc = acc.add(&self.y_mul(j, u).scale(cu));
                    }
                    if i == j {
                        let f = self.params.f_at(j, &self.weight(&rest)).map_err(pole_to_singular)?;
                        acc.add_term(rest, f);
                    }
                    acc
                };
                self.xact.insert((i, w.clone()), val);
            }
        }
        self.basis.push(words);
        self.weight_of.push(wof);
        Ok(())
    }

    fn coords(&self, n: &[i64], p: &NCPoly) -> Vec<QScalar> {
        let space = &self.spaces[n];
        let mut v = vec![QScalar::zero(); space.len()];
        for (w, c) in &p.terms {
            let idx = space.iter().position(|s| s == w).expect("normal word lies in its weight space");
            v[idx] = c.clone();
        }
        v
    }

    /// Weights of layer `k`.
    fn layer_weights(&self, k: usize) -> BTreeSet<Vec<i64>> {
        self.weight_of[k].iter().map(|(n, _)| n.clone()).collect()
    }

    /// Matrix of `x_i` from weight `n`.
    fn x_matrix(&self, i: usize, n: &[i64]) -> Matrix {
        let src = &self.spaces[n];
        let mut t = n.to_vec();
        t[i] += 1;
        let rows = self.spaces.get(&t).map(|s| s.len()).unwrap_or(0);
        let mut m = Matrix::zeros(rows, src.len());
        for (c, w) in src.iter().enumerate() {
            let v = &self.xact[&(i, w.clone())];
            if v.is_zero() {
                continue;
            }
            for (r, x) in self.coords(&t, v).into_iter().enumerate() {
                m.set(r, c, x);
            }
        }
        m
    }

    /// Matrix of `y_j` from weight `n` into the next layer (which must exist).
    fn y_matrix(&self, j: usize, n: &[i64]) -> Matrix {
        let src = &self.spaces[n];
        let mut t = n.to_vec();
        t[j] -= 1;
        let rows = self.spaces.get(&t).map(|s| s.len()).unwrap_or(0);
        let mut m = Matrix::zeros(rows, src.len());
        for (c, w) in src.iter().enumerate() {
            let v = self.y_mul(j, w);
            for (r, x) in self.coords(&t, &v).into_iter().enumerate() {
                m.set(r, c, x);
            }
        }
        m
    }

    fn into_module(self, label: &str, kind: ModuleKind, truncated: bool) -> GradedModule {
        let r = self.params.rank();
        let depth = self.depth();
        let mut m = GradedModule::empty(r, label, kind);
        for (n, s) in &self.spaces {
            m.dims.insert(n.clone(), s.len());
        }
        for k in 0..=depth {
            for n in self.layer_weights(k) {
                for i in 0..r {
                    if k > 0 {
                        m.set_op(Gen::X(i), &n, self.x_matrix(i, &n));
                    }
                    if k < depth {
                        m.set_op(Gen::Y(i), &n, self.y_matrix(i, &n));
                    }
                }
            }
        }
        if truncated {
            m.truncation = Some(Truncation {
                top: self.top.clone(),
                depth,
            });
        }
        m
    }
}

/// Verma-type module generated at `n0`, cut below `depth`.
pub fn truncated_verma(p: &Params, n0: &[i64], depth: usize) -> Result<GradedModule> {
    check_weight(p, n0)?;
    let mut v = VermaLayers::new(p, n0, depth)?;
    for _ in 0..depth {
        v.push_layer()?;
    }
    Ok(v.into_module(&format!("verma{n0:?}/{depth}"), ModuleKind::VermaTruncated, true))
}

/// Finite-dimensional simple quotient of the Verma-type module at `n0`.
pub fn build_simple(p: &Params, n0: &[i64], depth_cap: usize) -> Result<GradedModule> {
    check_weight(p, n0)?;
    let r = p.rank();
    let mut v = VermaLayers::new(p, n0, depth_cap)?;
    // radical[n]: vectors u with x-images inside the radical one layer up
    let mut radical: BTreeMap<Vec<i64>, Echelon> = BTreeMap::new();
    let mut closed = false;
    for k in 0..=depth_cap {
        if k > 0 {
            v.push_layer()?;
        }
        let mut layer_quotient = 0;
        for n in v.layer_weights(k) {
            let dim = v.spaces[&n].len();
            let mut ech = Echelon::empty(dim);
            if k > 0 {
                // rows: conditions x_i u ∈ J(n + e_i), expressed modulo that subspace
                let mut conds = Echelon::empty(dim);
                for i in 0..r {
                    let mut t = n.clone();
                    t[i] += 1;
                    let Some(jt) = radical.get(&t) else { continue };
                    let xm = v.x_matrix(i, &n);
                    let free = jt.free_columns();
                    // u ↦ quotient coordinates of x_i u
                    for fr in 0..free.len() {
                        let mut row = vec![QScalar::zero(); dim];
                        for c in 0..dim {
                            let mut col: Vec<QScalar> = (0..xm.rows).map(|rr| xm.get(rr, c).clone()).collect();
                            jt.reduce(&mut col);
                            row[c] = col[free[fr]].clone();
                        }
                        conds.insert(row);
                    }
                }
                for basis_vec in conds.nullspace() {
                    ech.insert(basis_vec);
                }
            }
            layer_quotient += dim - ech.rank();
            radical.insert(n, ech);
        }
        if layer_quotient == 0 {
            closed = true;
            break;
        }
    }
    if !closed {
        return Err(Error::NonTermination { depth_cap });
    }
    // quotient basis: free columns of each radical echelon form
    let mut m = GradedModule::empty(r, &format!("simple{n0:?}"), ModuleKind::Simple);
    let mut keep: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (n, ech) in &radical {
        let free = ech.free_columns();
        if !free.is_empty() {
            m.dims.insert(n.clone(), free.len());
            keep.insert(n.clone(), free);
        }
    }
    let project = |n: &[i64], col: Vec<QScalar>| -> Vec<QScalar> {
        match radical.get(n) {
            Some(e) => e.quotient_coords(&col),
            None => vec![],
        }
    };
    for (n, free) in &keep {
        for i in 0..r {
            for g in [Gen::X(i), Gen::Y(i)] {
                let t = m.shift(g, n);
                let tdim = m.dim(&t);
                if tdim == 0 {
                    continue;
                }
                let full = match g {
                    Gen::X(_) => v.x_matrix(i, n),
                    Gen::Y(_) => v.y_matrix(i, n),
                };
                let mut out = Matrix::zeros(tdim, free.len());
                for (c, &fc) in free.iter().enumerate() {
                    let col: Vec<QScalar> = (0..full.rows).map(|rr| full.get(rr, fc).clone()).collect();
                    for (rr, x) in project(&t, col).into_iter().enumerate() {
                        out.set(rr, c, x);
                    }
                }
                m.set_op(g, n, out);
            }
        }
    }
    if let RelationCheck::Fail { relation, weight, .. } = check_relations(p, &m) {
        return Err(Error::InconsistentParameters { relation, weight });
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RelationCheck {
    Pass,
    Fail {
        relation: String,
        weight: Vec<i64>,
        residual: Vec<Vec<QScalar>>,
    },
}

impl RelationCheck {
    pub fn passed(&self) -> bool {
        matches!(self, RelationCheck::Pass)
    }
}

fn weights_visited(n: &[i64], gens: &[Gen]) -> Vec<Vec<i64>> {
    let mut cur = n.to_vec();
    let mut out = vec![cur.clone()];
    for g in gens.iter().rev() {
        cur[g.index()] += g.sign();
        out.push(cur.clone());
    }
    out
}

/// Exact check of the commutator and both Serre families at every support weight.
pub fn check_relations(p: &Params, m: &GradedModule) -> RelationCheck {
    let r = p.rank();
    // operator blocks must join support weights and have matching shapes
    for ((g, n), mat) in &m.ops {
        let t = m.shift(*g, n);
        if mat.cols != m.dim(n) || mat.rows != m.dim(&t) {
            return RelationCheck::Fail {
                relation: format!("grading({g})"),
                weight: n.clone(),
                residual: vec![],
            };
        }
    }
    let fail = |name: String, n: &Vec<i64>, res: Matrix| RelationCheck::Fail {
        relation: name,
        weight: n.clone(),
        residual: res.to_rows(),
    };
    for n in m.dims.keys() {
        for i in 0..r {
            for j in 0..r {
                let terms = [vec![Gen::X(i), Gen::Y(j)], vec![Gen::Y(j), Gen::X(i)]];
                if !terms.iter().all(|t| weights_visited(n, t).iter().all(|w| m.is_reliable(w))) {
                    continue;
                }
                let (a, _) = m.word_op(&terms[0], n);
                let (b, _) = m.word_op(&terms[1], n);
                let mut res = a.sub(&b);
                if i == j {
                    let f = match p.f_at(j, n) {
                        Ok(f) => f,
                        Err(_) => {
                            return fail(format!("comm({},{})", i + 1, j + 1), n, Matrix::zeros(0, 0));
                        }
                    };
                    res = res.sub(&Matrix::identity(m.dim(n)).scale(&f));
                }
                if !res.is_zero() {
                    return fail(format!("comm({},{})", i + 1, j + 1), n, res);
                }
            }
        }
        for chir in [Chirality::X, Chirality::Y] {
            for i in 0..r {
                for j in 0..r {
                    if i == j {
                        continue;
                    }
                    let coeffs = p.serre_coeffs(i, j).expect("distinct indices");
                    let words: Vec<Vec<Gen>> = serre_words(&p.cartan, i, j)
                        .into_iter()
                        .map(|w| w.into_iter().map(|g| chir.gen(g)).collect())
                        .collect();
                    if !words.iter().all(|w| weights_visited(n, w).iter().all(|x| m.is_reliable(x))) {
                        continue;
                    }
                    let mut acc: Option<Matrix> = None;
                    for (w, c) in words.iter().zip(&coeffs) {
                        let (op, _) = m.word_op(w, n);
                        let term = op.scale(c);
                        acc = Some(match acc {
                            None => term,
                            Some(a) => a.add(&term),
                        });
                    }
                    let acc = acc.unwrap();
                    if !acc.is_zero() {
                        let name = match chir {
                            Chirality::X => "serre-x",
                            Chirality::Y => "serre-y",
                        };
                        return fail(format!("{name}({},{})", i + 1, j + 1), n, acc);
                    }
                }
            }
        }
    }
    RelationCheck::Pass
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SimpleVerdict {
    Simple,
    Reducible { weight: Vec<i64>, submodule_dim: usize },
    Inconclusive { reason: String },
}

impl SimpleVerdict {
    pub fn is_simple(&self) -> bool {
        matches!(self, SimpleVerdict::Simple)
    }
}

/// Submodule generated by `v` at weight `n`: per-weight echelon forms.
fn closure(m: &GradedModule, n: &[i64], v: Vec<QScalar>) -> BTreeMap<Vec<i64>, Echelon> {
    let mut spaces: BTreeMap<Vec<i64>, Echelon> = BTreeMap::new();
    let mut stack = vec![(n.to_vec(), v)];
    while let Some((w, vec)) = stack.pop() {
        let e = spaces.entry(w.clone()).or_insert_with(|| Echelon::empty(m.dim(&w)));
        let mut red = vec.clone();
        e.reduce(&mut red);
        if red.iter().all(|x| x.is_zero()) {
            continue;
        }
        e.insert(vec.clone());
        for i in 0..m.rank {
            for g in [Gen::X(i), Gen::Y(i)] {
                let t = m.shift(g, &w);
                if m.dim(&t) == 0 {
                    continue;
                }
                let img = m.op(g, &w).mul_vec(&vec);
                if img.iter().any(|x| !x.is_zero()) {
                    stack.push((t, img));
                }
            }
        }
    }
    spaces
}

/// Operator spaces `O(n → m)` spanned by all path operators from `n`, flattened row-major.
fn path_operator_spaces(m: &GradedModule, n: &[i64]) -> BTreeMap<Vec<i64>, Echelon> {
    let mut spaces: BTreeMap<Vec<i64>, Echelon> = BTreeMap::new();
    let d = m.dim(n);
    let mut stack = vec![(n.to_vec(), Matrix::identity(d))];
    while let Some((w, op)) = stack.pop() {
        let e = spaces.entry(w.clone()).or_insert_with(|| Echelon::empty(m.dim(&w) * d));
        if !e.insert(op.data.clone()) {
            continue;
        }
        for i in 0..m.rank {
            for g in [Gen::X(i), Gen::Y(i)] {
                let t = m.shift(g, &w);
                if m.dim(&t) == 0 {
                    continue;
                }
                let next = m.op(g, &w).mul(&op);
                if !next.is_zero() {
                    stack.push((t, next));
                }
            }
        }
    }
    spaces
}

/// Simplicity: `O(n→n) = End V(n)` and `O(n→m) V(n) = V(m)` for all support weights certify
/// simplicity; a proper closure of a sampled or basis vector certifies reducibility.
pub fn is_simple(_p: &Params, m: &GradedModule, seed: u64) -> SimpleVerdict {
    let total = m.total_dim();
    if total == 0 {
        return SimpleVerdict::Inconclusive {
            reason: "zero module".into(),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in m.dims.keys() {
        let d = m.dim(n);
        let mut candidates: Vec<Vec<QScalar>> = (0..d)
            .map(|k| (0..d).map(|l| if l == k { QScalar::one() } else { QScalar::zero() }).collect())
            .collect();
        for _ in 0..2 {
            candidates.push((0..d).map(|_| QScalar::from_int(rng.random_range(-5..=5))).collect());
        }
        for v in candidates {
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            let sub: usize = closure(m, n, v).values().map(|e| e.rank()).sum();
            if sub < total {
                return SimpleVerdict::Reducible {
                    weight: n.clone(),
                    submodule_dim: sub,
                };
            }
        }
    }
    for n in m.dims.keys() {
        let d = m.dim(n);
        let spaces = path_operator_spaces(m, n);
        if spaces.get(n).map(|e| e.rank()).unwrap_or(0) != d * d {
            return SimpleVerdict::Inconclusive {
                reason: format!("loop operators at {n:?} do not span the full endomorphism algebra"),
            };
        }
        for (t, dt) in &m.dims {
            let Some(e) = spaces.get(t) else {
                return SimpleVerdict::Inconclusive {
                    reason: format!("no path operators from {n:?} to {t:?}"),
                };
            };
            let mut image = Echelon::empty(*dt);
            for row in &e.rows {
                let op = Matrix {
                    rows: *dt,
                    cols: d,
                    data: row.clone(),
                };
                for c in 0..d {
                    image.insert((0..*dt).map(|r| op.get(r, c).clone()).collect());
                }
            }
            if image.rank() != *dt {
                return SimpleVerdict::Inconclusive {
                    reason: format!("path operators from {n:?} do not fill {t:?}"),
                };
            }
        }
    }
    SimpleVerdict::Simple
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{FSpec, QMode};
    use crate::qfield::QPoint;
    use crate::rootdata::build_cartan;

    fn classical(s: char, n: usize) -> Params {
        Params::new(build_cartan(s, n).unwrap(), FSpec::ClassicalLinear)
    }

    #[test]
    fn trivial_modules() {
        let p = classical('A', 1);
        let t = trivial_module(&p, &[0]).unwrap();
        assert!(check_relations(&p, &t).passed());
        let q = Params::new(build_cartan('A', 1).unwrap(), FSpec::QInteger);
        assert!(trivial_module(&q, &[0]).is_ok());
        let aff = Params::new(
            build_cartan('A', 1).unwrap(),
            FSpec::AffineLinear {
                m: vec![vec![QScalar::zero()]],
                c: vec![QScalar::one()],
            },
        );
        assert!(matches!(trivial_module(&aff, &[0]), Err(Error::NotTrivial { j: 1, .. })));
    }

    #[test]
    fn sl2_three_dim() {
        let p = classical('A', 1);
        let m = build_simple(&p, &[1], 10).unwrap();
        assert_eq!(m.dims, BTreeMap::from([(vec![-1], 1), (vec![0], 1), (vec![1], 1)]));
        assert_eq!(m.op(Gen::Y(0), &[1]).data, vec![QScalar::one()]);
        assert_eq!(m.op(Gen::Y(0), &[0]).data, vec![QScalar::one()]);
        assert_eq!(m.op(Gen::X(0), &[0]).data, vec![QScalar::from_int(2)]);
        assert_eq!(m.op(Gen::X(0), &[-1]).data, vec![QScalar::from_int(2)]);
        assert!(check_relations(&p, &m).passed());
        assert!(is_simple(&p, &m, 1).is_simple());
    }

    #[test]
    fn sl2_quantum_three_dim() {
        let p = Params::new(build_cartan('A', 1).unwrap(), FSpec::QInteger);
        let m = build_simple(&p, &[1], 10).unwrap();
        let two = QScalar::parse("q + q^-1").unwrap();
        assert_eq!(m.op(Gen::X(0), &[0]).data, vec![two.clone()]);
        assert_eq!(m.op(Gen::X(0), &[-1]).data, vec![two]);
        let at_one = m.specialize(&QMode::At(QPoint::One)).unwrap();
        let c = build_simple(&classical('A', 1), &[1], 10).unwrap();
        assert_eq!(at_one.ops, c.ops);
    }

    #[test]
    fn zero_weight_simple_is_trivial() {
        let p = classical('A', 1);
        let m = build_simple(&p, &[0], 4).unwrap();
        assert_eq!(m.total_dim(), 1);
        assert!(m.ops.is_empty());
        assert!(matches!(build_simple(&p, &[-1], 6), Err(Error::NonTermination { depth_cap: 6 })));
    }

    #[test]
    fn perturbed_module_fails() {
        let p = classical('A', 1);
        let mut m = build_simple(&p, &[1], 10).unwrap();
        m.set_op(Gen::X(0), &[0], Matrix::from_rows(vec![vec![QScalar::from_int(3)]], 1));
        match check_relations(&p, &m) {
            RelationCheck::Fail { relation, weight, residual } => {
                assert_eq!(relation, "comm(1,1)");
                assert!(weight == vec![1] || weight == vec![0]);
                assert!(residual.iter().flatten().any(|x| !x.is_zero()));
            }
            RelationCheck::Pass => panic!("perturbation not detected"),
        }
        assert!(check_relations(&p, &GradedModule::empty(1, "zero", ModuleKind::Custom)).passed());
    }

    #[test]
    fn verma_layers() {
        let p = classical('A', 1);
        let v = truncated_verma(&p, &[0], 3).unwrap();
        assert_eq!(v.dims.values().copied().collect::<Vec<_>>(), vec![1, 1, 1, 1]);
        assert!(check_relations(&p, &v).passed());
        let a2 = classical('A', 2);
        let v2 = truncated_verma(&a2, &[0, 0], 2).unwrap();
        assert_eq!(v2.dim(&[-1, -1]), 2);
        assert!(check_relations(&a2, &v2).passed());
        let v0 = truncated_verma(&p, &[0], 0).unwrap();
        assert_eq!(v0.total_dim(), 1);
        assert!(v0.ops.is_empty());
    }

    #[test]
    fn simplicity_verdicts() {
        let p = classical('A', 1);
        let t = trivial_module(&p, &[0]).unwrap();
        let sum = t.direct_sum(&t);
        assert!(matches!(is_simple(&p, &sum, 3), SimpleVerdict::Reducible { .. }));
        let v = truncated_verma(&p, &[1], 5).unwrap();
        assert!(matches!(is_simple(&p, &v, 3), SimpleVerdict::Reducible { .. }));
    }

    #[test]
    fn a2_adjoint_like_simple() {
        let p = classical('A', 2);
        // highest weight α1 + α2 gives the 8-dimensional adjoint module
        let m = build_simple(&p, &[1, 1], 12).unwrap();
        assert_eq!(m.total_dim(), 8);
        assert_eq!(m.dim(&[0, 0]), 2);
        assert!(check_relations(&p, &m).passed());
        assert!(is_simple(&p, &m, 5).is_simple());
    }

    #[test]
    fn module_json_round_trip() {
        let p = classical('A', 1);
        let m = build_simple(&p, &[2], 10).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: GradedModule = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
