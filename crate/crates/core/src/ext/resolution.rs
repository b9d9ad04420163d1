//! Anick-type resolution `Q_n = A ⊗_S kC_n ⊗_S V` of a finite-dimensional module over a
//! windowed path algebra, with a contracting homotopy `s` built from leading-term lifts.
//!
//! Chains grow to the left: `C_0` are the vertices of `supp V`, `C_1` the arrows leaving
//! `supp V`, and `u·c ∈ C_{n+1}` when `u·p` (with `p` the leading piece of `c`) has exactly
//! one tip occurrence, starting at position 0 and ending inside `p`.
//! Elements of `Q_n` are stored as `(w·c, c) ↦ M` with `M: k^cols → V(s(c))`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbasis::GBResult;
use crate::linalg::Matrix;
use crate::modules::GradedModule;
use crate::presentation::{Gen, NCPoly, Path, Presentation, Quiver};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub word: Path,
    /// Length of the leftmost piece.
    pub lead: usize,
}

/// Module operators on window vertices, with a log of where `y` operators were applied.
pub struct ModuleAction<'a> {
    pub module: &'a GradedModule,
    quiver: &'a Quiver,
    cache: HashMap<Path, (Matrix, bool)>,
    pub touched: BTreeSet<Vec<i64>>,
}

impl<'a> ModuleAction<'a> {
    pub fn new(module: &'a GradedModule, quiver: &'a Quiver) -> Result<ModuleAction<'a>> {
        for n in module.dims.keys() {
            if quiver.vertex(n).is_none() {
                return Err(Error::ModuleOutsideWindow(format!(
                    "{} has weight {n:?} outside the window",
                    module.label
                )));
            }
        }
        Ok(ModuleAction {
            module,
            quiver,
            cache: HashMap::new(),
            touched: BTreeSet::new(),
        })
    }

    pub fn dim(&self, v: u32) -> usize {
        self.module.dim(self.quiver.weight(v))
    }

    /// Matrix of a path, `V(src) → V(target)`, flagged when a `y` leaves the truncation
    /// layer while the vector is still nonzero.
    pub fn act_flagged(&mut self, p: &Path) -> (Matrix, bool) {
        if let Some(m) = self.cache.get(p) {
            return m.clone();
        }
        let gens = self.quiver.gens_of(p);
        let src = self.quiver.weight(p.src).to_vec();
        let mut cur = src.clone();
        let mut acc = Matrix::identity(self.module.dim(&src));
        let mut tainted = false;
        self.touched.insert(cur.clone());
        for g in gens.iter().rev() {
            if let (Gen::Y(_), Some(t)) = (g, &self.module.truncation) {
                if t.depth_of(&cur) + 1 >= t.depth as i64 && !acc.is_zero() {
                    tainted = true;
                }
            }
            acc = self.module.op(*g, &cur).mul(&acc);
            cur = self.module.shift(*g, &cur);
            self.touched.insert(cur.clone());
        }
        self.cache.insert(p.clone(), (acc.clone(), tainted));
        (acc, tainted)
    }

    pub fn act(&mut self, p: &Path) -> Matrix {
        self.act_flagged(p).0
    }
}

/// Element of `Q_n`: `(total path w·c, chain index) ↦ matrix`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Elem {
    pub terms: BTreeMap<(Path, usize), Matrix>,
    /// Depends on module data past a truncation layer, on boundary vertices of the
    /// window, or on words beyond the certified length.
    pub tainted: bool,
}

impl Elem {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, key: (Path, usize), m: Matrix) {
        if m.rows == 0 || m.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(x) => {
                *x = x.add(&m);
                if x.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, m);
            }
        }
    }

    pub fn add_elem(&mut self, other: &Elem) {
        self.tainted |= other.tainted;
        for (k, m) in &other.terms {
            self.add(k.clone(), m.clone());
        }
    }

    pub fn sub_elem(&mut self, other: &Elem) {
        self.tainted |= other.tainted;
        for (k, m) in &other.terms {
            self.add(k.clone(), m.scale(&crate::qfield::QScalar::from_int(-1)));
        }
    }

    pub fn right_mul(&self, m: &Matrix) -> Elem {
        let mut out = Elem {
            tainted: self.tainted,
            ..Default::default()
        };
        for (k, x) in &self.terms {
            out.add(k.clone(), x.mul(m));
        }
        out
    }
}

/// `V`-valued element of `Q_{−1}`: vertex ↦ matrix.
pub type VElem = BTreeMap<u32, Matrix>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionStats {
    pub chains_per_level: Vec<usize>,
    pub generators_computed: usize,
    pub homotopy_cache: usize,
    /// Longest word reduced by the Gröbner basis during the run.
    pub max_reduced_len: usize,
    /// Largest distance from `supp V` (sup norm) of any vertex in a reduced word.
    pub reach: i64,
    /// Smallest `N − ‖w‖∞` over vertices of reduced words.
    pub min_boundary_gap: Option<i64>,
}

/// Exactness bookkeeping per homological level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub level: usize,
    pub d_squared_zero: bool,
    pub leading_terms_ok: bool,
    /// Basis elements `w ⊗ c ⊗ v` with `|w| ≤ path_len` on which `ds + sd = id` was verified.
    pub homotopy_checked: usize,
    /// Elements skipped because they reach past a truncation layer.
    pub skipped_tainted: usize,
    pub homotopy_ok: bool,
    pub path_len: usize,
}

pub struct Resolution<'a> {
    pub pres: &'a Presentation,
    pub gb: &'a GBResult,
    pub v: ModuleAction<'a>,
    pub chains: Vec<Vec<Chain>>,
    index: Vec<HashMap<(u32, Vec<u32>), usize>>,
    dgen: Vec<HashMap<usize, Elem>>,
    scache: Vec<HashMap<(Path, usize), Elem>>,
    nf_cache: HashMap<Path, (NCPoly, bool)>,
    pub stats: ResolutionStats,
    support_vertices: Vec<u32>,
}

fn chebyshev(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0)
}

impl<'a> Resolution<'a> {
    /// Enumerates chains through `max_level`.
    pub fn new(pres: &'a Presentation, gb: &'a GBResult, module: &'a GradedModule, max_level: usize) -> Result<Resolution<'a>> {
        let v = ModuleAction::new(module, &pres.quiver)?;
        let q = &pres.quiver;
        let mut support_vertices: Vec<u32> = module.dims.keys().map(|n| q.vertex(n).unwrap()).collect();
        support_vertices.sort();
        let mut chains: Vec<Vec<Chain>> = vec![support_vertices
            .iter()
            .map(|&s| Chain {
                word: Path::vertex(s),
                lead: 0,
            })
            .collect()];
        if max_level >= 1 {
            let set: BTreeSet<u32> = support_vertices.iter().copied().collect();
            chains.push(
                q.arrows
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| set.contains(&a.src))
                    .map(|(id, a)| Chain {
                        word: Path {
                            src: a.src,
                            word: vec![id as u32],
                        },
                        lead: 1,
                    })
                    .collect(),
            );
        }
        // tips indexed by their suffixes
        let mut by_suffix: HashMap<Vec<u32>, Vec<Vec<u32>>> = HashMap::new();
        for t in gb.leading_words() {
            for k in 1..t.word.len() {
                by_suffix.entry(t.word[t.word.len() - k..].to_vec()).or_default().push(t.word.clone());
            }
        }
        let max_tip = gb.max_tip_len();
        for _level in 2..=max_level {
            let prev = chains.last().unwrap();
            let mut next: Vec<Chain> = vec![];
            let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
            for c in prev {
                let p = &c.word.word[..c.lead];
                for k in 1..=p.len() {
                    let Some(tips) = by_suffix.get(&p[..k]) else { continue };
                    for t in tips {
                        let u = &t[..t.len() - k];
                        let mut up: Vec<u32> = u.to_vec();
                        up.extend_from_slice(p);
                        // exactly one tip occurrence in u·p, at position 0
                        let mut count = 0;
                        for a in 0..up.len() {
                            for l in 1..=max_tip.min(up.len() - a) {
                                if gb.tip(&up[a..a + l]).is_some() {
                                    count += 1;
                                }
                            }
                        }
                        if count != 1 {
                            continue;
                        }
                        let mut word = u.to_vec();
                        word.extend_from_slice(&c.word.word);
                        if seen.insert(word.clone()) {
                            next.push(Chain {
                                word: Path { src: c.word.src, word },
                                lead: u.len(),
                            });
                        }
                    }
                }
            }
            next.sort_by(|a, b| a.word.cmp(&b.word));
            chains.push(next);
        }
        let index = chains
            .iter()
            .map(|lvl| {
                lvl.iter()
                    .enumerate()
                    .map(|(i, c)| ((c.word.src, c.word.word.clone()), i))
                    .collect()
            })
            .collect();
        let levels = chains.len();
        let stats = ResolutionStats {
            chains_per_level: chains.iter().map(|l| l.len()).collect(),
            ..Default::default()
        };
        Ok(Resolution {
            pres,
            gb,
            v,
            chains,
            index,
            dgen: vec![HashMap::new(); levels],
            scache: vec![HashMap::new(); levels],
            nf_cache: HashMap::new(),
            stats,
            support_vertices,
        })
    }

    pub fn vertex_chain(&self, v: u32) -> Option<usize> {
        self.index[0].get(&(v, vec![])).copied()
    }

    pub fn max_level(&self) -> usize {
        self.chains.len() - 1
    }

    pub fn quiver(&self) -> &Quiver {
        &self.pres.quiver
    }

    pub fn chain_source(&self, level: usize, c: usize) -> u32 {
        self.chains[level][c].word.src
    }

    pub fn chain_target(&self, level: usize, c: usize) -> u32 {
        self.pres.quiver.target(&self.chains[level][c].word)
    }

    /// Vertex projectives of `Q_n` with multiplicities, keyed by weight.
    pub fn terms(&self, level: usize) -> BTreeMap<Vec<i64>, usize> {
        let mut out = BTreeMap::new();
        for c in 0..self.chains[level].len() {
            let t = self.quiver().weight(self.chain_target(level, c)).to_vec();
            *out.entry(t).or_insert(0) += self.v.dim(self.chain_source(level, c));
        }
        out
    }

    /// True when level `n` has no chains at all, so `Q_m = 0` for every `m ≥ n`.
    pub fn vanishes_from(&self, level: usize) -> bool {
        level < self.chains.len() && self.chains[level].is_empty()
    }

    fn chain_len(&self, level: usize, c: usize) -> usize {
        self.chains[level][c].word.len()
    }

    /// Records reach and returns the smallest boundary gap along `p`.
    fn note_word(&mut self, p: &Path) -> i64 {
        self.stats.max_reduced_len = self.stats.max_reduced_len.max(p.len());
        let q = &self.pres.quiver;
        let radius = self.pres.window.as_ref().map(|w| w.radius).unwrap_or(i64::MAX / 4);
        let mut far = 0;
        let mut gap = i64::MAX;
        let mut cur = p.src;
        let mut vertices = vec![cur];
        for &a in p.word.iter().rev() {
            cur = q.arrows[a as usize].tgt;
            vertices.push(cur);
        }
        for v in vertices {
            let w = q.weight(v);
            gap = gap.min(radius - w.iter().map(|x| x.abs()).max().unwrap_or(0));
            let d = self
                .support_vertices
                .iter()
                .map(|&s| chebyshev(q.weight(s), w))
                .min()
                .unwrap_or(0);
            far = far.max(d);
        }
        self.stats.reach = self.stats.reach.max(far);
        self.stats.min_boundary_gap = Some(self.stats.min_boundary_gap.map_or(gap, |g| g.min(gap)));
        gap
    }

    /// Normal form, flagged when the word or its reduct touches the window boundary or
    /// exceeds the certified length of a partial basis.
    fn normal_form(&mut self, p: &Path) -> (NCPoly, bool) {
        if let Some(x) = self.nf_cache.get(p) {
            return x.clone();
        }
        let mut gap = self.note_word(p);
        let out = self.gb.reduce(&NCPoly::monomial(p.clone(), crate::qfield::QScalar::one()));
        for t in out.terms.keys() {
            gap = gap.min(self.note_word(t));
        }
        let bad = gap < 1 || (!self.gb.complete && p.len() > self.gb.certified_len);
        self.nf_cache.insert(p.clone(), (out.clone(), bad));
        (out, bad)
    }

    /// Path part `w` of a key `(w·c, c)`.
    pub fn path_part(&self, level: usize, key: &(Path, usize)) -> Path {
        let clen = self.chain_len(level, key.1);
        let total = &key.0;
        Path {
            src: self.chain_target(level, key.1),
            word: total.word[..total.len() - clen].to_vec(),
        }
    }

    pub fn key_of(&self, level: usize, w: &Path, c: usize) -> (Path, usize) {
        let ch = &self.chains[level][c].word;
        let mut word = w.word.clone();
        word.extend_from_slice(&ch.word);
        (Path { src: ch.src, word }, c)
    }

    /// `w · x` for `x ∈ Q_level`, reducing products to normal form.
    pub fn left_mul(&mut self, level: usize, w: &Path, x: &Elem) -> Elem {
        let mut out = Elem {
            tainted: x.tainted,
            ..Default::default()
        };
        for (key, m) in &x.terms {
            let u = self.path_part(level, key);
            let mut word = w.word.clone();
            word.extend_from_slice(&u.word);
            let prod = Path { src: u.src, word };
            let nf = if w.is_empty() {
                NCPoly::monomial(prod, crate::qfield::QScalar::one())
            } else {
                let (nf, bad) = self.normal_form(&prod);
                out.tainted |= bad;
                nf
            };
            for (p, coef) in &nf.terms {
                let k = self.key_of(level, p, key.1);
                out.add(k, m.scale(coef));
            }
        }
        out
    }

    /// `d_0: Q_0 → V`.
    pub fn d0(&mut self, x: &Elem) -> (VElem, bool) {
        let mut out: VElem = BTreeMap::new();
        let mut tainted = x.tainted;
        for (key, m) in &x.terms {
            let w = self.path_part(0, key);
            let t = self.pres.quiver.target(&w);
            let (op, bad) = self.v.act_flagged(&w);
            let img = op.mul(m);
            tainted |= bad && !img.is_zero();
            if img.rows == 0 || img.is_zero() {
                continue;
            }
            match out.get_mut(&t) {
                Some(acc) => *acc = acc.add(&img),
                None => {
                    out.insert(t, img);
                }
            }
        }
        out.retain(|_, m| !m.is_zero());
        (out, tainted)
    }

    /// `s_{−1}(v) = 1 ⊗ e ⊗ v`.
    pub fn s_minus(&self, y: &VElem, tainted: bool) -> Elem {
        let mut out = Elem {
            tainted,
            ..Default::default()
        };
        for (v, m) in y {
            if let Some(&c) = self.index[0].get(&(*v, vec![])) {
                out.add((Path::vertex(*v), c), m.clone());
            }
        }
        out
    }

    /// `d(1 ⊗ [c] ⊗ ·)` for `c ∈ C_level`, an element of `Q_{level−1}`.
    pub fn dgen(&mut self, level: usize, c: usize) -> Result<Elem> {
        if let Some(x) = self.dgen[level].get(&c) {
            return Ok(x.clone());
        }
        let ch = self.chains[level][c].clone();
        let lead = ch.lead;
        let u = Path {
            src: 0,
            word: ch.word.word[..lead].to_vec(),
        };
        let rest_word = Path {
            src: ch.word.src,
            word: ch.word.word[lead..].to_vec(),
        };
        let below = if level == 1 {
            self.index[0][&(ch.word.src, vec![])]
        } else {
            *self.index[level - 1]
                .get(&(rest_word.src, rest_word.word.clone()))
                .ok_or_else(|| Error::ResolutionInvariant(format!("chain tail missing at level {level}")))?
        };
        let dim = self.v.dim(ch.word.src);
        let mut y = Elem::default();
        let u_path = Path {
            src: self.chain_target(level - 1, below),
            word: u.word,
        };
        let key = self.key_of(level - 1, &u_path, below);
        y.terms.insert(key.clone(), Matrix::identity(dim));
        let correction = self.s_after_d(level - 1, &y)?;
        let mut z = y;
        z.sub_elem(&correction);
        match z.terms.iter().next_back() {
            Some((k, m)) if *k == key && *m == Matrix::identity(dim) => {}
            _ if z.tainted => {}
            _ => {
                return Err(Error::ResolutionInvariant(format!(
                    "leading term of d(c) is not u ⊗ [c'] at level {level}"
                )))
            }
        }
        self.stats.generators_computed += 1;
        self.dgen[level].insert(c, z.clone());
        Ok(z)
    }

    /// `s_{n−1}(d_n(y))` for `y ∈ Q_n`, landing in `Q_n`.
    fn s_after_d(&mut self, level: usize, y: &Elem) -> Result<Elem> {
        if level == 0 {
            let (dy, t) = self.d0(y);
            Ok(self.s_minus(&dy, t))
        } else {
            let dy = self.d(level, y)?;
            self.s(level - 1, &dy)
        }
    }

    /// `d_n: Q_n → Q_{n−1}` for `n ≥ 1`.
    pub fn d(&mut self, level: usize, x: &Elem) -> Result<Elem> {
        let mut out = Elem {
            tainted: x.tainted,
            ..Default::default()
        };
        for (key, m) in &x.terms {
            let w = self.path_part(level, key);
            let g = self.dgen(level, key.1)?;
            let prod = self.left_mul(level - 1, &w, &g);
            out.add_elem(&prod.right_mul(m));
        }
        Ok(out)
    }

    /// Contracting homotopy `s_n: Q_n → Q_{n+1}`.
    pub fn s(&mut self, level: usize, x: &Elem) -> Result<Elem> {
        let mut out = Elem {
            tainted: x.tainted,
            ..Default::default()
        };
        for (key, m) in &x.terms {
            let part = self.s_basis(level, key)?;
            out.add_elem(&part.right_mul(m));
        }
        Ok(out)
    }

    fn s_basis(&mut self, level: usize, key: &(Path, usize)) -> Result<Elem> {
        if let Some(x) = self.scache[level].get(key) {
            return Ok(x.clone());
        }
        let dim = self.v.dim(self.chain_source(level, key.1));
        let out = if level == 0 {
            self.fox(key, dim)
        } else {
            if level + 1 > self.max_level() {
                return Err(Error::ResolutionInvariant(format!(
                    "homotopy at level {level} needs chains beyond level {}",
                    self.max_level()
                )));
            }
            let mut y = Elem::default();
            y.terms.insert(key.clone(), Matrix::identity(dim));
            let corr = self.s_after_d(level, &y)?;
            let mut z = y;
            z.sub_elem(&corr);
            self.lift(level, z)?
        };
        self.stats.homotopy_cache += 1;
        self.scache[level].insert(key.clone(), out.clone());
        Ok(out)
    }

    /// `s_0(w ⊗ v) = Σ_j a_1…a_{j−1} ⊗ [a_j] ⊗ a_{j+1}…a_k v`.
    fn fox(&mut self, key: &(Path, usize), dim: usize) -> Elem {
        let w = self.path_part(0, key);
        let q = &self.pres.quiver;
        let mut out = Elem::default();
        let k = w.word.len();
        for j in 0..k {
            let a = w.word[j];
            let tail = Path {
                src: w.src,
                word: w.word[j + 1..].to_vec(),
            };
            let asrc = q.arrows[a as usize].src;
            let Some(&c) = self.index[1].get(&(asrc, vec![a])) else { continue };
            let m = if tail.is_empty() {
                Matrix::identity(dim)
            } else {
                let (op, bad) = self.v.act_flagged(&tail);
                out.tainted |= bad && !op.is_zero();
                op
            };
            let total = Path {
                src: asrc,
                word: w.word[..=j].to_vec(),
            };
            out.add((total, c), m);
        }
        out
    }

    /// Preimage under `d_{level+1}` of a cycle, by repeated leading-term cancellation.
    fn lift(&mut self, level: usize, mut z: Elem) -> Result<Elem> {
        let mut out = Elem::default();
        while let Some((key, m)) = z.terms.iter().next_back().map(|(k, m)| (k.clone(), m.clone())) {
            let w = self.path_part(level, &key);
            let chain_word = self.chains[level][key.1].word.clone();
            let mut found = None;
            for l in 1..=w.len() {
                let mut word = w.word[w.len() - l..].to_vec();
                word.extend_from_slice(&chain_word.word);
                if let Some(&c2) = self.index[level + 1].get(&(chain_word.src, word)) {
                    found = Some((l, c2));
                    break;
                }
            }
            let Some((l, c2)) = found else {
                if z.tainted {
                    out.tainted = true;
                    return Ok(out);
                }
                return Err(Error::ResolutionInvariant(format!(
                    "cycle at level {level} has an unliftable leading term"
                )));
            };
            let c2_target = self.chain_target(level + 1, c2);
            let w_prime = Path {
                src: c2_target,
                word: w.word[..w.len() - l].to_vec(),
            };
            let g = self.dgen(level + 1, c2)?;
            let sub = self.left_mul(level, &w_prime, &g).right_mul(&m);
            z.sub_elem(&sub);
            let k2 = self.key_of(level + 1, &w_prime, c2);
            out.add(k2, m);
            if z.terms.get(&key).is_some() && !z.tainted {
                return Err(Error::ResolutionInvariant(format!(
                    "leading term did not cancel at level {level}"
                )));
            }
            if z.terms.contains_key(&key) {
                out.tainted = true;
                return Ok(out);
            }
        }
        out.tainted |= z.tainted;
        Ok(out)
    }

    /// Normal paths from the target of chain `c`, up to `len`.
    pub fn basis_paths(&self, level: usize, c: usize, len: usize) -> Vec<Path> {
        let t = self.chain_target(level, c);
        self.gb.normal_paths_from(&self.pres.quiver, t, len)
    }

    /// Checks `d∘d = 0` on every computed generator and `ds + sd = id` on basis
    /// elements with paths of length ≤ `path_len`, for levels `0..=top`.
    pub fn certify(&mut self, top: usize, path_len: usize) -> Result<Vec<Certificate>> {
        let mut certs = vec![];
        for level in 0..=top.min(self.max_level().saturating_sub(1)) {
            let mut dd = true;
            for c in 0..self.chains.get(level + 1).map(|l| l.len()).unwrap_or(0) {
                let g = self.dgen(level + 1, c)?;
                if g.tainted {
                    continue;
                }
                let (zero, bad) = if level == 0 {
                    let (v, t) = self.d0(&g);
                    (v.is_empty(), t)
                } else {
                    let e = self.d(level, &g)?;
                    (e.terms.is_empty(), e.tainted)
                };
                dd &= zero || bad;
            }
            let mut checked = 0;
            let mut skipped = 0;
            let mut ok = true;
            for c in 0..self.chains[level].len() {
                let dim = self.v.dim(self.chain_source(level, c));
                for w in self.basis_paths(level, c, path_len) {
                    let key = self.key_of(level, &w, c);
                    let mut y = Elem::default();
                    y.terms.insert(key.clone(), Matrix::identity(dim));
                    let sy = self.s(level, &y)?;
                    let mut back = self.d(level + 1, &sy)?;
                    let sd = self.s_after_d(level, &y)?;
                    back.add_elem(&sd);
                    if back.tainted {
                        skipped += 1;
                        continue;
                    }
                    ok &= back.terms == y.terms;
                    checked += 1;
                }
            }
            certs.push(Certificate {
                level,
                d_squared_zero: dd,
                leading_terms_ok: true,
                homotopy_checked: checked,
                skipped_tainted: skipped,
                homotopy_ok: ok,
                path_len,
            });
        }
        Ok(certs)
    }
}
