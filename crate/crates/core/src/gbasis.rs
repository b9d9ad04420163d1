//! Length-truncated noncommutative Gröbner bases over path algebras.
//!
//! Words compare by length, then lexicographically with smaller arrow ids
//! ranking higher. A result certified through length `D` resolves every
//! overlap of length at most `D`; reductions of words of length at most `D`
//! are then confluent with respect to the elements found.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::rank_fraction_free;
use crate::presentation::{Gen, NCPoly, Path, Presentation, Quiver};
use crate::qfield::QScalar;

pub const DEFAULT_BIT_CEILING: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialOrder {
    pub kind: String,
    pub precedence: Vec<Gen>,
}

impl MonomialOrder {
    pub fn deglex(precedence: &[Gen]) -> MonomialOrder {
        MonomialOrder {
            kind: "deglex".into(),
            precedence: precedence.to_vec(),
        }
    }

    pub fn label(&self) -> String {
        format!(
            "{} {}",
            self.kind,
            self.precedence.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(">")
        )
    }
}

/// Word-length bound for the completion, with the coefficient size ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCap {
    pub max_len: usize,
    pub bit_ceiling: u64,
}

impl DegreeCap {
    pub fn len(max_len: usize) -> DegreeCap {
        DegreeCap {
            max_len,
            bit_ceiling: DEFAULT_BIT_CEILING,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GBResult {
    pub input_hash: String,
    pub order: MonomialOrder,
    pub cap: usize,
    /// Monic, tail-reduced elements sorted by leading path.
    pub elements: Vec<NCPoly>,
    /// Every overlap of length ≤ this value has been resolved.
    pub certified_len: usize,
    /// True when no overlap of any length is pending.
    pub complete: bool,
    pub pending: usize,
    #[serde(skip)]
    tips: HashMap<Vec<u32>, usize>,
    #[serde(skip)]
    max_tip: usize,
}

impl GBResult {
    fn from_parts(
        input_hash: String,
        order: MonomialOrder,
        cap: usize,
        mut elements: Vec<NCPoly>,
        certified_len: usize,
        complete: bool,
        pending: usize,
    ) -> GBResult {
        elements.sort_by(|a, b| a.lead().unwrap().0.cmp(b.lead().unwrap().0));
        let mut g = GBResult {
            input_hash,
            order,
            cap,
            elements,
            certified_len,
            complete,
            pending,
            tips: HashMap::new(),
            max_tip: 0,
        };
        g.reindex();
        g
    }

    fn reindex(&mut self) {
        self.tips = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.lead().unwrap().0.word.clone(), i))
            .collect();
        self.max_tip = self.tips.keys().map(|w| w.len()).max().unwrap_or(0);
    }

    pub fn is_certified(&self, len: usize) -> bool {
        self.complete || len <= self.certified_len
    }

    pub fn leading_words(&self) -> Vec<&Path> {
        self.elements.iter().map(|e| e.lead().unwrap().0).collect()
    }

    pub fn max_tip_len(&self) -> usize {
        self.max_tip
    }

    /// Element whose leading word is exactly `word`.
    pub fn tip(&self, word: &[u32]) -> Option<&NCPoly> {
        self.tips.get(word).map(|&i| &self.elements[i])
    }

    /// Leftmost tip occurrence in `word`: `(start, len, element)`.
    pub fn find_tip(&self, word: &[u32]) -> Option<(usize, usize, usize)> {
        for a in 0..word.len() {
            for l in 1..=self.max_tip.min(word.len() - a) {
                if let Some(&e) = self.tips.get(&word[a..a + l]) {
                    return Some((a, l, e));
                }
            }
        }
        None
    }

    pub fn is_normal(&self, word: &[u32]) -> bool {
        self.find_tip(word).is_none()
    }

    /// Full reduction without certification checks.
    pub fn reduce(&self, p: &NCPoly) -> NCPoly {
        reduce_with(p, |w| self.find_tip(w).map(|(a, l, e)| (a, l, &self.elements[e])))
    }

    /// Unique reduced representative; the input must lie in the certified region.
    pub fn normal_form(&self, x: &NCPoly) -> Result<NCPoly> {
        let len = x.max_len();
        if !self.is_certified(len) {
            return Err(Error::Uncertified {
                requested: len,
                certified: self.certified_len,
            });
        }
        Ok(self.reduce(x))
    }

    /// Normal paths from vertex `v` of length ≤ `max_len`, grown by prepending arrows.
    pub fn normal_paths_from(&self, quiver: &Quiver, v: u32, max_len: usize) -> Vec<Path> {
        let mut out = vec![Path::vertex(v)];
        let mut frontier = vec![Path::vertex(v)];
        for _ in 0..max_len {
            let mut next = vec![];
            for p in &frontier {
                let t = quiver.target(p);
                for (id, a) in quiver.arrows.iter().enumerate() {
                    if a.src != t {
                        continue;
                    }
                    let mut word = Vec::with_capacity(p.len() + 1);
                    word.push(id as u32);
                    word.extend_from_slice(&p.word);
                    let prefix_ok = (1..=self.max_tip.min(word.len())).all(|l| !self.tips.contains_key(&word[..l]));
                    if prefix_ok {
                        next.push(Path { src: v, word });
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Canonical text with a trailing checksum over the body.
    pub fn to_text(&self) -> String {
        let mut body = String::new();
        body.push_str("schurcat.gb v1\n");
        body.push_str(&format!("input {}\n", self.input_hash));
        body.push_str(&format!("order {}\n", self.order.label()));
        body.push_str(&format!("cap {}\n", self.cap));
        body.push_str(&format!("certified {}\n", self.certified_len));
        body.push_str(&format!("complete {}\n", self.complete));
        body.push_str(&format!("pending {}\n", self.pending));
        body.push_str(&format!("elements {}\n", self.elements.len()));
        for e in &self.elements {
            let terms: Vec<String> = e
                .terms
                .iter()
                .rev()
                .map(|(p, c)| {
                    let w: Vec<String> = p.word.iter().map(|a| a.to_string()).collect();
                    format!("{}:{}={}", p.src, w.join("."), c)
                })
                .collect();
            body.push_str(&terms.join(" ; "));
            body.push('\n');
        }
        let sum = hex::encode(Sha256::digest(body.as_bytes()));
        format!("{body}checksum {sum}\n")
    }

    /// Parses [`GBResult::to_text`] output, verifying the checksum.
    pub fn from_text(text: &str) -> Result<GBResult> {
        let bad = |m: &str| Error::Parse(format!("gb text: {m}"));
        let split = text.rfind("checksum ").ok_or_else(|| bad("missing checksum"))?;
        let (body, tail) = text.split_at(split);
        let expected = tail.trim_start_matches("checksum ").trim();
        if hex::encode(Sha256::digest(body.as_bytes())) != expected {
            return Err(bad("checksum mismatch"));
        }
        let mut lines = body.lines();
        if lines.next() != Some("schurcat.gb v1") {
            return Err(bad("unknown header"));
        }
        let mut field = |name: &str| -> Result<String> {
            let l = lines.next().ok_or_else(|| bad("truncated"))?;
            l.strip_prefix(&format!("{name} "))
                .map(|s| s.to_string())
                .ok_or_else(|| bad(&format!("expected field {name}")))
        };
        let input_hash = field("input")?;
        let order_text = field("order")?;
        let cap: usize = field("cap")?.parse().map_err(|_| bad("cap"))?;
        let certified_len: usize = field("certified")?.parse().map_err(|_| bad("certified"))?;
        let complete: bool = field("complete")?.parse().map_err(|_| bad("complete"))?;
        let pending: usize = field("pending")?.parse().map_err(|_| bad("pending"))?;
        let count: usize = field("elements")?.parse().map_err(|_| bad("elements"))?;
        let order = parse_order(&order_text).ok_or_else(|| bad("order"))?;
        let mut elements = Vec::with_capacity(count);
        for _ in 0..count {
            let l = lines.next().ok_or_else(|| bad("truncated element list"))?;
            let mut poly = NCPoly::zero();
            for term in l.split(" ; ") {
                let (path, coef) = term.split_once('=').ok_or_else(|| bad("term"))?;
                let (src, word) = path.split_once(':').ok_or_else(|| bad("path"))?;
                let src: u32 = src.parse().map_err(|_| bad("source"))?;
                let word: Vec<u32> = if word.is_empty() {
                    vec![]
                } else {
                    word.split('.').map(|a| a.parse().map_err(|_| bad("letter"))).collect::<Result<_>>()?
                };
                poly.add_term(Path { src, word }, QScalar::parse(coef)?);
            }
            elements.push(poly);
        }
        Ok(GBResult::from_parts(input_hash, order, cap, elements, certified_len, complete, pending))
    }
}

fn parse_order(s: &str) -> Option<MonomialOrder> {
    let (kind, prec) = s.split_once(' ')?;
    let precedence = prec
        .split('>')
        .map(|g| {
            let (c, i) = g.split_at(1);
            let i: usize = i.parse().ok()?;
            match c {
                "x" => Some(Gen::X(i - 1)),
                "y" => Some(Gen::Y(i - 1)),
                _ => None,
            }
        })
        .collect::<Option<Vec<_>>>()?;
    Some(MonomialOrder {
        kind: kind.into(),
        precedence,
    })
}

/// Reduces `p` top-down; `find` returns `(start, len, monic element)` for a reducible word.
fn reduce_with<'a, F>(p: &NCPoly, find: F) -> NCPoly
where
    F: Fn(&[u32]) -> Option<(usize, usize, &'a NCPoly)>,
{
    let mut p = p.clone();
    let mut cursor: Option<Path> = None;
    loop {
        let next = match &cursor {
            None => p.terms.iter().next_back(),
            Some(k) => p.terms.range(..k.clone()).next_back(),
        };
        let Some((path, coef)) = next else { break };
        let (path, coef) = (path.clone(), coef.clone());
        match find(&path.word) {
            Some((a, l, g)) => {
                let u = &path.word[..a];
                let v = &path.word[a + l..];
                let sub = g.sandwich(u, v, Some(path.src)).scale(&coef);
                p = p.sub(&sub);
                cursor = Some(path);
            }
            None => cursor = Some(path),
        }
    }
    p
}

fn monic(p: NCPoly) -> NCPoly {
    let lc = p.lead().unwrap().1.clone();
    if lc.is_one() {
        return p;
    }
    p.scale(&lc.inv().expect("leading coefficient is nonzero"))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Overlap {
    len: usize,
    seq: u64,
    left: usize,
    right: usize,
    k: usize,
}

struct Engine {
    elems: Vec<Option<NCPoly>>,
    leads: Vec<Path>,
    tips: HashMap<Vec<u32>, usize>,
    prefixes: HashMap<Vec<u32>, Vec<usize>>,
    suffixes: HashMap<Vec<u32>, Vec<usize>>,
    subwords: HashMap<Vec<u32>, Vec<usize>>,
    max_tip: usize,
    queue: BinaryHeap<Reverse<Overlap>>,
    seq: u64,
    bit_ceiling: u64,
}

impl Engine {
    fn new(bit_ceiling: u64) -> Engine {
        Engine {
            elems: vec![],
            leads: vec![],
            tips: HashMap::new(),
            prefixes: HashMap::new(),
            suffixes: HashMap::new(),
            subwords: HashMap::new(),
            max_tip: 0,
            queue: BinaryHeap::new(),
            seq: 0,
            bit_ceiling,
        }
    }

    fn alive(&self, i: usize) -> bool {
        self.elems[i].is_some()
    }

    fn find(&self, word: &[u32]) -> Option<(usize, usize, &NCPoly)> {
        for a in 0..word.len() {
            for l in 1..=self.max_tip.min(word.len() - a) {
                if let Some(&e) = self.tips.get(&word[a..a + l]) {
                    return Some((a, l, self.elems[e].as_ref().unwrap()));
                }
            }
        }
        None
    }

    fn reduce(&self, p: &NCPoly) -> Result<NCPoly> {
        let out = reduce_with(p, |w| self.find(w));
        let bits = out.max_bits();
        if bits > self.bit_ceiling {
            return Err(Error::CoefficientOverflow {
                bits,
                ceiling: self.bit_ceiling,
            });
        }
        Ok(out)
    }

    fn push_overlap(&mut self, left: usize, right: usize, k: usize) {
        let len = self.leads[left].len() + self.leads[right].len() - k;
        self.seq += 1;
        self.queue.push(Reverse(Overlap {
            len,
            seq: self.seq,
            left,
            right,
            k,
        }));
    }

    fn remove(&mut self, i: usize) -> NCPoly {
        let p = self.elems[i].take().unwrap();
        self.tips.remove(&self.leads[i].word);
        p
    }

    fn insert(&mut self, p: NCPoly) -> Result<()> {
        let mut work = vec![p];
        while let Some(p) = work.pop() {
            let p = self.reduce(&p)?;
            if p.is_zero() {
                continue;
            }
            let p = monic(p);
            let lead = p.lead().unwrap().0.clone();
            let id = self.elems.len();
            // existing leads containing the new lead are no longer reduced
            if let Some(holders) = self.subwords.get(&lead.word).cloned() {
                for h in holders {
                    if self.alive(h) {
                        work.push(self.remove(h));
                    }
                }
            }
            let w = lead.word.clone();
            self.elems.push(Some(p));
            self.leads.push(lead);
            self.tips.insert(w.clone(), id);
            self.max_tip = self.max_tip.max(w.len());
            for k in 1..w.len() {
                self.prefixes.entry(w[..k].to_vec()).or_default().push(id);
                self.suffixes.entry(w[w.len() - k..].to_vec()).or_default().push(id);
            }
            let mut seen = HashSet::new();
            for a in 0..w.len() {
                for b in a + 1..=w.len() {
                    if seen.insert((a, b)) {
                        let list = self.subwords.entry(w[a..b].to_vec()).or_default();
                        if list.last() != Some(&id) {
                            list.push(id);
                        }
                    }
                }
            }
            for k in 1..w.len() {
                if let Some(rs) = self.prefixes.get(&w[w.len() - k..]).cloned() {
                    for r in rs {
                        if self.alive(r) {
                            self.push_overlap(id, r, k);
                        }
                    }
                }
                if let Some(ls) = self.suffixes.get(&w[..k]).cloned() {
                    for l in ls {
                        if l != id && self.alive(l) {
                            self.push_overlap(l, id, k);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn s_poly(&self, o: &Overlap) -> NCPoly {
        let g = self.elems[o.left].as_ref().unwrap();
        let h = self.elems[o.right].as_ref().unwrap();
        let l = &self.leads[o.left];
        let m = &self.leads[o.right];
        let v = &m.word[o.k..];
        let u = &l.word[..l.len() - o.k];
        let left = g.sandwich(&[], v, Some(m.src));
        let right = h.sandwich(u, &[], None);
        left.sub(&right)
    }

    fn pending(&self) -> Vec<Overlap> {
        self.queue
            .iter()
            .map(|r| r.0)
            .filter(|o| self.alive(o.left) && self.alive(o.right))
            .collect()
    }
}

/// Truncated Buchberger completion; overlaps are processed by increasing length.
pub fn groebner(p: &Presentation, cap: DegreeCap) -> Result<GBResult> {
    let mut eng = Engine::new(cap.bit_ceiling);
    for r in &p.relations {
        eng.insert(r.poly.clone())?;
    }
    while let Some(Reverse(o)) = eng.queue.peek().copied() {
        if !(eng.alive(o.left) && eng.alive(o.right)) {
            eng.queue.pop();
            continue;
        }
        if o.len > cap.max_len {
            break;
        }
        eng.queue.pop();
        let s = eng.s_poly(&o);
        eng.insert(s)?;
    }
    let pending = eng.pending();
    let complete = pending.is_empty();
    let certified_len = match pending.iter().map(|o| o.len).min() {
        Some(m) => m - 1,
        None => cap.max_len,
    };
    // tail reduction against the final leading words
    let live: Vec<usize> = (0..eng.elems.len()).filter(|&i| eng.alive(i)).collect();
    let mut elements = Vec::with_capacity(live.len());
    for &i in &live {
        let e = eng.elems[i].as_ref().unwrap();
        let (lead, _) = e.lead().unwrap();
        let mut tail = e.clone();
        tail.terms.remove(lead);
        let tail = eng.reduce(&tail)?;
        elements.push(tail.add(&NCPoly::monomial(lead.clone(), QScalar::one())));
    }
    Ok(GBResult::from_parts(
        p.hash(),
        MonomialOrder::deglex(&p.precedence),
        cap.max_len,
        elements,
        certified_len,
        complete,
        pending.len(),
    ))
}

/// Multigraded dimensions of a one-vertex quotient for every multidegree of length ≤ `cap`.
pub fn hilbert(g: &GBResult, quiver: &Quiver, cap: usize) -> Result<BTreeMap<Vec<i64>, u64>> {
    if !g.is_certified(cap) {
        return Err(Error::Uncertified {
            requested: cap,
            certified: g.certified_len,
        });
    }
    let mut out = BTreeMap::new();
    for v in 0..quiver.vertices.len() as u32 {
        for p in g.normal_paths_from(quiver, v, cap) {
            *out.entry(quiver.multidegree(&p)).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// Coefficients of the total-degree series `Σ_k dim_k t^k` from a multigraded table.
pub fn total_degree_series(h: &BTreeMap<Vec<i64>, u64>, cap: usize) -> Vec<u64> {
    let mut out = vec![0; cap + 1];
    for (beta, d) in h {
        let t: i64 = beta.iter().sum();
        if t >= 0 && (t as usize) <= cap {
            out[t as usize] += d;
        }
    }
    out
}

fn words_of_degree(rank: usize, beta: &[i64]) -> Vec<Vec<u32>> {
    let total: i64 = beta.iter().sum();
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for i in 0..rank {
        if beta[i] > 0 {
            let mut rest = beta.to_vec();
            rest[i] -= 1;
            for mut w in words_of_degree(rank, &rest) {
                w.insert(0, i as u32);
                out.push(w);
            }
        }
    }
    out
}

/// Dimension of the degree-`beta` component of a graded one-vertex presentation by
/// fraction-free rank of all two-sided relation multiples. Independent of [`groebner`].
pub fn dense_component_dim(p: &Presentation, beta: &[i64]) -> usize {
    let r = p.rank();
    let words = words_of_degree(r, beta);
    let index: HashMap<&Vec<u32>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut rows = vec![];
    let letter = |a: u32| p.quiver.arrows[a as usize].gen.index();
    for rel in &p.relations {
        let (lead, _) = rel.poly.lead().unwrap();
        let mut gamma = vec![0i64; r];
        for &a in &lead.word {
            gamma[letter(a)] += 1;
        }
        let rest: Vec<i64> = beta.iter().zip(&gamma).map(|(b, g)| b - g).collect();
        if rest.iter().any(|&x| x < 0) {
            continue;
        }
        // split the complementary degree between a left and a right word
        for u_deg in box_below(&rest) {
            let v_deg: Vec<i64> = rest.iter().zip(&u_deg).map(|(a, b)| a - b).collect();
            for u in words_of_degree(r, &u_deg) {
                for v in words_of_degree(r, &v_deg) {
                    let mut row = vec![QScalar::zero(); words.len()];
                    for (path, c) in &rel.poly.terms {
                        let mut w = u.clone();
                        w.extend_from_slice(&path.word);
                        w.extend_from_slice(&v);
                        row[index[&w]] = &row[index[&w]] + c;
                    }
                    rows.push(row);
                }
            }
        }
    }
    words.len() - rank_fraction_free(&rows)
}

fn box_below(v: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &x in v {
        out = out
            .into_iter()
            .flat_map(|w: Vec<i64>| {
                (0..=x).map(move |k| {
                    let mut w2 = w.clone();
                    w2.push(k);
                    w2
                })
            })
            .collect();
    }
    out
}
