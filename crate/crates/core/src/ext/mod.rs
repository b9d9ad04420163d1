//! Ext groups between window modules, Yoneda products, and the comparison drivers
//! (flag cohomology, Koszul probe, Euler characteristic).

pub mod lowdeg;
pub mod resolution;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gbasis::{groebner, DegreeCap, GBResult};
use crate::linalg::{solve_in_span, Echelon, Matrix};
use crate::modules::GradedModule;
use crate::presentation::{instantiate_window, FSpec, Params, Path, Presentation};
use crate::qfield::QScalar;
use crate::rootdata::{flag_betti, flag_ring, weyl_table, CohRing, DEFAULT_RING_RANK_CAP, DEFAULT_WEYL_CAP};

pub use lowdeg::{low_degree_ext, LowDegExt};
pub use resolution::{Certificate, Chain, Elem, ModuleAction, Resolution, ResolutionStats};

/// `Hom(V(s(c)), W(t(c)))` inside the flat cochain vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomBlock {
    pub chain: usize,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

/// Cochain complex `Hom_A(Q_•, W)` through `top`, with Ext bases as cocycle representatives.
#[derive(Clone, Debug)]
pub struct ExtData {
    pub top: usize,
    pub cochain_dims: Vec<usize>,
    pub dims: Vec<usize>,
    /// Degree `p` avoids truncation layers, boundary vertices and uncertified words.
    pub reliable: Vec<bool>,
    pub blocks: Vec<Vec<HomBlock>>,
    pub reps: Vec<Vec<Vec<QScalar>>>,
    images: Vec<Vec<Vec<QScalar>>>,
}

impl ExtData {
    /// Coordinates of a cocycle in the chosen Ext basis.
    pub fn coords(&self, n: usize, v: &[QScalar]) -> Result<Vec<QScalar>> {
        let mut basis = self.reps[n].clone();
        basis.extend(self.images[n].iter().cloned());
        let sol = solve_in_span(&basis, v)
            .ok_or_else(|| Error::ResolutionInvariant(format!("element of degree {n} is not a cocycle")))?;
        Ok(sol[..self.reps[n].len()].to_vec())
    }

    fn unpack(&self, n: usize, v: &[QScalar]) -> BTreeMap<usize, Matrix> {
        let mut out = BTreeMap::new();
        for b in &self.blocks[n] {
            let rows: Vec<Vec<QScalar>> = (0..b.rows)
                .map(|r| v[b.offset + r * b.cols..b.offset + (r + 1) * b.cols].to_vec())
                .collect();
            let m = Matrix::from_rows(rows, b.cols);
            if !m.is_zero() {
                out.insert(b.chain, m);
            }
        }
        out
    }
}

/// Resolutions of a list of modules over one window algebra.
pub struct ExtWorkspace<'a> {
    pub pres: &'a Presentation,
    pub gb: &'a GBResult,
    pub res: Vec<Resolution<'a>>,
    data: BTreeMap<(usize, usize), ExtData>,
    /// Set by `compose` whenever a product depends on data past a truncation layer.
    pub taint_seen: bool,
}

impl<'a> ExtWorkspace<'a> {
    pub fn new(pres: &'a Presentation, gb: &'a GBResult, modules: &'a [GradedModule], max_level: usize) -> Result<ExtWorkspace<'a>> {
        let res = modules
            .iter()
            .map(|m| Resolution::new(pres, gb, m, max_level))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtWorkspace {
            pres,
            gb,
            res,
            data: BTreeMap::new(),
            taint_seen: false,
        })
    }

    fn blocks_at(&self, i: usize, j: usize, n: usize) -> Vec<HomBlock> {
        let (ri, rj) = (&self.res[i], &self.res[j]);
        let mut off = 0;
        let mut out = vec![];
        for c in 0..ri.chains[n].len() {
            let rows = rj.v.dim(ri.chain_target(n, c));
            let cols = ri.v.dim(ri.chain_source(n, c));
            if rows * cols > 0 {
                out.push(HomBlock { chain: c, rows, cols, offset: off });
                off += rows * cols;
            }
        }
        out
    }

    /// Coboundary `δ_n: C^n → C^{n+1}` of `Hom(Q^i_•, V_j)`.
    fn coboundary(&mut self, i: usize, j: usize, n: usize, src: &[HomBlock], dst: &[HomBlock]) -> Result<(Matrix, bool)> {
        let rows: usize = dst.iter().map(|b| b.rows * b.cols).sum();
        let cols: usize = src.iter().map(|b| b.rows * b.cols).sum();
        let src_of: HashMap<usize, &HomBlock> = src.iter().map(|b| (b.chain, b)).collect();
        let mut m = Matrix::zeros(rows, cols);
        let mut tainted = false;
        for db in dst {
            let g = self.res[i].dgen(n + 1, db.chain)?;
            tainted |= g.tainted;
            for (key, mm) in &g.terms {
                let Some(sb) = src_of.get(&key.1) else { continue };
                let w = self.res[i].path_part(n, key);
                let (wm, bad) = self.res[j].v.act_flagged(&w);
                tainted |= bad && !wm.is_zero();
                for a in 0..sb.rows {
                    for b in 0..sb.cols {
                        let col = sb.offset + a * sb.cols + b;
                        for r in 0..db.rows {
                            let l = wm.get(r, a);
                            if l.is_zero() {
                                continue;
                            }
                            for s in 0..db.cols {
                                let x = mm.get(b, s);
                                if x.is_zero() {
                                    continue;
                                }
                                let row = db.offset + r * db.cols + s;
                                let cur = m.get(row, col).clone();
                                m.set(row, col, &cur + &(l * x));
                            }
                        }
                    }
                }
            }
        }
        Ok((m, tainted))
    }

    /// Ext^p(V_i, V_j) for `p ≤ top`; needs chains through level `top + 1`.
    pub fn ext(&mut self, i: usize, j: usize, top: usize) -> Result<&ExtData> {
        if self.data.get(&(i, j)).map(|d| d.top >= top) != Some(true) {
            if top + 1 > self.res[i].max_level() {
                return Err(Error::ResolutionInvariant(format!(
                    "degree {top} needs chains through level {}",
                    top + 1
                )));
            }
            let blocks: Vec<Vec<HomBlock>> = (0..=top + 1).map(|n| self.blocks_at(i, j, n)).collect();
            let cochain_dims: Vec<usize> = blocks.iter().map(|bs| bs.iter().map(|b| b.rows * b.cols).sum()).collect();
            let mut deltas = vec![];
            let mut tainted = vec![];
            for n in 0..=top {
                let (m, t) = self.coboundary(i, j, n, &blocks[n], &blocks[n + 1])?;
                deltas.push(m);
                tainted.push(t);
            }
            let reliable: Vec<bool> = (0..=top).map(|n| !tainted[n] && (n == 0 || !tainted[n - 1])).collect();
            let mut dims = vec![];
            let mut reps = vec![];
            let mut images = vec![];
            for n in 0..=top {
                let image = if n == 0 {
                    Echelon::empty(cochain_dims[0])
                } else {
                    Echelon::new(deltas[n - 1].transpose().to_rows(), cochain_dims[n])
                };
                let mut e = image.clone();
                let mut r = vec![];
                for k in deltas[n].nullspace() {
                    if e.insert(k.clone()) {
                        r.push(k);
                    }
                }
                dims.push(r.len());
                reps.push(r);
                images.push(image.rows);
            }
            self.data.insert(
                (i, j),
                ExtData {
                    top,
                    cochain_dims: cochain_dims[..=top].to_vec(),
                    dims,
                    reliable,
                    blocks: blocks[..=top].to_vec(),
                    reps,
                    images,
                },
            );
        }
        Ok(&self.data[&(i, j)])
    }

    /// `Φ_k(1 ⊗ [c] ⊗ ·)` for `c ∈ C^i_{b+k}`, lifting `φ: Q^i_b → V_j` through `Q^j`.
    fn lift_gen(
        &mut self,
        memo: &mut HashMap<(usize, usize), Elem>,
        i: usize,
        j: usize,
        b: usize,
        phi: &BTreeMap<usize, Matrix>,
        k: usize,
        c: usize,
    ) -> Result<Elem> {
        if let Some(x) = memo.get(&(k, c)) {
            return Ok(x.clone());
        }
        let out = if k == 0 {
            let mut e = Elem::default();
            if let Some(m) = phi.get(&c) {
                let t = self.res[i].chain_target(b, c);
                if let Some(c0) = self.res[j].vertex_chain(t) {
                    e.add((Path::vertex(t), c0), m.clone());
                }
            }
            e
        } else {
            let g = self.res[i].dgen(b + k, c)?;
            let mut acc = Elem::default();
            for (key, m) in &g.terms {
                let w = self.res[i].path_part(b + k - 1, key);
                let inner = self.lift_gen(memo, i, j, b, phi, k - 1, key.1)?;
                if inner.is_zero() {
                    continue;
                }
                let prod = self.res[j].left_mul(k - 1, &w, &inner);
                acc.add_elem(&prod.right_mul(m));
            }
            self.res[j].s(k - 1, &acc)?
        };
        memo.insert((k, c), out.clone());
        Ok(out)
    }

    /// Yoneda composite `ψ ∘ φ ∈ C^{a+b}(V_i, V_l)` of cocycles
    /// `φ ∈ C^b(V_i, V_j)` and `ψ ∈ C^a(V_j, V_l)`.
    pub fn compose(&mut self, i: usize, j: usize, l: usize, a: usize, psi: &[QScalar], b: usize, phi: &[QScalar]) -> Result<Vec<QScalar>> {
        let phi_m = self.ext(i, j, b)?.unpack(b, phi);
        let psi_m = self.ext(j, l, a)?.unpack(a, psi);
        let target_blocks = self.ext(i, l, a + b)?.blocks[a + b].clone();
        let len: usize = target_blocks.iter().map(|x| x.rows * x.cols).sum();
        let mut out = vec![QScalar::zero(); len];
        let mut memo = HashMap::new();
        for tb in &target_blocks {
            let e = self.lift_gen(&mut memo, i, j, b, &phi_m, a, tb.chain)?;
            self.taint_seen |= e.tainted;
            let mut acc = Matrix::zeros(tb.rows, tb.cols);
            for (key, m) in &e.terms {
                let Some(p) = psi_m.get(&key.1) else { continue };
                let w = self.res[j].path_part(a, key);
                let (wm, bad) = self.res[l].v.act_flagged(&w);
                self.taint_seen |= bad && !wm.is_zero();
                acc = acc.add(&wm.mul(p).mul(m));
            }
            for r in 0..tb.rows {
                for s in 0..tb.cols {
                    out[tb.offset + r * tb.cols + s] = acc.get(r, s).clone();
                }
            }
        }
        Ok(out)
    }

    /// Coordinates of `[ψ]·[φ]` for basis classes `ψ = e_x ∈ Ext^a(j,l)`, `φ = e_y ∈ Ext^b(i,j)`.
    pub fn class_product(&mut self, i: usize, j: usize, l: usize, a: usize, x: usize, b: usize, y: usize) -> Result<Vec<QScalar>> {
        let psi = self.ext(j, l, a)?.reps[a][x].clone();
        let phi = self.ext(i, j, b)?.reps[b][y].clone();
        let z = self.compose(i, j, l, a, &psi, b, &phi)?;
        self.ext(i, l, a + b)?.coords(a + b, &z)
    }

    /// Run statistics merged over all resolutions.
    pub fn stats(&self) -> ResolutionStats {
        let mut s = ResolutionStats::default();
        for r in &self.res {
            s.generators_computed += r.stats.generators_computed;
            s.homotopy_cache += r.stats.homotopy_cache;
            s.max_reduced_len = s.max_reduced_len.max(r.stats.max_reduced_len);
            s.reach = s.reach.max(r.stats.reach);
            s.min_boundary_gap = match (s.min_boundary_gap, r.stats.min_boundary_gap) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            if s.chains_per_level.len() < r.stats.chains_per_level.len() {
                s.chains_per_level.resize(r.stats.chains_per_level.len(), 0);
            }
            for (k, n) in r.stats.chains_per_level.iter().enumerate() {
                s.chains_per_level[k] += n;
            }
        }
        s
    }
}

/// Window radius, margin, cohomological cap and Gröbner length cap for one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtConfig {
    pub radius: i64,
    pub margin: i64,
    pub homcap: usize,
    pub gb_len: usize,
    /// Path length bound for homotopy certificates.
    pub certify_len: usize,
}

impl ExtConfig {
    pub fn new(radius: i64, margin: i64, homcap: usize) -> ExtConfig {
        ExtConfig {
            radius,
            margin,
            homcap,
            gb_len: (2 * homcap + 4).max(8),
            certify_len: 2,
        }
    }

    pub fn with_radius(&self, radius: i64) -> ExtConfig {
        ExtConfig { radius, ..self.clone() }
    }

    /// `N ≥ m ≥ homcap` and every module at least `m` from the boundary.
    pub fn check_margin(&self, modules: &[GradedModule]) -> Result<()> {
        if self.radius < self.margin || (self.margin as i128) < self.homcap as i128 {
            return Err(Error::MarginViolation(format!(
                "need N ≥ m ≥ homcap, got N = {}, m = {}, homcap = {}",
                self.radius, self.margin, self.homcap
            )));
        }
        for m in modules {
            let d = m.boundary_distance(self.radius);
            if d < self.margin {
                return Err(Error::MarginViolation(format!(
                    "{} lies {d} from the boundary of the radius-{} window, margin is {}",
                    m.label, self.radius, self.margin
                )));
            }
        }
        Ok(())
    }
}

/// Gröbner basis source; the CLI plugs a content-addressed cache in here.
pub type GbSource<'s> = &'s mut dyn FnMut(&Presentation, DegreeCap) -> Result<GBResult>;

pub fn direct_gb(p: &Presentation, cap: DegreeCap) -> Result<GBResult> {
    groebner(p, cap)
}

/// Chain resolution of `v` through level `homcap + 1`. Generators are indexed by tip chains,
/// so the resolution is minimal exactly when the Hom complex into the simple top has zero
/// differential; `ExtData::cochain_dims` against `dims` records how far off it is.
pub fn minimal_resolution<'a>(pres: &'a Presentation, gb: &'a GBResult, v: &'a GradedModule, homcap: usize) -> Result<Resolution<'a>> {
    Resolution::new(pres, gb, v, homcap + 1)
}

/// Trust record of one window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRun {
    pub radius: i64,
    pub margin: i64,
    pub gb_elements: usize,
    pub gb_certified_len: usize,
    pub gb_complete: bool,
    pub stats: ResolutionStats,
    pub certificates: Vec<Vec<Certificate>>,
    pub trusted: bool,
    pub reasons: Vec<String>,
}

/// Builds the window, resolves every module, runs `job`, then audits the run.
pub fn run_window<T>(
    params: &Params,
    modules: &[GradedModule],
    cfg: &ExtConfig,
    gb_source: GbSource,
    job: impl FnOnce(&mut ExtWorkspace) -> Result<T>,
) -> Result<(WindowRun, T)> {
    cfg.check_margin(modules)?;
    let pres = instantiate_window(params, cfg.radius, cfg.margin)?;
    let gb = gb_source(&pres, DegreeCap::len(cfg.gb_len))?;
    let mut ws = ExtWorkspace::new(&pres, &gb, modules, cfg.homcap + 1)?;
    let out = job(&mut ws)?;
    let mut certificates = vec![];
    let mut reasons = vec![];
    for r in ws.res.iter_mut() {
        let certs = r.certify(cfg.homcap, cfg.certify_len)?;
        if certs.iter().any(|c| !(c.d_squared_zero && c.homotopy_ok && c.leading_terms_ok)) {
            reasons.push(format!("resolution certificate failed for {}", r.v.module.label));
        }
        certificates.push(certs);
    }
    let stats = ws.stats();
    let run = WindowRun {
        radius: cfg.radius,
        margin: cfg.margin,
        gb_elements: gb.elements.len(),
        gb_certified_len: gb.certified_len,
        gb_complete: gb.complete,
        stats,
        certificates,
        trusted: reasons.is_empty(),
        reasons,
    };
    Ok((run, out))
}

/// Ext dimensions of one ordered pair across the windows `N` and `N + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtEntry {
    pub v: usize,
    pub w: usize,
    /// `dims_by_window[k][p]`.
    pub dims_by_window: Vec<Vec<usize>>,
    pub cochain_dims: Vec<usize>,
    /// No unfaithful data was reached in any window.
    pub reliable: Vec<bool>,
    /// Agreement across windows with both windows trusted.
    pub stable: Vec<bool>,
}

impl ExtEntry {
    pub fn dims(&self) -> &[usize] {
        self.dims_by_window.last().map(|d| d.as_slice()).unwrap_or(&[])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTable {
    pub homcap: usize,
    pub modules: Vec<String>,
    pub windows: Vec<WindowRun>,
    pub entries: Vec<ExtEntry>,
}

impl ExtTable {
    pub fn entry(&self, v: usize, w: usize) -> Option<&ExtEntry> {
        self.entries.iter().find(|e| e.v == v && e.w == w)
    }

    pub fn trusted(&self) -> bool {
        self.windows.iter().all(|w| w.trusted)
    }
}

#[derive(Clone, Debug)]
struct PairDims {
    dims: Vec<usize>,
    cochain_dims: Vec<usize>,
    reliable: Vec<bool>,
}

type PairMap = BTreeMap<(usize, usize), PairDims>;

fn assemble(homcap: usize, modules: &[GradedModule], runs: Vec<(WindowRun, PairMap)>) -> ExtTable {
    let trusted = runs.iter().all(|(r, _)| r.trusted);
    let mut entries = vec![];
    for (&(v, w), last) in &runs.last().unwrap().1 {
        let per: Vec<&PairDims> = runs.iter().map(|(_, m)| &m[&(v, w)]).collect();
        let dims_by_window: Vec<Vec<usize>> = per.iter().map(|d| d.dims.clone()).collect();
        let reliable: Vec<bool> = (0..=homcap).map(|p| per.iter().all(|d| d.reliable[p])).collect();
        let stable = (0..=homcap)
            .map(|p| trusted && reliable[p] && per.len() >= 2 && per.iter().all(|d| d.dims[p] == per[0].dims[p]))
            .collect();
        entries.push(ExtEntry {
            v,
            w,
            dims_by_window,
            cochain_dims: last.cochain_dims.clone(),
            reliable,
            stable,
        });
    }
    ExtTable {
        homcap,
        modules: modules.iter().map(|m| m.label.clone()).collect(),
        windows: runs.into_iter().map(|(r, _)| r).collect(),
        entries,
    }
}

fn all_pairs(ws: &mut ExtWorkspace, n: usize, homcap: usize) -> Result<PairMap> {
    let mut out = BTreeMap::new();
    for v in 0..n {
        for w in 0..n {
            let d = ws.ext(v, w, homcap)?;
            out.insert(
                (v, w),
                PairDims {
                    dims: d.dims.clone(),
                    cochain_dims: d.cochain_dims.clone(),
                    reliable: d.reliable.clone(),
                },
            );
        }
    }
    Ok(out)
}

/// Ext table over every ordered pair, computed in windows `N` and `N + 2`.
pub fn ext_table(params: &Params, modules: &[GradedModule], cfg: &ExtConfig, gb_source: GbSource) -> Result<ExtTable> {
    let mut runs = vec![];
    for radius in [cfg.radius, cfg.radius + 2] {
        let c = cfg.with_radius(radius);
        let n = modules.len();
        runs.push(run_window(params, modules, &c, gb_source, |ws| all_pairs(ws, n, cfg.homcap))?);
    }
    Ok(assemble(cfg.homcap, modules, runs))
}

/// Ring invariants of `Ext^•(V, V)` through the cap: generator and minimal relation counts
/// per degree, with graded commutativity of the sampled products.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingInvariants {
    pub generators: Vec<usize>,
    pub relations: Vec<usize>,
    pub graded_commutative: bool,
    pub associative: bool,
}

fn span_rank(vs: &[Vec<QScalar>], cols: usize) -> usize {
    Echelon::new(vs.to_vec(), cols).rank()
}

/// Generators and relations of `Ext^•(V_i, V_i)` for `degree ≤ cap`, treating the
/// even-degree part as a commutative algebra.
pub fn ring_invariants(ws: &mut ExtWorkspace, i: usize, cap: usize) -> Result<RingInvariants> {
    let dims = ws.ext(i, i, cap)?.dims.clone();
    let mut generators = vec![0; cap + 1];
    let mut gen_reps: Vec<(usize, Vec<QScalar>)> = vec![];
    let mut commutative = true;
    for p in 1..=cap {
        let mut decomp: Vec<Vec<QScalar>> = vec![];
        for a in 1..p {
            let b = p - a;
            for x in 0..dims[a] {
                for y in 0..dims[b] {
                    let xy = ws.class_product(i, i, i, a, x, b, y)?;
                    let yx = ws.class_product(i, i, i, b, y, a, x)?;
                    let sign = if (a * b) % 2 == 0 { QScalar::one() } else { -QScalar::one() };
                    if xy.iter().zip(&yx).any(|(u, v)| *u != &sign * v) {
                        commutative = false;
                    }
                    decomp.push(xy);
                }
            }
        }
        let mut e = Echelon::new(decomp, dims[p]);
        for x in 0..dims[p] {
            let mut unit = vec![QScalar::zero(); dims[p]];
            unit[x] = QScalar::one();
            if e.insert(unit) {
                generators[p] += 1;
                gen_reps.push((p, ws.ext(i, i, cap)?.reps[p][x].clone()));
            }
        }
    }
    // associativity on generator triples
    let mut associative = true;
    for (pa, a) in &gen_reps {
        for (pb, b) in &gen_reps {
            for (pc, c) in &gen_reps {
                if pa + pb + pc > cap {
                    continue;
                }
                let ab = ws.compose(i, i, i, *pa, a, *pb, b)?;
                let bc = ws.compose(i, i, i, *pb, b, *pc, c)?;
                let left = ws.compose(i, i, i, pa + pb, &ab, *pc, c)?;
                let right = ws.compose(i, i, i, *pa, a, pb + pc, &bc)?;
                let d = ws.ext(i, i, cap)?;
                if d.coords(pa + pb + pc, &left)? != d.coords(pa + pb + pc, &right)? {
                    associative = false;
                }
            }
        }
    }
    // commutative monomials in the generators, by degree
    let mut monomials: Vec<Vec<(Vec<usize>, Vec<QScalar>)>> = vec![vec![]; cap + 1];
    monomials[0].push((vec![0; gen_reps.len()], ws.ext(i, i, cap)?.reps[0].first().cloned().unwrap_or_default()));
    let mut relations = vec![0; cap + 1];
    let mut kernels: Vec<Vec<Vec<QScalar>>> = vec![vec![]; cap + 1];
    for p in 1..=cap {
        let mut seen: BTreeMap<Vec<usize>, Vec<QScalar>> = BTreeMap::new();
        for (g, (pg, rep)) in gen_reps.iter().enumerate() {
            if *pg > p {
                continue;
            }
            for (exps, val) in monomials[p - pg].clone() {
                // extend only with the largest generator index to list each monomial once
                if exps.iter().enumerate().any(|(k, &e)| e > 0 && k > g) {
                    continue;
                }
                let mut e2 = exps.clone();
                e2[g] += 1;
                if seen.contains_key(&e2) {
                    continue;
                }
                let v = if p == *pg { rep.clone() } else { ws.compose(i, i, i, *pg, rep, p - pg, &val)? };
                seen.insert(e2, v);
            }
        }
        let mons: Vec<(Vec<usize>, Vec<QScalar>)> = seen.into_iter().collect();
        let d = ws.ext(i, i, cap)?;
        let coords: Vec<Vec<QScalar>> = mons.iter().map(|(_, v)| d.coords(p, v)).collect::<Result<_>>()?;
        let evaluation = Matrix::from_rows(coords, dims[p]).transpose();
        let ker = if mons.is_empty() { vec![] } else { evaluation.nullspace() };
        // relations generated from lower degrees: kernel element times monomial
        let index: BTreeMap<Vec<usize>, usize> = mons.iter().enumerate().map(|(k, (e, _))| (e.clone(), k)).collect();
        let mut generated: Vec<Vec<QScalar>> = vec![];
        for p1 in 1..p {
            let lower: Vec<Vec<usize>> = monomials[p1].iter().map(|(e, _)| e.clone()).collect();
            for kv in &kernels[p1] {
                for (e_rest, _) in &monomials[p - p1] {
                    let mut row = vec![QScalar::zero(); mons.len()];
                    for (k, coef) in kv.iter().enumerate() {
                        if coef.is_zero() {
                            continue;
                        }
                        let prod: Vec<usize> = lower[k].iter().zip(e_rest).map(|(x, y)| x + y).collect();
                        if let Some(&t) = index.get(&prod) {
                            row[t] = &row[t] + coef;
                        }
                    }
                    generated.push(row);
                }
            }
        }
        relations[p] = ker.len() - span_rank(&generated, mons.len()).min(ker.len());
        kernels[p] = ker;
        monomials[p] = mons;
    }
    Ok(RingInvariants {
        generators,
        relations,
        graded_commutative: commutative,
        associative,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Match,
    Mismatch { degree: usize, computed: usize, expected: usize },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurReport {
    pub expected: Vec<usize>,
    pub table: ExtTable,
    pub ring: Option<RingInvariants>,
    pub expected_ring: Option<RingInvariants>,
    /// Yoneda structure constants from the larger window; `None` unless every entry is stable.
    pub structure: Option<YonedaTable>,
    pub verdict: Verdict,
}

fn flag_invariants(ring: &CohRing, cap: usize) -> Option<RingInvariants> {
    if !ring.ring_computed {
        return None;
    }
    let mut generators = vec![0; cap + 1];
    if cap >= 2 {
        generators[2] = ring.generators;
    }
    let mut relations = vec![0; cap + 1];
    for (k, r) in ring.relation_degrees.iter().enumerate() {
        if k <= cap {
            relations[k] = *r;
        }
    }
    Some(RingInvariants {
        generators,
        relations,
        graded_commutative: true,
        associative: true,
    })
}

/// Verdict of one diagonal entry against a Betti target whose top degree is `target_top`.
/// Unstable entries never produce a mismatch.
pub fn target_verdict(entry: &ExtEntry, target: &[usize], target_top: usize) -> Verdict {
    let dims = entry.dims();
    let want = |p: usize| target.get(p).copied().unwrap_or(0);
    for p in 0..dims.len() {
        if entry.stable[p] && dims[p] != want(p) {
            return Verdict::Mismatch {
                degree: p,
                computed: dims[p],
                expected: want(p),
            };
        }
    }
    let cap = dims.len().saturating_sub(1);
    if cap < target_top {
        Verdict::Inconclusive {
            reason: format!("cohomological cap {cap} is below 2ℓ(w0) = {target_top}"),
        }
    } else if !entry.stable.iter().all(|&s| s) {
        Verdict::Inconclusive {
            reason: "entries are not stable across windows N and N+2".into(),
        }
    } else {
        Verdict::Match
    }
}

/// One structure constant block: coordinates of `e_x · e_y` for `e_x ∈ Ext^a`, `e_y ∈ Ext^b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Product {
    pub a: usize,
    pub x: usize,
    pub b: usize,
    pub y: usize,
    pub coords: Vec<QScalar>,
}

/// Multiplication table of `Ext^•(V_i, V_i)` in the cocycle basis through `cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YonedaTable {
    pub dims: Vec<usize>,
    pub products: Vec<Product>,
    /// The `Ext⁰` class acts as a nonzero scalar on every class, on both sides.
    pub unit_ok: bool,
    /// No product touched truncation layers.
    pub reliable: bool,
}

impl YonedaTable {
    pub fn product(&self, a: usize, x: usize, b: usize, y: usize) -> Option<&Product> {
        self.products.iter().find(|p| (p.a, p.x, p.b, p.y) == (a, x, b, y))
    }
}

/// Structure constants of `Ext^•(V_i, V_i)` for total degree `≤ cap`.
pub fn yoneda(ws: &mut ExtWorkspace, i: usize, cap: usize) -> Result<YonedaTable> {
    let dims = ws.ext(i, i, cap)?.dims.clone();
    let before = ws.taint_seen;
    ws.taint_seen = false;
    let mut products = vec![];
    for a in 0..=cap {
        for b in 0..=cap - a {
            for x in 0..dims[a] {
                for y in 0..dims[b] {
                    let coords = ws.class_product(i, i, i, a, x, b, y)?;
                    products.push(Product { a, x, b, y, coords });
                }
            }
        }
    }
    let mut unit_ok = dims[0] == 1;
    if unit_ok {
        let scale = products
            .iter()
            .find(|p| p.a == 0 && p.b == 0)
            .map(|p| p.coords[0].clone())
            .unwrap_or_else(QScalar::zero);
        unit_ok = !scale.is_zero();
        for p in &products {
            let (deg, idx) = match (p.a, p.b) {
                (0, b) => (b, p.y),
                (a, 0) => (a, p.x),
                _ => continue,
            };
            let want: Vec<QScalar> = (0..dims[deg]).map(|k| if k == idx { scale.clone() } else { QScalar::zero() }).collect();
            unit_ok &= p.coords == want;
        }
    }
    let reliable = !ws.taint_seen;
    ws.taint_seen |= before;
    Ok(YonedaTable {
        dims,
        products,
        unit_ok,
        reliable,
    })
}

/// Compares `Ext^•(V, V)` of a simple `V` with the cohomology of the flag variety.
/// The structure constants are kept only when every entry is stable.
pub fn schur_check(params: &Params, module: &GradedModule, cfg: &ExtConfig, gb_source: GbSource) -> Result<SchurReport> {
    let c = &params.cartan;
    let table_w = weyl_table(c, DEFAULT_WEYL_CAP)?;
    let betti = flag_betti(&table_w);
    let top = betti.len() - 1;
    let expected: Vec<usize> = (0..=cfg.homcap).map(|p| betti.get(p).copied().unwrap_or(0)).collect();
    let modules = vec![module.clone()];
    let homcap = cfg.homcap;
    let mut runs = vec![];
    let mut rings = vec![];
    let mut structure = None;
    for radius in [cfg.radius, cfg.radius + 2] {
        let cw = cfg.with_radius(radius);
        let (run, (pairs, ring, y)) = run_window(params, &modules, &cw, gb_source, |ws| {
            let pairs = all_pairs(ws, 1, homcap)?;
            let ring = ring_invariants(ws, 0, homcap)?;
            let y = yoneda(ws, 0, homcap)?;
            Ok((pairs, ring, y))
        })?;
        runs.push((run, pairs));
        rings.push(ring);
        structure = Some(y);
    }
    let table = assemble(homcap, &modules, runs);
    let entry = table.entry(0, 0).unwrap().clone();
    let ring = rings.last().cloned();
    let expected_ring = flag_invariants(&flag_ring(c, &table_w, DEFAULT_RING_RANK_CAP), homcap);
    let mut verdict = target_verdict(&entry, &expected, top);
    if verdict == Verdict::Match {
        if let (Some(r), Some(e)) = (&ring, &expected_ring) {
            if r.generators != e.generators || r.relations != e.relations {
                verdict = Verdict::Inconclusive {
                    reason: "dimensions agree but ring invariants differ".into(),
                };
            }
        }
    }
    if !matches!(params.f, FSpec::ClassicalLinear | FSpec::QInteger) && verdict == Verdict::Match {
        verdict = Verdict::Inconclusive {
            reason: format!("no verdict is claimed for the {} f family", params.f.label()),
        };
    }
    if !entry.stable.iter().all(|&s| s) {
        structure = None;
    }
    Ok(SchurReport {
        expected,
        table,
        ring,
        expected_ring,
        structure,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum KoszulVerdict {
    /// Every stable class through the cap is a product of degree-1 classes in the list.
    Supported { through: usize },
    /// As `Supported`, restricted to entries clear of truncation layers; `unchecked` counts the rest.
    SupportedOnReliable { through: usize, unchecked: usize },
    ListInsufficient { reason: String },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationEntry {
    pub v: usize,
    pub w: usize,
    pub degree: usize,
    pub ext_dim: usize,
    pub generated_dim: usize,
    /// Every factor and product avoided truncation layers.
    pub reliable: bool,
}

impl GenerationEntry {
    pub fn generated(&self) -> bool {
        self.generated_dim == self.ext_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulReport {
    pub table: ExtTable,
    pub generation: Vec<GenerationEntry>,
    /// Degree-3 relations generated by degree-2 ones; `None` below cap 3.
    pub quadratic: Option<bool>,
    pub verdict: KoszulVerdict,
}

fn koszul_job(ws: &mut ExtWorkspace, n: usize, homcap: usize) -> Result<(Vec<GenerationEntry>, Option<bool>)> {
    for v in 0..n {
        for w in 0..n {
            ws.ext(v, w, homcap)?;
        }
    }
    // gen[p][(i,l)]: cochains spanning the degree-1 generated part, and whether every
    // factor avoided truncation layers
    let mut gen: Vec<BTreeMap<(usize, usize), (Vec<Vec<QScalar>>, bool)>> = vec![BTreeMap::new(); homcap + 1];
    for i in 0..n {
        for l in 0..n {
            if homcap >= 1 {
                let d = ws.ext(i, l, homcap)?;
                gen[1].insert((i, l), (d.reps[1].clone(), d.reliable[1]));
            }
        }
    }
    for p in 2..=homcap {
        for i in 0..n {
            for l in 0..n {
                let mut reps = vec![];
                let mut ok = ws.ext(i, l, homcap)?.reliable[p];
                let mut e = Echelon::empty(ws.ext(i, l, homcap)?.dims[p]);
                for j in 0..n {
                    let one = ws.ext(j, l, homcap)?;
                    let (ones, one_ok) = (one.reps[1].clone(), one.reliable[1]);
                    let (lower, lower_ok) = gen[p - 1][&(i, j)].clone();
                    if ones.is_empty() || lower.is_empty() {
                        continue;
                    }
                    ok &= one_ok && lower_ok;
                    for psi in &ones {
                        for phi in &lower {
                            ws.taint_seen = false;
                            let z = ws.compose(i, j, l, 1, psi, p - 1, phi)?;
                            if ws.taint_seen {
                                ok = false;
                                continue;
                            }
                            let c = ws.ext(i, l, homcap)?.coords(p, &z)?;
                            if e.insert(c) {
                                reps.push(z);
                            }
                        }
                    }
                }
                gen[p].insert((i, l), (reps, ok));
            }
        }
    }
    let mut out = vec![];
    for p in 1..=homcap {
        for i in 0..n {
            for l in 0..n {
                let d = ws.ext(i, l, homcap)?.dims[p];
                let (reps, ok) = &gen[p][&(i, l)];
                out.push(GenerationEntry {
                    v: i,
                    w: l,
                    degree: p,
                    ext_dim: d,
                    generated_dim: reps.len(),
                    reliable: *ok,
                });
            }
        }
    }
    let quadratic = if homcap >= 3 { quadratic_probe(ws, n)? } else { None };
    Ok((out, quadratic))
}

/// Kernel of `E¹⊗E¹⊗E¹ → Ext³` against `R⊗E¹ + E¹⊗R`, with `R` the degree-2 kernel.
fn quadratic_probe(ws: &mut ExtWorkspace, n: usize) -> Result<Option<bool>> {
    ws.taint_seen = false;
    let e1: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).map(|j| ws.ext(i, j, 3).map(|d| d.dims[1])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    // degree-2 tensor basis on i → j → k: (j, x ∈ E(j,k), y ∈ E(i,j))
    let t2 = |i: usize, k: usize| -> Vec<(usize, usize, usize)> {
        let mut v = vec![];
        for j in 0..n {
            for x in 0..e1[j][k] {
                for y in 0..e1[i][j] {
                    v.push((j, x, y));
                }
            }
        }
        v
    };
    let mut rel: BTreeMap<(usize, usize), Vec<Vec<QScalar>>> = BTreeMap::new();
    for i in 0..n {
        for k in 0..n {
            let basis = t2(i, k);
            let dim2 = ws.ext(i, k, 3)?.dims[2];
            let mut cols = vec![];
            for &(j, x, y) in &basis {
                cols.push(ws.class_product(i, j, k, 1, x, 1, y)?);
            }
            let m = Matrix::from_rows(cols, dim2).transpose();
            let ker = if basis.is_empty() { vec![] } else { m.nullspace() };
            rel.insert((i, k), ker);
        }
    }
    for i0 in 0..n {
        for i3 in 0..n {
            let mut basis = vec![];
            for i1 in 0..n {
                for i2 in 0..n {
                    for a in 0..e1[i2][i3] {
                        for b in 0..e1[i1][i2] {
                            for c in 0..e1[i0][i1] {
                                basis.push((i1, i2, a, b, c));
                            }
                        }
                    }
                }
            }
            if basis.is_empty() {
                continue;
            }
            let pos: BTreeMap<(usize, usize, usize, usize, usize), usize> = basis.iter().enumerate().map(|(k, t)| (*t, k)).collect();
            let dim3 = ws.ext(i0, i3, 3)?.dims[3];
            let mut cols = vec![];
            for &(i1, i2, a, b, c) in &basis {
                let psi = ws.ext(i2, i3, 3)?.reps[1][a].clone();
                let phi = ws.ext(i1, i2, 3)?.reps[1][b].clone();
                let chi = ws.ext(i0, i1, 3)?.reps[1][c].clone();
                let ab = ws.compose(i1, i2, i3, 1, &psi, 1, &phi)?;
                let abc = ws.compose(i0, i1, i3, 2, &ab, 1, &chi)?;
                cols.push(ws.ext(i0, i3, 3)?.coords(3, &abc)?);
            }
            let k3 = Matrix::from_rows(cols, dim3).transpose().nullspace().len();
            let mut span = vec![];
            for i1 in 0..n {
                // R(i1, i3) ⊗ E(i0, i1)
                let b13 = t2(i1, i3);
                for r in &rel[&(i1, i3)] {
                    for c in 0..e1[i0][i1] {
                        let mut row = vec![QScalar::zero(); basis.len()];
                        for (t, coef) in r.iter().enumerate() {
                            let (i2, a, b) = b13[t];
                            row[pos[&(i1, i2, a, b, c)]] = coef.clone();
                        }
                        span.push(row);
                    }
                }
            }
            for i2 in 0..n {
                // E(i2, i3) ⊗ R(i0, i2)
                let b02 = t2(i0, i2);
                for r in &rel[&(i0, i2)] {
                    for a in 0..e1[i2][i3] {
                        let mut row = vec![QScalar::zero(); basis.len()];
                        for (t, coef) in r.iter().enumerate() {
                            let (i1, b, c) = b02[t];
                            row[pos[&(i1, i2, a, b, c)]] = coef.clone();
                        }
                        span.push(row);
                    }
                }
            }
            if ws.taint_seen {
                return Ok(None);
            }
            if span_rank(&span, basis.len()) != k3 {
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}

/// Degree-1 generation of the Ext algebra of a finite list of simples.
pub fn koszul_check(params: &Params, modules: &[GradedModule], cfg: &ExtConfig, gb_source: GbSource) -> Result<KoszulReport> {
    let n = modules.len();
    let homcap = cfg.homcap;
    let mut runs = vec![];
    let mut gens = vec![];
    for radius in [cfg.radius, cfg.radius + 2] {
        let cw = cfg.with_radius(radius);
        let (run, (pairs, g)) = run_window(params, modules, &cw, gb_source, |ws| {
            let pairs = all_pairs(ws, n, homcap)?;
            let g = koszul_job(ws, n, homcap)?;
            Ok((pairs, g))
        })?;
        runs.push((run, pairs));
        gens.push(g);
    }
    let table = assemble(homcap, modules, runs);
    let (generation, quadratic) = gens.pop().unwrap();
    let stable = |g: &GenerationEntry| table.entry(g.v, g.w).map(|e| e.stable[g.degree]).unwrap_or(false);
    let unchecked = generation.iter().filter(|g| !(g.reliable && stable(g))).count();
    let verdict = if n < 2 {
        KoszulVerdict::ListInsufficient {
            reason: "a single simple has no degree-1 partners to generate its higher Ext".into(),
        }
    } else if let Some(g) = generation.iter().find(|g| g.reliable && stable(g) && !g.generated()) {
        KoszulVerdict::ListInsufficient {
            reason: format!(
                "Ext^{}({}, {}) has {} classes, degree-1 products in the list give {}",
                g.degree, table.modules[g.v], table.modules[g.w], g.ext_dim, g.generated_dim
            ),
        }
    } else if unchecked == generation.len() {
        KoszulVerdict::Inconclusive {
            reason: "no entry is both stable and clear of truncation layers".into(),
        }
    } else if unchecked > 0 {
        KoszulVerdict::SupportedOnReliable { through: homcap, unchecked }
    } else {
        KoszulVerdict::Supported { through: homcap }
    };
    Ok(KoszulReport {
        table,
        generation,
        quadratic,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerReport {
    pub dims: Vec<usize>,
    pub cochain_dims: Vec<usize>,
    /// First level with no chains.
    pub vanishing_level: usize,
    pub euler_ext: i64,
    pub euler_cochains: i64,
    pub consistent: bool,
}

fn alternating(v: &[usize]) -> i64 {
    v.iter().enumerate().map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// Euler characteristic of `Ext^•(V, W)`; fails with `TailNotZero` unless some chain level
/// through `homcap + 1` is empty.
pub fn euler_check(params: &Params, v: &GradedModule, w: &GradedModule, cfg: &ExtConfig, gb_source: GbSource) -> Result<EulerReport> {
    let modules = vec![v.clone(), w.clone()];
    let homcap = cfg.homcap;
    let (_, out) = run_window(params, &modules, cfg, gb_source, |ws| {
        let vanish = (0..=homcap + 1).find(|&k| ws.res[0].vanishes_from(k));
        let Some(k) = vanish else {
            return Err(Error::TailNotZero(format!(
                "chains of {} persist through level {}",
                ws.res[0].v.module.label,
                homcap + 1
            )));
        };
        let d = ws.ext(0, 1, homcap)?;
        Ok((k, d.dims.clone(), d.cochain_dims.clone()))
    })?;
    let (k, dims, cochain_dims) = out;
    let euler_ext = alternating(&dims);
    let euler_cochains = alternating(&cochain_dims);
    Ok(EulerReport {
        dims,
        cochain_dims,
        vanishing_level: k,
        euler_ext,
        euler_cochains,
        consistent: euler_ext == euler_cochains,
    })
}
