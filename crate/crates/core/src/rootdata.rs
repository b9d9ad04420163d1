//! Finite root systems: Cartan data, positive roots, Weyl group enumeration,
//! and the flag-variety cohomology targets (Betti numbers and coinvariant ring).

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::qfield::QScalar;

pub const DEFAULT_WEYL_CAP: usize = 100_000;
pub const DEFAULT_RING_RANK_CAP: usize = 2;

/// Cartan matrix `a[i][j] = 2(α_i|α_j)/(α_i|α_i)` with symmetrizers
/// `d_i = (α_i|α_i)/2`, short roots normalized to `d = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanDatum {
    pub label: String,
    pub a: Vec<Vec<i64>>,
    pub d: Vec<u32>,
}

impl CartanDatum {
    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// `b(i,j) = 1 - a_ij`.
    pub fn b(&self, i: usize, j: usize) -> u32 {
        (1 - self.a[i][j]) as u32
    }

    /// Builds a datum from an explicit matrix, deriving symmetrizers.
    pub fn from_matrix(label: &str, a: Vec<Vec<i64>>) -> Result<Self> {
        let d = symmetrizers(&a)?;
        let c = CartanDatum {
            label: label.to_string(),
            a,
            d,
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks every documented invariant, including positive definiteness.
    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        let bad = |m: String| Err(Error::InvalidCartanDatum(m));
        if r == 0 {
            return bad("rank must be positive".into());
        }
        if self.a.iter().any(|row| row.len() != r) || self.d.len() != r {
            return bad("shape mismatch".into());
        }
        for i in 0..r {
            if self.a[i][i] != 2 {
                return bad(format!("a[{i}][{i}] != 2"));
            }
            if self.d[i] == 0 {
                return bad(format!("d[{i}] must be positive"));
            }
            for j in 0..r {
                if i == j {
                    continue;
                }
                if self.a[i][j] > 0 {
                    return bad(format!("a[{i}][{j}] > 0"));
                }
                if (self.a[i][j] == 0) != (self.a[j][i] == 0) {
                    return bad(format!("a[{i}][{j}] and a[{j}][{i}] disagree on zero"));
                }
                if self.d[i] as i64 * self.a[i][j] != self.d[j] as i64 * self.a[j][i] {
                    return bad(format!("not symmetrized by d at ({i},{j})"));
                }
            }
        }
        if !self.is_positive_definite() {
            return bad("symmetrized matrix is not positive definite".into());
        }
        Ok(())
    }

    /// Symmetric form `(α_i|α_j) = d_i a_ij`.
    pub fn bilinear(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| self.d[i] as i64 * self.a[i][j]).collect())
            .collect()
    }

    fn is_positive_definite(&self) -> bool {
        // Sylvester: all leading principal minors positive (exact rationals).
        let b = self.bilinear();
        let r = self.rank();
        for k in 1..=r {
            let mut m: Vec<Vec<BigRational>> = (0..k)
                .map(|i| (0..k).map(|j| BigRational::from_integer(b[i][j].into())).collect())
                .collect();
            let mut det = BigRational::from_integer(1.into());
            for col in 0..k {
                let Some(p) = (col..k).find(|&i| !m[i][col].is_zero()) else {
                    return false;
                };
                if p != col {
                    m.swap(p, col);
                    det = -det;
                }
                let piv = m[col][col].clone();
                det *= &piv;
                for i in col + 1..k {
                    let f = &m[i][col] / &piv;
                    for j in col..k {
                        let t = &f * &m[col][j];
                        m[i][j] -= t;
                    }
                }
            }
            if det <= BigRational::zero() {
                return false;
            }
        }
        true
    }

    /// Simple reflection `s_i` applied to a vector in simple-root coordinates.
    pub fn reflect(&self, i: usize, v: &[i64]) -> Vec<i64> {
        let pairing: i64 = (0..self.rank()).map(|j| v[j] * self.a[i][j]).sum();
        let mut out = v.to_vec();
        out[i] -= pairing;
        out
    }

    /// `<β, α_i^∨>` for β in simple-root coordinates.
    pub fn coroot_pairing(&self, beta: &[i64], i: usize) -> i64 {
        (0..self.rank()).map(|j| beta[j] * self.a[i][j]).sum()
    }
}

fn symmetrizers(a: &[Vec<i64>]) -> Result<Vec<u32>> {
    let r = a.len();
    let mut d: Vec<Option<BigRational>> = vec![None; r];
    for start in 0..r {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(BigRational::from_integer(1.into()));
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..r {
                if i == j || a[i][j] == 0 {
                    continue;
                }
                if a[j][i] == 0 {
                    return Err(Error::InvalidCartanDatum("asymmetric zero pattern".into()));
                }
                // d_i a_ij = d_j a_ji
                let dj = d[i].clone().unwrap() * BigRational::new(a[i][j].into(), a[j][i].into());
                match &d[j] {
                    None => {
                        d[j] = Some(dj);
                        queue.push_back(j);
                    }
                    Some(x) if *x != dj => {
                        return Err(Error::InvalidCartanDatum("not symmetrizable".into()))
                    }
                    _ => {}
                }
            }
        }
    }
    // scale each component so the smallest value is 1 and all are integers
    let d: Vec<BigRational> = d.into_iter().map(|x| x.unwrap()).collect();
    let mut out = vec![0u32; r];
    let components = components(a);
    for comp in components {
        let lcm_den = comp
            .iter()
            .fold(num_bigint::BigInt::from(1), |acc, &i| num_integer::lcm(acc, d[i].denom().clone()));
        let ints: Vec<num_bigint::BigInt> = comp.iter().map(|&i| (&d[i] * &lcm_den).to_integer()).collect();
        let g = ints.iter().fold(num_bigint::BigInt::from(0), |acc, x| num_integer::gcd(acc, x.clone()));
        for (k, &i) in comp.iter().enumerate() {
            let v: num_bigint::BigInt = &ints[k] / &g;
            if v <= 0.into() {
                return Err(Error::InvalidCartanDatum("nonpositive symmetrizer".into()));
            }
            out[i] = u32::try_from(v).map_err(|_| Error::InvalidCartanDatum("symmetrizer overflow".into()))?;
        }
    }
    Ok(out)
}

fn components(a: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let r = a.len();
    let mut seen = vec![false; r];
    let mut out = Vec::new();
    for s in 0..r {
        if seen[s] {
            continue;
        }
        let mut comp = vec![];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..r {
                if !seen[j] && a[i][j] != 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

/// Cartan matrix of a finite type in Bourbaki numbering.
pub fn build_cartan(series: char, rank: usize) -> Result<CartanDatum> {
    let series = series.to_ascii_uppercase();
    let invalid = |reason: &str| Error::InvalidCartanType {
        series: series.to_string(),
        rank,
        reason: reason.to_string(),
    };
    let min_rank = match series {
        'A' => 1,
        'B' | 'C' => 2,
        'D' => 4,
        'E' => 6,
        'F' => 4,
        'G' => 2,
        _ => return Err(invalid("unknown series")),
    };
    if rank < min_rank {
        return Err(invalid("rank below the series minimum"));
    }
    match series {
        'E' if rank > 8 => return Err(invalid("E exists only in ranks 6, 7, 8")),
        'F' if rank != 4 => return Err(invalid("F exists only in rank 4")),
        'G' if rank != 2 => return Err(invalid("G exists only in rank 2")),
        _ => {}
    }
    let n = rank;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    match series {
        'A' => (0..n - 1).for_each(|i| link(i, i + 1, -1, -1)),
        'B' => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 2, n - 1, -1, -2);
        }
        'C' => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 2, n - 1, -2, -1);
        }
        'D' => {
            (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(n - 3, n - 1, -1, -1);
        }
        'E' => {
            // 1-3-4-5-6-7-8 with 2 attached to 4
            link(0, 2, -1, -1);
            link(1, 3, -1, -1);
            (2..n - 1).for_each(|i| link(i, i + 1, -1, -1));
        }
        'F' => {
            link(0, 1, -1, -1);
            link(1, 2, -1, -2);
            link(2, 3, -1, -1);
        }
        'G' => link(0, 1, -3, -1),
        _ => unreachable!(),
    }
    let label = format!("{}{}", series, rank);
    CartanDatum::from_matrix(&label, a)
}

/// Parses labels such as `A2`, `b2`, `G2`.
pub fn parse_type(s: &str) -> Result<CartanDatum> {
    let mut chars = s.trim().chars();
    let series = chars.next().ok_or_else(|| Error::Config {
        field: "type".into(),
        reason: "empty type".into(),
    })?;
    let rank: usize = chars.as_str().parse().map_err(|_| Error::Config {
        field: "type".into(),
        reason: format!("cannot read rank from {s:?}"),
    })?;
    build_cartan(series, rank)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootList {
    /// Positive roots in simple-root coordinates, sorted by height then lexicographically.
    pub roots: Vec<Vec<i64>>,
    pub heights: Vec<i64>,
}

/// Positive roots via root strings: `β + α_i` is a root iff `p - <β, α_i^∨> > 0`,
/// where `p` is the largest integer with `β - p α_i` a root.
pub fn positive_roots(c: &CartanDatum) -> RootList {
    let r = c.rank();
    let mut by_height: Vec<Vec<Vec<i64>>> = vec![];
    let simple: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| (i == j) as i64).collect())
        .collect();
    let mut all: std::collections::BTreeSet<Vec<i64>> = simple.iter().cloned().collect();
    by_height.push(simple);
    loop {
        let mut next = std::collections::BTreeSet::new();
        for beta in by_height.last().unwrap() {
            for i in 0..r {
                let mut p = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if all.contains(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - c.coroot_pairing(beta, i) > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    next.insert(up);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        by_height.push(next.into_iter().collect());
    }
    let roots: Vec<Vec<i64>> = by_height.into_iter().flatten().collect();
    let heights = roots.iter().map(|b| b.iter().sum()).collect();
    RootList { roots, heights }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylElement {
    /// Reduced word as simple reflection indices, leftmost applied last.
    pub word: Vec<usize>,
    pub length: usize,
    /// Action on simple-root coordinates (row-major r×r).
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylGroupTable {
    pub elements: Vec<WeylElement>,
}

impl WeylGroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn length_counts(&self) -> Vec<usize> {
        let max = self.elements.iter().map(|e| e.length).max().unwrap_or(0);
        let mut out = vec![0; max + 1];
        for e in &self.elements {
            out[e.length] += 1;
        }
        out
    }

    pub fn longest_length(&self) -> usize {
        self.length_counts().len() - 1
    }
}

/// Breadth-first enumeration by length; elements are deduplicated by their matrix.
pub fn weyl_table(c: &CartanDatum, cap: usize) -> Result<WeylGroupTable> {
    let r = c.rank();
    let identity: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| (i == j) as i64).collect())
        .collect();
    let mut seen: HashMap<Vec<Vec<i64>>, ()> = HashMap::new();
    seen.insert(identity.clone(), ());
    let mut elements = vec![WeylElement {
        word: vec![],
        length: 0,
        matrix: identity,
    }];
    let mut frontier = vec![0usize];
    let mut length = 0;
    while !frontier.is_empty() {
        length += 1;
        let mut next = vec![];
        for &idx in &frontier {
            for i in 0..r {
                // s_i * w: apply s_i to every column image
                let m = &elements[idx].matrix;
                let cols: Vec<Vec<i64>> = (0..r)
                    .map(|k| c.reflect(i, &(0..r).map(|row| m[row][k]).collect::<Vec<_>>()))
                    .collect();
                let new: Vec<Vec<i64>> = (0..r).map(|row| (0..r).map(|k| cols[k][row]).collect()).collect();
                if seen.contains_key(&new) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::WeylOverflow { cap });
                }
                seen.insert(new.clone(), ());
                let mut word = vec![i];
                word.extend(elements[idx].word.iter().copied());
                elements.push(WeylElement {
                    word,
                    length,
                    matrix: new,
                });
                next.push(elements.len() - 1);
            }
        }
        frontier = next;
    }
    Ok(WeylGroupTable { elements })
}

/// Betti numbers of the flag variety: `b_{2k} = #{w : ℓ(w) = k}`, odd degrees zero.
pub fn flag_betti(table: &WeylGroupTable) -> Vec<usize> {
    let counts = table.length_counts();
    let mut out = vec![0; 2 * (counts.len() - 1) + 1];
    for (k, n) in counts.iter().enumerate() {
        out[2 * k] = *n;
    }
    out
}

/// Number of multisets of positive roots summing to `beta`.
pub fn kostant(roots: &RootList, beta: &[i64]) -> u64 {
    if beta.iter().any(|&x| x < 0) {
        return 0;
    }
    // unbounded coin change over vector-valued coins
    let dims: Vec<usize> = beta.iter().map(|&x| x as usize + 1).collect();
    let size: usize = dims.iter().product();
    let index = |v: &[usize]| -> usize {
        v.iter().zip(&dims).fold(0, |acc, (x, d)| acc * d + x)
    };
    let mut table = vec![0u64; size];
    table[0] = 1;
    let points: Vec<Vec<usize>> = (0..size)
        .map(|mut k| {
            let mut v = vec![0; dims.len()];
            for i in (0..dims.len()).rev() {
                v[i] = k % dims[i];
                k /= dims[i];
            }
            v
        })
        .collect();
    for root in &roots.roots {
        for p in &points {
            if p.iter().zip(root).all(|(x, &r)| *x as i64 >= r) {
                let prev: Vec<usize> = p.iter().zip(root).map(|(x, &r)| x - r as usize).collect();
                let add = table[index(&prev)];
                table[index(p)] += add;
            }
        }
    }
    table[index(&beta.iter().map(|&x| x as usize).collect::<Vec<_>>())]
}

/// Graded coinvariant algebra `Q[t_1..t_r] / (invariants of positive degree)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohRing {
    /// Dimensions indexed by cohomological degree (generators in degree 2).
    pub dims: Vec<usize>,
    /// False when the rank exceeded the cap and only dimensions were produced.
    pub ring_computed: bool,
    /// Basis monomials (exponent vectors) per polynomial degree.
    pub basis: Vec<Vec<Vec<u32>>>,
    /// `structure[(a, b)] = coefficients of basis[a]*basis[b]`, keyed by flat basis index.
    pub structure: BTreeMap<String, Vec<QScalar>>,
    /// Minimal relation counts per cohomological degree.
    pub relation_degrees: Vec<usize>,
    /// Number of degree-2 generators.
    pub generators: usize,
}

type Monomial = Vec<u32>;
type Polynomial = BTreeMap<Monomial, BigRational>;

fn monomials(r: usize, deg: u32) -> Vec<Monomial> {
    if r == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    for first in (0..=deg).rev() {
        for mut rest in monomials(r - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn poly_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut out = Polynomial::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let e = out.entry(m).or_insert_with(BigRational::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Image of a monomial under the linear substitution `t_i -> sum_j m[j][i] t_j`.
fn act(matrix: &[Vec<i64>], mono: &Monomial) -> Polynomial {
    let r = mono.len();
    let mut acc: Polynomial = BTreeMap::from([(vec![0; r], BigRational::from_integer(1.into()))]);
    for (i, &e) in mono.iter().enumerate() {
        let lin: Polynomial = (0..r)
            .filter(|&j| matrix[j][i] != 0)
            .map(|j| {
                let mut m = vec![0; r];
                m[j] = 1;
                (m, BigRational::from_integer(matrix[j][i].into()))
            })
            .collect();
        for _ in 0..e {
            acc = poly_mul(&acc, &lin);
        }
    }
    acc
}

fn to_row(p: &Polynomial, basis: &[Monomial]) -> Vec<QScalar> {
    basis
        .iter()
        .map(|m| p.get(m).map(|c| QScalar::from_rational(c.clone())).unwrap_or_default())
        .collect()
}

/// Coinvariant algebra computed degree by degree with the Reynolds operator.
pub fn flag_ring(c: &CartanDatum, table: &WeylGroupTable, rank_cap: usize) -> CohRing {
    let r = c.rank();
    let top = table.longest_length() as u32;
    let betti = flag_betti(table);
    if r > rank_cap {
        return CohRing {
            dims: betti,
            ring_computed: false,
            basis: vec![],
            structure: BTreeMap::new(),
            relation_degrees: vec![],
            generators: r,
        };
    }
    let order = BigRational::from_integer((table.order() as i64).into());
    // invariants R_k and ideal components I_k
    let mut invariants: Vec<Vec<Polynomial>> = vec![];
    let mut ideal: Vec<Echelon> = vec![];
    let mut basis: Vec<Vec<Monomial>> = vec![];
    let mut dims_poly = vec![];
    let mut relation_counts = vec![];
    for k in 0..=top + 1 {
        let monos = monomials(r, k);
        let mut ech = Echelon::empty(monos.len());
        // products of lower invariants with all polynomials of complementary degree
        for j in 1..k {
            for inv in &invariants[j as usize] {
                for m in monomials(r, k - j) {
                    let mono_poly: Polynomial = BTreeMap::from([(m, BigRational::from_integer(1.into()))]);
                    ech.insert(to_row(&poly_mul(inv, &mono_poly), &monos));
                }
            }
        }
        let rank_before = ech.rank();
        let mut new_invs = vec![];
        if k > 0 {
            let inv_ech_rows: Vec<Polynomial> = monos
                .iter()
                .map(|m| {
                    let mut sum = Polynomial::new();
                    for w in &table.elements {
                        for (mm, cc) in act(&w.matrix, m) {
                            let e = sum.entry(mm).or_insert_with(BigRational::zero);
                            *e += cc;
                        }
                    }
                    sum.retain(|_, c| !c.is_zero());
                    sum.into_iter().map(|(mm, cc)| (mm, cc / &order)).collect()
                })
                .collect();
            for p in inv_ech_rows {
                if p.is_empty() {
                    continue;
                }
                if ech.insert(to_row(&p, &monos)) {
                    new_invs.push(p);
                }
            }
        }
        relation_counts.push(ech.rank() - rank_before);
        invariants.push(new_invs);
        let free: Vec<Monomial> = ech.free_columns().into_iter().map(|i| monos[i].clone()).collect();
        dims_poly.push(free.len());
        basis.push(free);
        ideal.push(ech);
    }
    // structure constants in the standard-monomial basis
    let flat: Vec<(usize, Monomial)> = basis
        .iter()
        .enumerate()
        .flat_map(|(k, ms)| ms.iter().map(move |m| (k, m.clone())))
        .collect();
    let mut structure = BTreeMap::new();
    for (ia, (ka, ma)) in flat.iter().enumerate() {
        for (ib, (kb, mb)) in flat.iter().enumerate() {
            let k = ka + kb;
            let coeffs = if k > top as usize + 1 {
                vec![]
            } else {
                let monos = monomials(r, k as u32);
                let prod: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                let row: Vec<QScalar> = monos
                    .iter()
                    .map(|m| if *m == prod { QScalar::one() } else { QScalar::zero() })
                    .collect();
                ideal[k].quotient_coords(&row)
            };
            structure.insert(format!("{},{}", ia, ib), coeffs);
        }
    }
    let mut dims = vec![0; (2 * top + 1) as usize];
    for (k, d) in dims_poly.iter().enumerate().take(top as usize + 1) {
        dims[2 * k] = *d;
    }
    let mut relation_degrees = vec![0; (2 * top + 3) as usize];
    for (k, n) in relation_counts.iter().enumerate() {
        relation_degrees[2 * k] = *n;
    }
    CohRing {
        dims,
        ring_computed: true,
        basis,
        structure,
        relation_degrees,
        generators: r,
    }
}
