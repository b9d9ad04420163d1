//! Ext⁰, Ext¹ and an upper bound for Ext² from the presentation complex
//! `⊕ P(n) ← ⊕ P(t(a)) ← ⊕ P(t(r))` with Fox derivatives of the defining relations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::modules::GradedModule;
use crate::presentation::{Path, Presentation};
use crate::qfield::QScalar;

use super::resolution::ModuleAction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowDegExt {
    pub ext0: usize,
    pub ext1: usize,
    /// Homology of the truncated complex at relations; bounds Ext² from above.
    pub ext2_upper: usize,
    pub cochain_dims: [usize; 3],
}

struct Block {
    offset: usize,
    rows: usize,
    cols: usize,
}

fn blocks(items: impl Iterator<Item = (u32, u32)>, v: &ModuleAction, w: &ModuleAction) -> (Vec<Option<Block>>, usize) {
    let mut off = 0;
    let mut out = vec![];
    for (s, t) in items {
        let (rows, cols) = (w.dim(t), v.dim(s));
        if rows * cols == 0 {
            out.push(None);
            continue;
        }
        out.push(Some(Block { offset: off, rows, cols }));
        off += rows * cols;
    }
    (out, off)
}

/// Adds `L · E_ab · R` for every unit `E_ab` of `src_block` into column `src.offset + a·cols + b`.
fn add_sandwich(m: &mut Matrix, coef: &QScalar, left: &Matrix, right: &Matrix, src: &Block, dst: &Block) {
    for a in 0..src.rows {
        for b in 0..src.cols {
            let col = src.offset + a * src.cols + b;
            for r in 0..dst.rows {
                let l = left.get(r, a);
                if l.is_zero() {
                    continue;
                }
                for s in 0..dst.cols {
                    let x = right.get(b, s);
                    if x.is_zero() {
                        continue;
                    }
                    let row = dst.offset + r * dst.cols + s;
                    let cur = m.get(row, col).clone();
                    m.set(row, col, &cur + &(coef * &(l * x)));
                }
            }
        }
    }
}

pub fn low_degree_ext(p: &Presentation, v: &GradedModule, w: &GradedModule) -> Result<LowDegExt> {
    if let Some(win) = &p.window {
        let gap = v.boundary_distance(win.radius).min(w.boundary_distance(win.radius));
        if gap < 2 {
            return Err(Error::MarginViolation(format!(
                "modules lie {gap} from the window boundary, need at least 2"
            )));
        }
    }
    let q = &p.quiver;
    let mut va = ModuleAction::new(v, q)?;
    let mut wa = ModuleAction::new(w, q)?;
    let nv = q.vertices.len() as u32;
    let (b0, d0) = blocks((0..nv).map(|x| (x, x)), &va, &wa);
    let (b1, d1) = blocks(q.arrows.iter().map(|a| (a.src, a.tgt)), &va, &wa);
    let rel_ends: Vec<(u32, u32)> = p
        .relations
        .iter()
        .map(|r| {
            let t = r.poly.terms.keys().next().map(|x| q.target(x)).unwrap_or(r.vertex);
            (r.vertex, t)
        })
        .collect();
    let (b2, d2) = blocks(rel_ends.iter().copied(), &va, &wa);

    let mut delta0 = Matrix::zeros(d1, d0);
    for (id, a) in q.arrows.iter().enumerate() {
        let Some(dst) = &b1[id] else { continue };
        let path = Path { src: a.src, word: vec![id as u32] };
        let wmat = wa.act(&path);
        let vmat = va.act(&path);
        if let Some(src) = &b0[a.src as usize] {
            add_sandwich(&mut delta0, &QScalar::one(), &wmat, &Matrix::identity(src.cols), src, dst);
        }
        if let Some(src) = &b0[a.tgt as usize] {
            add_sandwich(&mut delta0, &-QScalar::one(), &Matrix::identity(src.rows), &vmat, src, dst);
        }
    }

    let mut delta1 = Matrix::zeros(d2, d1);
    for (ri, r) in p.relations.iter().enumerate() {
        let Some(dst) = &b2[ri] else { continue };
        for (path, coef) in &r.poly.terms {
            let k = path.word.len();
            for j in 0..k {
                let a = path.word[j] as usize;
                let Some(src) = &b1[a] else { continue };
                let head = Path {
                    src: q.arrows[a].tgt,
                    word: path.word[..j].to_vec(),
                };
                let tail = Path {
                    src: path.src,
                    word: path.word[j + 1..].to_vec(),
                };
                let left = if head.is_empty() { Matrix::identity(src.rows) } else { wa.act(&head) };
                let right = if tail.is_empty() { Matrix::identity(src.cols) } else { va.act(&tail) };
                add_sandwich(&mut delta1, coef, &left, &right, src, dst);
            }
        }
    }
    let r0 = delta0.rank();
    let r1 = delta1.rank();
    Ok(LowDegExt {
        ext0: d0 - r0,
        ext1: d1 - r1 - r0,
        ext2_upper: d2 - r1,
        cochain_dims: [d0, d1, d2],
    })
}
