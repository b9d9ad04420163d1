//! Dense exact linear algebra over `QScalar`.

use num_rational::BigRational;

use crate::qfield::{Poly, QScalar};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<QScalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![QScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, QScalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<QScalar>>, cols: usize) -> Self {
        let r = rows.len();
        let data: Vec<QScalar> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * cols);
        Matrix { rows: r, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &QScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: QScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[QScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[QScalar]) -> Vec<QScalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(QScalar::zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &QScalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<QScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self.to_rows(), self.cols).rank()
    }

    /// Basis of `{v : self * v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<QScalar>> {
        Echelon::new(self.to_rows(), self.cols).nullspace()
    }
}

/// Reduced row echelon form of a list of row vectors, with incremental insertion.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub cols: usize,
    /// Reduced rows, each with pivot coefficient 1; sorted by pivot column.
    pub rows: Vec<Vec<QScalar>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn empty(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn new(rows: Vec<Vec<QScalar>>, cols: usize) -> Self {
        let mut e = Echelon::empty(cols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows in place.
    pub fn reduce(&self, v: &mut [QScalar]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    v[j] = &v[j] - &(&c * x);
                }
            }
        }
    }

    pub fn contains(&self, v: &[QScalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Inserts a row; returns true when it increased the rank.
    pub fn insert(&mut self, mut v: Vec<QScalar>) -> bool {
        assert_eq!(v.len(), self.cols);
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        // keep the form fully reduced
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (j, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    row[j] = &row[j] - &(&c * x);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| self.pivots.binary_search(c).is_err()).collect()
    }

    /// Kernel of the matrix whose rows were inserted.
    pub fn nullspace(&self) -> Vec<Vec<QScalar>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![QScalar::zero(); self.cols];
                v[f] = QScalar::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !row[f].is_zero() {
                        v[p] = -&row[f];
                    }
                }
                v
            })
            .collect()
    }

    /// Coordinates of the reduction of `v` on the free columns (a complement basis).
    pub fn quotient_coords(&self, v: &[QScalar]) -> Vec<QScalar> {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        self.free_columns().into_iter().map(|c| w[c].clone()).collect()
    }
}

/// Solves `sum_k x_k * basis[k] = target` when possible; basis vectors need not be independent.
pub fn solve_in_span(basis: &[Vec<QScalar>], target: &[QScalar]) -> Option<Vec<QScalar>> {
    let n = basis.len();
    let dim = target.len();
    // augmented rows: [basis_k | e_k]
    let mut e = Echelon::empty(dim + n);
    for (k, b) in basis.iter().enumerate() {
        let mut row = b.clone();
        row.extend((0..n).map(|j| if j == k { QScalar::one() } else { QScalar::zero() }));
        e.insert(row);
    }
    let mut t = target.to_vec();
    t.extend((0..n).map(|_| QScalar::zero()));
    e.reduce(&mut t);
    if t[..dim].iter().any(|x| !x.is_zero()) {
        return None;
    }
    // t now equals target - sum x_k basis_k in the first block, encoded as -x in the tail
    Some(t[dim..].iter().map(|x| -x).collect())
}

/// Rank by fraction-free (Bareiss) elimination over Q[q]. Rows are first cleared of
/// denominators and negative powers of q; row scaling by nonzero elements keeps the rank.
pub fn rank_fraction_free(rows: &[Vec<QScalar>]) -> usize {
    let mut m: Vec<Vec<Poly>> = rows.iter().map(|r| clear_row(r)).collect();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = Poly::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for i in rank + 1..nrows {
            let a = m[i][col].clone();
            for j in col..ncols {
                let t = &(&pivot * &m[i][j]) - &(&a * &m[rank][j]);
                m[i][j] = t.div_exact(&prev);
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

fn clear_row(r: &[QScalar]) -> Vec<Poly> {
    let min_shift = r.iter().filter(|x| !x.is_zero()).map(|x| x.shift()).min().unwrap_or(0);
    // product of distinct denominators clears every entry
    let mut dens: Vec<Poly> = Vec::new();
    for x in r {
        if !x.is_zero() && !x.denominator().is_one() && !dens.contains(x.denominator()) {
            dens.push(x.denominator().clone());
        }
    }
    let common = dens.iter().fold(Poly::one(), |acc, d| &acc * d);
    r.iter()
        .map(|x| {
            if x.is_zero() {
                return Poly::zero();
            }
            let others = &common.div_exact(x.denominator());
            let n = x.numerator().shift_up((x.shift() - min_shift) as usize);
            &n * others
        })
        .collect()
}

/// Convenience: QScalar rows from small integers.
pub fn int_rows(rows: &[&[i64]]) -> Vec<Vec<QScalar>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| QScalar::from_int(x)).collect())
        .collect()
}

pub fn rational(n: i64, d: i64) -> QScalar {
    QScalar::from_rational(BigRational::new(n.into(), d.into()))
}

pub fn is_identity(m: &Matrix) -> bool {
    m.rows == m.cols
        && (0..m.rows).all(|i| {
            (0..m.cols).all(|j| {
                let x = m.get(i, j);
                if i == j {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QScalar {
        QScalar::parse(s).unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = Matrix::from_rows(int_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]), 3);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn bareiss_agrees_with_field_elimination() {
        let rows = vec![
            vec![q("q + q^-1"), q("1"), q("q^2")],
            vec![q("q^2 + 1"), q("q"), q("q^3")],
            vec![q("1/(q - 1)"), q("2"), q("0")],
        ];
        let e = Echelon::new(rows.clone(), 3);
        assert_eq!(rank_fraction_free(&rows), e.rank());
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn span_solver() {
        let basis = int_rows(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]]);
        let t = int_rows(&[&[2, 3, 5]])[0].clone();
        let x = solve_in_span(&basis, &t).unwrap();
        let mut acc = vec![QScalar::zero(); 3];
        for (c, b) in x.iter().zip(&basis) {
            for j in 0..3 {
                acc[j] = &acc[j] + &(c * &b[j]);
            }
        }
        assert_eq!(acc, t);
        assert!(solve_in_span(&basis, &int_rows(&[&[0, 0, 1]])[0]).is_none());
    }
}
