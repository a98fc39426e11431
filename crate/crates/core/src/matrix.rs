//! Dense exact rational matrices.
//!
//! Dimensions here are tiny (at most a few dozen), so a straightforward
//! row-major `Vec<Rat>` with fraction-free-ish Gaussian elimination is all
//! that is needed.

use crate::error::{Error, Result};
use crate::scalar::{rat, Rat};
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for QMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| crate::scalar::render(self.at(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|r| r.len() == nc));
        QMat {
            rows: nr,
            cols: nc,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> QMat {
        QMat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) + other.at(r, c))
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) - other.at(r, c))
    }

    pub fn neg(&self) -> QMat {
        QMat::from_fn(self.rows, self.cols, |r, c| -self.at(r, c).clone())
    }

    pub fn scale(&self, s: &Rat) -> QMat {
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) * s)
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = QMat::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(r, c) + a * b;
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Rat {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.at(i, i).clone()).sum()
    }

    /// Commutator `self*other - other*self`.
    pub fn comm(&self, other: &QMat) -> QMat {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product, row-major pairing: index `(i,j) -> i*cols2 + j`.
    pub fn kron(&self, other: &QMat) -> QMat {
        let mut out = QMat::zero(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.at(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + k, j * other.cols + l, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> QMat {
        QMat::from_fn(rows.len(), cols.len(), |r, c| {
            self.at(rows[r], cols[c]).clone()
        })
    }

    /// Row-reduces a copy and returns (rank, reduced matrix).
    fn row_echelon(&self) -> (usize, QMat) {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot else { continue };
            for c in 0..m.cols {
                let tmp = m.at(p, c).clone();
                let v = m.at(rank, c).clone();
                m.set(p, c, v);
                m.set(rank, c, tmp);
            }
            let inv = m.at(rank, col).clone().recip();
            for c in 0..m.cols {
                let v = m.at(rank, c) * &inv;
                m.set(rank, c, v);
            }
            for r in 0..m.rows {
                if r != rank && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.at(r, c) - &factor * m.at(rank, c);
                        m.set(r, c, v);
                    }
                }
            }
            rank += 1;
        }
        (rank, m)
    }

    pub fn rank(&self) -> usize {
        self.row_echelon().0
    }

    /// Exact inverse via Gauss-Jordan on `[self | I]`.
    pub fn inverse(&self) -> Result<QMat> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = QMat::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, n + r, Rat::one());
        }
        let (_, red) = aug.row_echelon();
        for i in 0..n {
            if !red.at(i, i).is_one() {
                return Err(Error::SingularLeading);
            }
        }
        Ok(QMat::from_fn(n, n, |r, c| red.at(r, n + c).clone()))
    }

    /// Solves `self * x = rhs` for one solution, or None if inconsistent.
    /// `self` need not be square.
    pub fn solve(&self, rhs: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = QMat::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, rhs[r].clone());
        }
        let (_, red) = aug.row_echelon();
        let mut x = vec![Rat::zero(); self.cols];
        for r in 0..self.rows {
            let lead = (0..self.cols).find(|&c| !red.at(r, c).is_zero());
            match lead {
                Some(c) => x[c] = red.at(r, self.cols).clone(),
                None => {
                    if !red.at(r, self.cols).is_zero() {
                        return None;
                    }
                }
            }
        }
        // Verify: free variables were set to zero, so check the candidate.
        for r in 0..self.rows {
            let mut acc = Rat::zero();
            for c in 0..self.cols {
                acc += self.at(r, c) * &x[c];
            }
            if &acc != &rhs[r] {
                return None;
            }
        }
        Some(x)
    }

    pub fn pow(&self, e: usize) -> QMat {
        assert!(self.is_square());
        let mut acc = QMat::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn render_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| crate::scalar::render(self.at(r, c))).collect())
            .collect()
    }

    /// Jordan type of a nilpotent matrix as a nonincreasing partition.
    pub fn jordan_type(&self) -> Vec<usize> {
        assert!(self.is_square());
        let n = self.rows;
        // ranks of powers: number of blocks of size >= k is rank(f^{k-1}) - rank(f^k)
        let mut ranks = vec![n];
        let mut p = QMat::identity(n);
        loop {
            p = p.mul(self);
            let r = p.rank();
            ranks.push(r);
            if r == 0 {
                break;
            }
            if ranks.len() > n + 1 {
                panic!("jordan_type called on non-nilpotent matrix");
            }
        }
        let mut blocks = Vec::new();
        for k in 1..ranks.len() {
            let count = ranks[k - 1] - ranks[k];
            // count = number of blocks of size >= k
            blocks.push(count);
        }
        let mut partition = Vec::new();
        for size in (1..=blocks.len()).rev() {
            let at_least_this = blocks[size - 1];
            let at_least_next = if size < blocks.len() { blocks[size] } else { 0 };
            for _ in 0..(at_least_this - at_least_next) {
                partition.push(size);
            }
        }
        partition.sort_unstable_by(|a, b| b.cmp(a));
        partition
    }
}

/// Scalar multiple of the identity.
pub fn scalar_mat(n: usize, s: i64) -> QMat {
    QMat::identity(n).scale(&rat(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;

    #[test]
    fn inverse_round_trip() {
        let m = QMat::from_rows(vec![
            vec![rat(2), rat(3)],
            vec![rat(1), rat(4)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(2));
        assert_eq!(inv.mul(&m), QMat::identity(2));
        assert_eq!(*inv.at(0, 0), frac(4, 5));
    }

    #[test]
    fn singular_is_detected() {
        let m = QMat::from_rows(vec![
            vec![rat(1), rat(2)],
            vec![rat(2), rat(4)],
        ]);
        assert!(m.inverse().is_err());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kron_row_major() {
        let a = QMat::from_rows(vec![vec![rat(1), rat(2)], vec![rat(0), rat(1)]]);
        let b = QMat::identity(2);
        let k = a.kron(&b);
        assert_eq!(*k.at(0, 2), rat(2)); // (0,0)x(1, ...) pairing
        assert_eq!(k.rows, 4);
    }

    #[test]
    fn jordan_type_of_chains() {
        // single 3-chain plus a fixed vector: type (3,1)
        let mut f = QMat::zero(4, 4);
        f.set(1, 0, rat(1));
        f.set(2, 1, rat(1));
        assert_eq!(f.jordan_type(), vec![3, 1]);
        let z = QMat::zero(2, 2);
        assert_eq!(z.jordan_type(), vec![1, 1]);
    }

    #[test]
    fn solve_underdetermined() {
        let m = QMat::from_rows(vec![vec![rat(1), rat(1)]]);
        let x = m.solve(&[rat(3)]).unwrap();
        assert_eq!(&x[0] + &x[1], rat(3));
        let inconsistent = QMat::from_rows(vec![vec![rat(0), rat(0)]]);
        assert!(inconsistent.solve(&[rat(1)]).is_none());
    }
}
