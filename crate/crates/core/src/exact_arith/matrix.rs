use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;

use super::Scalar;
use crate::error::{Error, Result};

/// Dense `rows × cols` matrix of exact scalars, row-major.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Solutions of `A x = b`: one particular solution (if consistent) plus a
/// basis of the kernel of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub particular: Option<Vec<Scalar>>,
    pub kernel: Vec<Vec<Scalar>>,
}

impl SolutionSet {
    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }

    pub fn is_unique(&self) -> bool {
        self.particular.is_some() && self.kernel.is_empty()
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: ExactMatrix,
    pub pivots: Vec<usize>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from integer rows; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(),
        )
        .expect("rectangular integer rows")
    }

    pub fn from_columns(cols: &[Vec<Scalar>], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch("column length".into()));
            }
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// `self - mu·I`
    pub fn shift_diagonal(&self, mu: &Scalar) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] -= mu;
        }
        Ok(m)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv();
            for j in c..m.cols {
                let x = &m[(r, j)] * &inv;
                m[(r, j)] = x;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let delta = &factor * &m[(r, j)];
                    m[(i, j)] -= delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the kernel in reduced echelon form: one vector per free
    /// column, with a 1 in that column and zeros in the other free columns.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[fc] = Scalar::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -matrix[(r, fc)].clone();
                }
                v
            })
            .collect()
    }

    /// Exact Gaussian elimination for `self · x = rhs`.
    pub fn solve_linear(&self, rhs: &[Scalar]) -> Result<SolutionSet> {
        if rhs.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "system has {} rows, rhs has {}",
                self.rows,
                rhs.len()
            )));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = rhs[i].clone();
        }
        let Rref { matrix, pivots } = aug.rref();
        let kernel = self.kernel();
        if pivots.last() == Some(&self.cols) {
            return Ok(SolutionSet { particular: None, kernel });
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix[(r, self.cols)].clone();
        }
        Ok(SolutionSet { particular: Some(x), kernel })
    }

    pub fn inverse(&self) -> Result<Option<Self>> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let Rref { matrix, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Ok(None);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = matrix[(i, n + j)].clone();
            }
        }
        Ok(Some(inv))
    }

    /// Basis of `ker(self - mu·I)`; empty when `mu` is not an eigenvalue.
    pub fn eigenspace(&self, mu: &Scalar) -> Result<Vec<Vec<Scalar>>> {
        Ok(self.shift_diagonal(mu)?.kernel())
    }

    /// Determinant by elimination.
    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            let inv = pivot.inv();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = &m[(i, c)] * &inv;
                for j in c..n {
                    let delta = &factor * &m[(c, j)];
                    m[(i, j)] -= delta;
                }
            }
        }
        Ok(det)
    }

    /// Maximum absolute row sum; defined for rational matrices only.
    pub fn infinity_norm(&self) -> Result<Scalar> {
        let mut best = Scalar::zero();
        for i in 0..self.rows {
            let mut s = Scalar::zero();
            for x in self.row(i) {
                let r = x.to_rational().ok_or_else(|| Error::NotRational(x.to_string()))?;
                s += Scalar::from_rational(num_traits::Signed::abs(r));
            }
            if s > best {
                best = s;
            }
        }
        Ok(best)
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Scalar::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::q;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn identity_solve() {
        let s = ExactMatrix::identity(3).solve_linear(&ints(&[1, 2, 3])).unwrap();
        assert_eq!(s.particular, Some(ints(&[1, 2, 3])));
        assert!(s.kernel.is_empty());
    }

    #[test]
    fn rank_one_kernel() {
        let m = ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        let s = m.solve_linear(&ints(&[0, 0])).unwrap();
        assert_eq!(s.kernel, vec![ints(&[-2, 1])]);
        assert!(s.is_consistent());
    }

    #[test]
    fn inconsistent_system_has_no_particular_solution() {
        let m = ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        let s = m.solve_linear(&ints(&[1, 0])).unwrap();
        assert!(s.particular.is_none());
        assert_eq!(s.kernel.len(), 1);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = ExactMatrix::identity(2);
        assert!(matches!(m.solve_linear(&ints(&[1])), Err(Error::DimensionMismatch(_))));
        let r = ExactMatrix::zeros(2, 3);
        assert!(matches!(r.eigenspace(&q(1, 1)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn diagonal_eigenspaces() {
        let m = ExactMatrix::diagonal(&ints(&[2, 3]));
        assert_eq!(m.eigenspace(&q(2, 1)).unwrap(), vec![ints(&[1, 0])]);
        assert!(m.eigenspace(&q(5, 1)).unwrap().is_empty());
    }

    #[test]
    fn inverse_and_determinant() {
        let m = ExactMatrix::from_ints(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap().unwrap();
        assert_eq!(m.try_mul(&inv).unwrap(), ExactMatrix::identity(2));
        assert_eq!(m.determinant().unwrap(), Scalar::one());
        let sing = ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().unwrap().is_none());
    }
}
