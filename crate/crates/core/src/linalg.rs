//! Dense matrices over a [`Field`] with exact elimination.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FieldElement>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn select_rows(&self, which: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(which.len(), self.cols);
        for (dst, &src) in which.iter().enumerate() {
            out.data[dst * self.cols..(dst + 1) * self.cols].copy_from_slice(self.row(src));
        }
        out
    }

    pub fn select_cols(&self, which: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, which.len());
        for r in 0..self.rows {
            for (dst, &src) in which.iter().enumerate() {
                out.set(r, dst, self.get(r, src));
            }
        }
        out
    }

    pub fn mul_vec(&self, field: &Field, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(FieldElement::ZERO, |acc, (&a, &x)| field.mul_add(acc, a, x))
            })
            .collect())
    }

    pub fn mul(&self, field: &Field, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = field.mul_add(out.get(r, c), a, other.get(k, c));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Rank by fraction-free elimination: rows are combined as
    /// `pivot * row - lead * pivot_row`, so no inverses are taken.
    pub fn rank(&self, field: &Field) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let pivot = m.get(rank, c);
            for r in rank + 1..m.rows {
                let lead = m.get(r, c);
                if lead.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = field.sub(
                        field.mul(pivot, m.get(r, j)),
                        field.mul(lead, m.get(rank, j)),
                    );
                    m.set(r, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Gauss-Jordan inverse; `Error::Singular` if the matrix is not invertible.
    pub fn inverse(&self, field: &Field) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a.get(r, c).is_zero())
                .ok_or_else(|| Error::Singular(format!("no pivot in column {c} of {n}x{n}")))?;
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            let scale = field.inv(a.get(c, c))?;
            a.scale_row(field, c, scale);
            inv.scale_row(field, c, scale);
            for r in 0..n {
                if r == c {
                    continue;
                }
                let factor = a.get(r, c);
                if factor.is_zero() {
                    continue;
                }
                a.sub_scaled_row(field, r, c, factor);
                inv.sub_scaled_row(field, r, c, factor);
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = b` for square invertible `self`.
    pub fn solve(&self, field: &Field, b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.inverse(field)?.mul_vec(field, b)
    }

    /// Indices of the first maximal set of linearly independent rows, scanning
    /// top to bottom.
    pub fn independent_rows(&self, field: &Field) -> Vec<usize> {
        // reduced basis rows keyed by their pivot column
        let mut basis: Vec<(usize, Vec<FieldElement>)> = Vec::new();
        let mut chosen = Vec::new();
        for r in 0..self.rows {
            if basis.len() == self.cols {
                break;
            }
            let mut v = self.row(r).to_vec();
            for (pc, b) in &basis {
                let lead = v[*pc];
                if lead.is_zero() {
                    continue;
                }
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = field.sub(*x, field.mul(lead, y));
                }
            }
            if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
                let scale = field.inv(v[pc]).expect("nonzero");
                for x in v.iter_mut() {
                    *x = field.mul(*x, scale);
                }
                // keep earlier basis rows reduced in the new pivot column
                for (_, b) in basis.iter_mut() {
                    let lead = b[pc];
                    if lead.is_zero() {
                        continue;
                    }
                    for (x, &y) in b.iter_mut().zip(&v) {
                        *x = field.sub(*x, field.mul(lead, y));
                    }
                }
                basis.push((pc, v));
                chosen.push(r);
            }
        }
        chosen
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, field: &Field, r: usize, s: FieldElement) {
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = field.mul(*x, s);
        }
    }

    // row[r] -= factor * row[src]
    fn sub_scaled_row(&mut self, field: &Field, r: usize, src: usize, factor: FieldElement) {
        for c in 0..self.cols {
            let v = field.sub(self.get(r, c), field.mul(factor, self.get(src, c)));
            self.set(r, c, v);
        }
    }
}

/// The square Vandermonde matrix `V[t][w] = points[w]^t`.
pub fn vandermonde(field: &Field, points: &[FieldElement]) -> Matrix {
    let n = points.len();
    let mut m = Matrix::zeros(n, n);
    for (w, &x) in points.iter().enumerate() {
        let mut p = field.one();
        for t in 0..n {
            m.set(t, w, p);
            p = field.mul(p, x);
        }
    }
    m
}
