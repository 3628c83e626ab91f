//! Dense matrices of field elements with exact linear algebra.

use crate::error::{EngineError, Result};
use crate::field::FieldElement;
use crate::tower::{Endo, TowerSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<FieldElement>) -> Mat {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Mat::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat::new(rows, cols, vec![FieldElement::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = FieldElement::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut FieldElement {
        &mut self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Mat {
        Mat::new(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn apply_endo(&self, tower: &TowerSpec, endo: Endo, power: usize) -> Mat {
        self.map(|e| e.apply_endo(tower, endo, power))
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut m = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = m.at(i, j).add(&a.mul(b));
                    *m.at_mut(i, j) = cur;
                }
            }
        }
        m
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Exact determinant by fraction-field elimination.
    pub fn det(&self) -> FieldElement {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = FieldElement::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero());
            let Some(p) = pivot else {
                return FieldElement::zero();
            };
            if p != col {
                for j in 0..n {
                    let tmp = a.at(p, j).clone();
                    *a.at_mut(p, j) = a.at(col, j).clone();
                    *a.at_mut(col, j) = tmp;
                }
                det = det.neg();
            }
            let piv = a.at(col, col).clone();
            det = det.mul(&piv);
            let inv = piv.inv().expect("nonzero pivot");
            for r in col + 1..n {
                let factor = a.at(r, col).mul(&inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a.at(r, j).sub(&factor.mul(a.at(col, j)));
                    *a.at_mut(r, j) = v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(pivot, j).clone();
                    *a.at_mut(pivot, j) = a.at(col, j).clone();
                    *a.at_mut(col, j) = tmp;
                    let tmp = inv.at(pivot, j).clone();
                    *inv.at_mut(pivot, j) = inv.at(col, j).clone();
                    *inv.at_mut(col, j) = tmp;
                }
            }
            let piv_inv = a.at(col, col).inv().ok()?;
            for j in 0..n {
                let v = a.at(col, j).mul(&piv_inv);
                *a.at_mut(col, j) = v;
                let v = inv.at(col, j).mul(&piv_inv);
                *inv.at_mut(col, j) = v;
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for j in 0..n {
                    let v = a.at(r, j).sub(&factor.mul(a.at(col, j)));
                    *a.at_mut(r, j) = v;
                    let v = inv.at(r, j).sub(&factor.mul(inv.at(col, j)));
                    *inv.at_mut(r, j) = v;
                }
            }
        }
        Some(inv)
    }

    pub fn kronecker(&self, other: &Mat) -> Mat {
        let mut m = Mat::zero(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        *m.at_mut(i * other.rows + k, j * other.cols + l) =
                            a.mul(other.at(k, l));
                    }
                }
            }
        }
        m
    }

    /// Column-stacking vectorization: vec(B)[j*n + i] = B[i][j].
    pub fn vec_cols(&self) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.at(i, j).clone());
            }
        }
        out
    }

    /// Inverse of [`Mat::vec_cols`] for square matrices.
    pub fn unvec_cols(n: usize, v: &[FieldElement]) -> Mat {
        assert_eq!(v.len(), n * n);
        let mut m = Mat::zero(n, n);
        for j in 0..n {
            for i in 0..n {
                *m.at_mut(i, j) = v[j * n + i].clone();
            }
        }
        m
    }

    pub fn check_dims(&self, other: &Mat) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(EngineError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// Deterministic basis of the right nullspace of a field-element matrix
/// (reduced row echelon, free variables in column order, each vector scaled
/// to make its first nonzero coordinate one).
pub fn nullspace(m: &Mat) -> Vec<Vec<FieldElement>> {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.at(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let tmp = a.at(p, j).clone();
                *a.at_mut(p, j) = a.at(r, j).clone();
                *a.at_mut(r, j) = tmp;
            }
        }
        let inv = a.at(r, c).inv().expect("nonzero pivot");
        for j in 0..cols {
            let v = a.at(r, j).mul(&inv);
            *a.at_mut(r, j) = v;
        }
        for i in 0..rows {
            if i == r || a.at(i, c).is_zero() {
                continue;
            }
            let factor = a.at(i, c).clone();
            for j in 0..cols {
                let v = a.at(i, j).sub(&factor.mul(a.at(r, j)));
                *a.at_mut(i, j) = v;
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().copied().collect();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![FieldElement::zero(); cols];
        v[free] = FieldElement::one();
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = a.at(row, free).neg();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_int(n)
    }

    #[test]
    fn det_and_inverse() {
        let m = Mat::from_rows(vec![vec![fe(1), fe(2)], vec![fe(3), fe(4)]]);
        assert_eq!(m.det(), fe(-2));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
        let singular = Mat::from_rows(vec![vec![fe(1), fe(2)], vec![fe(2), fe(4)]]);
        assert!(singular.det().is_zero());
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn kronecker_vec_identity() {
        // vec(X Y Z) = (Z^T kron X) vec(Y)
        let x = Mat::from_rows(vec![vec![fe(1), fe(2)], vec![fe(0), fe(1)]]);
        let y = Mat::from_rows(vec![vec![fe(3), fe(1)], vec![fe(2), fe(5)]]);
        let z = Mat::from_rows(vec![vec![fe(1), fe(1)], vec![fe(4), fe(2)]]);
        let lhs = x.mul(&y).mul(&z).vec_cols();
        let m = z.transpose().kronecker(&x);
        let rhs: Vec<FieldElement> = {
            let v = y.vec_cols();
            (0..4)
                .map(|i| {
                    (0..4).fold(FieldElement::zero(), |acc, j| {
                        acc.add(&m.at(i, j).mul(&v[j]))
                    })
                })
                .collect()
        };
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn nullspace_basis() {
        let m = Mat::from_rows(vec![vec![fe(1), fe(2), fe(3)], vec![fe(2), fe(4), fe(6)]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let r0 = v[0].add(&v[1].mul(&fe(2))).add(&v[2].mul(&fe(3)));
            assert!(r0.is_zero());
        }
    }
}
