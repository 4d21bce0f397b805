//! Gaussian elimination over ℚ(n).

use std::collections::BTreeSet;

use super::ratfn::RationalFn;
use super::QfieldError;

/// Dense row-major matrix over ℚ(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<RationalFn>,
}

/// Reduced row echelon form plus the bookkeeping of how it was reached.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    /// `origin[i]` is the input row that was swapped into position `i`.
    pub origin: Vec<usize>,
    /// Integer `n` at which some pivot vanishes or some entry has a pole.
    pub excluded: BTreeSet<i64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![RationalFn::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, RationalFn::one());
        }
        m
    }

    /// Panics if rows are ragged.
    pub fn from_rows(rows: Vec<Vec<RationalFn>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &RationalFn {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: RationalFn) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[RationalFn] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<RationalFn>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[RationalFn]) -> Vec<RationalFn> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    /// `vᵀ M`.
    pub fn vec_mul(&self, v: &[RationalFn]) -> Vec<RationalFn> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|c| {
                (0..self.rows).fold(RationalFn::zero(), |acc, r| {
                    if v[r].is_zero() {
                        acc
                    } else {
                        &acc + &(&v[r] * self.get(r, c))
                    }
                })
            })
            .collect()
    }

    /// Specializes every entry at an integer `n`.
    pub fn specialize(&self, n: i64) -> Result<Matrix, QfieldError> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| x.specialize(n))
                .collect::<Result<_, _>>()?,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut origin: Vec<usize> = (0..self.rows).collect();
        let mut pivots = Vec::new();
        let mut excluded = BTreeSet::new();
        for x in &self.data {
            excluded.extend(x.integer_poles());
        }
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // prefer a constant pivot so fewer specializations are excluded
            let candidates: Vec<usize> = (r..m.rows).filter(|&i| !m.get(i, c).is_zero()).collect();
            let Some(&p) = candidates
                .iter()
                .find(|&&i| m.get(i, c).is_constant())
                .or(candidates.first())
            else {
                continue;
            };
            m.swap_rows(r, p);
            origin.swap(r, p);
            let piv = m.get(r, c).clone();
            excluded.extend(piv.integer_zeros());
            excluded.extend(piv.integer_poles());
            let inv = piv.inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            pivots,
            origin,
            excluded,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel `{x : M x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<RationalFn>> {
        let rr = self.rref();
        kernel_from_rref(&rr.matrix, &rr.pivots, self.cols)
    }

    /// Basis of the left kernel `{y : yᵀ M = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<RationalFn>> {
        self.transpose().kernel()
    }
}

fn kernel_from_rref(m: &Matrix, pivots: &[usize], cols: usize) -> Vec<Vec<RationalFn>> {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![RationalFn::zero(); cols];
            v[f] = RationalFn::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m.get(i, f);
            }
            v
        })
        .collect()
}

pub fn dot(a: &[RationalFn], b: &[RationalFn]) -> RationalFn {
    a.iter().zip(b).fold(RationalFn::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            &acc + &(x * y)
        }
    })
}

/// `A x = b` over ℚ(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: Matrix,
    pub rhs: Vec<RationalFn>,
}

/// General solution `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<RationalFn>,
    pub kernel: Vec<Vec<RationalFn>>,
    /// Integer `n` at which the elimination is not valid as a specialization.
    pub excluded: Vec<i64>,
}

impl Solution {
    pub fn is_unique(&self) -> bool {
        self.kernel.is_empty()
    }
}

impl LinearSystem {
    pub fn new(matrix: Matrix, rhs: Vec<RationalFn>) -> Result<Self, QfieldError> {
        if matrix.rows() != rhs.len() {
            return Err(QfieldError::Shape(format!(
                "{} rows but {} right-hand sides",
                matrix.rows(),
                rhs.len()
            )));
        }
        Ok(LinearSystem { matrix, rhs })
    }

    fn augmented(&self) -> Matrix {
        let cols = self.matrix.cols() + 1;
        let rows = (0..self.matrix.rows())
            .map(|r| {
                let mut row = self.matrix.row(r).to_vec();
                row.push(self.rhs[r].clone());
                row
            })
            .collect::<Vec<_>>();
        if rows.is_empty() {
            return Matrix::zeros(0, cols);
        }
        Matrix::from_rows(rows)
    }

    /// Exact elimination. The returned particular solution is checked by
    /// substitution before it is handed back.
    pub fn solve(&self) -> Result<Solution, QfieldError> {
        let cols = self.matrix.cols();
        let rr = self.augmented().rref();
        if let Some(i) = rr.pivots.iter().position(|&p| p == cols) {
            return Err(QfieldError::Inconsistent {
                row: rr.origin[i],
                residual: self.rhs[rr.origin[i]].clone(),
            });
        }
        let mut particular = vec![RationalFn::zero(); cols];
        for (i, &p) in rr.pivots.iter().enumerate() {
            particular[p] = rr.matrix.get(i, cols).clone();
        }
        let lhs = self.matrix.mul_vec(&particular);
        assert_eq!(lhs, self.rhs, "back-substitution mismatch");
        let coeff_pivots: Vec<usize> = rr.pivots.clone();
        let mut kernel = kernel_from_rref(&rr.matrix, &coeff_pivots, cols + 1);
        kernel.retain(|v| v[cols].is_zero());
        for v in &mut kernel {
            v.pop();
        }
        Ok(Solution {
            particular,
            kernel,
            excluded: rr.excluded.into_iter().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(s: &str) -> RationalFn {
        s.parse().unwrap()
    }

    #[test]
    fn identity_system() {
        let sys = LinearSystem::new(Matrix::identity(2), vec![r("n"), r("1/(n+1)")]).unwrap();
        let s = sys.solve().unwrap();
        assert_eq!(s.particular, vec![r("n"), r("1/(n+1)")]);
        assert!(s.is_unique());
    }

    #[test]
    fn two_by_two_elimination() {
        let m = Matrix::from_rows(vec![vec![r("1"), r("n+3")], vec![r("2"), r("-n")]]);
        let sys = LinearSystem::new(m, vec![r("1"), r("1/2")]).unwrap();
        let s = sys.solve().unwrap();
        assert_eq!(s.particular[0], r("(n+1)/(2*(n+2))"));
        assert_eq!(s.particular[1], r("1/(2*(n+2))"));
        assert!(s.excluded.contains(&-2));
        // hand back-substitution
        for n in [2i64, 3, 5] {
            let a = s.particular[0].evaluate(n).unwrap();
            let b = s.particular[1].evaluate(n).unwrap();
            let nn = BigRational::from_integer(n.into());
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            assert_eq!(
                &a + &b * (&nn + &three),
                BigRational::from_integer(1.into())
            );
            assert_eq!(&two * &a - &b * &nn, BigRational::new(1.into(), 2.into()));
        }
    }

    #[test]
    fn dependent_rows_give_kernel() {
        let m = Matrix::from_rows(vec![vec![r("1"), r("n")], vec![r("2"), r("2*n")]]);
        let sys = LinearSystem::new(m.clone(), vec![r("0"), r("0")]).unwrap();
        let s = sys.solve().unwrap();
        assert_eq!(s.kernel.len(), 1);
        assert!(m.mul_vec(&s.kernel[0]).iter().all(RationalFn::is_zero));
    }

    #[test]
    fn inconsistent_reports_row() {
        let m = Matrix::from_rows(vec![vec![r("1"), r("n")], vec![r("2"), r("2*n")]]);
        let sys = LinearSystem::new(m, vec![r("1"), r("3")]).unwrap();
        match sys.solve() {
            Err(QfieldError::Inconsistent { row, .. }) => assert_eq!(row, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn left_kernel_annihilates() {
        let m = Matrix::from_rows(vec![
            vec![r("1"), r("n")],
            vec![r("n"), r("1")],
            vec![r("n+1"), r("n+1")],
        ]);
        let lk = m.left_kernel();
        assert_eq!(lk.len(), 1);
        assert!(m.vec_mul(&lk[0]).iter().all(RationalFn::is_zero));
    }
}
