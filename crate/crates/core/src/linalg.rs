//! Small dense matrices over commutative coefficient rings.
//!
//! Entries are either `CoeffFn`s or even superfunctions; both are
//! commutative, so determinants and adjugates are well defined.

use std::fmt;

use crate::algebra::{CoeffFn, Superfunction};
use crate::error::{Error, Result};

pub trait Scalar: Clone + PartialEq + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn is_zero_value(&self) -> bool;
}

impl Scalar for CoeffFn {
    fn zero_like(&self) -> Self {
        CoeffFn::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        CoeffFn::one(self.ring())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl Scalar for Superfunction {
    fn zero_like(&self) -> Self {
        Superfunction::zero(self.ring(), self.rank())
    }
    fn one_like(&self) -> Self {
        Superfunction::one(self.ring(), self.rank())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type CoeffMatrix = Matrix<CoeffFn>;

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn identity(n: usize, one: &T) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { one.one_like() } else { one.zero_like() })
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data.iter().enumerate().map(move |(k, v)| (k / self.cols, k % self.cols, v))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).plus(o.get(i, j)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).minus(o.get(i, j)))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.negated())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).zero_like();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = o.get(k, j);
                if !a.is_zero_value() && !b.is_zero_value() {
                    acc = acc.plus(&a.times(b));
                }
            }
            acc
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero_value)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.entries().all(|(i, j, v)| v == self.get(j, i))
    }

    /// First entry `(i, j)` with `m_ij + m_ji != 0`.
    pub fn antisymmetry_defect(&self) -> Option<(usize, usize)> {
        self.entries()
            .find(|(i, j, v)| !v.plus(self.get(*j, *i)).is_zero_value())
            .map(|(i, j, _)| (i, j))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let n = self.rows;
        let mut data = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: n - 1,
            cols: n - 1,
            data,
        }
    }

    /// Determinant by cofactor expansion (the matrices here are at most a few
    /// rows).
    pub fn determinant(&self) -> T {
        assert!(self.is_square() && self.rows > 0, "determinant of a non-square or empty matrix");
        match self.rows {
            1 => self.get(0, 0).clone(),
            2 => self.get(0, 0).times(self.get(1, 1)).minus(&self.get(0, 1).times(self.get(1, 0))),
            n => {
                let mut acc = self.get(0, 0).zero_like();
                for j in 0..n {
                    let a = self.get(0, j);
                    if a.is_zero_value() {
                        continue;
                    }
                    let term = a.times(&self.minor(0, j).determinant());
                    acc = if j % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
                }
                acc
            }
        }
    }

    pub fn adjugate(&self) -> Self {
        let n = self.rows;
        if n == 1 {
            return Self::identity(1, self.get(0, 0));
        }
        Self::from_fn(n, n, |i, j| {
            let c = self.minor(j, i).determinant();
            if (i + j) % 2 == 0 { c } else { c.negated() }
        })
    }

    pub fn apply_fn(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl CoeffMatrix {
    /// Inverse via adjugate over the determinant; fails when the determinant
    /// is not a unit of the coefficient ring.
    pub fn inverse(&self) -> Result<CoeffMatrix> {
        let det = self.determinant();
        let inv = det.inverse()?;
        Ok(self.adjugate().apply_fn(|v| v * &inv))
    }

    pub fn partial(&self, a: usize) -> CoeffMatrix {
        self.apply_fn(|v| v.partial(a))
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
