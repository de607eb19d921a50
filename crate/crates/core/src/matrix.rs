//! Dense complex matrices and their JSON document form.
//!
//! [`Matrix`] wraps an `nalgebra::DMatrix<Complex64>` and guarantees that every
//! entry is finite. Zero-sized matrices are allowed: empty blocks show up
//! whenever a decomposition has an invertible or nilpotent extreme.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GinvError, Result};

pub type C64 = Complex64;

#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<C64>);

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(GinvError::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Self::from_dmatrix(DMatrix::from_row_iterator(rows, cols, entries))
    }

    pub fn from_dmatrix(inner: DMatrix<C64>) -> Result<Self> {
        for c in 0..inner.ncols() {
            for r in 0..inner.nrows() {
                let z = inner[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(GinvError::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Matrix(inner))
    }

    /// Wraps arithmetic results produced inside the crate. Entries are not
    /// re-validated; callers that can overflow check [`Matrix::is_finite`].
    pub(crate) fn wrap(inner: DMatrix<C64>) -> Self {
        Matrix(inner)
    }

    /// Real matrix from row slices. Panics on ragged rows; intended for
    /// literals in tests and examples.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = DMatrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), ncols, "ragged row {i}");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        Matrix::from_dmatrix(m).expect("non-finite literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Matrix(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.0[(row, col)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix(self.0.map(|z| z * factor))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `self^exp` by repeated multiplication; `self^0` is the identity.
    pub fn pow(&self, exp: usize) -> Result<Matrix> {
        self.require_square()?;
        let mut acc = Matrix::identity(self.rows());
        for _ in 0..exp {
            acc = &acc * self;
        }
        Ok(acc)
    }

    /// Copy of the `rows x cols` block whose top-left corner is `(row, col)`.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
        Matrix(self.0.view((row, col), (rows, cols)).into_owned())
    }

    pub fn columns(&self, first: usize, count: usize) -> Matrix {
        self.block(0, first, self.rows(), count)
    }

    /// `[a b]`, columns of `b` appended to those of `a`.
    pub fn hcat(a: &Matrix, b: &Matrix) -> Result<Matrix> {
        if a.rows() != b.rows() {
            return Err(GinvError::ShapeMismatch(format!(
                "cannot place {}x{} beside {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let mut m = DMatrix::zeros(a.rows(), a.cols() + b.cols());
        m.view_mut((0, 0), a.shape()).copy_from(&a.0);
        m.view_mut((0, a.cols()), b.shape()).copy_from(&b.0);
        Ok(Matrix(m))
    }

    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        Matrix::from_blocks(a, &Matrix::zeros(a.rows(), b.cols()), &Matrix::zeros(b.rows(), a.cols()), b)
            .expect("block_diag shapes always conform")
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix> {
        if a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols() {
            return Err(GinvError::ShapeMismatch(format!(
                "blocks {:?} {:?} / {:?} {:?} do not tile",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        let (r1, c1) = a.shape();
        let mut m = DMatrix::zeros(r1 + c.rows(), c1 + b.cols());
        m.view_mut((0, 0), a.shape()).copy_from(&a.0);
        m.view_mut((0, c1), b.shape()).copy_from(&b.0);
        m.view_mut((r1, 0), c.shape()).copy_from(&c.0);
        m.view_mut((r1, c1), d.shape()).copy_from(&d.0);
        Ok(Matrix(m))
    }

    /// Splits a square matrix into `[[a, b], [c, d]]` with `a` of size `k x k`.
    pub fn split(&self, k: usize) -> [Matrix; 4] {
        let n = self.rows();
        let m = self.cols();
        [self.block(0, 0, k, k), self.block(0, k, k, m - k), self.block(k, 0, n - k, k), self.block(k, k, n - k, m - k)]
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(GinvError::NotSquare { rows: self.rows(), cols: self.cols() })
        }
    }

    pub fn require_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(GinvError::ShapeMismatch(format!("{:?} vs {:?}", self.shape(), other.shape())))
        }
    }

    /// Row-major real and imaginary parts.
    pub fn to_parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let re = (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.0[(i, j)].re).collect()).collect();
        let im = (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.0[(i, j)].im).collect()).collect();
        (re, im)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Matrix> {
        serde_json::from_str(text).map_err(|e| GinvError::Parse(e.to_string()))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "\n  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                if z.im == 0.0 {
                    write!(f, "{:>12.6} ", z.re)?;
                } else {
                    write!(f, "{:>12.6}{:+.6}i ", z.re, z.im)?;
                }
            }
        }
        write!(f, "\n]")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Matrix> for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                Matrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Matrix> for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: Matrix) -> Matrix {
                Matrix(self.0 $op rhs.0)
            }
        }
        impl $trait<&Matrix> for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                Matrix(self.0 $op &rhs.0)
            }
        }
        impl $trait<Matrix> for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: Matrix) -> Matrix {
                Matrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-self.0)
    }
}

/// Wire form: `{"rows": r, "cols": c, "re": [[..]], "im": [[..]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (re, im) = self.to_parts();
        MatrixDoc { rows: self.rows(), cols: self.cols(), re, im: Some(im) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(deserializer)?;
        Matrix::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<MatrixDoc> for Matrix {
    type Error = GinvError;

    fn try_from(doc: MatrixDoc) -> Result<Matrix> {
        let check = |name: &str, part: &Vec<Vec<f64>>| -> Result<()> {
            if part.len() != doc.rows {
                return Err(GinvError::Parse(format!("`{name}` has {} rows, expected {}", part.len(), doc.rows)));
            }
            if let Some((i, row)) = part.iter().enumerate().find(|(_, r)| r.len() != doc.cols) {
                return Err(GinvError::Parse(format!(
                    "`{name}` row {i} has {} entries, expected {}",
                    row.len(),
                    doc.cols
                )));
            }
            Ok(())
        };
        check("re", &doc.re)?;
        if let Some(im) = &doc.im {
            check("im", im)?;
        }
        let mut entries = Vec::with_capacity(doc.rows * doc.cols);
        for i in 0..doc.rows {
            for j in 0..doc.cols {
                let im = doc.im.as_ref().map_or(0.0, |m| m[i][j]);
                entries.push(C64::new(doc.re[i][j], im));
            }
        }
        Matrix::new(doc.rows, doc.cols, entries)
    }
}
