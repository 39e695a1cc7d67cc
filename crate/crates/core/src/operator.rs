use crate::dense::DenseMatrix;
use crate::error::Result;

/// Anything that can form `A x` and `Aᵀ y`.
///
/// Every solver and the low-rank pipeline are written against this trait, so
/// raw sparse matrices, wavelet-compressed matrices, low-rank factors and
/// blocked mixtures of them are interchangeable.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>>;

    /// `Aᵀ A x`
    fn apply_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_transpose(&self.apply(x)?)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).apply(x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        (**self).apply_transpose(y)
    }
    fn apply_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).apply_normal(x)
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        DenseMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        DenseMatrix::ncols(self)
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.matvec(x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.matvec_transpose(y)
    }
}

/// The identity on `Rⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn nrows(&self) -> usize {
        self.0
    }
    fn ncols(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        crate::error::check_len("identity apply", self.0, x.len())?;
        Ok(x.to_vec())
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.apply(y)
    }
}

/// Builds the dense matrix of an operator column by column from basis vectors.
pub fn densify(op: &dyn LinearOperator) -> Result<DenseMatrix> {
    let n = op.ncols();
    let mut cols = Vec::with_capacity(n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        cols.push(op.apply(&e)?);
        e[j] = 0.0;
    }
    DenseMatrix::from_columns(op.nrows(), &cols)
}
