//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{EdapError, Result};

/// Eigen-pseudoinverse of a symmetric matrix. Eigenvalues at or below
/// `rel_cutoff * max|lambda|` are treated as zero.
#[derive(Debug, Clone)]
pub struct SymmetricPinv {
    pub pinv: DMatrix<f64>,
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub cutoff: f64,
}

pub fn symmetric_pinv(m: &DMatrix<f64>, rel_cutoff: f64) -> Result<SymmetricPinv> {
    if m.nrows() != m.ncols() {
        return Err(EdapError::Shape(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cutoff = rel_cutoff * top;
    let n = m.nrows();
    let mut pinv = DMatrix::zeros(n, n);
    let mut rank = 0;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff && lambda > 0.0 {
            rank += 1;
            let v = eig.eigenvectors.column(k);
            pinv += (v * v.transpose()) / lambda;
        }
    }
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(SymmetricPinv { pinv, eigenvalues, rank, cutoff })
}

/// Moore-Penrose pseudoinverse of a general matrix by SVD.
pub fn pinv(m: &DMatrix<f64>, rel_cutoff: f64) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(true, true);
    let top = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    svd.pseudo_inverse(rel_cutoff * top.max(f64::MIN_POSITIVE))
        .map_err(|e| EdapError::Conditioning(e.to_string()))
}

/// Least-squares solution of `a x = b` (column-wise for matrix `b`) with an
/// optional Tikhonov term, solved as the stacked system `[a; sqrt(ridge) I]`.
/// Returns the rank of the stacked system alongside the solution.
pub fn ridge_lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>, ridge: f64, rel_cutoff: f64) -> (DMatrix<f64>, usize) {
    let (m, n) = a.shape();
    let stacked = if ridge > 0.0 {
        let mut s = DMatrix::zeros(m + n, n);
        s.view_mut((0, 0), (m, n)).copy_from(a);
        for i in 0..n {
            s[(m + i, i)] = ridge.sqrt();
        }
        s
    } else {
        a.clone()
    };
    let rhs = if ridge > 0.0 {
        let mut r = DMatrix::zeros(m + n, b.ncols());
        r.view_mut((0, 0), (m, b.ncols())).copy_from(b);
        r
    } else {
        b.clone()
    };
    let svd = stacked.svd(true, true);
    let top = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let eps = rel_cutoff * top;
    let rank = svd.rank(eps);
    let x = svd.solve(&rhs, eps).expect("u and v were computed");
    (x, rank)
}

pub fn to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
