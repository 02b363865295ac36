//! Dense symmetric helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Values below this fraction of the largest one are treated as zero when
/// computing numerical ranks, ranges and pseudo-inverses.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Eigendecomposition of a symmetric matrix with eigenvalues in ascending
/// order. Each eigenvector is signed so its first entry of non-negligible
/// magnitude is positive.
pub fn sym_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[x]
            .total_cmp(&eig.eigenvalues[y])
            .then(x.cmp(&y))
    });
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        fix_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Flip `v` so that its first coordinate with magnitude above a small
/// fraction of the largest one is positive.
pub fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if scale == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

/// Square root of a symmetric PSD matrix; negative eigenvalues are clamped.
pub fn psd_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(a);
    let roots = vals.map(|x| x.max(0.0).sqrt());
    &vecs * DMatrix::from_diagonal(&roots) * vecs.transpose()
}

/// Pseudo-inverse of a symmetric matrix, dropping eigenvalues whose
/// magnitude is below [`RANK_CUTOFF`] times the largest.
pub fn sym_pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(a);
    let top = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let inv = vals.map(|x| {
        if top > 0.0 && x.abs() > RANK_CUTOFF * top {
            1.0 / x
        } else {
            0.0
        }
    });
    &vecs * DMatrix::from_diagonal(&inv) * vecs.transpose()
}

/// Orthonormal basis (as columns) of the range of a symmetric PSD matrix.
pub fn psd_range(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let (vals, vecs) = sym_eigen(a);
    let top = vals.iter().fold(0.0f64, |m, x| m.max(*x));
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&k| top > 0.0 && vals[k] > RANK_CUTOFF * top)
        .collect();
    let kept_vals = DVector::from_iterator(keep.len(), keep.iter().map(|&k| vals[k]));
    let basis = DMatrix::from_columns(&keep.iter().map(|&k| vecs.column(k)).collect::<Vec<_>>());
    let basis = if keep.is_empty() {
        DMatrix::zeros(a.nrows(), 0)
    } else {
        basis
    };
    (kept_vals, basis)
}
