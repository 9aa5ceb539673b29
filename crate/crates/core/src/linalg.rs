//! Internal dense linear algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// Largest singular value; 0 for an empty matrix.
pub(crate) fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Singular values sorted in descending order.
pub(crate) fn singular_values_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Largest eigenpair of a symmetric matrix.
///
/// Ties are resolved by the eigensolver's ordering (first maximal index).
pub(crate) fn largest_sym_eigenpair(m: DMatrix<f64>) -> (f64, DVector<f64>) {
    debug_assert_eq!(m.nrows(), m.ncols());
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut arg = 0;
    for (i, v) in eig.eigenvalues.iter().enumerate() {
        if *v > eig.eigenvalues[arg] {
            arg = i;
        }
    }
    (eig.eigenvalues[arg], eig.eigenvectors.column(arg).into())
}
