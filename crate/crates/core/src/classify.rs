//! Structural predicates on matrices: Hermiticity, sign structure, stochasticity,
//! projector and positivity checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{c, OperatorMatrix};
use crate::spectral::{eig_dense, eig_extremal, Which, DEFAULT_DENSE_CAP};

/// Default tolerance for structural flags.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatrixClassFlags {
    pub hermitian: bool,
    pub nonnegative_entries: bool,
    /// Hermitian with real off-diagonal entries `<= 0`.
    pub stoquastic: bool,
    pub column_stochastic: bool,
    pub doubly_stochastic: bool,
    pub symmetric: bool,
    pub permutation: bool,
    pub projector: bool,
    pub psd: bool,
    pub tol: f64,
}

/// Column sums of the matrix.
pub fn column_sums(m: &OperatorMatrix) -> Vec<f64> {
    let mut sums = vec![0.0; m.dim()];
    for (_, col, v) in m.entries() {
        sums[col] += v.re;
    }
    sums
}

pub fn row_sums(m: &OperatorMatrix) -> Vec<f64> {
    (0..m.dim()).map(|r| m.row(r).map(|(_, v)| v.re).sum()).collect()
}

/// `||M^2 - M||_F`.
pub fn projector_defect(m: &OperatorMatrix) -> f64 {
    m.mul(m).sub(m).frobenius_norm()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &OperatorMatrix, tol: f64) -> Result<f64> {
    if m.dim() <= DEFAULT_DENSE_CAP {
        Ok(eig_dense(m)?.lowest())
    } else {
        Ok(eig_extremal(m, 1, Which::Lowest, tol.max(1e-9))?.lowest())
    }
}

pub fn classify(m: &OperatorMatrix, tol: f64) -> MatrixClassFlags {
    let hermitian = m.hermitian_defect() <= tol;
    let real = m.is_real(tol);
    let nonnegative_entries = real && m.entries().all(|(_, _, v)| v.re >= -tol);
    let stoquastic = hermitian
        && m
            .entries()
            .filter(|(r, col, _)| r != col)
            .all(|(_, _, v)| v.im.abs() <= tol && v.re <= tol);
    let near_one = |s: &f64| (s - 1.0).abs() <= tol;
    let column_stochastic = nonnegative_entries && column_sums(m).iter().all(near_one);
    let doubly_stochastic = column_stochastic && row_sums(m).iter().all(near_one);
    let symmetric = m
        .entries()
        .all(|(r, col, v)| (v - m.get(col, r)).norm() <= tol);
    let permutation = doubly_stochastic
        && m.entries().all(|(_, _, v)| (v - c(1.0, 0.0)).norm() <= tol)
        && (0..m.dim()).all(|r| m.row(r).count() == 1);
    let projector = hermitian && projector_defect(m) <= tol;
    let psd = projector
        || (hermitian && min_eigenvalue(m, tol).map(|e| e >= -tol).unwrap_or(false));
    MatrixClassFlags {
        hermitian,
        nonnegative_entries,
        stoquastic,
        column_stochastic,
        doubly_stochastic,
        symmetric,
        permutation,
        projector,
        psd,
        tol,
    }
}

/// `1 - Π` where `Π` projects onto the eigenspace of `m` with eigenvalue `<= tol`.
pub fn kernel_projector_complement(m: &OperatorMatrix, tol: f64) -> Result<OperatorMatrix> {
    if !m.is_hermitian() {
        return Err(Error::contract("kernel projector needs a Hermitian matrix"));
    }
    let s = eig_dense(m)?;
    if s.lowest() < -tol {
        return Err(Error::contract(format!(
            "matrix is not positive semidefinite (lowest eigenvalue {:.3e})",
            s.lowest()
        )));
    }
    let vecs = s.eigenvectors.as_ref().expect("dense Hermitian path has vectors");
    let dim = m.dim();
    let mut trip = Vec::new();
    for (e, v) in s.eigenvalues.iter().zip(vecs) {
        if *e > tol {
            // range vectors: 1 - Π is the projector onto them
            for r in 0..dim {
                if v[r].norm() == 0.0 {
                    continue;
                }
                for col in 0..dim {
                    trip.push((r, col, v[r] * v[col].conj()));
                }
            }
        }
    }
    let p = OperatorMatrix::from_triplets(m.qubits(), trip);
    // clean roundoff so exact 0/1 structure survives
    Ok(OperatorMatrix::from_triplets(
        p.qubits(),
        p.entries().filter(|(_, _, v)| v.norm() > 1e-13),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::basis_state;

    #[test]
    fn identity_flags() {
        for q in 0..4 {
            let f = classify(&OperatorMatrix::identity(q), DEFAULT_TOL);
            assert!(f.hermitian && f.doubly_stochastic && f.projector && f.psd && f.stoquastic);
            assert!(f.permutation && f.symmetric && f.nonnegative_entries);
        }
    }

    #[test]
    fn plus_projector_flags() {
        let m = OperatorMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let f = classify(&m, DEFAULT_TOL);
        assert!(f.projector && f.doubly_stochastic && f.psd);
        assert!(!f.stoquastic);
        assert!(!f.permutation);
    }

    #[test]
    fn z_is_not_psd_or_stochastic() {
        let f = classify(&OperatorMatrix::from_diagonal(1, &[1.0, -1.0]), DEFAULT_TOL);
        assert!(f.hermitian && f.stoquastic && !f.psd && !f.nonnegative_entries);
        assert!(!f.column_stochastic && !f.projector);
    }

    #[test]
    fn non_symmetric_column_stochastic() {
        let m = OperatorMatrix::from_real_rows(&[vec![0.5, 1.0], vec![0.5, 0.0]]).unwrap();
        let f = classify(&m, DEFAULT_TOL);
        assert!(f.column_stochastic && !f.doubly_stochastic && !f.symmetric && !f.hermitian);
    }

    #[test]
    fn kernel_complement_examples() {
        let one = OperatorMatrix::from_diagonal(1, &[0.0, 1.0]);
        let p = kernel_projector_complement(&one, DEFAULT_TOL).unwrap();
        assert!(p.sub(&one).frobenius_norm() < 1e-12);

        let zero = OperatorMatrix::zeros(1);
        let p = kernel_projector_complement(&zero, DEFAULT_TOL).unwrap();
        assert_eq!(p.nnz(), 0);

        let d = OperatorMatrix::from_diagonal(2, &[0.0, 0.5, 2.0, 3.0]);
        let p = kernel_projector_complement(&d, DEFAULT_TOL).unwrap();
        let expect = OperatorMatrix::from_diagonal(2, &[0.0, 1.0, 1.0, 1.0]);
        assert!(p.sub(&expect).frobenius_norm() < 1e-12);
        assert!(projector_defect(&p) < 1e-10);
        assert!(p.matvec(&basis_state(2, 0)).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn kernel_complement_rejects_non_psd() {
        let z = OperatorMatrix::from_diagonal(1, &[1.0, -1.0]);
        assert!(matches!(
            kernel_projector_complement(&z, DEFAULT_TOL),
            Err(Error::Contract(_))
        ));
    }
}
