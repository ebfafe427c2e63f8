//! Term-by-term map for frustration-free sums of positive semidefinite terms.

use super::z2::{add_ancilla_penalty, stochastize};
use super::z4::{add_penalty_complex, stochastize_complex};
use super::{MappedHamiltonian, PENALTY_SPLIT_LIMIT};
use crate::classify::min_eigenvalue;
use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::pauli::LocalHamiltonian;

/// `weight · op` where `op` is the penalized stochastic image of one term.
#[derive(Clone, Debug)]
pub struct WeightedTerm {
    /// `N_j / N`.
    pub weight: f64,
    pub op: OperatorMatrix,
    pub mapped: MappedHamiltonian,
}

impl WeightedTerm {
    /// `weight · op`.
    pub fn scaled(&self) -> OperatorMatrix {
        self.op.scale(self.weight)
    }
}

#[derive(Clone, Debug)]
pub struct FfMapping {
    pub terms: Vec<WeightedTerm>,
    /// `N = Σ_j N_j`.
    pub normalization: f64,
    pub p: f64,
    pub work_qubits: usize,
    pub ancilla_count: usize,
}

impl FfMapping {
    /// `Σ_j (N_j/N) [p Ĥ_j + (1-p) ½(1 + X_a)]`.
    pub fn sum(&self) -> OperatorMatrix {
        let q = self.work_qubits + self.ancilla_count;
        let scaled: Vec<OperatorMatrix> = self.terms.iter().map(WeightedTerm::scaled).collect();
        OperatorMatrix::sum(q, &scaled)
    }
}

/// Maps each term `H_j` to `(N_j/N)[p Ĥ_j + (1-p) ½(1 + X_a)]`.
///
/// Real input uses one ancilla; any complex term switches every term to the
/// two-ancilla map. Each image is stochastic and positive semidefinite, so a
/// frustration-free input stays frustration free.
pub fn stochastize_ff(terms: &[LocalHamiltonian], p: f64, tol: f64) -> Result<FfMapping> {
    if terms.is_empty() {
        return Err(Error::contract("stochastize_ff needs at least one term"));
    }
    if !(p > 0.0 && p < PENALTY_SPLIT_LIMIT) {
        return Err(Error::contract(format!("penalty parameter p must lie in (0, 1/3), got {p}")));
    }
    let n = terms[0].n();
    if let Some(t) = terms.iter().find(|t| t.n() != n) {
        return Err(Error::contract(format!(
            "all terms must act on {n} qubits, found one on {}",
            t.n()
        )));
    }
    for (j, t) in terms.iter().enumerate() {
        if t.is_empty() {
            return Err(Error::contract(format!("term {j} is zero")));
        }
        let lo = min_eigenvalue(&t.build_matrix()?, tol)?;
        if lo < -tol {
            return Err(Error::contract(format!(
                "term {j} is not positive semidefinite (lowest eigenvalue {lo:.3e})"
            )));
        }
    }
    let complex = terms.iter().any(|t| !t.is_real());
    let total: f64 = terms.iter().map(LocalHamiltonian::normalization).sum();
    let mapped = terms
        .iter()
        .map(|t| {
            let m: MappedHamiltonian = if complex {
                add_penalty_complex(&stochastize_complex(t)?, p)?
            } else {
                add_ancilla_penalty(&stochastize(t)?, p)?
            };
            Ok(WeightedTerm {
                weight: t.normalization() / total,
                op: m.matrix().clone(),
                mapped: m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FfMapping {
        terms: mapped,
        normalization: total,
        p,
        work_qubits: n,
        ancilla_count: if complex { 2 } else { 1 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, DEFAULT_TOL};
    use crate::matrix::{c, kron_vec, norm};
    use crate::pauli::Pauli;
    use crate::spectral::eig_dense;

    fn proj(bit: u8) -> LocalHamiltonian {
        let s = if bit == 0 { 0.5 } else { -0.5 };
        LocalHamiltonian::from_signed_terms(1, [(0.5, vec![]), (s, vec![(0, Pauli::Z)])]).unwrap()
    }

    #[test]
    fn single_projector_kernel() {
        let f = stochastize_ff(&[proj(1)], 0.25, DEFAULT_TOL).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = kron_vec(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(h, 0.0), c(-h, 0.0)]);
        assert!(norm(&f.sum().matvec(&v)) < 1e-14);
        for t in &f.terms {
            let fl = classify(&t.op, DEFAULT_TOL);
            assert!(fl.column_stochastic && fl.psd);
        }
    }

    #[test]
    fn frustrated_pair_has_positive_ground() {
        let f = stochastize_ff(&[proj(0), proj(1)], 0.25, DEFAULT_TOL).unwrap();
        assert!(eig_dense(&f.sum()).unwrap().lowest() > 1e-3);
    }

    #[test]
    fn gap_scales_by_p_over_n() {
        // |1><1| ⊗ 1 + 1 ⊗ |1><1|: ground 0, gap 1, N = 2
        let a = proj(1).tensor(&LocalHamiltonian::from_signed_terms(1, [(1.0, vec![])]).unwrap());
        let b = LocalHamiltonian::from_signed_terms(1, [(1.0, vec![])]).unwrap().tensor(&proj(1));
        let p = 0.2;
        let f = stochastize_ff(&[a.clone(), b.clone()], p, DEFAULT_TOL).unwrap();
        let s = eig_dense(&f.sum()).unwrap();
        let input = eig_dense(&a.plus(&b).unwrap().build_matrix().unwrap()).unwrap();
        let g_in = input.eigenvalues[1] - input.eigenvalues[0];
        assert!(s.lowest().abs() < 1e-12);
        assert!((s.eigenvalues[1] - p * g_in / f.normalization).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_psd_and_bad_p() {
        let z = LocalHamiltonian::from_signed_terms(1, [(1.0, vec![(0, Pauli::Z)])]).unwrap();
        assert!(matches!(stochastize_ff(&[z], 0.25, DEFAULT_TOL), Err(Error::Contract(_))));
        assert!(stochastize_ff(&[proj(1)], 0.4, DEFAULT_TOL).is_err());
    }
}
