//! One-ancilla maps for Hamiltonians with real Pauli strings.

use super::{
    realize, term_support, z2_sectors, MapKind, MappedHamiltonian, MappedTerm, PENALTY_SPLIT_LIMIT,
};
use crate::error::{Error, Result};
use crate::matrix::{c, OperatorMatrix, C64};
use crate::pauli::LocalHamiltonian;

/// `S⁺ ⊗ 1 + S⁻ ⊗ X` for a real matrix `S = S⁺ - S⁻`, ancilla appended last.
///
/// Returns the lifted matrix and whether any negative entry was present.
pub(crate) fn lift_real(s: &OperatorMatrix) -> (OperatorMatrix, bool) {
    let mut negative = false;
    let mut trip: Vec<(usize, usize, C64)> = Vec::with_capacity(2 * s.nnz());
    for (r, col, v) in s.entries() {
        let a = v.re.abs();
        if v.re > 0.0 {
            trip.push((2 * r, 2 * col, c(a, 0.0)));
            trip.push((2 * r + 1, 2 * col + 1, c(a, 0.0)));
        } else if v.re < 0.0 {
            negative = true;
            trip.push((2 * r, 2 * col + 1, c(a, 0.0)));
            trip.push((2 * r + 1, 2 * col, c(a, 0.0)));
        }
    }
    (OperatorMatrix::from_triplets(s.qubits() + 1, trip), negative)
}

fn require_real(h: &LocalHamiltonian, what: &str) -> Result<()> {
    if let Some(t) = h.terms().iter().find(|t| !t.string.is_real()) {
        return Err(Error::contract(format!(
            "{what} needs real Pauli strings; term {} has complex entries (use stochastize_complex)",
            t.string
        )));
    }
    Ok(())
}

fn lifted_terms(h: &LocalHamiltonian, negate: bool) -> Vec<MappedTerm> {
    let n = h.n();
    h.terms()
        .iter()
        .map(|t| {
            let p = t.string.to_matrix(n);
            let s = if negate { p.scale(-1.0) } else { p };
            let (op, uses) = lift_real(&s);
            let work: Vec<usize> = t.string.factors().keys().copied().collect();
            MappedTerm {
                weight: t.alpha,
                support: term_support(&work, uses, n..n + 1),
                op,
            }
        })
        .collect()
}

/// Stoquastic lift on `n + 1` qubits.
///
/// Writing `H = -Σ α_k T_k`, each `T_k` becomes `T_k⁺ ⊗ 1 + T_k⁻ ⊗ X`. The
/// result equals `H ⊗ |-><-| - H̄ ⊗ |+><+|` with `H̄ = -Σ α_k |T_k|`.
pub fn stoquastize(h: &LocalHamiltonian) -> Result<MappedHamiltonian> {
    require_real(h, "stoquastize")?;
    let n = h.n();
    let terms = lifted_terms(h, true);
    let matrix = realize(n + 1, -1.0, &terms, None);
    Ok(MappedHamiltonian {
        kind: MapKind::Stoquastic,
        work_qubits: n,
        ancilla_count: 1,
        normalization: h.normalization(),
        prefactor: -1.0,
        p: None,
        penalty_warning: false,
        sectors: z2_sectors(),
        terms,
        input_locality: h.locality(),
        matrix,
    })
}

/// Symmetric stochastic lift `Ĥ = (1/N) Σ α_k (S_k⁺ ⊗ 1 + S_k⁻ ⊗ X)` with
/// `S_k = s_k P_k`. Its `|->` sector is `H / N`.
pub fn stochastize(h: &LocalHamiltonian) -> Result<MappedHamiltonian> {
    require_real(h, "stochastize")?;
    if h.is_empty() {
        return Err(Error::contract("stochastize needs a nonzero Hamiltonian (N = 0)"));
    }
    let n = h.n();
    let norm = h.normalization();
    let terms = lifted_terms(h, false);
    let matrix = realize(n + 1, 1.0 / norm, &terms, None);
    Ok(MappedHamiltonian {
        kind: MapKind::Stochastic,
        work_qubits: n,
        ancilla_count: 1,
        normalization: norm,
        prefactor: 1.0 / norm,
        p: None,
        penalty_warning: false,
        sectors: z2_sectors(),
        terms,
        input_locality: h.locality(),
        matrix,
    })
}

/// `(1 - p) ½(1 + X_anc) + p Ĥ`, pushing the `|+>` sector above the `|->` one.
///
/// The ordering is guaranteed for `p < 1/3`; larger `p` is accepted and flagged.
pub fn add_ancilla_penalty(mapped: &MappedHamiltonian, p: f64) -> Result<MappedHamiltonian> {
    if mapped.kind != MapKind::Stochastic {
        return Err(Error::contract(format!(
            "ancilla penalty applies to a stochastic map, got {:?}",
            mapped.kind
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::contract(format!("penalty parameter p must lie in (0, 1), got {p}")));
    }
    let q = mapped.total_qubits();
    let prefactor = mapped.prefactor * p;
    let matrix = realize(q, prefactor, &mapped.terms, Some((1.0 - p, mapped.work_qubits)));
    Ok(MappedHamiltonian {
        kind: MapKind::StochasticPenalized,
        prefactor,
        p: Some(p),
        penalty_warning: p >= PENALTY_SPLIT_LIMIT,
        matrix,
        ..mapped.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, DEFAULT_TOL};
    use crate::pauli::{random_instance, Pauli};
    use crate::sign_elim::SectorLabel;
    use crate::spectral::eig_dense;

    fn ham(n: usize, terms: Vec<(f64, Vec<(usize, Pauli)>)>) -> LocalHamiltonian {
        LocalHamiltonian::from_signed_terms(n, terms).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn stoquastize_minus_z() {
        let m = stoquastize(&ham(1, vec![(-1.0, vec![(0, Pauli::Z)])])).unwrap();
        let s = eig_dense(m.matrix()).unwrap();
        assert!(close(&s.eigenvalues, &[-1.0, -1.0, -1.0, 1.0]));
        assert!(classify(m.matrix(), DEFAULT_TOL).stoquastic);
    }

    #[test]
    fn stoquastize_x_gives_minus_xx() {
        let m = stoquastize(&ham(1, vec![(1.0, vec![(0, Pauli::X)])])).unwrap();
        let expect = ham(2, vec![(-1.0, vec![(0, Pauli::X), (1, Pauli::X)])])
            .build_matrix()
            .unwrap();
        assert!(m.matrix().sub(&expect).frobenius_norm() < 1e-14);
    }

    #[test]
    fn stochastize_z_with_penalty() {
        let m = stochastize(&ham(1, vec![(1.0, vec![(0, Pauli::Z)])])).unwrap();
        let f = classify(m.matrix(), DEFAULT_TOL);
        assert!(f.doubly_stochastic && f.symmetric);
        let hp = add_ancilla_penalty(&m, 0.25).unwrap();
        let s = eig_dense(hp.matrix()).unwrap();
        assert!(close(&s.eigenvalues, &[-0.25, 0.25, 1.0, 1.0]));
        assert!(classify(hp.matrix(), DEFAULT_TOL).column_stochastic);
        assert!(!hp.penalty_warning);
    }

    #[test]
    fn minus_sector_reproduces_input() {
        for seed in 0..4 {
            let h = random_instance(3, 2, seed, 1.0).unwrap();
            let hm = h.build_matrix().unwrap();
            let st = stoquastize(&h).unwrap();
            let minus = st.sector_operator(SectorLabel::Minus).unwrap();
            assert!(minus.sub(&hm).frobenius_norm() < 1e-12);
            let sc = stochastize(&h).unwrap();
            let minus = sc.sector_operator(SectorLabel::Minus).unwrap();
            let scaled = hm.scale(1.0 / h.normalization());
            assert!(minus.sub(&scaled).frobenius_norm() < 1e-12);
            for l in [SectorLabel::Minus, SectorLabel::Plus] {
                assert!(st.sector_invariance_defect(l).unwrap() < 1e-12);
                assert!(sc.sector_invariance_defect(l).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn locality_grows_by_at_most_one() {
        let h = random_instance(4, 2, 9, 1.0).unwrap();
        let m = stoquastize(&h).unwrap();
        assert!(m.locality() <= h.locality() + 1);
        let xx = ham(2, vec![(1.0, vec![(0, Pauli::X), (1, Pauli::X)])]);
        assert_eq!(stochastize(&xx).unwrap().locality(), 2);
    }

    #[test]
    fn rejects_complex_and_empty() {
        let y = ham(1, vec![(1.0, vec![(0, Pauli::Y)])]);
        assert!(matches!(stoquastize(&y), Err(Error::Contract(_))));
        assert!(matches!(stochastize(&y), Err(Error::Contract(_))));
        assert!(stochastize(&LocalHamiltonian::zero(2)).is_err());
    }

    #[test]
    fn penalty_bounds() {
        let m = stochastize(&ham(1, vec![(1.0, vec![(0, Pauli::Z)])])).unwrap();
        assert!(add_ancilla_penalty(&m, 0.0).is_err());
        assert!(add_ancilla_penalty(&m, 1.0).is_err());
        assert!(add_ancilla_penalty(&m, 0.5).unwrap().penalty_warning);
        let st = stoquastize(&ham(1, vec![(1.0, vec![(0, Pauli::Z)])])).unwrap();
        assert!(add_ancilla_penalty(&st, 0.25).is_err());
    }
}
