//! Two-ancilla map for Hamiltonians with complex entries.
//!
//! The phases `{1, i, -1, -i}` are replaced by `{1, F, F², F³}` where `F` is
//! the cyclic shift on four levels. `F` is diagonal in the Fourier basis
//! `v_j = ½ Σ_l i^{lj} |l>` with eigenvalue `i^j`, so the `v_1` sector carries
//! `H` and the `v_3` sector carries `H*`.

use super::{
    realize, term_support, MapKind, MappedHamiltonian, MappedTerm, Sector, SectorLabel,
    PENALTY_SPLIT_LIMIT,
};
use crate::error::{Error, Result};
use crate::matrix::{c, OperatorMatrix, C64};
use crate::pauli::LocalHamiltonian;

/// The 4-cycle `F` with `F |l+1> = |l>` on two qubits.
pub fn f_matrix() -> OperatorMatrix {
    OperatorMatrix::from_triplets(2, (0..4).map(|l| (l, (l + 1) % 4, c(1.0, 0.0))))
}

/// `v_j = ½ Σ_l i^{lj} |l>`.
pub fn v_state(j: usize) -> Vec<C64> {
    (0..4)
        .map(|l| c(0.0, 1.0).powi(((l * j) % 4) as i32) * 0.5)
        .collect()
}

/// Lifts `O` entrywise: `Re⁺ → 1`, `Re⁻ → F²`, `Im⁺ → F`, `Im⁻ → F³`.
///
/// Returns the lifted matrix on `q + 2` qubits and whether any ancilla
/// action other than the identity occurred.
pub(crate) fn lift_complex(o: &OperatorMatrix) -> (OperatorMatrix, bool) {
    let mut nontrivial = false;
    let mut trip = Vec::with_capacity(4 * o.nnz());
    let mut push = |r: usize, col: usize, a: f64, k: usize| {
        if a == 0.0 {
            return;
        }
        for l in 0..4 {
            trip.push((4 * r + l, 4 * col + (l + k) % 4, c(a, 0.0)));
        }
    };
    for (r, col, v) in o.entries() {
        let (re, im) = (v.re, v.im);
        if re > 0.0 {
            push(r, col, re, 0);
        } else if re < 0.0 {
            push(r, col, -re, 2);
        }
        if im > 0.0 {
            push(r, col, im, 1);
        } else if im < 0.0 {
            push(r, col, -im, 3);
        }
        nontrivial |= re < 0.0 || im != 0.0;
    }
    (OperatorMatrix::from_triplets(o.qubits() + 2, trip), nontrivial)
}

/// The four blocks of the complex map, one per Fourier sector.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    /// `Σ (|S_k| + |A_k|)`, sector `v_0`.
    pub h0: OperatorMatrix,
    /// `H`, sector `v_1`.
    pub h1: OperatorMatrix,
    /// `Σ (|S_k| - |A_k|)`, sector `v_2`.
    pub h2: OperatorMatrix,
    /// `H*`, sector `v_3`.
    pub h3: OperatorMatrix,
}

impl SectorDecomposition {
    pub fn of(h: &LocalHamiltonian) -> Self {
        let n = h.n();
        let (mut abs_sum, mut abs_diff) = (Vec::new(), Vec::new());
        for t in h.terms() {
            let o = t.string.to_matrix(n).scale(t.alpha);
            for (r, col, v) in o.entries() {
                abs_sum.push((r, col, c(v.re.abs() + v.im.abs(), 0.0)));
                abs_diff.push((r, col, c(v.re.abs() - v.im.abs(), 0.0)));
            }
        }
        let h1 = h.build_matrix_capped(crate::matrix::MAX_QUBITS).expect("checked by caller");
        SectorDecomposition {
            h0: OperatorMatrix::from_triplets(n, abs_sum),
            h2: OperatorMatrix::from_triplets(n, abs_diff),
            h3: h1.conj(),
            h1,
        }
    }

    pub fn block(&self, j: usize) -> &OperatorMatrix {
        match j {
            0 => &self.h0,
            1 => &self.h1,
            2 => &self.h2,
            _ => &self.h3,
        }
    }
}

fn z4_sectors() -> Vec<Sector> {
    [SectorLabel::V0, SectorLabel::V1, SectorLabel::V2, SectorLabel::V3]
        .into_iter()
        .enumerate()
        .map(|(j, label)| Sector {
            label,
            ancilla_state: v_state(j),
        })
        .collect()
}

/// Real symmetric stochastic lift on `n + 2` qubits:
/// `H̃ = (1/N) Σ α_k (S⁺ ⊗ 1 + S⁻ ⊗ F² + A⁺ ⊗ F + A⁻ ⊗ F³)` where
/// `S_k + i A_k` is the signed Pauli string.
pub fn stochastize_complex(h: &LocalHamiltonian) -> Result<MappedHamiltonian> {
    if h.is_empty() {
        return Err(Error::contract("stochastize_complex needs a nonzero Hamiltonian (N = 0)"));
    }
    let n = h.n();
    let norm = h.normalization();
    let terms: Vec<MappedTerm> = h
        .terms()
        .iter()
        .map(|t| {
            let (op, uses) = lift_complex(&t.string.to_matrix(n));
            let work: Vec<usize> = t.string.factors().keys().copied().collect();
            MappedTerm {
                weight: t.alpha,
                support: term_support(&work, uses, n..n + 2),
                op,
            }
        })
        .collect();
    let matrix = realize(n + 2, 1.0 / norm, &terms, None);
    Ok(MappedHamiltonian {
        kind: MapKind::ComplexStochastic,
        work_qubits: n,
        ancilla_count: 2,
        normalization: norm,
        prefactor: 1.0 / norm,
        p: None,
        penalty_warning: false,
        sectors: z4_sectors(),
        terms,
        input_locality: h.locality(),
        matrix,
    })
}

/// `(1 - p) ½(1 + X_a) + p H̃` with `a` the first ancilla, `0 < p < 1/3`.
///
/// The low-energy space is then spanned by the `v_1` and `v_3` sectors, which
/// hold `H` and `H*` with identical spectra.
pub fn add_penalty_complex(mapped: &MappedHamiltonian, p: f64) -> Result<MappedHamiltonian> {
    if mapped.kind != MapKind::ComplexStochastic {
        return Err(Error::contract(format!(
            "complex penalty applies to a complex stochastic map, got {:?}",
            mapped.kind
        )));
    }
    if !(p > 0.0 && p < PENALTY_SPLIT_LIMIT) {
        return Err(Error::contract(format!("penalty parameter p must lie in (0, 1/3), got {p}")));
    }
    Ok(penalize(mapped, p))
}

/// Penalty without the range check; callers own the choice of `p`.
pub(crate) fn penalize(mapped: &MappedHamiltonian, p: f64) -> MappedHamiltonian {
    let q = mapped.total_qubits();
    let prefactor = mapped.prefactor * p;
    let matrix = realize(q, prefactor, &mapped.terms, Some((1.0 - p, mapped.work_qubits)));
    MappedHamiltonian {
        kind: MapKind::ComplexPenalized,
        prefactor,
        p: Some(p),
        penalty_warning: p >= PENALTY_SPLIT_LIMIT,
        matrix,
        ..mapped.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, DEFAULT_TOL};
    use crate::matrix::{inner, kron_vec, norm};
    use crate::pauli::{random_instance_with, Pauli, PauliAlphabet};
    use crate::spectral::eig_dense;

    #[test]
    fn f_is_a_four_cycle() {
        let f = f_matrix();
        assert_eq!(f.get(0, 1), c(1.0, 0.0));
        let f4 = f.mul(&f).mul(&f).mul(&f);
        assert!(f4.sub(&OperatorMatrix::identity(2)).frobenius_norm() < 1e-15);
        for j in 0..4 {
            let v = v_state(j);
            let fv = f.matvec(&v);
            let ij = c(0.0, 1.0).powi(j as i32);
            assert!(fv.iter().zip(&v).all(|(a, b)| (a - b * ij).norm() < 1e-15));
        }
    }

    #[test]
    fn v_states_factor_into_qubit_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = vec![c(h, 0.0), c(h, 0.0)];
        let minus = vec![c(h, 0.0), c(-h, 0.0)];
        let plus_i = vec![c(h, 0.0), c(0.0, h)];
        let minus_i = vec![c(h, 0.0), c(0.0, -h)];
        let expect = [
            kron_vec(&plus, &plus),
            kron_vec(&minus, &plus_i),
            kron_vec(&plus, &minus),
            kron_vec(&minus, &minus_i),
        ];
        for (j, e) in expect.iter().enumerate() {
            assert!((inner(e, &v_state(j)).norm() - 1.0).abs() < 1e-14, "v{j}");
        }
    }

    #[test]
    fn y_maps_to_real_symmetric_stochastic() {
        let h = LocalHamiltonian::from_signed_terms(1, [(1.0, vec![(0, Pauli::Y)])]).unwrap();
        let m = stochastize_complex(&h).unwrap();
        assert!(m.matrix().is_real(0.0));
        let f = classify(m.matrix(), DEFAULT_TOL);
        assert!(f.symmetric && f.doubly_stochastic && f.permutation);
    }

    #[test]
    fn sectors_match_decomposition() {
        for seed in 0..3 {
            let h = random_instance_with(2, 2, seed, 1.0, PauliAlphabet::XYZ).unwrap();
            let m = stochastize_complex(&h).unwrap();
            let dec = SectorDecomposition::of(&h);
            let labels = [SectorLabel::V0, SectorLabel::V1, SectorLabel::V2, SectorLabel::V3];
            for (j, l) in labels.into_iter().enumerate() {
                let block = m.sector_operator(l).unwrap().scale(m.normalization);
                assert!(block.sub(dec.block(j)).frobenius_norm() < 1e-12, "seed {seed} v{j}");
                assert!(m.sector_invariance_defect(l).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn penalized_ground_space_is_doubled() {
        let h = random_instance_with(2, 2, 5, 1.0, PauliAlphabet::XYZ).unwrap();
        let hm = h.build_matrix().unwrap();
        let e0 = eig_dense(&hm).unwrap().lowest();
        let n = h.normalization();
        let p = 0.25;
        let m = add_penalty_complex(&stochastize_complex(&h).unwrap(), p).unwrap();
        let s = eig_dense(m.matrix()).unwrap();
        assert!((s.eigenvalues[0] - p * e0 / n).abs() < 1e-10);
        assert!((s.eigenvalues[1] - p * e0 / n).abs() < 1e-10);
        assert!(s.eigenvalues[2] - s.eigenvalues[1] > 1e-6);

        // ground vectors lie in span{v1, v3} and come as conjugate pairs
        let v1 = v_state(1);
        let g = eig_dense(&hm).unwrap();
        let psi = g.vector(0).unwrap();
        let a = kron_vec(psi, &v1);
        let conj_a: Vec<C64> = a.iter().map(|z| z.conj()).collect();
        let b = kron_vec(&psi.iter().map(|z| z.conj()).collect::<Vec<_>>(), &v_state(3));
        let diff: Vec<C64> = conj_a.iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!(norm(&diff) < 1e-12);
        let ev = m.matrix().expectation(&a).re;
        assert!((ev - p * e0 / n).abs() < 1e-10);
    }

    #[test]
    fn penalty_range_is_enforced() {
        let h = LocalHamiltonian::from_signed_terms(1, [(1.0, vec![(0, Pauli::Y)])]).unwrap();
        let m = stochastize_complex(&h).unwrap();
        assert!(add_penalty_complex(&m, 1.0 / 3.0).is_err());
        assert!(add_penalty_complex(&m, 0.0).is_err());
        assert!(stochastize_complex(&LocalHamiltonian::zero(1)).is_err());
    }
}
