use proptest::prelude::*;

use signfree::classify::classify;
use signfree::io::{hamiltonian_from_str, serialize_hamiltonian};
use signfree::matrix::{inner, norm, C64};
use signfree::pauli::{random_instance, random_instance_with, Pauli, PauliAlphabet, PauliString, Sign};
use signfree::protocols::{first_register_weight, slater_witness, swap_registers};
use signfree::sign_elim::{add_ancilla_penalty, stochastize, stochastize_complex, stoquastize, SectorLabel};
use signfree::spectral::eig_dense;

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::btree_map(0..n, pauli(), 0..=n), any::<bool>()).prop_map(|(f, neg)| {
        PauliString::new(f, if neg { Sign::Minus } else { Sign::Plus }).unwrap()
    })
}

/// Gram-Schmidt on the given raw vectors; `None` if they are nearly dependent.
fn orthonormalize(raw: Vec<Vec<C64>>) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for mut v in raw {
        for u in &out {
            let proj = inner(u, &v);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= y * proj);
        }
        let nv = norm(&v);
        if nv < 1e-3 {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        out.push(v);
    }
    Some(out)
}

fn complex_vec(d: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pauli_strings_square_to_identity(p in pauli_string(3)) {
        let m = p.to_matrix(3);
        let sq = m.mul(&m);
        prop_assert!(sq.sub(&signfree::matrix::OperatorMatrix::identity(3)).frobenius_norm() < 1e-14);
        prop_assert!(m.is_hermitian());
    }

    #[test]
    fn build_matrix_is_linear(s1 in 0u64..1000, s2 in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let h1 = random_instance_with(3, 2, s1, 1.0, PauliAlphabet::XYZ).unwrap();
        let h2 = random_instance_with(3, 2, s2, 1.0, PauliAlphabet::XYZ).unwrap();
        let combined = h1.scaled(a).plus(&h2.scaled(b)).unwrap().build_matrix().unwrap();
        let separate = h1.build_matrix().unwrap().scale(a).add(&h2.build_matrix().unwrap().scale(b));
        prop_assert!(combined.sub(&separate).frobenius_norm() < 1e-12);
    }

    #[test]
    fn hamiltonian_file_round_trips(seed in 0u64..10_000, n in 1usize..5) {
        let h = random_instance_with(n, n.min(2), seed, 1.0, PauliAlphabet::XYZ).unwrap();
        let text = serialize_hamiltonian(&h);
        let back = hamiltonian_from_str(&text).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(serialize_hamiltonian(&back), text);
    }

    #[test]
    fn stoquastized_minus_sector_is_invariant(seed in 0u64..10_000, n in 1usize..4) {
        let h = random_instance(n, 2.min(n), seed, 1.0).unwrap();
        let m = stoquastize(&h).unwrap();
        prop_assert!(classify(m.matrix(), 1e-12).stoquastic);
        prop_assert!(m.sector_invariance_defect(SectorLabel::Minus).unwrap() < 1e-12);
        prop_assert!(m.sector_invariance_defect(SectorLabel::Plus).unwrap() < 1e-12);
        let sector = m.sector_spectrum(SectorLabel::Minus).unwrap();
        let direct = eig_dense(&h.build_matrix().unwrap()).unwrap().eigenvalues;
        for (x, y) in sector.iter().zip(&direct) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn stochastic_maps_are_column_stochastic(seed in 0u64..10_000, p in 0.01f64..0.33) {
        let real = random_instance(3, 2, seed, 1.0).unwrap();
        let complex = random_instance_with(2, 2, seed, 1.0, PauliAlphabet::XYZ).unwrap();
        let z2 = stochastize(&real).unwrap();
        for m in [add_ancilla_penalty(&z2, p).unwrap(), z2, stochastize_complex(&complex).unwrap()] {
            let f = classify(m.matrix(), 1e-12);
            prop_assert!(f.column_stochastic && f.nonnegative_entries);
        }
    }

    #[test]
    fn slater_witness_is_antisymmetric_and_bounded(
        raw in proptest::collection::vec(complex_vec(4), 3),
        alpha in complex_vec(4),
    ) {
        let states = match orthonormalize(raw) {
            Some(s) => s,
            None => return Ok(()),
        };
        let mut alpha = alpha;
        let na = norm(&alpha);
        prop_assume!(na > 1e-3);
        alpha.iter_mut().for_each(|x| *x /= na);
        let w = slater_witness(&states).unwrap();
        prop_assert!((norm(&w) - 1.0).abs() < 1e-12);
        let sw = swap_registers(&w, 4, 3, 0, 2);
        prop_assert!(sw.iter().zip(&w).all(|(a, b)| (a + b).norm() < 1e-12));
        prop_assert!(first_register_weight(&w, &alpha).unwrap() <= 1.0 / 3.0 + 1e-12);
    }
}
