//! Sign-eliminating maps.
//!
//! Each scalar phase of a Pauli-string term is replaced by a permutation block
//! acting on ancilla qubits: `{+1, -1}` by `{I, X}` on one ancilla, and
//! `{1, i, -1, -i}` by powers of the 4-cycle `F` on two ancillas. The mapped
//! matrix commutes with the projectors onto fixed ancilla eigenstates, and in
//! one of those sectors it reproduces the input Hamiltonian (up to `1/N`).
//!
//! Ancillas are appended after the work qubits, so a mapped operator reads
//! `A_work ⊗ B_ancilla`.

mod ff;
mod z2;
pub(crate) mod z4;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use ff::{stochastize_ff, FfMapping, WeightedTerm};
pub use z2::{add_ancilla_penalty, stochastize, stoquastize};
pub use z4::{add_penalty_complex, f_matrix, stochastize_complex, v_state, SectorDecomposition};

use crate::error::{Error, Result};
use crate::matrix::{c, OperatorMatrix, C64};
use crate::pauli::{pauli_decompose, LocalHamiltonian};
use crate::spectral::eig_dense;

/// Largest `p` for which the penalized spectrum is guaranteed to split.
pub const PENALTY_SPLIT_LIMIT: f64 = 1.0 / 3.0;

/// Default penalty parameter.
pub const DEFAULT_P: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Stoquastic,
    Stochastic,
    StochasticPenalized,
    ComplexStochastic,
    ComplexPenalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorLabel {
    Minus,
    Plus,
    V0,
    V1,
    V2,
    V3,
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SectorLabel::Minus => "minus",
            SectorLabel::Plus => "plus",
            SectorLabel::V0 => "v0",
            SectorLabel::V1 => "v1",
            SectorLabel::V2 => "v2",
            SectorLabel::V3 => "v3",
        })
    }
}

impl FromStr for SectorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "minus" | "-" => SectorLabel::Minus,
            "plus" | "+" => SectorLabel::Plus,
            "v0" => SectorLabel::V0,
            "v1" => SectorLabel::V1,
            "v2" => SectorLabel::V2,
            "v3" => SectorLabel::V3,
            other => return Err(Error::contract(format!("unknown sector label '{other}'"))),
        })
    }
}

/// An invariant subspace `work ⊗ |ancilla_state>`.
#[derive(Clone, Debug)]
pub struct Sector {
    pub label: SectorLabel,
    pub ancilla_state: Vec<C64>,
}

pub(crate) fn z2_sectors() -> Vec<Sector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        Sector {
            label: SectorLabel::Minus,
            ancilla_state: vec![c(h, 0.0), c(-h, 0.0)],
        },
        Sector {
            label: SectorLabel::Plus,
            ancilla_state: vec![c(h, 0.0), c(h, 0.0)],
        },
    ]
}

/// `weight · op` where `op` is a permutation matrix on work plus ancillas.
#[derive(Clone, Debug)]
pub struct MappedTerm {
    pub weight: f64,
    /// Qubits the lifted term acts on nontrivially.
    pub support: Vec<usize>,
    pub op: OperatorMatrix,
}

/// Output of a sign-eliminating map.
///
/// The realized matrix is `prefactor · Σ weight·op + penalty · ½(1 + X_a)`
/// with `a` the first ancilla.
#[derive(Clone, Debug)]
pub struct MappedHamiltonian {
    pub kind: MapKind,
    pub work_qubits: usize,
    pub ancilla_count: usize,
    /// `N = Σ α_k` of the input.
    pub normalization: f64,
    pub prefactor: f64,
    /// Penalty parameter `p`, when a penalty was added.
    pub p: Option<f64>,
    /// Set when `p >= 1/3`, where the spectral split is not guaranteed.
    pub penalty_warning: bool,
    pub sectors: Vec<Sector>,
    pub terms: Vec<MappedTerm>,
    pub input_locality: usize,
    matrix: OperatorMatrix,
}

impl MappedHamiltonian {
    pub fn total_qubits(&self) -> usize {
        self.work_qubits + self.ancilla_count
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    /// Largest support among lifted terms (the penalty is 1-local).
    pub fn locality(&self) -> usize {
        let terms = self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0);
        if self.p.is_some() {
            terms.max(1)
        } else {
            terms
        }
    }

    pub fn sector(&self, label: SectorLabel) -> Result<&Sector> {
        self.sectors.iter().find(|s| s.label == label).ok_or_else(|| {
            Error::contract(format!("sector {label} is not defined for a {:?} map", self.kind))
        })
    }

    /// `V† M V` with `V = 1_work ⊗ |ancilla_state>`.
    pub fn sector_operator(&self, label: SectorLabel) -> Result<OperatorMatrix> {
        let sector = self.sector(label)?;
        Ok(restrict_to_ancilla_state(
            &self.matrix,
            self.ancilla_count,
            &sector.ancilla_state,
        ))
    }

    /// Eigenvalues of the matrix restricted to a sector, ascending.
    pub fn sector_spectrum(&self, label: SectorLabel) -> Result<Vec<f64>> {
        Ok(eig_dense(&self.sector_operator(label)?)?.eigenvalues)
    }

    /// `||M V - V (V† M V)||_F`; zero when the sector is invariant.
    pub fn sector_invariance_defect(&self, label: SectorLabel) -> Result<f64> {
        let sector = self.sector(label)?;
        let restricted = self.sector_operator(label)?;
        let a = self.ancilla_count;
        let lifted = OperatorMatrix::from_triplets(
            self.total_qubits(),
            restricted.entries().flat_map(|(r, col, v)| {
                let anc = &sector.ancilla_state;
                (0..anc.len()).flat_map(move |x| {
                    (0..anc.len()).map(move |y| {
                        ((r << a) | x, (col << a) | y, v * anc[x] * anc[y].conj())
                    })
                })
            }),
        );
        let proj = sector_projector(self.total_qubits(), a, &sector.ancilla_state);
        let lhs = self.matrix.mul(&proj);
        Ok(lhs.sub(&lifted).frobenius_norm())
    }

    /// Sector carrying the input Hamiltonian and the factor it is scaled by.
    pub fn reproduced_sector(&self) -> (SectorLabel, f64) {
        let n = self.normalization;
        match self.kind {
            MapKind::Stoquastic => (SectorLabel::Minus, 1.0),
            MapKind::Stochastic => (SectorLabel::Minus, 1.0 / n),
            MapKind::StochasticPenalized => (SectorLabel::Minus, self.p.unwrap_or(1.0) / n),
            MapKind::ComplexStochastic => (SectorLabel::V1, 1.0 / n),
            MapKind::ComplexPenalized => (SectorLabel::V1, self.p.unwrap_or(1.0) / n),
        }
    }

    /// Pauli expansion of the realized matrix on `n + A` qubits.
    pub fn to_local_hamiltonian(&self) -> Result<LocalHamiltonian> {
        pauli_decompose(&self.matrix, 1e-13)
    }
}

/// `1_work ⊗ |a><a|` on `total` qubits, `a` on the last `ancillas` qubits.
pub fn sector_projector(total: usize, ancillas: usize, anc: &[C64]) -> OperatorMatrix {
    let work_dim = 1usize << (total - ancillas);
    let ad = anc.len();
    OperatorMatrix::from_triplets(
        total,
        (0..work_dim).flat_map(|w| {
            (0..ad).flat_map(move |x| {
                (0..ad).map(move |y| ((w << ancillas) | x, (w << ancillas) | y, anc[x] * anc[y].conj()))
            })
        }),
    )
}

/// `V† M V` with `V = 1 ⊗ |anc>` on the trailing `ancillas` qubits.
pub fn restrict_to_ancilla_state(m: &OperatorMatrix, ancillas: usize, anc: &[C64]) -> OperatorMatrix {
    let mask = (1usize << ancillas) - 1;
    OperatorMatrix::from_triplets(
        m.qubits() - ancillas,
        m.entries().map(|(r, col, v)| {
            (
                r >> ancillas,
                col >> ancillas,
                anc[r & mask].conj() * v * anc[col & mask],
            )
        }),
    )
}

/// `½(1 + X)` on qubit `q` of a `total`-qubit register.
pub(crate) fn plus_projector_on(q: usize, total: usize) -> OperatorMatrix {
    let half = OperatorMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]])
        .expect("2x2 is a valid qubit operator");
    OperatorMatrix::embed(&half, &[q], total).expect("qubit inside register")
}

pub(crate) fn realize(
    qubits: usize,
    prefactor: f64,
    terms: &[MappedTerm],
    penalty: Option<(f64, usize)>,
) -> OperatorMatrix {
    let mut trip: Vec<(usize, usize, C64)> = terms
        .iter()
        .flat_map(|t| t.op.entries().map(move |(r, col, v)| (r, col, v * (t.weight * prefactor))))
        .collect();
    if let Some((coeff, q)) = penalty {
        trip.extend(
            plus_projector_on(q, qubits)
                .entries()
                .map(|(r, col, v)| (r, col, v * coeff)),
        );
    }
    OperatorMatrix::from_triplets(qubits, trip)
}

pub(crate) fn term_support(work: &[usize], uses_ancillas: bool, ancillas: std::ops::Range<usize>) -> Vec<usize> {
    let mut s = work.to_vec();
    if uses_ancillas {
        s.extend(ancillas);
    }
    s
}
