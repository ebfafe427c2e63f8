//! Frustration-free clock Hamiltonian for a circuit `U_L ⋯ U_1`.
//!
//! Layout: work qubits `0..n`, then `L + 1` clock qubits; clock qubit `k`
//! (1-based) sits at index `n + k - 1`. Clock state `t` is the unary string
//! `1^{t+1} 0^{L-t}`. All terms are projectors:
//!
//! * pin: `|0><0|` on clock 1,
//! * clock: `|01><01|` on clocks `(k, k+1)` for `k = 1..L`,
//! * init: `|1><1|` on work qubit `j` times `|10><10|` on clocks `(1, 2)`,
//! * prop `j < L`: on clocks `(j, j+1, j+2)` and the gate qubits,
//!   `s·|100><100| + (1-s)·|110><110| - b(U ⊗ |110><100| + h.c.)`,
//! * prop `L`: the same on clocks `(L, L+1)` with patterns `10`, `11`,
//!
//! where `b = √(s(1-s))`. The unique ground state is the history state
//! `Σ_t r^t |ψ_t>|t>` with `r = √(s/(1-s))`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{basis_state, c, kron_vec, ket_bra, normalize, OperatorMatrix, C64};
use crate::pauli::{pauli_decompose, LocalHamiltonian};
use crate::sign_elim::{stochastize_ff, FfMapping};

/// Tolerance for the unitarity check on custom gates.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    /// `[[cos θ, -sin θ], [sin θ, cos θ]]`.
    Rot { qubit: usize, angle: f64 },
    Identity,
    Custom { qubits: Vec<usize>, matrix: OperatorMatrix },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Cnot { .. } => "CNOT",
            Gate::Rot { .. } => "ROT",
            Gate::Identity => "ID",
            Gate::Custom { .. } => "CUSTOM",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Rot { qubit, .. } => vec![*qubit],
            Gate::Identity => Vec::new(),
            Gate::Custom { qubits, .. } => qubits.clone(),
        }
    }

    /// Matrix on the gate's own qubits, first listed qubit most significant.
    pub fn local_matrix(&self) -> OperatorMatrix {
        match self {
            Gate::Cnot { .. } => OperatorMatrix::from_real_rows(&[
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ])
            .expect("4x4"),
            Gate::Rot { angle, .. } => {
                let (sn, cs) = angle.sin_cos();
                OperatorMatrix::from_real_rows(&[vec![cs, -sn], vec![sn, cs]]).expect("2x2")
            }
            Gate::Identity => OperatorMatrix::identity(0),
            Gate::Custom { matrix, .. } => matrix.clone(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.local_matrix().is_real(0.0)
    }
}

/// Ordered gate list on `n` qubits.
#[derive(Clone, Debug)]
pub struct QuantumCircuit {
    n: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for (j, g) in gates.iter().enumerate() {
            let qs = g.qubits();
            if qs.len() > 2 {
                return Err(Error::contract(format!("gate {} ({}) has arity {} > 2", j + 1, g.name(), qs.len())));
            }
            if let Some(q) = qs.iter().find(|&&q| q >= n) {
                return Err(Error::contract(format!(
                    "gate {} ({}) uses qubit {q} outside 0..{n}",
                    j + 1,
                    g.name()
                )));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::contract(format!("gate {} ({}) repeats qubit {}", j + 1, g.name(), qs[0])));
            }
            if let Gate::Custom { qubits, matrix } = g {
                if matrix.qubits() != qubits.len() {
                    return Err(Error::contract(format!(
                        "gate {} (CUSTOM) matrix acts on {} qubits but {} are listed",
                        j + 1,
                        matrix.qubits(),
                        qubits.len()
                    )));
                }
                let defect = matrix
                    .adjoint()
                    .mul(matrix)
                    .sub(&OperatorMatrix::identity(matrix.qubits()))
                    .max_abs();
                if defect > UNITARY_TOL {
                    return Err(Error::contract(format!(
                        "gate {} (CUSTOM) is not unitary (defect {defect:.3e})",
                        j + 1
                    )));
                }
            }
        }
        Ok(QuantumCircuit { n, gates })
    }

    /// Seeded circuit of `len` gates drawn from CNOT and ROT with uniform angles.
    pub fn random_real(n: usize, len: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::contract("circuit needs at least one qubit"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = (0..len)
            .map(|_| {
                if n >= 2 && rng.random_bool(0.5) {
                    let control = rng.random_range(0..n);
                    let mut target = rng.random_range(0..n - 1);
                    if target >= control {
                        target += 1;
                    }
                    Gate::Cnot { control, target }
                } else {
                    Gate::Rot {
                        qubit: rng.random_range(0..n),
                        angle: rng.random_range(0.0..2.0 * PI),
                    }
                }
            })
            .collect();
        Self::new(n, gates)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gate `j` (0-based) as an `n`-qubit matrix.
    pub fn gate_matrix(&self, j: usize) -> OperatorMatrix {
        let g = &self.gates[j];
        let qs = g.qubits();
        if qs.is_empty() {
            return OperatorMatrix::identity(self.n);
        }
        OperatorMatrix::embed(&g.local_matrix(), &qs, self.n).expect("validated at construction")
    }

    /// `ψ_0 = |0^n>, ψ_t = U_t ψ_{t-1}` for `t = 0..L`.
    pub fn states(&self) -> Vec<Vec<C64>> {
        let mut out = vec![basis_state(self.n, 0)];
        for j in 0..self.gates.len() {
            let next = self.gate_matrix(j).matvec(out.last().expect("non-empty"));
            out.push(next);
        }
        out
    }

    pub fn simulate(&self) -> Vec<C64> {
        self.states().pop().expect("non-empty")
    }

    /// The circuit followed by `L` identity gates.
    pub fn padded(&self) -> Self {
        let mut gates = self.gates.clone();
        gates.extend(std::iter::repeat_n(Gate::Identity, self.gates.len()));
        QuantumCircuit { n: self.n, gates }
    }

    /// First gate with complex entries, as `(1-based index, name)`.
    pub fn first_complex_gate(&self) -> Option<(usize, &'static str)> {
        self.gates
            .iter()
            .enumerate()
            .find(|(_, g)| !g.is_real())
            .map(|(j, g)| (j + 1, g.name()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum FfTermKind {
    Pin,
    /// Clock pair `(k, k+1)`, 1-based.
    Clock(usize),
    /// Work qubit `j`, 1-based.
    Init(usize),
    /// Gate `j`, 1-based.
    Prop(usize),
}

/// A projector stored as a local matrix plus the qubits it acts on.
#[derive(Clone, Debug)]
pub struct FfTerm {
    pub kind: FfTermKind,
    pub targets: Vec<usize>,
    pub local: OperatorMatrix,
}

impl FfTerm {
    pub fn realize(&self, total: usize) -> Result<OperatorMatrix> {
        OperatorMatrix::embed(&self.local, &self.targets, total)
    }
}

#[derive(Clone, Debug)]
pub struct FFHamiltonian {
    pub s: f64,
    pub n: usize,
    pub l: usize,
    pub terms: Vec<FfTerm>,
}

impl FFHamiltonian {
    pub fn total_qubits(&self) -> usize {
        self.n + self.l + 1
    }

    /// Index of clock qubit `k` (1-based).
    pub fn clock_qubit(&self, k: usize) -> usize {
        self.n + k - 1
    }

    /// `√(s(1-s))`.
    pub fn b(&self) -> f64 {
        (self.s * (1.0 - self.s)).sqrt()
    }

    /// `√(s/(1-s))`.
    pub fn r(&self) -> f64 {
        (self.s / (1.0 - self.s)).sqrt()
    }

    /// Sum of all terms on the full register.
    pub fn realize(&self) -> Result<OperatorMatrix> {
        let q = self.total_qubits();
        let mats = self
            .terms
            .iter()
            .map(|t| t.realize(q))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorMatrix::sum(q, &mats))
    }

    /// Sum of the terms of one family (e.g. all clock terms).
    pub fn realize_where(&self, keep: impl Fn(FfTermKind) -> bool) -> Result<OperatorMatrix> {
        let q = self.total_qubits();
        let mats = self
            .terms
            .iter()
            .filter(|t| keep(t.kind))
            .map(|t| t.realize(q))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorMatrix::sum(q, &mats))
    }

    /// Each term as a Pauli expansion on the full register.
    pub fn local_hamiltonians(&self) -> Result<Vec<LocalHamiltonian>> {
        let q = self.total_qubits();
        self.terms
            .iter()
            .map(|t| pauli_decompose(&t.local, 1e-14)?.relabel(q, &t.targets))
            .collect()
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::contract(format!("s must lie in [0, 1/2], got {s}")));
    }
    Ok(())
}

/// Unary clock string for time `t` on `L + 1` qubits, as a basis index.
pub fn clock_index(t: usize, l: usize) -> usize {
    // 1^{t+1} 0^{L-t}
    ((1usize << (t + 1)) - 1) << (l - t)
}

fn prop_local(u: &OperatorMatrix, s: f64, clock_bits: usize, before: usize, after: usize) -> OperatorMatrix {
    let b = (s * (1.0 - s)).sqrt();
    let g = u.qubits();
    let id = OperatorMatrix::identity(g);
    let pb = ket_bra(clock_bits, before, before);
    let pa = ket_bra(clock_bits, after, after);
    let fwd = ket_bra(clock_bits, after, before);
    let bwd = ket_bra(clock_bits, before, after);
    id.kron(&pb)
        .scale(s)
        .add(&id.kron(&pa).scale(1.0 - s))
        .sub(&u.kron(&fwd).add(&u.adjoint().kron(&bwd)).scale(b))
}

pub fn build_ff(circuit: &QuantumCircuit, s: f64) -> Result<FFHamiltonian> {
    check_s(s)?;
    let l = circuit.len();
    if l == 0 {
        return Err(Error::contract("clock construction needs at least one gate"));
    }
    let n = circuit.n();
    let cq = |k: usize| n + k - 1;
    let mut terms = vec![FfTerm {
        kind: FfTermKind::Pin,
        targets: vec![cq(1)],
        local: ket_bra(1, 0, 0),
    }];
    for k in 1..=l {
        terms.push(FfTerm {
            kind: FfTermKind::Clock(k),
            targets: vec![cq(k), cq(k + 1)],
            local: ket_bra(2, 0b01, 0b01),
        });
    }
    for j in 0..n {
        terms.push(FfTerm {
            kind: FfTermKind::Init(j + 1),
            targets: vec![j, cq(1), cq(2)],
            local: ket_bra(3, 0b110, 0b110),
        });
    }
    for (idx, g) in circuit.gates().iter().enumerate() {
        let j = idx + 1;
        let u = g.local_matrix();
        let mut targets = g.qubits();
        let local = if j < l {
            targets.extend([cq(j), cq(j + 1), cq(j + 2)]);
            prop_local(&u, s, 3, 0b100, 0b110)
        } else {
            targets.extend([cq(j), cq(j + 1)]);
            prop_local(&u, s, 2, 0b10, 0b11)
        };
        terms.push(FfTerm {
            kind: FfTermKind::Prop(j),
            targets,
            local,
        });
    }
    Ok(FFHamiltonian { s, n, l, terms })
}

/// Normalized `Σ_t r^t |ψ_t> ⊗ |1^{t+1} 0^{L-t}>`.
pub fn history_state(circuit: &QuantumCircuit, s: f64) -> Result<Vec<C64>> {
    check_s(s)?;
    let l = circuit.len();
    let r = (s / (1.0 - s)).sqrt();
    let clock_qubits = l + 1;
    let mut out = vec![c(0.0, 0.0); 1 << (circuit.n() + clock_qubits)];
    for (t, psi) in circuit.states().iter().enumerate() {
        let w = r.powi(t as i32);
        let term = kron_vec(psi, &basis_state(clock_qubits, clock_index(t, l)));
        out.iter_mut().zip(term).for_each(|(a, b)| *a += b * w);
    }
    normalize(&mut out);
    Ok(out)
}

/// Tridiagonal block of the Hamiltonian on `span{|χ_x^t>}`.
#[derive(Clone, Debug)]
pub struct BlockMatrix {
    pub l: usize,
    pub hamming_weight: usize,
    pub s: f64,
    pub entries: DMatrix<f64>,
}

impl BlockMatrix {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.entries.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `(L+1)×(L+1)` matrix with diagonal `(s + |x|, 1, …, 1, 1 - s)` and
/// off-diagonal `-√(s(1-s))`.
pub fn block_matrix(hamming_weight: i64, s: f64, l: usize) -> Result<BlockMatrix> {
    check_s(s)?;
    if hamming_weight < 0 {
        return Err(Error::contract(format!("Hamming weight must be nonnegative, got {hamming_weight}")));
    }
    if l == 0 {
        return Err(Error::contract("block matrix needs L >= 1"));
    }
    let b = (s * (1.0 - s)).sqrt();
    let d = l + 1;
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = 1.0;
        if i + 1 < d {
            m[(i, i + 1)] = -b;
            m[(i + 1, i)] = -b;
        }
    }
    m[(0, 0)] = s + hamming_weight as f64;
    m[(l, l)] = 1.0 - s;
    Ok(BlockMatrix {
        l,
        hamming_weight: hamming_weight as usize,
        s,
        entries: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapFormulas {
    /// `1 - 2√(s(1-s)) cos(π/(L+1))`: gap inside the `|x| = 0` block.
    pub block_gap: f64,
    /// `1 - 2√(s(1-s)) cos(π/(2(L+1)))`: gap of the whole Hamiltonian.
    pub full_gap: f64,
}

pub fn gap_formulas(s: f64, l: usize) -> GapFormulas {
    let b = (s * (1.0 - s)).sqrt();
    let lp = (l + 1) as f64;
    GapFormulas {
        block_gap: 1.0 - 2.0 * b * (PI / lp).cos(),
        full_gap: 1.0 - 2.0 * b * (PI / (2.0 * lp)).cos(),
    }
}

/// Stochastic images of the clock terms, one ancilla per the real map.
///
/// Every gate must have real entries.
pub fn build_stochastic_ff(circuit: &QuantumCircuit, s: f64, p: f64, tol: f64) -> Result<FfMapping> {
    if let Some((j, name)) = circuit.first_complex_gate() {
        return Err(Error::contract(format!(
            "gate {j} ({name}) has complex entries; the stochastic clock construction needs real gates"
        )));
    }
    let ff = build_ff(circuit, s)?;
    stochastize_ff(&ff.local_hamiltonians()?, p, tol)
}
