//! Pauli strings and k-local Hamiltonians written as positively weighted,
//! signed Pauli strings: `H = Σ_k α_k · s_k · P_k` with `α_k > 0`, `s_k = ±1`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, OperatorMatrix, C64, MAX_QUBITS};

/// Default cap on the register size `build_matrix` will realize.
pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Coefficients at or below this magnitude are dropped after merging.
pub const ZERO_COEFF: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn masks(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_masks(x: bool, z: bool) -> Option<Self> {
        match (x, z) {
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
            (false, false) => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Entry `P[col ^ x, col]` of the Pauli string with bit masks `x`, `z`.
///
/// The string equals `i^{|x & z|} X^x Z^z`, so the entry is
/// `i^{|x&z|} (-1)^{|col & z|}`.
#[inline]
pub fn pauli_entry(x: usize, z: usize, col: usize) -> C64 {
    let phase = match (x & z).count_ones() % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    };
    if (col & z).count_ones() % 2 == 1 {
        -phase
    } else {
        phase
    }
}

/// Tensor product of single-qubit Paulis (identity elsewhere) with a sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: BTreeMap<usize, Pauli>,
    sign: Sign,
}

impl PauliString {
    pub fn new(factors: impl IntoIterator<Item = (usize, Pauli)>, sign: Sign) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (q, p) in factors {
            if map.insert(q, p).is_some() {
                return Err(Error::contract(format!("qubit {q} appears twice in a Pauli string")));
            }
        }
        Ok(PauliString { factors: map, sign })
    }

    pub fn identity() -> Self {
        PauliString {
            factors: BTreeMap::new(),
            sign: Sign::Plus,
        }
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        PauliString {
            factors: BTreeMap::from([(q, p)]),
            sign: Sign::Plus,
        }
    }

    pub fn factors(&self) -> &BTreeMap<usize, Pauli> {
        &self.factors
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.keys().next_back().copied()
    }

    /// Whether the realized matrix has only real entries (even number of Y factors).
    pub fn is_real(&self) -> bool {
        self.factors.values().filter(|p| **p == Pauli::Y).count() % 2 == 0
    }

    /// `(x, z)` bit masks on an `n`-qubit register.
    pub fn masks(&self, n: usize) -> (usize, usize) {
        let (mut x, mut z) = (0, 0);
        for (&q, &p) in &self.factors {
            let bit = 1 << (n - 1 - q);
            let (px, pz) = p.masks();
            if px {
                x |= bit;
            }
            if pz {
                z |= bit;
            }
        }
        (x, z)
    }

    /// Sparse realization on `n` qubits, including the sign.
    pub fn to_matrix(&self, n: usize) -> OperatorMatrix {
        let (x, z) = self.masks(n);
        let s = self.sign.value();
        OperatorMatrix::from_triplets(
            n,
            (0..1usize << n).map(|col| (col ^ x, col, pauli_entry(x, z, col) * s)),
        )
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            f.write_str("-")?;
        }
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        for (i, (q, p)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}{q}")?;
        }
        Ok(())
    }
}

/// One term `alpha · string` with `alpha > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub alpha: f64,
    pub string: PauliString,
}

impl Term {
    /// Signed coefficient `alpha · sign`.
    pub fn coefficient(&self) -> f64 {
        self.alpha * self.string.sign.value()
    }
}

/// Sum of positively weighted signed Pauli strings on `n` qubits.
///
/// Duplicate strings are merged at construction and terms that merge to zero
/// are removed; terms are kept in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHamiltonian {
    n: usize,
    terms: Vec<Term>,
}

type Key = Vec<(usize, Pauli)>;

impl LocalHamiltonian {
    /// Builds from signed coefficients on Pauli factor lists.
    pub fn from_signed_terms(
        n: usize,
        terms: impl IntoIterator<Item = (f64, Vec<(usize, Pauli)>)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<Key, f64> = BTreeMap::new();
        for (coeff, factors) in terms {
            if !coeff.is_finite() {
                return Err(Error::contract(format!("non-finite coefficient {coeff}")));
            }
            let s = PauliString::new(factors, Sign::Plus)?;
            if let Some(q) = s.max_qubit() {
                if q >= n {
                    return Err(Error::contract(format!(
                        "qubit index {q} out of range for {n} qubits"
                    )));
                }
            }
            let key: Key = s.factors.into_iter().collect();
            *merged.entry(key).or_insert(0.0) += coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, v)| v.abs() > ZERO_COEFF)
            .map(|(key, v)| Term {
                alpha: v.abs(),
                string: PauliString {
                    factors: key.into_iter().collect(),
                    sign: Sign::of(v),
                },
            })
            .collect();
        Ok(LocalHamiltonian { n, terms })
    }

    /// Builds from explicit positive-weight terms.
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.alpha <= 0.0 || !t.alpha.is_finite()) {
            return Err(Error::contract(format!(
                "term weights must be positive and finite, got {}",
                t.alpha
            )));
        }
        Self::from_signed_terms(
            n,
            terms
                .into_iter()
                .map(|t| (t.coefficient(), t.string.factors.into_iter().collect())),
        )
    }

    pub fn zero(n: usize) -> Self {
        LocalHamiltonian { n, terms: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest term weight.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.string.weight()).max().unwrap_or(0)
    }

    /// `N = Σ α_k`.
    pub fn normalization(&self) -> f64 {
        self.terms.iter().map(|t| t.alpha).sum()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.string.is_real())
    }

    /// Signed coefficients with factor lists, in canonical order.
    pub fn signed_terms(&self) -> impl Iterator<Item = (f64, Vec<(usize, Pauli)>)> + '_ {
        self.terms.iter().map(|t| {
            (
                t.coefficient(),
                t.string.factors.iter().map(|(&q, &p)| (q, p)).collect(),
            )
        })
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self::from_signed_terms(self.n, self.signed_terms().map(|(v, k)| (v * f, k)))
            .expect("scaling preserves validity")
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::contract(format!(
                "cannot add Hamiltonians on {} and {} qubits",
                self.n, other.n
            )));
        }
        Self::from_signed_terms(self.n, self.signed_terms().chain(other.signed_terms()))
    }

    /// Same terms on a register of `n` qubits, qubit `q` relabelled to `map[q]`.
    pub fn relabel(&self, n: usize, map: &[usize]) -> Result<Self> {
        Self::from_signed_terms(
            n,
            self.signed_terms().map(|(v, k)| {
                (v, k.into_iter().map(|(q, p)| (map[q], p)).collect())
            }),
        )
    }

    /// Tensor product `self ⊗ other`; `other`'s qubits follow `self`'s.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut out = Vec::new();
        for (a, ka) in self.signed_terms() {
            for (b, kb) in other.signed_terms() {
                let mut k = ka.clone();
                k.extend(kb.into_iter().map(|(q, p)| (q + self.n, p)));
                out.push((a * b, k));
            }
        }
        Self::from_signed_terms(n, out).expect("tensor of valid Hamiltonians is valid")
    }

    pub fn build_matrix(&self) -> Result<OperatorMatrix> {
        self.build_matrix_capped(DEFAULT_MAX_QUBITS)
    }

    /// Realizes `Σ α s P` as a sparse matrix if `n <= max_qubits`.
    pub fn build_matrix_capped(&self, max_qubits: usize) -> Result<OperatorMatrix> {
        let cap = max_qubits.min(MAX_QUBITS);
        if self.n > cap {
            return Err(Error::Resource {
                what: format!("{}-qubit Hamiltonian", self.n),
                required: 1usize.checked_shl(self.n as u32).unwrap_or(usize::MAX),
                cap: 1 << cap,
            });
        }
        let n = self.n;
        let mut trip = Vec::with_capacity(self.terms.len() << n);
        for t in &self.terms {
            let (x, z) = t.string.masks(n);
            let w = t.coefficient();
            for col in 0..1usize << n {
                trip.push((col ^ x, col, pauli_entry(x, z, col) * w));
            }
        }
        Ok(OperatorMatrix::from_triplets(n, trip))
    }
}

impl fmt::Display for LocalHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}·({})", t.alpha, t.string)?;
        }
        Ok(())
    }
}

/// Pauli expansion of a Hermitian matrix: `c_P = Tr(P M) / 2^m`.
pub fn pauli_decompose(m: &OperatorMatrix, tol: f64) -> Result<LocalHamiltonian> {
    if !m.is_hermitian() {
        return Err(Error::contract("Pauli decomposition needs a Hermitian matrix"));
    }
    let q = m.qubits();
    let dim = m.dim();
    let mut by_x: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
    for (r, col, v) in m.entries() {
        by_x.entry(r ^ col).or_default().push((col, v));
    }
    let mut terms = Vec::new();
    for (&x, entries) in &by_x {
        for z in 0..dim {
            // Tr(P M) = Σ_col conj(P[col^x, col]) M[col^x, col]
            let tr: C64 = entries
                .iter()
                .map(|&(col, v)| pauli_entry(x, z, col).conj() * v)
                .sum();
            let coeff = tr.re / dim as f64;
            if coeff.abs() > tol {
                let factors = (0..q)
                    .filter_map(|k| {
                        let bit = 1 << (q - 1 - k);
                        Pauli::from_masks(x & bit != 0, z & bit != 0).map(|p| (k, p))
                    })
                    .collect();
                terms.push((coeff, factors));
            }
        }
    }
    LocalHamiltonian::from_signed_terms(q, terms)
}

/// Which single-qubit Paulis `random_instance` may draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliAlphabet {
    /// `X`, `Z`, `XX`, `ZZ` terms only (real entries).
    XZ,
    /// Adds `Y`, `XY`, `ZY` terms (complex entries).
    XYZ,
}

/// Seeded random instance: every allowed 1- and 2-qubit string gets a
/// coefficient uniform in `[-scale, scale]`.
pub fn random_instance(n: usize, locality: usize, seed: u64, scale: f64) -> Result<LocalHamiltonian> {
    random_instance_with(n, locality, seed, scale, PauliAlphabet::XZ)
}

pub fn random_instance_with(
    n: usize,
    locality: usize,
    seed: u64,
    scale: f64,
    alphabet: PauliAlphabet,
) -> Result<LocalHamiltonian> {
    if n == 0 {
        return Err(Error::contract("random instance needs at least one qubit"));
    }
    if !(1..=2).contains(&locality) {
        return Err(Error::contract(format!("locality must be 1 or 2, got {locality}")));
    }
    let scale = scale.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || rng.random_range(-scale..=scale);
    let singles: &[Pauli] = match alphabet {
        PauliAlphabet::XZ => &[Pauli::X, Pauli::Z],
        PauliAlphabet::XYZ => &[Pauli::X, Pauli::Y, Pauli::Z],
    };
    let pairs: &[(Pauli, Pauli)] = match alphabet {
        PauliAlphabet::XZ => &[(Pauli::X, Pauli::X), (Pauli::Z, Pauli::Z)],
        PauliAlphabet::XYZ => &[
            (Pauli::X, Pauli::X),
            (Pauli::Z, Pauli::Z),
            (Pauli::X, Pauli::Y),
            (Pauli::Z, Pauli::Y),
        ],
    };
    let mut terms = Vec::new();
    for q in 0..n {
        for &p in singles {
            terms.push((draw(), vec![(q, p)]));
        }
    }
    if locality == 2 {
        for i in 0..n {
            for j in i + 1..n {
                for &(a, b) in pairs {
                    terms.push((draw(), vec![(i, a), (j, b)]));
                }
            }
        }
    }
    LocalHamiltonian::from_signed_terms(n, terms.into_iter().filter(|(v, _)| *v != 0.0))
}

impl PauliString {
    /// Returns the string with its sign flipped.
    pub fn negated(&self) -> Self {
        PauliString {
            factors: self.factors.clone(),
            sign: self.sign.flip(),
        }
    }
}
