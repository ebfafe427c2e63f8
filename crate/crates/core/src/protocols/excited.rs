//! Excited-state energy problem: decide whether the `c`-th smallest eigenvalue
//! of a local Hamiltonian is at most `a` or at least `b`.
//!
//! The verifier receives `c` registers in an antisymmetric state, measures the
//! energy of the first register and accepts below a threshold. Antisymmetry
//! forces any witness to spread over `c` orthogonal states, so at most a
//! `1/c` fraction of weight can sit on a single eigenvector.

use itertools::Itertools;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{c as cplx, inner, OperatorMatrix, C64};
use crate::pauli::{LocalHamiltonian, Pauli};
use crate::spectral::{eig_dense, DEFAULT_DENSE_CAP};

/// Orthonormality tolerance for Slater inputs.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EnergyVerdict {
    Yes,
    No,
    Ambiguous,
}

#[derive(Clone, Debug)]
pub struct ExcitedEnergyProblem {
    pub h: LocalHamiltonian,
    pub c: usize,
    pub a: f64,
    pub b: f64,
}

impl ExcitedEnergyProblem {
    pub fn new(h: LocalHamiltonian, c: usize, a: f64, b: f64) -> Result<Self> {
        if c == 0 {
            return Err(Error::contract("c must be at least 1"));
        }
        if b.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::contract(format!("need b > a, got a = {a}, b = {b}")));
        }
        Ok(ExcitedEnergyProblem { h, c, a, b })
    }

    pub fn epsilon(&self) -> f64 {
        self.b - self.a
    }

    /// Energy cut used by the verifier: midway between `a` and `b`.
    pub fn threshold(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// `λ_c`, the `c`-th smallest eigenvalue counting multiplicity.
    pub fn lambda_c(&self) -> Result<f64> {
        let s = eig_dense(&self.h.build_matrix()?)?;
        s.eigenvalues.get(self.c - 1).copied().ok_or_else(|| {
            Error::contract(format!("c = {} exceeds the dimension {}", self.c, s.len()))
        })
    }

    pub fn verdict(&self) -> Result<EnergyVerdict> {
        let l = self.lambda_c()?;
        Ok(if l <= self.a {
            EnergyVerdict::Yes
        } else if l >= self.b {
            EnergyVerdict::No
        } else {
            EnergyVerdict::Ambiguous
        })
    }
}

/// Diagonal Hamiltonian with exactly `c` negative eigenvalues.
///
/// With `d = ⌈log₂ c⌉` and `P_k = |0><0|_k`:
/// `H_c = Σ_{k<=d} 2^k P_k + Σ_{k>d} 2^{d+1} P_k - (c - ½)`.
pub fn build_hc(c: usize, n: usize) -> Result<LocalHamiltonian> {
    if c == 0 {
        return Err(Error::contract("c must be at least 1"));
    }
    let d = c.next_power_of_two().trailing_zeros() as usize;
    if n < d + 1 {
        return Err(Error::contract(format!("H_c with c = {c} needs at least {} qubits, got {n}", d + 1)));
    }
    let weight = |k: usize| if k <= d { (1u64 << k) as f64 } else { (1u64 << (d + 1)) as f64 };
    let mut terms: Vec<(f64, Vec<(usize, Pauli)>)> = (0..n).map(|k| (0.5 * weight(k), vec![(k, Pauli::Z)])).collect();
    let shift: f64 = (0..n).map(|k| 0.5 * weight(k)).sum::<f64>() - (c as f64 - 0.5);
    terms.push((shift, Vec::new()));
    LocalHamiltonian::from_signed_terms(n, terms)
}

/// `Ha ⊗ |0><0| + Hb ⊗ |1><1|` with the selector appended as qubit `n`.
pub fn direct_sum(ha: &LocalHamiltonian, hb: &LocalHamiltonian) -> Result<LocalHamiltonian> {
    if ha.n() != hb.n() {
        return Err(Error::contract(format!(
            "direct sum needs equal sizes, got {} and {} qubits",
            ha.n(),
            hb.n()
        )));
    }
    let n = ha.n();
    let z = |mut k: Vec<(usize, Pauli)>| {
        k.push((n, Pauli::Z));
        k
    };
    let terms = ha
        .signed_terms()
        .flat_map(|(v, k)| [(0.5 * v, k.clone()), (0.5 * v, z(k))])
        .chain(hb.signed_terms().flat_map(|(v, k)| [(0.5 * v, k.clone()), (-0.5 * v, z(k))]));
    LocalHamiltonian::from_signed_terms(n + 1, terms)
}

fn parity(perm: &[usize]) -> f64 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(c: usize) -> f64 {
    (1..=c).map(|k| k as f64).product()
}

/// `(1/√c!) Σ_π sgn(π) ψ_{π(1)} ⊗ … ⊗ ψ_{π(c)}`.
pub fn slater_witness(states: &[Vec<C64>]) -> Result<Vec<C64>> {
    let c = states.len();
    if c == 0 {
        return Err(Error::contract("Slater witness needs at least one state"));
    }
    let d = states[0].len();
    if states.iter().any(|s| s.len() != d) {
        return Err(Error::contract("Slater inputs must share one dimension"));
    }
    for i in 0..c {
        for j in i..c {
            let g = inner(&states[i], &states[j]);
            let expect = if i == j { 1.0 } else { 0.0 };
            if (g - cplx(expect, 0.0)).norm() > ORTHONORMAL_TOL {
                return Err(Error::contract(format!(
                    "Slater inputs are not orthonormal (<ψ_{i}|ψ_{j}> = {g})"
                )));
            }
        }
    }
    let dim = d.pow(c as u32);
    let mut out = vec![cplx(0.0, 0.0); dim];
    let norm = 1.0 / factorial(c).sqrt();
    for perm in (0..c).permutations(c) {
        let sign = parity(&perm) * norm;
        let mut prod = vec![cplx(sign, 0.0)];
        for &k in &perm {
            prod = crate::matrix::kron_vec(&prod, &states[k]);
        }
        out.iter_mut().zip(prod).for_each(|(o, p)| *o += p);
    }
    Ok(out)
}

/// Swaps registers `i` and `j` of a `c`-fold tensor power of dimension `d`.
pub fn swap_registers(phi: &[C64], d: usize, c: usize, i: usize, j: usize) -> Vec<C64> {
    let digit = |idx: usize, k: usize| (idx / d.pow((c - 1 - k) as u32)) % d;
    let mut out = vec![cplx(0.0, 0.0); phi.len()];
    for (idx, v) in phi.iter().enumerate() {
        let (a, b) = (digit(idx, i), digit(idx, j));
        let wi = d.pow((c - 1 - i) as u32);
        let wj = d.pow((c - 1 - j) as u32);
        let swapped = idx - a * wi - b * wj + b * wi + a * wj;
        out[swapped] = *v;
    }
    out
}

/// Projector onto the antisymmetric subspace of `(C^d)^{⊗c}`; `d` a power of two.
pub fn antisym_projector(d: usize, c: usize) -> Result<OperatorMatrix> {
    if c == 0 || c > d {
        return Err(Error::contract(format!(
            "antisymmetric subspace is empty for c = {c}, d = {d}"
        )));
    }
    if !d.is_power_of_two() {
        return Err(Error::contract(format!("register dimension must be a power of two, got {d}")));
    }
    let q = c * d.trailing_zeros() as usize;
    let dim = 1usize << q;
    if dim > DEFAULT_DENSE_CAP * DEFAULT_DENSE_CAP {
        return Err(Error::Resource {
            what: "antisymmetric projector".into(),
            required: dim,
            cap: DEFAULT_DENSE_CAP * DEFAULT_DENSE_CAP,
        });
    }
    let f = factorial(c);
    let perms: Vec<(Vec<usize>, f64)> = (0..c).permutations(c).map(|p| { let s = parity(&p); (p, s) }).collect();
    let mut trip = Vec::with_capacity(dim * perms.len());
    for col in 0..dim {
        let digits: Vec<usize> = (0..c).map(|k| (col / d.pow((c - 1 - k) as u32)) % d).collect();
        for (perm, sign) in &perms {
            let row = perm.iter().fold(0, |acc, &k| acc * d + digits[k]);
            trip.push((row, col, cplx(sign / f, 0.0)));
        }
    }
    Ok(OperatorMatrix::from_triplets(q, trip))
}

/// `<φ| (|α><α| ⊗ 1) |φ>` for antisymmetric `φ`.
pub fn first_register_weight(phi: &[C64], alpha: &[C64]) -> Result<f64> {
    let d = alpha.len();
    if d < 2 {
        return Err(Error::contract("single-register dimension must be at least 2"));
    }
    let mut c: usize = 0;
    let mut len = 1;
    while len < phi.len() {
        len *= d;
        c += 1;
    }
    if len != phi.len() || c == 0 {
        return Err(Error::contract(format!(
            "state length {} is not a power of the register dimension {d}",
            phi.len()
        )));
    }
    for k in 0..c.saturating_sub(1) {
        let sw = swap_registers(phi, d, c, k, k + 1);
        let defect: f64 = sw.iter().zip(phi).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>().sqrt();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::contract(format!(
                "state is not antisymmetric under swapping registers {k} and {}",
                k + 1
            )));
        }
    }
    let rest = phi.len() / d;
    Ok((0..rest)
        .map(|r| {
            (0..d)
                .map(|a| alpha[a].conj() * phi[a * rest + r])
                .sum::<C64>()
                .norm_sqr()
        })
        .sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct AcceptanceReport {
    /// Largest acceptance probability over antisymmetric witnesses.
    pub max_acceptance: f64,
    /// Optimal witness in the Slater basis of computational states.
    pub witness_slater_coefficients: Vec<C64>,
    /// `1 - 1/c`.
    pub no_bound: f64,
    /// `max_acceptance - no_bound`.
    pub margin: f64,
    /// Eigenvalues of `H` at or below the threshold, counting multiplicity.
    pub eigenvalues_below: usize,
    pub c: usize,
}

impl AcceptanceReport {
    /// The optimal witness as a vector on `c` registers.
    pub fn witness_vector(&self, d: usize) -> Result<Vec<C64>> {
        let mut out = vec![cplx(0.0, 0.0); d.pow(self.c as u32)];
        for (f, y) in (0..d).combinations(self.c).zip(&self.witness_slater_coefficients) {
            let states: Vec<Vec<C64>> = f.iter().map(|&i| crate::matrix::basis_state_dim(d, i)).collect();
            let s = slater_witness(&states)?;
            out.iter_mut().zip(s).for_each(|(o, x)| *o += x * y);
        }
        Ok(out)
    }
}

/// Exact optimal acceptance probability of the energy-measurement verifier.
///
/// In the Slater basis `|D_f>` (sorted `c`-subsets `f` of basis states) the
/// operator `E ⊗ 1` restricted to the antisymmetric subspace has entries
/// `(1/c) Σ (-1)^{i+j} E[f_i, g_j]` over `f \ f_i = g \ g_j`, where `E`
/// projects onto eigenvalues of `H` at or below `threshold`.
pub fn acceptance_operator(h: &LocalHamiltonian, c: usize, threshold: f64) -> Result<AcceptanceReport> {
    acceptance_operator_capped(h, c, threshold, DEFAULT_DENSE_CAP)
}

pub fn acceptance_operator_capped(
    h: &LocalHamiltonian,
    c: usize,
    threshold: f64,
    cap: usize,
) -> Result<AcceptanceReport> {
    if c == 0 {
        return Err(Error::contract("c must be at least 1"));
    }
    let hm = h.build_matrix()?;
    let d = hm.dim();
    if c > d {
        return Err(Error::contract(format!("c = {c} exceeds the dimension {d}")));
    }
    let subsets: Vec<Vec<usize>> = (0..d).combinations(c).collect();
    if subsets.len() > cap {
        return Err(Error::Resource {
            what: format!("antisymmetric block for c = {c}, d = {d}"),
            required: subsets.len(),
            cap,
        });
    }
    let spec = eig_dense(&hm)?;
    let vecs = spec.eigenvectors.as_ref().expect("Hermitian dense path has vectors");
    let below: Vec<&Vec<C64>> = spec
        .eigenvalues
        .iter()
        .zip(vecs)
        .filter(|(e, _)| **e <= threshold)
        .map(|(_, v)| v)
        .collect();
    let mut e = DMatrix::<C64>::zeros(d, d);
    for v in &below {
        for r in 0..d {
            for col in 0..d {
                e[(r, col)] += v[r] * v[col].conj();
            }
        }
    }

    let index: std::collections::HashMap<Vec<usize>, usize> =
        subsets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let m = subsets.len();
    let mut b = DMatrix::<C64>::zeros(m, m);
    let inv_c = 1.0 / c as f64;
    for (fi, f) in subsets.iter().enumerate() {
        for (i, &a) in f.iter().enumerate() {
            let rest: Vec<usize> = f.iter().copied().filter(|&x| x != a).collect();
            // every g that contains `rest` plus one more element `bb`
            for bb in 0..d {
                if rest.contains(&bb) {
                    continue;
                }
                let mut g = rest.clone();
                let j = g.partition_point(|&x| x < bb);
                g.insert(j, bb);
                let gi = index[&g];
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                b[(fi, gi)] += e[(a, bb)] * sign * inv_c;
            }
        }
    }
    let eig = SymmetricEigen::new(b);
    let (imax, &max) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty block");
    let no_bound = 1.0 - 1.0 / c as f64;
    Ok(AcceptanceReport {
        max_acceptance: max,
        witness_slater_coefficients: eig.eigenvectors.column(imax).iter().copied().collect(),
        no_bound,
        margin: max - no_bound,
        eigenvalues_below: below.len(),
        c,
    })
}
