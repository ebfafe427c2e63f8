//! Satisfiability instances over positive semidefinite operators, the decision
//! rule, and the reduction from projector instances to stochastic ones.

use serde::{Deserialize, Serialize};

use crate::classify::{classify, min_eigenvalue, projector_defect};
use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::pauli::pauli_decompose;
use crate::sign_elim::{stochastize_complex, z4};

/// Ground energies at or below this count as zero.
pub const SAT_ZERO_TOL: f64 = 1e-10;

/// Penalty parameter used by [`reduce_qsat`] unless overridden.
pub const REDUCTION_P: f64 = 1.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatClass {
    Quantum,
    Stoquastic,
    Stochastic,
}

/// Bookkeeping attached to a reduced instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    /// Largest Pauli weight sum among the source projectors.
    pub n_max: f64,
    /// Promise gap of the reduced instance, `p ε / (m N_max)`.
    pub epsilon_tilde: f64,
    pub p: f64,
    pub source_epsilon: f64,
}

#[derive(Clone, Debug)]
pub struct SatInstance {
    qubits: usize,
    operators: Vec<OperatorMatrix>,
    /// NO instances have ground energy at least `epsilon`.
    pub epsilon: f64,
    pub class: SatClass,
    pub reduction: Option<Reduction>,
}

impl SatInstance {
    /// Validates that every operator is psd and matches `class`.
    pub fn new(operators: Vec<OperatorMatrix>, epsilon: f64, class: SatClass) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::contract("instance needs at least one operator"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::contract(format!("epsilon must be positive, got {epsilon}")));
        }
        let qubits = operators[0].qubits();
        for (j, op) in operators.iter().enumerate() {
            if op.qubits() != qubits {
                return Err(Error::contract(format!(
                    "operator {j} acts on {} qubits, expected {qubits}",
                    op.qubits()
                )));
            }
            let f = classify(op, SAT_ZERO_TOL);
            if !f.psd {
                return Err(Error::contract(format!("operator {j} is not positive semidefinite")));
            }
            let ok = match class {
                SatClass::Quantum => true,
                SatClass::Stoquastic => f.stoquastic,
                SatClass::Stochastic => f.column_stochastic,
            };
            if !ok {
                return Err(Error::contract(format!("operator {j} is not {class:?}").to_lowercase()));
            }
        }
        Ok(SatInstance {
            qubits,
            operators,
            epsilon,
            class,
            reduction: None,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn operators(&self) -> &[OperatorMatrix] {
        &self.operators
    }

    pub fn m(&self) -> usize {
        self.operators.len()
    }

    pub fn sum(&self) -> OperatorMatrix {
        OperatorMatrix::sum(self.qubits, &self.operators)
    }

    pub fn ground_energy(&self) -> Result<f64> {
        min_eigenvalue(&self.sum(), SAT_ZERO_TOL)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Yes,
    No,
    /// Ground energy strictly inside the promise gap.
    Ambiguous,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SatDecision {
    pub verdict: Verdict,
    pub ground_energy: f64,
    pub epsilon: f64,
}

/// YES when the summed ground energy is zero, NO when it reaches `epsilon`.
///
/// Both comparisons allow `SAT_ZERO_TOL` of roundoff.
pub fn decide_sat(instance: &SatInstance) -> Result<SatDecision> {
    let e = instance.ground_energy()?;
    let verdict = if e <= SAT_ZERO_TOL {
        Verdict::Yes
    } else if e >= instance.epsilon - SAT_ZERO_TOL {
        Verdict::No
    } else {
        Verdict::Ambiguous
    };
    Ok(SatDecision {
        verdict,
        ground_energy: e,
        epsilon: instance.epsilon,
    })
}

/// Maps each projector `Π_j` to `(1-p) ½(1 + X_a) + p Π̃_j` on `n + 2` qubits,
/// with `Π̃_j` the complex-capable stochastic image of `Π_j`.
///
/// Satisfying states `ψ` map to `ψ ⊗ v_1`; an unsatisfiable input with gap
/// `ε` gives ground energy at least `p ε / (m N_max)`.
pub fn reduce_qsat(instance: &SatInstance, p: f64) -> Result<SatInstance> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::contract(format!("reduction parameter p must lie in (0, 1/2], got {p}")));
    }
    let mut n_max: f64 = 0.0;
    let mut ops = Vec::with_capacity(instance.m());
    for (j, op) in instance.operators.iter().enumerate() {
        let defect = projector_defect(op);
        if defect > SAT_ZERO_TOL {
            return Err(Error::contract(format!(
                "operator {j} is not a projector (||P² - P|| = {defect:.3e}); apply kernel_projector_complement first"
            )));
        }
        let h = pauli_decompose(op, 1e-13)?;
        if h.is_empty() {
            return Err(Error::contract(format!("operator {j} is zero")));
        }
        n_max = n_max.max(h.normalization());
        let mapped = z4::penalize(&stochastize_complex(&h)?, p);
        ops.push(mapped.matrix().clone());
    }
    let epsilon_tilde = p * instance.epsilon / (instance.m() as f64 * n_max);
    let mut out = SatInstance::new(ops, epsilon_tilde, SatClass::Stochastic)?;
    out.reduction = Some(Reduction {
        n_max,
        epsilon_tilde,
        p,
        source_epsilon: instance.epsilon,
    });
    Ok(out)
}
