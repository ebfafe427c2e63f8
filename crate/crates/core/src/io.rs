//! JSON file formats for Hamiltonians, circuits, SAT instances and run reports.
//!
//! Complex numbers are written as `[re, im]` pairs. Every format carries
//! `"version": "1"`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::clock::{Gate, QuantumCircuit};
use crate::error::{Error, Result};
use crate::matrix::{c, OperatorMatrix, C64};
use crate::pauli::{pauli_decompose, LocalHamiltonian, Pauli};
use crate::protocols::{Reduction, SatClass, SatInstance};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliEntry {
    pub qubit: usize,
    pub op: Pauli,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub coeff: f64,
    pub paulis: Vec<PauliEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub version: String,
    pub n: usize,
    pub terms: Vec<TermEntry>,
}

/// Dense complex matrix as rows of `[re, im]` pairs.
pub type DenseRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateEntry {
    pub name: String,
    #[serde(default)]
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<DenseRows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub version: String,
    pub n: usize,
    pub gates: Vec<GateEntry>,
}

/// One SAT operator, either as Pauli terms or as a dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<DenseRows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatFile {
    pub version: String,
    pub n: usize,
    pub epsilon: f64,
    pub class: SatClass,
    pub operators: Vec<OperatorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub dense_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: &str, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: None,
        }
    }

    pub fn with_detail(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: Some(detail.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: String,
    pub command: Vec<String>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub results: serde_json::Value,
    pub checks: Vec<Check>,
    /// Wall-clock time; the only field allowed to differ between reruns.
    pub elapsed_ms: u64,
}

impl ReportFile {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn check_version(v: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::parse("version", format!("unsupported version '{v}', expected '{FORMAT_VERSION}'")));
    }
    Ok(())
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

fn terms_to_hamiltonian(n: usize, terms: &[TermEntry], field: &str) -> Result<LocalHamiltonian> {
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let at = format!("{field}[{i}]");
        if !t.coeff.is_finite() {
            return Err(Error::parse(format!("{at}.coeff"), format!("non-finite coefficient {}", t.coeff)));
        }
        let mut seen = BTreeSet::new();
        for (k, p) in t.paulis.iter().enumerate() {
            if p.qubit >= n {
                return Err(Error::parse(
                    format!("{at}.paulis[{k}].qubit"),
                    format!("qubit {} out of range for n = {n}", p.qubit),
                ));
            }
            if !seen.insert(p.qubit) {
                return Err(Error::parse(
                    format!("{at}.paulis[{k}].qubit"),
                    format!("qubit {} appears twice in one term", p.qubit),
                ));
            }
        }
        out.push((t.coeff, t.paulis.iter().map(|p| (p.qubit, p.op)).collect()));
    }
    LocalHamiltonian::from_signed_terms(n, out)
}

fn hamiltonian_to_terms(h: &LocalHamiltonian) -> Vec<TermEntry> {
    h.signed_terms()
        .map(|(coeff, k)| TermEntry {
            coeff,
            paulis: k.into_iter().map(|(qubit, op)| PauliEntry { qubit, op }).collect(),
        })
        .collect()
}

impl HamiltonianFile {
    pub fn from_hamiltonian(h: &LocalHamiltonian) -> Self {
        HamiltonianFile {
            version: FORMAT_VERSION.into(),
            n: h.n(),
            terms: hamiltonian_to_terms(h),
        }
    }

    pub fn to_hamiltonian(&self) -> Result<LocalHamiltonian> {
        check_version(&self.version)?;
        terms_to_hamiltonian(self.n, &self.terms, "terms")
    }
}

pub fn hamiltonian_from_str(text: &str) -> Result<LocalHamiltonian> {
    from_json::<HamiltonianFile>(text)?.to_hamiltonian()
}

pub fn parse_hamiltonian(path: impl AsRef<Path>) -> Result<LocalHamiltonian> {
    hamiltonian_from_str(&read(path.as_ref())?)
}

/// Canonical JSON text (merged terms in sorted order).
pub fn serialize_hamiltonian(h: &LocalHamiltonian) -> String {
    to_pretty_json(&HamiltonianFile::from_hamiltonian(h))
}

pub fn dense_rows(m: &OperatorMatrix) -> DenseRows {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|col| {
            let v = m.get(r, col);
            [v.re, v.im]
        }).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &DenseRows, field: &str) -> Result<OperatorMatrix> {
    let dim = rows.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::parse(field, format!("matrix dimension {dim} is not a power of two")));
    }
    let mut trip: Vec<(usize, usize, C64)> = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::parse(format!("{field}[{r}]"), format!("row has {} entries, expected {dim}", row.len())));
        }
        for (col, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::parse(format!("{field}[{r}][{col}]"), "non-finite entry"));
            }
            trip.push((r, col, c(*re, *im)));
        }
    }
    Ok(OperatorMatrix::from_triplets(dim.trailing_zeros() as usize, trip))
}

impl CircuitFile {
    pub fn from_circuit(circ: &QuantumCircuit) -> Self {
        let gates = circ
            .gates()
            .iter()
            .map(|g| GateEntry {
                name: g.name().into(),
                qubits: g.qubits(),
                angle: match g {
                    Gate::Rot { angle, .. } => Some(*angle),
                    _ => None,
                },
                matrix: match g {
                    Gate::Custom { matrix, .. } => Some(dense_rows(matrix)),
                    _ => None,
                },
            })
            .collect();
        CircuitFile {
            version: FORMAT_VERSION.into(),
            n: circ.n(),
            gates,
        }
    }

    pub fn to_circuit(&self) -> Result<QuantumCircuit> {
        check_version(&self.version)?;
        let mut gates = Vec::with_capacity(self.gates.len());
        for (i, g) in self.gates.iter().enumerate() {
            let at = format!("gates[{i}]");
            let arity = |k: usize| -> Result<()> {
                if g.qubits.len() != k {
                    return Err(Error::parse(
                        format!("{at}.qubits"),
                        format!("{} takes {k} qubit(s), got {}", g.name, g.qubits.len()),
                    ));
                }
                Ok(())
            };
            let gate = match g.name.as_str() {
                "CNOT" => {
                    arity(2)?;
                    Gate::Cnot {
                        control: g.qubits[0],
                        target: g.qubits[1],
                    }
                }
                "ROT" => {
                    arity(1)?;
                    let angle = g
                        .angle
                        .ok_or_else(|| Error::parse(format!("{at}.angle"), "ROT needs an angle"))?;
                    if !angle.is_finite() {
                        return Err(Error::parse(format!("{at}.angle"), "non-finite angle"));
                    }
                    Gate::Rot {
                        qubit: g.qubits[0],
                        angle,
                    }
                }
                "ID" => {
                    arity(0)?;
                    Gate::Identity
                }
                "CUSTOM" => {
                    let rows = g
                        .matrix
                        .as_ref()
                        .ok_or_else(|| Error::parse(format!("{at}.matrix"), "CUSTOM needs a matrix"))?;
                    Gate::Custom {
                        qubits: g.qubits.clone(),
                        matrix: matrix_from_rows(rows, &format!("{at}.matrix"))?,
                    }
                }
                other => {
                    return Err(Error::parse(
                        format!("{at}.name"),
                        format!("unknown gate '{other}' (expected CNOT, ROT, ID or CUSTOM)"),
                    ))
                }
            };
            gates.push(gate);
        }
        QuantumCircuit::new(self.n, gates)
    }
}

pub fn circuit_from_str(text: &str) -> Result<QuantumCircuit> {
    from_json::<CircuitFile>(text)?.to_circuit()
}

pub fn parse_circuit(path: impl AsRef<Path>) -> Result<QuantumCircuit> {
    circuit_from_str(&read(path.as_ref())?)
}

impl SatFile {
    pub fn from_instance(inst: &SatInstance) -> Self {
        let operators = inst
            .operators()
            .iter()
            .map(|op| match pauli_decompose(op, 1e-13) {
                Ok(h) if inst.qubits() <= 3 || h.terms().len() <= op.dim() => OperatorEntry {
                    terms: Some(hamiltonian_to_terms(&h)),
                    matrix: None,
                },
                _ => OperatorEntry {
                    terms: None,
                    matrix: Some(dense_rows(op)),
                },
            })
            .collect();
        SatFile {
            version: FORMAT_VERSION.into(),
            n: inst.qubits(),
            epsilon: inst.epsilon,
            class: inst.class,
            operators,
            reduction: inst.reduction.clone(),
        }
    }

    pub fn to_instance(&self) -> Result<SatInstance> {
        check_version(&self.version)?;
        let mut ops = Vec::with_capacity(self.operators.len());
        for (i, o) in self.operators.iter().enumerate() {
            let at = format!("operators[{i}]");
            let m = match (&o.terms, &o.matrix) {
                (Some(t), None) => terms_to_hamiltonian(self.n, t, &format!("{at}.terms"))?.build_matrix()?,
                (None, Some(rows)) => {
                    let m = matrix_from_rows(rows, &format!("{at}.matrix"))?;
                    if m.qubits() != self.n {
                        return Err(Error::parse(
                            format!("{at}.matrix"),
                            format!("matrix acts on {} qubits, expected {}", m.qubits(), self.n),
                        ));
                    }
                    m
                }
                _ => return Err(Error::parse(at, "operator needs exactly one of 'terms' or 'matrix'")),
            };
            ops.push(m);
        }
        let mut inst = SatInstance::new(ops, self.epsilon, self.class)?;
        inst.reduction = self.reduction.clone();
        Ok(inst)
    }
}

pub fn sat_from_str(text: &str) -> Result<SatInstance> {
    from_json::<SatFile>(text)?.to_instance()
}

pub fn parse_sat(path: impl AsRef<Path>) -> Result<SatInstance> {
    sat_from_str(&read(path.as_ref())?)
}

pub fn parse_report(path: impl AsRef<Path>) -> Result<ReportFile> {
    from_json(&read(path.as_ref())?)
}
