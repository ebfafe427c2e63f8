//! Schrödinger evolution along Hamiltonian paths.
//!
//! Each step applies `exp(-i H(u_mid) Δt)` exactly through a dense
//! eigendecomposition, so the integrator is unitary up to roundoff and the
//! only error comes from freezing the schedule within a step.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clock::{build_ff, QuantumCircuit};
use crate::error::{Error, Result};
use crate::matrix::{c, inner, norm, OperatorMatrix, C64};
use crate::pauli::LocalHamiltonian;
use crate::sign_elim::{restrict_to_ancilla_state, stoquastize, SectorLabel};
use crate::spectral::{eig_dense_capped, Spectrum, DEFAULT_DENSE_CAP, DEGENERACY_THRESHOLD};

type Generator = Arc<dyn Fn(f64) -> Result<OperatorMatrix> + Send + Sync>;
type Schedule = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Ancilla state whose sector should be preserved by the evolution.
#[derive(Clone, Debug)]
pub struct ProtectedSector {
    pub label: SectorLabel,
    pub ancillas: usize,
    pub state: Vec<C64>,
}

impl ProtectedSector {
    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ProtectedSector {
            label: SectorLabel::Minus,
            ancillas: 1,
            state: vec![c(h, 0.0), c(-h, 0.0)],
        }
    }

    /// `||(1 ⊗ <a|) ψ||²`.
    pub fn population(&self, psi: &[C64]) -> f64 {
        let ad = self.state.len();
        psi.chunks(ad)
            .map(|blk| inner(&self.state, blk).norm_sqr())
            .sum()
    }
}

/// Which instantaneous eigenspace the trace tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Ground multiplet of `H(u)`.
    Ground,
    /// Ground multiplet of `H(u)` restricted to the protected sector.
    SectorGround,
    None,
}

#[derive(Clone)]
pub struct HamiltonianPath {
    generator: Generator,
    schedule: Schedule,
    pub protected_sector: Option<ProtectedSector>,
    pub target: Target,
}

impl std::fmt::Debug for HamiltonianPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HamiltonianPath")
            .field("protected_sector", &self.protected_sector)
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

impl HamiltonianPath {
    /// Path `u ↦ generator(u)` with the linear schedule `u = t/T`.
    pub fn new(generator: impl Fn(f64) -> Result<OperatorMatrix> + Send + Sync + 'static) -> Self {
        HamiltonianPath {
            generator: Arc::new(generator),
            schedule: Arc::new(|x| x),
            protected_sector: None,
            target: Target::Ground,
        }
    }

    /// Replaces the schedule `t/T ↦ u`.
    pub fn with_schedule(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.schedule = Arc::new(f);
        self
    }

    pub fn with_protected_sector(mut self, sector: ProtectedSector) -> Self {
        self.protected_sector = Some(sector);
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    /// `H^FF(s)` with `s = u/2`.
    pub fn ff(circuit: &QuantumCircuit) -> Result<Self> {
        build_ff(circuit, 0.0)?;
        let circuit = circuit.clone();
        Ok(Self::new(move |u| build_ff(&circuit, 0.5 * u.clamp(0.0, 1.0))?.realize()))
    }

    /// `(1-u) A + u B`.
    pub fn linear(a: OperatorMatrix, b: OperatorMatrix) -> Result<Self> {
        if a.qubits() != b.qubits() {
            return Err(Error::contract("path endpoints act on different registers"));
        }
        Ok(Self::new(move |u| Ok(a.scale(1.0 - u).add(&b.scale(u)))))
    }

    /// Stoquastic lift of `(1-u) A + u B`, protecting the `|->` sector.
    pub fn stoquastized(a: &LocalHamiltonian, b: &LocalHamiltonian) -> Result<Self> {
        let interp = |u: f64| a.scaled(1.0 - u).plus(&b.scaled(u));
        stoquastize(&interp(0.0)?)?;
        stoquastize(&interp(1.0)?)?;
        let (a, b) = (a.clone(), b.clone());
        Ok(Self::new(move |u| {
            let h = a.scaled(1.0 - u).plus(&b.scaled(u))?;
            Ok(stoquastize(&h)?.matrix().clone())
        })
        .with_protected_sector(ProtectedSector::minus())
        .with_target(Target::SectorGround))
    }

    pub fn hamiltonian_at(&self, u: f64) -> Result<OperatorMatrix> {
        let m = (self.generator)(u)?;
        if !m.is_hermitian() {
            return Err(Error::contract(format!("path Hamiltonian at u = {u} is not Hermitian")));
        }
        Ok(m)
    }

    pub fn schedule(&self, x: f64) -> f64 {
        (self.schedule)(x)
    }

    /// Ground multiplet vectors of `H(u)` (or of its protected-sector block, lifted).
    pub fn target_space(&self, u: f64, dense_cap: usize) -> Result<Vec<Vec<C64>>> {
        let h = self.hamiltonian_at(u)?;
        match self.target {
            Target::None => Ok(Vec::new()),
            Target::Ground => Ok(ground_multiplet(&eig_dense_capped(&h, dense_cap)?)),
            Target::SectorGround => {
                let sec = self
                    .protected_sector
                    .as_ref()
                    .ok_or_else(|| Error::contract("sector target needs a protected sector"))?;
                let block = restrict_to_ancilla_state(&h, sec.ancillas, &sec.state);
                Ok(ground_multiplet(&eig_dense_capped(&block, dense_cap)?)
                    .into_iter()
                    .map(|v| crate::matrix::kron_vec(&v, &sec.state))
                    .collect())
            }
        }
    }
}

fn ground_multiplet(s: &Spectrum) -> Vec<Vec<C64>> {
    let vecs = s.eigenvectors.as_ref().expect("Hermitian dense path has vectors");
    let e0 = s.lowest();
    s.eigenvalues
        .iter()
        .zip(vecs)
        .take_while(|(e, _)| **e - e0 < DEGENERACY_THRESHOLD)
        .map(|(_, v)| v.clone())
        .collect()
}

fn overlap_with(space: &[Vec<C64>], psi: &[C64]) -> f64 {
    space.iter().map(|v| inner(v, psi).norm_sqr()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct AdiabaticTrace {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    /// Weight of the state in the target eigenspace at each sample.
    pub overlaps: Vec<f64>,
    pub sector_population: Option<Vec<f64>>,
    pub norms: Vec<f64>,
    #[serde(skip)]
    pub final_state: Vec<C64>,
}

impl AdiabaticTrace {
    pub fn final_overlap(&self) -> Option<f64> {
        self.overlaps.last().copied()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `exp(-i H dt) ψ` from a full eigendecomposition.
fn propagate(s: &Spectrum, psi: &[C64], dt: f64) -> Vec<C64> {
    let vecs = s.eigenvectors.as_ref().expect("Hermitian dense path has vectors");
    let mut out = vec![c(0.0, 0.0); psi.len()];
    for (e, v) in s.eigenvalues.iter().zip(vecs) {
        let amp = inner(v, psi) * C64::from_polar(1.0, -e * dt);
        out.iter_mut().zip(v).for_each(|(o, x)| *o += x * amp);
    }
    out
}

/// Evolves `initial` for total time `t_total` in `steps` piecewise-constant steps.
pub fn evolve(path: &HamiltonianPath, t_total: f64, steps: usize, initial: &[C64]) -> Result<AdiabaticTrace> {
    evolve_capped(path, t_total, steps, initial, DEFAULT_DENSE_CAP)
}

pub fn evolve_capped(
    path: &HamiltonianPath,
    t_total: f64,
    steps: usize,
    initial: &[C64],
    dense_cap: usize,
) -> Result<AdiabaticTrace> {
    if steps == 0 {
        return Err(Error::contract("evolution needs at least one step"));
    }
    if !(t_total >= 0.0 && t_total.is_finite()) {
        return Err(Error::contract(format!("total time must be finite and nonnegative, got {t_total}")));
    }
    let n0 = norm(initial);
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::contract(format!("initial state has norm {n0}, expected 1")));
    }
    let h0 = path.hamiltonian_at(path.schedule(0.0))?;
    if h0.dim() != initial.len() {
        return Err(Error::contract(format!(
            "initial state has length {} but the path acts on dimension {}",
            initial.len(),
            h0.dim()
        )));
    }
    if path.target == Target::SectorGround && path.protected_sector.is_none() {
        return Err(Error::contract("sector target needs a protected sector"));
    }
    let dt = t_total / steps as f64;
    let mut psi = initial.to_vec();
    let mut trace = AdiabaticTrace {
        times: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        overlaps: Vec::new(),
        sector_population: path.protected_sector.as_ref().map(|_| Vec::with_capacity(steps + 1)),
        norms: Vec::with_capacity(steps + 1),
        final_state: Vec::new(),
    };
    let record = |k: usize, psi: &[C64], trace: &mut AdiabaticTrace| -> Result<()> {
        let x = k as f64 / steps as f64;
        let u = path.schedule(x);
        trace.times.push(x * t_total);
        trace.u.push(u);
        trace.norms.push(norm(psi));
        if path.target != Target::None {
            let space = path.target_space(u, dense_cap)?;
            trace.overlaps.push(overlap_with(&space, psi));
        }
        if let (Some(sec), Some(pop)) = (&path.protected_sector, trace.sector_population.as_mut()) {
            pop.push(sec.population(psi));
        }
        Ok(())
    };
    record(0, &psi, &mut trace)?;
    for k in 0..steps {
        let u_mid = path.schedule((k as f64 + 0.5) / steps as f64);
        let h = path.hamiltonian_at(u_mid)?;
        let s = eig_dense_capped(&h, dense_cap)?;
        psi = propagate(&s, &psi, dt);
        record(k + 1, &psi, &mut trace)?;
    }
    trace.final_state = psi;
    Ok(trace)
}

/// `1 - min` over samples of the protected-sector population.
pub fn sector_leakage(trace: &AdiabaticTrace) -> Result<f64> {
    let pop = trace
        .sector_population
        .as_ref()
        .ok_or_else(|| Error::contract("trace has no protected sector"))?;
    Ok(1.0 - pop.iter().copied().fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, Serialize)]
pub struct DecodeOutcome {
    pub shots: usize,
    pub successes: usize,
    /// Exact probability that the clock reads a completed computation.
    pub success_probability: f64,
    pub success_frequency: f64,
    /// Sampled work-register distribution given success, indexed by basis state.
    pub decoded_distribution: Vec<f64>,
    /// Exact work-register distribution given success.
    pub conditional_distribution: Vec<f64>,
    /// `|<x|U|0^n>|²` from direct simulation.
    pub circuit_distribution: Vec<f64>,
    /// Total variation between the sampled and simulated distributions.
    pub total_variation: f64,
}

/// Samples the work and clock registers in the computational basis.
///
/// A shot succeeds when the first `L + 1` clock qubits read `1`, i.e. the
/// clock has passed the last gate of the original circuit. With `padded`,
/// the state is expected on the layout of `circuit.padded()`.
pub fn measure_and_decode(
    state: &[C64],
    circuit: &QuantumCircuit,
    shots: usize,
    seed: u64,
    padded: bool,
) -> Result<DecodeOutcome> {
    let n = circuit.n();
    let l = circuit.len();
    let l_eff = if padded { 2 * l } else { l };
    let clock_qubits = l_eff + 1;
    let expect = 1usize << (n + clock_qubits);
    if state.len() != expect {
        return Err(Error::contract(format!(
            "state has length {} but the {}clock layout needs {expect}",
            state.len(),
            if padded { "padded " } else { "" }
        )));
    }
    // clock qubits 1..=L+1 are the most significant bits of the clock register
    let done_mask = ((1usize << (l + 1)) - 1) << (clock_qubits - (l + 1));
    let clock_mask = (1usize << clock_qubits) - 1;
    let work_dim = 1usize << n;
    let succeeded = |idx: usize| idx & clock_mask & done_mask == done_mask;

    let probs: Vec<f64> = state.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    let mut conditional = vec![0.0; work_dim];
    for (idx, p) in probs.iter().enumerate() {
        if succeeded(idx) {
            conditional[idx >> clock_qubits] += p / total;
        }
    }
    let success_probability: f64 = conditional.iter().sum();
    if success_probability > 0.0 {
        conditional.iter_mut().for_each(|x| *x /= success_probability);
    }

    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; work_dim];
    let mut successes = 0;
    for _ in 0..shots {
        let x: f64 = rng.random::<f64>() * acc;
        let idx = cdf.partition_point(|&v| v <= x).min(probs.len() - 1);
        if succeeded(idx) {
            successes += 1;
            counts[idx >> clock_qubits] += 1;
        }
    }
    let decoded: Vec<f64> = counts
        .iter()
        .map(|&k| if successes > 0 { k as f64 / successes as f64 } else { 0.0 })
        .collect();
    let direct: Vec<f64> = circuit.simulate().iter().map(|a| a.norm_sqr()).collect();
    let total_variation = 0.5 * decoded.iter().zip(&direct).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(DecodeOutcome {
        shots,
        successes,
        success_probability,
        success_frequency: if shots > 0 { successes as f64 / shots as f64 } else { 0.0 },
        decoded_distribution: decoded,
        conditional_distribution: conditional,
        circuit_distribution: direct,
        total_variation,
    })
}
