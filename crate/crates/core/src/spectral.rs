//! Dense and iterative eigensolvers, and the spectral summary used by the CLI.
//!
//! Dense diagonalization is the oracle for every spectral claim in the crate.
//! The iterative solver is a Lanczos iteration with full reorthogonalization and
//! explicit locking of converged vectors, so degenerate multiplets are resolved
//! one vector at a time instead of being collapsed.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{classify, MatrixClassFlags};
use crate::error::{Error, Result};
use crate::matrix::{c, inner, norm, OperatorMatrix, C64};

/// Largest dimension `eig_dense` accepts by default.
pub const DEFAULT_DENSE_CAP: usize = 4096;

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues closer than this are reported as one multiplet.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Lowest,
    Highest,
    LargestMagnitude,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Multiplet {
    pub value: f64,
    pub multiplicity: usize,
}

/// Eigenvalues in ascending order with optional eigenvectors.
///
/// For non-Hermitian input the eigenvalues are ordered by real part and the
/// imaginary parts are kept alongside; no eigenvectors are produced then.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub imaginary_parts: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<C64>>>,
    pub residual_norms: Vec<f64>,
    pub method: Method,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn highest(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `λ_1 - λ_0`, counting multiplicity.
    pub fn gap(&self) -> Option<f64> {
        (self.eigenvalues.len() >= 2).then(|| self.eigenvalues[1] - self.eigenvalues[0])
    }

    pub fn vector(&self, i: usize) -> Option<&[C64]> {
        self.eigenvectors.as_ref().map(|v| v[i].as_slice())
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }

    /// Groups eigenvalues whose neighbours differ by less than `threshold`.
    pub fn multiplets(&self, threshold: f64) -> Vec<Multiplet> {
        let mut out: Vec<Multiplet> = Vec::new();
        let mut prev = f64::NEG_INFINITY;
        for &e in &self.eigenvalues {
            match out.last_mut() {
                Some(m) if e - prev < threshold => m.multiplicity += 1,
                _ => out.push(Multiplet {
                    value: e,
                    multiplicity: 1,
                }),
            }
            prev = e;
        }
        out
    }
}

fn residuals(m: &OperatorMatrix, vals: &[f64], vecs: &[Vec<C64>]) -> Vec<f64> {
    vals.iter()
        .zip(vecs)
        .map(|(&l, v)| {
            let mv = m.matvec(v);
            mv.iter()
                .zip(v)
                .map(|(a, b)| (a - b * l).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

pub fn eig_dense(m: &OperatorMatrix) -> Result<Spectrum> {
    eig_dense_capped(m, DEFAULT_DENSE_CAP)
}

/// Full spectrum by dense diagonalization; errors beyond `cap`.
pub fn eig_dense_capped(m: &OperatorMatrix, cap: usize) -> Result<Spectrum> {
    let dim = m.dim();
    if dim > cap {
        return Err(Error::Resource {
            what: "dense eigendecomposition (use eig_extremal instead)".into(),
            required: dim,
            cap,
        });
    }
    if !m.is_hermitian() {
        return eig_general(m);
    }
    let (vals, vecs): (Vec<f64>, Vec<Vec<C64>>) = if m.is_real(0.0) {
        let eig = SymmetricEigen::new(m.to_dense_real());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .iter()
            .map(|&i| {
                let v = eig.eigenvectors.column(i).iter().map(|&x| c(x, 0.0)).collect();
                (eig.eigenvalues[i], v)
            })
            .unzip()
    } else {
        let eig = SymmetricEigen::new(m.to_dense());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .iter()
            .map(|&i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
            .unzip()
    };
    let residual_norms = residuals(m, &vals, &vecs);
    Ok(Spectrum {
        imaginary_parts: vec![0.0; vals.len()],
        eigenvalues: vals,
        eigenvectors: Some(vecs),
        residual_norms,
        method: Method::Dense,
    })
}

fn eig_general(m: &OperatorMatrix) -> Result<Spectrum> {
    // Unshifted QR stalls on matrices whose spectrum lies on a circle (e.g.
    // permutations); an off-axis shift breaks the tie in magnitudes.
    let shift = c(std::f64::consts::FRAC_1_PI, 0.5 * std::f64::consts::FRAC_1_PI) * m.max_abs().max(1.0);
    let dense = m.to_dense() + DMatrix::<C64>::identity(m.dim(), m.dim()) * shift;
    let schur = dense
        .try_schur(1e-14, SCHUR_MAX_ITER)
        .ok_or(Error::NonConvergence {
            iterations: SCHUR_MAX_ITER,
            best_residual: f64::NAN,
        })?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::contract("Schur decomposition did not produce eigenvalues"))?;
    let mut pairs: Vec<C64> = ev.iter().map(|z| z - shift).collect();
    pairs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Spectrum {
        eigenvalues: pairs.iter().map(|z| z.re).collect(),
        imaginary_parts: pairs.iter().map(|z| z.im).collect(),
        eigenvectors: None,
        residual_norms: Vec::new(),
        method: Method::Dense,
    })
}

/// Knobs for the iterative solver.
#[derive(Clone, Debug)]
pub struct ExtremalConfig {
    pub tol: f64,
    pub seed: u64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
}

impl Default for ExtremalConfig {
    fn default() -> Self {
        ExtremalConfig {
            tol: 1e-10,
            seed: 0,
            krylov_dim: 80,
            max_restarts: 200,
        }
    }
}

pub fn eig_extremal(m: &OperatorMatrix, k: usize, which: Which, tol: f64) -> Result<Spectrum> {
    eig_extremal_with(
        m,
        k,
        which,
        &ExtremalConfig {
            tol,
            ..ExtremalConfig::default()
        },
    )
}

/// `k` extremal eigenpairs of a Hermitian matrix with residuals `<= cfg.tol`.
pub fn eig_extremal_with(
    m: &OperatorMatrix,
    k: usize,
    which: Which,
    cfg: &ExtremalConfig,
) -> Result<Spectrum> {
    if !m.is_hermitian() {
        return Err(Error::contract("eig_extremal requires a Hermitian matrix"));
    }
    if k == 0 || k > m.dim() {
        return Err(Error::contract(format!(
            "k must be in 1..={}, got {k}",
            m.dim()
        )));
    }
    let mut pairs: Vec<(f64, Vec<C64>, f64)> = match which {
        Which::Lowest => lanczos_locked(m, k, 1.0, cfg)?,
        Which::Highest => lanczos_locked(m, k, -1.0, cfg)?,
        Which::LargestMagnitude => {
            let mut all = lanczos_locked(m, k, 1.0, cfg)?;
            all.extend(lanczos_locked(m, k.min(m.dim() - k).max(1), -1.0, cfg)?);
            all.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
            all.truncate(k);
            all
        }
    };
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Spectrum {
        imaginary_parts: vec![0.0; pairs.len()],
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        residual_norms: pairs.iter().map(|p| p.2).collect(),
        eigenvectors: Some(pairs.into_iter().map(|p| p.1).collect()),
        method: Method::Iterative,
    })
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

fn orthogonalize(v: &mut [C64], against: &[Vec<C64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let p = inner(q, v);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= y * p);
        }
    }
}

/// Lowest `k` eigenpairs of `sign · M`, returned as eigenpairs of `M`.
fn lanczos_locked(
    m: &OperatorMatrix,
    k: usize,
    sign: f64,
    cfg: &ExtremalConfig,
) -> Result<Vec<(f64, Vec<C64>, f64)>> {
    let dim = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut locked: Vec<Vec<C64>> = Vec::new();
    let mut out = Vec::with_capacity(k);
    let scale = m.max_abs().max(1.0);
    for _ in 0..k {
        let mut start = random_vector(&mut rng, dim);
        let mut best = f64::INFINITY;
        let mut done = false;
        let mut iterations = 0;
        for _ in 0..cfg.max_restarts {
            let (theta, x, resid, its) =
                lanczos_pass(m, sign, &start, &locked, cfg.krylov_dim, scale, &mut rng);
            iterations += its;
            best = best.min(resid);
            if resid <= cfg.tol {
                out.push((sign * theta, x.clone(), resid));
                locked.push(x);
                done = true;
                break;
            }
            start = x;
        }
        if !done {
            return Err(Error::NonConvergence {
                iterations,
                best_residual: best,
            });
        }
    }
    Ok(out)
}

fn lanczos_pass(
    m: &OperatorMatrix,
    sign: f64,
    start: &[C64],
    locked: &[Vec<C64>],
    krylov_dim: usize,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<C64>, f64, usize) {
    let dim = m.dim();
    let mdim = krylov_dim.min(dim - locked.len()).max(1);
    let mut v0 = start.to_vec();
    orthogonalize(&mut v0, locked);
    if norm(&v0) < 1e-8 {
        v0 = random_vector(rng, dim);
        orthogonalize(&mut v0, locked);
    }
    let n0 = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= n0);

    let mut basis = vec![v0];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for j in 0..mdim {
        let mut w: Vec<C64> = m.matvec(&basis[j]).into_iter().map(|x| x * sign).collect();
        let a = inner(&basis[j], &w).re;
        alphas.push(a);
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, locked);
        let b = norm(&w);
        if j + 1 == mdim || b < 1e-12 * scale {
            break;
        }
        betas.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }

    let size = alphas.len();
    let mut t = DMatrix::<f64>::zeros(size, size);
    for i in 0..size {
        t[(i, i)] = alphas[i];
        if i + 1 < size {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let imin = (0..size)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .expect("non-empty tridiagonal");
    let y = eig.eigenvectors.column(imin);
    let mut x = vec![c(0.0, 0.0); dim];
    for (i, q) in basis.iter().take(size).enumerate() {
        x.iter_mut().zip(q).for_each(|(a, b)| *a += b * y[i]);
    }
    orthogonalize(&mut x, locked);
    let nx = norm(&x);
    x.iter_mut().for_each(|a| *a /= nx);
    // Rayleigh quotient of the locked-and-renormalized Ritz vector
    let theta = sign * m.expectation(&x).re;
    let mx = m.matvec(&x);
    let lambda = sign * theta;
    let resid = mx
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (theta, x, resid, size)
}

/// Perron-Frobenius check for symmetric stochastic matrices.
#[derive(Clone, Debug, Serialize)]
pub struct PerronCheck {
    pub top_eigenvalue: f64,
    /// `||M u - u||` for the normalized uniform vector `u`.
    pub uniform_residual: f64,
    /// Weight of `u` inside the top eigenspace.
    pub uniform_overlap: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub dim: usize,
    pub ground_energy: f64,
    pub spectral_gap: Option<f64>,
    pub top_eigenvalue: f64,
    /// Second-largest eigenvalue magnitude, reported for stochastic input.
    pub second_largest_magnitude: Option<f64>,
    pub perron: Option<PerronCheck>,
    pub low_multiplets: Vec<Multiplet>,
    pub flags: MatrixClassFlags,
    pub method: Method,
}

pub fn spectral_report(m: &OperatorMatrix) -> Result<SpectralReport> {
    spectral_report_with(m, 1e-10, DEFAULT_DENSE_CAP)
}

pub fn spectral_report_with(m: &OperatorMatrix, tol: f64, dense_cap: usize) -> Result<SpectralReport> {
    let flags = classify(m, tol);
    let dim = m.dim();
    let uniform: Vec<C64> = vec![c(1.0 / (dim as f64).sqrt(), 0.0); dim];

    let (ground, gap, top, second_mag, top_space, low, method) = if dim <= dense_cap {
        let s = eig_dense_capped(m, dense_cap)?;
        let mut mags: Vec<f64> = s
            .eigenvalues
            .iter()
            .zip(&s.imaginary_parts)
            .map(|(re, im)| c(*re, *im).norm())
            .collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let top = s.highest();
        let top_space: Vec<Vec<C64>> = match &s.eigenvectors {
            Some(v) => s
                .eigenvalues
                .iter()
                .zip(v)
                .filter(|(e, _)| top - **e < DEGENERACY_THRESHOLD)
                .map(|(_, v)| v.clone())
                .collect(),
            None => Vec::new(),
        };
        let mut low = s.multiplets(DEGENERACY_THRESHOLD);
        low.truncate(4);
        (s.lowest(), s.gap(), top, mags.get(1).copied(), top_space, low, Method::Dense)
    } else {
        let lo = eig_extremal(m, 2.min(dim), Which::Lowest, tol.max(1e-9))?;
        let hi = eig_extremal(m, 2.min(dim), Which::Highest, tol.max(1e-9))?;
        let mag = eig_extremal(m, 2.min(dim), Which::LargestMagnitude, tol.max(1e-9))?;
        let mut mags: Vec<f64> = mag.eigenvalues.iter().map(|e| e.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let top = hi.highest();
        let vecs = hi.eigenvectors.clone().unwrap_or_default();
        let top_space = hi
            .eigenvalues
            .iter()
            .zip(vecs)
            .filter(|(e, _)| top - **e < DEGENERACY_THRESHOLD)
            .map(|(_, v)| v)
            .collect();
        let low = lo.multiplets(DEGENERACY_THRESHOLD);
        (lo.lowest(), lo.gap(), top, mags.get(1).copied(), top_space, low, Method::Iterative)
    };

    let perron = (flags.symmetric && flags.column_stochastic).then(|| {
        let mu = m.matvec(&uniform);
        let uniform_residual = norm(
            &mu.iter().zip(&uniform).map(|(a, b)| a - b).collect::<Vec<_>>(),
        );
        let uniform_overlap: f64 = top_space.iter().map(|v| inner(v, &uniform).norm_sqr()).sum();
        PerronCheck {
            top_eigenvalue: top,
            uniform_residual,
            uniform_overlap,
            passed: (top - 1.0).abs() <= tol.max(1e-9) && uniform_residual <= tol.max(1e-9),
        }
    });

    Ok(SpectralReport {
        dim,
        ground_energy: ground,
        spectral_gap: gap,
        top_eigenvalue: top,
        second_largest_magnitude: if flags.column_stochastic { second_mag } else { None },
        perron,
        low_multiplets: low,
        flags,
        method,
    })
}
