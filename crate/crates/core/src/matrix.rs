//! Sparse complex matrices on qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index. An operator written `A ⊗ B` therefore places `B` on the
//! highest-index qubits, which is where ancillas live.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Magnitude below which an entry is treated as a structural zero.
pub const ENTRY_EPS: f64 = 1e-14;

/// Hermiticity tolerance for the cached flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest register a matrix may span.
pub const MAX_QUBITS: usize = 26;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit of `index` that belongs to `qubit` in a register of `total` qubits.
#[inline]
pub fn qubit_bit(index: usize, qubit: usize, total: usize) -> usize {
    (index >> (total - 1 - qubit)) & 1
}

/// Collects the bits of `index` at `targets` into a local index (first target most significant).
#[inline]
pub(crate) fn gather_bits(index: usize, targets: &[usize], total: usize) -> usize {
    targets
        .iter()
        .fold(0, |acc, &q| (acc << 1) | qubit_bit(index, q, total))
}

/// Overwrites the bits of `index` at `targets` with those of `local`.
#[inline]
pub(crate) fn scatter_bits(index: usize, local: usize, targets: &[usize], total: usize) -> usize {
    let k = targets.len();
    let mut out = index;
    for (i, &q) in targets.iter().enumerate() {
        let shift = total - 1 - q;
        let bit = (local >> (k - 1 - i)) & 1;
        out = (out & !(1 << shift)) | (bit << shift);
    }
    out
}

/// Square sparse matrix of dimension `2^qubits`, stored row-compressed.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    qubits: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed
    /// and near-zero results dropped.
    pub fn from_triplets(
        qubits: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        assert!(qubits <= MAX_QUBITS, "register of {qubits} qubits is too large");
        let dim = 1usize << qubits;
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals = Vec::with_capacity(t.len());
        let mut rows = Vec::with_capacity(t.len());
        let mut i = 0;
        while i < t.len() {
            let (r, col, mut v) = t[i];
            assert!(r < dim && col < dim, "entry ({r}, {col}) outside dimension {dim}");
            let mut j = i + 1;
            while j < t.len() && t[j].0 == r && t[j].1 == col {
                v += t[j].2;
                j += 1;
            }
            if v.norm() > ENTRY_EPS {
                rows.push(r);
                cols.push(col);
                vals.push(v);
            }
            i = j;
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut m = OperatorMatrix {
            qubits,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        };
        m.hermitian = m.hermitian_defect() <= HERMITIAN_TOL;
        m
    }

    pub fn zeros(qubits: usize) -> Self {
        Self::from_triplets(qubits, std::iter::empty())
    }

    pub fn identity(qubits: usize) -> Self {
        Self::from_triplets(qubits, (0..1usize << qubits).map(|i| (i, i, c(1.0, 0.0))))
    }

    pub fn from_diagonal(qubits: usize, diag: &[f64]) -> Self {
        assert_eq!(diag.len(), 1 << qubits);
        Self::from_triplets(
            qubits,
            diag.iter().enumerate().map(|(i, &d)| (i, i, c(d, 0.0))),
        )
    }

    /// Converts a dense square matrix whose dimension is a power of two.
    pub fn from_dense(m: &DMatrix<C64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::contract(format!(
                "matrix must be square with power-of-two dimension, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let qubits = dim.trailing_zeros() as usize;
        Ok(Self::from_triplets(
            qubits,
            (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c, m[(r, c)]))),
        ))
    }

    /// Converts a real dense matrix given row-major.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let dense = DMatrix::from_fn(dim, dim, |r, col| c(rows[r][col], 0.0));
        Self::from_dense(&dense)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim()).flat_map(move |r| self.row(r).map(move |(col, v)| (r, col, v)))
    }

    pub fn get(&self, r: usize, col: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&col) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries()
            .map(|(r, col, v)| (v - self.get(col, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Whether every stored entry has imaginary part within `tol` of zero.
    pub fn is_real(&self, tol: f64) -> bool {
        self.vals.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.dim();
        let mut d = DMatrix::zeros(dim, dim);
        for (r, col, v) in self.entries() {
            d[(r, col)] = v;
        }
        d
    }

    /// Real part as a dense matrix.
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut d = DMatrix::zeros(dim, dim);
        for (r, col, v) in self.entries() {
            d[(r, col)] = v.re;
        }
        d
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim());
        (0..self.dim())
            .map(|r| self.row(r).map(|(col, v)| v * x[col]).sum())
            .collect()
    }

    /// `<x|M|x>`.
    pub fn expectation(&self, x: &[C64]) -> C64 {
        let y = self.matvec(x);
        x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, f: f64) -> Self {
        self.scale_complex(c(f, 0.0))
    }

    pub fn scale_complex(&self, f: C64) -> Self {
        Self::from_triplets(self.qubits, self.entries().map(|(r, col, v)| (r, col, v * f)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.qubits, other.qubits, "dimension mismatch in add");
        Self::from_triplets(self.qubits, self.entries().chain(other.entries()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.qubits, other.qubits, "dimension mismatch in sub");
        Self::from_triplets(
            self.qubits,
            self.entries()
                .chain(other.entries().map(|(r, col, v)| (r, col, -v))),
        )
    }

    /// Sum of many matrices on the same register.
    pub fn sum<'a>(qubits: usize, items: impl IntoIterator<Item = &'a OperatorMatrix>) -> Self {
        Self::from_triplets(
            qubits,
            items.into_iter().flat_map(|m| {
                assert_eq!(m.qubits, qubits, "dimension mismatch in sum");
                m.entries()
            }),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.qubits, other.qubits, "dimension mismatch in mul");
        let mut out = Vec::new();
        for r in 0..self.dim() {
            for (k, a) in self.row(r) {
                for (col, b) in other.row(k) {
                    out.push((r, col, a * b));
                }
            }
        }
        Self::from_triplets(self.qubits, out)
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let q = self.qubits + other.qubits;
        let od = other.dim();
        let mut out = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.entries() {
            for (r2, c2, v2) in other.entries() {
                out.push((r1 * od + r2, c1 * od + c2, v1 * v2));
            }
        }
        Self::from_triplets(q, out)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.qubits, self.entries().map(|(r, col, v)| (col, r, v.conj())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.qubits, self.entries().map(|(r, col, v)| (col, r, v)))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_triplets(self.qubits, self.entries().map(|(r, col, v)| (r, col, v.conj())))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Places `local` (acting on `targets`, first target most significant) into a
    /// register of `total` qubits, identity elsewhere.
    pub fn embed(local: &Self, targets: &[usize], total: usize) -> Result<Self> {
        if targets.len() != local.qubits {
            return Err(Error::contract(format!(
                "local operator spans {} qubits but {} targets given",
                local.qubits,
                targets.len()
            )));
        }
        let mut seen = vec![false; total];
        for &q in targets {
            if q >= total || std::mem::replace(&mut seen[q], true) {
                return Err(Error::contract(format!(
                    "target qubit {q} invalid or repeated in a {total}-qubit register"
                )));
            }
        }
        if total > MAX_QUBITS {
            return Err(Error::Resource {
                what: "embedded operator".into(),
                required: 1usize.checked_shl(total as u32).unwrap_or(usize::MAX),
                cap: 1 << MAX_QUBITS,
            });
        }
        let mut local_cols: Vec<Vec<(usize, C64)>> = vec![Vec::new(); local.dim()];
        for (r, col, v) in local.entries() {
            local_cols[col].push((r, v));
        }
        let dim = 1usize << total;
        let mut out = Vec::with_capacity(dim * local.nnz() / local.dim().max(1));
        for b in 0..dim {
            let lc = gather_bits(b, targets, total);
            for &(lr, v) in &local_cols[lc] {
                out.push((scatter_bits(b, lr, targets, total), b, v));
            }
        }
        Ok(Self::from_triplets(total, out))
    }
}

/// Computational basis vector `|index>` on `qubits` qubits.
pub fn basis_state(qubits: usize, index: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << qubits];
    v[index] = c(1.0, 0.0);
    v
}

/// Tensor product of two state vectors.
/// `|index>` in a `dim`-dimensional space.
pub fn basis_state_dim(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); dim];
    v[index] = c(1.0, 0.0);
    v
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(a: &mut [C64]) {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
}

/// `|a><b|` on a single qubit-sized block given as local basis indices.
pub fn ket_bra(qubits: usize, row: usize, col: usize) -> OperatorMatrix {
    OperatorMatrix::from_triplets(qubits, [(row, col, c(1.0, 0.0))])
}
