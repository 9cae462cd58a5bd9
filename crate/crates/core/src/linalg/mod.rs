//! Small dense complex linear algebra.
//!
//! Everything here is sized for oracle work on a handful of qubits: matrices
//! are row-major `Vec<C64>` and every operation allocates its result. Square
//! matrices may carry a subsystem factorization (`dims`), which is what
//! [`partial_trace`] and the subsystem permutations key off.

mod eig;
pub mod gates;

pub use eig::{hermitian_eig, HermitianEigen, JACOBI_MAX_SWEEPS, JACOBI_OFF_TOLERANCE};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{contract, invalid, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance on the Euclidean norm of a [`PureState`].
pub const STATE_NORM_TOLERANCE: f64 = 1e-12;

fn all_finite(data: &[C64]) -> bool {
    data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Mixed-radix digits of `index` for the given subsystem dimensions (most
/// significant subsystem first).
pub(crate) fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub(crate) fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Dense complex matrix with optional subsystem factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
    dims: Option<Vec<usize>>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !all_finite(&data) {
            return Err(invalid("matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, data, dims: None })
    }

    /// Attaches a subsystem factorization; the product of `dims` must equal
    /// both `rows` and `cols`.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        let prod: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || prod != self.rows || prod != self.cols {
            return Err(invalid(format!("dims {dims:?} do not factor a {}x{} matrix", self.rows, self.cols)));
        }
        self.dims = Some(dims);
        Ok(self)
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols], dims: None }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![ZERO; n * n];
        for (i, &x) in diag.iter().enumerate() {
            data[i * n + i] = C64::new(x, 0.0);
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> Option<&[usize]> {
        self.dims.as_deref()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    /// Conjugate transpose. Factorization metadata is kept.
    pub fn adjoint(&self) -> Self {
        let mut data = vec![ZERO; self.data.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        Self { rows: self.cols, cols: self.rows, data, dims: self.dims.clone() }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![ZERO; self.rows * other.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (out, &b) in data[r * other.cols..(r + 1) * other.cols].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        let dims = if self.dims == other.dims { self.dims.clone() } else { None };
        Ok(Self { rows: self.rows, cols: other.cols, data, dims })
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(contract(format!("vector of length {} does not match {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { data: self.data.iter().map(|z| z * k).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(contract("shape mismatch in matrix addition"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entrywise difference; infinite for shape mismatch.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r..self.cols).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self.adjoint().matmul(self).map(|p| p.max_abs_diff(&Self::identity(self.rows)) <= tol).unwrap_or(false)
    }
}

/// Kronecker product. Subsystem metadata is concatenated; a square factor
/// without metadata counts as a single subsystem.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let rows = a.rows.checked_mul(b.rows).ok_or_else(|| invalid("kron row count overflows"))?;
    let cols = a.cols.checked_mul(b.cols).ok_or_else(|| invalid("kron column count overflows"))?;
    let mut data = vec![ZERO; rows * cols];
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a.get(ar, ac);
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let base = (ar * b.rows + br) * cols + ac * b.cols;
                for bc in 0..b.cols {
                    data[base + bc] = x * b.get(br, bc);
                }
            }
        }
    }
    let mut out = DenseMatrix::new(rows, cols, data)?;
    if a.is_square() && b.is_square() {
        let mut dims = a.dims.clone().unwrap_or_else(|| vec![a.rows]);
        dims.extend(b.dims.clone().unwrap_or_else(|| vec![b.rows]));
        out = out.with_dims(dims)?;
    }
    Ok(out)
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems
/// appear in ascending index order in the result.
pub fn partial_trace(m: &DenseMatrix, keep: &[usize]) -> Result<DenseMatrix> {
    let dims = m.dims().ok_or_else(|| contract("partial trace needs subsystem dims on the matrix"))?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(contract(format!("subsystem {bad} out of range for {} subsystems", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    let full_index = |kept_idx: usize, traced_idx: usize| {
        let kd = digits(kept_idx, &kept_dims);
        let td = digits(traced_idx, &traced_dims);
        let mut all = vec![0; dims.len()];
        for (&slot, &x) in keep.iter().zip(&kd) {
            all[slot] = x;
        }
        for (&slot, &x) in traced.iter().zip(&td) {
            all[slot] = x;
        }
        compose(&all, dims)
    };
    let lookup: Vec<Vec<usize>> = (0..dk).map(|k| (0..dt).map(|t| full_index(k, t)).collect()).collect();

    let mut data = vec![ZERO; dk * dk];
    for r in 0..dk {
        for c in 0..dk {
            data[r * dk + c] = (0..dt).map(|t| m.get(lookup[r][t], lookup[c][t])).sum();
        }
    }
    let out = DenseMatrix::new(dk, dk, data)?;
    if kept_dims.is_empty() {
        Ok(out)
    } else {
        out.with_dims(kept_dims)
    }
}

/// Normalized state vector with a subsystem factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Builds a state, requiring unit norm within [`STATE_NORM_TOLERANCE`].
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        Self::check_shape(&amplitudes, &dims)?;
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_NORM_TOLERANCE {
            return Err(invalid(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Builds a state after dividing by its norm.
    pub fn normalized(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        Self::check_shape(&amplitudes, &dims)?;
        let n = norm(&amplitudes);
        if n == 0.0 {
            return Err(invalid("cannot normalize the zero vector"));
        }
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z / n).collect(), dims })
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if index >= dim {
            return Err(contract(format!("basis index {index} out of range {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(amps, dims)
    }

    fn check_shape(amplitudes: &[C64], dims: &[usize]) -> Result<()> {
        let prod: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || prod != amplitudes.len() {
            return Err(invalid(format!("dims {dims:?} do not factor a vector of length {}", amplitudes.len())));
        }
        if !all_finite(amplitudes) {
            return Err(invalid("state has non-finite amplitudes"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(contract("inner product of states with different dimensions"));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        let amplitudes = self.amplitudes.iter().flat_map(|a| other.amplitudes.iter().map(move |b| a * b)).collect();
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { amplitudes, dims }
    }

    /// `|psi><psi|` with the state's factorization attached.
    pub fn projector(&self) -> DenseMatrix {
        let n = self.dim();
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                data[r * n + c] = self.amplitudes[r] * self.amplitudes[c].conj();
            }
        }
        DenseMatrix { rows: n, cols: n, data, dims: Some(self.dims.clone()) }
    }

    /// Applies a unitary; the result must still be normalized.
    pub fn apply(&self, u: &DenseMatrix) -> Result<PureState> {
        PureState::new(u.matvec(&self.amplitudes)?, self.dims.clone())
    }

    /// Reorders subsystems: subsystem `j` of the result is subsystem
    /// `order[j]` of `self`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<PureState> {
        let k = self.dims.len();
        let mut seen = vec![false; k];
        if order.len() != k || order.iter().any(|&i| i >= k || std::mem::replace(&mut seen[i], true)) {
            return Err(contract(format!("{order:?} is not a permutation of {k} subsystems")));
        }
        let new_dims: Vec<usize> = order.iter().map(|&i| self.dims[i]).collect();
        let mut amps = vec![ZERO; self.dim()];
        for (old, &amp) in self.amplitudes.iter().enumerate() {
            let d = digits(old, &self.dims);
            let nd: Vec<usize> = order.iter().map(|&i| d[i]).collect();
            amps[compose(&nd, &new_dims)] = amp;
        }
        Ok(PureState { amplitudes: amps, dims: new_dims })
    }

    /// Same amplitudes with a different factorization of the same dimension.
    pub fn regroup(&self, dims: Vec<usize>) -> Result<PureState> {
        PureState::new(self.amplitudes.clone(), dims)
    }

    /// Rescales by a unit phase so the largest-magnitude amplitude is real
    /// and nonnegative.
    pub fn canonical_phase(&self) -> PureState {
        let mut best = 0;
        for (i, z) in self.amplitudes.iter().enumerate() {
            if z.norm() > self.amplitudes[best].norm() + 1e-12 {
                best = i;
            }
        }
        let pivot = self.amplitudes[best];
        if pivot.norm() == 0.0 {
            return self.clone();
        }
        let phase = pivot.conj() / pivot.norm();
        PureState { amplitudes: self.amplitudes.iter().map(|z| z * phase).collect(), dims: self.dims.clone() }
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Haar-random unitary via Gram-Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DenseMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> =
            (0..dim).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut data = vec![ZERO; dim * dim];
    for (c, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            data[r * dim + c] = z;
        }
    }
    DenseMatrix { rows: dim, cols: dim, data, dims: None }
}

/// Random Hermitian matrix with standard-normal entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DenseMatrix {
    let mut data = vec![ZERO; dim * dim];
    for r in 0..dim {
        data[r * dim + r] = C64::new(StandardNormal.sample(rng), 0.0);
        for c in r + 1..dim {
            let z = C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
            data[r * dim + c] = z;
            data[c * dim + r] = z.conj();
        }
    }
    DenseMatrix { rows: dim, cols: dim, data, dims: None }
}

/// Random pure state, Haar distributed.
pub fn random_state<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> PureState {
    let dim: usize = dims.iter().product();
    let amps: Vec<C64> = (0..dim).map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
    PureState::normalized(amps, dims).expect("gaussian vector is nonzero")
}
