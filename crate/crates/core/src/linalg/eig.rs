use super::{DenseMatrix, PureState, C64, ZERO};
use crate::error::{invalid, Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm at which the iteration stops (scaled by the
/// matrix norm when that exceeds one).
pub const JACOBI_OFF_TOLERANCE: f64 = 1e-12;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<PureState>,
    pub sweeps: usize,
}

impl HermitianEigen {
    /// `sum_i lambda_i v_i v_i^dagger`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.values.len();
        let mut acc = DenseMatrix::zeros(n, n);
        for (&l, v) in self.values.iter().zip(&self.vectors) {
            acc = acc.add(&v.projector().scale(C64::new(l, 0.0))).expect("same shape");
        }
        acc
    }
}

fn off_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[r * n + c].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Each rotation first removes the phase of the pivot `a[p][q]` with a
/// diagonal unitary and then applies the real symmetric Jacobi rotation, so
/// the accumulated transform stays unitary. Eigenvectors come back with the
/// largest-magnitude component real and nonnegative.
pub fn hermitian_eig(m: &DenseMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(invalid("eigendecomposition needs a square matrix"));
    }
    if !m.is_hermitian(HERMITIAN_TOLERANCE) {
        return Err(invalid("matrix is not Hermitian"));
    }
    let n = m.rows();
    let mut a: Vec<C64> = vec![ZERO; n * n];
    for r in 0..n {
        for c in 0..n {
            a[r * n + c] = (m.get(r, c) + m.get(c, r).conj()) * 0.5;
        }
    }
    let mut v = DenseMatrix::identity(n).data().to_vec();
    let tol = JACOBI_OFF_TOLERANCE * m.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    while off_norm(&a, n) > tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numerical(format!("Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let dims = m.dims().map(<[usize]>::to_vec).unwrap_or_else(|| vec![n]);
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &k in &order {
        values.push(a[k * n + k].re);
        let col: Vec<C64> = (0..n).map(|r| v[r * n + k]).collect();
        vectors.push(PureState::normalized(col, dims.clone())?.canonical_phase());
    }
    Ok(HermitianEigen { values, vectors, sweeps })
}

fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * g);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let upp = C64::new(c, 0.0);
    let upq = C64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * upp + akq * uqp;
        a[k * n + q] = akp * upq + akq * uqq;
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * upp + vkq * uqp;
        v[k * n + q] = vkp * upq + vkq * uqq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = upp.conj() * apk + uqp.conj() * aqk;
        a[q * n + k] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}
