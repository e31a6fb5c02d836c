//! Small dense linear algebra for qubit-scale problems.
//!
//! Everything here is sized for matrices of dimension at most a few dozen:
//! dense storage, cyclic Jacobi eigensolvers, and unblocked Cholesky. No
//! attempt is made at cache blocking or vectorization.

use num_complex::Complex64;
use num_traits::Zero;

use crate::{Error, Result};

/// Complex scalar used throughout the quantum modules.
pub type C64 = Complex64;

/// Dense square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![C64::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from rows of complex entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut m = CMat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            n: self.n,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product, `self` on the most significant factor.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (a, b) = (self.n, other.n);
        let mut out = CMat::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let v = self[(i, j)];
                if v == C64::zero() {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = v * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest absolute deviation from the Hermitian condition.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian
    /// matrix, via cyclic Jacobi rotations.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMat) {
        hermitian_eigen(self)
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigen().0[0]
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Outer product `|v⟩⟨w|`.
pub fn outer(v: &[C64], w: &[C64]) -> CMat {
    let n = v.len();
    assert_eq!(w.len(), n);
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = v[i] * w[j].conj();
        }
    }
    m
}

/// Inner product `⟨v|w⟩` with conjugation on the left argument.
pub fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// the columns of a unitary matrix. The 2×2 case reduces to a single closed
/// -form rotation.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.dim();
    let mut a = m.clone();
    let mut q = CMat::identity(n);

    let off = |a: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s
    };

    let scale: f64 = (0..n).map(|i| a[(i, i)].norm()).fold(1.0, f64::max);
    let tol = (scale * 1e-15).powi(2) * (n * n) as f64;

    for _sweep in 0..60 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr.norm() <= scale * 1e-18 {
                    continue;
                }
                // Unitary 2x2 rotation annihilating a[(p, r)]:
                // diagonalize [[app, apr], [apr*, arr]].
                let app = a[(p, p)].re;
                let arr = a[(r, r)].re;
                let abs = apr.norm();
                let phase = apr / C64::new(abs, 0.0);
                let theta = 0.5 * (2.0 * abs).atan2(app - arr);
                let (c, s) = (theta.cos(), theta.sin());
                // Columns transform as p' = c·p + s·phase·r, r' = -s·conj(phase)·p + c·r.
                let (cs, sn) = (C64::new(c, 0.0), C64::new(s, 0.0) * phase);

                // A <- G† A G with G acting on columns (p, r).
                for i in 0..n {
                    let aip = a[(i, p)];
                    let air = a[(i, r)];
                    a[(i, p)] = aip * cs + air * sn.conj();
                    a[(i, r)] = -aip * sn + air * cs;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let arj = a[(r, j)];
                    a[(p, j)] = cs.conj() * apj + sn * arj;
                    a[(r, j)] = -sn.conj() * apj + cs * arj;
                }
                for i in 0..n {
                    let qip = q[(i, p)];
                    let qir = q[(i, r)];
                    q[(i, p)] = qip * cs + qir * sn.conj();
                    q[(i, r)] = -qip * sn + qir * cs;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
    let mut vectors = CMat::zeros(n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = q[(i, old_col)];
        }
    }
    (values, vectors)
}

// ---------------------------------------------------------------------------
// Real symmetric kernels for the SDP solver
// ---------------------------------------------------------------------------

/// Dense real symmetric/general square matrix helpers over flat row-major
/// slices. Kept free-standing because the interior-point solver streams
/// through them.
pub mod real {
    use super::{Error, Result};

    pub fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                let row = &b[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, &bv) in dst.iter_mut().zip(row) {
                    *d += aik * bv;
                }
            }
        }
        out
    }

    pub fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = a[i * n + j];
            }
        }
        out
    }

    pub fn symmetrize(n: usize, a: &mut [f64]) {
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
    }

    /// Frobenius inner product.
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// In-place lower Cholesky. Fails with the offending pivot index if the
    /// matrix is not positive definite.
    pub fn cholesky(n: usize, a: &mut [f64]) -> Result<()> {
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Numerical(format!(
                    "cholesky pivot {j} is not positive ({d:.3e})"
                )));
            }
            let d = d.sqrt();
            a[j * n + j] = d;
            for i in (j + 1)..n {
                let mut v = a[i * n + j];
                for k in 0..j {
                    v -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = v / d;
            }
        }
        // Zero the strict upper triangle so the factor can be used directly.
        for i in 0..n {
            for j in (i + 1)..n {
                a[i * n + j] = 0.0;
            }
        }
        Ok(())
    }

    /// Solves `L x = b` for lower-triangular `L`.
    pub fn forward_solve(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let v = x[k];
                x[i] -= l[i * n + k] * v;
            }
            x[i] /= l[i * n + i];
        }
        x
    }

    /// Solves `Lᵀ x = b` for lower-triangular `L`.
    pub fn backward_solve(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let v = x[k];
                x[i] -= l[k * n + i] * v;
            }
            x[i] /= l[i * n + i];
        }
        x
    }

    /// Solves `A x = b` for symmetric positive definite `A` via Cholesky.
    pub fn solve_spd(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let mut l = a.to_vec();
        cholesky(n, &mut l)?;
        Ok(backward_solve(n, &l, &forward_solve(n, &l, b)))
    }

    /// Inverse of a lower-triangular matrix.
    pub fn invert_lower(n: usize, l: &[f64]) -> Vec<f64> {
        let mut inv = vec![0.0; n * n];
        for col in 0..n {
            let mut e = vec![0.0; n];
            e[col] = 1.0;
            let x = forward_solve(n, l, &e);
            for (row, &v) in x.iter().enumerate() {
                inv[row * n + col] = v;
            }
        }
        inv
    }

    /// Eigenvalues (ascending) and eigenvectors (columns, row-major) of a
    /// real symmetric matrix via cyclic Jacobi.
    pub fn sym_eigen(n: usize, m: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut a = m.to_vec();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }

        let off = |a: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a[i * n + j] * a[i * n + j];
                    }
                }
            }
            s
        };
        let scale: f64 = (0..n).map(|i| a[i * n + i].abs()).fold(1.0, f64::max);
        let tol = (scale * 1e-15).powi(2) * (n * n) as f64;

        for _sweep in 0..60 {
            if off(&a) <= tol {
                break;
            }
            for p in 0..n {
                for r in (p + 1)..n {
                    let apr = a[p * n + r];
                    if apr.abs() <= scale * 1e-18 {
                        continue;
                    }
                    let theta = 0.5 * (2.0 * apr).atan2(a[p * n + p] - a[r * n + r]);
                    let (c, s) = (theta.cos(), theta.sin());
                    for i in 0..n {
                        let aip = a[i * n + p];
                        let air = a[i * n + r];
                        a[i * n + p] = c * aip + s * air;
                        a[i * n + r] = -s * aip + c * air;
                    }
                    for j in 0..n {
                        let apj = a[p * n + j];
                        let arj = a[r * n + j];
                        a[p * n + j] = c * apj + s * arj;
                        a[r * n + j] = -s * apj + c * arj;
                    }
                    for i in 0..n {
                        let qip = q[i * n + p];
                        let qir = q[i * n + r];
                        q[i * n + p] = c * qip + s * qir;
                        q[i * n + r] = -s * qip + c * qir;
                    }
                }
            }
        }

        let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[i * n + i], i)).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let values: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
        let mut vectors = vec![0.0; n * n];
        for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
            for i in 0..n {
                vectors[i * n + new_col] = q[i * n + old_col];
            }
        }
        (values, vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_eigen_recovers_pauli_y() {
        let sy = CMat::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ]);
        let (vals, vecs) = sy.hermitian_eigen();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // Reconstruct sy from the spectral decomposition.
        let mut rec = CMat::zeros(2);
        for k in 0..2 {
            let col: Vec<C64> = (0..2).map(|i| vecs[(i, k)]).collect();
            rec = rec.add(&outer(&col, &col).scale(c(vals[k], 0.0)));
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((rec[(i, j)] - sy[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_eigen_handles_larger_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 17;
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        let (vals, vecs) = m.hermitian_eigen();
        // Eigenvector columns are orthonormal and satisfy M v = λ v.
        for k in 0..n {
            let col: Vec<C64> = (0..n).map(|i| vecs[(i, k)]).collect();
            let mv = m.mul_vec(&col);
            for i in 0..n {
                assert!((mv[i] - col[i] * c(vals[k], 0.0)).norm() < 1e-9);
            }
            for l in 0..n {
                let other: Vec<C64> = (0..n).map(|i| vecs[(i, l)]).collect();
                let ip = inner(&col, &other).norm();
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn real_cholesky_solves_spd_systems() {
        let n = 3;
        // A = M Mᵀ + I for a fixed M.
        let m = [1.0, 2.0, 0.0, -1.0, 0.5, 0.25, 3.0, -2.0, 1.0];
        let mt = real::transpose(n, &m);
        let mut a = real::matmul(n, &m, &mt);
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        let b = [1.0, -2.0, 0.5];
        let x = real::solve_spd(n, &a, &b).unwrap();
        for i in 0..n {
            let ax: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn real_sym_eigen_matches_known_spectrum() {
        let a = [2.0, 1.0, 1.0, 2.0];
        let (vals, _) = real::sym_eigen(2, &a);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }
}
