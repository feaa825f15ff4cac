//! Small dense symmetric linear algebra: cyclic Jacobi eigendecomposition,
//! matrix log/exp for SPD matrices, and a Cholesky solve for normal
//! equations. Sized for d <= 64; no external dependency.

use crate::error::{Error, Result};

/// A d x d symmetric positive definite matrix, row-major storage.
///
/// Symmetry is validated at construction (within 1e-12 relative to the
/// largest entry); positive definiteness is checked where eigenvalues are
/// actually needed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SpdMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be >= 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (data[i * dim + j] - data[j * dim + i]).abs() > 1e-12 * scale {
                    return Err(Error::NotSpd(format!(
                        "asymmetric at ({i},{j}): {} vs {}",
                        data[i * dim + j],
                        data[j * dim + i]
                    )));
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let dim = entries.len();
        let mut data = vec![0.0; dim * dim];
        for (i, &v) in entries.iter().enumerate() {
            data[i * dim + i] = v;
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Sweeps until the off-diagonal Frobenius norm falls below
    /// 1e-12 * ||M||_F. Returns eigenvalues and the orthogonal matrix of
    /// eigenvectors (columns), unsorted.
    pub fn jacobi_eigen(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        if n == 1 {
            return Ok((vec![a[0]], v));
        }
        let tol = 1e-12 * self.frobenius_norm().max(f64::MIN_POSITIVE);
        for _sweep in 0..100 {
            let off: f64 = {
                let mut s = 0.0;
                for p in 0..n {
                    for q in (p + 1)..n {
                        s += 2.0 * a[p * n + q] * a[p * n + q];
                    }
                }
                s.sqrt()
            };
            if off <= tol {
                let eig = (0..n).map(|i| a[i * n + i]).collect();
                return Ok((eig, v));
            }
            for p in 0..(n - 1) {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = 0.5 * (aqq - app) / apq;
                    let t = if theta.abs() > 1e12 {
                        // rotation angle underflows; use the small-angle form
                        0.5 / theta
                    } else {
                        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                        sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    a[p * n + p] = app - t * apq;
                    a[q * n + q] = aqq + t * apq;
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    for k in 0..n {
                        if k != p && k != q {
                            let akp = a[k * n + p];
                            let akq = a[k * n + q];
                            a[k * n + p] = akp - s * (akq + tau * akp);
                            a[k * n + q] = akq + s * (akp - tau * akq);
                            a[p * n + k] = a[k * n + p];
                            a[q * n + k] = a[k * n + q];
                        }
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp - s * (vkq + tau * vkp);
                        v[k * n + q] = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
        Err(Error::NumericFailure("Jacobi eigensolver did not converge in 100 sweeps".into()))
    }

    /// Matrix logarithm via eigendecomposition; requires all eigenvalues > 0.
    pub fn log(&self) -> Result<SpdLog> {
        let (eig, vecs) = self.jacobi_eigen()?;
        if let Some(bad) = eig.iter().find(|&&l| l <= 0.0) {
            return Err(Error::NotSpd(format!("eigenvalue {bad} <= 0")));
        }
        let logs: Vec<f64> = eig.iter().map(|l| l.ln()).collect();
        Ok(SpdLog { dim: self.dim, data: assemble(self.dim, &logs, &vecs) })
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (eig, _) = self.jacobi_eigen()?;
        Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// The symmetric (not necessarily definite) logarithm of an SPD matrix.
#[derive(Debug, Clone)]
pub struct SpdLog {
    dim: usize,
    data: Vec<f64>,
}

impl SpdLog {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn add_scaled(&mut self, other: &SpdLog, factor: f64) {
        for (d, o) in self.data.iter_mut().zip(&other.data) {
            *d += factor * o;
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Matrix exponential back to an SPD matrix.
    pub fn exp(&self) -> Result<SpdMatrix> {
        let sym = SpdMatrix { dim: self.dim, data: symmetrize(self.dim, &self.data) };
        let (eig, vecs) = sym.jacobi_eigen()?;
        let exps: Vec<f64> = eig.iter().map(|l| l.exp()).collect();
        SpdMatrix::new(self.dim, symmetrize(self.dim, &assemble(self.dim, &exps, &vecs)))
    }
}

// V diag(d) V^T
fn assemble(n: usize, diag: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += v[i * n + k] * diag[k] * v[j * n + k];
            }
            out[i * n + j] = s;
        }
    }
    out
}

fn symmetrize(n: usize, m: &[f64]) -> Vec<f64> {
    let mut out = m.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = 0.5 * (m[i * n + j] + m[j * n + i]);
        }
    }
    out
}

/// Solve G x = rhs for symmetric positive definite G (row major) in place.
pub fn cholesky_solve(n: usize, g: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(g.len(), n * n);
    debug_assert_eq!(rhs.len(), n);
    // lower-triangular factor L with G = L L^T
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::RankDeficient(s));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // forward then backward substitution
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let m = SpdMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let (mut eig, v) = m.jacobi_eigen().unwrap();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
        // eigenvector columns are orthonormal
        for i in 0..2 {
            for j in 0..2 {
                let dot: f64 = (0..2).map(|k| v[k * 2 + i] * v[k * 2 + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_handles_larger_random_spd() {
        // build A^T A + I from a fixed pattern, check V L V^T reproduces it
        let n = 8;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = ((i * 7 + j * 3) % 11) as f64 / 11.0;
            }
        }
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for k in 0..n {
                    s += a[k * n + i] * a[k * n + j];
                }
                g[i * n + j] = s;
            }
        }
        let m = SpdMatrix::new(n, g.clone()).unwrap();
        let (eig, v) = m.jacobi_eigen().unwrap();
        let rebuilt = assemble(n, &eig, &v);
        let err: f64 = rebuilt
            .iter()
            .zip(&g)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-10 * m.frobenius_norm(), "reconstruction error {err}");
        assert!(eig.iter().all(|&l| l >= 1.0 - 1e-10));
    }

    #[test]
    fn log_exp_roundtrip() {
        let m = SpdMatrix::new(2, vec![4.0, 1.0, 1.0, 3.0]).unwrap();
        let back = m.log().unwrap().exp().unwrap();
        for k in 0..4 {
            assert!((back.data()[k] - m.data()[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetry_and_non_spd_log() {
        assert!(SpdMatrix::new(2, vec![1.0, 0.5, 0.4, 1.0]).is_err());
        let not_pd = SpdMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(not_pd.log(), Err(Error::NotSpd(_))));
    }

    #[test]
    fn cholesky_solves_small_system() {
        let g = vec![4.0, 2.0, 2.0, 3.0];
        let x = cholesky_solve(2, &g, &[10.0, 9.0]).unwrap();
        // exact solution of [[4,2],[2,3]] x = [10,9] is [1.5, 2.0]
        assert!((x[0] - 1.5).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
        let singular = vec![1.0, 1.0, 1.0, 1.0];
        assert!(cholesky_solve(2, &singular, &[1.0, 1.0]).is_err());
    }
}
