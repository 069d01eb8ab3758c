//! Lanczos with full reorthogonalisation for the low end of a Hermitian
//! spectrum, with explicit deflation against already-found eigenvectors.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{GhError, Result};
use crate::seed::stream_rng;

use super::state::{axpy, inner, norm};
use super::SparseMatrix;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Krylov dimension per restart.
    pub max_krylov: usize,
    pub max_restarts: usize,
    /// Target residual `‖Hx - θx‖` relative to the spectral scale.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_krylov: 160,
            max_restarts: 30,
            tol: 1e-11,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            axpy(-c, b, v);
        }
    }
}

/// Lowest eigenpair of `h` on the orthogonal complement of `deflate`.
///
/// `deflate` must be orthonormal. The start vector is drawn from the task
/// stream `(seed, deflate.len())`, so repeated calls are reproducible.
pub fn lowest_eigenpair(h: &SparseMatrix, deflate: &[Vec<Complex64>], opts: &LanczosOptions) -> Result<EigenPair> {
    let dim = h.dim();
    if deflate.len() >= dim {
        return Err(GhError::Unsupported("nothing left to deflate".into()));
    }
    let scale = h.inf_norm().max(1e-300);
    let mut rng = stream_rng(opts.seed, deflate.len() as u64);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut total_iters = 0;
    let mut last_residual = f64::INFINITY;

    for _restart in 0..=opts.max_restarts {
        project_out(&mut start, deflate);
        let nrm = norm(&start);
        if nrm < 1e-300 {
            return Err(GhError::NonConvergence {
                residual: f64::NAN,
                iterations: total_iters,
            });
        }
        start.iter_mut().for_each(|a| *a /= nrm);

        let m_max = opts.max_krylov.min(dim - deflate.len());
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        let mut ritz: Option<(f64, Vec<f64>)> = None;

        for j in 0..m_max {
            h.matvec(&basis[j], &mut w);
            total_iters += 1;
            let a = inner(&basis[j], &w).re;
            alpha.push(a);
            // Full reorthogonalisation (twice is enough) against the Krylov
            // basis and the deflated vectors.
            for _ in 0..2 {
                for b in basis.iter().chain(deflate.iter()) {
                    let c = inner(b, &w);
                    axpy(-c, b, &mut w);
                }
            }
            let bnorm = norm(&w);
            let k = alpha.len();
            let (theta, y) = tridiagonal_lowest(&alpha, &beta);
            let est = bnorm * y[k - 1].abs();
            ritz = Some((theta, y));
            let invariant = bnorm <= 1e-13 * scale;
            if est <= opts.tol * scale || invariant || j + 1 == m_max {
                break;
            }
            beta.push(bnorm);
            basis.push(w.iter().map(|x| x / bnorm).collect());
        }

        let (_, y) = ritz.expect("at least one Lanczos step");
        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        for (yi, b) in y.iter().zip(&basis) {
            axpy(Complex64::new(*yi, 0.0), b, &mut x);
        }
        project_out(&mut x, deflate);
        let nx = norm(&x);
        x.iter_mut().for_each(|a| *a /= nx);
        let hx = h.apply(&x);
        let rayleigh = inner(&x, &hx).re;
        let mut r = hx;
        axpy(Complex64::new(-rayleigh, 0.0), &x, &mut r);
        // Residual within the deflated complement.
        project_out(&mut r, deflate);
        last_residual = norm(&r);
        if last_residual <= opts.tol * scale {
            return Ok(EigenPair {
                value: rayleigh,
                vector: x,
                residual: last_residual,
                iterations: total_iters,
            });
        }
        start = x;
    }
    Err(GhError::NonConvergence {
        residual: last_residual,
        iterations: total_iters,
    })
}

/// Lowest eigenpair of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::PauliSum;
    use crate::pauli::PauliOperator;

    #[test]
    fn transverse_field_chain_matches_dense() {
        let n = 6;
        let mut h = PauliSum::new(n);
        for q in 0..n - 1 {
            h.push(-1.0, PauliOperator::z_on(n, &[q, q + 1])).unwrap();
        }
        for q in 0..n {
            h.push(-0.7, PauliOperator::x_on(n, &[q])).unwrap();
        }
        let sp = h.to_sparse().unwrap();
        let dense = sp.to_dense();
        let eig = dense.symmetric_eigen();
        let e0 = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let pair = lowest_eigenpair(&sp, &[], &LanczosOptions::default()).unwrap();
        assert!((pair.value - e0).abs() < 1e-10, "{} vs {}", pair.value, e0);
        assert!(pair.residual < 1e-9);
    }
}
