use num_complex::Complex64;

use crate::error::{GhError, Result};
use crate::pauli::PauliOperator;

use super::MAX_STATE_QUBITS;

/// Dense state vector; basis index bit `q` is the `σ^z` value of qubit `q`
/// (0 for `+1`).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<Self> {
        check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn basis_state(n: usize, index: u64) -> Result<Self> {
        check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return Err(GhError::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// `P|ψ>`.
    pub fn apply_pauli(&self, op: &PauliOperator) -> Result<StateVector> {
        if op.n_qubits() != self.n {
            return Err(GhError::DimensionMismatch {
                expected: self.n,
                found: op.n_qubits(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (b, &a) in self.amps.iter().enumerate() {
            let (t, amp) = op.act_on_basis(b as u64);
            out[t as usize] = amp * a;
        }
        Ok(StateVector { n: self.n, amps: out })
    }

    /// Fix the global phase so the first largest-magnitude amplitude is real
    /// and positive.
    pub fn canonicalize_phase(&mut self) {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (i, a) in self.amps.iter().enumerate() {
            let m = a.norm();
            if m > best_norm * (1.0 + 1e-9) {
                best = i;
                best_norm = m;
            }
        }
        if best_norm > 0.0 {
            let ph = self.amps[best].conj() / best_norm;
            for a in &mut self.amps {
                *a *= ph;
            }
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_STATE_QUBITS {
        return Err(GhError::StateTooLarge {
            n,
            limit: MAX_STATE_QUBITS,
        });
    }
    Ok(())
}

/// `<a|b>`, summed sequentially so results are reproducible.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha x`.
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `<ψ|P|ψ>` for a Hermitian Pauli operator.
pub fn expectation(state: &StateVector, op: &PauliOperator) -> Result<f64> {
    if !op.is_hermitian() {
        return Err(GhError::NonHermitian(op.to_string()));
    }
    if op.n_qubits() != state.n_qubits() {
        return Err(GhError::DimensionMismatch {
            expected: state.n_qubits(),
            found: op.n_qubits(),
        });
    }
    let amps = state.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, &a) in amps.iter().enumerate() {
        let (t, amp) = op.act_on_basis(b as u64);
        acc += amps[t as usize].conj() * amp * a;
    }
    Ok(acc.re)
}
