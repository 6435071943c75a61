use nalgebra::DMatrix;
use num_complex::Complex;

use super::kraus::{kraus_relaxation, NoiseModel, Op2};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::scalar::{re, Real};

pub const MAX_DENSITY_QUBITS: usize = 5;

/// `2ⁿ × 2ⁿ` density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "state length {dim} is not 2^n"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_width(n)?;
        let mut data = Vec::with_capacity(dim * dim);
        for a in amplitudes {
            for b in amplitudes {
                data.push(a * b.conj());
            }
        }
        Ok(Self { n, data })
    }

    /// `|index⟩⟨index|`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_width(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index: index as u64,
                dim: dim as u64,
            });
        }
        let mut data = vec![re(T::zero()); dim * dim];
        data[index * dim + index] = re(T::one());
        Ok(Self { n, data })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim())
            .map(|i| self.get(i, i))
            .fold(re(T::zero()), |a, b| a + b)
    }

    /// Diagonal populations.
    pub fn probabilities(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn probability(&self, index: usize) -> T {
        self.get(index, index).re
    }

    pub fn hermiticity_error(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part, computed in `f64`.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| {
            let a = self.get(i, j);
            let b = self.get(j, i).conj();
            Complex::new(
                (a.re + b.re).to_f64_lossy() * 0.5,
                (a.im + b.im).to_f64_lossy() * 0.5,
            )
        });
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Trace, Hermiticity and positivity within `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        let tr_err = ((tr.re - T::one()).abs() + tr.im.abs()).to_f64_lossy();
        if tr_err > tol {
            return Err(Error::InvariantViolation(format!(
                "trace deviates from 1 by {tr_err:e}"
            )));
        }
        let herm = self.hermiticity_error().to_f64_lossy();
        if herm > tol {
            return Err(Error::InvariantViolation(format!(
                "not Hermitian (error {herm:e})"
            )));
        }
        let lam = self.min_eigenvalue();
        if lam < -tol {
            return Err(Error::InvariantViolation(format!(
                "negative eigenvalue {lam:e}"
            )));
        }
        Ok(())
    }

    /// `ρ → UρU†` for a single-qubit `U` (also used for Kraus terms).
    fn conjugate_1q(&mut self, q: usize, u: &Op2<T>) {
        let d = self.dim();
        let bit = 1usize << q;
        // Rows: U·ρ
        for j in 0..d {
            for i in 0..d {
                if i & bit == 0 {
                    let (x0, x1) = (self.data[i * d + j], self.data[(i | bit) * d + j]);
                    self.data[i * d + j] = u[0][0] * x0 + u[0][1] * x1;
                    self.data[(i | bit) * d + j] = u[1][0] * x0 + u[1][1] * x1;
                }
            }
        }
        // Columns: (Uρ)·U†
        let uc = [
            [u[0][0].conj(), u[0][1].conj()],
            [u[1][0].conj(), u[1][1].conj()],
        ];
        for i in 0..d {
            let row = &mut self.data[i * d..(i + 1) * d];
            for j in 0..d {
                if j & bit == 0 {
                    let (x0, x1) = (row[j], row[j | bit]);
                    row[j] = x0 * uc[0][0] + x1 * uc[0][1];
                    row[j | bit] = x0 * uc[1][0] + x1 * uc[1][1];
                }
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let d = self.dim();
        let mask = (1usize << a) | (1usize << b);
        for i in 0..d {
            let si = i & mask == mask;
            for j in 0..d {
                if si != (j & mask == mask) {
                    self.data[i * d + j] = -self.data[i * d + j];
                }
            }
        }
    }

    /// `ρ → Σ_k K_k ρ K_k†` on qubit `q`.
    pub fn apply_channel_1q(&mut self, q: usize, ops: &[Op2<T>]) {
        if let [only] = ops {
            self.conjugate_1q(q, only);
            return;
        }
        let mut acc = vec![re(T::zero()); self.data.len()];
        for k in ops {
            let mut term = self.clone();
            term.conjugate_1q(q, k);
            for (a, t) in acc.iter_mut().zip(&term.data) {
                *a = *a + t;
            }
        }
        self.data = acc;
    }

    /// Applies one gate noiselessly.
    pub fn apply_gate(&mut self, gate: &Gate<T>) {
        match *gate {
            Gate::Cz { a, b } => self.apply_cz(a, b),
            Gate::Rz { qubit, .. } | Gate::Rx { qubit, .. } => {
                let u = crate::circuit::gate_matrix_1q(gate).expect("single-qubit gate");
                self.conjugate_1q(qubit, &u);
            }
        }
    }
}

fn check_width(n: usize) -> Result<()> {
    if (1..=MAX_DENSITY_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            n: n as u32,
            min: 1,
            max: MAX_DENSITY_QUBITS as u32,
        })
    }
}

/// [`simulate_noisy_observed`] without an observer.
pub fn simulate_noisy<T: Real>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    initial: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    simulate_noisy_observed(circuit, noise, initial, |_, _| Ok(()))
}

/// Applies every gate as `ρ → UρU†`, followed by relaxation for
/// `duration_1q` on the qubit of each RX and for `duration_2q` on both qubits
/// of each CZ. RZ gates are virtual and noiseless.
///
/// `observe(step, ρ)` runs after every gate (with its noise); an error from it
/// aborts the simulation.
pub fn simulate_noisy_observed<T, F>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
    initial: &DensityMatrix<T>,
    mut observe: F,
) -> Result<DensityMatrix<T>>
where
    T: Real,
    F: FnMut(usize, &DensityMatrix<T>) -> Result<()>,
{
    if circuit.qubits() != initial.qubits() {
        return Err(Error::DimensionMismatch {
            expected: initial.qubits(),
            got: circuit.qubits(),
        });
    }
    check_width(circuit.qubits())?;
    let ops_1q = kraus_relaxation(noise, noise.duration_1q)?;
    let ops_2q = kraus_relaxation(noise, noise.duration_2q)?;

    let mut rho = initial.clone();
    for (step, gate) in circuit.gates().iter().enumerate() {
        rho.apply_gate(gate);
        match *gate {
            Gate::Rx { qubit, .. } => rho.apply_channel_1q(qubit, &ops_1q),
            Gate::Cz { a, b } => {
                rho.apply_channel_1q(a, &ops_2q);
                rho.apply_channel_1q(b, &ops_2q);
            }
            Gate::Rz { .. } => {}
        }
        observe(step, &rho)?;
    }
    Ok(rho)
}
