//! Dense unitaries for verifying compiled circuits.

use num_complex::Complex;

use super::{Circuit, Gate, RxSign};
use crate::error::{Error, Result};
use crate::scalar::{cis, re, Real};

pub const MAX_UNITARY_QUBITS: usize = 6;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = re(T::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.dim + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> T {
        let g = self.dagger().mul(self);
        let id = Self::identity(self.dim);
        g.data
            .iter()
            .zip(&id.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }
}

/// `min_φ ‖A − e^{iφ}B‖_F`, an upper bound on the operator-norm distance
/// between `A` and `B` modulo global phase.
pub fn phase_distance<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> T {
    assert_eq!(a.dim, b.dim);
    let overlap = b
        .data
        .iter()
        .zip(&a.data)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        });
    let phase = if overlap.norm() > T::zero() {
        overlap / overlap.norm()
    } else {
        re(T::one())
    };
    a.data
        .iter()
        .zip(&b.data)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - phase * y).norm_sqr())
        .sqrt()
}

pub(crate) fn gate_matrix_1q<T: Real>(gate: &Gate<T>) -> Option<[[Complex<T>; 2]; 2]> {
    let z = Complex::new(T::zero(), T::zero());
    match *gate {
        Gate::Rz { theta, .. } => {
            let half = theta * T::lit(0.5);
            Some([[cis(-half), z], [z, cis(half)]])
        }
        Gate::Rx { sign, .. } => {
            let h = T::lit(0.5).sqrt();
            let off = match sign {
                RxSign::Plus => Complex::new(T::zero(), -h),
                RxSign::Minus => Complex::new(T::zero(), h),
            };
            Some([[re(h), off], [off, re(h)]])
        }
        Gate::Cz { .. } => None,
    }
}

/// Applies `gate` to a `2ⁿ`-amplitude state in place.
pub fn apply_gate<T: Real>(gate: &Gate<T>, state: &mut [Complex<T>]) {
    match *gate {
        Gate::Cz { a, b } => {
            let mask = (1usize << a) | (1usize << b);
            for (i, amp) in state.iter_mut().enumerate() {
                if i & mask == mask {
                    *amp = -*amp;
                }
            }
        }
        Gate::Rz { qubit, .. } | Gate::Rx { qubit, .. } => {
            let u = gate_matrix_1q(gate).expect("single-qubit gate");
            let bit = 1usize << qubit;
            for i in 0..state.len() {
                if i & bit == 0 {
                    let (x0, x1) = (state[i], state[i | bit]);
                    state[i] = u[0][0] * x0 + u[0][1] * x1;
                    state[i | bit] = u[1][0] * x0 + u[1][1] * x1;
                }
            }
        }
    }
}

/// Product of the gate matrices, first gate applied first.
pub fn circuit_unitary<T: Real>(circuit: &Circuit<T>) -> Result<DenseMatrix<T>> {
    let n = circuit.qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::QubitCount {
            n: n as u32,
            min: 0,
            max: MAX_UNITARY_QUBITS as u32,
        });
    }
    let dim = 1usize << n;
    let mut u = DenseMatrix::zeros(dim);
    for j in 0..dim {
        let mut col = vec![Complex::new(T::zero(), T::zero()); dim];
        col[j] = re(T::one());
        for g in circuit.gates() {
            apply_gate(g, &mut col);
        }
        for (i, v) in col.into_iter().enumerate() {
            u.set(i, j, v);
        }
    }
    Ok(u)
}

/// `1 + (e^{iα} − 1)|ω⟩⟨ω|` for a basis index `omega`.
pub fn oracle_unitary<T: Real>(omega: u64, alpha: T, n: usize) -> DenseMatrix<T> {
    let mut m = DenseMatrix::identity(1 << n);
    m.set(omega as usize, omega as usize, cis(alpha));
    m
}

/// `1 + (e^{iβ} − 1)|s⟩⟨s|`.
pub fn diffusion_unitary<T: Real>(beta: T, n: usize) -> DenseMatrix<T> {
    let dim = 1usize << n;
    let coeff = (cis(beta) - re(T::one())) / re(T::lit(dim as f64));
    let mut m = DenseMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(i, j, m.get(i, j) + coeff);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::<f64>::new(3);
        assert_eq!(circuit_unitary(&c).unwrap(), DenseMatrix::identity(8));
    }

    #[test]
    fn single_cz() {
        let mut c = Circuit::<f64>::new(2);
        c.push(Gate::Cz { a: 0, b: 1 }).unwrap();
        let u = circuit_unitary(&c).unwrap();
        let mut expected = DenseMatrix::identity(4);
        expected.set(3, 3, re(-1.0));
        assert_eq!(u, expected);
    }

    #[test]
    fn two_half_x_rotations_make_minus_i_x() {
        let mut c = Circuit::<f64>::new(1);
        c.push(Gate::Rx {
            qubit: 0,
            sign: RxSign::Plus,
        })
        .unwrap();
        c.push(Gate::Rx {
            qubit: 0,
            sign: RxSign::Plus,
        })
        .unwrap();
        let u = circuit_unitary(&c).unwrap();
        let i = Complex::new(0.0, 1.0);
        let expected = [[re(0.0), -i], [-i, re(0.0)]];
        for (r, row) in expected.iter().enumerate() {
            for (s, want) in row.iter().enumerate() {
                assert!((u.get(r, s) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rx_signs_are_inverse() {
        let mut c = Circuit::<f64>::new(1);
        c.push(Gate::Rx {
            qubit: 0,
            sign: RxSign::Plus,
        })
        .unwrap();
        c.push(Gate::Rx {
            qubit: 0,
            sign: RxSign::Minus,
        })
        .unwrap();
        let u = circuit_unitary(&c).unwrap();
        assert!(phase_distance(&u, &DenseMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = oracle_unitary(2, 0.3, 2);
        let mut b = a.clone();
        for i in 0..4 {
            for j in 0..4 {
                b.set(i, j, a.get(i, j) * cis(1.234));
            }
        }
        assert!(phase_distance(&a, &b) < 1e-14);
        assert!(phase_distance(&a, &oracle_unitary(1, 0.3, 2)) > 0.1);
    }

    #[test]
    fn reference_unitaries_are_unitary() {
        assert!(oracle_unitary(5, 1.1, 3).unitarity_error() < 1e-14);
        assert!(diffusion_unitary(2.2, 4).unitarity_error() < 1e-14);
        let d = diffusion_unitary(PI, 2);
        // 2|s⟩⟨s| − 1 up to sign: 1 − 2|s⟩⟨s|
        assert!((d.get(0, 0) - re(0.5)).norm() < 1e-15);
        assert!((d.get(0, 1) - re(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn too_wide_for_dense_reconstruction() {
        assert!(circuit_unitary(&Circuit::<f64>::new(7)).is_err());
    }
}
