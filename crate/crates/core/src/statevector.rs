//! Full `2ⁿ`-amplitude simulation of the oracle and diffusion phase operators.
//!
//! Independent of the subspace model: it never assumes the dynamics stay in a
//! two-dimensional subspace, so it is the reference the subspace code is
//! checked against.
//!
//! Bitstrings are big-endian: `ω = ω₁ω₂…ωₙ` maps to index `Σ ωᵢ 2^{n−i}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, re, Real};
use crate::schedule::AngleSchedule;

pub const MAX_STATEVECTOR_QUBITS: u32 = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n: u32,
    amplitudes: Vec<Complex<T>>,
}

/// A search problem instance: qubit count and marked basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchInstance {
    n: u32,
    omega: u64,
}

impl SearchInstance {
    pub fn new(n: u32, omega: u64) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1u64 << n;
        if omega >= dim {
            return Err(Error::IndexOutOfRange { index: omega, dim });
        }
        Ok(Self { n, omega })
    }

    /// Parses a big-endian bitstring such as `"101"`; its length fixes `n`.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let n = u32::try_from(bits.len()).map_err(|_| Error::InvalidBitstring(bits.into()))?;
        if n == 0 || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidBitstring(bits.into()));
        }
        check_qubits(n)?;
        let omega =
            u64::from_str_radix(bits, 2).map_err(|_| Error::InvalidBitstring(bits.into()))?;
        Self::new(n, omega)
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn omega(&self) -> u64 {
        self.omega
    }

    /// Bit `ωᵢ` for `i` in `1..=n` (`ω₁` is the most significant bit).
    pub fn bit(&self, i: u32) -> bool {
        assert!((1..=self.n).contains(&i));
        (self.omega >> (self.n - i)) & 1 == 1
    }

    pub fn bitstring(&self) -> String {
        format!("{:0width$b}", self.omega, width = self.n as usize)
    }
}

fn check_qubits(n: u32) -> Result<()> {
    if (1..=MAX_STATEVECTOR_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            n,
            min: 1,
            max: MAX_STATEVECTOR_QUBITS,
        })
    }
}

impl<T: Real> StateVector<T> {
    /// `|s⟩ = N^{-1/2} Σ_x |x⟩`.
    pub fn uniform(n: u32) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        let amp = re(T::lit(dim as f64).sqrt().recip());
        Ok(Self {
            n,
            amplitudes: vec![amp; dim],
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "statevector length {dim} is not 2^n with n >= 1"
            )));
        }
        let n = dim.trailing_zeros();
        check_qubits(n)?;
        Ok(Self { n, amplitudes })
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn probability(&self, index: u64) -> Result<T> {
        self.amplitudes
            .get(index as usize)
            .map(Complex::norm_sqr)
            .ok_or(Error::IndexOutOfRange {
                index,
                dim: self.dim() as u64,
            })
    }

    /// `V(α)`: multiplies the amplitude of `omega` by `e^{iα}`.
    pub fn apply_oracle_phase(&mut self, omega: u64, alpha: T) -> Result<()> {
        let dim = self.dim() as u64;
        let amp = self
            .amplitudes
            .get_mut(omega as usize)
            .ok_or(Error::IndexOutOfRange { index: omega, dim })?;
        *amp = *amp * cis(alpha);
        Ok(())
    }

    /// `K(β)`: `ψ + (e^{iβ} − 1)⟨s|ψ⟩|s⟩` as a rank-one update.
    pub fn apply_diffusion_phase(&mut self, beta: T) {
        let inv_sqrt_n = T::lit(self.dim() as f64).sqrt().recip();
        let sum = self
            .amplitudes
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, a| acc + a);
        // (e^{iβ} − 1)·⟨s|ψ⟩·N^{-1/2}, added to every amplitude.
        let shift = (cis(beta) - re(T::one())) * sum * (inv_sqrt_n * inv_sqrt_n);
        for a in &mut self.amplitudes {
            *a = *a + shift;
        }
    }
}

/// Runs `K(β_p)V(α_p)⋯K(β₁)V(α₁)|s⟩` and returns `|⟨ω|ψ⟩|²`.
pub fn run_sequence<T: Real>(instance: &SearchInstance, schedule: &AngleSchedule<T>) -> Result<T> {
    let state = evolve(instance, schedule)?;
    state.probability(instance.omega())
}

/// The final state of [`run_sequence`].
pub fn evolve<T: Real>(
    instance: &SearchInstance,
    schedule: &AngleSchedule<T>,
) -> Result<StateVector<T>> {
    let mut state = StateVector::uniform(instance.qubits())?;
    for step in schedule.steps() {
        state.apply_oracle_phase(instance.omega(), step.alpha())?;
        state.apply_diffusion_phase(step.beta());
    }
    Ok(state)
}
