use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};

/// Single-qubit operator, row-major.
pub type Op2<T> = [[Complex<T>; 2]; 2];

/// T₁/T₂ relaxation with per-gate durations (all in seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel<T> {
    pub t1: T,
    pub t2: T,
    pub duration_1q: T,
    pub duration_2q: T,
}

impl<T: Real> NoiseModel<T> {
    pub const DEFAULT_DURATION_1Q: f64 = 50e-9;
    pub const DEFAULT_DURATION_2Q: f64 = 150e-9;

    /// Default gate durations: 50 ns single-qubit, 150 ns CZ.
    pub fn new(t1: T, t2: T) -> Result<Self> {
        Self::with_durations(
            t1,
            t2,
            T::lit(Self::DEFAULT_DURATION_1Q),
            T::lit(Self::DEFAULT_DURATION_2Q),
        )
    }

    pub fn with_durations(t1: T, t2: T, duration_1q: T, duration_2q: T) -> Result<Self> {
        let m = Self {
            t1,
            t2,
            duration_1q,
            duration_2q,
        };
        m.validate()?;
        Ok(m)
    }

    /// No decoherence at all (`T₁ = T₂ = ∞`).
    pub fn noiseless() -> Self {
        Self {
            t1: T::infinity(),
            t2: T::infinity(),
            duration_1q: T::lit(Self::DEFAULT_DURATION_1Q),
            duration_2q: T::lit(Self::DEFAULT_DURATION_2Q),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > T::zero() && self.t2 > T::zero()) {
            return Err(Error::Unphysical(format!(
                "T1={} and T2={} must be positive",
                self.t1, self.t2
            )));
        }
        if self.t2 > T::lit(2.0) * self.t1 {
            return Err(Error::Unphysical(format!(
                "T2={} exceeds 2*T1={}",
                self.t2,
                T::lit(2.0) * self.t1
            )));
        }
        if !(self.duration_1q > T::zero() && self.duration_2q > T::zero()) {
            return Err(Error::Unphysical("gate durations must be positive".into()));
        }
        Ok(())
    }

    /// `1/T_φ = 1/T₂ − 1/(2T₁)`, clamped at zero against rounding.
    pub fn pure_dephasing_rate(&self) -> T {
        let rate = self.t2.recip() - (T::lit(2.0) * self.t1).recip();
        rate.max(T::zero())
    }
}

/// Damping and dephasing probabilities for an idle of `duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationParams<T> {
    /// `γ = 1 − e^{−t/T₁}`.
    pub gamma: T,
    /// `λ = (1 − e^{−t/T_φ})/2`.
    pub lambda: T,
}

pub fn relaxation_params<T: Real>(
    noise: &NoiseModel<T>,
    duration: T,
) -> Result<RelaxationParams<T>> {
    noise.validate()?;
    let gamma = -(-(duration / noise.t1)).exp_m1();
    let lambda = -(-(duration * noise.pure_dephasing_rate())).exp_m1() * T::lit(0.5);
    Ok(RelaxationParams { gamma, lambda })
}

/// Amplitude damping followed by pure dephasing, as one Kraus set.
///
/// Operators that vanish identically are dropped, so the noiseless limit
/// returns just the identity.
pub fn kraus_relaxation<T: Real>(noise: &NoiseModel<T>, duration: T) -> Result<Vec<Op2<T>>> {
    let RelaxationParams { gamma, lambda } = relaxation_params(noise, duration)?;
    let z = re(T::zero());
    let damping = [
        [[re(T::one()), z], [z, re((T::one() - gamma).sqrt())]],
        [[z, re(gamma.sqrt())], [z, z]],
    ];
    let keep = (T::one() - lambda).sqrt();
    let flip = lambda.sqrt();
    let dephasing = [
        [[re(keep), z], [z, re(keep)]],
        [[re(flip), z], [z, re(-flip)]],
    ];

    let mut out = Vec::with_capacity(4);
    for d in &dephasing {
        for a in &damping {
            let k = mul2(d, a);
            if k.iter().flatten().any(|c| c.norm_sqr() > T::zero()) {
                out.push(k);
            }
        }
    }
    Ok(out)
}

pub(crate) fn mul2<T: Real>(a: &Op2<T>, b: &Op2<T>) -> Op2<T> {
    let mut out = [[re(T::zero()); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Largest entrywise deviation of `Σ K†K` from the identity.
pub fn completeness_error<T: Real>(ops: &[Op2<T>]) -> T {
    let mut sum = [[re(T::zero()); 2]; 2];
    for k in ops {
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] = sum[i][j] + k[0][i].conj() * k[0][j] + k[1][i].conj() * k[1][j];
            }
        }
    }
    let mut worst = T::zero();
    for (i, row) in sum.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let id = if i == j { T::one() } else { T::zero() };
            worst = worst.max((*v - re(id)).norm());
        }
    }
    worst
}
