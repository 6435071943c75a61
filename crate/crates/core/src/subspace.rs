//! Exact dynamics inside the two-dimensional invariant subspace.
//!
//! Every state reachable from the uniform superposition by oracle phases
//! `V(α) = 1 + (e^{iα} − 1)|ω⟩⟨ω|` and diffusion phases
//! `K(β) = 1 + (e^{iβ} − 1)|s⟩⟨s|` stays in `span{|u⟩, |ω⟩}` where
//! `|u⟩ = (N − 1)^{-1/2} Σ_{x≠ω} |x⟩`. A state is therefore a pair of complex
//! amplitudes and one step `K(β)V(α)` is a 2×2 unitary, which makes the cost
//! of a schedule `O(p)` regardless of the qubit count.
//!
//! The closed-form Grover baselines (rotation angle, success probability,
//! optimal oracle-call count) live here as well.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{cis, re, Real};
use crate::schedule::{AngleSchedule, StepAngles};

pub const MAX_SUBSPACE_QUBITS: u32 = 30;

/// Search-space size `N = 2ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SearchSize {
    n: u32,
}

impl SearchSize {
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=MAX_SUBSPACE_QUBITS).contains(&n) {
            return Err(Error::QubitCount {
                n,
                min: 1,
                max: MAX_SUBSPACE_QUBITS,
            });
        }
        Ok(Self { n })
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> u64 {
        1u64 << self.n
    }

    pub(crate) fn dim_real<T: Real>(&self) -> T {
        T::lit(self.dim() as f64)
    }
}

/// Amplitudes `(A, B)` of `A|u⟩ + B|ω⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceState<T> {
    pub a_perp: Complex<T>,
    pub a_target: Complex<T>,
}

impl<T: Real> SubspaceState<T> {
    pub fn new(a_perp: Complex<T>, a_target: Complex<T>) -> Self {
        Self { a_perp, a_target }
    }

    pub fn norm_sqr(&self) -> T {
        self.a_perp.norm_sqr() + self.a_target.norm_sqr()
    }
}

/// Matrix of `K(β)V(α)` restricted to the `(|u⟩, |ω⟩)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix<T> {
    pub m: [[Complex<T>; 2]; 2],
    pub size: SearchSize,
}

impl<T: Real> TransferMatrix<T> {
    pub fn identity(size: SearchSize) -> Self {
        let (o, z) = (
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        );
        Self {
            m: [[o, z], [z, o]],
            size,
        }
    }

    pub fn apply(&self, s: &SubspaceState<T>) -> SubspaceState<T> {
        let m = &self.m;
        SubspaceState {
            a_perp: m[0][0] * s.a_perp + m[0][1] * s.a_target,
            a_target: m[1][0] * s.a_perp + m[1][1] * s.a_target,
        }
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self {
            m: out,
            size: self.size,
        }
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Largest entrywise deviation of `M†M` from the identity.
    pub fn unitarity_error(&self) -> T {
        let m = &self.m;
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let g = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g - re(target)).norm());
            }
        }
        worst
    }
}

/// Grover rotation angle φ with `cos φ = 1 − 2/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverAngle<T> {
    pub phi: T,
}

/// The uniform superposition `(cos(φ/2), sin(φ/2))`.
pub fn initial_state<T: Real>(size: SearchSize) -> SubspaceState<T> {
    let n: T = size.dim_real();
    SubspaceState {
        a_perp: re(((n - T::one()) / n).sqrt()),
        a_target: re(n.sqrt().recip()),
    }
}

/// One step `K(β)V(α)` expanded on `span{|u⟩, |ω⟩}`.
///
/// With `a = e^{iα} − 1`, `b = e^{iβ} − 1` and `r = √(N−1)`:
///
/// ```text
/// [ 1 + b(N−1)/N    (1+a)·b·r/N   ]
/// [ b·r/N           (1+a)(1 + b/N) ]
/// ```
pub fn transfer_matrix<T: Real>(angles: StepAngles<T>, size: SearchSize) -> TransferMatrix<T> {
    let n: T = size.dim_real();
    let one = re(T::one());
    let ea = cis(angles.alpha());
    let b = cis(angles.beta()) - one;
    let r = (n - T::one()).sqrt();
    let inv_n = n.recip();

    TransferMatrix {
        m: [
            [one + b * ((n - T::one()) * inv_n), ea * b * (r * inv_n)],
            [b * (r * inv_n), ea * (one + b * inv_n)],
        ],
        size,
    }
}

pub fn apply_schedule<T: Real>(
    state: SubspaceState<T>,
    schedule: &AngleSchedule<T>,
    size: SearchSize,
) -> SubspaceState<T> {
    schedule
        .steps()
        .iter()
        .fold(state, |s, &step| transfer_matrix(step, size).apply(&s))
}

pub fn success_probability<T: Real>(state: &SubspaceState<T>) -> T {
    state.a_target.norm_sqr()
}

/// `⟨φ|P_ω⊥|φ⟩` for the state prepared by `schedule` from `|s⟩`.
pub fn cost<T: Real>(schedule: &AngleSchedule<T>, size: SearchSize) -> T {
    let s = apply_schedule(initial_state(size), schedule, size);
    // 1 − |B|² loses digits near 1; |A|² is the same quantity for a unit vector.
    let norm = s.norm_sqr();
    s.a_perp.norm_sqr() / norm
}

pub fn grover_angle<T: Real>(size: SearchSize) -> GroverAngle<T> {
    // sin(φ/2) = 1/√N keeps full precision when N is large, unlike acos(1 − 2/N).
    let n: T = size.dim_real();
    GroverAngle {
        phi: T::lit(2.0) * n.sqrt().recip().asin(),
    }
}

/// `sin²(pφ + φ/2)`; exact for every N, not only asymptotically.
pub fn grover_probability<T: Real>(p: u64, size: SearchSize) -> T {
    let phi = grover_angle::<T>(size).phi;
    let k = T::lit(p as f64) + T::lit(0.5);
    let s = (k * phi).sin();
    s * s
}

/// Oracle-call count maximizing [`grover_probability`], ties toward fewer calls.
pub fn grover_pmax(size: SearchSize) -> u64 {
    let n = size.dim() as f64;
    let guess = (std::f64::consts::PI * n.sqrt() / 4.0 - 0.5)
        .floor()
        .max(0.0) as u64;
    let lo = grover_probability::<f64>(guess, size);
    let hi = grover_probability::<f64>(guess + 1, size);
    // Ties (N = 2) resolve to the smaller count despite rounding.
    if hi > lo + 1e-12 {
        guess + 1
    } else {
        guess
    }
}

/// Success probability after `p` explicit applications of the Grover rotation
/// `[[c, −s], [s, c]]`, `c = 1 − 2/N`, `s = 2√(N−1)/N`.
pub fn grover_prob_by_iteration<T: Real>(p: u64, size: SearchSize) -> T {
    let n: T = size.dim_real();
    let two = T::lit(2.0);
    let c = T::one() - two / n;
    let s = two * (n - T::one()).sqrt() / n;
    let mut a = ((n - T::one()) / n).sqrt();
    let mut b = n.sqrt().recip();
    for _ in 0..p {
        let (na, nb) = (c * a - s * b, s * a + c * b);
        a = na;
        b = nb;
    }
    b * b
}
