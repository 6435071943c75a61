//! Compilation of the oracle and diffusion phase operators into native gates.
//!
//! Multi-controlled phases use the ancilla-free construction
//!
//! ```text
//! CᵏP(θ) = CP(θ/2)[c_k,t] · Cᵏ⁻¹X[c_1..c_{k-1} → c_k] · CP(−θ/2)[c_k,t]
//!          · Cᵏ⁻¹X[c_1..c_{k-1} → c_k] · Cᵏ⁻¹P(θ/2)[c_1..c_{k-1}, t]
//! ```
//!
//! where the multi-controlled NOTs borrow the phase target as a dirty
//! ancilla and are expanded into Toffolis with a linear count, so the total
//! is quadratic in the number of controls. Intermediate gates (H, X, P(θ),
//! CNOT) are lowered as
//!
//! - `H ≅ RZ(π/2)·RX(π/2)·RZ(π/2)`
//! - `X ≅ RX(π/2)·RX(π/2)`
//! - `P(θ) ≅ RZ(θ)`
//! - `CNOT = H_t · CZ · H_t`
//!
//! each up to a global phase.

use super::{Circuit, Gate, RxSign};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schedule::AngleSchedule;
use crate::statevector::SearchInstance;

/// Widest register the compiler accepts for oracle/diffusion/search circuits.
pub const MAX_CIRCUIT_QUBITS: u32 = 5;
const MAX_CONTROLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op<T> {
    H(usize),
    X(usize),
    Phase(usize, T),
    Cz(usize, usize),
}

impl<T: Copy> Op<T> {
    fn touches(&self, q: usize) -> bool {
        match *self {
            Op::H(a) | Op::X(a) | Op::Phase(a, _) => a == q,
            Op::Cz(a, b) => a == q || b == q,
        }
    }

    fn shares_qubit(&self, other: &Op<T>) -> bool {
        match *other {
            Op::H(a) | Op::X(a) | Op::Phase(a, _) => self.touches(a),
            Op::Cz(a, b) => self.touches(a) || self.touches(b),
        }
    }

    fn is_diagonal(&self) -> bool {
        matches!(self, Op::Phase(..) | Op::Cz(..))
    }
}

fn is_zero_angle<T: Real>(theta: T) -> bool {
    let w = theta.wrap_angle();
    let eps = T::lit(1e-12);
    w < eps || w > T::two_pi() - eps
}

/// Intermediate op list with greedy peephole cancellation on push.
#[derive(Debug, Default)]
struct Builder<T> {
    ops: Vec<Op<T>>,
}

impl<T: Real> Builder<T> {
    fn new() -> Self {
        Self { ops: Vec::new() }
    }

    /// Pushes `op`, cancelling it against the nearest earlier op it meets
    /// (`HH = XX = 1`, `P(a)P(b) = P(a+b)`, `CZ·CZ = 1`). Diagonal ops commute
    /// with each other, so the backward scan skips over them.
    fn push(&mut self, op: Op<T>) {
        for k in (0..self.ops.len()).rev() {
            let prev = self.ops[k];
            if !prev.shares_qubit(&op) {
                continue;
            }
            match (prev, op) {
                (Op::H(a), Op::H(b)) | (Op::X(a), Op::X(b)) if a == b => {
                    self.ops.remove(k);
                    return;
                }
                (Op::Phase(a, x), Op::Phase(b, y)) if a == b => {
                    let merged = x + y;
                    if is_zero_angle(merged) {
                        self.ops.remove(k);
                    } else {
                        self.ops[k] = Op::Phase(a, merged);
                    }
                    return;
                }
                (Op::Cz(a, b), Op::Cz(c, d)) if (a == c && b == d) || (a == d && b == c) => {
                    self.ops.remove(k);
                    return;
                }
                _ if prev.is_diagonal() && op.is_diagonal() => continue,
                _ => break,
            }
        }
        if let Op::Phase(_, theta) = op {
            if is_zero_angle(theta) {
                return;
            }
        }
        self.ops.push(op);
    }

    fn h(&mut self, q: usize) {
        self.push(Op::H(q));
    }

    fn x(&mut self, q: usize) {
        self.push(Op::X(q));
    }

    fn phase(&mut self, q: usize, theta: T) {
        self.push(Op::Phase(q, theta));
    }

    fn cz(&mut self, a: usize, b: usize) {
        self.push(Op::Cz(a, b));
    }

    fn cnot(&mut self, c: usize, t: usize) {
        self.h(t);
        self.cz(c, t);
        self.h(t);
    }

    /// diag(1, 1, 1, e^{iθ}) on (c, t).
    fn cphase(&mut self, c: usize, t: usize, theta: T) {
        let half = theta * T::lit(0.5);
        self.phase(c, half);
        self.phase(t, half);
        self.cnot(c, t);
        self.phase(t, -half);
        self.cnot(c, t);
    }

    fn toffoli(&mut self, a: usize, b: usize, t: usize) {
        let quarter = T::FRAC_PI_4();
        self.h(t);
        self.cnot(b, t);
        self.phase(t, -quarter);
        self.cnot(a, t);
        self.phase(t, quarter);
        self.cnot(b, t);
        self.phase(t, -quarter);
        self.cnot(a, t);
        self.phase(b, quarter);
        self.phase(t, quarter);
        self.h(t);
        self.cnot(a, b);
        self.phase(a, quarter);
        self.phase(b, -quarter);
        self.cnot(a, b);
    }

    /// Multi-controlled NOT borrowing `dirty` qubits (restored afterwards).
    fn mcx(&mut self, controls: &[usize], target: usize, dirty: &[usize]) -> Result<()> {
        let m = controls.len();
        match m {
            0 => self.x(target),
            1 => self.cnot(controls[0], target),
            2 => self.toffoli(controls[0], controls[1], target),
            _ if dirty.len() >= m - 2 => self.mcx_ladder(controls, target, &dirty[..m - 2])?,
            _ if !dirty.is_empty() => {
                // Split in two halves; each half borrows the other as ancillas.
                let a = dirty[0];
                let m1 = m.div_ceil(2);
                let (first, second) = controls.split_at(m1);
                let mut first_dirty: Vec<usize> = second.to_vec();
                first_dirty.push(target);
                let mut second_controls: Vec<usize> = second.to_vec();
                second_controls.push(a);
                for _ in 0..2 {
                    self.mcx(first, a, &first_dirty)?;
                    self.mcx(&second_controls, target, first)?;
                }
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "{m}-controlled NOT needs at least one borrowed qubit"
                )))
            }
        }
        Ok(())
    }

    /// `4(m − 2)` Toffolis with `m − 2` dirty ancillas.
    fn mcx_ladder(&mut self, c: &[usize], target: usize, a: &[usize]) -> Result<()> {
        let m = c.len();
        let top = |b: &mut Self| b.toffoli(c[m - 1], a[m - 3], target);
        let down = |b: &mut Self| {
            for i in (3..m).rev() {
                b.toffoli(c[i - 1], a[i - 3], a[i - 2]);
            }
        };
        let up = |b: &mut Self| {
            for i in 3..m {
                b.toffoli(c[i - 1], a[i - 3], a[i - 2]);
            }
        };
        let bottom = |b: &mut Self| b.toffoli(c[0], c[1], a[0]);
        for _ in 0..2 {
            top(self);
            down(self);
            bottom(self);
            up(self);
        }
        Ok(())
    }

    /// Phase `e^{iθ}` on the all-ones state of `controls ∪ {target}`.
    fn mcphase(&mut self, controls: &[usize], target: usize, theta: T) -> Result<()> {
        let half = theta * T::lit(0.5);
        match controls {
            [] => self.phase(target, theta),
            [c] => self.cphase(*c, target, theta),
            [rest @ .., last] => {
                self.cphase(*last, target, half);
                self.mcx(rest, *last, &[target])?;
                self.cphase(*last, target, -half);
                self.mcx(rest, *last, &[target])?;
                self.mcphase(rest, target, half)?;
            }
        }
        Ok(())
    }

    fn lower(self, n: usize) -> Result<Circuit<T>> {
        let half_pi = T::FRAC_PI_2();
        let mut c = Circuit::new(n);
        let plus = |qubit| Gate::Rx {
            qubit,
            sign: RxSign::Plus,
        };
        for op in self.ops {
            match op {
                Op::H(q) => {
                    push_native(
                        &mut c,
                        Gate::Rz {
                            qubit: q,
                            theta: half_pi,
                        },
                    )?;
                    push_native(&mut c, plus(q))?;
                    push_native(
                        &mut c,
                        Gate::Rz {
                            qubit: q,
                            theta: half_pi,
                        },
                    )?;
                }
                Op::X(q) => {
                    push_native(&mut c, plus(q))?;
                    push_native(&mut c, plus(q))?;
                }
                Op::Phase(q, theta) => push_native(&mut c, Gate::Rz { qubit: q, theta })?,
                Op::Cz(a, b) => push_native(&mut c, Gate::Cz { a, b })?,
            }
        }
        Ok(c)
    }
}

/// Appends a native gate, folding an `RZ` into the nearest earlier `RZ` on
/// the same qubit when only diagonal gates separate them.
fn push_native<T: Real>(c: &mut Circuit<T>, gate: Gate<T>) -> Result<()> {
    if let Gate::Rz { qubit, theta } = gate {
        for k in (0..c.gates.len()).rev() {
            match c.gates[k] {
                Gate::Rz {
                    qubit: q,
                    theta: prev,
                } if q == qubit => {
                    let merged = prev + theta;
                    if is_zero_angle(merged) {
                        c.gates.remove(k);
                    } else {
                        c.gates[k] = Gate::Rz {
                            qubit,
                            theta: merged,
                        };
                    }
                    return Ok(());
                }
                Gate::Rx { qubit: q, .. } if q == qubit => break,
                _ => continue,
            }
        }
        if is_zero_angle(theta) {
            return Ok(());
        }
    }
    c.push(gate)
}

fn check_width(n: u32) -> Result<()> {
    if (2..=MAX_CIRCUIT_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            n,
            min: 2,
            max: MAX_CIRCUIT_QUBITS,
        })
    }
}

/// `diag(1, …, 1, e^{iθ})` on `k + 1` qubits (controls `q0..q{k-1}`, target
/// `qk`), up to global phase. `θ ≡ 0` yields an empty circuit.
pub fn decompose_mcphase<T: Real>(controls: usize, theta: T) -> Result<Circuit<T>> {
    if !(1..=MAX_CONTROLS).contains(&controls) {
        return Err(Error::InvalidConfig(format!(
            "multi-controlled phase supports 1..={MAX_CONTROLS} controls, got {controls}"
        )));
    }
    compile_mcphase(controls, theta)
}

/// As [`decompose_mcphase`] without the width limit; used for gate-count
/// scaling studies where no dense verification is needed.
pub fn compile_mcphase<T: Real>(controls: usize, theta: T) -> Result<Circuit<T>> {
    if controls >= 63 {
        return Err(Error::InvalidConfig(format!(
            "{controls} controls is too many"
        )));
    }
    let mut b = Builder::new();
    if !is_zero_angle(theta) {
        let qs: Vec<usize> = (0..controls).collect();
        b.mcphase(&qs, controls, theta)?;
    }
    b.lower(controls + 1)
}

fn oracle_ops<T: Real>(b: &mut Builder<T>, instance: &SearchInstance, alpha: T) -> Result<()> {
    let n = instance.qubits() as usize;
    let flips: Vec<usize> = (0..n)
        .filter(|&q| (instance.omega() >> q) & 1 == 0)
        .collect();
    for &q in &flips {
        b.x(q);
    }
    let controls: Vec<usize> = (1..n).collect();
    b.mcphase(&controls, 0, alpha)?;
    for &q in &flips {
        b.x(q);
    }
    Ok(())
}

fn diffusion_ops<T: Real>(b: &mut Builder<T>, n: usize, beta: T) -> Result<()> {
    for q in 0..n {
        b.h(q);
        b.x(q);
    }
    let controls: Vec<usize> = (1..n).collect();
    b.mcphase(&controls, 0, beta)?;
    for q in 0..n {
        b.x(q);
        b.h(q);
    }
    Ok(())
}

/// `V(α) = 1 + (e^{iα} − 1)|ω⟩⟨ω|`: X-conjugation on the zero bits of `ω`
/// around an `(n−1)`-controlled phase.
pub fn build_oracle_circuit<T: Real>(instance: &SearchInstance, alpha: T) -> Result<Circuit<T>> {
    check_width(instance.qubits())?;
    let mut b = Builder::new();
    oracle_ops(&mut b, instance, alpha)?;
    b.lower(instance.qubits() as usize)
}

/// `K(β) = 1 + (e^{iβ} − 1)|s⟩⟨s|`: H·X conjugation around an
/// `(n−1)`-controlled phase.
pub fn build_diffusion_circuit<T: Real>(beta: T, n: u32) -> Result<Circuit<T>> {
    check_width(n)?;
    let mut b = Builder::new();
    diffusion_ops(&mut b, n as usize, beta)?;
    b.lower(n as usize)
}

/// Full search from `|0…0⟩`: a Hadamard layer preparing `|s⟩`, then
/// `V(α_i)` and `K(β_i)` for every step.
pub fn build_search_circuit<T: Real>(
    instance: &SearchInstance,
    schedule: &AngleSchedule<T>,
) -> Result<Circuit<T>> {
    check_width(instance.qubits())?;
    let n = instance.qubits() as usize;
    let mut b = Builder::new();
    for q in 0..n {
        b.h(q);
    }
    for step in schedule.steps() {
        oracle_ops(&mut b, instance, step.alpha())?;
        diffusion_ops(&mut b, n, step.beta())?;
    }
    b.lower(n)
}

#[cfg(test)]
mod tests {
    use super::super::{
        circuit_unitary, diffusion_unitary, oracle_unitary, phase_distance, DenseMatrix,
    };
    use super::*;
    use num_complex::Complex;
    use std::f64::consts::PI;

    fn ops_unitary(b: Builder<f64>, n: usize) -> DenseMatrix<f64> {
        circuit_unitary(&b.lower(n).unwrap()).unwrap()
    }

    fn mcphase_target(qubits: usize, theta: f64) -> DenseMatrix<f64> {
        let dim = 1 << qubits;
        let mut m = DenseMatrix::identity(dim);
        m.set(dim - 1, dim - 1, Complex::new(theta.cos(), theta.sin()));
        m
    }

    /// Permutation matrix flipping `target` when all `controls` are set.
    fn mcx_target(n: usize, controls: &[usize], target: usize) -> DenseMatrix<f64> {
        let dim = 1 << n;
        let mut m = DenseMatrix::zeros(dim);
        for j in 0..dim {
            let i = if controls.iter().all(|&c| (j >> c) & 1 == 1) {
                j ^ (1 << target)
            } else {
                j
            };
            m.set(i, j, Complex::new(1.0, 0.0));
        }
        m
    }

    #[test]
    fn hadamard_lowering() {
        let mut b = Builder::<f64>::new();
        b.h(0);
        let u = ops_unitary(b, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut expected = DenseMatrix::zeros(2);
        expected.set(0, 0, Complex::new(h, 0.0));
        expected.set(0, 1, Complex::new(h, 0.0));
        expected.set(1, 0, Complex::new(h, 0.0));
        expected.set(1, 1, Complex::new(-h, 0.0));
        assert!(phase_distance(&u, &expected) < 1e-14);
    }

    #[test]
    fn toffoli_and_cnot_are_exact() {
        let mut b = Builder::<f64>::new();
        b.cnot(1, 0);
        assert!(phase_distance(&ops_unitary(b, 2), &mcx_target(2, &[1], 0)) < 1e-13);
        let mut b = Builder::<f64>::new();
        b.toffoli(0, 2, 1);
        assert!(phase_distance(&ops_unitary(b, 3), &mcx_target(3, &[0, 2], 1)) < 1e-13);
    }

    #[test]
    fn ladder_and_split_mcx_with_dirty_ancillas() {
        // 3 controls, one dirty ancilla (ladder).
        let mut b = Builder::<f64>::new();
        b.mcx(&[0, 1, 2], 3, &[4]).unwrap();
        assert!(phase_distance(&ops_unitary(b, 5), &mcx_target(5, &[0, 1, 2], 3)) < 1e-12);
        // 4 controls, one dirty ancilla (split).
        let mut b = Builder::<f64>::new();
        b.mcx(&[0, 1, 2, 3], 4, &[5]).unwrap();
        let u = ops_unitary(b, 6);
        assert!(phase_distance(&u, &mcx_target(6, &[0, 1, 2, 3], 4)) < 1e-11);
    }

    #[test]
    fn controlled_phase_matches_target() {
        for &theta in &[0.3, PI, -1.7, 2.0 * PI - 0.01] {
            let u = circuit_unitary(&decompose_mcphase(1, theta).unwrap()).unwrap();
            assert!(phase_distance(&u, &mcphase_target(2, theta)) < 1e-12);
        }
    }

    #[test]
    fn doubly_controlled_quarter_phase() {
        let u = circuit_unitary(&decompose_mcphase(2, PI / 4.0).unwrap()).unwrap();
        assert!(phase_distance(&u, &mcphase_target(3, PI / 4.0)) < 1e-12);
    }

    #[test]
    fn mcphase_all_supported_widths() {
        for k in 1..=4 {
            for &theta in &[0.1, 1.0, PI, 4.5] {
                let u = circuit_unitary(&decompose_mcphase(k, theta).unwrap()).unwrap();
                let d = phase_distance(&u, &mcphase_target(k + 1, theta));
                assert!(d < 1e-9, "k={k} theta={theta} d={d}");
            }
        }
    }

    #[test]
    fn zero_phase_is_empty() {
        for k in 1..=4 {
            assert!(decompose_mcphase(k, 0.0f64).unwrap().is_empty());
        }
        assert!(decompose_mcphase(0, 1.0f64).is_err());
        assert!(decompose_mcphase(5, 1.0f64).is_err());
    }

    #[test]
    fn oracle_examples() {
        let w = SearchInstance::from_bitstring("11").unwrap();
        let u = circuit_unitary(&build_oracle_circuit(&w, PI).unwrap()).unwrap();
        let mut expected = DenseMatrix::identity(4);
        expected.set(3, 3, Complex::new(-1.0, 0.0));
        assert!(phase_distance(&u, &expected) < 1e-12);

        let w = SearchInstance::from_bitstring("101").unwrap();
        let u = circuit_unitary(&build_oracle_circuit(&w, PI).unwrap()).unwrap();
        assert!(phase_distance(&u, &oracle_unitary(5, PI, 3)) < 1e-12);
        // The −1 sits at index 0b101 and nowhere else.
        let phase = u.get(0, 0);
        for i in 0..8 {
            let expected = if i == 5 { -phase } else { phase };
            assert!((u.get(i, i) - expected).norm() < 1e-12);
        }

        let c = build_oracle_circuit(&w, 0.0).unwrap();
        let u = circuit_unitary(&c).unwrap();
        assert!(phase_distance(&u, &DenseMatrix::identity(8)) < 1e-12);
    }

    #[test]
    fn diffusion_examples() {
        let u = circuit_unitary(&build_diffusion_circuit(0.0f64, 3).unwrap()).unwrap();
        assert!(phase_distance(&u, &DenseMatrix::identity(8)) < 1e-12);

        let u = circuit_unitary(&build_diffusion_circuit(PI, 3).unwrap()).unwrap();
        let mut reflection = DenseMatrix::zeros(8);
        for i in 0..8 {
            for j in 0..8 {
                let v = 2.0 / 8.0 - if i == j { 1.0 } else { 0.0 };
                reflection.set(i, j, Complex::new(v, 0.0));
            }
        }
        assert!(phase_distance(&u, &reflection) < 1e-12);
    }

    #[test]
    fn diffusion_matches_statevector_on_basis_states() {
        use crate::statevector::StateVector;
        let u = circuit_unitary(&build_diffusion_circuit(PI, 2).unwrap()).unwrap();
        // Fix the global phase from one column, then compare every column.
        let mut reference = Vec::new();
        for j in 0..4 {
            let mut amps = vec![Complex::new(0.0, 0.0); 4];
            amps[j] = Complex::new(1.0, 0.0);
            let mut sv = StateVector::from_amplitudes(amps).unwrap();
            sv.apply_diffusion_phase(PI);
            reference.push(sv.amplitudes().to_vec());
        }
        let phase = u.get(0, 0) / reference[0][0];
        for (j, col) in reference.iter().enumerate() {
            for (i, amp) in col.iter().enumerate() {
                assert!((u.get(i, j) - phase * amp).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn width_limits() {
        assert!(build_diffusion_circuit(1.0f64, 1).is_err());
        assert!(build_diffusion_circuit(1.0f64, 6).is_err());
        let w = SearchInstance::from_bitstring("110010").unwrap();
        assert!(build_oracle_circuit(&w, 1.0f64).is_err());
    }

    #[test]
    fn search_circuit_reproduces_reference_product() {
        let w = SearchInstance::from_bitstring("110").unwrap();
        let sched = AngleSchedule::from_pairs(&[(2.0, 1.0), (0.5, 3.0)]);
        let u = circuit_unitary(&build_search_circuit(&w, &sched).unwrap()).unwrap();
        let mut hadamards = DenseMatrix::zeros(8);
        let amp = 8f64.sqrt().recip();
        for i in 0..8usize {
            for j in 0..8 {
                let sign = if (i & j).count_ones() % 2 == 1 {
                    -amp
                } else {
                    amp
                };
                hadamards.set(i, j, Complex::new(sign, 0.0));
            }
        }
        let mut expected = hadamards;
        for step in sched.steps() {
            expected = oracle_unitary(w.omega(), step.alpha(), 3).mul(&expected);
            expected = diffusion_unitary(step.beta(), 3).mul(&expected);
        }
        assert!(phase_distance(&u, &expected) < 1e-11);
    }
}
