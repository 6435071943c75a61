//! Gate-level circuits over the native set `{RZ(θ), RX(±π/2), CZ}`.
//!
//! Qubit `q` is bit `q` of a basis index (little-endian). Bitstrings are
//! big-endian, so `ωᵢ` (`i = 1..n`) lives on qubit `n − i`.
//!
//! Text form, one gate per line:
//!
//! ```text
//! RZ q0 0.7853981633974483
//! RX q1 +pi/2
//! CZ q0 q2
//! ```

mod compile;
mod unitary;

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use compile::{
    build_diffusion_circuit, build_oracle_circuit, build_search_circuit, compile_mcphase,
    decompose_mcphase, MAX_CIRCUIT_QUBITS,
};
pub(crate) use unitary::gate_matrix_1q;
pub use unitary::{
    apply_gate, circuit_unitary, diffusion_unitary, oracle_unitary, phase_distance, DenseMatrix,
    MAX_UNITARY_QUBITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RxSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<T> {
    Rz {
        qubit: usize,
        theta: T,
    },
    /// `RX(±π/2)`.
    Rx {
        qubit: usize,
        sign: RxSign,
    },
    Cz {
        a: usize,
        b: usize,
    },
}

impl<T> Gate<T> {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rz { qubit, .. } | Gate::Rx { qubit, .. } => vec![qubit],
            Gate::Cz { a, b } => vec![a, b],
        }
    }
}

impl<T: Real> fmt::Display for Gate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Rz { qubit, theta } => write!(f, "RZ q{qubit} {theta}"),
            Gate::Rx { qubit, sign } => {
                let s = if *sign == RxSign::Plus { '+' } else { '-' };
                write!(f, "RX q{qubit} {s}pi/2")
            }
            Gate::Cz { a, b } => write!(f, "CZ q{a} q{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    n: usize,
    gates: Vec<Gate<T>>,
}

/// Gate counts by kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub rz: usize,
    pub rx: usize,
    pub cz: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.rz + self.rx + self.cz
    }
}

impl<T: Real> Circuit<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n {
                return Err(Error::InvalidConfig(format!(
                    "qubit q{q} outside a {}-qubit circuit",
                    self.n
                )));
            }
        }
        if let Gate::Cz { a, b } = gate {
            if a == b {
                return Err(Error::InvalidConfig(format!(
                    "CZ needs two distinct qubits, got q{a} twice"
                )));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other` (which must have the same width).
    pub fn extend(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::Rz { .. } => c.rz += 1,
                Gate::Rx { .. } => c.rx += 1,
                Gate::Cz { .. } => c.cz += 1,
            }
        }
        c
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text form produced by [`Circuit::to_text`]. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut c = Self::new(n);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad =
                || Error::InvalidConfig(format!("line {}: cannot parse gate {line:?}", lineno + 1));
            let qubit = |tok: &str| -> Result<usize> {
                tok.strip_prefix('q')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(bad)
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let gate = match toks.as_slice() {
                ["RZ", q, theta] => Gate::Rz {
                    qubit: qubit(q)?,
                    theta: theta.parse::<f64>().map(T::lit).map_err(|_| bad())?,
                },
                ["RX", q, "+pi/2"] => Gate::Rx {
                    qubit: qubit(q)?,
                    sign: RxSign::Plus,
                },
                ["RX", q, "-pi/2"] => Gate::Rx {
                    qubit: qubit(q)?,
                    sign: RxSign::Minus,
                },
                ["CZ", a, b] => Gate::Cz {
                    a: qubit(a)?,
                    b: qubit(b)?,
                },
                _ => return Err(bad()),
            };
            c.push(gate)?;
        }
        Ok(c)
    }
}

/// Qubit holding bit `ωᵢ` (1-based, big-endian) of an `n`-bit string.
pub fn qubit_of_bit(n: usize, i: usize) -> usize {
    assert!((1..=n).contains(&i));
    n - i
}
