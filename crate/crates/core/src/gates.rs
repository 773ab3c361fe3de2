//! Unitary gates, their embedding into n-qubit space, and Pauli observables.
//!
//! Qubits are numbered from 1. Qubit 1 is the leftmost tensor factor, so the
//! basis state `|q1 q2 … qn⟩` has index `Σ q_i 2^(n−i)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::subspace::{is_unitary, ToleranceConfig};

/// Pauli direction of an atom or a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Z,
    X,
    Y,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Z, Axis::X, Axis::Y];

    pub fn letter(self) -> char {
        match self {
            Axis::Z => 'z',
            Axis::X => 'x',
            Axis::Y => 'y',
        }
    }

    pub fn from_letter(c: char) -> Option<Axis> {
        match c {
            'z' => Some(Axis::Z),
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            _ => None,
        }
    }

    /// Name of the builtin gate implementing this Pauli.
    pub fn pauli_gate(self) -> &'static str {
        match self {
            Axis::Z => "Z",
            Axis::X => "X",
            Axis::Y => "Y",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The 2x2 Pauli matrix for `axis`.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    let rows = match axis {
        Axis::Z => [[c(1.0, 0.0), ZERO], [ZERO, c(-1.0, 0.0)]],
        Axis::X => [[ZERO, c(1.0, 0.0)], [c(1.0, 0.0), ZERO]],
        Axis::Y => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
    };
    ComplexMatrix::from_rows(&rows.map(|r| r.to_vec())).expect("2x2")
}

/// Normalized −1 eigenvector of the Pauli for `axis`: `|1⟩`, `(|0⟩−|1⟩)/√2`, `(|0⟩−i|1⟩)/√2`.
pub fn minus_eigenvector(axis: Axis) -> [C64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match axis {
        Axis::Z => [ZERO, c(1.0, 0.0)],
        Axis::X => [c(s, 0.0), c(-s, 0.0)],
        Axis::Y => [c(s, 0.0), c(0.0, -s)],
    }
}

/// A named unitary on `arity` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub arity: usize,
    pub matrix: ComplexMatrix,
}

impl GateDef {
    /// Builds a gate from a `2^a x 2^a` matrix, checking unitarity.
    pub fn new(name: impl Into<String>, matrix: ComplexMatrix, tol: ToleranceConfig) -> Result<Self> {
        let dim = matrix.rows();
        if !matrix.is_square() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                found: matrix.cols(),
            });
        }
        if !validate_unitary(&matrix, tol) {
            return Err(Error::NotUnitary);
        }
        Ok(GateDef {
            name: name.into(),
            arity: dim.trailing_zeros() as usize,
            matrix,
        })
    }
}

/// Names accepted by [`builtin_gate`].
pub const BUILTIN_GATES: [&str; 8] = ["X", "Y", "Z", "H", "CNOT", "CZ", "SWAP", "TOFFOLI"];

/// Standard matrix for a builtin gate name.
pub fn builtin_gate(name: &str) -> Result<GateDef> {
    let one = c(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (arity, matrix) = match name {
        "X" => (1, pauli(Axis::X)),
        "Y" => (1, pauli(Axis::Y)),
        "Z" => (1, pauli(Axis::Z)),
        "H" => (
            1,
            ComplexMatrix::from_rows(&[vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]])?,
        ),
        "CNOT" => (2, permutation(4, &[0, 1, 3, 2])),
        "SWAP" => (2, permutation(4, &[0, 2, 1, 3])),
        "TOFFOLI" => (3, permutation(8, &[0, 1, 2, 3, 4, 5, 7, 6])),
        "CZ" => {
            let mut m = ComplexMatrix::identity(4);
            m[(3, 3)] = -one;
            (2, m)
        }
        other => return Err(Error::UnknownGate(other.to_string())),
    };
    Ok(GateDef {
        name: name.to_string(),
        arity,
        matrix,
    })
}

/// Permutation matrix sending `|i⟩` to `|images[i]⟩`.
fn permutation(dim: usize, images: &[usize]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, &j) in images.iter().enumerate() {
        m[(j, i)] = c(1.0, 0.0);
    }
    m
}

/// `true` iff `m` is square and `‖M†M − I‖_max ≤ eps_ortho`.
pub fn validate_unitary(m: &ComplexMatrix, tol: ToleranceConfig) -> bool {
    is_unitary(m, tol)
}

/// A gate placed on specific wires.
#[derive(Debug, Clone, PartialEq)]
pub struct GateApplication {
    pub gate: Arc<GateDef>,
    pub wires: Vec<usize>,
}

impl GateApplication {
    pub fn new(gate: Arc<GateDef>, wires: Vec<usize>) -> Result<Self> {
        if wires.len() != gate.arity {
            return Err(Error::ArityMismatch {
                gate: gate.name.clone(),
                arity: gate.arity,
                given: wires.len(),
            });
        }
        check_wires(&wires, usize::MAX)?;
        Ok(GateApplication { gate, wires })
    }

    /// Checks the wires against an `n`-qubit register.
    pub fn validate(&self, n: usize) -> Result<()> {
        check_wires(&self.wires, n)
    }
}

pub(crate) fn check_wires(wires: &[usize], n: usize) -> Result<()> {
    for (k, &w) in wires.iter().enumerate() {
        if w == 0 || w > n {
            return Err(Error::QubitOutOfRange { index: w, n });
        }
        if wires[..k].contains(&w) {
            return Err(Error::DuplicateWire(w));
        }
    }
    Ok(())
}

/// Full `2^n x 2^n` matrix of `app` acting on an `n`-qubit register.
pub fn embed(app: &GateApplication, n: usize) -> Result<ComplexMatrix> {
    app.validate(n)?;
    let mut m = ComplexMatrix::identity(1 << n);
    apply_local(&app.gate.matrix, &app.wires, n, &mut m);
    Ok(m)
}

/// Applies a `2^a x 2^a` gate on `wires` to every column of `states` in place,
/// without forming the full matrix. Wires must already be validated.
pub fn apply_local(gate: &ComplexMatrix, wires: &[usize], n: usize, states: &mut ComplexMatrix) {
    let a = wires.len();
    let local = 1usize << a;
    debug_assert_eq!(gate.rows(), local);
    debug_assert_eq!(states.rows(), 1 << n);

    // global index offset of each local basis state; wires[0] is the local MSB
    let offsets: Vec<usize> = (0..local)
        .map(|s| {
            wires
                .iter()
                .enumerate()
                .filter(|(t, _)| (s >> (a - 1 - t)) & 1 == 1)
                .map(|(_, &w)| 1usize << (n - w))
                .sum()
        })
        .collect();
    let mask: usize = offsets[local - 1];
    let bases: Vec<usize> = (0..1usize << n).filter(|i| i & mask == 0).collect();

    let mut gathered = vec![ZERO; local];
    for col in states.columns_mut() {
        for &base in &bases {
            for (s, g) in gathered.iter_mut().enumerate() {
                *g = col[base + offsets[s]];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (s, &g) in gathered.iter().enumerate() {
                    acc += gate[(r, s)] * g;
                }
                col[base + off] = acc;
            }
        }
    }
}

/// Name-indexed set of gates: the builtins plus any custom definitions.
#[derive(Debug, Clone)]
pub struct GateRegistry {
    gates: BTreeMap<String, Arc<GateDef>>,
}

impl Default for GateRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl GateRegistry {
    pub fn builtin() -> Self {
        let gates = BUILTIN_GATES
            .iter()
            .map(|&name| (name.to_string(), Arc::new(builtin_gate(name).expect("builtin"))))
            .collect();
        GateRegistry { gates }
    }

    /// Adds or replaces a gate definition.
    pub fn register(&mut self, gate: GateDef) -> Arc<GateDef> {
        let gate = Arc::new(gate);
        self.gates.insert(gate.name.clone(), Arc::clone(&gate));
        gate
    }

    pub fn get(&self, name: &str) -> Result<Arc<GateDef>> {
        self.gates
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownGate(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.gates.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<GateDef>> {
        self.gates.values()
    }

    /// Resolves `name` and checks the wire list against an `n`-qubit register.
    pub fn application(&self, name: &str, wires: &[usize], n: usize) -> Result<GateApplication> {
        let app = GateApplication::new(self.get(name)?, wires.to_vec())?;
        app.validate(n)?;
        Ok(app)
    }
}
