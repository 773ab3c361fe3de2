//! Brute-force state-vector simulation, written against basis-state bit
//! manipulation only so it shares no code with the library's gate matrices
//! or subspace routines. Qubit 1 is the most significant bit.

use qlv::gates::Axis;
use qlv::linalg::C64;
use qlv::{Term, TermKind};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn bit(n: usize, q: usize) -> usize {
    1 << (n - q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub n: usize,
    pub amps: Vec<C64>,
}

impl State {
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        State { n, amps }
    }

    /// Product state from one single-qubit state per qubit, qubit 1 first.
    pub fn product(qubits: &[[C64; 2]]) -> Self {
        let n = qubits.len();
        let amps = (0..1usize << n)
            .map(|idx| {
                (1..=n).fold(ONE, |acc, q| acc * qubits[q - 1][usize::from(idx & bit(n, q) != 0)])
            })
            .collect();
        State { n, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &State) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.amps.iter_mut().for_each(|a| *a *= c);
        self
    }

    pub fn plus(&self, other: &State) -> Self {
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        State { n: self.n, amps }
    }

    pub fn max_diff(&self, other: &State) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Applies the 2x2 matrix `m` (row-major) to qubit `q`.
    pub fn apply_1q(&mut self, m: [[C64; 2]; 2], q: usize) {
        let b = bit(self.n, q);
        for idx in (0..self.amps.len()).filter(|i| i & b == 0) {
            let (a0, a1) = (self.amps[idx], self.amps[idx | b]);
            self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[idx | b] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Applies `m` to qubit `t` on the basis states where all `controls` are 1.
    pub fn apply_controlled(&mut self, controls: &[usize], m: [[C64; 2]; 2], t: usize) {
        let mask: usize = controls.iter().map(|&c| bit(self.n, c)).sum();
        let b = bit(self.n, t);
        for idx in (0..self.amps.len()).filter(|i| i & b == 0 && i & mask == mask) {
            let (a0, a1) = (self.amps[idx], self.amps[idx | b]);
            self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[idx | b] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_gate(&mut self, name: &str, wires: &[usize]) {
        match (name, wires) {
            ("X" | "Y" | "Z" | "H", &[q]) => self.apply_1q(single(name), q),
            ("CNOT", &[c, t]) => self.apply_controlled(&[c], single("X"), t),
            ("CZ", &[c, t]) => self.apply_controlled(&[c], single("Z"), t),
            ("TOFFOLI", &[c1, c2, t]) => self.apply_controlled(&[c1, c2], single("X"), t),
            ("SWAP", &[a, b]) => {
                let (ba, bb) = (bit(self.n, a), bit(self.n, b));
                for idx in (0..self.amps.len()).filter(|i| i & ba != 0 && i & bb == 0) {
                    self.amps.swap(idx, idx ^ ba ^ bb);
                }
            }
            _ => panic!("oracle has no gate {name} on {wires:?}"),
        }
    }

    pub fn apply_pauli(&mut self, axis: Axis, q: usize) {
        self.apply_1q(single(axis.pauli_gate()), q);
    }

    /// Unnormalized projection onto outcome `outcome` of a z measurement.
    pub fn project_z(&self, q: usize, outcome: bool) -> State {
        let b = bit(self.n, q);
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| if (i & b != 0) == outcome { a } else { ZERO })
            .collect();
        State { n: self.n, amps }
    }

    /// Whether the state is a `-1` eigenvector of the Pauli on `q`.
    pub fn in_minus_eigenspace(&self, axis: Axis, q: usize, tol: f64) -> bool {
        let mut flipped = self.clone();
        flipped.apply_pauli(axis, q);
        flipped.plus(self).norm() <= tol * self.norm().max(1.0)
    }
}

pub fn single(name: &str) -> [[C64; 2]; 2] {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match name {
        "X" => [[ZERO, ONE], [ONE, ZERO]],
        "Y" => [[ZERO, -I], [I, ZERO]],
        "Z" => [[ONE, ZERO], [ZERO, -ONE]],
        "H" => [[s, s], [s, -s]],
        _ => panic!("no single-qubit gate {name}"),
    }
}

/// `(-1 eigenvector, +1 eigenvector)` of each Pauli.
pub fn eigenstates(axis: Axis) -> ([C64; 2], [C64; 2]) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match axis {
        Axis::Z => ([ZERO, ONE], [ONE, ZERO]),
        Axis::X => ([C64::new(s, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(s, 0.0)]),
        Axis::Y => ([C64::new(s, 0.0), C64::new(0.0, -s)], [C64::new(s, 0.0), C64::new(0.0, s)]),
    }
}

/// Dense `d x d` matrix, row-major.
#[derive(Debug, Clone)]
pub struct Dense {
    pub d: usize,
    pub a: Vec<C64>,
}

impl Dense {
    pub fn identity(d: usize) -> Self {
        let mut a = vec![ZERO; d * d];
        (0..d).for_each(|i| a[i * d + i] = ONE);
        Dense { d, a }
    }

    /// Matrix of a gate, column by column from its action on basis states.
    pub fn of_gate(name: &str, wires: &[usize], n: usize) -> Self {
        let d = 1 << n;
        let mut a = vec![ZERO; d * d];
        for col in 0..d {
            let mut s = State::basis(n, col);
            s.apply_gate(name, wires);
            (0..d).for_each(|row| a[row * d + col] = s.amps[row]);
        }
        Dense { d, a }
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let d = self.d;
        let mut a = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let x = self.a[i * d + k];
                if x != ZERO {
                    (0..d).for_each(|j| a[i * d + j] += x * o.a[k * d + j]);
                }
            }
        }
        Dense { d, a }
    }

    pub fn adjoint(&self) -> Dense {
        let d = self.d;
        let a = (0..d * d).map(|x| self.a[(x % d) * d + x / d].conj()).collect();
        Dense { d, a }
    }

    pub fn lin(&self, alpha: f64, o: &Dense, beta: f64) -> Dense {
        let a = self.a.iter().zip(&o.a).map(|(x, y)| x * alpha + y * beta).collect();
        Dense { d: self.d, a }
    }

    pub fn max_diff(&self, o: &Dense) -> f64 {
        self.a.iter().zip(&o.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Projector onto the `-1` eigenspace of the Pauli on `q`: `(I - σ) / 2`.
    pub fn atom_projector(axis: Axis, q: usize, n: usize) -> Dense {
        let d = 1 << n;
        let mut sigma = vec![ZERO; d * d];
        for col in 0..d {
            let mut s = State::basis(n, col);
            s.apply_pauli(axis, q);
            (0..d).for_each(|row| sigma[row * d + col] = s.amps[row]);
        }
        Dense::identity(d).lin(0.5, &Dense { d, a: sigma }, -0.5)
    }
}

/// Projector of a static term whose atoms act on pairwise distinct qubits
/// or share an axis, so every projector involved commutes and the Boolean
/// formulas `P∧Q = PQ`, `¬P = I - P`, `P⊻Q = P + Q - 2PQ` are exact.
pub fn commuting_projector(t: &Term, n: usize) -> Dense {
    let d = 1 << n;
    let id = Dense::identity(d);
    let rec = |s: &Term| commuting_projector(s, n);
    match &t.kind {
        TermKind::Atom(axis, q) => Dense::atom_projector(*axis, *q, n),
        TermKind::Top => id,
        TermKind::Bottom => id.lin(0.0, &id, 0.0),
        TermKind::Not(p) => id.lin(1.0, &rec(p), -1.0),
        TermKind::And(p, q) => rec(p).mul(&rec(q)),
        TermKind::Or(p, q) => {
            let (a, b) = (rec(p), rec(q));
            a.lin(1.0, &b, 1.0).lin(1.0, &a.mul(&b), -1.0)
        }
        TermKind::Imp(p, q) => commuting_projector(&Term::or(Term::not((**p).clone()), (**q).clone()), n),
        TermKind::Iff(p, q) => id.lin(1.0, &commuting_projector(&Term::xor((**p).clone(), (**q).clone()), n), -1.0),
        TermKind::Xor(p, q) => {
            let (a, b) = (rec(p), rec(q));
            a.lin(1.0, &b, 1.0).lin(1.0, &a.mul(&b), -2.0)
        }
        TermKind::Apply { .. } | TermKind::Meas { .. } => panic!("static terms only"),
    }
}

/// The four branches of teleporting qubit 1 onto qubit 3: after the Bell
/// rotation, qubits 1 and 2 are measured along z and the outcome-dependent
/// corrections `X_3^{m2}` then `Z_3^{m1}` are applied classically. Returns
/// `((m1, m2), unnormalized branch state)` for every outcome pair.
pub fn teleport_branches(input: &State) -> Vec<((bool, bool), State)> {
    let mut s = input.clone();
    s.apply_gate("CNOT", &[1, 2]);
    s.apply_gate("H", &[1]);
    let mut out = Vec::new();
    for m1 in [false, true] {
        for m2 in [false, true] {
            let mut b = s.project_z(1, m1).project_z(2, m2);
            if m2 {
                b.apply_gate("X", &[3]);
            }
            if m1 {
                b.apply_gate("Z", &[3]);
            }
            out.push(((m1, m2), b));
        }
    }
    out
}

/// `|ψ⟩ ⊗ (|00⟩ + |11⟩)/√2` with `ψ` on qubit 1.
pub fn with_bell_pair(psi: [C64; 2]) -> State {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 8];
    for (b1, &a) in psi.iter().enumerate() {
        amps[b1 << 2] = a * s;
        amps[(b1 << 2) | 0b11] = a * s;
    }
    State { n: 3, amps }
}
