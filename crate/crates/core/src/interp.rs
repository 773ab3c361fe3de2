//! Denotation of terms as subspaces of `⊗ⁿ C²`, and the entailment checks
//! built on it.

use crate::error::{Error, Result};
use crate::gates::{apply_local, minus_eigenvector, pauli, Axis, GateApplication, GateRegistry};
use crate::linalg::ComplexMatrix;
use crate::logic::{Term, TermKind};
use crate::subspace::{self, complement, intersect, Subspace, ToleranceConfig};

/// Everything needed to interpret a term: register size, gates in scope, tolerances.
#[derive(Debug, Clone)]
pub struct InterpContext {
    n: usize,
    pub gates: GateRegistry,
    pub tol: ToleranceConfig,
}

/// Largest supported register.
pub const MAX_QUBITS: usize = 12;

impl InterpContext {
    pub fn new(n: usize) -> Result<Self> {
        Self::with(n, GateRegistry::builtin(), ToleranceConfig::default())
    }

    pub fn with(n: usize, gates: GateRegistry, tol: ToleranceConfig) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitOutOfRange {
                index: n,
                n: MAX_QUBITS,
            });
        }
        Ok(InterpContext {
            n,
            gates,
            tol: tol.validated()?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n {
            Err(Error::QubitOutOfRange { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn top(&self) -> Subspace {
        Subspace::full(self.dim(), self.tol)
    }

    pub fn bottom(&self) -> Subspace {
        Subspace::zero(self.dim(), self.tol)
    }
}

/// The −1 eigenspace of the `axis` Pauli on `qubit`, tensored with the full
/// space on every other qubit.
pub fn atom_subspace(axis: Axis, qubit: usize, ctx: &InterpContext) -> Result<Subspace> {
    ctx.check_qubit(qubit)?;
    let n = ctx.n;
    let d = ctx.dim();
    let [v0, v1] = minus_eigenvector(axis);
    // the +1 eigenvector, orthogonal to (v0, v1)
    let [w0, w1] = [-v1.conj(), v0.conj()];
    let bit = 1usize << (n - qubit);
    let low = bit - 1;
    let mut minus = ComplexMatrix::zeros(d, d / 2);
    let mut plus = ComplexMatrix::zeros(d, d / 2);
    for (r, (m, p)) in minus.columns_mut().zip(plus.columns_mut()).enumerate() {
        // insert a zero at the qubit's bit position
        let base = ((r & !low) << 1) | (r & low);
        m[base] = v0;
        m[base | bit] = v1;
        p[base] = w0;
        p[base | bit] = w1;
    }
    Ok(Subspace::from_both(minus, plus, ctx.tol))
}

/// Image of `s` under a gate application, computed without the full matrix.
pub fn apply_gate(s: &Subspace, app: &GateApplication, ctx: &InterpContext) -> Result<Subspace> {
    app.validate(ctx.n)?;
    Ok(s.map_unitary(|m| {
        let mut out = m.clone();
        apply_local(&app.gate.matrix, &app.wires, ctx.n, &mut out);
        out
    }))
}

/// Measurement closure `S ⊕ σ·S` for the `axis` Pauli on `qubit`.
pub fn measure(s: &Subspace, axis: Axis, qubit: usize, ctx: &InterpContext) -> Result<Subspace> {
    ctx.check_qubit(qubit)?;
    let sigma = pauli(axis);
    let flipped = s.map_unitary(|m| {
        let mut out = m.clone();
        apply_local(&sigma, &[qubit], ctx.n, &mut out);
        out
    });
    subspace::sum(s, &flipped)
}

fn imp(p: &Subspace, q: &Subspace) -> Result<Subspace> {
    Ok(complement(&intersect(p, &complement(q))?))
}

fn iff(p: &Subspace, q: &Subspace) -> Result<Subspace> {
    intersect(&imp(p, q)?, &imp(q, p)?)
}

/// `⟦t⟧` in `C^(2^n)`.
///
/// Derived connectives use their `~`/`&` definitions applied to the already
/// computed operand subspaces, so shared operands are evaluated once.
pub fn interpret(t: &Term, ctx: &InterpContext) -> Result<Subspace> {
    use TermKind::*;
    Ok(match &t.kind {
        Atom(axis, q) => atom_subspace(*axis, *q, ctx)?,
        Top => ctx.top(),
        Bottom => ctx.bottom(),
        Not(p) => complement(&interpret(p, ctx)?),
        And(p, q) => intersect(&interpret(p, ctx)?, &interpret(q, ctx)?)?,
        Or(p, q) => {
            let (p, q) = (interpret(p, ctx)?, interpret(q, ctx)?);
            complement(&intersect(&complement(&p), &complement(&q))?)
        }
        Imp(p, q) => imp(&interpret(p, ctx)?, &interpret(q, ctx)?)?,
        Iff(p, q) => iff(&interpret(p, ctx)?, &interpret(q, ctx)?)?,
        Xor(p, q) => complement(&iff(&interpret(p, ctx)?, &interpret(q, ctx)?)?),
        Apply { gate, wires, body } => {
            let app = ctx.gates.application(gate, wires, ctx.n)?;
            apply_gate(&interpret(body, ctx)?, &app, ctx)?
        }
        Meas { axis, qubit, body } => measure(&interpret(body, ctx)?, *axis, *qubit, ctx)?,
    })
}

/// `p ⊩ q`: `⟦p⟧ ⊆ ⟦q⟧`.
pub fn entails(p: &Term, q: &Term, ctx: &InterpContext) -> Result<bool> {
    subspace::includes(&interpret(p, ctx)?, &interpret(q, ctx)?)
}

/// `p ⊣⊢ q`: equal interpretations.
pub fn equivalent(p: &Term, q: &Term, ctx: &InterpContext) -> Result<bool> {
    subspace::equal(&interpret(p, ctx)?, &interpret(q, ctx)?)
}

/// `⊩ p`: `⊤ ⊩ p`.
pub fn tautology(p: &Term, ctx: &InterpContext) -> Result<bool> {
    entails(&Term::top(), p, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::logic::parse;
    use crate::subspace::{equal, span, StateVector};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn ctx(n: usize) -> InterpContext {
        InterpContext::new(n).unwrap()
    }

    fn sem(src: &str, n: usize) -> Subspace {
        interpret(&parse(src).unwrap(), &ctx(n)).unwrap()
    }

    fn real_span(vs: &[&[f64]]) -> Subspace {
        let d = vs[0].len();
        let vs: Vec<_> = vs
            .iter()
            .map(|v| StateVector::new(v.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap())
            .collect();
        span(d, &vs, ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn single_qubit_atoms() {
        assert!(equal(&sem("z1", 1), &real_span(&[&[0.0, 1.0]])).unwrap());
        assert!(equal(&sem("x1", 1), &real_span(&[&[1.0, -1.0]])).unwrap());
        let y = sem("y1", 1);
        let b = y.basis();
        // (|0⟩ − i|1⟩)/√2 up to phase
        let ratio = b[(1, 0)] / b[(0, 0)];
        assert!((ratio - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn atoms_carry_their_complements() {
        let c = ctx(3);
        for axis in Axis::ALL {
            let s = atom_subspace(axis, 2, &c).unwrap();
            let (b, a) = (s.basis(), s.complement_basis());
            assert!(crate::linalg::orthonormality_residual(&b.hstack(a)) < 1e-12);
        }
    }

    #[test]
    fn atom_on_second_of_two_qubits() {
        // ⟦x2⟧ = C² ⊗ C|−⟩
        let expected = real_span(&[&[S, -S, 0.0, 0.0], &[0.0, 0.0, S, -S]]);
        assert!(equal(&sem("x2", 2), &expected).unwrap());
    }

    #[test]
    fn epr_description() {
        let s = sem("(z1 <-> z2) & (x1 <-> x2)", 2);
        assert!(equal(&s, &real_span(&[&[S, 0.0, 0.0, S]])).unwrap());
    }

    #[test]
    fn iff_on_z_atoms_is_even_parity() {
        let s = sem("z1 <-> z2", 2);
        assert!(equal(&s, &real_span(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]])).unwrap());
    }

    #[test]
    fn complement_of_z1_joined_with_z2() {
        // qubit 1 clear, or qubit 2 set: span{|00⟩, |01⟩, |11⟩}
        let s = sem("~z1 | z2", 2);
        let expected = real_span(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert!(equal(&s, &expected).unwrap());
    }

    #[test]
    fn constants() {
        assert_eq!(sem("top", 3).rank(), 8);
        assert!(sem("bot", 3).is_zero());
    }

    #[test]
    fn measurement_of_x_loses_everything() {
        assert!(sem("[mz 1]x1", 1).is_full());
        assert!(equal(&sem("[mz 1]z1", 1), &sem("z1", 1)).unwrap());
    }

    #[test]
    fn entailment_vs_implication() {
        let c = ctx(1);
        let (z, x) = (parse("z1").unwrap(), parse("x1").unwrap());
        assert!(!entails(&z, &x, &c).unwrap());
        assert!(tautology(&Term::imp(z, x), &c).unwrap());
    }

    #[test]
    fn out_of_range_qubit() {
        let e = interpret(&parse("z3").unwrap(), &ctx(2));
        assert!(matches!(e, Err(Error::QubitOutOfRange { index: 3, n: 2 })));
        let e = interpret(&parse("[CNOT 1 4]z1").unwrap(), &ctx(2));
        assert!(matches!(e, Err(Error::QubitOutOfRange { index: 4, .. })));
    }

    #[test]
    fn unknown_gate() {
        let e = interpret(&parse("[FOO 1]z1").unwrap(), &ctx(1));
        assert!(matches!(e, Err(Error::UnknownGate(_))));
    }

    #[test]
    fn hadamard_maps_z_to_x() {
        assert!(equal(&sem("[H 1]z1", 1), &sem("x1", 1)).unwrap());
        assert!(equal(&sem("[Y 1]x1", 1), &sem("~x1", 1)).unwrap());
        assert!(equal(&sem("[CNOT 1 2]~z2", 2), &sem("z1 <-> z2", 2)).unwrap());
    }
}
