//! Terms of the dynamic quantum logic and their concrete syntax.
//!
//! Surface grammar, loosest binding first:
//!
//! | operator | meaning      | associativity |
//! |----------|--------------|---------------|
//! | `<->`    | equivalence  | left          |
//! | `->`     | implication  | right         |
//! | `\|`     | disjunction  | left          |
//! | `^`      | exclusive or | left          |
//! | `&`      | conjunction  | left          |
//! | `~p`, `[G w…]p`, `[mz w]p` | negation, gate, measurement | prefix |
//!
//! Atoms are `z1`, `x2`, `y3`; constants are `top` and `bot`.

mod parse;
mod pretty;

use std::fmt;
use std::hash::{Hash, Hasher};

pub use parse::{parse, parse_with, PropEnv};
pub use pretty::pretty;

use crate::gates::Axis;

/// Byte range of a term in its source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// A term with its source position. Equality and hashing ignore the position.
#[derive(Debug, Clone)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermKind {
    Atom(Axis, usize),
    Top,
    Bottom,
    Not(Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Imp(Box<Term>, Box<Term>),
    Iff(Box<Term>, Box<Term>),
    Xor(Box<Term>, Box<Term>),
    Apply {
        gate: String,
        wires: Vec<usize>,
        body: Box<Term>,
    },
    Meas {
        axis: Axis,
        qubit: usize,
        body: Box<Term>,
    },
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

impl From<TermKind> for Term {
    fn from(kind: TermKind) -> Self {
        Term {
            kind,
            span: Span::default(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

fn b(t: Term) -> Box<Term> {
    Box::new(t)
}

impl Term {
    pub fn atom(axis: Axis, qubit: usize) -> Term {
        TermKind::Atom(axis, qubit).into()
    }

    pub fn z(qubit: usize) -> Term {
        Self::atom(Axis::Z, qubit)
    }

    pub fn x(qubit: usize) -> Term {
        Self::atom(Axis::X, qubit)
    }

    pub fn y(qubit: usize) -> Term {
        Self::atom(Axis::Y, qubit)
    }

    pub fn top() -> Term {
        TermKind::Top.into()
    }

    pub fn bot() -> Term {
        TermKind::Bottom.into()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Term {
        TermKind::Not(b(t)).into()
    }

    pub fn and(p: Term, q: Term) -> Term {
        TermKind::And(b(p), b(q)).into()
    }

    pub fn or(p: Term, q: Term) -> Term {
        TermKind::Or(b(p), b(q)).into()
    }

    pub fn imp(p: Term, q: Term) -> Term {
        TermKind::Imp(b(p), b(q)).into()
    }

    pub fn iff(p: Term, q: Term) -> Term {
        TermKind::Iff(b(p), b(q)).into()
    }

    pub fn xor(p: Term, q: Term) -> Term {
        TermKind::Xor(b(p), b(q)).into()
    }

    pub fn apply(gate: impl Into<String>, wires: Vec<usize>, body: Term) -> Term {
        TermKind::Apply {
            gate: gate.into(),
            wires,
            body: b(body),
        }
        .into()
    }

    pub fn meas(axis: Axis, qubit: usize, body: Term) -> Term {
        TermKind::Meas {
            axis,
            qubit,
            body: b(body),
        }
        .into()
    }

    pub(crate) fn with_span(mut self, span: Span) -> Term {
        self.span = span;
        self
    }

    /// Immediate subterms.
    pub fn children(&self) -> Vec<&Term> {
        use TermKind::*;
        match &self.kind {
            Atom(..) | Top | Bottom => vec![],
            Not(p) | Apply { body: p, .. } | Meas { body: p, .. } => vec![p],
            And(p, q) | Or(p, q) | Imp(p, q) | Iff(p, q) | Xor(p, q) => vec![p, q],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Term::size).sum::<usize>()
    }

    /// Number of connective nodes (everything except atoms and constants).
    pub fn connectives(&self) -> usize {
        let own = usize::from(!matches!(
            self.kind,
            TermKind::Atom(..) | TermKind::Top | TermKind::Bottom
        ));
        own + self.children().into_iter().map(Term::connectives).sum::<usize>()
    }

    /// Largest qubit index mentioned by an atom, gate wire, or measurement.
    pub fn max_qubit(&self) -> usize {
        let own = match &self.kind {
            TermKind::Atom(_, i) => *i,
            TermKind::Apply { wires, .. } => wires.iter().copied().max().unwrap_or(0),
            TermKind::Meas { qubit, .. } => *qubit,
            _ => 0,
        };
        self.children()
            .into_iter()
            .map(Term::max_qubit)
            .fold(own, usize::max)
    }

    /// Whether any gate or measurement node occurs.
    pub fn has_dynamic(&self) -> bool {
        matches!(self.kind, TermKind::Apply { .. } | TermKind::Meas { .. })
            || self.children().into_iter().any(Term::has_dynamic)
    }

    /// Renames qubit indices in atoms, wires, and measurements.
    pub fn map_qubits(&self, f: &impl Fn(usize) -> usize) -> Term {
        use TermKind::*;
        let kind = match &self.kind {
            Atom(a, i) => Atom(*a, f(*i)),
            Top => Top,
            Bottom => Bottom,
            Not(p) => Not(b(p.map_qubits(f))),
            And(p, q) => And(b(p.map_qubits(f)), b(q.map_qubits(f))),
            Or(p, q) => Or(b(p.map_qubits(f)), b(q.map_qubits(f))),
            Imp(p, q) => Imp(b(p.map_qubits(f)), b(q.map_qubits(f))),
            Iff(p, q) => Iff(b(p.map_qubits(f)), b(q.map_qubits(f))),
            Xor(p, q) => Xor(b(p.map_qubits(f)), b(q.map_qubits(f))),
            Apply { gate, wires, body } => Apply {
                gate: gate.clone(),
                wires: wires.iter().map(|&w| f(w)).collect(),
                body: b(body.map_qubits(f)),
            },
            Meas { axis, qubit, body } => Meas {
                axis: *axis,
                qubit: f(*qubit),
                body: b(body.map_qubits(f)),
            },
        };
        Term {
            kind,
            span: self.span,
        }
    }
}

/// Rewrites derived connectives into `~` and `&`:
///
/// * `p | q`   → `~(~p & ~q)`
/// * `p -> q`  → `~(p & ~q)`
/// * `p <-> q` → `(p -> q) & (q -> p)`, then desugared
/// * `p ^ q`   → `~(p <-> q)`, then desugared
///
/// Gate and measurement nodes are kept, with desugared bodies.
pub fn desugar(t: &Term) -> Term {
    use TermKind::*;
    let kind = match &t.kind {
        Atom(..) | Top | Bottom => return t.clone(),
        Not(p) => Not(b(desugar(p))),
        And(p, q) => And(b(desugar(p)), b(desugar(q))),
        Or(p, q) => return Term::not(Term::and(Term::not(desugar(p)), Term::not(desugar(q)))),
        Imp(p, q) => return desugared_imp(desugar(p), desugar(q)),
        Iff(p, q) => return desugared_iff(desugar(p), desugar(q)),
        Xor(p, q) => return Term::not(desugared_iff(desugar(p), desugar(q))),
        Apply { gate, wires, body } => Apply {
            gate: gate.clone(),
            wires: wires.clone(),
            body: b(desugar(body)),
        },
        Meas { axis, qubit, body } => Meas {
            axis: *axis,
            qubit: *qubit,
            body: b(desugar(body)),
        },
    };
    Term { kind, span: t.span }
}

fn desugared_imp(p: Term, q: Term) -> Term {
    Term::not(Term::and(p, Term::not(q)))
}

fn desugared_iff(p: Term, q: Term) -> Term {
    Term::and(desugared_imp(p.clone(), q.clone()), desugared_imp(q, p))
}
