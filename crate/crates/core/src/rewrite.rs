//! Symbolic rewriting of dynamic connectives.
//!
//! Gates commute with `~` and `&` (hence with every derived connective), so a
//! gate applied to a compound term can be pushed down to the atoms, where a
//! per-gate table says what each atom becomes. Measurements expand to
//! `p | [σ]p`. Every table row is checked against the subspace semantics
//! before it is used.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Result;
use crate::gates::{Axis, GateDef, GateRegistry};
use crate::interp::{interpret, InterpContext};
use crate::logic::{parse, Term, TermKind};
use crate::subspace::{equal, ToleranceConfig};

/// Where a table row comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    /// Row of the standard gate table for Pauli, Hadamard, CNOT and Toffoli.
    Table,
    /// Worked out by conjugating the atom's Pauli through the gate.
    Derived,
    /// Found by template search for a user-defined gate.
    Discovered,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Table => "table",
            Provenance::Derived => "derived",
            Provenance::Discovered => "discovered",
        })
    }
}

/// `[gate w1..wa] axis_{w_role} ⊣⊢ replacement`, where the replacement's
/// qubit indices `1..=a` stand for the gate's wires by position.
#[derive(Debug, Clone, PartialEq)]
pub struct RewriteRule {
    pub gate: String,
    pub arity: usize,
    pub axis: Axis,
    /// 1-based position of the atom's qubit in the wire list.
    pub role: usize,
    pub replacement: Term,
    pub provenance: Provenance,
}

impl RewriteRule {
    fn formal_wires(&self) -> Vec<usize> {
        (1..=self.arity).collect()
    }

    /// Left-hand side over formal wires.
    pub fn lhs(&self) -> Term {
        Term::apply(self.gate.clone(), self.formal_wires(), Term::atom(self.axis, self.role))
    }

    /// Both sides with formal wire `r` replaced by `wires[r - 1]`.
    pub fn instantiate(&self, wires: &[usize]) -> (Term, Term) {
        let map = |r: usize| wires[r - 1];
        (self.lhs().map_qubits(&map), self.replacement.map_qubits(&map))
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -|- {}", self.lhs(), self.replacement)
    }
}

/// A row that failed validation, kept for reporting.
#[derive(Debug, Clone)]
pub struct RejectedRule {
    pub rule: RewriteRule,
    pub replaced_by: Option<Term>,
}

type RuleKey = (String, Axis, usize);

/// Validated rewrite rules, keyed by gate, atom axis, and wire position.
#[derive(Debug, Clone, Default)]
pub struct RuleTable {
    rules: BTreeMap<RuleKey, RewriteRule>,
    rejected: Vec<RejectedRule>,
}

/// Rows of the standard gate table, over formal wires `i = 1, j = 2, k = 3`.
/// The Toffoli `x2` row is carried as commonly transcribed; validation rejects
/// it and the derived row below takes its place.
const TABLE_ROWS: &[(&str, &str, &str)] = &[
    ("Z", "z1", "z1"),
    ("Z", "x1", "~x1"),
    ("X", "z1", "~z1"),
    ("X", "x1", "x1"),
    ("Y", "z1", "~z1"),
    ("Y", "x1", "~x1"),
    ("H", "z1", "x1"),
    ("H", "x1", "z1"),
    ("CNOT", "z1", "z1"),
    ("CNOT", "x1", "x1 ^ x2"),
    ("CNOT", "x2", "x2"),
    ("CNOT", "z2", "z1 ^ z2"),
    ("TOFFOLI", "z1", "z1"),
    ("TOFFOLI", "x1", "x1 ^ (z2 & x3)"),
    ("TOFFOLI", "z2", "z2"),
    ("TOFFOLI", "x2", "x1 ^ (z1 & x3)"),
    ("TOFFOLI", "x3", "x3"),
    ("TOFFOLI", "z3", "z3 ^ (z1 & z2)"),
];

const DERIVED_ROWS: &[(&str, &str, &str)] = &[
    ("TOFFOLI", "x2", "x2 ^ (z1 & x3)"),
    ("Z", "y1", "~y1"),
    ("X", "y1", "~y1"),
    ("Y", "y1", "y1"),
    ("H", "y1", "~y1"),
    ("CNOT", "y1", "y1 ^ x2"),
    ("CNOT", "y2", "y2 ^ z1"),
    ("CZ", "z1", "z1"),
    ("CZ", "z2", "z2"),
    ("CZ", "x1", "x1 ^ z2"),
    ("CZ", "x2", "x2 ^ z1"),
    ("CZ", "y1", "y1 ^ z2"),
    ("CZ", "y2", "y2 ^ z1"),
    ("SWAP", "z1", "z2"),
    ("SWAP", "z2", "z1"),
    ("SWAP", "x1", "x2"),
    ("SWAP", "x2", "x1"),
    ("SWAP", "y1", "y2"),
    ("SWAP", "y2", "y1"),
    ("TOFFOLI", "y1", "y1 ^ (z2 & x3)"),
    ("TOFFOLI", "y2", "y2 ^ (z1 & x3)"),
    ("TOFFOLI", "y3", "y3 ^ (z1 & z2)"),
];

fn row(gates: &GateRegistry, (gate, atom, replacement): (&str, &str, &str), provenance: Provenance) -> RewriteRule {
    let arity = gates.get(gate).expect("builtin gate").arity;
    let (axis, role) = match parse(atom).expect("table atom").kind {
        TermKind::Atom(axis, role) => (axis, role),
        _ => unreachable!("table rows name a single atom"),
    };
    RewriteRule {
        gate: gate.to_string(),
        arity,
        axis,
        role,
        replacement: parse(replacement).expect("table replacement"),
        provenance,
    }
}

/// Ordered tuples of `arity` distinct wires from `1..=n`.
pub fn wire_assignments(arity: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(arity: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for w in 1..=n {
            if !cur.contains(&w) {
                cur.push(w);
                go(arity, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(arity, n, &mut Vec::new(), &mut out);
    out
}

/// Checks a rule against the subspace semantics for every wire assignment
/// with `arity <= n <= max_n`, including that atoms on untouched wires are
/// left fixed.
pub fn validate_rule(rule: &RewriteRule, gates: &GateRegistry, tol: ToleranceConfig, max_n: usize) -> Result<bool> {
    for n in rule.arity..=max_n.max(rule.arity) {
        let ctx = InterpContext::with(n, gates.clone(), tol)?;
        for wires in wire_assignments(rule.arity, n) {
            let (lhs, rhs) = rule.instantiate(&wires);
            if !equal(&interpret(&lhs, &ctx)?, &interpret(&rhs, &ctx)?)? {
                return Ok(false);
            }
            for q in (1..=n).filter(|q| !wires.contains(q)) {
                for axis in Axis::ALL {
                    let atom = Term::atom(axis, q);
                    let moved = Term::apply(rule.gate.clone(), wires.clone(), atom.clone());
                    if !equal(&interpret(&moved, &ctx)?, &interpret(&atom, &ctx)?)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Validation depth used when building tables: the gate's own width plus one
/// bystander qubit.
fn default_depth(arity: usize) -> usize {
    arity + 1
}

/// Candidate replacements over the atoms of wires `1..=arity`, simplest
/// first: `a`, `a ^ b`, `a ^ (b & c)`, each with and without negation.
fn templates(arity: usize) -> Vec<Term> {
    let atoms: Vec<Term> = (1..=arity)
        .flat_map(|w| Axis::ALL.map(|ax| Term::atom(ax, w)))
        .collect();
    let mut out = Vec::new();
    for a in &atoms {
        out.push(a.clone());
        out.push(Term::not(a.clone()));
    }
    for a in &atoms {
        for b in atoms.iter().filter(|b| *b != a) {
            let t = Term::xor(a.clone(), b.clone());
            out.push(Term::not(t.clone()));
            out.push(t);
        }
    }
    for a in &atoms {
        for b in &atoms {
            for c in atoms.iter().filter(|c| *c != b) {
                let t = Term::xor(a.clone(), Term::and(b.clone(), c.clone()));
                out.push(Term::not(t.clone()));
                out.push(t);
            }
        }
    }
    out
}

/// Searches the template family for a replacement of `[gate] axis_role` and
/// returns the first one that validates.
pub fn discover_rule(
    gate: &GateDef,
    axis: Axis,
    role: usize,
    gates: &GateRegistry,
    tol: ToleranceConfig,
) -> Result<Option<RewriteRule>> {
    let ctx = InterpContext::with(gate.arity, gates.clone(), tol)?;
    let formal: Vec<usize> = (1..=gate.arity).collect();
    let target = interpret(&Term::apply(gate.name.clone(), formal, Term::atom(axis, role)), &ctx)?;
    for candidate in templates(gate.arity) {
        // cheap screen at the gate's own width before the full check
        if !equal(&target, &interpret(&candidate, &ctx)?)? {
            continue;
        }
        let rule = RewriteRule {
            gate: gate.name.clone(),
            arity: gate.arity,
            axis,
            role,
            replacement: candidate,
            provenance: Provenance::Discovered,
        };
        if validate_rule(&rule, gates, tol, default_depth(gate.arity))? {
            return Ok(Some(rule));
        }
    }
    Ok(None)
}

impl RuleTable {
    /// Validates the standard and derived rows for the builtin gates. Rows
    /// that fail are recorded in [`RuleTable::rejected`] and not used.
    pub fn standard(tol: ToleranceConfig) -> Result<Self> {
        let gates = GateRegistry::builtin();
        let mut table = RuleTable::default();
        let candidates = TABLE_ROWS
            .iter()
            .map(|&r| row(&gates, r, Provenance::Table))
            .chain(DERIVED_ROWS.iter().map(|&r| row(&gates, r, Provenance::Derived)));
        for rule in candidates {
            if validate_rule(&rule, &gates, tol, default_depth(rule.arity))? {
                table.insert(rule);
            } else {
                table.rejected.push(RejectedRule {
                    rule,
                    replaced_by: None,
                });
            }
        }
        let replacements: Vec<_> = table
            .rejected
            .iter()
            .map(|r| table.lookup(&r.rule.gate, r.rule.axis, r.rule.role).map(|ok| ok.replacement.clone()))
            .collect();
        for (rejected, replacement) in table.rejected.iter_mut().zip(replacements) {
            rejected.replaced_by = replacement;
        }
        Ok(table)
    }

    /// Adds discovered rows for every atom of a user gate whose image fits
    /// the template family. Returns how many rows were added.
    pub fn learn_gate(&mut self, gate: &GateDef, gates: &GateRegistry, tol: ToleranceConfig) -> Result<usize> {
        let mut added = 0;
        for role in 1..=gate.arity {
            for axis in Axis::ALL {
                if self.lookup(&gate.name, axis, role).is_some() {
                    continue;
                }
                if let Some(rule) = discover_rule(gate, axis, role, gates, tol)? {
                    self.insert(rule);
                    added += 1;
                }
            }
        }
        Ok(added)
    }

    fn insert(&mut self, rule: RewriteRule) {
        let key = (rule.gate.clone(), rule.axis, rule.role);
        self.rules.entry(key).or_insert(rule);
    }

    pub fn lookup(&self, gate: &str, axis: Axis, role: usize) -> Option<&RewriteRule> {
        self.rules.get(&(gate.to_string(), axis, role))
    }

    pub fn rules(&self) -> impl Iterator<Item = &RewriteRule> {
        self.rules.values()
    }

    pub fn rejected(&self) -> &[RejectedRule] {
        &self.rejected
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// Pushes gates and measurements down to the atoms.
///
/// The result contains no measurement nodes; gate nodes survive only where
/// the table has no row for a targeted atom, or around another such residual.
pub fn push_dynamic(t: &Term, table: &RuleTable) -> Term {
    use TermKind::*;
    match &t.kind {
        Atom(..) | Top | Bottom => t.clone(),
        Not(p) => Term::not(push_dynamic(p, table)),
        And(p, q) => Term::and(push_dynamic(p, table), push_dynamic(q, table)),
        Or(p, q) => Term::or(push_dynamic(p, table), push_dynamic(q, table)),
        Imp(p, q) => Term::imp(push_dynamic(p, table), push_dynamic(q, table)),
        Iff(p, q) => Term::iff(push_dynamic(p, table), push_dynamic(q, table)),
        Xor(p, q) => Term::xor(push_dynamic(p, table), push_dynamic(q, table)),
        Apply { gate, wires, body } => distribute(gate, wires, &push_dynamic(body, table), table),
        Meas { axis, qubit, body } => {
            let p = push_dynamic(body, table);
            let flipped = distribute(axis.pauli_gate(), &[*qubit], &p, table);
            Term::or(p, flipped)
        }
    }
}

/// `[gate wires] t` for a `t` that is already pushed.
fn distribute(gate: &str, wires: &[usize], t: &Term, table: &RuleTable) -> Term {
    use TermKind::*;
    let go = |p: &Term| distribute(gate, wires, p, table);
    match &t.kind {
        Top | Bottom => t.clone(),
        Atom(axis, q) => match wires.iter().position(|w| w == q) {
            None => t.clone(),
            Some(pos) => match table.lookup(gate, *axis, pos + 1) {
                Some(rule) => rule.replacement.map_qubits(&|r| wires[r - 1]),
                None => Term::apply(gate, wires.to_vec(), t.clone()),
            },
        },
        Not(p) => Term::not(go(p)),
        And(p, q) => Term::and(go(p), go(q)),
        Or(p, q) => Term::or(go(p), go(q)),
        Imp(p, q) => Term::imp(go(p), go(q)),
        Iff(p, q) => Term::iff(go(p), go(q)),
        Xor(p, q) => Term::xor(go(p), go(q)),
        Apply { .. } | Meas { .. } => Term::apply(gate, wires.to_vec(), t.clone()),
    }
}

/// A local simplification `lhs → rhs`, sound for every instance.
pub struct SimplifyRule {
    pub name: &'static str,
    /// Rewrites the root of `t`, if the rule matches there.
    pub apply: fn(&Term) -> Option<Term>,
    /// An instance `(lhs, rhs)` of the rule for a given operand, for checking.
    pub instance: fn(&Term) -> (Term, Term),
}

fn is_top(t: &Term) -> bool {
    t.kind == TermKind::Top
}

fn is_bot(t: &Term) -> bool {
    t.kind == TermKind::Bottom
}

pub const SIMPLIFY_RULES: &[SimplifyRule] = &[
    SimplifyRule {
        name: "~~p -> p",
        apply: |t| match &t.kind {
            TermKind::Not(inner) => match &inner.kind {
                TermKind::Not(p) => Some((**p).clone()),
                _ => None,
            },
            _ => None,
        },
        instance: |p| (Term::not(Term::not(p.clone())), p.clone()),
    },
    SimplifyRule {
        name: "p & top -> p",
        apply: |t| match &t.kind {
            TermKind::And(p, q) if is_top(q) => Some((**p).clone()),
            TermKind::And(p, q) if is_top(p) => Some((**q).clone()),
            _ => None,
        },
        instance: |p| (Term::and(p.clone(), Term::top()), p.clone()),
    },
    SimplifyRule {
        name: "p & bot -> bot",
        apply: |t| match &t.kind {
            TermKind::And(p, q) if is_bot(p) || is_bot(q) => Some(Term::bot()),
            _ => None,
        },
        instance: |p| (Term::and(p.clone(), Term::bot()), Term::bot()),
    },
    SimplifyRule {
        name: "p | p -> p",
        apply: |t| match &t.kind {
            TermKind::Or(p, q) if p == q => Some((**p).clone()),
            _ => None,
        },
        instance: |p| (Term::or(p.clone(), p.clone()), p.clone()),
    },
    SimplifyRule {
        name: "p & p -> p",
        apply: |t| match &t.kind {
            TermKind::And(p, q) if p == q => Some((**p).clone()),
            _ => None,
        },
        instance: |p| (Term::and(p.clone(), p.clone()), p.clone()),
    },
    SimplifyRule {
        name: "p ^ bot -> p",
        apply: |t| match &t.kind {
            TermKind::Xor(p, q) if is_bot(q) => Some((**p).clone()),
            TermKind::Xor(p, q) if is_bot(p) => Some((**q).clone()),
            _ => None,
        },
        instance: |p| (Term::xor(p.clone(), Term::bot()), p.clone()),
    },
    SimplifyRule {
        name: "p | bot -> p",
        apply: |t| match &t.kind {
            TermKind::Or(p, q) if is_bot(q) => Some((**p).clone()),
            TermKind::Or(p, q) if is_bot(p) => Some((**q).clone()),
            _ => None,
        },
        instance: |p| (Term::or(p.clone(), Term::bot()), p.clone()),
    },
];

fn simplify_once(t: &Term) -> Term {
    use TermKind::*;
    let rebuilt = match &t.kind {
        Atom(..) | Top | Bottom => t.clone(),
        Not(p) => Term::not(simplify_once(p)),
        And(p, q) => Term::and(simplify_once(p), simplify_once(q)),
        Or(p, q) => Term::or(simplify_once(p), simplify_once(q)),
        Imp(p, q) => Term::imp(simplify_once(p), simplify_once(q)),
        Iff(p, q) => Term::iff(simplify_once(p), simplify_once(q)),
        Xor(p, q) => Term::xor(simplify_once(p), simplify_once(q)),
        Apply { gate, wires, body } => Term::apply(gate.clone(), wires.clone(), simplify_once(body)),
        Meas { axis, qubit, body } => Term::meas(*axis, *qubit, simplify_once(body)),
    };
    let mut cur = rebuilt;
    'outer: loop {
        for rule in SIMPLIFY_RULES {
            if let Some(next) = (rule.apply)(&cur) {
                cur = next;
                continue 'outer;
            }
        }
        return cur;
    }
}

/// Applies [`SIMPLIFY_RULES`] bottom-up until nothing changes.
pub fn simplify(t: &Term) -> Term {
    simplify_counting(t).0
}

/// Like [`simplify`], also returning the number of passes taken.
pub fn simplify_counting(t: &Term) -> (Term, usize) {
    let mut cur = t.clone();
    let mut passes = 0;
    loop {
        passes += 1;
        let next = simplify_once(&cur);
        if next == cur {
            return (next, passes);
        }
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> RuleTable {
        RuleTable::standard(ToleranceConfig::default()).unwrap()
    }

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn hadamard_on_ground_state() {
        assert_eq!(push_dynamic(&p("[H 1](~z1 & ~z2)"), &table()), p("~x1 & ~z2"));
    }

    #[test]
    fn cnot_on_plus_zero() {
        assert_eq!(
            push_dynamic(&p("[CNOT 1 2](~x1 & ~z2)"), &table()),
            p("~(x1 ^ x2) & ~(z1 ^ z2)")
        );
    }

    #[test]
    fn measurement_expands_to_disjunction() {
        assert_eq!(
            push_dynamic(&p("[mz 1](x3 ^ z1)"), &table()),
            p("(x3 ^ z1) | (x3 ^ z1)")
        );
    }

    #[test]
    fn missing_row_leaves_residual() {
        let empty = RuleTable::default();
        assert_eq!(push_dynamic(&p("[H 1](z1 & z2)"), &empty), p("[H 1]z1 & z2"));
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(simplify(&p("~~z1")), p("z1"));
        assert_eq!(simplify(&p("(x3 ^ z1) | (x3 ^ z1)")), p("x3 ^ z1"));
        assert_eq!(simplify(&p("z1 ^ bot")), p("z1"));
        assert_eq!(simplify(&p("~~(z1 & top) | bot")), p("z1"));
        assert_eq!(simplify(&p("x1 & (bot & z2)")), p("bot"));
    }

    #[test]
    fn toffoli_x2_row_is_rejected_and_replaced() {
        let t = table();
        let rejected: Vec<_> = t.rejected().iter().map(|r| r.rule.to_string()).collect();
        assert_eq!(rejected, vec!["[TOFFOLI 1 2 3]x2 -|- x1 ^ z1 & x3".to_string()]);
        assert_eq!(t.rejected()[0].replaced_by, Some(p("x2 ^ (z1 & x3)")));
        assert_eq!(t.lookup("TOFFOLI", Axis::X, 2).unwrap().provenance, Provenance::Derived);
    }

    #[test]
    fn table_covers_every_builtin_atom() {
        let t = table();
        for g in GateRegistry::builtin().iter() {
            for role in 1..=g.arity {
                for axis in Axis::ALL {
                    assert!(t.lookup(&g.name, axis, role).is_some(), "{} {axis}{role}", g.name);
                }
            }
        }
    }

    #[test]
    fn wire_assignment_count() {
        assert_eq!(wire_assignments(3, 4).len(), 24);
        assert_eq!(wire_assignments(1, 3), vec![vec![1], vec![2], vec![3]]);
    }
}
