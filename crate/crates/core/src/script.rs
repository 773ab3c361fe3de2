//! The `.qlv` script format: a register, custom gates, stages of a circuit,
//! named propositions, and assertions relating propositions across stages.
//!
//! ```text
//! # comment
//! qubits 3
//! gate S = 1, 0 ; 0, i
//! stage prep: H 1 ; CNOT 1 2
//! stage read: measz 1
//! prop E = (z2 <-> z3) & (x2 <-> x3)
//! assert z1 & E @0 entails z3 @2
//! ```
//!
//! `@0` is the state before the first stage and `@k` the state after the
//! k-th stage.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::{Axis, GateApplication, GateDef, GateRegistry, BUILTIN_GATES};
use crate::interp::MAX_QUBITS;
use crate::linalg::{ComplexMatrix, C64};
use crate::logic::{parse_with, PropEnv, Span, Term, TermKind};
use crate::subspace::ToleranceConfig;

/// One operation inside a stage.
#[derive(Debug, Clone, PartialEq)]
pub enum StageOp {
    Gate(GateApplication),
    Measure { axis: Axis, qubit: usize },
}

impl StageOp {
    /// The same operation as a dynamic connective wrapped around `body`.
    pub fn wrap(&self, body: Term) -> Term {
        match self {
            StageOp::Gate(app) => Term::apply(app.gate.name.clone(), app.wires.clone(), body),
            StageOp::Measure { axis, qubit } => Term::meas(*axis, *qubit, body),
        }
    }
}

impl fmt::Display for StageOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageOp::Gate(app) => {
                write!(f, "{}", app.gate.name)?;
                for w in &app.wires {
                    write!(f, " {w}")?;
                }
                Ok(())
            }
            StageOp::Measure { axis, qubit } => write!(f, "meas{axis} {qubit}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub name: String,
    pub ops: Vec<StageOp>,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Mutual inclusion.
    Equiv,
    /// Forward image of the left side is included in the right side.
    Entails,
    /// Right side is included in the forward image of the left side.
    EntailedBy,
}

impl FromStr for Relation {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "equiv" => Ok(Relation::Equiv),
            "entails" => Ok(Relation::Entails),
            "entailed-by" => Ok(Relation::EntailedBy),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equiv => "equiv",
            Relation::Entails => "entails",
            Relation::EntailedBy => "entailed-by",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub lhs: Term,
    pub from: usize,
    pub relation: Relation,
    pub rhs: Term,
    pub to: usize,
    pub line: usize,
    /// Source text after `assert`, for reports.
    pub text: String,
}

#[derive(Debug, Clone)]
pub struct Script {
    pub n: usize,
    pub gates: GateRegistry,
    /// Names of gates defined in the script, in definition order.
    pub custom_gates: Vec<String>,
    pub stages: Vec<Stage>,
    pub props: Vec<(String, Term)>,
    pub assertions: Vec<Assertion>,
}

impl Script {
    /// Operations of stages `from+1 ..= to`, in circuit order.
    pub fn ops_between(&self, from: usize, to: usize) -> impl Iterator<Item = &StageOp> {
        self.stages[from.min(to)..to].iter().flat_map(|s| s.ops.iter())
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }
}

fn script_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Script {
        line,
        column,
        message: message.into(),
    }
}

/// Parses one complex literal: `1`, `-0.5`, `2i`, `-i`, `0.7+0.7i`, `1e-3-2i`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().ok()?,
    };
    (re.is_finite() && im.is_finite()).then(|| C64::new(re, im))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn looks_like_atom(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('x' | 'y' | 'z')) && {
        let rest = chars.as_str();
        !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())
    }
}

fn reserved(s: &str) -> bool {
    looks_like_atom(s)
        || matches!(s, "top" | "bot" | "mz" | "mx" | "my" | "measz" | "measx" | "measy")
}

/// Column (1-based, in characters) of byte offset `off` within `line`.
fn col_of(line: &str, off: usize) -> usize {
    line[..off.min(line.len())].chars().count() + 1
}

struct ScriptParser {
    n: Option<usize>,
    tol: ToleranceConfig,
    gates: GateRegistry,
    custom_gates: Vec<String>,
    stages: Vec<Stage>,
    env: PropEnv,
    props: Vec<(String, Term)>,
    /// (assertion, byte offset of `@B` in its line)
    pending: Vec<(Assertion, usize)>,
}

impl ScriptParser {
    fn require_n(&self, line: usize) -> Result<usize> {
        self.n
            .ok_or_else(|| script_err(line, 1, "`qubits N` must come before this line"))
    }

    /// Parses a term occupying `raw[start..end]` and checks it against the register.
    fn term(&self, raw: &str, start: usize, end: usize, line: usize) -> Result<Term> {
        let text = &raw[start..end];
        let t = parse_with(text, &self.env).map_err(|e| {
            let mut msg = e.message.clone();
            if !e.expected.is_empty() {
                msg.push_str(&format!(" (expected one of: {})", e.expected.join(", ")));
            }
            script_err(line, col_of(raw, start + e.position), msg)
        })?;
        let n = self.require_n(line)?;
        self.check_term(&t, n)
            .map_err(|(span, msg)| script_err(line, col_of(raw, start + span.start), msg))?;
        Ok(t)
    }

    fn check_term(&self, t: &Term, n: usize) -> std::result::Result<(), (Span, String)> {
        let out_of_range = |q: usize| (t.span, format!("qubit {q} is out of range for {n} qubit(s)"));
        match &t.kind {
            TermKind::Atom(_, q) if *q > n => return Err(out_of_range(*q)),
            TermKind::Meas { qubit, .. } if *qubit > n => return Err(out_of_range(*qubit)),
            TermKind::Apply { gate, wires, .. } => {
                self.gates
                    .application(gate, wires, n)
                    .map_err(|e| (t.span, e.to_string()))?;
            }
            _ => {}
        }
        for c in t.children() {
            self.check_term(c, n)?;
        }
        Ok(())
    }

    fn line(&mut self, raw: &str, line: usize) -> Result<()> {
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            return Ok(());
        }
        let indent = content.len() - trimmed.len();
        let (keyword, _) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed.trim_end(), ""));
        let rest_off = indent + keyword.len();
        let rest = &content[rest_off..];
        match keyword {
            "qubits" => self.qubits(rest, raw, rest_off, line),
            "gate" => self.gate(content, rest_off, line),
            "stage" => self.stage(content, rest_off, line),
            "prop" => self.prop(content, rest_off, line),
            "assert" => self.assert(content, rest_off, line),
            other => Err(script_err(
                line,
                col_of(raw, indent),
                format!("unknown directive `{other}` (expected qubits, gate, stage, prop, or assert)"),
            )),
        }
    }

    fn qubits(&mut self, rest: &str, raw: &str, off: usize, line: usize) -> Result<()> {
        if self.n.is_some() {
            return Err(script_err(line, 1, "`qubits` given twice"));
        }
        let n: usize = rest
            .trim()
            .parse()
            .map_err(|_| script_err(line, col_of(raw, off) + 1, "expected a qubit count"))?;
        if n == 0 || n > MAX_QUBITS {
            return Err(script_err(
                line,
                col_of(raw, off) + 1,
                format!("qubit count must be between 1 and {MAX_QUBITS}"),
            ));
        }
        self.n = Some(n);
        Ok(())
    }

    /// Splits `content[off..]` at the first `sep`, returning the name before it
    /// and the byte offset just after it.
    fn name_then<'a>(&self, content: &'a str, off: usize, sep: char, line: usize, what: &str) -> Result<(&'a str, usize)> {
        let rest = &content[off..];
        let Some(k) = rest.find(sep) else {
            return Err(script_err(line, col_of(content, content.len()), format!("expected `{sep}` after {what} name")));
        };
        let name = rest[..k].trim();
        let name_col = col_of(content, off + rest[..k].find(name).unwrap_or(0));
        if !is_identifier(name) {
            return Err(script_err(line, name_col, format!("invalid {what} name `{name}`")));
        }
        Ok((name, off + k + sep.len_utf8()))
    }

    fn gate(&mut self, content: &str, off: usize, line: usize) -> Result<()> {
        let (name, body_off) = self.name_then(content, off, '=', line, "gate")?;
        let name_col = col_of(content, off + content[off..].find(name).unwrap_or(0));
        if reserved(name) || self.gates.contains(name) {
            let why = if BUILTIN_GATES.contains(&name) || self.gates.contains(name) {
                "is already defined"
            } else {
                "is reserved"
            };
            return Err(script_err(line, name_col, format!("gate name `{name}` {why}")));
        }
        let mut rows = Vec::new();
        let mut row_off = body_off;
        for row_text in content[body_off..].split(';') {
            let mut row = Vec::new();
            let mut entry_off = row_off;
            for entry in row_text.split(',') {
                let z = parse_complex(entry).ok_or_else(|| {
                    let lead = entry.len() - entry.trim_start().len();
                    script_err(line, col_of(content, entry_off + lead), format!("invalid complex number `{}`", entry.trim()))
                })?;
                row.push(z);
                entry_off += entry.len() + 1;
            }
            rows.push(row);
            row_off += row_text.len() + 1;
        }
        let matrix = ComplexMatrix::from_rows(&rows).map_err(|_| script_err(line, col_of(content, body_off), "matrix rows have different lengths"))?;
        let def = GateDef::new(name, matrix, self.tol).map_err(|e| {
            let msg = match e {
                Error::NotUnitary => format!("gate `{name}` is not unitary within tolerance"),
                _ => format!("gate `{name}` must be a square matrix of size 2^k"),
            };
            script_err(line, col_of(content, body_off), msg)
        })?;
        self.gates.register(def);
        self.custom_gates.push(name.to_string());
        Ok(())
    }

    fn stage(&mut self, content: &str, off: usize, line: usize) -> Result<()> {
        let n = self.require_n(line)?;
        let (name, ops_off) = self.name_then(content, off, ':', line, "stage")?;
        if self.stages.iter().any(|s| s.name == name) {
            let col = col_of(content, off + content[off..].find(name).unwrap_or(0));
            return Err(script_err(line, col, format!("stage `{name}` is already defined")));
        }
        let mut ops = Vec::new();
        let mut op_off = ops_off;
        for op_text in content[ops_off..].split(';') {
            let lead = op_text.len() - op_text.trim_start().len();
            let col = col_of(content, op_off + lead);
            let mut words = op_text.split_whitespace();
            let Some(head) = words.next() else {
                return Err(script_err(line, col, "empty stage operation"));
            };
            let wires: Vec<usize> = words
                .map(|w| w.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| script_err(line, col, format!("wires of `{head}` must be qubit numbers")))?;
            let op = match head.strip_prefix("meas").and_then(|a| {
                let mut cs = a.chars();
                let axis = Axis::from_letter(cs.next()?)?;
                cs.next().is_none().then_some(axis)
            }) {
                Some(axis) => {
                    if wires.len() != 1 {
                        return Err(script_err(line, col, format!("`{head}` takes exactly one qubit")));
                    }
                    if wires[0] == 0 || wires[0] > n {
                        return Err(script_err(line, col, format!("qubit {} is out of range for {n} qubit(s)", wires[0])));
                    }
                    StageOp::Measure { axis, qubit: wires[0] }
                }
                None => StageOp::Gate(
                    self.gates
                        .application(head, &wires, n)
                        .map_err(|e| script_err(line, col, e.to_string()))?,
                ),
            };
            ops.push(op);
            op_off += op_text.len() + 1;
        }
        self.stages.push(Stage {
            name: name.to_string(),
            ops,
            line,
        });
        Ok(())
    }

    fn prop(&mut self, content: &str, off: usize, line: usize) -> Result<()> {
        self.require_n(line)?;
        let (name, term_off) = self.name_then(content, off, '=', line, "proposition")?;
        if reserved(name) || self.env.contains_key(name) {
            let col = col_of(content, off + content[off..].find(name).unwrap_or(0));
            return Err(script_err(line, col, format!("proposition name `{name}` is reserved or already defined")));
        }
        let t = self.term(content, term_off, content.len(), line)?;
        self.env.insert(name.to_string(), t.clone());
        self.props.push((name.to_string(), t));
        Ok(())
    }

    fn stage_index(&self, content: &str, at: usize, line: usize) -> Result<(usize, usize)> {
        let digits: String = content[at + 1..].chars().take_while(|c| c.is_ascii_digit()).collect();
        let k = digits
            .parse()
            .map_err(|_| script_err(line, col_of(content, at), "expected a stage index after `@`"))?;
        Ok((k, at + 1 + digits.len()))
    }

    fn assert(&mut self, content: &str, off: usize, line: usize) -> Result<()> {
        self.require_n(line)?;
        let Some(at_a) = content[off..].find('@').map(|k| off + k) else {
            return Err(script_err(line, col_of(content, content.len()), "expected `@stage` after the left-hand term"));
        };
        let (from, after_a) = self.stage_index(content, at_a, line)?;
        let rel_text = content[after_a..].trim_start();
        let rel_off = content.len() - rel_text.len();
        let rel_word = rel_text.split_whitespace().next().unwrap_or("");
        let relation: Relation = rel_word.parse().map_err(|_| {
            script_err(
                line,
                col_of(content, rel_off),
                format!("expected `equiv`, `entails`, or `entailed-by`, found `{rel_word}`"),
            )
        })?;
        let rhs_off = rel_off + rel_word.len();
        let Some(at_b) = content[rhs_off..].rfind('@').map(|k| rhs_off + k) else {
            return Err(script_err(line, col_of(content, content.len()), "expected `@stage` after the right-hand term"));
        };
        let (to, end) = self.stage_index(content, at_b, line)?;
        if !content[end..].trim().is_empty() {
            return Err(script_err(line, col_of(content, end), "unexpected text after the stage index"));
        }
        let lhs = self.term(content, off, at_a, line)?;
        let rhs = self.term(content, rhs_off, at_b, line)?;
        let assertion = Assertion {
            lhs,
            from,
            relation,
            rhs,
            to,
            line,
            text: content[off..].trim().to_string(),
        };
        self.pending.push((assertion, at_a));
        Ok(())
    }
}

/// Parses and validates a script with default tolerances.
pub fn parse_script(text: &str) -> Result<Script> {
    parse_script_with(text, ToleranceConfig::default())
}

/// Parses and validates a script; `tol` governs the unitarity check of custom gates.
pub fn parse_script_with(text: &str, tol: ToleranceConfig) -> Result<Script> {
    let mut p = ScriptParser {
        n: None,
        tol,
        gates: GateRegistry::builtin(),
        custom_gates: Vec::new(),
        stages: Vec::new(),
        env: PropEnv::new(),
        props: Vec::new(),
        pending: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        p.line(raw, i + 1)?;
    }
    let n = p
        .n
        .ok_or_else(|| script_err(1, 1, "missing `qubits N` declaration"))?;
    let stage_count = p.stages.len();
    let mut assertions = Vec::with_capacity(p.pending.len());
    for (a, _) in p.pending {
        if a.from > stage_count || a.to > stage_count {
            let k = a.from.max(a.to);
            return Err(script_err(a.line, 1, format!("stage index @{k} exceeds the {stage_count} stage(s) defined")));
        }
        if a.from > a.to {
            return Err(script_err(
                a.line,
                1,
                format!("assertion goes backwards: @{} is after @{}", a.from, a.to),
            ));
        }
        assertions.push(a);
    }
    Ok(Script {
        n,
        gates: p.gates,
        custom_gates: p.custom_gates,
        stages: p.stages,
        props: p.props,
        assertions,
    })
}
