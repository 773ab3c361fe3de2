//! Checking staged assertions of a script and rendering the results.

use std::fmt::Write as _;

use crate::engine::{Engine, NumericEngine};
use crate::error::Result;
use crate::interp::InterpContext;
use crate::linalg::C64;
use crate::script::{Assertion, Relation, Script, StageOp};
use crate::subspace::{farthest_basis_vector, inclusion_residual, StateVector, Subspace, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssertionResult {
    pub verdict: Verdict,
    /// Dimension of the forward image of the left-hand side.
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    /// Largest inclusion residual among the inclusions the relation requires.
    pub residual: f64,
    /// On an inclusion failure: the basis vector of the offending side
    /// farthest from the other side.
    pub counterexample: Option<StateVector>,
}

/// Folds the operations of stages `a+1 ..= b` over `s`.
pub fn forward_image(s: &Subspace, script: &Script, a: usize, b: usize, ctx: &InterpContext) -> Result<Subspace> {
    let mut s = s.clone();
    for op in script.ops_between(a, b) {
        s = NumericEngine::step(&s, op, ctx)?;
    }
    Ok(s)
}

/// Evaluation context matching the script's register and gates.
pub fn script_context(script: &Script, tol: ToleranceConfig) -> Result<InterpContext> {
    InterpContext::with(script.n, script.gates.clone(), tol)
}

pub fn check_assertion(
    script: &Script,
    assertion: &Assertion,
    engine: &dyn Engine,
    ctx: &InterpContext,
) -> Result<AssertionResult> {
    let ops: Vec<&StageOp> = script.ops_between(assertion.from, assertion.to).collect();
    let lhs = engine.image(&assertion.lhs, &ops, ctx)?;
    let rhs = engine.denote(&assertion.rhs, ctx)?;
    let eps = ctx.tol.eps_incl;
    // (sub, sup) pairs whose inclusion the relation requires
    let required: Vec<(&Subspace, &Subspace)> = match assertion.relation {
        Relation::Entails => vec![(&lhs, &rhs)],
        Relation::EntailedBy => vec![(&rhs, &lhs)],
        Relation::Equiv => vec![(&lhs, &rhs), (&rhs, &lhs)],
    };
    let mut residual: f64 = 0.0;
    let mut counterexample = None;
    for (sub, sup) in required {
        let r = inclusion_residual(sub, sup)?;
        residual = residual.max(r);
        if r > eps && counterexample.is_none() {
            counterexample = farthest_basis_vector(sub, sup)?.map(|(v, _)| v);
        }
    }
    let ranks_agree = assertion.relation != Relation::Equiv || lhs.rank() == rhs.rank();
    let verdict = if residual <= eps && ranks_agree {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(AssertionResult {
        verdict,
        lhs_dim: lhs.rank(),
        rhs_dim: rhs.rank(),
        residual,
        counterexample,
    })
}

/// `(k, stage name, dim)` of the left-hand side's image at each `@k` from
/// `from` to `to`.
pub fn trace_assertion(
    script: &Script,
    assertion: &Assertion,
    engine: &dyn Engine,
    ctx: &InterpContext,
) -> Result<Vec<(usize, String, usize)>> {
    let mut out = Vec::new();
    for k in assertion.from..=assertion.to {
        let ops: Vec<&StageOp> = script.ops_between(assertion.from, k).collect();
        let name = if k == 0 {
            "input".to_string()
        } else {
            script.stages[k - 1].name.clone()
        };
        out.push((k, name, engine.image(&assertion.lhs, &ops, ctx)?.rank()));
    }
    Ok(out)
}

/// `x` to six significant digits, without trailing zeros.
pub fn format_real(x: f64) -> String {
    if x.abs() < 5e-13 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// `a+bi` with both parts to six significant digits.
pub fn format_complex(z: C64) -> String {
    let re = format_real(z.re);
    let im = format_real(z.im);
    match im.strip_prefix('-') {
        Some(mag) => format!("{re}-{mag}i"),
        None => format!("{re}+{im}i"),
    }
}

/// Computational-basis expansion of a vector over `n` qubits, with the
/// global phase chosen so the largest amplitude is real and positive.
pub fn format_ket(v: &[C64], n: usize) -> String {
    let pivot = v
        .iter()
        .copied()
        .fold(C64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() + 1e-12 { z } else { best });
    let phase = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut out = String::new();
    for (index, &amp) in v.iter().enumerate() {
        let z = amp * phase;
        if z.norm() < 5e-7 {
            continue;
        }
        if !out.is_empty() {
            out.push_str(" + ");
        }
        let _ = write!(out, "({})|{:0width$b}>", format_complex(z), index, width = n);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Report for one assertion: verdict, dimensions, residual, and the
/// counterexample when there is one.
pub fn format_result(assertion: &Assertion, result: &AssertionResult, n: usize) -> String {
    let mut out = format!(
        "[{}] line {}: {}  (dims {} / {}, residual {:.3e})",
        result.verdict.label(),
        assertion.line,
        assertion.text,
        result.lhs_dim,
        result.rhs_dim,
        result.residual,
    );
    if let Some(v) = &result.counterexample {
        let _ = write!(out, "\n  counterexample: {}", format_ket(v.amplitudes(), n));
    } else if result.verdict == Verdict::Fail {
        out.push_str("\n  dimensions differ");
    }
    out
}
