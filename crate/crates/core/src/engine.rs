//! Interchangeable strategies for computing the forward image of a term
//! through circuit operations, selected by name at runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gates::GateRegistry;
use crate::interp::{apply_gate, interpret, measure, InterpContext};
use crate::rewrite::{push_dynamic, simplify, RuleTable};
use crate::logic::Term;
use crate::script::StageOp;
use crate::subspace::{Subspace, ToleranceConfig};

pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Subspace reached from `⟦term⟧` after `ops`, applied in order.
    fn image(&self, term: &Term, ops: &[&StageOp], ctx: &InterpContext) -> Result<Subspace>;

    fn denote(&self, term: &Term, ctx: &InterpContext) -> Result<Subspace> {
        self.image(term, &[], ctx)
    }
}

/// Interprets the term, then transforms the subspace one operation at a time.
#[derive(Debug, Default, Clone, Copy)]
pub struct NumericEngine;

impl NumericEngine {
    pub fn step(s: &Subspace, op: &StageOp, ctx: &InterpContext) -> Result<Subspace> {
        match op {
            StageOp::Gate(app) => apply_gate(s, app, ctx),
            StageOp::Measure { axis, qubit } => measure(s, *axis, *qubit, ctx),
        }
    }
}

impl Engine for NumericEngine {
    fn name(&self) -> &'static str {
        "numeric"
    }

    fn description(&self) -> &'static str {
        "interpret the term, then map the subspace through each operation"
    }

    fn image(&self, term: &Term, ops: &[&StageOp], ctx: &InterpContext) -> Result<Subspace> {
        let mut s = interpret(term, ctx)?;
        for op in ops {
            s = Self::step(&s, op, ctx)?;
        }
        Ok(s)
    }
}

/// Wraps the term in the operations as dynamic connectives, rewrites them
/// away with the validated rule table, simplifies, and interprets the
/// resulting static term.
#[derive(Debug, Clone)]
pub struct SymbolicEngine {
    table: Arc<RuleTable>,
}

impl SymbolicEngine {
    pub fn new(table: Arc<RuleTable>) -> Self {
        SymbolicEngine { table }
    }

    pub fn table(&self) -> &RuleTable {
        &self.table
    }

    /// The static term whose denotation is the forward image.
    pub fn rewrite(&self, term: &Term, ops: &[&StageOp]) -> Term {
        let wrapped = ops.iter().fold(term.clone(), |t, op| op.wrap(t));
        simplify(&push_dynamic(&wrapped, &self.table))
    }
}

impl Engine for SymbolicEngine {
    fn name(&self) -> &'static str {
        "symbolic"
    }

    fn description(&self) -> &'static str {
        "rewrite gates and measurements into a static term, then interpret it"
    }

    fn image(&self, term: &Term, ops: &[&StageOp], ctx: &InterpContext) -> Result<Subspace> {
        interpret(&self.rewrite(term, ops), ctx)
    }
}

/// Engines by name.
#[derive(Clone, Default)]
pub struct EngineRegistry {
    engines: BTreeMap<&'static str, Arc<dyn Engine>>,
}

impl EngineRegistry {
    pub const DEFAULT: &'static str = "numeric";

    /// Both builtin engines. The symbolic engine's table also holds rows
    /// discovered for the non-builtin gates in `gates`.
    pub fn standard(gates: &GateRegistry, tol: ToleranceConfig) -> Result<Self> {
        let mut table = RuleTable::standard(tol)?;
        let builtin = GateRegistry::builtin();
        for gate in gates.iter().filter(|g| !builtin.contains(&g.name)) {
            table.learn_gate(gate, gates, tol)?;
        }
        let mut reg = EngineRegistry::default();
        reg.register(Arc::new(NumericEngine));
        reg.register(Arc::new(SymbolicEngine::new(Arc::new(table))));
        Ok(reg)
    }

    pub fn register(&mut self, engine: Arc<dyn Engine>) {
        self.engines.insert(engine.name(), engine);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Engine>> {
        self.engines.get(name).cloned().ok_or_else(|| {
            Error::InvalidEngine {
                name: name.to_string(),
                known: self.names().join(", "),
            }
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn Engine>> {
        self.engines.values()
    }
}
