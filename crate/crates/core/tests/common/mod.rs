//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

pub mod reference;
pub mod statevec;

use proptest::prelude::*;
use qlv::gates::Axis;
use qlv::linalg::{range_basis, ComplexMatrix, C64};
use qlv::{Subspace, Term, ToleranceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Text of a bundled corpus script.
pub fn corpus(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data: Vec<Vec<C64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    ComplexMatrix::from_rows(&data).unwrap()
}

/// Random subspace of `C^d` with dimension drawn uniformly from `0..=d`.
pub fn random_subspace(rng: &mut impl Rng, d: usize) -> Subspace {
    let k = rng.gen_range(0..=d);
    random_subspace_of_rank(rng, d, k)
}

pub fn random_subspace_of_rank(rng: &mut impl Rng, d: usize, k: usize) -> Subspace {
    let m = if k == 0 {
        ComplexMatrix::zeros(d, 0)
    } else {
        random_matrix(rng, d, k)
    };
    Subspace::from_columns(&m, ToleranceConfig::default()).unwrap()
}

/// Random unitary: the Q factor of a random square matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    loop {
        let q = range_basis(&random_matrix(rng, d, d), 1e-9, 0.0);
        if q.cols() == d {
            return q;
        }
    }
}

const GATES: [(&str, usize); 8] = [
    ("X", 1),
    ("Y", 1),
    ("Z", 1),
    ("H", 1),
    ("CNOT", 2),
    ("CZ", 2),
    ("SWAP", 2),
    ("TOFFOLI", 3),
];

fn random_axis(rng: &mut impl Rng) -> Axis {
    Axis::ALL[rng.gen_range(0..3)]
}

fn distinct_wires(rng: &mut impl Rng, k: usize, n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=n).collect();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(pool.swap_remove(rng.gen_range(0..pool.len())));
    }
    out
}

/// Random term over qubits `1..=n`. Leaves become more likely with depth;
/// `dynamic` allows gate and measurement nodes.
pub fn random_term(rng: &mut impl Rng, n: usize, depth: usize, dynamic: bool) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..20) {
            0 => Term::top(),
            1 => Term::bot(),
            _ => Term::atom(random_axis(rng), rng.gen_range(1..=n)),
        };
    }
    let kinds = if dynamic { 8 } else { 6 };
    let sub = |rng: &mut _| random_term(rng, n, depth - 1, dynamic);
    match rng.gen_range(0..kinds) {
        0 => Term::not(sub(rng)),
        1 => Term::and(sub(rng), sub(rng)),
        2 => Term::or(sub(rng), sub(rng)),
        3 => Term::imp(sub(rng), sub(rng)),
        4 => Term::iff(sub(rng), sub(rng)),
        5 => Term::xor(sub(rng), sub(rng)),
        6 => {
            let fitting: Vec<_> = GATES.iter().filter(|(_, a)| *a <= n).collect();
            let (name, arity) = fitting[rng.gen_range(0..fitting.len())];
            Term::apply(*name, distinct_wires(rng, *arity, n), sub(rng))
        }
        _ => Term::meas(random_axis(rng), rng.gen_range(1..=n), sub(rng)),
    }
}

/// Proptest strategy for terms over qubits `1..=n`.
pub fn arb_term(n: usize, dynamic: bool) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        1 => Just(Term::top()),
        1 => Just(Term::bot()),
        12 => (0..3usize, 1..=n).prop_map(|(a, q)| Term::atom(Axis::ALL[a], q)),
    ];
    leaf.prop_recursive(5, 48, 2, move |inner| {
        let mut options: Vec<BoxedStrategy<Term>> = vec![
            inner.clone().prop_map(Term::not).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Term::and(p, q)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Term::or(p, q)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Term::imp(p, q)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Term::iff(p, q)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Term::xor(p, q)).boxed(),
        ];
        if dynamic {
            let fitting: Vec<(&'static str, usize)> = GATES.iter().copied().filter(|(_, a)| *a <= n).collect();
            options.push(
                (inner.clone(), 0..fitting.len(), Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
                    .prop_map(move |(body, g, perm)| {
                        let (name, arity) = fitting[g];
                        Term::apply(name, perm[..arity].to_vec(), body)
                    })
                    .boxed(),
            );
            options.push(
                (inner, 0..3usize, 1..=n)
                    .prop_map(|(body, a, q)| Term::meas(Axis::ALL[a], q, body))
                    .boxed(),
            );
        }
        proptest::strategy::Union::new(options)
    })
}

/// Whether a rewrite row holds for every wiring at every `n` up to 4, judged
/// by comparing `U P_a U†` with the Boolean projector of the replacement.
pub fn row_holds(rule: &qlv::rewrite::RewriteRule) -> bool {
    use statevec::{commuting_projector, Dense};
    for n in rule.arity..=4 {
        for wires in qlv::rewrite::wire_assignments(rule.arity, n) {
            let u = Dense::of_gate(&rule.gate, &wires, n);
            let moved = u.mul(&Dense::atom_projector(rule.axis, wires[rule.role - 1], n)).mul(&u.adjoint());
            let (_, rhs) = rule.instantiate(&wires);
            if moved.max_diff(&commuting_projector(&rhs, n)) > 1e-12 {
                return false;
            }
        }
    }
    true
}
