//! Reference interpreter built on faer's SVD and the brute-force gate
//! matrices of [`super::statevec`]. Shares no lattice code with the library.

use faer::{Mat, MatRef};
use qlv::linalg::C64;
use qlv::{Term, TermKind};

use super::statevec::Dense;

/// Singular values at most this fraction of `max(σ_1, 1)` count as zero.
const CUT: f64 = 1e-9;

fn rank_of(s: &[f64]) -> usize {
    let top = s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().take_while(|&&x| x > CUT * top).count()
}

fn singular_values(svd: &faer::linalg::solvers::Svd<C64>) -> Vec<f64> {
    svd.S().column_vector().iter().map(|z| z.re).collect()
}

/// Orthonormal basis of the column space.
pub fn range(m: MatRef<'_, C64>) -> Mat<C64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Mat::zeros(m.nrows(), 0);
    }
    let svd = m.thin_svd().expect("svd converges");
    let r = rank_of(&singular_values(&svd));
    svd.U().get(.., ..r).to_owned()
}

/// Orthonormal basis of the orthocomplement of the column space.
pub fn complement(m: MatRef<'_, C64>) -> Mat<C64> {
    let d = m.nrows();
    if m.ncols() == 0 {
        return Mat::identity(d, d);
    }
    let svd = m.svd().expect("svd converges");
    let r = rank_of(&singular_values(&svd));
    svd.U().get(.., r..).to_owned()
}

fn join(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let d = a.nrows();
    let stacked = Mat::from_fn(d, a.ncols() + b.ncols(), |i, j| {
        if j < a.ncols() {
            a[(i, j)]
        } else {
            b[(i, j - a.ncols())]
        }
    });
    range(stacked.as_ref())
}

fn meet(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    complement(join(&complement(a.as_ref()), &complement(b.as_ref())).as_ref())
}

fn to_faer(m: &Dense) -> Mat<C64> {
    Mat::from_fn(m.d, m.d, |i, j| m.a[i * m.d + j])
}

/// Orthonormal basis of `⟦t⟧` over `n` qubits.
pub fn denote(t: &Term, n: usize) -> Mat<C64> {
    let d = 1 << n;
    let rec = |s: &Term| denote(s, n);
    match &t.kind {
        TermKind::Atom(axis, q) => range(to_faer(&Dense::atom_projector(*axis, *q, n)).as_ref()),
        TermKind::Top => Mat::identity(d, d),
        TermKind::Bottom => Mat::zeros(d, 0),
        TermKind::Not(p) => complement(rec(p).as_ref()),
        TermKind::And(p, q) => meet(&rec(p), &rec(q)),
        TermKind::Or(p, q) => join(&rec(p), &rec(q)),
        TermKind::Imp(p, q) => {
            let (a, b) = (rec(p), rec(q));
            complement(meet(&a, &complement(b.as_ref())).as_ref())
        }
        TermKind::Iff(p, q) | TermKind::Xor(p, q) => {
            let (a, b) = (rec(p), rec(q));
            let imp = |x: &Mat<C64>, y: &Mat<C64>| complement(meet(x, &complement(y.as_ref())).as_ref());
            let iff = meet(&imp(&a, &b), &imp(&b, &a));
            if matches!(t.kind, TermKind::Iff(..)) {
                iff
            } else {
                complement(iff.as_ref())
            }
        }
        TermKind::Apply { gate, wires, body } => {
            let u = to_faer(&Dense::of_gate(gate, wires, n));
            range((&u * &rec(body)).as_ref())
        }
        TermKind::Meas { axis, qubit, body } => {
            let b = rec(body);
            let sigma = to_faer(&Dense::of_gate(axis.pauli_gate(), &[*qubit], n));
            join(&b, &(&sigma * &b))
        }
    }
}

/// `B B†` as a row-major dense matrix.
pub fn projector(b: &Mat<C64>) -> Dense {
    let p = b * b.adjoint();
    let d = b.nrows();
    Dense { d, a: (0..d * d).map(|x| p[(x / d, x % d)]).collect() }
}
