//! Closed subspaces of `C^d` and their lattice operations.
//!
//! A [`Subspace`] is stored by an orthonormal basis of itself, an orthonormal
//! basis of its orthocomplement, or both. Complementing swaps the two, so
//! negation is free and the De Morgan form of intersection costs no more than
//! a sum. Whichever side is missing is materialized lazily and cached.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, norm, range_basis, ComplexMatrix, C64};

/// Numerical thresholds shared by every subspace operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative pivot cutoff for rank decisions.
    pub eps_rank: f64,
    /// Bound on `‖M†M − I‖_max` for unitarity and orthonormality checks.
    pub eps_ortho: f64,
    /// Bound on the projection residual in inclusion tests.
    pub eps_incl: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_rank: 1e-9,
            eps_ortho: 1e-9,
            eps_incl: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// Scales all three defaults so that `eps_rank == eps`, keeping their ratios.
    pub fn scaled(eps: f64) -> Result<Self> {
        let d = Self::default();
        let f = eps / d.eps_rank;
        ToleranceConfig {
            eps_rank: d.eps_rank * f,
            eps_ortho: d.eps_ortho * f,
            eps_incl: d.eps_incl * f,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        for (name, v) in [
            ("eps_rank", self.eps_rank),
            ("eps_ortho", self.eps_ortho),
            ("eps_incl", self.eps_incl),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} must be positive, got {v}")));
            }
        }
        if self.eps_rank < f64::EPSILON {
            return Err(Error::InvalidTolerance(format!(
                "eps_rank {} is below machine epsilon",
                self.eps_rank
            )));
        }
        Ok(self)
    }
}

/// A vector in `C^(2^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let d = amplitudes.len();
        if !d.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(d));
        }
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(StateVector(amplitudes))
    }

    /// The computational basis state `|index⟩` in dimension `dim`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

/// A closed subspace of `C^d`.
#[derive(Clone)]
pub struct Subspace {
    dim: usize,
    tol: ToleranceConfig,
    /// Orthonormal basis of the subspace.
    span: OnceLock<Arc<ComplexMatrix>>,
    /// Orthonormal basis of the orthocomplement.
    perp: OnceLock<Arc<ComplexMatrix>>,
}

impl Subspace {
    fn from_span(dim: usize, basis: ComplexMatrix, tol: ToleranceConfig) -> Self {
        debug_assert_eq!(basis.rows(), dim);
        let span = OnceLock::new();
        let _ = span.set(Arc::new(basis));
        Subspace {
            dim,
            tol,
            span,
            perp: OnceLock::new(),
        }
    }

    fn from_perp(dim: usize, annihilator: ComplexMatrix, tol: ToleranceConfig) -> Self {
        debug_assert_eq!(annihilator.rows(), dim);
        let perp = OnceLock::new();
        let _ = perp.set(Arc::new(annihilator));
        Subspace {
            dim,
            tol,
            span: OnceLock::new(),
            perp,
        }
    }

    /// A subspace given by orthonormal bases of itself and of its complement.
    pub(crate) fn from_both(span: ComplexMatrix, perp: ComplexMatrix, tol: ToleranceConfig) -> Self {
        debug_assert_eq!(span.rows(), perp.rows());
        debug_assert_eq!(span.cols() + perp.cols(), span.rows());
        let dim = span.rows();
        let s = Self::from_span(dim, span, tol);
        let _ = s.perp.set(Arc::new(perp));
        s
    }

    /// The zero subspace of `C^dim`.
    pub fn zero(dim: usize, tol: ToleranceConfig) -> Self {
        Self::from_span(dim, ComplexMatrix::zeros(dim, 0), tol)
    }

    /// The whole space `C^dim`.
    pub fn full(dim: usize, tol: ToleranceConfig) -> Self {
        Self::from_perp(dim, ComplexMatrix::zeros(dim, 0), tol)
    }

    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: ComplexMatrix, tol: ToleranceConfig) -> Result<Self> {
        if !basis.is_finite() {
            return Err(Error::NonFinite);
        }
        if crate::linalg::orthonormality_residual(&basis) > tol.eps_ortho {
            return Err(Error::InvalidTolerance(
                "basis columns are not orthonormal within eps_ortho".into(),
            ));
        }
        Ok(Self::from_span(basis.rows(), basis, tol))
    }

    /// Column space of an arbitrary `d x m` matrix, with relative rank cutoff.
    pub fn from_columns(m: &ComplexMatrix, tol: ToleranceConfig) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_span(m.rows(), range_basis(m, tol.eps_rank, 0.0), tol))
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subspace itself.
    pub fn rank(&self) -> usize {
        match (self.span.get(), self.perp.get()) {
            (Some(b), _) => b.cols(),
            (None, Some(a)) => self.dim - a.cols(),
            (None, None) => unreachable!("subspace without representation"),
        }
    }

    pub fn tolerance(&self) -> ToleranceConfig {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: ToleranceConfig) -> Self {
        self.tol = tol;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Orthonormal basis, `d x rank`. Computed on first use when only the
    /// complement is stored.
    pub fn basis(&self) -> &ComplexMatrix {
        self.span.get_or_init(|| {
            let a = self.perp.get().expect("subspace without representation");
            Arc::new(orthocomplement_of(a, self.tol))
        })
    }

    /// Orthonormal basis of the orthocomplement, `d x (d - rank)`.
    pub fn complement_basis(&self) -> &ComplexMatrix {
        self.perp.get_or_init(|| {
            let b = self.span.get().expect("subspace without representation");
            Arc::new(orthocomplement_of(b, self.tol))
        })
    }

    /// Orthogonal projector `B B†`.
    pub fn projector(&self) -> ComplexMatrix {
        let b = self.basis();
        b * &b.adjoint()
    }

    /// Applies a linear map to every stored basis. The map must be unitary,
    /// since it is applied to the complement as well.
    pub(crate) fn map_unitary(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let span = OnceLock::new();
        let perp = OnceLock::new();
        if let Some(b) = self.span.get() {
            let _ = span.set(Arc::new(f(b)));
        }
        if let Some(a) = self.perp.get() {
            let _ = perp.set(Arc::new(f(a)));
        }
        Subspace {
            dim: self.dim,
            tol: self.tol,
            span,
            perp,
        }
    }

    fn check_dim(&self, other: &Subspace) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(rank {} of {})", self.rank(), self.dim)
    }
}

fn orthocomplement_of(b: &ComplexMatrix, tol: ToleranceConfig) -> ComplexMatrix {
    // columns are orthonormal, so the unit reference keeps noise out of the rank
    kernel_basis(&b.adjoint(), tol.eps_rank, 1.0)
}

/// `span(B) ∩ span(C)` for orthonormal `B`, `C`: the vectors `B y` whose
/// component outside `span(C)` vanishes.
fn meet_of_spans(b: &ComplexMatrix, c: &ComplexMatrix, tol: ToleranceConfig) -> ComplexMatrix {
    if b.cols() == 0 || c.cols() == 0 {
        return ComplexMatrix::zeros(b.rows(), 0);
    }
    let mut outside = b.clone();
    let coeffs = c.adjoint_mul(b);
    let along = c * &coeffs;
    for (dst, src) in outside.columns_mut().zip(along.columns()) {
        for (x, y) in dst.iter_mut().zip(src) {
            *x -= y;
        }
    }
    let y = kernel_basis(&outside, tol.eps_rank, 1.0);
    b * &y
}

/// `span(B) ∩ span(A)⊥` for orthonormal `B`, `A`.
fn meet_span_perp(b: &ComplexMatrix, a: &ComplexMatrix, tol: ToleranceConfig) -> ComplexMatrix {
    if b.cols() == 0 || a.cols() == 0 {
        return b.clone();
    }
    let y = kernel_basis(&a.adjoint_mul(b), tol.eps_rank, 1.0);
    b * &y
}

/// Smallest subspace containing all `vectors`; the zero subspace of `C^dim`
/// when the list is empty.
pub fn span(dim: usize, vectors: &[StateVector], tol: ToleranceConfig) -> Result<Subspace> {
    let mut cols: Vec<&[C64]> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        cols.push(v.amplitudes());
    }
    let m = ComplexMatrix::from_columns(dim, &cols)?;
    Subspace::from_columns(&m, tol)
}

/// Orthocomplement `S⊥`.
pub fn complement(s: &Subspace) -> Subspace {
    Subspace {
        dim: s.dim,
        tol: s.tol,
        span: s.perp.clone(),
        perp: s.span.clone(),
    }
}

/// `span(B) ⊕ span(C)` for orthonormal `B`, `C`: `B` extended by an
/// orthonormal basis of the part of `C` outside `span(B)`.
fn join_of_spans(b: &ComplexMatrix, c: &ComplexMatrix, tol: ToleranceConfig) -> ComplexMatrix {
    if c.cols() == 0 {
        return b.clone();
    }
    if b.cols() == 0 {
        return c.clone();
    }
    let project_out = |m: &mut ComplexMatrix, coeffs: &ComplexMatrix| {
        let along = b * coeffs;
        for (dst, src) in m.columns_mut().zip(along.columns()) {
            for (x, y) in dst.iter_mut().zip(src) {
                *x -= y;
            }
        }
    };
    let mut rest = c.clone();
    project_out(&mut rest, &b.adjoint_mul(c));
    let mut q = range_basis(&rest, tol.eps_rank, 1.0);
    // cancellation in small residuals can leave Q slightly inside span(B)
    let leak = b.adjoint_mul(&q);
    if leak.max_abs() > 1e-3 * tol.eps_ortho {
        project_out(&mut q, &leak);
        q = range_basis(&q, tol.eps_rank, 1.0);
    }
    b.hstack(&q)
}

/// Which stored side of each operand a sum is computed from.
#[derive(Clone, Copy)]
enum Side {
    Span,
    Perp,
}

fn side(s: &Subspace, side: Side) -> Option<&ComplexMatrix> {
    match side {
        Side::Span => s.span.get().map(|m| m.as_ref()),
        Side::Perp => s.perp.get().map(|m| m.as_ref()),
    }
}

/// Rough flop count of a sum from the given sides of widths `p`, `q` in `C^d`.
fn sum_cost(d: usize, (a, p): (Side, usize), (b, q): (Side, usize)) -> usize {
    let (lo, hi) = (p.min(q), p.max(q));
    match (a, b) {
        (Side::Span, Side::Span) => d * lo * (hi + 2 * lo),
        (Side::Perp, Side::Perp) => d * lo * (hi + lo),
        _ => d * lo * hi + lo * hi * lo.min(hi),
    }
}

/// Closed linear sum `S ⊕ T`.
pub fn sum(s: &Subspace, t: &Subspace) -> Result<Subspace> {
    s.check_dim(t)?;
    let tol = s.tol;
    let d = s.dim;
    if s.is_zero() || t.is_full() {
        return Ok(t.clone().with_tolerance(tol));
    }
    if t.is_zero() || s.is_full() {
        return Ok(s.clone());
    }
    let mut best: Option<(usize, Side, Side)> = None;
    for a in [Side::Span, Side::Perp] {
        for b in [Side::Span, Side::Perp] {
            if let (Some(x), Some(y)) = (side(s, a), side(t, b)) {
                let cost = sum_cost(d, (a, x.cols()), (b, y.cols()));
                if best.is_none_or(|(c, ..)| cost < c) {
                    best = Some((cost, a, b));
                }
            }
        }
    }
    let (_, a, b) = best.expect("subspace without representation");
    let (x, y) = (side(s, a).unwrap(), side(t, b).unwrap());
    Ok(match (a, b) {
        (Side::Span, Side::Span) => {
            let (big, small) = if x.cols() >= y.cols() { (x, y) } else { (y, x) };
            Subspace::from_span(d, join_of_spans(big, small, tol), tol)
        }
        (Side::Perp, Side::Perp) => {
            let (small, big) = if x.cols() <= y.cols() { (x, y) } else { (y, x) };
            Subspace::from_perp(d, meet_of_spans(small, big, tol), tol)
        }
        // (span B ⊕ span(A)⊥)⊥ = span(A) ∩ span(B)⊥
        (Side::Span, Side::Perp) => Subspace::from_perp(d, meet_span_perp(y, x, tol), tol),
        (Side::Perp, Side::Span) => Subspace::from_perp(d, meet_span_perp(x, y, tol), tol),
    })
}

/// Intersection `S ∩ T`, computed as `(S⊥ ⊕ T⊥)⊥`.
pub fn intersect(s: &Subspace, t: &Subspace) -> Result<Subspace> {
    Ok(complement(&sum(&complement(s), &complement(t))?))
}

/// Largest projection residual `‖P_T b − b‖` over an orthonormal basis of `S`.
///
/// When `S` is only known through its complement, the residual is measured on
/// the equivalent inclusion `T⊥ ⊆ S⊥`.
pub fn inclusion_residual(s: &Subspace, t: &Subspace) -> Result<f64> {
    s.check_dim(t)?;
    if s.is_zero() || t.is_full() {
        return Ok(0.0);
    }
    Ok(match (s.span.get(), t.perp.get()) {
        (Some(b), Some(a)) => max_coeff_norm(a, b),
        (Some(b), None) => max_outside_norm(t.basis(), b),
        (None, Some(a_t)) => {
            // T⊥ ⊆ S⊥ with both given by bases
            let a_s = s.perp.get().expect("subspace without representation");
            max_outside_norm(a_s, a_t)
        }
        (None, None) => {
            let cheaper_to_open_s = s.dim - s.rank() <= t.rank();
            if cheaper_to_open_s {
                max_outside_norm(t.span.get().expect("repr"), s.basis())
            } else {
                let a_s = s.perp.get().expect("repr");
                max_outside_norm(a_s, t.complement_basis())
            }
        }
    })
}

/// Norm of `A† b` per column `b` of `vectors`; the distance of `b` from `span(A)⊥`.
fn max_coeff_norm(a: &ComplexMatrix, vectors: &ComplexMatrix) -> f64 {
    let coeffs = a.adjoint_mul(vectors);
    coeffs.columns().map(norm).fold(0.0, f64::max)
}

/// Distance of each column of `vectors` from `span(basis)`.
fn max_outside_norm(basis: &ComplexMatrix, vectors: &ComplexMatrix) -> f64 {
    outside_norms(basis, vectors).into_iter().fold(0.0, f64::max)
}

fn outside_norms(basis: &ComplexMatrix, vectors: &ComplexMatrix) -> Vec<f64> {
    let coeffs = basis.adjoint_mul(vectors);
    let along = basis * &coeffs;
    vectors
        .columns()
        .zip(along.columns())
        .map(|(v, p)| {
            v.iter()
                .zip(p)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// `S ⊆ T` within `eps_incl`.
pub fn includes(s: &Subspace, t: &Subspace) -> Result<bool> {
    Ok(inclusion_residual(s, t)? <= s.tol.eps_incl)
}

/// Mutual inclusion.
pub fn equal(s: &Subspace, t: &Subspace) -> Result<bool> {
    Ok(s.rank() == t.rank() && includes(s, t)? && includes(t, s)?)
}

/// The basis vector of `S` farthest from `T`, with its distance. `None` when
/// `S` is the zero subspace.
pub fn farthest_basis_vector(s: &Subspace, t: &Subspace) -> Result<Option<(StateVector, f64)>> {
    s.check_dim(t)?;
    let b = s.basis();
    if b.cols() == 0 {
        return Ok(None);
    }
    let dists = if t.is_full() {
        vec![0.0; b.cols()]
    } else if let Some(a) = t.perp.get() {
        a.adjoint_mul(b).columns().map(norm).collect()
    } else {
        outside_norms(t.basis(), b)
    };
    let (j, r) = dists
        .iter()
        .copied()
        .enumerate()
        .fold((0, -1.0), |acc, (j, r)| if r > acc.1 { (j, r) } else { acc });
    Ok(Some((StateVector(b.col(j).to_vec()), r)))
}

/// `‖M†M − I‖_max ≤ eps_ortho` for a square matrix.
pub fn is_unitary(m: &ComplexMatrix, tol: ToleranceConfig) -> bool {
    m.is_square() && m.is_finite() && crate::linalg::orthonormality_residual(m) <= tol.eps_ortho
}

/// Image `U·S` of a subspace under a `d x d` unitary.
pub fn apply_unitary(u: &ComplexMatrix, s: &Subspace) -> Result<Subspace> {
    if u.rows() != s.dim || u.cols() != s.dim {
        return Err(Error::DimensionMismatch {
            expected: s.dim,
            found: u.rows(),
        });
    }
    if !is_unitary(u, s.tol) {
        return Err(Error::NotUnitary);
    }
    Ok(s.map_unitary(|m| u * m))
}

/// Measurement closure `S ⊕ O·S` for a Hermitian involution `O`.
pub fn closure(s: &Subspace, observable: &ComplexMatrix) -> Result<Subspace> {
    check_observable(observable, s.tol)?;
    if observable.rows() != s.dim {
        return Err(Error::DimensionMismatch {
            expected: s.dim,
            found: observable.rows(),
        });
    }
    let image = s.map_unitary(|m| observable * m);
    sum(s, &image)
}

pub(crate) fn check_observable(o: &ComplexMatrix, tol: ToleranceConfig) -> Result<()> {
    if !o.is_square() || !o.is_finite() {
        return Err(Error::NotInvolution);
    }
    let hermitian = o.max_abs_diff(&o.adjoint()) <= tol.eps_ortho;
    let involutive = (o * o).max_abs_diff(&ComplexMatrix::identity(o.rows())) <= tol.eps_ortho;
    if hermitian && involutive {
        Ok(())
    } else {
        Err(Error::NotInvolution)
    }
}
