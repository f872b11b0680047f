//! Truncated left-regular representation on `span{U^k : |k|_∞ ≤ R}`.
//!
//! Entry `(m, k)` of the matrix of `u` is the coefficient of `U^m` in `u·U^k`,
//! i.e. `u_{m-k} e^{-2iπ c(m-k, k)}`. Functions of an element are computed on
//! the Hermitian eigendecomposition of this matrix and read back from the
//! image of the cyclic vector `U^0 = 1`. Coefficients near the boundary of
//! the box are polluted by the compression; the `trusted_radius` of every
//! result marks the interior that converges as `R` grows.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::algebra::{twist, AlgebraElement, DEFAULT_DROP_TOL};
use crate::error::{Error, Result};
use crate::lattice::{box_position, lattice_box, MultiIndex, ThetaMatrix};

/// Relative positivity threshold: `λ_min > POSITIVITY_RATIO · λ_max`.
pub const POSITIVITY_RATIO: f64 = 1e-10;
/// Largest condition number accepted by [`invert`].
pub const DEFAULT_CONDITION_BOUND: f64 = 1e12;
const SELFADJOINT_TOL: f64 = 1e-12;

/// Width of the untrusted boundary layer for a box of radius `r`.
pub fn boundary_margin(r: i64) -> i64 {
    (r / 4).max(1)
}

/// Interior radius on which read-back coefficients are trusted.
pub fn trusted_radius(r: i64) -> i64 {
    (r - boundary_margin(r)).max(0)
}

#[derive(Debug, Clone)]
pub struct TruncatedRep {
    pub radius: i64,
    pub dim: usize,
    pub matrix: DMatrix<Complex64>,
    /// Set when the box is smaller than the element's own radius.
    pub undersized: bool,
}

/// Points of the box in matrix order.
pub fn basis_points(n: usize, r: i64) -> Vec<MultiIndex> {
    lattice_box(n, r).collect()
}

pub fn represent(u: &AlgebraElement, r: i64) -> Result<TruncatedRep> {
    if r < 0 {
        return Err(Error::invalid("representation radius must be nonnegative"));
    }
    let n = u.dim();
    let points = basis_points(n, r);
    let dim = points.len();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    fill_block(&mut matrix, u, &points, r, 0, 0);
    Ok(TruncatedRep {
        radius: r,
        dim,
        matrix,
        undersized: u.support_radius() > r,
    })
}

fn fill_block(
    matrix: &mut DMatrix<Complex64>,
    u: &AlgebraElement,
    points: &[MultiIndex],
    r: i64,
    row0: usize,
    col0: usize,
) {
    let theta = u.theta();
    for (col, k) in points.iter().enumerate() {
        for (d, c) in u.iter() {
            let m = d + k;
            if let Some(row) = box_position(&m, r) {
                matrix[(row0 + row, col0 + col)] = c * twist(theta.phase(d, k));
            }
        }
    }
}

fn element_from_column(
    theta: &Arc<ThetaMatrix>,
    points: &[MultiIndex],
    column: impl Fn(usize) -> Complex64,
    r: i64,
) -> AlgebraElement {
    let coeffs: Vec<_> = points
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), column(i)))
        .filter(|(_, c)| c.norm() >= DEFAULT_DROP_TOL)
        .collect();
    AlgebraElement::from_coeffs(theta.clone(), coeffs)
        .expect("read-back coefficients are finite")
        .with_radius(r)
}

/// Largest singular value of the truncated representation: a lower bound
/// for the C*-norm, nondecreasing in `r`.
pub fn norm_estimate(u: &AlgebraElement, r: i64) -> f64 {
    if u.is_zero() {
        return 0.0;
    }
    // c·U^k is c times a unitary
    if let Some((_, c)) = u.as_monomial() {
        return c.norm();
    }
    let rep = represent(u, r.max(0)).expect("nonnegative radius");
    rep.matrix
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Scalar functions available to the functional calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFunction {
    Exp,
    Log,
    Sqrt,
    Power(f64),
    Inverse,
}

impl ScalarFunction {
    fn needs_positive_spectrum(self) -> bool {
        !matches!(self, ScalarFunction::Exp)
    }

    fn eval(self, x: f64) -> f64 {
        match self {
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::Log => x.ln(),
            ScalarFunction::Sqrt => x.sqrt(),
            ScalarFunction::Power(p) => x.powf(p),
            ScalarFunction::Inverse => 1.0 / x,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CalculusResult {
    pub element: AlgebraElement,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trusted_radius: i64,
}

struct HermitianSpectrum {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianSpectrum {
    fn new(matrix: DMatrix<Complex64>) -> Self {
        let eig = SymmetricEigen::new(matrix);
        HermitianSpectrum {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_positive(&self, what: &str) -> Result<()> {
        let (lo, hi) = (self.min(), self.max());
        if !(hi > 0.0 && lo > POSITIVITY_RATIO * hi) {
            return Err(Error::domain(
                format!("{what}: spectrum is not positive (min eigenvalue {lo:e}, max {hi:e})"),
                lo,
            ));
        }
        Ok(())
    }

    /// Column `col` of `f(M) = V f(Λ) V^*`.
    fn apply_column(&self, f: ScalarFunction, col: usize) -> DVector<Complex64> {
        let dim = self.vectors.nrows();
        let mut out = DVector::<Complex64>::zeros(dim);
        for (l, &lam) in self.values.iter().enumerate() {
            let w = self.vectors[(col, l)].conj() * f.eval(lam);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            out.axpy(w, &self.vectors.column(l), Complex64::new(1.0, 0.0));
        }
        out
    }
}

fn check_selfadjoint(u: &AlgebraElement) -> Result<()> {
    let defect = u.selfadjoint_defect();
    if defect > SELFADJOINT_TOL * u.max_abs().max(1.0) {
        return Err(Error::invalid(format!(
            "functional calculus needs a selfadjoint element (‖u - u*‖ = {defect:e})"
        )));
    }
    Ok(())
}

/// `f(u)` for selfadjoint `u`, truncated to radius `r`.
pub fn functional_calculus(
    u: &AlgebraElement,
    f: ScalarFunction,
    r: i64,
) -> Result<CalculusResult> {
    check_selfadjoint(u)?;
    let rep = represent(u, r)?;
    let spec = HermitianSpectrum::new(rep.matrix);
    if f.needs_positive_spectrum() {
        spec.check_positive("functional calculus")?;
    }
    let points = basis_points(u.dim(), r);
    let origin = box_position(&MultiIndex::zeros(u.dim()), r).expect("origin in box");
    let col = spec.apply_column(f, origin);
    // Truncation leaves a small antihermitian part near the box boundary.
    let raw = element_from_column(u.theta(), &points, |i| col[i], r);
    let element = raw.try_add(&raw.involution())?.scale_real(0.5);
    Ok(CalculusResult {
        element,
        min_eigenvalue: spec.min(),
        max_eigenvalue: spec.max(),
        trusted_radius: trusted_radius(r),
    })
}

#[derive(Debug, Clone)]
pub struct InverseResult {
    pub element: AlgebraElement,
    /// `max |(uv - 1)_k|` over the trusted interior.
    pub residual: f64,
    pub condition: f64,
    pub trusted_radius: i64,
}

pub fn invert(u: &AlgebraElement, r: i64) -> Result<InverseResult> {
    invert_with_bound(u, r, DEFAULT_CONDITION_BOUND)
}

pub fn invert_with_bound(u: &AlgebraElement, r: i64, condition_bound: f64) -> Result<InverseResult> {
    let rep = represent(u, r)?;
    let sv = rep.matrix.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= condition_bound) {
        return Err(Error::domain(
            format!("element is numerically singular (condition number {condition:e})"),
            condition,
        ));
    }
    let points = basis_points(u.dim(), r);
    let origin = box_position(&MultiIndex::zeros(u.dim()), r).expect("origin in box");
    let mut rhs = DVector::<Complex64>::zeros(rep.dim);
    rhs[origin] = Complex64::new(1.0, 0.0);
    let x = rep
        .matrix
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::domain("LU solve failed", condition))?;
    let v = element_from_column(u.theta(), &points, |i| x[i], r);
    let trusted = trusted_radius(r);
    let one = AlgebraElement::one(u.theta().clone());
    let residual = u.multiply(&v)?.max_abs_diff_within(&one, trusted);
    Ok(InverseResult {
        element: v,
        residual,
        condition,
        trusted_radius: trusted,
    })
}

/// Positive invertible `n×n` matrix over the algebra with selfadjoint,
/// symmetric entries.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    n: usize,
    entries: Vec<AlgebraElement>,
    /// Minimum eigenvalue of the truncated block representation.
    pub min_eigenvalue: f64,
    pub certificate_radius: i64,
}

impl MetricTensor {
    /// Validates the entries and certifies positivity on the box of radius `r`.
    pub fn new(rows: Vec<Vec<AlgebraElement>>, r: i64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("metric must be nonempty"));
        }
        let theta = rows[0][0].theta().clone();
        if theta.dim() != n {
            return Err(Error::invalid(format!(
                "metric is {n}×{n} but the torus dimension is {}",
                theta.dim()
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::invalid("metric must be square"));
            }
            for e in row {
                if !crate::algebra::same_theta(e.theta(), &theta) {
                    return Err(Error::invalid("metric entries over different deformations"));
                }
                entries.push(e);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let e = &entries[i * n + j];
                check_selfadjoint(e)?;
                let d = e.max_abs_diff(&entries[j * n + i]);
                if d > SELFADJOINT_TOL * e.max_abs().max(1.0) {
                    return Err(Error::invalid(format!(
                        "metric is not symmetric at ({i},{j}): defect {d:e}"
                    )));
                }
            }
        }
        let mut g = MetricTensor {
            n,
            entries,
            min_eigenvalue: 0.0,
            certificate_radius: r,
        };
        let spec = HermitianSpectrum::new(g.block_matrix(r));
        spec.check_positive("metric")?;
        g.min_eigenvalue = spec.min();
        Ok(g)
    }

    /// `c·δ_{ij}` with `c` a (selfadjoint) element.
    pub fn conformal(c: &AlgebraElement, r: i64) -> Result<Self> {
        let n = c.dim();
        let zero = AlgebraElement::zero(c.theta().clone());
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { c.clone() } else { zero.clone() })
                    .collect()
            })
            .collect();
        Self::new(rows, r)
    }

    pub fn identity(theta: Arc<ThetaMatrix>, r: i64) -> Result<Self> {
        Self::conformal(&AlgebraElement::one(theta), r)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        self.entries[0].theta()
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.n + j]
    }

    fn block_matrix(&self, r: i64) -> DMatrix<Complex64> {
        let points = basis_points(self.n, r);
        let dim = points.len();
        let mut m = DMatrix::<Complex64>::zeros(self.n * dim, self.n * dim);
        for i in 0..self.n {
            for j in 0..self.n {
                fill_block(&mut m, self.entry(i, j), &points, r, i * dim, j * dim);
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct MetricDeterminant {
    /// `ν = √det(g) = exp(½ Tr log g)`.
    pub nu: AlgebraElement,
    pub nu_inv: AlgebraElement,
    pub inverse_residual: f64,
    pub trusted_radius: i64,
}

pub fn metric_det_sqrt(g: &MetricTensor, r: i64) -> Result<MetricDeterminant> {
    let n = g.dim();
    let points = basis_points(n, r);
    let dim = points.len();
    let origin = box_position(&MultiIndex::zeros(n), r).expect("origin in box");
    let spec = HermitianSpectrum::new(g.block_matrix(r));
    spec.check_positive("metric")?;
    let mut tr = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..n {
        let col = spec.apply_column(ScalarFunction::Log, i * dim + origin);
        for (m, t) in tr.iter_mut().enumerate() {
            *t += col[i * dim + m];
        }
    }
    let half_log = element_from_column(g.theta(), &points, |m| tr[m] * 0.5, r);
    // symmetrize away rounding so the exponential sees a selfadjoint input
    let half_log = (&half_log + &half_log.involution()).scale_real(0.5);
    let nu = functional_calculus(&half_log, ScalarFunction::Exp, r)?.element;
    let inv = invert(&nu, r)?;
    Ok(MetricDeterminant {
        nu,
        nu_inv: inv.element,
        inverse_residual: inv.residual,
        trusted_radius: trusted_radius(r),
    })
}

#[derive(Debug, Clone)]
pub struct MetricInverse {
    pub inverse: MetricTensor,
    /// `max_{i,k} ‖Σ_j g_{ij} g^{jk} - δ_{ik}‖` over the trusted interior.
    pub residual: f64,
    pub trusted_radius: i64,
}

pub fn metric_inverse(g: &MetricTensor, r: i64) -> Result<MetricInverse> {
    let n = g.dim();
    let points = basis_points(n, r);
    let dim = points.len();
    let origin = box_position(&MultiIndex::zeros(n), r).expect("origin in box");
    let spec = HermitianSpectrum::new(g.block_matrix(r));
    spec.check_positive("metric")?;
    let mut entries = vec![AlgebraElement::zero(g.theta().clone()); n * n];
    for j in 0..n {
        let col = spec.apply_column(ScalarFunction::Inverse, j * dim + origin);
        for i in 0..n {
            entries[i * n + j] = element_from_column(g.theta(), &points, |m| col[i * dim + m], r);
        }
    }
    let trusted = trusted_radius(r);
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let mut acc = AlgebraElement::zero(g.theta().clone());
            for j in 0..n {
                acc = &acc + &g.entry(i, j).multiply(&entries[j * n + k])?;
            }
            let target = if i == k {
                AlgebraElement::one(g.theta().clone())
            } else {
                AlgebraElement::zero(g.theta().clone())
            };
            residual = residual.max(acc.max_abs_diff_within(&target, trusted));
        }
    }
    let inverse = MetricTensor {
        n,
        entries,
        min_eigenvalue: 1.0 / spec.max(),
        certificate_radius: r,
    };
    Ok(MetricInverse {
        inverse,
        residual,
        trusted_radius: trusted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn theta2(t: f64) -> Arc<ThetaMatrix> {
        Arc::new(ThetaMatrix::two_dim(t))
    }

    /// `1 + a(U^{e1} + U^{-e1})`.
    fn cosine(theta: Arc<ThetaMatrix>, a: f64) -> AlgebraElement {
        let n = theta.dim();
        let e1 = MultiIndex::unit(n, 0);
        AlgebraElement::from_coeffs(
            theta,
            [(MultiIndex::zeros(n), c(1.0)), (e1.clone(), c(a)), (-&e1, c(a))],
        )
        .unwrap()
    }

    #[test]
    fn identity_represents_as_identity() {
        let one = AlgebraElement::one(theta2(0.3));
        let rep = represent(&one, 2).unwrap();
        assert_eq!(rep.matrix, DMatrix::identity(25, 25));
        assert!(represent(&one, -1).is_err());
    }

    #[test]
    fn generator_is_twisted_shift() {
        let t = theta2(0.3);
        let u = AlgebraElement::basis(t, [1, 0].into());
        let rep = represent(&u, 2).unwrap();
        for col in 0..rep.dim {
            let nz: Vec<_> = rep.matrix.column(col).iter().filter(|z| z.norm() > 0.0).copied().collect();
            assert!(nz.len() <= 1);
            for z in nz {
                assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn norm_of_unitaries_and_scalars() {
        let t = theta2(0.3);
        assert_eq!(norm_estimate(&AlgebraElement::basis(t.clone(), [2, -1].into()), 3), 1.0);
        assert_eq!(norm_estimate(&AlgebraElement::scalar(t, Complex64::new(3.0, 4.0)), 3), 5.0);
    }

    #[test]
    fn laurent_norm_approaches_two() {
        let t = Arc::new(ThetaMatrix::zero(1));
        let u = &cosine(t.clone(), 1.0) - &AlgebraElement::one(t);
        let mut last = 0.0;
        for r in [2, 4, 8, 16, 32] {
            let est = norm_estimate(&u, r);
            assert!(est >= last - 1e-12);
            assert!(est <= 2.0 + 1e-12);
            last = est;
        }
        assert!(2.0 - last < 0.01);
    }

    #[test]
    fn scalar_functional_calculus() {
        let t = theta2(0.25);
        let log1 = functional_calculus(&AlgebraElement::one(t.clone()), ScalarFunction::Log, 2).unwrap();
        assert!(log1.element.max_abs() < 1e-14);
        let four = AlgebraElement::scalar(t.clone(), c(4.0));
        let s = functional_calculus(&four, ScalarFunction::Sqrt, 2).unwrap();
        assert!(s.element.max_abs_diff(&AlgebraElement::scalar(t, c(2.0))) < 1e-13);
    }

    #[test]
    fn functional_calculus_rejects_bad_inputs() {
        let t = theta2(0.25);
        let nonsa = AlgebraElement::monomial(t.clone(), [1, 0].into(), c(1.0));
        assert!(matches!(
            functional_calculus(&nonsa, ScalarFunction::Exp, 2),
            Err(Error::InvalidArgument(_))
        ));
        let neg = AlgebraElement::scalar(t, c(-1.0));
        match functional_calculus(&neg, ScalarFunction::Log, 2) {
            Err(Error::Domain { diagnostic, .. }) => assert_eq!(diagnostic, Some(-1.0)),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn inverse_matches_neumann_series() {
        let t = theta2(0.25);
        let u = cosine(t.clone(), 0.1);
        let inv = functional_calculus(&u, ScalarFunction::Inverse, 10).unwrap();
        // oracle: Σ (-1)^m w^m with w = 0.1(U^{e1}+U^{-e1})
        let w = &u - &AlgebraElement::one(t.clone());
        let mut term = AlgebraElement::one(t.clone());
        let mut sum = term.clone();
        for m in 1..40 {
            term = term.multiply(&w).unwrap();
            sum.add_scaled(&term, c(if m % 2 == 0 { 1.0 } else { -1.0 }));
        }
        let d = inv.element.max_abs_diff_within(&sum, inv.trusted_radius);
        assert!(d < 1e-8, "neumann mismatch {d:e}");
    }

    #[test]
    fn invert_geometric_series() {
        let t = Arc::new(ThetaMatrix::zero(1));
        let u = AlgebraElement::from_coeffs(t.clone(), [([0].into(), c(1.0)), ([1].into(), c(0.3))]).unwrap();
        let inv = invert(&u, 8).unwrap();
        assert!(inv.residual < 1e-8);
        for m in 0..=inv.trusted_radius {
            assert_abs_diff_eq!(inv.element.coeff(&[m].into()).re, (-0.3f64).powi(m as i32), epsilon = 1e-12);
        }
        let three = AlgebraElement::scalar(t.clone(), c(3.0));
        let inv = invert(&three, 3).unwrap();
        assert!(inv.element.max_abs_diff(&AlgebraElement::scalar(t.clone(), c(1.0 / 3.0))) < 1e-15);
        assert!(matches!(invert(&AlgebraElement::zero(t), 3), Err(Error::Domain { .. })));
    }

    #[test]
    fn metric_identity_and_diagonal() {
        let t = theta2(0.2);
        let g = MetricTensor::identity(t.clone(), 3).unwrap();
        let d = metric_det_sqrt(&g, 3).unwrap();
        let one = AlgebraElement::one(t.clone());
        assert!(d.nu.max_abs_diff(&one) < 1e-13);
        assert!(d.nu_inv.max_abs_diff(&one) < 1e-13);

        let four = AlgebraElement::scalar(t.clone(), c(4.0));
        let g = MetricTensor::conformal(&four, 3).unwrap();
        let d = metric_det_sqrt(&g, 3).unwrap();
        assert!(d.nu.max_abs_diff(&four) < 1e-12);

        let zero = AlgebraElement::zero(t.clone());
        let g = MetricTensor::new(vec![vec![four.clone(), zero.clone()], vec![zero.clone(), one.clone()]], 3).unwrap();
        let inv = metric_inverse(&g, 3).unwrap();
        assert!(inv.inverse.entry(0, 0).max_abs_diff(&AlgebraElement::scalar(t.clone(), c(0.25))) < 1e-13);
        assert!(inv.inverse.entry(1, 1).max_abs_diff(&one) < 1e-13);
        assert!(inv.inverse.entry(0, 1).max_abs() < 1e-13);
    }

    #[test]
    fn metric_validation() {
        let t = theta2(0.2);
        let one = AlgebraElement::one(t.clone());
        let neg = AlgebraElement::scalar(t.clone(), c(-1.0));
        let zero = AlgebraElement::zero(t.clone());
        assert!(matches!(
            MetricTensor::new(vec![vec![one.clone(), zero.clone()], vec![zero.clone(), neg]], 2),
            Err(Error::Domain { .. })
        ));
        let u1 = AlgebraElement::basis(t.clone(), [1, 0].into());
        assert!(MetricTensor::new(vec![vec![one.clone(), u1.clone()], vec![u1, one.clone()]], 2).is_err());
        assert!(MetricTensor::new(vec![vec![one]], 2).is_err());
    }
}
