//! Operators on `𝒜_θ`: lattice-symbol ψDOs `P_ρ u = Σ_k u_k ρ(k) U^k`,
//! differential operators, the Bessel multipliers `Λ^s` and the
//! Laplace–Beltrami operator of a metric.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::algebra::{same_theta, AlgebraElement};
use crate::error::{Error, Result};
use crate::gns::{functional_calculus, metric_det_sqrt, metric_inverse, MetricTensor, ScalarFunction};
use crate::lattice::{box_position, lattice_box, MultiIndex, ThetaMatrix};
use crate::symbols::{PolynomialSymbol, Symbol};
use crate::toroidal::ToroidalSymbol;

/// `k ↦ ρ(k) ∈ 𝒜_θ` on the lattice.
pub trait LatticeSymbol: Send + Sync {
    fn theta(&self) -> &Arc<ThetaMatrix>;
    fn at(&self, k: &MultiIndex) -> Result<AlgebraElement>;
}

impl<S: Symbol> LatticeSymbol for S {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        Symbol::theta(self)
    }

    fn at(&self, k: &MultiIndex) -> Result<AlgebraElement> {
        self.eval(&k.to_f64())
    }
}

impl LatticeSymbol for ToroidalSymbol {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        ToroidalSymbol::theta(self)
    }

    fn at(&self, k: &MultiIndex) -> Result<AlgebraElement> {
        self.get(k).cloned().ok_or_else(|| Error::Domain {
            message: format!("lattice point {k:?} lies outside the toroidal table"),
            diagnostic: Some(k.sup_norm() as f64),
        })
    }
}

type LatticeFnBox = dyn Fn(&MultiIndex) -> AlgebraElement + Send + Sync;

/// Lattice symbol given by a closure.
pub struct LatticeFn {
    theta: Arc<ThetaMatrix>,
    f: Box<LatticeFnBox>,
}

impl LatticeFn {
    pub fn new(theta: Arc<ThetaMatrix>, f: impl Fn(&MultiIndex) -> AlgebraElement + Send + Sync + 'static) -> Self {
        LatticeFn { theta, f: Box::new(f) }
    }

    /// Scalar symbol `f(k)·1`.
    pub fn scalar(theta: Arc<ThetaMatrix>, f: impl Fn(&MultiIndex) -> Complex64 + Send + Sync + 'static) -> Self {
        let t = theta.clone();
        Self::new(theta, move |k| AlgebraElement::scalar(t.clone(), f(k)))
    }
}

impl LatticeSymbol for LatticeFn {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    fn at(&self, k: &MultiIndex) -> Result<AlgebraElement> {
        Ok((self.f)(k))
    }
}

/// `k ↦ δ_j(ρ(k))`.
pub struct DerivedSymbol<'a> {
    inner: &'a dyn LatticeSymbol,
    j: usize,
}

impl LatticeSymbol for DerivedSymbol<'_> {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        self.inner.theta()
    }

    fn at(&self, k: &MultiIndex) -> Result<AlgebraElement> {
        Ok(self.inner.at(k)?.delta(self.j))
    }
}

fn check_theta(a: &Arc<ThetaMatrix>, b: &Arc<ThetaMatrix>) -> Result<()> {
    if !same_theta(a, b) {
        return Err(Error::invalid("operator and element live over different θ"));
    }
    Ok(())
}

/// `P_ρ u = Σ_k u_k ρ(k) U^k` over the support of `u`.
pub fn apply_psido(rho: &dyn LatticeSymbol, u: &AlgebraElement) -> Result<AlgebraElement> {
    check_theta(rho.theta(), u.theta())?;
    let mut acc = AlgebraElement::zero(u.theta().clone());
    for (k, c) in u.iter() {
        let r = rho.at(k)?;
        if r.is_zero() {
            continue;
        }
        let basis = AlgebraElement::basis(u.theta().clone(), k.clone());
        acc.add_scaled(&r.multiply(&basis)?, *c);
    }
    Ok(acc)
}

/// `(δ_j(P_ρ u) - P_ρ(δ_j u), P_{δ_jρ} u)`.
pub fn commutator_check(rho: &dyn LatticeSymbol, j: usize, u: &AlgebraElement) -> Result<(AlgebraElement, AlgebraElement)> {
    if j >= u.dim() {
        return Err(Error::invalid(format!("axis {j} out of range")));
    }
    let lhs = &apply_psido(rho, u)?.delta(j) - &apply_psido(rho, &u.delta(j))?;
    let rhs = apply_psido(&DerivedSymbol { inner: rho, j }, u)?;
    Ok((lhs, rhs))
}

/// `Λ^s U^k = (1+|k|²)^{s/2} U^k`.
pub fn lambda_power(s: Complex64, u: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(u.theta().clone());
    for (k, c) in u.iter() {
        let base = 1.0 + k.as_slice().iter().map(|&x| (x * x) as f64).sum::<f64>();
        let factor = if s == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            (s * 0.5 * base.ln()).exp()
        };
        out.add_scaled(&AlgebraElement::basis(u.theta().clone(), k.clone()), c * factor);
    }
    out.with_radius(u.radius())
}

/// `P = Σ_α a_α δ^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialOperator {
    theta: Arc<ThetaMatrix>,
    terms: BTreeMap<MultiIndex, AlgebraElement>,
}

impl DifferentialOperator {
    pub fn zero(theta: Arc<ThetaMatrix>) -> Self {
        DifferentialOperator {
            theta,
            terms: BTreeMap::new(),
        }
    }

    pub fn new(theta: Arc<ThetaMatrix>, terms: impl IntoIterator<Item = (MultiIndex, AlgebraElement)>) -> Result<Self> {
        let mut p = Self::zero(theta);
        for (alpha, a) in terms {
            alpha.check_multi_order(p.theta.dim())?;
            check_theta(&p.theta, a.theta())?;
            p.push(alpha, a);
        }
        Ok(p)
    }

    fn push(&mut self, alpha: MultiIndex, a: AlgebraElement) {
        let entry = self
            .terms
            .entry(alpha.clone())
            .or_insert_with(|| AlgebraElement::zero(a.theta().clone()));
        entry.add_scaled(&a, Complex64::new(1.0, 0.0));
        if entry.is_zero() {
            self.terms.remove(&alpha);
        }
    }

    pub fn identity(theta: Arc<ThetaMatrix>) -> Self {
        Self::multiplication(AlgebraElement::one(theta))
    }

    /// `u ↦ b·u`.
    pub fn multiplication(b: AlgebraElement) -> Self {
        let n = b.dim();
        let mut p = Self::zero(b.theta().clone());
        p.push(MultiIndex::zeros(n), b);
        p
    }

    pub fn delta(theta: Arc<ThetaMatrix>, j: usize) -> Result<Self> {
        let n = theta.dim();
        if j >= n {
            return Err(Error::invalid(format!("axis {j} out of range")));
        }
        let one = AlgebraElement::one(theta.clone());
        Self::new(theta, [(MultiIndex::unit(n, j), one)])
    }

    /// `δ_1² + ⋯ + δ_n²`.
    pub fn flat_laplacian(theta: Arc<ThetaMatrix>) -> Self {
        let n = theta.dim();
        let one = AlgebraElement::one(theta.clone());
        let terms = (0..n).map(|j| {
            let mut a = MultiIndex::zeros(n);
            a.set(j, 2);
            (a, one.clone())
        });
        Self::new(theta, terms).expect("valid multi-orders")
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &AlgebraElement)> {
        self.terms.iter()
    }

    pub fn order(&self) -> i64 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// `Σ_α a_α δ^α u`.
    pub fn apply(&self, u: &AlgebraElement) -> Result<AlgebraElement> {
        check_theta(&self.theta, u.theta())?;
        let mut acc = AlgebraElement::zero(self.theta.clone());
        for (alpha, a) in &self.terms {
            acc.add_scaled(&a.multiply(&u.derivation(alpha)?)?, Complex64::new(1.0, 0.0));
        }
        Ok(acc)
    }

    /// `PQ = Σ_{α,β} Σ_{α'+α''=α} binom(α,α') a_α δ^{α'}(b_β) δ^{α''+β}`.
    pub fn compose(&self, other: &DifferentialOperator) -> Result<Self> {
        check_theta(&self.theta, &other.theta)?;
        let mut out = Self::zero(self.theta.clone());
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                for a1 in alpha.sub_orders() {
                    let a2 = alpha - &a1;
                    let coeff = a.multiply(&b.derivation(&a1)?)?.scale_real(alpha.binomial(&a1));
                    if !coeff.is_zero() {
                        out.push(&a2 + beta, coeff);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Polynomial symbol `Σ_α a_α ξ^α`.
    pub fn symbol(&self) -> PolynomialSymbol {
        PolynomialSymbol::new(self.theta.clone(), self.terms.iter().map(|(a, c)| (a.clone(), c.clone())))
            .expect("terms were validated on construction")
    }
}

/// `Δ_g u = ν^{-1} Σ_{ij} δ_i(w_{ij} δ_j u)` with `w_{ij} = √ν g^{ij} √ν`,
/// `ν = √det g`; coefficient elements are assembled once.
#[derive(Debug, Clone)]
pub struct LaplaceBeltrami {
    n: usize,
    nu_inv: AlgebraElement,
    weights: Vec<AlgebraElement>,
    /// Interior radius on which the assembled coefficients are trusted.
    pub trusted_radius: i64,
    /// Residuals of the inversions used during assembly.
    pub assembly_residual: f64,
}

pub fn laplace_beltrami(g: &MetricTensor, r: i64) -> Result<LaplaceBeltrami> {
    let n = g.dim();
    let det = metric_det_sqrt(g, r)?;
    let inv = metric_inverse(g, r)?;
    let sqrt_nu = functional_calculus(&det.nu, ScalarFunction::Sqrt, r)?.element;
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            weights.push(sqrt_nu.multiply(inv.inverse.entry(i, j))?.multiply(&sqrt_nu)?);
        }
    }
    Ok(LaplaceBeltrami {
        n,
        nu_inv: det.nu_inv,
        weights,
        trusted_radius: det.trusted_radius,
        assembly_residual: det.inverse_residual.max(inv.residual),
    })
}

impl LaplaceBeltrami {
    pub fn weight(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.weights[i * self.n + j]
    }

    pub fn nu_inv(&self) -> &AlgebraElement {
        &self.nu_inv
    }

    pub fn apply(&self, u: &AlgebraElement) -> Result<AlgebraElement> {
        check_theta(self.nu_inv.theta(), u.theta())?;
        let mut acc = AlgebraElement::zero(u.theta().clone());
        for i in 0..self.n {
            let mut inner = AlgebraElement::zero(u.theta().clone());
            for j in 0..self.n {
                inner.add_scaled(&self.weight(i, j).multiply(&u.delta(j))?, Complex64::new(1.0, 0.0));
            }
            acc.add_scaled(&inner.delta(i), Complex64::new(1.0, 0.0));
        }
        self.nu_inv.multiply(&acc)
    }
}

/// Matrix `[coefficient of U^m in op(U^k)]` over `|m|_∞, |k|_∞ ≤ r`.
pub fn truncated_matrix(
    theta: &Arc<ThetaMatrix>,
    r: i64,
    op: &dyn Fn(&AlgebraElement) -> Result<AlgebraElement>,
) -> Result<DMatrix<Complex64>> {
    let points: Vec<MultiIndex> = lattice_box(theta.dim(), r).collect();
    let mut m = DMatrix::<Complex64>::zeros(points.len(), points.len());
    for (col, k) in points.iter().enumerate() {
        let image = op(&AlgebraElement::basis(theta.clone(), k.clone()))?;
        for (idx, c) in image.iter() {
            if let Some(row) = box_position(idx, r) {
                m[(row, col)] = *c;
            }
        }
    }
    Ok(m)
}

/// Eigenvalues of the truncated matrix, sorted by magnitude.
pub fn spectrum_truncated(
    theta: &Arc<ThetaMatrix>,
    r: i64,
    op: &dyn Fn(&AlgebraElement) -> Result<AlgebraElement>,
) -> Result<Vec<Complex64>> {
    let m = truncated_matrix(theta, r, op)?;
    let (_, t) = Schur::new(m).unpack();
    let mut eig: Vec<Complex64> = t.diagonal().iter().copied().collect();
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.re.total_cmp(&b.re)).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// `re,im` rows.
pub fn spectrum_csv(values: &[Complex64]) -> String {
    let mut out = String::from("re,im\n");
    for v in values {
        out.push_str(&format!("{:e},{:e}\n", v.re, v.im));
    }
    out
}
