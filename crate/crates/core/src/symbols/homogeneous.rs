use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{same_theta, AlgebraElement};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, ThetaMatrix};

/// `|ξ|^z = exp(z log|ξ|)` for `r = |ξ| > 0`.
pub(crate) fn abs_pow(r: f64, z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    (z * r.ln()).exp()
}

/// Generalized binomial coefficient `binom(z, i)`.
pub fn binom(z: Complex64, i: usize) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for l in 0..i {
        out *= (z - l as f64) / (l + 1) as f64;
    }
    out
}

/// Homogeneous symbol `Σ_α a_α ξ^α |ξ|^{q-|α|}` of degree `q`.
#[derive(Clone, PartialEq)]
pub struct HomogeneousSymbol {
    theta: Arc<ThetaMatrix>,
    degree: Complex64,
    terms: BTreeMap<MultiIndex, AlgebraElement>,
}

impl HomogeneousSymbol {
    pub fn zero(theta: Arc<ThetaMatrix>, degree: Complex64) -> Self {
        HomogeneousSymbol {
            theta,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// `c·|ξ|^q`.
    pub fn radial(coeff: AlgebraElement, degree: Complex64) -> Self {
        let n = coeff.dim();
        let mut h = Self::zero(coeff.theta().clone(), degree);
        h.push(MultiIndex::zeros(n), coeff);
        h
    }

    /// `c·ξ^α`, homogeneous of degree `|α|`.
    pub fn monomial(alpha: MultiIndex, coeff: AlgebraElement) -> Result<Self> {
        alpha.check_multi_order(coeff.dim())?;
        let degree = Complex64::new(alpha.order() as f64, 0.0);
        let mut h = Self::zero(coeff.theta().clone(), degree);
        h.push(alpha, coeff);
        Ok(h)
    }

    pub fn from_terms(
        theta: Arc<ThetaMatrix>,
        degree: Complex64,
        terms: impl IntoIterator<Item = (MultiIndex, AlgebraElement)>,
    ) -> Result<Self> {
        let mut h = Self::zero(theta, degree);
        for (alpha, coeff) in terms {
            alpha.check_multi_order(h.dim())?;
            if !same_theta(coeff.theta(), &h.theta) {
                return Err(Error::invalid("symbol coefficients over different deformations"));
            }
            h.push(alpha, coeff);
        }
        Ok(h)
    }

    fn push(&mut self, alpha: MultiIndex, coeff: AlgebraElement) {
        match self.terms.get_mut(&alpha) {
            Some(existing) => existing.add_scaled(&coeff, Complex64::new(1.0, 0.0)),
            None => {
                self.terms.insert(alpha.clone(), coeff);
            }
        }
        if self.terms[&alpha].is_zero() {
            self.terms.remove(&alpha);
        }
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn degree(&self) -> Complex64 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &AlgebraElement)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `ρ(ξ)` for `ξ ≠ 0`.
    pub fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        if xi.len() != self.dim() {
            return Err(Error::invalid(format!(
                "evaluation point has length {} but the dimension is {}",
                xi.len(),
                self.dim()
            )));
        }
        let r = crate::smooth::norm(xi);
        if r == 0.0 {
            return Err(Error::Domain {
                message: "homogeneous symbols are not defined at ξ = 0".into(),
                diagnostic: None,
            });
        }
        let mut acc = AlgebraElement::zero(self.theta.clone());
        for (alpha, a) in &self.terms {
            let s = self.degree - alpha.order() as f64;
            acc.add_scaled(a, abs_pow(r, s) * alpha.monomial(xi));
        }
        Ok(acc)
    }

    /// `∂_{ξ_j}`, using `∂_j(ξ^α|ξ|^s) = α_j ξ^{α-e_j}|ξ|^s + s ξ^{α+e_j}|ξ|^{s-2}`.
    pub fn diff(&self, j: usize) -> Result<Self> {
        if j >= self.dim() {
            return Err(Error::invalid(format!("axis {j} out of range")));
        }
        let mut out = Self::zero(self.theta.clone(), self.degree - 1.0);
        for (alpha, a) in &self.terms {
            let aj = alpha.get(j);
            if aj > 0 {
                let mut lower = alpha.clone();
                lower.set(j, aj - 1);
                out.push(lower, a.scale_real(aj as f64));
            }
            let s = self.degree - alpha.order() as f64;
            if s != Complex64::new(0.0, 0.0) {
                let mut raised = alpha.clone();
                raised.set(j, aj + 1);
                out.push(raised, a.scale(s));
            }
        }
        Ok(out)
    }

    /// `∂_ξ^β`.
    pub fn diff_multi(&self, beta: &MultiIndex) -> Result<Self> {
        beta.check_multi_order(self.dim())?;
        let mut out = self.clone();
        for j in 0..self.dim() {
            for _ in 0..beta.get(j) {
                out = out.diff(j)?;
            }
        }
        Ok(out)
    }

    /// `δ^α` applied to every coefficient.
    pub fn derivation(&self, alpha: &MultiIndex) -> Result<Self> {
        let mut out = Self::zero(self.theta.clone(), self.degree);
        for (beta, a) in &self.terms {
            out.push(beta.clone(), a.derivation(alpha)?);
        }
        Ok(out)
    }

    /// Pointwise product; degrees add.
    pub fn multiply(&self, other: &HomogeneousSymbol) -> Result<Self> {
        if !same_theta(&self.theta, &other.theta) {
            return Err(Error::invalid("symbols over different deformations"));
        }
        let mut out = Self::zero(self.theta.clone(), self.degree + other.degree);
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                out.push(alpha + beta, a.multiply(b)?);
            }
        }
        Ok(out)
    }

    /// Sum of two symbols of the same degree.
    pub fn add(&self, other: &HomogeneousSymbol) -> Result<Self> {
        if !same_theta(&self.theta, &other.theta) {
            return Err(Error::invalid("symbols over different deformations"));
        }
        if (self.degree - other.degree).norm() > 1e-12 {
            return Err(Error::invalid(format!(
                "cannot add homogeneous symbols of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (alpha, a) in &other.terms {
            out.push(alpha.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.theta.clone(), self.degree);
        for (alpha, a) in &self.terms {
            out.push(alpha.clone(), a.scale(c));
        }
        out
    }

    /// Pointwise adjoint: degree conjugated, coefficients replaced by `a_α^*`.
    pub fn involution(&self) -> Self {
        let mut out = Self::zero(self.theta.clone(), self.degree.conj());
        for (alpha, a) in &self.terms {
            out.push(alpha.clone(), a.involution());
        }
        out
    }
}

impl std::fmt::Debug for HomogeneousSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomogeneousSymbol")
            .field("degree", &self.degree)
            .field("terms", &self.terms)
            .finish()
    }
}
