use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::classical::ClassicalSymbol;
use super::standard::{check_point, Symbol};
use crate::algebra::{same_theta, AlgebraElement};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, ThetaMatrix};

/// `Σ_α a_α ξ^α`, evaluated without excision and differentiated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSymbol {
    theta: Arc<ThetaMatrix>,
    terms: BTreeMap<MultiIndex, AlgebraElement>,
}

impl PolynomialSymbol {
    pub fn new(theta: Arc<ThetaMatrix>, terms: impl IntoIterator<Item = (MultiIndex, AlgebraElement)>) -> Result<Self> {
        let n = theta.dim();
        let mut out = BTreeMap::new();
        for (alpha, a) in terms {
            alpha.check_multi_order(n)?;
            if !same_theta(a.theta(), &theta) {
                return Err(Error::invalid("polynomial coefficient over a different θ"));
            }
            out.entry(alpha)
                .or_insert_with(|| AlgebraElement::zero(theta.clone()))
                .add_scaled(&a, Complex64::new(1.0, 0.0));
        }
        Ok(PolynomialSymbol { theta, terms: out })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &AlgebraElement)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> i64 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// The same polynomial split into homogeneous components (and excised near 0).
    pub fn to_classical(&self) -> Result<ClassicalSymbol> {
        ClassicalSymbol::polynomial(self.theta.clone(), self.terms.iter().map(|(a, c)| (a.clone(), c.clone())))
    }
}

impl Symbol for PolynomialSymbol {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        self.derivative(&MultiIndex::zeros(self.dim()), xi)
    }

    /// `∂^β ξ^α = α!/(α-β)! ξ^{α-β}`.
    fn derivative(&self, beta: &MultiIndex, xi: &[f64]) -> Result<AlgebraElement> {
        check_point(self.dim(), xi)?;
        beta.check_multi_order(self.dim())?;
        let mut acc = AlgebraElement::zero(self.theta.clone());
        for (alpha, a) in &self.terms {
            if !beta.le(alpha) {
                continue;
            }
            let rest = alpha - beta;
            let factor = alpha.factorial() / rest.factorial() * rest.monomial(xi);
            acc.add_scaled(a, Complex64::new(factor, 0.0));
        }
        Ok(acc)
    }

    fn declared_order(&self) -> Option<f64> {
        Some(self.degree() as f64)
    }
}
