use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::homogeneous::{binom, HomogeneousSymbol};
use crate::algebra::{same_theta, AlgebraElement, ElementJson};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, ThetaMatrix};
use crate::smooth::Cutoff;

/// Classical symbol `ρ ∼ Σ_j ρ_{q-j}`, realized as `(1-χ(ξ)) Σ_{j≤J} ρ_{q-j}(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSymbol {
    order: Complex64,
    components: Vec<HomogeneousSymbol>,
    excision: Cutoff,
}

impl ClassicalSymbol {
    /// Component `j` must have degree `q - j`.
    pub fn new(order: Complex64, components: Vec<HomogeneousSymbol>, excision: Cutoff) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::invalid("a classical symbol needs at least one component"));
        };
        let theta = first.theta().clone();
        for (j, h) in components.iter().enumerate() {
            if !same_theta(h.theta(), &theta) {
                return Err(Error::invalid("components over different deformations"));
            }
            let expected = order - j as f64;
            if (h.degree() - expected).norm() > 1e-12 {
                return Err(Error::invalid(format!(
                    "component {j} has degree {} but should have degree {expected}",
                    h.degree()
                )));
            }
        }
        Ok(ClassicalSymbol {
            order,
            components,
            excision,
        })
    }

    /// Order-0 symbol with the single component `a`.
    pub fn constant(a: AlgebraElement) -> Self {
        let h = HomogeneousSymbol::radial(a, Complex64::new(0.0, 0.0));
        ClassicalSymbol {
            order: Complex64::new(0.0, 0.0),
            components: vec![h],
            excision: Cutoff::default(),
        }
    }

    /// Polynomial `Σ a_α ξ^α` of order `m = max |α|`, split by homogeneity.
    pub fn polynomial(
        theta: Arc<ThetaMatrix>,
        terms: impl IntoIterator<Item = (MultiIndex, AlgebraElement)>,
    ) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        let m = terms.iter().map(|(a, _)| a.order()).max().unwrap_or(0);
        let components = (0..=m)
            .map(|j| {
                let deg = m - j;
                HomogeneousSymbol::from_terms(
                    theta.clone(),
                    Complex64::new(deg as f64, 0.0),
                    terms.iter().filter(|(a, _)| a.order() == deg).cloned(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(Complex64::new(m as f64, 0.0), components, Cutoff::default())
    }

    pub fn with_excision(mut self, excision: Cutoff) -> Self {
        self.excision = excision;
        self
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        self.components[0].theta()
    }

    pub fn dim(&self) -> usize {
        self.theta().dim()
    }

    pub fn order(&self) -> Complex64 {
        self.order
    }

    pub fn excision(&self) -> Cutoff {
        self.excision
    }

    pub fn components(&self) -> &[HomogeneousSymbol] {
        &self.components
    }

    /// Index of the last stored component.
    pub fn depth(&self) -> usize {
        self.components.len() - 1
    }

    /// `(1-χ(ξ)) Σ_j ρ_{q-j}(ξ)`; zero inside the excision core.
    pub fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        let w = 1.0 - self.excision.eval(xi);
        if w == 0.0 {
            if xi.len() != self.dim() {
                return Err(Error::invalid("evaluation point has the wrong dimension"));
            }
            return Ok(AlgebraElement::zero(self.theta().clone()));
        }
        Ok(self.raw_partial_sum(self.components.len(), xi)?.scale_real(w))
    }

    /// `Σ_{j<N} ρ_{q-j}(ξ)` without excision, for `ξ ≠ 0`.
    pub fn raw_partial_sum(&self, count: usize, xi: &[f64]) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(self.theta().clone());
        for h in self.components.iter().take(count) {
            acc.add_scaled(&h.eval(xi)?, Complex64::new(1.0, 0.0));
        }
        Ok(acc)
    }

    /// Componentwise `∂_{ξ_j}`; the order drops by one.
    pub fn diff(&self, j: usize) -> Result<Self> {
        Ok(ClassicalSymbol {
            order: self.order - 1.0,
            components: self.components.iter().map(|h| h.diff(j)).collect::<Result<_>>()?,
            excision: self.excision,
        })
    }

    pub fn diff_multi(&self, beta: &MultiIndex) -> Result<Self> {
        Ok(ClassicalSymbol {
            order: self.order - beta.order() as f64,
            components: self.components.iter().map(|h| h.diff_multi(beta)).collect::<Result<_>>()?,
            excision: self.excision,
        })
    }

    /// Componentwise `δ^α`.
    pub fn derivation(&self, alpha: &MultiIndex) -> Result<Self> {
        Ok(ClassicalSymbol {
            order: self.order,
            components: self.components.iter().map(|h| h.derivation(alpha)).collect::<Result<_>>()?,
            excision: self.excision,
        })
    }

    pub fn involution(&self) -> Self {
        ClassicalSymbol {
            order: self.order.conj(),
            components: self.components.iter().map(|h| h.involution()).collect(),
            excision: self.excision,
        }
    }

    pub fn to_json(&self) -> String {
        let doc = SymbolJson {
            order_re: self.order.re,
            order_im: self.order.im,
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(j, h)| ComponentJson {
                    degree_offset: j,
                    terms: h
                        .terms()
                        .map(|(alpha, a)| TermJson {
                            alpha: alpha.as_slice().to_vec(),
                            coeff: a.to_json_value(),
                        })
                        .collect(),
                })
                .collect(),
            excision: ExcisionJson {
                r0: self.excision.r0,
                r1: self.excision.r1,
            },
        };
        serde_json::to_string(&doc).expect("symbol serialization cannot fail")
    }

    /// Parses a symbol whose coefficients live over `theta`.
    pub fn from_json(s: &str, theta: &Arc<ThetaMatrix>) -> Result<Self> {
        let doc: SymbolJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let order = Complex64::new(doc.order_re, doc.order_im);
        let depth = doc.components.iter().map(|c| c.degree_offset).max().unwrap_or(0);
        let mut components: Vec<_> = (0..=depth)
            .map(|j| HomogeneousSymbol::zero(theta.clone(), order - j as f64))
            .collect();
        for comp in doc.components {
            let mut terms = Vec::with_capacity(comp.terms.len());
            for t in comp.terms {
                let coeff = AlgebraElement::from_json_value(t.coeff)?
                    .rebind(theta)
                    .map_err(|_| Error::Parse("coefficient θ differs from the symbol's θ".into()))?;
                terms.push((MultiIndex::from(t.alpha), coeff));
            }
            let j = comp.degree_offset;
            let h = HomogeneousSymbol::from_terms(theta.clone(), order - j as f64, terms)?;
            components[j] = components[j].add(&h)?;
        }
        let excision = Cutoff::new(doc.excision.r0, doc.excision.r1)?;
        Self::new(order, components, excision)
    }
}

/// Product expansion `(ρσ)_{q+q'-j} = Σ_{p+r=j} ρ_{q-p} σ_{q'-r}` for `j ≤ J`.
pub fn classical_product(rho: &ClassicalSymbol, sigma: &ClassicalSymbol, depth: usize) -> Result<ClassicalSymbol> {
    if !same_theta(rho.theta(), sigma.theta()) {
        return Err(Error::invalid("symbols over different deformations"));
    }
    for (name, s) in [("left", rho), ("right", sigma)] {
        if s.components.len() < depth + 1 {
            return Err(Error::invalid(format!(
                "{name} factor has {} components but J = {depth} needs {}",
                s.components.len(),
                depth + 1
            )));
        }
    }
    let order = rho.order + sigma.order;
    let mut components = Vec::with_capacity(depth + 1);
    for j in 0..=depth {
        let mut acc = HomogeneousSymbol::zero(rho.theta().clone(), order - j as f64);
        for p in 0..=j {
            acc = acc.add(&rho.components[p].multiply(&sigma.components[j - p])?)?;
        }
        components.push(acc);
    }
    ClassicalSymbol::new(order, components, rho.excision)
}

/// `⟨ξ⟩^s = (1+|ξ|²)^{s/2} ∼ Σ_i binom(s/2, i) |ξ|^{s-2i}`, components up to offset `J`.
pub fn bracket_xi_power(theta: Arc<ThetaMatrix>, s: Complex64, depth: usize) -> ClassicalSymbol {
    let one = AlgebraElement::one(theta.clone());
    let components = (0..=depth)
        .map(|j| {
            let degree = s - j as f64;
            if j % 2 == 0 {
                HomogeneousSymbol::radial(one.scale(binom(s / 2.0, j / 2)), degree)
            } else {
                HomogeneousSymbol::zero(theta.clone(), degree)
            }
        })
        .collect();
    ClassicalSymbol {
        order: s,
        components,
        excision: Cutoff::default(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SymbolJson {
    order_re: f64,
    order_im: f64,
    components: Vec<ComponentJson>,
    excision: ExcisionJson,
}

#[derive(Debug, Serialize, Deserialize)]
struct ComponentJson {
    degree_offset: usize,
    terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<i64>,
    coeff: ElementJson,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExcisionJson {
    r0: f64,
    r1: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn theta() -> Arc<ThetaMatrix> {
        Arc::new(ThetaMatrix::two_dim(0.25))
    }

    fn radial_value(h: &HomogeneousSymbol, xi: &[f64]) -> Complex64 {
        h.eval(xi).unwrap().trace()
    }

    #[test]
    fn bracket_two_is_exact() {
        let b = bracket_xi_power(theta(), c(2.0), 2);
        let xi = [0.6, -1.3];
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        assert!((radial_value(&b.components()[0], &xi) - c(r2)).norm() < 1e-14);
        assert!(b.components()[1].is_zero());
        assert!((radial_value(&b.components()[2], &xi) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn bracket_minus_two_alternates() {
        let b = bracket_xi_power(theta(), c(-2.0), 4);
        let xi = [1.5, 0.5];
        let r: f64 = (2.5f64).sqrt();
        for (j, sign) in [(0, 1.0), (2, -1.0), (4, 1.0)] {
            let expected = sign * r.powi(-2 - j as i32);
            assert!((radial_value(&b.components()[j], &xi) - c(expected)).norm() < 1e-14);
        }
    }

    #[test]
    fn product_with_one_is_identity() {
        let rho = bracket_xi_power(theta(), c(3.0), 3);
        let one = ClassicalSymbol::constant(AlgebraElement::one(theta()));
        let one = ClassicalSymbol::new(
            c(0.0),
            (0..=3).map(|j| {
                if j == 0 { one.components()[0].clone() } else { HomogeneousSymbol::zero(theta(), c(-(j as f64))) }
            }).collect(),
            Cutoff::default(),
        )
        .unwrap();
        let p = classical_product(&rho, &one, 3).unwrap();
        for xi in [[1.0, 2.0], [-3.0, 0.5]] {
            for j in 0..=3 {
                let d = radial_value(&p.components()[j], &xi) - radial_value(&rho.components()[j], &xi);
                assert!(d.norm() < 1e-12);
            }
        }
        assert!(classical_product(&rho, &one, 4).is_err());
    }

    #[test]
    fn evaluation_excises_core() {
        let b = bracket_xi_power(theta(), c(2.0), 2);
        assert!(b.eval(&[0.0, 0.0]).unwrap().is_zero());
        let v = b.eval(&[1.0, 1.0]).unwrap();
        assert!((v.trace() - c(3.0)).norm() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let t = theta();
        let a = AlgebraElement::from_coeffs(t.clone(), [([1, -1].into(), Complex64::new(0.5, 0.25))]).unwrap();
        let rho = ClassicalSymbol::polynomial(t.clone(), [([1, 0].into(), a.clone()), ([0, 0].into(), AlgebraElement::one(t.clone()))]).unwrap();
        let back = ClassicalSymbol::from_json(&rho.to_json(), &t).unwrap();
        assert_eq!(back, rho);
        assert!(matches!(ClassicalSymbol::from_json("{", &t), Err(Error::Parse(_))));
    }
}
