use std::sync::Arc;

use num_complex::Complex64;

use super::homogeneous::HomogeneousSymbol;
use super::standard::{finite_difference, seminorm_estimate, SamplingGrid, Symbol};
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, ThetaMatrix};
use crate::smooth::{norm, Cutoff};

/// Halvings allowed per component before giving up.
pub const HALVING_BUDGET: usize = 60;

/// `(1 - χ(εξ)) h(ξ)` for a homogeneous `h`.
#[derive(Debug, Clone)]
pub struct ExcisedComponent {
    pub component: HomogeneousSymbol,
    pub eps: f64,
    pub cutoff: Cutoff,
}

impl ExcisedComponent {
    fn weight(&self, xi: &[f64]) -> f64 {
        1.0 - self.cutoff.eval(&xi.iter().map(|x| self.eps * x).collect::<Vec<_>>())
    }
}

impl Symbol for ExcisedComponent {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        self.component.theta()
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        let w = self.weight(xi);
        if w == 0.0 {
            return Ok(AlgebraElement::zero(self.theta().clone()));
        }
        Ok(self.component.eval(xi)?.scale_real(w))
    }

    fn derivative(&self, beta: &MultiIndex, xi: &[f64]) -> Result<AlgebraElement> {
        if self.eps * norm(xi) >= self.cutoff.r1 {
            return self.component.diff_multi(beta)?.eval(xi);
        }
        finite_difference(self, beta, xi)
    }

    fn declared_order(&self) -> Option<f64> {
        Some(self.component.degree().re)
    }
}

/// `Σ_{j<N} (1 - χ(ε_j ξ)) ρ_{m-j}(ξ)` with `ε_{j+1} ≤ ε_j / 2`.
#[derive(Debug, Clone)]
pub struct BorelSymbol {
    theta: Arc<ThetaMatrix>,
    order: f64,
    pub terms: Vec<ExcisedComponent>,
}

impl BorelSymbol {
    pub fn epsilons(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.eps).collect()
    }
}

impl Symbol for BorelSymbol {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(self.theta.clone());
        for t in &self.terms {
            acc.add_scaled(&t.eval(xi)?, Complex64::new(1.0, 0.0));
        }
        Ok(acc)
    }

    fn derivative(&self, beta: &MultiIndex, xi: &[f64]) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(self.theta.clone());
        for t in &self.terms {
            acc.add_scaled(&t.derivative(beta, xi)?, Complex64::new(1.0, 0.0));
        }
        Ok(acc)
    }

    fn declared_order(&self) -> Option<f64> {
        Some(self.order)
    }
}

/// Cutoff used by [`borel_realize`]: `χ = 1` on `|ξ| ≤ 1`, `0` on `|ξ| ≥ 2`.
pub fn borel_cutoff() -> Cutoff {
    Cutoff { r0: 1.0, r1: 2.0 }
}

/// Greedy choice of `ε_j`: halve from the previous value until the sampled
/// `p_j^{(m-j+1)}` of the `j`-th excised term is at most `2^{-(j+1)}`.
pub fn borel_realize(components: &[HomogeneousSymbol], count: usize, grid: &SamplingGrid) -> Result<BorelSymbol> {
    if count == 0 || count > components.len() {
        return Err(Error::invalid(format!(
            "cannot realize {count} terms from {} components",
            components.len()
        )));
    }
    let theta = components[0].theta().clone();
    let m = components[0].degree().re;
    let cutoff = borel_cutoff();
    let mut terms: Vec<ExcisedComponent> = Vec::with_capacity(count);
    let mut eps = 1.0;
    for (j, h) in components.iter().take(count).enumerate() {
        if j > 0 {
            eps /= 2.0;
        }
        let target = 0.5f64.powi(j as i32 + 1);
        let mut best = (f64::INFINITY, eps);
        let mut accepted = None;
        for _ in 0..=HALVING_BUDGET {
            let term = ExcisedComponent {
                component: h.clone(),
                eps,
                cutoff,
            };
            let est = seminorm_estimate(&term, j, m - j as f64 + 1.0, grid)?.value;
            if est < best.0 {
                best = (est, eps);
            }
            if est <= target {
                accepted = Some(term);
                break;
            }
            eps /= 2.0;
        }
        match accepted {
            Some(t) => terms.push(t),
            None => {
                return Err(Error::Domain {
                    message: format!(
                        "component {j}: sampled seminorm {:e} still above {target:e} after {HALVING_BUDGET} halvings",
                        best.0
                    ),
                    diagnostic: Some(best.1),
                })
            }
        }
    }
    Ok(BorelSymbol { theta, order: m, terms })
}
