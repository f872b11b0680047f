use num_complex::Complex64;

use super::amplitude::{mapped, AmplitudeRef, Mapped, Var};
use super::integral::j0;
use super::lt::apply_lt;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::quadrature::QuadratureSpec;
use crate::smooth::Cutoff;

/// Max coefficient discrepancies of the `J`-identities on one amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct JPropertyReport {
    /// `J(b1 a b2)` vs `b1 J(a) b2`.
    pub module: f64,
    /// `J(a)^*` vs `J(a^*)` with `a^*(s, ξ) = a(-s, ξ)^*`.
    pub adjoint: f64,
    /// `δ^α J(a)` vs `J(δ^α a)`.
    pub derivation: f64,
    /// `J(D_s^α D_ξ^β a)` vs `(-1)^{|α|+|β|} J(s^β ξ^α a)`.
    pub exchange: f64,
}

impl JPropertyReport {
    pub fn max(&self) -> f64 {
        self.module.max(self.adjoint).max(self.derivation).max(self.exchange)
    }
}

/// `D_s^α D_ξ^β a` through the amplitude's analytic partials.
fn analytic_derivative(a: &AmplitudeRef, alpha: &MultiIndex, beta: &MultiIndex) -> Result<AmplitudeRef> {
    let mut out = a.clone();
    for j in 0..a.dim() {
        for (var, count) in [(Var::S(j), alpha.get(j)), (Var::Xi(j), beta.get(j))] {
            for _ in 0..count {
                out = out.partial(var).ok_or_else(|| {
                    Error::invalid(format!("amplitude has no analytic {var:?} derivative"))
                })?;
            }
        }
    }
    let order = alpha.order() + beta.order();
    // D = -i∂
    let factor = Complex64::new(0.0, -1.0).powi(order as i32);
    mapped(out, Mapped::Scaled(factor))
}

pub fn j_properties_check(
    a: &AmplitudeRef,
    b1: &AlgebraElement,
    b2: &AlgebraElement,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    quad: &QuadratureSpec,
) -> Result<JPropertyReport> {
    let ja = j0(a.as_ref(), quad)?;

    let sandwich = mapped(a.clone(), Mapped::Sandwich(b1.clone(), b2.clone()))?;
    let lhs = j0(sandwich.as_ref(), quad)?;
    let module = lhs.max_abs_diff(&b1.multiply(&ja)?.multiply(b2)?);

    let star = mapped(a.clone(), Mapped::Star)?;
    let adjoint = ja.involution().max_abs_diff(&j0(star.as_ref(), quad)?);

    let delta = mapped(a.clone(), Mapped::Derivation(alpha.clone()))?;
    let derivation = ja.derivation(alpha)?.max_abs_diff(&j0(delta.as_ref(), quad)?);

    let lhs = j0(analytic_derivative(a, alpha, beta)?.as_ref(), quad)?;
    let weighted = mapped(
        a.clone(),
        Mapped::Weighted {
            beta: beta.clone(),
            alpha: alpha.clone(),
        },
    )?;
    let sign = if (alpha.order() + beta.order()) % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = j0(weighted.as_ref(), quad)?.scale_real(sign);
    let exchange = lhs.max_abs_diff(&rhs);

    Ok(JPropertyReport {
        module,
        adjoint,
        derivation,
        exchange,
    })
}

/// `J_0((L^t)^N a)` for `N = 0..=iterations`; the later applications use
/// finite differences.
pub fn lt_invariance(a: &AmplitudeRef, chi: Cutoff, iterations: usize, quad: &QuadratureSpec) -> Result<Vec<AlgebraElement>> {
    let mut values = vec![j0(a.as_ref(), quad)?];
    let mut current = a.clone();
    for _ in 0..iterations {
        current = apply_lt(current, chi, true)?.into_ref();
        values.push(j0(current.as_ref(), quad)?);
    }
    Ok(values)
}
