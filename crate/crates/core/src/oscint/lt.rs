use std::sync::Arc;

use num_complex::Complex64;

use super::amplitude::{Amplitude, AmplitudeRef, FdPartial, SupportBox, Var};
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::lattice::ThetaMatrix;
use crate::smooth::Cutoff;

/// `L^t a` for `L = χ + (1-χ)|(s,ξ)|^{-2} Σ_j (ξ_j D_{s_j} + s_j D_{ξ_j})`,
/// which fixes `e^{is·ξ}`. Transposing gives
///
/// `L^t a = -w Σ_j (ξ_j D_{s_j} + s_j D_{ξ_j}) a - 4i s·ξ (1-χ) r^{-4} a + χ̃ a`
///
/// with `r² = |s|² + |ξ|²`, `w = (1-χ)/r²`, `D = -i∂` and
/// `χ̃ = χ - i (ξ·∇_s χ + s·∇_ξ χ) / r²`, supported where `∇χ ≠ 0` or `χ ≠ 0`.
pub struct LtAmplitude {
    inner: AmplitudeRef,
    chi: Cutoff,
    ds: Vec<AmplitudeRef>,
    dxi: Vec<AmplitudeRef>,
}

/// Builds `L^t a`; missing analytic partials are replaced by central
/// differences when `allow_fd` is set.
pub fn apply_lt(a: AmplitudeRef, chi: Cutoff, allow_fd: bool) -> Result<LtAmplitude> {
    let n = a.dim();
    let get = |var: Var| -> Result<AmplitudeRef> {
        match a.partial(var) {
            Some(d) => Ok(d),
            None if allow_fd => Ok(Arc::new(FdPartial::new(a.clone(), var))),
            None => Err(Error::invalid(format!(
                "amplitude has no analytic {var:?} derivative and finite differences are disabled"
            ))),
        }
    };
    let ds = (0..n).map(|j| get(Var::S(j))).collect::<Result<Vec<_>>>()?;
    let dxi = (0..n).map(|j| get(Var::Xi(j))).collect::<Result<Vec<_>>>()?;
    Ok(LtAmplitude { inner: a, chi, ds, dxi })
}

impl LtAmplitude {
    pub fn into_ref(self) -> AmplitudeRef {
        Arc::new(self)
    }
}

impl Amplitude for LtAmplitude {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        self.inner.theta()
    }

    fn support(&self) -> SupportBox {
        self.inner.support()
    }

    fn eval(&self, s: &[f64], xi: &[f64]) -> AlgebraElement {
        let a = self.inner.eval(s, xi);
        let r2: f64 = s.iter().chain(xi).map(|x| x * x).sum();
        let r = r2.sqrt();
        let chi = self.chi.radial(r);
        if r2 == 0.0 || chi == 1.0 && self.chi.radial_prime(r) == 0.0 {
            return a;
        }
        let sxi: f64 = s.iter().zip(xi).map(|(x, y)| x * y).sum();
        // ξ·∇_sχ + s·∇_ξχ for radial χ
        let t_chi = self.chi.radial_prime(r) * 2.0 * sxi / r;
        let chi_tilde = Complex64::new(chi, -t_chi / r2);
        let one_minus = 1.0 - chi;
        let mut out = a.scale(chi_tilde - Complex64::new(0.0, 4.0 * sxi * one_minus / (r2 * r2)));
        if one_minus != 0.0 {
            // -w Σ (ξ_j D_{s_j} + s_j D_{ξ_j}) a = i w Σ (ξ_j ∂_{s_j} + s_j ∂_{ξ_j}) a
            let w = Complex64::new(0.0, one_minus / r2);
            for j in 0..s.len() {
                if xi[j] != 0.0 {
                    out.add_scaled(&self.ds[j].eval(s, xi), w * xi[j]);
                }
                if s[j] != 0.0 {
                    out.add_scaled(&self.dxi[j].eval(s, xi), w * s[j]);
                }
            }
        }
        out
    }
}
