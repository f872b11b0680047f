use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{same_theta, AlgebraElement};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, ThetaMatrix};

/// Integration variable of an amplitude `a(s, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    S(usize),
    Xi(usize),
}

/// The box `[-S, S]^n × [-Ξ, Ξ]^n` outside which an amplitude vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBox {
    pub s: f64,
    pub xi: f64,
}

/// `𝒜_θ`-valued amplitude `a(s, ξ)` on `R^n × R^n`.
pub trait Amplitude: Send + Sync {
    fn theta(&self) -> &Arc<ThetaMatrix>;

    fn dim(&self) -> usize {
        self.theta().dim()
    }

    fn support(&self) -> SupportBox;

    /// Must return zero outside [`Amplitude::support`].
    fn eval(&self, s: &[f64], xi: &[f64]) -> AlgebraElement;

    /// Analytic partial derivative, when available.
    fn partial(&self, _var: Var) -> Option<Arc<dyn Amplitude>> {
        None
    }

    fn declared_order(&self) -> Option<f64> {
        None
    }
}

pub type AmplitudeRef = Arc<dyn Amplitude>;

fn inside(support: SupportBox, s: &[f64], xi: &[f64]) -> bool {
    s.iter().all(|x| x.abs() <= support.s) && xi.iter().all(|x| x.abs() <= support.xi)
}

/// `p(x) e^{-c x² + iωx}` with complex polynomial `p` (ascending coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub poly: Vec<Complex64>,
    pub c: f64,
    pub omega: f64,
}

impl Profile {
    pub fn gaussian(c: f64) -> Self {
        Profile {
            poly: vec![Complex64::new(1.0, 0.0)],
            c,
            omega: 0.0,
        }
    }

    /// `x^k e^{-c x²}`.
    pub fn moment(k: usize, c: f64) -> Self {
        let mut poly = vec![Complex64::new(0.0, 0.0); k + 1];
        poly[k] = Complex64::new(1.0, 0.0);
        Profile { poly, c, omega: 0.0 }
    }

    pub fn with_frequency(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let p = self.poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
        p * Complex64::new(-self.c * x * x, self.omega * x).exp()
    }

    /// `(p' + (-2cx + iω) p) e^{…}`.
    pub fn derivative(&self) -> Self {
        let deg = self.poly.len();
        let mut poly = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (k, &a) in self.poly.iter().enumerate() {
            if k > 0 {
                poly[k - 1] += a * k as f64;
            }
            poly[k] += a * Complex64::new(0.0, self.omega);
            poly[k + 1] += a * (-2.0 * self.c);
        }
        Profile {
            poly,
            c: self.c,
            omega: self.omega,
        }
    }

    /// `x^k · self`.
    pub fn times_power(&self, k: usize) -> Self {
        let mut poly = vec![Complex64::new(0.0, 0.0); k];
        poly.extend_from_slice(&self.poly);
        Profile {
            poly,
            c: self.c,
            omega: self.omega,
        }
    }
}

/// `coeff · Π_j f_j(s_j) · Π_j g_j(ξ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTerm {
    pub coeff: AlgebraElement,
    pub s_profiles: Vec<Profile>,
    pub xi_profiles: Vec<Profile>,
}

/// Finite sum of separable terms, truncated to a support box; closed under
/// partial derivatives.
#[derive(Debug, Clone)]
pub struct SeparableAmplitude {
    theta: Arc<ThetaMatrix>,
    pub terms: Vec<SeparableTerm>,
    support: SupportBox,
}

impl SeparableAmplitude {
    pub fn new(theta: Arc<ThetaMatrix>, terms: Vec<SeparableTerm>, support: SupportBox) -> Result<Self> {
        let n = theta.dim();
        for t in &terms {
            if t.s_profiles.len() != n || t.xi_profiles.len() != n {
                return Err(Error::invalid(format!("separable term needs {n} profiles per variable")));
            }
            if !same_theta(t.coeff.theta(), &theta) {
                return Err(Error::invalid("amplitude coefficient over a different θ"));
            }
        }
        Ok(SeparableAmplitude { theta, terms, support })
    }

    fn map_profiles(&self, var: Var, f: impl Fn(&Profile) -> Profile) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            match var {
                Var::S(j) => t.s_profiles[j] = f(&t.s_profiles[j]),
                Var::Xi(j) => t.xi_profiles[j] = f(&t.xi_profiles[j]),
            }
        }
        out
    }

    /// `∂_{var}` as a separable amplitude.
    pub fn derivative(&self, var: Var) -> Self {
        self.map_profiles(var, Profile::derivative)
    }

    /// `s^β ξ^α a`.
    pub fn times_monomial(&self, beta: &MultiIndex, alpha: &MultiIndex) -> Self {
        let mut out = self.clone();
        for j in 0..self.dim() {
            out = out.map_profiles(Var::S(j), |p| p.times_power(beta.get(j) as usize));
            out = out.map_profiles(Var::Xi(j), |p| p.times_power(alpha.get(j) as usize));
        }
        out
    }
}

impl Amplitude for SeparableAmplitude {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    fn support(&self) -> SupportBox {
        self.support
    }

    fn eval(&self, s: &[f64], xi: &[f64]) -> AlgebraElement {
        let mut acc = AlgebraElement::zero(self.theta.clone());
        if !inside(self.support, s, xi) {
            return acc;
        }
        for t in &self.terms {
            let mut w = Complex64::new(1.0, 0.0);
            for (p, &x) in t.s_profiles.iter().zip(s) {
                w *= p.eval(x);
            }
            for (p, &x) in t.xi_profiles.iter().zip(xi) {
                w *= p.eval(x);
            }
            acc.add_scaled(&t.coeff, w);
        }
        acc
    }

    fn partial(&self, var: Var) -> Option<AmplitudeRef> {
        Some(Arc::new(self.derivative(var)))
    }
}

type AmpFn = dyn Fn(&[f64], &[f64]) -> AlgebraElement + Send + Sync;

/// Amplitude given by a closure, with optional closures for its partials.
pub struct FnAmplitude {
    theta: Arc<ThetaMatrix>,
    support: SupportBox,
    f: Box<AmpFn>,
    partials: Vec<(Var, AmplitudeRef)>,
    order: Option<f64>,
}

impl FnAmplitude {
    pub fn new(
        theta: Arc<ThetaMatrix>,
        support: SupportBox,
        f: impl Fn(&[f64], &[f64]) -> AlgebraElement + Send + Sync + 'static,
    ) -> Self {
        FnAmplitude {
            theta,
            support,
            f: Box::new(f),
            partials: Vec::new(),
            order: None,
        }
    }

    pub fn with_partial(mut self, var: Var, d: AmplitudeRef) -> Self {
        self.partials.push((var, d));
        self
    }

    pub fn with_order(mut self, m: f64) -> Self {
        self.order = Some(m);
        self
    }
}

impl Amplitude for FnAmplitude {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    fn support(&self) -> SupportBox {
        self.support
    }

    fn eval(&self, s: &[f64], xi: &[f64]) -> AlgebraElement {
        if !inside(self.support, s, xi) {
            return AlgebraElement::zero(self.theta.clone());
        }
        (self.f)(s, xi)
    }

    fn partial(&self, var: Var) -> Option<AmplitudeRef> {
        self.partials.iter().find(|(v, _)| *v == var).map(|(_, d)| d.clone())
    }

    fn declared_order(&self) -> Option<f64> {
        self.order
    }
}

/// Pointwise transformations of an amplitude used by the `J`-identities.
#[derive(Clone)]
pub enum Mapped {
    /// `b1 · a · b2`
    Sandwich(AlgebraElement, AlgebraElement),
    /// `a(-s, ξ)^*`
    Star,
    /// `δ^α a`
    Derivation(MultiIndex),
    /// `s^β ξ^α a`
    Weighted { beta: MultiIndex, alpha: MultiIndex },
    /// `a(s, ξ) · α_{-s}(u)`
    Acting(AlgebraElement),
    /// `c · a`
    Scaled(Complex64),
}

pub struct MappedAmplitude {
    inner: AmplitudeRef,
    map: Mapped,
}

impl MappedAmplitude {
    pub fn new(inner: AmplitudeRef, map: Mapped) -> Self {
        MappedAmplitude { inner, map }
    }
}

impl Amplitude for MappedAmplitude {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        self.inner.theta()
    }

    fn support(&self) -> SupportBox {
        self.inner.support()
    }

    fn eval(&self, s: &[f64], xi: &[f64]) -> AlgebraElement {
        match &self.map {
            Mapped::Sandwich(b1, b2) => {
                let a = self.inner.eval(s, xi);
                if a.is_zero() {
                    return a;
                }
                b1.multiply(&a).and_then(|x| x.multiply(b2)).expect("θ checked at construction")
            }
            Mapped::Star => {
                let neg: Vec<f64> = s.iter().map(|x| -x).collect();
                self.inner.eval(&neg, xi).involution()
            }
            Mapped::Derivation(alpha) => self.inner.eval(s, xi).derivation(alpha).expect("multi-order checked"),
            Mapped::Weighted { beta, alpha } => {
                let w = beta.monomial(s) * alpha.monomial(xi);
                self.inner.eval(s, xi).scale_real(w)
            }
            Mapped::Acting(u) => {
                let a = self.inner.eval(s, xi);
                if a.is_zero() {
                    return a;
                }
                let neg: Vec<f64> = s.iter().map(|x| -x).collect();
                a.multiply(&u.act(&neg).expect("dimension checked")).expect("θ checked at construction")
            }
            Mapped::Scaled(c) => self.inner.eval(s, xi).scale(*c),
        }
    }
}

/// Checked constructor for [`MappedAmplitude`].
pub fn mapped(inner: AmplitudeRef, map: Mapped) -> Result<AmplitudeRef> {
    let theta = inner.theta().clone();
    let n = theta.dim();
    match &map {
        Mapped::Sandwich(b1, b2) => {
            if !same_theta(b1.theta(), &theta) || !same_theta(b2.theta(), &theta) {
                return Err(Error::invalid("sandwich factors over a different θ"));
            }
        }
        Mapped::Derivation(alpha) => alpha.check_multi_order(n)?,
        Mapped::Weighted { beta, alpha } => {
            beta.check_multi_order(n)?;
            alpha.check_multi_order(n)?;
        }
        Mapped::Acting(u) => {
            if !same_theta(u.theta(), &theta) {
                return Err(Error::invalid("element and amplitude over different θ"));
            }
        }
        Mapped::Star | Mapped::Scaled(_) => {}
    }
    Ok(Arc::new(MappedAmplitude::new(inner, map)))
}

/// Central difference `∂_{var} a` with step `h`.
pub struct FdPartial {
    inner: AmplitudeRef,
    var: Var,
    h: f64,
}

pub const FD_STEP: f64 = 1e-5;

impl FdPartial {
    pub fn new(inner: AmplitudeRef, var: Var) -> Self {
        FdPartial { inner, var, h: FD_STEP }
    }
}

impl Amplitude for FdPartial {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        self.inner.theta()
    }

    fn support(&self) -> SupportBox {
        self.inner.support()
    }

    fn eval(&self, s: &[f64], xi: &[f64]) -> AlgebraElement {
        let (mut sp, mut xp) = (s.to_vec(), xi.to_vec());
        let (mut sm, mut xm) = (s.to_vec(), xi.to_vec());
        match self.var {
            Var::S(j) => {
                sp[j] += self.h;
                sm[j] -= self.h;
            }
            Var::Xi(j) => {
                xp[j] += self.h;
                xm[j] -= self.h;
            }
        }
        let mut d = self.inner.eval(&sp, &xp);
        d.add_scaled(&self.inner.eval(&sm, &xm), Complex64::new(-1.0, 0.0));
        d.scale_real(0.5 / self.h)
    }
}
