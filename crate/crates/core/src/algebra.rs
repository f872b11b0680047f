//! The smooth noncommutative torus as truncated Fourier coefficient tables.
//!
//! An [`AlgebraElement`] stores `u = Σ u_k U^k` for finitely many `k` with
//! `|k|_∞ ≤ R`. Products are computed on the full Minkowski-sum support and
//! only then cut back to the configured radius cap; the ℓ¹ mass of what was
//! thrown away is reported so truncation never happens silently.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::log_log_fit;
use crate::lattice::{MultiIndex, ThetaMatrix};

/// Coefficients with modulus below this are removed from tables.
pub const DEFAULT_DROP_TOL: f64 = 1e-15;
/// Default sup-norm radius cap applied to products.
pub const DEFAULT_RADIUS_CAP: i64 = 32;

/// Truncation policy applied to products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub cap: i64,
    pub drop_tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            cap: DEFAULT_RADIUS_CAP,
            drop_tol: DEFAULT_DROP_TOL,
        }
    }
}

/// A product together with the ℓ¹ mass discarded by truncation.
#[derive(Debug, Clone)]
pub struct Product {
    pub element: AlgebraElement,
    pub tail_mass: f64,
}

#[derive(Clone)]
pub struct AlgebraElement {
    theta: Arc<ThetaMatrix>,
    radius: i64,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

pub(crate) fn same_theta(a: &Arc<ThetaMatrix>, b: &Arc<ThetaMatrix>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `e^{-2iπ x}`.
#[inline]
pub(crate) fn twist(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * x)
}

impl AlgebraElement {
    pub fn zero(theta: Arc<ThetaMatrix>) -> Self {
        AlgebraElement {
            theta,
            radius: 0,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(theta: Arc<ThetaMatrix>) -> Self {
        Self::scalar(theta, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(theta: Arc<ThetaMatrix>, c: Complex64) -> Self {
        let n = theta.dim();
        Self::monomial(theta, MultiIndex::zeros(n), c)
    }

    /// `c·U^k`.
    pub fn monomial(theta: Arc<ThetaMatrix>, k: MultiIndex, c: Complex64) -> Self {
        assert_eq!(k.dim(), theta.dim(), "lattice point has the wrong dimension");
        let radius = k.sup_norm();
        let mut coeffs = BTreeMap::new();
        if c.norm() >= DEFAULT_DROP_TOL {
            coeffs.insert(k, c);
        }
        AlgebraElement {
            theta,
            radius,
            coeffs,
        }
    }

    /// `U^k`.
    pub fn basis(theta: Arc<ThetaMatrix>, k: MultiIndex) -> Self {
        Self::monomial(theta, k, Complex64::new(1.0, 0.0))
    }

    /// Builds an element from `(k, u_k)` pairs; repeated indices are summed.
    /// The radius is the largest sup-norm of the support.
    pub fn from_coeffs(
        theta: Arc<ThetaMatrix>,
        coeffs: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let n = theta.dim();
        let mut table: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (k, c) in coeffs {
            k.check_dim(n)?;
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::invalid(format!("non-finite coefficient at {k:?}")));
            }
            *table.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        table.retain(|_, c| c.norm() >= DEFAULT_DROP_TOL);
        let radius = table.keys().map(|k| k.sup_norm()).max().unwrap_or(0);
        Ok(AlgebraElement {
            theta,
            radius,
            coeffs: table,
        })
    }

    /// Element with coefficients `f(k)` on the box `|k|_∞ ≤ r`.
    pub fn from_fn(
        theta: Arc<ThetaMatrix>,
        r: i64,
        mut f: impl FnMut(&MultiIndex) -> Complex64,
    ) -> Self {
        let n = theta.dim();
        let coeffs = crate::lattice::lattice_box(n, r)
            .map(|k| {
                let c = f(&k);
                (k, c)
            })
            .filter(|(_, c)| c.norm() >= DEFAULT_DROP_TOL)
            .collect();
        AlgebraElement {
            theta,
            radius: r,
            coeffs,
        }
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// Restricts the table to `|k|_∞ ≤ r` and sets the working radius to `r`.
    pub fn truncated(&self, r: i64) -> Self {
        AlgebraElement {
            theta: self.theta.clone(),
            radius: r,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.sup_norm() <= r)
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    /// Same coefficients, larger working radius.
    pub fn with_radius(mut self, r: i64) -> Self {
        if r >= self.radius {
            self.radius = r;
            self
        } else {
            self.truncated(r)
        }
    }

    /// `u_k` (zero when absent).
    pub fn coeff(&self, k: &MultiIndex) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Number of stored (nonzero) coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Some((k, c))` when the element is `c·U^k` for a single `k`.
    pub fn as_monomial(&self) -> Option<(&MultiIndex, Complex64)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(k, c)| (k, *c))
        } else {
            None
        }
    }

    /// Largest sup-norm over the stored support.
    pub fn support_radius(&self) -> i64 {
        self.coeffs.keys().map(|k| k.sup_norm()).max().unwrap_or(0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `‖u‖_0`, the GNS Hilbert norm.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient-wise `max_k |u_k - v_k|`.
    pub fn max_abs_diff(&self, other: &AlgebraElement) -> f64 {
        self.max_abs_diff_within(other, i64::MAX)
    }

    /// Coefficient-wise maximum difference over `|k|_∞ ≤ r`.
    pub fn max_abs_diff_within(&self, other: &AlgebraElement, r: i64) -> f64 {
        let mut m: f64 = 0.0;
        for (k, c) in &self.coeffs {
            if k.sup_norm() <= r {
                m = m.max((c - other.coeff(k)).norm());
            }
        }
        for (k, c) in &other.coeffs {
            if k.sup_norm() <= r && !self.coeffs.contains_key(k) {
                m = m.max(c.norm());
            }
        }
        m
    }

    fn check_theta(&self, other: &AlgebraElement) -> Result<()> {
        if !same_theta(&self.theta, &other.theta) {
            return Err(Error::invalid(format!(
                "elements live over different deformations: {:?} vs {:?}",
                self.theta, other.theta
            )));
        }
        Ok(())
    }

    fn map_coeffs(&self, mut f: impl FnMut(&MultiIndex, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (k.clone(), f(k, *c)))
            .filter(|(_, c)| c.norm() >= DEFAULT_DROP_TOL)
            .collect();
        AlgebraElement {
            theta: self.theta.clone(),
            radius: self.radius,
            coeffs,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_coeffs(|_, u| u * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map_coeffs(|_, u| u * c)
    }

    /// Checked sum.
    pub fn try_add(&self, other: &AlgebraElement) -> Result<Self> {
        self.check_theta(other)?;
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(k.clone()).or_default() += c;
        }
        coeffs.retain(|_, c| c.norm() >= DEFAULT_DROP_TOL);
        Ok(AlgebraElement {
            theta: self.theta.clone(),
            radius: self.radius.max(other.radius),
            coeffs,
        })
    }

    /// `self += c·other`, in place.
    pub fn add_scaled(&mut self, other: &AlgebraElement, c: Complex64) {
        assert!(
            same_theta(&self.theta, &other.theta),
            "theta mismatch in add_scaled"
        );
        for (k, v) in &other.coeffs {
            *self.coeffs.entry(k.clone()).or_default() += v * c;
        }
        self.coeffs.retain(|_, c| c.norm() >= DEFAULT_DROP_TOL);
        self.radius = self.radius.max(other.radius);
    }

    /// Twisted product `(uv)_m = Σ_{k+l=m} u_k v_l e^{-2iπ c(k,l)}` with the
    /// default truncation policy.
    pub fn multiply(&self, other: &AlgebraElement) -> Result<Self> {
        Ok(self.multiply_with(other, &Truncation::default())?.element)
    }

    /// Twisted product with an explicit truncation policy.
    pub fn multiply_with(&self, other: &AlgebraElement, trunc: &Truncation) -> Result<Product> {
        self.check_theta(other)?;
        let n = self.dim();
        let theta = &self.theta;
        // c(k,l) = k · (B l) with B the strictly lower part of θ
        let lower: Vec<f64> = (0..n * n)
            .map(|i| {
                let (p, q) = (i / n, i % n);
                if q < p {
                    theta.get(p, q)
                } else {
                    0.0
                }
            })
            .collect();
        let trivial = theta.is_zero();
        let mut acc: HashMap<MultiIndex, Complex64> = HashMap::new();
        for (l, vl) in &other.coeffs {
            let bl: Vec<f64> = (0..n)
                .map(|p| (0..n).map(|q| lower[p * n + q] * l.get(q) as f64).sum())
                .collect();
            for (k, uk) in &self.coeffs {
                let mut c = uk * vl;
                if !trivial {
                    c *= twist(k.dot_f64(&bl));
                }
                *acc.entry(k + l).or_default() += c;
            }
        }
        let radius = trunc.cap.min(self.radius + other.radius);
        let mut tail_mass = 0.0;
        let mut coeffs = BTreeMap::new();
        for (m, c) in acc {
            if m.sup_norm() > radius {
                tail_mass += c.norm();
            } else if c.norm() >= trunc.drop_tol {
                coeffs.insert(m, c);
            }
        }
        Ok(Product {
            element: AlgebraElement {
                theta: self.theta.clone(),
                radius,
                coeffs,
            },
            tail_mass,
        })
    }

    /// `(u*)_m = conj(u_{-m}) e^{-2iπ c(m,m)}`.
    pub fn involution(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let m = -k;
                let ph = twist(self.theta.phase(&m, &m));
                (m, c.conj() * ph)
            })
            .collect();
        AlgebraElement {
            theta: self.theta.clone(),
            radius: self.radius,
            coeffs,
        }
    }

    /// `τ(u) = u_0`.
    pub fn trace(&self) -> Complex64 {
        self.coeff(&MultiIndex::zeros(self.dim()))
    }

    /// `⟨u, v⟩ = τ(u v*) = Σ u_k conj(v_k)`.
    pub fn inner_product(&self, other: &AlgebraElement) -> Result<Complex64> {
        self.check_theta(other)?;
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| c * other.coeff(k).conj())
            .sum())
    }

    /// `(δ^α u)_k = k^α u_k`.
    pub fn derivation(&self, alpha: &MultiIndex) -> Result<Self> {
        alpha.check_multi_order(self.dim())?;
        if alpha.is_zero() {
            return Ok(self.clone());
        }
        Ok(self.map_coeffs(|k, c| c * alpha.monomial_int(k)))
    }

    /// `δ_j u`.
    pub fn delta(&self, j: usize) -> Self {
        self.map_coeffs(|k, c| c * k.get(j) as f64)
    }

    /// `(α_s u)_k = e^{i s·k} u_k`.
    pub fn act(&self, s: &[f64]) -> Result<Self> {
        if s.len() != self.dim() {
            return Err(Error::invalid(format!(
                "action parameter has length {} but the dimension is {}",
                s.len(),
                self.dim()
            )));
        }
        Ok(self.map_coeffs(|k, c| c * Complex64::from_polar(1.0, k.dot_f64(s))))
    }

    /// `‖u - u*‖` in the coefficient max norm.
    pub fn selfadjoint_defect(&self) -> f64 {
        self.max_abs_diff(&self.involution())
    }

    pub fn decay_report(&self) -> DecayReport {
        let r_max = self.support_radius().max(self.radius);
        let mut shells = vec![0.0f64; (r_max + 1) as usize];
        for (k, c) in &self.coeffs {
            let r = k.sup_norm() as usize;
            shells[r] = shells[r].max(c.norm());
        }
        let tail_mass = self
            .coeffs
            .iter()
            .filter(|(k, _)| k.sup_norm() == self.radius)
            .map(|(_, c)| c.norm())
            .sum();
        let shells: Vec<(i64, f64)> = shells
            .into_iter()
            .enumerate()
            .map(|(r, m)| (r as i64, m))
            .collect();
        let pts: Vec<(f64, f64)> = shells.iter().map(|&(r, m)| (r as f64, m)).collect();
        let fitted_order = log_log_fit(&pts).map(|f| f.slope);
        DecayReport {
            shells,
            fitted_order,
            tail_mass,
        }
    }

    pub fn to_json_value(&self) -> ElementJson {
        ElementJson {
            n: self.dim(),
            theta_upper: self.theta.upper().to_vec(),
            radius: self.radius,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| CoeffJson {
                    k: k.as_slice().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("element serialization cannot fail")
    }

    pub fn from_json_value(v: ElementJson) -> Result<Self> {
        let theta = Arc::new(ThetaMatrix::new(v.n, v.theta_upper)?);
        Self::from_json_with_theta(theta, v.radius, v.coeffs)
    }

    fn from_json_with_theta(
        theta: Arc<ThetaMatrix>,
        radius: i64,
        coeffs: Vec<CoeffJson>,
    ) -> Result<Self> {
        let n = theta.dim();
        let mut table = BTreeMap::new();
        for c in coeffs {
            let k = MultiIndex::from(c.k);
            k.check_dim(n)?;
            if k.sup_norm() > radius {
                return Err(Error::Parse(format!(
                    "coefficient index {k:?} exceeds the declared radius {radius}"
                )));
            }
            if table.insert(k.clone(), Complex64::new(c.re, c.im)).is_some() {
                return Err(Error::Parse(format!("duplicate coefficient index {k:?}")));
            }
        }
        Ok(AlgebraElement {
            theta,
            radius,
            coeffs: table,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: ElementJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(v)
    }

    /// Reattaches this element to a shared θ handle (values must agree).
    pub fn rebind(mut self, theta: &Arc<ThetaMatrix>) -> Result<Self> {
        if **theta != *self.theta {
            return Err(Error::invalid("cannot rebind to a different theta"));
        }
        self.theta = theta.clone();
        Ok(self)
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement(R={}, {{", self.radius)?;
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k:?}: {c}")?;
        }
        write!(f, "}})")
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        same_theta(&self.theta, &other.theta)
            && self.radius == other.radius
            && self.coeffs == other.coeffs
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    /// Panics on a θ mismatch; [`AlgebraElement::try_add`] is the checked sum.
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_add(rhs).expect("theta mismatch")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_add(&-rhs).expect("theta mismatch")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale_real(-1.0)
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    /// Panics on a θ mismatch; [`AlgebraElement::multiply`] is the checked product.
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.multiply(rhs).expect("theta mismatch")
    }
}

/// On-disk element layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub n: usize,
    pub theta_upper: Vec<f64>,
    pub radius: i64,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// Numerical surrogate for rapid decay of a coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// `(r, max_{|k|_∞ = r} |u_k|)` for `r = 0..=R`.
    pub shells: Vec<(i64, f64)>,
    /// Least-squares slope of `log max` against `log(1+r)`; `None` when fewer
    /// than two shells are nonzero.
    pub fitted_order: Option<f64>,
    /// `Σ_{|k|_∞ = R} |u_k|`.
    pub tail_mass: f64,
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("shell_radius,max_abs\n");
        for (r, m) in &self.shells {
            out.push_str(&format!("{r},{m:e}\n"));
        }
        out
    }

    pub fn nonzero_shells(&self) -> usize {
        self.shells.iter().filter(|(_, m)| *m > 0.0).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn th(t: f64) -> Arc<ThetaMatrix> {
        Arc::new(ThetaMatrix::two_dim(t))
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn commutation_relation_of_generators() {
        let t = th(0.25);
        let u1 = AlgebraElement::basis(t.clone(), [1, 0].into());
        let u2 = AlgebraElement::basis(t.clone(), [0, 1].into());
        let a = u2.multiply(&u1).unwrap();
        let b = u1.multiply(&u2).unwrap();
        let k = MultiIndex::from([1, 1]);
        // U_2 U_1 = e^{2iπθ_{12}} U_1 U_2
        let ratio = a.coeff(&k) / b.coeff(&k);
        assert_abs_diff_eq!(ratio.re, (2.0 * PI * 0.25).cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(ratio.im, (2.0 * PI * 0.25).sin(), epsilon = 1e-14);
    }

    #[test]
    fn commutative_case_is_convolution() {
        let t = th(0.0);
        let u = AlgebraElement::from_coeffs(
            t.clone(),
            [([0, 0].into(), c(1.0, 0.5)), ([1, -1].into(), c(-0.3, 0.2))],
        )
        .unwrap();
        let v = AlgebraElement::from_coeffs(
            t.clone(),
            [([1, 0].into(), c(2.0, 0.0)), ([0, 1].into(), c(0.0, 1.0))],
        )
        .unwrap();
        let uv = u.multiply(&v).unwrap();
        let vu = v.multiply(&u).unwrap();
        assert!(uv.max_abs_diff(&vu) < 1e-15);
        assert_abs_diff_eq!(uv.coeff(&[2, -1].into()).re, -0.6, epsilon = 1e-15);
    }

    #[test]
    fn identity_and_involution_basics() {
        let t = th(0.37);
        let one = AlgebraElement::one(t.clone());
        assert_eq!(one.involution(), one);
        assert_eq!(one.trace(), c(1.0, 0.0));
        let u = AlgebraElement::basis(t.clone(), [2, 3].into());
        assert_eq!(u.trace(), c(0.0, 0.0));
        let prod = u.multiply(&u.involution()).unwrap();
        assert!(prod.max_abs_diff(&one) < 1e-14, "U^k (U^k)* = 1");
    }

    #[test]
    fn theta_mismatch_is_rejected() {
        let a = AlgebraElement::one(th(0.1));
        let b = AlgebraElement::one(th(0.2));
        assert!(matches!(a.multiply(&b), Err(Error::InvalidArgument(_))));
        assert!(a.inner_product(&b).is_err());
    }

    #[test]
    fn derivation_and_action() {
        let t = th(0.1);
        let u = AlgebraElement::basis(t.clone(), [3, -2].into());
        let d = u.derivation(&MultiIndex::unit(2, 1)).unwrap();
        assert_eq!(d.coeff(&[3, -2].into()), c(-2.0, 0.0));
        assert!(u.derivation(&[-1, 0].into()).is_err());
        assert_eq!(u.act(&[0.0, 0.0]).unwrap(), u);
        assert!(u.act(&[0.0]).is_err());
    }

    #[test]
    fn truncation_reports_tail_mass() {
        let t = th(0.0);
        let u = AlgebraElement::from_coeffs(t.clone(), [([2, 0].into(), c(0.5, 0.0))]).unwrap();
        let trunc = Truncation {
            cap: 3,
            drop_tol: DEFAULT_DROP_TOL,
        };
        let p = u.multiply_with(&u, &trunc).unwrap();
        assert_eq!(p.element.radius(), 3);
        assert!(p.element.is_zero());
        assert_abs_diff_eq!(p.tail_mass, 0.25);
    }

    #[test]
    fn decay_report_examples() {
        let t = th(0.0);
        let single = AlgebraElement::basis(t.clone(), [1, 2].into()).with_radius(5);
        let rep = single.decay_report();
        assert_eq!(rep.nonzero_shells(), 1);
        assert_eq!(rep.shells.len(), 6);

        let geo = AlgebraElement::from_fn(t.clone(), 10, |k| c(2f64.powi(-(k.sup_norm() as i32)), 0.0));
        let rep = geo.decay_report();
        assert!(rep.fitted_order.unwrap() < -2.0);
        assert!(rep.shells.windows(2).all(|w| w[1].1 < w[0].1));

        let poly = AlgebraElement::from_fn(t.clone(), 16, |k| c((1.0 + k.euclidean_norm()).powi(-3), 0.0));
        let order = poly.decay_report().fitted_order.unwrap();
        assert!((order + 3.0).abs() < 0.3, "fitted {order}");

        assert!(AlgebraElement::zero(t).decay_report().fitted_order.is_none());
        assert!(rep.to_csv().starts_with("shell_radius,max_abs\n"));
    }

    #[test]
    fn json_rejects_out_of_radius_index() {
        let s = r#"{"n":2,"theta_upper":[0.1],"radius":1,"coeffs":[{"k":[2,0],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(AlgebraElement::from_json(s), Err(Error::Parse(_))));
        let s = r#"{"n":2,"theta_upper":[0.1, 0.2],"radius":1,"coeffs":[]}"#;
        assert!(AlgebraElement::from_json(s).is_err());
    }
}
