use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::classical::ClassicalSymbol;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::fit::log_log_fit;
use crate::gns::norm_estimate;
use crate::lattice::{lattice_range, MultiIndex, ThetaMatrix};
use crate::smooth::norm;

/// An `𝒜_θ`-valued function on `R^n` that can be sampled together with its
/// `ξ`-derivatives.
pub trait Symbol: Send + Sync {
    fn theta(&self) -> &Arc<ThetaMatrix>;

    fn dim(&self) -> usize {
        self.theta().dim()
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement>;

    /// `∂_ξ^β ρ(ξ)`; central finite differences unless overridden.
    fn derivative(&self, beta: &MultiIndex, xi: &[f64]) -> Result<AlgebraElement> {
        finite_difference(self, beta, xi)
    }

    /// Order `m` with `ρ ∈ S^m`, when known.
    fn declared_order(&self) -> Option<f64> {
        None
    }
}

/// Tensor central difference `∂^β f(ξ) ≈ h^{-|β|} Σ_{γ≤β} (-1)^{|β-γ|} binom(β,γ) f(ξ + h(γ - β/2))`.
pub fn finite_difference<S: Symbol + ?Sized>(sym: &S, beta: &MultiIndex, xi: &[f64]) -> Result<AlgebraElement> {
    beta.check_multi_order(xi.len())?;
    if beta.is_zero() {
        return sym.eval(xi);
    }
    let h = 1e-3 * (1.0 + norm(xi));
    let mut acc = AlgebraElement::zero(sym.theta().clone());
    for gamma in beta.sub_orders() {
        let point: Vec<f64> = xi
            .iter()
            .enumerate()
            .map(|(j, &x)| x + h * (gamma.get(j) as f64 - beta.get(j) as f64 / 2.0))
            .collect();
        let sign = if (beta.order() - gamma.order()) % 2 == 0 { 1.0 } else { -1.0 };
        acc.add_scaled(&sym.eval(&point)?, Complex64::new(sign * beta.binomial(&gamma), 0.0));
    }
    Ok(acc.scale_real(h.powi(-(beta.order() as i32))))
}

impl Symbol for ClassicalSymbol {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        ClassicalSymbol::theta(self)
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        ClassicalSymbol::eval(self, xi)
    }

    fn derivative(&self, beta: &MultiIndex, xi: &[f64]) -> Result<AlgebraElement> {
        if norm(xi) >= self.excision().r1 {
            let d = self.diff_multi(beta)?;
            return d.raw_partial_sum(d.components().len(), xi);
        }
        finite_difference(self, beta, xi)
    }

    fn declared_order(&self) -> Option<f64> {
        Some(self.order().re)
    }
}

/// `⟨ξ⟩^s = (1+|ξ|²)^{s/2}` as a scalar symbol with exact derivatives.
#[derive(Debug, Clone)]
pub struct JapaneseBracket {
    theta: Arc<ThetaMatrix>,
    pub s: Complex64,
}

impl JapaneseBracket {
    pub fn new(theta: Arc<ThetaMatrix>, s: Complex64) -> Self {
        JapaneseBracket { theta, s }
    }

    pub fn real(theta: Arc<ThetaMatrix>, s: f64) -> Self {
        Self::new(theta, Complex64::new(s, 0.0))
    }

    /// `∂^β ⟨ξ⟩^s` as a scalar.
    pub fn scalar_derivative(&self, beta: &MultiIndex, xi: &[f64]) -> Complex64 {
        // terms c·ξ^γ(1+|ξ|²)^p
        let n = xi.len();
        let mut terms = vec![(Complex64::new(1.0, 0.0), MultiIndex::zeros(n), self.s / 2.0)];
        for j in 0..n {
            for _ in 0..beta.get(j) {
                let mut next = Vec::with_capacity(2 * terms.len());
                for (c, gamma, p) in &terms {
                    let gj = gamma.get(j);
                    if gj > 0 {
                        let mut g = gamma.clone();
                        g.set(j, gj - 1);
                        next.push((c * gj as f64, g, *p));
                    }
                    let mut g = gamma.clone();
                    g.set(j, gj + 1);
                    next.push((c * p * 2.0, g, p - 1.0));
                }
                terms = next;
            }
        }
        let base = 1.0 + xi.iter().map(|x| x * x).sum::<f64>();
        terms
            .iter()
            .map(|(c, gamma, p)| c * gamma.monomial(xi) * (p * base.ln()).exp())
            .sum()
    }
}

impl Symbol for JapaneseBracket {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        self.derivative(&MultiIndex::zeros(self.dim()), xi)
    }

    fn derivative(&self, beta: &MultiIndex, xi: &[f64]) -> Result<AlgebraElement> {
        beta.check_multi_order(self.dim())?;
        check_point(self.dim(), xi)?;
        Ok(AlgebraElement::scalar(self.theta.clone(), self.scalar_derivative(beta, xi)))
    }

    fn declared_order(&self) -> Option<f64> {
        Some(self.s.re)
    }
}

type SymbolFn = dyn Fn(&[f64]) -> AlgebraElement + Send + Sync;

/// User-supplied evaluator; derivatives by finite differences.
pub struct FnSymbol {
    theta: Arc<ThetaMatrix>,
    f: Box<SymbolFn>,
    order: Option<f64>,
}

impl FnSymbol {
    pub fn new(
        theta: Arc<ThetaMatrix>,
        order: Option<f64>,
        f: impl Fn(&[f64]) -> AlgebraElement + Send + Sync + 'static,
    ) -> Self {
        FnSymbol {
            theta,
            f: Box::new(f),
            order,
        }
    }
}

impl Symbol for FnSymbol {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        check_point(self.dim(), xi)?;
        Ok((self.f)(xi))
    }

    fn declared_order(&self) -> Option<f64> {
        self.order
    }
}

pub(crate) fn check_point(n: usize, xi: &[f64]) -> Result<()> {
    if xi.len() != n {
        return Err(Error::invalid(format!(
            "evaluation point has length {} but the dimension is {n}",
            xi.len()
        )));
    }
    Ok(())
}

/// Sample points `r·ω` for unit directions `ω` and radii `r`, plus the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    pub directions: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub include_origin: bool,
    /// Box radius for [`norm_estimate`] of non-scalar values.
    pub norm_radius: i64,
}

impl SamplingGrid {
    /// 26 directions in the plane (two on the line, seeded directions for
    /// `n ≥ 3`), radii `2^0..2^10`.
    pub fn default_for(n: usize) -> Self {
        SamplingGrid {
            directions: default_directions(n),
            radii: (0..=10).map(|e| f64::powi(2.0, e)).collect(),
            include_origin: true,
            norm_radius: 4,
        }
    }

    /// Dyadic shells `lo, 2lo, ..., hi` without the origin.
    pub fn shells(n: usize, lo: f64, hi: f64) -> Self {
        let mut radii = Vec::new();
        let mut r = lo;
        while r <= hi * (1.0 + 1e-12) {
            radii.push(r);
            r *= 2.0;
        }
        SamplingGrid {
            directions: default_directions(n),
            radii,
            include_origin: false,
            norm_radius: 4,
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let n = self.directions.first().map_or(0, Vec::len);
        let mut out = Vec::with_capacity(self.directions.len() * self.radii.len() + 1);
        if self.include_origin {
            out.push(vec![0.0; n]);
        }
        for &r in &self.radii {
            for d in &self.directions {
                out.push(d.iter().map(|x| r * x).collect());
            }
        }
        out
    }
}

fn default_directions(n: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..26)
            .map(|i| {
                // offset keeps the rays off the coordinate axes
                let a = 0.1 + std::f64::consts::TAU * i as f64 / 26.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut dirs = Vec::new();
            while dirs.len() < 13 * n {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = norm(&v);
                if (0.1..=1.0).contains(&r) {
                    dirs.push(v.iter().map(|x| x / r).collect());
                }
            }
            dirs
        }
    }
}

/// All nonnegative multi-indices with `|α| ≤ order`.
pub fn multi_orders_up_to(n: usize, order: usize) -> Vec<MultiIndex> {
    lattice_range(&vec![0; n], &vec![order as i64; n])
        .filter(|a| a.order() <= order as i64)
        .collect()
}

/// Sampled `p_N^{(m)}(ρ)`; a lower bound for the true seminorm.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormEstimate {
    pub order_n: usize,
    pub m: f64,
    pub value: f64,
    /// Sample point attaining the maximum.
    pub argmax: Vec<f64>,
    pub norm_radius: i64,
}

/// `max (1+|ξ|)^{-m+|β|} ‖δ^α ∂_ξ^β ρ(ξ)‖` over the grid and `|α|+|β| ≤ N`.
pub fn seminorm_estimate<S: Symbol + ?Sized>(
    sym: &S,
    order_n: usize,
    m: f64,
    grid: &SamplingGrid,
) -> Result<SeminormEstimate> {
    let n = sym.dim();
    let orders = multi_orders_up_to(n, order_n);
    let points = grid.points();
    let per_point: Vec<(f64, usize)> = points
        .par_iter()
        .enumerate()
        .map(|(idx, xi)| -> Result<(f64, usize)> {
            let mut best: f64 = 0.0;
            let weight_base = 1.0 + norm(xi);
            for beta in &orders {
                let d = sym.derivative(beta, xi)?;
                let w = weight_base.powf(-m + beta.order() as f64);
                for alpha in &orders {
                    if alpha.order() + beta.order() > order_n as i64 {
                        continue;
                    }
                    let v = norm_estimate(&d.derivation(alpha)?, grid.norm_radius);
                    best = best.max(w * v);
                }
            }
            Ok((best, idx))
        })
        .collect::<Result<_>>()?;
    let (value, idx) = per_point
        .into_iter()
        .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(SeminormEstimate {
        order_n,
        m,
        value,
        argmax: points.get(idx).cloned().unwrap_or_default(),
        norm_radius: grid.norm_radius,
    })
}

/// Growth order of `‖ρ(ξ)‖` from a log-log fit of shell maxima against `1+r`.
/// Returns `-∞` when fewer than two shells carry nonzero values.
pub fn order_fit<S: Symbol + ?Sized>(sym: &S, grid: &SamplingGrid) -> Result<f64> {
    let shells = shell_maxima(sym, grid, |s, xi| s.eval(xi))?;
    Ok(fit_shells(&shells))
}

/// `(r, max_ω ‖f(rω)‖)` over the grid radii.
pub fn shell_maxima<S: Symbol + ?Sized>(
    sym: &S,
    grid: &SamplingGrid,
    f: impl Fn(&S, &[f64]) -> Result<AlgebraElement> + Sync,
) -> Result<Vec<(f64, f64)>> {
    grid.radii
        .par_iter()
        .map(|&r| {
            let mut best: f64 = 0.0;
            for d in &grid.directions {
                let xi: Vec<f64> = d.iter().map(|x| r * x).collect();
                best = best.max(norm_estimate(&f(sym, &xi)?, grid.norm_radius));
            }
            Ok((r, best))
        })
        .collect()
}

/// Log-log slope of shell maxima, `-∞` for eventually vanishing data.
pub fn fit_shells(shells: &[(f64, f64)]) -> f64 {
    match log_log_fit(shells) {
        Some(fit) => fit.slope,
        None => f64::NEG_INFINITY,
    }
}
