use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::amplitude::{mapped, Amplitude, AmplitudeRef, Mapped};
use crate::algebra::{same_theta, AlgebraElement};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, ThetaMatrix};
use crate::quadrature::QuadratureSpec;
use crate::symbols::Symbol;

type Accumulator = BTreeMap<MultiIndex, Complex64>;

fn accumulate(acc: &mut Accumulator, v: &AlgebraElement, w: Complex64) {
    for (k, c) in v.iter() {
        *acc.entry(k.clone()).or_default() += c * w;
    }
}

fn merge(mut a: Accumulator, b: Accumulator) -> Accumulator {
    for (k, c) in b {
        *a.entry(k).or_default() += c;
    }
    a
}

/// Pairwise reduction with a fixed tree shape, so sums are reproducible.
fn tree_reduce(mut parts: Vec<Accumulator>) -> Accumulator {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => merge(a, b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

fn to_element(theta: &Arc<ThetaMatrix>, acc: Accumulator) -> AlgebraElement {
    AlgebraElement::from_coeffs(theta.clone(), acc).expect("quadrature sums are finite")
}

/// Iterates the tensor product of `rules`, calling `f(point, weight)`.
fn for_each_point(rules: &[Vec<(f64, f64)>], mut f: impl FnMut(&[f64], f64)) {
    let d = rules.len();
    if rules.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; d];
    let mut point: Vec<f64> = rules.iter().map(|r| r[0].0).collect();
    loop {
        let w: f64 = (0..d).map(|j| rules[j][idx[j]].1).product();
        f(&point, w);
        let mut j = d;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < rules[j].len() {
                point[j] = rules[j][idx[j]].0;
                break;
            }
            idx[j] = 0;
            point[j] = rules[j][0].0;
        }
    }
}

/// `J_0(a) = (2π)^{-n} ∬ e^{is·ξ} a(s, ξ) ds dξ` by tensor quadrature over the support box.
pub fn j0(a: &dyn Amplitude, quad: &QuadratureSpec) -> Result<AlgebraElement> {
    let n = a.dim();
    quad.check_budget(2 * n)?;
    let sup = a.support();
    if !(sup.s.is_finite() && sup.xi.is_finite() && sup.s >= 0.0 && sup.xi >= 0.0) {
        return Err(Error::invalid("amplitude support box must be finite"));
    }
    quad.check_oscillation(2.0 * sup.s, sup.xi * (n as f64).sqrt())?;
    quad.check_oscillation(2.0 * sup.xi, sup.s * (n as f64).sqrt())?;
    let s_rule = quad.rule(-sup.s, sup.s)?;
    let xi_rule = quad.rule(-sup.xi, sup.xi)?;
    let mut inner_rules: Vec<Vec<(f64, f64)>> = vec![s_rule.clone(); n - 1];
    inner_rules.extend(std::iter::repeat(xi_rule).take(n));
    let norm = TAU.powi(-(n as i32));
    let parts: Vec<Accumulator> = s_rule
        .par_iter()
        .map(|&(s0, w0)| {
            let mut acc = Accumulator::new();
            let mut s = vec![0.0; n];
            s[0] = s0;
            for_each_point(&inner_rules, |p, w| {
                s[1..].copy_from_slice(&p[..n - 1]);
                let xi = &p[n - 1..];
                let v = a.eval(&s, xi);
                if v.is_zero() {
                    return;
                }
                let phase: f64 = s.iter().zip(xi).map(|(x, y)| x * y).sum();
                accumulate(&mut acc, &v, Complex64::from_polar(norm * w0 * w, phase));
            });
            acc
        })
        .collect();
    Ok(to_element(a.theta(), tree_reduce(parts)))
}

/// `J_0` at a rule and at its refinement.
#[derive(Debug, Clone)]
pub struct J0Report {
    pub value: AlgebraElement,
    pub refined: AlgebraElement,
    /// Coefficient max difference between the two.
    pub delta: f64,
}

pub fn j0_with_refinement(a: &dyn Amplitude, quad: &QuadratureSpec) -> Result<J0Report> {
    let value = j0(a, quad)?;
    let refined = j0(a, &quad.refined())?;
    let delta = value.max_abs_diff(&refined);
    Ok(J0Report { value, refined, delta })
}

/// `P_a u = J(a(s, ξ) α_{-s}(u))` in the integrable regime.
pub fn p_from_amplitude(a: AmplitudeRef, u: &AlgebraElement, quad: &QuadratureSpec) -> Result<AlgebraElement> {
    if !same_theta(a.theta(), u.theta()) {
        return Err(Error::invalid("element and amplitude over different θ"));
    }
    if u.is_zero() {
        return Ok(AlgebraElement::zero(u.theta().clone()));
    }
    let acted = mapped(a, Mapped::Acting(u.clone()))?;
    j0(acted.as_ref(), quad)
}

/// Largest `‖ρ‖` (coefficient max) sampled on the faces of `[-Ξ, Ξ]^n`.
fn boundary_size(rho: &dyn Symbol, extent: f64) -> Result<f64> {
    let n = rho.dim();
    let samples: usize = 33;
    let mut worst: f64 = 0.0;
    for face in 0..n {
        for sign in [-1.0, 1.0] {
            let total = samples.pow(n as u32 - 1);
            for idx in 0..total {
                let mut xi = vec![0.0; n];
                let mut rem = idx;
                for (j, x) in xi.iter_mut().enumerate() {
                    if j == face {
                        *x = sign * extent;
                    } else {
                        let i = rem % samples;
                        rem /= samples;
                        *x = -extent + 2.0 * extent * i as f64 / (samples - 1) as f64;
                    }
                }
                worst = worst.max(rho.eval(&xi)?.max_abs());
            }
        }
    }
    Ok(worst)
}

/// `ρ̌(s) = (2π)^{-n} ∫ e^{is·ξ} ρ(ξ) dξ` over `[-Ξ, Ξ]^n`; `ρ` must be below
/// `decay_bound` on the faces of the box.
pub fn inverse_fourier(
    rho: &dyn Symbol,
    s: &[f64],
    extent: f64,
    decay_bound: f64,
    quad: &QuadratureSpec,
) -> Result<AlgebraElement> {
    let n = rho.dim();
    if s.len() != n {
        return Err(Error::invalid("frequency point has the wrong dimension"));
    }
    let edge = boundary_size(rho, extent)?;
    if edge > decay_bound {
        return Err(Error::Precondition(format!(
            "symbol is {edge:e} on the boundary of [-{extent}, {extent}]^{n}, above the declared bound {decay_bound:e}"
        )));
    }
    let omega = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    quad.check_oscillation(2.0 * extent, omega)?;
    fourier_sum(rho.theta(), n, extent, quad, Complex64::new(0.0, 1.0), s, TAU.powi(-(n as i32)), |x| rho.eval(x))
}

/// `ĝ(ξ) = ∫ e^{-is·ξ} g(s) ds` over `[-S, S]^n`.
pub fn fourier_transform(
    theta: &Arc<ThetaMatrix>,
    g: impl Fn(&[f64]) -> Result<AlgebraElement> + Sync,
    xi: &[f64],
    extent: f64,
    quad: &QuadratureSpec,
) -> Result<AlgebraElement> {
    let omega = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    quad.check_oscillation(2.0 * extent, omega)?;
    fourier_sum(theta, xi.len(), extent, quad, Complex64::new(0.0, -1.0), xi, 1.0, g)
}

#[allow(clippy::too_many_arguments)]
fn fourier_sum(
    theta: &Arc<ThetaMatrix>,
    n: usize,
    extent: f64,
    quad: &QuadratureSpec,
    sign: Complex64,
    freq: &[f64],
    scale: f64,
    f: impl Fn(&[f64]) -> Result<AlgebraElement> + Sync,
) -> Result<AlgebraElement> {
    quad.check_budget(n)?;
    let rule = quad.rule(-extent, extent)?;
    let inner = vec![rule.clone(); n - 1];
    let parts: Vec<Accumulator> = rule
        .par_iter()
        .map(|&(x0, w0)| -> Result<Accumulator> {
            let mut acc = Accumulator::new();
            let mut x = vec![x0; n];
            let mut err = None;
            for_each_point(&inner, |p, w| {
                if err.is_some() {
                    return;
                }
                x[1..].copy_from_slice(p);
                match f(&x) {
                    Ok(v) => {
                        let phase: f64 = x.iter().zip(freq).map(|(a, b)| a * b).sum();
                        accumulate(&mut acc, &v, (sign * phase).exp() * (scale * w0 * w));
                    }
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok(acc), Err)
        })
        .collect::<Result<_>>()?;
    Ok(to_element(theta, tree_reduce(parts)))
}
