use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::ToroidalSymbol;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::lattice::{lattice_range, ThetaMatrix};
use crate::quadrature::composite_gauss_legendre;
use crate::smooth::step;
use crate::symbols::{check_point, Symbol};

/// Plateau fraction of the smooth step inside `θ_1`.
const PLATEAU: f64 = 0.125;
const PANELS: usize = 64;
const SPACING: f64 = 1.0 / 256.0;
/// Largest `|ξ|` held in the `φ_1` cache; beyond it `φ_1` is treated as zero.
pub const CACHE_EXTENT: f64 = 32.0;
/// Kernel contributions with `|ξ - k|_∞` above this are dropped.
pub const DEFAULT_WINDOW: f64 = 30.0;
const PARTITION_TOL: f64 = 1e-8;

fn s_profile(x: f64) -> f64 {
    step((x - PLATEAU) / (1.0 - 2.0 * PLATEAU))
}

/// Even bump with support in `(-2π, 2π)` and `θ_1(t) + θ_1(2π - t) = (2π)^{-1}` on `[0, 2π]`.
pub fn theta1(t: f64) -> f64 {
    let t = t.abs();
    if t >= TAU {
        return 0.0;
    }
    s_profile((TAU - t) / TAU) / TAU
}

/// Cached `φ_1 = ∫ θ_1(t) e^{-itξ} dt` and `φ = Π_j φ_1(ξ_j)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterpolationKernel {
    pub quadrature_order: usize,
    pub panels: usize,
    pub spacing: f64,
    pub window: f64,
    /// `max |θ_1(t) + θ_1(2π-t) - (2π)^{-1}|` over a sample of `[0, 2π]`.
    pub partition_residual: f64,
    /// `max |φ_1|` on cached samples with `|ξ| ≥ window`.
    pub tail_bound: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

/// Quadrature rule for `2∫_0^{2π} θ_1(t) (·) dt`, weights premultiplied by `2θ_1`.
fn weighted_nodes(quadrature_order: usize) -> Result<Vec<(f64, f64)>> {
    Ok(composite_gauss_legendre(0.0, TAU, PANELS, quadrature_order)?
        .into_iter()
        .map(|(t, w)| (t, 2.0 * w * theta1(t)))
        .filter(|(_, w)| *w != 0.0)
        .collect())
}

/// `φ_1(ξ)` by direct quadrature (no cache).
pub fn phi1_direct(xi: f64, quadrature_order: usize) -> Result<f64> {
    Ok(weighted_nodes(quadrature_order)?.iter().map(|(t, w)| w * (t * xi).cos()).sum())
}

pub fn build_kernel(quadrature_order: usize) -> Result<InterpolationKernel> {
    if quadrature_order < 32 {
        return Err(Error::invalid(format!("quadrature order must be at least 32, got {quadrature_order}")));
    }
    let partition_residual = (0..=4096)
        .map(|i| {
            let t = TAU * i as f64 / 4096.0;
            (theta1(t) + theta1(TAU - t) - 1.0 / TAU).abs()
        })
        .fold(0.0, f64::max);
    if partition_residual > PARTITION_TOL {
        return Err(Error::Construction(format!("partition identity residual {partition_residual:e}")));
    }
    let nodes = weighted_nodes(quadrature_order)?;
    let count = (CACHE_EXTENT / SPACING).round() as usize + 1;
    let (values, derivs): (Vec<f64>, Vec<f64>) = (0..count)
        .into_par_iter()
        .map(|i| {
            let xi = i as f64 * SPACING;
            let mut v = 0.0;
            let mut d = 0.0;
            for &(t, w) in &nodes {
                let (s, c) = (t * xi).sin_cos();
                v += w * c;
                d -= w * t * s;
            }
            (v, d)
        })
        .unzip();
    let first_tail = (DEFAULT_WINDOW / SPACING).round() as usize;
    let tail_bound = values[first_tail..].iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(InterpolationKernel {
        quadrature_order,
        panels: PANELS,
        spacing: SPACING,
        window: DEFAULT_WINDOW,
        partition_residual,
        tail_bound,
        values,
        derivs,
    })
}

impl InterpolationKernel {
    /// `φ_1(ξ)` by cubic Hermite interpolation of the cache.
    pub fn phi1(&self, xi: f64) -> f64 {
        let x = xi.abs();
        let last = (self.values.len() - 1) as f64 * self.spacing;
        if x > last {
            return 0.0;
        }
        let pos = x / self.spacing;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let u = pos - i as f64;
        if u == 0.0 {
            return self.values[i];
        }
        let h = self.spacing;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivs[i] * h, self.derivs[i + 1] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * d0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * d1
    }

    /// `φ(ξ) = Π_j φ_1(ξ_j)`.
    pub fn phi(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|&x| self.phi1(x)).product()
    }

    /// Samples `(ξ, φ_1(ξ))` with quadrature metadata, for caching on disk.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("kernel serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let k: InterpolationKernel = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if k.values.len() < 2 || k.values.len() != k.derivs.len() || !(k.spacing > 0.0) {
            return Err(Error::Parse("malformed kernel cache".into()));
        }
        Ok(k)
    }
}

/// `ρ̃(ξ) = Σ_k φ(ξ - k) ρ_k` over the table.
#[derive(Debug, Clone)]
pub struct ExtendedSymbol {
    table: ToroidalSymbol,
    kernel: Arc<InterpolationKernel>,
    margin: i64,
}

/// Default distance from the table edge inside which the extension is trusted.
pub const DEFAULT_MARGIN: i64 = 2;

pub fn extend(table: ToroidalSymbol, kernel: Arc<InterpolationKernel>) -> ExtendedSymbol {
    ExtendedSymbol {
        table,
        kernel,
        margin: DEFAULT_MARGIN,
    }
}

impl ExtendedSymbol {
    pub fn with_margin(mut self, margin: i64) -> Self {
        self.margin = margin;
        self
    }

    pub fn table(&self) -> &ToroidalSymbol {
        &self.table
    }

    /// Points with `|ξ|_∞` up to this value may be evaluated.
    pub fn trusted_extent(&self) -> i64 {
        self.table.radius() - self.margin
    }

    pub fn in_window(&self, xi: &[f64]) -> bool {
        xi.iter().all(|x| x.abs() <= self.trusted_extent() as f64)
    }
}

impl Symbol for ExtendedSymbol {
    fn theta(&self) -> &Arc<ThetaMatrix> {
        self.table.theta()
    }

    fn eval(&self, xi: &[f64]) -> Result<AlgebraElement> {
        check_point(self.dim(), xi)?;
        let sup = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !self.in_window(xi) {
            return Err(Error::domain(
                format!(
                    "extension evaluated at |ξ|_∞ = {sup} outside the trusted window {}",
                    self.trusted_extent()
                ),
                sup,
            ));
        }
        let w = self.kernel.window;
        let lo: Vec<i64> = xi
            .iter()
            .zip(self.table.lo())
            .map(|(x, &l)| ((x - w).ceil() as i64).max(l))
            .collect();
        let hi: Vec<i64> = xi
            .iter()
            .zip(self.table.hi())
            .map(|(x, &h)| ((x + w).floor() as i64).min(h))
            .collect();
        // per-axis weights φ_1(ξ_j - k_j)
        let weights: Vec<Vec<f64>> = (0..xi.len())
            .map(|j| (lo[j]..=hi[j]).map(|k| self.kernel.phi1(xi[j] - k as f64)).collect())
            .collect();
        let mut acc = AlgebraElement::zero(self.theta().clone());
        for k in lattice_range(&lo, &hi) {
            let phi: f64 = (0..xi.len()).map(|j| weights[j][(k.get(j) - lo[j]) as usize]).product();
            if phi == 0.0 {
                continue;
            }
            let v = self.table.get(&k).expect("inside table");
            acc.add_scaled(v, Complex64::new(phi, 0.0));
        }
        Ok(acc)
    }
}
