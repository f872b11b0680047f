//! One-dimensional rules and tensor grids for the oscillatory integrals.

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the total number of tensor-grid points.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, symmetrized so that the
/// rule is exactly invariant under `x ↦ -x`.
pub fn gauss_legendre(nodes: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(nodes)
        .map_err(|_| Error::invalid(format!("Gauss–Legendre rule needs at least 2 nodes, got {nodes}")))?;
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = pairs.len();
    let sym: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let j = m - 1 - i;
            let x = 0.5 * (pairs[i].0 - pairs[j].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            (if i == j { 0.0 } else { x }, w)
        })
        .collect();
    Ok(sym)
}

/// Composite Gauss–Legendre rule on `[a, b]`.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, nodes: usize) -> Result<Vec<(f64, f64)>> {
    if panels == 0 {
        return Err(Error::invalid("need at least one panel"));
    }
    let base = gauss_legendre(nodes)?;
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * nodes);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in &base {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    GaussLegendre { panels: usize, nodes_per_panel: usize },
    Trapezoid { points: usize },
}

/// A per-axis rule plus a cap on the total tensor-grid size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub budget: usize,
}

impl QuadratureSpec {
    pub fn gauss_legendre(panels: usize, nodes_per_panel: usize) -> Self {
        QuadratureSpec {
            scheme: Scheme::GaussLegendre { panels, nodes_per_panel },
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn trapezoid(points: usize) -> Self {
        QuadratureSpec {
            scheme: Scheme::Trapezoid { points },
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn points_per_axis(&self) -> usize {
        match self.scheme {
            Scheme::GaussLegendre { panels, nodes_per_panel } => panels * nodes_per_panel,
            Scheme::Trapezoid { points } => points,
        }
    }

    /// Points per oscillation period below which the rule is rejected.
    pub fn min_points_per_period(&self) -> f64 {
        match self.scheme {
            Scheme::GaussLegendre { .. } => 2.0,
            Scheme::Trapezoid { .. } => 16.0,
        }
    }

    /// Same scheme with twice the points per axis.
    pub fn refined(&self) -> Self {
        let scheme = match self.scheme {
            Scheme::GaussLegendre { panels, nodes_per_panel } => Scheme::GaussLegendre {
                panels: 2 * panels,
                nodes_per_panel,
            },
            Scheme::Trapezoid { points } => Scheme::Trapezoid { points: 2 * points - 1 },
        };
        QuadratureSpec { scheme, budget: self.budget }
    }

    /// Checks the tensor grid of `axes` axes against the budget.
    pub fn check_budget(&self, axes: usize) -> Result<usize> {
        let per = self.points_per_axis();
        let total = (per as u128).checked_pow(axes as u32).unwrap_or(u128::MAX);
        if total > self.budget as u128 {
            return Err(Error::Resource(format!(
                "{axes}-dimensional grid with {per} points per axis has {total} points, over the budget of {}",
                self.budget
            )));
        }
        Ok(total as usize)
    }

    /// Nodes and weights on `[a, b]`.
    pub fn rule(&self, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
        match self.scheme {
            Scheme::GaussLegendre { panels, nodes_per_panel } => composite_gauss_legendre(a, b, panels, nodes_per_panel),
            Scheme::Trapezoid { points } => {
                if points < 2 {
                    return Err(Error::invalid("trapezoid rule needs at least 2 points"));
                }
                let h = (b - a) / (points - 1) as f64;
                Ok((0..points)
                    .map(|i| {
                        let w = if i == 0 || i == points - 1 { 0.5 * h } else { h };
                        (a + i as f64 * h, w)
                    })
                    .collect())
            }
        }
    }

    /// Rejects rules too coarse for `e^{iωx}` on an interval of length `len`.
    pub fn check_oscillation(&self, len: f64, omega: f64) -> Result<()> {
        let periods = len * omega.abs() / std::f64::consts::TAU;
        let needed = (periods * self.min_points_per_period()).ceil();
        if (self.points_per_axis() as f64) < needed {
            return Err(Error::Resource(format!(
                "{} points per axis resolve {periods:.1} oscillation periods poorly (need at least {needed})",
                self.points_per_axis()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_rule_integrates_polynomials() {
        let r = gauss_legendre(8).unwrap();
        for (i, &(x, w)) in r.iter().enumerate() {
            let (y, v) = r[r.len() - 1 - i];
            assert_eq!(x, -y);
            assert_eq!(w, v);
        }
        let int: f64 = r.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((int - 2.0 / 15.0).abs() < 1e-14);
        assert!(gauss_legendre(1).is_err());
    }

    #[test]
    fn composite_and_trapezoid_on_gaussian() {
        let exact = std::f64::consts::PI.sqrt();
        let gl = QuadratureSpec::gauss_legendre(4, 16).rule(-8.0, 8.0).unwrap();
        let tr = QuadratureSpec::trapezoid(129).rule(-8.0, 8.0).unwrap();
        for rule in [gl, tr] {
            let s: f64 = rule.iter().map(|(x, w)| w * (-x * x).exp()).sum();
            assert!((s - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn budget_and_oscillation_guards() {
        let q = QuadratureSpec::gauss_legendre(2, 16).with_budget(10);
        assert!(matches!(q.check_budget(2), Err(Error::Resource(_))));
        assert!(q.check_oscillation(10.0, 100.0).is_err());
        assert!(q.check_oscillation(10.0, 1.0).is_ok());
        assert_eq!(q.refined().points_per_axis(), 64);
    }
}
