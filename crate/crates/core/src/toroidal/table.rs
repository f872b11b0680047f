use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{same_theta, AlgebraElement, ElementJson};
use crate::error::{Error, Result};
use crate::fit::log_log_fit;
use crate::lattice::{lattice_range, MultiIndex, ThetaMatrix};
use crate::symbols::{SamplingGrid, Symbol};

/// What is known about the decay/growth of a toroidal symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeclaredOrder {
    Order(f64),
    Schwartz,
    Unknown,
}

/// Direction of a lattice difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `u_{k+e_i} - u_k`
    Forward,
    /// `u_k - u_{k-e_i}`
    Backward,
}

/// Lattice-indexed table `k ↦ ρ_k` on the box `lo ≤ k ≤ hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToroidalSymbol {
    theta: Arc<ThetaMatrix>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    values: Vec<AlgebraElement>,
    pub declared: DeclaredOrder,
}

impl ToroidalSymbol {
    /// Table `f(k)` on `|k|_∞ ≤ radius`.
    pub fn from_fn(
        theta: Arc<ThetaMatrix>,
        radius: i64,
        f: impl FnMut(&MultiIndex) -> AlgebraElement,
    ) -> Result<Self> {
        let n = theta.dim();
        Self::from_fn_on(theta, vec![-radius; n], vec![radius; n], f)
    }

    pub fn from_fn_on(
        theta: Arc<ThetaMatrix>,
        lo: Vec<i64>,
        hi: Vec<i64>,
        mut f: impl FnMut(&MultiIndex) -> AlgebraElement,
    ) -> Result<Self> {
        if lo.len() != theta.dim() || hi.len() != theta.dim() {
            return Err(Error::invalid("table bounds have the wrong dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::invalid("empty toroidal table"));
        }
        let mut values = Vec::new();
        for k in lattice_range(&lo, &hi) {
            let v = f(&k);
            if !same_theta(v.theta(), &theta) {
                return Err(Error::invalid(format!("entry at {k:?} lives over a different θ")));
            }
            values.push(v);
        }
        Ok(ToroidalSymbol {
            theta,
            lo,
            hi,
            values,
            declared: DeclaredOrder::Unknown,
        })
    }

    pub fn with_declared(mut self, declared: DeclaredOrder) -> Self {
        self.declared = declared;
        self
    }

    pub fn theta(&self) -> &Arc<ThetaMatrix> {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    /// Largest `K` with `|k|_∞ ≤ K` inside the table (negative if the box misses the origin).
    pub fn radius(&self) -> i64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (-l).min(h))
            .min()
            .unwrap_or(0)
    }

    fn position(&self, k: &MultiIndex) -> Option<usize> {
        if k.dim() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for j in 0..self.dim() {
            let c = k.get(j);
            if c < self.lo[j] || c > self.hi[j] {
                return None;
            }
            idx = idx * (self.hi[j] - self.lo[j] + 1) as usize + (c - self.lo[j]) as usize;
        }
        Some(idx)
    }

    pub fn get(&self, k: &MultiIndex) -> Option<&AlgebraElement> {
        self.position(k).map(|i| &self.values[i])
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.position(k).is_some()
    }

    pub fn entries(&self) -> impl Iterator<Item = (MultiIndex, &AlgebraElement)> {
        lattice_range(&self.lo, &self.hi).zip(self.values.iter())
    }

    /// `Δ^β` (forward) or `Δ̄^β` (backward); each step shrinks the box by one on its axis.
    pub fn difference(&self, beta: &MultiIndex, direction: Direction) -> Result<Self> {
        beta.check_multi_order(self.dim())?;
        let mut out = self.clone();
        for j in 0..self.dim() {
            for _ in 0..beta.get(j) {
                out = out.difference_axis(j, direction)?;
            }
        }
        out.declared = match self.declared {
            DeclaredOrder::Order(m) => DeclaredOrder::Order(m - beta.order() as f64),
            d => d,
        };
        Ok(out)
    }

    fn difference_axis(&self, j: usize, direction: Direction) -> Result<Self> {
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        match direction {
            Direction::Forward => hi[j] -= 1,
            Direction::Backward => lo[j] += 1,
        }
        if lo[j] > hi[j] {
            return Err(Error::invalid(format!("difference exhausts the table along axis {j}")));
        }
        let e = MultiIndex::unit(self.dim(), j);
        Self::from_fn_on(self.theta.clone(), lo, hi, |k| {
            let (a, b) = match direction {
                Direction::Forward => (k + &e, k.clone()),
                Direction::Backward => (k.clone(), k - &e),
            };
            self.get(&a).expect("inside") - self.get(&b).expect("inside")
        })
    }

    /// Entrywise `δ^α`.
    pub fn derivation(&self, alpha: &MultiIndex) -> Result<Self> {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = v.derivation(alpha)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let k = self.radius();
        if self.lo != vec![-k; self.dim()] || self.hi != vec![k; self.dim()] {
            return Err(Error::invalid("only centred tables can be serialized"));
        }
        let doc = ToroidalJson {
            k,
            entries: self
                .entries()
                .map(|(k, e)| EntryJson {
                    k: k.as_slice().to_vec(),
                    element: e.to_json_value(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc).expect("table serialization cannot fail"))
    }

    /// Parses a table; missing entries inside `|k|_∞ ≤ K` are zero.
    pub fn from_json(s: &str, theta: &Arc<ThetaMatrix>) -> Result<Self> {
        let doc: ToroidalJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.k < 0 {
            return Err(Error::Parse("K must be nonnegative".into()));
        }
        let mut table = Self::from_fn(theta.clone(), doc.k, |_| AlgebraElement::zero(theta.clone()))?;
        for e in doc.entries {
            let k = MultiIndex::from(e.k);
            let idx = table
                .position(&k)
                .ok_or_else(|| Error::Parse(format!("entry {k:?} lies outside |k|_∞ ≤ {}", doc.k)))?;
            table.values[idx] = AlgebraElement::from_json_value(e.element)?
                .rebind(theta)
                .map_err(|_| Error::Parse(format!("entry {k:?} has a different θ")))?;
        }
        Ok(table)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ToroidalJson {
    #[serde(rename = "K")]
    k: i64,
    entries: Vec<EntryJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryJson {
    k: Vec<i64>,
    element: ElementJson,
}

/// Lattice restriction `(ρ(k))_{|k|_∞ ≤ K}`.
pub fn restrict<S: Symbol + ?Sized>(sym: &S, radius: i64) -> Result<ToroidalSymbol> {
    let mut err = None;
    let table = ToroidalSymbol::from_fn(sym.theta().clone(), radius, |k| match sym.eval(&k.to_f64()) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            AlgebraElement::zero(sym.theta().clone())
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let declared = sym.declared_order().map_or(DeclaredOrder::Unknown, DeclaredOrder::Order);
    Ok(table.with_declared(declared))
}

/// `Δ^α ρ(k) = Σ_{γ≤α} (-1)^{|α-γ|} binom(α,γ) ρ(k+γ)` straight from the symbol.
pub fn lattice_difference_at<S: Symbol + ?Sized>(sym: &S, alpha: &MultiIndex, k: &MultiIndex) -> Result<AlgebraElement> {
    let mut acc = AlgebraElement::zero(sym.theta().clone());
    for gamma in alpha.sub_orders() {
        let sign = if (alpha.order() - gamma.order()) % 2 == 0 { 1.0 } else { -1.0 };
        let v = sym.eval(&(k + &gamma).to_f64())?;
        acc.add_scaled(&v, Complex64::new(sign * alpha.binomial(&gamma), 0.0));
    }
    Ok(acc)
}

const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Fitted order of `k ↦ Δ^αρ(k) - ∂^αρ(k)` over lattice points nearest to the
/// rays of `grid` at its radii; `-∞` when the difference vanishes.
pub fn difference_derivative_order<S: Symbol + ?Sized>(sym: &S, alpha: &MultiIndex, grid: &SamplingGrid) -> Result<f64> {
    let mut shells = Vec::with_capacity(grid.radii.len());
    for &r in &grid.radii {
        let mut best: f64 = 0.0;
        for d in &grid.directions {
            let k = MultiIndex::new(d.iter().map(|x| (r * x).round() as i64));
            let mut diff = AlgebraElement::zero(sym.theta().clone());
            let mut scale = 0.0;
            for gamma in alpha.sub_orders() {
                let sign = if (alpha.order() - gamma.order()) % 2 == 0 { 1.0 } else { -1.0 };
                let v = sym.eval(&(&k + &gamma).to_f64())?;
                scale += alpha.binomial(&gamma) * v.max_abs();
                diff.add_scaled(&v, Complex64::new(sign * alpha.binomial(&gamma), 0.0));
            }
            let deriv = sym.derivative(alpha, &k.to_f64())?;
            let gap = &diff - &deriv;
            // below this the gap is cancellation noise of the differences
            if gap.max_abs() > ROUNDOFF_FLOOR * (scale + deriv.max_abs()) {
                best = best.max(crate::gns::norm_estimate(&gap, grid.norm_radius));
            }
        }
        shells.push((r, best));
    }
    Ok(log_log_fit(&shells).map_or(f64::NEG_INFINITY, |f| f.slope))
}
