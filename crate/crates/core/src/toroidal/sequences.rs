use num_complex::Complex64;

use super::table::ToroidalSymbol;
use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::lattice::{lattice_range, MultiIndex};

/// Boundary mass above which summation by parts is refused.
pub const BOUNDARY_MASS_TOL: f64 = 1e-12;

/// Complex sequence on `|k|_∞ ≤ K`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperedSequence {
    n: usize,
    radius: i64,
    values: Vec<Complex64>,
}

impl TemperedSequence {
    pub fn from_fn(n: usize, radius: i64, mut f: impl FnMut(&MultiIndex) -> Complex64) -> Self {
        let values = crate::lattice::lattice_box(n, radius).map(|k| f(&k)).collect();
        TemperedSequence { n, radius, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn get(&self, k: &MultiIndex) -> Complex64 {
        crate::lattice::box_position(k, self.radius).map_or(Complex64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn entries(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        crate::lattice::lattice_box(self.n, self.radius).zip(self.values.iter().copied())
    }

    /// Smallest `C` with `|v_k| ≤ C(1+|k|)^N` on the table.
    pub fn growth_constant(&self, order: f64) -> f64 {
        self.entries()
            .map(|(k, v)| v.norm() / (1.0 + k.euclidean_norm()).powf(order))
            .fold(0.0, f64::max)
    }

    /// `Δ̄^α v` (backward differences), still zero-extended.
    pub fn backward_difference(&self, alpha: &MultiIndex) -> Result<Self> {
        alpha.check_multi_order(self.n)?;
        let mut out = self.clone();
        for j in 0..self.n {
            for _ in 0..alpha.get(j) {
                let prev = out.clone();
                // u_{k-e_j} can be nonzero at k_j = K+1, so the box grows by one
                out = Self::from_fn(self.n, prev.radius + 1, |k| {
                    prev.get(k) - prev.get(&(k - &MultiIndex::unit(self.n, j)))
                });
            }
        }
        Ok(out)
    }
}

/// Both sides of `Σ_k (Δ̄^α u)_k ρ_k = (-1)^{|α|} Σ_k u_k (Δ^α ρ)_k`.
pub fn summation_by_parts_check(
    u: &TemperedSequence,
    rho: &ToroidalSymbol,
    alpha: &MultiIndex,
) -> Result<(AlgebraElement, AlgebraElement)> {
    if u.dim() != rho.dim() {
        return Err(Error::invalid("sequence and symbol have different dimensions"));
    }
    let diffed = rho.difference(alpha, super::table::Direction::Forward)?;
    let mass: f64 = u
        .entries()
        .filter(|(k, _)| !diffed.contains(k))
        .map(|(_, v)| v.norm())
        .sum();
    if mass > BOUNDARY_MASS_TOL {
        return Err(Error::Precondition(format!(
            "sequence mass {mass:e} outside the differenced table exceeds {BOUNDARY_MASS_TOL:e}"
        )));
    }
    let du = u.backward_difference(alpha)?;
    let mut lhs = AlgebraElement::zero(rho.theta().clone());
    for k in lattice_range(rho.lo(), rho.hi()) {
        let c = du.get(&k);
        if c != Complex64::new(0.0, 0.0) {
            lhs.add_scaled(rho.get(&k).expect("inside"), c);
        }
    }
    let sign = if alpha.order() % 2 == 0 { 1.0 } else { -1.0 };
    let mut rhs = AlgebraElement::zero(rho.theta().clone());
    for (k, v) in diffed.entries() {
        let c = u.get(&k);
        if c != Complex64::new(0.0, 0.0) {
            rhs.add_scaled(v, c * sign);
        }
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ThetaMatrix;
    use std::sync::Arc;

    #[test]
    fn growth_constant_of_polynomial() {
        let v = TemperedSequence::from_fn(2, 5, |k| Complex64::new((1.0 + k.euclidean_norm()).powi(3), 0.0));
        assert!((v.growth_constant(3.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_symbol_gives_zero() {
        let th = Arc::new(ThetaMatrix::two_dim(0.3));
        let u = TemperedSequence::from_fn(2, 12, |k| Complex64::new((-(k.euclidean_norm().powi(2))).exp(), 0.0));
        let rho = ToroidalSymbol::from_fn(th.clone(), 14, |_| AlgebraElement::one(th.clone())).unwrap();
        let (l, r) = summation_by_parts_check(&u, &rho, &[1, 0].into()).unwrap();
        assert!(l.max_abs() < 1e-14 && r.is_zero());
    }

    #[test]
    fn boundary_mass_is_rejected() {
        let th = Arc::new(ThetaMatrix::two_dim(0.3));
        let u = TemperedSequence::from_fn(2, 5, |_| Complex64::new(1.0, 0.0));
        let rho = ToroidalSymbol::from_fn(th.clone(), 5, |_| AlgebraElement::one(th.clone())).unwrap();
        assert!(matches!(summation_by_parts_check(&u, &rho, &[0, 1].into()), Err(Error::Precondition(_))));
    }
}
