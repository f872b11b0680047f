use super::table::ToroidalSymbol;
use crate::error::{Error, Result};
use crate::fit::log_log_fit;

/// Outcome of [`classify_smoothing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothingClass {
    Schwartz,
    Order(f64),
    Inconclusive { slope: f64, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingOptions {
    /// Fitted orders below this, with accelerating decay, count as Schwartz.
    pub threshold: f64,
    /// Largest acceptable RMS log residual of the power-law fit.
    pub residual_bound: f64,
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        SmoothingOptions {
            threshold: -6.0,
            residual_bound: 0.25,
        }
    }
}

/// Smallest table radius accepted by the classifier.
pub const MIN_RADIUS: i64 = 8;

pub fn classify_smoothing(rho: &ToroidalSymbol) -> Result<SmoothingClass> {
    classify_smoothing_with(rho, &SmoothingOptions::default())
}

/// Classifies the decay of `r ↦ max_{|k|_∞ = r} ‖ρ_k‖_1` over the outer half of the table.
pub fn classify_smoothing_with(rho: &ToroidalSymbol, opts: &SmoothingOptions) -> Result<SmoothingClass> {
    let radius = rho.radius();
    if radius < MIN_RADIUS {
        return Err(Error::invalid(format!(
            "smoothing classification needs table radius ≥ {MIN_RADIUS}, got {radius}"
        )));
    }
    let mut shells = vec![0.0f64; radius as usize + 1];
    for (k, v) in rho.entries() {
        let r = k.sup_norm();
        if r <= radius {
            shells[r as usize] = shells[r as usize].max(v.l1_norm());
        }
    }
    let Some(last_nonzero) = shells.iter().rposition(|&m| m > 0.0) else {
        return Ok(SmoothingClass::Schwartz);
    };
    if (last_nonzero as i64) < radius {
        return Ok(SmoothingClass::Schwartz);
    }
    let start = (radius / 2).max(1) as usize;
    let outer: Vec<(f64, f64)> = (start..=radius as usize).map(|r| (r as f64, shells[r])).collect();
    if outer.iter().any(|&(_, m)| m == 0.0) {
        // interior zero shells: the profile is not a clean power law
        let fit = log_log_fit(&outer);
        return Ok(SmoothingClass::Inconclusive {
            slope: fit.map_or(f64::NAN, |f| f.slope),
            residual: f64::INFINITY,
        });
    }
    let fit = log_log_fit(&outer).expect("at least two positive shells");
    let local: Vec<f64> = outer
        .windows(2)
        .map(|w| (w[1].1 / w[0].1).ln() / ((1.0 + w[1].0) / (1.0 + w[0].0)).ln())
        .collect();
    let accelerating = local.last().unwrap() < &(local[0] - 1.0);
    if fit.slope < opts.threshold && accelerating {
        return Ok(SmoothingClass::Schwartz);
    }
    if fit.residual > opts.residual_bound {
        return Ok(SmoothingClass::Inconclusive {
            slope: fit.slope,
            residual: fit.residual,
        });
    }
    Ok(SmoothingClass::Order(fit.slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraElement;
    use crate::lattice::ThetaMatrix;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn table(f: impl Fn(f64) -> f64) -> ToroidalSymbol {
        let th = Arc::new(ThetaMatrix::two_dim(0.25));
        ToroidalSymbol::from_fn(th.clone(), 16, |k| AlgebraElement::scalar(th.clone(), Complex64::new(f(k.euclidean_norm()), 0.0))).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(classify_smoothing(&table(|r| (-r).exp())).unwrap(), SmoothingClass::Schwartz);
        assert_eq!(classify_smoothing(&table(|_| 0.0)).unwrap(), SmoothingClass::Schwartz);
        match classify_smoothing(&table(|r| (1.0 + r * r).sqrt())).unwrap() {
            SmoothingClass::Order(m) => assert!((m - 1.0).abs() < 0.3, "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_tables_are_rejected() {
        let th = Arc::new(ThetaMatrix::two_dim(0.25));
        let t = ToroidalSymbol::from_fn(th.clone(), 4, |_| AlgebraElement::one(th.clone())).unwrap();
        assert!(classify_smoothing(&t).is_err());
    }
}
