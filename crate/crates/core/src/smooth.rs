//! Smooth step and radial cutoff functions built from `e^{-1/t}`.

/// `e^{-1/t}` for `t > 0`, zero otherwise.
pub fn flat(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn flat_prime(t: f64) -> f64 {
    if t > 0.0 {
        flat(t) / (t * t)
    } else {
        0.0
    }
}

/// Smooth monotone step: 0 for `y ≤ 0`, 1 for `y ≥ 1`, and
/// `step(y) + step(1 - y) = 1` everywhere.
pub fn step(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let a = flat(y);
    let b = flat(1.0 - y);
    a / (a + b)
}

pub fn step_prime(y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        return 0.0;
    }
    let (a, b) = (flat(y), flat(1.0 - y));
    let (da, db) = (flat_prime(y), flat_prime(1.0 - y));
    (da * b + a * db) / ((a + b) * (a + b))
}

/// Radial cutoff equal to 1 on `|ξ| ≤ r0` and 0 on `|ξ| ≥ r1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub r0: f64,
    pub r1: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { r0: 0.25, r1: 0.75 }
    }
}

impl Cutoff {
    pub fn new(r0: f64, r1: f64) -> crate::Result<Self> {
        if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(crate::Error::invalid(format!(
                "cutoff radii must satisfy 0 < r0 < r1, got ({r0}, {r1})"
            )));
        }
        Ok(Cutoff { r0, r1 })
    }

    /// Value at radius `r`.
    pub fn radial(&self, r: f64) -> f64 {
        1.0 - step((r - self.r0) / (self.r1 - self.r0))
    }

    /// Derivative with respect to the radius.
    pub fn radial_prime(&self, r: f64) -> f64 {
        -step_prime((r - self.r0) / (self.r1 - self.r0)) / (self.r1 - self.r0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.radial(norm(x))
    }

    /// `∂_j χ(x)`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        if r == 0.0 {
            return vec![0.0; x.len()];
        }
        let d = self.radial_prime(r) / r;
        x.iter().map(|&xj| d * xj).collect()
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
