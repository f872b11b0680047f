//! Multi-indices on `Z^n`, the deformation matrix and the cocycle phase.
//!
//! The product of the Fourier unitaries is twisted by the bilinear form
//!
//! ```text
//! c(k, l) = Σ_{q<p} k_p θ_{pq} l_q,        U^k U^l = e^{-2iπ c(k,l)} U^{k+l}.
//! ```

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A point of `Z^n`, also used for multi-orders `α ∈ N_0^n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(SmallVec<[i64; 4]>);

impl MultiIndex {
    pub fn new(components: impl IntoIterator<Item = i64>) -> Self {
        MultiIndex(components.into_iter().collect())
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    /// The unit vector `e_j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.0[j] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, j: usize) -> i64 {
        self.0[j]
    }

    pub fn set(&mut self, j: usize, value: i64) {
        self.0[j] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// `|k|_∞`.
    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// `|α| = α_1 + … + α_n` (the length of a multi-order).
    pub fn order(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `Σ |k_j|`.
    pub fn l1_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    /// Euclidean norm `|k|`.
    pub fn euclidean_norm(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }

    /// `k · x`.
    pub fn dot_f64(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&k, &x)| k as f64 * x).sum()
    }

    /// `x^α = Π x_j^{α_j}` for a nonnegative multi-order.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    /// `k^α` where `self = α` is a multi-order and `k` a lattice point.
    pub fn monomial_int(&self, k: &MultiIndex) -> f64 {
        self.monomial(&k.to_f64())
    }

    /// `α!`.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(|i| i as f64).product::<f64>())
            .product()
    }

    /// Component-wise `β ≤ α`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Multinomial `binom(α, β) = Π binom(α_j, β_j)`.
    pub fn binomial(&self, beta: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&beta.0)
            .map(|(&a, &b)| binomial(a, b))
            .product()
    }

    /// All multi-orders `β ≤ α`.
    pub fn sub_orders(&self) -> Vec<MultiIndex> {
        let upper: Vec<i64> = self.0.to_vec();
        let mut out = Vec::new();
        let mut cur = MultiIndex::zeros(self.dim());
        loop {
            out.push(cur.clone());
            let mut j = 0;
            loop {
                if j == upper.len() {
                    return out;
                }
                if cur.0[j] < upper[j] {
                    cur.0[j] += 1;
                    break;
                }
                cur.0[j] = 0;
                j += 1;
            }
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::invalid(format!(
                "multi-index {self:?} has length {} but the ambient dimension is {n}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn check_multi_order(&self, n: usize) -> Result<()> {
        self.check_dim(n)?;
        if !self.is_nonnegative() {
            return Err(Error::invalid(format!(
                "multi-order {self:?} has a negative component"
            )));
        }
        Ok(())
    }
}

fn binomial(a: i64, b: i64) -> f64 {
    if b < 0 || b > a {
        return 0.0;
    }
    let b = b.min(a - b);
    (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(SmallVec::from_vec(v))
    }
}

impl From<&[i64]> for MultiIndex {
    fn from(v: &[i64]) -> Self {
        MultiIndex(SmallVec::from_slice(v))
    }
}

impl<const N: usize> From<[i64; N]> for MultiIndex {
    fn from(v: [i64; N]) -> Self {
        MultiIndex(SmallVec::from_slice(&v))
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

/// Real antisymmetric `n×n` deformation matrix.
///
/// Only the strict upper triangle is stored (row-major), so `θ_{kj} = -θ_{jk}`
/// holds exactly.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl ThetaMatrix {
    pub fn new(n: usize, upper: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(Error::invalid(format!(
                "dimension {n} needs {expected} upper-triangle entries, got {}",
                upper.len()
            )));
        }
        if upper.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("theta entries must be finite"));
        }
        Ok(ThetaMatrix { n, upper })
    }

    pub fn zero(n: usize) -> Self {
        ThetaMatrix {
            n,
            upper: vec![0.0; n * (n.max(1) - 1) / 2],
        }
    }

    /// The two-dimensional matrix with `θ_{12} = t`.
    pub fn two_dim(t: f64) -> Self {
        ThetaMatrix {
            n: 2,
            upper: vec![t],
        }
    }

    /// Builds from a full matrix, rejecting anything that is not antisymmetric.
    pub fn from_full(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid("theta must be square"));
            }
            if row[j] != 0.0 {
                return Err(Error::invalid("theta must have a zero diagonal"));
            }
            for k in (j + 1)..n {
                if row[k] != -rows[k][j] {
                    return Err(Error::invalid(format!(
                        "theta is not antisymmetric at ({j},{k})"
                    )));
                }
                upper.push(row[k]);
            }
        }
        ThetaMatrix::new(n, upper)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&x| x == 0.0)
    }

    fn upper_index(&self, j: usize, k: usize) -> usize {
        // row j contributes n-1-j entries
        j * (2 * self.n - j - 1) / 2 + (k - j - 1)
    }

    /// `θ_{jk}` (0-based indices).
    pub fn get(&self, j: usize, k: usize) -> f64 {
        use std::cmp::Ordering::*;
        match j.cmp(&k) {
            Equal => 0.0,
            Less => self.upper[self.upper_index(j, k)],
            Greater => -self.upper[self.upper_index(k, j)],
        }
    }

    /// `θ l` as a real vector.
    pub fn apply(&self, l: &MultiIndex) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|k| self.get(j, k) * l.get(k) as f64).sum())
            .collect()
    }

    /// The cocycle `c(k,l) = Σ_{q<p} k_p θ_{pq} l_q`.
    pub fn phase(&self, k: &MultiIndex, l: &MultiIndex) -> f64 {
        let mut acc = 0.0;
        for p in 0..self.n {
            let kp = k.get(p);
            if kp == 0 {
                continue;
            }
            for q in 0..p {
                acc += kp as f64 * self.get(p, q) * l.get(q) as f64;
            }
        }
        acc
    }
}

impl fmt::Debug for ThetaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theta(n={}, upper={:?})", self.n, self.upper)
    }
}

/// Checked cocycle phase `c(k,l)`.
pub fn phase(theta: &ThetaMatrix, k: &MultiIndex, l: &MultiIndex) -> Result<f64> {
    k.check_dim(theta.dim())?;
    l.check_dim(theta.dim())?;
    Ok(theta.phase(k, l))
}

/// Both sides of Peetre's inequality `(1+|ξ+η|)^m ≤ (1+|ξ|)^m (1+|η|)^{|m|}`.
pub fn peetre_bound(m: f64, xi: &[f64], eta: &[f64]) -> (f64, f64) {
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let sum = norm(&mut xi.iter().zip(eta).map(|(a, b)| a + b));
    let nxi = norm(&mut xi.iter().copied());
    let neta = norm(&mut eta.iter().copied());
    let lhs = (1.0 + sum).powf(m);
    let rhs = (1.0 + nxi).powf(m) * (1.0 + neta).powf(m.abs());
    (lhs, rhs)
}

/// Lattice points of the box `|k|_∞ ≤ r`, in row-major order (last axis fastest).
pub fn lattice_box(n: usize, r: i64) -> impl Iterator<Item = MultiIndex> {
    BoxIter::new(vec![-r; n], vec![r; n])
}

/// Lattice points of the box `lo ≤ k ≤ hi`, in row-major order.
pub fn lattice_range(lo: &[i64], hi: &[i64]) -> impl Iterator<Item = MultiIndex> {
    BoxIter::new(lo.to_vec(), hi.to_vec())
}

/// Lattice points with `|k|_∞ = r` exactly.
pub fn lattice_shell(n: usize, r: i64) -> impl Iterator<Item = MultiIndex> {
    lattice_box(n, r).filter(move |k| k.sup_norm() == r)
}

/// Row-major position of `k` in the box `|k|_∞ ≤ r`, if inside.
pub fn box_position(k: &MultiIndex, r: i64) -> Option<usize> {
    let side = 2 * r + 1;
    let mut idx = 0i64;
    for &c in k.as_slice() {
        if c.abs() > r {
            return None;
        }
        idx = idx * side + (c + r);
    }
    Some(idx as usize)
}

struct BoxIter {
    lo: Vec<i64>,
    hi: Vec<i64>,
    cur: Option<Vec<i64>>,
}

impl BoxIter {
    fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        let empty = lo.iter().zip(&hi).any(|(a, b)| a > b);
        let cur = if empty { None } else { Some(lo.clone()) };
        BoxIter { lo, hi, cur }
    }
}

impl Iterator for BoxIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.cur.as_mut()?;
        let out = MultiIndex::from(cur.as_slice());
        let mut j = cur.len();
        loop {
            if j == 0 {
                self.cur = None;
                break;
            }
            j -= 1;
            if cur[j] < self.hi[j] {
                cur[j] += 1;
                break;
            }
            cur[j] = self.lo[j];
        }
        Some(out)
    }
}
