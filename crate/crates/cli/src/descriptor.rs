//! Operator descriptors: `{"kind": ..., parameters}`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use nctorus::algebra::ElementJson;
use nctorus::gns::MetricTensor;
use nctorus::psido::{apply_psido, lambda_power, laplace_beltrami, DifferentialOperator, LaplaceBeltrami};
use nctorus::symbols::ClassicalSymbol;
use nctorus::toroidal::ToroidalSymbol;
use nctorus::{AlgebraElement, Error, MultiIndex, Result, ThetaMatrix};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexJson {
    fn value(&self) -> Complex64 {
        match *self {
            ComplexJson::Real(x) => Complex64::new(x, 0.0),
            ComplexJson::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub alpha: Vec<i64>,
    pub coeff: ElementJson,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Descriptor {
    Identity,
    FlatLaplacian,
    /// `Λ^s`; `s` is a number or `[re, im]`.
    Lambda {
        s: ComplexJson,
    },
    Derivation {
        alpha: Vec<i64>,
    },
    Differential {
        terms: Vec<TermJson>,
    },
    /// Classical symbol in its JSON form, applied on the lattice.
    Symbol {
        symbol: serde_json::Value,
    },
    /// Toroidal table in its JSON form.
    Toroidal {
        table: serde_json::Value,
    },
    /// `Δ_g` for a metric given entrywise; `radius` is the truncation used
    /// to assemble its coefficients.
    LaplaceBeltrami {
        metric: Vec<Vec<ElementJson>>,
        radius: i64,
    },
}

/// A descriptor resolved against a fixed `θ`.
pub enum Operator {
    Identity,
    Lambda(Complex64),
    Differential(DifferentialOperator),
    Symbol(ClassicalSymbol),
    Toroidal(ToroidalSymbol),
    LaplaceBeltrami(Box<LaplaceBeltrami>),
}

fn element(v: ElementJson, theta: &Arc<ThetaMatrix>) -> Result<AlgebraElement> {
    AlgebraElement::from_json_value(v)?
        .rebind(theta)
        .map_err(|_| Error::Parse("descriptor coefficient has a different θ than the input".into()))
}

impl Descriptor {
    pub fn resolve(self, theta: &Arc<ThetaMatrix>) -> Result<Operator> {
        Ok(match self {
            Descriptor::Identity => Operator::Identity,
            Descriptor::FlatLaplacian => Operator::Differential(DifferentialOperator::flat_laplacian(theta.clone())),
            Descriptor::Lambda { s } => Operator::Lambda(s.value()),
            Descriptor::Derivation { alpha } => {
                let one = AlgebraElement::one(theta.clone());
                Operator::Differential(DifferentialOperator::new(theta.clone(), [(MultiIndex::from(alpha), one)])?)
            }
            Descriptor::Differential { terms } => {
                let terms = terms
                    .into_iter()
                    .map(|t| Ok((MultiIndex::from(t.alpha), element(t.coeff, theta)?)))
                    .collect::<Result<Vec<_>>>()?;
                Operator::Differential(DifferentialOperator::new(theta.clone(), terms)?)
            }
            Descriptor::Symbol { symbol } => Operator::Symbol(ClassicalSymbol::from_json(&symbol.to_string(), theta)?),
            Descriptor::Toroidal { table } => Operator::Toroidal(ToroidalSymbol::from_json(&table.to_string(), theta)?),
            Descriptor::LaplaceBeltrami { metric, radius } => {
                let rows = metric
                    .into_iter()
                    .map(|row| row.into_iter().map(|e| element(e, theta)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let g = MetricTensor::new(rows, radius)?;
                Operator::LaplaceBeltrami(Box::new(laplace_beltrami(&g, radius)?))
            }
        })
    }
}

impl Operator {
    pub fn apply(&self, u: &AlgebraElement) -> Result<AlgebraElement> {
        match self {
            Operator::Identity => Ok(u.clone()),
            Operator::Lambda(s) => Ok(lambda_power(*s, u)),
            Operator::Differential(p) => p.apply(u),
            Operator::Symbol(rho) => apply_psido(rho, u),
            Operator::Toroidal(rho) => apply_psido(rho, u),
            Operator::LaplaceBeltrami(lb) => lb.apply(u),
        }
    }
}
