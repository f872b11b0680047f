//! Seeded invariant suites. Every row records the identity it checks, the
//! formula it comes from, the largest discrepancy seen and the tolerance.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{twist, AlgebraElement};
use crate::error::{Error, Result};
use crate::gns::MetricTensor;
use crate::lattice::{lattice_box, peetre_bound, MultiIndex, ThetaMatrix};
use crate::oscint::{
    apply_lt, inverse_fourier, j0, j_properties_check, p_from_amplitude, AmplitudeRef, FnAmplitude, Profile,
    SeparableAmplitude, SeparableTerm, SupportBox,
};
use crate::psido::{
    apply_psido, commutator_check, lambda_power, laplace_beltrami, spectrum_truncated, DifferentialOperator, LatticeFn,
};
use crate::quadrature::QuadratureSpec;
use crate::smooth::Cutoff;
use crate::symbols::{bracket_xi_power, classical_product, order_fit, FnSymbol, JapaneseBracket, SamplingGrid, Symbol};
use crate::toroidal::{
    build_kernel, classify_smoothing, difference_derivative_order, extend, restrict, summation_by_parts_check,
    SmoothingClass, TemperedSequence, ToroidalSymbol,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Symbols,
    Toroidal,
    Oscint,
    Psido,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 5] = [Suite::Algebra, Suite::Symbols, Suite::Toroidal, Suite::Oscint, Suite::Psido];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Symbols => "symbols",
            Suite::Toroidal => "toroidal",
            Suite::Oscint => "oscint",
            Suite::Psido => "psido",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "symbols" => Ok(Suite::Symbols),
            "toroidal" => Ok(Suite::Toroidal),
            "oscint" => Ok(Suite::Oscint),
            "psido" => Ok(Suite::Psido),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub theta: Arc<ThetaMatrix>,
    /// Support radius of random elements.
    pub radius: i64,
    pub seed: u64,
    /// Replaces every row tolerance.
    pub tol: Option<f64>,
    /// Replaces the quadrature point budget.
    pub quad_budget: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            theta: Arc::new(ThetaMatrix::two_dim(0.25)),
            radius: 3,
            seed: 0,
            tol: None,
            quad_budget: None,
        }
    }
}

impl VerifyConfig {
    pub fn n(&self) -> usize {
        self.theta.dim()
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn quad(&self, q: QuadratureSpec) -> QuadratureSpec {
        match self.quad_budget {
            Some(b) => q.with_budget(b),
            None => q,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub suite: String,
    pub identity: String,
    /// Formula the row checks.
    pub reference: String,
    /// `null` when the check itself failed to run.
    pub max_discrepancy: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Rows<'a> {
    suite: Suite,
    cfg: &'a VerifyConfig,
    rows: Vec<ReportRow>,
}

impl Rows<'_> {
    fn check(&mut self, identity: &str, reference: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) {
        let tolerance = self.cfg.tol.unwrap_or(tolerance);
        let (max_discrepancy, pass, error) = match f() {
            Ok(d) => (Some(d), d <= tolerance, None),
            Err(e) => (None, false, Some(e.to_string())),
        };
        self.rows.push(ReportRow {
            suite: self.suite.name().to_string(),
            identity: identity.to_string(),
            reference: reference.to_string(),
            max_discrepancy,
            tolerance,
            pass,
            error,
        });
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Report {
    let mut rows = Vec::new();
    let parts: Vec<Suite> = if suite == Suite::All { Suite::PARTS.to_vec() } else { vec![suite] };
    for part in parts {
        let mut r = Rows { suite: part, cfg, rows: Vec::new() };
        match part {
            Suite::Algebra => algebra_suite(&mut r),
            Suite::Symbols => symbols_suite(&mut r),
            Suite::Toroidal => toroidal_suite(&mut r),
            Suite::Oscint => oscint_suite(&mut r),
            Suite::Psido => psido_suite(&mut r),
            Suite::All => unreachable!(),
        }
        rows.extend(r.rows);
    }
    Report {
        suite: suite.name().to_string(),
        seed: cfg.seed,
        rows,
    }
}

/// Coefficients uniform in the unit square on `|k|_∞ ≤ r`.
pub fn random_element(theta: &Arc<ThetaMatrix>, r: i64, rng: &mut impl Rng) -> AlgebraElement {
    AlgebraElement::from_fn(theta.clone(), r, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn max_over<T>(items: impl IntoIterator<Item = T>, mut f: impl FnMut(T) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in items {
        let d = f(x)?;
        if d.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

const PAIRS: usize = 20;

fn algebra_suite(rows: &mut Rows) {
    let cfg = rows.cfg;
    let th = &cfg.theta;
    let n = cfg.n();
    let mut rng = cfg.rng(1);
    let triples: Vec<[AlgebraElement; 3]> = (0..PAIRS)
        .map(|_| std::array::from_fn(|_| random_element(th, cfg.radius, &mut rng)))
        .collect();

    rows.check("traciality", "τ(uv) = τ(vu)", 1e-12, || {
        max_over(&triples, |[u, v, _]| Ok((u.multiply(v)?.trace() - v.multiply(u)?.trace()).norm()))
    });
    rows.check("associativity", "(uv)w = u(vw)", 1e-10, || {
        max_over(&triples, |[u, v, w]| {
            Ok(u.multiply(v)?.multiply(w)?.max_abs_diff(&u.multiply(&v.multiply(w)?)?))
        })
    });
    rows.check("adjoint of a product", "(uv)* = v*u*", 1e-10, || {
        max_over(&triples, |[u, v, _]| {
            Ok(u.multiply(v)?.involution().max_abs_diff(&v.involution().multiply(&u.involution())?))
        })
    });
    rows.check(
        "Leibniz rule for |β| ≤ 3",
        "δ^β(uv) = Σ_{γ≤β} binom(β,γ) δ^γ(u) δ^{β-γ}(v)",
        1e-10,
        || {
            let betas: Vec<MultiIndex> = crate::symbols::multi_orders_up_to(n, 3);
            max_over(&triples, |[u, v, _]| {
                let uv = u.multiply(v)?;
                max_over(&betas, |beta| {
                    let mut rhs = AlgebraElement::zero(th.clone());
                    for gamma in beta.sub_orders() {
                        let term = u.derivation(&gamma)?.multiply(&v.derivation(&(beta - &gamma))?)?;
                        rhs.add_scaled(&term, Complex64::new(beta.binomial(&gamma), 0.0));
                    }
                    Ok(uv.derivation(beta)?.max_abs_diff(&rhs))
                })
            })
        },
    );
    rows.check("derivations commute", "δ_jδ_l(u) = δ_lδ_j(u)", 1e-12, || {
        max_over(&triples, |[u, _, _]| {
            max_over(0..n * n, |jl| {
                let (j, l) = (jl / n, jl % n);
                Ok(u.delta(j).delta(l).max_abs_diff(&u.delta(l).delta(j)))
            })
        })
    });
    rows.check("derivations are odd under the involution", "δ_j(u*) = -(δ_j u)*", 1e-12, || {
        max_over(&triples, |[u, _, _]| {
            max_over(0..n, |j| Ok(u.involution().delta(j).max_abs_diff(&u.delta(j).involution().scale_real(-1.0))))
        })
    });
    rows.check("trace of u*u", "τ(u*u) = Σ_k |u_k|²", 1e-12, || {
        max_over(&triples, |[u, _, _]| {
            let direct: f64 = u.iter().map(|(_, c)| c.norm_sqr()).sum();
            Ok((u.involution().multiply(u)?.trace() - direct).norm())
        })
    });
    rows.check("basis products", "U^k U^l = e^{-2iπc(k,l)} U^{k+l}", 1e-14, || {
        let pts: Vec<MultiIndex> = lattice_box(n, 2).collect();
        max_over(&pts, |k| {
            max_over(&pts, |l| {
                let prod = AlgebraElement::basis(th.clone(), k.clone()).multiply(&AlgebraElement::basis(th.clone(), l.clone()))?;
                let expected = AlgebraElement::monomial(th.clone(), k + l, twist(th.phase(k, l)));
                Ok(prod.max_abs_diff(&expected))
            })
        })
    });
}

/// Relative size below which a difference of two evaluations is rounding noise.
const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Fitted order of `⟨ξ⟩^s - Σ_{j<count} ρ_{s-j}` over shells `8..1024`.
pub fn remainder_order(theta: &Arc<ThetaMatrix>, s: f64, count: usize) -> Result<f64> {
    let exact = JapaneseBracket::real(theta.clone(), s);
    let expansion = bracket_xi_power(theta.clone(), Complex64::new(s, 0.0), count + 2);
    let th = theta.clone();
    let remainder = FnSymbol::new(theta.clone(), None, move |xi| {
        let a = exact.eval(xi).expect("finite point");
        let b = expansion.raw_partial_sum(count, xi).unwrap_or_else(|_| AlgebraElement::zero(th.clone()));
        let d = &a - &b;
        // cancellation noise of the two evaluations counts as zero
        if d.max_abs() <= ROUNDOFF_FLOOR * (a.max_abs() + b.max_abs()) {
            AlgebraElement::zero(th.clone())
        } else {
            d
        }
    });
    order_fit(&remainder, &SamplingGrid::shells(theta.dim(), 8.0, 1024.0))
}

fn unit_directions(n: usize) -> Vec<Vec<f64>> {
    SamplingGrid::default_for(n).directions
}

fn symbols_suite(rows: &mut Rows) {
    let cfg = rows.cfg;
    let th = &cfg.theta;
    let n = cfg.n();
    rows.check(
        "⟨ξ⟩·⟨ξ⟩ expansion through offset 4",
        "⟨ξ⟩^1 ⋆ ⟨ξ⟩^1 ∼ ⟨ξ⟩^2, components ρ_{2-j}, j ≤ 4",
        1e-10,
        || {
            let one = bracket_xi_power(th.clone(), Complex64::new(1.0, 0.0), 4);
            let two = bracket_xi_power(th.clone(), Complex64::new(2.0, 0.0), 4);
            let prod = classical_product(&one, &one, 4)?;
            let dirs = unit_directions(n);
            max_over(0..=4, |j| {
                max_over(&dirs, |d| {
                    let a = prod.components()[j].eval(d)?;
                    let b = two.components()[j].eval(d)?;
                    Ok(a.max_abs_diff(&b))
                })
            })
        },
    );
    for s in [2.0, 1.0] {
        for count in 1..=3 {
            let expected = s - count as f64;
            rows.check(
                &format!("⟨ξ⟩^{s} remainder after {count} terms: excess fitted order"),
                &format!("⟨ξ⟩^{s} - Σ_{{j<{count}}} ρ_{{{s}-j}} ∈ S^{{{expected}}}"),
                0.3,
                || Ok((remainder_order(th, s, count)? - expected).max(0.0)),
            );
        }
    }
    rows.check(
        "homogeneity of expansion components",
        "ρ_{q-j}(λξ) = λ^{q-j} ρ_{q-j}(ξ)",
        1e-12,
        || {
            let sym = bracket_xi_power(th.clone(), Complex64::new(0.5, 1.0), 4);
            let dirs = unit_directions(n);
            max_over(sym.components(), |c| {
                max_over(&dirs, |d| {
                    let lambda: f64 = 3.5;
                    let scaled: Vec<f64> = d.iter().map(|x| lambda * x).collect();
                    let factor = (c.degree() * lambda.ln()).exp();
                    let a = c.eval(&scaled)?;
                    let b = c.eval(d)?.scale(factor);
                    Ok(a.max_abs_diff(&b) / factor.norm().max(1.0))
                })
            })
        },
    );
    rows.check(
        "Peetre inequality, excess",
        "(1+|ξ+η|)^m ≤ (1+|ξ|)^m (1+|η|)^{|m|}",
        0.0,
        || {
            let mut rng = cfg.rng(2);
            max_over(0..200, |_| {
                let m: f64 = rng.gen_range(-4.0..4.0);
                let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
                let eta: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
                let (lhs, rhs) = peetre_bound(m, &xi, &eta);
                Ok((lhs - rhs * (1.0 + 1e-12)).max(0.0))
            })
        },
    );
    rows.check(
        "exact derivatives of ⟨ξ⟩^s against central differences",
        "∂^β ⟨ξ⟩^s",
        1e-5,
        || {
            let sym = JapaneseBracket::real(th.clone(), -1.5);
            let betas = crate::symbols::multi_orders_up_to(n, 2);
            let pts = SamplingGrid::shells(n, 0.5, 8.0).points();
            max_over(&betas, |b| {
                max_over(&pts, |xi| {
                    let exact = sym.derivative(b, xi)?;
                    let fd = crate::symbols::finite_difference(&sym, b, xi)?;
                    Ok(exact.max_abs_diff(&fd))
                })
            })
        },
    );
}

fn scalar_table(theta: &Arc<ThetaMatrix>, radius: i64, f: impl Fn(f64) -> Complex64) -> Result<ToroidalSymbol> {
    ToroidalSymbol::from_fn(theta.clone(), radius, |k| AlgebraElement::scalar(theta.clone(), f(k.euclidean_norm())))
}

/// Ten rapidly decaying and ten polynomial-order lattice symbols over `θ` on
/// `|k|_∞ ≤ 16`; `true` marks the rapidly decaying ones.
pub fn smoothing_corpus(theta: &Arc<ThetaMatrix>) -> Result<Vec<(String, bool, ToroidalSymbol)>> {
    let mut out = Vec::new();
    let k = 16;
    let c = |x: f64| Complex64::new(x, 0.0);
    let schwartz: Vec<(&str, Box<dyn Fn(f64) -> Complex64>)> = vec![
        ("exp(-0.7|k|)", Box::new(move |r: f64| c((-0.7 * r).exp()))),
        ("exp(-|k|)", Box::new(move |r: f64| c((-r).exp()))),
        ("exp(-2|k|)", Box::new(move |r: f64| c((-2.0 * r).exp()))),
        ("exp(-0.1|k|²)", Box::new(move |r: f64| c((-0.1 * r * r).exp()))),
        ("exp(-|k|²)", Box::new(move |r: f64| c((-r * r).exp()))),
        ("(1+|k|²)exp(-|k|)", Box::new(move |r: f64| c((1.0 + r * r) * (-r).exp()))),
        ("sech|k|", Box::new(move |r: f64| c(1.0 / r.cosh()))),
        ("exp(-√(1+|k|²))", Box::new(move |r: f64| c((-(1.0 + r * r).sqrt()).exp()))),
        ("i·exp(-1.5|k|)", Box::new(move |r: f64| Complex64::new(0.0, (-1.5 * r).exp()))),
    ];
    for (name, f) in &schwartz {
        out.push((name.to_string(), true, scalar_table(theta, k, f)?));
    }
    let n = theta.dim();
    let u = AlgebraElement::from_coeffs(
        theta.clone(),
        [
            (MultiIndex::zeros(n), Complex64::new(1.0, 0.0)),
            (MultiIndex::unit(n, 0), Complex64::new(0.5, -0.5)),
        ],
    )?;
    out.push((
        "exp(-|k|)(1 + (0.5-0.5i)U^{e_1})".into(),
        true,
        ToroidalSymbol::from_fn(theta.clone(), k, |kk| u.scale_real((-kk.euclidean_norm()).exp()))?,
    ));
    for m in [-4.0, -3.0, -2.0, -1.0, 0.5, 1.0, 2.0, 3.0] {
        out.push((
            format!("⟨k⟩^{m}"),
            false,
            scalar_table(theta, k, move |r| c((1.0 + r * r).powf(m / 2.0)))?,
        ));
    }
    out.push(("(1+|k|)^{-2.5}".into(), false, scalar_table(theta, k, |r| c((1.0 + r).powf(-2.5)))?));
    out.push((
        "⟨k⟩^{1.5}(1 + (0.5-0.5i)U^{e_1})".into(),
        false,
        ToroidalSymbol::from_fn(theta.clone(), k, |kk| u.scale_real((1.0 + kk.euclidean_norm().powi(2)).powf(0.75)))?,
    ));
    Ok(out)
}

fn toroidal_suite(rows: &mut Rows) {
    let cfg = rows.cfg;
    let th = &cfg.theta;
    let n = cfg.n();
    let kernel = build_kernel(32).map(Arc::new);
    rows.check("cardinal kernel at the origin", "φ_1(0) = 1", 1e-8, || {
        Ok((kernel.clone()?.phi1(0.0) - 1.0).abs())
    });
    rows.check("cardinal kernel at nonzero integers", "φ_1(j) = 0, 1 ≤ |j| ≤ 20", 1e-8, || {
        let k = kernel.clone()?;
        max_over((1..=20).flat_map(|j| [j, -j]), |j| Ok(k.phi1(j as f64).abs()))
    });
    let bracket = JapaneseBracket::real(th.clone(), 2.0);
    rows.check("extension interpolates the table", "ρ̃(k) = ρ_k", 1e-7, || {
        let ext = extend(restrict(&bracket, 8)?, kernel.clone()?);
        let inner = ext.trusted_extent();
        max_over(lattice_box(n, inner), |k| Ok(ext.eval(&k.to_f64())?.max_abs_diff(ext.table().get(&k).expect("inside"))))
    });
    rows.check("restrict ∘ extend ∘ restrict round trip", "(ρ|_{Z^n})~|_{Z^n} = ρ|_{Z^n}", 1e-6, || {
        let ext = extend(restrict(&bracket, 8)?, kernel.clone()?);
        let inner = ext.trusted_extent();
        let again = restrict(&ext, inner)?;
        let direct = restrict(&bracket, inner)?;
        max_over(direct.entries(), |(k, v)| Ok(again.get(&k).expect("same box").max_abs_diff(v)))
    });
    rows.check(
        "summation by parts",
        "Σ_k (Δ̄^α u)_k ρ_k = (-1)^{|α|} Σ_k u_k (Δ^α ρ)_k",
        1e-10,
        || {
            let mut rng = cfg.rng(3);
            let table = ToroidalSymbol::from_fn(th.clone(), 6, |_| random_element(th, 1, &mut rng))?;
            let seq = TemperedSequence::from_fn(n, 3, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            max_over(crate::symbols::multi_orders_up_to(n, 2), |alpha| {
                let (lhs, rhs) = summation_by_parts_check(&seq, &table, &alpha)?;
                Ok(lhs.max_abs_diff(&rhs))
            })
        },
    );
    for s in [2.0, -1.0] {
        for order in [1usize, 2] {
            let alpha = if order == 1 { MultiIndex::unit(n, 0) } else { MultiIndex::new((0..n).map(|j| if j < 2 { 1 } else { 0 })) };
            let alpha = if n == 1 && order == 2 { MultiIndex::new([2]) } else { alpha };
            let expected = s - order as f64 - 1.0;
            rows.check(
                &format!("difference minus derivative of ⟨ξ⟩^{s}, |α| = {order}: excess fitted order"),
                &format!("Δ^αρ - ∂^αρ ∈ S^{{{expected}}}"),
                0.3,
                || {
                    let sym = JapaneseBracket::real(th.clone(), s);
                    let fit = difference_derivative_order(&sym, &alpha, &SamplingGrid::shells(n, 8.0, 1024.0))?;
                    Ok((fit - expected).max(0.0))
                },
            );
        }
    }
    rows.check("smoothing classifier corpus: misclassifications", "ρ ∈ S^{-∞} ⇔ rapid decay of ρ_k", 0.0, || {
        let corpus = smoothing_corpus(th)?;
        let mut wrong = 0.0;
        for (_, schwartz, table) in &corpus {
            let class = classify_smoothing(table)?;
            let ok = match class {
                SmoothingClass::Schwartz => *schwartz,
                SmoothingClass::Order(_) => !*schwartz,
                SmoothingClass::Inconclusive { .. } => false,
            };
            if !ok {
                wrong += 1.0;
            }
        }
        Ok(wrong)
    });
}

/// `e^{-s²} e^{-ξ²}` on `R × R`, whose oscillating integral is `5^{-1/2}`.
pub fn gaussian_amplitude() -> Result<SeparableAmplitude> {
    let th = Arc::new(ThetaMatrix::zero(1));
    SeparableAmplitude::new(
        th.clone(),
        vec![SeparableTerm {
            coeff: AlgebraElement::one(th),
            s_profiles: vec![Profile::gaussian(1.0)],
            xi_profiles: vec![Profile::gaussian(1.0)],
        }],
        SupportBox { s: 8.0, xi: 8.0 },
    )
}

/// Quadrature used for the Gaussian amplitude.
pub fn gaussian_quadrature() -> QuadratureSpec {
    QuadratureSpec::gauss_legendre(2, 32)
}

fn profile(poly: &[f64], c: f64) -> Profile {
    Profile {
        poly: poly.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        c,
        omega: 0.0,
    }
}

/// One-dimensional amplitudes for the `L^t` invariance check.
pub fn lt_corpus() -> Result<Vec<AmplitudeRef>> {
    let th = Arc::new(ThetaMatrix::zero(1));
    let one = AlgebraElement::one(th.clone());
    let support = SupportBox { s: 6.0, xi: 6.0 };
    let mk = |terms: Vec<(Complex64, Profile, Profile)>| -> Result<AmplitudeRef> {
        let terms = terms
            .into_iter()
            .map(|(c, f, g)| SeparableTerm {
                coeff: one.scale(c),
                s_profiles: vec![f],
                xi_profiles: vec![g],
            })
            .collect();
        Ok(Arc::new(SeparableAmplitude::new(th.clone(), terms, support)?))
    };
    Ok(vec![
        mk(vec![(Complex64::new(1.0, 0.0), profile(&[1.0, 0.5], 1.0), Profile::gaussian(1.0))])?,
        mk(vec![(Complex64::new(0.0, 1.0), Profile::moment(2, 1.5), profile(&[0.5, 0.0, 1.0], 1.0))])?,
        mk(vec![
            (Complex64::new(1.0, 0.0), Profile::gaussian(2.0), Profile::gaussian(0.8).with_frequency(0.7)),
            (Complex64::new(0.3, -0.2), Profile::moment(1, 1.0), Profile::moment(1, 1.2)),
        ])?,
    ])
}

/// Cutoff and quadrature of the `L^t` check.
pub fn lt_setup() -> (Cutoff, QuadratureSpec) {
    (Cutoff { r0: 1.0, r1: 3.0 }, QuadratureSpec::gauss_legendre(16, 16))
}

/// Amplitudes over `θ` (of any dimension) for the `J`-property checks.
pub fn j_corpus(theta: &Arc<ThetaMatrix>) -> Result<Vec<AmplitudeRef>> {
    let n = theta.dim();
    let support = SupportBox { s: 5.0, xi: 5.0 };
    let elem = |pairs: &[(usize, i64, Complex64)]| -> Result<AlgebraElement> {
        AlgebraElement::from_coeffs(
            theta.clone(),
            pairs.iter().map(|&(j, sign, c)| {
                let mut k = MultiIndex::zeros(n);
                if sign != 0 {
                    k.set(j % n, sign);
                }
                (k, c)
            }),
        )
    };
    let with_first = |first: Profile, rest: Profile| {
        let mut v = vec![rest; n];
        v[0] = first;
        v
    };
    let term = |coeff, s_profiles, xi_profiles| SeparableTerm { coeff, s_profiles, xi_profiles };
    // mixed parities keep every side of the checked identities away from zero
    let a1 = SeparableAmplitude::new(
        theta.clone(),
        vec![term(
            elem(&[(0, 1, Complex64::new(1.0, 0.0))])?,
            vec![profile(&[1.0, 0.5], 1.0); n],
            vec![profile(&[1.0, -0.3], 1.0); n],
        )],
        support,
    )?;
    let a2 = SeparableAmplitude::new(
        theta.clone(),
        vec![term(
            elem(&[(0, 1, Complex64::new(1.0, 0.0)), (1, -1, Complex64::new(0.5, 0.5))])?,
            with_first(profile(&[1.0, 0.5], 1.0), profile(&[0.2, 1.0], 1.0)),
            with_first(profile(&[1.0, 1.0], 1.0), profile(&[0.5, 1.0], 1.0)),
        )],
        support,
    )?;
    let a3 = SeparableAmplitude::new(
        theta.clone(),
        vec![
            term(
                elem(&[(0, 1, Complex64::new(0.0, 1.0)), (1, 1, Complex64::new(0.2, 0.0))])?,
                with_first(Profile::gaussian(1.0).with_frequency(0.5), profile(&[1.0, 0.0, 1.0], 1.5)),
                with_first(
                    profile(&[0.0, 1.0, 1.0], 1.0),
                    Profile {
                        poly: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.4)],
                        c: 1.0,
                        omega: 0.0,
                    },
                ),
            ),
            term(
                elem(&[(1, -1, Complex64::new(0.3, 0.0)), (0, 0, Complex64::new(0.7, 0.0))])?,
                with_first(Profile::moment(1, 1.0), Profile::gaussian(1.0).with_frequency(-0.3)),
                with_first(profile(&[1.0, 1.0], 1.2), profile(&[1.0, 0.0, 0.5], 1.0)),
            ),
        ],
        support,
    )?;
    Ok(vec![Arc::new(a1), Arc::new(a2), Arc::new(a3)])
}

/// Quadrature of the `J`-property checks.
pub fn j_quadrature() -> QuadratureSpec {
    QuadratureSpec::gauss_legendre(1, 28)
}

/// `b1`, `b2`, `α`, `β` used with [`j_corpus`].
pub fn j_parameters(theta: &Arc<ThetaMatrix>) -> Result<(AlgebraElement, AlgebraElement, MultiIndex, MultiIndex)> {
    let n = theta.dim();
    let b1 = AlgebraElement::from_coeffs(
        theta.clone(),
        [(MultiIndex::zeros(n), Complex64::new(1.0, 0.0)), (MultiIndex::unit(n, n - 1), Complex64::new(0.0, 0.5))],
    )?;
    let b2 = AlgebraElement::from_coeffs(theta.clone(), [(MultiIndex::unit(n, 0), Complex64::new(0.8, -0.1))])?;
    let alpha = MultiIndex::unit(n, 0);
    let beta = MultiIndex::unit(n, n - 1);
    Ok((b1, b2, alpha, beta))
}

/// `χ(ε(s,ξ))·⟨ξ⟩^{-4}` on `R × R` with a joint radial cutoff.
pub fn pa_amplitude(eps: f64) -> AmplitudeRef {
    let th = Arc::new(ThetaMatrix::zero(1));
    let chi = Cutoff { r0: 3.0, r1: 5.0 };
    let t = th.clone();
    Arc::new(FnAmplitude::new(th, SupportBox { s: 5.0 / eps, xi: 5.0 / eps }, move |s, xi| {
        let r = eps * (s[0] * s[0] + xi[0] * xi[0]).sqrt();
        let v = chi.radial(r) / (1.0 + xi[0] * xi[0]).powi(2);
        AlgebraElement::scalar(t.clone(), Complex64::new(v, 0.0))
    }))
}

pub fn pa_quadrature() -> QuadratureSpec {
    QuadratureSpec::gauss_legendre(64, 16)
}

/// `max_k |P_{a_ε}(U^k) - ⟨k⟩^{-4} U^k|` over `k ∈ {0, 1, 2}`.
pub fn pa_discrepancy(eps: f64, quad: &QuadratureSpec) -> Result<f64> {
    let a = pa_amplitude(eps);
    max_over([0i64, 1, 2], |k| {
        let u = AlgebraElement::basis(a.theta().clone(), MultiIndex::new([k]));
        let got = p_from_amplitude(a.clone(), &u, quad)?;
        Ok(got.max_abs_diff(&u.scale_real((1.0 + (k * k) as f64).powi(-2))))
    })
}

fn oscint_suite(rows: &mut Rows) {
    let cfg = rows.cfg;
    rows.check("Gaussian amplitude", "(2π)^{-1} ∬ e^{isξ} e^{-s²-ξ²} ds dξ = 5^{-1/2}", 1e-6, || {
        let v = j0(&gaussian_amplitude()?, &cfg.quad(gaussian_quadrature()))?;
        Ok((v.coeff(&MultiIndex::zeros(1)) - 5f64.sqrt().recip()).norm())
    });
    rows.check("invariance under the regularizing transpose", "J_0(L^t a) = J_0(a)", 1e-6, || {
        let (chi, q) = lt_setup();
        let q = cfg.quad(q);
        max_over(lt_corpus()?, |a| {
            let base = j0(a.as_ref(), &q)?;
            let lt = apply_lt(a, chi, false)?.into_ref();
            Ok(j0(lt.as_ref(), &q)?.max_abs_diff(&base))
        })
    });
    let reports = (|| {
        let (b1, b2, alpha, beta) = j_parameters(&cfg.theta)?;
        let q = cfg.quad(j_quadrature());
        j_corpus(&cfg.theta)?
            .iter()
            .map(|a| j_properties_check(a, &b1, &b2, &alpha, &beta, &q))
            .collect::<Result<Vec<_>>>()
    })();
    let props: [(&str, &str, fn(&crate::oscint::JPropertyReport) -> f64); 4] = [
        ("J is a bimodule map", "J(b_1 a b_2) = b_1 J(a) b_2", |r| r.module),
        ("J commutes with the involution", "J(a*) = J(a)*", |r| r.adjoint),
        ("J commutes with derivations", "J(δ^α a) = δ^α J(a)", |r| r.derivation),
        (
            "J exchanges derivatives and weights",
            "J(D_s^α D_ξ^β a) = (-1)^{|α|+|β|} J(s^β ξ^α a)",
            |r| r.exchange,
        ),
    ];
    for (identity, reference, pick) in props {
        rows.check(identity, reference, 1e-6, || match &reports {
            Ok(r) => max_over(r, |x| Ok(pick(x))),
            Err(e) => Err(e.clone()),
        });
    }
    rows.check("inverse Fourier transform of a Gaussian", "(2π)^{-1} ∫ e^{isξ} e^{-ξ²/2} dξ = (2π)^{-1/2} e^{-s²/2}", 1e-8, || {
        let th = Arc::new(ThetaMatrix::zero(1));
        let t = th.clone();
        let rho = FnSymbol::new(th, None, move |xi| AlgebraElement::scalar(t.clone(), Complex64::new((-xi[0] * xi[0] / 2.0).exp(), 0.0)));
        let q = cfg.quad(QuadratureSpec::gauss_legendre(4, 32));
        max_over([0.0, 0.5, 1.3, 2.0], |s| {
            let v = inverse_fourier(&rho, &[s], 12.0, 1e-30, &q)?;
            let expected = (-s * s / 2.0).exp() / std::f64::consts::TAU.sqrt();
            Ok((v.coeff(&MultiIndex::zeros(1)) - expected).norm())
        })
    });
    rows.check("operator of an amplitude on the basis, ε = 1/2", "P_a(U^k) → ρ(k)U^k as a → ρ(ξ)", 1e-2, || {
        pa_discrepancy(0.5, &cfg.quad(QuadratureSpec::gauss_legendre(32, 16)))
    });
}

fn psido_suite(rows: &mut Rows) {
    let cfg = rows.cfg;
    let th = &cfg.theta;
    let n = cfg.n();
    let mut rng = cfg.rng(4);
    let a = random_element(th, 1, &mut rng);
    let samples: Vec<AlgebraElement> = (0..PAIRS).map(|_| random_element(th, cfg.radius, &mut rng)).collect();
    let grammar: Vec<crate::symbols::ClassicalSymbol> = vec![
        bracket_xi_power(th.clone(), Complex64::new(2.0, 0.0), 2),
        bracket_xi_power(th.clone(), Complex64::new(-1.0, 0.5), 4),
        crate::symbols::ClassicalSymbol::polynomial(
            th.clone(),
            [(MultiIndex::unit(n, 0), a.clone()), (MultiIndex::zeros(n), AlgebraElement::one(th.clone()))],
        )
        .expect("valid polynomial"),
    ];
    rows.check("ψDO on the basis", "P_ρ(U^k) = ρ(k)U^k", 1e-12, || {
        max_over(&grammar, |rho| {
            max_over(lattice_box(n, 8), |k| {
                let got = apply_psido(rho, &AlgebraElement::basis(th.clone(), k.clone()))?;
                let value = rho.eval(&k.to_f64())?;
                let expected = AlgebraElement::from_coeffs(
                    th.clone(),
                    value.iter().map(|(m, c)| (m + &k, c * twist(th.phase(m, &k)))),
                )?;
                Ok(got.max_abs_diff(&expected))
            })
        })
    });
    rows.check("differential operator equals its polynomial symbol", "Σ a_α δ^α u = P_{Σ a_α ξ^α} u", 1e-10, || {
        let p = DifferentialOperator::new(
            th.clone(),
            [
                (MultiIndex::unit(n, 0), a.clone()),
                (MultiIndex::new((0..n).map(|j| if j == 0 { 2 } else { 0 })), a.involution()),
                (MultiIndex::zeros(n), AlgebraElement::scalar(th.clone(), Complex64::new(0.5, 0.0))),
            ],
        )?;
        let sym = p.symbol();
        max_over(&samples, |u| Ok(p.apply(u)?.max_abs_diff(&apply_psido(&sym, u)?)))
    });
    let pairs = [
        (Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0)),
        (Complex64::new(0.5, 1.0), Complex64::new(0.5, -1.0)),
        (Complex64::new(-1.5, 0.3), Complex64::new(2.0, 0.7)),
        (Complex64::new(0.0, 2.0), Complex64::new(0.25, 0.0)),
        (Complex64::new(-3.0, -1.0), Complex64::new(1.0, 1.0)),
    ];
    rows.check("Bessel multipliers form a group", "Λ^{s_1}Λ^{s_2} = Λ^{s_1+s_2}", 1e-12, || {
        max_over(&pairs, |&(s1, s2)| {
            max_over(&samples, |u| Ok(lambda_power(s1, &lambda_power(s2, u)).max_abs_diff(&lambda_power(s1 + s2, u))))
        })
    });
    rows.check("Bessel multiplier as a ψDO", "Λ^s = P_{⟨ξ⟩^s}", 1e-12, || {
        max_over(&pairs, |&(s, _)| {
            let sym = JapaneseBracket::new(th.clone(), s);
            max_over(&samples, |u| Ok(lambda_power(s, u).max_abs_diff(&apply_psido(&sym, u)?)))
        })
    });
    rows.check("commutator with derivations", "[δ_j, P_ρ] = P_{δ_jρ}", 1e-10, || {
        let av = a.clone();
        let rho = LatticeFn::new(th.clone(), move |k| av.scale_real(1.0 + k.euclidean_norm().powi(2)));
        max_over(0..n, |j| {
            max_over(&samples, |u| {
                let (lhs, rhs) = commutator_check(&rho, j, u)?;
                Ok(lhs.max_abs_diff(&rhs))
            })
        })
    });
    rows.check("flat spectrum of the identity metric", "σ(Δ) = {|k|² : |k|_∞ ≤ 4}", 1e-12, || {
        let g = MetricTensor::identity(th.clone(), 4)?;
        let lb = laplace_beltrami(&g, 8)?;
        let eig = spectrum_truncated(th, 4, &|u| lb.apply(u))?;
        let mut expected: Vec<f64> = lattice_box(n, 4).map(|k| k.as_slice().iter().map(|x| x * x).sum::<i64>() as f64).collect();
        expected.sort_by(f64::total_cmp);
        max_over(eig.iter().zip(&expected), |(e, x)| Ok((e - x).norm()))
    });
    rows.check("Laplace–Beltrami of a constant conformal metric", "Δ_{c·g_0} = c^{-1}Δ", 1e-7, || {
        let c = 2.5;
        let g = MetricTensor::conformal(&AlgebraElement::scalar(th.clone(), Complex64::new(c, 0.0)), 4)?;
        let lb = laplace_beltrami(&g, 8)?;
        let lap = DifferentialOperator::flat_laplacian(th.clone());
        max_over(lattice_box(n, lb.trusted_radius.min(4)), |k| {
            let u = AlgebraElement::basis(th.clone(), k);
            Ok(lb.apply(&u)?.max_abs_diff(&lap.apply(&u)?.scale_real(1.0 / c)))
        })
    });
    rows.check(
        "smoothing symbol on a tempered sequence: fitted order above -6",
        "ρ ∈ S^{-∞}: P_ρ maps 𝒜_θ' to 𝒜_θ",
        0.0,
        || {
            let rho = scalar_table(th, 12, |r| Complex64::new((-r * r / 4.0).exp(), 0.0))?;
            let u = AlgebraElement::from_fn(th.clone(), 12, |k| Complex64::new((1.0 + k.euclidean_norm()).powi(3), 0.0));
            let fit = apply_psido(&rho, &u)?.decay_report().fitted_order.unwrap_or(f64::NEG_INFINITY);
            Ok((fit + 6.0).max(0.0))
        },
    );
}
