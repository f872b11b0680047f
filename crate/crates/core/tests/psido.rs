use std::sync::Arc;

use nctorus::gns::{invert, MetricTensor};
use nctorus::psido::{
    apply_psido, commutator_check, lambda_power, laplace_beltrami, spectrum_csv, spectrum_truncated, truncated_matrix,
    DifferentialOperator, LatticeFn,
};
use nctorus::symbols::{bracket_xi_power, JapaneseBracket, PolynomialSymbol};
use nctorus::toroidal::{classify_smoothing, SmoothingClass, ToroidalSymbol};
use nctorus::verify::random_element;
use nctorus::{AlgebraElement, MultiIndex, ThetaMatrix};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn theta() -> Arc<ThetaMatrix> {
    Arc::new(ThetaMatrix::two_dim(0.25))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mi(k: [i64; 2]) -> MultiIndex {
    MultiIndex::new(k)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn norm2(k: &MultiIndex) -> f64 {
    k.as_slice().iter().map(|&x| (x * x) as f64).sum()
}

fn sample_coeff(th: &Arc<ThetaMatrix>) -> AlgebraElement {
    AlgebraElement::from_coeffs(th.clone(), [(mi([0, 0]), c(1.0, 0.5)), (mi([1, -1]), c(-0.4, 0.0)), (mi([0, 2]), c(0.0, 0.3))]).unwrap()
}

#[test]
fn squared_norm_symbol_on_the_basis() {
    let th = theta();
    let rho = PolynomialSymbol::new(
        th.clone(),
        [(mi([2, 0]), AlgebraElement::one(th.clone())), (mi([0, 2]), AlgebraElement::one(th.clone()))],
    )
    .unwrap();
    for k in nctorus::lattice::lattice_box(2, 4) {
        let u = AlgebraElement::basis(th.clone(), k.clone());
        let out = apply_psido(&rho, &u).unwrap();
        assert!(out.max_abs_diff(&u.scale_real(norm2(&k))) <= 1e-12);
    }
}

#[test]
fn constant_symbols_multiply() {
    let th = theta();
    let a = sample_coeff(&th);
    let aa = a.clone();
    let rho = LatticeFn::new(th.clone(), move |_| aa.clone());
    let mut r = rng(1);
    for _ in 0..5 {
        let u = random_element(&th, 3, &mut r);
        assert!(apply_psido(&rho, &u).unwrap().max_abs_diff(&a.multiply(&u).unwrap()) <= 1e-12);
    }
    let one = LatticeFn::scalar(th.clone(), |_| c(1.0, 0.0));
    let u = random_element(&th, 3, &mut r);
    assert!(apply_psido(&one, &u).unwrap().max_abs_diff(&u) <= 1e-15);
}

#[test]
fn psido_is_linear() {
    let th = theta();
    let a = sample_coeff(&th);
    let rho = LatticeFn::new(th.clone(), move |k| a.scale_real(1.0 + norm2(k)));
    let mut r = rng(2);
    let (u, v) = (random_element(&th, 3, &mut r), random_element(&th, 3, &mut r));
    let z = c(0.3, -1.2);
    let lhs = apply_psido(&rho, &u.try_add(&v.scale(z)).unwrap()).unwrap();
    let rhs = apply_psido(&rho, &u).unwrap().try_add(&apply_psido(&rho, &v).unwrap().scale(z)).unwrap();
    assert!(lhs.max_abs_diff(&rhs) <= 1e-11);
}

fn sample_differential(th: &Arc<ThetaMatrix>) -> DifferentialOperator {
    let a = sample_coeff(th);
    DifferentialOperator::new(
        th.clone(),
        [
            (mi([0, 0]), a.clone()),
            (mi([1, 0]), a.involution()),
            (mi([1, 1]), AlgebraElement::basis(th.clone(), mi([0, 1]))),
            (mi([0, 2]), a.scale(c(0.0, 1.0))),
        ],
    )
    .unwrap()
}

#[test]
fn differential_operators_are_polynomial_psidos() {
    let th = theta();
    let p = sample_differential(&th);
    assert_eq!(p.order(), 2);
    let sym = p.symbol();
    let mut r = rng(3);
    for _ in 0..20 {
        let u = random_element(&th, 3, &mut r);
        let direct = p.apply(&u).unwrap();
        assert!(direct.max_abs_diff(&apply_psido(&sym, &u).unwrap()) <= 1e-10);
    }
    let flat = DifferentialOperator::flat_laplacian(th.clone());
    let u = AlgebraElement::basis(th.clone(), mi([2, 1]));
    assert!(flat.apply(&u).unwrap().max_abs_diff(&u.scale_real(5.0)) <= 1e-15);
    assert!(DifferentialOperator::zero(th.clone()).apply(&u).unwrap().is_zero());
}

#[test]
fn leibniz_composition() {
    let th = theta();
    let b = sample_coeff(&th);
    let d1 = DifferentialOperator::delta(th.clone(), 0).unwrap();
    let composed = d1.compose(&DifferentialOperator::multiplication(b.clone())).unwrap();
    let hand = DifferentialOperator::new(th.clone(), [(mi([0, 0]), b.delta(0)), (mi([1, 0]), b.clone())]).unwrap();
    let mut r = rng(4);
    for _ in 0..10 {
        let u = random_element(&th, 3, &mut r);
        let oracle = b.multiply(&u).unwrap().delta(0);
        assert!(composed.apply(&u).unwrap().max_abs_diff(&oracle) <= 1e-11);
        assert!(hand.apply(&u).unwrap().max_abs_diff(&oracle) <= 1e-11);
    }
    let p = sample_differential(&th);
    let q = sample_differential(&th).compose(&d1).unwrap();
    let u = random_element(&th, 3, &mut r);
    let lhs = p.compose(&q).unwrap().apply(&u).unwrap();
    let rhs = p.apply(&q.apply(&u).unwrap()).unwrap();
    assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * rhs.max_abs().max(1.0));
    let same = p.compose(&DifferentialOperator::identity(th.clone())).unwrap();
    assert!(same.apply(&u).unwrap().max_abs_diff(&p.apply(&u).unwrap()) <= 1e-12);
    let d2 = DifferentialOperator::delta(th.clone(), 1).unwrap();
    let (a12, a21) = (d1.compose(&d2).unwrap().apply(&u).unwrap(), d2.compose(&d1).unwrap().apply(&u).unwrap());
    assert_eq!(a12, a21);
}

#[test]
fn commutator_identity() {
    let th = theta();
    let mut r = rng(5);
    let u = random_element(&th, 3, &mut r);
    let scalar = LatticeFn::scalar(th.clone(), |k| c(1.0 + norm2(k), 0.0).sqrt());
    for j in 0..2 {
        let (lhs, rhs) = commutator_check(&scalar, j, &u).unwrap();
        assert!(lhs.max_abs() <= 1e-12 && rhs.is_zero());
    }
    let a = sample_coeff(&th);
    let aa = a.clone();
    let constant = LatticeFn::new(th.clone(), move |_| aa.clone());
    let weighted = {
        let a = a.clone();
        LatticeFn::new(th.clone(), move |k| a.scale_real(1.0 + norm2(k)))
    };
    for j in 0..2 {
        let (lhs, rhs) = commutator_check(&constant, j, &u).unwrap();
        let oracle = a.delta(j).multiply(&u).unwrap();
        assert!(lhs.max_abs_diff(&oracle) <= 1e-10 && rhs.max_abs_diff(&oracle) <= 1e-10);
        let (lhs, rhs) = commutator_check(&weighted, j, &u).unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-10);
    }
}

#[test]
fn lambda_group_and_symbol() {
    let th = theta();
    let u = AlgebraElement::basis(th.clone(), mi([1, 1]));
    assert!(lambda_power(c(2.0, 0.0), &u).max_abs_diff(&u.scale_real(3.0)) <= 1e-15);
    let mut r = rng(6);
    let v = random_element(&th, 4, &mut r);
    assert_eq!(lambda_power(c(0.0, 0.0), &v), v);
    for (s1, s2) in [(c(1.5, 0.3), c(-0.5, 1.0)), (c(-3.0, 0.0), c(2.0, -0.7))] {
        let lhs = lambda_power(s1, &lambda_power(s2, &v));
        assert!(lhs.max_abs_diff(&lambda_power(s1 + s2, &v)) <= 1e-12 * lhs.max_abs().max(1.0));
        let via_symbol = apply_psido(&JapaneseBracket::new(th.clone(), s1), &v).unwrap();
        assert!(via_symbol.max_abs_diff(&lambda_power(s1, &v)) <= 1e-12 * via_symbol.max_abs().max(1.0));
    }
    // the classical expansion of ⟨ξ⟩² is exact off the excised origin
    let classical = bracket_xi_power(th.clone(), c(2.0, 0.0), 2);
    let off_origin = AlgebraElement::from_fn(th.clone(), 3, |k| if k.sup_norm() == 0 { c(0.0, 0.0) } else { c(1.0, -(k.get(0) as f64)) });
    let got = apply_psido(&classical, &off_origin).unwrap();
    assert!(got.max_abs_diff(&lambda_power(c(2.0, 0.0), &off_origin)) <= 1e-12);
}

#[test]
fn lambda_commutes_with_radial_multipliers() {
    let th = theta();
    let rho = LatticeFn::scalar(th.clone(), |k| c((-0.3 * norm2(k)).exp(), norm2(k).sqrt()));
    let mut r = rng(7);
    let u = random_element(&th, 4, &mut r);
    for s in [c(-2.0, 0.0), c(0.7, 1.1)] {
        let a = apply_psido(&rho, &lambda_power(s, &u)).unwrap();
        let b = lambda_power(s, &apply_psido(&rho, &u).unwrap());
        assert!(a.max_abs_diff(&b) <= 1e-12 * a.max_abs().max(1.0));
    }
}

#[test]
fn laplace_beltrami_examples() {
    let th = theta();
    let flat = laplace_beltrami(&MetricTensor::identity(th.clone(), 4).unwrap(), 6).unwrap();
    for k in [[0, 0], [1, 0], [2, -3]] {
        let u = AlgebraElement::basis(th.clone(), mi(k));
        assert!(flat.apply(&u).unwrap().max_abs_diff(&u.scale_real(norm2(&mi(k)))) <= 1e-12);
    }
    let cf = 1.7;
    let g = MetricTensor::conformal(&AlgebraElement::scalar(th.clone(), c(cf, 0.0)), 4).unwrap();
    let lb = laplace_beltrami(&g, 6).unwrap();
    assert!(lb.apply(&AlgebraElement::one(th.clone())).unwrap().max_abs() <= 1e-12);
    let mut r = rng(8);
    let u = random_element(&th, 2, &mut r);
    let oracle = DifferentialOperator::flat_laplacian(th.clone()).apply(&u).unwrap().scale_real(1.0 / cf);
    assert!(lb.apply(&u).unwrap().max_abs_diff(&oracle) <= 1e-7);
}

/// In two dimensions a conformal metric `c·id` gives `w_{ij} = δ_{ij}` and `ν = c`,
/// so `Δ_g = c^{-1}Δ` even for non-constant `c`.
#[test]
fn laplace_beltrami_of_a_varying_conformal_factor() {
    let th = theta();
    let cf = AlgebraElement::from_coeffs(
        th.clone(),
        [(mi([0, 0]), c(2.0, 0.0)), (mi([1, 0]), c(0.2, 0.1)), (mi([-1, 0]), c(0.2, -0.1)), (mi([0, 1]), c(0.15, 0.0)), (mi([0, -1]), c(0.15, 0.0))],
    )
    .unwrap();
    let r = 8;
    let lb = laplace_beltrami(&MetricTensor::conformal(&cf, r).unwrap(), r).unwrap();
    let inv = invert(&cf, r).unwrap().element;
    let u = AlgebraElement::from_coeffs(th.clone(), [(mi([1, 0]), c(1.0, 0.0)), (mi([0, -1]), c(0.0, 0.5))]).unwrap();
    let oracle = inv.multiply(&DifferentialOperator::flat_laplacian(th.clone()).apply(&u).unwrap()).unwrap();
    let inner = lb.trusted_radius - 2;
    assert!(lb.apply(&u).unwrap().max_abs_diff_within(&oracle, inner) <= 1e-7);
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { AlgebraElement::one(th.clone()) } else { AlgebraElement::zero(th.clone()) };
            assert!(lb.weight(i, j).max_abs_diff_within(&want, inner) <= 1e-7);
        }
    }
}

#[test]
fn truncated_spectra() {
    let th = theta();
    let flat = DifferentialOperator::flat_laplacian(th.clone());
    let apply_flat = |u: &AlgebraElement| flat.apply(u);
    let m = truncated_matrix(&th, 2, &apply_flat).unwrap();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                assert_eq!(m[(i, j)], c(0.0, 0.0));
            } else {
                assert_eq!(m[(i, j)].im, 0.0);
            }
        }
    }
    let mut want: Vec<f64> = nctorus::lattice::lattice_box(2, 2).map(|k| norm2(&k)).collect();
    want.sort_by(f64::total_cmp);
    let got = spectrum_truncated(&th, 2, &apply_flat).unwrap();
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).norm() <= 1e-12);
    }
    let zero = spectrum_truncated(&th, 2, &|u: &AlgebraElement| Ok(AlgebraElement::zero(u.theta().clone()))).unwrap();
    assert!(zero.iter().all(|z| z.norm() == 0.0));
    let mut want: Vec<f64> = nctorus::lattice::lattice_box(2, 2).map(|k| 1.0 / (1.0 + norm2(&k))).collect();
    want.sort_by(f64::total_cmp);
    let got = spectrum_truncated(&th, 2, &|u: &AlgebraElement| Ok(lambda_power(c(-2.0, 0.0), u))).unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).norm() <= 1e-12);
    }
    let csv = spectrum_csv(&got[..2]);
    assert!(csv.starts_with("re,im\n"));
    assert_eq!(csv.lines().count(), 3);
}

/// Fitted orders are log-log slopes over every shell, so exponential decay
/// needs enough shells to register below `-6`.
#[test]
fn smoothing_symbols_map_tempered_sequences_to_rapid_decay() {
    let th = theta();
    let profiles: [(i64, fn(f64) -> f64); 2] = [(32, |r| (-r).exp()), (12, |r| (-r * r / 4.0).exp())];
    for (radius, f) in profiles {
        let table = ToroidalSymbol::from_fn(th.clone(), radius, |k| {
            AlgebraElement::scalar(th.clone(), c(f(k.euclidean_norm()), 0.0))
        })
        .unwrap();
        assert_eq!(classify_smoothing(&table).unwrap(), SmoothingClass::Schwartz);
        let u = AlgebraElement::from_fn(th.clone(), radius, |k| c((1.0 + k.euclidean_norm()).powi(3), 0.0));
        assert!(u.decay_report().fitted_order.unwrap() > 2.0);
        let fit = apply_psido(&table, &u).unwrap().decay_report().fitted_order.unwrap();
        assert!(fit < -6.0, "radius {radius}: {fit}");
        let outside = AlgebraElement::basis(th.clone(), mi([radius + 1, 0]));
        assert!(apply_psido(&table, &outside).is_err());
    }
}

#[test]
fn mismatched_deformations_are_rejected() {
    let th = theta();
    let other = Arc::new(ThetaMatrix::two_dim(0.5));
    let rho = LatticeFn::scalar(th, |_| c(1.0, 0.0));
    assert!(apply_psido(&rho, &AlgebraElement::one(other.clone())).is_err());
    let flat = DifferentialOperator::flat_laplacian(Arc::new(ThetaMatrix::two_dim(0.25)));
    assert!(flat.apply(&AlgebraElement::one(other)).is_err());
}
