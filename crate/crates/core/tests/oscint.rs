use std::f64::consts::TAU;
use std::sync::Arc;

use nctorus::oscint::{
    apply_lt, fourier_transform, inverse_fourier, j0, j0_with_refinement, j_properties_check, lt_invariance, mapped,
    p_from_amplitude, Amplitude, AmplitudeRef, FnAmplitude, Mapped, Profile, SeparableAmplitude, SeparableTerm,
    SupportBox,
};
use nctorus::quadrature::QuadratureSpec;
use nctorus::smooth::Cutoff;
use nctorus::symbols::FnSymbol;
use nctorus::verify::{j_corpus, j_quadrature, lt_corpus, lt_setup, pa_amplitude};
use nctorus::{AlgebraElement, Error, MultiIndex, ThetaMatrix};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn line() -> Arc<ThetaMatrix> {
    Arc::new(ThetaMatrix::zero(1))
}

fn separable(
    th: &Arc<ThetaMatrix>,
    coeff: AlgebraElement,
    s: Vec<Profile>,
    xi: Vec<Profile>,
    extent: f64,
) -> SeparableAmplitude {
    SeparableAmplitude::new(
        th.clone(),
        vec![SeparableTerm { coeff, s_profiles: s, xi_profiles: xi }],
        SupportBox { s: extent, xi: extent },
    )
    .unwrap()
}

fn poly(coeffs: &[f64], c: f64) -> Profile {
    Profile { poly: coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect(), c, omega: 0.0 }
}

#[test]
fn gaussian_closed_form() {
    let th = line();
    let a = separable(&th, AlgebraElement::one(th.clone()), vec![Profile::gaussian(1.0)], vec![Profile::gaussian(1.0)], 8.0);
    let report = j0_with_refinement(&a, &QuadratureSpec::gauss_legendre(2, 32)).unwrap();
    let v = report.value.coeff(&MultiIndex::zeros(1));
    assert!((v - 1.0 / 5f64.sqrt()).norm() <= 1e-6, "{v}");
    assert!(report.delta <= 1e-10);
}

/// `e^{-a s² - b ξ²}` integrates to `(2π)^{-1} π / √(ab + 1/4)`.
#[test]
fn anisotropic_gaussian_closed_form() {
    let th = line();
    for (p, q) in [(0.5, 2.0), (1.5, 0.7)] {
        let a = separable(&th, AlgebraElement::one(th.clone()), vec![Profile::gaussian(p)], vec![Profile::gaussian(q)], 9.0);
        let v = j0(&a, &QuadratureSpec::gauss_legendre(2, 32)).unwrap().coeff(&MultiIndex::zeros(1));
        let oracle = std::f64::consts::PI / (p * q + 0.25).sqrt() / TAU;
        assert!((v - oracle).norm() <= 1e-8, "({p}, {q}): {v} vs {oracle}");
    }
}

#[test]
fn zero_amplitude_integrates_to_zero() {
    let th = line();
    let t = th.clone();
    let a = FnAmplitude::new(th, SupportBox { s: 3.0, xi: 3.0 }, move |_, _| AlgebraElement::zero(t.clone()));
    assert!(j0(&a, &QuadratureSpec::gauss_legendre(1, 16)).unwrap().is_zero());
}

#[test]
fn j0_is_linear() {
    let corpus = lt_corpus().unwrap();
    let q = QuadratureSpec::gauss_legendre(4, 16);
    let (a, b) = (corpus[0].clone(), corpus[2].clone());
    let z = c(2.0, -0.5);
    let (ta, tb) = (a.clone(), b.clone());
    let combo = FnAmplitude::new(a.theta().clone(), a.support(), move |s, xi| {
        ta.eval(s, xi).try_add(&tb.eval(s, xi).scale(z)).unwrap()
    });
    let lhs = j0(&combo, &q).unwrap();
    let rhs = j0(a.as_ref(), &q).unwrap().try_add(&j0(b.as_ref(), &q).unwrap().scale(z)).unwrap();
    assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
}

#[test]
fn budget_and_oscillation_guards() {
    let th = line();
    let a = separable(&th, AlgebraElement::one(th.clone()), vec![Profile::gaussian(1.0)], vec![Profile::gaussian(1.0)], 8.0);
    let over = QuadratureSpec::gauss_legendre(4, 32).with_budget(1000);
    assert!(matches!(j0(&a, &over), Err(Error::Resource(_))));
    // 8 points cannot follow e^{isξ} over [-8, 8]²
    assert!(matches!(j0(&a, &QuadratureSpec::gauss_legendre(1, 8)), Err(Error::Resource(_))));
}

#[test]
fn transpose_fixes_amplitudes_inside_the_plateau() {
    let th = line();
    let a = separable(&th, AlgebraElement::one(th.clone()), vec![poly(&[1.0, 2.0], 0.3)], vec![Profile::gaussian(0.5)], 0.7);
    let chi = Cutoff { r0: 1.0, r1: 2.0 };
    let lt = apply_lt(Arc::new(a.clone()), chi, false).unwrap();
    for (s, xi) in [(0.0, 0.0), (0.3, -0.5), (-0.69, 0.69)] {
        assert_eq!(lt.eval(&[s], &[xi]), a.eval(&[s], &[xi]));
    }
}

#[test]
fn j0_invariant_under_one_and_two_transposes() {
    let (chi, q) = lt_setup();
    for a in lt_corpus().unwrap() {
        let values = lt_invariance(&a, chi, 2, &q).unwrap();
        let base = &values[0];
        assert!(base.max_abs() > 1e-2);
        assert!(values[1].max_abs_diff(base) <= 1e-6, "once: {}", values[1].max_abs_diff(base));
        assert!(values[2].max_abs_diff(base) <= 1e-6, "twice: {}", values[2].max_abs_diff(base));
    }
}

#[test]
fn transpose_without_derivatives_needs_finite_differences() {
    let th = line();
    let t = th.clone();
    let a: AmplitudeRef = Arc::new(FnAmplitude::new(th, SupportBox { s: 2.0, xi: 2.0 }, move |s, _| {
        AlgebraElement::scalar(t.clone(), c((-s[0] * s[0]).exp(), 0.0))
    }));
    assert!(matches!(apply_lt(a.clone(), Cutoff::default(), false), Err(Error::InvalidArgument(_))));
    assert!(apply_lt(a, Cutoff::default(), true).is_ok());
}

/// Refining the rule to twice the points per axis moves `J_0` by less than
/// `1e-6` on the two-dimensional corpus.
#[test]
fn quadrature_doubling_gate() {
    let th = Arc::new(ThetaMatrix::two_dim(0.25));
    // the doubled 4-dimensional grid has 56^4 points
    let q = j_quadrature().with_budget(10_000_000);
    for a in j_corpus(&th).unwrap() {
        let report = j0_with_refinement(a.as_ref(), &q).unwrap();
        assert!(report.delta < 1e-6, "{}", report.delta);
        assert!(report.value.max_abs() > 1e-2);
    }
}

fn u_k(th: &Arc<ThetaMatrix>, k: [i64; 2]) -> AlgebraElement {
    AlgebraElement::basis(th.clone(), MultiIndex::new(k))
}

/// `a = f(s)g(ξ)U^k` with real even `f`.
#[test]
fn adjoint_identity_for_even_profiles() {
    let th = Arc::new(ThetaMatrix::two_dim(0.25));
    let a: AmplitudeRef = Arc::new(separable(
        &th,
        u_k(&th, [1, -1]),
        vec![poly(&[1.0, 0.0, 0.5], 1.0), Profile::gaussian(1.2)],
        vec![poly(&[1.0, 0.7], 1.0), Profile::gaussian(0.9).with_frequency(0.4)],
        5.0,
    ));
    let q = j_quadrature();
    let star = mapped(a.clone(), Mapped::Star).unwrap();
    let ja = j0(a.as_ref(), &q).unwrap();
    assert!(ja.involution().max_abs_diff(&j0(star.as_ref(), &q).unwrap()) <= 1e-7);
    assert!(ja.max_abs() > 1e-2);
}

#[test]
fn module_identity_is_trivial_for_units() {
    let th = Arc::new(ThetaMatrix::two_dim(0.25));
    let a = j_corpus(&th).unwrap().remove(0);
    let one = AlgebraElement::one(th.clone());
    let q = j_quadrature();
    let r = j_properties_check(&a, &one, &one, &MultiIndex::new([1, 0]), &MultiIndex::new([0, 1]), &q).unwrap();
    assert_eq!(r.module, 0.0);
    assert!(r.max() <= 1e-6);
}

#[test]
fn exchange_identity_on_a_gaussian_amplitude() {
    let th = Arc::new(ThetaMatrix::two_dim(0.25));
    let coeff = u_k(&th, [0, 1]).try_add(&u_k(&th, [1, 0]).scale(c(0.0, 0.5))).unwrap();
    let a: AmplitudeRef = Arc::new(separable(
        &th,
        coeff,
        vec![poly(&[1.0, 0.3], 1.0), Profile::gaussian(1.0)],
        vec![Profile::gaussian(1.0), poly(&[0.5, 1.0], 1.0)],
        5.0,
    ));
    let b1 = u_k(&th, [1, 1]);
    let b2 = AlgebraElement::one(th.clone()).scale(c(0.0, 1.0));
    let r = j_properties_check(&a, &b1, &b2, &MultiIndex::new([1, 0]), &MultiIndex::new([0, 1]), &j_quadrature()).unwrap();
    assert!(r.exchange <= 1e-6, "{r:?}");
}

/// `∂_x J(e^{-x s²} g(ξ)) = J(-s² e^{-x s²} g(ξ))`.
#[test]
fn differentiation_under_the_integral() {
    let th = line();
    let one = AlgebraElement::one(th.clone());
    let g = poly(&[1.0, 0.4], 1.0);
    let q = QuadratureSpec::gauss_legendre(2, 32);
    let at = |x: f64| j0(&separable(&th, one.clone(), vec![Profile::gaussian(x)], vec![g.clone()], 8.0), &q).unwrap();
    for x in [0.6, 1.0, 1.7] {
        let h = 1e-4;
        let fd = at(x + h).try_add(&at(x - h).scale_real(-1.0)).unwrap().scale_real(0.5 / h);
        let exact = j0(&separable(&th, one.clone(), vec![poly(&[0.0, 0.0, -1.0], x)], vec![g.clone()], 8.0), &q).unwrap();
        assert!(fd.max_abs_diff(&exact) <= 1e-5, "x = {x}: {}", fd.max_abs_diff(&exact));
    }
}

fn gaussian_symbol(th: &Arc<ThetaMatrix>, shift: f64) -> FnSymbol {
    let t = th.clone();
    FnSymbol::new(th.clone(), None, move |xi: &[f64]| {
        AlgebraElement::scalar(t.clone(), c((-(xi[0] - shift).powi(2) / 2.0).exp(), 0.0))
    })
}

#[test]
fn inverse_fourier_of_gaussians() {
    let th = line();
    let rho = gaussian_symbol(&th, 0.0);
    let q = QuadratureSpec::gauss_legendre(4, 32);
    for s in [0.0, 0.4, 1.1, 2.5, -3.0] {
        let v = inverse_fourier(&rho, &[s], 12.0, 1e-30, &q).unwrap().coeff(&MultiIndex::zeros(1));
        let oracle = (-s * s / 2.0).exp() / TAU.sqrt();
        assert!((v - oracle).norm() <= 1e-10);
        // real and even
        let mirrored = inverse_fourier(&rho, &[-s], 12.0, 1e-30, &q).unwrap().coeff(&MultiIndex::zeros(1));
        assert!(v.im.abs() <= 1e-14 && (v - mirrored).norm() <= 1e-14);
    }
    assert!(matches!(inverse_fourier(&rho, &[0.0], 2.0, 1e-6, &q), Err(Error::Precondition(_))));
}

/// The forward transform of `ρ̌` gives back `ρ`.
#[test]
fn fourier_inversion() {
    let th = line();
    let rho = gaussian_symbol(&th, 0.7);
    let inner = QuadratureSpec::gauss_legendre(4, 32);
    let outer = QuadratureSpec::gauss_legendre(4, 32);
    for xi0 in [-1.5, -0.2, 0.0, 0.7, 2.3] {
        let back = fourier_transform(&th, |s| inverse_fourier(&rho, s, 12.0, 1e-25, &inner), &[xi0], 12.0, &outer).unwrap();
        let want = (-(xi0 - 0.7) * (xi0 - 0.7) / 2.0).exp();
        assert!((back.coeff(&MultiIndex::zeros(1)) - want).norm() <= 1e-6, "ξ = {xi0}");
    }
}

#[test]
fn operator_of_an_amplitude_is_linear() {
    let a = pa_amplitude(0.5);
    let th = a.theta().clone();
    let q = QuadratureSpec::gauss_legendre(32, 16);
    let u = AlgebraElement::basis(th.clone(), MultiIndex::new([1]));
    let v = AlgebraElement::from_coeffs(th.clone(), [(MultiIndex::new([-1]), c(2.0, 0.0)), (MultiIndex::new([0]), c(0.0, 1.0))]).unwrap();
    let lhs = p_from_amplitude(a.clone(), &u.try_add(&v).unwrap(), &q).unwrap();
    let rhs = p_from_amplitude(a.clone(), &u, &q).unwrap().try_add(&p_from_amplitude(a.clone(), &v, &q).unwrap()).unwrap();
    assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    assert!(p_from_amplitude(a, &AlgebraElement::zero(th), &q).unwrap().is_zero());
}
