use moire_wells::symbol::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

fn sample_points(n: usize) -> Vec<(f64, f64)> {
    // deterministic quasi-random points
    (0..n)
        .map(|i| {
            let t = i as f64;
            ((t * 0.618_033_988_7).fract() - 0.5, (t * 0.754_877_666_2).fract() - 0.5)
        })
        .collect()
}

#[test]
fn canonical_commutator_is_ih() {
    let comm = Scalar::x().commutator(&Scalar::xi(), Order::Exact);
    let expected = Scalar::graded_term(c(0.0, 1.0), Grade::new(2), Monomial::ONE);
    assert_eq!(comm, expected);
}

#[test]
fn self_commutator_vanishes() {
    let a = Scalar::cos(1, 2).add(&Scalar::x().mul(&Scalar::sin(0, 1))).add(&Scalar::xi().mul(&Scalar::xi()));
    assert!(a.commutator(&a, Order::Exact).is_zero());
    assert!(a.commutator(&a, Order::Truncate(12)).is_zero());
}

#[test]
fn x_anticommutator_is_twice_square() {
    let x = Scalar::x();
    let ac = x.anticommutator(&x, Order::Exact);
    assert_eq!(ac, Scalar::term(c(2.0, 0.0), Monomial::new(2, 0, 0, 0)));
}

#[test]
fn ig_upsilon_commutator_closed_form() {
    for w1 in [0.4, 1.0, 2.0] {
        let g = Scalar::sin(1, 0).scale_re(w1 * 3f64.sqrt());
        let ig = g.scale(c(0.0, 1.0));
        let ups = Scalar::cos(0, 1).scale_re(2.0).add(&Scalar::real(1.0));
        let comm = ig.commutator(&ups, Order::Exact);
        for h in [0.01, 0.05, 0.2] {
            for (x, xi) in sample_points(50) {
                let expect = 4.0 * 3f64.sqrt() * w1 * (2.0 * PI * x).cos() * (2.0 * PI * xi).sin() * (2.0 * PI * PI * h).sin();
                assert!(close(comm.eval(x, xi, h), c(expect, 0.0), 1e-12));
            }
        }
    }
}

#[test]
fn upsilon_f_anticommutator_correction() {
    let w1 = 1.0;
    let f = Scalar::real(w1).sub(&Scalar::cos(1, 0).scale_re(w1));
    let ups = Scalar::cos(0, 1).scale_re(2.0).add(&Scalar::real(1.0));
    let a = ups.anticommutator(&f, Order::Exact).sub(&ups.mul(&f).scale_re(2.0));
    for h in [0.01, 0.1] {
        for (x, xi) in sample_points(40) {
            let expect = -4.0 * w1 * (2.0 * PI * x).cos() * (2.0 * PI * xi).cos() * ((2.0 * PI * PI * h).cos() - 1.0);
            assert!(close(a.eval(x, xi, h), c(expect, 0.0), 1e-12));
        }
    }
}

#[test]
fn sin_sin_product_matches_direct_series() {
    let a = Scalar::sin(1, 0);
    let b = Scalar::sin(0, 1);
    let exact = a.anticommutator(&b, Order::Exact);
    let h = 0.005;
    for (x, xi) in sample_points(30) {
        // a#b = Σ_k (ih/2)^k/k! ∂_x^k a ∂_ξ^k b, and b#a has the conjugate sign
        let mut direct = c(0.0, 0.0);
        let mut fact = 1.0;
        for k in 0..=8u32 {
            if k > 0 {
                fact *= k as f64;
            }
            let d = (2.0 * PI).powi(2 * k as i32)
                * (2.0 * PI * x + k as f64 * PI / 2.0).sin()
                * (2.0 * PI * xi + k as f64 * PI / 2.0).sin();
            let z = c(0.0, h / 2.0).powu(k) / fact;
            direct += (z + z.conj()) * d;
        }
        let got = exact.eval(x, xi, h);
        assert!(close(got, direct, 1e-12), "{got} vs {direct}");
    }
}

#[test]
fn truncated_matches_exact_to_order() {
    let a = Scalar::cos(1, 0).add(&Scalar::xi().mul(&Scalar::sin(1, 0)));
    let b = Scalar::cos(0, 1).add(&Scalar::x().mul(&Scalar::cos(0, 2)));
    let exact = a.moyal(&b, Order::Exact);
    let trunc = a.moyal(&b, Order::Truncate(16));
    let h = 1e-3;
    for (x, xi) in sample_points(20) {
        assert!(close(exact.eval(x, xi, h), trunc.eval(x, xi, h), 1e-13));
    }
}

#[test]
fn taylor_examples() {
    let w1 = 1.0;
    let f = Scalar::real(w1).sub(&Scalar::cos(1, 0).scale_re(w1));
    let g = Scalar::sin(1, 0).scale_re(w1 * 3f64.sqrt());
    let s = f.mul(&f).sub(&g.mul(&g));
    let t = s.taylor(0.0, 0.0, 2);
    let expect = Scalar::term(c(-12.0 * PI * PI * w1 * w1, 0.0), Monomial::new(2, 0, 0, 0));
    assert!(t.sub(&expect).max_abs_coeff() < 1e-10);

    let ups = Scalar::cos(0, 1).scale_re(2.0).add(&Scalar::real(1.0));
    let t = ups.mul(&ups).taylor(0.0, 1.0 / 3.0, 2);
    let expect = Scalar::term(c(12.0 * PI * PI, 0.0), Monomial::new(0, 2, 0, 0));
    assert!(t.sub(&expect).max_abs_coeff() < 1e-10);

    let k = Scalar::real(3.5);
    assert_eq!(k.taylor(0.2, 0.7, 5), k);
}

#[test]
fn rescale_trivial_harmonic() {
    let omega = 1.7;
    let s = Scalar::xi().mul(&Scalar::xi()).add(&Scalar::x().mul(&Scalar::x()).scale_re(omega * omega));
    let sym = PhaseSpaceSymbol::scalar_times_identity(&s, 2);
    let nf = rescale_to_well(&sym, &WellCandidate::at(0.0, 0.0), 4).unwrap();
    assert!((nf.omega - omega).abs() < 1e-14);
    assert_eq!((nf.mu1, nf.mu2), (0.0, 0.0));
    for j in 1..=4 {
        assert!(nf.t(j).entries().iter().all(Scalar::is_zero));
    }
}

#[test]
fn rescale_rejects_non_normal_form() {
    let s = Scalar::xi().add(&Scalar::x().mul(&Scalar::x()));
    let sym = PhaseSpaceSymbol::scalar_times_identity(&s, 2);
    assert!(rescale_to_well(&sym, &WellCandidate::at(0.0, 0.0), 2).is_err());
}

#[test]
fn dimension_mismatch_rejected() {
    let a = PhaseSpaceSymbol::identity(2);
    let b = PhaseSpaceSymbol::identity(4);
    assert!(matches!(a.moyal(&b, Order::Exact), Err(moire_wells::Error::DimensionMismatch { .. })));
}

#[test]
fn identity_det_and_json_roundtrip() {
    let id = PhaseSpaceSymbol::identity(2);
    assert_eq!(id.det_principal(0.3, 0.1), 1.0);
    let mut s = PhaseSpaceSymbol::zeros(2);
    s.set(0, 1, Scalar::phase(1, -1).moyal(&Scalar::phase(-2, 3), Order::Exact).add(&Scalar::x()));
    s.set(1, 0, s.get(0, 1).conj());
    let back = PhaseSpaceSymbol::from_json(&s.to_json()).unwrap();
    assert_eq!(back, s);
}

fn arb_trig() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-2i32..=2, -2i32..=2, -1.0f64..1.0, -1.0f64..1.0), 1..5).prop_map(|v| {
        let mut s = Scalar::zero();
        for (m, n, re, im) in v {
            s.add_term(Grade::ZERO, Monomial::new(0, 0, m, n), c(re, im));
        }
        s
    })
}

fn arb_mixed() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((0u32..3, 0u32..3, -1i32..=1, -1i32..=1, -1.0f64..1.0, -1.0f64..1.0), 1..4).prop_map(|v| {
        let mut s = Scalar::zero();
        for (a, b, m, n, re, im) in v {
            s.add_term(Grade::ZERO, Monomial::new(a, b, m, n), c(re, im));
        }
        s
    })
}

proptest! {
    #[test]
    fn trig_product_is_closed_form(a in arb_trig(), b in arb_trig(), h in 0.001f64..0.3) {
        let p = a.moyal(&b, Order::Exact);
        for (x, xi) in sample_points(10) {
            let mut direct = c(0.0, 0.0);
            for (_, m1, v1) in a.iter() {
                for (_, m2, v2) in b.iter() {
                    let phase = 2.0 * PI * ((m1.m + m2.m) as f64 * x + (m1.n + m2.n) as f64 * xi)
                        + PI * PI * h * 2.0 * (m1.n * m2.m - m1.m * m2.n) as f64;
                    direct += v1 * v2 * Complex64::from_polar(1.0, phase);
                }
            }
            prop_assert!(close(p.eval(x, xi, h), direct, 1e-12));
        }
    }

    #[test]
    fn adjoint_symmetry(a in arb_mixed(), b in arb_mixed()) {
        let lhs = a.moyal(&b, Order::Exact).conj();
        let rhs = b.conj().moyal(&a.conj(), Order::Exact);
        prop_assert!(lhs.sub(&rhs).max_abs_coeff() < 1e-12 * (1.0 + lhs.max_abs_coeff()));
    }

    #[test]
    fn classical_limit(a in arb_mixed(), b in arb_mixed()) {
        let p = a.moyal(&b, Order::Exact).grade_part(0);
        let q = a.mul(&b);
        for (x, xi) in sample_points(8) {
            prop_assert!(close(p.eval(x, xi, 0.0), q.eval(x, xi, 0.0), 1e-12));
        }
    }

    #[test]
    fn first_order_is_poisson_bracket(a in arb_mixed(), b in arb_mixed()) {
        let comm = a.commutator(&b, Order::Truncate(2)).grade_part(2);
        let pb = a.dxi().mul(&b.dx()).sub(&a.dx().mul(&b.dxi()));
        let expect = pb.scale(c(0.0, -1.0));
        prop_assert!(comm.sub(&expect).max_abs_coeff() < 1e-10 * (1.0 + expect.max_abs_coeff()));
    }
}
