use moire_wells::hermite::*;
use moire_wells::models::*;
use moire_wells::symbol::*;
use moire_wells::wkb::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mono(k: f64, a: u32, b: u32) -> Scalar {
    Scalar::term(c(k, 0.0), Monomial::new(a, b, 0, 0))
}

fn harper_well(w1: f64, kp: f64, order: u32) -> (PhaseSpaceSymbol, NormalForm, f64) {
    let xi0 = if kp == 0.0 { 1.0 / 3.0 } else { 1.0 / 6.0 };
    let s = block11(&chiral_harper_squared(&ModelParams { k_perp: kp, ..ModelParams::chiral(w1) }).unwrap());
    let r = classify(&s, "harper", 0.0, xi0, 2).unwrap();
    let sn = s.scale_re(1.0 / r.normalization);
    let nf = rescale_to_well(&sn, &r.well, order).unwrap();
    (sn, nf, xi0)
}

fn lowenergy_well(order: u32) -> NormalForm {
    let s = block11(&chiral_lowenergy_squared(&ModelParams::chiral(1.0)).unwrap());
    let r = classify(&s, "lowenergy", 0.0, 0.0, 2).unwrap();
    rescale_to_well(&s.scale_re(1.0 / r.normalization), &r.well, order).unwrap()
}

// synthetic normal form with a cubic σ₁ coupling
fn cubic_coupling(omega: f64, mu2: f64, g: f64) -> NormalForm {
    let mut t1 = PhaseSpaceSymbol::zeros(2);
    t1.set(0, 1, mono(g, 3, 0));
    t1.set(1, 0, mono(g, 3, 0));
    NormalForm::harmonic(omega, 0.0, mu2).with_term(1, &t1)
}

#[test]
fn resonance_classification() {
    let w = 1.7;
    let r = classify_resonance(-w, w, w);
    assert!(r.resonant);
    assert_eq!(r.witness, Some(-1));
    assert!(!classify_resonance(0.0, w / 3.0, w).resonant);
    assert_eq!(classify_resonance(6.0 * w, 0.0, w).witness, Some(1));
    assert!(!classify_resonance(0.0, 0.0, w).resonant);
}

#[test]
fn unperturbed_oscillator_gives_pure_mode() {
    let nf = NormalForm::harmonic(1.4, -0.3, 0.9);
    for (n, branch) in [(0, 1), (3, 2), (5, 1)] {
        let e = wkb_recurrence(&nf, n, branch, 2).unwrap();
        let mu = if branch == 1 { -0.3 } else { 0.9 };
        assert!((e.lambdas[0] - ((2 * n + 1) as f64 * 1.4 + mu)).abs() < 1e-14);
        assert!(e.lambdas[1..].iter().all(|l| *l == 0.0));
        assert_eq!(e.modes[0], HermiteCoefficients::mode(1.4, n, branch - 1));
        assert!(e.modes[1..].iter().all(|u| u.norm() == 0.0));
        let r = residual_order(&e, &nf, &default_h_grid()).unwrap();
        assert!(r.slope.is_none(), "{r:?}");
    }
}

#[test]
fn decoupled_second_order_matches_sum_over_states() {
    // block-diagonal T₁, T₂: textbook second-order perturbation theory per branch
    let omega = 1.1;
    let mut t1 = PhaseSpaceSymbol::zeros(2);
    t1.set(0, 0, mono(0.3, 3, 0).add(&mono(0.2, 1, 2)));
    t1.set(1, 1, mono(-0.5, 1, 0).add(&mono(0.1, 0, 3)));
    let mut t2 = PhaseSpaceSymbol::zeros(2);
    t2.set(0, 0, mono(0.07, 4, 0));
    t2.set(1, 1, mono(0.05, 2, 2).add(&mono(0.2, 0, 0)));
    let nf = NormalForm::harmonic(omega, 0.2, -0.4).with_term(1, &t1).with_term(2, &t2);
    let n_max = 30;
    let g1 = galerkin_matrix(&t1, omega, n_max, 1.0).unwrap();
    let g2 = galerkin_matrix(&t2, omega, n_max, 1.0).unwrap();
    for branch in [1, 2] {
        let comp = branch - 1;
        for n in 0..3 {
            let e = wkb_recurrence(&nf, n, branch, 1).unwrap();
            let i0 = 2 * n + comp;
            let mut expect = g2[(i0, i0)].re;
            for m in 0..=n_max {
                if m == n {
                    continue;
                }
                let im = 2 * m + comp;
                expect -= g1[(im, i0)].norm_sqr() / (2.0 * omega * (m as f64 - n as f64));
            }
            assert!((e.lambdas[2] - expect).abs() < 1e-8, "branch {branch} n {n}: {} vs {expect}", e.lambdas[2]);
        }
    }
}

#[test]
fn cubic_coupling_matches_galerkin_fit() {
    let omega = 1.3;
    let nf = cubic_coupling(omega, -omega / 2.0, 0.4);
    assert!(!classify_resonance(nf.mu1, nf.mu2, omega).resonant);
    let e = wkb_recurrence(&nf, 0, 1, 2).unwrap();
    assert_eq!(e.lambdas[1], 0.0);
    assert_eq!(e.lambdas[3], 0.0);
    let hs = default_h_grid();
    // branch 1, n = 0 is the second level since μ₂ < μ₁
    let ys: Vec<Vec<Complex64>> =
        hs.iter().map(|&h| vec![c(galerkin_levels(&nf, h, 2, 30).unwrap()[1] - e.lambdas[0], 0.0)]).collect();
    let (coef, _) = fit_half_powers(&hs, &ys, &[1, 2, 3, 4, 5]);
    assert!(coef[0][0].norm() < 1e-7);
    assert!((coef[1][0].re - e.lambdas[2]).abs() < 1e-5 * e.lambdas[2].abs(), "{:?} vs {}", coef[1][0], e.lambdas[2]);
    let slope = residual_order(&e, &nf, &hs).unwrap().slope.unwrap();
    assert!(slope >= 3.45, "{slope}");
}

#[test]
fn kernel_hit_raises_resonant_obstruction() {
    // μ₁ − μ₂ = 2ω: branch 1 at n = 0 sits on the second branch's n = 1 level
    let omega = 1.0;
    let mut t1 = PhaseSpaceSymbol::zeros(2);
    t1.set(0, 1, mono(1.0, 1, 0));
    t1.set(1, 0, mono(1.0, 1, 0));
    let nf = NormalForm::harmonic(omega, 1.0, -1.0).with_term(1, &t1);
    assert!(matches!(wkb_recurrence(&nf, 0, 1, 1), Err(moire_wells::Error::ResonantObstruction { step: 1 })));
    // the simple level at e = 0 is unobstructed
    let e = wkb_recurrence(&nf, 0, 2, 1).unwrap();
    assert_eq!(e.lambdas[0], 0.0);
}

#[test]
fn branch_symmetry_under_sigma1() {
    let omega = 0.9;
    let mut t1 = PhaseSpaceSymbol::zeros(2);
    t1.set(0, 0, mono(0.3, 3, 0));
    t1.set(1, 1, mono(-0.2, 1, 2));
    t1.set(0, 1, mono(0.4, 1, 0));
    t1.set(1, 0, mono(0.4, 1, 0));
    let mut t2 = PhaseSpaceSymbol::zeros(2);
    t2.set(0, 0, mono(0.1, 2, 2));
    t2.set(1, 1, mono(0.05, 4, 0));
    let nf = NormalForm::harmonic(omega, 0.1, 0.55).with_term(1, &t1).with_term(2, &t2);
    let sigma1 = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    let flip = |t: &PhaseSpaceSymbol| t.conjugate_const(&sigma1, &sigma1).unwrap();
    let swapped = NormalForm::harmonic(omega, 0.55, 0.1).with_term(1, &flip(&t1)).with_term(2, &flip(&t2));
    for n in 0..3 {
        let a = wkb_recurrence(&nf, n, 1, 2).unwrap();
        let b = wkb_recurrence(&swapped, n, 2, 2).unwrap();
        assert_eq!(a.lambdas, b.lambdas);
        for (u, v) in a.modes.iter().zip(&b.modes) {
            assert_eq!(u.coeffs[0], v.coeffs[1]);
            assert_eq!(u.coeffs[1], v.coeffs[0]);
        }
    }
}

#[test]
fn harper_residual_orders() {
    let hs = default_h_grid();
    for ell in 0..=2 {
        let (_, nf, _) = harper_well(1.0, 0.0, 2 * ell as u32 + 2);
        // simple level e₁ = 0 lives on the branch with μ = −ω
        let branch = if nf.mu1 < 0.0 { 1 } else { 2 };
        let e = wkb_recurrence(&nf, 0, branch, ell).unwrap();
        for i in (1..e.lambdas.len()).step_by(2) {
            assert_eq!(e.lambdas[i], 0.0);
        }
        let slope = residual_order(&e, &nf, &hs).unwrap().slope.unwrap();
        assert!(slope >= ell as f64 + 1.45, "ell {ell}: slope {slope}");
    }
}

#[test]
fn lowenergy_second_order_eigenvalue_is_pi_squared_over_twelve() {
    // same λ₂ as the Harper well, a check across two independent models
    let nf = lowenergy_well(4);
    let e = wkb_recurrence(&nf, 0, 1, 1).unwrap();
    assert!((e.lambdas[2] - PI * PI / 12.0).abs() < 1e-9, "{}", e.lambdas[2]);
    let (_, nfh, _) = harper_well(1.0, 0.0, 4);
    let eh = wkb_recurrence(&nfh, 0, 2, 1).unwrap();
    assert!((eh.lambdas[2] - PI * PI / 12.0).abs() < 1e-9, "{}", eh.lambdas[2]);
}

#[test]
fn unperturbed_resonant_fit_is_trivial() {
    let omega = 1.2;
    let nf = NormalForm::harmonic(omega, -omega, omega);
    let (a, b, _) = resonant_expansion(&nf, 2, 1, &default_h_grid()).unwrap();
    for e in [&a, &b] {
        assert!((e.lambdas[0] - 2.0 * omega).abs() < 1e-12);
        assert!(e.lambdas[1..].iter().all(|l| l.abs() < 1e-8), "{:?}", e.lambdas);
    }
    assert_eq!((a.branch, b.branch), (1, 2));
    assert!((a.modes[0].get(0, 1).norm() - 1.0).abs() < 1e-8);
    assert!((b.modes[0].get(1, 0).norm() - 1.0).abs() < 1e-8);
}

#[test]
fn harper_double_level_splits_at_first_order() {
    let (_, nf, _) = harper_well(1.0, 0.0, 6);
    let levels = eigenvalue_ordering(nf.omega, nf.mu1, nf.mu2, 5);
    let es: Vec<f64> = levels.iter().map(|l| l.e).collect();
    for (got, want) in es.iter().zip([0.0, 2.0, 2.0, 4.0, 4.0]) {
        assert!((got - want).abs() < 1e-9, "{es:?}");
    }
    // degenerate first-order perturbation theory: a⁽⁰⁾ = ±|⟨φ₀e₁, T₁ φ₁e₂⟩|
    let img = apply_weyl_hermite(&nf.t(1), &HermiteCoefficients::mode(nf.omega, 1, 1), 1.0, 64).unwrap();
    let split = img.get(0, 0).norm();
    let grid_a: Vec<f64> = (12..=17).map(|k| 2f64.powi(-k)).collect();
    let grid_b: Vec<f64> = (18..=23).map(|k| 2f64.powi(-k)).collect();
    let (a1, a2, _) = resonant_expansion(&nf, 2, 2, &grid_a).unwrap();
    let (b1, b2, _) = resonant_expansion(&nf, 2, 2, &grid_b).unwrap();
    assert!((a1.lambdas[1].abs() - split).abs() < 1e-5 * split, "{} vs {split}", a1.lambdas[1]);
    assert!(a1.lambdas[1] * a2.lambdas[1] < 0.0);
    for (x, y) in [(&a1, &b1), (&a2, &b2)] {
        assert!((x.lambdas[1] - y.lambdas[1]).abs() < 1e-4 * y.lambdas[1].abs());
    }
}

#[test]
fn stability_on_lowenergy_normal_form() {
    let nf = lowenergy_well(4);
    let hs = default_h_grid();
    let es: Vec<f64> = eigenvalue_ordering(nf.omega, nf.mu1, nf.mu2, 6).iter().map(|l| l.e).collect();
    let errs: Vec<Vec<f64>> = hs
        .iter()
        .map(|&h| galerkin_levels(&nf, h, 6, 40).unwrap().iter().zip(&es).map(|(a, b)| (a - b).abs()).collect())
        .collect();
    // |λ_n(h)/h − e_n| ≤ C h^½: the scaled error settles to a constant
    for n in 1..6 {
        let scaled: Vec<f64> = errs.iter().zip(&hs).map(|(e, h)| e[n] / h.sqrt()).collect();
        let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(hi / lo < 2.0, "level {n}: {scaled:?}");
        let tail: Vec<f64> = errs[4..].iter().map(|e| e[n]).collect();
        assert!(loglog_slope(&hs[4..], &tail) >= 0.45);
    }
}

#[test]
fn exact_trig_galerkin_agrees_with_series_at_small_h() {
    let (sn, nf, xi0) = harper_well(1.0, 0.0, 6);
    let h = 2f64.powi(-14);
    let a = exact_well_levels(&sn, 0.0, xi0, &nf, h, 6, 40).unwrap();
    let b = galerkin_levels(&nf, h, 6, 40).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-6, "{a:?} vs {b:?}");
    }
}

#[test]
fn periodized_gaussian_matches_lattice_sum() {
    let omega = 1.0;
    let e = WkbExpansion {
        n: 0,
        branch: 1,
        omega,
        mu1: -omega,
        mu2: omega,
        lambdas: vec![0.0],
        modes: vec![HermiteCoefficients::mode(omega, 0, 0)],
    };
    let p = periodize(&e, 0.0, 1.0, 64);
    for (x, v) in p.x.iter().zip(&p.values) {
        let brute: f64 = (-50..=50).map(|k| (omega / PI).powf(0.25) * (-0.5 * omega * (x - k as f64).powi(2)).exp()).sum();
        assert!((v[0].re - brute).abs() < 1e-12 && v[0].im.abs() < 1e-15 && v[1] == c(0.0, 0.0));
    }
}

#[test]
fn periodized_quasimode_norm_and_concentration() {
    let nf = lowenergy_well(4);
    let e = wkb_recurrence(&nf, 0, 1, 1).unwrap();
    let hs: Vec<f64> = [100.0, 200.0, 400.0, 800.0, 1600.0].iter().map(|l| 1.0 / l).collect();
    let dev: Vec<f64> = hs.iter().map(|&h| (periodize(&e, 0.0, h, periodize_grid(h)).norm - 1.0).abs()).collect();
    assert!(loglog_slope(&hs, &dev) >= 0.45, "{dev:?}");
    let h = 1.0 / 400.0;
    let p = periodize(&e, 0.0, h, periodize_grid(h));
    assert!(p.mass_outside(0.0, h.powf(0.4)) <= 1e-6);
}

#[test]
fn periodization_phase_follows_xi0() {
    let (_, nf, xi0) = harper_well(1.0, 0.0, 2);
    let e = wkb_recurrence(&nf, 0, 2, 0).unwrap();
    let h = 1.0 / (2.0 * PI * 90.0);
    let p = periodize(&e, xi0, h, 2048);
    // e^{iξ₀x/h} carries the well's momentum: compare phases one grid step apart near x = 0
    let i = p.x.iter().position(|x| *x >= 0.0).unwrap();
    let dphi = (p.values[i + 1][1] / p.values[i][1]).arg();
    let dx = p.x[i + 1] - p.x[i];
    assert!((dphi - xi0 * dx / h).abs() < 1e-6);
    assert!((p.norm - 1.0).abs() < 1e-6);
}

fn arb_parity_series() -> impl Strategy<Value = (Vec<(u32, u32, f64)>, Vec<(u32, u32, f64)>)> {
    let odd = prop::collection::vec((0u32..4, 0u32..4, -0.5f64..0.5), 1..5)
        .prop_map(|v| v.into_iter().filter(|(a, b, _)| (a + b) % 2 == 1).collect::<Vec<_>>());
    let even = prop::collection::vec((0u32..3, 0u32..3, -0.5f64..0.5), 1..5)
        .prop_map(|v| v.into_iter().filter(|(a, b, _)| (a + b) % 2 == 0).collect::<Vec<_>>());
    (odd, even)
}

fn parity_symbol(terms: &[(u32, u32, f64)], slot: usize) -> PhaseSpaceSymbol {
    let mut s = PhaseSpaceSymbol::zeros(2);
    for (k, &(a, b, v)) in terms.iter().enumerate() {
        let (r, col) = [(0, 0), (1, 1), (0, 1)][(k + slot) % 3];
        if a == 0 || b == 0 {
            // pure powers are Weyl-symmetric; mixed terms go on the diagonal only
            s.set(r, col, s.get(r, col).add(&mono(v, a, b)));
            if r != col {
                s.set(col, r, s.get(col, r).add(&mono(v, a, b)));
            }
        } else {
            s.set(r, r, s.get(r, r).add(&mono(v, a, b)));
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn odd_order_corrections_vanish(series in arb_parity_series(), slot in 0usize..3, mu2 in 0.05f64..0.9, n in 0usize..3) {
        let omega = 1.0;
        prop_assume!(!classify_resonance(0.0, mu2, omega).resonant);
        let nf = NormalForm::harmonic(omega, 0.0, mu2)
            .with_term(1, &parity_symbol(&series.0, slot))
            .with_term(2, &parity_symbol(&series.1, slot + 1))
            .with_term(3, &parity_symbol(&series.0, slot + 2));
        for branch in [1, 2] {
            let e = wkb_recurrence(&nf, n, branch, 2).unwrap();
            prop_assert_eq!(e.lambdas[1], 0.0);
            prop_assert_eq!(e.lambdas[3], 0.0);
            // u_i has the parity of n + i
            for (i, u) in e.modes.iter().enumerate() {
                prop_assert!(u.wrong_parity_mass((n + i) % 2) < 1e-12);
            }
        }
    }
}
