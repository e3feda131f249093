use moire_wells::bohr_sommerfeld::*;
use moire_wells::models::{antichiral_minima, ModelParams};
use moire_wells::symbol::{Monomial, Scalar};
use moire_wells::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn mono(c: f64, a: u32, b: u32) -> Scalar {
    Scalar::term(Complex64::new(c, 0.0), Monomial::new(a, b, 0, 0))
}

fn harmonic(lam: f64) -> ScalarSymbolSeries {
    ScalarSymbolSeries { p0: mono(lam / 2.0, 2, 0).add(&mono(lam / 2.0, 0, 2)), p1: Scalar::zero(), p2: Scalar::zero(), x0: 0.0, xi0: 0.0 }
}

fn tol() -> OrbitTolerance {
    OrbitTolerance::default()
}

fn antichiral_table() -> &'static FTable {
    static T: OnceLock<FTable> = OnceLock::new();
    T.get_or_init(|| {
        let s = antichiral_series(0.7, 1, 0.0).unwrap();
        f_table(&s, &tau_grid(cell_saddle(&s), 200), &tol()).unwrap()
    })
}

// F₀ of the separable entry 2(1−cos2πξ) + 2w₀(1−cos2πx) by direct area quadrature
fn antichiral_area_f0(w0: f64, tau: f64) -> f64 {
    // x-extent where 2w₀(1−cos2πx) = τ
    let xm = (1.0 - tau / (2.0 * w0)).acos() / (2.0 * PI);
    let n = 4000;
    let mut acc = 0.0;
    for i in 0..n {
        // x = xm sin θ removes the square-root endpoint
        let th = -PI / 2.0 + PI * (i as f64 + 0.5) / n as f64;
        let x = xm * th.sin();
        let rem = tau - 2.0 * w0 * (1.0 - (2.0 * PI * x).cos());
        let xi = (1.0 - rem.max(0.0) / 2.0).acos() / (2.0 * PI);
        acc += 2.0 * xi * xm * th.cos() * PI / n as f64;
    }
    acc / (2.0 * PI)
}

#[test]
fn harmonic_orbit_is_unit_circle_with_period() {
    let lam = 1.3;
    let o = trace_orbit(&harmonic(lam), lam / 2.0, &tol()).unwrap();
    assert!((o.period - 2.0 * PI / lam).abs() < 1e-10);
    for &(_, x, xi) in &o.samples {
        assert!(((x * x + xi * xi).sqrt() - 1.0).abs() < 1e-10);
    }
    assert!(o.closure_error < 1e-10 && o.energy_drift < 1e-10);
    assert!((o.action - PI).abs() < 1e-10);
}

#[test]
fn harmonic_f_values() {
    let lam = 1.7;
    for tau in [1e-3, 0.1, 1.0, 4.0] {
        let f = f_series(&harmonic(lam), tau, &tol()).unwrap();
        assert!((f.f0 - tau / lam).abs() < 1e-8 * (1.0 + tau));
        assert!((f.f1 - 0.5).abs() < 1e-8);
        assert!(f.f2.abs() < 1e-8, "F2 = {}", f.f2);
    }
}

#[test]
fn shoelace_agrees_with_action_integral() {
    let s = antichiral_series(0.7, 1, 0.0).unwrap();
    let o = trace_orbit(&s, 1.0, &tol()).unwrap();
    assert!((o.shoelace_area() - o.action).abs() < 1e-3 * o.action);
}

#[test]
fn area_doubles_under_dilation() {
    // p₀ = x² + ξ² + x⁴ against p₀(·/√2)
    let p = |c: f64| ScalarSymbolSeries {
        p0: mono(c, 2, 0).add(&mono(c, 0, 2)).add(&mono(c * c, 4, 0)),
        p1: Scalar::zero(),
        p2: Scalar::zero(),
        x0: 0.0,
        xi0: 0.0,
    };
    for tau in [0.1, 0.7] {
        let a = f_series(&p(1.0), tau, &tol()).unwrap();
        let b = f_series(&p(0.5), tau, &tol()).unwrap();
        assert!((b.f0 - 2.0 * a.f0).abs() < 1e-10, "{} vs {}", b.f0, 2.0 * a.f0);
    }
}

#[test]
fn f0_derivative_is_period_over_two_pi() {
    let s = antichiral_series(0.7, 1, 0.0).unwrap();
    for tau in [0.01, 0.3, 1.0, 1.8, 2.2] {
        let d = 1e-4 * tau;
        let up = trace_orbit(&s, tau + d, &tol()).unwrap().action;
        let dn = trace_orbit(&s, tau - d, &tol()).unwrap().action;
        let o = trace_orbit(&s, tau, &tol()).unwrap();
        let deriv = (up - dn) / (2.0 * d) / (2.0 * PI);
        assert!((deriv - o.period / (2.0 * PI)).abs() < 1e-6 * o.period, "tau {tau}: {deriv} vs {}", o.period / (2.0 * PI));
    }
}

#[test]
fn antichiral_f0_matches_area_quadrature() {
    let s = antichiral_series(0.7, 1, 0.0).unwrap();
    for tau in [1e-3, 0.1, 1.0, 2.5] {
        let f = f_series(&s, tau, &tol()).unwrap();
        let q = antichiral_area_f0(0.7, tau);
        assert!((f.f0 - q).abs() < 1e-9 * q.max(1e-3), "tau {tau}: {} vs {q}", f.f0);
    }
}

#[test]
fn antichiral_f0_small_tau_expansion() {
    // F₀ = τ/(8π²√w₀) + τ²(1 + 1/w₀)/(256π²√w₀) + O(τ³)
    for w0 in [0.7, 1.0] {
        let s = antichiral_series(w0, 1, 0.0).unwrap();
        let omega = 8.0 * PI * PI * w0.sqrt();
        let c2 = (1.0 + 1.0 / w0) / (256.0 * PI * PI * w0.sqrt());
        let taus = [0.01, 0.02, 0.04, 0.08];
        let ys: Vec<f64> = taus.iter().map(|&t| (f_series(&s, t, &tol()).unwrap().f0 - t / omega) / (t * t)).collect();
        // linear extrapolation in τ removes the cubic term
        let slope = (ys[3] - ys[0]) / (taus[3] - taus[0]);
        let c2_fit = ys[0] - slope * taus[0];
        assert!((c2_fit - c2).abs() < 1e-3 * c2, "w0 {w0}: {c2_fit} vs {c2}");
    }
}

#[test]
fn constant_subprincipal_shifts_f1() {
    let lam = 2.0;
    let c = 0.3;
    let p = ScalarSymbolSeries { p1: Scalar::real(c), ..harmonic(lam) };
    let f = f_series(&p, 0.5, &tol()).unwrap();
    assert!((f.f1 - (0.5 - c / lam)).abs() < 1e-10);
    assert!(f.f2.abs() < 1e-8);
}

#[test]
fn linear_subprincipal_gives_exact_second_order_shift() {
    // p₀ + h αx = λ/2((x + hα/λ)² + ξ²) − h²α²/(2λ)
    let (lam, alpha) = (1.5, 0.8);
    let p = ScalarSymbolSeries { p1: mono(alpha, 1, 0), ..harmonic(lam) };
    let f = f_series(&p, 0.7, &tol()).unwrap();
    assert!((f.f1 - 0.5).abs() < 1e-10);
    assert!((f.f2 - alpha * alpha / (2.0 * lam * lam)).abs() < 1e-7, "F2 = {}", f.f2);

    let taus = tau_grid(4.0, 120);
    let table = f_table(&p, &taus, &tol()).unwrap();
    let h = 0.01;
    for k in 1..=20 {
        let exact = lam * (k as f64 - 0.5) * h - h * h * alpha * alpha / (2.0 * lam);
        let got = table.invert(k, h).unwrap();
        assert!((got - exact).abs() < 1e-9, "k {k}: {got} vs {exact}");
    }
}

#[test]
fn harmonic_inversion_and_positivity_threshold() {
    let lam = 1.7;
    let taus = tau_grid(10.0, 200);
    let table = f_table(&harmonic(lam), &taus, &tol()).unwrap();
    let h = 0.01;
    for k in 1..=50 {
        let got = table.invert(k, h).unwrap();
        assert!((got - lam * (k as f64 - 0.5) * h).abs() < 1e-9);
    }
    assert!(matches!(table.invert(0, h), Err(Error::OutOfRange { .. })));
    assert!(matches!(table.invert(10_000, h), Err(Error::OutOfRange { .. })));
}

#[test]
fn linear_table_root_is_exact() {
    let lam = 2.5;
    let rows = (0..50)
        .map(|i| {
            let tau = 0.01 * (i + 1) as f64;
            FValues { tau, f0: tau / lam, f1: 0.0, f2: 0.0, period: 2.0 * PI / lam }
        })
        .collect();
    let table = FTable { rows };
    for k in 1..15 {
        let h = 0.013;
        let got = invert_f(&table, k, h).unwrap();
        assert!((got - lam * k as f64 * h).abs() < 1e-14 * (1.0 + got));
    }
}

#[test]
fn orbit_conserves_energy_on_antichiral_entry() {
    for w0 in [0.7, 1.0] {
        let s = antichiral_series(w0, 1, 0.0).unwrap();
        let sad = cell_saddle(&s);
        assert!((sad - 4.0 * w0.min(1.0)).abs() < 1e-12);
        for tau in tau_grid(sad, 7) {
            let o = trace_orbit(&s, tau, &tol()).unwrap();
            assert!(o.energy_drift <= 1e-10, "drift {} at tau {tau}", o.energy_drift);
            assert!(o.closure_error <= 1e-8, "closure {} at tau {tau}", o.closure_error);
        }
    }
}

#[test]
fn orbit_fails_above_saddle() {
    let s = antichiral_series(0.7, 1, 0.0).unwrap();
    let tight = OrbitTolerance { max_steps: 20_000, ..tol() };
    assert!(matches!(trace_orbit(&s, 3.0, &tight), Err(Error::NoClosedOrbit { .. })));
}

#[test]
fn antichiral_minima_values() {
    let c = antichiral_minima(0.7);
    for (got, want) in c.iter().zip([-5.1, -3.7, -3.1, -1.7]) {
        assert!((got - want).abs() < 1e-12);
    }
    let h = 1.0 / (2.0 * PI * 60.0);
    let z = antichiral_levels(1.0, h, 1, 0);
    assert!((z - (-6.0 + 8.0 * PI * PI * h / 2.0)).abs() < 1e-14);
}

#[test]
fn bohr_sommerfeld_levels_match_circle_spectrum() {
    let table = antichiral_table();
    let c1 = antichiral_minima(0.7)[0];
    let mut gaps = Vec::new();
    let mut hs = Vec::new();
    for l in [40usize, 80, 160] {
        let h = ModelParams::harper_h(l as f64);
        let spec = antichiral_spectrum(0.7, 0.0, l).unwrap();
        let mut worst: f64 = 0.0;
        for k in 1..=4 {
            worst = worst.max(nearest_gap(&spec, c1 + table.invert(k, h).unwrap()));
        }
        gaps.push(worst);
        hs.push(h);
    }
    assert!(gaps[2] < 1e-8, "gaps {gaps:?}");
    let slope = (gaps[2] / gaps[0]).ln() / (hs[2] / hs[0]).ln();
    assert!(slope > 3.5, "slope {slope}");
}

#[test]
fn harmonic_ladder_matches_to_second_order() {
    for w0 in [0.7, 1.0] {
        let rows = level_table(w0, 0.0, &[40, 160], 3, Matching::Component, |h, j, k| antichiral_levels_harmonic(w0, h, j, k)).unwrap();
        let (coarse, fine) = rows.split_at(rows.len() / 2);
        for (a, b) in coarse.iter().zip(fine) {
            let slope = (b.gap / a.gap).ln() / 0.25f64.ln();
            assert!(slope > 1.8, "{a:?} {b:?} slope {slope}");
        }
    }
}

#[test]
fn component_spectra_partition_the_full_spectrum() {
    let mut full = antichiral_spectrum(0.7, 0.0, 40).unwrap();
    let mut parts: Vec<f64> = (1..=4).flat_map(|j| antichiral_component_spectrum(0.7, 0.0, j, 40).unwrap()).collect();
    full.sort_by(f64::total_cmp);
    parts.sort_by(f64::total_cmp);
    assert_eq!(full.len(), parts.len());
    for (a, b) in full.iter().zip(&parts) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn stated_ladder_only_coincides_at_unit_coupling() {
    let h = ModelParams::harper_h(80.0);
    for j in 1..=4 {
        assert!((antichiral_levels(1.0, h, j, 2) - antichiral_levels_harmonic(1.0, h, j, 2)).abs() < 1e-15);
        assert!((antichiral_levels(0.7, h, j, 2) - antichiral_levels_harmonic(0.7, h, j, 2)).abs() > 1e-2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quadratic_p0_with_constant_p1_has_zero_f2(a in 0.5f64..2.0, c in 0.5f64..2.0, b in -0.8f64..0.8, p1 in -1.0f64..1.0, tau in 0.05f64..2.0) {
        let p0 = mono(a, 2, 0).add(&mono(b, 1, 1)).add(&mono(c, 0, 2));
        let p = ScalarSymbolSeries { p0, p1: Scalar::real(p1), p2: Scalar::zero(), x0: 0.0, xi0: 0.0 };
        let f = f_series(&p, tau, &tol()).unwrap();
        prop_assert!(f.f2.abs() < 1e-7, "F2 = {}", f.f2);
        // λ = √(4ac − b²)
        let lam = (4.0 * a * c - b * b).sqrt();
        prop_assert!((f.f0 - tau / lam).abs() < 1e-9 * (1.0 + tau));
    }

    #[test]
    fn inversion_roundtrip(k in 1i64..6, l in 40usize..200) {
        let table = antichiral_table();
        let h = ModelParams::harper_h(l as f64);
        let lam = table.invert(k, h).unwrap();
        prop_assert!((table.eval(lam, h).unwrap() - k as f64 * h).abs() < 1e-12);
    }
}
