use faer::Mat;
use moire_wells::models::*;
use moire_wells::spectra::*;
use moire_wells::symbol::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn op(m: Mat<Complex64>) -> OperatorMatrix {
    OperatorMatrix::new(m, Provenance::default())
}

#[test]
fn eigensolve_trivial_cases() {
    let d = Mat::from_fn(3, 3, |i, j| if i == j { c(i as f64 + 1.0, 0.0) } else { c(0.0, 0.0) });
    assert_eq!(op(d).eigenvalues().unwrap(), vec![1.0, 2.0, 3.0]);
    let s1 = Mat::from_fn(2, 2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let ev = op(s1).eigenvalues().unwrap();
    assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
}

#[test]
fn eigensolve_random_hermitian() {
    let n = 50;
    let mut seed = 12345u64;
    let mut rnd = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut m = Mat::<Complex64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(rnd(), 0.0);
        for j in 0..i {
            let z = c(rnd(), rnd());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    let o = op(m.clone());
    let e = hermitian_eigensolve(&o).unwrap();
    assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-10);
    let norm = o.max_abs() * n as f64;
    for k in 0..n {
        let v = e.vector(k);
        let mut res: f64 = 0.0;
        for i in 0..n {
            let mut acc = c(0.0, 0.0);
            for j in 0..n {
                acc += m[(i, j)] * v[j];
            }
            res += (acc - v[i] * e.values[k]).norm_sqr();
        }
        assert!(res.sqrt() <= 1e-9 * norm);
    }
}

#[test]
fn eigensolve_rejects_non_hermitian() {
    let m = Mat::from_fn(2, 2, |i, j| if i < j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    assert!(op(m).eigenvalues().is_err());
}

#[test]
fn circle_quantize_trivial_symbols() {
    let l = 30.0;
    let h = ModelParams::harper_h(l);
    let s = PhaseSpaceSymbol::scalar(Scalar::cos(0, 1));
    let m = circle_quantize(&s, h, Closure::Window(10)).unwrap();
    for k in 0..21 {
        let n = k as f64 - 10.0;
        assert!((m.matrix[(k, k)] - c((2.0 * PI * n / l).cos(), 0.0)).norm() < 1e-14);
    }
    let shift = PhaseSpaceSymbol::scalar(Scalar::phase(1, 0));
    let m = circle_quantize(&shift, h, Closure::Window(5)).unwrap();
    for i in 0..11 {
        for j in 0..11 {
            let e = if i == j + 1 { 1.0 } else { 0.0 };
            assert_eq!(m.matrix[(i, j)], c(e, 0.0));
        }
    }
    let xpoly = PhaseSpaceSymbol::scalar(Scalar::x());
    assert!(circle_quantize(&xpoly, h, Closure::Window(5)).is_err());
    let aperiodic = PhaseSpaceSymbol::scalar(Scalar::xi());
    assert!(circle_quantize(&aperiodic, h, Closure::Periodic { modes: 30, theta: 0.0 }).is_err());
}

#[test]
fn weyl_midpoint_for_mixed_terms() {
    // (e^{2πix} ξ)^w = (e^{2πix} hD + hD e^{2πix})/2
    let h = 0.01;
    let s = PhaseSpaceSymbol::scalar(Scalar::phase(1, 0).mul(&Scalar::xi()));
    let m = circle_quantize(&s, h, Closure::Window(4)).unwrap();
    for k in 0..8 {
        let n = k as f64 - 4.0;
        let expect = 0.5 * (2.0 * PI * h * n + 2.0 * PI * h * (n + 1.0));
        assert!((m.matrix[(k + 1, k)] - c(expect, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn tight_binding_single_site() {
    let p = ModelParams { w0: 0.4, w1: 0.9, k_perp: 0.2, ..Default::default() };
    let kx = 0.7;
    let m = tight_binding_bloch(1, 1, kx, &p).unwrap();
    let t = t_perp(p.k_perp);
    let t0 = t_zero();
    let v = potential(p.w0, p.w1).eval(0.0, 0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            let e = t[a][b] * (2.0 * kx.cos()) + t0[a][b] + v[a][b];
            assert!((m.matrix[(a, b)] - e).norm() < 1e-14);
        }
    }
    assert!(matches!(tight_binding_bloch(2, 4, 0.0, &p), Err(moire_wells::Error::NotCoprime { .. })));
}

#[test]
fn tight_binding_periodic_and_chiral_symmetric() {
    let p = ModelParams::chiral(1.0);
    for kx in [0.0, 0.3, 2.0] {
        let a = tight_binding_bloch(1, 30, kx, &p).unwrap();
        let b = tight_binding_bloch(1, 30, kx + 2.0 * PI, &p).unwrap();
        assert!(a.hermiticity_defect() < 1e-12);
        for i in 0..a.size() {
            for j in 0..a.size() {
                assert!((a.matrix[(i, j)] - b.matrix[(i, j)]).norm() < 1e-12);
            }
        }
        let ev = a.eigenvalues().unwrap();
        let n = ev.len();
        for i in 0..n {
            assert!((ev[i] + ev[n - 1 - i]).abs() < 1e-10);
        }
    }
}

#[test]
fn free_dirac_lowenergy() {
    let h = 1.0 / 60.0;
    let kp = 0.3;
    let kx = 0.02;
    let p = ModelParams { w0: 0.0, w1: 0.0, k_perp: kp, ..Default::default() };
    let n = 8;
    let ev = lowenergy_bloch(kx, h, n, &p).unwrap().eigenvalues().unwrap();
    let mut expect: Vec<f64> = Vec::new();
    for k in -(n as i64)..=(n as i64) {
        let r = (2.0 * PI * h * k as f64 + kx).hypot(kp);
        expect.extend([r, r, -r, -r]);
    }
    expect.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(lowenergy_bloch(1.0, h, n, &p).is_err());
}

#[test]
fn lowenergy_chiral_spectrum_symmetric() {
    let h = 1.0 / 60.0;
    let ev = lowenergy_bloch(0.05, h, 40, &ModelParams::chiral(1.0)).unwrap().eigenvalues().unwrap();
    let n = ev.len();
    for i in 0..n {
        assert!((ev[i] + ev[n - 1 - i]).abs() < 1e-10);
    }
}

#[test]
fn flatness_of_constant_family_is_zero() {
    let bs = band_sweep(
        |_| Ok(op(Mat::from_fn(3, 3, |i, j| if i == j { c(i as f64, 0.0) } else { c(0.0, 0.0) }))),
        &uniform_grid(0.0, 1.0, 32),
        serde_json::Value::Null,
    )
    .unwrap();
    for b in 0..3 {
        assert_eq!(flatness(&bs, b, 0.01).width, 0.0);
    }
    assert_eq!(bs.bands_above_zero(2), vec![0, 1]);
}

#[test]
fn band_sweep_keeps_k_order() {
    let ks = uniform_grid(0.0, 2.0 * PI, 40);
    let bs = band_sweep(
        |k| Ok(op(Mat::from_fn(1, 1, |_, _| c(k.cos(), 0.0)))),
        &ks,
        serde_json::Value::Null,
    )
    .unwrap();
    for (k, row) in bs.k.iter().zip(&bs.bands) {
        assert_eq!(row[0], k.cos());
    }
}

#[test]
fn circle_closure_matches_tight_binding_fibers() {
    // modes n and n+30 share a fiber point, so the untwisted closure sees the lattice x ∈ Z/30
    let p = ModelParams::chiral(1.0);
    let h = ModelParams::harper_h(30.0);
    let circle = circle_quantize(&harper_symbol(&p), h, Closure::Periodic { modes: 30, theta: 0.0 }).unwrap().eigenvalues().unwrap();
    let mut tb = Vec::new();
    for k in uniform_grid(0.0, 2.0 * PI, 64) {
        tb.extend(tight_binding_bloch(1, 30, k, &p).unwrap().eigenvalues().unwrap());
    }
    assert!(directed_hausdorff(&circle, &tb) < 5e-3);
}

#[test]
fn commensurable_q2_matches_harper() {
    let p = ModelParams { w0: 0.7, w1: 0.8, k_perp: 0.13, ..Default::default() };
    let hp = 1.0 / (40.0 * PI);
    let h = commensurable_h(1, 2, hp);
    let a = circle_quantize(&harper_symbol(&p), h, Closure::Periodic { modes: 20, theta: 0.0 }).unwrap().eigenvalues().unwrap();
    let u = circle_quantize(&commensurable_unfold(1, 2, &p).unwrap(), hp, Closure::Periodic { modes: 20, theta: 0.0 }).unwrap();
    assert!(u.hermiticity_defect() < 1e-12);
    let b = u.eigenvalues().unwrap();
    let doubled: Vec<f64> = a.iter().flat_map(|&x| [x, x]).collect();
    for (x, y) in doubled.iter().zip(&b) {
        assert!((x - y).abs() < 1e-6);
    }
}

#[test]
fn massive_operator_trivial_cutoffs() {
    let h = ModelParams::harper_h(20.0);
    let sym = block11(&chiral_harper_squared(&ModelParams::chiral(1.0)).unwrap());
    let closure = Closure::Periodic { modes: 20, theta: 0.0 };
    let m = circle_quantize(&sym, h, closure).unwrap();
    let layout = Layout { h, closure, components: 2 };
    let one = Cutoff { x: XCutoff::Fejer { order: 0 }, rho: 1e6, xi_period: None };
    let mm = massive_operator(&m, &layout, 0.0, 0.0, &one).unwrap();
    let zero = Cutoff { x: XCutoff::Fejer { order: 0 }, rho: 1e-9, xi_period: Some(1.0) };
    let mz = massive_operator(&m, &layout, 0.0, 0.0123, &zero).unwrap();
    for i in 0..m.size() {
        for j in 0..m.size() {
            assert!((mm.matrix[(i, j)] - m.matrix[(i, j)]).norm() < 1e-13);
            let id = if i == j { 1.0 } else { 0.0 };
            assert!((mz.matrix[(i, j)] - m.matrix[(i, j)] - c(id, 0.0)).norm() < 1e-13);
        }
    }
}

#[test]
fn cutoff_stays_in_unit_interval() {
    for cut in [XCutoff::Fejer { order: 8 }, XCutoff::FlatTop { order: 60, half_width: 0.15, edge: 0.02 }] {
        let coeffs = x_cutoff_coefficients(0.2, cut);
        let mut peak: f64 = 0.0;
        for i in 0..500 {
            let v = eval_x_cutoff(&coeffs, i as f64 / 500.0);
            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            peak = peak.max(v);
        }
        assert!(peak > 0.9);
    }
    assert!(plateau(0.3) == 1.0 && plateau(1.2) == 0.0 && (plateau(0.75) - 0.5).abs() < 1e-12);
}

#[test]
fn massive_operator_isolates_one_well() {
    let l = 60.0;
    let h = ModelParams::harper_h(l);
    let sym = block11(&chiral_harper_squared(&ModelParams::chiral(1.0)).unwrap());
    let closure = Closure::Periodic { modes: 60, theta: 0.0 };
    let m = circle_quantize(&sym, h, closure).unwrap();
    let layout = Layout { h, closure, components: 2 };
    let cut = Cutoff { x: XCutoff::FlatTop { order: 200, half_width: 0.22, edge: 0.02 }, rho: 1.0 / 3.0, xi_period: Some(1.0) };
    let (x0, xi0) = (0.0, 1.0 / 3.0);
    let q = cutoff_matrix(&layout, x0, xi0, &cut).unwrap();
    let massive = massive_operator(&m, &layout, x0, xi0, &cut).unwrap().eigenvalues().unwrap();
    let e = hermitian_eigensolve(&m).unwrap();

    // the wells at ±⅓ hybridize, so compare with the most localized vector of the nearby eigenspace
    for (level, &lam) in massive[..2].iter().enumerate() {
        let idx: Vec<usize> = (0..e.values.len()).filter(|&k| (e.values[k] - lam).abs() < 5e-3).collect();
        let vs: Vec<Vec<Complex64>> = idx.iter().map(|&k| e.vector(k)).collect();
        let gram = Mat::from_fn(idx.len(), idx.len(), |a, b| {
            let mut acc = c(0.0, 0.0);
            for r in 0..q.nrows() {
                for s in 0..q.ncols() {
                    acc += vs[a][r].conj() * q[(r, s)] * vs[b][s];
                }
            }
            acc
        });
        let g = hermitian_eigensolve(&op(gram).symmetrized()).unwrap();
        let top = idx.len() - 1;
        assert!(g.values[top] >= 0.99, "mass {}", g.values[top]);
        let energy: f64 = (0..idx.len()).map(|a| g.vectors[(a, top)].norm_sqr() * e.values[idx[a]]).sum();
        let spread = idx.iter().map(|&k| e.values[k]).fold(0.0f64, |acc, v| acc.max((v - energy).abs()));
        assert!((lam - energy).abs() <= spread, "{lam} vs {energy}");
        if level == 0 {
            assert!((lam - energy).abs() < 1e-5, "{lam} vs {energy}");
        }
    }
}

fn arb_trig_symbol() -> impl Strategy<Value = PhaseSpaceSymbol> {
    prop::collection::vec((-2i32..=2, -2i32..=2, -1.0f64..1.0, -1.0f64..1.0, 0usize..2, 0usize..2), 1..8).prop_map(|terms| {
        let mut s = PhaseSpaceSymbol::zeros(2);
        for (m, n, re, im, r, col) in terms {
            let t = Scalar::phase(m, n).scale(c(re, im));
            s.set(r, col, s.get(r, col).add(&t));
        }
        s.add(&s.adjoint()).unwrap()
    })
}

proptest! {
    #[test]
    fn self_adjoint_symbols_quantize_hermitian(s in arb_trig_symbol(), l in 5usize..25, theta in 0.0f64..6.3) {
        let h = ModelParams::harper_h(l as f64);
        let w = circle_quantize(&s, h, Closure::Window(12)).unwrap();
        prop_assert!(w.hermiticity_defect() < 1e-12);
        let p = circle_quantize(&s, h, Closure::Periodic { modes: l, theta }).unwrap();
        prop_assert!(p.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn tight_binding_hermitian(q in 1i64..12, kx in 0.0f64..6.3, w0 in 0.0f64..1.5, w1 in 0.0f64..1.5, kp in 0.0f64..1.0) {
        let p = ModelParams { w0, w1, k_perp: kp, ..Default::default() };
        let m = tight_binding_bloch(1, q, kx, &p).unwrap();
        prop_assert!(m.hermiticity_defect() < 1e-12);
    }
}

fn nearest_zero(ev: &[f64], count: usize) -> Vec<f64> {
    let mut v = ev.to_vec();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.truncate(count);
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn lowenergy_default_window_is_converged() {
    let p = ModelParams::chiral(1.0);
    for h in [1.0 / 20.0, 1.0 / 60.0] {
        let n = lowenergy_window(h);
        let a = nearest_zero(&lowenergy_bloch(0.0, h, n, &p).unwrap().eigenvalues().unwrap(), 8);
        let b = nearest_zero(&lowenergy_bloch(0.0, h, n + n / 2, &p).unwrap().eigenvalues().unwrap(), 8);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-6, "h={h}: {x} vs {y}");
        }
    }
}

#[test]
fn chiral_lowenergy_levels_do_not_depend_on_kx() {
    let h = 1.0 / 60.0;
    let p = ModelParams::chiral(1.0);
    let n = lowenergy_window(h);
    let a = nearest_zero(&lowenergy_bloch(0.0, h, n, &p).unwrap().eigenvalues().unwrap(), 4);
    let b = nearest_zero(&lowenergy_bloch(0.7 * 2.0 * PI * h, h, n, &p).unwrap().eigenvalues().unwrap(), 4);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}
