//! Acceptance suite: one measured pass/fail report per criterion, shared by the CLI and the test target.

use crate::bohr_sommerfeld::{
    antichiral_levels, antichiral_levels_harmonic, antichiral_series, cell_saddle, f_series, f_table, level_table, tau_grid, LevelRow, Matching,
    OrbitTolerance, ScalarSymbolSeries,
};
use crate::error::Result;
use crate::hermite::weyl_monomial;
use crate::models::{
    antichiral_minima, block11, chiral_harper_squared, chiral_lowenergy_squared, classify, commensurable_h, commensurable_unfold, find_wells, harper_symbol,
    ModelParams, WellSearch,
};
use crate::spectra::{
    band_sweep, circle_quantize, lowenergy_window, directed_hausdorff, flatness, lowenergy_bloch, massive_operator, tight_binding_bloch, uniform_grid, Closure, Cutoff, Layout,
    OperatorMatrix, XCutoff,
};
use crate::symbol::{check_parity, Monomial, Order, PhaseSpaceSymbol, Scalar};
use crate::wkb::{
    chiral_well, default_h_grid, eigenvalue_ordering, exact_well_levels, galerkin_levels, loglog_slope, periodize, periodize_grid, residual_order,
    wkb_recurrence, WellModel,
};
use faer::Mat;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;
use std::time::Instant;

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "Moyal exactness of the ig/Υ brackets"),
    (2, "normal-form coefficients at chiral wells"),
    (3, "low-energy chiral eigenvalue law"),
    (4, "Harper chiral eigenvalue law"),
    (5, "almost-flat chiral bands"),
    (6, "WKB residual order"),
    (7, "spectral stability rate"),
    (8, "periodized quasimode"),
    (9, "anti-chiral ladders and Bohr-Sommerfeld"),
    (10, "structural invariants"),
];

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    /// One line of measured values against their thresholds.
    pub summary: String,
    /// Supplementary measurements that do not decide the verdict.
    pub notes: Vec<String>,
    pub measured: serde_json::Value,
    /// Wall time; left out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl Report {
    pub fn line(&self) -> String {
        format!("[{}] criterion {:>2} {}: {} ({:.1}s)", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title, self.summary, self.seconds)
    }
}

struct Outcome {
    passed: bool,
    summary: String,
    notes: Vec<String>,
    measured: serde_json::Value,
}

/// Run one criterion; numerical errors become a failing report.
pub fn run_criterion(id: u32) -> Report {
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown criterion", |c| c.1).to_string();
    let t = Instant::now();
    let out = match id {
        1 => moyal_exactness(),
        2 => normal_forms(),
        3 => lowenergy_law(),
        4 => harper_law(),
        5 => flat_bands(),
        6 => wkb_residuals(),
        7 => stability(),
        8 => periodization(),
        9 => antichiral(),
        10 => structural(),
        _ => Ok(Outcome { passed: false, summary: format!("no criterion {id}"), notes: vec![], measured: json!(null) }),
    };
    let out = out.unwrap_or_else(|e| Outcome { passed: false, summary: format!("error: {e}"), notes: vec![], measured: json!({ "error": e.to_string() }) });
    Report { id, title, passed: out.passed, summary: out.summary, notes: out.notes, measured: out.measured, seconds: t.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<Report> {
    CRITERIA.iter().map(|c| run_criterion(c.0)).collect()
}

/// `(C, p)` of the least-squares fit `err ≈ C hᵖ` in log-log space.
pub fn power_fit(hs: &[f64], errs: &[f64]) -> (f64, f64) {
    let p = loglog_slope(hs, errs);
    let n = hs.len() as f64;
    let logc = hs.iter().zip(errs).map(|(h, e)| e.ln() - p * h.ln()).sum::<f64>() / n;
    (logc.exp(), p)
}

fn rel_err(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale
}

fn moyal_exactness() -> Result<Outcome> {
    let w1 = 1.0;
    let mut rng = StdRng::seed_from_u64(20240601);
    let pts: Vec<(f64, f64)> = (0..100).map(|_| (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))).collect();
    let g = Scalar::sin(1, 0).scale_re(w1 * 3f64.sqrt());
    let ig = g.scale(Complex64::new(0.0, 1.0));
    let ups = Scalar::cos(0, 1).scale_re(2.0).add(&Scalar::real(1.0));
    let f = Scalar::real(w1).sub(&Scalar::cos(1, 0).scale_re(w1));
    let orders = [("exact", Order::Exact), ("h^9", Order::Truncate(18))];
    let mut worst = [0.0f64; 2];
    for (k, (_, order)) in orders.iter().enumerate() {
        let comm = ig.commutator(&ups, *order);
        let anti = ups.anticommutator(&f, *order).sub(&ups.mul(&f).scale_re(2.0));
        for h in [1.0 / 60.0, 1.0 / 120.0] {
            let s = (2.0 * PI * PI * h).sin();
            let cm = (2.0 * PI * PI * h).cos() - 1.0;
            for &(x, xi) in &pts {
                let (cx, sxi, cxi) = ((2.0 * PI * x).cos(), (2.0 * PI * xi).sin(), (2.0 * PI * xi).cos());
                let want = Complex64::new(4.0 * 3f64.sqrt() * w1 * cx * sxi * s, 0.0);
                worst[0] = worst[0].max(rel_err(comm.eval(x, xi, h), want, 4.0 * 3f64.sqrt() * w1 * s.abs()));
                let want = Complex64::new(-4.0 * w1 * cx * cxi * cm, 0.0);
                worst[1] = worst[1].max(rel_err(anti.eval(x, xi, h), want, 4.0 * w1 * cm.abs()));
            }
        }
        let _ = k;
    }
    let passed = worst.iter().all(|&e| e <= 1e-10);
    Ok(Outcome {
        passed,
        summary: format!("max rel err commutator {:.2e}, anticommutator {:.2e} (tol 1e-10, 100 points, h=1/60,1/120)", worst[0], worst[1]),
        notes: vec![],
        measured: json!({ "commutator": worst[0], "anticommutator": worst[1] }),
    })
}

fn normal_forms() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for w1 in [0.4, 1.0, 2.0] {
        let s = block11(&chiral_lowenergy_squared(&ModelParams::chiral(w1))?);
        let r = classify(&s, "lowenergy", 0.0, 0.0, 2)?;
        let om = 2.0 * PI * 3f64.sqrt() * w1;
        let e = ((r.well.omega - om).abs()).max((r.well.mu1 + om).abs()).max((r.well.mu2 - om).abs()) / om;
        worst = worst.max(e);
        rows.push(json!({ "model": "lowenergy", "w1": w1, "omega": r.well.omega, "mu1": r.well.mu1, "mu2": r.well.mu2 }));
        for kp in [0.0, 0.5] {
            let p = ModelParams { k_perp: kp, ..ModelParams::chiral(w1) };
            let s = block11(&chiral_harper_squared(&p)?);
            let wells = find_wells(&s, "harper", &WellSearch::default())?;
            let xi0 = if kp == 0.0 { 1.0 / 3.0 } else { 1.0 / 6.0 };
            if wells.len() != 2 {
                worst = f64::INFINITY;
            }
            for w in &wells {
                let sign_xi = w.well.xi0.signum();
                // μ₁ = ±(−1)^{2k⊥} w₁ with + at the upper well
                let sign = sign_xi * if kp == 0.0 { 1.0 } else { -1.0 };
                let e = [
                    w.well.x0.abs(),
                    (w.well.xi0.abs() - xi0).abs(),
                    (w.normalization - 12.0 * PI * PI).abs() / (12.0 * PI * PI),
                    (w.well.omega - w1).abs() / w1,
                    (w.well.mu1 - sign * w1).abs() / w1,
                    (w.well.mu2 + sign * w1).abs() / w1,
                ]
                .into_iter()
                .fold(0.0, f64::max);
                worst = worst.max(e);
                rows.push(json!({ "model": "harper", "w1": w1, "k_perp": kp, "xi0": w.well.xi0, "omega": w.well.omega, "mu1": w.well.mu1, "mu2": w.well.mu2 }));
            }
        }
    }
    Ok(Outcome {
        passed: worst <= 1e-9,
        summary: format!("max rel deviation {worst:.2e} over w1 in {{0.4,1,2}}, k_perp in {{0,1/2}} (tol 1e-9)"),
        notes: vec![],
        measured: json!({ "max_deviation": worst, "wells": rows }),
    })
}

/// First `count` distinct values of a sorted list, merging values closer than `tol`.
fn distinct(v: &[f64], tol: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &x in v {
        if out.last().is_none_or(|&l| (x - l).abs() > tol) {
            out.push(x);
        }
        if out.len() == count {
            break;
        }
    }
    out
}

/// Eigenvalues of `M + m(I − sym Q_χ)`.
fn massive_levels(m: &OperatorMatrix, layout: &Layout, x0: f64, xi0: f64, cut: &Cutoff, mass: f64) -> Result<Vec<f64>> {
    let n = m.size();
    let scaled = OperatorMatrix::new(Mat::from_fn(n, n, |i, j| m.matrix[(i, j)] / mass), m.provenance.clone());
    Ok(massive_operator(&scaled, layout, x0, xi0, cut)?.eigenvalues()?.into_iter().map(|v| v * mass).collect())
}

/// `max_n |√λ − √(2n c h)|` with λ the one (n = 0) or two (n ≥ 1) nearest well levels.
fn sqrt_law_error(levels: &[f64], c: f64, h: f64, nmax: usize) -> (f64, Vec<f64>) {
    let mut per_n = Vec::new();
    for n in 0..=nmax {
        let target = 2.0 * n as f64 * c * h;
        let mut by_dist: Vec<f64> = levels.to_vec();
        by_dist.sort_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
        let take = if n == 0 { 1 } else { 2 };
        let e = by_dist[..take].iter().map(|l| (l.max(0.0).sqrt() - target.sqrt()).abs()).fold(0.0, f64::max);
        per_n.push(e);
    }
    (per_n.iter().cloned().fold(0.0, f64::max), per_n)
}

fn lowenergy_law() -> Result<Outcome> {
    let p = ModelParams::chiral(1.0);
    let om = 2.0 * PI * 3f64.sqrt();
    let hs = [1.0 / 60.0, 1.0 / 120.0, 1.0 / 240.0];
    let mut literal = Vec::new();
    let mut isolated = Vec::new();
    let mut rows = Vec::new();
    for &h in &hs {
        let n = lowenergy_window(h);
        let ev = lowenergy_bloch(0.0, h, n, &p)?.eigenvalues()?;
        let nonneg: Vec<f64> = ev.iter().cloned().filter(|&v| v >= -1e-9).collect();
        let smallest = distinct(&nonneg, 1e-8, 6);
        let err = smallest.iter().enumerate().map(|(k, v)| (v - (2.0 * k as f64 * om * h).sqrt()).abs()).fold(0.0, f64::max);
        literal.push(err);

        // the well alone: x-cutoff only, since the other zero-set components sit at x = ±⅓
        let sym = block11(&chiral_lowenergy_squared(&ModelParams { h, ..p })?);
        let closure = Closure::Window(n);
        let m = circle_quantize(&sym, h, closure)?;
        let cut = Cutoff { x: XCutoff::FlatTop { order: 200, half_width: 0.22, edge: 0.02 }, rho: f64::INFINITY, xi_period: None };
        let levels = massive_levels(&m, &Layout { h, closure, components: 2 }, 0.0, 0.0, &cut, 1.0_f64.max(24.0 * om * h))?;
        let (e, per_n) = sqrt_law_error(&levels, om, h, 5);
        isolated.push(e);
        rows.push(json!({ "h": h, "smallest_nonnegative": smallest, "literal_error": err, "well_isolated_error": e, "well_isolated_per_n": per_n }));
    }
    let (c_lit, p_lit) = power_fit(&hs, &literal);
    let (c_iso, p_iso) = power_fit(&hs, &isolated);
    Ok(Outcome {
        passed: p_lit >= 0.9,
        summary: format!(
            "6 smallest nonnegative eigenvalues vs sqrt(2n w h): errors {:.3e}/{:.3e}/{:.3e}, C={c_lit:.3}, exponent {p_lit:.3} (need >= 0.9)",
            literal[0], literal[1], literal[2]
        ),
        notes: vec![format!(
            "well-isolated (massive operator, x-cutoff): errors {:.3e}/{:.3e}/{:.3e}, C={c_iso:.3}, exponent {p_iso:.3}; the unisolated spectrum near 0 is dense (zero-set curves of det D)",
            isolated[0], isolated[1], isolated[2]
        )],
        measured: json!({ "literal": { "C": c_lit, "exponent": p_lit }, "well_isolated": { "C": c_iso, "exponent": p_iso }, "rows": rows }),
    })
}

fn harper_law() -> Result<Outcome> {
    let p = ModelParams::chiral(1.0);
    let c = 12.0 * PI * PI;
    let ls = [60usize, 120, 240];
    let hs: Vec<f64> = ls.iter().map(|&l| ModelParams::harper_h(l as f64)).collect();
    let mut literal = Vec::new();
    let mut isolated = Vec::new();
    let mut rows = Vec::new();
    let mut split_240 = Vec::new();
    for (&l, &h) in ls.iter().zip(&hs) {
        let closure = Closure::Periodic { modes: l, theta: 0.0 };
        let ev = circle_quantize(&harper_symbol(&p), h, closure)?.eigenvalues()?;
        let nonneg: Vec<f64> = ev.iter().cloned().filter(|&v| v >= -1e-9).collect();
        let smallest = distinct(&nonneg, 1e-6, 6);
        let err = smallest.iter().enumerate().map(|(k, v)| (v - (2.0 * k as f64 * c * h).sqrt()).abs()).fold(0.0, f64::max);
        literal.push(err);

        let sym = block11(&chiral_harper_squared(&p)?);
        let m = circle_quantize(&sym, h, closure)?;
        let cut = Cutoff { x: XCutoff::FlatTop { order: 200, half_width: 0.22, edge: 0.02 }, rho: 1.0 / 3.0, xi_period: Some(1.0) };
        let levels = massive_levels(&m, &Layout { h, closure, components: 2 }, 0.0, 1.0 / 3.0, &cut, 1.0_f64.max(24.0 * c * h))?;
        let (e, per_n) = sqrt_law_error(&levels, c, h, 5);
        isolated.push(e);

        // the wells at ±⅓ each contribute one copy: pair every one-well level with the two nearest eigenvalues of 𝓗²
        let full_sq = circle_quantize(&sym, h, closure)?.eigenvalues()?;
        let mut splits = Vec::new();
        for &lev in levels.iter().filter(|&&v| v < 10.0 * c * h + 1.0 * c * h).take(11) {
            let mut near: Vec<f64> = full_sq.clone();
            near.sort_by(|a, b| (a - lev).abs().total_cmp(&(b - lev).abs()));
            splits.push((near[0] - near[1]).abs());
        }
        if l == 240 {
            split_240 = splits.clone();
        }
        rows.push(json!({ "L": l, "h": h, "smallest_nonnegative": smallest, "literal_error": err, "well_isolated_error": e, "well_isolated_per_n": per_n, "pair_splits": splits }));
    }
    let (c_lit, p_lit) = power_fit(&hs, &literal);
    let (c_iso, p_iso) = power_fit(&hs, &isolated);
    let max_split = split_240.iter().cloned().fold(0.0, f64::max);
    let ground_split = split_240.first().cloned().unwrap_or(f64::NAN);
    Ok(Outcome {
        passed: p_lit >= 0.9 && max_split <= 1e-6,
        summary: format!(
            "6 smallest nonnegative eigenvalues vs sqrt(24 pi^2 n w1 h): errors {:.3e}/{:.3e}/{:.3e}, C={c_lit:.3}, exponent {p_lit:.3} (need >= 0.9); max pair split at L=240 {max_split:.2e} (need <= 1e-6)",
            literal[0], literal[1], literal[2]
        ),
        notes: vec![
            format!(
                "well-isolated (massive operator at (0,1/3)): errors {:.3e}/{:.3e}/{:.3e}, C={c_iso:.3}, exponent {p_iso:.3}",
                isolated[0], isolated[1], isolated[2]
            ),
            format!("ground-pair split at L=240: {ground_split:.2e}"),
            format!("pair splits at L=240 by well level: {}", split_240.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>().join(" ")),
        ],
        measured: json!({ "literal": { "C": c_lit, "exponent": p_lit }, "well_isolated": { "C": c_iso, "exponent": p_iso }, "pair_splits_L240": split_240, "rows": rows }),
    })
}

fn pair_flatness(bs: &crate::spectra::BandStructure, h: f64) -> f64 {
    bs.bands_above_zero(2).iter().map(|&b| flatness(bs, b, h).relative).fold(0.0, f64::max)
}

fn lowenergy_flatness(p: ModelParams, h: f64) -> Result<f64> {
    let n = lowenergy_window(h);
    let ks = uniform_grid(0.0, 2.0 * PI * h, 24);
    let bs = band_sweep(|k| lowenergy_bloch(k, h, n, &p), &ks, serde_json::Value::Null)?;
    Ok(pair_flatness(&bs, h))
}

fn discrete_flatness(p: ModelParams, l: i64) -> Result<f64> {
    let ks = uniform_grid(0.0, 2.0 * PI, 48);
    let bs = band_sweep(|k| tight_binding_bloch(1, l, k, &p), &ks, serde_json::Value::Null)?;
    Ok(pair_flatness(&bs, ModelParams::harper_h(l as f64)))
}

fn flat_bands() -> Result<Outcome> {
    let (chiral, anti) = (ModelParams::chiral(1.0), ModelParams::antichiral(1.0));
    let le = (lowenergy_flatness(chiral, 1.0 / 60.0)?, lowenergy_flatness(anti, 1.0 / 60.0)?);
    let tb = (discrete_flatness(chiral, 30)?, discrete_flatness(anti, 30)?);
    let le_seq: Vec<f64> = [20.0, 40.0, 80.0].iter().map(|&l| lowenergy_flatness(chiral, 1.0 / l)).collect::<Result<_>>()?;
    let tb_seq: Vec<f64> = [20, 40, 80].iter().map(|&l| discrete_flatness(chiral, l)).collect::<Result<_>>()?;
    let mono = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let passed = le.0 <= le.1 / 10.0 && tb.0 <= tb.1 / 10.0 && mono(&le_seq) && mono(&tb_seq);
    Ok(Outcome {
        passed,
        summary: format!(
            "chiral/anti-chiral relative flatness: low-energy {:.3e}/{:.3e}, discrete {:.3e}/{:.3e} (need ratio <= 1/10); chiral over h=1/20,1/40,1/80: {:.2e} > {:.2e} > {:.2e}, discrete L=20,40,80: {:.2e} > {:.2e} > {:.2e}",
            le.0, le.1, tb.0, tb.1, le_seq[0], le_seq[1], le_seq[2], tb_seq[0], tb_seq[1], tb_seq[2]
        ),
        notes: vec!["flatness of the pair = max of the two bands' (max-min)/max(|lambda|, h); w1 = 1 (chiral), w0 = 1 (anti-chiral)".into()],
        measured: json!({ "lowenergy": [le.0, le.1], "discrete": [tb.0, tb.1], "lowenergy_sequence": le_seq, "discrete_sequence": tb_seq }),
    })
}

fn wkb_residuals() -> Result<Outcome> {
    let hs = default_h_grid();
    let mut slopes = Vec::new();
    let mut odd_zero = true;
    for ell in 0..=2usize {
        let w = chiral_well(WellModel::Harper, 1.0, 0.0, 2 * ell as u32 + 2)?;
        let nf = &w.normal_form;
        let branch = if nf.mu1 < 0.0 { 1 } else { 2 };
        let e = wkb_recurrence(nf, 0, branch, ell)?;
        odd_zero &= e.lambdas.iter().skip(1).step_by(2).all(|&l| l == 0.0);
        slopes.push(residual_order(&e, nf, &hs)?.slope.unwrap_or(f64::INFINITY));
    }
    let passed = odd_zero && slopes.iter().enumerate().all(|(l, s)| *s >= l as f64 + 1.45);
    Ok(Outcome {
        passed,
        summary: format!(
            "residual slopes l=0,1,2: {:.3}/{:.3}/{:.3} (need >= l+1.45); odd lambda exactly zero: {odd_zero}",
            slopes[0], slopes[1], slopes[2]
        ),
        notes: vec![],
        measured: json!({ "slopes": slopes, "odd_lambdas_zero": odd_zero }),
    })
}

fn stability() -> Result<Outcome> {
    let hs = default_h_grid();
    let mut report = Vec::new();
    let mut worst = f64::INFINITY;
    for model in [WellModel::LowEnergy, WellModel::Harper] {
        let w = chiral_well(model, 1.0, 0.0, 4)?;
        let nf = &w.normal_form;
        let es: Vec<f64> = eigenvalue_ordering(nf.omega, nf.mu1, nf.mu2, 6).iter().map(|l| l.e).collect();
        let errs: Vec<Vec<f64>> = hs
            .iter()
            .map(|&h| {
                let lv = match model {
                    WellModel::LowEnergy => galerkin_levels(nf, h, 6, 40)?,
                    WellModel::Harper => exact_well_levels(&w.symbol, w.x0, w.xi0, nf, h, 6, 40)?,
                };
                Ok(lv.iter().zip(&es).map(|(a, b)| (a - b).abs()).collect())
            })
            .collect::<Result<_>>()?;
        let rates: Vec<f64> = (0..6)
            .map(|n| {
                let e: Vec<f64> = errs.iter().map(|r| r[n].max(1e-300)).collect();
                if e.iter().all(|&v| v < 1e-12) {
                    f64::INFINITY
                } else {
                    loglog_slope(&hs, &e)
                }
            })
            .collect();
        let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        worst = worst.min(min);
        report.push((model, rates));
    }
    let fmt = |r: &[f64]| r.iter().map(|v| if v.is_finite() { format!("{v:.2}") } else { "exact".into() }).collect::<Vec<_>>().join("/");
    Ok(Outcome {
        passed: worst >= 0.45,
        summary: format!(
            "rate exponents of |lambda_n/h - e_n| on h=2^-6..2^-12, n=1..6: low-energy {}, Harper {} (need >= 0.45)",
            fmt(&report[0].1),
            fmt(&report[1].1)
        ),
        notes: vec![],
        measured: json!({ "lowenergy": report[0].1.iter().map(|v| if v.is_finite() { json!(v) } else { json!(null) }).collect::<Vec<_>>(),
                          "harper": report[1].1.iter().map(|v| if v.is_finite() { json!(v) } else { json!(null) }).collect::<Vec<_>>() }),
    })
}

fn periodization() -> Result<Outcome> {
    let w = chiral_well(WellModel::LowEnergy, 1.0, 0.0, 4)?;
    let e = wkb_recurrence(&w.normal_form, 0, 1, 1)?;
    let hs: Vec<f64> = [100.0, 200.0, 400.0, 800.0, 1600.0].iter().map(|l| 1.0 / l).collect();
    let dev: Vec<f64> = hs.iter().map(|&h| (periodize(&e, 0.0, h, periodize_grid(h)).norm - 1.0).abs()).collect();
    let (c, p) = power_fit(&hs, &dev);
    let h = 1.0 / 400.0;
    let outside = periodize(&e, 0.0, h, periodize_grid(h)).mass_outside(0.0, h.powf(0.4));
    Ok(Outcome {
        passed: p >= 0.45 && outside <= 1e-6,
        summary: format!("| ||u|| - 1 | ~ {c:.3} h^{p:.3} (need exponent >= 0.45); mass outside h^0.4 window at h=1/400: {outside:.2e} (need <= 1e-6)"),
        notes: vec!["low-energy chiral well, simple level e=0, l=1".into()],
        measured: json!({ "h": hs, "norm_deviation": dev, "C": c, "exponent": p, "mass_outside": outside }),
    })
}

fn ladder_exponents(rows: &[LevelRow]) -> (f64, f64) {
    // rows come grouped by L then (j, k)
    let per_l = rows.len() / 3;
    let hs: Vec<f64> = (0..3).map(|i| ModelParams::harper_h(rows[i * per_l].l as f64)).collect();
    let mut min_p = f64::INFINITY;
    let mut max_c: f64 = 0.0;
    for r in 0..per_l {
        let gaps: Vec<f64> = (0..3).map(|i| rows[i * per_l + r].gap.max(1e-300)).collect();
        let (c, p) = power_fit(&hs, &gaps);
        min_p = min_p.min(p);
        max_c = max_c.max(c);
    }
    (max_c, min_p)
}

fn antichiral() -> Result<Outcome> {
    let ls = [40usize, 80, 160];
    let mut literal = Vec::new();
    let mut full = Vec::new();
    let mut harmonic = Vec::new();
    let mut bs_rows = Vec::new();
    for w0 in [0.7, 1.0] {
        let rows = level_table(w0, 0.0, &ls, 3, Matching::Component, |h, j, k| antichiral_levels(w0, h, j, k))?;
        literal.push((w0, ladder_exponents(&rows)));
        let rows = level_table(w0, 0.0, &ls, 3, Matching::Full, |h, j, k| antichiral_levels(w0, h, j, k))?;
        full.push((w0, ladder_exponents(&rows)));
        let rows = level_table(w0, 0.0, &ls, 3, Matching::Component, |h, j, k| antichiral_levels_harmonic(w0, h, j, k))?;
        harmonic.push((w0, ladder_exponents(&rows)));
    }
    // Bohr–Sommerfeld inverted levels, j = 1 at w0 = 0.7
    let s = antichiral_series(0.7, 1, 0.0)?;
    let tol = OrbitTolerance::default();
    let table = f_table(&s, &tau_grid(cell_saddle(&s), 200), &tol)?;
    let c1 = antichiral_minima(0.7)[0];
    for &l in &ls {
        let h = ModelParams::harper_h(l as f64);
        let spec = crate::bohr_sommerfeld::antichiral_component_spectrum(0.7, 0.0, 1, l)?;
        let gap = (1..=4)
            .map(|k| table.invert(k, h).map(|t| crate::bohr_sommerfeld::nearest_gap(&spec, c1 + t)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        bs_rows.push(gap);
    }
    let cj = antichiral_minima(0.7);
    let cj_ok = cj.iter().zip([-5.1, -3.7, -3.1, -1.7]).all(|(a, b)| (a - b).abs() < 1e-12);
    let lam = 1.7;
    let harm = ScalarSymbolSeries {
        p0: Scalar::term(Complex64::new(lam / 2.0, 0.0), Monomial::new(2, 0, 0, 0)).add(&Scalar::term(Complex64::new(lam / 2.0, 0.0), Monomial::new(0, 2, 0, 0))),
        p1: Scalar::zero(),
        p2: Scalar::zero(),
        x0: 0.0,
        xi0: 0.0,
    };
    let mut harm_err: f64 = 0.0;
    for tau in [0.01, 0.5, 2.0] {
        let f = f_series(&harm, tau, &tol)?;
        harm_err = harm_err.max((f.f0 - tau / lam).abs()).max((f.f1 - 0.5).abs()).max(f.f2.abs());
    }
    let lit_ok = literal.iter().all(|(_, (_, p))| *p >= 1.8);
    let passed = lit_ok && cj_ok && harm_err <= 1e-8;
    let lit_str = literal.iter().map(|(w, (c, p))| format!("w0={w}: exponent {p:.2}, C={c:.3}")).collect::<Vec<_>>().join("; ");
    let full_str = full.iter().map(|(w, (c, p))| format!("w0={w}: exponent {p:.2}, C={c:.3}")).collect::<Vec<_>>().join("; ");
    let harm_str = harmonic.iter().map(|(w, (c, p))| format!("w0={w}: exponent {p:.2}, C={c:.3}")).collect::<Vec<_>>().join("; ");
    Ok(Outcome {
        passed,
        summary: format!("ladders c_j+8pi^2 w0(k+1/2)h, k<=3, L=40,80,160, per-component matching: {lit_str} (need >= 1.8); c_j exact: {cj_ok}; harmonic F0,F1,F2 max err {harm_err:.1e} (tol 1e-8)"),
        notes: vec![
            format!("same ladders matched against the nearest eigenvalue of the full 4x4 spectrum: {full_str}"),
            format!("harmonic-frequency ladders c_j+8pi^2 sqrt(w0)(k+1/2)h, per-component matching: {harm_str}"),
            format!("Bohr-Sommerfeld inverted levels (j=1, w0=0.7, k<=3) max gap L=40,80,160: {:.2e}/{:.2e}/{:.2e}", bs_rows[0], bs_rows[1], bs_rows[2]),
        ],
        measured: json!({
            "literal": literal.iter().map(|(w, (c, p))| json!({ "w0": w, "C": c, "exponent": p })).collect::<Vec<_>>(),
            "harmonic": harmonic.iter().map(|(w, (c, p))| json!({ "w0": w, "C": c, "exponent": p })).collect::<Vec<_>>(),
            "bohr_sommerfeld_gaps": bs_rows,
            "c_j": cj,
            "harmonic_f_error": harm_err,
        }),
    })
}

fn structural() -> Result<Outcome> {
    let mut herm: f64 = 0.0;
    let mut track = |m: &OperatorMatrix| herm = herm.max(m.hermiticity_defect());

    // ± symmetry of both chiral realizations
    let le = lowenergy_bloch(0.05, 1.0 / 60.0, 40, &ModelParams::chiral(1.0))?;
    track(&le);
    let hp = ModelParams { k_perp: 0.0, ..ModelParams::chiral(1.0) };
    let harper = circle_quantize(&harper_symbol(&hp), ModelParams::harper_h(30.0), Closure::Periodic { modes: 30, theta: 0.3 })?;
    track(&harper);
    let mut sym: f64 = 0.0;
    for m in [&le, &harper] {
        let ev = m.eigenvalues()?;
        let n = ev.len();
        for i in 0..n {
            sym = sym.max((ev[i] + ev[n - 1 - i]).abs());
        }
    }

    // Weyl action on Hermite coefficients: wrong-parity slots stay exactly zero
    let wrong = parity_suite(200, 7);
    let mut parity_ok = wrong == 0.0;
    for model in [WellModel::Harper, WellModel::LowEnergy] {
        let w = chiral_well(model, 1.0, 0.0, 6)?;
        parity_ok &= check_parity(&w.normal_form.series, 6, 1e-12).is_ok();
    }

    // Bloch union: circle spectrum inside the tight-binding union at L = 30
    let p = ModelParams::chiral(1.0);
    let h = ModelParams::harper_h(30.0);
    let circle = circle_quantize(&harper_symbol(&p), h, Closure::Periodic { modes: 30, theta: 0.0 })?;
    track(&circle);
    let mut tb = Vec::new();
    for k in uniform_grid(0.0, 2.0 * PI, 64) {
        let m = tight_binding_bloch(1, 30, k, &p)?;
        track(&m);
        tb.extend(m.eigenvalues()?);
    }
    let haus = directed_hausdorff(&circle.eigenvalues()?, &tb);

    // commensurable unfolding at q = 2
    let pc = ModelParams { w0: 0.7, w1: 0.8, k_perp: 0.13, ..Default::default() };
    let hp2 = 1.0 / (40.0 * PI);
    let a = circle_quantize(&harper_symbol(&pc), commensurable_h(1, 2, hp2), Closure::Periodic { modes: 20, theta: 0.0 })?;
    let u = circle_quantize(&commensurable_unfold(1, 2, &pc)?, hp2, Closure::Periodic { modes: 20, theta: 0.0 })?;
    track(&a);
    track(&u);
    let doubled: Vec<f64> = a.eigenvalues()?.iter().flat_map(|&x| [x, x]).collect();
    let comm = doubled.iter().zip(u.eigenvalues()?).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    // massive operator stays Hermitian
    let s11 = block11(&chiral_harper_squared(&p)?);
    let closure = Closure::Periodic { modes: 30, theta: 0.0 };
    let m = circle_quantize(&s11, h, closure)?;
    let cut = Cutoff { x: XCutoff::Fejer { order: 8 }, rho: 1.0 / 6.0, xi_period: Some(1.0) };
    track(&massive_operator(&m, &Layout { h, closure, components: 2 }, 0.0, 1.0 / 3.0, &cut)?);
    track(&m);

    let passed = sym <= 1e-10 && herm <= 1e-12 && parity_ok && haus <= 5e-3 && comm <= 1e-6;
    Ok(Outcome {
        passed,
        summary: format!(
            "chiral +- symmetry {sym:.1e} (tol 1e-10); Hermiticity {herm:.1e} (tol 1e-12); parity suite wrong-slot max {wrong:.1e}, normal forms ok: {parity_ok}; Bloch-union distance {haus:.2e} (tol 5e-3); q=2 unfolding {comm:.1e} (tol 1e-6)"
        ),
        notes: vec![],
        measured: json!({ "chiral_symmetry": sym, "hermiticity": herm, "parity_wrong_slot": wrong, "parity": parity_ok, "bloch_union": haus, "commensurable": comm }),
    })
}

/// Largest wrong-parity coefficient of `(Σ c_ab y^a η^b)^w v` over `pairs` random symbols of fixed degree
/// parity and vectors of fixed parity.
pub fn parity_suite(pairs: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let (pp, vp) = (rng.random_range(0..2u32), rng.random_range(0..2usize));
        let omega = rng.random_range(0.5..3.0);
        let v: Vec<Complex64> =
            (0..12).map(|n| if n % 2 == vp { Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) } else { Complex64::new(0.0, 0.0) }).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); v.len() + 6];
        for _ in 0..4 {
            let deg = 2 * rng.random_range(0..3u32) + pp;
            let a = rng.random_range(0..=deg);
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            for (o, w) in out.iter_mut().zip(weyl_monomial(a, deg - a, &v, omega)) {
                *o += c * w;
            }
        }
        let parity = (pp as usize + vp) % 2;
        worst = out.iter().enumerate().filter(|(n, _)| n % 2 != parity).fold(worst, |m, (_, z)| m.max(z.norm()));
    }
    worst
}

/// Symbol used by criterion 10's parity check, exposed for callers that want the raw series.
pub fn normal_form_series(model: WellModel, order: u32) -> Result<PhaseSpaceSymbol> {
    Ok(chiral_well(model, 1.0, 0.0, order)?.normal_form.series)
}
