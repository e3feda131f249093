//! Matrix-valued WKB expansions at a degenerate well: the explicit recurrence,
//! a fitted expansion for resonant double levels, residual checks and periodization.

use crate::error::{Error, Result};
use crate::hermite::{apply_weyl_hermite, galerkin_matrix, galerkin_trig_matrix, hermite_functions, solve_shifted, GaussianPolynomial, HermiteCoefficients};
use crate::models::{block11, chiral_harper_squared, chiral_lowenergy_squared, classify, ModelParams};
use crate::symbol::{rescale_to_well, NormalForm, PhaseSpaceSymbol};
use faer::prelude::SolveLstsq;
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const DEGREE_CAP: usize = 4096;

/// Whether `μ₁ − μ₂ ∈ (4ℤ+2)ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceClass {
    pub resonant: bool,
    /// `ℓ` with `μ₁ − μ₂ = (4ℓ+2)ω`.
    pub witness: Option<i64>,
}

pub fn classify_resonance(mu1: f64, mu2: f64, omega: f64) -> ResonanceClass {
    let k = ((mu1 - mu2) / omega - 2.0) / 4.0;
    let l = k.round();
    if (4.0 * (k - l)).abs() <= 1e-9 {
        ResonanceClass { resonant: true, witness: Some(l as i64) }
    } else {
        ResonanceClass { resonant: false, witness: None }
    }
}

/// `λ(h) = h Σ h^{i/2} λ_i` and `u(h) = Σ h^{i/2} u_i` in normal-form coordinates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WkbExpansion {
    pub n: usize,
    /// 1 or 2.
    pub branch: usize,
    pub omega: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub lambdas: Vec<f64>,
    pub modes: Vec<HermiteCoefficients>,
}

impl WkbExpansion {
    pub fn order(&self) -> usize {
        self.lambdas.len().saturating_sub(1)
    }

    /// `λ(h)/h`.
    pub fn eigenvalue_over_h(&self, h: f64) -> f64 {
        let s = h.sqrt();
        self.lambdas.iter().rev().fold(0.0, |acc, l| acc * s + l)
    }

    /// `Σ h^{i/2} u_i`.
    pub fn quasimode(&self, h: f64) -> HermiteCoefficients {
        let s = h.sqrt();
        let mut out = HermiteCoefficients::zero(self.omega);
        let mut w = 1.0;
        for u in &self.modes {
            out.axpy(Complex64::new(w, 0.0), u);
            w *= s;
        }
        out
    }

    pub fn mode_polynomial(&self, i: usize) -> GaussianPolynomial {
        self.modes[i].to_polynomial()
    }
}

/// One unperturbed level `e = (2m+1)ω + μ_c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub e: f64,
    pub mode: usize,
    /// 0 or 1.
    pub comp: usize,
}

/// The first `count` eigenvalues of `T₀^w`, ascending, ties broken by component.
pub fn eigenvalue_ordering(omega: f64, mu1: f64, mu2: f64, count: usize) -> Vec<Level> {
    let mut all: Vec<Level> = (0..=count)
        .flat_map(|m| {
            [(0, mu1), (1, mu2)].into_iter().map(move |(comp, mu)| Level { e: (2 * m + 1) as f64 * omega + mu, mode: m, comp })
        })
        .collect();
    all.sort_by(|a, b| {
        if (a.e - b.e).abs() <= 1e-9 * omega {
            a.comp.cmp(&b.comp)
        } else {
            a.e.total_cmp(&b.e)
        }
    });
    all.truncate(count);
    all
}

/// `Σ_{i≤order} h^{i/2} T_i` as a grade-weighted symbol, for Galerkin use at a given `h`.
fn scaled_series(nf: &NormalForm, order: u32) -> PhaseSpaceSymbol {
    nf.series.truncate(order + 2)
}

fn check_branch(branch: usize) -> Result<usize> {
    match branch {
        1 | 2 => Ok(branch - 1),
        _ => Err(Error::InvalidParams(format!("branch must be 1 or 2, got {branch}"))),
    }
}

/// Solve `Σ_{i=0}^{k} (T_i^w − λ_i) u_{k−i} = 0` order by order up to `k = 2ℓ`.
pub fn wkb_recurrence(nf: &NormalForm, n: usize, branch: usize, ell: usize) -> Result<WkbExpansion> {
    let j = check_branch(branch)?;
    let omega = nf.omega;
    let mus = [nf.mu1, nf.mu2];
    let top = 2 * ell;
    let ts: Vec<PhaseSpaceSymbol> = (0..=top as u32).map(|i| nf.t(i)).collect();
    let lambda0 = (2 * n + 1) as f64 * omega + mus[j];
    let u0 = HermiteCoefficients::mode(omega, n, j);
    let mut lambdas = vec![lambda0];
    let mut modes = vec![u0.clone()];
    // images[i][m] = T_i^w u_m
    let mut images: Vec<Vec<HermiteCoefficients>> = vec![Vec::new(); top + 1];
    for k in 1..=top {
        let m = k - 1;
        for (i, t) in ts.iter().enumerate().take(top + 1).skip(1) {
            if i + m <= top && images[i].len() == m {
                images[i].push(apply_weyl_hermite(t, &modes[m], 1.0, DEGREE_CAP)?);
            }
        }
        let mut lam = ZERO;
        for i in 1..=k {
            lam += u0.inner(&images[i][k - i]);
        }
        let scale = (1..=k).map(|i| images[i][k - i].norm()).fold(1.0, f64::max);
        let lk = if k % 2 == 1 {
            if lam.norm() > 1e-9 * scale {
                return Err(Error::Parity { grade: k as u32, detail: format!("odd-order eigenvalue correction {lam:.3e}") });
            }
            0.0
        } else {
            if lam.im.abs() > 1e-9 * scale {
                return Err(Error::Form(format!("non-real eigenvalue correction {lam} at step {k}")));
            }
            lam.re
        };
        lambdas.push(lk);
        let mut rhs = HermiteCoefficients::zero(omega);
        for i in 1..=k {
            rhs.axpy(Complex64::new(-1.0, 0.0), &images[i][k - i]);
            rhs.axpy(Complex64::new(lambdas[i], 0.0), &modes[k - i]);
        }
        let mut next = HermiteCoefficients::zero(omega);
        for c in 0..2 {
            let mut r = rhs.coeffs[c].clone();
            if c == j && n < r.len() {
                r[n] = ZERO;
            }
            next.coeffs[c] = match solve_shifted(omega, mus[c], lambda0, &r) {
                Ok(v) => v,
                Err(Error::OrthogonalityViolation { .. }) => return Err(Error::ResonantObstruction { step: k }),
                Err(e) => return Err(e),
            };
        }
        modes.push(next);
    }
    Ok(WkbExpansion { n, branch, omega, mu1: nf.mu1, mu2: nf.mu2, lambdas, modes })
}

/// Geometric default grid `h = 2^{−6}, …, 2^{−12}`.
pub fn default_h_grid() -> Vec<f64> {
    (6..=12).map(|k| 2f64.powi(-k)).collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

/// Residuals of the assembled quasimode and their log-log slope.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualFit {
    pub h: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `None` when every residual is at rounding level.
    pub slope: Option<f64>,
}

/// `‖(P_h − λ(h)) u(h)‖` with `P_h = h Σ_{i ≤ order} h^{i/2} T_i^w`, grouped by total order.
pub fn residual_order(exp: &WkbExpansion, nf: &NormalForm, h_grid: &[f64]) -> Result<ResidualFit> {
    let kmax = nf.order as usize;
    let ts: Vec<PhaseSpaceSymbol> = (0..=kmax as u32).map(|i| nf.t(i)).collect();
    let mut groups: Vec<HermiteCoefficients> = Vec::new();
    for (m, u) in exp.modes.iter().enumerate() {
        for (i, t) in ts.iter().enumerate() {
            let mut img = apply_weyl_hermite(t, u, 1.0, DEGREE_CAP)?;
            if let Some(l) = exp.lambdas.get(i) {
                img.axpy(Complex64::new(-l, 0.0), u);
            }
            let k = i + m;
            while groups.len() <= k {
                groups.push(HermiteCoefficients::zero(exp.omega));
            }
            groups[k].axpy(Complex64::new(1.0, 0.0), &img);
        }
        // λ_i u_m with i beyond the operator order
        for i in ts.len()..exp.lambdas.len() {
            let k = i + m;
            while groups.len() <= k {
                groups.push(HermiteCoefficients::zero(exp.omega));
            }
            groups[k].axpy(Complex64::new(-exp.lambdas[i], 0.0), u);
        }
    }
    let scale = exp.lambdas.iter().fold(1.0f64, |a, l| a.max(l.abs()));
    let residuals: Vec<f64> = h_grid
        .iter()
        .map(|&h| {
            let s = h.sqrt();
            let mut acc = HermiteCoefficients::zero(exp.omega);
            let mut w = 1.0;
            for g in &groups {
                acc.axpy(Complex64::new(w, 0.0), g);
                w *= s;
            }
            h * acc.norm()
        })
        .collect();
    let floor = 1e-13 * scale;
    let slope = if residuals.iter().zip(h_grid).all(|(r, h)| *r <= floor * h) {
        None
    } else {
        Some(loglog_slope(h_grid, &residuals))
    };
    Ok(ResidualFit { h: h_grid.to_vec(), residuals, slope })
}

/// Least-squares coefficients of `y(h) ≈ Σ_p c_p h^{p/2}` over `powers`; returns `(c, rms residual)`.
pub fn fit_half_powers(hs: &[f64], ys: &[Vec<Complex64>], powers: &[u32]) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let a = Mat::<Complex64>::from_fn(hs.len(), powers.len(), |r, c| Complex64::new(hs[r].powf(powers[c] as f64 / 2.0), 0.0));
    let width = ys.first().map_or(0, |y| y.len());
    let b = Mat::<Complex64>::from_fn(hs.len(), width, |r, c| ys[r][c]);
    let x = a.qr().solve_lstsq(&b);
    let coeffs = (0..powers.len()).map(|p| (0..width).map(|c| x[(p, c)]).collect()).collect();
    let fitted = &a * &x;
    let rms = (0..width)
        .map(|c| ((0..hs.len()).map(|r| (fitted[(r, c)] - b[(r, c)]).norm_sqr()).sum::<f64>() / hs.len() as f64).sqrt())
        .collect();
    (coeffs, rms)
}

fn hermitian_eigen(g: &Mat<Complex64>, scale: f64) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let size = g.nrows();
    let sym = Mat::from_fn(size, size, |i, k| (g[(i, k)] + g[(k, i)].conj()) * (0.5 * scale));
    let evd = sym.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    Ok(((0..size).map(|i| s[i].re).collect(), evd.U().to_owned()))
}

/// Eigenpairs of `h⁻¹ Σ_{i ≤ order} h^{i/2} T_i^w` on Hermite modes `≤ n_max`, basis index `2m + comp`.
pub fn galerkin_eigen(nf: &NormalForm, h: f64, n_max: usize) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let g = galerkin_matrix(&scaled_series(nf, nf.order), nf.omega, n_max, h)?;
    hermitian_eigen(&g, 1.0 / h)
}

fn track_levels(nf: &NormalForm, vals: &[f64], vecs: &Mat<Complex64>, count: usize) -> Vec<f64> {
    let levels = eigenvalue_ordering(nf.omega, nf.mu1, nf.mu2, count);
    let mut out = Vec::with_capacity(count);
    let mut used = vec![false; vals.len()];
    let mut i = 0;
    while i < levels.len() {
        let mut j = i + 1;
        while j < levels.len() && (levels[j].e - levels[i].e).abs() <= 1e-9 * nf.omega {
            j += 1;
        }
        let group = &levels[i..j];
        let weight = |k: usize| group.iter().map(|l| vecs[(2 * l.mode + l.comp, k)].norm_sqr()).sum::<f64>();
        let mut idx: Vec<usize> = (0..vals.len()).filter(|&k| !used[k]).collect();
        idx.sort_by(|&a, &b| weight(b).total_cmp(&weight(a)));
        let mut picked: Vec<f64> = idx
            .iter()
            .take(group.len())
            .map(|&k| {
                used[k] = true;
                vals[k]
            })
            .collect();
        picked.sort_by(f64::total_cmp);
        out.extend(picked);
        i = j;
    }
    out
}

/// Galerkin values of `λ(h)/h` for the truncated series, tracking the first `count`
/// unperturbed levels: each group of equal `e_n` takes the eigenvectors with the most
/// weight on its reference Hermite modes.
pub fn galerkin_levels(nf: &NormalForm, h: f64, count: usize, n_max: usize) -> Result<Vec<f64>> {
    let (vals, vecs) = galerkin_eigen(nf, h, n_max)?;
    Ok(track_levels(nf, &vals, &vecs, count))
}

/// Like `galerkin_levels` but quantizing the untruncated trigonometric symbol `s` (already
/// divided by its normalization) around `(x₀, ξ₀)`.
pub fn exact_well_levels(s: &PhaseSpaceSymbol, x0: f64, xi0: f64, nf: &NormalForm, h: f64, count: usize, n_max: usize) -> Result<Vec<f64>> {
    let g = galerkin_trig_matrix(s, x0, xi0, nf.omega, n_max, h)?;
    let (vals, vecs) = hermitian_eigen(&g, 1.0 / h)?;
    Ok(track_levels(nf, &vals, &vecs, count))
}

fn run_grid<T: Send, F: Fn(f64) -> Result<T> + Sync>(h_grid: &[f64], f: F) -> Result<Vec<T>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = h_grid.iter().map(|&h| { let f = &f; scope.spawn(move || f(h)) }).collect();
        handles.into_iter().map(|t| t.join().expect("grid worker panicked")).collect()
    })
}

/// Fit diagnostics of a resonant expansion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub e: f64,
    pub rms: [f64; 2],
    pub bound: [f64; 2],
}

/// Galerkin modes used by `resonant_expansion`.
pub const RESONANT_MODES: usize = 40;

/// Fitted expansions of the two eigenvalues converging to a double level `e_n = e_{n+1}`
/// (`n` 1-based in the ascending ordering). Branch `b` follows the reference mode on component `b`.
pub fn resonant_expansion(nf: &NormalForm, n: usize, ell: usize, h_grid: &[f64]) -> Result<(WkbExpansion, WkbExpansion, FitReport)> {
    if n == 0 {
        return Err(Error::InvalidParams("levels are numbered from 1".into()));
    }
    if h_grid.len() < 6 {
        return Err(Error::InvalidParams(format!("need at least 6 h values, got {}", h_grid.len())));
    }
    let omega = nf.omega;
    let levels = eigenvalue_ordering(omega, nf.mu1, nf.mu2, n + 1);
    let (la, lb) = (levels[n - 1], levels[n]);
    if (la.e - lb.e).abs() > 1e-9 * omega || la.comp == lb.comp {
        return Err(Error::InvalidParams(format!("level {n} is not a double eigenvalue ({} vs {})", la.e, lb.e)));
    }
    let refs = if la.comp == 0 { [la, lb] } else { [lb, la] };
    let n_max = RESONANT_MODES;
    let keep = n_max / 2 + 1;
    // per h: (eigenvalue, coefficient vector) for each branch
    let samples = run_grid(h_grid, |h| {
        let (vals, vecs) = galerkin_eigen(nf, h, n_max)?;
        let ov = |r: &Level, k: usize| vecs[(2 * r.mode + r.comp, k)];
        // the two eigenvectors with most weight on span{refs}
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&a, &b| {
            let wa = ov(&refs[0], a).norm_sqr() + ov(&refs[1], a).norm_sqr();
            let wb = ov(&refs[0], b).norm_sqr() + ov(&refs[1], b).norm_sqr();
            wb.total_cmp(&wa)
        });
        let (p, q) = (idx[0], idx[1]);
        let (k0, k1) = if ov(&refs[0], p).norm() >= ov(&refs[0], q).norm() { (p, q) } else { (q, p) };
        let out: Vec<(f64, Vec<Complex64>)> = [(0usize, k0), (1, k1)]
            .iter()
            .map(|&(b, k)| {
                let o = ov(&refs[b], k);
                let phase = if o.norm() > 0.0 { o.conj() / o.norm() } else { Complex64::new(1.0, 0.0) };
                (vals[k], (0..2 * keep).map(|i| vecs[(i, k)] * phase).collect())
            })
            .collect();
        Ok(out)
    })?;
    let e = la.e;
    // one power beyond 2ℓ absorbs the leading truncation error
    let powers: Vec<u32> = (1..=(2 * ell as u32 + 1)).collect();
    let vpowers: Vec<u32> = (0..=(2 * ell as u32 + 1)).collect();
    let hmax = h_grid.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    let mut rms = [0.0; 2];
    let mut bound = [0.0; 2];
    for b in 0..2 {
        let ys: Vec<Vec<Complex64>> = samples.iter().map(|s| vec![Complex64::new(s[b].0 - e, 0.0)]).collect();
        let (c, r) = fit_half_powers(h_grid, &ys, &powers);
        let last = c.last().map_or(0.0, |v| v[0].norm());
        rms[b] = r[0];
        bound[b] = 10.0 * (last * hmax.powf((powers.len() + 1) as f64 / 2.0) + 1e-10 * (1.0 + e.abs()));
        if r[0] > bound[b] {
            return Err(Error::FitDiagnostics { residual: r[0], bound: bound[b] });
        }
        let mut lambdas = vec![e];
        lambdas.extend(c.iter().take(2 * ell).map(|v| v[0].re));
        let vs: Vec<Vec<Complex64>> = samples.iter().map(|s| s[b].1.clone()).collect();
        let (vc, _) = fit_half_powers(h_grid, &vs, &vpowers);
        let norm0 = vc[0].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let modes = vc
            .iter()
            .take(2 * ell + 1)
            .map(|v| {
                let mut hc = HermiteCoefficients::zero(omega);
                for c in 0..2 {
                    hc.coeffs[c] = (0..keep).map(|m| v[2 * m + c] / norm0).collect();
                }
                hc
            })
            .collect();
        out.push(WkbExpansion { n: refs[b].mode, branch: b + 1, omega, mu1: nf.mu1, mu2: nf.mu2, lambdas, modes });
    }
    let second = out.pop().expect("two branches");
    let first = out.pop().expect("two branches");
    Ok((first, second, FitReport { e, rms, bound }))
}

/// Quasimode transplanted to the circle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Periodized {
    pub x: Vec<f64>,
    pub values: Vec<[Complex64; 2]>,
    pub norm: f64,
    pub lattice_terms: usize,
}

impl Periodized {
    /// Fraction of `‖u‖²` with `|x − x₀| > radius` (distance on the circle).
    pub fn mass_outside(&self, x0: f64, radius: f64) -> f64 {
        let (mut out, mut total) = (0.0, 0.0);
        for (x, v) in self.x.iter().zip(&self.values) {
            let w = v[0].norm_sqr() + v[1].norm_sqr();
            total += w;
            let d = x - x0;
            if (d - d.round()).abs() > radius {
                out += w;
            }
        }
        out / total
    }
}

/// `u(x) = h^{−1/4} Σ_k e^{iξ₀(x−k)/h} v((x−k)/√h)` on `grid` points of `[−½, ½)`, well at `x = 0`.
pub fn periodize(exp: &WkbExpansion, xi0: f64, h: f64, grid: usize) -> Periodized {
    let v = exp.quasimode(h);
    let nmax = v.len().saturating_sub(1);
    // e^{−ωy²/2} below 1e−16 past y² = 80/ω, with room for the polynomial factor
    let reach = ((80.0 + 4.0 * nmax as f64) / exp.omega).sqrt() * h.sqrt();
    let kmax = reach.ceil() as i64 + 1;
    periodize_with(&v, xi0, h, grid, kmax)
}

/// `periodize` with an explicit lattice cutoff `|k| ≤ kmax`.
pub fn periodize_with(v: &HermiteCoefficients, xi0: f64, h: f64, grid: usize, kmax: i64) -> Periodized {
    let nmax = v.len().saturating_sub(1);
    let pref = h.powf(-0.25);
    let sh = h.sqrt();
    let mut xs = Vec::with_capacity(grid);
    let mut values = Vec::with_capacity(grid);
    for g in 0..grid {
        let x = -0.5 + g as f64 / grid as f64;
        let mut acc = [ZERO; 2];
        for k in -kmax..=kmax {
            let d = x - k as f64;
            let y = d / sh;
            if y * y * v.omega > 745.0 {
                continue;
            }
            let phi = hermite_functions(nmax, v.omega, y);
            let ph = Complex64::from_polar(pref, xi0 * d / h);
            for c in 0..2 {
                let s: Complex64 = v.coeffs[c].iter().zip(&phi).map(|(a, p)| a * p).sum();
                acc[c] += ph * s;
            }
        }
        xs.push(x);
        values.push(acc);
    }
    let norm = (values.iter().map(|v| v[0].norm_sqr() + v[1].norm_sqr()).sum::<f64>() / grid as f64).sqrt();
    Periodized { x: xs, values, norm, lattice_terms: (2 * kmax + 1) as usize }
}

/// Default grid for `periodize`: enough points to resolve the width `√h`.
pub fn periodize_grid(h: f64) -> usize {
    ((64.0 / h.sqrt()).ceil() as usize).max(256)
}

/// Which chiral model a well comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WellModel {
    Harper,
    LowEnergy,
}

/// `(𝓗²)₁₁` divided by its ξ-curvature, and its normal form at a chiral well.
#[derive(Clone, Debug)]
pub struct ChiralWell {
    pub symbol: PhaseSpaceSymbol,
    pub normal_form: NormalForm,
    pub x0: f64,
    pub xi0: f64,
    pub normalization: f64,
}

/// Harper wells sit at `(0, ±⅓)` for `k⊥ = 0` and `(0, ±⅙)` for `k⊥ = ½`; this takes the upper one.
pub fn chiral_well(model: WellModel, w1: f64, k_perp: f64, order: u32) -> Result<ChiralWell> {
    let xi0 = match model {
        WellModel::Harper if k_perp == 0.0 => 1.0 / 3.0,
        WellModel::Harper if (k_perp - 0.5).abs() < 1e-12 => 1.0 / 6.0,
        WellModel::Harper => return Err(Error::InvalidParams(format!("Harper wells need k_perp in {{0, 1/2}}, got {k_perp}"))),
        WellModel::LowEnergy => 0.0,
    };
    chiral_well_at(model, w1, k_perp, 0.0, xi0, order)
}

/// Same as `chiral_well` at an explicit well `(x0, ξ0)`.
pub fn chiral_well_at(model: WellModel, w1: f64, k_perp: f64, x0: f64, xi0: f64, order: u32) -> Result<ChiralWell> {
    let p = ModelParams { k_perp, ..ModelParams::chiral(w1) };
    let (s, name) = match model {
        WellModel::Harper => (block11(&chiral_harper_squared(&p)?), "harper"),
        WellModel::LowEnergy => (block11(&chiral_lowenergy_squared(&p)?), "lowenergy"),
    };
    let r = classify(&s, name, x0, xi0, 2)?;
    let symbol = s.scale_re(1.0 / r.normalization);
    let normal_form = rescale_to_well(&symbol, &r.well, order)?;
    Ok(ChiralWell { symbol, normal_form, x0: r.well.x0, xi0: r.well.xi0, normalization: r.normalization })
}
