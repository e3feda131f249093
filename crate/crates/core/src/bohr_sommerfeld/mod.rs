//! Scalar Bohr–Sommerfeld rule: orbit integrals F₀, F₁, F₂ over closed orbits of `p₀`,
//! inversion `F(λ, h) = kh`, and the anti-chiral Harper ladders.

use crate::error::{Error, Result};
use crate::models::{antichiral_diag, antichiral_minima, antichiral_wells, harper_symbol, ModelParams};
use crate::spectra::{circle_quantize, Closure};
use crate::symbol::{PhaseSpaceSymbol, Scalar};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `p ∼ p₀ + h p₁ + h² p₂` with a nondegenerate minimum `p₀ = 0` at `(x₀, ξ₀)`.
#[derive(Clone, Debug)]
pub struct ScalarSymbolSeries {
    pub p0: Scalar,
    pub p1: Scalar,
    pub p2: Scalar,
    pub x0: f64,
    pub xi0: f64,
}

struct Derivs {
    p0: Scalar,
    p0x: Scalar,
    p0xi: Scalar,
    p0xx: Scalar,
    p0xxi: Scalar,
    p0xixi: Scalar,
    p1: Scalar,
    p2: Scalar,
}

impl Derivs {
    fn new(p: &ScalarSymbolSeries) -> Self {
        let p0x = p.p0.dx();
        let p0xi = p.p0.dxi();
        Derivs {
            p0: p.p0.clone(),
            p0xx: p0x.dx(),
            p0xxi: p0x.dxi(),
            p0xixi: p0xi.dxi(),
            p0x,
            p0xi,
            p1: p.p1.clone(),
            p2: p.p2.clone(),
        }
    }

    fn re(s: &Scalar, x: f64, xi: f64) -> f64 {
        s.eval(x, xi, 0.0).re
    }

    // state: x, ξ, ∫ξẋ, ∫p₁, ∫(p₁² − Δ/12), ∫p₂, t
    fn rhs(&self, y: &State) -> State {
        let (x, xi) = (y[0], y[1]);
        let dx = Self::re(&self.p0xi, x, xi);
        let dxi = -Self::re(&self.p0x, x, xi);
        let p1 = Self::re(&self.p1, x, xi);
        let hess = Self::re(&self.p0xx, x, xi) * Self::re(&self.p0xixi, x, xi) - Self::re(&self.p0xxi, x, xi).powi(2);
        [dx, dxi, xi * dx, p1, p1 * p1 - hess / 12.0, Self::re(&self.p2, x, xi), 1.0]
    }
}

/// One closed orbit of the Hamiltonian flow of `p₀` at energy `τ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitData {
    pub tau: f64,
    pub period: f64,
    /// `(t, x, ξ)` at every accepted step, ending on the start section.
    pub samples: Vec<(f64, f64, f64)>,
    /// `∮ ξ dx`.
    pub action: f64,
    pub int_p1: f64,
    /// `∫ (p₁² − Δ/12) dt` with `Δ = p₀,xx p₀,ξξ − p₀,xξ²`.
    pub int_bracket: f64,
    pub int_p2: f64,
    pub energy_drift: f64,
    pub closure_error: f64,
}

impl OrbitData {
    /// Enclosed area by the shoelace rule on the step samples.
    pub fn shoelace_area(&self) -> f64 {
        let n = self.samples.len();
        let mut a = 0.0;
        for i in 0..n {
            let (_, x1, y1) = self.samples[i];
            let (_, x2, y2) = self.samples[(i + 1) % n];
            a += x1 * y2 - x2 * y1;
        }
        // clockwise orbits carry positive ∮ξdx
        -0.5 * a
    }
}

/// Integrator tolerances.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OrbitTolerance {
    pub rtol: f64,
    pub atol: f64,
    /// Give up after this many steps.
    pub max_steps: usize,
}

impl Default for OrbitTolerance {
    fn default() -> Self {
        OrbitTolerance { rtol: 1e-12, atol: 1e-14, max_steps: 200_000 }
    }
}

// Dormand–Prince 5(4)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

const DIM: usize = 7;
type State = [f64; DIM];

fn dp_step<F: Fn(&State) -> State>(f: &F, y: &State, dt: f64) -> (State, f64) {
    let mut k = [[0.0; DIM]; 7];
    k[0] = f(y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..DIM {
                ys[i] += dt * A[s][j] * kj[i];
            }
        }
        k[s] = f(&ys);
    }
    let mut y5 = *y;
    let mut err: f64 = 0.0;
    for i in 0..DIM {
        let mut e = 0.0;
        for s in 0..7 {
            y5[i] += dt * B5[s] * k[s][i];
            e += dt * (B5[s] - B4[s]) * k[s][i];
        }
        if i < 2 {
            // only the phase-space coordinates drive step control
            err = err.max(e.abs() / (1e-14 + y5[i].abs().max(y[i].abs())));
        }
    }
    (y5, err)
}

fn scaled_err(err_rel: f64, tol: &OrbitTolerance) -> f64 {
    err_rel / tol.rtol.max(tol.atol)
}

/// Start point `(x₀, ξ₀ + s)` with `p₀ = τ`, `s > 0`.
fn start_point(d: &Derivs, p: &ScalarSymbolSeries, tau: f64) -> Result<f64> {
    let f = |s: f64| Derivs::re(&d.p0, p.x0, p.xi0 + s) - tau;
    let mut hi = 1e-6;
    while f(hi) < 0.0 {
        hi *= 1.5;
        if hi > 1e3 {
            return Err(Error::NoClosedOrbit { tau });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Integrate the flow of `p₀` from the section `x = x₀`, `ξ > ξ₀` until it returns.
pub fn trace_orbit(p: &ScalarSymbolSeries, tau: f64, tol: &OrbitTolerance) -> Result<OrbitData> {
    if tau <= 0.0 {
        return Err(Error::OutOfRange { target: tau, lo: 0.0, hi: f64::INFINITY });
    }
    let d = Derivs::new(p);
    let s = start_point(&d, p, tau)?;
    let y0: State = [p.x0, p.xi0 + s, 0.0, 0.0, 0.0, 0.0, 0.0];
    let f = |y: &State| d.rhs(y);
    let v0 = f(&y0);
    if v0[0] <= 0.0 {
        return Err(Error::NoClosedOrbit { tau });
    }
    // harmonic estimate of the step scale
    let speed = (v0[0] * v0[0] + v0[1] * v0[1]).sqrt();
    let mut dt = 1e-3 * s / speed.max(1e-300);
    let mut y = y0;
    let mut samples = vec![(0.0, y0[0], y0[1])];
    let mut went_below = false;
    for _ in 0..tol.max_steps {
        let (yn, err) = dp_step(&f, &y, dt);
        let e = scaled_err(err, tol);
        if e > 1.0 {
            dt *= (0.9 * e.powf(-0.2)).max(0.1);
            continue;
        }
        let gx = yn[0] - p.x0;
        if yn[0] < p.x0 {
            went_below = true;
        }
        if went_below && y[0] < p.x0 && gx >= 0.0 {
            // Hénon: switch the independent variable to x and step exactly onto the section
            let g = |z: &State| {
                let v = f(z);
                let mut out = [0.0; DIM];
                for i in 0..DIM {
                    out[i] = v[i] / v[0];
                }
                out
            };
            let (z, _) = dp_step(&g, &y, p.x0 - y[0]);
            let tz = z[6];
            let energy = Derivs::re(&d.p0, z[0], z[1]);
            let closure = ((z[0] - y0[0]).powi(2) + (z[1] - y0[1]).powi(2)).sqrt();
            return Ok(OrbitData {
                tau,
                period: tz,
                samples,
                action: z[2],
                int_p1: z[3],
                int_bracket: z[4],
                int_p2: z[5],
                energy_drift: (energy - tau).abs(),
                closure_error: closure,
            });
        }
        y = yn;
        samples.push((y[6], y[0], y[1]));
        dt *= (0.9 * e.max(1e-10).powf(-0.2)).min(5.0);
    }
    Err(Error::NoClosedOrbit { tau })
}

/// `F₀(τ), F₁(τ), F₂(τ)` with the orbit period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FValues {
    pub tau: f64,
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub period: f64,
}

/// Relative step of the centered τ-difference in `F₂`.
pub const F2_STEP: f64 = 1e-4;

/// `F₀ = (2π)⁻¹∮ξdx`, `F₁ = ½ − (2π)⁻¹∮p₁dt`,
/// `F₂ = (4π)⁻¹ ∂_τ∮(p₁² − Δ/12)dt − (2π)⁻¹∮p₂dt`.
pub fn f_series(p: &ScalarSymbolSeries, tau: f64, tol: &OrbitTolerance) -> Result<FValues> {
    let o = trace_orbit(p, tau, tol)?;
    let dtau = F2_STEP * tau;
    let up = trace_orbit(p, tau + dtau, tol)?;
    let dn = trace_orbit(p, tau - dtau, tol)?;
    let dbracket = (up.int_bracket - dn.int_bracket) / (2.0 * dtau);
    Ok(FValues {
        tau,
        f0: o.action / (2.0 * PI),
        f1: 0.5 - o.int_p1 / (2.0 * PI),
        f2: dbracket / (4.0 * PI) - o.int_p2 / (2.0 * PI),
        period: o.period,
    })
}

/// `F` sampled on an increasing τ-grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FTable {
    pub rows: Vec<FValues>,
}

/// `n` logarithmic points from `1e−4·saddle` to `0.8·saddle`.
pub fn tau_grid(saddle: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = ((1e-4 * saddle).ln(), (0.8 * saddle).ln());
    (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).exp()).collect()
}

pub fn f_table(p: &ScalarSymbolSeries, taus: &[f64], tol: &OrbitTolerance) -> Result<FTable> {
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).min(taus.len().max(1));
    let chunk = taus.len().div_ceil(threads.max(1)).max(1);
    let parts: Vec<Result<Vec<FValues>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = taus
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(|&t| f_series(p, t, tol)).collect::<Result<Vec<_>>>()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("orbit worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(taus.len());
    for part in parts {
        rows.extend(part?);
    }
    for w in rows.windows(2) {
        if w[1].f0 <= w[0].f0 {
            return Err(Error::InvalidParams(format!("F0 not increasing between tau={} and tau={}", w[0].tau, w[1].tau)));
        }
    }
    Ok(FTable { rows })
}

impl FTable {
    /// `F(τ, h)`: cubic Hermite in `F₀` (slopes from the period, `F₀′ = T/2π`), linear in `F₁`, `F₂`.
    pub fn eval(&self, tau: f64, h: f64) -> Result<f64> {
        let r = &self.rows;
        let (lo, hi) = (r[0].tau, r[r.len() - 1].tau);
        if !(lo..=hi).contains(&tau) {
            return Err(Error::OutOfRange { target: tau, lo, hi });
        }
        let i = r.partition_point(|v| v.tau <= tau).clamp(1, r.len() - 1) - 1;
        let (a, b) = (&r[i], &r[i + 1]);
        let w = b.tau - a.tau;
        let s = (tau - a.tau) / w;
        let (h00, h10, h01, h11) =
            (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s, -2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
        let f0 = h00 * a.f0 + h10 * w * a.period / (2.0 * PI) + h01 * b.f0 + h11 * w * b.period / (2.0 * PI);
        let f1 = a.f1 + s * (b.f1 - a.f1);
        let f2 = a.f2 + s * (b.f2 - a.f2);
        Ok(f0 + h * f1 + h * h * f2)
    }

    /// Solve `F(λ, h) = kh` by bisection.
    pub fn invert(&self, k: i64, h: f64) -> Result<f64> {
        let r = &self.rows;
        let (mut lo, mut hi) = (r[0].tau, r[r.len() - 1].tau);
        let target = k as f64 * h;
        let (flo, fhi) = (self.eval(lo, h)?, self.eval(hi, h)?);
        if target < flo || target > fhi {
            return Err(Error::OutOfRange { target, lo: flo, hi: fhi });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid, h)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Alias for `FTable::invert`.
pub fn invert_f(table: &FTable, k: i64, h: f64) -> Result<f64> {
    table.invert(k, h)
}

/// Lowest value of `p₀` on the boundary of the unit cell centred at the well.
pub fn cell_saddle(p: &ScalarSymbolSeries) -> f64 {
    let n = 2048;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let s = -0.5 + i as f64 / n as f64;
        for (dx, dxi) in [(0.5, s), (-0.5, s), (s, 0.5), (s, -0.5)] {
            best = best.min(p.p0.eval(p.x0 + dx, p.xi0 + dxi, 0.0).re);
        }
    }
    best
}

/// Entry `j` (1-based) of the anti-chiral Harper symbol, shifted by `−c_j`, at its well.
pub fn antichiral_series(w0: f64, j: usize, k_perp: f64) -> Result<ScalarSymbolSeries> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidParams(format!("anti-chiral component must be 1..4, got {j}")));
    }
    let diag = antichiral_diag(&ModelParams { k_perp, ..ModelParams::antichiral(w0) })?;
    let (x0, xi0) = antichiral_wells(k_perp)?[j - 1];
    let c = antichiral_minima(w0)[j - 1];
    Ok(ScalarSymbolSeries { p0: diag[j - 1].sub(&Scalar::real(c)), p1: Scalar::zero(), p2: Scalar::zero(), x0, xi0 })
}

/// `c_j + 8π²w₀(k+½)h` as stated for the anti-chiral Harper wells.
pub fn antichiral_levels(w0: f64, h: f64, j: usize, k: usize) -> f64 {
    antichiral_minima(w0)[j - 1] + 8.0 * PI * PI * w0 * (k as f64 + 0.5) * h
}

/// `c_j + 8π²√w₀(k+½)h`, the harmonic ladder of `4π²((ξ−ξ_j)² + w₀(x−x_j)²)`.
pub fn antichiral_levels_harmonic(w0: f64, h: f64, j: usize, k: usize) -> f64 {
    antichiral_minima(w0)[j - 1] + 8.0 * PI * PI * w0.sqrt() * (k as f64 + 0.5) * h
}

/// Spectrum of the anti-chiral Harper operator on the circle at `h = (2πL)⁻¹`, periodic closure.
pub fn antichiral_spectrum(w0: f64, k_perp: f64, l: usize) -> Result<Vec<f64>> {
    let p = ModelParams { k_perp, ..ModelParams::antichiral(w0) };
    let m = circle_quantize(&harper_symbol(&p), ModelParams::harper_h(l as f64), Closure::Periodic { modes: l, theta: 0.0 })?;
    m.eigenvalues()
}

/// Distance from `target` to the nearest value of `values`.
pub fn nearest_gap(values: &[f64], target: f64) -> f64 {
    values.iter().map(|v| (v - target).abs()).fold(f64::INFINITY, f64::min)
}

/// One row of a level table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelRow {
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub prediction: f64,
    pub matched_eigenvalue: f64,
    pub gap: f64,
}

/// Spectrum of the single diagonal entry `j` of the conjugated anti-chiral symbol, same closure.
pub fn antichiral_component_spectrum(w0: f64, k_perp: f64, j: usize, l: usize) -> Result<Vec<f64>> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidParams(format!("anti-chiral component must be 1..4, got {j}")));
    }
    let diag = antichiral_diag(&ModelParams { k_perp, ..ModelParams::antichiral(w0) })?;
    let s = PhaseSpaceSymbol::scalar(diag[j - 1].clone());
    circle_quantize(&s, ModelParams::harper_h(l as f64), Closure::Periodic { modes: l, theta: 0.0 })?.eigenvalues()
}

/// Which eigenvalues a prediction is matched against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Matching {
    /// Nearest eigenvalue of the full 4×4 operator.
    Full,
    /// Nearest eigenvalue of the `j`-th diagonal entry alone.
    Component,
}

/// Match predicted ladders against the circle spectrum for each `L`.
pub fn level_table<F: Fn(f64, usize, usize) -> f64>(
    w0: f64,
    k_perp: f64,
    ls: &[usize],
    kmax: usize,
    matching: Matching,
    predict: F,
) -> Result<Vec<LevelRow>> {
    let mut rows = Vec::new();
    for &l in ls {
        let full = match matching {
            Matching::Full => Some(antichiral_spectrum(w0, k_perp, l)?),
            Matching::Component => None,
        };
        let h = ModelParams::harper_h(l as f64);
        for j in 1..=4 {
            let spec = match &full {
                Some(s) => s.clone(),
                None => antichiral_component_spectrum(w0, k_perp, j, l)?,
            };
            for k in 0..=kmax {
                let pred = predict(h, j, k);
                let m = spec.iter().cloned().min_by(|a, b| (a - pred).abs().total_cmp(&(b - pred).abs())).unwrap_or(f64::NAN);
                rows.push(LevelRow { j, k, l, prediction: pred, matched_eigenvalue: m, gap: (m - pred).abs() });
            }
        }
    }
    Ok(rows)
}
