//! Finite-dimensional realizations: circle quantization, tight-binding and
//! low-energy Bloch matrices, band sweeps and the massive operator.

mod massive;

pub use massive::*;

use crate::error::{Error, Result};
use crate::models::{lowenergy_symbol, potential, t_perp, t_zero, ModelParams};
use crate::symbol::{PhaseSpaceSymbol, HPHASE_UNIT};
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Where a matrix came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: String,
    pub h: f64,
    pub k_x: f64,
    pub truncation: usize,
}

/// Hermitian matrix with provenance.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub matrix: Mat<Complex64>,
    pub provenance: Provenance,
}

impl OperatorMatrix {
    pub fn new(matrix: Mat<Complex64>, provenance: Provenance) -> Self {
        OperatorMatrix { matrix, provenance }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |M − M*|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..=j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                worst = worst.max(m[(i, j)].norm());
            }
        }
        worst
    }

    /// `(M + M*)/2`.
    pub fn symmetrized(&self) -> Self {
        let m = &self.matrix;
        let n = m.nrows();
        let sym = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        OperatorMatrix { matrix: sym, provenance: self.provenance.clone() }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        check_hermitian(self)?;
        self.symmetrized()
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{:?}: {e:?}", self.provenance)))
    }
}

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Mat<Complex64>,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.nrows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

fn check_hermitian(m: &OperatorMatrix) -> Result<()> {
    let d = m.hermiticity_defect();
    if d > 1e-10 * (1.0 + m.max_abs()) {
        return Err(Error::Eigen(format!("{:?}: matrix not Hermitian (defect {d:.3e})", m.provenance)));
    }
    Ok(())
}

pub fn hermitian_eigensolve(m: &OperatorMatrix) -> Result<EigenDecomposition> {
    check_hermitian(m)?;
    let evd = m
        .symmetrized()
        .matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{:?}: {e:?}", m.provenance)))?;
    let s = evd.S();
    let values = (0..m.size()).map(|i| s[i].re).collect();
    Ok(EigenDecomposition { values, vectors: evd.U().to_owned() })
}

/// Fourier-mode closure for `circle_quantize`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Closure {
    /// Modes `|n| ≤ N`.
    Window(usize),
    /// Modes `0..modes` with `u_{n+modes} = e^{iθ} u_n`; needs a fiber symbol periodic in `n`.
    Periodic { modes: usize, theta: f64 },
}

impl Closure {
    pub fn len(&self) -> usize {
        match *self {
            Closure::Window(n) => 2 * n + 1,
            Closure::Periodic { modes, .. } => modes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integer frequency of the mode at position `k`.
    pub fn frequency(&self, k: usize) -> i64 {
        match *self {
            Closure::Window(n) => k as i64 - n as i64,
            Closure::Periodic { .. } => k as i64,
        }
    }
}

/// Weyl quantization on the circle: `(a^w u)_{k+m} = â_m(2πh(k + m/2)) u_k`.
///
/// Each term `e^{2πimx} ξ^b e^{2πinξ}` is exact. Index layout is `mode·d + comp`.
pub fn circle_quantize(s: &PhaseSpaceSymbol, h: f64, closure: Closure) -> Result<OperatorMatrix> {
    let d = s.dim();
    let len = closure.len();
    let mut m = Mat::<Complex64>::zeros(len * d, len * d);
    for r in 0..d {
        for c in 0..d {
            for (g, mono, coef) in s.get(r, c).iter() {
                if mono.a > 0 {
                    return Err(Error::Form("circle quantization needs symbols without powers of x".into()));
                }
                if mono.b > 2 && (mono.m != 0 || mono.n != 0) {
                    return Err(Error::Form(format!("ξ-degree {} combined with phases is not supported", mono.b)));
                }
                if let Closure::Periodic { modes, .. } = closure {
                    let wrap = 2.0 * PI * h * modes as f64 * mono.n as f64;
                    if mono.b > 0 || (wrap - wrap.round()).abs() > 1e-9 {
                        return Err(Error::Form(format!("periodic closure with {modes} modes needs a fiber symbol periodic in n")));
                    }
                }
                let weight = coef * Complex64::from_polar(h.powf(g.half_order as f64 / 2.0), HPHASE_UNIT * g.hphase as f64 * h);
                for k in 0..len {
                    let freq = closure.frequency(k);
                    let xi = 2.0 * PI * h * (freq as f64 + 0.5 * mono.m as f64);
                    let val = weight * Complex64::from_polar(xi.powi(mono.b as i32), 2.0 * PI * mono.n as f64 * xi);
                    let (target, phase) = match closure {
                        Closure::Window(_) => {
                            let t = k as i64 + mono.m as i64;
                            if t < 0 || t >= len as i64 {
                                continue;
                            }
                            (t as usize, Complex64::new(1.0, 0.0))
                        }
                        Closure::Periodic { modes, theta } => {
                            let t = k as i64 + mono.m as i64;
                            let wraps = t.div_euclid(modes as i64);
                            (t.rem_euclid(modes as i64) as usize, Complex64::from_polar(1.0, theta * wraps as f64))
                        }
                    };
                    m[(target * d + r, k * d + c)] += val * phase;
                }
            }
        }
    }
    Ok(OperatorMatrix::new(m, Provenance { model: "circle".into(), h, k_x: 0.0, truncation: len }))
}

fn coprime(p: i64, q: i64) -> bool {
    let (mut a, mut b) = (p.abs(), q.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a == 1
}

/// Discrete model on a supercell of `q` sites at `x_i = (i+1)p/q`:
/// `𝐭(k⊥) ⊗ (J + J*) + 𝐭₀ ⊗ I + 𝒱_w`, layout `a·q + i`.
pub fn tight_binding_bloch(p: i64, q: i64, k_x: f64, params: &ModelParams) -> Result<OperatorMatrix> {
    if q < 1 || !coprime(p, q) {
        return Err(Error::NotCoprime { p, q });
    }
    let q = q as usize;
    let mut jm = Mat::<Complex64>::zeros(q, q);
    for i in 0..q - 1 {
        jm[(i + 1, i)] += Complex64::new(1.0, 0.0);
    }
    jm[(0, q - 1)] += Complex64::from_polar(1.0, k_x);
    let t = t_perp(params.k_perp);
    let t0 = t_zero();
    let pot = potential(params.w0, params.w1);
    let n = 4 * q;
    let mut m = Mat::<Complex64>::zeros(n, n);
    for a in 0..4 {
        for b in 0..4 {
            for i in 0..q {
                for j in 0..q {
                    let hop = jm[(i, j)] + jm[(j, i)].conj();
                    if hop != ZERO {
                        m[(a * q + i, b * q + j)] += t[a][b] * hop;
                    }
                }
                m[(a * q + i, b * q + i)] += t0[a][b];
            }
        }
    }
    for i in 0..q {
        let x = ((i + 1) as f64 * p as f64 / q as f64).rem_euclid(1.0);
        let v = pot.eval(x, 0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                m[(a * q + i, b * q + i)] += v[a][b];
            }
        }
    }
    Ok(OperatorMatrix::new(m, Provenance { model: format!("tight-binding {p}/{q}"), h: 0.0, k_x, truncation: q }))
}

/// Default window for `lowenergy_bloch`: `|ξ| ≤ 4`, where the eigenvalues near zero have converged.
pub fn lowenergy_window(h: f64) -> usize {
    (2.0 / (PI * h)).ceil() as usize
}

/// Low-energy Bloch fiber on Fourier modes `|n| ≤ N`.
pub fn lowenergy_bloch(k_x: f64, h: f64, n: usize, params: &ModelParams) -> Result<OperatorMatrix> {
    let period = 2.0 * PI * h;
    if !(-1e-12..=period * (1.0 + 1e-12)).contains(&k_x) {
        return Err(Error::OutOfRange { target: k_x, lo: 0.0, hi: period });
    }
    let p = ModelParams { k_x, h, ..*params };
    let mut m = circle_quantize(&lowenergy_symbol(&p), h, Closure::Window(n))?;
    m.provenance = Provenance { model: "low-energy".into(), h, k_x, truncation: n };
    Ok(m)
}

/// Sorted spectra over a quasimomentum grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandStructure {
    pub k: Vec<f64>,
    /// `bands[i]` is the sorted spectrum at `k[i]`.
    pub bands: Vec<Vec<f64>>,
    pub metadata: serde_json::Value,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.bands.first().map_or(0, Vec::len)
    }

    /// Values of band `b` across the grid.
    pub fn band(&self, b: usize) -> Vec<f64> {
        self.bands.iter().map(|row| row[b]).collect()
    }

    /// Indices of the first `count` bands whose mean is nonnegative.
    pub fn bands_above_zero(&self, count: usize) -> Vec<usize> {
        (0..self.band_count())
            .filter(|&b| {
                let v = self.band(b);
                v.iter().sum::<f64>() / v.len() as f64 >= 0.0
            })
            .take(count)
            .collect()
    }
}

/// `k` values `lo + (hi−lo)·i/n` for `i < n`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Eigenvalues of `builder(k)` for every `k`, solved on worker threads.
pub fn band_sweep<F>(builder: F, ks: &[f64], metadata: serde_json::Value) -> Result<BandStructure>
where
    F: Fn(f64) -> Result<OperatorMatrix> + Sync,
{
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(ks.len().max(1));
    let chunk = ks.len().div_ceil(workers.max(1)).max(1);
    let results: Vec<Result<Vec<Vec<f64>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ks
            .chunks(chunk)
            .map(|part| {
                let builder = &builder;
                scope.spawn(move || part.iter().map(|&k| builder(k)?.eigenvalues()).collect::<Result<Vec<_>>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("band worker panicked")).collect()
    });
    let mut bands = Vec::with_capacity(ks.len());
    for r in results {
        bands.extend(r?);
    }
    if bands.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::DimensionMismatch { left: bands[0].len(), right: bands.iter().map(Vec::len).max().unwrap_or(0) });
    }
    Ok(BandStructure { k: ks.to_vec(), bands, metadata })
}

/// Band variation over the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flatness {
    pub band: usize,
    pub min: f64,
    pub max: f64,
    /// `max − min`.
    pub width: f64,
    /// `(max − min) / max(max|λ|, h)`.
    pub relative: f64,
}

pub fn flatness(bs: &BandStructure, band: usize, h: f64) -> Flatness {
    let v = bs.band(band);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = min.abs().max(max.abs()).max(h);
    Flatness { band, min, max, width: max - min, relative: (max - min) / scale }
}

/// One-sided distance `sup_{a∈A} dist(a, B)`.
pub fn directed_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    a.iter()
        .map(|&x| {
            let i = sorted.partition_point(|&y| y < x);
            let mut d = f64::INFINITY;
            if i < sorted.len() {
                d = d.min((sorted[i] - x).abs());
            }
            if i > 0 {
                d = d.min((x - sorted[i - 1]).abs());
            }
            d
        })
        .fold(0.0, f64::max)
}

pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}
