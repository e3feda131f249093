use super::{Closure, OperatorMatrix};
use crate::error::{Error, Result};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Shape of the `x` factor `χ₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum XCutoff {
    /// Fejér kernel of the given order centered at the well, scaled to peak 1.
    Fejer { order: usize },
    /// Box of half-width `half_width` convolved with a Gaussian of width `edge`,
    /// truncated at `order` modes.
    FlatTop { order: usize, half_width: f64, edge: f64 },
}

/// `χ(x, ξ) = χ₁(x) χ₂(ξ)` with `χ₂(ξ) = J((ξ−ξ₀)/ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub x: XCutoff,
    pub rho: f64,
    /// Period of the `ξ` variable, if any.
    pub xi_period: Option<f64>,
}

/// Layout of a circle-quantized matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub h: f64,
    pub closure: Closure,
    pub components: usize,
}

/// Smooth plateau: 1 on `|t| ≤ ½`, 0 on `|t| ≥ 1`.
pub fn plateau(t: f64) -> f64 {
    let t = t.abs();
    if t <= 0.5 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let s = 2.0 * (t - 0.5);
    let f = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    f(1.0 - s) / (f(1.0 - s) + f(s))
}

fn wrap(d: f64, period: f64) -> f64 {
    d - period * (d / period).round()
}

/// Fourier coefficients `ĉ_m`, `|m| ≤ order`, of `χ₁`, rescaled so that `0 ≤ χ₁ ≤ 1`.
pub fn x_cutoff_coefficients(x0: f64, cut: XCutoff) -> Vec<(i32, Complex64)> {
    let mut out: Vec<(i32, Complex64)> = match cut {
        XCutoff::Fejer { order } => {
            let k = order as i32;
            (-k..=k)
                .map(|m| {
                    let c = (1.0 - m.abs() as f64 / (order as f64 + 1.0)) / (order as f64 + 1.0);
                    (m, Complex64::from_polar(c, -2.0 * PI * m as f64 * x0))
                })
                .collect()
        }
        XCutoff::FlatTop { order, half_width, edge } => {
            let k = order as i32;
            (-k..=k)
                .map(|m| {
                    let c = if m == 0 {
                        2.0 * half_width
                    } else {
                        let mf = m as f64;
                        (2.0 * PI * mf * half_width).sin() / (PI * mf) * (-(PI * mf * edge).powi(2)).exp()
                    };
                    (m, Complex64::from_polar(c, -2.0 * PI * m as f64 * x0))
                })
                .collect()
        }
    };
    // affine renormalization into [0, 1]
    let samples = 2048;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for i in 0..samples {
        let v = eval_x_cutoff(&out, i as f64 / samples as f64);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo < 0.0 || hi > 1.0 {
        for (m, c) in out.iter_mut() {
            *c /= hi - lo;
            if *m == 0 {
                *c -= lo / (hi - lo);
            }
        }
    }
    out
}

pub fn eval_x_cutoff(coeffs: &[(i32, Complex64)], x: f64) -> f64 {
    coeffs.iter().map(|(m, c)| (c * Complex64::from_polar(1.0, 2.0 * PI * *m as f64 * x)).re).sum()
}

/// `sym(Q_χ)` for the standard quantization `χ₁(x) χ₂(hD)`.
pub fn cutoff_matrix(layout: &Layout, x0: f64, xi0: f64, cut: &Cutoff) -> Result<Mat<Complex64>> {
    if cut.rho <= 0.0 {
        return Err(Error::InvalidParams(format!("cutoff radius must be positive, got {}", cut.rho)));
    }
    let coeffs = x_cutoff_coefficients(x0, cut.x);
    let d = layout.components;
    let len = layout.closure.len();
    let mut q = Mat::<Complex64>::zeros(len * d, len * d);
    for k in 0..len {
        let xi = 2.0 * PI * layout.h * layout.closure.frequency(k) as f64;
        let dxi = match cut.xi_period {
            Some(p) => wrap(xi - xi0, p),
            None => xi - xi0,
        };
        let chi2 = plateau(dxi / cut.rho);
        if chi2 == 0.0 {
            continue;
        }
        for &(m, c) in &coeffs {
            let t = k as i64 + m as i64;
            let (target, phase) = match layout.closure {
                Closure::Window(_) => {
                    if t < 0 || t >= len as i64 {
                        continue;
                    }
                    (t as usize, Complex64::new(1.0, 0.0))
                }
                Closure::Periodic { modes, theta } => {
                    (t.rem_euclid(modes as i64) as usize, Complex64::from_polar(1.0, theta * t.div_euclid(modes as i64) as f64))
                }
            };
            for a in 0..d {
                q[(target * d + a, k * d + a)] += c * chi2 * phase;
            }
        }
    }
    let n = len * d;
    Ok(Mat::from_fn(n, n, |i, j| (q[(i, j)] + q[(j, i)].conj()) * 0.5))
}

/// `M + (I − sym(Q_χ))`.
pub fn massive_operator(m: &OperatorMatrix, layout: &Layout, x0: f64, xi0: f64, cut: &Cutoff) -> Result<OperatorMatrix> {
    let q = cutoff_matrix(layout, x0, xi0, cut)?;
    if q.nrows() != m.size() {
        return Err(Error::DimensionMismatch { left: m.size(), right: q.nrows() });
    }
    let n = m.size();
    let out = Mat::from_fn(n, n, |i, j| {
        let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        m.matrix[(i, j)] + id - q[(i, j)]
    });
    let mut prov = m.provenance.clone();
    prov.model = format!("{} (massive)", prov.model);
    Ok(OperatorMatrix::new(out, prov))
}

/// `⟨v, sym(Q_χ) v⟩ / ‖v‖²`.
pub fn cutoff_mass(q: &Mat<Complex64>, v: &[Complex64]) -> f64 {
    let n = v.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        if v[j] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for i in 0..n {
            acc += v[i].conj() * q[(i, j)] * v[j];
        }
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    acc.re / norm
}
