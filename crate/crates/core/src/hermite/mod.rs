//! Polynomial-times-Gaussian functions, the Hermite basis, and Weyl
//! quantization of polynomial symbols acting on them.

use crate::error::{Error, Result};
use crate::symbol::{Grade, PhaseSpaceSymbol, Scalar};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default number of Hermite modes.
pub const DEFAULT_MODES: usize = 64;

/// Normalized harmonic-oscillator eigenfunction `φ_{n,ω}(y)` by the three-term recurrence.
pub fn hermite_function(n: usize, omega: f64, y: f64) -> f64 {
    hermite_functions(n, omega, y)[n]
}

/// `φ_{0..=n,ω}(y)`.
pub fn hermite_functions(n: usize, omega: f64, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = (omega / PI).powf(0.25) * (-0.5 * omega * y * y).exp();
    out.push(p0);
    if n == 0 {
        return out;
    }
    let s = (2.0 * omega).sqrt() * y;
    out.push(s * p0);
    for k in 1..n {
        let kf = k as f64;
        let next = s * out[k] / (kf + 1.0).sqrt() - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// `∫ y^k e^{−ω y²} dy`, exact recursion; zero for odd `k`.
pub fn gaussian_moment(k: usize, omega: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mut m = (PI / omega).sqrt();
    let mut j = 0;
    while j < k {
        m *= (j + 1) as f64 / (2.0 * omega);
        j += 2;
    }
    m
}

/// Two-component function expanded in `φ_{n,ω}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteCoefficients {
    pub omega: f64,
    pub coeffs: [Vec<Complex64>; 2],
}

/// `(p₁(y), p₂(y))ᵗ e^{−ωy²/2}` with monomial coefficient vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolynomial {
    pub omega: f64,
    pub components: [Vec<Complex64>; 2],
}

fn trim(v: &mut Vec<Complex64>) {
    while v.len() > 1 && v.last().is_some_and(|c| *c == ZERO) {
        v.pop();
    }
}

impl HermiteCoefficients {
    pub fn zero(omega: f64) -> Self {
        HermiteCoefficients { omega, coeffs: [vec![ZERO], vec![ZERO]] }
    }

    /// `φ_n e_comp`.
    pub fn mode(omega: f64, n: usize, comp: usize) -> Self {
        let mut out = Self::zero(omega);
        out.coeffs[comp] = vec![ZERO; n + 1];
        out.coeffs[comp][n] = Complex64::new(1.0, 0.0);
        out
    }

    pub fn len(&self) -> usize {
        self.coeffs[0].len().max(self.coeffs[1].len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, comp: usize, n: usize) -> Complex64 {
        self.coeffs[comp].get(n).copied().unwrap_or(ZERO)
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut acc = ZERO;
        for c in 0..2 {
            for (a, b) in self.coeffs[c].iter().zip(&other.coeffs[c]) {
                acc += a.conj() * b;
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other);
        out
    }

    /// `self += k · other`.
    pub fn axpy(&mut self, k: Complex64, other: &Self) {
        for c in 0..2 {
            let v = &mut self.coeffs[c];
            if v.len() < other.coeffs[c].len() {
                v.resize(other.coeffs[c].len(), ZERO);
            }
            for (a, b) in v.iter_mut().zip(&other.coeffs[c]) {
                *a += k * b;
            }
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut out = self.clone();
        for c in 0..2 {
            for a in out.coeffs[c].iter_mut() {
                *a *= k;
            }
        }
        out
    }

    /// Drop modes above `n_max`.
    pub fn truncated(&self, n_max: usize) -> Self {
        let mut out = self.clone();
        for c in 0..2 {
            out.coeffs[c].truncate(n_max + 1);
        }
        out
    }

    /// Largest coefficient magnitude in slots whose parity differs from `parity`.
    pub fn wrong_parity_mass(&self, parity: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for c in 0..2 {
            for (n, a) in self.coeffs[c].iter().enumerate() {
                if n % 2 != parity % 2 {
                    worst = worst.max(a.norm());
                }
            }
        }
        worst
    }

    /// Evaluate both components at `y`.
    pub fn eval(&self, y: f64) -> [Complex64; 2] {
        let phis = hermite_functions(self.len().max(1) - 1, self.omega, y);
        let mut out = [ZERO; 2];
        for c in 0..2 {
            for (a, p) in self.coeffs[c].iter().zip(&phis) {
                out[c] += a * p;
            }
        }
        out
    }

    pub fn to_polynomial(&self) -> GaussianPolynomial {
        GaussianPolynomial {
            omega: self.omega,
            components: [hermite_to_monomial(&self.coeffs[0], self.omega), hermite_to_monomial(&self.coeffs[1], self.omega)],
        }
    }
}

/// Monomial coefficients of `Σ c_n φ_n(y) e^{+ωy²/2}`.
fn hermite_to_monomial(c: &[Complex64], omega: f64) -> Vec<Complex64> {
    let n = c.len();
    let mut out = vec![ZERO; n.max(1)];
    let norm0 = (omega / PI).powf(0.25);
    let s = (2.0 * omega).sqrt();
    let mut prev: Vec<f64> = vec![];
    let mut cur: Vec<f64> = vec![norm0];
    for k in 0..n {
        for (i, p) in cur.iter().enumerate() {
            out[i] += c[k] * p;
        }
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (i, p) in cur.iter().enumerate() {
            next[i + 1] += s * p / (kf + 1.0).sqrt();
        }
        for (i, p) in prev.iter().enumerate() {
            next[i] -= (kf / (kf + 1.0)).sqrt() * p;
        }
        prev = cur;
        cur = next;
    }
    trim(&mut out);
    out
}

/// Hermite coefficients of `p(y) e^{−ωy²/2}` via Horner's rule with the ladder form of `y`.
fn monomial_to_hermite(p: &[Complex64], omega: f64) -> Vec<Complex64> {
    let norm0 = (omega / PI).powf(0.25);
    let mut r: Vec<Complex64> = vec![ZERO];
    for k in (0..p.len()).rev() {
        r = mul_y(&r, omega);
        r[0] += p[k] / norm0;
    }
    trim(&mut r);
    r
}

impl GaussianPolynomial {
    pub fn new(omega: f64, p1: Vec<Complex64>, p2: Vec<Complex64>) -> Self {
        GaussianPolynomial { omega, components: [p1, p2] }
    }

    pub fn degree(&self) -> usize {
        self.components.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn to_hermite(&self) -> HermiteCoefficients {
        HermiteCoefficients {
            omega: self.omega,
            coeffs: [monomial_to_hermite(&self.components[0], self.omega), monomial_to_hermite(&self.components[1], self.omega)],
        }
    }

    /// Exact L² inner product from Gaussian moments.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut acc = ZERO;
        for c in 0..2 {
            for (i, a) in self.components[c].iter().enumerate() {
                for (j, b) in other.components[c].iter().enumerate() {
                    acc += a.conj() * b * gaussian_moment(i + j, self.omega);
                }
            }
        }
        acc
    }

    pub fn eval(&self, y: f64) -> [Complex64; 2] {
        let g = (-0.5 * self.omega * y * y).exp();
        let mut out = [ZERO; 2];
        for c in 0..2 {
            let mut acc = ZERO;
            for a in self.components[c].iter().rev() {
                acc = acc * y + a;
            }
            out[c] = acc * g;
        }
        out
    }
}

/// `y·v` in the Hermite basis.
pub fn mul_y(v: &[Complex64], omega: f64) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len() + 1];
    let k = 1.0 / (2.0 * omega).sqrt();
    for (n, a) in v.iter().enumerate() {
        if *a == ZERO {
            continue;
        }
        if n > 0 {
            out[n - 1] += a * ((n as f64).sqrt() * k);
        }
        out[n + 1] += a * (((n + 1) as f64).sqrt() * k);
    }
    out
}

/// `D v = −i v'` in the Hermite basis.
pub fn apply_d(v: &[Complex64], omega: f64) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len() + 1];
    let k = Complex64::new(0.0, -(omega / 2.0).sqrt());
    for (n, a) in v.iter().enumerate() {
        if *a == ZERO {
            continue;
        }
        if n > 0 {
            out[n - 1] += a * k * (n as f64).sqrt();
        }
        out[n + 1] -= a * k * ((n + 1) as f64).sqrt();
    }
    out
}

/// `(y^a η^b)^w v = 2^{−a} Σ_j C(a,j) y^{a−j} D^b (y^j v)`.
pub fn weyl_monomial(a: u32, b: u32, v: &[Complex64], omega: f64) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len() + (a + b) as usize];
    let mut yj = v.to_vec();
    let mut binom = 1.0;
    for j in 0..=a {
        let mut w = yj.clone();
        for _ in 0..b {
            w = apply_d(&w, omega);
        }
        for _ in 0..(a - j) {
            w = mul_y(&w, omega);
        }
        let k = binom / 2f64.powi(a as i32);
        for (o, x) in out.iter_mut().zip(&w) {
            *o += x * k;
        }
        yj = mul_y(&yj, omega);
        binom = binom * (a - j) as f64 / (j + 1) as f64;
    }
    out
}

fn check_polynomial_grade(p: &PhaseSpaceSymbol) -> Result<()> {
    if p.dim() != 2 {
        return Err(Error::Form(format!("expected a 2x2 polynomial symbol, got dimension {}", p.dim())));
    }
    if !p.is_polynomial() || p.has_hphase() {
        return Err(Error::Form("symbol must be polynomial in (y, eta)".into()));
    }
    Ok(())
}

/// Exact image `p^w(y, D) v` for a 2×2 polynomial symbol; h-grades are weighted by `h^{k/2}`.
pub fn apply_weyl_hermite(p: &PhaseSpaceSymbol, v: &HermiteCoefficients, h: f64, cap: usize) -> Result<HermiteCoefficients> {
    check_polynomial_grade(p)?;
    let omega = v.omega;
    let mut out = HermiteCoefficients::zero(omega);
    for r in 0..2 {
        for c in 0..2 {
            let s: &Scalar = p.get(r, c);
            if s.is_zero() || v.coeffs[c].iter().all(|z| *z == ZERO) {
                continue;
            }
            for (g, m, coef) in s.iter() {
                let deg = v.coeffs[c].len() + (m.a + m.b) as usize;
                if deg > cap {
                    return Err(Error::DegreeCap { degree: deg, cap });
                }
                let w = weyl_monomial(m.a, m.b, &v.coeffs[c], omega);
                let k = coef * grade_weight(g, h);
                let tgt = &mut out.coeffs[r];
                if tgt.len() < w.len() {
                    tgt.resize(w.len(), ZERO);
                }
                for (o, x) in tgt.iter_mut().zip(&w) {
                    *o += x * k;
                }
            }
        }
    }
    for c in 0..2 {
        trim(&mut out.coeffs[c]);
    }
    Ok(out)
}

fn grade_weight(g: Grade, h: f64) -> f64 {
    if g.half_order == 0 {
        1.0
    } else {
        h.powf(g.half_order as f64 / 2.0)
    }
}

/// Exact image `p^w(y, D) v` on the monomial representation.
pub fn apply_weyl_poly(p: &PhaseSpaceSymbol, v: &GaussianPolynomial, cap: usize) -> Result<GaussianPolynomial> {
    let herm = apply_weyl_hermite(p, &v.to_hermite(), 1.0, cap)?;
    Ok(herm.to_polynomial())
}

/// Solve `((η²+ω²y²+μ)^w − λ₀) u = rhs` orthogonally to the kernel, in Hermite coefficients.
pub fn solve_shifted(omega: f64, mu: f64, lambda0: f64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = omega.abs().max(lambda0.abs()).max(mu.abs()).max(1.0);
    let mut out = vec![ZERO; rhs.len()];
    for (m, r) in rhs.iter().enumerate() {
        let den = (2 * m + 1) as f64 * omega + mu - lambda0;
        if den.abs() <= 1e-9 * scale {
            if r.norm() > 1e-9 * norm.max(f64::MIN_POSITIVE) && r.norm() > 1e-13 {
                return Err(Error::OrthogonalityViolation { projection: r.norm(), norm });
            }
            continue;
        }
        out[m] = r / den;
    }
    trim(&mut out);
    Ok(out)
}

/// Galerkin matrix `⟨φ_i e_a, S^w φ_j e_b⟩` at basis index `2n + comp`, modes `n ≤ n_max`.
pub fn galerkin_matrix(s: &PhaseSpaceSymbol, omega: f64, n_max: usize, h: f64) -> Result<Mat<Complex64>> {
    check_polynomial_grade(s)?;
    let size = 2 * (n_max + 1);
    let mut m = Mat::<Complex64>::zeros(size, size);
    let cap = 4 * (n_max + 1) + 64;
    for j in 0..=n_max {
        for b in 0..2 {
            let img = apply_weyl_hermite(s, &HermiteCoefficients::mode(omega, j, b), h, cap)?;
            for a in 0..2 {
                for (i, z) in img.coeffs[a].iter().enumerate().take(n_max + 1) {
                    m[(2 * i + a, 2 * j + b)] = *z;
                }
            }
        }
    }
    Ok(m)
}

/// `⟨φ_m, D(z) φ_n⟩` for the displacement `D(z) = e^{z a† − z̄ a}`, `m, n ≤ n_max`.
///
/// Columns follow `D(z) φ_{n+1} = (a† − z̄) D(z) φ_n / √(n+1)`; row `m` only needs rows `≤ m`,
/// so the truncation is exact.
pub fn displacement_matrix(z: Complex64, n_max: usize) -> Mat<Complex64> {
    let size = n_max + 1;
    let mut out = Mat::<Complex64>::zeros(size, size);
    let mut col = vec![ZERO; size];
    col[0] = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for m in 1..size {
        col[m] = col[m - 1] * z / (m as f64).sqrt();
    }
    for n in 0..size {
        for m in 0..size {
            out[(m, n)] = col[m];
        }
        if n + 1 == size {
            break;
        }
        let zb = z.conj();
        let norm = ((n + 1) as f64).sqrt();
        let next: Vec<Complex64> = (0..size)
            .map(|m| {
                let up = if m > 0 { col[m - 1] * (m as f64).sqrt() } else { ZERO };
                (up - zb * col[m]) / norm
            })
            .collect();
        col = next;
    }
    out
}

/// Galerkin matrix of the Weyl quantization of `s(x₀ + √h y, ξ₀ + √h η)` (with its own
/// h-grades evaluated at `h`) for a 2×2 symbol made of pure phases; index `2n + comp`.
pub fn galerkin_trig_matrix(s: &PhaseSpaceSymbol, x0: f64, xi0: f64, omega: f64, n_max: usize, h: f64) -> Result<Mat<Complex64>> {
    if s.dim() != 2 {
        return Err(Error::Form(format!("expected a 2x2 symbol, got dimension {}", s.dim())));
    }
    let size = 2 * (n_max + 1);
    let mut out = Mat::<Complex64>::zeros(size, size);
    let sh = h.sqrt();
    let mut cache: Vec<((i32, i32), Mat<Complex64>)> = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            for (g, m, v) in s.get(r, c).iter() {
                if m.a != 0 || m.b != 0 {
                    return Err(Error::Form("trig Galerkin needs pure phase terms".into()));
                }
                let weight = v
                    * h.powf(g.half_order as f64 / 2.0)
                    * Complex64::from_polar(1.0, crate::symbol::HPHASE_UNIT * g.hphase as f64 * h + 2.0 * PI * (m.m as f64 * x0 + m.n as f64 * xi0));
                let key = (m.m, m.n);
                let pos = match cache.iter().position(|(k, _)| *k == key) {
                    Some(p) => p,
                    None => {
                        let alpha = 2.0 * PI * m.m as f64 * sh;
                        let beta = 2.0 * PI * m.n as f64 * sh;
                        let z = Complex64::new(-beta * (omega / 2.0).sqrt(), alpha / (2.0 * omega).sqrt());
                        cache.push((key, displacement_matrix(z, n_max)));
                        cache.len() - 1
                    }
                };
                let d = &cache[pos].1;
                for i in 0..=n_max {
                    for j in 0..=n_max {
                        out[(2 * i + r, 2 * j + c)] += weight * d[(i, j)];
                    }
                }
            }
        }
    }
    Ok(out)
}
