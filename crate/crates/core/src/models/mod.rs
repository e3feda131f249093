//! Symbols of the discrete (Harper) and low-energy Dirac moiré models and
//! their chiral and anti-chiral reductions.

mod commensurable;
mod wells;

pub use commensurable::*;
pub use wells::*;

use crate::error::{Error, Result};
use crate::symbol::{Grade, Monomial, Order, PhaseSpaceSymbol, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Coupling strengths and quasimomenta shared by both models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub w0: f64,
    pub w1: f64,
    pub k_perp: f64,
    pub k_x: f64,
    pub h: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { w0: 0.0, w1: 1.0, k_perp: 0.0, k_x: 0.0, h: 1.0 / 60.0 }
    }
}

impl ModelParams {
    pub fn chiral(w1: f64) -> Self {
        ModelParams { w0: 0.0, w1, ..Default::default() }
    }

    pub fn antichiral(w0: f64) -> Self {
        ModelParams { w0, w1: 0.0, ..Default::default() }
    }

    pub fn is_chiral(&self) -> bool {
        self.w0 == 0.0
    }

    pub fn is_antichiral(&self) -> bool {
        self.w1 == 0.0
    }

    /// `k_x / h`, the h-independent Bloch parameter carried inside symbols.
    pub fn kappa(&self) -> f64 {
        if self.k_x == 0.0 {
            0.0
        } else {
            self.k_x / self.h
        }
    }

    /// Discrete model: `h = 1/(2πL)`.
    pub fn harper_h(l: f64) -> f64 {
        1.0 / (2.0 * PI * l)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `U(x) = 1 + 2cos(2πx)`.
pub fn u_ac() -> Scalar {
    Scalar::real(1.0).add(&Scalar::cos(1, 0).scale_re(2.0))
}

/// `U±(x) = 1 − cos(2πx) ± √3 sin(2πx)`.
pub fn u_c(sign: f64) -> Scalar {
    Scalar::real(1.0).sub(&Scalar::cos(1, 0)).add(&Scalar::sin(1, 0).scale_re(sign * 3f64.sqrt()))
}

/// `f(x) = w₁(1 − cos 2πx)`.
pub fn f_sym(w1: f64) -> Scalar {
    Scalar::real(1.0).sub(&Scalar::cos(1, 0)).scale_re(w1)
}

/// `g(x) = w₁√3 sin 2πx`.
pub fn g_sym(w1: f64) -> Scalar {
    Scalar::sin(1, 0).scale_re(w1 * 3f64.sqrt())
}

/// `Υ_{k⊥}(ξ) = 2cos(2πξ)e^{2πik⊥} + 1`.
pub fn upsilon(k_perp: f64) -> Scalar {
    Scalar::cos(0, 1).scale(Complex64::from_polar(2.0, 2.0 * PI * k_perp)).add(&Scalar::real(1.0))
}

fn zero4() -> Vec<Vec<Complex64>> {
    vec![vec![c(0.0, 0.0); 4]; 4]
}

/// `𝐭(k⊥) = cos(2πk⊥)γ₁₅ + sin(2πk⊥)γ₂₅`.
pub fn t_perp(k_perp: f64) -> Vec<Vec<Complex64>> {
    let (s, co) = (2.0 * PI * k_perp).sin_cos();
    let mut m = zero4();
    for b in [0, 2] {
        m[b][b + 1] = c(co, -s);
        m[b + 1][b] = c(co, s);
    }
    m
}

/// `𝐭₀ = γ₁₅`.
pub fn t_zero() -> Vec<Vec<Complex64>> {
    t_perp(0.0)
}

/// `V_w(x) = w₀ V_ac(x) + w₁ V_c(x)`.
pub fn potential(w0: f64, w1: f64) -> PhaseSpaceSymbol {
    let mut v = PhaseSpaceSymbol::zeros(4);
    let uac = u_ac().scale_re(w0);
    for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
        v.set(i, j, uac.clone());
    }
    let up = u_c(1.0).scale_re(w1);
    let um = u_c(-1.0).scale_re(w1);
    v.set(0, 3, v.get(0, 3).add(&um));
    v.set(3, 0, v.get(3, 0).add(&um));
    v.set(1, 2, v.get(1, 2).add(&up));
    v.set(2, 1, v.get(2, 1).add(&up));
    v
}

fn const_sym(m: &[Vec<Complex64>], s: &Scalar) -> PhaseSpaceSymbol {
    let rows = m.iter().map(|r| r.iter().map(|&z| if z == c(0.0, 0.0) { Scalar::zero() } else { s.scale(z) }).collect()).collect();
    PhaseSpaceSymbol::from_rows(rows)
}

/// Discrete model symbol `2𝐭(k⊥)cos(2πξ) + 𝐭₀ + V_w(x)`.
pub fn harper_symbol(p: &ModelParams) -> PhaseSpaceSymbol {
    let kin = const_sym(&t_perp(p.k_perp), &Scalar::cos(0, 1).scale_re(2.0));
    let t0 = PhaseSpaceSymbol::constant(&t_zero());
    kin.add(&t0).and_then(|s| s.add(&potential(p.w0, p.w1))).expect("4x4")
}

/// `ξ + k_x ± i k⊥` with `k_x = h·κ` carried at grade `h¹`.
fn dirac_entry(p: &ModelParams, sign: f64) -> Scalar {
    let mut s = Scalar::xi().add(&Scalar::constant(c(0.0, sign * p.k_perp)));
    let kappa = p.kappa();
    if kappa != 0.0 {
        s.add_term(Grade::new(2), Monomial::ONE, c(kappa, 0.0));
    }
    s
}

/// Low-energy Bloch-fiber symbol with `hD + k_x ∓ i k⊥` kinetic blocks.
pub fn lowenergy_symbol(p: &ModelParams) -> PhaseSpaceSymbol {
    let mut s = potential(p.w0, p.w1);
    let minus = dirac_entry(p, -1.0);
    let plus = dirac_entry(p, 1.0);
    for b in [0, 2] {
        s.set(b, b + 1, s.get(b, b + 1).add(&minus));
        s.set(b + 1, b, s.get(b + 1, b).add(&plus));
    }
    s
}

/// Constant factors of `D = ½ A M B`.
pub fn reduction_a() -> Vec<Vec<Complex64>> {
    vec![vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(0.0, -1.0), c(1.0, 0.0)]]
}

pub fn reduction_b() -> Vec<Vec<Complex64>> {
    vec![vec![c(0.0, -1.0), c(0.0, 1.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]
}

/// `D = ½ A [[Υ, w₁U⁺],[w₁U⁻, Υ]] B` for a diagonal kinetic entry `Υ`.
pub fn chiral_d(kinetic: &Scalar, w1: f64) -> PhaseSpaceSymbol {
    let m = PhaseSpaceSymbol::from_rows(vec![
        vec![kinetic.clone(), u_c(1.0).scale_re(w1)],
        vec![u_c(-1.0).scale_re(w1), kinetic.clone()],
    ]);
    let half_a: Vec<Vec<Complex64>> = reduction_a().iter().map(|r| r.iter().map(|z| z * 0.5).collect()).collect();
    m.conjugate_const(&half_a, &reduction_b()).expect("2x2")
}

pub fn chiral_d_harper(p: &ModelParams) -> PhaseSpaceSymbol {
    chiral_d(&upsilon(p.k_perp), p.w1)
}

pub fn chiral_d_lowenergy(p: &ModelParams) -> PhaseSpaceSymbol {
    chiral_d(&dirac_entry(p, 1.0), p.w1)
}

/// `[[0, D], [D*, 0]]`.
pub fn chiral_block_form(d: &PhaseSpaceSymbol) -> PhaseSpaceSymbol {
    let ds = d.adjoint();
    let mut s = PhaseSpaceSymbol::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            s.set(i, j + 2, d.get(i, j).clone());
            s.set(i + 2, j, ds.get(i, j).clone());
        }
    }
    s
}

/// Exact symbol of `diag(DD*, D*D)`.
pub fn chiral_squared(d: &PhaseSpaceSymbol) -> PhaseSpaceSymbol {
    let ds = d.adjoint();
    let top = d.moyal(&ds, Order::Exact).expect("2x2");
    let bottom = ds.moyal(d, Order::Exact).expect("2x2");
    let mut s = PhaseSpaceSymbol::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            s.set(i, j, top.get(i, j).clone());
            s.set(i + 2, j + 2, bottom.get(i, j).clone());
        }
    }
    s
}

pub fn chiral_harper_squared(p: &ModelParams) -> Result<PhaseSpaceSymbol> {
    require_chiral(p)?;
    Ok(chiral_squared(&chiral_d_harper(p)))
}

pub fn chiral_lowenergy_squared(p: &ModelParams) -> Result<PhaseSpaceSymbol> {
    require_chiral(p)?;
    Ok(chiral_squared(&chiral_d_lowenergy(p)))
}

fn require_chiral(p: &ModelParams) -> Result<()> {
    if !p.is_chiral() {
        return Err(Error::InvalidParams(format!("chiral reduction needs w0 = 0, got {}", p.w0)));
    }
    Ok(())
}

/// Upper-left 2×2 block.
pub fn block11(s: &PhaseSpaceSymbol) -> PhaseSpaceSymbol {
    s.block(&[0, 1])
}

/// Constant unitary diagonalizing the anti-chiral discrete symbol.
pub fn antichiral_unitary() -> Vec<Vec<Complex64>> {
    let r = [[1.0, -1.0, -1.0, 1.0], [-1.0, 1.0, -1.0, 1.0], [-1.0, -1.0, 1.0, 1.0], [1.0, 1.0, 1.0, 1.0]];
    r.iter().map(|row| row.iter().map(|&v| c(0.5 * v, 0.0)).collect()).collect()
}

fn half_integer_sign(k_perp: f64) -> Result<f64> {
    let twice = 2.0 * k_perp;
    if (twice - twice.round()).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!("k_perp = {k_perp} is not in Z/2")));
    }
    Ok(if (twice.round() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 })
}

/// Diagonal entries of the conjugated anti-chiral discrete symbol.
pub fn antichiral_diag(p: &ModelParams) -> Result<[Scalar; 4]> {
    if !p.is_antichiral() {
        return Err(Error::InvalidParams(format!("anti-chiral reduction needs w1 = 0, got {}", p.w1)));
    }
    let sgn = half_integer_sign(p.k_perp)?;
    let kin = Scalar::real(1.0).add(&Scalar::cos(0, 1).scale_re(2.0 * sgn));
    let pot = u_ac().scale_re(p.w0);
    Ok([
        kin.scale_re(-1.0).sub(&pot),
        kin.scale_re(-1.0).add(&pot),
        kin.sub(&pot),
        kin.add(&pot),
    ])
}

/// Bottoms `c_j` of the anti-chiral diagonal entries.
pub fn antichiral_minima(w0: f64) -> [f64; 4] {
    [-3.0 - 3.0 * w0, -3.0 - w0, -1.0 - 3.0 * w0, -1.0 - w0]
}

/// Location `(x_j, ξ_j)` of each anti-chiral minimum.
pub fn antichiral_wells(k_perp: f64) -> Result<[(f64, f64); 4]> {
    let sgn = half_integer_sign(k_perp)?;
    Ok(if sgn > 0.0 {
        [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
    } else {
        [(0.0, 0.5), (0.5, 0.5), (0.0, 0.0), (0.5, 0.0)]
    })
}

/// Diagonal entries of the low-energy anti-chiral symbol.
pub fn lowenergy_antichiral_diag(p: &ModelParams) -> [Scalar; 4] {
    let xi = Scalar::xi();
    let pot = u_ac().scale_re(p.w0);
    let kx = Scalar::graded_term(c(p.kappa(), 0.0), Grade::new(2), Monomial::ONE);
    [
        xi.scale_re(-1.0).sub(&pot).sub(&kx),
        xi.scale_re(-1.0).add(&pot).sub(&kx),
        xi.sub(&pot).add(&kx),
        xi.add(&pot).add(&kx),
    ]
}
