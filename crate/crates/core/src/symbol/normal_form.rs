use super::matrix::PhaseSpaceSymbol;
use super::scalar::{Grade, Monomial, Scalar};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Candidate well: location, quadratic coefficients and normal-form data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellCandidate {
    pub x0: f64,
    pub xi0: f64,
    /// Coefficient of `(ξ−ξ₀)²` in the principal symbol.
    pub a: f64,
    /// Coefficient of `(x−x₀)²` in the principal symbol.
    pub b: f64,
    pub degenerate: bool,
    pub omega: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl WellCandidate {
    pub fn at(x0: f64, xi0: f64) -> Self {
        WellCandidate { x0, xi0, a: 1.0, b: 1.0, degenerate: true, omega: 1.0, mu1: 0.0, mu2: 0.0 }
    }
}

/// Rescaled symbol `T = Σ_j h^{(j+2)/2} T_j(y, η)`; grade `half_order = j+2` holds `T_j`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub omega: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub series: PhaseSpaceSymbol,
    pub order: u32,
}

impl NormalForm {
    /// `T_j` as a 2×2 polynomial symbol at grade zero.
    pub fn t(&self, j: u32) -> PhaseSpaceSymbol {
        self.series.grade_part(j + 2)
    }

    /// Pure harmonic normal form with no corrections.
    pub fn harmonic(omega: f64, mu1: f64, mu2: f64) -> Self {
        NormalForm { omega, mu1, mu2, series: t0_symbol(omega, mu1, mu2), order: 0 }
    }

    /// Append a correction `T_j` (given at grade zero).
    pub fn with_term(mut self, j: u32, tj: &PhaseSpaceSymbol) -> Self {
        let shifted = PhaseSpaceSymbol::from_rows(
            (0..2).map(|r| (0..2).map(|c| tj.get(r, c).shift_half_order(j + 2)).collect()).collect(),
        );
        self.series = self.series.add(&shifted).expect("2x2 symbols");
        self.order = self.order.max(j);
        self
    }
}

/// `diag(η²+ω²y²+μ₁, η²+ω²y²+μ₂)` placed at grade `h¹`.
pub fn t0_symbol(omega: f64, mu1: f64, mu2: f64) -> PhaseSpaceSymbol {
    let g = Grade::new(2);
    let mut rows = vec![vec![Scalar::zero(), Scalar::zero()], vec![Scalar::zero(), Scalar::zero()]];
    for (i, mu) in [mu1, mu2].into_iter().enumerate() {
        let mut s = Scalar::zero();
        s.add_term(g, Monomial::new(0, 2, 0, 0), Complex64::new(1.0, 0.0));
        s.add_term(g, Monomial::new(2, 0, 0, 0), Complex64::new(omega * omega, 0.0));
        s.add_term(g, Monomial::new(0, 0, 0, 0), Complex64::new(mu, 0.0));
        rows[i][i] = s;
    }
    PhaseSpaceSymbol::from_rows(rows)
}

/// Substitute `(x, ξ) = (x₀ + h^½ y, ξ₀ + h^½ η)` and collect `T_0..T_k`.
///
/// The symbol must already be normalized so that the `(ξ−ξ₀)²` coefficient is 1.
pub fn rescale_to_well(s: &PhaseSpaceSymbol, well: &WellCandidate, k: u32) -> Result<NormalForm> {
    if s.dim() != 2 {
        return Err(Error::Form(format!("normal form needs a 2x2 block, got {}", s.dim())));
    }
    let top = k + 2;
    let expanded = s.expand_hphase(top);
    let taylor = expanded.taylor(well.x0, well.xi0, top);
    let scale = taylor.entries().iter().map(Scalar::max_abs_coeff).fold(1.0, f64::max);
    let tol = 1e-9 * scale;

    let mut rows = vec![vec![Scalar::zero(), Scalar::zero()], vec![Scalar::zero(), Scalar::zero()]];
    for r in 0..2 {
        for c in 0..2 {
            for (g, m, v) in taylor.get(r, c).iter() {
                let d = m.a + m.b;
                let total = g.half_order + d;
                if total < 2 {
                    if v.norm() > tol {
                        return Err(Error::Form(format!(
                            "symbol does not vanish to second order at the well (entry {r}{c}, y^{} eta^{} at h^{}/2: {v:.3e})",
                            m.a, m.b, g.half_order
                        )));
                    }
                    continue;
                }
                let j = total - 2;
                if j <= k {
                    rows[r][c].add_term(Grade::new(j + 2), m, v);
                }
            }
        }
    }
    let series = PhaseSpaceSymbol::from_rows(rows);

    let t0 = series.grade_part(2);
    let one = Complex64::new(1.0, 0.0);
    let coef = |r: usize, c: usize, a: u32, b: u32| t0.get(r, c).coeff(Grade::ZERO, Monomial::new(a, b, 0, 0));
    for (r, c) in [(0, 1), (1, 0)] {
        if t0.get(r, c).max_abs_coeff() > tol {
            return Err(Error::NormalForm(format!("T0 has off-diagonal entry {r}{c}")));
        }
    }
    let mut omega2 = [0.0; 2];
    let mut mu = [0.0; 2];
    for i in 0..2 {
        if (coef(i, i, 0, 2) - one).norm() > 1e-9 {
            return Err(Error::NormalForm(format!("eta^2 coefficient {} is not 1", coef(i, i, 0, 2))));
        }
        if coef(i, i, 1, 1).norm() > tol || coef(i, i, 1, 0).norm() > tol || coef(i, i, 0, 1).norm() > tol {
            return Err(Error::NormalForm("T0 has mixed or linear terms".into()));
        }
        let w2 = coef(i, i, 2, 0);
        let m0 = coef(i, i, 0, 0);
        if w2.im.abs() > tol || m0.im.abs() > tol || w2.re <= 0.0 {
            return Err(Error::NormalForm(format!("T0 coefficients not real positive: {w2}, {m0}")));
        }
        omega2[i] = w2.re;
        mu[i] = m0.re;
    }
    if (omega2[0] - omega2[1]).abs() > 1e-9 * omega2[0].max(1.0) {
        return Err(Error::NormalForm(format!("branches have different frequencies {omega2:?}")));
    }
    check_parity(&series, k, tol)?;
    Ok(NormalForm { omega: omega2[0].sqrt(), mu1: mu[0], mu2: mu[1], series, order: k })
}

/// `T_j` must have total degree of parity `j` and Hermitian coefficient structure.
pub fn check_parity(series: &PhaseSpaceSymbol, k: u32, tol: f64) -> Result<()> {
    for j in 0..=k {
        let tj = series.grade_part(j + 2);
        for r in 0..2 {
            for c in 0..2 {
                for (_, m, v) in tj.get(r, c).iter() {
                    if (m.a + m.b + j) % 2 == 1 && v.norm() > tol {
                        return Err(Error::Parity {
                            grade: j,
                            detail: format!("entry {r}{c} has y^{} eta^{} with coefficient {v:.3e}", m.a, m.b),
                        });
                    }
                }
            }
        }
        let adj = tj.adjoint();
        let diff = tj.sub(&adj)?;
        let defect = diff.entries().iter().map(Scalar::max_abs_coeff).fold(0.0, f64::max);
        if defect > tol {
            return Err(Error::Parity { grade: j, detail: format!("not Hermitian (defect {defect:.3e})") });
        }
    }
    Ok(())
}
