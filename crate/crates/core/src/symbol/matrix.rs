use super::scalar::{Grade, Monomial, Order, Scalar};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Square matrix of scalar symbols, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceSymbol {
    dim: usize,
    entries: Vec<Scalar>,
}

/// Dense complex matrix returned by pointwise evaluation.
pub type CMat = Vec<Vec<Complex64>>;

impl PhaseSpaceSymbol {
    pub fn zeros(dim: usize) -> Self {
        PhaseSpaceSymbol { dim, entries: vec![Scalar::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar_times_identity(&Scalar::real(1.0), dim)
    }

    pub fn scalar_times_identity(s: &Scalar, dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.set(i, i, s.clone());
        }
        out
    }

    pub fn scalar(s: Scalar) -> Self {
        PhaseSpaceSymbol { dim: 1, entries: vec![s] }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "rows must be square");
            entries.extend(r);
        }
        PhaseSpaceSymbol { dim, entries }
    }

    /// Constant complex matrix.
    pub fn constant(m: &[Vec<Complex64>]) -> Self {
        let rows = m.iter().map(|r| r.iter().map(|&v| Scalar::constant(v)).collect()).collect();
        Self::from_rows(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        self.entries[i * self.dim + j] = s;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        PhaseSpaceSymbol { dim: self.dim, entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect();
        Ok(PhaseSpaceSymbol { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect();
        Ok(PhaseSpaceSymbol { dim: self.dim, entries })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.map(|s| s.scale(k))
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.map(|s| s.scale_re(k))
    }

    pub fn truncate(&self, max_half_order: u32) -> Self {
        self.map(|s| s.truncate(max_half_order))
    }

    pub fn expand_hphase(&self, max_half_order: u32) -> Self {
        self.map(|s| s.expand_hphase(max_half_order))
    }

    pub fn grade_part(&self, half_order: u32) -> Self {
        self.map(|s| s.grade_part(half_order))
    }

    pub fn max_half_order(&self) -> u32 {
        self.entries.iter().map(Scalar::max_half_order).max().unwrap_or(0)
    }

    pub fn has_hphase(&self) -> bool {
        self.entries.iter().any(Scalar::has_hphase)
    }

    pub fn is_polynomial(&self) -> bool {
        self.entries.iter().all(Scalar::is_polynomial)
    }

    /// Pointwise conjugate transpose; the Weyl symbol of the adjoint operator.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    fn product(&self, other: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let mut acc = Scalar::zero();
                for j in 0..d {
                    let a = self.get(i, j);
                    let b = other.get(j, k);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&f(a, b));
                }
                out.set(i, k, acc);
            }
        }
        Ok(out)
    }

    /// Matrix Moyal product.
    pub fn moyal(&self, other: &Self, order: Order) -> Result<Self> {
        self.product(other, |a, b| a.moyal(b, order))
    }

    /// Pointwise matrix product (grade-zero part of the Moyal product).
    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        self.product(other, |a, b| a.mul(b))
    }

    pub fn commutator(&self, other: &Self, order: Order) -> Result<Self> {
        self.moyal(other, order)?.sub(&other.moyal(self, order)?)
    }

    pub fn anticommutator(&self, other: &Self, order: Order) -> Result<Self> {
        self.moyal(other, order)?.add(&other.moyal(self, order)?)
    }

    pub fn taylor(&self, x0: f64, xi0: f64, degree: u32) -> Self {
        self.map(|s| s.taylor(x0, xi0, degree))
    }

    /// Sub-block with the given row/column index sets.
    pub fn block(&self, idx: &[usize]) -> Self {
        let rows = idx.iter().map(|&i| idx.iter().map(|&j| self.get(i, j).clone()).collect()).collect();
        Self::from_rows(rows)
    }

    /// Conjugation by constant matrices: `left · S · right`.
    pub fn conjugate_const(&self, left: &[Vec<Complex64>], right: &[Vec<Complex64>]) -> Result<Self> {
        let l = Self::constant(left);
        let r = Self::constant(right);
        l.mul_pointwise(self)?.mul_pointwise(&r)
    }

    pub fn eval(&self, x: f64, xi: f64, h: f64) -> CMat {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| self.get(i, j).eval(x, xi, h)).collect()).collect()
    }

    /// Grade-zero part evaluated pointwise (h-phases dropped).
    pub fn eval_principal(&self, x: f64, xi: f64) -> CMat {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.get(i, j).grade_part(0).eval(x, xi, 0.0)).collect())
            .collect()
    }

    /// Closed-form eigenvalues of the Hermitian 2×2 principal part, ascending.
    pub fn principal_eigenvalues(&self, x: f64, xi: f64) -> Result<(f64, f64)> {
        if self.dim != 2 {
            return Err(Error::Form(format!("principal eigenvalues need a 2x2 block, got {}", self.dim)));
        }
        let m = self.eval_principal(x, xi);
        Ok(eig2_hermitian(&m))
    }

    /// Determinant of the principal part (real part; Hermitian inputs give a real value).
    pub fn det_principal(&self, x: f64, xi: f64) -> f64 {
        det(&self.eval_principal(x, xi)).re
    }

    /// Largest pointwise deviation from Hermiticity over the given sample points.
    pub fn hermiticity_defect(&self, points: &[(f64, f64)], h: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for &(x, xi) in points {
            let m = self.eval(x, xi, h);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    worst = worst.max((m[i][j] - m[j][i].conj()).norm());
                }
            }
        }
        worst
    }

    pub fn grades(&self) -> Vec<Grade> {
        let mut g: Vec<Grade> = self.entries.iter().flat_map(|s| s.grades()).collect();
        g.sort();
        g.dedup();
        g
    }

    /// Coefficient of a polynomial monomial, as a matrix.
    pub fn coeff_matrix(&self, grade: Grade, mono: Monomial) -> CMat {
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|j| self.get(i, j).coeff(grade, mono)).collect()).collect()
    }
}

pub fn eig2_hermitian(m: &CMat) -> (f64, f64) {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = m[0][1];
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - r, mean + r)
}

/// Determinant by cofactor expansion; used only for d ≤ 4.
pub fn det(m: &CMat) -> Complex64 {
    let n = m.len();
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let minor: CMat = (1..n)
                    .map(|i| (0..n).filter(|&k| k != j).map(|k| m[i][k]).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += m[0][j] * det(&minor) * sign;
            }
            acc
        }
    }
}
