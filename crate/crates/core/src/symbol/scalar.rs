use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Coefficients below this magnitude are dropped on canonicalization.
pub const DROP_TOL: f64 = 1e-14;

/// Unit of the exact h-phase factor `exp(i * HPHASE_UNIT * j * h)` produced
/// when two pure phases are composed.
pub const HPHASE_UNIT: f64 = 2.0 * PI * PI;

/// Position of a term in the h-grading: `h^(half_order/2) * exp(i 2π² hphase h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade {
    pub half_order: u32,
    pub hphase: i32,
}

impl Grade {
    pub const ZERO: Grade = Grade { half_order: 0, hphase: 0 };

    pub fn new(half_order: u32) -> Self {
        Grade { half_order, hphase: 0 }
    }
}

/// `x^a ξ^b e^{2πi(mx+nξ)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub m: i32,
    pub n: i32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { a: 0, b: 0, m: 0, n: 0 };

    pub fn new(a: u32, b: u32, m: i32, n: i32) -> Self {
        Monomial { a, b, m, n }
    }

    pub fn is_polynomial(&self) -> bool {
        self.m == 0 && self.n == 0
    }
}

/// One term `coeff · x^a ξ^b e^{2πi(mx+nξ)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolTerm {
    pub coeff: Complex64,
    pub xdeg: u32,
    pub xideg: u32,
    pub xfreq: i32,
    pub xifreq: i32,
}

/// Truncation policy for products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Keep everything; pure phases compose through the exact h-phase factor.
    Exact,
    /// Keep grades with `half_order <= max`, h-phases expanded as power series.
    Truncate(u32),
}

impl Order {
    fn admits(&self, half_order: u32) -> bool {
        match self {
            Order::Exact => true,
            Order::Truncate(k) => half_order <= *k,
        }
    }
}

/// Scalar symbol: finite sum of graded terms, kept canonical.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scalar {
    terms: BTreeMap<(Grade, Monomial), Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn binom(n: u32, k: u32) -> f64 {
    falling(n, k) / factorial(k)
}

fn cpow(z: Complex64, k: u32) -> Complex64 {
    (0..k).fold(c(1.0, 0.0), |acc, _| acc * z)
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn constant(v: Complex64) -> Self {
        Scalar::term(v, Monomial::ONE)
    }

    pub fn real(v: f64) -> Self {
        Scalar::constant(c(v, 0.0))
    }

    pub fn term(coeff: Complex64, mono: Monomial) -> Self {
        Scalar::graded_term(coeff, Grade::ZERO, mono)
    }

    pub fn graded_term(coeff: Complex64, grade: Grade, mono: Monomial) -> Self {
        let mut s = Scalar::zero();
        s.add_term(grade, mono, coeff);
        s
    }

    pub fn x() -> Self {
        Scalar::term(c(1.0, 0.0), Monomial::new(1, 0, 0, 0))
    }

    pub fn xi() -> Self {
        Scalar::term(c(1.0, 0.0), Monomial::new(0, 1, 0, 0))
    }

    /// `e^{2πi(mx+nξ)}`.
    pub fn phase(m: i32, n: i32) -> Self {
        Scalar::term(c(1.0, 0.0), Monomial::new(0, 0, m, n))
    }

    /// `cos(2π(mx+nξ))`.
    pub fn cos(m: i32, n: i32) -> Self {
        let mut s = Scalar::zero();
        s.add_term(Grade::ZERO, Monomial::new(0, 0, m, n), c(0.5, 0.0));
        s.add_term(Grade::ZERO, Monomial::new(0, 0, -m, -n), c(0.5, 0.0));
        s
    }

    /// `sin(2π(mx+nξ))`.
    pub fn sin(m: i32, n: i32) -> Self {
        let mut s = Scalar::zero();
        s.add_term(Grade::ZERO, Monomial::new(0, 0, m, n), c(0.0, -0.5));
        s.add_term(Grade::ZERO, Monomial::new(0, 0, -m, -n), c(0.0, 0.5));
        s
    }

    pub fn from_terms<I: IntoIterator<Item = SymbolTerm>>(terms: I) -> Self {
        let mut s = Scalar::zero();
        for t in terms {
            s.add_term(Grade::ZERO, Monomial::new(t.xdeg, t.xideg, t.xfreq, t.xifreq), t.coeff);
        }
        s
    }

    pub fn add_term(&mut self, grade: Grade, mono: Monomial, coeff: Complex64) {
        let key = (grade, mono);
        let v = self.terms.entry(key).or_insert(c(0.0, 0.0));
        *v += coeff;
        if v.norm() < DROP_TOL {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Grade, Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(&(g, m), &v)| (g, m, v))
    }

    /// Terms of one grade as plain `SymbolTerm`s.
    pub fn terms_at(&self, grade: Grade) -> Vec<SymbolTerm> {
        self.iter()
            .filter(|(g, _, _)| *g == grade)
            .map(|(_, m, v)| SymbolTerm { coeff: v, xdeg: m.a, xideg: m.b, xfreq: m.m, xifreq: m.n })
            .collect()
    }

    pub fn grades(&self) -> Vec<Grade> {
        let mut g: Vec<Grade> = self.terms.keys().map(|k| k.0).collect();
        g.dedup();
        g.sort();
        g.dedup();
        g
    }

    pub fn max_half_order(&self) -> u32 {
        self.terms.keys().map(|k| k.0.half_order).max().unwrap_or(0)
    }

    pub fn has_hphase(&self) -> bool {
        self.terms.keys().any(|k| k.0.hphase != 0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|k| k.1.is_polynomial())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut s = self.clone();
        for (g, m, v) in other.iter() {
            s.add_term(g, m, v);
        }
        s
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        let mut s = self.clone();
        for (g, m, v) in other.iter() {
            s.add_term(g, m, -v);
        }
        s
    }

    pub fn scale(&self, k: Complex64) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            s.add_term(g, m, v * k);
        }
        s
    }

    pub fn scale_re(&self, k: f64) -> Scalar {
        self.scale(c(k, 0.0))
    }

    /// Multiply by `h^(k/2)`.
    pub fn shift_half_order(&self, k: u32) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            s.add_term(Grade { half_order: g.half_order + k, hphase: g.hphase }, m, v);
        }
        s
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, other: &Scalar) -> Scalar {
        let mut s = Scalar::zero();
        for (g1, m1, v1) in self.iter() {
            for (g2, m2, v2) in other.iter() {
                let g = Grade { half_order: g1.half_order + g2.half_order, hphase: g1.hphase + g2.hphase };
                let m = Monomial::new(m1.a + m2.a, m1.b + m2.b, m1.m + m2.m, m1.n + m2.n);
                s.add_term(g, m, v1 * v2);
            }
        }
        s
    }

    /// Complex conjugate of the function (h real).
    pub fn conj(&self) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            s.add_term(Grade { half_order: g.half_order, hphase: -g.hphase }, Monomial::new(m.a, m.b, -m.m, -m.n), v.conj());
        }
        s
    }

    pub fn eval(&self, x: f64, xi: f64, h: f64) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for (g, m, v) in self.iter() {
            let ph = 2.0 * PI * (m.m as f64 * x + m.n as f64 * xi) + HPHASE_UNIT * g.hphase as f64 * h;
            let mag = h.powf(g.half_order as f64 / 2.0) * x.powi(m.a as i32) * xi.powi(m.b as i32);
            acc += v * Complex64::from_polar(mag, ph);
        }
        acc
    }

    pub fn dx(&self) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            if m.a > 0 {
                s.add_term(g, Monomial::new(m.a - 1, m.b, m.m, m.n), v * m.a as f64);
            }
            if m.m != 0 {
                s.add_term(g, m, v * c(0.0, 2.0 * PI * m.m as f64));
            }
        }
        s
    }

    pub fn dxi(&self) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            if m.b > 0 {
                s.add_term(g, Monomial::new(m.a, m.b - 1, m.m, m.n), v * m.b as f64);
            }
            if m.n != 0 {
                s.add_term(g, m, v * c(0.0, 2.0 * PI * m.n as f64));
            }
        }
        s
    }

    /// Drop grades above `max_half_order`.
    pub fn truncate(&self, max_half_order: u32) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            if g.half_order <= max_half_order {
                s.add_term(g, m, v);
            }
        }
        s
    }

    /// Replace every h-phase factor by its power series in h, truncated.
    pub fn expand_hphase(&self, max_half_order: u32) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            if g.half_order > max_half_order {
                continue;
            }
            if g.hphase == 0 {
                s.add_term(g, m, v);
                continue;
            }
            let z = c(0.0, HPHASE_UNIT * g.hphase as f64);
            let mut k = 0;
            while g.half_order + 2 * k <= max_half_order {
                let coef = v * cpow(z, k) / factorial(k);
                s.add_term(Grade::new(g.half_order + 2 * k), m, coef);
                k += 1;
            }
        }
        s
    }

    /// Terms of a given half order (all h-phases), regraded to order zero.
    pub fn grade_part(&self, half_order: u32) -> Scalar {
        let mut s = Scalar::zero();
        for (g, m, v) in self.iter() {
            if g.half_order == half_order {
                s.add_term(Grade { half_order: 0, hphase: g.hphase }, m, v);
            }
        }
        s
    }

    /// Moyal product `self # other` with `[x, ξ]_# = i h`.
    pub fn moyal(&self, other: &Scalar, order: Order) -> Scalar {
        let mut out = Scalar::zero();
        for (g1, m1, v1) in self.iter() {
            for (g2, m2, v2) in other.iter() {
                moyal_pair(g1, m1, v1, g2, m2, v2, order, &mut out);
            }
        }
        match order {
            Order::Exact => out,
            Order::Truncate(k) => out.expand_hphase(k),
        }
    }

    pub fn commutator(&self, other: &Scalar, order: Order) -> Scalar {
        self.moyal(other, order).sub(&other.moyal(self, order))
    }

    pub fn anticommutator(&self, other: &Scalar, order: Order) -> Scalar {
        self.moyal(other, order).add(&other.moyal(self, order))
    }

    /// Taylor polynomial at `(x0, ξ0)` in the shifted variables `(x−x0, ξ−ξ0)`,
    /// total degree `≤ degree`. Grades are preserved.
    pub fn taylor(&self, x0: f64, xi0: f64, degree: u32) -> Scalar {
        let mut s = Scalar::zero();
        let d = degree as usize;
        for (g, m, v) in self.iter() {
            let px = shifted_series(m.a, m.m, x0, d);
            let pxi = shifted_series(m.b, m.n, xi0, d);
            for (i, cx) in px.iter().enumerate() {
                if cx.norm() == 0.0 {
                    continue;
                }
                for (j, cxi) in pxi.iter().enumerate().take(d + 1 - i) {
                    let coef = v * cx * cxi;
                    if coef.norm() > 0.0 {
                        s.add_term(g, Monomial::new(i as u32, j as u32, 0, 0), coef);
                    }
                }
            }
        }
        s
    }

    /// Coefficient of a polynomial monomial at a grade (zero when absent).
    pub fn coeff(&self, grade: Grade, mono: Monomial) -> Complex64 {
        self.terms.get(&(grade, mono)).copied().unwrap_or(c(0.0, 0.0))
    }
}

/// Coefficients of `(t0 + T)^a e^{2πi m (t0 + T)}` in powers of `T` up to `d`.
fn shifted_series(a: u32, m: i32, t0: f64, d: usize) -> Vec<Complex64> {
    let base = Complex64::from_polar(1.0, 2.0 * PI * m as f64 * t0);
    let mut poly = vec![c(0.0, 0.0); d + 1];
    for i in 0..=(a as usize).min(d) {
        poly[i] = c(binom(a, i as u32) * t0.powi(a as i32 - i as i32), 0.0);
    }
    if m == 0 {
        return poly.into_iter().map(|p| p * base).collect();
    }
    let z = c(0.0, 2.0 * PI * m as f64);
    let expo: Vec<Complex64> = (0..=d).map(|k| cpow(z, k as u32) / factorial(k as u32)).collect();
    let mut out = vec![c(0.0, 0.0); d + 1];
    for i in 0..=d {
        for k in 0..=(d - i) {
            out[i + k] += poly[i] * expo[k];
        }
    }
    out.into_iter().map(|p| p * base).collect()
}

/// Bidifferential expansion of one monomial pair. Polynomial derivatives
/// terminate; the pure-phase part collapses into the h-phase index.
#[allow(clippy::too_many_arguments)]
fn moyal_pair(g1: Grade, m1: Monomial, v1: Complex64, g2: Grade, m2: Monomial, v2: Complex64, order: Order, out: &mut Scalar) {
    let (a, b, m, n) = (m1.a, m1.b, m1.m, m1.n);
    let (cc, d, mp, np) = (m2.a, m2.b, m2.m, m2.n);
    let tpi = 2.0 * PI;
    let f1 = c(0.0, tpi * m as f64);
    let f2 = c(0.0, tpi * np as f64);
    let f3 = c(0.0, -tpi * n as f64);
    let f4 = c(0.0, -tpi * mp as f64);
    let jphase = n * mp - m * np;
    let base_half = g1.half_order + g2.half_order;
    let half_i = c(0.0, 0.5);
    let v = v1 * v2;
    let mono_out = |p: u32, q: u32, r1: u32, r2: u32, r3: u32, r4: u32| {
        Monomial::new(a - p - r2 + cc - q - r3, b - q - r4 + d - p - r1, m + mp, n + np)
    };
    for p in 0..=a.min(d) {
        for q in 0..=b.min(cc) {
            for r2 in 0..=(a - p) {
                if r2 > 0 && np == 0 {
                    break;
                }
                for r1 in 0..=(d - p) {
                    if r1 > 0 && m == 0 {
                        break;
                    }
                    for r4 in 0..=(b - q) {
                        if r4 > 0 && mp == 0 {
                            break;
                        }
                        for r3 in 0..=(cc - q) {
                            if r3 > 0 && n == 0 {
                                break;
                            }
                            let k = p + q + r1 + r2 + r3 + r4;
                            let half = base_half + 2 * k;
                            if !order.admits(half) {
                                continue;
                            }
                            let mut coef = v * cpow(half_i, k);
                            if q % 2 == 1 {
                                coef = -coef;
                            }
                            coef *= cpow(f1, r1) * cpow(f2, r2) * cpow(f3, r3) * cpow(f4, r4);
                            coef /= factorial(p) * factorial(q) * factorial(r1) * factorial(r2) * factorial(r3) * factorial(r4);
                            coef *= falling(a, p + r2) * falling(b, q + r4) * falling(cc, q + r3) * falling(d, p + r1);
                            let g = Grade { half_order: half, hphase: g1.hphase + g2.hphase + jphase };
                            out.add_term(g, mono_out(p, q, r1, r2, r3, r4), coef);
                        }
                    }
                }
            }
        }
    }
}
