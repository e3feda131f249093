use crate::error::{Error, Result};
use crate::symbol::{rescale_to_well, Monomial, PhaseSpaceSymbol, Scalar, WellCandidate};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// A located well with its normal-form data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellReport {
    pub model: String,
    #[serde(flatten)]
    pub well: WellCandidate,
    /// Sign of `μ₁` after normalization.
    pub branch: i32,
    /// Scalar divided out so that the `(ξ−ξ₀)²` coefficient is 1.
    pub normalization: f64,
}

/// Search window and tolerances for `find_wells`.
#[derive(Clone, Debug)]
pub struct WellSearch {
    pub x_range: (f64, f64),
    pub xi_range: (f64, f64),
    pub grid: usize,
    pub tol: f64,
    pub probe_radius: f64,
    /// Order of the normal form computed for each well.
    pub order: u32,
}

impl Default for WellSearch {
    fn default() -> Self {
        WellSearch { x_range: (-0.5, 0.5), xi_range: (-0.5, 0.5), grid: 256, tol: 1e-10, probe_radius: 1e-3, order: 2 }
    }
}

/// Polyline traced through a zero set; `closed` when it returns to its start.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

fn trace_scalar(s: &PhaseSpaceSymbol) -> Scalar {
    s.get(0, 0).add(s.get(1, 1)).grade_part(0)
}

struct Smooth {
    f: Scalar,
    fx: Scalar,
    fxi: Scalar,
    fxx: Scalar,
    fxxi: Scalar,
    fxixi: Scalar,
}

impl Smooth {
    fn new(f: Scalar) -> Self {
        let fx = f.dx();
        let fxi = f.dxi();
        Smooth { fxx: fx.dx(), fxxi: fx.dxi(), fxixi: fxi.dxi(), fx, fxi, f }
    }

    fn val(&self, s: &Scalar, x: f64, xi: f64) -> f64 {
        s.eval(x, xi, 0.0).re
    }

    /// Newton iteration on the gradient.
    fn newton(&self, mut x: f64, mut xi: f64, tol: f64) -> (f64, f64) {
        for _ in 0..60 {
            let gx = self.val(&self.fx, x, xi);
            let gy = self.val(&self.fxi, x, xi);
            let a = self.val(&self.fxx, x, xi);
            let b = self.val(&self.fxxi, x, xi);
            let d = self.val(&self.fxixi, x, xi);
            let det = a * d - b * b;
            if det.abs() < 1e-300 {
                break;
            }
            let dx = (d * gx - b * gy) / det;
            let dy = (a * gy - b * gx) / det;
            x -= dx;
            xi -= dy;
            if dx.hypot(dy) < tol {
                break;
            }
        }
        (x, xi)
    }
}

/// Locate degenerate wells of a 2×2 positive semi-definite symbol.
///
/// Wells are zeros of the trace of the principal part (both eigenvalues vanish),
/// found as grid minima and refined by Newton's method.
pub fn find_wells(s: &PhaseSpaceSymbol, model: &str, search: &WellSearch) -> Result<Vec<WellReport>> {
    if s.dim() != 2 {
        return Err(Error::Form(format!("find_wells needs a 2x2 block, got {}", s.dim())));
    }
    let tr = Smooth::new(trace_scalar(s));
    let n = search.grid;
    let (x0, x1) = search.x_range;
    let (y0, y1) = search.xi_range;
    let xs: Vec<f64> = (0..=n).map(|i| x0 + (x1 - x0) * i as f64 / n as f64).collect();
    let ys: Vec<f64> = (0..=n).map(|i| y0 + (y1 - y0) * i as f64 / n as f64).collect();
    let grid: Vec<Vec<f64>> = xs.iter().map(|&x| ys.iter().map(|&y| tr.val(&tr.f, x, y)).collect()).collect();
    let scale = grid.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);

    let mut found: Vec<WellReport> = Vec::new();
    for i in 1..n {
        for j in 1..n {
            let v = grid[i][j];
            let is_min = (-1i32..=1).all(|di| {
                (-1i32..=1).all(|dj| (di == 0 && dj == 0) || grid[(i as i32 + di) as usize][(j as i32 + dj) as usize] >= v)
            });
            if !is_min || v > 0.05 * scale {
                continue;
            }
            let (x, xi) = tr.newton(xs[i], ys[j], search.tol);
            if tr.val(&tr.f, x, xi).abs() > 1e-8 * scale {
                continue;
            }
            if found.iter().any(|w| (w.well.x0 - x).hypot(w.well.xi0 - xi) < 1e-6) {
                continue;
            }
            let (lo, hi) = s.principal_eigenvalues(x, xi)?;
            if lo.abs().max(hi.abs()) > 1e-8 * scale {
                continue;
            }
            let r = search.probe_radius;
            let mut gap = f64::INFINITY;
            for k in 0..64 {
                let t = 2.0 * PI * k as f64 / 64.0;
                let (l, _) = s.principal_eigenvalues(x + r * t.cos(), xi + r * t.sin())?;
                gap = gap.min(l);
            }
            if gap < 1e-8 {
                return Err(Error::ClassificationAmbiguous { x, xi, gap });
            }
            found.push(classify(s, model, x, xi, search.order)?);
        }
    }
    found.sort_by(|a, b| (a.well.x0, a.well.xi0).partial_cmp(&(b.well.x0, b.well.xi0)).unwrap());
    Ok(found)
}

/// Quadratic coefficients and normal form at a known zero.
pub fn classify(s: &PhaseSpaceSymbol, model: &str, x0: f64, xi0: f64, order: u32) -> Result<WellReport> {
    let t = trace_scalar(s).taylor(x0, xi0, 2);
    let a = 0.5 * t.coeff(crate::symbol::Grade::ZERO, Monomial::new(0, 2, 0, 0)).re;
    let b = 0.5 * t.coeff(crate::symbol::Grade::ZERO, Monomial::new(2, 0, 0, 0)).re;
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::NormalForm(format!("well at ({x0}, {xi0}) is not quadratic: a={a}, b={b}")));
    }
    let mut cand = WellCandidate { x0, xi0, a, b, degenerate: true, omega: 0.0, mu1: 0.0, mu2: 0.0 };
    let nf = rescale_to_well(&s.scale_re(1.0 / a), &cand, order)?;
    cand.omega = nf.omega;
    cand.mu1 = nf.mu1;
    cand.mu2 = nf.mu2;
    let branch = if nf.mu1 >= 0.0 { 1 } else { -1 };
    Ok(WellReport { model: model.to_string(), well: cand, branch, normalization: a })
}

/// Marching-squares trace of `{f = 0}` on a grid; `periodic` glues opposite edges.
pub fn zero_set_curves(
    f: impl Fn(f64, f64) -> f64,
    x_range: (f64, f64),
    xi_range: (f64, f64),
    n: usize,
    periodic: bool,
) -> Vec<Polyline> {
    let (x0, x1) = x_range;
    let (y0, y1) = xi_range;
    let hx = (x1 - x0) / n as f64;
    let hy = (y1 - y0) / n as f64;
    let nodes = if periodic { n } else { n + 1 };
    let vals: Vec<Vec<f64>> = (0..nodes)
        .map(|i| (0..nodes).map(|j| f(x0 + hx * i as f64, y0 + hy * j as f64)).collect())
        .collect();
    let at = |i: usize, j: usize| vals[i % nodes][j % nodes];

    // edge key: (i, j, dir) with dir 0 along x from node (i,j), 1 along xi
    type Edge = (usize, usize, u8);
    let norm = |e: Edge| -> Edge { if periodic { (e.0 % n, e.1 % n, e.2) } else { e } };
    let crossing = |e: Edge| -> Option<(f64, f64)> {
        let (i, j, d) = e;
        let (a, b) = if d == 0 { (at(i, j), at(i + 1, j)) } else { (at(i, j), at(i, j + 1)) };
        if (a >= 0.0) == (b >= 0.0) {
            return None;
        }
        let t = a / (a - b);
        Some(if d == 0 {
            (x0 + hx * (i as f64 + t), y0 + hy * j as f64)
        } else {
            (x0 + hx * i as f64, y0 + hy * (j as f64 + t))
        })
    };

    let mut adj: HashMap<Edge, Vec<Edge>> = HashMap::new();
    let mut pos: HashMap<Edge, (f64, f64)> = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            let edges = [(i, j, 0u8), (i + 1, j, 1u8), (i, j + 1, 0u8), (i, j, 1u8)];
            let hits: Vec<Edge> = edges.iter().copied().filter(|&e| crossing(e).is_some()).collect();
            for &e in &hits {
                pos.entry(norm(e)).or_insert_with(|| crossing(e).unwrap());
            }
            let pairs: Vec<(Edge, Edge)> = match hits.len() {
                2 => vec![(hits[0], hits[1])],
                4 => {
                    let centre = 0.25 * (at(i, j) + at(i + 1, j) + at(i, j + 1) + at(i + 1, j + 1));
                    if (centre >= 0.0) == (at(i, j) >= 0.0) {
                        vec![(hits[0], hits[1]), (hits[2], hits[3])]
                    } else {
                        vec![(hits[0], hits[3]), (hits[1], hits[2])]
                    }
                }
                _ => vec![],
            };
            for (a, b) in pairs {
                let (a, b) = (norm(a), norm(b));
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
    }

    let mut keys: Vec<Edge> = adj.keys().copied().collect();
    keys.sort();
    let mut seen: std::collections::HashSet<Edge> = std::collections::HashSet::new();
    let mut out = Vec::new();
    // open chains first start at degree-1 ends
    let mut starts: Vec<Edge> = keys.iter().copied().filter(|k| adj[k].len() == 1).collect();
    starts.extend(keys.iter().copied());
    for start in starts {
        if seen.contains(&start) {
            continue;
        }
        let mut chain = vec![start];
        seen.insert(start);
        let mut prev: Option<Edge> = None;
        let mut cur = start;
        let mut closed = false;
        loop {
            let next = adj[&cur].iter().copied().find(|e| Some(*e) != prev && !seen.contains(e));
            match next {
                Some(e) => {
                    seen.insert(e);
                    chain.push(e);
                    prev = Some(cur);
                    cur = e;
                }
                None => {
                    if chain.len() > 2 && adj[&cur].contains(&start) {
                        closed = true;
                    }
                    break;
                }
            }
        }
        out.push(Polyline { points: chain.iter().map(|e| pos[e]).collect(), closed });
    }
    out
}
