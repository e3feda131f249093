use super::{t_perp, t_zero, ModelParams};
use crate::error::{Error, Result};
use crate::symbol::{PhaseSpaceSymbol, Scalar};
use num_complex::Complex64;
use std::f64::consts::PI;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Semiclassical parameter of the discrete model whose shift is `p/q + 2πh'`.
pub fn commensurable_h(p: i64, q: i64, h_prime: f64) -> f64 {
    (p as f64 / q as f64 + 2.0 * PI * h_prime) / (2.0 * PI)
}

/// Unfolded `4q × 4q` symbol in `(x, ξ')` near the commensurable shift `p/q`.
///
/// Layout is `a·q + i` (spinor component `a`, sublattice `i`). The kinetic part
/// is `𝐭 ⊗ (e^{2πix}J* + e^{−2πix}J) + 𝐭₀ ⊗ I` with `J = diag(e^{2πi·ip/q})`,
/// and the potential is `Ṽ(ξ')` built from the cyclic shift `K`.
pub fn commensurable_unfold(p: i64, q: i64, params: &ModelParams) -> Result<PhaseSpaceSymbol> {
    if q < 1 || gcd(p, q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    let q = q as usize;
    let d = 4 * q;
    let mut s = PhaseSpaceSymbol::zeros(d);
    let idx = |a: usize, i: usize| a * q + i;
    let add = |s: &mut PhaseSpaceSymbol, r: usize, c: usize, v: &Scalar| {
        let cur = s.get(r, c).add(v);
        s.set(r, c, cur);
    };

    let t = t_perp(params.k_perp);
    let t0 = t_zero();
    for i in 0..q {
        let j = Complex64::from_polar(1.0, 2.0 * PI * (i as f64) * (p as f64) / q as f64);
        let hop = Scalar::phase(1, 0).scale(j.conj()).add(&Scalar::phase(-1, 0).scale(j));
        for a in 0..4 {
            for b in 0..4 {
                if t[a][b] != Complex64::new(0.0, 0.0) {
                    add(&mut s, idx(a, i), idx(b, i), &hop.scale(t[a][b]));
                }
                if t0[a][b] != Complex64::new(0.0, 0.0) {
                    add(&mut s, idx(a, i), idx(b, i), &Scalar::constant(t0[a][b]));
                }
            }
        }
    }

    // q×q blocks of Û, Û+ and Û− as functions of ξ'
    let sq3 = 3f64.sqrt();
    let block = |kind: i32, i: usize, j: usize| -> Scalar {
        let mut v = Scalar::zero();
        if i == j {
            v = v.add(&Scalar::real(1.0));
        }
        // e^{2πiξ'} K has K[i][i+1]; its adjoint sits at [i+1][i]
        let fwd = (i + 1) % q == j;
        let bwd = (j + 1) % q == i;
        let (cf, cb) = match kind {
            0 => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
            // −X/2 ± √3 Y with Y = (e K − ē K*)/(2i)
            sg => {
                let sg = sg as f64;
                (Complex64::new(-0.5, -0.5 * sg * sq3), Complex64::new(-0.5, 0.5 * sg * sq3))
            }
        };
        if fwd {
            v = v.add(&Scalar::phase(0, 1).scale(cf));
        }
        if bwd {
            v = v.add(&Scalar::phase(0, -1).scale(cb));
        }
        v
    };
    for i in 0..q {
        for j in 0..q {
            let uac = block(0, i, j).scale_re(params.w0);
            for (a, b) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
                add(&mut s, idx(a, i), idx(b, j), &uac);
            }
            let up = block(1, i, j).scale_re(params.w1);
            let um = block(-1, i, j).scale_re(params.w1);
            add(&mut s, idx(0, i), idx(3, j), &um);
            add(&mut s, idx(3, i), idx(0, j), &um);
            add(&mut s, idx(1, i), idx(2, j), &up);
            add(&mut s, idx(2, i), idx(1, j), &up);
        }
    }
    Ok(s)
}
