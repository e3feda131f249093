//! Exact Moyal products of trigonometric symbols and the chiral bracket identities.

use moire_wells::symbol::{Order, Scalar};
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() {
    let h = 1.0 / 60.0;
    let (x, xi) = (0.17, -0.31);

    let cxx = Scalar::x().commutator(&Scalar::xi(), Order::Exact);
    println!("[x, xi]_# = {}", cxx.eval(x, xi, h));

    // {ig, Υ}-type brackets for w1 = 1
    let g = Scalar::sin(1, 0).scale_re(3f64.sqrt());
    let ig = g.scale(Complex64::new(0.0, 1.0));
    let ups = Scalar::cos(0, 1).scale_re(2.0).add(&Scalar::real(1.0));
    let comm = ig.commutator(&ups, Order::Exact);
    let closed = 4.0 * 3f64.sqrt() * (2.0 * PI * x).cos() * (2.0 * PI * xi).sin() * (2.0 * PI * PI * h).sin();
    println!("[ig, Υ]_# at ({x}, {xi}) = {:.15e}", comm.eval(x, xi, h).re);
    println!("closed form           = {closed:.15e}");

    for half in [2u32, 6, 10, 18] {
        let t = ig.commutator(&ups, Order::Truncate(half));
        println!("truncated at h^{:<2}: error {:.2e}", half / 2, (t.eval(x, xi, h).re - closed).abs());
    }
}
