//! One-well levels of the low-energy chiral model from the massive operator, in units of omega*h.

use faer::Mat;
use moire_wells::models::{block11, chiral_lowenergy_squared, ModelParams};
use moire_wells::spectra::{circle_quantize, lowenergy_window, massive_operator, Closure, Cutoff, Layout, OperatorMatrix, XCutoff};
use std::f64::consts::PI;

fn main() -> moire_wells::Result<()> {
    let omega = 2.0 * PI * 3f64.sqrt();
    for l in [60.0, 120.0, 240.0] {
        let h = 1.0 / l;
        let p = ModelParams { h, ..ModelParams::chiral(1.0) };
        let closure = Closure::Window(lowenergy_window(h));
        let m = circle_quantize(&block11(&chiral_lowenergy_squared(&p)?), h, closure)?;
        // the mass must sit above the levels of interest
        let mass = 1.0f64.max(24.0 * omega * h);
        let n = m.size();
        let scaled = OperatorMatrix::new(Mat::from_fn(n, n, |i, j| m.matrix[(i, j)] / mass), m.provenance.clone());
        let cut = Cutoff { x: XCutoff::FlatTop { order: 200, half_width: 0.22, edge: 0.02 }, rho: f64::INFINITY, xi_period: None };
        let ev = massive_operator(&scaled, &Layout { h, closure, components: 2 }, 0.0, 0.0, &cut)?.eigenvalues()?;
        let lv: Vec<String> = ev.iter().take(7).map(|v| format!("{:.3}", v * mass / (omega * h))).collect();
        println!("h=1/{l}: {}", lv.join(" "));
    }
    Ok(())
}
