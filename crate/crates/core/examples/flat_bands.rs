//! Relative flatness of the bands next to zero, chiral versus anti-chiral.

use moire_wells::models::ModelParams;
use moire_wells::spectra::{band_sweep, flatness, lowenergy_bloch, lowenergy_window, tight_binding_bloch, uniform_grid};
use std::f64::consts::PI;

fn main() -> moire_wells::Result<()> {
    let h = 1.0 / 60.0;
    let n = lowenergy_window(h);
    for (name, p) in [("chiral", ModelParams::chiral(1.0)), ("anti-chiral", ModelParams::antichiral(1.0))] {
        let bs = band_sweep(|k| lowenergy_bloch(k, h, n, &p), &uniform_grid(0.0, 2.0 * PI * h, 24), serde_json::Value::Null)?;
        let f: Vec<f64> = bs.bands_above_zero(2).iter().map(|&b| flatness(&bs, b, h).relative).collect();
        println!("low-energy h=1/60 {name:>11}: relative flatness {:.3e} / {:.3e}", f[0], f[1]);
        let bs = band_sweep(|k| tight_binding_bloch(1, 30, k, &p), &uniform_grid(0.0, 2.0 * PI, 48), serde_json::Value::Null)?;
        let f: Vec<f64> = bs.bands_above_zero(2).iter().map(|&b| flatness(&bs, b, ModelParams::harper_h(30.0)).relative).collect();
        println!("discrete  L=30   {name:>11}: relative flatness {:.3e} / {:.3e}", f[0], f[1]);
    }
    Ok(())
}
