//! The pseudodifferential Harper operator on the circle against the union of its Bloch fibers,
//! and the q = 2 commensurable unfolding.

use moire_wells::models::{commensurable_h, commensurable_unfold, harper_symbol, ModelParams};
use moire_wells::spectra::{circle_quantize, directed_hausdorff, tight_binding_bloch, uniform_grid, Closure};
use std::f64::consts::PI;

fn main() -> moire_wells::Result<()> {
    let p = ModelParams::chiral(1.0);
    let h = ModelParams::harper_h(30.0);
    let circle = circle_quantize(&harper_symbol(&p), h, Closure::Periodic { modes: 30, theta: 0.0 })?.eigenvalues()?;
    let mut union = Vec::new();
    for k in uniform_grid(0.0, 2.0 * PI, 64) {
        union.extend(tight_binding_bloch(1, 30, k, &p)?.eigenvalues()?);
    }
    println!("circle spectrum: {} eigenvalues, distance to the Bloch union {:.2e}", circle.len(), directed_hausdorff(&circle, &union));

    let pc = ModelParams { w0: 0.7, w1: 0.8, k_perp: 0.13, ..Default::default() };
    let hp = 1.0 / (40.0 * PI);
    let a = circle_quantize(&harper_symbol(&pc), commensurable_h(1, 2, hp), Closure::Periodic { modes: 20, theta: 0.0 })?.eigenvalues()?;
    let u = circle_quantize(&commensurable_unfold(1, 2, &pc)?, hp, Closure::Periodic { modes: 20, theta: 0.0 })?.eigenvalues()?;
    let gap = a.iter().flat_map(|&x| [x, x]).zip(&u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("q=2 unfolding: {} vs {} eigenvalues, max mismatch after doubling {gap:.2e}", a.len(), u.len());
    Ok(())
}
