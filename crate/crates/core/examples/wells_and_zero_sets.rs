//! Wells of the chiral Harper model and the zero set of the determinant of its principal symbol.

use moire_wells::models::{block11, chiral_d_harper, chiral_harper_squared, find_wells, zero_set_curves, ModelParams, WellSearch};

fn main() -> moire_wells::Result<()> {
    for w1 in [0.4, 1.0, 2.0] {
        let p = ModelParams::chiral(w1);
        let wells = find_wells(&block11(&chiral_harper_squared(&p)?), "harper", &WellSearch::default())?;
        for w in &wells {
            println!(
                "w1={w1}: well ({:.6}, {:.6}) omega {:.6} mu ({:.6}, {:.6}) normalization {:.4}",
                w.well.x0, w.well.xi0, w.well.omega, w.well.mu1, w.well.mu2, w.normalization
            );
        }
        let d = chiral_d_harper(&p);
        let curves = zero_set_curves(|x, xi| d.det_principal(x, xi), (-0.5, 0.5), (-0.5, 0.5), 200, true);
        println!("w1={w1}: det zero set has {} component(s)", curves.len());
    }
    Ok(())
}
