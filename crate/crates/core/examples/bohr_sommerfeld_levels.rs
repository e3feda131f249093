//! Bohr-Sommerfeld data F0, F1, F2 for the first anti-chiral entry and the levels they predict.

use moire_wells::bohr_sommerfeld::{antichiral_component_spectrum, antichiral_series, cell_saddle, f_table, nearest_gap, tau_grid, OrbitTolerance};
use moire_wells::models::{antichiral_minima, ModelParams};

fn main() -> moire_wells::Result<()> {
    let w0 = 0.7;
    let s = antichiral_series(w0, 1, 0.0)?;
    let saddle = cell_saddle(&s);
    let table = f_table(&s, &tau_grid(saddle, 200), &OrbitTolerance::default())?;
    println!("saddle at tau = {saddle:.6}");
    for f in table.rows.iter().step_by(40) {
        println!("tau {:.3e}: F0 {:.6e} F1 {:.6} F2 {:.6e} period {:.6}", f.tau, f.f0, f.f1, f.f2, f.period);
    }
    let c1 = antichiral_minima(w0)[0];
    for l in [40usize, 80, 160] {
        let h = ModelParams::harper_h(l as f64);
        let spec = antichiral_component_spectrum(w0, 0.0, 1, l)?;
        let gaps: Vec<String> = (1..=4).map(|k| table.invert(k, h).map(|t| format!("{:.1e}", nearest_gap(&spec, c1 + t)))).collect::<Result<_, _>>()?;
        println!("L={l}: gaps to the spectrum for k=1..4: {}", gaps.join(" "));
    }
    Ok(())
}
