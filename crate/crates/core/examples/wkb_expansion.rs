//! WKB expansion at the upper Harper chiral well and the order of its residual.

use moire_wells::wkb::{chiral_well, default_h_grid, residual_order, wkb_recurrence, WellModel};

fn main() -> moire_wells::Result<()> {
    for ell in 0..=2usize {
        let w = chiral_well(WellModel::Harper, 1.0, 0.0, 2 * ell as u32 + 2)?;
        let nf = &w.normal_form;
        let branch = if nf.mu1 < 0.0 { 1 } else { 2 };
        let e = wkb_recurrence(nf, 0, branch, ell)?;
        let fit = residual_order(&e, nf, &default_h_grid())?;
        println!("l={ell}: lambdas {:?}", e.lambdas.iter().map(|l| format!("{l:.6}")).collect::<Vec<_>>());
        println!("      residual slope {:.3} (h = 2^-6 .. 2^-12)", fit.slope.unwrap_or(f64::NAN));
    }
    Ok(())
}
