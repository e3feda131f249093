//! Periodizing a WKB quasimode onto the circle: norm defect and localization.

use moire_wells::wkb::{chiral_well, periodize, periodize_grid, wkb_recurrence, WellModel};

fn main() -> moire_wells::Result<()> {
    let w = chiral_well(WellModel::LowEnergy, 1.0, 0.0, 4)?;
    let e = wkb_recurrence(&w.normal_form, 0, 1, 1)?;
    for l in [100.0, 200.0, 400.0, 800.0, 1600.0] {
        let h = 1.0 / l;
        let u = periodize(&e, 0.0, h, periodize_grid(h));
        println!("h=1/{l}: | ||u|| - 1 | = {:.3e}, mass outside h^0.4 = {:.2e}", (u.norm - 1.0).abs(), u.mass_outside(0.0, h.powf(0.4)));
    }
    Ok(())
}
