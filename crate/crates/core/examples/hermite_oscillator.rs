//! Galerkin quantization of a harmonic matrix symbol in the Hermite basis.

use moire_wells::hermite::galerkin_matrix;
use moire_wells::spectra::{OperatorMatrix, Provenance};
use moire_wells::symbol::{PhaseSpaceSymbol, Scalar};

fn main() -> moire_wells::Result<()> {
    let omega = 1.7;
    let h = 1.0;
    let s = Scalar::xi().mul(&Scalar::xi()).add(&Scalar::x().mul(&Scalar::x()).scale_re(omega * omega));
    let sym = PhaseSpaceSymbol::scalar_times_identity(&s, 2);
    let m = galerkin_matrix(&sym, omega, 20, h)?;
    let op = OperatorMatrix::new(m, Provenance { model: "oscillator".into(), h, k_x: 0.0, truncation: 20 });
    let ev = op.eigenvalues()?;
    for (i, v) in ev.iter().step_by(2).take(6).enumerate() {
        println!("level {i}: {v:.12}  expected {:.12}", (2 * i + 1) as f64 * omega * h);
    }
    Ok(())
}
