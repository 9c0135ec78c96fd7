//! Sine and cosine integrals across both evaluation branches, and the
//! transit spectral bracket built from them.

use superhet::{specfun, transit};

fn main() -> superhet::Result<()> {
    println!("{:>10} {:>22} {:>22} {:>14}", "phi", "Si", "Ci", "bracket");
    for phi in [1e-6, 1e-3, 0.1, 1.0, 5.0, 19.9, 20.1, 100.0, 1e4] {
        let (si, ci) = specfun::sici(phi)?;
        println!(
            "{phi:>10.1e} {si:>22.15} {ci:>22.15} {:>14.6e}",
            transit::spectral_bracket(phi)?
        );
    }

    let worst = (0..=450)
        .map(|k| 5.0 + 0.1 * k as f64)
        .map(|x| (specfun::si_series(x) - specfun::si_auxiliary(x)).abs())
        .fold(0.0, f64::max);
    println!("largest series/auxiliary disagreement on [5, 50]: {worst:.2e}");
    Ok(())
}
