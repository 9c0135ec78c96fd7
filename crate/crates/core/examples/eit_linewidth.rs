//! EIT transmission feature versus interaction length: the amplitude grows
//! with optical depth while the linewidth stays fixed.

use superhet::optics::{self, LadderConfig};

fn main() -> superhet::Result<()> {
    let ladder = LadderConfig::default();
    let grid = optics::default_detuning_grid();
    println!("{:>8} {:>8} {:>12} {:>12}", "l (mm)", "OD", "A_EIT", "FWHM (MHz)");
    for l_mm in [7.28, 9.53, 11.78, 14.03, 16.28] {
        let cfg = ladder.with_length(l_mm);
        let s = optics::eit_transmission(&grid, &cfg)?;
        let (a, w) = optics::extract_amplitude_fwhm(&s)?;
        println!("{l_mm:>8.3} {:>8.4} {a:>12.6e} {:>12.6}", cfg.optical_depth(), w / 1e6);
    }
    Ok(())
}
