//! Microwave field calibration: Autler-Townes splitting of the dressed ladder
//! and the standing-wave power correction per interaction length.

use superhet::config::CampaignConfig;
use superhet::{campaign, optics};

fn main() -> superhet::Result<()> {
    let cfg = CampaignConfig::default();
    println!(
        "bare splitting {:.4} MHz for a {} Rabi frequency",
        optics::at_splitting(&cfg.atcal)? / 1e6,
        cfg.atcal.omega_mw
    );
    println!("quarter-wave length {:.3} mm", cfg.cell.quarter_wave() * 1e3);
    println!(
        "{:>8} {:>14} {:>12} {:>16}",
        "l (mm)", "split (MHz)", "corr (dB)", "corrected (MHz)"
    );
    for row in campaign::calibration_sweep(&cfg)? {
        println!(
            "{:>8.3} {:>14.6} {:>12.4} {:>16.6}",
            row.l_mm,
            row.splitting_hz / 1e6,
            row.correction_db,
            row.corrected_splitting_hz / 1e6
        );
    }
    Ok(())
}
