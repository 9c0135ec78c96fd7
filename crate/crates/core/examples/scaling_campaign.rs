//! Full campaign into a directory (first argument, default `campaign`),
//! followed by the scaling summary.

use superhet::campaign::{run_campaign, workers_from_env};
use superhet::config::CampaignConfig;
use superhet::fit::Regime;

fn main() -> superhet::Result<()> {
    let mut cfg = CampaignConfig::default();
    if let Some(dir) = std::env::args().nth(1) {
        cfg.sweep.out_dir = dir.into();
    }
    let report = run_campaign(&cfg, workers_from_env()?)?;
    println!("{} files under {}", report.files.len() + 1, report.out_dir.display());
    for (name, series) in [("default", &report.scaling), ("ideal", &report.ideal_scaling)] {
        for s in series.iter() {
            let show = |r: Regime| s.slope(r).map_or("-".into(), |v| format!("{v:.3}"));
            println!(
                "{name:>8} {:>7}: all {:>6}  below {:>6}  above {:>6}",
                s.series,
                show(Regime::All),
                show(Regime::Below),
                show(Regime::Above)
            );
        }
    }
    for row in &report.free_kappa {
        println!("seed {}: free kappa {:.4} at {} Hz", row.seed, row.fit.kappa, row.f_hz);
    }
    Ok(())
}
