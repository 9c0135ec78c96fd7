//! Read-out noise budget and sensitivity at the read-out frequency for the
//! default cell, and for its ideal counterpart.

use superhet::config::CampaignConfig;
use superhet::receiver::{mw_to_dbm, Receiver};

fn table(name: &str, rx: &Receiver, lengths: &[f64]) -> superhet::Result<()> {
    let f = rx.superhet.f_readout;
    println!("{name} receiver at {f} Hz");
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12}",
        "l (mm)", "transit", "project", "P_na", "P_s", "SNR (dB)", "min Rabi"
    );
    for &l in lengths {
        let c = rx.noise(l, f)?;
        let s = rx.snr_and_sensitivity(l)?;
        let dbm = |mw: f64| {
            if mw > 0.0 {
                format!("{:.2}", mw_to_dbm(mw))
            } else {
                "-".into()
            }
        };
        println!(
            "{l:>8.3} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12.4e}",
            dbm(c.transit),
            dbm(c.projection),
            dbm(c.total()),
            s.p_s.dbm().map_or("-".into(), |d| format!("{d:.2}")),
            s.snr_db.map_or("-".into(), |d| format!("{d:.2}")),
            s.min_rabi
        );
    }
    Ok(())
}

fn main() -> superhet::Result<()> {
    let cfg = CampaignConfig::default();
    let rx = cfg.receiver();
    table("default", &rx, &cfg.sweep.lengths_mm)?;
    println!();
    table("ideal", &rx.ideal(), &cfg.sweep.lengths_mm)
}
