//! Interaction noise versus atom number at one frequency section: synthesize
//! the spectra for one seed, then fit P = A·N^{2κ} + P₀ with κ fixed and free.

use superhet::campaign;
use superhet::config::CampaignConfig;
use superhet::fit::{fit_power_law, FitDomain, KappaMode};
use superhet::receiver::mw_to_dbm;

fn main() -> superhet::Result<()> {
    let cfg = CampaignConfig::default();
    let rx = cfg.receiver();
    let freqs = cfg.grid.frequencies();
    let f = campaign::section_center(&cfg, cfg.superhet.f_readout);
    let mut points = Vec::new();
    for (i, &l) in cfg.sweep.lengths_mm.iter().enumerate() {
        let means = campaign::mean_spectra(&rx, l, &freqs)?;
        let s = campaign::synthesize_length(&cfg, &freqs, &means, i, 1)?;
        let j = s.ni.nearest(f).expect("sections exist");
        println!("l = {l:>7.3} mm  P_ni = {:.3} dBm", mw_to_dbm(s.ni.power_mw[j]));
        points.push((l, s.ni.power_mw[j]));
    }
    for mode in [KappaMode::Fixed(0.5), KappaMode::Free] {
        let fit = fit_power_law(&points, mode, FitDomain::Linear)?;
        println!(
            "{mode:?}: kappa = {:.4}, A = {:.4e} mW, P0 = {:.3} dBm",
            fit.kappa,
            fit.a_coeff,
            mw_to_dbm(fit.p_n0)
        );
    }
    Ok(())
}
