//! Transit-noise spectrum: closed form, direct quadrature and the two
//! asymptotic amplitudes.

use superhet::transit::{self, TransitParams};

fn main() -> superhet::Result<()> {
    let p = TransitParams::default();
    println!("beam radius {} m, {:.3e} atoms in the beam", p.omega, p.atom_number());
    println!(
        "{:>10} {:>10} {:>14} {:>10} {:>12} {:>12}",
        "f (Hz)", "phi", "PSD", "quad err", "in-band", "out-of-band"
    );
    for k in 0..=12 {
        let f = 10f64.powf(1.0 + 0.5 * k as f64);
        let closed = transit::transit_psd_closed(f, &p)?;
        let quad = transit::transit_psd_quadrature(f, &p, 1e-8)?;
        let inb = transit::in_band_amplitude(f, &p)?;
        let outb = transit::out_of_band_amplitude(f, &p)?;
        let show = |a: transit::Asymptote| {
            if a.in_regime {
                format!("{:.4}", a.value * a.value / closed)
            } else {
                "-".into()
            }
        };
        println!(
            "{f:>10.3e} {:>10.3e} {closed:>14.6e} {:>10.1e} {:>12} {:>12}",
            inb.phi,
            (quad - closed).abs() / closed,
            show(inb),
            show(outb)
        );
    }
    println!("asymptote columns show amplitude^2 / PSD inside each regime");
    Ok(())
}
