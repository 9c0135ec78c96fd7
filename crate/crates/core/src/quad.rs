//! Numerical integration used by the transit-noise oracle and the
//! standing-wave path averages.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (non-negative half) and weights; the 7-point
// Gauss rule lives on the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One Gauss–Kronrod 7/15 panel on `[a, b]`.
pub fn gauss_kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let pairs: [(f64, f64); 7] = std::array::from_fn(|j| {
        let dx = half * XGK[j];
        (f(center - dx), f(center + dx))
    });
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (lo, hi)) in pairs.iter().enumerate() {
        kronrod += WGK[j] * (lo + hi);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    // QUADPACK scaling: the raw |K − G| overstates the error of the
    // higher-order rule by orders of magnitude on smooth panels
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (lo, hi)) in pairs.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc > 0.0 && error > 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Estimate {
        value: kronrod * half,
        error,
    }
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the panel with the largest error until the summed error is below
/// `max(abs_tol, rel_tol·|I|)` or `max_panels` is reached.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut heap = BinaryHeap::new();
    let first = gauss_kronrod15(&f, a, b);
    let (mut total, mut total_err) = (first.value, first.error);
    heap.push(Panel { a, b, est: first });

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= max_panels {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                achieved: total_err,
                requested: abs_tol.max(rel_tol * total.abs()),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod15(&f, worst.a, mid);
        let right = gauss_kronrod15(&f, mid, worst.b);
        total += left.value + right.value - worst.est.value;
        total_err += left.error + right.error - worst.est.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: right,
        });
    }

    // re-add from the panels to shed accumulated rounding in `total`
    let mut panels: Vec<_> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.est.value).sum();
    let error = panels.iter().map(|p| p.est.error).sum();
    Ok(Estimate { value, error })
}

/// Wynn's epsilon algorithm over a sequence of partial sums.
///
/// Returns the most recent even-column extrapolation together with the change
/// from the previous one, which serves as the error estimate.
#[derive(Debug, Default)]
pub struct WynnEpsilon {
    partial_sums: Vec<f64>,
}

impl WynnEpsilon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, partial_sum: f64) {
        self.partial_sums.push(partial_sum);
    }

    pub fn len(&self) -> usize {
        self.partial_sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_sums.is_empty()
    }

    /// Best extrapolated limit and an error estimate.
    pub fn extrapolate(&self) -> Option<Estimate> {
        let n = self.partial_sums.len();
        if n < 3 {
            return None;
        }
        // prev holds ε_{k-1}, cur holds ε_k (column-wise, shrinking by one)
        let mut prev = vec![0.0; n + 1];
        let mut cur = self.partial_sums.clone();
        let mut best: Option<f64> = None;
        let mut last_even: Option<f64> = None;
        let mut error = f64::INFINITY;
        let mut col = 0;
        while cur.len() >= 2 {
            let mut next = Vec::with_capacity(cur.len() - 1);
            for i in 0..cur.len() - 1 {
                let diff = cur[i + 1] - cur[i];
                if diff == 0.0 || !diff.is_finite() {
                    next.clear();
                    break;
                }
                next.push(prev[i + 1] + 1.0 / diff);
            }
            if next.is_empty() {
                break;
            }
            col += 1;
            prev = cur;
            cur = next;
            if col % 2 == 0 {
                let value = *cur.last().expect("non-empty column");
                if !value.is_finite() {
                    break;
                }
                if let Some(previous) = last_even {
                    let change = (value - previous).abs();
                    if change < error {
                        error = change;
                        best = Some(value);
                    }
                }
                last_even = Some(value);
            }
        }
        best.map(|value| Estimate { value, error })
    }
}

/// `∫₀^∞ g(t)·cos(ω t) dt` for slowly decaying, smooth, non-oscillating `g`.
///
/// The half-line is cut at the zeros of `cos(ωt)`; each half-period is
/// integrated adaptively and the alternating partial sums are accelerated
/// with the epsilon algorithm. Stops when the extrapolation changes by less
/// than `rel_tol/10` of its magnitude.
pub fn integrate_cosine_half_line<G: Fn(f64) -> f64>(
    g: G,
    omega: f64,
    rel_tol: f64,
    max_cycles: usize,
) -> Result<Estimate> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!(
            "oscillation frequency must be positive, got {omega}"
        )));
    }
    let half_period = std::f64::consts::PI / omega;
    let integrand = |t: f64| g(t) * (omega * t).cos();
    let panel_tol = rel_tol * 1e-3;

    let first = integrate(integrand, 0.0, 0.5 * half_period, 0.0, panel_tol, 2000)?;
    let mut sum = first.value;
    let mut quad_err = first.error;
    let mut wynn = WynnEpsilon::new();
    wynn.push(sum);

    let mut achieved = f64::INFINITY;
    for k in 0..max_cycles {
        let a = (k as f64 + 0.5) * half_period;
        let b = a + half_period;
        let panel = integrate(integrand, a, b, 0.0, panel_tol, 500)?;
        sum += panel.value;
        quad_err += panel.error;
        wynn.push(sum);
        if wynn.len() >= 8 {
            if let Some(est) = wynn.extrapolate() {
                let scale = est.value.abs().max(f64::MIN_POSITIVE);
                achieved = (est.error + quad_err) / scale;
                if est.error + quad_err <= 0.1 * rel_tol * scale {
                    return Ok(Estimate {
                        value: est.value,
                        error: est.error + quad_err,
                    });
                }
            }
        }
    }
    Err(Error::NonConvergence {
        what: "oscillatory quadrature",
        achieved,
        requested: rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand_on_truncated_interval() {
        let est = integrate(|_| 1.0, 0.0, 3.5, 1e-14, 1e-14, 10).unwrap();
        assert!((est.value - 3.5).abs() < 1e-14);
    }

    #[test]
    fn polynomial_is_exact() {
        let est = gauss_kronrod15(&|x: f64| x.powi(9) - 3.0 * x.powi(4), -1.0, 2.0);
        let exact = (2f64.powi(10) - 1.0) / 10.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert!((est.value - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // ∫₀^1000 1/(1+u) du = ln 1001
        let est = integrate(|u| 1.0 / (1.0 + u), 0.0, 1000.0, 0.0, 1e-13, 500).unwrap();
        assert!((est.value - 1001f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn wynn_accelerates_alternating_harmonic() {
        let mut w = WynnEpsilon::new();
        let mut s = 0.0;
        for k in 1..=20 {
            s += if k % 2 == 1 { 1.0 } else { -1.0 } / f64::from(k);
            w.push(s);
        }
        let est = w.extrapolate().unwrap();
        assert!((est.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn damped_cosine_transform() {
        // ∫₀^∞ cos(ωt)/(1+t²) dt = (π/2) e^{−ω}
        let est = integrate_cosine_half_line(|t| 1.0 / (1.0 + t * t), 2.0, 1e-10, 400).unwrap();
        let exact = std::f64::consts::FRAC_PI_2 * (-2f64).exp();
        assert!((est.value - exact).abs() / exact < 1e-9);
    }

    #[test]
    fn rejects_bad_frequency() {
        assert!(integrate_cosine_half_line(|_| 1.0, 0.0, 1e-8, 10).is_err());
    }
}
