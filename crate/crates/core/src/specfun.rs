//! Sine and cosine integrals.
//!
//! * `Si(x) = ∫₀ˣ sin(t)/t dt`
//! * `Ci(x) = −∫ₓ^∞ cos(t)/t dt = γ + ln x + ∫₀ˣ (cos t − 1)/t dt`
//!
//! Two evaluation strategies are kept side by side:
//!
//! * the Maclaurin series, summed in double-double arithmetic so that the
//!   alternating terms (which reach ~1e7 at x = 20) cancel without eating the
//!   last ten digits;
//! * the auxiliary functions `f(x)`, `g(x)` obtained from the continued
//!   fraction of `E₁(ix)` (modified Lentz), valid for x ≳ 2.
//!
//! The public entry points switch from the first to the second at
//! [`CROSSOVER`]. Both strategies are exposed so that callers (and tests) can
//! compare them on an overlap window.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EULER_GAMMA_LO: f64 = -4.942_915_152_430_645e-18;

/// Argument above which the auxiliary-function branch is used.
pub const CROSSOVER: f64 = 20.0;

/// Below this argument the continued fraction converges too slowly.
const CF_MIN: f64 = 2.0;
const CF_MAX_ITER: usize = 10_000;

fn check_finite(phi: f64, name: &str) -> Result<()> {
    if !phi.is_finite() {
        return Err(Error::domain(format!("{name}: argument must be finite, got {phi}")));
    }
    Ok(())
}

/// Sine integral Si(φ) for φ ≥ 0.
pub fn sine_integral(phi: f64) -> Result<f64> {
    check_finite(phi, "Si")?;
    if phi < 0.0 {
        return Err(Error::domain(format!("Si: argument must be non-negative, got {phi}")));
    }
    if phi <= CROSSOVER {
        Ok(si_series(phi))
    } else {
        Ok(si_auxiliary(phi))
    }
}

/// Cosine integral Ci(φ) for φ > 0.
pub fn cosine_integral(phi: f64) -> Result<f64> {
    check_finite(phi, "Ci")?;
    if phi <= 0.0 {
        return Err(Error::domain(format!("Ci: argument must be positive, got {phi}")));
    }
    if phi <= CROSSOVER {
        Ok(ci_series(phi))
    } else {
        Ok(ci_auxiliary(phi))
    }
}

/// Both integrals at once, `(Si(φ), Ci(φ))`, for φ > 0.
pub fn sici(phi: f64) -> Result<(f64, f64)> {
    check_finite(phi, "sici")?;
    if phi <= 0.0 {
        return Err(Error::domain(format!("Ci: argument must be positive, got {phi}")));
    }
    if phi <= CROSSOVER {
        Ok((si_series(phi), ci_series(phi)))
    } else {
        let (f, g) = continued_fraction_fg(phi);
        Ok(si_ci_from_fg(phi, f, g))
    }
}

/// Auxiliary functions `(f(φ), g(φ))` for φ > 0, defined by
/// `Ci = f·sin φ − g·cos φ` and `Si = π/2 − f·cos φ − g·sin φ`.
pub fn auxiliary_fg(phi: f64) -> Result<(f64, f64)> {
    check_finite(phi, "auxiliary_fg")?;
    if phi <= 0.0 {
        return Err(Error::domain(format!(
            "auxiliary_fg: argument must be positive, got {phi}"
        )));
    }
    if phi >= CF_MIN {
        return Ok(continued_fraction_fg(phi));
    }
    let si_shift = si_series(phi) - FRAC_PI_2;
    let ci = ci_series(phi);
    let (s, c) = phi.sin_cos();
    Ok((ci * s - si_shift * c, -ci * c - si_shift * s))
}

/// Si from the Maclaurin series `Σ (−1)ᵏ φ^{2k+1} / ((2k+1)(2k+1)!)`.
///
/// Usable up to φ ≈ 50 before double-double precision runs out.
pub fn si_series(phi: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    let neg_sq = -DoubleDouble::square(phi);
    let mut power = DoubleDouble::from(phi); // (−1)ᵏ φ^{2k+1}/(2k+1)!
    let mut sum = power;
    for k in 1..400u32 {
        let n = f64::from(2 * k);
        power = (power * neg_sq).div_f64(n * (n + 1.0));
        let term = power.div_f64(n + 1.0);
        sum = sum + term;
        if term.hi.abs() <= 1e-34 * sum.hi.abs() {
            break;
        }
    }
    sum.to_f64()
}

/// Ci from `γ + ln φ + Σ_{k≥1} (−1)ᵏ φ^{2k} / (2k·(2k)!)`.
pub fn ci_series(phi: f64) -> f64 {
    let neg_sq = -DoubleDouble::square(phi);
    let mut power = DoubleDouble::from(1.0); // (−1)ᵏ φ^{2k}/(2k)!
    let mut sum = DoubleDouble::from(0.0);
    for k in 1..400u32 {
        let n = f64::from(2 * k);
        power = (power * neg_sq).div_f64((n - 1.0) * n);
        let term = power.div_f64(n);
        sum = sum + term;
        if term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    let constant = DoubleDouble::new(EULER_GAMMA, EULER_GAMMA_LO);
    (constant + DoubleDouble::from(phi.ln()) + sum).to_f64()
}

/// Si from the continued-fraction auxiliary functions. Requires φ ≥ 2.
pub fn si_auxiliary(phi: f64) -> f64 {
    let (f, g) = continued_fraction_fg(phi.max(CF_MIN));
    si_ci_from_fg(phi, f, g).0
}

/// Ci from the continued-fraction auxiliary functions. Requires φ ≥ 2.
pub fn ci_auxiliary(phi: f64) -> f64 {
    let (f, g) = continued_fraction_fg(phi.max(CF_MIN));
    si_ci_from_fg(phi, f, g).1
}

fn si_ci_from_fg(phi: f64, f: f64, g: f64) -> (f64, f64) {
    let (s, c) = phi.sin_cos();
    (FRAC_PI_2 - f * c - g * s, f * s - g * c)
}

/// `e^{iφ} E₁(iφ) = g(φ) − i f(φ)` by the modified Lentz algorithm.
fn continued_fraction_fg(phi: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, phi);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..CF_MAX_ITER {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 4.0 * f64::EPSILON {
            break;
        }
    }
    (-h.im, h.re)
}

/// Unevaluated sum `hi + lo` with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    fn square(x: f64) -> Self {
        let (hi, lo) = two_prod(x, x);
        DoubleDouble { hi, lo }
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let (p, pe) = two_prod(q1, d);
        let r = ((self.hi - p) - pe) + self.lo;
        let q2 = r / d;
        DoubleDouble::new(q1, q2)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl std::ops::Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl std::ops::Mul for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        DoubleDouble::new(p, e + (self.hi * rhs.lo + self.lo * rhs.hi))
    }
}

impl std::ops::Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn maclaurin_si_f64(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut power = x;
        let mut k = 0;
        loop {
            let term = power / f64::from(2 * k + 1);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
            k += 1;
            power *= -x * x / f64::from((2 * k) * (2 * k + 1));
        }
        sum
    }

    fn maclaurin_ci_f64(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut power = 1.0;
        for k in 1..200 {
            power *= -x * x / f64::from((2 * k - 1) * (2 * k));
            let term = power / f64::from(2 * k);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        EULER_GAMMA + x.ln() + sum
    }

    #[test]
    fn si_at_zero_is_zero() {
        assert_eq!(sine_integral(0.0).unwrap(), 0.0);
    }

    #[test]
    fn si_at_pi_is_the_gibbs_constant() {
        let oracle = maclaurin_si_f64(PI);
        assert!((oracle - 1.851_937_051_982_466_2).abs() < 1e-14);
        assert!((sine_integral(PI).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn si_tends_to_half_pi() {
        assert!((sine_integral(1e6).unwrap() - FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn ci_reference_values() {
        let ci1 = maclaurin_ci_f64(1.0);
        assert!((ci1 - 0.337_403_922_900_968_1).abs() < 1e-14);
        assert!((cosine_integral(1.0).unwrap() - ci1).abs() < 1e-14);
        // at 10 the f64 series already loses a few digits; the cross-check is
        // the asymptotic expansion sin(x)/x − cos(x)/x² − 2 sin(x)/x³ + 6 cos(x)/x⁴ …
        let ci10 = cosine_integral(10.0).unwrap();
        assert!((ci10 - (-0.045_456_433_004_455_37)).abs() < 1e-12);
        assert!((maclaurin_ci_f64(10.0) - ci10).abs() < 1e-10);
    }

    #[test]
    fn ci_small_argument_limit() {
        let x = 1e-4;
        let diff = cosine_integral(x).unwrap() - (EULER_GAMMA + x.ln());
        assert!(diff.abs() < 1e-8);
    }

    #[test]
    fn domain_errors() {
        assert!(sine_integral(-1.0).is_err());
        assert!(sine_integral(f64::NAN).is_err());
        assert!(sine_integral(f64::INFINITY).is_err());
        assert!(cosine_integral(0.0).is_err());
        assert!(cosine_integral(-2.0).is_err());
        assert!(sici(0.0).is_err());
    }

    #[test]
    fn auxiliary_identities_hold_below_the_cf_range() {
        for &x in &[0.1, 0.5, 1.0, 1.9] {
            let (f, g) = auxiliary_fg(x).unwrap();
            let (si, ci) = si_ci_from_fg(x, f, g);
            assert!((si - si_series(x)).abs() < 1e-14);
            assert!((ci - ci_series(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn branches_agree_across_the_crossover() {
        for i in 0..=90 {
            let x = 5.0 + 0.5 * f64::from(i);
            assert!((si_series(x) - si_auxiliary(x)).abs() < 1e-10, "Si at {x}");
            assert!((ci_series(x) - ci_auxiliary(x)).abs() < 1e-10, "Ci at {x}");
        }
    }
}
