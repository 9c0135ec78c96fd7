//! Power law with additive floor, `P = A·N^{2κ} + P₀`, and straight-line
//! regression in dB coordinates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Admissible power-law coefficients, exclusive.
pub const KAPPA_RANGE: (f64, f64) = (0.0, 1.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FitDomain {
    /// Least squares on linear powers.
    #[default]
    Linear,
    /// Least squares on 10·log₁₀ of the powers.
    Db,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaMode {
    Fixed(f64),
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub a_coeff: f64,
    pub kappa: f64,
    pub p_n0: f64,
    pub stderr_a: Option<f64>,
    pub stderr_kappa: Option<f64>,
    pub stderr_p_n0: Option<f64>,
    pub kappa_fixed: bool,
    /// The unconstrained fit gave P₀ < 0; it was pinned to 0 and refit.
    pub p_n0_clamped: bool,
}

impl PowerLawFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.a_coeff * n.powf(2.0 * self.kappa) + self.p_n0
    }
}

fn check_points(points: &[(f64, f64)], min: usize, min_distinct: usize) -> Result<()> {
    if points.len() < min {
        return Err(Error::Fit(format!("need at least {min} points, got {}", points.len())));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.0 > 0.0 && p.0.is_finite() && p.1.is_finite()))
    {
        return Err(Error::Fit(format!("invalid point ({}, {})", p.0, p.1)));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < min_distinct {
        return Err(Error::Fit(format!(
            "need at least {min_distinct} distinct atom numbers, got {}",
            xs.len()
        )));
    }
    Ok(())
}

/// Unconstrained linear least squares `y = a·x + b`, with residual sum and
/// the inverse normal matrix.
struct LineFit {
    a: f64,
    b: f64,
    rss: f64,
    // (XᵀX)⁻¹ entries for (a, b)
    inv_aa: f64,
    inv_bb: f64,
}

fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    // offsets from the first value keep exactly flat data exactly flat
    let y0 = ys[0];
    let md = ys.iter().map(|y| y - y0).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) || sxx <= 1e-14 * xs.iter().map(|x| x * x).sum::<f64>() {
        return Err(Error::Fit("design matrix is rank deficient".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - y0 - md)).sum();
    let a = sxy / sxx;
    let b = y0 + md - a * mx;
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    Ok(LineFit {
        a,
        b,
        rss,
        inv_aa: 1.0 / sxx,
        inv_bb: 1.0 / n + mx * mx / sxx,
    })
}

fn sigma2(rss: f64, n: usize, p: usize) -> Option<f64> {
    (n > p).then(|| rss / (n - p) as f64)
}

fn fixed_linear(points: &[(f64, f64)], kappa: f64) -> Result<PowerLawFit> {
    let xs: Vec<f64> = points.iter().map(|p| p.0.powf(2.0 * kappa)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let n = points.len();
    let line = line_fit(&xs, &ys)?;
    let mut fit = PowerLawFit {
        a_coeff: line.a,
        kappa,
        p_n0: line.b,
        stderr_a: sigma2(line.rss, n, 2).map(|s| (s * line.inv_aa).sqrt()),
        stderr_kappa: None,
        stderr_p_n0: sigma2(line.rss, n, 2).map(|s| (s * line.inv_bb).sqrt()),
        kappa_fixed: true,
        p_n0_clamped: false,
    };
    if fit.p_n0 < 0.0 {
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let a = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / sxx;
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a * x).powi(2)).sum();
        fit.a_coeff = a;
        fit.p_n0 = 0.0;
        fit.p_n0_clamped = true;
        fit.stderr_a = sigma2(rss, n, 1).map(|s| (s / sxx).sqrt());
        fit.stderr_p_n0 = None;
    }
    if fit.a_coeff < 0.0 {
        fit.a_coeff = 0.0;
        fit.p_n0 = ys.iter().sum::<f64>() / n as f64;
    }
    Ok(fit)
}

/// Residuals and Jacobian of the model for parameters `θ` over the points.
/// `free` selects which of (A, κ, P₀) vary; the others stay at `base`.
struct Problem<'a> {
    points: &'a [(f64, f64)],
    domain: FitDomain,
    free: [bool; 3],
    base: [f64; 3],
}

impl Problem<'_> {
    fn full(&self, theta: &[f64]) -> [f64; 3] {
        let mut p = self.base;
        let mut k = 0;
        for (i, f) in self.free.iter().enumerate() {
            if *f {
                p[i] = theta[k];
                k += 1;
            }
        }
        p
    }

    fn n_free(&self) -> usize {
        self.free.iter().filter(|f| **f).count()
    }

    fn eval(&self, theta: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
        let [a, kappa, p0] = self.full(theta);
        let n = self.points.len();
        let mut r = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, self.n_free());
        for (row, &(x, y)) in self.points.iter().enumerate() {
            let pw = x.powf(2.0 * kappa);
            let m = a * pw + p0;
            let grads = [pw, 2.0 * a * pw * x.ln(), 1.0];
            let (res, scale) = match self.domain {
                FitDomain::Linear => (m - y, 1.0),
                FitDomain::Db => {
                    if !(m > 0.0) || !(y > 0.0) {
                        return None;
                    }
                    let c = 10.0 / std::f64::consts::LN_10;
                    (c * (m / y).ln(), c / m)
                }
            };
            r[row] = res;
            let mut col = 0;
            for (i, g) in grads.iter().enumerate() {
                if self.free[i] {
                    j[(row, col)] = g * scale;
                    col += 1;
                }
            }
        }
        Some((r, j))
    }
}

/// Levenberg–Marquardt on a small problem. Returns the parameters, RSS and
/// `(JᵀJ)⁻¹` at the solution.
fn levenberg_marquardt(prob: &Problem, start: Vec<f64>) -> Result<(Vec<f64>, f64, Option<DMatrix<f64>>)> {
    let mut theta = DVector::from_vec(start);
    let (mut r, mut j) = prob
        .eval(theta.as_slice())
        .ok_or_else(|| Error::Fit("starting point outside the model domain".into()))?;
    let mut rss = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        let mut damped = jtj.clone();
        for i in 0..damped.nrows() {
            damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
        }
        let Some(step) = damped.cholesky().map(|c| c.solve(&(-&g))) else {
            lambda *= 10.0;
            if lambda > 1e20 {
                break;
            }
            continue;
        };
        let trial = &theta + &step;
        let accepted = match prob.eval(trial.as_slice()) {
            Some((tr, tj)) if tr.norm_squared() <= rss => {
                let small = step.norm() <= 1e-15 * (theta.norm() + 1e-300);
                let improvement = rss - tr.norm_squared();
                theta = trial;
                r = tr;
                j = tj;
                let before = rss;
                rss = r.norm_squared();
                lambda = (lambda * 0.1).max(1e-15);
                if small || improvement <= 1e-30 * before.max(1e-300) || rss == 0.0 {
                    break;
                }
                true
            }
            _ => false,
        };
        if !accepted {
            lambda *= 10.0;
            if lambda > 1e20 {
                break;
            }
        }
    }
    let cov = (j.transpose() * &j).try_inverse();
    Ok((theta.as_slice().to_vec(), rss, cov))
}

fn brent_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    x
}

/// Profile RSS over κ with (A, P₀) solved linearly.
fn profile_rss(points: &[(f64, f64)], kappa: f64) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.powf(2.0 * kappa)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    line_fit(&xs, &ys).map_or(f64::INFINITY, |l| l.rss)
}

fn initial_kappa(points: &[(f64, f64)]) -> f64 {
    let grid: Vec<f64> = (1..150).map(|k| k as f64 * 0.01).collect();
    let best = grid
        .iter()
        .copied()
        .min_by(|a, b| profile_rss(points, *a).total_cmp(&profile_rss(points, *b)))
        .expect("non-empty grid");
    let lo = (best - 0.01).max(1e-6);
    let hi = (best + 0.01).min(KAPPA_RANGE.1 - 1e-6);
    brent_min(|k| profile_rss(points, k), lo, hi, 1e-10)
}

fn stderrs(cov: &Option<DMatrix<f64>>, rss: f64, n: usize, free: [bool; 3]) -> [Option<f64>; 3] {
    let p = free.iter().filter(|f| **f).count();
    let mut out = [None; 3];
    if let (Some(cov), Some(s2)) = (cov, sigma2(rss, n, p)) {
        let mut k = 0;
        for (i, f) in free.iter().enumerate() {
            if *f {
                out[i] = Some((s2 * cov[(k, k)]).max(0.0).sqrt());
                k += 1;
            }
        }
    }
    out
}

fn nonlinear(points: &[(f64, f64)], domain: FitDomain, kappa: KappaMode) -> Result<PowerLawFit> {
    let start = match kappa {
        KappaMode::Fixed(k) => fixed_linear(points, k)?,
        KappaMode::Free => {
            let k = initial_kappa(points);
            let mut f = fixed_linear(points, k)?;
            f.kappa_fixed = false;
            f
        }
    };
    let kappa_free = matches!(kappa, KappaMode::Free);
    let run = |free: [bool; 3], p0: f64| -> Result<(PowerLawFit, f64)> {
        let prob = Problem {
            points,
            domain,
            free,
            base: [start.a_coeff, start.kappa, p0],
        };
        let theta0: Vec<f64> = [start.a_coeff, start.kappa, p0]
            .iter()
            .zip(free)
            .filter(|(_, f)| *f)
            .map(|(v, _)| *v)
            .collect();
        let (theta, rss, cov) = levenberg_marquardt(&prob, theta0)?;
        let [a, k, p] = prob.full(&theta);
        let [sa, sk, sp] = stderrs(&cov, rss, points.len(), free);
        Ok((
            PowerLawFit {
                a_coeff: a,
                kappa: k,
                p_n0: p,
                stderr_a: sa,
                stderr_kappa: sk,
                stderr_p_n0: sp,
                kappa_fixed: !kappa_free,
                p_n0_clamped: false,
            },
            rss,
        ))
    };
    let (mut fit, _) = run([true, kappa_free, true], start.p_n0.max(0.0))?;
    if fit.p_n0 < 0.0 {
        let (refit, _) = run([true, kappa_free, false], 0.0)?;
        fit = PowerLawFit {
            p_n0_clamped: true,
            ..refit
        };
    }
    Ok(fit)
}

/// Fits `P = A·N^{2κ} + P₀` to `(N, P)` pairs with `N` the linear relative
/// atom number. With κ fixed in the linear domain the fit is closed form.
pub fn fit_power_law(points: &[(f64, f64)], kappa: KappaMode, domain: FitDomain) -> Result<PowerLawFit> {
    match kappa {
        KappaMode::Fixed(k) => {
            if !(k > KAPPA_RANGE.0 && k < KAPPA_RANGE.1) {
                return Err(Error::Fit(format!("fixed kappa {k} outside (0, 1.5)")));
            }
            check_points(points, 3, 2)?;
        }
        KappaMode::Free => check_points(points, 4, 3)?,
    }
    if domain == FitDomain::Db && points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::Fit("dB-domain fit needs positive powers".into()));
    }
    let fit = match (kappa, domain) {
        (KappaMode::Fixed(k), FitDomain::Linear) => fixed_linear(points, k)?,
        _ => {
            // work on powers of order one; analyzer powers are ~1e-12 mW
            let scale = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
            let scale = if scale > 0.0 { scale } else { 1.0 };
            let scaled: Vec<(f64, f64)> = points.iter().map(|p| (p.0, p.1 / scale)).collect();
            let f = nonlinear(&scaled, domain, kappa)?;
            PowerLawFit {
                a_coeff: f.a_coeff * scale,
                p_n0: f.p_n0 * scale,
                stderr_a: f.stderr_a.map(|s| s * scale),
                stderr_p_n0: f.stderr_p_n0.map(|s| s * scale),
                ..f
            }
        }
    };
    if !(fit.kappa > KAPPA_RANGE.0 && fit.kappa < KAPPA_RANGE.1) {
        return Err(Error::Fit(format!("fitted kappa {} outside (0, 1.5)", fit.kappa)));
    }
    if !(fit.a_coeff.is_finite() && fit.p_n0.is_finite()) {
        return Err(Error::Fit("fit diverged".into()));
    }
    Ok(fit)
}

/// Which side of the quarter-wave length a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    All,
    Below,
    Above,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::All => "all",
            Regime::Below => "below",
            Regime::Above => "above",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    pub regime: Regime,
}

/// Ordinary least squares of dB power against N_a in dB.
pub fn fit_db_slope(points: &[(f64, f64)], regime: Regime) -> Result<ScalingResult> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "{} regime has {} points; at least 3 are needed",
            regime.as_str(),
            points.len()
        )));
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::Fit("non-finite point in dB regression".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let line = line_fit(&xs, &ys)?;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - line.a * x - line.b).collect();
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - line.rss / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ScalingResult {
        slope: line.a,
        intercept: line.b,
        r_squared,
        residuals,
        regime,
    })
}

/// Fits the whole set and, when `threshold_db` falls inside the range, each
/// side of it separately (strictly below vs at-or-above). A side with fewer
/// than 3 points is an error.
pub fn fit_db_slope_regimes(points: &[(f64, f64)], threshold_db: f64) -> Result<Vec<ScalingResult>> {
    let mut fits = vec![fit_db_slope(points, Regime::All)?];
    let (below, above): (Vec<_>, Vec<_>) = points.iter().partition(|p| p.0 < threshold_db);
    if !below.is_empty() && !above.is_empty() {
        fits.push(fit_db_slope(&below, Regime::Below)?);
        fits.push(fit_db_slope(&above, Regime::Above)?);
    }
    Ok(fits)
}
