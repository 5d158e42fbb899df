//! Gauss ₂F₁(a, b; c; w) on the closed negative real axis.
//!
//! Three regions: the defining series for |w| ≤ 0.9, the Pfaff transformation
//! for 0.9 < |w| < 3, and the 1/w inversion beyond. When b − a is an integer
//! the inversion degenerates and the logarithmic (digamma) form is used.

use num_complex::Complex64;

use super::gamma::{digamma, gamma, nonpositive_integer, psi_over_gamma, rgamma};
use crate::error::{Error, Result};

const DIRECT_RADIUS: f64 = 0.9;
const INVERSION_RADIUS: f64 = 3.0;
const INTEGER_TOL: f64 = 1e-12;
/// Inside this distance of the degenerate set the 1/w inversion cancels
/// badly; values there come from a Cauchy integral around the degenerate point.
const NEAR_DEGENERATE: f64 = 1e-2;
const CAUCHY_RADIUS: f64 = 0.1;
const CAUCHY_POINTS: usize = 16;
const MAX_TERMS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2f1Value {
    pub value: Complex64,
    /// Absolute error estimate.
    pub error: f64,
}

fn near_integer(x: Complex64) -> Option<i64> {
    let r = x.re.round();
    if (x - r).norm() <= INTEGER_TOL * r.abs().max(1.0) {
        Some(r as i64)
    } else {
        None
    }
}

/// ₂F₁ for real w ≤ 0, with a relative tolerance that triggers a
/// non-convergence error when the error estimate exceeds it.
pub fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Hyp2f1Value> {
    hyp2f1_with_tol(a, b, c, w, 1e-10)
}

pub fn hyp2f1_with_tol(a: Complex64, b: Complex64, c: Complex64, w: f64, tol: f64) -> Result<Hyp2f1Value> {
    if !(w <= 0.0) {
        return Err(Error::InvalidParameter(format!("hyp2f1 expects real w <= 0, got {w}")));
    }
    if nonpositive_integer(c).is_some() {
        return Err(Error::HypergeometricPole(c));
    }
    let r = dispatch(a, b, c, w)?;
    if !r.value.is_finite() || r.error > tol * r.value.norm().max(f64::MIN_POSITIVE) && r.error > tol {
        return Err(Error::NonConvergence {
            what: "hyp2f1",
            estimate: r.error,
            tol,
        });
    }
    Ok(r)
}

fn dispatch(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Hyp2f1Value> {
    if w == 0.0 {
        return Ok(Hyp2f1Value {
            value: Complex64::new(1.0, 0.0),
            error: 0.0,
        });
    }
    for p in [a, b] {
        if let Some(k) = nonpositive_integer(p) {
            return Ok(polynomial(a, b, c, w, (-k) as usize));
        }
    }
    let aw = w.abs();
    if aw <= DIRECT_RADIUS {
        direct_series(a, b, c, Complex64::new(w, 0.0))
    } else if aw < INVERSION_RADIUS {
        pfaff(a, b, c, w)
    } else {
        hyp2f1_inversion(a, b, c, w)
    }
}

fn polynomial(a: Complex64, b: Complex64, c: Complex64, w: f64, degree: usize) -> Hyp2f1Value {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut mag = 1.0;
    for k in 0..degree {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * w;
        sum += term;
        mag += term.norm();
    }
    Hyp2f1Value {
        value: sum,
        error: 4.0 * f64::EPSILON * mag * (degree as f64 + 1.0),
    }
}

/// The defining power series, |w| < 1.
pub fn direct_series(a: Complex64, b: Complex64, c: Complex64, w: Complex64) -> Result<Hyp2f1Value> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut mag = 1.0;
    let mut small_run = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * w;
        sum += term;
        mag += term.norm();
        if term.norm() <= f64::EPSILON * sum.norm() {
            small_run += 1;
            if small_run >= 3 {
                return Ok(Hyp2f1Value {
                    value: sum,
                    error: 4.0 * f64::EPSILON * mag + term.norm(),
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "hyp2f1 power series",
        estimate: term.norm(),
        tol: f64::EPSILON * sum.norm(),
    })
}

fn pfaff(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Hyp2f1Value> {
    let inner = dispatch(a, c - b, c, w / (w - 1.0))?;
    let factor = Complex64::new(1.0 - w, 0.0).powc(-a);
    Ok(Hyp2f1Value {
        value: factor * inner.value,
        error: factor.norm() * inner.error,
    })
}

/// Inversion w → 1/w for w < 0. The inner functions are evaluated through the
/// full dispatcher, so this is usable (if not optimal) at any w < 0.
pub fn hyp2f1_inversion(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Hyp2f1Value> {
    if !(w < 0.0) {
        return Err(Error::InvalidParameter(format!("inversion needs w < 0, got {w}")));
    }
    if nonpositive_integer(c).is_some() {
        return Err(Error::HypergeometricPole(c));
    }
    if let Some(m) = near_integer(b - a) {
        if w > -1.0 {
            return dispatch(a, b, c, w);
        }
        return if m >= 0 {
            degenerate_inversion(a, m as usize, c, w)
        } else {
            degenerate_inversion(b, (-m) as usize, c, w)
        };
    }
    let offset = b - a;
    let nearest = offset.re.round();
    if (offset - nearest).norm() < NEAR_DEGENERATE && w <= -1.0 {
        return cauchy_near_degenerate(a, b, c, w, a + nearest);
    }
    generic_inversion(a, b, c, w)
}

fn generic_inversion(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Hyp2f1Value> {
    let minus_w = Complex64::new(-w, 0.0);
    let gc = gamma(c)?;
    let coef1 = gc * gamma(b - a)? * rgamma(b) * rgamma(c - a) * minus_w.powc(-a);
    let coef2 = gc * gamma(a - b)? * rgamma(a) * rgamma(c - b) * minus_w.powc(-b);
    let one = Complex64::new(1.0, 0.0);
    let f1 = dispatch(a, a - c + one, a - b + one, 1.0 / w)?;
    let f2 = dispatch(b, b - c + one, b - a + one, 1.0 / w)?;
    let t1 = coef1 * f1.value;
    let t2 = coef2 * f2.value;
    let cancellation = 4.0 * f64::EPSILON * (t1.norm() + t2.norm());
    Ok(Hyp2f1Value {
        value: t1 + t2,
        error: coef1.norm() * f1.error + coef2.norm() * f2.error + cancellation,
    })
}

/// F(b) = (1/2πi)∮ F(ζ)/(ζ − b) dζ on a circle around b₀, trapezoidal in angle.
fn cauchy_near_degenerate(a: Complex64, b: Complex64, c: Complex64, w: f64, b0: Complex64) -> Result<Hyp2f1Value> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut mag = 0.0;
    for k in 0..CAUCHY_POINTS {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CAUCHY_POINTS as f64;
        let d = Complex64::from_polar(CAUCHY_RADIUS, theta);
        let node = generic_inversion(a, b0 + d, c, w)?;
        let weight = d / (b0 + d - b);
        value += node.value * weight;
        mag += (node.value * weight).norm();
        error += node.error * weight.norm();
    }
    let n = CAUCHY_POINTS as f64;
    let truncation = mag / n * ((b - b0).norm() / CAUCHY_RADIUS).powi(CAUCHY_POINTS as i32);
    Ok(Hyp2f1Value {
        value: value / n,
        error: error / n + truncation + 4.0 * f64::EPSILON * mag / n,
    })
}

/// ₂F₁(a, a+m; c; w) for integer m ≥ 0 and w ≤ −1, via the logarithmic
/// large-argument expansion.
fn degenerate_inversion(a: Complex64, m: usize, c: Complex64, w: f64) -> Result<Hyp2f1Value> {
    let mf = m as f64;
    let z = Complex64::new(w, 0.0);
    let zinv = z.inv();
    let prefactor = Complex64::new(-w, 0.0).powc(-a);
    let ln_mz = (-w).ln();

    // finite part
    let mut finite = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    let mut poch = Complex64::new(1.0, 0.0);
    let mut zpow = Complex64::new(1.0, 0.0);
    let mut kfact = 1.0;
    for k in 0..m {
        let kf = k as f64;
        if k > 0 {
            poch *= a + (kf - 1.0);
            zpow *= zinv;
            kfact *= kf;
        }
        let mkfact: f64 = (1..m - k).map(|j| j as f64).product();
        let t = poch * mkfact / kfact * rgamma(c - a - kf) * zpow;
        finite += t;
        mag += t.norm();
    }
    finite *= rgamma(a + mf);
    mag *= rgamma(a + mf).norm();

    // logarithmic series
    let mut series = Complex64::new(0.0, 0.0);
    let mut poch = Complex64::new(1.0, 0.0); // (a+m)_k
    let mut kfact = 1.0; // k!
    let mut kmfact: f64 = (1..=m).map(|j| j as f64).product(); // (k+m)!
    let mut zpow = zinv.powu(m as u32); // z^{-k-m}
    let mut psi_1mk = digamma(Complex64::new(1.0 + mf, 0.0))?;
    let mut psi_1k = digamma(Complex64::new(1.0, 0.0))?;
    let mut small_run = 0;
    let mut converged = false;
    let mut last = 0.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        if k > 0 {
            poch *= a + mf + (kf - 1.0);
            kfact *= kf;
            kmfact *= kf + mf;
            zpow *= zinv;
            psi_1mk += 1.0 / (mf + kf);
            psi_1k += 1.0 / kf;
        }
        let x = c - a - mf - kf;
        let psi_amk = if nonpositive_integer(a + mf + kf).is_some() {
            // (a+m)_k vanishes from here on; the term is zero
            Complex64::new(0.0, 0.0)
        } else {
            digamma(a + mf + kf)?
        };
        let bracket = (psi_1mk + psi_1k - psi_amk + ln_mz) * rgamma(x) - psi_over_gamma(x);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let t = poch / (kfact * kmfact) * sign * zpow * bracket;
        series += t;
        mag += t.norm();
        last = t.norm();
        if nonpositive_integer(a + mf + kf).is_some() {
            converged = true;
            break;
        }
        if last <= f64::EPSILON * series.norm().max(f64::MIN_POSITIVE) {
            small_run += 1;
            if small_run >= 3 {
                converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "hyp2f1 logarithmic expansion",
            estimate: last,
            tol: f64::EPSILON,
        });
    }
    series *= rgamma(a);
    let gc = gamma(c)?;
    let value = gc * prefactor * (finite + series);
    Ok(Hyp2f1Value {
        value,
        error: (gc * prefactor).norm() * (8.0 * f64::EPSILON * mag + last),
    })
}
