//! The weighted zeta function ζ_f(z) = 2^{[n/2]}/(2π)^n · I(z) · ω(f) with
//! I = ½(I_c + I_λ), its pole set and residues, and the λ → 0 limit.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::{gamma, rgamma};
use super::hyp2f1::hyp2f1_with_tol;
use super::{PoleOrigin, PoleRecord};
use crate::error::{Error, Result};

pub const DEFAULT_POLE_FLOOR: f64 = -9.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaContext {
    n: usize,
    lambda: f64,
    mu: f64,
    t: f64,
    tol: f64,
}

impl ZetaContext {
    /// Weight exponent t = 1 and tolerance 1e−10 by default.
    pub fn new(n: usize, lambda: f64, mu: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if mu == 0.0 || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be a non-zero real, got {mu}")));
        }
        Ok(Self {
            n,
            lambda,
            mu,
            t: 1.0,
            tol: 1e-10,
        })
    }

    pub fn with_t(mut self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must be finite, got {t}")));
        }
        self.t = t;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        let fresh = Self::new(self.n, lambda, self.mu)?;
        Ok(Self {
            t: self.t,
            tol: self.tol,
            ..fresh
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
}

/// 2^{[n/2]}/(2π)^n.
pub fn spinor_prefactor(n: usize) -> f64 {
    2f64.powi((n / 2) as i32) / (2.0 * PI).powi(n as i32)
}

/// Index m of the uncancelled pole z = N − 2m of Γ((z−N)/2)/Γ(z/2), if z sits on one.
fn pole_index(shift: usize, z: Complex64) -> Option<usize> {
    if z.im != 0.0 || z.re.fract() != 0.0 {
        return None;
    }
    let offset = shift as f64 - z.re;
    if offset < 0.0 || offset % 2.0 != 0.0 {
        return None;
    }
    // Γ(z/2) has a pole as well when z ∈ {0, −2, …}
    if z.re <= 0.0 && z.re % 2.0 == 0.0 {
        return None;
    }
    Some((offset / 2.0) as usize)
}

/// Γ((z−N)/2)/Γ(z/2) away from its poles. For even N it is a rational function.
fn gamma_ratio(shift: usize, z: Complex64) -> Result<Complex64> {
    let half = z * 0.5;
    if shift % 2 == 0 {
        let prod = (1..=shift / 2).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (half - k as f64));
        Ok(prod.inv())
    } else {
        Ok(gamma(half - shift as f64 * 0.5)? * rgamma(half))
    }
}

/// Residue in z of the Γ-ratio at z₀ = N − 2m.
fn gamma_ratio_residue(z0: f64, m: usize) -> Complex64 {
    let mfact: f64 = (1..=m).map(|j| j as f64).product();
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    rgamma(Complex64::new(z0 * 0.5, 0.0)) * (2.0 * sign / mfact)
}

fn abs_mu_pow(ctx: &ZetaContext, exponent: Complex64) -> Complex64 {
    (exponent * ctx.mu.abs().ln()).exp()
}

fn commutative_record(m: usize, ctx: &ZetaContext) -> PoleRecord {
    let n = ctx.n as f64;
    let z0 = n - 2.0 * m as f64;
    let res_ic = PI.powf(n / 2.0) * ctx.mu.abs().powi(2 * m as i32) * gamma_ratio_residue(z0, m);
    PoleRecord {
        location: Complex64::new(z0, 0.0),
        residue: res_ic * (0.5 * spinor_prefactor(ctx.n)),
        origin: PoleOrigin::Commutative,
        order: 1,
    }
}

/// ₂F₁(1/2, −m; 3/2; w) = Σ_k (−m)_k w^k / (k! (2k+1)).
fn terminating_f(m: usize, w: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..m {
        let kf = k as f64;
        term *= (kf - m as f64) * w / (kf + 1.0);
        sum += term / (2.0 * kf + 3.0);
    }
    sum
}

fn deformed_record(m: usize, ctx: &ZetaContext) -> PoleRecord {
    let n = ctx.n as f64;
    let z0 = n - 1.0 - 2.0 * m as f64;
    let w = -1.0 / (ctx.lambda * ctx.mu).powi(2);
    let res_il = 2.0 * PI.powf((n - 1.0) / 2.0) * ctx.mu.abs().powi(2 * m as i32) * gamma_ratio_residue(z0, m)
        / ctx.lambda
        * terminating_f(m, w);
    PoleRecord {
        location: Complex64::new(z0, 0.0),
        residue: res_il * (0.5 * spinor_prefactor(ctx.n)),
        origin: PoleOrigin::Deformed,
        order: 1,
    }
}

/// I_c(z) = π^{n/2} |μ|^{n−z} Γ((z−n)/2)/Γ(z/2), continued to all z off its poles.
pub fn i_c(z: Complex64, ctx: &ZetaContext) -> Result<Complex64> {
    if let Some(m) = pole_index(ctx.n, z) {
        return Err(Error::AtPole(commutative_record(m, ctx)));
    }
    let n = ctx.n as f64;
    Ok(PI.powf(n / 2.0) * abs_mu_pow(ctx, n - z) * gamma_ratio(ctx.n, z)?)
}

/// I_λ(z) with the hypergeometric factor's error estimate.
pub fn i_lambda_with_error(z: Complex64, ctx: &ZetaContext) -> Result<(Complex64, f64)> {
    if let Some(m) = pole_index(ctx.n - 1, z) {
        return Err(Error::AtPole(deformed_record(m, ctx)));
    }
    let n1 = (ctx.n - 1) as f64;
    let w = -1.0 / (ctx.lambda * ctx.mu).powi(2);
    let b = (z - n1) * 0.5;
    let f = hyp2f1_with_tol(Complex64::new(0.5, 0.0), b, Complex64::new(1.5, 0.0), w, ctx.tol)?;
    let pref = 2.0 * PI.powf(n1 / 2.0) * abs_mu_pow(ctx, n1 - z) * gamma_ratio(ctx.n - 1, z)? / ctx.lambda;
    Ok((pref * f.value, pref.norm() * f.error))
}

/// I_λ(z) = 2π^{(n−1)/2} |μ|^{(n−1)−z} Γ((z−n+1)/2)/Γ(z/2) · λ⁻¹ ₂F₁(1/2, (z−n+1)/2; 3/2; −1/(λμ)²).
pub fn i_lambda(z: Complex64, ctx: &ZetaContext) -> Result<Complex64> {
    i_lambda_with_error(z, ctx).map(|(v, _)| v)
}

/// I(z) = ½(I_c(z) + I_λ(z)).
pub fn i_total(z: Complex64, ctx: &ZetaContext) -> Result<Complex64> {
    Ok(0.5 * (i_c(z, ctx)? + i_lambda(z, ctx)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEval {
    pub value: Complex64,
    pub error: f64,
}

/// ζ_f(z) with an absolute error estimate.
pub fn zeta_eval(omega_f: Complex64, z: Complex64, ctx: &ZetaContext) -> Result<ZetaEval> {
    if omega_f == Complex64::new(0.0, 0.0) {
        return Ok(ZetaEval {
            value: omega_f,
            error: 0.0,
        });
    }
    let ic = i_c(z, ctx)?;
    let (il, il_err) = i_lambda_with_error(z, ctx)?;
    let scale = spinor_prefactor(ctx.n) * 0.5;
    let value = (ic + il) * scale * omega_f;
    let rounding = 8.0 * f64::EPSILON * (ic.norm() + il.norm());
    Ok(ZetaEval {
        value,
        error: scale * omega_f.norm() * (il_err + rounding),
    })
}

pub fn zeta_value(omega_f: Complex64, z: Complex64, ctx: &ZetaContext) -> Result<Complex64> {
    zeta_eval(omega_f, z, ctx).map(|e| e.value)
}

/// All poles with Re(z) ≥ `floor`, sorted by decreasing location.
pub fn pole_table(ctx: &ZetaContext, floor: f64) -> Vec<PoleRecord> {
    let mut out = Vec::new();
    for (shift, origin) in [(ctx.n, PoleOrigin::Commutative), (ctx.n - 1, PoleOrigin::Deformed)] {
        let mut m = 0;
        loop {
            let z0 = shift as f64 - 2.0 * m as f64;
            if z0 < floor {
                break;
            }
            if pole_index(shift, Complex64::new(z0, 0.0)).is_some() {
                out.push(match origin {
                    PoleOrigin::Commutative => commutative_record(m, ctx),
                    PoleOrigin::Deformed => deformed_record(m, ctx),
                });
            }
            m += 1;
        }
    }
    out.sort_by(|a, b| b.location.re.total_cmp(&a.location.re));
    out
}

pub fn default_pole_table(ctx: &ZetaContext) -> Vec<PoleRecord> {
    pole_table(ctx, DEFAULT_POLE_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueOptions {
    pub radius: f64,
    pub points: usize,
    pub tol: f64,
}

impl Default for ResidueOptions {
    fn default() -> Self {
        Self {
            radius: 1e-3,
            points: 16,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub pole: PoleRecord,
    pub omega: Complex64,
    pub analytic: Complex64,
    pub numeric: Complex64,
    /// Same contour mean on the circle of half the radius.
    pub numeric_half_radius: Complex64,
    /// Contour estimate of the z^{−2} Laurent coefficient (zero for a simple pole).
    pub second_coefficient: Complex64,
    pub radius: f64,
    pub simple: bool,
    pub agrees: bool,
}

fn circle_mean(z0: Complex64, radius: f64, points: usize, power: i32, ctx: &ZetaContext) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..points {
        let theta = 2.0 * PI * (k as f64 + 0.5) / points as f64;
        let dz = Complex64::from_polar(radius, theta);
        acc += dz.powi(power) * zeta_value(one, z0 + dz, ctx)?;
    }
    Ok(acc / points as f64)
}

pub fn residue_check(z0: Complex64, omega_f: Complex64, ctx: &ZetaContext) -> Result<ResidueCheck> {
    residue_check_with(z0, omega_f, ctx, ResidueOptions::default())
}

/// Analytic residue of ζ_f at a tabulated pole against the contour mean of
/// (z − z₀)ζ_f on |z − z₀| = r, plus a two-radius simplicity test.
pub fn residue_check_with(
    z0: Complex64,
    omega_f: Complex64,
    ctx: &ZetaContext,
    opts: ResidueOptions,
) -> Result<ResidueCheck> {
    if !(opts.radius > 0.0) || opts.points < 4 {
        return Err(Error::InvalidParameter(format!(
            "residue contour needs radius > 0 and at least 4 points, got r={} points={}",
            opts.radius, opts.points
        )));
    }
    let floor = DEFAULT_POLE_FLOOR.min(z0.re - 2.0);
    let table = pole_table(ctx, floor);
    let pole = table
        .iter()
        .find(|p| (p.location - z0).norm() < 1e-9)
        .cloned()
        .ok_or(Error::NotAPole(z0))?;
    if let Some(other) = table
        .iter()
        .filter(|p| p.location != pole.location)
        .find(|p| (p.location - pole.location).norm() <= opts.radius)
    {
        return Err(Error::CircleOverlap {
            center: pole.location,
            other: other.location,
            radius: opts.radius,
        });
    }
    let center = pole.location;
    let res_r = circle_mean(center, opts.radius, opts.points, 1, ctx)?;
    let res_half = circle_mean(center, opts.radius * 0.5, opts.points, 1, ctx)?;
    let second = circle_mean(center, opts.radius, opts.points, 2, ctx)?;
    let scale = res_r.norm();
    let simple = (res_r - res_half).norm() <= opts.tol * scale && second.norm() <= opts.tol * opts.radius * scale;
    let analytic = pole.residue * omega_f;
    let numeric = res_r * omega_f;
    let agrees = (analytic - numeric).norm() <= opts.tol * analytic.norm();
    Ok(ResidueCheck {
        analytic,
        numeric,
        numeric_half_radius: res_half * omega_f,
        second_coefficient: second * omega_f,
        omega: omega_f,
        radius: opts.radius,
        simple,
        agrees,
        pole,
    })
}

/// c_n = 2^{[n/2]}/(2π)^n · π^{n/2}/Γ(n/2), the residue at z = n per unit weight.
pub fn leading_residue(n: usize) -> f64 {
    let nf = n as f64;
    spinor_prefactor(n) * PI.powf(nf / 2.0) * rgamma(Complex64::new(nf / 2.0, 0.0)).re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalRow {
    pub lambda: f64,
    /// max over the z-grid of |I(z; λ) − I_c(z)|
    pub max_deviation: f64,
    /// deviation at the previous λ divided by this one
    pub ratio: Option<f64>,
}

pub fn default_classical_grid(n: usize) -> Vec<Complex64> {
    (0..5)
        .map(|k| Complex64::new(n as f64 + 1.0 + 0.5 * k as f64, 0.0))
        .collect()
}

pub const DEFAULT_CLASSICAL_LAMBDAS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// Deviation of I(z; λ) from I_c(z) along a decreasing sequence of λ.
pub fn classical_limit(ctx: &ZetaContext, lambdas: &[f64], zs: &[Complex64]) -> Result<Vec<ClassicalRow>> {
    let mut rows: Vec<ClassicalRow> = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let c = ctx.with_lambda(lambda)?;
        let mut worst = 0.0f64;
        for &z in zs {
            let dev = (i_total(z, &c)? - i_c(z, &c)?).norm();
            worst = worst.max(dev);
        }
        let ratio = rows.last().map(|prev| prev.max_deviation / worst);
        rows.push(ClassicalRow {
            lambda,
            max_deviation: worst,
            ratio,
        });
    }
    Ok(rows)
}
