//! Complex Γ, 1/Γ and digamma.
//!
//! Γ uses the g = 671/128 Lanczos fit (14 terms) on Re(z) ≥ 1/2 and the
//! reflection formula elsewhere.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 671.0 / 128.0;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// `Some(-k)` when `z` is exactly a non-positive integer.
pub fn nonpositive_integer(z: Complex64) -> Option<i64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        Some(z.re as i64)
    } else {
        None
    }
}

/// sin(πz) with the real part reduced first, so integers give exact zeros.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let x = z.re % 2.0;
    let (s, c) = real_sincos_pi(x);
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}

fn cos_pi(z: Complex64) -> Complex64 {
    let x = z.re % 2.0;
    let (s, c) = real_sincos_pi(x);
    let y = PI * z.im;
    Complex64::new(c * y.cosh(), -s * y.sinh())
}

fn real_sincos_pi(x: f64) -> (f64, f64) {
    if x.fract() == 0.0 {
        let even = (x as i64) % 2 == 0;
        return (0.0, if even { 1.0 } else { -1.0 });
    }
    if (x - x.trunc()).abs() == 0.5 {
        let k = (x - 0.5).round() as i64;
        let s = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        return (s, 0.0);
    }
    ((PI * x).sin(), (PI * x).cos())
}

/// ln Γ(z) for Re(z) ≥ 1/2. The branch is whatever the principal log gives;
/// only its exponential is meaningful.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    let tmp = z + LANCZOS_G;
    (z + 0.5) * tmp.ln() - tmp + (ser * SQRT_2PI / z).ln()
}

/// Γ(z). Errors at the poles z = 0, −1, −2, ….
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if nonpositive_integer(z).is_some() {
        return Err(Error::GammaPole(z));
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        Ok(PI / (sin_pi(z) * ln_gamma_right(one_minus).exp()))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

/// 1/Γ(z), entire; exactly zero at the non-positive integers.
pub fn rgamma(z: Complex64) -> Complex64 {
    if nonpositive_integer(z).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        sin_pi(z) * ln_gamma_right(one_minus).exp() / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// Real Γ on the positive axis, convenience wrapper.
pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0))
        .map(|g| g.re)
        .unwrap_or(f64::NAN)
}

const BERNOULLI_OVER_2K: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Digamma ψ(z). Errors at the poles of Γ.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if nonpositive_integer(z).is_some() {
        return Err(Error::GammaPole(z));
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        let cot = cos_pi(z) / sin_pi(z);
        return Ok(digamma(one_minus)? - cot * PI);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 16.0 {
        acc -= w.inv();
        w += 1.0;
    }
    let inv2 = (w * w).inv();
    let mut pow = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for b in BERNOULLI_OVER_2K {
        series += pow * b;
        pow *= inv2;
    }
    Ok(acc + w.ln() - w.inv() * 0.5 - series)
}

/// ψ(x)/Γ(x), continued through the poles: at x = −N the value is (−1)^{N+1} N!.
pub fn psi_over_gamma(x: Complex64) -> Complex64 {
    match nonpositive_integer(x) {
        Some(k) => {
            let n = (-k) as u32;
            let fact: f64 = (1..=n).map(f64::from).product();
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            Complex64::new(sign * fact, 0.0)
        }
        None => digamma(x).expect("not a pole") * rgamma(x),
    }
}

/// (a)_k as a running product.
pub fn pochhammer(a: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (a + j as f64))
}
