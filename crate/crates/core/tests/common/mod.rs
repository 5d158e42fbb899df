//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use kappa_core::field::{FieldOptions, GaussianPacket, Grid1d, GridFunction, GridSpec};
use kappa_core::lie_group::GroupConfig;
use kappa_core::quad::{integrate, integrate_2d, QuadSpec};
use num_complex::Complex64;

pub fn grid_for(n: usize) -> GridSpec {
    match n {
        2 => GridSpec::standard(),
        _ => GridSpec {
            x0: Grid1d::centered(128, 20.0),
            spatial: Grid1d::centered(64, 20.0),
        },
    }
}

pub fn config(n: usize, lambda: f64) -> GroupConfig {
    if lambda == 0.0 {
        GroupConfig::abelian(n).unwrap()
    } else {
        GroupConfig::new(n, lambda).unwrap()
    }
}

/// Three distinct packets with O(1) momenta in every direction.
pub fn packets(n: usize) -> [GaussianPacket; 3] {
    let (a, b) = if n == 2 { (2.0, 2.0) } else { (2.5, 2.2) };
    let mk = |amp: Complex64, c0: f64, k: f64, cs: [f64; 3], qs: [f64; 3]| GaussianPacket {
        amplitude: amp,
        a,
        c0,
        k,
        b,
        centers: cs[..n - 1].to_vec(),
        momenta: qs[..n - 1].to_vec(),
    };
    [
        mk(Complex64::new(1.0, 0.0), 0.3, 0.6, [0.2, -0.3, 0.1], [0.4, -0.2, 0.3]),
        mk(Complex64::new(0.6, 0.5), -0.4, -0.5, [-0.5, 0.4, 0.0], [-0.3, 0.5, 0.1]),
        mk(Complex64::new(0.8, -0.3), 0.1, 0.3, [0.3, 0.2, -0.2], [0.2, 0.3, -0.4]),
    ]
}

pub fn sampled(n: usize, lambda: f64) -> Vec<GridFunction> {
    let cfg = config(n, lambda);
    packets(n)
        .iter()
        .map(|p| p.sample(cfg, grid_for(n), FieldOptions::default()).unwrap())
        .collect()
}

fn scaled(xs: &[f64], s: f64) -> Vec<f64> {
    xs.iter().map(|x| s * x).collect()
}

/// ((f⋆g)⋆h)(x) = ∫∫ e^{iqx₀} ℱ₀f(p, x⃗) ℱ₀g(q−p, e^{−λp}x⃗) h(x₀, e^{−λq}x⃗) dp dq/(2π)²,
/// integrated directly from the closed-form packet transforms.
pub fn nested_product(
    f: &GaussianPacket,
    g: &GaussianPacket,
    h: &GaussianPacket,
    lambda: f64,
    x0: f64,
    xs: &[f64],
) -> Complex64 {
    let reach_f = 9.0 / f.a;
    let reach_g = 9.0 / g.a;
    let r = integrate_2d(
        |p, u| {
            // u = q − p
            let q = p + u;
            Complex64::from_polar(1.0, q * x0)
                * f.fourier0(p, xs)
                * g.fourier0(u, &scaled(xs, (-lambda * p).exp()))
                * h.value(x0, &scaled(xs, (-lambda * q).exp()))
        },
        (f.k - reach_f, f.k + reach_f),
        (g.k - reach_g, g.k + reach_g),
        QuadSpec::with_tol(1e-12, 1e-10),
    );
    r.value / (4.0 * PI * PI)
}

/// (f⋆G)(x) for G independent of x₀: ∫ e^{ipx₀} ℱ₀f(p, x⃗) G(e^{−λp}x⃗) dp/2π.
pub fn product_with_spatial<G: Fn(&[f64]) -> Complex64>(
    f: &GaussianPacket,
    g: G,
    lambda: f64,
    x0: f64,
    xs: &[f64],
) -> Complex64 {
    let reach = 9.0 / f.a;
    let r = integrate(
        |p| Complex64::from_polar(1.0, p * x0) * f.fourier0(p, xs) * g(&scaled(xs, (-lambda * p).exp())),
        f.k - reach,
        f.k + reach,
        QuadSpec::with_tol(1e-13, 1e-11),
    );
    r.value / (2.0 * PI)
}

/// ∫ e^{−λξ₀}(λ⁻²(1−e^{−λξ₀})² + |ξ⃗|² + μ²)^{−z/2} dⁿξ by nested quadrature in
/// (ξ₀, |ξ⃗|). Both ξ₀ tails are mapped onto (0, 1] so that the integrand stays
/// bounded, and |ξ⃗| = √B tan θ.
pub fn g_integral(n: usize, lambda: f64, mu: f64, z: f64) -> (f64, f64) {
    let sphere = match n {
        2 => 2.0,
        3 => 2.0 * PI,
        4 => 4.0 * PI,
        _ => panic!("sphere factor only tabulated for n <= 4"),
    };
    let spec = QuadSpec::with_tol(1e-14, 1e-11);
    let radial = |xi0: f64| -> f64 {
        let d0 = -(-lambda * xi0).exp_m1() / lambda;
        let b = d0 * d0 + mu * mu;
        let r = integrate(
            |th: f64| {
                let (s, c) = th.sin_cos();
                // ρ^{n−2}(B+ρ²)^{−z/2} dρ with ρ = √B tan θ
                s.powi(n as i32 - 2) * c.powf(z - n as f64)
            },
            0.0,
            PI / 2.0,
            spec,
        );
        sphere * b.powf((n as f64 - 1.0 - z) / 2.0) * r.value * (-lambda * xi0).exp()
    };
    let kappa = (z - n as f64) * lambda;
    // ξ₀ = −ln(u)/λ on the positive side, ξ₀ = ln(u)/κ on the negative side
    let plus = integrate(|u: f64| radial(-u.ln() / lambda) / (lambda * u), 0.0, 1.0, spec);
    let minus = integrate(|u: f64| radial(u.ln() / kappa) / (kappa * u), 0.0, 1.0, spec);
    (plus.value + minus.value, plus.error + minus.error)
}

pub mod chains {
    use kappa_core::exact::GaussRat;
    use kappa_core::homology::{wedges_of_size, ChainVector, HochschildChain};
    use kappa_core::pbw::{Monomial, PbwElement, PbwParams};
    use num_rational::BigRational;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn rational(rng: &mut ChaCha8Rng) -> BigRational {
        BigRational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into())
    }

    pub fn gauss(rng: &mut ChaCha8Rng) -> GaussRat {
        GaussRat::new(rational(rng), rational(rng))
    }

    pub fn params(rng: &mut ChaCha8Rng, n: usize) -> PbwParams {
        let lambda = BigRational::new(rng.gen_range(1i64..=7).into(), rng.gen_range(1i64..=4).into());
        PbwParams::new(n, lambda, rational(rng)).unwrap()
    }

    pub fn monomial(rng: &mut ChaCha8Rng, n: usize, d: u32) -> Monomial {
        Monomial::all_up_to(n, d).choose(rng).unwrap().clone()
    }

    pub fn element(rng: &mut ChaCha8Rng, n: usize, d: u32, terms: usize) -> PbwElement {
        let mut out = PbwElement::zero(n);
        for _ in 0..terms {
            out.add_term(monomial(rng, n, d), gauss(rng));
        }
        out
    }

    /// A few terms m ⊗ x_I with deg m ≤ d and |I| = k.
    pub fn ce_chain(rng: &mut ChaCha8Rng, n: usize, k: usize, d: u32) -> ChainVector {
        let wedges = wedges_of_size(n, k);
        let mut c = ChainVector::zero(n, k, d);
        for _ in 0..rng.gen_range(1..=4) {
            let w = *wedges.choose(rng).unwrap();
            c.add_term(monomial(rng, n, d), w, gauss(rng)).unwrap();
        }
        c
    }

    pub fn hochschild_chain(rng: &mut ChaCha8Rng, n: usize, k: usize, d: u32) -> HochschildChain {
        let mut c = HochschildChain::zero(n, k);
        for _ in 0..rng.gen_range(1..=3) {
            let tensors = (0..k).map(|_| monomial(rng, n, 2)).collect();
            c.add_term(monomial(rng, n, d), tensors, gauss(rng));
        }
        c
    }
}
