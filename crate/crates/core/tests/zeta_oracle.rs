mod common;

use common::g_integral;
use kappa_core::specfun::zeta::{i_total, ZetaContext};
use num_complex::Complex64;

#[test]
fn closed_form_matches_quadrature() {
    for n in [2, 3] {
        for lambda in [0.3, 0.5] {
            let ctx = ZetaContext::new(n, lambda, 1.0).unwrap();
            for i in 0..10 {
                let z = n as f64 + 0.2 + 0.4 * i as f64;
                let closed = i_total(Complex64::new(z, 0.0), &ctx).unwrap();
                let (quad, err) = g_integral(n, lambda, 1.0, z);
                let rel = (closed - quad).norm() / quad.abs();
                assert!(closed.im == 0.0 && closed.re > 0.0);
                assert!(rel <= 1e-7, "n={n} λ={lambda} z={z}: {closed} vs {quad} (±{err:e}), rel {rel:e}");
            }
        }
    }
}
