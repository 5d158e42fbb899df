mod common;

use common::{config, packets, sampled};
use kappa_core::dirac::{act_d, twisted_commutator_multiplier, twisted_leibniz_residual};
use kappa_core::field::{FieldOptions, Grid1d, GridFunction, GridSpec};
use num_complex::Complex64;

#[test]
fn twisted_leibniz_on_gaussian_pairs() {
    for n in [2, 3] {
        let fs = sampled(n, 0.3);
        let r = twisted_leibniz_residual(&fs[0], &fs[1]).unwrap();
        assert!(r <= 1e-6, "n={n}: {r}");
    }
}

#[test]
fn untwisted_leibniz_fails() {
    // with σ replaced by the identity the rule breaks at O(λ)
    let fs = sampled(2, 0.3);
    let fg = kappa_core::field::star_product(&fs[0], &fs[1]).unwrap();
    let lhs = act_d(0, &fg).unwrap();
    let a = kappa_core::field::star_product(&act_d(0, &fs[0]).unwrap(), &fs[1]).unwrap();
    let b = kappa_core::field::star_product(&fs[0], &act_d(0, &fs[1]).unwrap()).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let rhs = a.linear_combination(one, &b, one).unwrap();
    let dist = lhs
        .samples()
        .iter()
        .zip(rhs.samples().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    assert!(dist > 1e-3, "{dist}");
}

#[test]
fn slowly_varying_function_has_small_commutator() {
    let cfg = config(2, 0.3);
    let grid = GridSpec::standard();
    let f = GridFunction::from_fn(cfg, grid, FieldOptions::default(), 0.1, |_, _| Complex64::new(1.0, 0.0)).unwrap();
    let c = twisted_commutator_multiplier(&f).unwrap();
    assert!(c.sup_norm < 1e-12, "{}", c.sup_norm);
}

#[test]
fn commutator_norm_is_stable_under_grid_extension() {
    let cfg = config(2, 0.3);
    let p = &packets(2)[0];
    let base = GridSpec {
        x0: Grid1d::centered(128, 20.0),
        spatial: Grid1d::centered(64, 20.0),
    };
    let doubled = GridSpec {
        x0: Grid1d::centered(256, 40.0),
        spatial: Grid1d::centered(128, 40.0),
    };
    let a = twisted_commutator_multiplier(&p.sample(cfg, base, FieldOptions::default()).unwrap()).unwrap();
    let b = twisted_commutator_multiplier(&p.sample(cfg, doubled, FieldOptions::default()).unwrap()).unwrap();
    assert!(a.sup_norm.is_finite() && a.sup_norm > 0.1);
    assert!((a.sup_norm / b.sup_norm - 1.0).abs() <= 0.05, "{} vs {}", a.sup_norm, b.sup_norm);
}

#[test]
fn classical_limit_of_the_commutator() {
    let p = &packets(2)[0];
    let grid = GridSpec::standard();
    let f = p.sample(config(2, 1e-7), grid, FieldOptions::default()).unwrap();
    let flat = p.sample(config(2, 0.0), grid, FieldOptions::default()).unwrap();
    let c = twisted_commutator_multiplier(&f).unwrap();
    let c0 = twisted_commutator_multiplier(&flat).unwrap();
    for (a, b) in c.components.iter().zip(&c0.components) {
        let d = a
            .samples()
            .iter()
            .zip(b.samples().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(d <= 1e-6, "{d}");
    }
    // P₀▷f = −i∂₀f of the packet, checked against the closed form at the center
    let m = 128;
    let j = 64;
    let x0 = grid.x0.point(m);
    let xs = grid.spatial_coords(2, j);
    let h = 1e-4;
    let deriv = (p.value(x0 + h, &xs) - p.value(x0 - h, &xs)) / (2.0 * h);
    let want = Complex64::new(0.0, -1.0) * deriv;
    assert!((c0.components[0].samples()[[m, j]] - want).norm() < 1e-6);
}
