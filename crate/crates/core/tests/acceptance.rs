//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the lines always print.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{chains, g_integral, sampled};
use kappa_core::dirac::{
    casimir_from_dirac, casimir_value, clifford, coordinate_commutator, twisted_leibniz_residual, ExactMatrix,
};
use kappa_core::exact::GaussRat;
use kappa_core::field::{
    involution, kms_scan, star_product, twisted_trace_residual, untwisted_residual,
};
use kappa_core::homology::{
    ce_differential, delta_split_check, epsilon_map, full_wedge, hochschild_boundary, kernel_mu_scan, ChainVector,
};
use kappa_core::lie_group::GroupConfig;
use kappa_core::pbw::{PbwElement, PbwParams};
use kappa_core::specfun::zeta::{
    classical_limit, default_classical_grid, default_pole_table, i_total, residue_check, ZetaContext,
    DEFAULT_CLASSICAL_LAMBDAS,
};
use kappa_core::specfun::{spectral_dimension_scan, PoleOrigin};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Failure(String);

impl From<kappa_core::Error> for Failure {
    fn from(e: kappa_core::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure(s)
    }
}

type Outcome = Result<String, Failure>;

fn check(cond: bool, msg: String) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure(msg))
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn zeta_quadrature() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 3] {
        for lambda in [0.3, 0.5] {
            let ctx = ZetaContext::new(n, lambda, 1.0)?;
            for i in 0..10 {
                let z = n as f64 + 0.2 + 0.4 * i as f64;
                let closed = i_total(c(z), &ctx)?;
                let (quad, _) = g_integral(n, lambda, 1.0, z);
                let rel = (closed - quad).norm() / quad.abs();
                worst = worst.max(rel);
                check(rel <= 1e-7, format!("n={n} λ={lambda} z={z}: relative error {rel:.2e}"))?;
            }
        }
    }
    Ok(format!("max relative error {worst:.2e} over 40 points"))
}

fn residue_corollary() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 3, 4] {
        let nf = n as f64;
        // c_n from its defining formula, with Γ(n/2) ∈ {1, √π/2, 1}
        let gamma_half = [1.0, PI.sqrt() / 2.0, 1.0][n - 2];
        let cn = 2f64.powi((n / 2) as i32) / (2.0 * PI).powi(n as i32) * PI.powf(nf / 2.0) / gamma_half;
        if n == 2 {
            check((cn - 1.0 / (2.0 * PI)).abs() < 1e-15, format!("c_2 = {cn}"))?;
        }
        for lambda in [0.3, 0.5] {
            let ctx = ZetaContext::new(n, lambda, 1.0)?;
            let r = residue_check(c(nf), c(1.0), &ctx)?;
            let rel = (r.numeric - cn).norm() / cn;
            worst = worst.max(rel);
            check(rel <= 1e-6, format!("n={n} λ={lambda}: numeric {} vs c_n {cn}", r.numeric))?;
            check((r.analytic - cn).norm() <= 1e-12 * cn, format!("n={n}: analytic {}", r.analytic))?;
        }
    }
    Ok(format!("max relative deviation from c_n {worst:.2e}"))
}

fn pole_structure() -> Outcome {
    let expect = |n: usize| -> (Vec<f64>, Vec<f64>) {
        if n == 2 {
            (vec![2.0], vec![1.0, -1.0, -3.0, -5.0, -7.0, -9.0])
        } else {
            (vec![3.0, 1.0, -1.0, -3.0, -5.0, -7.0, -9.0], vec![2.0])
        }
    };
    let mut checked = 0;
    for n in [2, 3] {
        let ctx = ZetaContext::new(n, 0.3, 1.0)?;
        let table = default_pole_table(&ctx);
        let (comm, def) = expect(n);
        let pick = |o: PoleOrigin| -> Vec<f64> {
            let mut v: Vec<f64> = table.iter().filter(|p| p.origin == o).map(|p| p.location.re).collect();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        check(pick(PoleOrigin::Commutative) == comm, format!("n={n} commutative {:?}", pick(PoleOrigin::Commutative)))?;
        check(pick(PoleOrigin::Deformed) == def, format!("n={n} deformed {:?}", pick(PoleOrigin::Deformed)))?;
        for p in &table {
            check(p.order == 1, format!("order {} at {}", p.order, p.location))?;
            let r = residue_check(p.location, c(1.0), &ctx)?;
            check(r.simple, format!("n={n}: pole at {} fails the two-radius test", p.location))?;
            check(r.agrees, format!("n={n}: residue at {} {} vs {}", p.location, r.numeric, r.analytic))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} poles, all simple"))
}

fn classical_limit_rate() -> Outcome {
    let mut ratios = Vec::new();
    for n in [2, 3] {
        let ctx = ZetaContext::new(n, 0.4, 1.0)?;
        let rows = classical_limit(&ctx, &DEFAULT_CLASSICAL_LAMBDAS, &default_classical_grid(n))?;
        for w in rows.windows(2) {
            let ratio = w[0].max_deviation / w[1].max_deviation;
            check(ratio >= 1.8, format!("n={n}: ratio {ratio:.3} at λ={}", w[1].lambda))?;
            ratios.push(ratio);
        }
    }
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!("smallest halving ratio {min:.3}"))
}

fn spectral_dimension() -> Outcome {
    let mut worst = 0.0f64;
    for (n, t) in [(2, 1.0), (3, 1.0), (4, 1.0), (2, 0.5), (3, 2.0)] {
        let ctx = ZetaContext::new(n, 0.3, 1.0).and_then(|c| c.with_t(t))?;
        let r = spectral_dimension_scan(&ctx)?;
        let p = r.p_estimate.ok_or(format!("(n={n}, t={t}) reported non-summable"))?;
        let dev = (p - (n as f64 - 1.0 + t)).abs();
        worst = worst.max(dev);
        check(dev <= 0.05, format!("(n={n}, t={t}): p = {p}"))?;
    }
    for t in [0.0, -1.0] {
        let ctx = ZetaContext::new(3, 0.3, 1.0).and_then(|c| c.with_t(t))?;
        let r = spectral_dimension_scan(&ctx)?;
        check(!r.summable, format!("t={t} reported summable"))?;
    }
    Ok(format!("max |p − (n−1+t)| = {worst:.2e}; t ∈ {{0, −1}} non-summable"))
}

fn twisted_trace() -> Outcome {
    let mut detail = Vec::new();
    for n in [2, 3] {
        let fs = sampled(n, 0.3);
        let tw = twisted_trace_residual(&fs[0], &fs[1])?;
        let plain = untwisted_residual(&fs[0], &fs[1])?;
        check(tw <= 1e-6, format!("n={n}: twisted residual {tw:.2e}"))?;
        check(plain >= 1e-3, format!("n={n}: untwisted residual {plain:.2e}"))?;
        let exps: Vec<f64> = (0..=n).map(|s| s as f64).collect();
        let scan = kms_scan(&fs[0], &fs[1], &exps)?;
        let best = scan.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        check(best.0 == (n - 1) as f64, format!("n={n}: KMS minimum at s={}", best.0))?;
        detail.push(format!("n={n}: twisted {tw:.1e}, untwisted {plain:.1e}"));
    }
    Ok(detail.join("; "))
}

fn star_algebra() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 3] {
        let fs = sampled(n, 0.3);
        let left = star_product(&star_product(&fs[0], &fs[1])?, &fs[2])?;
        let right = star_product(&fs[0], &star_product(&fs[1], &fs[2])?)?;
        let assoc = left.sup_distance(&right)?;
        let anti = involution(&star_product(&fs[0], &fs[1])?)?
            .sup_distance(&star_product(&involution(&fs[1])?, &involution(&fs[0])?)?)?;
        let invol = involution(&involution(&fs[0])?)?.sup_distance(&fs[0])?;
        let flat = sampled(n, 0.0);
        let comm = star_product(&flat[0], &flat[1])?.sup_distance(&flat[0].pointwise(&flat[1])?)?;
        for (name, v) in [("associativity", assoc), ("anti-homomorphism", anti), ("involutivity", invol), ("λ=0", comm)] {
            check(v <= 1e-6, format!("n={n} {name}: {v:.2e}"))?;
            worst = worst.max(v);
        }
    }
    Ok(format!("max residual {worst:.2e}"))
}

fn minus_i_gamma(g: &kappa_core::dirac::CliffordSet, nu: usize) -> ExactMatrix {
    g.exact(nu)
        .into_iter()
        .map(|row| row.into_iter().map(|e| -(&e * &GaussRat::i())).collect())
        .collect()
}

fn dirac_casimir() -> Outcome {
    for n in 1..=8 {
        let g = clifford(n)?;
        check(g.anticommutator_defect() == 0.0, format!("Clifford relations fail at n={n}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=4);
        let cfg = GroupConfig::new(n, rng.gen_range(0.05..1.5))?;
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let a = casimir_value(&p, &cfg)?;
        let b = casimir_from_dirac(&p, &cfg)?;
        let rel = (a - b).abs() / a.abs();
        worst = worst.max(rel);
    }
    check(worst <= 1e-12, format!("Casimir identity relative error {worst:.2e}"))?;
    for n in 2..=5 {
        let g = clifford(n)?;
        let params = PbwParams::new(n, BigRational::new(3.into(), 10.into()), BigRational::from_integer(1.into()))
            ?;
        for nu in 0..n {
            let got = coordinate_commutator(nu, &params)?;
            check(got == minus_i_gamma(&g, nu), format!("[D, x^{nu}] ≠ −iΓ^{nu} at n={n}"))?;
        }
    }
    let mut leib = 0.0f64;
    for n in [2, 3] {
        let fs = sampled(n, 0.3);
        leib = leib.max(twisted_leibniz_residual(&fs[0], &fs[1])?);
    }
    check(leib <= 1e-6, format!("twisted Leibniz residual {leib:.2e}"))?;
    Ok(format!("Casimir rel. error {worst:.1e}, Leibniz residual {leib:.1e}, commutators exact"))
}

fn binomial(a: usize, b: usize) -> usize {
    (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1))
}

fn homology_dichotomy() -> Outcome {
    let lambda = BigRational::new(3.into(), 2.into());
    let int = |k: i64| BigRational::from_integer(k.into());
    let mut special_hits = 0;
    for n in 2..=4usize {
        let params = PbwParams::new(n, lambda.clone(), int(0))?;
        let d = 4u32;
        let mut mus = vec![int(0), BigRational::new(7.into(), 3.into()), BigRational::new((-5).into(), 7.into())];
        for k in 0..=(d as i64 + 1) {
            let special = -(&lambda * int(n as i64 - 1 + k));
            mus.push(&special + BigRational::new(1.into(), 4.into()));
            mus.push(special);
        }
        for (mu, dim) in kernel_mu_scan(n, d, &params, &mus)? {
            let k = -(&mu / &lambda) - int(n as i64 - 1);
            let want = if k.is_integer() && k >= int(0) && k <= int(d as i64) {
                let k = k.to_integer().try_into().unwrap_or(0usize);
                special_hits += 1;
                binomial(k + n - 2, n - 2)
            } else {
                0
            };
            check(dim == want, format!("n={n} d={d} μ={mu}: kernel dimension {dim}, expected {want}"))?;
        }
        for d in 0..4u32 {
            let k = d as i64;
            let special = -(&lambda * int(n as i64 - 1 + k));
            let scan = kernel_mu_scan(n, d, &params, &[special, int(0)])?;
            check(scan[0].1 == binomial(d as usize + n - 2, n - 2) && scan[1].1 == 0, format!("n={n} d={d}: {scan:?}"))?;
        }
        for k in -2..=3i64 {
            let mu = -(&lambda * int(n as i64 - 1 + k));
            let p = params.with_mu(mu.clone());
            let top = ChainVector::from_element(&PbwElement::one(n), full_wedge(n), 0)?;
            let cycle = ce_differential(&top, &p)?.is_zero();
            check(cycle == (k == 0), format!("n={n} μ={mu}: 1⊗x₁∧⋯∧x_n cycle = {cycle}"))?;
        }
    }
    Ok(format!("{special_hits} resonant μ values with the predicted kernel, all others zero"))
}

fn complex_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut count = 0;
    for n in 2..=4usize {
        for k in 0..=n {
            for _ in 0..50 {
                let params = chains::params(&mut rng, n);
                let ch = chains::ce_chain(&mut rng, n, k, 3);
                let d1 = ce_differential(&ch, &params)?;
                let d2 = ce_differential(&d1, &params)?;
                check(d2.is_zero(), format!("δ∘δ ≠ 0 at n={n} k={k}"))?;
                check(
                    epsilon_map(&d1) == hochschild_boundary(&epsilon_map(&ch), &params),
                    format!("ε∘δ ≠ b∘ε at n={n} k={k}"),
                )?;
                let hc = chains::hochschild_chain(&mut rng, n, k, 2);
                let bb = hochschild_boundary(&hochschild_boundary(&hc, &params), &params);
                check(bb.is_zero(), format!("b∘b ≠ 0 at n={n} k={k}"))?;
                count += 1;
            }
        }
        for _ in 0..50 {
            let params = chains::params(&mut rng, n);
            let m = chains::element(&mut rng, n, 3, 3);
            let cm: Vec<Vec<BigRational>> = (0..n).map(|_| (0..n).map(|_| chains::rational(&mut rng)).collect()).collect();
            let r = delta_split_check(&m, &cm, &params)?;
            check(r.is_zero(), format!("split formula residual nonzero at n={n}"))?;
        }
    }
    Ok(format!("{count} random chains per identity, 150 split checks"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("zeta closed form vs quadrature", zeta_quadrature, 60),
        ("residue at z = n", residue_corollary, 10),
        ("pole structure", pole_structure, 10),
        ("classical limit", classical_limit_rate, 10),
        ("spectral dimension", spectral_dimension, 60),
        ("twisted trace / KMS", twisted_trace, 120),
        ("star-algebra properties", star_algebra, 120),
        ("Dirac / Casimir", dirac_casimir, 30),
        ("homology dichotomy", homology_dichotomy, 300),
        ("complex identities", complex_identities, 120),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; runtime over the {budget} s budget")),
            (Err(Failure(e)), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} [{:>2}] {name}: {detail} ({:.1} s)", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
