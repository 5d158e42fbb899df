//! The four subcommands. Each returns a JSON report embedding the resolved
//! configuration; data files go to the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use kappa_core::field::{
    decode, encode, involution, kms_scan, star_product, twisted_trace_residual, untwisted_residual, GaussianPacket,
    GridFunction,
};
use kappa_core::homology::{
    ce_differential, expected_top_kernel_dim, full_wedge, homology_report, kernel_mu_scan, ChainVector,
};
use kappa_core::lie_group::GroupConfig;
use kappa_core::pbw::{PbwElement, PbwParams};
use kappa_core::specfun::spectral_dimension_scan;
use kappa_core::specfun::zeta::{
    classical_limit, default_classical_grid, default_pole_table, residue_check, zeta_eval, ZetaContext,
    DEFAULT_CLASSICAL_LAMBDAS,
};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigError, RunConfig, Scalar};
use crate::parse::{to_f64, ZLine};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<kappa_core::Error> for CliError {
    fn from(e: kappa_core::Error) -> Self {
        use kappa_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::Parse(_) | E::Format(_) | E::GridMismatch => {
                CliError::Config(ConfigError::Invalid(e.to_string()))
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: RunConfig,
    pub pass: bool,
    pub results: Value,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("kappa-out"));
    fs::create_dir_all(&dir).map_err(|source| CliError::Output {
        path: dir.clone(),
        source,
    })?;
    Ok(dir)
}

pub fn write_report(report: &Report, dir: &Path, name: &str) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    write_file(&dir.join(name), text.as_bytes())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Numerical(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ZetaSelect {
    pub scan: bool,
    pub poles: bool,
    pub residue: bool,
    pub classical: bool,
}

#[derive(Serialize)]
struct ScanRow {
    z_re: f64,
    z_im: f64,
    zeta_re: f64,
    zeta_im: f64,
    error: f64,
    status: &'static str,
}

#[derive(Serialize)]
struct ClassicalCsv {
    lambda: f64,
    max_deviation: f64,
    ratio: Option<f64>,
}

pub fn cmd_zeta(cfg: RunConfig, mut select: ZetaSelect) -> Result<Report, CliError> {
    let n = cfg.n_or(2)?;
    let lambda_exact = cfg.lambda_exact_or("0.5")?;
    let lambda = to_f64(&lambda_exact);
    let mu = cfg.mu_or("1", &lambda_exact)?;
    let omega = cfg.omega.unwrap_or(1.0);
    let tol = cfg.tol_or(1e-10)?;
    let default_line = format!("{}:{}:9", n as f64 + 0.5, n as f64 + 4.5);
    let line: ZLine = cfg.line_or(&default_line)?;
    let ctx = ZetaContext::new(n, lambda, mu)?.with_tol(tol)?;
    if cfg.line.is_some() {
        select.scan = true;
    }
    if !(select.scan || select.poles || select.residue || select.classical) {
        select = ZetaSelect {
            scan: true,
            poles: true,
            residue: true,
            classical: true,
        };
    }
    let dir = out_dir(&cfg)?;
    let resolved = RunConfig {
        n: Some(n),
        lambda: Some(Scalar::Number(lambda)),
        mu: Some(Scalar::Number(mu)),
        omega: Some(omega),
        tol: Some(tol),
        line: Some(line.to_string()),
        out: Some(dir.clone()),
        ..cfg.clone()
    };
    let mut results = serde_json::Map::new();
    let mut pass = true;
    let omega_c = Complex64::new(omega, 0.0);

    if select.scan {
        let mut rows = Vec::with_capacity(line.count);
        for z in line.points() {
            let row = match zeta_eval(omega_c, z, &ctx) {
                Ok(v) => ScanRow {
                    z_re: z.re,
                    z_im: z.im,
                    zeta_re: v.value.re,
                    zeta_im: v.value.im,
                    error: v.error,
                    status: "ok",
                },
                Err(kappa_core::Error::AtPole(_)) => ScanRow {
                    z_re: z.re,
                    z_im: z.im,
                    zeta_re: f64::NAN,
                    zeta_im: f64::NAN,
                    error: f64::NAN,
                    status: "pole",
                },
                Err(e) => return Err(e.into()),
            };
            rows.push(row);
        }
        let path = dir.join("zeta_scan.csv");
        write_file(&path, &csv_bytes(&rows)?)?;
        results.insert("scan".into(), json!({"file": path, "rows": rows.len()}));
    }
    if select.poles {
        let table = default_pole_table(&ctx);
        let path = dir.join("poles.json");
        write_file(&path, serde_json::to_string_pretty(&table).expect("serializes").as_bytes())?;
        results.insert("poles".into(), serde_json::to_value(&table).expect("serializes"));
    }
    if select.residue {
        let mut checks = Vec::new();
        for pole in default_pole_table(&ctx) {
            let r = residue_check(pole.location, omega_c, &ctx)?;
            pass &= r.agrees && r.simple;
            checks.push(r);
        }
        let path = dir.join("residues.json");
        write_file(&path, serde_json::to_string_pretty(&checks).expect("serializes").as_bytes())?;
        results.insert("residues".into(), serde_json::to_value(&checks).expect("serializes"));
    }
    if select.classical {
        let rows = classical_limit(&ctx, &DEFAULT_CLASSICAL_LAMBDAS, &default_classical_grid(n))?;
        let csv_rows: Vec<ClassicalCsv> = rows
            .iter()
            .map(|r| ClassicalCsv {
                lambda: r.lambda,
                max_deviation: r.max_deviation,
                ratio: r.ratio,
            })
            .collect();
        let path = dir.join("classical_limit.csv");
        write_file(&path, &csv_bytes(&csv_rows)?)?;
        results.insert("classical_limit".into(), serde_json::to_value(&rows).expect("serializes"));
    }
    let report = Report {
        command: "zeta",
        seed: None,
        config: resolved,
        pass,
        results: Value::Object(results),
    };
    write_report(&report, &dir, "zeta.json")?;
    Ok(report)
}

/// Three Gaussian packets; the seed jitters their centers by at most 0.05.
pub fn fixture_packets(n: usize, seed: u64) -> Vec<GaussianPacket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = if n == 2 { (2.0, 2.0) } else { (2.5, 2.2) };
    let base: [(Complex64, f64, f64, [f64; 7], [f64; 7]); 3] = [
        (Complex64::new(1.0, 0.0), 0.3, 0.6, [0.2, -0.3, 0.1, 0.0, 0.1, -0.1, 0.0], [0.4, -0.2, 0.3, 0.1, 0.0, 0.2, -0.1]),
        (Complex64::new(0.6, 0.5), -0.4, -0.5, [-0.5, 0.4, 0.0, 0.2, -0.1, 0.0, 0.1], [-0.3, 0.5, 0.1, -0.2, 0.1, 0.0, 0.2]),
        (Complex64::new(0.8, -0.3), 0.1, 0.3, [0.3, 0.2, -0.2, 0.0, 0.0, 0.1, -0.1], [0.2, 0.3, -0.4, 0.0, 0.1, -0.1, 0.0]),
    ];
    base.iter()
        .map(|(amp, c0, k, cs, qs)| {
            let mut jitter = || rng.gen_range(-0.05..0.05);
            GaussianPacket {
                amplitude: *amp,
                a,
                c0: c0 + jitter(),
                k: *k,
                b,
                centers: cs[..n - 1].iter().map(|c| c + jitter()).collect(),
                momenta: qs[..n - 1].to_vec(),
            }
        })
        .collect()
}

#[derive(Debug, Default, Clone)]
pub struct StarSelect {
    pub kms_scan: bool,
    pub save_fixtures: bool,
    pub fixtures: Option<Vec<PathBuf>>,
}

pub fn cmd_star(cfg: RunConfig, select: StarSelect) -> Result<Report, CliError> {
    let n = cfg.n_or(2)?;
    let lambda = cfg.lambda_or("0.3")?;
    let tol = cfg.tol_or(1e-6)?;
    let seed = cfg.seed.unwrap_or(1);
    let grid = cfg.grid(n)?;
    let opts = cfg.field_options()?;
    let group = if lambda == 0.0 {
        GroupConfig::abelian(n)?
    } else {
        GroupConfig::new(n, lambda)?
    };
    let dir = out_dir(&cfg)?;
    let fs: Vec<GridFunction> = match &select.fixtures {
        Some(paths) => {
            if paths.len() != 3 {
                return Err(ConfigError::Invalid("--fixtures needs exactly three files".into()).into());
            }
            let mut out = Vec::new();
            for p in paths {
                let bytes = fs::read(p).map_err(|source| ConfigError::Io {
                    path: p.clone(),
                    source,
                })?;
                let f = decode(&bytes, opts)?;
                if f.config() != &group || f.grid() != &grid {
                    return Err(ConfigError::Invalid(format!(
                        "fixture {} does not match n, lambda and the grid",
                        p.display()
                    ))
                    .into());
                }
                out.push(f);
            }
            out
        }
        None => fixture_packets(n, seed)
            .iter()
            .map(|p| p.sample(group, grid, opts))
            .collect::<kappa_core::Result<_>>()?,
    };
    if select.save_fixtures {
        for (f, name) in fs.iter().zip(["f.kgf", "g.kgf", "h.kgf"]) {
            write_file(&dir.join(name), &encode(f))?;
        }
    }
    let (f, g, h) = (&fs[0], &fs[1], &fs[2]);
    let assoc = star_product(&star_product(f, g)?, h)?.sup_distance(&star_product(f, &star_product(g, h)?)?)?;
    let anti = involution(&star_product(f, g)?)?.sup_distance(&star_product(&involution(g)?, &involution(f)?)?)?;
    let invol = involution(&involution(f)?)?.sup_distance(f)?;
    let twisted = twisted_trace_residual(f, g)?;
    let untwisted = untwisted_residual(f, g)?;
    let mut checks = vec![
        json!({"name": "associativity", "residual": assoc, "pass": assoc <= tol}),
        json!({"name": "anti_homomorphism", "residual": anti, "pass": anti <= tol}),
        json!({"name": "involutivity", "residual": invol, "pass": invol <= tol}),
        json!({"name": "twisted_trace", "residual": twisted, "pass": twisted <= tol}),
    ];
    if group.is_abelian() {
        let comm = star_product(f, g)?.sup_distance(&f.pointwise(g)?)?;
        checks.push(json!({"name": "pointwise_reduction", "residual": comm, "pass": comm <= tol}));
        checks.push(json!({"name": "untwisted_trace", "residual": untwisted, "pass": untwisted <= tol}));
    } else {
        checks.push(json!({"name": "untwisted_trace", "residual": untwisted, "pass": untwisted >= 1e-3}));
    }
    let mut results = serde_json::Map::new();
    if select.kms_scan {
        let exps: Vec<f64> = (0..=n).map(|s| s as f64).collect();
        let scan = kms_scan(f, g, &exps)?;
        let best = scan
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|r| r.0)
            .unwrap_or(f64::NAN);
        let ok = group.is_abelian() || best == (n - 1) as f64;
        checks.push(json!({"name": "kms_minimum", "argmin": best, "pass": ok}));
        results.insert(
            "kms_scan".into(),
            scan.iter().map(|(s, r)| json!({"s": s, "residual": r})).collect(),
        );
    }
    let pass = checks.iter().all(|c| c["pass"] == json!(true));
    results.insert("checks".into(), Value::Array(checks));
    results.insert(
        "fixtures".into(),
        match &select.fixtures {
            Some(p) => json!({"files": p}),
            None => serde_json::to_value(fixture_packets(n, seed)).expect("serializes"),
        },
    );
    let resolved = RunConfig {
        n: Some(n),
        lambda: Some(Scalar::Number(lambda)),
        tol: Some(tol),
        seed: Some(seed),
        n0: Some(grid.x0.count),
        ns: Some(grid.spatial.count),
        x0_half_width: Some(-grid.x0.start),
        spatial_half_width: Some(-grid.spatial.start),
        interpolation: Some(match opts.interpolation {
            kappa_core::field::Interpolation::Spectral => "spectral".into(),
            kappa_core::field::Interpolation::Lagrange(k) => format!("lagrange:{k}"),
        }),
        out: Some(dir.clone()),
        ..cfg
    };
    let report = Report {
        command: "star",
        seed: Some(seed),
        config: resolved,
        pass,
        results: Value::Object(results),
    };
    write_report(&report, &dir, "star.json")?;
    Ok(report)
}

/// Default μ scan: μ/λ ∈ {1, 0, −1/2, −1, …, −(n+d)}.
fn default_mu_scan(n: usize, d: u32, lambda: &BigRational) -> Vec<BigRational> {
    let top = 2 * (n as i64 + i64::from(d));
    std::iter::once(BigRational::from_integer(1.into()))
        .chain((0..=top).map(|j| -BigRational::new(j.into(), 2.into())))
        .map(|r| r * lambda)
        .collect()
}

pub fn cmd_homology(cfg: RunConfig, mu_scan: bool) -> Result<Report, CliError> {
    let n = cfg.n_or(2)?;
    let d = cfg.d_or(3)?;
    let lambda = cfg.lambda_exact_or("1")?;
    let mu = cfg.mu_exact_or("0", &lambda)?;
    let params = PbwParams::new(n, lambda.clone(), mu.clone())?;
    let dir = out_dir(&cfg)?;
    let report = homology_report(n, d, &params)?;
    let predicted = expected_top_kernel_dim(n, d, &params);
    let top = ChainVector::from_element(&PbwElement::one(n), full_wedge(n), d)?;
    let unit_cycle = ce_differential(&top, &params)?.is_zero();
    let top_dim = report.per_degree[n].kernel_dim;
    let mut pass = top_dim == predicted;
    let mut results = json!({
        "report": report,
        "top_kernel_dim": top_dim,
        "predicted_top_kernel_dim": predicted,
        "unit_top_is_cycle": unit_cycle,
    });
    let scan_list = match cfg.mu_scan_exact(&lambda)? {
        Some(list) => Some(list),
        None if mu_scan => Some(default_mu_scan(n, d, &lambda)),
        None => None,
    };
    if let Some(list) = &scan_list {
        let rows: Vec<Value> = kernel_mu_scan(n, d, &params, list)?
            .into_iter()
            .map(|(m, dim)| {
                let expected = expected_top_kernel_dim(n, d, &params.with_mu(m.clone()));
                pass &= dim == expected;
                json!({
                    "mu": m.to_string(),
                    "mu_over_lambda": if lambda == BigRational::from_integer(0.into()) {
                        Value::Null
                    } else {
                        Value::String((&m / &lambda).to_string())
                    },
                    "kernel_dim": dim,
                    "predicted": expected,
                })
            })
            .collect();
        results["mu_scan"] = Value::Array(rows);
    }
    let resolved = RunConfig {
        n: Some(n),
        d: Some(d),
        lambda: Some(Scalar::Text(lambda.to_string())),
        mu: Some(Scalar::Text(mu.to_string())),
        mu_scan: scan_list.map(|l| l.iter().map(|m| Scalar::Text(m.to_string())).collect()),
        out: Some(dir.clone()),
        ..cfg
    };
    let report = Report {
        command: "homology",
        seed: None,
        config: resolved,
        pass,
        results,
    };
    write_report(&report, &dir, "homology.json")?;
    Ok(report)
}

pub fn cmd_specdim(cfg: RunConfig) -> Result<Report, CliError> {
    let n = cfg.n_or(2)?;
    let lambda_exact = cfg.lambda_exact_or("0.3")?;
    let lambda = to_f64(&lambda_exact);
    let mu = cfg.mu_or("1", &lambda_exact)?;
    let t = cfg.t_or(1.0)?;
    let ctx = ZetaContext::new(n, lambda, mu)?.with_t(t)?;
    let dir = out_dir(&cfg)?;
    let r = spectral_dimension_scan(&ctx)?;
    let pass = match r.p_estimate {
        Some(p) => t > 0.0 && (p - r.expected).abs() <= 0.05,
        None => t <= 0.0,
    };
    let results = json!({
        "t": r.t,
        "summable": r.summable,
        "p_estimate": r.p_estimate,
        "expected": r.expected,
        "boundary": r.boundary,
    });
    let resolved = RunConfig {
        n: Some(n),
        lambda: Some(Scalar::Number(lambda)),
        mu: Some(Scalar::Number(mu)),
        t: Some(t),
        out: Some(dir.clone()),
        ..cfg
    };
    let report = Report {
        command: "specdim",
        seed: None,
        config: resolved,
        pass,
        results,
    };
    write_report(&report, &dir, "specdim.json")?;
    Ok(report)
}
