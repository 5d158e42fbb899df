#![no_main]
use kappa_cli::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = RunConfig::from_json(text) else {
        return;
    };
    // resolution must report errors, never panic
    let n = cfg.n_or(2).unwrap_or(2);
    let _ = cfg.grid(n);
    let _ = cfg.field_options();
    let _ = cfg.line_or("1:2:3");
    let _ = cfg.tol_or(1e-6);
    let _ = cfg.d_or(3);
    if let Ok(lambda) = cfg.lambda_exact_or("1") {
        let _ = cfg.mu_exact_or("0", &lambda);
        let _ = cfg.mu_scan_exact(&lambda);
    }
});
