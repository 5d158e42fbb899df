#![no_main]
use kappa_cli::parse::{parse_mu_list, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(lambda) = parse_rational("3/2") {
        let _ = parse_mu_list(text, &lambda);
    }
    let _ = parse_rational(text);
});
