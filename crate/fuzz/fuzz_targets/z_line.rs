#![no_main]
use kappa_cli::parse::{parse_complex, parse_z_line};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_complex(text);
    if let Ok(line) = parse_z_line(text) {
        assert_eq!(parse_z_line(&line.to_string()).ok(), Some(line));
    }
});
