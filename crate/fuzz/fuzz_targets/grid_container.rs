#![no_main]
use kappa_core::field::{decode, encode, FieldOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = decode(data, FieldOptions::default()) {
        let g = decode(&encode(&f), FieldOptions::default()).expect("re-encoded container decodes");
        assert_eq!(g.samples().dim(), f.samples().dim());
    }
});
