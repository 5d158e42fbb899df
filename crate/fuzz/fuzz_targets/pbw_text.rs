#![no_main]
use kappa_core::pbw::PbwElement;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let n = 1 + usize::from(n % 8);
    if let Ok(p) = PbwElement::parse(text, n) {
        // the display form parses back to the same element
        let again = PbwElement::parse(&p.to_string(), n).expect("display output parses");
        assert_eq!(again, p);
    }
});
