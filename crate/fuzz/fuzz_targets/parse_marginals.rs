#![no_main]

use byzsel::{normalize, value_of_marginals, Marginals, Rational};
use byzsel_cli::input::parse_marginals;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let inst = normalize(&[8.0, 7.0, 5.0, 4.0], 1, 2).unwrap();
    if let Ok(p) = parse_marginals::<f64>(text) {
        if let Ok(m) = Marginals::from_original(&p, &inst) {
            let v = value_of_marginals(&m, &inst);
            assert!(v.is_finite() && v >= -1e-9);
        }
    }
    let _ = parse_marginals::<Rational>(text);
});
