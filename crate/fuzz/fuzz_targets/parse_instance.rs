#![no_main]

use byzsel::{normalize, Rational};
use byzsel_cli::input::parse_instance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_instance::<f64>(text) {
        if let Ok(inst) = normalize(&file.values, file.t, file.l) {
            assert!(inst.values().windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(inst.perm().len(), inst.n());
        }
    }
    if let Ok(file) = parse_instance::<Rational>(text) {
        let _ = normalize(&file.values, file.t, file.l);
    }
});
