#![no_main]

use byzsel::rounding::{pad_marginals, SystematicSampler};
use byzsel::waterfill::{deterministic_baseline, solve, sweep};
use byzsel::{normalize, value_of_marginals};
use libfuzzer_sys::fuzz_target;

// Bytes: t, ell, then one value per byte pair.
fuzz_target!(|data: &[u8]| {
    if data.len() < 6 {
        return;
    }
    let values: Vec<f64> = data[2..].chunks(2).map(|c| c.iter().fold(0.0, |a, &b| a * 256.0 + b as f64)).collect();
    let Ok(inst) = normalize(&values, data[0] as usize, data[1] as usize) else { return };
    let sol = solve(&inst);
    let tol = 1e-9 * sol.value.abs().max(1.0);
    assert!((value_of_marginals(&sol.marginals, &inst) - sol.value).abs() <= tol);
    assert!(sol.value >= deterministic_baseline(&inst).1 - tol);
    assert!(sweep(&inst).len() <= 2 * inst.n());
    let padded = pad_marginals(&sol.marginals, &inst);
    let set = SystematicSampler::new(&padded, inst.ell()).unwrap().sample_at(&0.5);
    assert_eq!(set.len(), inst.ell());
});
