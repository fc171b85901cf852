#![no_main]

use fairpay_core::harness::SweepSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spec) = SweepSpec::from_toml(text) {
            let (axis, values) = spec.axis().expect("parsed specs have one axis");
            assert!(!axis.is_empty() && !values.is_empty());
        }
    }
});
