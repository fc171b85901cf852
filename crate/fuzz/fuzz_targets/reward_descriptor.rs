#![no_main]

use fairpay_core::format::RewardDescriptor;
use fairpay_core::AgentSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(descriptor) = RewardDescriptor::from_json(text) else {
        return;
    };
    if let Ok(f) = descriptor.build() {
        let n = f.n().min(10);
        for mask in 0..1u64 << n {
            let v = f.eval(&AgentSet::from_mask(mask)).expect("in-range subset");
            assert!((0.0..=1.0).contains(&v));
        }
    }
});
