#![no_main]

use fairpay_core::format::InstanceFile;
use fairpay_core::solvers::brute_force;
use fairpay_core::ModeSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = InstanceFile::from_json(text) else {
        return;
    };
    let Ok(inst) = file.to_instance() else {
        return;
    };
    let again = InstanceFile::from_json(&InstanceFile::from_instance(&inst).to_json())
        .expect("written instance parses")
        .to_instance()
        .expect("written instance is valid");
    assert_eq!(again, inst);
    if inst.n() <= 8 {
        for spec in [
            ModeSpec::Unconstrained,
            ModeSpec::Nd,
            ModeSpec::BetaNd { beta: 2.0 },
        ] {
            let r = brute_force(&inst, spec).expect("small instance solves");
            assert!(r.best.utility >= 0.0);
        }
    }
});
