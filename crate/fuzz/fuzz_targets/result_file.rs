#![no_main]

use fairpay_core::format::ResultFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = ResultFile::from_json(text) {
            assert!(file.set.windows(2).all(|w| w[0] < w[1]));
            let again = ResultFile::from_json(&file.to_json()).expect("written result parses");
            assert_eq!(again.set, file.set);
        }
    }
});
