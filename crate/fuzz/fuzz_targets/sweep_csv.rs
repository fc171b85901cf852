#![no_main]

use fairpay_core::harness::{read_csv, write_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_csv(data) {
        let mut out = Vec::new();
        write_csv(&records, &mut out).expect("records serialize");
        assert_eq!(
            read_csv(out.as_slice()).expect("written CSV parses"),
            records
        );
    }
});
