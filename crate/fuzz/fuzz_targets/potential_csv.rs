#![no_main]

use kpz_tail::io::{potential_from_csv, potential_to_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = potential_from_csv(text) {
        let again = potential_from_csv(&potential_to_csv(&p)).expect("round trip");
        assert_eq!(again.values().len(), p.values().len());
    }
});
