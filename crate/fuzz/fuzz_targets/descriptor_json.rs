#![no_main]

use kpz_tail::io::GridDescriptor;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = GridDescriptor::from_json(text) {
        let _ = d.grids();
        assert_eq!(GridDescriptor::from_json(&d.to_json()).expect("round trip"), d);
    }
});
