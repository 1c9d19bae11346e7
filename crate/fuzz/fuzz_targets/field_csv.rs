#![no_main]

use kpz_tail::io::{field_from_csv, field_to_csv, GridDescriptor};
use libfuzzer_sys::fuzz_target;

const DESCRIPTOR: GridDescriptor = GridDescriptor {
    half_width: 1.0,
    n_points: 5,
    t_start: 0.0,
    t_end: 1.0,
    n_steps: 2,
};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(field) = field_from_csv(&DESCRIPTOR, text) {
        // Anything accepted must survive a write and re-read.
        let again = field_from_csv(&DESCRIPTOR, &field_to_csv(&field)).expect("round trip");
        assert_eq!(again.values().len(), field.values().len());
    }
});
