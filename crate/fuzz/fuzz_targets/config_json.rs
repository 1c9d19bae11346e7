#![no_main]

use kpz_tail::cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

const COMMANDS: [&str; 9] = [
    "spectral",
    "rearrange-check",
    "rate",
    "tail-law",
    "limit-shape",
    "hitting-time",
    "fk",
    "figure1",
    "selftest",
];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_json(text) {
        for command in COMMANDS {
            let _ = cfg.validate(command);
        }
    }
});
