//! The run-configuration parser must never panic, whatever the input.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = jdisc_cli::RunConfig::from_json_str(text);
    }
});
