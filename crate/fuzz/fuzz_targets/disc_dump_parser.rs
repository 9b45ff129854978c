//! Disc dumps are reloaded for residual recomputation; the parser must
//! reject any malformed table without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = jdisc_cli::parse_disc_dump(text);
    }
});
