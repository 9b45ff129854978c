//! Monomial keys come straight from user config files; parsing must be
//! total. The first byte selects the chart dimension.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.is_empty() {
        return;
    }
    let dim = (data[0] as usize % 8) + 1;
    if let Ok(key) = std::str::from_utf8(&data[1..]) {
        let _ = jdisc_cli::parse_monomial(key, dim);
    }
});
