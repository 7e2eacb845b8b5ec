#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(range) = cpfit::cli::parse_scan_range(text) {
        assert!(*range.start() >= 1 && range.start() <= range.end());
    }
});
