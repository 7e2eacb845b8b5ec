#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(fitted) = cpfit::data::parse_fitted_counts(text) {
        assert!(!fitted.is_empty());
        assert!(fitted.iter().all(|f| f.is_finite() && *f >= 0.0));
    }
});
