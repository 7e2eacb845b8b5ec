#![no_main]

use cpfit::estimators::{DenominatorMode, Method};
use cpfit::Family;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(family) = text.parse::<Family>() {
        assert_eq!(family.to_string(), text);
    }
    if let Ok(method) = text.parse::<Method>() {
        assert_eq!(method.to_string(), text);
    }
    if let Ok(mode) = text.parse::<DenominatorMode>() {
        assert_eq!(mode.as_str(), text);
    }
});
