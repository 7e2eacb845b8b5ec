#![no_main]

use cpfit::estimators::{self, FitConfig, FitRequest, Method, PsFamily};
use cpfit::Family;
use libfuzzer_sys::fuzz_target;

// Parsed datasets feed the full estimation path; errors are fine, panics are not.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(hist) = cpfit::data::parse_dataset(text) else { return };
    if hist.counts().len() > 4096 {
        return;
    }
    let config = FitConfig { n_dft: 256.max(hist.counts().len().next_power_of_two()), ..FitConfig::default() };
    let _ = estimators::empirical_spectrum(&hist, config.n_dft);
    let _ = estimators::ps_estimate(&hist, PsFamily::NeymanTypeA, &config);
    for (family, method) in [
        (Family::NeymanTypeA, Method::Mm),
        (Family::GeometricPoisson, Method::Mm),
        (Family::GeometricPoisson, Method::P0h1),
        (Family::NegativeBinomial, Method::NbMm),
    ] {
        let mut request = FitRequest::new(family, method);
        request.config = config;
        if let Ok(fit) = estimators::fit(&hist, &request) {
            assert!(fit.delta >= 0.0);
        }
    }
});
