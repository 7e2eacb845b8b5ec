#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(hist) = cpfit::data::parse_dataset(text) {
        assert!(hist.n_c() >= 1);
        assert_eq!(hist.n_c(), hist.counts().iter().sum::<u64>());
        let again = cpfit::data::parse_dataset(&hist.to_text()).expect("serialized dataset parses");
        assert_eq!(again.counts(), hist.counts());
    }
});
