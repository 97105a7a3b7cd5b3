#![no_main]

use libfuzzer_sys::fuzz_target;
use metab_kzb::SymCoeff;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = SymCoeff::from_json(s) {
        let again = SymCoeff::from_json(&c.to_json()).expect("serialized coefficient parses");
        assert_eq!(c, again);
    }
});
