#![no_main]

use libfuzzer_sys::fuzz_target;
use metab_kzb::MetabElem;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = MetabElem::from_json(s) {
        let again = MetabElem::from_json(&m.to_json()).expect("serialized element parses");
        assert_eq!(m, again);
        let _ = m.to_string();
    }
});
