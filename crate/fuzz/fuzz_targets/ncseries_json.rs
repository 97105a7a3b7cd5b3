#![no_main]

use libfuzzer_sys::fuzz_target;
use metab_kzb::NcSeries;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = NcSeries::from_json(s) {
        let again = NcSeries::from_json(&x.to_json()).expect("serialized series parses");
        assert_eq!(x, again);
        let _ = x.is_lie();
    }
});
