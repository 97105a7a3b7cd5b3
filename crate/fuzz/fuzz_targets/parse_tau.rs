#![no_main]

use libfuzzer_sys::fuzz_target;
use metab_kzb::numeric::parse_tau;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(tau) = parse_tau(s) {
        assert!(tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite());
    }
});
