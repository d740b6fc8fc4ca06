#![no_main]

use libfuzzer_sys::fuzz_target;
use motive_periods::schema::parse_curve;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(curve) = parse_curve(s) {
            assert!(curve.scale() > 0.0);
        }
    }
});
