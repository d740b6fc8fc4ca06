#![no_main]

use libfuzzer_sys::fuzz_target;
use motive_periods::motive::full_period_matrix;
use motive_periods::schema::parse_motive;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = parse_motive(s) {
        if m.r() * m.s() * m.n() <= 64 {
            let _ = full_period_matrix(&m);
        }
    }
});
