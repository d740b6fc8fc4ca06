#![no_main]

use libfuzzer_sys::fuzz_target;
use motive_periods::galois::{dim_galois, MotiveShape};
use motive_periods::schema::parse_motive_with_profile;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((m, profile)) = parse_motive_with_profile(s) {
        // parsed profiles always fit their motive
        let dims = dim_galois(&MotiveShape::of(&m), &profile).unwrap();
        assert!(dims.dim_ur <= 2 * (m.r() + m.s()) * m.n() + m.r() * m.s());
    }
});
