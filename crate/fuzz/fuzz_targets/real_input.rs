#![no_main]
use std::str::FromStr;

use amo_core::arithmetic::{ContinuedFractionExpansion, RealInput};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 512 {
        return;
    }
    if let Ok(x) = RealInput::from_str(s) {
        let _ = ContinuedFractionExpansion::expand(&x, 16, 128);
    }
});
