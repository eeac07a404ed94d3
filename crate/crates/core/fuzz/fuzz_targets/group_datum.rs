#![no_main]

use adlvlab::rootdata::load_group;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(g) = load_group(text) {
            // A datum that loads must have a usable finite Weyl group.
            let _ = g.weyl_elements();
        }
    }
});
