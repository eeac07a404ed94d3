#![no_main]

use adlvlab::cache::{format_record, parse_record};
use adlvlab::presets;
use libfuzzer_sys::fuzz_target;

// First byte picks the preset, the rest is one cache line.
fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let (name, _) = presets::PRESETS[pick as usize % presets::PRESETS.len()];
    let g = presets::load(name).expect("presets load");
    if let Ok((w, polys)) = parse_record(&g, text) {
        let again = parse_record(&g, &format_record(&g, &w, &polys)).expect("formatted record parses");
        assert_eq!(again, (w, polys));
    }
});
