#![no_main]

use adlvlab::affineweyl::{format_element, format_word, parse_element};
use adlvlab::presets;
use libfuzzer_sys::fuzz_target;

// First byte picks the preset, the rest is element text.
fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let (name, _) = presets::PRESETS[pick as usize % presets::PRESETS.len()];
    let g = presets::load(name).expect("presets load");
    if let Ok(w) = parse_element(&g, text) {
        assert_eq!(parse_element(&g, &format_element(&g, &w)).as_ref(), Ok(&w));
        assert_eq!(parse_element(&g, &format_word(&g, &w)).as_ref(), Ok(&w));
    }
});
