#![no_main]

use adlvlab::presets;
use adlvlab::sigmaconj::SigmaClassKey;
use libfuzzer_sys::fuzz_target;

// First byte picks the preset, the rest is a "B:" or "C:" key.
fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let (name, _) = presets::PRESETS[pick as usize % presets::PRESETS.len()];
    let g = presets::load(name).expect("presets load");
    if let Ok(k) = SigmaClassKey::parse(&g, text) {
        assert_eq!(SigmaClassKey::parse(&g, &k.to_text(&g)), Ok(k));
    }
});
