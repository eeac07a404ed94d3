//! Group-datum files shipped with the library.

use crate::error::{Error, Result};
use crate::rootdata::{load_group, GroupDatum};

pub const PRESETS: &[(&str, &str)] = &[
    ("pgl2", include_str!("../../../groups/pgl2.json")),
    ("sl2", include_str!("../../../groups/sl2.json")),
    ("pgl3", include_str!("../../../groups/pgl3.json")),
    ("psp4", include_str!("../../../groups/psp4.json")),
    ("so5", include_str!("../../../groups/so5.json")),
    ("g2", include_str!("../../../groups/g2.json")),
    ("pu3", include_str!("../../../groups/pu3.json")),
    ("pgl4_flip", include_str!("../../../groups/pgl4_flip.json")),
    ("pso8_triality", include_str!("../../../groups/pso8_triality.json")),
];

pub fn document(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, d)| *d)
}

pub fn load(name: &str) -> Result<GroupDatum> {
    let doc = document(name).ok_or_else(|| Error::MalformedDocument(format!("unknown preset {name:?}")))?;
    load_group(doc)
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_presets_load() {
        for (name, _) in super::PRESETS {
            super::load(name).unwrap();
        }
        assert!(super::load("nope").is_err());
    }
}
