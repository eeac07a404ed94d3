//! On-disk memo of class polynomials, one JSON record per line.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::affineweyl::{format_element, parse_element, AffineElt, Frame};
use crate::classpoly::{ClassPolys, Engine, QMinusOnePoly};
use crate::error::{Error, Result};
use crate::rootdata::GroupDatum;
use crate::sigmaconj::{Level, SigmaClassKey};

pub const CACHE_ENV: &str = "ADLVLAB_CACHE";

#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
    lock: Mutex<()>,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into(), lock: Mutex::new(()) }
    }

    /// The environment variable wins over an explicit directory.
    pub fn resolve(explicit: Option<&Path>) -> Option<Cache> {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Some(Cache::new(PathBuf::from(v))),
            _ => explicit.map(Cache::new),
        }
    }

    pub fn path_for(&self, frame: &Frame) -> PathBuf {
        self.dir.join(format!("{}.jsonl", Engine::frame_fingerprint(frame)))
    }

    pub fn load(&self, frame: &Frame) -> Result<Vec<(AffineElt, ClassPolys)>> {
        let path = self.path_for(frame);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let lines: Vec<String> = BufReader::new(file).lines().collect::<std::io::Result<_>>()?;
        let mut out = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match parse_record(frame.g(), line) {
                Ok(r) => out.push(r),
                // A torn final write from an interrupted run is dropped.
                Err(_) if i + 1 == lines.len() => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    pub fn append(&self, frame: &Frame, w: &AffineElt, polys: &ClassPolys) -> Result<()> {
        let line = format_record(frame.g(), w, polys);
        let _guard = self.lock.lock().expect("cache lock poisoned");
        std::fs::create_dir_all(&self.dir)?;
        let mut f = OpenOptions::new().create(true).append(true).open(self.path_for(frame))?;
        writeln!(f, "{line}")?;
        Ok(())
    }
}

pub fn format_record(g: &GroupDatum, w: &AffineElt, polys: &ClassPolys) -> String {
    let classes: Vec<Value> = polys
        .iter()
        .map(|(k, p)| json!({"key": k.to_text(g), "coeffs": serde_json::to_value(p).expect("poly serializes")}))
        .collect();
    json!({"elt": format_element(g, w), "classes": classes}).to_string()
}

pub fn parse_record(g: &GroupDatum, line: &str) -> Result<(AffineElt, ClassPolys)> {
    let bad = |m: &str| Error::MalformedDocument(format!("cache record: {m}"));
    let v: Value = serde_json::from_str(line).map_err(|e| bad(&e.to_string()))?;
    let elt = v.get("elt").and_then(Value::as_str).ok_or_else(|| bad("missing elt"))?;
    let w = parse_element(g, elt)?;
    let classes = v.get("classes").and_then(Value::as_array).ok_or_else(|| bad("missing classes"))?;
    let mut polys = ClassPolys::new();
    for c in classes {
        let key = c.get("key").and_then(Value::as_str).ok_or_else(|| bad("missing key"))?;
        let key = SigmaClassKey::parse(g, key)?;
        if key.level != Level::TildeClass {
            return Err(bad("class keys must be at tilde level"));
        }
        let coeffs = c.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing coeffs"))?;
        let coeffs = coeffs
            .iter()
            .map(|x| match x {
                Value::Number(n) => n.as_u64().map(BigUint::from).ok_or_else(|| bad("negative or fractional coefficient")),
                Value::String(s) => s.parse::<BigUint>().map_err(|_| bad("bad coefficient string")),
                _ => Err(bad("coefficient must be a number or string")),
            })
            .collect::<Result<Vec<_>>>()?;
        let p = QMinusOnePoly::from_coeffs(coeffs);
        if p.is_zero() || polys.insert(key, p).is_some() {
            return Err(bad("zero or duplicate class entry"));
        }
    }
    Ok((w, polys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classpoly::Strategy;
    use crate::presets;
    use std::sync::Arc;

    #[test]
    fn record_round_trip() {
        let g = Arc::new(presets::load("pgl2").unwrap());
        let e = Engine::new(Frame::standard(g.clone()).unwrap(), Strategy::Deterministic);
        let w = parse_element(&g, "t[-2] * w[s1]").unwrap();
        let p = e.class_polynomials(&w).unwrap();
        let line = format_record(&g, &w, &p);
        let (w2, p2) = parse_record(&g, &line).unwrap();
        assert_eq!((w2, &p2), (w, &*p));
        assert!(parse_record(&g, "{}").is_err());
        assert!(parse_record(&g, r#"{"elt":"1","classes":[{"key":"B:1","coeffs":[1]}]}"#).is_err());
    }

    #[test]
    fn warm_cache_gives_same_answers() {
        let dir = tempfile::tempdir().unwrap();
        let g = Arc::new(presets::load("pgl3").unwrap());
        let frame = Frame::standard(g.clone()).unwrap();
        let w = parse_element(&g, "s0 s1 s2 s1 s0 s2").unwrap();
        let cold = Engine::new(frame.clone(), Strategy::Deterministic).with_cache(Cache::new(dir.path())).unwrap();
        let a = cold.class_polynomials(&w).unwrap();
        let warm = Engine::new(frame.clone(), Strategy::Deterministic).with_cache(Cache::new(dir.path())).unwrap();
        assert!(warm.memo_len() > 0);
        assert_eq!(*warm.class_polynomials(&w).unwrap(), *a);
        let path = Cache::new(dir.path()).path_for(&frame);
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        assert_eq!(name.len(), 16);
        assert!(name.chars().all(|c| c.is_ascii_hexdigit()));
    }
}
