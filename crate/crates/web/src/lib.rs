//! Browser bindings: count series, list structures, draw random structures
//! and guess recurrences for a specification typed into the page.
//!
//! Each export wraps a plain function returning `Result<String, String>` so
//! the logic is testable natively; results are JSON strings.

use serde_json::{json, Value};
use specc::{guess_recurrence, parse_system, to_json, Counter, Enumerator, Mode, SpecSystem, Structure};
use wasm_bindgen::prelude::*;

/// Largest size the page accepts; keeps a careless input from freezing the tab.
pub const MAX_SIZE: usize = 400;

fn load(spec: &str, class: &str, mode: Mode) -> Result<SpecSystem, String> {
    let parsed = parse_system(spec, None, mode)
        .map_err(|ds| ds.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))?;
    let class = if class.trim().is_empty() {
        parsed.system.root().to_string()
    } else {
        class.trim().to_string()
    };
    parsed.system.with_root(&class).map_err(|e| e.to_string())
}

fn bounded(size: usize) -> Result<usize, String> {
    if size > MAX_SIZE {
        return Err(format!("size {size} exceeds the demo limit of {MAX_SIZE}"));
    }
    Ok(size)
}

fn engine(sys: &SpecSystem, size: usize) -> Result<Enumerator, String> {
    let mut e = Enumerator::new(sys, sys.root()).map_err(|e| e.to_string())?;
    e.prepare(size).map_err(|e| e.to_string())?;
    Ok(e)
}

fn structure_json(s: &Structure) -> Value {
    json!({"text": s.to_string(), "size": s.size(), "tree": to_json(s)})
}

/// Counts at sizes `0..=upto` as a JSON array of decimal strings.
pub fn count_series_json(spec: &str, class: &str, upto: usize, labeled: bool) -> Result<String, String> {
    let upto = bounded(upto)?;
    let mode = if labeled { Mode::Labeled } else { Mode::Unlabeled };
    let sys = load(spec, class, mode)?;
    let counts = specc::series(&sys, sys.root(), upto, mode).map_err(|e| e.to_string())?;
    Ok(Value::from(counts.iter().map(ToString::to_string).collect::<Vec<_>>()).to_string())
}

/// `{"text", "size", "tree"}` for a uniform structure of the given size.
pub fn random_structure_json(spec: &str, class: &str, size: usize, seed: u64) -> Result<String, String> {
    let sys = load(spec, class, Mode::Unlabeled)?;
    let e = engine(&sys, bounded(size)?)?;
    let s = e.random(size, seed).map_err(|e| e.to_string())?;
    Ok(structure_json(&s).to_string())
}

/// The first `limit` structures of a size in canonical order.
pub fn list_structures_json(spec: &str, class: &str, size: usize, limit: usize) -> Result<String, String> {
    let sys = load(spec, class, Mode::Unlabeled)?;
    let e = engine(&sys, bounded(size)?)?;
    let items: Vec<Value> = e.iter(size).map_err(|e| e.to_string())?.take(limit).map(|s| structure_json(&s)).collect();
    Ok(json!({"count": e.count(size).map_err(|e| e.to_string())?.to_string(), "items": items}).to_string())
}

/// Recurrence text, or a "no recurrence" message, from `terms` counts.
pub fn guess_recurrence_text(spec: &str, class: &str, terms: usize) -> Result<String, String> {
    let sys = load(spec, class, Mode::Unlabeled)?;
    let terms = bounded(terms)?.max(1);
    let counts = Counter::new(&sys, sys.root())
        .and_then(|mut c| c.series(terms - 1))
        .map_err(|e| e.to_string())?;
    let big: Vec<_> = counts.into_iter().map(Into::into).collect();
    Ok(match guess_recurrence(&big, 3, 2).map_err(|e| e.to_string())? {
        Some(rec) if rec.stride > 1 || rec.shift > 0 => {
            let at = if rec.stride > 1 { format!("{}*n + {}", rec.stride, rec.shift) } else { format!("n + {}", rec.shift) };
            format!("{rec}\nwhere u(n) counts size {at}")
        }
        Some(rec) => rec.to_string(),
        None => "no recurrence found (order<=3, degree<=2)".to_string(),
    })
}

#[wasm_bindgen]
pub fn count_series(spec: &str, class: &str, upto: usize, labeled: bool) -> Result<String, JsError> {
    count_series_json(spec, class, upto, labeled).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn random_structure(spec: &str, class: &str, size: usize, seed: u32) -> Result<String, JsError> {
    random_structure_json(spec, class, size, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn list_structures(spec: &str, class: &str, size: usize, limit: usize) -> Result<String, JsError> {
    list_structures_json(spec, class, size, limit).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn recurrence(spec: &str, class: &str, terms: usize) -> Result<String, JsError> {
    guess_recurrence_text(spec, class, terms).map_err(|e| JsError::new(&e))
}
