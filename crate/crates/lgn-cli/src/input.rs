//! Reading diagram and element files.
//!
//! An element file is either plain text in the element grammar (the surface
//! and mode then come from the command-line flags) or a JSON object
//! `{"surface": {"g": …, "n": …}, "mode": "generic" | "restricted", "p": …, "element": "…"}`.

use std::path::Path;

use serde_json::Value;

use lgn_core::lgn::parse_element;
use lgn_core::{LgnAlgebra, LgnElement, Mode, Surface};

use crate::{CliError, Opts};

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn element(path: &Path, o: &Opts) -> Result<LgnElement, CliError> {
    let text = read(path)?;
    let bad = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    let (surface, mode, body) = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        let s = v.get("surface").ok_or_else(|| bad("missing \"surface\"".into()))?;
        let gn = |k: &str| {
            s.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as u32)
                .ok_or_else(|| bad(format!("surface.{k} must be a non-negative integer")))
        };
        let surface = Surface::new(gn("g")?, gn("n")?).map_err(|e| bad(e.to_string()))?;
        let mode = match v.get("mode").and_then(Value::as_str) {
            None | Some("generic") => Mode::Generic,
            Some("restricted") => {
                let p = v
                    .get("p")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| bad("restricted mode needs \"p\"".into()))?;
                Mode::Restricted(p as u32)
            }
            Some(m) => return Err(bad(format!("unknown mode {m:?}"))),
        };
        let body = v
            .get("element")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing \"element\" string".into()))?
            .to_string();
        (surface, mode, body)
    } else {
        (o.surface()?, o.mode()?, text)
    };
    let alg = LgnAlgebra::get(surface, mode)?;
    parse_element(&alg, body.trim()).map_err(|e| bad(e.to_string()))
}
