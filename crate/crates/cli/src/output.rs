//! Artifact writers. Numbers are printed in shortest round-trip form, so a
//! rerun with the same config writes identical bytes.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Fails on the first non-finite value.
pub fn ensure_finite(what: &str, values: impl IntoIterator<Item = f64>) -> Result<(), CliError> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(CliError::NonFinite(what.to_string()))
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline. serde_json turns NaN and infinities
/// into `null`, which is rejected here since no report field is optional.
pub fn to_json<T: Serialize>(what: &str, value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
    if has_null(&v) {
        return Err(CliError::NonFinite(what.to_string()));
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn has_null(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => true,
        serde_json::Value::Array(a) => a.iter().any(has_null),
        serde_json::Value::Object(o) => o.values().any(has_null),
        _ => false,
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = to_json(&path.display().to_string(), value)?;
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_json_rejected() {
        #[derive(Serialize)]
        struct R {
            x: f64,
        }
        assert!(to_json("r", &R { x: 1.5 }).unwrap().contains("1.5"));
        assert!(matches!(
            to_json("r", &R { x: f64::NAN }),
            Err(CliError::NonFinite(_))
        ));
        assert!(ensure_finite("v", [1.0, f64::INFINITY]).is_err());
    }
}
