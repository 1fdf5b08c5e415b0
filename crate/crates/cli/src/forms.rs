//! Form specs: `delta` | `ec:a1=..,a2=..,a3=..,a4=..,a6=..` | `table:<path>`.

use std::path::Path;

use kida_core::qexp::{EllipticCurve, HeckeTable, ModularFormData};

use crate::CliError;

pub fn is_form_spec(spec: &str) -> bool {
    spec == "delta" || spec.starts_with("ec:") || spec.starts_with("table:")
}

pub fn parse_form(spec: &str, precision: usize) -> Result<ModularFormData, CliError> {
    if spec == "delta" {
        return Ok(ModularFormData::delta_with_precision(precision));
    }
    if let Some(rest) = spec.strip_prefix("ec:") {
        return parse_curve(rest).map(ModularFormData::elliptic_curve);
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let table = HeckeTable::load(Path::new(path))
            .map_err(|e| CliError::usage(format!("table {path}: {e}")))?;
        return Ok(ModularFormData::table(table));
    }
    Err(CliError::usage(format!(
        "unknown form `{spec}`; expected delta, ec:a1=..,a2=..,a3=..,a4=..,a6=.. or table:<path>"
    )))
}

/// Omitted coefficients are 0.
fn parse_curve(rest: &str) -> Result<EllipticCurve, CliError> {
    let mut a = [0i64; 5];
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("bad curve coefficient `{kv}`")))?;
        let slot = match k.trim() {
            "a1" => 0,
            "a2" => 1,
            "a3" => 2,
            "a4" => 3,
            "a6" => 4,
            other => {
                return Err(CliError::usage(format!(
                    "unknown curve coefficient `{other}`"
                )))
            }
        };
        a[slot] = v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("curve coefficient `{kv}` is not an integer")))?;
    }
    let curve = EllipticCurve::new(a[0], a[1], a[2], a[3], a[4]);
    let disc = curve.discriminant();
    if disc == 0 {
        return Err(CliError::usage("singular curve"));
    }
    if u64::try_from(disc.unsigned_abs()).is_err() {
        return Err(CliError::usage("curve discriminant exceeds 64 bits"));
    }
    Ok(curve)
}
