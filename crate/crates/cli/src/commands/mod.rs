//! Command implementations. Each returns an optional one-line stdout
//! summary; files are written as a side effect.

mod classify;
mod perturb;
mod render;
mod trace;
mod verify;

pub use classify::classify;
pub use perturb::perturb;
pub use render::render;
pub use trace::trace;
pub use verify::verify;

use std::path::Path;

use baker_lab_core::{c64, EntireMap};

use crate::config::Config;
use crate::CliError;

pub(crate) const MAP_KEYS: [&str; 5] = ["map", "fatou_c", "fatou_c_im", "alpha", "alpha_im"];

pub(crate) fn map_from_config(cfg: &Config) -> Result<EntireMap, CliError> {
    let c = c64(cfg.get_f64("fatou_c", 1.0)?, cfg.get_f64("fatou_c_im", 0.0)?);
    let base = EntireMap::fatou(c);
    match cfg.get_str("map", "fatou").as_str() {
        "fatou" => Ok(base),
        "scaled" => {
            let alpha = c64(cfg.get_f64("alpha", 1.0)?, cfg.get_f64("alpha_im", 0.0)?);
            Ok(base.scaled(alpha))
        }
        other => Err(CliError::InvalidConfig(format!(
            "unknown map kind `{other}` (expected fatou or scaled)"
        ))),
    }
}

pub(crate) fn map_label(cfg: &Config) -> Result<String, CliError> {
    let kind = cfg.get_str("map", "fatou");
    let c = cfg.get_f64("fatou_c", 1.0)?;
    let c_im = cfg.get_f64("fatou_c_im", 0.0)?;
    Ok(match kind.as_str() {
        "scaled" => format!(
            "scaled(alpha={}+{}i, fatou_c={}+{}i)",
            cfg.get_f64("alpha", 1.0)?,
            cfg.get_f64("alpha_im", 0.0)?,
            c,
            c_im
        ),
        _ => format!("fatou(c={c}+{c_im}i)"),
    })
}

pub(crate) fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Unwritable(path.display().to_string(), e.to_string()))
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}
