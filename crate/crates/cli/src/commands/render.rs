use std::path::PathBuf;

use baker_lab_core::render::RenderWindow;
use baker_lab_core::RightEscapeParams;

use super::{map_from_config, write_output, MAP_KEYS};
use crate::config::Config;
use crate::CliError;

const KEYS: [&str; 12] = [
    "command",
    "out",
    "x_min",
    "x_max",
    "y_min",
    "y_max",
    "width",
    "height",
    "budget",
    "escape_radius",
    // map keys are appended below through ALLOWED
    "map",
    "fatou_c",
];

fn allowed() -> Vec<&'static str> {
    let mut keys: Vec<&str> = KEYS.to_vec();
    keys.extend_from_slice(&MAP_KEYS);
    keys.dedup();
    keys
}

/// Writes a deterministic grayscale phase portrait and reports pixel totals.
pub fn render(cfg: &Config) -> Result<Option<String>, CliError> {
    cfg.validate_keys(&allowed())?;
    let map = map_from_config(cfg)?;
    let window = RenderWindow::new(
        cfg.get_f64("x_min", -2.0)?,
        cfg.get_f64("x_max", 12.0)?,
        cfg.get_f64("y_min", -6.0)?,
        cfg.get_f64("y_max", 6.0)?,
    )
    .map_err(|e| CliError::InvalidConfig(e.to_string()))?;
    let width = cfg.get_usize("width", 400)? as u32;
    let height = cfg.get_usize("height", 400)? as u32;
    let budget = cfg.get_usize("budget", 200)? as u32;
    let radius = cfg.get_f64("escape_radius", 100.0)?;
    let out = PathBuf::from(cfg.get_str("out", "baker-render.pgm"));

    let result = baker_lab_core::render(
        &map,
        &window,
        width,
        height,
        budget,
        radius,
        &RightEscapeParams::default(),
    )
    .map_err(|e| CliError::InvalidConfig(e.to_string()))?;

    write_output(&out, &result.to_pgm())?;
    let (baker, bounded, generic) = result.class_counts();
    Ok(Some(format!(
        "baker-right-escape={baker} bounded-unknown={bounded} generic-escape={generic}"
    )))
}
