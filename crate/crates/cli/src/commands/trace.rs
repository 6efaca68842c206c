use std::path::PathBuf;

use baker_lab_core::{c64, Error, ParamFamily, PathTrace, TrackOptions};

use super::{linspace, write_output};
use crate::config::Config;
use crate::format::{write_trace_csv, TraceRow};
use crate::CliError;

const KEYS: [&str; 10] = [
    "command",
    "out",
    "family",
    "param_start",
    "param_end",
    "param_points",
    "guess_re",
    "guess_im",
    "escape_radius",
    "tol",
];

/// Tracks a fixed point across a parameter grid and writes one CSV row per
/// visited grid point. A lost branch still writes the partial trace, then
/// exits nonzero.
pub fn trace(cfg: &Config) -> Result<Option<String>, CliError> {
    cfg.validate_keys(&KEYS)?;
    let family = match cfg.get_str("family", "scaled").as_str() {
        "scaled" => ParamFamily::scaled_fatou_family(),
        "fatou" => ParamFamily::fatou_family(),
        other => {
            return Err(CliError::InvalidConfig(format!(
                "unknown family `{other}` (expected scaled or fatou)"
            )))
        }
    };
    let grid = linspace(
        cfg.get_f64("param_start", 0.5)?,
        cfg.get_f64("param_end", 0.999)?,
        cfg.get_usize("param_points", 100)?,
    );
    let guess = c64(cfg.get_f64("guess_re", 1.0)?, cfg.get_f64("guess_im", 0.0)?);
    let radius = cfg.get_f64("escape_radius", 100.0)?;
    let opts = TrackOptions {
        tol: cfg.get_f64("tol", 1e-12)?,
        ..TrackOptions::default()
    };
    let out = PathBuf::from(cfg.get_str("out", "baker-trace.csv"));

    match baker_lab_core::track_fixed_point_with(&family, &grid, guess, radius, &opts) {
        Ok(trace) => {
            write_output(&out, write_trace_csv(&rows_of(&trace)).as_bytes())?;
            Ok(Some(format!(
                "traced {} point(s){}",
                trace.len(),
                match trace.escaped_at {
                    Some(i) => format!(", escaped at param {}", trace.params[i]),
                    None => String::new(),
                }
            )))
        }
        Err(Error::BranchLost { at_param, partial }) => {
            write_output(&out, write_trace_csv(&rows_of(&partial)).as_bytes())?;
            Err(CliError::BranchLost(format!(
                "branch lost at parameter {at_param}; {} partial row(s) written",
                partial.len()
            )))
        }
        Err(Error::FoldSuspected { at_param, partial }) => {
            write_output(&out, write_trace_csv(&rows_of(&partial)).as_bytes())?;
            Err(CliError::BranchLost(format!(
                "fold suspected at parameter {at_param}; {} partial row(s) written",
                partial.len()
            )))
        }
        Err(e) => Err(CliError::InvalidConfig(e.to_string())),
    }
}

fn rows_of(trace: &PathTrace) -> Vec<TraceRow> {
    (0..trace.len())
        .map(|i| TraceRow {
            param: trace.params[i],
            re_z: trace.locations[i].re,
            im_z: trace.locations[i].im,
            re_rho: trace.multipliers[i].re,
            im_rho: trace.multipliers[i].im,
            abs_rho: trace.multipliers[i].norm(),
            horocyclic_stat: trace.horocyclic_stats[i],
            escaped: trace.escaped_at == Some(i),
        })
        .collect()
}
