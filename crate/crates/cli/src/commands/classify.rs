use std::fmt::Write as _;
use std::path::PathBuf;

use baker_lab_core::{
    c64, step_distance_sequence_with, ClassifyOptions, DomainOracle, Error, RightEscapeParams,
};

use super::{map_from_config, map_label, write_output, MAP_KEYS};
use crate::config::Config;
use crate::format::g17;
use crate::CliError;

const BASE_KEYS: [&str; 9] = [
    "command",
    "out",
    "z0_re",
    "z0_im",
    "n",
    "rays",
    "quad_steps",
    "dist_tol_rel",
    "oracle_budget",
];

/// Runs the step-distance classifier from a seed point and writes a plain
/// text report. The verdict never affects the exit code; a seed the oracle
/// rejects does.
pub fn classify(cfg: &Config) -> Result<Option<String>, CliError> {
    let mut keys: Vec<&str> = BASE_KEYS.to_vec();
    keys.extend_from_slice(&MAP_KEYS);
    cfg.validate_keys(&keys)?;

    let map = map_from_config(cfg)?;
    let z0 = c64(cfg.get_f64("z0_re", 1.0)?, cfg.get_f64("z0_im", 0.0)?);
    let n = cfg.get_usize("n", 100)?;
    let opts = ClassifyOptions {
        rays: cfg.get_usize("rays", 64)?,
        quad_steps: cfg.get_usize("quad_steps", 16)?,
        tol_rel: cfg.get_f64("dist_tol_rel", 1e-3)?,
    };
    let oracle_params = RightEscapeParams {
        budget: cfg.get_usize("oracle_budget", 200)?,
        ..RightEscapeParams::default()
    };
    let out = PathBuf::from(cfg.get_str("out", "baker-classify.txt"));

    let oracle = DomainOracle::right_escape(map.clone(), oracle_params);
    let seq = match step_distance_sequence_with(&map, z0, &oracle, n, &opts) {
        Ok(seq) => seq,
        Err(e @ (Error::QueryOutsideDomain | Error::OracleInconclusive)) => {
            return Err(CliError::SeedRejected(format!("seed {z0}: {e}")))
        }
        Err(e) => return Err(CliError::InvalidConfig(e.to_string())),
    };

    let mut report = String::new();
    let _ = writeln!(report, "baker-lab classify report");
    let _ = writeln!(report, "map = {}", map_label(cfg)?);
    let _ = writeln!(report, "z0 = {} + {}i", g17(z0.re), g17(z0.im));
    let _ = writeln!(report, "n = {n}");
    let _ = writeln!(report, "step-distance upper bounds (first 10):");
    for (k, entry) in seq.upper.iter().take(10).enumerate() {
        let _ = writeln!(report, "  k={k}: {}", entry_str(entry));
    }
    let _ = writeln!(report, "step-distance upper bounds (last 10):");
    let start = seq.upper.len().saturating_sub(10);
    for (k, entry) in seq.upper.iter().enumerate().skip(start) {
        let _ = writeln!(report, "  k={k}: {}", entry_str(entry));
    }
    let _ = writeln!(
        report,
        "tail median upper bound = {}",
        seq.tail_median_upper()
            .map(g17)
            .unwrap_or_else(|| "absent".into())
    );
    let _ = writeln!(report, "verdict: {}", seq.verdict);

    write_output(&out, report.as_bytes())?;
    Ok(Some(format!("verdict: {}", seq.verdict)))
}

fn entry_str(entry: &Option<f64>) -> String {
    match entry {
        Some(v) => g17(*v),
        None => "absent".into(),
    }
}
