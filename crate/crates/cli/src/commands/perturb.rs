use std::path::PathBuf;

use baker_lab_core::{c64, horocyclic_statistic, stabilize_along_curve, RayCurve};

use super::{map_from_config, write_output, MAP_KEYS};
use crate::config::Config;
use crate::format::{write_perturb_csv, PerturbRow};
use crate::CliError;

const BASE_KEYS: [&str; 4] = ["command", "out", "s_list", "ray_angle"];

/// Rescales the base map at each `s` on the ray so that γ(s) carries an
/// attracting fixed point, recording coefficient, multiplier, and which
/// stabilization route applied. Per-row failures are recorded and the sweep
/// continues.
pub fn perturb(cfg: &Config) -> Result<Option<String>, CliError> {
    let mut keys: Vec<&str> = BASE_KEYS.to_vec();
    keys.extend_from_slice(&MAP_KEYS);
    cfg.validate_keys(&keys)?;

    let base = map_from_config(cfg)?;
    let angle = cfg.get_f64("ray_angle", 0.0)?;
    let ray = RayCurve::from_angle(c64(0.0, 0.0), angle);
    let s_values = cfg.get_f64_list("s_list", &[5.0, 10.0, 20.0, 50.0, 100.0])?;
    if s_values.iter().any(|&s| !(s > 0.0)) {
        return Err(CliError::InvalidConfig("s_list entries must be > 0".into()));
    }
    let out = PathBuf::from(cfg.get_str("out", "baker-perturb.csv"));

    let mut rows = Vec::with_capacity(s_values.len());
    let mut failures = 0usize;
    for &s in &s_values {
        match stabilize_along_curve(base.clone(), &ray, s) {
            Ok(st) => {
                let abs_rho = st.record.multiplier.norm();
                rows.push(PerturbRow {
                    s,
                    coeff_re: st.coefficient.re,
                    coeff_im: st.coefficient.im,
                    fp_re: st.record.location.re,
                    fp_im: st.record.location.im,
                    abs_rho,
                    one_minus_abs_rho: 1.0 - abs_rho,
                    horocyclic_stat: horocyclic_statistic(st.record.multiplier)
                        .unwrap_or(f64::INFINITY),
                    branch: st.branch.to_string(),
                });
            }
            Err(e) => {
                eprintln!("baker-lab: s={s}: {e}");
                failures += 1;
                rows.push(PerturbRow {
                    s,
                    coeff_re: f64::NAN,
                    coeff_im: f64::NAN,
                    fp_re: f64::NAN,
                    fp_im: f64::NAN,
                    abs_rho: f64::NAN,
                    one_minus_abs_rho: f64::NAN,
                    horocyclic_stat: f64::NAN,
                    branch: "error".into(),
                });
            }
        }
    }
    write_output(&out, write_perturb_csv(&rows).as_bytes())?;
    Ok(Some(format!(
        "stabilized {}/{} ray point(s)",
        rows.len() - failures,
        rows.len()
    )))
}
