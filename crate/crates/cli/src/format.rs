//! Number and CSV serialization with a byte-for-byte round-trip guarantee.

/// 17 significant digits: enough to reproduce any `f64` exactly, so parsing
/// an emitted number and re-serializing it is the identity on bytes.
pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header for `trace` output.
pub const TRACE_HEADER: &str = "param,re_z,im_z,re_rho,im_rho,abs_rho,horocyclic_stat,escaped";

/// Header for `perturb` output.
pub const PERTURB_HEADER: &str =
    "s,coeff_re,coeff_im,fp_re,fp_im,abs_rho,one_minus_abs_rho,horocyclic_stat,branch";

/// One numeric row of a trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub param: f64,
    pub re_z: f64,
    pub im_z: f64,
    pub re_rho: f64,
    pub im_rho: f64,
    pub abs_rho: f64,
    pub horocyclic_stat: f64,
    pub escaped: bool,
}

pub fn write_trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            g17(r.param),
            g17(r.re_z),
            g17(r.im_z),
            g17(r.re_rho),
            g17(r.im_rho),
            g17(r.abs_rho),
            g17(r.horocyclic_stat),
            u8::from(r.escaped),
        ));
    }
    out
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => return Err(format!("bad trace header: {other:?}")),
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(format!("expected 8 fields, got {}", fields.len()));
        }
        let num =
            |i: usize| -> Result<f64, String> { fields[i].parse().map_err(|e| format!("{e}")) };
        rows.push(TraceRow {
            param: num(0)?,
            re_z: num(1)?,
            im_z: num(2)?,
            re_rho: num(3)?,
            im_rho: num(4)?,
            abs_rho: num(5)?,
            horocyclic_stat: num(6)?,
            escaped: fields[7] == "1",
        });
    }
    Ok(rows)
}

/// One row of a perturb CSV; `branch` is `direct`, `secondary`, `damped`, or
/// `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbRow {
    pub s: f64,
    pub coeff_re: f64,
    pub coeff_im: f64,
    pub fp_re: f64,
    pub fp_im: f64,
    pub abs_rho: f64,
    pub one_minus_abs_rho: f64,
    pub horocyclic_stat: f64,
    pub branch: String,
}

pub fn write_perturb_csv(rows: &[PerturbRow]) -> String {
    let mut out = String::from(PERTURB_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            g17(r.s),
            g17(r.coeff_re),
            g17(r.coeff_im),
            g17(r.fp_re),
            g17(r.fp_im),
            g17(r.abs_rho),
            g17(r.one_minus_abs_rho),
            g17(r.horocyclic_stat),
            r.branch,
        ));
    }
    out
}

pub fn parse_perturb_csv(text: &str) -> Result<Vec<PerturbRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == PERTURB_HEADER => {}
        other => return Err(format!("bad perturb header: {other:?}")),
    }
    let mut rows = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(format!("expected 9 fields, got {}", fields.len()));
        }
        let num =
            |i: usize| -> Result<f64, String> { fields[i].parse().map_err(|e| format!("{e}")) };
        rows.push(PerturbRow {
            s: num(0)?,
            coeff_re: num(1)?,
            coeff_im: num(2)?,
            fp_re: num(3)?,
            fp_im: num(4)?,
            abs_rho: num(5)?,
            one_minus_abs_rho: num(6)?,
            horocyclic_stat: num(7)?,
            branch: fields[8].to_string(),
        });
    }
    Ok(rows)
}
