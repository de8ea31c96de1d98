//! Output-file writers. Files are written through a temporary sibling and
//! renamed into place so that failures never leave partial output behind.

use rydeit_core::{PropagationTrace, SpectrumResult};
use std::f64::consts::TAU;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let tmp = tmp_path(path);
    let result = fs::write(&tmp, content).and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Nine significant digits, locale-independent.
fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

fn to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1e6)
}

/// CSV serialization of a sweep. Rows are ordered by (intensity, detuning);
/// failed points carry `nan` observables.
pub fn spectrum_csv(result: &SpectrumResult) -> String {
    let mut out = String::from(
        "omega_p_in_MHz,delta_p_MHz,transmission,transmission_stderr,g2_out,g2_stderr\n",
    );
    for point in &result.points {
        let (t, ts, g, gs) = match &point.result {
            Ok(s) => (s.transmission, s.transmission_stderr, s.g2_out, s.g2_stderr),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(to_mhz(point.omega_p_in)),
            fmt(to_mhz(point.delta_p)),
            fmt(t),
            fmt(ts),
            fmt(g),
            fmt(gs)
        ));
    }
    out
}

/// CSV serialization of a per-cell propagation trace.
pub fn trace_csv(trace: &PropagationTrace) -> String {
    let mut out = String::from("cell_index,z_mid_um,p_excited,sampled,alpha_re,alpha_im,i_p,g2\n");
    for (index, cell) in trace.cells.iter().enumerate() {
        let sampled = match cell.sampled {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            index,
            fmt(cell.z_mid),
            fmt(cell.p_excited),
            sampled,
            fmt(cell.alpha_used.re),
            fmt(cell.alpha_used.im),
            fmt(cell.i_p),
            fmt(cell.g2)
        ));
    }
    out
}
