use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{BdgSpectrum, CriticalVelocityResult, DispersionCurve, DragSample, ProbeResult, VortexSet};
use crate::meanfield::ScaledParams;

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::other("path has no file name")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn dispersion_csv(curve: &DispersionCurve, scale: &ScaledParams) -> String {
    let mut s = String::from("K_per_cm,omega_meas_rad_s,omega_theory_rad_s,rel_err,fit_residual\n");
    for r in &curve.rows {
        let _ = writeln!(
            s,
            "{:e},{:e},{:e},{:e},{:e}",
            scale.wavenumber_to_cgs(r.k),
            scale.frequency_to_cgs(r.omega_measured),
            scale.frequency_to_cgs(r.omega_theory),
            r.rel_err,
            r.fit_residual
        );
    }
    s
}

/// One row per vortex; `time` is in seconds.
pub fn vortices_csv(sets: &[VortexSet], scale: &ScaledParams) -> String {
    let mut s = String::from("time,x_cm,y_cm,charge\n");
    for set in sets {
        for v in &set.vortices {
            let _ = writeln!(
                s,
                "{:e},{:e},{:e},{}",
                scale.time_to_cgs(set.time),
                scale.length_to_cgs(v.x),
                scale.length_to_cgs(v.y),
                v.charge
            );
        }
    }
    s
}

/// Force on the obstacle in scaled units.
pub fn drag_csv(drag: &[DragSample]) -> String {
    let mut s = String::from("time_scaled,fx_scaled,fy_scaled\n");
    for d in drag {
        let _ = writeln!(s, "{:e},{:e},{:e}", d.time, d.fx, d.fy);
    }
    s
}

pub fn oracle_csv(spectrum: &BdgSpectrum) -> String {
    let mut s = String::from("index,omega_dense_scaled,omega_closed_form_scaled,abs_diff\n");
    for (i, (a, b)) in spectrum.frequencies.iter().zip(&spectrum.theory).enumerate() {
        let _ = writeln!(s, "{i},{a:e},{b:e},{:e}", (a - b).abs());
    }
    s
}

pub fn probe_csv(results: &[ProbeResult], scale: &ScaledParams) -> String {
    let mut s = String::from("omega_mod_rad_s,K_meas_per_cm,omega_at_K_rad_s,rel_mismatch,boundary_ratio\n");
    for r in results {
        let _ = writeln!(
            s,
            "{:e},{:e},{:e},{:e},{:e}",
            scale.frequency_to_cgs(r.omega),
            scale.wavenumber_to_cgs(r.k_measured),
            scale.frequency_to_cgs(r.omega_at_k),
            r.rel_mismatch,
            r.boundary_ratio
        );
    }
    s
}

pub fn scan_csv(result: &CriticalVelocityResult) -> String {
    let mut s = String::from("speed_ratio,vortex_count,first_vortex_time_scaled\n");
    for t in &result.trials {
        let first = t.first_vortex_time.map_or(String::new(), |v| format!("{v:e}"));
        let _ = writeln!(s, "{:e},{},{first}", t.speed_ratio, t.vortex_count);
    }
    s
}

pub fn scan_summary(result: &CriticalVelocityResult) -> String {
    format!(
        "v_lower = {}\nv_upper = {}\nfirst_shedding_time_scaled = {}\nbisection_steps = {}\nwindow_scaled = {}\n",
        result.v_lower, result.v_upper, result.first_shedding_time, result.bisection_steps, result.window
    )
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub wall_time_s: f64,
    pub threads: usize,
    pub outputs: Vec<String>,
    pub config: String,
}

const CONFIG_MARKER: &str = "--- config ---";

impl Manifest {
    pub fn render(&self) -> String {
        format!(
            "# photon-fluid run manifest\nversion = {}\ncommand = {}\nwall_time_s = {:.3}\nthreads = {}\noutputs = {}\n{CONFIG_MARKER}\n{}",
            self.version,
            self.command,
            self.wall_time_s,
            self.threads,
            self.outputs.join(","),
            self.config
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (head, config) = text
            .split_once(&format!("{CONFIG_MARKER}\n"))
            .ok_or_else(|| Error::Format(format!("manifest has no `{CONFIG_MARKER}` line")))?;
        let field = |key: &str| -> Result<String> {
            head.lines()
                .filter_map(|l| l.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim().to_string())
                .ok_or_else(|| Error::Format(format!("manifest is missing `{key}`")))
        };
        let number = |key: &str| -> Result<String> { field(key) };
        Ok(Manifest {
            version: field("version")?,
            command: field("command")?,
            wall_time_s: number("wall_time_s")?
                .parse()
                .map_err(|_| Error::Format("manifest wall_time_s is not a number".into()))?,
            threads: number("threads")?
                .parse()
                .map_err(|_| Error::Format("manifest threads is not an integer".into()))?,
            outputs: field("outputs")?.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect(),
            config: config.to_string(),
        })
    }
}
