//! Configuration, unit conversion at the lab boundary, run orchestration
//! and file formats.
//!
//! Internally everything is in scaled units with the background amplitude
//! `ψ₀ = 1`, so one scaled length is one healing length. CGS appears only in
//! the derived report and in CSV columns.

mod config;
mod derive;
mod output;
mod snapshot;

pub use config::Config;
pub use derive::{derive_parameters, Derived, ENERGY_CONVENTION};
pub use output::{
    dispersion_csv, drag_csv, oracle_csv, probe_csv, scan_csv, scan_summary, vortices_csv, write_atomic, Manifest,
};
pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, HEADER_LEN, MAGIC, VERSION};

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::experiments::{
    critical_velocity_scan, dense_bdg_oracle, measure_dispersion, obstacle_flow_experiment, sound_wave_probe,
    DispersionSetup, FlowSetup, ProbeSetup,
};
use crate::grid::GridSpec;
use crate::meanfield::{KerrSign, ScaledParams};
use crate::par;
use crate::solver::{flow_wavenumber, flowing_background, run_with, Control, ObstacleSpec, Potential, RunConfig};

/// Configuration shipped with the binary.
pub const DEFAULT_CONFIG: &str = include_str!("../../config/default.conf");

/// Version string recorded in manifests.
pub const VERSION_STRING: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Smallest accepted domain side, in healing lengths.
pub const MIN_EXTENT: f64 = 8.0;

/// Largest oracle grid side.
const MAX_ORACLE_SIDE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Derive,
    Simulate,
    Dispersion,
    Probe,
    Obstacle,
    Scan,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Simulate => "simulate",
            Command::Dispersion => "dispersion",
            Command::Probe => "probe",
            Command::Obstacle => "obstacle",
            Command::Scan => "scan",
            Command::Oracle => "oracle",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "derive" => Command::Derive,
            "simulate" => Command::Simulate,
            "dispersion" => Command::Dispersion,
            "probe" => Command::Probe,
            "obstacle" => Command::Obstacle,
            "scan" => Command::Scan,
            "oracle" => Command::Oracle,
            other => return Err(Error::Format(format!("unknown command `{other}` in manifest"))),
        })
    }
}

/// What a command wrote and a short human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub outputs: Vec<String>,
    pub manifest: PathBuf,
    pub message: String,
}

/// Runs `command` on `config`, writing outputs and a manifest into `out`.
pub fn run_command(command: Command, config: &Config, out: &Path) -> Result<RunSummary> {
    let start = Instant::now();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let derived = derive_parameters(config)?;
    let mut outputs = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = out.join(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        write_atomic(&path, bytes)?;
        outputs.push(name.to_string());
        Ok(())
    };
    let message = match command {
        Command::Derive => {
            let text = derived.report_text();
            put("report.txt", text.as_bytes())?;
            text
        }
        Command::Simulate => simulate(config, &mut put)?,
        Command::Dispersion => {
            let grid = grid_for(config, "dispersion")?;
            let dk = 2.0 * PI / grid.lx();
            let modes: Vec<u32> = config
                .list("dispersion", "modes")?
                .ok_or_else(|| Error::config("dispersion.modes", "missing required key"))?;
            let ks: Vec<f64> = modes.iter().map(|&m| m as f64 * dk).collect();
            let setup = DispersionSetup {
                seed: config.get_or("dispersion", "seed", 1e-3)?,
                periods: config.get_or("dispersion", "periods", 5.0)?,
                ..Default::default()
            };
            let curve = measure_dispersion(&ks, &grid, &setup)?;
            put("dispersion.csv", dispersion_csv(&curve, &derived.scaled).as_bytes())?;
            format!("{} points, max rel_err {:.3e}", curve.rows.len(), curve.max_rel_err())
        }
        Command::Probe => {
            let grid = grid_for(config, "probe")?;
            let mut setup = ProbeSetup::for_grid(&grid);
            setup.gamma = config.get_or("probe", "gamma_scaled", setup.gamma)?;
            setup.strength = config.get_or("probe", "strength", setup.strength)?;
            setup.source = (
                config.get_or("probe", "source_x", setup.source.0)?,
                config.get_or("probe", "source_y", setup.source.1)?,
            );
            let freqs: Vec<f64> = config
                .list("probe", "modulation_MHz")?
                .ok_or_else(|| Error::config("probe.modulation_MHz", "missing required key"))?;
            let omegas: Vec<f64> = freqs
                .iter()
                .map(|&f| derived.scaled.frequency_from_cgs(crate::units::mhz_to_rad_per_s(f)))
                .collect();
            let results = par::map(&omegas, |&w| sound_wave_probe(w, &grid, &setup))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            put("probe.csv", probe_csv(&results, &derived.scaled).as_bytes())?;
            let mut m = String::new();
            for r in &results {
                let _ = write!(m, "Ω' = {:.5}: K' = {:.5}, mismatch {:.2e}; ", r.omega, r.k_measured, r.rel_mismatch);
            }
            m
        }
        Command::Obstacle => {
            let setup = flow_setup(config)?;
            let ratios: Vec<f64> = config
                .list("obstacle", "speed_ratios")?
                .ok_or_else(|| Error::config("obstacle.speed_ratios", "missing required key"))?;
            let runs = par::map(&ratios, |&r| obstacle_flow_experiment(r, &setup))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let mut m = String::new();
            for r in &runs {
                let dir = format!("speed_{}", r.speed_ratio);
                put(&format!("{dir}/vortices.csv"), vortices_csv(&r.snapshots, &derived.scaled).as_bytes())?;
                put(&format!("{dir}/drag.csv"), drag_csv(&r.drag).as_bytes())?;
                let t = r.snapshots.last().map_or(0.0, |s| s.time);
                put(&format!("{dir}/final.phfl"), &encode_snapshot(&r.final_field, t))?;
                let _ = write!(
                    m,
                    "v/v_s = {}: peak {} vortices, first at {:?}; ",
                    r.speed_ratio,
                    r.peak_vortex_count(),
                    r.first_vortex_time
                );
            }
            m
        }
        Command::Scan => {
            let setup = flow_setup(config)?;
            let lower = config.get_or("scan", "lower", 0.1)?;
            let upper = config.get_or("scan", "upper", 1.5)?;
            let result = critical_velocity_scan(&setup, lower, upper)?;
            put("scan.csv", scan_csv(&result).as_bytes())?;
            put("critical.txt", scan_summary(&result).as_bytes())?;
            format!("v_c/v_s in ({}, {}]", result.v_lower, result.v_upper)
        }
        Command::Oracle => {
            let grid = grid_for(config, "oracle")?;
            if grid.nx() > MAX_ORACLE_SIDE || grid.ny() > MAX_ORACLE_SIDE {
                return Err(Error::config("oracle.nx", format!("dense oracle grids are limited to {MAX_ORACLE_SIDE} per side")));
            }
            let spectrum = dense_bdg_oracle(&grid, 1.0, derived.scaled.sign)?;
            put("oracle.csv", oracle_csv(&spectrum).as_bytes())?;
            let m = format!("max relative eigenvalue mismatch {:.3e}", spectrum.max_rel_err);
            if spectrum.max_rel_err > 1e-8 {
                return Err(Error::MeasurementQuality(m));
            }
            m
        }
    };
    let manifest = Manifest {
        version: VERSION_STRING.to_string(),
        command: command.name().to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        threads: par::worker_count(),
        outputs,
        config: config.text().to_string(),
    };
    let path = out.join("manifest.txt");
    write_atomic(&path, manifest.render().as_bytes())?;
    Ok(RunSummary {
        outputs: manifest.outputs,
        manifest: path,
        message,
    })
}

/// Re-runs the command recorded in a manifest, writing into `out`.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest = Manifest::parse(&text)?;
    let config = Config::parse(&manifest.config)?;
    run_command(Command::from_name(&manifest.command)?, &config, out)
}

/// Grid of an experiment section, with `[grid]` as fallback.
pub fn grid_for(config: &Config, section: &str) -> Result<GridSpec> {
    let nx: usize = config
        .grid_value(section, "nx")?
        .ok_or_else(|| Error::config(format!("{section}.nx"), "missing (also absent from [grid])"))?;
    let ny: usize = config.grid_value(section, "ny")?.unwrap_or(nx);
    let extent: f64 = config.grid_value(section, "extent_in_healing_lengths")?.ok_or_else(|| {
        Error::config(format!("{section}.extent_in_healing_lengths"), "missing (also absent from [grid])")
    })?;
    if !(extent >= MIN_EXTENT) {
        return Err(Error::config(
            format!("{section}.extent_in_healing_lengths"),
            format!("must be at least {MIN_EXTENT} healing lengths, got {extent}"),
        ));
    }
    GridSpec::new(nx, ny, extent, extent * ny as f64 / nx as f64)
        .map_err(|e| Error::config(format!("{section}.nx"), e.to_string()))
}

fn flow_setup(config: &Config) -> Result<FlowSetup> {
    let grid = grid_for(config, "obstacle")?;
    let radius = config.get_or("obstacle", "radius", 4.0)?;
    let mut setup = FlowSetup::centred(grid, 1.0, radius);
    setup.obstacle.height = config.get_or("obstacle", "height", setup.obstacle.height)?;
    setup.window = config.get_or("obstacle", "window", setup.window)?;
    setup.check_every = config.get_or("obstacle", "check_every", setup.check_every)?;
    Ok(setup)
}

/// Conservative run of the uniform, possibly flowing, background past an
/// optional obstacle. Writes snapshots and a diagnostics series.
fn simulate(config: &Config, put: &mut impl FnMut(&str, &[u8]) -> Result<()>) -> Result<String> {
    let grid = grid_for(config, "grid")?;
    let dt: f64 = config.require("run", "dt_scaled")?;
    let steps: usize = config.require("run", "steps")?;
    let every: usize = config.get_or("run", "snapshot_every", steps.max(1))?;
    let ratio: f64 = config.get_or("run", "speed_ratio", 0.0)?;
    let dealias: bool = config.get_or("run", "dealias", false)?;
    let k = flow_wavenumber(&grid, ratio, 1.0)?;
    let params = ScaledParams::dimensionless(1.0 + k * k, 0.0, 0.0, KerrSign::Defocusing);
    let mut run = RunConfig::new(flowing_background(&grid, ratio, 1.0)?, params, dt, steps).with_snapshot_every(every);
    run.dealias = dealias;
    if config.has_section("obstacle") {
        let radius = config.get_or("obstacle", "radius", 4.0)?;
        let height = config.get_or("obstacle", "height", 10.0)?;
        let o = ObstacleSpec::fixed((0.5 * grid.lx(), 0.5 * grid.ly()), radius, height).with_ramp(10.0);
        run = run.with_potential(Potential::Obstacle(o));
    }
    let mut diag = String::from("time_scaled,norm,energy\n");
    let mut frames = Vec::new();
    run_with(&run, |t, field, d| {
        let _ = writeln!(diag, "{t:e},{:e},{}", d.norm, d.energy.map_or(String::new(), |e| format!("{e:e}")));
        frames.push((t, encode_snapshot(field, t)));
        Control::Continue
    })?;
    for (i, (_, bytes)) in frames.iter().enumerate() {
        put(&format!("snapshots/snap_{i:05}.phfl"), bytes)?;
    }
    put("diagnostics.csv", diag.as_bytes())?;
    Ok(format!("{} snapshots over {} steps", frames.len(), steps))
}
