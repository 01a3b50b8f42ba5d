//! Command-line harness: run either model, generate weather, compare series,
//! and run the built-in property suite.
//!
//! Exit codes: 0 success, 1 configuration error, 2 weather error,
//! 3 numeric failure, 4 mesh divisibility error, 5 misaligned series.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand};

use thermbox::compare::{compare_series, parse_hour_series, CompareError};
use thermbox::config::{load_config, LoadedConfig};
use thermbox::fem::{
    fem_series_to_csv, simulate_fem, write_vtk, FemError, FemRunOptions, Mesh,
};
use thermbox::harness::{face_series_from_weather, zone_inputs_from_weather};
use thermbox::weather::{load_weather, synth_weather, weather_to_csv, WeatherRecord};
use thermbox::zone::{records_to_csv, simulate_zone, SetpointControl, ZoneNetwork};

#[derive(Parser)]
#[command(name = "thermbox", version, about = "Cross-verified thermal simulation of a cubic test box")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the lumped zone network model and write its hourly CSV
    RunBes {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        weather: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Simulate but drop this many leading hours from the output
        #[arg(long, default_value_t = 0)]
        discard_warmup: usize,
    },
    /// Run the 3D conduction FEM and write its hourly CSV
    RunFem {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        weather: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Cells per box edge (overrides the config)
        #[arg(long)]
        mesh: Option<usize>,
        /// Substeps per hour (overrides the config)
        #[arg(long)]
        substeps: Option<usize>,
        /// Time weighting 0.5..=1 (overrides the config)
        #[arg(long)]
        theta: Option<f64>,
        /// Probe point "x,y,z" in meters; repeatable
        #[arg(long = "probe")]
        probes: Vec<String>,
        /// Write legacy-format snapshot files into this directory
        #[arg(long)]
        vtk_dir: Option<PathBuf>,
        /// Snapshot every K hours (with --vtk-dir)
        #[arg(long, default_value_t = 24)]
        vtk_every: usize,
    },
    /// Align two hourly series and write comparison metrics as JSON
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Value column in file A
        #[arg(long, default_value = "T_a")]
        col_a: String,
        /// Value column in file B
        #[arg(long, default_value = "T_mean_core")]
        col_b: String,
        /// Hours discarded before computing metrics
        #[arg(long, default_value_t = 72)]
        warmup: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a deterministic synthetic weather CSV
    GenWeather {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        days: usize,
        #[arg(long, default_value_t = 10.0)]
        t_mean: f64,
        #[arg(long, default_value_t = 5.0)]
        t_amp: f64,
        #[arg(long, default_value_t = 600.0)]
        i_peak: f64,
        /// First hour, e.g. 2023-04-01T00:00Z
        #[arg(long, default_value = "2023-04-01T00:00Z")]
        start: String,
    },
    /// Run the built-in property suite and print a pass/fail table
    Validate {
        /// Write per-wall admittance sweeps and fit reports here
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// Test hook: perturb the transmittance identity check
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_u_identity: f64,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

impl From<thermbox::config::ConfigError> for Failure {
    fn from(e: thermbox::config::ConfigError) -> Self {
        Failure::new(1, format!("config: {e}"))
    }
}

impl From<thermbox::weather::WeatherError> for Failure {
    fn from(e: thermbox::weather::WeatherError) -> Self {
        Failure::new(2, format!("weather: {e}"))
    }
}

impl From<thermbox::zone::ZoneError> for Failure {
    fn from(e: thermbox::zone::ZoneError) -> Self {
        Failure::new(3, format!("zone model: {e}"))
    }
}

impl From<thermbox::harness::HarnessError> for Failure {
    fn from(e: thermbox::harness::HarnessError) -> Self {
        Failure::new(1, format!("config: {e}"))
    }
}

impl From<FemError> for Failure {
    fn from(e: FemError) -> Self {
        let code = match &e {
            FemError::IndivisibleThickness { .. } => 4,
            _ => 3,
        };
        Failure::new(code, format!("fem: {e}"))
    }
}

impl From<CompareError> for Failure {
    fn from(e: CompareError) -> Self {
        Failure::new(5, format!("compare: {e}"))
    }
}

fn write_file(path: &PathBuf, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::new(1, format!("cannot write `{}`: {e}", path.display())))
}

fn load_inputs(config: &PathBuf, weather: &PathBuf) -> Result<(LoadedConfig, Vec<WeatherRecord>), Failure> {
    let cfg = load_config(config)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let records = load_weather(weather)?;
    if records.is_empty() {
        return Err(Failure::new(2, "weather: file contains no records"));
    }
    Ok((cfg, records))
}

fn parse_start(s: &str) -> Result<DateTime<Utc>, Failure> {
    for fmt in ["%Y-%m-%dT%H:%MZ", "%Y-%m-%dT%H:%M:%SZ"] {
        if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(DateTime::from_naive_utc_and_offset(naive, Utc));
        }
    }
    Err(Failure::new(2, format!("weather: bad start time `{s}`")))
}

fn parse_probe(s: &str) -> Result<[f64; 3], Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Failure::new(1, format!("config: probe `{s}` must be x,y,z")));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(parts.iter()) {
        *slot = p
            .parse()
            .map_err(|_| Failure::new(1, format!("config: probe coordinate `{p}` is not a number")))?;
    }
    Ok(out)
}

fn cmd_run_bes(
    config: PathBuf,
    weather: PathBuf,
    out: PathBuf,
    discard_warmup: usize,
) -> Result<(), Failure> {
    let (cfg, records) = load_inputs(&config, &weather)?;
    let mut net = ZoneNetwork::build(&cfg.zone)?;
    if cfg.sim.heat_setpoint.is_some() || cfg.sim.cool_setpoint.is_some() {
        net = net.with_control(SetpointControl {
            heat_setpoint: cfg.sim.heat_setpoint,
            cool_setpoint: cfg.sim.cool_setpoint,
        })?;
    }
    let inputs = zone_inputs_from_weather(&records, &cfg.zone, &cfg.sim);
    let recs = simulate_zone(&net, cfg.sim.initial_temperature, &inputs, discard_warmup)?;
    write_file(&out, &records_to_csv(&recs))?;
    println!("wrote {} hourly records to {}", recs.len(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_run_fem(
    config: PathBuf,
    weather: PathBuf,
    out: PathBuf,
    mesh: Option<usize>,
    substeps: Option<usize>,
    theta: Option<f64>,
    probes: Vec<String>,
    vtk_dir: Option<PathBuf>,
    vtk_every: usize,
) -> Result<(), Failure> {
    let (cfg, records) = load_inputs(&config, &weather)?;
    let face_series = face_series_from_weather(&records, &cfg.zone, &cfg.sim)?;
    let opts = FemRunOptions {
        n: mesh.unwrap_or(cfg.sim.mesh_n),
        h_e: cfg.zone.surface_coeffs.h_e,
        theta: theta.unwrap_or(cfg.sim.theta),
        substeps: substeps.unwrap_or(cfg.sim.substeps),
        initial: cfg.sim.initial_temperature.unwrap_or(records[0].t_e),
    };
    let probe_points = probes
        .iter()
        .map(|s| parse_probe(s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut vtk_err: Option<std::io::Error> = None;
    let mut hook = |h: usize, mesh: &Mesh, field: &[f64]| {
        if let Some(dir) = &vtk_dir {
            if vtk_every > 0 && h % vtk_every == 0 && vtk_err.is_none() {
                let name = dir.join(format!("snapshot_{h:05}.vtk"));
                let body = write_vtk(mesh, field, &format!("hour {h}"));
                if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(name, body)) {
                    vtk_err = Some(e);
                }
            }
        }
    };
    let series = simulate_fem(
        &cfg.box_geom,
        &opts,
        &face_series,
        &probe_points,
        Some(&mut hook),
    )?;
    if let Some(e) = vtk_err {
        return Err(Failure::new(1, format!("cannot write snapshots: {e}")));
    }
    write_file(&out, &fem_series_to_csv(&series))?;
    println!(
        "wrote {} hourly records to {} (mesh {} cells/edge)",
        series.mean.len(),
        out.display(),
        opts.n
    );
    Ok(())
}

fn cmd_compare(
    a: PathBuf,
    b: PathBuf,
    col_a: String,
    col_b: String,
    warmup: usize,
    out: PathBuf,
) -> Result<(), Failure> {
    let read = |p: &PathBuf| -> Result<String, Failure> {
        std::fs::read_to_string(p)
            .map_err(|e| Failure::new(5, format!("compare: cannot read `{}`: {e}", p.display())))
    };
    let sa = parse_hour_series(&read(&a)?, &col_a)?;
    let sb = parse_hour_series(&read(&b)?, &col_b)?;
    let metrics = compare_series(&sa, &sb, warmup)?;
    let json = serde_json::to_string_pretty(&metrics)
        .map_err(|e| Failure::new(5, format!("compare: {e}")))?;
    write_file(&out, &format!("{json}\n"))?;
    println!(
        "n={} rmse={:.4} K mbe={:+.4} K max|d|={:.4} K (warmup {} h discarded)",
        metrics.n, metrics.rmse, metrics.mbe, metrics.max_abs, metrics.warmup_discarded
    );
    Ok(())
}

fn cmd_gen_weather(
    out: PathBuf,
    days: usize,
    t_mean: f64,
    t_amp: f64,
    i_peak: f64,
    start: String,
) -> Result<(), Failure> {
    let start = parse_start(&start)?;
    let records = synth_weather(days, t_mean, t_amp, i_peak, start);
    write_file(&out, &weather_to_csv(&records))?;
    println!("wrote {} hourly records to {}", records.len(), out.display());
    Ok(())
}

fn cmd_validate(dump_dir: Option<PathBuf>, perturb: f64) -> Result<(), Failure> {
    let results = thermbox::validate::run_validation(&thermbox::validate::ValidateOptions {
        perturb_u_identity: perturb,
    });
    let mut failed = 0;
    for r in &results {
        println!("{} {:32} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    if let Some(dir) = dump_dir {
        thermbox::validate::dump_wall_reports(&dir)
            .map_err(|e| Failure::new(1, format!("cannot write dumps: {e}")))?;
        println!("wall reports written to {}", dir.display());
    }
    println!("{} checks, {} failed", results.len(), failed);
    if failed > 0 {
        return Err(Failure::new(3, format!("{failed} validation checks failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::RunBes { config, weather, out, discard_warmup } => {
            cmd_run_bes(config, weather, out, discard_warmup)
        }
        Cmd::RunFem {
            config,
            weather,
            out,
            mesh,
            substeps,
            theta,
            probes,
            vtk_dir,
            vtk_every,
        } => cmd_run_fem(config, weather, out, mesh, substeps, theta, probes, vtk_dir, vtk_every),
        Cmd::Compare { a, b, col_a, col_b, warmup, out } => {
            cmd_compare(a, b, col_a, col_b, warmup, out)
        }
        Cmd::GenWeather { out, days, t_mean, t_amp, i_peak, start } => {
            cmd_gen_weather(out, days, t_mean, t_amp, i_peak, start)
        }
        Cmd::Validate { dump_dir, perturb_u_identity } => {
            cmd_validate(dump_dir, perturb_u_identity)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
