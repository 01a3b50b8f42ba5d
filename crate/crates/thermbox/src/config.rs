//! Configuration loading: sectioned `key = value` files describing the zone,
//! the test-box geometry, materials and simulation settings.
//!
//! Sections: `[zone]`, `[box]`, `[materials.NAME]`, `[envelope.ID]`,
//! `[simulation]`. `#` starts a comment. Unknown keys produce warnings,
//! never errors. All values are SI; temperatures in degrees Celsius.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::material::{
    Boundary, Construction, EnvelopePart, InvariantError, Layer, Material, Orientation,
    SurfaceCoefficients, WallConstruction,
};
use crate::{C_AIR, RHO_AIR};

/// Calibration constant: thermal resistance attributed to the enclosed air
/// volume, m2 K/W. The equivalent core conductivity defaults to
/// `core_width / AIR_CORE_RESISTANCE`.
pub const AIR_CORE_RESISTANCE: f64 = 0.34;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Invariant(#[from] InvariantError),
    #[error("invalid configuration: {0}")]
    Validation(String),
}

/// The one-zone thermal model description.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneConfig {
    /// Zone air volume, m3.
    pub air_volume: f64,
    /// Total envelope area, m2. Must match the sum of part areas.
    pub total_surface_area: f64,
    /// Air (plus furniture) heat capacity, J/K.
    pub air_capacity: f64,
    /// Air change rate, 1/h.
    pub ach: f64,
    pub envelope: Vec<EnvelopePart>,
    pub surface_coeffs: SurfaceCoefficients,
}

impl ZoneConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.air_volume <= 0.0 {
            return Err(InvariantError::Violation {
                field: "air_volume".into(),
                msg: "must be > 0".into(),
            }
            .into());
        }
        if self.air_capacity <= 0.0 {
            return Err(InvariantError::Violation {
                field: "air_capacity".into(),
                msg: "must be > 0".into(),
            }
            .into());
        }
        if self.ach < 0.0 {
            return Err(InvariantError::Violation {
                field: "ach".into(),
                msg: "must be >= 0".into(),
            }
            .into());
        }
        self.surface_coeffs.validate()?;
        if self.envelope.is_empty() {
            return Err(ConfigError::Validation("zone has no envelope parts".into()));
        }
        for p in &self.envelope {
            p.validate()?;
        }
        let sum: f64 = self.envelope.iter().map(|p| p.area).sum();
        let rel = (self.total_surface_area - sum).abs() / sum.max(f64::MIN_POSITIVE);
        if rel > 1e-9 {
            return Err(ConfigError::Validation(format!(
                "total_surface_area = {} inconsistent with envelope sum {} (relative difference {:.3e})",
                self.total_surface_area, sum, rel
            )));
        }
        Ok(())
    }

    /// Ventilation loss coefficient L_v = rho*c*ACH*V/3600, W/K, and the
    /// air capacity C_a, J/K.
    pub fn derived_quantities(&self) -> (f64, f64) {
        let l_v = RHO_AIR * C_AIR * self.ach * self.air_volume / 3600.0;
        (l_v, self.air_capacity)
    }
}

/// The cubic test box: outer edge, opaque shell, equivalent-conductivity core.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGeometry {
    /// Outer edge length, m.
    pub outer_edge: f64,
    /// Shell thickness, m.
    pub wall_thickness: f64,
    pub wall_material: Material,
    /// Equivalent conductivity of the enclosed air, W/(m K).
    pub air_k_eq: f64,
}

impl BoxGeometry {
    pub fn core_width(&self) -> f64 {
        self.outer_edge - 2.0 * self.wall_thickness
    }

    pub fn core_volume(&self) -> f64 {
        self.core_width().powi(3)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.wall_material.validate()?;
        if !(self.wall_thickness > 0.0 && 2.0 * self.wall_thickness < self.outer_edge) {
            return Err(InvariantError::Violation {
                field: "wall_thickness".into(),
                msg: format!(
                    "2t >= edge: need 0 < 2*{} < {}",
                    self.wall_thickness, self.outer_edge
                ),
            }
            .into());
        }
        if self.air_k_eq <= 0.0 {
            return Err(InvariantError::Violation {
                field: "air_k_eq".into(),
                msg: "must be > 0".into(),
            }
            .into());
        }
        Ok(())
    }
}

impl Default for BoxGeometry {
    fn default() -> Self {
        let outer_edge = 1.2;
        let wall_thickness = 0.12;
        BoxGeometry {
            outer_edge,
            wall_thickness,
            wall_material: default_concrete(),
            air_k_eq: (outer_edge - 2.0 * wall_thickness) / AIR_CORE_RESISTANCE,
        }
    }
}

fn default_concrete() -> Material {
    Material {
        name: "concrete".into(),
        conductivity: 2.0,
        density: 2400.0,
        specific_heat: 840.0,
    }
}

/// Site, numerical and control settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub latitude: f64,
    pub longitude: f64,
    /// Offset of local clock from UTC, h.
    pub timezone: f64,
    /// Hours discarded before comparison metrics.
    pub warmup_hours: usize,
    /// FEM cells per box edge.
    pub mesh_n: usize,
    /// Time integration weight: 1 = implicit Euler, 0.5 = Crank-Nicolson.
    pub theta: f64,
    /// FEM substeps per hour.
    pub substeps: usize,
    /// Initial uniform temperature; defaults to the first-hour outdoor value.
    pub initial_temperature: Option<f64>,
    pub heat_setpoint: Option<f64>,
    pub cool_setpoint: Option<f64>,
    /// Exterior long-wave emissivity used in sol-air.
    pub emissivity: f64,
    /// Long-wave deficit applied to sky-facing surfaces (tilt < 45 deg), W/m2.
    pub delta_r_roof: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            latitude: 52.0,
            longitude: 5.0,
            timezone: 0.0,
            warmup_hours: 72,
            mesh_n: 20,
            theta: 1.0,
            substeps: 1,
            initial_temperature: None,
            heat_setpoint: None,
            cool_setpoint: None,
            emissivity: 0.9,
            delta_r_roof: 100.0,
        }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.latitude.abs() <= 90.0) {
            return Err(InvariantError::Violation {
                field: "latitude".into(),
                msg: "must satisfy |lat| <= 90".into(),
            }
            .into());
        }
        if !(self.theta >= 0.0 && self.theta <= 1.0) {
            return Err(InvariantError::Violation {
                field: "theta".into(),
                msg: "must be within [0, 1]".into(),
            }
            .into());
        }
        if self.substeps == 0 {
            return Err(InvariantError::Violation {
                field: "substeps".into(),
                msg: "must be >= 1".into(),
            }
            .into());
        }
        if !(0.0..=1.0).contains(&self.emissivity) {
            return Err(InvariantError::Violation {
                field: "emissivity".into(),
                msg: "must be within [0, 1]".into(),
            }
            .into());
        }
        Ok(())
    }
}

/// Everything a run needs, plus parse warnings (unknown keys).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub zone: ZoneConfig,
    pub box_geom: BoxGeometry,
    pub sim: SimSettings,
    pub warnings: Vec<String>,
}

/// The default opaque heavy-weight test box: 1.2 m cube, 0.12 m concrete
/// shell, six external faces, no ventilation, free floating.
pub fn default_box_config() -> LoadedConfig {
    let box_geom = BoxGeometry::default();
    let zone = default_zone_for_box(&box_geom);
    LoadedConfig {
        zone,
        box_geom,
        sim: SimSettings::default(),
        warnings: vec![],
    }
}

/// Derives the one-zone description of a box: six external faces with the
/// shell construction, core air volume, default film coefficients.
pub fn default_zone_for_box(b: &BoxGeometry) -> ZoneConfig {
    let face_area = b.outer_edge * b.outer_edge;
    let wall = WallConstruction {
        layers: vec![Layer {
            material: b.wall_material.clone(),
            thickness: b.wall_thickness,
        }],
    };
    let faces = [
        ("south", 90.0, 180.0),
        ("west", 90.0, 270.0),
        ("north", 90.0, 0.0),
        ("east", 90.0, 90.0),
        ("roof", 0.0, 0.0),
        ("floor", 180.0, 0.0),
    ];
    let envelope = faces
        .iter()
        .map(|(id, tilt, az)| EnvelopePart {
            id: (*id).into(),
            area: face_area,
            construction: Construction::Wall(wall.clone()),
            orientation: Orientation { tilt_deg: *tilt, azimuth_deg: *az },
            boundary: Boundary::External,
            solar_absorptance: 0.6,
        })
        .collect::<Vec<_>>();
    let air_volume = b.core_volume();
    let total_surface_area = envelope.iter().map(|p| p.area).sum();
    ZoneConfig {
        air_volume,
        total_surface_area,
        air_capacity: RHO_AIR * C_AIR * air_volume,
        ach: 0.0,
        envelope,
        surface_coeffs: SurfaceCoefficients::default(),
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_config_str(&text)
}

struct RawSection {
    line: usize,
    entries: Vec<(usize, String, String)>,
}

fn split_sections(text: &str) -> Result<Vec<(String, RawSection)>, ConfigError> {
    let mut sections: Vec<(String, RawSection)> = Vec::new();
    let mut current: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(ConfigError::Parse {
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            sections.push((
                name.trim().to_string(),
                RawSection { line: line_no, entries: vec![] },
            ));
            current = Some(sections.len() - 1);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let sec = current.ok_or(ConfigError::Parse {
            line: line_no,
            msg: "key outside of any [section]".into(),
        })?;
        let key = key.trim().to_string();
        if sections[sec].1.entries.iter().any(|(_, k, _)| *k == key) {
            return Err(ConfigError::Parse {
                line: line_no,
                msg: format!("duplicate key `{key}` in section `{}`", sections[sec].0),
            });
        }
        sections[sec]
            .1
            .entries
            .push((line_no, key, value.trim().to_string()));
    }
    Ok(sections)
}

struct SectionReader<'a> {
    name: String,
    entries: &'a [(usize, String, String)],
    used: Vec<bool>,
}

impl<'a> SectionReader<'a> {
    fn new(name: &str, sec: &'a RawSection) -> Self {
        SectionReader {
            name: name.to_string(),
            entries: &sec.entries,
            used: vec![false; sec.entries.len()],
        }
    }

    fn get(&mut self, key: &str) -> Option<(usize, &'a str)> {
        for (i, (line, k, v)) in self.entries.iter().enumerate() {
            if k == key {
                self.used[i] = true;
                return Some((*line, v.as_str()));
            }
        }
        None
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| ConfigError::Parse {
                    line,
                    msg: format!("key `{key}`: `{v}` is not a number"),
                }),
        }
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| ConfigError::Parse {
                    line,
                    msg: format!("key `{key}`: `{v}` is not a non-negative integer"),
                }),
        }
    }

    fn warn_unused(&self, warnings: &mut Vec<String>) {
        for (i, (line, k, _)) in self.entries.iter().enumerate() {
            if !self.used[i] {
                warnings.push(format!(
                    "line {line}: unknown key `{k}` in section `[{}]` ignored",
                    self.name
                ));
            }
        }
    }
}

fn parse_construction(
    value: &str,
    line: usize,
    materials: &BTreeMap<String, Material>,
) -> Result<Construction, ConfigError> {
    let mk_err = |msg: String| ConfigError::Parse { line, msg };
    let mut layers = Vec::new();
    for tok in value.split(',') {
        let tok = tok.trim();
        let (name, thick) = tok
            .split_once(':')
            .ok_or_else(|| mk_err(format!("construction token `{tok}`: expected `material:thickness` or `glazing:U`")))?;
        let name = name.trim();
        let num: f64 = thick
            .trim()
            .parse()
            .map_err(|_| mk_err(format!("construction token `{tok}`: `{}` is not a number", thick.trim())))?;
        if name == "glazing" {
            if !layers.is_empty() || value.contains(',') {
                return Err(mk_err("glazing cannot be combined with layers".into()));
            }
            return Ok(Construction::Glazing { u_glazing: num });
        }
        let material = materials
            .get(name)
            .ok_or_else(|| mk_err(format!("unknown material `{name}` (declare a [materials.{name}] section)")))?
            .clone();
        layers.push(Layer { material, thickness: num });
    }
    if layers.is_empty() {
        return Err(mk_err("empty construction".into()));
    }
    Ok(Construction::Wall(WallConstruction { layers }))
}

pub fn load_config_str(text: &str) -> Result<LoadedConfig, ConfigError> {
    let sections = split_sections(text)?;
    let mut warnings = Vec::new();

    // materials first; they are referenced by name elsewhere
    let mut materials: BTreeMap<String, Material> = BTreeMap::new();
    for (name, sec) in &sections {
        if let Some(mat_name) = name.strip_prefix("materials.") {
            let mut r = SectionReader::new(name, sec);
            let conductivity = r.f64("conductivity")?.ok_or(ConfigError::Parse {
                line: sec.line,
                msg: format!("[{name}] missing `conductivity`"),
            })?;
            let density = r.f64("density")?.ok_or(ConfigError::Parse {
                line: sec.line,
                msg: format!("[{name}] missing `density`"),
            })?;
            let specific_heat = r.f64("specific_heat")?.ok_or(ConfigError::Parse {
                line: sec.line,
                msg: format!("[{name}] missing `specific_heat`"),
            })?;
            r.warn_unused(&mut warnings);
            materials.insert(
                mat_name.to_string(),
                Material {
                    name: mat_name.to_string(),
                    conductivity,
                    density,
                    specific_heat,
                },
            );
        }
    }
    if !materials.contains_key("concrete") {
        materials.insert("concrete".into(), default_concrete());
    }

    // box geometry
    let mut box_geom = BoxGeometry::default();
    let mut k_eq_explicit = false;
    if let Some((name, sec)) = sections.iter().find(|(n, _)| n == "box") {
        let mut r = SectionReader::new(name, sec);
        if let Some(v) = r.f64("outer_edge")? {
            box_geom.outer_edge = v;
        }
        if let Some(v) = r.f64("wall_thickness")? {
            box_geom.wall_thickness = v;
        }
        if let Some((line, v)) = r.get("wall_material") {
            box_geom.wall_material = materials
                .get(v)
                .ok_or(ConfigError::Parse {
                    line,
                    msg: format!("unknown material `{v}`"),
                })?
                .clone();
        }
        if let Some(v) = r.f64("air_k_eq")? {
            box_geom.air_k_eq = v;
            k_eq_explicit = true;
        }
        r.warn_unused(&mut warnings);
    }
    if !k_eq_explicit {
        box_geom.air_k_eq = box_geom.core_width() / AIR_CORE_RESISTANCE;
    }
    box_geom.validate()?;

    // envelope parts
    let mut envelope: Vec<EnvelopePart> = Vec::new();
    for (name, sec) in &sections {
        if let Some(id) = name.strip_prefix("envelope.") {
            let mut r = SectionReader::new(name, sec);
            let area = r.f64("area")?.ok_or(ConfigError::Parse {
                line: sec.line,
                msg: format!("[{name}] missing `area`"),
            })?;
            let construction = match r.get("construction") {
                Some((line, v)) => parse_construction(v, line, &materials)?,
                None => {
                    return Err(ConfigError::Parse {
                        line: sec.line,
                        msg: format!("[{name}] missing `construction`"),
                    })
                }
            };
            let tilt_deg = r.f64("tilt")?.unwrap_or(90.0);
            let azimuth_deg = r.f64("azimuth")?.unwrap_or(180.0);
            let boundary = match r.get("boundary") {
                None => Boundary::External,
                Some((_, "external")) => Boundary::External,
                Some((_, "adiabatic")) => Boundary::Adiabatic,
                Some((line, v)) => {
                    return Err(ConfigError::Parse {
                        line,
                        msg: format!("boundary `{v}` is neither `external` nor `adiabatic`"),
                    })
                }
            };
            let solar_absorptance = r.f64("solar_absorptance")?.unwrap_or(0.6);
            r.warn_unused(&mut warnings);
            envelope.push(EnvelopePart {
                id: id.to_string(),
                area,
                construction,
                orientation: Orientation { tilt_deg, azimuth_deg },
                boundary,
                solar_absorptance,
            });
        }
    }
    if envelope.is_empty() {
        envelope = default_zone_for_box(&box_geom).envelope;
    }

    // zone
    let area_sum: f64 = envelope.iter().map(|p| p.area).sum();
    let mut air_volume = box_geom.core_volume();
    let mut total_surface_area = area_sum;
    let mut air_capacity: Option<f64> = None;
    let mut furniture_multiplier = 1.0;
    let mut ach = 0.0;
    let mut coeffs = SurfaceCoefficients::default();
    if let Some((name, sec)) = sections.iter().find(|(n, _)| n == "zone") {
        let mut r = SectionReader::new(name, sec);
        if let Some(v) = r.f64("air_volume")? {
            air_volume = v;
        }
        if let Some(v) = r.f64("total_surface_area")? {
            total_surface_area = v;
        }
        air_capacity = r.f64("air_capacity")?;
        if let Some(v) = r.f64("furniture_multiplier")? {
            furniture_multiplier = v;
        }
        if let Some(v) = r.f64("ach")? {
            ach = v;
        }
        if let Some(v) = r.f64("h_cv")? {
            coeffs.h_cv = v;
        }
        if let Some(v) = r.f64("h_r")? {
            coeffs.h_r = v;
        }
        if let Some(v) = r.f64("h_e")? {
            coeffs.h_e = v;
        }
        r.warn_unused(&mut warnings);
    }
    let zone = ZoneConfig {
        air_volume,
        total_surface_area,
        air_capacity: air_capacity.unwrap_or(RHO_AIR * C_AIR * air_volume * furniture_multiplier),
        ach,
        envelope,
        surface_coeffs: coeffs,
    };
    zone.validate()?;

    // simulation
    let mut sim = SimSettings::default();
    if let Some((name, sec)) = sections.iter().find(|(n, _)| n == "simulation") {
        let mut r = SectionReader::new(name, sec);
        if let Some(v) = r.f64("latitude")? {
            sim.latitude = v;
        }
        if let Some(v) = r.f64("longitude")? {
            sim.longitude = v;
        }
        if let Some(v) = r.f64("timezone")? {
            sim.timezone = v;
        }
        if let Some(v) = r.usize("warmup_hours")? {
            sim.warmup_hours = v;
        }
        if let Some(v) = r.usize("mesh_n")? {
            sim.mesh_n = v;
        }
        if let Some(v) = r.f64("theta")? {
            sim.theta = v;
        }
        if let Some(v) = r.usize("substeps")? {
            sim.substeps = v;
        }
        sim.initial_temperature = r.f64("initial_temperature")?;
        sim.heat_setpoint = r.f64("heat_setpoint")?;
        sim.cool_setpoint = r.f64("cool_setpoint")?;
        if let Some(v) = r.f64("emissivity")? {
            sim.emissivity = v;
        }
        if let Some(v) = r.f64("delta_r_roof")? {
            sim.delta_r_roof = v;
        }
        r.warn_unused(&mut warnings);
    }
    sim.validate()?;

    for (name, sec) in &sections {
        let known = name == "zone"
            || name == "box"
            || name == "simulation"
            || name.starts_with("materials.")
            || name.starts_with("envelope.");
        if !known {
            warnings.push(format!("line {}: unknown section `[{name}]` ignored", sec.line));
        }
    }

    Ok(LoadedConfig { zone, box_geom, sim, warnings })
}

fn fmt_f64(v: f64) -> String {
    // shortest representation that round-trips exactly
    format!("{v}")
}

/// Writes a configuration back out in the same sectioned format so that
/// reparsing yields an equal configuration.
pub fn to_config_text(cfg: &LoadedConfig) -> String {
    let mut s = String::new();
    let mut mats: BTreeMap<&str, &Material> = BTreeMap::new();
    mats.insert(&cfg.box_geom.wall_material.name, &cfg.box_geom.wall_material);
    for p in &cfg.zone.envelope {
        if let Construction::Wall(w) = &p.construction {
            for l in &w.layers {
                mats.insert(&l.material.name, &l.material);
            }
        }
    }
    for (name, m) in &mats {
        let _ = writeln!(s, "[materials.{name}]");
        let _ = writeln!(s, "conductivity = {}", fmt_f64(m.conductivity));
        let _ = writeln!(s, "density = {}", fmt_f64(m.density));
        let _ = writeln!(s, "specific_heat = {}", fmt_f64(m.specific_heat));
        s.push('\n');
    }

    let b = &cfg.box_geom;
    let _ = writeln!(s, "[box]");
    let _ = writeln!(s, "outer_edge = {}", fmt_f64(b.outer_edge));
    let _ = writeln!(s, "wall_thickness = {}", fmt_f64(b.wall_thickness));
    let _ = writeln!(s, "wall_material = {}", b.wall_material.name);
    let _ = writeln!(s, "air_k_eq = {}", fmt_f64(b.air_k_eq));
    s.push('\n');

    let z = &cfg.zone;
    let _ = writeln!(s, "[zone]");
    let _ = writeln!(s, "air_volume = {}", fmt_f64(z.air_volume));
    let _ = writeln!(s, "total_surface_area = {}", fmt_f64(z.total_surface_area));
    let _ = writeln!(s, "air_capacity = {}", fmt_f64(z.air_capacity));
    let _ = writeln!(s, "ach = {}", fmt_f64(z.ach));
    let _ = writeln!(s, "h_cv = {}", fmt_f64(z.surface_coeffs.h_cv));
    let _ = writeln!(s, "h_r = {}", fmt_f64(z.surface_coeffs.h_r));
    let _ = writeln!(s, "h_e = {}", fmt_f64(z.surface_coeffs.h_e));
    s.push('\n');

    for p in &z.envelope {
        let _ = writeln!(s, "[envelope.{}]", p.id);
        let _ = writeln!(s, "area = {}", fmt_f64(p.area));
        match &p.construction {
            Construction::Wall(w) => {
                let toks: Vec<String> = w
                    .layers
                    .iter()
                    .map(|l| format!("{}:{}", l.material.name, fmt_f64(l.thickness)))
                    .collect();
                let _ = writeln!(s, "construction = {}", toks.join(", "));
            }
            Construction::Glazing { u_glazing } => {
                let _ = writeln!(s, "construction = glazing:{}", fmt_f64(*u_glazing));
            }
        }
        let _ = writeln!(s, "tilt = {}", fmt_f64(p.orientation.tilt_deg));
        let _ = writeln!(s, "azimuth = {}", fmt_f64(p.orientation.azimuth_deg));
        let _ = writeln!(
            s,
            "boundary = {}",
            match p.boundary {
                Boundary::External => "external",
                Boundary::Adiabatic => "adiabatic",
            }
        );
        let _ = writeln!(s, "solar_absorptance = {}", fmt_f64(p.solar_absorptance));
        s.push('\n');
    }

    let m = &cfg.sim;
    let _ = writeln!(s, "[simulation]");
    let _ = writeln!(s, "latitude = {}", fmt_f64(m.latitude));
    let _ = writeln!(s, "longitude = {}", fmt_f64(m.longitude));
    let _ = writeln!(s, "timezone = {}", fmt_f64(m.timezone));
    let _ = writeln!(s, "warmup_hours = {}", m.warmup_hours);
    let _ = writeln!(s, "mesh_n = {}", m.mesh_n);
    let _ = writeln!(s, "theta = {}", fmt_f64(m.theta));
    let _ = writeln!(s, "substeps = {}", m.substeps);
    if let Some(v) = m.initial_temperature {
        let _ = writeln!(s, "initial_temperature = {}", fmt_f64(v));
    }
    if let Some(v) = m.heat_setpoint {
        let _ = writeln!(s, "heat_setpoint = {}", fmt_f64(v));
    }
    if let Some(v) = m.cool_setpoint {
        let _ = writeln!(s, "cool_setpoint = {}", fmt_f64(v));
    }
    let _ = writeln!(s, "emissivity = {}", fmt_f64(m.emissivity));
    let _ = writeln!(s, "delta_r_roof = {}", fmt_f64(m.delta_r_roof));
    s
}
