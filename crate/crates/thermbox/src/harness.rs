//! Glue between weather, the zone model and the FEM: identical sol-air
//! driving for both models, and the mapping of envelope parts onto the six
//! box faces.

use thiserror::Error;

use crate::config::{SimSettings, ZoneConfig};
use crate::fem::FaceSeries;
use crate::material::{Boundary, EnvelopePart, Orientation};
use crate::weather::{sol_air_series, SiteInfo, SolAirParams, WeatherRecord};
use crate::zone::ZoneInputs;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot map envelope onto box faces: {0}")]
    FaceMapping(String),
}

pub fn site_of(sim: &SimSettings) -> SiteInfo {
    SiteInfo {
        latitude_deg: sim.latitude,
        longitude_deg: sim.longitude,
        timezone_hours: sim.timezone,
    }
}

/// Sol-air parameters of one part: its own absorptance, the zone exterior
/// film, and the sky deficit on sky-facing surfaces (tilt < 45 deg).
pub fn sol_air_params_for(part: &EnvelopePart, cfg: &ZoneConfig, sim: &SimSettings) -> SolAirParams {
    SolAirParams {
        a_sol: part.solar_absorptance,
        h_e: cfg.surface_coeffs.h_e,
        emissivity: sim.emissivity,
        delta_r: if part.orientation.tilt_deg < 45.0 { sim.delta_r_roof } else { 0.0 },
    }
}

/// Hourly zone inputs: outdoor dry-bulb as ventilation inlet and one sol-air
/// series per external part, in envelope order.
pub fn zone_inputs_from_weather(
    records: &[WeatherRecord],
    cfg: &ZoneConfig,
    sim: &SimSettings,
) -> ZoneInputs {
    let site = site_of(sim);
    let t_y = cfg
        .envelope
        .iter()
        .filter(|p| p.boundary == Boundary::External)
        .map(|p| {
            sol_air_series(records, &site, &p.orientation, &sol_air_params_for(p, cfg, sim))
        })
        .collect();
    ZoneInputs {
        t_b: records.iter().map(|r| r.t_e).collect(),
        t_y,
        gains: vec![],
    }
}

/// Which box face an orientation belongs to, in the FEM face order
/// west, east, south, north, floor, roof.
pub fn face_index_for(o: &Orientation) -> Option<usize> {
    if o.tilt_deg < 45.0 {
        return Some(crate::fem::FACE_Z_PLUS);
    }
    if o.tilt_deg > 135.0 {
        return Some(crate::fem::FACE_Z_MINUS);
    }
    let az = o.azimuth_deg.rem_euclid(360.0);
    let candidates = [
        (0.0, crate::fem::FACE_Y_PLUS),    // north
        (90.0, crate::fem::FACE_X_PLUS),   // east
        (180.0, crate::fem::FACE_Y_MINUS), // south
        (270.0, crate::fem::FACE_X_MINUS), // west
        (360.0, crate::fem::FACE_Y_PLUS),
    ];
    candidates
        .iter()
        .find(|(a, _)| (az - a).abs() <= 45.0)
        .map(|&(_, f)| f)
}

/// Per-face sol-air series for the FEM run. Requires exactly six external
/// parts covering the six box faces one-to-one.
pub fn face_series_from_weather(
    records: &[WeatherRecord],
    cfg: &ZoneConfig,
    sim: &SimSettings,
) -> Result<FaceSeries, HarnessError> {
    let site = site_of(sim);
    let mut series: [Option<Vec<f64>>; 6] = Default::default();
    let ext: Vec<&EnvelopePart> = cfg
        .envelope
        .iter()
        .filter(|p| p.boundary == Boundary::External)
        .collect();
    if ext.len() != 6 {
        return Err(HarnessError::FaceMapping(format!(
            "need exactly 6 external parts, found {}",
            ext.len()
        )));
    }
    for p in ext {
        let face = face_index_for(&p.orientation).ok_or_else(|| {
            HarnessError::FaceMapping(format!(
                "part `{}`: orientation tilt {} azimuth {} matches no face",
                p.id, p.orientation.tilt_deg, p.orientation.azimuth_deg
            ))
        })?;
        if series[face].is_some() {
            return Err(HarnessError::FaceMapping(format!(
                "two parts map to the same box face (second: `{}`)",
                p.id
            )));
        }
        series[face] = Some(sol_air_series(
            records,
            &site,
            &p.orientation,
            &sol_air_params_for(p, cfg, sim),
        ));
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(6);
    for (i, s) in series.into_iter().enumerate() {
        out.push(s.ok_or_else(|| {
            HarnessError::FaceMapping(format!("no part maps to box face {i}"))
        })?);
    }
    Ok(out.try_into().expect("six faces"))
}
