//! Hourly weather series, synthetic weather generation, solar geometry and
//! sol-air temperatures.

use chrono::{DateTime, Datelike, Duration, Timelike, Utc};
use thiserror::Error;

use crate::material::Orientation;

#[derive(Debug, Error)]
pub enum WeatherError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: timestamps must increase in exact 1 h steps ({prev} -> {got})")]
    NonMonotonic { line: usize, prev: String, got: String },
    #[error("line {line}: diffuse irradiance {idh} exceeds global {igh}")]
    DiffuseExceedsGlobal { line: usize, idh: f64, igh: f64 },
    #[error("header must be `time,Te,Igh,Idh`, got `{0}`")]
    MissingColumn(String),
}

/// One hourly weather record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherRecord {
    pub time: DateTime<Utc>,
    /// Dry-bulb outdoor temperature, degC.
    pub t_e: f64,
    /// Global horizontal irradiance, W/m2.
    pub i_gh: f64,
    /// Diffuse horizontal irradiance, W/m2.
    pub i_dh: f64,
}

/// Geographic site; longitude east positive, timezone as offset from UTC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteInfo {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub timezone_hours: f64,
}

/// Sol-air conversion parameters of one surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolAirParams {
    /// Solar absorptance, 0..=1.
    pub a_sol: f64,
    /// Exterior film coefficient, W/(m2 K).
    pub h_e: f64,
    /// Long-wave emissivity, 0..=1.
    pub emissivity: f64,
    /// Long-wave sky deficit, W/m2 (0 for vertical surfaces).
    pub delta_r: f64,
}

fn parse_time(s: &str) -> Option<DateTime<Utc>> {
    // accepts 2023-01-01T00:00Z and 2023-01-01T00:00:00Z
    for fmt in ["%Y-%m-%dT%H:%MZ", "%Y-%m-%dT%H:%M:%SZ"] {
        if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(s, fmt) {
            return Some(DateTime::from_naive_utc_and_offset(naive, Utc));
        }
    }
    None
}

fn format_time(t: &DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%MZ").to_string()
}

/// Parses the weather CSV `time,Te,Igh,Idh`. Gaps, non-monotonic stamps and
/// diffuse above global are rejected with the offending line number.
pub fn parse_weather(text: &str) -> Result<Vec<WeatherRecord>, WeatherError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l.trim().to_string(),
            None => return Err(WeatherError::MissingColumn(String::new())),
        }
    };
    if header != "time,Te,Igh,Idh" {
        return Err(WeatherError::MissingColumn(header));
    }
    let mut out: Vec<WeatherRecord> = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(WeatherError::Malformed {
                line,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let time = parse_time(fields[0]).ok_or_else(|| WeatherError::Malformed {
            line,
            msg: format!("bad timestamp `{}`", fields[0]),
        })?;
        let num = |i: usize| -> Result<f64, WeatherError> {
            fields[i].parse().map_err(|_| WeatherError::Malformed {
                line,
                msg: format!("`{}` is not a number", fields[i]),
            })
        };
        let (t_e, i_gh, i_dh) = (num(1)?, num(2)?, num(3)?);
        if i_dh < 0.0 || i_gh < 0.0 {
            return Err(WeatherError::Malformed {
                line,
                msg: "irradiance must be non-negative".into(),
            });
        }
        if i_dh > i_gh {
            return Err(WeatherError::DiffuseExceedsGlobal { line, idh: i_dh, igh: i_gh });
        }
        if let Some(prev) = out.last() {
            if time != prev.time + Duration::hours(1) {
                return Err(WeatherError::NonMonotonic {
                    line,
                    prev: format_time(&prev.time),
                    got: format_time(&time),
                });
            }
        }
        out.push(WeatherRecord { time, t_e, i_gh, i_dh });
    }
    Ok(out)
}

pub fn load_weather(path: &std::path::Path) -> Result<Vec<WeatherRecord>, WeatherError> {
    let text = std::fs::read_to_string(path).map_err(|source| WeatherError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_weather(&text)
}

pub fn weather_to_csv(records: &[WeatherRecord]) -> String {
    let mut s = String::from("time,Te,Igh,Idh\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{},{}\n",
            format_time(&r.time),
            r.t_e,
            r.i_gh,
            r.i_dh
        ));
    }
    s
}

/// Deterministic synthetic driver: sinusoidal dry-bulb around `t_mean` and a
/// half-sine irradiance day between hours 6 and 18 of the series clock.
/// Hour 12 of each day peaks at `i_peak`; diffuse is a fixed 30% share.
pub fn synth_weather(
    days: usize,
    t_mean: f64,
    t_amp_daily: f64,
    i_peak: f64,
    start: DateTime<Utc>,
) -> Vec<WeatherRecord> {
    let mut out = Vec::with_capacity(days * 24);
    for h in 0..days * 24 {
        let hod = (h % 24) as f64;
        let t_e = t_mean - t_amp_daily * (2.0 * std::f64::consts::PI * hod / 24.0).cos();
        let i_gh = if (6.0..=18.0).contains(&hod) {
            (i_peak * (std::f64::consts::PI * (hod - 6.0) / 12.0).sin()).max(0.0)
        } else {
            0.0
        };
        out.push(WeatherRecord {
            time: start + Duration::hours(h as i64),
            t_e,
            i_gh,
            i_dh: 0.3 * i_gh,
        });
    }
    out
}

/// Solar altitude and azimuth, degrees; azimuth from north, clockwise.
/// Declination and the equation of time use the Spencer series; the hour
/// angle comes from longitude-corrected solar time.
pub fn solar_position(site: &SiteInfo, time: DateTime<Utc>) -> (f64, f64) {
    let n = time.ordinal() as f64;
    let hour_utc =
        time.hour() as f64 + time.minute() as f64 / 60.0 + time.second() as f64 / 3600.0;
    let g = 2.0 * std::f64::consts::PI * (n - 1.0 + (hour_utc - 12.0) / 24.0) / 365.0;
    let decl = 0.006918 - 0.399912 * g.cos() + 0.070257 * g.sin() - 0.006758 * (2.0 * g).cos()
        + 0.000907 * (2.0 * g).sin()
        - 0.002697 * (3.0 * g).cos()
        + 0.00148 * (3.0 * g).sin();
    // equation of time, minutes
    let eot = 229.18
        * (0.000075 + 0.001868 * g.cos() - 0.032077 * g.sin() - 0.014615 * (2.0 * g).cos()
            - 0.04089 * (2.0 * g).sin());
    let solar_time = hour_utc + site.longitude_deg / 15.0 + eot / 60.0;
    let hour_angle = (15.0 * (solar_time - 12.0)).to_radians();
    let lat = site.latitude_deg.to_radians();
    let sin_alt = lat.sin() * decl.sin() + lat.cos() * decl.cos() * hour_angle.cos();
    let altitude = sin_alt.asin();
    let azimuth = hour_angle
        .sin()
        .atan2(hour_angle.cos() * lat.sin() - decl.tan() * lat.cos())
        + std::f64::consts::PI;
    (altitude.to_degrees(), azimuth.to_degrees())
}

/// Ground albedo of the isotropic reflected component.
const GROUND_ALBEDO: f64 = 0.2;

/// Total irradiance on a tilted surface, W/m2: beam from the normal-beam
/// estimate times the incidence cosine (clipped at zero), isotropic sky
/// diffuse, and isotropic ground reflection.
pub fn surface_irradiance(
    record: &WeatherRecord,
    sun_altitude_deg: f64,
    sun_azimuth_deg: f64,
    orientation: &Orientation,
) -> f64 {
    let tilt = orientation.tilt_deg.to_radians();
    let diffuse = record.i_dh * (1.0 + tilt.cos()) / 2.0;
    let ground = GROUND_ALBEDO * record.i_gh * (1.0 - tilt.cos()) / 2.0;
    let alt = sun_altitude_deg.to_radians();
    let beam = if sun_altitude_deg > 0.0 && record.i_gh > record.i_dh {
        let i_bn = (record.i_gh - record.i_dh) / alt.sin().max(0.05);
        let cos_inc = alt.sin() * tilt.cos()
            + alt.cos()
                * tilt.sin()
                * (sun_azimuth_deg - orientation.azimuth_deg).to_radians().cos();
        i_bn * cos_inc.max(0.0)
    } else {
        0.0
    };
    beam + diffuse + ground
}

/// Equivalent sol-air temperature `T_e + a I / h_e - eps dR / h_e`, degC.
pub fn sol_air(t_e: f64, i_surf: f64, params: &SolAirParams) -> f64 {
    t_e + params.a_sol * i_surf / params.h_e - params.emissivity * params.delta_r / params.h_e
}

/// Hourly sol-air series for one surface. The sun position is evaluated at
/// mid-hour, consistent with records being interval averages.
pub fn sol_air_series(
    records: &[WeatherRecord],
    site: &SiteInfo,
    orientation: &Orientation,
    params: &SolAirParams,
) -> Vec<f64> {
    records
        .iter()
        .map(|r| {
            let (alt, az) = solar_position(site, r.time + Duration::minutes(30));
            let i_surf = surface_irradiance(r, alt, az, orientation);
            sol_air(r.t_e, i_surf, params)
        })
        .collect()
}
