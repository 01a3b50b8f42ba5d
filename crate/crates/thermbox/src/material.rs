//! Materials, layered wall constructions and envelope parts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InvariantError {
    #[error("field `{field}`: {msg}")]
    Violation { field: String, msg: String },
}

fn require(ok: bool, field: &str, msg: &str) -> Result<(), InvariantError> {
    if ok {
        Ok(())
    } else {
        Err(InvariantError::Violation {
            field: field.to_string(),
            msg: msg.to_string(),
        })
    }
}

/// Homogeneous solid material. Volumetric heat capacity is always derived
/// as `rho * c`, never stored on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Thermal conductivity, W/(m K).
    pub conductivity: f64,
    /// Density, kg/m3.
    pub density: f64,
    /// Specific heat, J/(kg K).
    pub specific_heat: f64,
}

impl Material {
    pub fn new(name: &str, conductivity: f64, density: f64, specific_heat: f64) -> Result<Self, InvariantError> {
        let m = Material {
            name: name.to_string(),
            conductivity,
            density,
            specific_heat,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), InvariantError> {
        require(self.conductivity > 0.0, "conductivity", "must be > 0")?;
        require(self.density > 0.0, "density", "must be > 0")?;
        require(self.specific_heat > 0.0, "specific_heat", "must be > 0")
    }

    /// Volumetric heat capacity rho*c, J/(m3 K).
    pub fn volumetric_heat_capacity(&self) -> f64 {
        self.density * self.specific_heat
    }
}

/// One slab layer of a wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: Material,
    /// Thickness, m.
    pub thickness: f64,
}

impl Layer {
    pub fn new(material: Material, thickness: f64) -> Result<Self, InvariantError> {
        require(thickness > 0.0, "thickness", "must be > 0")?;
        Ok(Layer { material, thickness })
    }

    /// Conductive resistance d/k, m2 K/W.
    pub fn resistance(&self) -> f64 {
        self.thickness / self.material.conductivity
    }
}

/// Layered slab, interior side first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallConstruction {
    pub layers: Vec<Layer>,
}

impl WallConstruction {
    pub fn new(layers: Vec<Layer>) -> Result<Self, InvariantError> {
        require(!layers.is_empty(), "layers", "at least one layer required")?;
        Ok(WallConstruction { layers })
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Conductive resistance of the slab alone (no films), m2 K/W.
    pub fn resistance(&self) -> f64 {
        self.layers.iter().map(|l| l.resistance()).sum()
    }
}

/// Interior convective/radiative and exterior combined film coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCoefficients {
    /// Interior convective coefficient, W/(m2 K).
    pub h_cv: f64,
    /// Interior radiative coefficient, W/(m2 K).
    pub h_r: f64,
    /// Exterior combined coefficient, W/(m2 K).
    pub h_e: f64,
}

impl SurfaceCoefficients {
    pub fn validate(&self) -> Result<(), InvariantError> {
        require(self.h_cv > 0.0, "h_cv", "must be > 0")?;
        require(self.h_r > 0.0, "h_r", "must be > 0")?;
        require(self.h_e > 0.0, "h_e", "must be > 0")
    }
}

impl Default for SurfaceCoefficients {
    fn default() -> Self {
        SurfaceCoefficients { h_cv: 3.0, h_r: 5.5, h_e: 25.0 }
    }
}

/// Opaque layered wall or massless glazing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Construction {
    Wall(WallConstruction),
    /// Massless; U from the combined node to the sol-air temperature
    /// (exterior film included, interior film excluded), W/(m2 K).
    Glazing { u_glazing: f64 },
}

/// Thermal boundary on the far side of an envelope part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Exposed to sol-air temperature.
    External,
    /// No transmission heat flow.
    Adiabatic,
}

/// Surface orientation: tilt 0 = horizontal facing up, 90 = vertical,
/// 180 = horizontal facing down; azimuth from north, clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    pub tilt_deg: f64,
    pub azimuth_deg: f64,
}

/// One envelope part of the zone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePart {
    pub id: String,
    /// Surface area, m2.
    pub area: f64,
    pub construction: Construction,
    pub orientation: Orientation,
    pub boundary: Boundary,
    /// Solar absorptance of the exterior surface, 0..=1.
    pub solar_absorptance: f64,
}

impl EnvelopePart {
    pub fn validate(&self) -> Result<(), InvariantError> {
        require(self.area > 0.0, "area", "must be > 0")?;
        require(
            (0.0..=1.0).contains(&self.solar_absorptance),
            "solar_absorptance",
            "must be within [0, 1]",
        )?;
        match &self.construction {
            Construction::Wall(w) => {
                require(!w.layers.is_empty(), "construction", "wall needs at least one layer")?;
                for l in &w.layers {
                    l.material.validate()?;
                    require(l.thickness > 0.0, "thickness", "must be > 0")?;
                }
            }
            Construction::Glazing { u_glazing } => {
                require(*u_glazing > 0.0, "u_glazing", "must be > 0")?;
            }
        }
        Ok(())
    }

    /// Transmittance from the combined interior node to the sol-air
    /// temperature: slab resistance plus exterior film, no interior film.
    pub fn u_value(&self, h_e: f64) -> f64 {
        match &self.construction {
            Construction::Wall(w) => 1.0 / (w.resistance() + 1.0 / h_e),
            Construction::Glazing { u_glazing } => *u_glazing,
        }
    }
}

/// Hourly heat gain with its convective fraction. The radiant part
/// `(1 - f) * phi` enters at the combined node, the convective part
/// `f * phi` at the air node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatGain {
    /// One value per simulation hour, W.
    pub series: Vec<f64>,
    /// Convective fraction, 0..=1 (1 for air heating, 0.5 for radiators).
    pub convection_factor: f64,
}

impl HeatGain {
    pub fn validate(&self) -> Result<(), InvariantError> {
        require(
            (0.0..=1.0).contains(&self.convection_factor),
            "convection_factor",
            "must be within [0, 1]",
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concrete() -> Material {
        Material::new("concrete", 2.0, 2400.0, 840.0).unwrap()
    }

    #[test]
    fn material_invariants() {
        assert!(Material::new("bad", -1.0, 2400.0, 840.0).is_err());
        assert!(Material::new("bad", 2.0, 0.0, 840.0).is_err());
        assert!(Material::new("bad", 2.0, 2400.0, -5.0).is_err());
        let m = concrete();
        assert_eq!(m.volumetric_heat_capacity(), 2.016e6);
    }

    #[test]
    fn layer_resistance() {
        let l = Layer::new(concrete(), 0.12).unwrap();
        assert!((l.resistance() - 0.06).abs() < 1e-15);
        assert!(Layer::new(concrete(), 0.0).is_err());
    }

    #[test]
    fn wall_totals() {
        let w = WallConstruction::new(vec![
            Layer::new(concrete(), 0.1).unwrap(),
            Layer::new(concrete(), 0.05).unwrap(),
        ])
        .unwrap();
        assert!((w.total_thickness() - 0.15).abs() < 1e-15);
        assert!((w.resistance() - 0.075).abs() < 1e-15);
        assert!(WallConstruction::new(vec![]).is_err());
    }

    #[test]
    fn part_u_value_includes_exterior_film_only() {
        let part = EnvelopePart {
            id: "w".into(),
            area: 1.44,
            construction: Construction::Wall(
                WallConstruction::new(vec![Layer::new(concrete(), 0.12).unwrap()]).unwrap(),
            ),
            orientation: Orientation { tilt_deg: 90.0, azimuth_deg: 180.0 },
            boundary: Boundary::External,
            solar_absorptance: 0.6,
        };
        // 1 / (0.06 + 0.04) = 10
        assert!((part.u_value(25.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn gain_fraction_bounds() {
        let g = HeatGain { series: vec![0.0], convection_factor: 1.2 };
        assert!(g.validate().is_err());
    }
}
