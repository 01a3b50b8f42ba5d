//! Slab transfer matrices and surface/cross admittances.
//!
//! A layer of conductivity k, volumetric capacity rho*c and thickness d has
//! the per-area two-port matrix at angular frequency w
//!
//! ```text
//!   [T_x]   [ cosh(g d)      sinh(g d)/(k g) ] [T_y]
//!   [q_x] = [ k g sinh(g d)  cosh(g d)       ] [q_y]
//! ```
//!
//! with g = sqrt(i w rho c / k); interior side x, exterior side y, flux
//! positive from x to y. The matrix is reciprocal (determinant 1) and at
//! w = 0 degenerates to [[1, d/k], [0, 1]].

use num_complex::Complex64;

use crate::material::{Construction, EnvelopePart, Layer, WallConstruction};

/// Per-area two-port relating interior temperature/flux to exterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        TransferMatrix {
            m11: Complex64::new(1.0, 0.0),
            m12: Complex64::new(0.0, 0.0),
            m21: Complex64::new(0.0, 0.0),
            m22: Complex64::new(1.0, 0.0),
        }
    }

    /// Massless resistive layer (a film or an air gap).
    pub fn resistance(r: f64) -> Self {
        TransferMatrix {
            m11: Complex64::new(1.0, 0.0),
            m12: Complex64::new(r, 0.0),
            m21: Complex64::new(0.0, 0.0),
            m22: Complex64::new(1.0, 0.0),
        }
    }

    pub fn compose(&self, rhs: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }
}

/// Two-port of a single slab layer at angular frequency `omega` (rad/s).
/// The `omega = 0` case returns the analytic steady-state limit.
pub fn layer_matrix(layer: &Layer, omega: f64) -> TransferMatrix {
    let k = layer.material.conductivity;
    let d = layer.thickness;
    if omega == 0.0 {
        return TransferMatrix::resistance(d / k);
    }
    let rc = layer.material.volumetric_heat_capacity();
    let gamma = (Complex64::new(0.0, omega * rc / k)).sqrt();
    let gd = gamma * d;
    let cosh = gd.cosh();
    let sinh = gd.sinh();
    TransferMatrix {
        m11: cosh,
        m12: sinh / (k * gamma),
        m21: k * gamma * sinh,
        m22: cosh,
    }
}

/// Product of layer matrices, interior layer first.
pub fn wall_matrix(wall: &WallConstruction, omega: f64) -> TransferMatrix {
    let mut m = TransferMatrix::identity();
    for layer in &wall.layers {
        m = m.compose(&layer_matrix(layer, omega));
    }
    m
}

/// Wall two-port with the exterior film appended as a massless resistance.
/// The interior film is not part of the wall; it lives in the zone network
/// coupling coefficient.
pub fn part_matrix(part: &EnvelopePart, h_e: f64, omega: f64) -> TransferMatrix {
    let m = match &part.construction {
        Construction::Wall(w) => wall_matrix(w, omega),
        Construction::Glazing { u_glazing } => {
            // massless: the whole x-to-sol-air path is one resistance
            return TransferMatrix::resistance(1.0 / u_glazing);
        }
    };
    m.compose(&TransferMatrix::resistance(1.0 / h_e))
}

/// Area-scaled surplus and cross admittances of an envelope part, W/K.
///
/// The interior heat flow decomposes as
/// `Phi_x = -Y_x T_x + Y_xy (T_y - T_x)`: `y_xy` is the cross (transmission)
/// admittance, `y_x` the interior storage surplus, `y_y` the exterior one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmittanceTriple {
    pub y_x: Complex64,
    pub y_y: Complex64,
    pub y_xy: Complex64,
    pub omega: f64,
}

/// Admittances from an already-built two-port, scaled by the part area.
pub fn admittances_from_matrix(m: &TransferMatrix, area: f64, omega: f64) -> AdmittanceTriple {
    let one = Complex64::new(1.0, 0.0);
    assert!(m.m12.norm() > 0.0, "zero M12 cannot occur for a slab of positive thickness");
    AdmittanceTriple {
        y_xy: area / m.m12,
        y_x: area * (m.m22 - one) / m.m12,
        y_y: area * (m.m11 - one) / m.m12,
        omega,
    }
}

/// Admittances of an opaque part including the exterior film.
pub fn admittances(part: &EnvelopePart, h_e: f64, omega: f64) -> AdmittanceTriple {
    admittances_from_matrix(&part_matrix(part, h_e, omega), part.area, omega)
}
