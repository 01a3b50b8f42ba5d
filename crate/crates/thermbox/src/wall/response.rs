//! Second-order discrete response factors for cross transmission.
//!
//! The hourly recursion per envelope part is
//!
//! ```text
//! Phi_yx(tn)  = L_yx * dT_yx(tn) + dPhi_yx(tn)
//! dPhi_yx(tn) = a1 dT(tn-1) + a2 dT(tn-2) + b1 dPhi(tn-1) + b2 dPhi(tn-2)
//! ```
//!
//! whose transfer function from dT samples to Phi samples is
//! `G(z) = L_yx + (a1 z^-1 + a2 z^-2) / (1 - b1 z^-1 - b2 z^-2)`.
//!
//! The coefficients interpolate the exact cross admittance at three points:
//! steady state (imposing the transmittance identity
//! `A U = L_yx + (a1+a2)/(1-b1-b2)` exactly) and cyclic variations with
//! periods of 24 h and 1 h. A sampled recursion cannot be pinned at the
//! literal 1 h period (one-hour cycles alias to steady state on an hourly
//! grid), so frequencies map to the unit circle through the bilinear warp
//! `phase(w) = 2 atan(w dt / 2)`, which is the identity for slow cycles and
//! keeps every period distinct and resolvable. All frequency-domain
//! evaluations of the fitted model use the same map.

use num_complex::Complex64;

use super::transfer::admittances;
use super::WallError;
use crate::linalg::solve_in_place;
use crate::material::{Construction, EnvelopePart};
use crate::{OMEGA_1H, OMEGA_24H, STEP_SECONDS};

/// Discrete cross-transmission model of one envelope part.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseFactors {
    /// Instantaneous transmission conductance, W/K.
    pub l_yx: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    /// Time step the coefficients are valid for, s.
    pub dt: f64,
}

impl ResponseFactors {
    /// Massless model: constant conductance, no history.
    pub fn massless(l_yx: f64) -> Self {
        ResponseFactors { l_yx, a1: 0.0, a2: 0.0, b1: 0.0, b2: 0.0, dt: STEP_SECONDS }
    }

    /// Steady-state transmittance `L_yx + (a1+a2)/(1-b1-b2)`, W/K.
    pub fn u_identity(&self) -> f64 {
        self.l_yx + (self.a1 + self.a2) / (1.0 - self.b1 - self.b2)
    }

    /// Moduli of the two poles of `z^2 - b1 z - b2`.
    pub fn pole_moduli(&self) -> (f64, f64) {
        let disc = self.b1 * self.b1 + 4.0 * self.b2;
        if disc >= 0.0 {
            let s = disc.sqrt();
            (((self.b1 + s) / 2.0).abs(), ((self.b1 - s) / 2.0).abs())
        } else {
            // conjugate pair; |z|^2 = product of roots = -b2
            let m = (-self.b2).sqrt();
            (m, m)
        }
    }

    /// Transfer function value at a point on (or off) the unit circle.
    pub fn transfer_at(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        let zi2 = zi * zi;
        self.l_yx + (self.a1 * zi + self.a2 * zi2) / (1.0 - self.b1 * zi - self.b2 * zi2)
    }

    /// Transfer function at angular frequency `omega` through the warp map.
    pub fn transfer_at_omega(&self, omega: f64) -> Complex64 {
        self.transfer_at(Complex64::from_polar(1.0, discrete_phase(omega)))
    }
}

/// Frequency-to-phase map of the discrete model, rad.
pub fn discrete_phase(omega: f64) -> f64 {
    2.0 * (omega * STEP_SECONDS / 2.0).atan()
}

/// Rolling two-sample history of temperature difference and flux surplus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossFlowState {
    /// dT at tn-1 and tn-2, K.
    pub dt_hist: [f64; 2],
    /// dPhi at tn-1 and tn-2, W.
    pub dphi_hist: [f64; 2],
}

impl CrossFlowState {
    pub fn zero() -> Self {
        CrossFlowState { dt_hist: [0.0; 2], dphi_hist: [0.0; 2] }
    }

    /// History consistent with a steady temperature difference, so a
    /// simulation started from equilibrium stays there.
    pub fn steady(rf: &ResponseFactors, dt_ss: f64) -> Self {
        let denom = 1.0 - rf.b1 - rf.b2;
        let dphi_ss = if denom.abs() > 0.0 { (rf.a1 + rf.a2) / denom * dt_ss } else { 0.0 };
        CrossFlowState { dt_hist: [dt_ss; 2], dphi_hist: [dphi_ss; 2] }
    }

    /// The history-determined flux surplus dPhi(tn), W.
    pub fn delta_phi(&self, rf: &ResponseFactors) -> f64 {
        rf.a1 * self.dt_hist[0] + rf.a2 * self.dt_hist[1] + rf.b1 * self.dphi_hist[0]
            + rf.b2 * self.dphi_hist[1]
    }

    /// Shifts the history after a step with end-of-hour values.
    pub fn advance(&mut self, dt_n: f64, dphi_n: f64) {
        self.dt_hist = [dt_n, self.dt_hist[0]];
        self.dphi_hist = [dphi_n, self.dphi_hist[0]];
    }
}

/// One hourly step of the recursion: returns the transmission heat flow
/// `Phi_yx(tn)` for the temperature difference `dT_yx(tn)` and updates the
/// history.
pub fn cross_flow_step(rf: &ResponseFactors, state: &mut CrossFlowState, dt_n: f64) -> f64 {
    let dphi_n = state.delta_phi(rf);
    let phi = rf.l_yx * dt_n + dphi_n;
    state.advance(dt_n, dphi_n);
    phi
}

/// Fits the response factors of an envelope part.
///
/// Glazing is massless and bypasses the solve. Opaque parts are pinned at
/// steady state and at the two warped cycle frequencies; the cross-multiplied
/// constraints form one 5x5 real linear system in `(n0, n1, n2, b1, b2)`
/// with `G(z) = (n0 + n1 z^-1 + n2 z^-2)/(1 - b1 z^-1 - b2 z^-2)`, mapped
/// back to the recursion coefficients by `L = n0`, `a1 = n1 + n0 b1`,
/// `a2 = n2 + n0 b2`.
pub fn fit_response_factors(part: &EnvelopePart, h_e: f64) -> Result<ResponseFactors, WallError> {
    let au = part.area * part.u_value(h_e);
    if let Construction::Glazing { .. } = part.construction {
        return Ok(ResponseFactors::massless(au));
    }

    let y24 = admittances(part, h_e, OMEGA_24H).y_xy;
    let y1 = admittances(part, h_e, OMEGA_1H).y_xy;

    // frequency-independent spectrum (massless wall): zeroth-order model
    let au_c = Complex64::new(au, 0.0);
    if (y24 - au_c).norm() <= 1e-9 * au && (y1 - au_c).norm() <= 1e-9 * au {
        return Ok(ResponseFactors::massless(au));
    }

    // rows: [1, 1/z, 1/z^2, y/z, y/z^2] . x = y  with x = (n0,n1,n2,b1,b2)
    let mut a = [0.0f64; 25];
    let mut b = [0.0f64; 5];
    let mut row = 0usize;
    let push_point = |a: &mut [f64; 25], b: &mut [f64; 5], row: &mut usize, z: Complex64, y: Complex64| {
        let zi = z.inv();
        let zi2 = zi * zi;
        let coeffs = [Complex64::new(1.0, 0.0), zi, zi2, y * zi, y * zi2];
        for (c, v) in coeffs.iter().enumerate() {
            a[*row * 5 + c] = v.re;
        }
        b[*row] = y.re;
        *row += 1;
        if z.im.abs() > 0.0 {
            for (c, v) in coeffs.iter().enumerate() {
                a[*row * 5 + c] = v.im;
            }
            b[*row] = y.im;
            *row += 1;
        }
    };
    push_point(&mut a, &mut b, &mut row, Complex64::new(1.0, 0.0), au_c);
    push_point(&mut a, &mut b, &mut row, Complex64::from_polar(1.0, discrete_phase(OMEGA_24H)), y24);
    push_point(&mut a, &mut b, &mut row, Complex64::from_polar(1.0, discrete_phase(OMEGA_1H)), y1);
    debug_assert_eq!(row, 5);

    solve_in_place(&mut a, &mut b, 5)
        .map_err(|e| WallError::DegenerateSpectrum(e.to_string()))?;
    let [n0, n1, n2, b1, b2] = b;
    let rf = ResponseFactors {
        l_yx: n0,
        a1: n1 + n0 * b1,
        a2: n2 + n0 * b2,
        b1,
        b2,
        dt: STEP_SECONDS,
    };
    let (p1, p2) = rf.pole_moduli();
    if p1 >= 1.0 || p2 >= 1.0 {
        return Err(WallError::UnstablePoles(p1, p2));
    }
    Ok(rf)
}
