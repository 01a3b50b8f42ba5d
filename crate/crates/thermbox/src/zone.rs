//! One-zone thermal network and its hourly integration.
//!
//! Nodes: air temperature `T_a` (capacity `C_a`), massless combined
//! air/radiant node `T_x`, and two branch capacitor temperatures. `T_x`
//! couples to the air node through `L_xa`, to each external envelope part
//! through its response-factor conductance `L_yx` (with the history term
//! `dPhi` acting as a source), and to the storage branches. Ventilation
//! `L_v` and the convective gain act on the air node, the radiant gain on
//! the x node.
//!
//! Within an hour the inputs are held constant, `T_x` is eliminated
//! algebraically, and the remaining linear 3-state system is advanced by its
//! exact matrix-exponential discretization. Cross-flow histories update once
//! per hour with end-of-hour values.

use thiserror::Error;

use crate::config::ZoneConfig;
use crate::linalg::expm;
use crate::material::{Boundary, Construction, EnvelopePart, HeatGain};
use crate::wall::{
    admittances, fit_branch_network, fit_response_factors, BranchNetwork, CrossFlowState,
    ResponseFactors, WallError,
};
use crate::{OMEGA_1H, OMEGA_24H, STEP_SECONDS};

#[derive(Debug, Error)]
pub enum ZoneError {
    #[error("wall model: {0}")]
    Wall(#[from] WallError),
    #[error("isolated x-node: no conductance attached")]
    IsolatedXNode,
    #[error("input series `{name}` covers {got} hours, expected {expected}")]
    MissingHours {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("heat setpoint {heat} above cool setpoint {cool}")]
    SetpointOrder { heat: f64, cool: f64 },
}

/// Coupling coefficient between the air node and the combined node:
/// `L_xa = A_t h_cv (1 + h_cv / h_r)`, W/K.
pub fn coupling_coefficient(a_t: f64, h_cv: f64, h_r: f64) -> f64 {
    a_t * h_cv * (1.0 + h_cv / h_r)
}

/// An envelope part with its fitted cross-transmission model.
#[derive(Debug, Clone)]
pub struct ZonePart {
    pub part: EnvelopePart,
    pub rf: ResponseFactors,
    /// Adiabatic parts carry no cross flow.
    pub external: bool,
}

/// Ideal heater/cooler holding the air temperature inside a deadband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetpointControl {
    pub heat_setpoint: Option<f64>,
    pub cool_setpoint: Option<f64>,
}

/// Assembled time-invariant zone network with its precomputed exact
/// hourly discretization.
#[derive(Debug, Clone)]
pub struct ZoneNetwork {
    pub l_xa: f64,
    pub l_v: f64,
    pub c_a: f64,
    pub branches: BranchNetwork,
    pub parts: Vec<ZonePart>,
    pub control: Option<SetpointControl>,
    /// Total conductance attached to the x node, W/K.
    d_x: f64,
    /// Effective branch conductances (zero for empty branches), W/K.
    l_b: [f64; 2],
    /// exp(A dt) for the 3-state system.
    e_mat: [f64; 9],
    /// Integral of exp(A s) ds over one step.
    phi_mat: [f64; 9],
}

impl ZoneNetwork {
    /// Builds the network from a zone configuration: fits response factors
    /// per part, aggregates storage admittances and fits the two-branch
    /// network, then precomputes the exact step operator.
    pub fn build(cfg: &ZoneConfig) -> Result<Self, ZoneError> {
        let h_e = cfg.surface_coeffs.h_e;
        let mut parts = Vec::with_capacity(cfg.envelope.len());
        for p in &cfg.envelope {
            let rf = fit_response_factors(p, h_e)?;
            parts.push(ZonePart {
                external: p.boundary == Boundary::External,
                part: p.clone(),
                rf,
            });
        }
        // aggregated interior storage: sum of the surplus admittances of all
        // opaque parts (glazing is massless and contributes nothing)
        let mut y24 = num_complex::Complex64::new(0.0, 0.0);
        let mut y1 = num_complex::Complex64::new(0.0, 0.0);
        for p in &cfg.envelope {
            if let Construction::Wall(_) = p.construction {
                y24 += admittances(p, h_e, OMEGA_24H).y_x;
                y1 += admittances(p, h_e, OMEGA_1H).y_x;
            }
        }
        let branches = fit_branch_network(y24, y1)?;
        let l_xa = coupling_coefficient(
            cfg.total_surface_area,
            cfg.surface_coeffs.h_cv,
            cfg.surface_coeffs.h_r,
        );
        let (l_v, c_a) = cfg.derived_quantities();
        Self::assemble(l_xa, l_v, c_a, branches, parts, None)
    }

    pub fn with_control(mut self, control: SetpointControl) -> Result<Self, ZoneError> {
        if let (Some(h), Some(c)) = (control.heat_setpoint, control.cool_setpoint) {
            if h > c {
                return Err(ZoneError::SetpointOrder { heat: h, cool: c });
            }
        }
        self.control = Some(control);
        Ok(self)
    }

    /// Assembles a network from already-fitted pieces (used directly by
    /// tests exercising degenerate topologies).
    pub fn assemble(
        l_xa: f64,
        l_v: f64,
        c_a: f64,
        branches: BranchNetwork,
        parts: Vec<ZonePart>,
        control: Option<SetpointControl>,
    ) -> Result<Self, ZoneError> {
        // a branch only participates if it can store and conduct
        let l_b = [
            if branches.branches[0].capacitance > 0.0 { branches.branches[0].conductance } else { 0.0 },
            if branches.branches[1].capacitance > 0.0 { branches.branches[1].conductance } else { 0.0 },
        ];
        let l_trans: f64 = parts.iter().filter(|p| p.external).map(|p| p.rf.l_yx).sum();
        let d_x = l_xa + l_trans + l_b[0] + l_b[1];
        if d_x <= 0.0 {
            return Err(ZoneError::IsolatedXNode);
        }

        // state u = [T_a, T_c1, T_c2]; du/dt = A u + forcing
        let cb = [branches.branches[0].capacitance, branches.branches[1].capacitance];
        let mut a = [0.0f64; 9];
        a[0] = (l_xa * (l_xa / d_x - 1.0) - l_v) / c_a;
        a[1] = l_xa * l_b[0] / (d_x * c_a);
        a[2] = l_xa * l_b[1] / (d_x * c_a);
        for i in 0..2 {
            if l_b[i] == 0.0 {
                continue;
            }
            let row = 3 * (i + 1);
            a[row] = l_b[i] * l_xa / (d_x * cb[i]);
            a[row + 1] = l_b[i] * (l_b[0] / d_x - if i == 0 { 1.0 } else { 0.0 }) / cb[i];
            a[row + 2] = l_b[i] * (l_b[1] / d_x - if i == 1 { 1.0 } else { 0.0 }) / cb[i];
        }

        // augmented exponential gives exp(A dt) and Int exp(A s) ds at once;
        // the corner identity stays unscaled so it does not inflate the norm,
        // making the extracted integral block Int/dt
        let mut m = [0.0f64; 36];
        for r in 0..3 {
            for c in 0..3 {
                m[r * 6 + c] = a[r * 3 + c] * STEP_SECONDS;
            }
            m[r * 6 + 3 + r] = 1.0;
        }
        let em = expm(&m, 6);
        let mut e_mat = [0.0f64; 9];
        let mut phi_mat = [0.0f64; 9];
        for r in 0..3 {
            for c in 0..3 {
                e_mat[r * 3 + c] = em[r * 6 + c];
                phi_mat[r * 3 + c] = em[r * 6 + 3 + c] * STEP_SECONDS;
            }
        }
        Ok(ZoneNetwork {
            l_xa,
            l_v,
            c_a,
            branches,
            parts,
            control,
            d_x,
            l_b,
            e_mat,
            phi_mat,
        })
    }

    /// Number of external parts, in envelope order.
    pub fn external_count(&self) -> usize {
        self.parts.iter().filter(|p| p.external).count()
    }

    /// Instantaneous x-node balance given node temperatures and the lumped
    /// source term `s = sum(L_yx T_y + dPhi) + Phi_r`.
    pub fn solve_x_node(&self, t_a: f64, t_c: [f64; 2], s: f64) -> Result<f64, ZoneError> {
        if self.d_x <= 0.0 {
            return Err(ZoneError::IsolatedXNode);
        }
        Ok((self.l_xa * t_a + self.l_b[0] * t_c[0] + self.l_b[1] * t_c[1] + s) / self.d_x)
    }
}

/// Evolving state of the zone.
#[derive(Debug, Clone)]
pub struct ZoneState {
    pub t_a: f64,
    pub t_c: [f64; 2],
    /// One history per external part, in envelope order.
    pub cross: Vec<CrossFlowState>,
    /// Hours advanced since the initial state.
    pub hour: usize,
}

impl ZoneState {
    /// All nodes at `t0`; cross-flow histories at the steady state
    /// consistent with the first-hour sol-air temperatures, so a simulation
    /// started in equilibrium stays there.
    pub fn init(net: &ZoneNetwork, t0: f64, first_ty: &[f64]) -> Self {
        let cross = net
            .parts
            .iter()
            .filter(|p| p.external)
            .enumerate()
            .map(|(k, p)| {
                let dt_ss = first_ty.get(k).copied().unwrap_or(t0) - t0;
                CrossFlowState::steady(&p.rf, dt_ss)
            })
            .collect();
        ZoneState { t_a: t0, t_c: [t0, t0], cross, hour: 0 }
    }
}

/// Driving data for one hour.
#[derive(Debug, Clone)]
pub struct HourInputs<'a> {
    /// Ventilation inlet (outdoor air) temperature, degC.
    pub t_b: f64,
    /// Sol-air temperature per external part, envelope order.
    pub t_y: &'a [f64],
    /// Radiant heat injected at the x node, W.
    pub phi_r: f64,
    /// Convective heat injected at the air node, W.
    pub phi_cv: f64,
}

/// Outputs of one hourly step (end-of-hour values).
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub t_a: f64,
    pub t_x: f64,
    pub t_c: [f64; 2],
    /// Ventilation heat flow into the zone, W.
    pub phi_vent: f64,
    /// Per external part transmission flow into the x node, W.
    pub phi_yx: Vec<f64>,
    /// Heating (positive) or cooling (negative) power, W, when control is on.
    pub p_heat: Option<f64>,
}

/// Advances the zone by one hour. The x node is eliminated algebraically;
/// the 3-state system moves by its exact discretization; histories shift
/// with end-of-hour values. Adiabatic parts contribute no cross flow.
pub fn zone_step(
    net: &ZoneNetwork,
    state: &mut ZoneState,
    inputs: &HourInputs,
) -> Result<StepOutput, ZoneError> {
    let ext: Vec<&ZonePart> = net.parts.iter().filter(|p| p.external).collect();
    debug_assert_eq!(ext.len(), inputs.t_y.len());
    debug_assert_eq!(ext.len(), state.cross.len());

    // history-determined flux surpluses for this hour
    let dphi: Vec<f64> = ext
        .iter()
        .zip(state.cross.iter())
        .map(|(p, st)| st.delta_phi(&p.rf))
        .collect();
    let s: f64 = ext
        .iter()
        .zip(dphi.iter())
        .zip(inputs.t_y.iter())
        .map(|((p, dp), ty)| p.rf.l_yx * ty + dp)
        .sum::<f64>()
        + inputs.phi_r;

    let forcing = |p_plant: f64| -> [f64; 3] {
        let mut c = [0.0f64; 3];
        c[0] = (net.l_xa * s / net.d_x + net.l_v * inputs.t_b + inputs.phi_cv + p_plant) / net.c_a;
        for i in 0..2 {
            let cap = net.branches.branches[i].capacitance;
            if net.l_b[i] > 0.0 && cap > 0.0 {
                c[i + 1] = net.l_b[i] * s / (net.d_x * cap);
            }
        }
        c
    };
    let advance = |u: &[f64; 3], c: &[f64; 3]| -> [f64; 3] {
        let mut out = [0.0f64; 3];
        for r in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += net.e_mat[r * 3 + k] * u[k] + net.phi_mat[r * 3 + k] * c[k];
            }
            out[r] = acc;
        }
        out
    };

    let u0 = [state.t_a, state.t_c[0], state.t_c[1]];
    let mut u1 = advance(&u0, &forcing(0.0));
    let mut p_heat = None;
    if let Some(ctrl) = &net.control {
        // end-of-hour sensitivity of T_a to a constant plant power
        let kappa = net.phi_mat[0] / net.c_a;
        let mut p = 0.0;
        if let Some(hs) = ctrl.heat_setpoint {
            if u1[0] < hs {
                p = (hs - u1[0]) / kappa;
            }
        }
        if let Some(cs) = ctrl.cool_setpoint {
            if u1[0] > cs {
                p = (cs - u1[0]) / kappa;
            }
        }
        if p != 0.0 {
            u1 = advance(&u0, &forcing(p));
        }
        p_heat = Some(p);
    }

    let t_x = net.solve_x_node(u1[0], [u1[1], u1[2]], s)?;

    let mut phi_yx = Vec::with_capacity(ext.len());
    for ((p, st), (dp, ty)) in ext
        .iter()
        .zip(state.cross.iter_mut())
        .zip(dphi.iter().zip(inputs.t_y.iter()))
    {
        let dt_n = ty - t_x;
        phi_yx.push(p.rf.l_yx * dt_n + dp);
        st.advance(dt_n, *dp);
    }

    state.t_a = u1[0];
    state.t_c = [u1[1], u1[2]];
    state.hour += 1;

    Ok(StepOutput {
        t_a: u1[0],
        t_x,
        t_c: [u1[1], u1[2]],
        phi_vent: net.l_v * (inputs.t_b - u1[0]),
        phi_yx,
        p_heat,
    })
}

/// Hourly driving series for a whole run.
#[derive(Debug, Clone, Default)]
pub struct ZoneInputs {
    /// Outdoor air temperature per hour, degC.
    pub t_b: Vec<f64>,
    /// Sol-air series per external part (envelope order), each one value
    /// per hour.
    pub t_y: Vec<Vec<f64>>,
    pub gains: Vec<HeatGain>,
}

impl ZoneInputs {
    pub fn hours(&self) -> usize {
        self.t_b.len()
    }

    fn check(&self, net: &ZoneNetwork) -> Result<(), ZoneError> {
        let n = self.t_b.len();
        if self.t_y.len() != net.external_count() {
            return Err(ZoneError::MissingHours {
                name: "t_y (series per external part)".into(),
                got: self.t_y.len(),
                expected: net.external_count(),
            });
        }
        for (i, ty) in self.t_y.iter().enumerate() {
            if ty.len() != n {
                return Err(ZoneError::MissingHours {
                    name: format!("t_y[{i}]"),
                    got: ty.len(),
                    expected: n,
                });
            }
        }
        for (i, g) in self.gains.iter().enumerate() {
            if g.series.len() != n {
                return Err(ZoneError::MissingHours {
                    name: format!("gains[{i}]"),
                    got: g.series.len(),
                    expected: n,
                });
            }
        }
        Ok(())
    }
}

/// One output record per simulated hour; `hour` is the 0-based input index
/// and the values are end-of-hour.
#[derive(Debug, Clone)]
pub struct ZoneRecord {
    pub hour: usize,
    pub t_a: f64,
    pub t_x: f64,
    pub t_c: [f64; 2],
    pub phi_vent: f64,
    pub phi_trans_total: f64,
    pub p_heat: Option<f64>,
}

/// Runs the zone over the whole input series. `initial` defaults to the
/// first-hour outdoor temperature; `discard` drops that many leading records
/// from the output (they are still simulated).
pub fn simulate_zone(
    net: &ZoneNetwork,
    initial: Option<f64>,
    inputs: &ZoneInputs,
    discard: usize,
) -> Result<Vec<ZoneRecord>, ZoneError> {
    inputs.check(net)?;
    let n = inputs.hours();
    if n == 0 {
        return Err(ZoneError::MissingHours { name: "t_b".into(), got: 0, expected: 1 });
    }
    let t0 = initial.unwrap_or(inputs.t_b[0]);
    let first_ty: Vec<f64> = inputs.t_y.iter().map(|s| s[0]).collect();
    let mut state = ZoneState::init(net, t0, &first_ty);
    let mut out = Vec::with_capacity(n.saturating_sub(discard));
    let mut ty_hour = vec![0.0f64; inputs.t_y.len()];
    for h in 0..n {
        for (k, series) in inputs.t_y.iter().enumerate() {
            ty_hour[k] = series[h];
        }
        let mut phi_r = 0.0;
        let mut phi_cv = 0.0;
        for g in &inputs.gains {
            let v = g.series[h];
            phi_cv += g.convection_factor * v;
            phi_r += (1.0 - g.convection_factor) * v;
        }
        let step = zone_step(
            net,
            &mut state,
            &HourInputs { t_b: inputs.t_b[h], t_y: &ty_hour, phi_r, phi_cv },
        )?;
        if h >= discard {
            out.push(ZoneRecord {
                hour: h,
                t_a: step.t_a,
                t_x: step.t_x,
                t_c: step.t_c,
                phi_vent: step.phi_vent,
                phi_trans_total: step.phi_yx.iter().sum(),
                p_heat: step.p_heat,
            });
        }
    }
    Ok(out)
}

/// Formats a value with six significant digits.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if mag > 5 {
        return format!("{v:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Writes the output CSV: `hour,T_a,T_x,T_c1,T_c2,phi_vent,phi_trans_total`
/// plus `P_heat` when control was active.
pub fn records_to_csv(records: &[ZoneRecord]) -> String {
    let with_plant = records.iter().any(|r| r.p_heat.is_some());
    let mut s = String::from("hour,T_a,T_x,T_c1,T_c2,phi_vent,phi_trans_total");
    if with_plant {
        s.push_str(",P_heat");
    }
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}",
            r.hour,
            sig6(r.t_a),
            sig6(r.t_x),
            sig6(r.t_c[0]),
            sig6(r.t_c[1]),
            sig6(r.phi_vent),
            sig6(r.phi_trans_total),
        ));
        if with_plant {
            s.push(',');
            s.push_str(&sig6(r.p_heat.unwrap_or(0.0)));
        }
        s.push('\n');
    }
    s
}
