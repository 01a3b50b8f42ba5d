//! Property tests over randomized inputs, plus the zone energy-bookkeeping
//! invariant.

use num_complex::Complex64;
use proptest::prelude::*;

use thermbox::compare::compare_series;
use thermbox::config::{default_box_config, load_config_str, to_config_text};
use thermbox::material::{Layer, Material};
use thermbox::wall::{layer_matrix, TransferMatrix};
use thermbox::weather::{sol_air, SolAirParams};
use thermbox::zone::{zone_step, HourInputs, ZoneNetwork, ZoneState};

fn layer(k: f64, rho_c: f64, d: f64) -> Layer {
    Layer {
        material: Material {
            name: "m".into(),
            conductivity: k,
            density: rho_c / 800.0,
            specific_heat: 800.0,
        },
        thickness: d,
    }
}

proptest! {
    /// Reciprocity: the two-port determinant is 1 (relative to the product
    /// magnitude, which grows once the slab attenuates heavily).
    #[test]
    fn transfer_matrix_determinant_is_one(
        k in 0.04f64..2.5,
        rho_c in 3e4f64..2.5e6,
        d in 0.02f64..0.4,
        period_h in 1.0f64..48.0,
    ) {
        let omega = 2.0 * std::f64::consts::PI / (period_h * 3600.0);
        let m = layer_matrix(&layer(k, rho_c, d), omega);
        let scale = (m.m11 * m.m22).norm().max((m.m12 * m.m21).norm()).max(1.0);
        let dev = (m.determinant() - Complex64::new(1.0, 0.0)).norm() / scale;
        prop_assert!(dev < 1e-12, "det deviation {dev}");
    }

    /// Semigroup property: slabs of the same material compose by thickness.
    #[test]
    fn transfer_matrix_composition(
        k in 0.04f64..2.5,
        rho_c in 3e4f64..2.5e6,
        d1 in 0.02f64..0.2,
        d2 in 0.02f64..0.2,
        period_h in 1.0f64..48.0,
    ) {
        let omega = 2.0 * std::f64::consts::PI / (period_h * 3600.0);
        let a = layer_matrix(&layer(k, rho_c, d1), omega);
        let b = layer_matrix(&layer(k, rho_c, d2), omega);
        let ab = a.compose(&b);
        let whole = layer_matrix(&layer(k, rho_c, d1 + d2), omega);
        for (x, y) in [
            (ab.m11, whole.m11),
            (ab.m12, whole.m12),
            (ab.m21, whole.m21),
            (ab.m22, whole.m22),
        ] {
            prop_assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0), "{x} vs {y}");
        }
    }

    /// Identity composition leaves the matrix unchanged.
    #[test]
    fn resistance_zero_is_identity(
        k in 0.04f64..2.5,
        rho_c in 3e4f64..2.5e6,
        d in 0.02f64..0.4,
    ) {
        let omega = thermbox::OMEGA_24H;
        let m = layer_matrix(&layer(k, rho_c, d), omega);
        let composed = m.compose(&TransferMatrix::resistance(0.0));
        prop_assert_eq!(m, composed);
    }

    /// Configurations round-trip through the text format exactly.
    #[test]
    fn config_round_trip(
        edge in 0.5f64..5.0,
        rel_thick in 0.05f64..0.4,
        ach in 0.0f64..3.0,
        h_cv in 1.0f64..10.0,
        h_r in 1.0f64..10.0,
        h_e in 5.0f64..40.0,
        a_sol in 0.0f64..1.0,
        heat_sp in proptest::option::of(10.0f64..20.0),
    ) {
        let mut cfg = default_box_config();
        cfg.box_geom.outer_edge = edge;
        cfg.box_geom.wall_thickness = edge * rel_thick;
        cfg.box_geom.air_k_eq = cfg.box_geom.core_width() / 0.34;
        cfg.zone = thermbox::config::default_zone_for_box(&cfg.box_geom);
        cfg.zone.ach = ach;
        cfg.zone.surface_coeffs.h_cv = h_cv;
        cfg.zone.surface_coeffs.h_r = h_r;
        cfg.zone.surface_coeffs.h_e = h_e;
        for p in &mut cfg.zone.envelope {
            p.solar_absorptance = a_sol;
        }
        cfg.sim.heat_setpoint = heat_sp;
        let text = to_config_text(&cfg);
        let reparsed = load_config_str(&text).unwrap();
        prop_assert_eq!(cfg, reparsed);
    }

    /// Comparison metrics agree with a direct recomputation.
    #[test]
    fn metrics_match_naive_recomputation(
        vals in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..200),
        warmup in 0usize..50,
    ) {
        prop_assume!(warmup < vals.len());
        let a: Vec<(i64, f64)> = vals.iter().enumerate().map(|(h, v)| (h as i64, v.0)).collect();
        let b: Vec<(i64, f64)> = vals.iter().enumerate().map(|(h, v)| (h as i64, v.1)).collect();
        let m = compare_series(&a, &b, warmup).unwrap();
        let diffs: Vec<f64> = vals.iter().skip(warmup).map(|v| v.0 - v.1).collect();
        let n = diffs.len() as f64;
        let rmse = (diffs.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
        let mbe = diffs.iter().sum::<f64>() / n;
        let max = diffs.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        prop_assert!((m.rmse - rmse).abs() <= 1e-12 * rmse.max(1.0));
        prop_assert!((m.mbe - mbe).abs() <= 1e-12 * mbe.abs().max(1.0));
        prop_assert!((m.max_abs - max).abs() <= 1e-12 * max.max(1.0));
        prop_assert_eq!(m.n, diffs.len());
    }

    /// Sol-air exceeds dry-bulb whenever irradiance is non-negative and
    /// there is no sky deficit, and grows with irradiance.
    #[test]
    fn sol_air_monotone_in_irradiance(
        t_e in -20.0f64..40.0,
        i1 in 0.0f64..1000.0,
        i2 in 0.0f64..1000.0,
        a_sol in 0.01f64..1.0,
        h_e in 5.0f64..40.0,
    ) {
        let p = SolAirParams { a_sol, h_e, emissivity: 0.9, delta_r: 0.0 };
        let (lo, hi) = if i1 <= i2 { (i1, i2) } else { (i2, i1) };
        prop_assert!(sol_air(t_e, lo, &p) >= t_e);
        prop_assert!(sol_air(t_e, hi, &p) >= sol_air(t_e, lo, &p));
    }
}

/// Over any window of the periodic steady regime, the stored-energy change
/// equals the integrated boundary flows. The network equations are
/// integrated at 1 s resolution to evaluate the flow integral, starting
/// from the exact stepper's periodic state.
#[test]
fn zone_energy_bookkeeping_closes() {
    let cfg = default_box_config();
    let net = ZoneNetwork::build(&cfg.zone).unwrap();
    let n_ext = net.external_count();

    let signal = |h: usize| -> f64 {
        10.0 - 5.0 * (2.0 * std::f64::consts::PI * h as f64 / 24.0).cos()
    };
    // reach the periodic regime with the exact stepper
    let mut state = ZoneState::init(&net, signal(0), &vec![signal(0); n_ext]);
    for h in 0..30 * 24 {
        let ty = vec![signal(h); n_ext];
        zone_step(&net, &mut state, &HourInputs { t_b: signal(h), t_y: &ty, phi_r: 0.0, phi_cv: 0.0 })
            .unwrap();
    }

    // one more day: integrate flows at 1 s alongside the analytic state
    let l_xa = net.l_xa;
    let c_a = net.c_a;
    let (br1, br2) = (net.branches.branches[0], net.branches.branches[1]);
    let rf: Vec<_> = net.parts.iter().map(|p| p.rf.clone()).collect();
    let d_x: f64 = l_xa + rf.iter().map(|r| r.l_yx).sum::<f64>() + br1.conductance + br2.conductance;

    let mut u = [state.t_a, state.t_c[0], state.t_c[1]];
    let mut hist = state.cross.clone();
    let energy = |u: &[f64; 3]| c_a * u[0] + br1.capacitance * u[1] + br2.capacitance * u[2];
    let e_start = energy(&u);
    let mut flow_integral = 0.0;
    let mut throughput = 0.0;
    for h in 30 * 24..31 * 24 {
        let t_y = signal(h);
        let dphi: Vec<f64> = hist.iter().zip(rf.iter()).map(|(st, r)| st.delta_phi(r)).collect();
        let s: f64 = rf.iter().zip(dphi.iter()).map(|(r, dp)| r.l_yx * t_y + dp).sum();
        let deriv = |u: &[f64; 3]| -> [f64; 3] {
            let t_x = (l_xa * u[0] + br1.conductance * u[1] + br2.conductance * u[2] + s) / d_x;
            [
                l_xa * (t_x - u[0]) / c_a,
                br1.conductance * (t_x - u[1]) / br1.capacitance,
                br2.conductance * (t_x - u[2]) / br2.capacitance,
            ]
        };
        let boundary_flow = |u: &[f64; 3]| -> f64 {
            let t_x = (l_xa * u[0] + br1.conductance * u[1] + br2.conductance * u[2] + s) / d_x;
            rf.iter()
                .zip(dphi.iter())
                .map(|(r, dp)| r.l_yx * (t_y - t_x) + dp)
                .sum::<f64>()
        };
        let dt = 1.0;
        for _ in 0..3600 {
            // Simpson-style quadrature of the flow across the RK4 substeps
            let f0 = boundary_flow(&u);
            let k1 = deriv(&u);
            let mid = [
                u[0] + 0.5 * dt * k1[0],
                u[1] + 0.5 * dt * k1[1],
                u[2] + 0.5 * dt * k1[2],
            ];
            let k2 = deriv(&mid);
            let mid2 = [
                u[0] + 0.5 * dt * k2[0],
                u[1] + 0.5 * dt * k2[1],
                u[2] + 0.5 * dt * k2[2],
            ];
            let k3 = deriv(&mid2);
            let end = [u[0] + dt * k3[0], u[1] + dt * k3[1], u[2] + dt * k3[2]];
            let k4 = deriv(&end);
            let fm = boundary_flow(&mid2);
            for i in 0..3 {
                u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let f1 = boundary_flow(&u);
            let df = dt / 6.0 * (f0 + 4.0 * fm + f1);
            flow_integral += df;
            throughput += df.abs();
        }
        let t_x_end = (l_xa * u[0] + br1.conductance * u[1] + br2.conductance * u[2] + s) / d_x;
        for (st, dp) in hist.iter_mut().zip(dphi.iter()) {
            st.advance(t_y - t_x_end, *dp);
        }
    }
    let de = energy(&u) - e_start;
    let rel = (de - flow_integral).abs() / throughput.max(1.0);
    assert!(
        rel < 1e-6,
        "stored {de:.6} J vs integrated flows {flow_integral:.6} J (rel {rel:.2e})"
    );
}
