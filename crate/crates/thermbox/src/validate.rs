//! Built-in property suite: fast cross-module checks runnable from the CLI,
//! with optional per-wall admittance/fit dumps.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::config::default_box_config;
use crate::fem;
use crate::material::{
    Boundary, Construction, EnvelopePart, Layer, Material, Orientation, WallConstruction,
};
use crate::wall::{
    admittances, cross_flow_step, discrete_phase, fit_branch_network, fit_response_factors,
    layer_matrix, wall_matrix, Branch, BranchNetwork, CrossFlowState, WallError,
};
use crate::weather::{solar_position, sol_air, SiteInfo, SolAirParams};
use crate::zone::{coupling_coefficient, simulate_zone, ZoneInputs, ZoneNetwork};
use crate::{OMEGA_1H, OMEGA_24H};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    /// Test hook: relative perturbation injected into the transmittance
    /// identity check; any non-zero value must make that check fail.
    pub perturb_u_identity: f64,
}

fn mat(name: &str, k: f64, rho: f64, c: f64) -> Material {
    Material { name: name.into(), conductivity: k, density: rho, specific_heat: c }
}

fn wall_part(name: &str, layers: Vec<(Material, f64)>) -> (String, EnvelopePart) {
    let layers = layers
        .into_iter()
        .map(|(m, d)| Layer { material: m, thickness: d })
        .collect();
    (
        name.to_string(),
        EnvelopePart {
            id: name.to_string(),
            area: 1.44,
            construction: Construction::Wall(WallConstruction { layers }),
            orientation: Orientation { tilt_deg: 90.0, azimuth_deg: 180.0 },
            boundary: Boundary::External,
            solar_absorptance: 0.6,
        },
    )
}

fn concrete() -> Material {
    mat("concrete", 2.0, 2400.0, 840.0)
}
fn stone() -> Material {
    mat("stone", 2.5, 2600.0, 850.0)
}
fn brick() -> Material {
    mat("brick", 0.8, 1800.0, 900.0)
}
fn wood() -> Material {
    mat("wood", 0.15, 550.0, 1600.0)
}
fn gypsum() -> Material {
    mat("gypsum", 0.25, 900.0, 1000.0)
}
fn insulation() -> Material {
    mat("insulation", 0.04, 30.0, 1400.0)
}

/// Walls whose midband transmission is within reach of the second-order
/// surrogate; the 5% interpolation property is asserted on these.
pub fn default_corpus() -> Vec<(String, EnvelopePart)> {
    vec![
        wall_part("concrete_0.08", vec![(concrete(), 0.08)]),
        wall_part("concrete_0.10", vec![(concrete(), 0.10)]),
        wall_part("concrete_0.12", vec![(concrete(), 0.12)]),
        wall_part("stone_0.10", vec![(stone(), 0.10)]),
        wall_part("brick_0.05", vec![(brick(), 0.05)]),
        wall_part("insulation_0.05", vec![(insulation(), 0.05)]),
        wall_part("insulation_0.10", vec![(insulation(), 0.10)]),
        wall_part("wood_0.05", vec![(wood(), 0.05)]),
        wall_part("gypsum_0.05", vec![(gypsum(), 0.05)]),
        wall_part("gypsum_concrete", vec![(gypsum(), 0.012), (concrete(), 0.10)]),
    ]
}

/// Wide corpus spanning thickness 0.05-0.4 m and conductivity 0.04-2.5
/// W/(m K) with 1-3 layers; every member must fit with stable poles.
pub fn stability_corpus() -> Vec<(String, EnvelopePart)> {
    let mut out = Vec::new();
    for d in [0.05, 0.1, 0.2, 0.3, 0.4] {
        out.push(wall_part(&format!("concrete_{d}"), vec![(concrete(), d)]));
        out.push(wall_part(&format!("insulation_{d}"), vec![(insulation(), d)]));
        out.push(wall_part(&format!("brick_{d}"), vec![(brick(), d)]));
    }
    for d in [0.05, 0.1, 0.2, 0.4] {
        out.push(wall_part(&format!("stone_{d}"), vec![(stone(), d)]));
    }
    for d in [0.05, 0.1, 0.2] {
        out.push(wall_part(&format!("wood_{d}"), vec![(wood(), d)]));
        out.push(wall_part(&format!("gypsum_{d}"), vec![(gypsum(), d)]));
    }
    out.push(wall_part("gypsum_concrete", vec![(gypsum(), 0.012), (concrete(), 0.15)]));
    out.push(wall_part("concrete_insulation", vec![(concrete(), 0.1), (insulation(), 0.1)]));
    out.push(wall_part(
        "gypsum_insulation_brick",
        vec![(gypsum(), 0.012), (insulation(), 0.08), (brick(), 0.1)],
    ));
    out.push(wall_part(
        "wood_sandwich",
        vec![(wood(), 0.02), (insulation(), 0.2), (wood(), 0.02)],
    ));
    out.push(wall_part("stone_concrete_0.4", vec![(stone(), 0.05), (concrete(), 0.35)]));
    out
}

/// A wall whose 1 h transmission is attenuated by ~13 orders of magnitude;
/// the second-order fit is expected to reject it with unstable poles.
pub fn pathological_part() -> EnvelopePart {
    wall_part("wood_0.4_pathological", vec![(wood(), 0.4)]).1
}

const H_E: f64 = 25.0;

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name: name.into(), passed, detail }
}

fn periods_h() -> Vec<f64> {
    vec![1.0, 2.0, 3.0, 6.0, 12.0, 24.0]
}

pub fn run_validation(opts: &ValidateOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();

    // two-port determinant: |det - 1| relative to the product magnitude,
    // since the identity cancels catastrophically once cosh(gamma d)
    // overflows ten digits
    {
        let mut worst = 0.0f64;
        for (_, part) in stability_corpus() {
            if let Construction::Wall(w) = &part.construction {
                for p in periods_h() {
                    let m = wall_matrix(w, 2.0 * PI / (p * 3600.0));
                    let scale = (m.m11 * m.m22).norm().max((m.m12 * m.m21).norm()).max(1.0);
                    let dev = (m.determinant() - Complex64::new(1.0, 0.0)).norm() / scale;
                    worst = worst.max(dev);
                }
            }
        }
        out.push(check(
            "transfer-determinant",
            worst < 1e-10,
            format!("max scaled |det-1| = {worst:.2e} (limit 1e-10)"),
        ));
    }

    // composition semigroup property
    {
        let layer = |d: f64| Layer { material: concrete(), thickness: d };
        let omega = OMEGA_24H;
        let full = layer_matrix(&layer(0.12), omega);
        let halves = layer_matrix(&layer(0.06), omega).compose(&layer_matrix(&layer(0.06), omega));
        let dev = [
            (full.m11 - halves.m11).norm(),
            (full.m12 - halves.m12).norm(),
            (full.m21 - halves.m21).norm(),
            (full.m22 - halves.m22).norm(),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        out.push(check(
            "transfer-composition",
            dev < 1e-12 * full.m21.norm().max(1.0),
            format!("max entry deviation {dev:.2e}"),
        ));
    }

    // low-frequency admittance limits
    {
        let mut worst = 0.0f64;
        for (_, part) in default_corpus() {
            let au = part.area * part.u_value(H_E);
            let a = admittances(&part, H_E, 1e-11);
            worst = worst.max((a.y_xy - au).norm() / au).max(a.y_x.norm() / au);
        }
        out.push(check(
            "admittance-limits",
            worst < 1e-6,
            format!("max relative deviation at w=1e-11: {worst:.2e}"),
        ));
    }

    // storage admittance phase within [0, 90] degrees
    {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (_, part) in stability_corpus() {
            if let Construction::Wall(w) = &part.construction {
                if w.layers.len() != 1 {
                    continue;
                }
                for p in periods_h() {
                    let ph = admittances(&part, H_E, 2.0 * PI / (p * 3600.0))
                        .y_x
                        .arg()
                        .to_degrees();
                    lo = lo.min(ph);
                    hi = hi.max(ph);
                }
            }
        }
        out.push(check(
            "storage-phase-bounds",
            lo >= -1e-9 && hi <= 90.0 + 1e-9,
            format!("observed phase range [{lo:.3}, {hi:.3}] deg"),
        ));
    }

    // transmittance identity (with the perturbation hook)
    {
        let mut worst = 0.0f64;
        for (_, part) in stability_corpus() {
            let rf = match fit_response_factors(&part, H_E) {
                Ok(rf) => rf,
                Err(e) => {
                    out.push(check("u-identity", false, format!("fit failed: {e}")));
                    return out;
                }
            };
            let au = part.area * part.u_value(H_E);
            let l_eff = rf.l_yx * (1.0 + opts.perturb_u_identity);
            let ident = l_eff + (rf.a1 + rf.a2) / (1.0 - rf.b1 - rf.b2);
            worst = worst.max((ident - au).abs() / au);
        }
        out.push(check(
            "u-identity",
            worst <= 1e-10,
            format!("max |A U - identity| / A U = {worst:.2e} (limit 1e-10)"),
        ));
    }

    // pinned-frequency reproduction
    {
        let mut worst = 0.0f64;
        for (_, part) in stability_corpus() {
            let rf = fit_response_factors(&part, H_E).expect("stable corpus");
            for omega in [OMEGA_24H, OMEGA_1H] {
                let y = admittances(&part, H_E, omega).y_xy;
                let g = rf.transfer_at_omega(omega);
                worst = worst.max((g - y).norm() / y.norm());
            }
        }
        out.push(check(
            "fit-pinned-frequencies",
            worst <= 1e-8,
            format!("max relative deviation {worst:.2e} (limit 1e-8)"),
        ));
    }

    // midband interpolation quality on the default corpus
    {
        let mut worst = 0.0f64;
        let mut worst_name = String::new();
        for (name, part) in default_corpus() {
            let rf = fit_response_factors(&part, H_E).expect("default corpus");
            for p in [3.0, 6.0, 12.0] {
                let omega = 2.0 * PI / (p * 3600.0);
                let y = admittances(&part, H_E, omega).y_xy;
                let g = rf.transfer_at_omega(omega);
                let e = (g - y).norm() / y.norm();
                if e > worst {
                    worst = e;
                    worst_name = format!("{name} @ {p} h");
                }
            }
        }
        out.push(check(
            "fit-interpolation-5pct",
            worst <= 0.05,
            format!("max relative deviation {:.2}% at {} (limit 5%)", worst * 100.0, worst_name),
        ));
    }

    // pole stability across the wide corpus
    {
        let mut worst = 0.0f64;
        let mut failed = None;
        for (name, part) in stability_corpus() {
            match fit_response_factors(&part, H_E) {
                Ok(rf) => {
                    let (p1, p2) = rf.pole_moduli();
                    worst = worst.max(p1).max(p2);
                }
                Err(e) => failed = Some(format!("{name}: {e}")),
            }
        }
        out.push(check(
            "pole-stability",
            failed.is_none() && worst < 1.0,
            failed.unwrap_or(format!("max pole modulus {worst:.4}")),
        ));
    }

    // the pathological deep-attenuation wall must be rejected, not mis-fit
    {
        let res = fit_response_factors(&pathological_part(), H_E);
        let ok = matches!(res, Err(WallError::UnstablePoles(_, _)));
        out.push(check(
            "unstable-pole-detection",
            ok,
            format!("deep wall fit -> {res:?}"),
        ));
    }

    // branch network round trip
    {
        let generator = BranchNetwork {
            branches: [
                Branch { conductance: 10.0, capacitance: 1e6 },
                Branch { conductance: 40.0, capacitance: 5e4 },
            ],
        };
        let fit = fit_branch_network(
            generator.admittance(OMEGA_24H),
            generator.admittance(OMEGA_1H),
        );
        let ok = match &fit {
            Ok(n) => n
                .branches
                .iter()
                .zip(generator.branches.iter())
                .all(|(f, g)| {
                    (f.conductance - g.conductance).abs() <= 1e-6 * g.conductance
                        && (f.capacitance - g.capacitance).abs() <= 1e-6 * g.capacitance
                }),
            Err(_) => false,
        };
        out.push(check("branch-round-trip", ok, format!("{fit:?}")));
    }

    // branch DC block
    {
        let zero = fit_branch_network(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let unit = BranchNetwork {
            branches: [
                Branch { conductance: 1.0, capacitance: 1.0 },
                Branch { conductance: 2.0, capacitance: 0.5 },
            ],
        };
        let z = zero.admittance(1e-9).norm();
        let u = unit.admittance(1e-9).norm();
        out.push(check(
            "branch-dc-block",
            z == 0.0 && u < 1e-6,
            format!("zero net {z:.2e}, unit net {u:.2e} at w=1e-9"),
        ));
    }

    // massless and glazing paths
    {
        let (_, mut p) = wall_part("film", vec![(mat("film", 0.5, 1e-6, 1e-3), 0.05)]);
        p.area = 2.0;
        let rf = fit_response_factors(&p, H_E).unwrap();
        let au = p.area * p.u_value(H_E);
        let massless_ok = (rf.l_yx - au).abs() < 1e-9 * au && rf.a1 == 0.0 && rf.b1 == 0.0;

        let g = EnvelopePart {
            construction: Construction::Glazing { u_glazing: 2.8 },
            ..p.clone()
        };
        let rfg = fit_response_factors(&g, H_E).unwrap();
        let mut st = CrossFlowState::zero();
        let phi = cross_flow_step(&rfg, &mut st, 5.0);
        let glazing_ok = (phi - 5.0 * 2.0 * 2.8).abs() < 1e-12 && rfg.a1 == 0.0;
        out.push(check(
            "massless-and-glazing",
            massless_ok && glazing_ok,
            format!("massless L={:.6}, glazing step {phi:.6}", rf.l_yx),
        ));
    }

    // equivalent air conductivity arithmetic
    {
        let a = fem::equivalent_air_conductivity(1.0, 0.34);
        let b = fem::equivalent_air_conductivity(0.96, 0.34);
        out.push(check(
            "k-eq-arithmetic",
            (a - 2.9412).abs() < 5e-5 && (b - 2.8235).abs() < 5e-5,
            format!("d/R: 1/0.34 = {a:.4}, 0.96/0.34 = {b:.4}"),
        ));
    }

    // coupling coefficient
    {
        let l = coupling_coefficient(8.64, 3.0, 5.5);
        out.push(check(
            "coupling-coefficient",
            (l - 40.05818181818182).abs() < 1e-9,
            format!("L_xa = {l:.4} W/K for the default box"),
        ));
    }

    // zone equilibrium and superposition
    {
        let cfg = default_box_config();
        let net = ZoneNetwork::build(&cfg.zone).unwrap();
        let n = 200;
        let theta = 9.0;
        let inputs = ZoneInputs {
            t_b: vec![theta; n],
            t_y: vec![vec![theta; n]; net.external_count()],
            gains: vec![],
        };
        let recs = simulate_zone(&net, Some(theta + 6.0), &inputs, 0).unwrap();
        let drift = (recs.last().unwrap().t_a - theta).abs();
        out.push(check(
            "zone-steady-state",
            drift < 1e-6,
            format!("|T_a - driving| after {n} h = {drift:.2e} K"),
        ));

        let mk = |amp: f64| {
            let t: Vec<f64> = (0..n)
                .map(|h| theta + amp * (2.0 * PI * h as f64 / 24.0).sin())
                .collect();
            ZoneInputs {
                t_y: vec![t.clone(); net.external_count()],
                t_b: t,
                gains: vec![],
            }
        };
        let r0 = simulate_zone(&net, Some(theta), &mk(0.0), 0).unwrap();
        let r1 = simulate_zone(&net, Some(theta), &mk(3.0), 0).unwrap();
        let r2 = simulate_zone(&net, Some(theta), &mk(6.0), 0).unwrap();
        let mut worst = 0.0f64;
        for h in 0..n {
            let doubled = r0[h].t_a + 2.0 * (r1[h].t_a - r0[h].t_a);
            worst = worst.max((r2[h].t_a - doubled).abs());
        }
        out.push(check(
            "zone-superposition",
            worst < 1e-9,
            format!("max linearity defect {worst:.2e} K"),
        ));
    }

    // FEM structural checks
    {
        let mesh = fem::Mesh::uniform(4, 0.3, 0).unwrap();
        let mats = [fem::MatProps { k: 1.7, rho_c: 1e6 }];
        let sys = fem::assemble(&mesh, &mats, &[None; 6]);
        let mut worst = 0.0f64;
        for r in 0..sys.n_nodes {
            let sum: f64 = (sys.indptr[r]..sys.indptr[r + 1]).map(|p| sys.k_vals[p]).sum();
            worst = worst.max(sum.abs());
        }
        let mass_total: f64 = sys.mass.iter().sum();
        let expect = 1e6 * 1.2f64.powi(3);
        out.push(check(
            "fem-conservation",
            worst < 1e-10 && (mass_total - expect).abs() < 1e-9 * expect,
            format!("max row sum {worst:.2e}, lumped mass {mass_total:.3e} vs {expect:.3e}"),
        ));
    }

    // FEM patch test
    {
        let mesh = fem::Mesh::uniform(5, 0.24, 0).unwrap();
        let mats = [fem::MatProps { k: 1.3, rho_c: 1e6 }];
        let m = mesh.nodes_per_edge();
        let affine =
            |i: usize, j: usize, k: usize| 1.0 + 0.5 * i as f64 - 0.25 * j as f64 + 0.125 * k as f64;
        let mut fixed = vec![None; mesh.node_count()];
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    if i == 0 || j == 0 || k == 0 || i == m - 1 || j == m - 1 || k == m - 1 {
                        fixed[mesh.node_id(i, j, k)] = Some(affine(i, j, k));
                    }
                }
            }
        }
        let (passed, detail) = match fem::dirichlet_steady(&mesh, &mats, &fixed) {
            Ok(t) => {
                let mut worst = 0.0f64;
                for k in 0..m {
                    for j in 0..m {
                        for i in 0..m {
                            worst =
                                worst.max((t[mesh.node_id(i, j, k)] - affine(i, j, k)).abs());
                        }
                    }
                }
                (worst < 1e-10, format!("max nodal deviation {worst:.2e}"))
            }
            Err(e) => (false, e.to_string()),
        };
        out.push(check("fem-patch-test", passed, detail));
    }

    // FEM 1D steady flux against the series-resistance analytic
    {
        let n = 16;
        let geom = crate::config::BoxGeometry::default();
        let cell = geom.outer_edge / n as f64;
        let shell = 2usize;
        let mut materials = vec![1u8; n * n * n];
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    if i < shell || i >= n - shell {
                        materials[(k * n + j) * n + i] = 0;
                    }
                }
            }
        }
        let mesh = fem::Mesh::with_materials(n, cell, materials).unwrap();
        let mats = fem::box_materials(&geom);
        let robin = [Some(H_E), Some(H_E), None, None, None, None];
        let sys = fem::assemble(&mesh, &mats, &robin);
        let bc = [20.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let (passed, detail) = match fem::steady_solve(&sys, &bc) {
            Ok(t) => {
                let d_shell = shell as f64 * cell;
                let r = 2.0 / H_E
                    + 2.0 * d_shell / mats[0].k
                    + (geom.outer_edge - 2.0 * d_shell) / mats[1].k;
                let q_exact = 20.0 / r;
                let area = geom.outer_edge * geom.outer_edge;
                let mut q = 0.0;
                for &(node, w) in &sys.face_loads[fem::FACE_X_MINUS] {
                    q += w * (20.0 - t[node]);
                }
                q /= area;
                let rel = (q - q_exact).abs() / q_exact;
                (rel < 1e-3, format!("flux {q:.5} vs analytic {q_exact:.5} W/m2 ({rel:.2e} rel)"))
            }
            Err(e) => (false, e.to_string()),
        };
        out.push(check("fem-1d-series-resistance", passed, detail));
    }

    // solar geometry spot checks
    {
        let site = SiteInfo { latitude_deg: 52.0, longitude_deg: 0.0, timezone_hours: 0.0 };
        let t1 = chrono::DateTime::parse_from_rfc3339("2023-03-20T12:00:00Z")
            .unwrap()
            .with_timezone(&chrono::Utc);
        let t2 = chrono::DateTime::parse_from_rfc3339("2023-06-21T12:00:00Z")
            .unwrap()
            .with_timezone(&chrono::Utc);
        let (a1, _) = solar_position(&site, t1);
        let (a2, _) = solar_position(&site, t2);
        out.push(check(
            "solar-geometry",
            (a1 - 38.0).abs() < 0.5 && (a2 - 61.44).abs() < 0.5,
            format!("equinox noon {a1:.2} deg (38 expected), solstice {a2:.2} deg (61.44)"),
        ));
    }

    // sol-air arithmetic
    {
        let p = SolAirParams { a_sol: 0.6, h_e: 25.0, emissivity: 0.9, delta_r: 0.0 };
        let v1 = sol_air(10.0, 500.0, &p);
        let roof = SolAirParams { delta_r: 100.0, ..p };
        let v2 = sol_air(15.0, 0.0, &roof);
        out.push(check(
            "sol-air",
            (v1 - 22.0).abs() < 1e-12 && (v2 - 11.4).abs() < 1e-12,
            format!("wall 10->{v1:.2}, roof 15->{v2:.2}"),
        ));
    }

    out
}

/// Writes, per wall of the wide corpus: the exact admittance sweep CSV
/// (period_h, ReY_xy, ImY_xy, ReY_x, ImY_x), the fitted coefficients and
/// their pole moduli.
pub fn dump_wall_reports(dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, part) in stability_corpus() {
        let mut csv = String::from("period_h,ReY_xy,ImY_xy,ReY_x,ImY_x\n");
        let mut p = 1.0f64;
        while p <= 24.0 + 1e-9 {
            let a = admittances(&part, H_E, 2.0 * PI / (p * 3600.0));
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                p, a.y_xy.re, a.y_xy.im, a.y_x.re, a.y_x.im
            ));
            p += 0.5;
        }
        std::fs::write(dir.join(format!("{name}_admittance.csv")), csv)?;

        let report = match fit_response_factors(&part, H_E) {
            Ok(rf) => {
                let (p1, p2) = rf.pole_moduli();
                format!(
                    "L_yx = {}\na1 = {}\na2 = {}\nb1 = {}\nb2 = {}\npole_moduli = {p1}, {p2}\nwarped_phase_24h_deg = {}\nwarped_phase_1h_deg = {}\n",
                    rf.l_yx,
                    rf.a1,
                    rf.a2,
                    rf.b1,
                    rf.b2,
                    discrete_phase(OMEGA_24H).to_degrees(),
                    discrete_phase(OMEGA_1H).to_degrees(),
                )
            }
            Err(e) => format!("fit error: {e}\n"),
        };
        std::fs::write(dir.join(format!("{name}_fit.txt")), report)?;
    }
    Ok(())
}
