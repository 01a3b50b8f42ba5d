//! Time stepping and linear solves: Jacobi-preconditioned conjugate
//! gradients on the symmetric positive definite step matrix
//! `M/dt + theta (K + H)`.

use super::assemble::SparseSystem;
use super::mesh::{Mesh, ScalarField};
use super::FemError;
use crate::fem::mesh::MatProps;

/// Relative residual target of every CG solve.
pub const CG_TOLERANCE: f64 = 1e-10;

struct StepOperator<'a> {
    sys: &'a SparseSystem,
    /// Diagonal M/dt contribution; zero for steady solves.
    mass_over_dt: Vec<f64>,
    theta: f64,
}

impl StepOperator<'_> {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let s = self.sys;
        for r in 0..s.n_nodes {
            let mut acc = self.mass_over_dt[r] * x[r];
            let th = self.theta;
            for p in s.indptr[r]..s.indptr[r + 1] {
                acc += th * (s.k_vals[p] + s.h_vals[p]) * x[s.indices[p]];
            }
            y[r] = acc;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let s = self.sys;
        let mut d = self.mass_over_dt.clone();
        for r in 0..s.n_nodes {
            for p in s.indptr[r]..s.indptr[r + 1] {
                if s.indices[p] == r {
                    d[r] += self.theta * (s.k_vals[p] + s.h_vals[p]);
                }
            }
        }
        d
    }
}

fn cg(
    op: &StepOperator,
    b: &[f64],
    x0: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<Vec<f64>, FemError> {
    let n = b.len();
    let diag = op.diagonal();
    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
    };
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = x0.to_vec();
    let mut ax = vec![0.0; n];
    op.apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(ax.iter()).map(|(bi, ai)| bi - ai).collect();
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
    let mut residuals = Vec::new();
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        residuals.push(rn / b_norm);
        if rn <= tol * b_norm {
            return Ok(x);
        }
        op.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(ap.iter()).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break; // loss of positive definiteness: bail to the error path
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond(&r, &mut z);
        let rz_new: f64 = r.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let tail = residuals.len().saturating_sub(5);
    Err(FemError::CgDivergence {
        iterations: residuals.len(),
        residual_history: residuals[tail..].to_vec(),
    })
}

/// One theta-scheme step of length `dt` from field `t_n`; boundary data at
/// the beginning and end of the step.
pub fn fem_step(
    sys: &SparseSystem,
    t_n: &[f64],
    dt: f64,
    theta: f64,
    t_eq_start: &[f64; 6],
    t_eq_end: &[f64; 6],
) -> Result<ScalarField, FemError> {
    let n = sys.n_nodes;
    let op = StepOperator {
        sys,
        mass_over_dt: sys.mass.iter().map(|m| m / dt).collect(),
        theta,
    };
    // rhs = (M/dt - (1-theta)(K+H)) t_n + theta F_end + (1-theta) F_start
    let mut kh_t = vec![0.0; n];
    sys.apply_kh(t_n, &mut kh_t);
    let f_start = sys.load_vector(t_eq_start);
    let f_end = sys.load_vector(t_eq_end);
    let mut b = vec![0.0; n];
    for i in 0..n {
        b[i] = sys.mass[i] / dt * t_n[i] - (1.0 - theta) * kh_t[i]
            + theta * f_end[i]
            + (1.0 - theta) * f_start[i];
    }
    cg(&op, &b, t_n, 10 * n, CG_TOLERANCE)
}

/// Steady state with Robin boundaries: solves `(K + H) t = F`.
pub fn steady_solve(sys: &SparseSystem, t_eq: &[f64; 6]) -> Result<ScalarField, FemError> {
    let op = StepOperator {
        sys,
        mass_over_dt: vec![0.0; sys.n_nodes],
        theta: 1.0,
    };
    let b = sys.load_vector(t_eq);
    let guess = vec![t_eq.iter().sum::<f64>() / 6.0; sys.n_nodes];
    cg(&op, &b, &guess, 10 * sys.n_nodes, CG_TOLERANCE)
}

/// Steady conduction with strongly imposed boundary-node temperatures:
/// eliminates the fixed nodes and solves the reduced system by CG.
/// `fixed` maps node -> Some(value) for constrained nodes.
pub fn dirichlet_steady(
    mesh: &Mesh,
    materials: &[MatProps],
    fixed: &[Option<f64>],
) -> Result<ScalarField, FemError> {
    let sys = super::assemble::assemble(mesh, materials, &[None; 6]);
    let n = sys.n_nodes;
    assert_eq!(fixed.len(), n);
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let index_of: Vec<Option<usize>> = {
        let mut map = vec![None; n];
        for (r, &g) in free.iter().enumerate() {
            map[g] = Some(r);
        }
        map
    };
    // reduced CSR of K over free nodes; boundary columns move to the rhs
    let mut indptr = vec![0usize];
    let mut indices = Vec::new();
    let mut vals = Vec::new();
    let mut rhs = vec![0.0; free.len()];
    for (r, &g) in free.iter().enumerate() {
        for p in sys.indptr[g]..sys.indptr[g + 1] {
            let c = sys.indices[p];
            match fixed[c] {
                None => {
                    indices.push(index_of[c].unwrap());
                    vals.push(sys.k_vals[p]);
                }
                Some(v) => rhs[r] -= sys.k_vals[p] * v,
            }
        }
        indptr.push(indices.len());
    }
    let h_vals = vec![0.0; vals.len()];
    let reduced = SparseSystem {
        n_nodes: free.len(),
        indptr,
        indices,
        k_vals: vals,
        h_vals,
        mass: vec![0.0; free.len()],
        face_loads: Default::default(),
    };
    let op = StepOperator {
        sys: &reduced,
        mass_over_dt: vec![0.0; reduced.n_nodes],
        theta: 1.0,
    };
    // strongly constrained solve: tighter target so nodal errors stay below 1e-10
    let x = cg(&op, &rhs, &vec![0.0; reduced.n_nodes], 10 * n, 1e-13)?;
    let mut full = vec![0.0; n];
    for i in 0..n {
        full[i] = match fixed[i] {
            Some(v) => v,
            None => x[index_of[i].unwrap()],
        };
    }
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BoxGeometry;
    use crate::fem::assemble::assemble;
    use crate::fem::mesh::{box_materials, build_box_mesh, mean_core_temperature, Mesh};

    const ALL_ROBIN: [Option<f64>; 6] = [Some(25.0); 6];

    #[test]
    fn equilibrium_field_is_untouched() {
        let geom = BoxGeometry { wall_thickness: 0.24, ..BoxGeometry::default() };
        let mesh = build_box_mesh(&geom, 5).unwrap();
        let sys = assemble(&mesh, &box_materials(&geom), &ALL_ROBIN);
        let t0 = vec![14.0; sys.n_nodes];
        let bc = [14.0; 6];
        let t1 = fem_step(&sys, &t0, 3600.0, 1.0, &bc, &bc).unwrap();
        for v in &t1 {
            assert!((v - 14.0).abs() < 1e-10);
        }
    }

    #[test]
    fn step_moves_toward_new_boundary() {
        let geom = BoxGeometry { wall_thickness: 0.24, ..BoxGeometry::default() };
        let mesh = build_box_mesh(&geom, 5).unwrap();
        let sys = assemble(&mesh, &box_materials(&geom), &ALL_ROBIN);
        let t0 = vec![10.0; sys.n_nodes];
        let bc = [20.0; 6];
        let t1 = fem_step(&sys, &t0, 3600.0, 1.0, &bc, &bc).unwrap();
        let mean = mean_core_temperature(&mesh, &t1);
        assert!(mean > 10.0 && mean < 20.0, "{mean}");
    }

    #[test]
    fn discrete_energy_balance_per_step() {
        let geom = BoxGeometry::default();
        let mesh = build_box_mesh(&geom, 10).unwrap();
        let sys = assemble(&mesh, &box_materials(&geom), &ALL_ROBIN);
        let mut t = vec![5.0; sys.n_nodes];
        let dt = 3600.0;
        for hour in 0..6 {
            let b = 5.0 + 3.0 * (hour as f64 + 1.0);
            let bc = [b, b, b, b, b - 1.0, b + 2.0];
            let t1 = fem_step(&sys, &t, dt, 1.0, &bc, &bc).unwrap();
            // backward Euler: (E1 - E0)/dt equals the flux at the new state
            let de = (sys.energy(&t1) - sys.energy(&t)) / dt;
            let flux = sys.boundary_flux(&t1, &bc);
            assert!(
                (de - flux).abs() <= 1e-8 * flux.abs().max(1.0),
                "hour {hour}: dE/dt {de} vs flux {flux}"
            );
            t = t1;
        }
    }

    #[test]
    fn maximum_principle_backward_euler() {
        let geom = BoxGeometry::default();
        let mesh = build_box_mesh(&geom, 10).unwrap();
        let sys = assemble(&mesh, &box_materials(&geom), &ALL_ROBIN);
        let mut t = vec![0.0; sys.n_nodes];
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for hour in 0..24 {
            let b = 10.0 * ((hour as f64) * 0.7).sin();
            let bc = [b, b, b, b, b, b];
            lo = lo.min(b);
            hi = hi.max(b);
            t = fem_step(&sys, &t, 3600.0, 1.0, &bc, &bc).unwrap();
            for &v in &t {
                assert!(v >= lo - 1e-9 && v <= hi + 1e-9, "{v} outside [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn symmetric_driving_gives_symmetric_field() {
        let geom = BoxGeometry { wall_thickness: 0.24, ..BoxGeometry::default() };
        let mesh = build_box_mesh(&geom, 5).unwrap();
        let sys = assemble(&mesh, &box_materials(&geom), &ALL_ROBIN);
        let t0 = vec![0.0; sys.n_nodes];
        let bc = [15.0; 6];
        let t1 = fem_step(&sys, &t0, 3600.0, 1.0, &bc, &bc).unwrap();
        let m = mesh.nodes_per_edge();
        // mirror in x
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    let a = t1[mesh.node_id(i, j, k)];
                    let b = t1[mesh.node_id(m - 1 - i, j, k)];
                    assert!((a - b).abs() < 1e-9, "({i},{j},{k}): {a} vs {b}");
                }
            }
        }
        // axis swap x<->z (cube symmetry)
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    let a = t1[mesh.node_id(i, j, k)];
                    let b = t1[mesh.node_id(k, j, i)];
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn patch_test_affine_field_exact() {
        // uniform conductivity, affine boundary data: interior reproduces
        // the affine field to solver precision
        let mesh = Mesh::uniform(6, 0.2, 0).unwrap();
        let mats = [MatProps { k: 1.3, rho_c: 1e6 }];
        let m = mesh.nodes_per_edge();
        let affine = |i: usize, j: usize, k: usize| -> f64 {
            2.0 + 0.7 * i as f64 * 0.2 - 1.3 * j as f64 * 0.2 + 0.4 * k as f64 * 0.2
        };
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
        let t = dirichlet_steady(&mesh, &mats, &fixed).unwrap();
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    let want = affine(i, j, k);
                    let got = t[mesh.node_id(i, j, k)];
                    assert!((got - want).abs() < 1e-10, "({i},{j},{k}): {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn midpoint_scheme_preserves_equilibrium_and_tracks_decay() {
        let n = 6;
        let mesh = Mesh::uniform(n, 1.2 / n as f64, 0).unwrap();
        let rho_c = 2.0e6;
        let mats = [MatProps { k: 400.0, rho_c }];
        let sys = assemble(&mesh, &mats, &ALL_ROBIN);
        // equilibrium invariance at theta = 0.5
        let bc = [9.0; 6];
        let t0 = vec![9.0; sys.n_nodes];
        let t1 = fem_step(&sys, &t0, 3600.0, 0.5, &bc, &bc).unwrap();
        for v in &t1 {
            assert!((v - 9.0).abs() < 1e-9);
        }
        // second-order stepping keeps the lumped decay accurate at a
        // coarser step than backward Euler needs
        let vol = 1.2f64.powi(3);
        let area = 6.0 * 1.2 * 1.2;
        let tau = rho_c * vol / (25.0 * area);
        let mut t = vec![20.0; sys.n_nodes];
        let dt = 400.0;
        let steps = (tau / dt) as usize;
        let cold = [0.0; 6];
        for _ in 0..steps {
            t = fem_step(&sys, &t, dt, 0.5, &cold, &cold).unwrap();
        }
        let mean: f64 = sys.energy(&t) / sys.mass.iter().sum::<f64>();
        let exact = 20.0 * (-(steps as f64) * dt / tau).exp();
        assert!((mean - exact).abs() <= 0.01 * 20.0, "{mean} vs {exact}");
    }

    #[test]
    fn lumped_capacitance_transient() {
        // high conductivity block, Biot = h L / k = 25 * 0.6 / 400 = 0.0375:
        // volume mean follows the single-exponential decay within 1%
        let n = 6;
        let mesh = Mesh::uniform(n, 1.2 / n as f64, 0).unwrap();
        let rho_c = 2.0e6;
        let mats = [MatProps { k: 400.0, rho_c }];
        let sys = assemble(&mesh, &mats, &ALL_ROBIN);
        let vol = 1.2f64.powi(3);
        let area = 6.0 * 1.2 * 1.2;
        let tau = rho_c * vol / (25.0 * area);
        let t0 = 20.0;
        let mut t = vec![t0; sys.n_nodes];
        let dt = 40.0;
        let bc = [0.0; 6];
        let steps = (tau / dt) as usize;
        for _ in 0..steps {
            t = fem_step(&sys, &t, dt, 1.0, &bc, &bc).unwrap();
        }
        let elapsed = steps as f64 * dt;
        let mean: f64 = sys.energy(&t) / sys.mass.iter().sum::<f64>();
        let exact = t0 * (-elapsed / tau).exp();
        assert!(
            (mean - exact).abs() <= 0.01 * t0,
            "mean {mean} vs lumped {exact}"
        );
    }

    #[test]
    fn one_dimensional_series_resistance_flux() {
        // slab stack along x: shell | core | shell, adiabatic y/z faces,
        // Robin on both x faces; the steady flux matches the series
        // resistance analytic
        let n = 32;
        let geom = BoxGeometry::default();
        let cell = geom.outer_edge / n as f64;
        let shell_layers = 4; // 0.15 m of concrete on each side
        let mut materials = vec![1u8; n * n * n];
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    if i < shell_layers || i >= n - shell_layers {
                        materials[(k * n + j) * n + i] = 0;
                    }
                }
            }
        }
        let mesh = Mesh::with_materials(n, cell, materials).unwrap();
        let mats = box_materials(&geom);
        let h_e = 25.0;
        let robin = [Some(h_e), Some(h_e), None, None, None, None];
        let sys = assemble(&mesh, &mats, &robin);
        let (t_hot, t_cold) = (20.0, 0.0);
        let bc = [t_hot, t_cold, 0.0, 0.0, 0.0, 0.0];
        let t = steady_solve(&sys, &bc).unwrap();

        let d_shell = shell_layers as f64 * cell;
        let d_core = geom.outer_edge - 2.0 * d_shell;
        let r_total = 2.0 / h_e
            + 2.0 * d_shell / mats[0].k
            + d_core / mats[1].k;
        let q_exact = (t_hot - t_cold) / r_total; // W/m2
        let area = geom.outer_edge * geom.outer_edge;
        // measured flux through the hot face
        let mut q = 0.0;
        for &(node, w) in &sys.face_loads[0] {
            q += w * (t_hot - t[node]);
        }
        q /= area;
        assert!(
            (q - q_exact).abs() <= 1e-3 * q_exact,
            "flux {q} vs analytic {q_exact}"
        );
    }

    #[test]
    fn cg_divergence_reports_history() {
        // an indefinite fake system must fail rather than loop forever
        let mesh = Mesh::uniform(3, 0.4, 0).unwrap();
        let mats = [MatProps { k: 1.0, rho_c: 1.0 }];
        let mut sys = assemble(&mesh, &mats, &[None; 6]);
        for v in sys.k_vals.iter_mut() {
            *v = -*v; // dominant negative part
        }
        // non-smooth start so the Krylov space hits the indefinite directions
        let t0: Vec<f64> = (0..sys.n_nodes)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let err = fem_step(&sys, &t0, 3600.0, 1.0, &[0.0; 6], &[0.0; 6]).unwrap_err();
        match err {
            FemError::CgDivergence { residual_history, .. } => {
                assert!(!residual_history.is_empty());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
