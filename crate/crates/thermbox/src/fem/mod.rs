//! 3D transient heat conduction on the voxel box mesh: assembly, implicit
//! stepping, and the weather-driven simulation producing the hourly mean
//! core temperature.

mod assemble;
mod mesh;
mod solve;

pub use assemble::{
    assemble, element_stiffness, SparseSystem, FACE_X_MINUS, FACE_X_PLUS, FACE_Y_MINUS,
    FACE_Y_PLUS, FACE_Z_MINUS, FACE_Z_PLUS,
};
pub use mesh::{
    box_materials, build_box_mesh, equivalent_air_conductivity, mean_core_temperature, probe,
    MatProps, Mesh, ScalarField, MAT_CORE, MAT_SHELL,
};
pub use solve::{dirichlet_steady, fem_step, steady_solve, CG_TOLERANCE};

use thiserror::Error;

use crate::config::BoxGeometry;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("wall thickness {wall_thickness} m is not a whole number of cells of {cell_size} m; nearest valid cells-per-edge is {suggestion}")]
    IndivisibleThickness {
        wall_thickness: f64,
        cell_size: f64,
        suggestion: usize,
    },
    #[error("conjugate gradient did not converge after {iterations} iterations (trailing relative residuals {residual_history:?})")]
    CgDivergence {
        iterations: usize,
        residual_history: Vec<f64>,
    },
    #[error("invalid mesh: {0}")]
    BadMesh(String),
}

/// Per-face hourly boundary temperatures, face order
/// `x-,x+,y-,y+,z-,z+` = west, east, south, north, floor, roof.
pub type FaceSeries = [Vec<f64>; 6];

/// Options for a weather-driven run.
#[derive(Debug, Clone)]
pub struct FemRunOptions {
    /// Cells per box edge.
    pub n: usize,
    /// Exterior film coefficient, W/(m2 K).
    pub h_e: f64,
    /// Time weighting: 1 = implicit Euler (default), 0.5 = midpoint.
    pub theta: f64,
    /// Substeps per hour; boundary values interpolate linearly inside the
    /// hour between the previous and current hourly value.
    pub substeps: usize,
    /// Initial uniform temperature.
    pub initial: f64,
}

/// Hourly mean core temperatures plus optional probe traces.
#[derive(Debug, Clone)]
pub struct FemSeries {
    /// `mean[h]` is the volume-mean core temperature at the end of hour h.
    pub mean: Vec<f64>,
    /// One trace per probe point, aligned with `mean`.
    pub probes: Vec<Vec<f64>>,
}

/// Runs the box FEM over hourly per-face sol-air series. The snapshot hook
/// receives the nodal field at the end of every hour.
pub fn simulate_fem(
    geom: &BoxGeometry,
    opts: &FemRunOptions,
    face_series: &FaceSeries,
    probes: &[[f64; 3]],
    mut snapshot: Option<&mut dyn FnMut(usize, &Mesh, &[f64])>,
) -> Result<FemSeries, FemError> {
    if opts.substeps == 0 {
        return Err(FemError::BadMesh("substeps must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&opts.theta) {
        return Err(FemError::BadMesh(format!(
            "theta {} outside [0, 1]",
            opts.theta
        )));
    }
    let hours = face_series[0].len();
    for s in face_series.iter() {
        if s.len() != hours {
            return Err(FemError::BadMesh(format!(
                "face series lengths differ: {} vs {hours}",
                s.len()
            )));
        }
    }
    let mesh = build_box_mesh(geom, opts.n)?;
    let sys = assemble(&mesh, &box_materials(geom), &[Some(opts.h_e); 6]);
    let mut t: ScalarField = vec![opts.initial; sys.n_nodes];
    let mut mean = Vec::with_capacity(hours);
    let mut probe_rows: Vec<Vec<f64>> = vec![Vec::with_capacity(hours); probes.len()];
    let dt_sub = crate::STEP_SECONDS / opts.substeps as f64;
    let mut bc_prev = [0.0f64; 6];
    for f in 0..6 {
        bc_prev[f] = face_series[f].first().copied().unwrap_or(opts.initial);
    }
    for h in 0..hours {
        let mut bc_hour = [0.0f64; 6];
        for f in 0..6 {
            bc_hour[f] = face_series[f][h];
        }
        for s in 0..opts.substeps {
            let frac0 = s as f64 / opts.substeps as f64;
            let frac1 = (s + 1) as f64 / opts.substeps as f64;
            let lerp = |a: &[f64; 6], b: &[f64; 6], f: f64| -> [f64; 6] {
                let mut out = [0.0; 6];
                for i in 0..6 {
                    out[i] = a[i] + (b[i] - a[i]) * f;
                }
                out
            };
            let bc0 = lerp(&bc_prev, &bc_hour, frac0);
            let bc1 = lerp(&bc_prev, &bc_hour, frac1);
            t = fem_step(&sys, &t, dt_sub, opts.theta, &bc0, &bc1)?;
        }
        bc_prev = bc_hour;
        mean.push(mean_core_temperature(&mesh, &t));
        for (row, p) in probe_rows.iter_mut().zip(probes.iter()) {
            row.push(probe(&mesh, &t, *p));
        }
        if let Some(hook) = snapshot.as_deref_mut() {
            hook(h, &mesh, &t);
        }
    }
    Ok(FemSeries { mean, probes: probe_rows })
}

/// Writes the FEM output CSV `hour,T_mean_core[,T_probe_i...]`.
pub fn fem_series_to_csv(series: &FemSeries) -> String {
    let mut s = String::from("hour,T_mean_core");
    for i in 0..series.probes.len() {
        s.push_str(&format!(",T_probe_{i}"));
    }
    s.push('\n');
    for (h, v) in series.mean.iter().enumerate() {
        s.push_str(&format!("{},{}", h, crate::zone::sig6(*v)));
        for p in &series.probes {
            s.push(',');
            s.push_str(&crate::zone::sig6(p[h]));
        }
        s.push('\n');
    }
    s
}

/// Legacy-format structured-points snapshot for external visualization.
pub fn write_vtk(mesh: &Mesh, field: &[f64], title: &str) -> String {
    let m = mesh.nodes_per_edge();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str(title);
    s.push('\n');
    s.push_str("ASCII\nDATASET STRUCTURED_POINTS\n");
    s.push_str(&format!("DIMENSIONS {m} {m} {m}\n"));
    s.push_str("ORIGIN 0 0 0\n");
    s.push_str(&format!(
        "SPACING {} {} {}\n",
        mesh.cell_size, mesh.cell_size, mesh.cell_size
    ));
    s.push_str(&format!("POINT_DATA {}\n", mesh.node_count()));
    s.push_str("SCALARS temperature double 1\nLOOKUP_TABLE default\n");
    for v in field {
        s.push_str(&format!("{v}\n"));
    }
    s
}
