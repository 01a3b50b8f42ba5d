//! Voxel hexahedral mesh of the test box and nodal scalar fields.

use crate::config::BoxGeometry;

use super::FemError;

/// Cell material ids.
pub const MAT_SHELL: u8 = 0;
pub const MAT_CORE: u8 = 1;

/// Uniform voxel grid: `n` cells per edge, per-cell material id. Node
/// coordinates are implicit: node (i, j, k) sits at (i h, j h, k h).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    /// Cells per edge.
    pub n: usize,
    /// Cell size, m.
    pub cell_size: f64,
    /// Material id per cell, x fastest.
    pub materials: Vec<u8>,
}

/// Conductivity and volumetric heat capacity per material id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatProps {
    /// W/(m K).
    pub k: f64,
    /// J/(m3 K).
    pub rho_c: f64,
}

/// Nodal temperatures, length `(n+1)^3`.
pub type ScalarField = Vec<f64>;

impl Mesh {
    pub fn cell_count(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn nodes_per_edge(&self) -> usize {
        self.n + 1
    }

    pub fn node_count(&self) -> usize {
        let m = self.nodes_per_edge();
        m * m * m
    }

    pub fn edge_length(&self) -> f64 {
        self.cell_size * self.n as f64
    }

    #[inline]
    pub fn cell_id(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.n + j) * self.n + i
    }

    #[inline]
    pub fn node_id(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.nodes_per_edge();
        (k * m + j) * m + i
    }

    /// The eight node ids of a cell, in local corner order
    /// (x bit 0, y bit 1, z bit 2).
    pub fn cell_nodes(&self, i: usize, j: usize, k: usize) -> [usize; 8] {
        let mut out = [0usize; 8];
        for (a, slot) in out.iter_mut().enumerate() {
            *slot = self.node_id(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
        }
        out
    }

    /// Custom material layout (tests and special configurations).
    pub fn with_materials(n: usize, cell_size: f64, materials: Vec<u8>) -> Result<Self, FemError> {
        if n < 3 {
            return Err(FemError::BadMesh(format!("n = {n}, need n >= 3")));
        }
        if materials.len() != n * n * n {
            return Err(FemError::BadMesh(format!(
                "materials length {} != n^3 = {}",
                materials.len(),
                n * n * n
            )));
        }
        Ok(Mesh { n, cell_size, materials })
    }

    /// Uniform single-material mesh.
    pub fn uniform(n: usize, cell_size: f64, material: u8) -> Result<Self, FemError> {
        Self::with_materials(n, cell_size, vec![material; n * n * n])
    }
}

/// Builds the nested-cube mesh: shell cells within the wall thickness of any
/// face, core cells inside. The cell size must divide the wall thickness
/// exactly.
pub fn build_box_mesh(geom: &BoxGeometry, n: usize) -> Result<Mesh, FemError> {
    if n < 3 {
        return Err(FemError::BadMesh(format!("n = {n}, need n >= 3")));
    }
    let cell = geom.outer_edge / n as f64;
    let layers_f = geom.wall_thickness / cell;
    let layers = layers_f.round() as usize;
    if layers == 0 || (layers_f - layers as f64).abs() > 1e-9 * layers_f.max(1.0) {
        // suggest the nearest n that yields whole shell layers
        let per_layer = geom.outer_edge / geom.wall_thickness;
        let lo = (n as f64 / per_layer).floor().max(1.0) * per_layer;
        let hi = (n as f64 / per_layer).ceil() * per_layer;
        let suggestion = if (n as f64 - lo).abs() <= (hi - n as f64).abs() && lo >= per_layer {
            lo.round() as usize
        } else {
            hi.round() as usize
        };
        return Err(FemError::IndivisibleThickness {
            wall_thickness: geom.wall_thickness,
            cell_size: cell,
            suggestion,
        });
    }
    if 2 * layers >= n {
        return Err(FemError::BadMesh(format!(
            "shell layers fill the box: 2*{layers} >= {n}"
        )));
    }
    let mut materials = vec![MAT_CORE; n * n * n];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let shell = [i, j, k]
                    .iter()
                    .any(|&c| c < layers || c >= n - layers);
                if shell {
                    materials[(k * n + j) * n + i] = MAT_SHELL;
                }
            }
        }
    }
    Ok(Mesh { n, cell_size: cell, materials })
}

/// Shell and core properties for the box: the core is a solid with the
/// equivalent air conductivity and the real air volumetric capacity.
pub fn box_materials(geom: &BoxGeometry) -> [MatProps; 2] {
    [
        MatProps {
            k: geom.wall_material.conductivity,
            rho_c: geom.wall_material.volumetric_heat_capacity(),
        },
        MatProps { k: geom.air_k_eq, rho_c: crate::RHO_AIR * crate::C_AIR },
    ]
}

/// Equivalent conduction coefficient of an enclosed air layer: `d / R`.
pub fn equivalent_air_conductivity(d: f64, r: f64) -> f64 {
    d / r
}

/// Volume-weighted mean over core cells; a cell's temperature is the average
/// of its eight nodes. Cells are congruent, so the volume weight drops out.
pub fn mean_core_temperature(mesh: &Mesh, field: &[f64]) -> f64 {
    debug_assert_eq!(field.len(), mesh.node_count());
    let mut total = 0.0;
    let mut count = 0usize;
    for k in 0..mesh.n {
        for j in 0..mesh.n {
            for i in 0..mesh.n {
                if mesh.materials[mesh.cell_id(i, j, k)] != MAT_CORE {
                    continue;
                }
                let nodes = mesh.cell_nodes(i, j, k);
                total += nodes.iter().map(|&g| field[g]).sum::<f64>() / 8.0;
                count += 1;
            }
        }
    }
    total / count as f64
}

/// Trilinear interpolation of the nodal field at a point, coordinates in
/// meters from the box corner.
pub fn probe(mesh: &Mesh, field: &[f64], p: [f64; 3]) -> f64 {
    let h = mesh.cell_size;
    let clamp = |x: f64| x.clamp(0.0, mesh.edge_length());
    let mut idx = [0usize; 3];
    let mut frac = [0.0f64; 3];
    for d in 0..3 {
        let x = clamp(p[d]) / h;
        let i = (x.floor() as usize).min(mesh.n - 1);
        idx[d] = i;
        frac[d] = x - i as f64;
    }
    let nodes = mesh.cell_nodes(idx[0], idx[1], idx[2]);
    let mut v = 0.0;
    for (a, &g) in nodes.iter().enumerate() {
        let wx = if a & 1 == 1 { frac[0] } else { 1.0 - frac[0] };
        let wy = if (a >> 1) & 1 == 1 { frac[1] } else { 1.0 - frac[1] };
        let wz = if (a >> 2) & 1 == 1 { frac[2] } else { 1.0 - frac[2] };
        v += field[g] * wx * wy * wz;
    }
    v
}
