//! Galerkin assembly on the voxel mesh: trilinear hexahedral stiffness with
//! 2x2x2 Gauss quadrature (exact for these integrands), row-sum lumped mass,
//! and Robin boundary terms on selected box faces.

use super::mesh::{MatProps, Mesh};

/// Box face indices used throughout the FEM side.
pub const FACE_X_MINUS: usize = 0;
pub const FACE_X_PLUS: usize = 1;
pub const FACE_Y_MINUS: usize = 2;
pub const FACE_Y_PLUS: usize = 3;
pub const FACE_Z_MINUS: usize = 4;
pub const FACE_Z_PLUS: usize = 5;

/// Symmetric sparse operator in CSR form with one shared pattern for the
/// stiffness and the Robin surface matrix, plus the lumped mass diagonal and
/// the per-face Robin load stencils.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub n_nodes: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    /// Stiffness values (conductivity included), W/K.
    pub k_vals: Vec<f64>,
    /// Robin surface matrix values, W/K.
    pub h_vals: Vec<f64>,
    /// Lumped mass diagonal, J/K.
    pub mass: Vec<f64>,
    /// Per box face: (node, weight) pairs with weight = h_e * area share,
    /// so the load is `weight * T_eq`, W.
    pub face_loads: [Vec<(usize, f64)>; 6],
}

/// Element stiffness of a unit-conductivity cube with edge `h`, in local
/// corner order. Gauss 2x2x2 integrates the bilinear gradient products
/// exactly.
pub fn element_stiffness(h: f64) -> [[f64; 8]; 8] {
    let g = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let mut ke = [[0.0f64; 8]; 8];
    for &xi in &g {
        for &eta in &g {
            for &zeta in &g {
                let mut grad = [[0.0f64; 3]; 8];
                for (a, row) in grad.iter_mut().enumerate() {
                    let (bx, by, bz) = (a & 1, (a >> 1) & 1, (a >> 2) & 1);
                    let sx = if bx == 1 { xi } else { 1.0 - xi };
                    let sy = if by == 1 { eta } else { 1.0 - eta };
                    let sz = if bz == 1 { zeta } else { 1.0 - zeta };
                    let dx = if bx == 1 { 1.0 } else { -1.0 };
                    let dy = if by == 1 { 1.0 } else { -1.0 };
                    let dz = if bz == 1 { 1.0 } else { -1.0 };
                    row[0] = dx * sy * sz / h;
                    row[1] = sx * dy * sz / h;
                    row[2] = sx * sy * dz / h;
                }
                let w = h * h * h / 8.0;
                for a in 0..8 {
                    for b in 0..8 {
                        ke[a][b] += w
                            * (grad[a][0] * grad[b][0]
                                + grad[a][1] * grad[b][1]
                                + grad[a][2] * grad[b][2]);
                    }
                }
            }
        }
    }
    ke
}

/// Consistent surface matrix of a bilinear quad with edge `h`, nodes in
/// cyclic order, unit film coefficient.
fn face_matrix(h: f64) -> [[f64; 4]; 4] {
    let g = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut m = [[0.0f64; 4]; 4];
    for &s in &g {
        for &t in &g {
            let shape: Vec<f64> = corners
                .iter()
                .map(|&(cs, ct)| {
                    (if cs == 1.0 { s } else { 1.0 - s }) * (if ct == 1.0 { t } else { 1.0 - t })
                })
                .collect();
            let w = h * h / 4.0;
            for a in 0..4 {
                for b in 0..4 {
                    m[a][b] += w * shape[a] * shape[b];
                }
            }
        }
    }
    m
}

fn csr_pattern(mesh: &Mesh) -> (Vec<usize>, Vec<usize>) {
    let m = mesh.nodes_per_edge() as isize;
    let n_nodes = mesh.node_count();
    let mut indptr = Vec::with_capacity(n_nodes + 1);
    let mut indices = Vec::new();
    indptr.push(0);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                for dk in -1..=1isize {
                    for dj in -1..=1isize {
                        for di in -1..=1isize {
                            let (ni, nj, nk) = (i + di, j + dj, k + dk);
                            if ni < 0 || nj < 0 || nk < 0 || ni >= m || nj >= m || nk >= m {
                                continue;
                            }
                            indices.push(((nk * m + nj) * m + ni) as usize);
                        }
                    }
                }
                indptr.push(indices.len());
            }
        }
    }
    (indptr, indices)
}

impl SparseSystem {
    fn scatter(&self, vals: &mut [f64], row: usize, col: usize, v: f64) {
        let lo = self.indptr[row];
        let hi = self.indptr[row + 1];
        let pos = self.indices[lo..hi]
            .binary_search(&col)
            .expect("column inside stencil");
        vals[lo + pos] += v;
    }

    /// y = (K + H) x
    pub fn apply_kh(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n_nodes {
            let mut acc = 0.0;
            for p in self.indptr[r]..self.indptr[r + 1] {
                acc += (self.k_vals[p] + self.h_vals[p]) * x[self.indices[p]];
            }
            y[r] = acc;
        }
    }

    /// Robin load vector for the given per-face equivalent temperatures, W.
    pub fn load_vector(&self, t_eq: &[f64; 6]) -> Vec<f64> {
        let mut f = vec![0.0; self.n_nodes];
        for face in 0..6 {
            for &(node, w) in &self.face_loads[face] {
                f[node] += w * t_eq[face];
            }
        }
        f
    }

    /// Net boundary heat flow into the domain for field `t` and boundary
    /// temperatures `t_eq`: `1^T (F - H t)`, W.
    pub fn boundary_flux(&self, t: &[f64], t_eq: &[f64; 6]) -> f64 {
        let mut flux = 0.0;
        for face in 0..6 {
            for &(_node, w) in &self.face_loads[face] {
                flux += w * t_eq[face];
            }
        }
        for r in 0..self.n_nodes {
            for p in self.indptr[r]..self.indptr[r + 1] {
                flux -= self.h_vals[p] * t[self.indices[p]];
            }
        }
        flux
    }

    /// Thermal energy content with respect to 0 degC, J.
    pub fn energy(&self, t: &[f64]) -> f64 {
        self.mass.iter().zip(t.iter()).map(|(m, v)| m * v).sum()
    }
}

/// Assembles stiffness, lumped mass and Robin terms. `robin[f]` carries the
/// film coefficient of box face `f`, or `None` for an adiabatic face.
pub fn assemble(mesh: &Mesh, materials: &[MatProps], robin: &[Option<f64>; 6]) -> SparseSystem {
    let (indptr, indices) = csr_pattern(mesh);
    let nnz = indices.len();
    let mut sys = SparseSystem {
        n_nodes: mesh.node_count(),
        indptr,
        indices,
        k_vals: vec![0.0; nnz],
        h_vals: vec![0.0; nnz],
        mass: vec![0.0; mesh.node_count()],
        face_loads: Default::default(),
    };

    let ke_unit = element_stiffness(mesh.cell_size);
    let cell_vol = mesh.cell_size.powi(3);
    let mut k_vals = std::mem::take(&mut sys.k_vals);
    for k in 0..mesh.n {
        for j in 0..mesh.n {
            for i in 0..mesh.n {
                let mat = materials[mesh.materials[mesh.cell_id(i, j, k)] as usize];
                let nodes = mesh.cell_nodes(i, j, k);
                for a in 0..8 {
                    sys.mass[nodes[a]] += mat.rho_c * cell_vol / 8.0;
                    for b in 0..8 {
                        sys.scatter(&mut k_vals, nodes[a], nodes[b], mat.k * ke_unit[a][b]);
                    }
                }
            }
        }
    }
    sys.k_vals = k_vals;

    let hf = face_matrix(mesh.cell_size);
    let area_share = mesh.cell_size * mesh.cell_size / 4.0;
    let n = mesh.n;
    let mut h_vals = std::mem::take(&mut sys.h_vals);
    for face in 0..6 {
        let Some(h_e) = robin[face] else { continue };
        let axis = face / 2;
        let fixed = if face % 2 == 0 { 0 } else { n };
        for v in 0..n {
            for u in 0..n {
                // cyclic corner order around the quad
                let quad = match axis {
                    0 => [
                        mesh.node_id(fixed, u, v),
                        mesh.node_id(fixed, u + 1, v),
                        mesh.node_id(fixed, u + 1, v + 1),
                        mesh.node_id(fixed, u, v + 1),
                    ],
                    1 => [
                        mesh.node_id(u, fixed, v),
                        mesh.node_id(u + 1, fixed, v),
                        mesh.node_id(u + 1, fixed, v + 1),
                        mesh.node_id(u, fixed, v + 1),
                    ],
                    _ => [
                        mesh.node_id(u, v, fixed),
                        mesh.node_id(u + 1, v, fixed),
                        mesh.node_id(u + 1, v + 1, fixed),
                        mesh.node_id(u, v + 1, fixed),
                    ],
                };
                for a in 0..4 {
                    sys.face_loads[face].push((quad[a], h_e * area_share));
                    for b in 0..4 {
                        sys.scatter(&mut h_vals, quad[a], quad[b], h_e * hf[a][b]);
                    }
                }
            }
        }
    }
    sys.h_vals = h_vals;
    sys
}
