//! Degree-of-freedom numbering and assembly of the saddle-point blocks
//!
//! * `A`: vector Laplacian, `A_ij = int grad phi_i : grad phi_j`,
//! * `B`: divergence coupling, `B_qv = int q div phi_v`,
//! * `Mp`: pressure mass matrix.
//!
//! Boundary velocity nodes are eliminated. The constant pressure is kept; it
//! spans the kernel of `B^T` and is removed later by the eigensolver.

mod dofmap;
mod sparse;

use std::path::Path;

use rayon::prelude::*;

pub use dofmap::{build_dofmap, build_dofmap_with, DofMap, Entity, Pair, PressureCoupling};
pub use sparse::{CsrMatrix, SymMatrix, SYMMETRY_TOL};

use crate::elements::{gauss_rule, ElementError, QuadratureRule};
use crate::patchgen::Mesh;

#[derive(Debug, thiserror::Error)]
pub enum AssembleError {
    #[error("mesh mixes quadrilaterals and triangles")]
    MixedCellKinds,
    #[error("mesh cells do not match the {0} pair")]
    PairMismatch(Pair),
    #[error("unknown element pair `{0}`")]
    UnknownPair(String),
    #[error("cell {0} has a singular affine map")]
    SingularMap(usize),
    #[error("assembled matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Quadrature degree that integrates every assembled product exactly on
/// affine cells.
pub const DEFAULT_QUADRATURE_DEGREE: u32 = 4;

/// The three blocks of the discrete inf-sup problem.
#[derive(Clone, Debug)]
pub struct Saddle {
    pub a: SymMatrix,
    pub b: CsrMatrix,
    pub mp: SymMatrix,
    /// Coefficients of the constant pressure `1`.
    pub one_p: Vec<f64>,
}

impl Saddle {
    pub fn n_v(&self) -> usize {
        self.a.dim()
    }

    pub fn n_p(&self) -> usize {
        self.mp.dim()
    }

    /// Writes `A.txt`, `B.txt` and `Mp.txt` in coordinate format into `dir`.
    pub fn dump(&self, dir: &Path) -> Result<(), AssembleError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("A.txt"), self.a.csr().to_triplet_text())?;
        std::fs::write(dir.join("B.txt"), self.b.to_triplet_text())?;
        std::fs::write(dir.join("Mp.txt"), self.mp.csr().to_triplet_text())?;
        Ok(())
    }
}

struct LocalMatrices {
    /// Scalar stiffness, velocity nodes x velocity nodes.
    stiffness: Vec<f64>,
    /// `int psi_q d_x phi_v` and `int psi_q d_y phi_v`, pressure x velocity nodes.
    div: [Vec<f64>; 2],
    mass: Vec<f64>,
}

fn local_matrices(
    mesh: &Mesh,
    dofs: &DofMap,
    rule: &QuadratureRule,
    c: usize,
) -> Result<LocalMatrices, AssembleError> {
    let map = &mesh.cell_maps[c];
    let det = map.det();
    if det == 0.0 || !det.is_finite() {
        return Err(AssembleError::SingularMap(c));
    }
    let jac = det.abs();
    let ve = dofs.velocity_element();
    let pe = dofs.pressure_element();
    let (nv, np) = (ve.node_count(), pe.node_count());
    let mut stiffness = vec![0.0; nv * nv];
    let mut div = [vec![0.0; np * nv], vec![0.0; np * nv]];
    let mut mass = vec![0.0; np * np];
    for (xi, w) in rule.iter() {
        let wj = w * jac;
        let grads: Vec<[f64; 2]> = ve
            .shape_gradients(xi)
            .into_iter()
            .map(|g| map.push_gradient(g))
            .collect();
        let psi = pe.shape_values(xi);
        for i in 0..nv {
            for j in 0..nv {
                stiffness[i * nv + j] += wj * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
            }
        }
        for q in 0..np {
            for v in 0..nv {
                div[0][q * nv + v] += wj * psi[q] * grads[v][0];
                div[1][q * nv + v] += wj * psi[q] * grads[v][1];
            }
            for p in 0..np {
                mass[q * np + p] += wj * psi[q] * psi[p];
            }
        }
    }
    Ok(LocalMatrices {
        stiffness,
        div,
        mass,
    })
}

/// Assembles all three blocks with the default quadrature.
pub fn assemble_saddle(mesh: &Mesh, dofs: &DofMap) -> Result<Saddle, AssembleError> {
    assemble_saddle_with(mesh, dofs, DEFAULT_QUADRATURE_DEGREE)
}

/// Element matrices are computed in parallel and scattered serially in cell
/// order, so the result is bitwise independent of the thread count.
pub fn assemble_saddle_with(
    mesh: &Mesh,
    dofs: &DofMap,
    degree: u32,
) -> Result<Saddle, AssembleError> {
    let rule = gauss_rule(dofs.pair.cell_kind(), degree)?;
    let locals: Vec<LocalMatrices> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| local_matrices(mesh, dofs, &rule, c))
        .collect::<Result<_, _>>()?;

    let nvel = dofs.velocity_dim();
    let mut ta = Vec::new();
    let mut tb = Vec::new();
    let mut tm = Vec::new();
    for (c, loc) in locals.iter().enumerate() {
        let vnodes = &dofs.cell_velocity[c];
        let pnodes = &dofs.cell_pressure[c];
        let nv = vnodes.len();
        let np = pnodes.len();
        for comp in 0..2 {
            for i in 0..nv {
                let Some(gi) = dofs.velocity_dof(vnodes[i], comp) else { continue };
                for j in 0..nv {
                    if let Some(gj) = dofs.velocity_dof(vnodes[j], comp) {
                        ta.push((gi, gj, loc.stiffness[i * nv + j]));
                    }
                }
            }
        }
        for q in 0..np {
            for comp in 0..2 {
                for v in 0..nv {
                    if let Some(gv) = dofs.velocity_dof(vnodes[v], comp) {
                        tb.push((pnodes[q], gv, loc.div[comp][q * nv + v]));
                    }
                }
            }
            for p in 0..np {
                tm.push((pnodes[q], pnodes[p], loc.mass[q * np + p]));
            }
        }
    }
    Ok(Saddle {
        a: SymMatrix::new(CsrMatrix::from_triplets(nvel, nvel, ta))?,
        b: CsrMatrix::from_triplets(dofs.n_p, nvel, tb),
        mp: SymMatrix::new(CsrMatrix::from_triplets(dofs.n_p, dofs.n_p, tm))?,
        one_p: vec![1.0; dofs.n_p],
    })
}

pub fn assemble_a(mesh: &Mesh, dofs: &DofMap) -> Result<SymMatrix, AssembleError> {
    Ok(assemble_saddle(mesh, dofs)?.a)
}

pub fn assemble_b(mesh: &Mesh, dofs: &DofMap) -> Result<CsrMatrix, AssembleError> {
    Ok(assemble_saddle(mesh, dofs)?.b)
}

pub fn assemble_mp(mesh: &Mesh, dofs: &DofMap) -> Result<SymMatrix, AssembleError> {
    Ok(assemble_saddle(mesh, dofs)?.mp)
}

/// Dof map and blocks for a mesh, with the pair chosen from its cell kind.
pub fn assemble_mesh(mesh: &Mesh) -> Result<(DofMap, Saddle), AssembleError> {
    let dofs = build_dofmap(mesh, Pair::for_mesh(mesh)?)?;
    let saddle = assemble_saddle(mesh, &dofs)?;
    Ok((dofs, saddle))
}
