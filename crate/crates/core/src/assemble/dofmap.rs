use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::elements::ReferenceElement;
use crate::patchgen::{CellKind, Mesh, Point, Region};

use super::AssembleError;

/// Taylor-Hood pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    Q2Q1,
    P2P1,
}

impl Pair {
    pub fn name(self) -> &'static str {
        match self {
            Pair::Q2Q1 => "q2q1",
            Pair::P2P1 => "p2p1",
        }
    }

    pub fn cell_kind(self) -> CellKind {
        match self {
            Pair::Q2Q1 => CellKind::Quad,
            Pair::P2P1 => CellKind::Tri,
        }
    }

    pub fn for_mesh(mesh: &Mesh) -> Result<Pair, AssembleError> {
        if mesh.all_quads() {
            Ok(Pair::Q2Q1)
        } else if mesh.all_tris() {
            Ok(Pair::P2P1)
        } else {
            Err(AssembleError::MixedCellKinds)
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pair {
    type Err = AssembleError;

    fn from_str(s: &str) -> Result<Pair, AssembleError> {
        match s.to_ascii_lowercase().as_str() {
            "q2q1" => Ok(Pair::Q2Q1),
            "p2p1" => Ok(Pair::P2P1),
            _ => Err(AssembleError::UnknownPair(s.to_string())),
        }
    }
}

/// Mesh entity carrying a degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
    Cell(usize),
}

/// How pressure unknowns are shared between cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PressureCoupling {
    /// Globally continuous pressures.
    #[default]
    Continuous,
    /// Continuous inside each region, independent across region interfaces.
    BrokenAtRegions,
}

/// Numbering of the unknowns.
///
/// Velocities are numbered per scalar node; every node gets an entry in the
/// scalar tables, free nodes additionally get a free index `s`. The two
/// velocity components of free node `s` are the global unknowns `s` and
/// `n_v + s`.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub pair: Pair,
    /// Entity of each scalar velocity node.
    pub velocity_entities: Vec<Entity>,
    pub velocity_points: Vec<Point>,
    /// `true` for nodes on the boundary (homogeneous Dirichlet).
    pub dirichlet: Vec<bool>,
    /// Free index of each scalar node.
    pub free_index: Vec<Option<usize>>,
    /// Scalar node of each free index.
    pub free_nodes: Vec<usize>,
    /// Scalar velocity node of each local node of each cell.
    pub cell_velocity: Vec<Vec<usize>>,
    /// Pressure unknowns keyed by vertex and, for broken coupling, region.
    pub pressure_entities: Vec<(Entity, Option<Region>)>,
    pub pressure_points: Vec<Point>,
    pub cell_pressure: Vec<Vec<usize>>,
    pub n_v: usize,
    pub n_p: usize,
}

impl DofMap {
    /// Size of the free velocity vector (two components).
    pub fn velocity_dim(&self) -> usize {
        2 * self.n_v
    }

    /// Global unknown of component `comp` at scalar node `node`, if free.
    pub fn velocity_dof(&self, node: usize, comp: usize) -> Option<usize> {
        self.free_index[node].map(|s| comp * self.n_v + s)
    }

    pub fn scalar_node_count(&self) -> usize {
        self.velocity_entities.len()
    }

    pub fn velocity_element(&self) -> ReferenceElement {
        ReferenceElement::quadratic(self.pair.cell_kind())
    }

    pub fn pressure_element(&self) -> ReferenceElement {
        ReferenceElement::linear(self.pair.cell_kind())
    }
}

pub fn build_dofmap(mesh: &Mesh, pair: Pair) -> Result<DofMap, AssembleError> {
    build_dofmap_with(mesh, pair, PressureCoupling::Continuous)
}

pub fn build_dofmap_with(
    mesh: &Mesh,
    pair: Pair,
    coupling: PressureCoupling,
) -> Result<DofMap, AssembleError> {
    let detected = Pair::for_mesh(mesh)?;
    if detected != pair {
        return Err(AssembleError::PairMismatch(pair));
    }
    let kind = pair.cell_kind();
    let velocity = ReferenceElement::quadratic(kind);
    let nvert = mesh.num_vertices();
    let nedge = mesh.edges.len();

    let mut velocity_entities: Vec<Entity> = (0..nvert).map(Entity::Vertex).collect();
    velocity_entities.extend((0..nedge).map(Entity::Edge));
    let mut velocity_points: Vec<Point> = mesh.vertices.clone();
    velocity_points.extend(mesh.edges.iter().map(|&(a, b)| {
        let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
        [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
    }));
    let mut cell_velocity = Vec::with_capacity(mesh.num_cells());
    for (c, cell) in mesh.cells.iter().enumerate() {
        let n = kind.vertex_count();
        let mut local: Vec<usize> = cell.vertices.clone();
        local.extend(mesh.cell_edges[c].iter().map(|&e| nvert + e));
        if velocity.node_count() > 2 * n {
            velocity_entities.push(Entity::Cell(c));
            velocity_points.push(mesh.cell_maps[c].apply([0.5, 0.5]));
            local.push(velocity_entities.len() - 1);
        }
        cell_velocity.push(local);
    }

    let on_vertex = mesh.boundary_vertex_flags();
    let on_edge = mesh.boundary_edge_flags();
    let dirichlet: Vec<bool> = velocity_entities
        .iter()
        .map(|e| match *e {
            Entity::Vertex(v) => on_vertex[v],
            Entity::Edge(e) => on_edge[e],
            Entity::Cell(_) => false,
        })
        .collect();
    let mut free_index = vec![None; dirichlet.len()];
    let mut free_nodes = Vec::new();
    for (i, &d) in dirichlet.iter().enumerate() {
        if !d {
            free_index[i] = Some(free_nodes.len());
            free_nodes.push(i);
        }
    }

    let mut keys: BTreeMap<(usize, Option<Region>), usize> = BTreeMap::new();
    let mut pressure_entities = Vec::new();
    let mut pressure_points = Vec::new();
    let mut cell_pressure = Vec::with_capacity(mesh.num_cells());
    for cell in &mesh.cells {
        let tag = match coupling {
            PressureCoupling::Continuous => None,
            PressureCoupling::BrokenAtRegions => Some(cell.region),
        };
        let local = cell
            .vertices
            .iter()
            .map(|&v| {
                *keys.entry((v, tag)).or_insert_with(|| {
                    pressure_entities.push((Entity::Vertex(v), tag));
                    pressure_points.push(mesh.vertices[v]);
                    pressure_entities.len() - 1
                })
            })
            .collect();
        cell_pressure.push(local);
    }

    Ok(DofMap {
        pair,
        n_v: free_nodes.len(),
        n_p: pressure_entities.len(),
        velocity_entities,
        velocity_points,
        dirichlet,
        free_index,
        free_nodes,
        cell_velocity,
        pressure_entities,
        pressure_points,
        cell_pressure,
    })
}
