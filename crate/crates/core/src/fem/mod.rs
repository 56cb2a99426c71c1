//! Lagrange finite elements on uniform triangulations: degree-of-freedom
//! management, quadrature, assembly of the elasticity and Stokes forms, and
//! Dirichlet elimination.

mod assembly;
mod basis;
mod dirichlet;
mod errors;
mod problem;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use assembly::{
    assemble_div, assemble_epsilon_stiffness, assemble_load, assemble_pressure_mass,
    assemble_scalar_mass, apply_lambda_operator, AssembledSystem,
};
pub use basis::{p2_gradients, p2_values, CellGeometry};
pub use dirichlet::{apply_dirichlet, LambdaOperator, ReducedSystem};
pub use errors::{compute_errors, interpolate, ErrorNorms};
pub use problem::{ElasticityProblem, HomogeneousProblem, ManufacturedProblem, MaterialParameters};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    /// Piecewise constants, one dof per cell.
    P0,
    /// Continuous piecewise linears, one dof per vertex.
    P1,
    /// Continuous piecewise quadratics, vertex and edge-midpoint dofs.
    P2,
    /// Two-component continuous piecewise quadratics.
    P2Vector,
}

impl ElementKind {
    pub fn is_pressure(self) -> bool {
        matches!(self, ElementKind::P0 | ElementKind::P1)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementKind::P0 => "P0",
            ElementKind::P1 => "P1",
            ElementKind::P2 => "P2",
            ElementKind::P2Vector => "P2^2",
        };
        f.write_str(s)
    }
}

impl FromStr for ElementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p0" => Ok(ElementKind::P0),
            "p1" => Ok(ElementKind::P1),
            "p2" => Ok(ElementKind::P2),
            "p2^2" | "p2vec" | "p2vector" => Ok(ElementKind::P2Vector),
            _ => Err(Error::UnsupportedElement(s.to_string())),
        }
    }
}

/// Stokes-stable velocity/pressure pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementPair {
    P2P0,
    P2P1,
}

impl ElementPair {
    pub const ALL: [ElementPair; 2] = [ElementPair::P2P0, ElementPair::P2P1];

    pub fn pressure(self) -> ElementKind {
        match self {
            ElementPair::P2P0 => ElementKind::P0,
            ElementPair::P2P1 => ElementKind::P1,
        }
    }

    /// Short lowercase name used on the command line and in file names.
    pub fn slug(self) -> &'static str {
        match self {
            ElementPair::P2P0 => "p2p0",
            ElementPair::P2P1 => "p2p1",
        }
    }
}

impl fmt::Display for ElementPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementPair::P2P0 => f.write_str("P2xP0"),
            ElementPair::P2P1 => f.write_str("P2xP1"),
        }
    }
}

impl FromStr for ElementPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['x', '-', '_', '×'], "").as_str() {
            "p2p0" => Ok(ElementPair::P2P0),
            "p2p1" => Ok(ElementPair::P2P1),
            _ => Err(Error::UnsupportedElement(s.to_string())),
        }
    }
}

/// Mesh entity carrying a degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
    Cell(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofEntity {
    pub entity: Entity,
    /// Vector component (always 0 for scalar spaces).
    pub component: usize,
}

/// A finite-element space on a mesh.
///
/// Scalar P2 nodes are numbered vertices first, then edges (`nv + e`). Vector
/// dofs interleave components: node `s`, component `c` is dof `2 s + c`.
#[derive(Debug, Clone)]
pub struct DofSpace<T> {
    kind: ElementKind,
    mesh: Arc<Mesh<T>>,
    dof_to_entity: Vec<DofEntity>,
    dirichlet_mask: Option<Vec<bool>>,
}

pub fn build_space<T: Real>(mesh: Arc<Mesh<T>>, kind: ElementKind) -> Result<DofSpace<T>> {
    let nv = mesh.num_vertices();
    let ne = mesh.num_edges();
    let scalar = |c: usize| -> Vec<DofEntity> {
        (0..nv)
            .map(Entity::Vertex)
            .chain((0..ne).map(Entity::Edge))
            .map(|entity| DofEntity {
                entity,
                component: c,
            })
            .collect()
    };
    let dof_to_entity: Vec<DofEntity> = match kind {
        ElementKind::P0 => (0..mesh.num_cells())
            .map(|c| DofEntity {
                entity: Entity::Cell(c),
                component: 0,
            })
            .collect(),
        ElementKind::P1 => (0..nv)
            .map(|v| DofEntity {
                entity: Entity::Vertex(v),
                component: 0,
            })
            .collect(),
        ElementKind::P2 => scalar(0),
        ElementKind::P2Vector => scalar(0)
            .into_iter()
            .flat_map(|d| [d, DofEntity { component: 1, ..d }])
            .collect(),
    };
    let dirichlet_mask = (kind == ElementKind::P2Vector).then(|| {
        let b = mesh.boundary();
        dof_to_entity
            .iter()
            .map(|d| match d.entity {
                Entity::Vertex(v) => b.vertices[v],
                Entity::Edge(e) => b.edges[e],
                Entity::Cell(_) => false,
            })
            .collect()
    });
    Ok(DofSpace {
        kind,
        mesh,
        dof_to_entity,
        dirichlet_mask,
    })
}

impl<T: Real> DofSpace<T> {
    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<Mesh<T>> {
        &self.mesh
    }

    pub fn dof_count(&self) -> usize {
        self.dof_to_entity.len()
    }

    pub fn dof_to_entity(&self) -> &[DofEntity] {
        &self.dof_to_entity
    }

    /// Boundary flags per dof; `None` for scalar spaces.
    pub fn dirichlet_mask(&self) -> Option<&[bool]> {
        self.dirichlet_mask.as_deref()
    }

    pub fn components(&self) -> usize {
        if self.kind == ElementKind::P2Vector {
            2
        } else {
            1
        }
    }

    /// Number of scalar local basis functions per cell.
    pub fn local_nodes(&self) -> usize {
        match self.kind {
            ElementKind::P0 => 1,
            ElementKind::P1 => 3,
            ElementKind::P2 | ElementKind::P2Vector => 6,
        }
    }

    /// Global scalar node numbers of a cell, in local basis order.
    pub fn cell_nodes(&self, cell: usize) -> [usize; 6] {
        let v = self.mesh.cells()[cell];
        let e = self.mesh.cell_edges()[cell];
        let nv = self.mesh.num_vertices();
        match self.kind {
            ElementKind::P0 => [cell, 0, 0, 0, 0, 0],
            ElementKind::P1 => [v[0], v[1], v[2], 0, 0, 0],
            ElementKind::P2 | ElementKind::P2Vector => {
                [v[0], v[1], v[2], nv + e[0], nv + e[1], nv + e[2]]
            }
        }
    }

    /// Global dofs of a cell. Vector spaces list `2 a + c` for local node `a`.
    pub fn cell_dofs(&self, cell: usize) -> Vec<usize> {
        let nodes = self.cell_nodes(cell);
        let m = self.local_nodes();
        if self.kind == ElementKind::P2Vector {
            nodes[..m].iter().flat_map(|&s| [2 * s, 2 * s + 1]).collect()
        } else {
            nodes[..m].to_vec()
        }
    }

    /// Coordinates of a scalar P2 node (vertex or edge midpoint).
    pub fn node_coordinates(&self, node: usize) -> [T; 2] {
        let nv = self.mesh.num_vertices();
        if node < nv {
            self.mesh.vertices()[node]
        } else {
            self.mesh.edge_midpoint(node - nv)
        }
    }

    /// Interpolation point of a dof (cell centroid for P0).
    pub fn dof_coordinates(&self, dof: usize) -> [T; 2] {
        match self.dof_to_entity[dof].entity {
            Entity::Vertex(v) => self.mesh.vertices()[v],
            Entity::Edge(e) => self.mesh.edge_midpoint(e),
            Entity::Cell(c) => {
                let p = self.mesh.cell_coordinates(c);
                let third = T::one() / T::lit(3.0);
                [
                    (p[0][0] + p[1][0] + p[2][0]) * third,
                    (p[0][1] + p[1][1] + p[2][1]) * third,
                ]
            }
        }
    }

    /// Dofs not on the boundary (all dofs for scalar spaces), ascending.
    pub fn free_dofs(&self) -> Vec<usize> {
        match &self.dirichlet_mask {
            Some(mask) => (0..mask.len()).filter(|&i| !mask[i]).collect(),
            None => (0..self.dof_count()).collect(),
        }
    }

    pub fn boundary_dofs(&self) -> Vec<usize> {
        match &self.dirichlet_mask {
            Some(mask) => (0..mask.len()).filter(|&i| mask[i]).collect(),
            None => Vec::new(),
        }
    }

    /// Spaces built from meshes of the same level share every entity.
    pub fn same_mesh(&self, other: &DofSpace<T>) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
            || (self.mesh.level() == other.mesh.level()
                && self.mesh.num_cells() == other.mesh.num_cells())
    }

    pub(crate) fn require(&self, kinds: &[ElementKind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::UnsupportedElement(format!(
                "{} where {} expected",
                self.kind,
                kinds
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" or ")
            )))
        }
    }
}

/// Mesh, spaces and assembled/reduced systems for one level and element pair.
#[derive(Debug, Clone)]
pub struct Discretization<T> {
    pub level: u32,
    pub pair: ElementPair,
    pub velocity: DofSpace<T>,
    pub pressure: DofSpace<T>,
    pub system: AssembledSystem<T>,
    pub reduced: ReducedSystem<T>,
}

impl<T: Real> Discretization<T> {
    pub fn new<P: ElasticityProblem<T> + ?Sized>(level: u32, pair: ElementPair, problem: &P) -> Result<Self> {
        let mesh = Arc::new(crate::mesh::build_uniform_mesh(level)?);
        let velocity = build_space(mesh.clone(), ElementKind::P2Vector)?;
        let pressure = build_space(mesh, pair.pressure())?;
        let system = AssembledSystem::assemble(&velocity, &pressure, problem)?;
        let reduced = apply_dirichlet(&system, &velocity)?;
        Ok(Self {
            level,
            pair,
            velocity,
            pressure,
            system,
            reduced,
        })
    }
}
