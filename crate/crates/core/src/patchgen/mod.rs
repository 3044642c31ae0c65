//! Parametrised anisotropic patch meshes.
//!
//! A [`PatchSpec`] names a family from the geometry registry together with
//! the thin-cell size `h`, the half-width `H` of the long direction and a
//! strip refinement level `r`. [`build_patch`] turns it into a conforming
//! [`Mesh`] with region tags for the patch decompositions used by the
//! stability analysis.

mod conformity;
mod dump;
mod layout;
mod mesh;
mod refine;
mod registry;

use std::fmt;
use std::str::FromStr;

pub use conformity::{validate_conformity, Violation};
pub use dump::{read_mesh, write_mesh};
pub use layout::{Layout, Rect};
pub use mesh::{local_edge, AffineMap, Axis, Cell, CellKind, Mesh, Point, Region};
pub use refine::{refine_edge_strip, triangulate, triangulate_pattern};

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("unknown patch family `{0}`")]
    UnknownFamily(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("construction produced a nonconforming mesh: {0}")]
    NonconformingConstruction(String),
    #[error("mesh has no thin cells to refine")]
    NoThinRegion,
    #[error("mesh is already triangulated")]
    AlreadyTriangulated,
    #[error("invalid refinement level {r} for family {family}")]
    InvalidRefinement { family: Family, r: u32 },
    #[error("mesh parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    EdgeA,
    EdgeB,
    EdgeC,
    EdgeD,
    EdgeE,
    EdgeF,
    CornerA,
    CornerB,
    CornerC,
    CornerD,
    LShape,
    RefinedEdge,
    RefinedOverlappedEdge,
    RefinedCorner,
    TriEdge,
    TriOverlappedEdge,
    TriCorner,
    TriEdgeBad,
}

impl Family {
    pub const ALL: [Family; 18] = [
        Family::EdgeA,
        Family::EdgeB,
        Family::EdgeC,
        Family::EdgeD,
        Family::EdgeE,
        Family::EdgeF,
        Family::CornerA,
        Family::CornerB,
        Family::CornerC,
        Family::CornerD,
        Family::LShape,
        Family::RefinedEdge,
        Family::RefinedOverlappedEdge,
        Family::RefinedCorner,
        Family::TriEdge,
        Family::TriOverlappedEdge,
        Family::TriCorner,
        Family::TriEdgeBad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::EdgeA => "EdgeA",
            Family::EdgeB => "EdgeB",
            Family::EdgeC => "EdgeC",
            Family::EdgeD => "EdgeD",
            Family::EdgeE => "EdgeE",
            Family::EdgeF => "EdgeF",
            Family::CornerA => "CornerA",
            Family::CornerB => "CornerB",
            Family::CornerC => "CornerC",
            Family::CornerD => "CornerD",
            Family::LShape => "LShape",
            Family::RefinedEdge => "RefinedEdge",
            Family::RefinedOverlappedEdge => "RefinedOverlappedEdge",
            Family::RefinedCorner => "RefinedCorner",
            Family::TriEdge => "TriEdge",
            Family::TriOverlappedEdge => "TriOverlappedEdge",
            Family::TriCorner => "TriCorner",
            Family::TriEdgeBad => "TriEdgeBad",
        }
    }

    /// Families whose partition breaks one of the two stability hypotheses
    /// (no orthogonal split of the thin cells, or an unrefined corner region).
    pub fn violates_hypothesis(self) -> bool {
        matches!(
            self,
            Family::EdgeA
                | Family::EdgeB
                | Family::EdgeC
                | Family::CornerA
                | Family::CornerB
                | Family::TriEdgeBad
        )
    }

    /// Families whose exact geometry is a best-effort reconstruction; they
    /// are only checked qualitatively (decay versus boundedness).
    pub fn geometry_reconstructed(self) -> bool {
        !matches!(
            self,
            Family::EdgeD
                | Family::EdgeE
                | Family::EdgeF
                | Family::LShape
                | Family::RefinedEdge
                | Family::RefinedOverlappedEdge
        )
    }

    pub fn is_triangulated(self) -> bool {
        matches!(
            self,
            Family::TriEdge | Family::TriOverlappedEdge | Family::TriCorner | Family::TriEdgeBad
        )
    }

    pub fn requires_refinement(self) -> bool {
        matches!(
            self,
            Family::RefinedEdge | Family::RefinedOverlappedEdge | Family::RefinedCorner
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Family, MeshError> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| MeshError::UnknownFamily(s.to_string()))
    }
}

/// Declarative description of one patch configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchSpec {
    pub family: Family,
    /// Short side of the anisotropic cells.
    pub h: f64,
    /// Half-width of the long direction.
    pub big_h: f64,
    /// Strip refinement level.
    pub r: u32,
    pub triangulated: bool,
}

impl PatchSpec {
    pub fn new(family: Family, h: f64) -> PatchSpec {
        PatchSpec {
            family,
            h,
            big_h: 0.5,
            r: if family.requires_refinement() { 1 } else { 0 },
            triangulated: family.is_triangulated(),
        }
    }

    pub fn with_refinement(mut self, r: u32) -> PatchSpec {
        self.r = r;
        self
    }

    pub fn with_half_width(mut self, big_h: f64) -> PatchSpec {
        self.big_h = big_h;
        self
    }

    pub fn with_triangulation(mut self, triangulated: bool) -> PatchSpec {
        self.triangulated = triangulated;
        self
    }

    fn check(&self) -> Result<(), MeshError> {
        if !(self.h > 0.0 && self.big_h > 0.0 && self.h.is_finite() && self.big_h.is_finite()) {
            return Err(MeshError::DegenerateGeometry(format!(
                "h = {} and H = {} must be positive",
                self.h, self.big_h
            )));
        }
        if self.h >= self.big_h {
            return Err(MeshError::DegenerateGeometry(format!(
                "h = {} is not smaller than H = {}",
                self.h, self.big_h
            )));
        }
        if self.family.requires_refinement() && self.r == 0 {
            return Err(MeshError::InvalidRefinement {
                family: self.family,
                r: self.r,
            });
        }
        if self.family.is_triangulated() && !self.triangulated {
            return Err(MeshError::DegenerateGeometry(format!(
                "{} is always triangulated",
                self.family
            )));
        }
        Ok(())
    }
}

/// Builds the conforming mesh of a registry family.
pub fn build_patch(spec: &PatchSpec) -> Result<Mesh, MeshError> {
    spec.check()?;
    let (h, l) = (spec.h, 2.0 * spec.big_h);
    let base = match spec.family {
        Family::EdgeA | Family::TriEdgeBad => registry::edge_single(l, h),
        Family::EdgeB => refine::refine_layout(&registry::overlapped_single(l, h), 1),
        Family::EdgeC => registry::overlapped_single(l, h),
        Family::EdgeD | Family::RefinedEdge | Family::TriEdge => registry::edge_split(l, h),
        Family::EdgeE | Family::TriOverlappedEdge => {
            refine::refine_layout(&registry::edge_split(l, h), 1)
        }
        Family::EdgeF | Family::RefinedOverlappedEdge => registry::overlapped_split(l, h),
        Family::CornerA | Family::RefinedCorner => {
            registry::with_corner(registry::overlapped_split(l, h), h)
        }
        Family::CornerB => refine::refine_layout(
            &registry::with_corner(registry::overlapped_single(l, h), h),
            1,
        ),
        Family::CornerC | Family::TriCorner => refine::refine_layout(
            &registry::with_corner(registry::overlapped_split(l, h), h),
            1,
        ),
        Family::CornerD => registry::joined_corners(l, h),
        Family::LShape => refine::refine_layout(&registry::l_shape(h), 1),
    };
    let layout = refine::refine_layout(&base, spec.r);
    let mut mesh = layout.to_mesh()?;
    if spec.triangulated {
        mesh = triangulate(&mesh)?;
    }
    let report = validate_conformity(&mesh);
    if let Some(v) = report.first() {
        return Err(MeshError::NonconformingConstruction(v.to_string()));
    }
    Ok(mesh)
}
