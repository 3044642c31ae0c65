use super::layout::Layout;
use super::mesh::{Axis, Cell, CellKind, Mesh, Region};
use super::MeshError;

/// Bisects every thin cell `r` times across its thin direction, which halves
/// the short side each time. Corner-region cells are bisected in both
/// directions so the refined strips stay conforming with them.
pub fn refine_edge_strip(mesh: &Mesh, r: u32) -> Result<Mesh, MeshError> {
    if !mesh.cells.iter().any(|c| c.thin.is_some()) {
        return Err(MeshError::NoThinRegion);
    }
    if r == 0 {
        return Ok(mesh.clone());
    }
    let mut layout = Layout::from_mesh(mesh)?;
    for _ in 0..r {
        layout = refine_once(&layout);
    }
    layout.to_mesh()
}

pub(crate) fn refine_layout(layout: &Layout, r: u32) -> Layout {
    let mut out = layout.clone();
    for _ in 0..r {
        out = refine_once(&out);
    }
    out
}

fn refine_once(layout: &Layout) -> Layout {
    let mut rects = Vec::with_capacity(2 * layout.rects.len());
    for rect in &layout.rects {
        match (rect.thin, rect.region) {
            (Some(axis), _) => rects.extend(rect.bisect(axis)),
            (None, Region::Corner) => {
                for half in rect.bisect(Axis::X) {
                    rects.extend(half.bisect(Axis::Y));
                }
            }
            _ => rects.push(*rect),
        }
    }
    Layout::new(rects)
}

/// Splits every quadrilateral into two triangles of equal area.
///
/// Cells of strips that are thin in `y` get diagonals mirrored across the
/// midpoint of the strip's long side, so the strip triangulation is symmetric
/// under that reflection. Layers of a refined strip alternate the pattern,
/// counted from the layer next to the shape-regular cells (the side of larger
/// `y`). All other cells use the diagonal from the first to the third vertex.
pub fn triangulate(mesh: &Mesh) -> Result<Mesh, MeshError> {
    if !mesh.all_quads() {
        return Err(MeshError::AlreadyTriangulated);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut top = f64::NEG_INFINITY;
    for cell in mesh.cells.iter().filter(|c| c.thin == Some(Axis::Y)) {
        for &v in &cell.vertices {
            let p = mesh.vertices[v];
            lo = lo.min(p[0]);
            hi = hi.max(p[0]);
            top = top.max(p[1]);
        }
    }
    let centre = 0.5 * (lo + hi);

    let anti: Vec<bool> = mesh
        .cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            if cell.thin != Some(Axis::Y) {
                return false;
            }
            let ys = cell.vertices.iter().map(|&i| mesh.vertices[i][1]);
            let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
            let layer = ((top - y1) / (y1 - y0)).round() as i64;
            (mesh.cell_centroid(c)[0] < centre) != (layer % 2 == 1)
        })
        .collect();
    triangulate_pattern(mesh, &anti)
}

/// Splits quadrilateral `c` along the diagonal from its second to its fourth
/// vertex when `anti[c]`, otherwise from the first to the third.
pub fn triangulate_pattern(mesh: &Mesh, anti: &[bool]) -> Result<Mesh, MeshError> {
    if !mesh.all_quads() {
        return Err(MeshError::AlreadyTriangulated);
    }
    if anti.len() != mesh.num_cells() {
        return Err(MeshError::DegenerateGeometry(format!(
            "{} diagonal flags for {} cells",
            anti.len(),
            mesh.num_cells()
        )));
    }
    let mut cells = Vec::with_capacity(2 * mesh.num_cells());
    for (cell, &anti) in mesh.cells.iter().zip(anti) {
        let v = &cell.vertices;
        let tris = if anti {
            [[v[0], v[1], v[3]], [v[1], v[2], v[3]]]
        } else {
            [[v[0], v[1], v[2]], [v[0], v[2], v[3]]]
        };
        for t in tris {
            cells.push(Cell {
                kind: CellKind::Tri,
                vertices: t.to_vec(),
                region: cell.region,
                thin: cell.thin,
            });
        }
    }
    Mesh::new(mesh.vertices.clone(), cells)
}
