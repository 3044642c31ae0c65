//! Canonical geometries of the patch families.
//!
//! All patches live on `[0, L]^2` with `L = 2H` (the unit square for the
//! default `H = 1/2`), except the four-quadrant corner patch and the L-shaped
//! domain. Thin strips have thickness `h`; orthogonal splits of a strip sit at
//! the midpoint of its long side.

use super::layout::{Layout, Rect};
use super::mesh::{Axis, Region};

/// Non-overlapped edge patch with one thin cell: `[0,L]x[0,h]` under `[0,L]x[h,L]`.
pub fn edge_single(l: f64, h: f64) -> Layout {
    Layout::new(vec![
        Rect::new(0.0, l, 0.0, h, Region::Flat).thin(Axis::Y),
        Rect::new(0.0, l, h, l, Region::Top),
    ])
}

/// Non-overlapped edge patch split at `x = L/2` in both rows.
pub fn edge_split(l: f64, h: f64) -> Layout {
    let m = 0.5 * l;
    Layout::new(vec![
        Rect::new(0.0, m, 0.0, h, Region::Flat).thin(Axis::Y),
        Rect::new(m, l, 0.0, h, Region::Flat).thin(Axis::Y),
        Rect::new(0.0, m, h, l, Region::Top),
        Rect::new(m, l, h, l, Region::Top),
    ])
}

/// Overlapped edge patch: a horizontal strip `[h,L]x[0,h]` and a vertical
/// strip `[0,h]x[h,L]` around the shape-regular block `[h,L]^2`. The corner
/// square `[0,h]^2` is not part of it.
pub fn overlapped_single(l: f64, h: f64) -> Layout {
    Layout::new(vec![
        Rect::new(h, l, 0.0, h, Region::Flat).thin(Axis::Y),
        Rect::new(0.0, h, h, l, Region::Flat).thin(Axis::X),
        Rect::new(h, l, h, l, Region::Top),
    ])
}

/// Overlapped edge patch with both strips split at their midpoint `(L+h)/2`.
pub fn overlapped_split(l: f64, h: f64) -> Layout {
    let m = 0.5 * (l + h);
    Layout::new(vec![
        Rect::new(h, m, 0.0, h, Region::Flat).thin(Axis::Y),
        Rect::new(m, l, 0.0, h, Region::Flat).thin(Axis::Y),
        Rect::new(0.0, h, h, m, Region::Flat).thin(Axis::X),
        Rect::new(0.0, h, m, l, Region::Flat).thin(Axis::X),
        Rect::new(h, m, h, m, Region::Top),
        Rect::new(m, l, h, m, Region::Top),
        Rect::new(h, m, m, l, Region::Top),
        Rect::new(m, l, m, l, Region::Top),
    ])
}

/// Adds the corner square `[0,h]^2` to an overlapped edge patch; everything
/// else becomes the overlapped part of the corner patch.
pub fn with_corner(edge: Layout, h: f64) -> Layout {
    let mut rects: Vec<Rect> = edge
        .rects
        .into_iter()
        .map(|r| r.in_region(Region::EdgePart))
        .collect();
    rects.insert(0, Rect::new(0.0, h, 0.0, h, Region::Corner));
    Layout::new(rects)
}

/// Three reflected copies of the unrefined corner patch glued around a
/// re-entrant corner at the origin; the corner region `[-h,h]^2 \ [-h,0)x[-h,0)`
/// holds three cells.
pub fn joined_corners(l: f64, h: f64) -> Layout {
    let quadrant = with_corner(overlapped_split(l, h), h);
    let mut out = Layout::default();
    for (fx, fy) in [(false, false), (true, false), (false, true)] {
        out.extend(quadrant.reflected(fx, fy));
    }
    out
}

/// The L-shaped domain `([-2,1]x[0,1]) U ([0,1]x[-1,0])` with the re-entrant
/// corner at the origin. The edge patch `[-2,0]x[0,1]` carries a thin strip
/// along `y = 0`, split at `x = -1`. The corner patch `[0,1]x[-1,1]` holds the
/// corner square `[0,h]^2`, thin strips continuing the tensor lines `x = h`
/// and `y = h`, and shape-regular cells; its strips are split at the
/// midpoints of their long sides.
pub fn l_shape(h: f64) -> Layout {
    let m = 0.5 * (1.0 + h);
    let flat = Region::Flat;
    let top = Region::Top;
    let part = Region::EdgePart;
    let mut rects = vec![
        Rect::new(-2.0, -1.0, 0.0, h, flat).thin(Axis::Y),
        Rect::new(-1.0, 0.0, 0.0, h, flat).thin(Axis::Y),
        Rect::new(-2.0, -1.0, h, m, top),
        Rect::new(-1.0, 0.0, h, m, top),
        Rect::new(-2.0, -1.0, m, 1.0, top),
        Rect::new(-1.0, 0.0, m, 1.0, top),
        Rect::new(0.0, h, 0.0, h, Region::Corner),
    ];
    let strips = [
        Rect::new(0.0, h, -1.0, -0.5, part).thin(Axis::X),
        Rect::new(0.0, h, -0.5, 0.0, part).thin(Axis::X),
        Rect::new(0.0, h, h, m, part).thin(Axis::X),
        Rect::new(0.0, h, m, 1.0, part).thin(Axis::X),
        Rect::new(h, m, 0.0, h, part).thin(Axis::Y),
        Rect::new(m, 1.0, 0.0, h, part).thin(Axis::Y),
    ];
    rects.extend(strips);
    for (y0, y1) in [(-1.0, -0.5), (-0.5, 0.0), (h, m), (m, 1.0)] {
        for (x0, x1) in [(h, m), (m, 1.0)] {
            rects.push(Rect::new(x0, x1, y0, y1, part));
        }
    }
    Layout::new(rects)
}
