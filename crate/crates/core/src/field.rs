//! Discrete fields on a mesh: nodal interpolation of closures, pointwise
//! evaluation and quadrature.
//!
//! Velocity coefficient vectors follow the [`DofMap`] layout (free unknowns
//! only, `x` components first). Pressure closures receive the region of the
//! cell they are sampled from, so functions that jump across region
//! interfaces can be interpolated into broken pressure spaces.

use crate::assemble::DofMap;
use crate::elements::{gauss_line, gauss_rule, ElementError, QuadratureRule};
use crate::patchgen::{CellKind, Mesh, Point, Region};

/// Nodal interpolant of `f` on the free velocity unknowns.
pub fn interpolate_velocity(dofs: &DofMap, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
    let mut out = vec![0.0; dofs.velocity_dim()];
    for (s, &node) in dofs.free_nodes.iter().enumerate() {
        let v = f(dofs.velocity_points[node]);
        out[s] = v[0];
        out[dofs.n_v + s] = v[1];
    }
    out
}

/// Nodal interpolant of `f` on the pressure unknowns. Each unknown is sampled
/// with the region of the first cell that uses it.
pub fn interpolate_pressure(mesh: &Mesh, dofs: &DofMap, f: impl Fn(Region, Point) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; dofs.n_p];
    let mut done = vec![false; dofs.n_p];
    for (c, local) in dofs.cell_pressure.iter().enumerate() {
        for &g in local {
            if !done[g] {
                out[g] = f(mesh.cells[c].region, dofs.pressure_points[g]);
                done[g] = true;
            }
        }
    }
    out
}

/// Value and gradient (`grad[comp] = [d/dx, d/dy]`) of a velocity field at
/// reference point `xi` of cell `c`.
pub fn velocity_at(mesh: &Mesh, dofs: &DofMap, coeffs: &[f64], c: usize, xi: Point) -> ([f64; 2], [[f64; 2]; 2]) {
    let elem = dofs.velocity_element();
    let map = &mesh.cell_maps[c];
    let vals = elem.shape_values(xi);
    let grads = elem.shape_gradients(xi);
    let mut u = [0.0; 2];
    let mut g = [[0.0; 2]; 2];
    for (k, &node) in dofs.cell_velocity[c].iter().enumerate() {
        let Some(s) = dofs.free_index[node] else { continue };
        let dg = map.push_gradient(grads[k]);
        for comp in 0..2 {
            let a = coeffs[comp * dofs.n_v + s];
            u[comp] += a * vals[k];
            g[comp][0] += a * dg[0];
            g[comp][1] += a * dg[1];
        }
    }
    (u, g)
}

/// Value and gradient of a pressure field at reference point `xi` of cell `c`.
pub fn pressure_at(mesh: &Mesh, dofs: &DofMap, coeffs: &[f64], c: usize, xi: Point) -> (f64, [f64; 2]) {
    let elem = dofs.pressure_element();
    let map = &mesh.cell_maps[c];
    let vals = elem.shape_values(xi);
    let grads = elem.shape_gradients(xi);
    let mut p = 0.0;
    let mut g = [0.0; 2];
    for (k, &dof) in dofs.cell_pressure[c].iter().enumerate() {
        let dg = map.push_gradient(grads[k]);
        p += coeffs[dof] * vals[k];
        g[0] += coeffs[dof] * dg[0];
        g[1] += coeffs[dof] * dg[1];
    }
    (p, g)
}

/// `sum_c int_c f(c, xi, x) dx` with a Gauss rule of the given degree; `xi`
/// is the reference point and `x` its physical image.
pub fn integrate_cells(
    mesh: &Mesh,
    degree: u32,
    f: impl Fn(usize, Point, Point) -> f64,
) -> Result<f64, ElementError> {
    let mut rules: Vec<(CellKind, QuadratureRule)> = Vec::new();
    for cell in &mesh.cells {
        if !rules.iter().any(|(k, _)| *k == cell.kind) {
            rules.push((cell.kind, gauss_rule(cell.kind, degree)?));
        }
    }
    Ok(integrate_cells_by(mesh, |kind| &rules.iter().find(|(k, _)| *k == kind).unwrap().1, f))
}

/// Like [`integrate_cells`] with a caller-supplied rule for every cell.
pub fn integrate_cells_with(mesh: &Mesh, rule: &QuadratureRule, f: impl Fn(usize, Point, Point) -> f64) -> f64 {
    integrate_cells_by(mesh, |_| rule, f)
}

fn integrate_cells_by<'r>(
    mesh: &Mesh,
    rule: impl Fn(CellKind) -> &'r QuadratureRule,
    f: impl Fn(usize, Point, Point) -> f64,
) -> f64 {
    let mut total = 0.0;
    for (c, cell) in mesh.cells.iter().enumerate() {
        let map = &mesh.cell_maps[c];
        let jac = map.det().abs();
        for (xi, w) in rule(cell.kind).iter() {
            total += w * jac * f(c, xi, map.apply(xi));
        }
    }
    total
}

/// Line integral of `f` over the segment `[a, b]` with `n` Gauss points.
pub fn integrate_segment(a: Point, b: Point, n: usize, f: impl Fn(Point) -> f64) -> f64 {
    let (t, w) = gauss_line(n);
    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    t.iter()
        .zip(&w)
        .map(|(&t, &w)| w * f([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]))
        .sum::<f64>()
        * len
}

/// Largest `|f - I f|` over the quadrature points of every cell and over the
/// Dirichlet nodes (where the interpolant is zero), relative to the largest
/// sampled `|f|`.
pub fn velocity_interpolation_residual(
    mesh: &Mesh,
    dofs: &DofMap,
    f: impl Fn(Point) -> [f64; 2],
    degree: u32,
) -> Result<f64, ElementError> {
    let coeffs = interpolate_velocity(dofs, &f);
    let rule = gauss_rule(dofs.pair.cell_kind(), degree)?;
    let mut gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..mesh.num_cells() {
        for (xi, _) in rule.iter() {
            let want = f(mesh.cell_maps[c].apply(xi));
            let (got, _) = velocity_at(mesh, dofs, &coeffs, c, xi);
            for k in 0..2 {
                gap = gap.max((want[k] - got[k]).abs());
                scale = scale.max(want[k].abs());
            }
        }
    }
    for (node, &d) in dofs.dirichlet.iter().enumerate() {
        if d {
            let v = f(dofs.velocity_points[node]);
            gap = gap.max(v[0].abs()).max(v[1].abs());
        }
    }
    Ok(if scale > 0.0 { gap / scale } else { gap })
}

/// Like [`velocity_interpolation_residual`] for pressures.
pub fn pressure_interpolation_residual(
    mesh: &Mesh,
    dofs: &DofMap,
    f: impl Fn(Region, Point) -> f64,
    degree: u32,
) -> Result<f64, ElementError> {
    let coeffs = interpolate_pressure(mesh, dofs, &f);
    let rule = gauss_rule(dofs.pair.cell_kind(), degree)?;
    let mut gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..mesh.num_cells() {
        let region = mesh.cells[c].region;
        for (xi, _) in rule.iter() {
            let want = f(region, mesh.cell_maps[c].apply(xi));
            let (got, _) = pressure_at(mesh, dofs, &coeffs, c, xi);
            gap = gap.max((want - got).abs());
            scale = scale.max(want.abs());
        }
    }
    Ok(if scale > 0.0 { gap / scale } else { gap })
}
