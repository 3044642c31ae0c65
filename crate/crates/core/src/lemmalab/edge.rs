//! Interface functions on the edge patch with two split rows and the
//! composition of the two partial inf-sup constants.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::assemble::{assemble_saddle, build_dofmap_with, Pair, PressureCoupling, Saddle};
use crate::field::{integrate_cells, integrate_segment, interpolate_pressure, interpolate_velocity, velocity_interpolation_residual};
use crate::patchgen::{build_patch, Family, Mesh, PatchSpec, Point, Region};
use crate::spectra::{compute_infsup, infsup_on_subspaces};

use super::flat::{combine, dot, mid_bubble, vertex_hat, PhiBasis, DEGREE};
use super::{verfuerth_compose, LemmaError, LemmaLine, IDENTITY_TOL, INTERPOLATION_TOL};

/// Edge patch `[0, 2H]^2` whose flat part `M = [0, 2H] x [0, h]` and top
/// part `M'` are both split at `x = H`; `gamma = {y = h}`.
struct EdgeFrame {
    big_h: f64,
    h: f64,
    mesh: Mesh,
    phi: PhiBasis,
}

impl EdgeFrame {
    fn new(h: f64) -> Result<EdgeFrame, LemmaError> {
        let spec = PatchSpec::new(Family::EdgeD, h);
        let mesh = build_patch(&spec)?;
        let big_h = spec.big_h;
        let l = 2.0 * big_h;
        let flat_over_top = h / (l - h);
        Ok(EdgeFrame {
            big_h,
            h,
            mesh,
            // M = [-H, H] x [-h/2, h/2] in local coordinates
            phi: PhiBasis {
                centre: [big_h, 0.5 * h],
                big_h,
                h: 0.5 * h,
                flat_over_top,
            },
        })
    }

    fn l(&self) -> f64 {
        2.0 * self.big_h
    }

    /// `f_i`: quadratic on `gamma` with `f_i(n_j) = delta_ij` at
    /// `n_j = (H/2, H, 3H/2)`, affine in `y` on each side, zero on the boundary.
    fn f(&self, i: usize, p: Point) -> (f64, Point) {
        let (bh, h, l) = (self.big_h, self.h, self.l());
        let (tx, dtx) = match i {
            0 => mid_bubble(p[0], 0.0, bh),
            1 => vertex_hat(p[0], bh, bh),
            2 => mid_bubble(p[0], bh, l),
            _ => panic!("interface index {i} out of range"),
        };
        let (ty, dty) = if p[1] <= h { (p[1] / h, 1.0 / h) } else { ((l - p[1]) / (l - h), -1.0 / (l - h)) };
        (tx * ty, [dtx * ty, tx * dty])
    }

    /// `w_0 = f_0 + f_2`, `w_1 = f_2 - f_0`, `w_2 = f_1 - (f_0 + f_2)/4`.
    fn w(&self, i: usize, p: Point) -> (f64, Point) {
        let c: [f64; 3] = match i {
            0 => [1.0, 0.0, 1.0],
            1 => [-1.0, 0.0, 1.0],
            2 => [-0.25, 1.0, -0.25],
            _ => panic!("interface index {i} out of range"),
        };
        combine((0..3).map(|k| (c[k], self.f(k, p))))
    }

    /// `alpha_0 = 3h q_0`, `alpha_1 = 2h q_1`, `alpha_2 = 4h q_2` with the
    /// half-thickness `h` of the flat part.
    fn alpha(&self, q: &[f64; 3]) -> [f64; 3] {
        let hl = self.phi.h;
        [3.0 * hl * q[0], 2.0 * hl * q[1], 4.0 * hl * q[2]]
    }

    fn wstar(&self, q: &[f64; 3], p: Point) -> (f64, Point) {
        let a = self.alpha(q);
        combine((0..3).map(|k| (a[k], self.w(k, p))))
    }

    /// `q_0 phi_0 + q_1 phi_{1,M} + q_2 phi_{2,M}`.
    fn q(&self, q: &[f64; 3], region: Region, p: Point) -> f64 {
        q[0] * self.phi.phi0(region) + q[1] * self.phi.on_flat(1, region, p) + q[2] * self.phi.on_flat(2, region, p)
    }

    /// `[[q]]` on `gamma`, flat side minus top side.
    fn q_jump(&self, q: &[f64; 3], x: f64) -> f64 {
        let p = [x, self.h];
        self.q(q, Region::Flat, p) - self.q(q, Region::Top, p)
    }

    /// `int_gamma f`, split at the kink `x = H`.
    fn gamma_integral(&self, f: impl Fn(Point) -> f64) -> f64 {
        let (bh, h, l) = (self.big_h, self.h, self.l());
        integrate_segment([0.0, h], [bh, h], 3, &f) + integrate_segment([bh, h], [l, h], 3, &f)
    }

    fn broken_saddle(&self) -> Result<(crate::assemble::DofMap, Saddle), LemmaError> {
        let dofs = build_dofmap_with(&self.mesh, Pair::Q2Q1, PressureCoupling::BrokenAtRegions)?;
        let saddle = assemble_saddle(&self.mesh, &dofs)?;
        Ok((dofs, saddle))
    }
}

pub struct EdgeBubbles {
    pub h: f64,
    pub lines: Vec<LemmaLine>,
}

/// The interface functions `w_i` against `phi_0, phi_{1,M}, phi_{2,M}` on
/// `gamma`, and `<d_y w*, q>_omega = |q|^2_omega`. Line integrals over
/// `gamma` are compared with the assembled divergence matrix on broken
/// pressures, which computes `<d_y w, q>_omega = <w, [[q]]>_gamma`.
pub fn check_edge_bubbles(h: f64) -> Result<EdgeBubbles, LemmaError> {
    let e = EdgeFrame::new(h)?;
    let (dofs, saddle) = e.broken_saddle()?;
    let tag = format!("EdgeD,h={h:e}");
    let bh = e.big_h;
    let jump = e.phi.phi0_jump();
    let mut lines = Vec::new();

    let ws: Vec<Vec<f64>> = (0..3).map(|i| interpolate_velocity(&dofs, |x| [0.0, e.w(i, x).0])).collect();
    let basis = |j: usize| -> Vec<f64> {
        interpolate_pressure(&e.mesh, &dofs, |r, x| match j {
            0 => e.phi.phi0(r),
            _ => e.phi.on_flat(j, r, x),
        })
    };
    let qs: Vec<Vec<f64>> = (0..3).map(basis).collect();
    let on_gamma = |i: usize, j: usize| {
        e.gamma_integral(|x| {
            let trace = match j {
                0 => jump,
                _ => e.phi.eval(j, x),
            };
            e.w(i, x).0 * trace
        })
    };
    let by_matrix = |i: usize, j: usize| dot(&qs[j], &saddle.b.mul_vec(&ws[i]));

    let names = ["[[phi0]]", "phi1", "phi2"];
    for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)] {
        let name = format!("<w{i}, {}>_gamma = 0 [{tag}]", names[j]);
        lines.push(LemmaLine::compare(format!("{name} quad"), 0.0, on_gamma(i, j), bh, IDENTITY_TOL));
        lines.push(LemmaLine::compare(format!("{name} fe"), 0.0, by_matrix(i, j), bh, IDENTITY_TOL));
    }
    for (i, j, want) in [(1, 1, 2.0 * bh / 3.0), (2, 2, bh / 3.0), (0, 0, 4.0 * bh / 3.0 * jump)] {
        let name = format!("<w{i}, {}>_gamma [{tag}]", names[j]);
        lines.push(LemmaLine::compare(format!("{name} quad"), want, on_gamma(i, j), want, IDENTITY_TOL));
        lines.push(LemmaLine::compare(format!("{name} fe"), want, by_matrix(i, j), want, IDENTITY_TOL));
    }

    let area_m = e.mesh.region_area(Region::Flat);
    let phi0_sq = integrate_cells(&e.mesh, DEGREE, |c, _, _| e.phi.phi0(e.mesh.cells[c].region).powi(2))?;
    let want = area_m * jump;
    lines.push(LemmaLine::compare(format!("|phi0|^2 = |M| [[phi0]] [{tag}] quad"), want, phi0_sq, want, IDENTITY_TOL));
    lines.push(LemmaLine::compare(
        format!("|phi0|^2 = |M| [[phi0]] [{tag}] fe"),
        want,
        saddle.mp.inner(&qs[0], &qs[0]),
        want,
        IDENTITY_TOL,
    ));

    for q in [[1.0, 0.0, 0.0], [1.0, 1.0, 1.0], [-0.6, 0.3, 1.4]] {
        let label = format!("<dy w*, q> = |q|^2 q=({},{},{}) [{tag}]", q[0], q[1], q[2]);
        let norm_q = integrate_cells(&e.mesh, DEGREE, |c, _, x| e.q(&q, e.mesh.cells[c].region, x).powi(2))?;
        let quad = integrate_cells(&e.mesh, DEGREE, |c, _, x| e.wstar(&q, x).1[1] * e.q(&q, e.mesh.cells[c].region, x))?;
        let line = e.gamma_integral(|x| e.wstar(&q, x).0 * e.q_jump(&q, x[0]));
        let wc = interpolate_velocity(&dofs, |x| [0.0, e.wstar(&q, x).0]);
        let qc = interpolate_pressure(&e.mesh, &dofs, |r, x| e.q(&q, r, x));
        let norm_q_fe = saddle.mp.inner(&qc, &qc);
        let fe = dot(&qc, &saddle.b.mul_vec(&wc));
        lines.push(LemmaLine::compare(format!("{label} quad"), norm_q, quad, norm_q, IDENTITY_TOL));
        lines.push(LemmaLine::compare(format!("{label} gamma"), norm_q, line, norm_q, IDENTITY_TOL));
        lines.push(LemmaLine::compare(format!("{label} fe"), norm_q_fe, fe, norm_q_fe, IDENTITY_TOL));
    }

    let mut residual: f64 = 0.0;
    for i in 0..3 {
        residual = residual.max(velocity_interpolation_residual(&e.mesh, &dofs, |x| [0.0, e.f(i, x).0], DEGREE)?);
    }
    lines.push(LemmaLine::compare(format!("f_i in Q2 velocity space [{tag}]"), 0.0, residual, 1.0, INTERPOLATION_TOL));
    Ok(EdgeBubbles { h, lines })
}

/// Orthonormal basis of the orthogonal complement of the columns of `c`.
pub(super) fn complement(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.nrows();
    let gram = c.transpose() * c;
    let inv = gram.try_inverse().expect("independent columns");
    let proj = DMatrix::identity(n, n) - c * inv * c.transpose();
    let proj = (&proj + proj.transpose()) * 0.5;
    let eig = SymmetricEigen::new(proj);
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    DMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}

#[derive(Clone, Debug)]
pub struct Verfuerth {
    pub h: f64,
    /// Inf-sup constant of all velocities against `B_omega = span{phi_0, phi_{1,M}, phi_{2,M}}`.
    pub beta1: f64,
    /// Inf-sup constant of `V_X` against `G_omega`, the complement of `B_omega`.
    pub beta2: f64,
    pub beta0: f64,
    /// Full constant on pressures broken across `gamma`.
    pub beta_broken: f64,
    /// Full constant on continuous pressures.
    pub beta_full: f64,
    /// `max |<q_B, div v>|` over `q_B` in `B_omega` and unknowns of `V_X`, relative.
    pub projection_defect: f64,
}

impl Verfuerth {
    pub fn lines(&self) -> Vec<LemmaLine> {
        let tag = format!("EdgeD,h={:e}", self.h);
        vec![
            LemmaLine::info(format!("beta1 (all V, B_omega) [{tag}]"), self.beta1),
            LemmaLine::info(format!("beta2 (V_X, G_omega) [{tag}]"), self.beta2),
            LemmaLine::info(format!("beta0 = b1 b2/(1+b1+b2) [{tag}]"), self.beta0),
            LemmaLine::at_most(format!("beta0 <= beta, broken pressures [{tag}]"), self.beta_broken, self.beta0),
            LemmaLine::at_most(format!("beta0 <= beta, continuous pressures [{tag}]"), self.beta_full, self.beta0),
            LemmaLine::info(format!("slack beta - beta0 [{tag}]"), self.beta_full - self.beta0),
            LemmaLine::compare(format!("<B_omega, div V_X> = 0 [{tag}]"), 0.0, self.projection_defect, 1.0, IDENTITY_TOL),
        ]
    }
}

/// Measures both partial constants of the composition on the edge patch and
/// compares the composed bound with the full inf-sup constant.
pub fn measure_verfuerth(h: f64) -> Result<Verfuerth, LemmaError> {
    let e = EdgeFrame::new(h)?;
    let (dofs, saddle) = e.broken_saddle()?;
    let np = saddle.n_p();
    let cols: Vec<Vec<f64>> = (0..3)
        .map(|j| {
            interpolate_pressure(&e.mesh, &dofs, |r, x| match j {
                0 => e.phi.phi0(r),
                _ => e.phi.on_flat(j, r, x),
            })
        })
        .collect();
    let b_omega = DMatrix::from_fn(np, 3, |i, j| cols[j][i]);

    let mut spanned = b_omega.clone().insert_column(3, 0.0);
    spanned.column_mut(3).copy_from_slice(&saddle.one_p);
    let mp = saddle.mp.to_dense();
    let g_omega = complement(&(&mp * &spanned));

    // V_P(M') in both components, vertical velocities of V_P(M), nothing on gamma
    let nv = dofs.n_v;
    let mut v_x = Vec::new();
    for (s, &node) in dofs.free_nodes.iter().enumerate() {
        let y = dofs.velocity_points[node][1];
        if y > e.h {
            v_x.push(s);
        }
    }
    v_x.extend(dofs.free_nodes.iter().enumerate().filter(|(_, &n)| {
        let y = dofs.velocity_points[n][1];
        y != e.h
    }).map(|(s, _)| nv + s));
    v_x.sort_unstable();
    let all: Vec<usize> = (0..2 * nv).collect();

    let beta1 = infsup_on_subspaces(&saddle, &all, &b_omega)?;
    let beta2 = infsup_on_subspaces(&saddle, &v_x, &g_omega)?;
    let beta0 = verfuerth_compose(beta1, beta2)?;
    let beta_broken = compute_infsup(&saddle, 1)?.beta;

    let cont = build_dofmap_with(&e.mesh, Pair::Q2Q1, PressureCoupling::Continuous)?;
    let beta_full = compute_infsup(&assemble_saddle(&e.mesh, &cont)?, 1)?.beta;

    let mut defect: f64 = 0.0;
    for q in &cols {
        let qn = saddle.mp.inner(q, q).sqrt();
        let bq = saddle.b.tr_mul_vec(q);
        for &j in &v_x {
            let vn = saddle.a.get(j, j).sqrt();
            defect = defect.max(bq[j].abs() / (qn * vn));
        }
    }
    Ok(Verfuerth {
        h,
        beta1,
        beta2,
        beta0,
        beta_broken,
        beta_full,
        projection_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interface_functions_are_nodal_on_gamma() {
        let e = EdgeFrame::new(1e-2).unwrap();
        let n = [0.25, 0.5, 0.75];
        for i in 0..3 {
            for (j, &x) in n.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e.f(i, [x, 1e-2]).0 - want).abs() < 1e-15);
            }
            assert_eq!(e.f(i, [0.3, 0.0]).0, 0.0);
            assert!(e.f(i, [0.3, 1.0]).0.abs() < 1e-15);
        }
    }

    #[test]
    fn edge_values_at_half_width() {
        let r = check_edge_bubbles(1e-3).unwrap();
        for l in &r.lines {
            assert!(l.passed(), "{l}");
        }
        let w1 = r.lines.iter().find(|l| l.name.starts_with("<w1, phi1>") && l.name.ends_with("quad")).unwrap();
        assert!((w1.computed - 1.0 / 3.0).abs() < 1e-13);
        let w2 = r.lines.iter().find(|l| l.name.starts_with("<w2, phi2>") && l.name.ends_with("quad")).unwrap();
        assert!((w2.computed - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn complement_is_orthogonal() {
        let c = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let g = complement(&c);
        assert_eq!(g.ncols(), 2);
        assert!((c.transpose() * &g).norm() < 1e-14);
        assert!((g.transpose() * &g - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn composition_is_a_lower_bound() {
        let v = measure_verfuerth(1e-2).unwrap();
        assert!(v.beta1 > 0.0 && v.beta2 > 0.0);
        assert!(v.beta0 <= v.beta_broken && v.beta_broken <= v.beta_full + 1e-12);
        assert!(v.projection_defect < 1e-12);
    }
}
