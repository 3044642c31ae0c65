//! The flat macro-element `M = [-H,H] x [-h,h]` in local coordinates, its
//! orthogonal pressure basis and the bubble constructions controlling it.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assemble::{assemble_saddle, build_dofmap, DofMap, Pair, Saddle};
use crate::field::{
    integrate_cells, interpolate_pressure, interpolate_velocity, pressure_interpolation_residual,
    velocity_at, velocity_interpolation_residual,
};
use crate::patchgen::{triangulate, Axis, Layout, Mesh, MeshError, Point, Rect, Region};

use super::{LemmaError, LemmaLine, IDENTITY_TOL, INTERPOLATION_TOL};

/// Gauss degree for all lemma integrals: products of biquadratic gradients
/// are of degree 4 in each variable.
pub(super) const DEGREE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// Two cells, split at `x = 0`.
    Two,
    /// Four cells, split at `x = 0` and `y = 0`.
    Four,
}

impl Split {
    pub fn label(self) -> &'static str {
        match self {
            Split::Two => "split2",
            Split::Four => "split4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatMacro {
    pub big_h: f64,
    pub h: f64,
    pub split: Split,
}

impl FlatMacro {
    pub fn new(big_h: f64, h: f64, split: Split) -> FlatMacro {
        FlatMacro { big_h, h, split }
    }

    pub fn area(&self) -> f64 {
        4.0 * self.big_h * self.h
    }

    pub fn layout(&self) -> Layout {
        let (bh, h) = (self.big_h, self.h);
        let ys: &[(f64, f64)] = match self.split {
            Split::Two => &[(-h, h)],
            Split::Four => &[(-h, 0.0), (0.0, h)],
        };
        let mut rects = Vec::new();
        for &(y0, y1) in ys {
            for (x0, x1) in [(-bh, 0.0), (0.0, bh)] {
                rects.push(Rect::new(x0, x1, y0, y1, Region::Flat).thin(Axis::Y));
            }
        }
        Layout::new(rects)
    }

    pub fn mesh(&self) -> Result<Mesh, MeshError> {
        self.layout().to_mesh()
    }

    /// Triangulation with diagonals mirrored across `x = 0`.
    pub fn triangulated_mesh(&self) -> Result<Mesh, MeshError> {
        triangulate(&self.mesh()?)
    }

    pub fn phi(&self) -> PhiBasis {
        PhiBasis {
            centre: [0.0, 0.0],
            big_h: self.big_h,
            h: self.h,
            flat_over_top: 0.0,
        }
    }

    pub(super) fn tag(&self) -> String {
        format!("{},h={:e}", self.split.label(), self.h)
    }

    /// Bubble `b_i` (`i = 0, 1, 2`) at the interior node `p_i` on `y = 0`:
    /// value and gradient.
    pub fn bubble(&self, i: usize, p: Point) -> (f64, Point) {
        let (bh, h) = (self.big_h, self.h);
        let (fx, dfx) = match i {
            0 => mid_bubble(p[0], -bh, 0.0),
            1 => vertex_hat(p[0], 0.0, bh),
            2 => mid_bubble(p[0], 0.0, bh),
            _ => panic!("bubble index {i} out of range"),
        };
        let y = p[1];
        let (fy, dfy) = if y.abs() <= h { (1.0 - y * y / (h * h), -2.0 * y / (h * h)) } else { (0.0, 0.0) };
        (fx * fy, [dfx * fy, fx * dfy])
    }

    /// `v_3 = b_2 + b_0`, `v_4 = b_2 - b_0`, `v_5 = b_1 - (b_0 + b_2)/4`.
    pub fn v(&self, i: usize, p: Point) -> (f64, Point) {
        let w: [f64; 3] = match i {
            3 => [1.0, 0.0, 1.0],
            4 => [-1.0, 0.0, 1.0],
            5 => [-0.25, 1.0, -0.25],
            _ => panic!("v index {i} out of range"),
        };
        combine((0..3).map(|k| (w[k], self.bubble(k, p))))
    }

    /// `alpha_3, alpha_4, alpha_5`.
    pub fn alpha(&self) -> [f64; 3] {
        let s3 = 3.0_f64.sqrt();
        [0.75 * self.h, 0.5 * s3 * self.h, s3 * self.h]
    }

    /// `sum_i alpha_i q_i v_i` over `i = 3..5`.
    pub fn vstar1(&self, q: &[f64], p: Point) -> (f64, Point) {
        let a = self.alpha();
        combine((0..3).map(|k| (a[k] * q[k], self.v(k + 3, p))))
    }

    /// The y-compressed odd copy built from `q_6..q_8` with `alpha_i = alpha_{i-3} / 2`.
    pub fn vstar2(&self, q: &[f64], p: Point) -> (f64, Point) {
        let half: Vec<f64> = q.iter().map(|v| 0.5 * v).collect();
        let h = self.h;
        if p[1] > 0.0 {
            let (f, g) = self.vstar1(&half, [p[0], 2.0 * p[1] - h]);
            (f, [g[0], 2.0 * g[1]])
        } else {
            let (f, g) = self.vstar1(&half, [p[0], 2.0 * p[1] + h]);
            (-f, [-g[0], -2.0 * g[1]])
        }
    }

    /// `v* = vstar1(q_3..q_5) + vstar2(q_6..q_8)`; `q` has three or six entries.
    pub fn vstar(&self, q: &[f64], p: Point) -> (f64, Point) {
        let one = self.vstar1(&q[..3], p);
        if q.len() > 3 {
            combine([(1.0, one), (1.0, self.vstar2(&q[3..6], p))])
        } else {
            one
        }
    }
}

/// Quadratic Lagrange function of the midpoint of `[a, b]`, zero outside.
pub(super) fn mid_bubble(x: f64, a: f64, b: f64) -> (f64, f64) {
    if x < a || x > b {
        return (0.0, 0.0);
    }
    let w = b - a;
    let t = (x - a) / w;
    (4.0 * t * (1.0 - t), 4.0 * (1.0 - 2.0 * t) / w)
}

/// Quadratic Lagrange function of the vertex `c` shared by `[c-w, c]` and `[c, c+w]`.
pub(super) fn vertex_hat(x: f64, c: f64, w: f64) -> (f64, f64) {
    let t = (x - c).abs() / w;
    if t > 1.0 {
        return (0.0, 0.0);
    }
    let sign = if x >= c { 1.0 } else { -1.0 };
    (1.0 - 3.0 * t + 2.0 * t * t, sign * (-3.0 + 4.0 * t) / w)
}

pub(super) fn combine(terms: impl IntoIterator<Item = (f64, (f64, Point))>) -> (f64, Point) {
    let mut f = 0.0;
    let mut g = [0.0; 2];
    for (c, (v, d)) in terms {
        f += c * v;
        g[0] += c * d[0];
        g[1] += c * d[1];
    }
    (f, g)
}

/// The functions `phi_0 .. phi_8` of the flat-part decomposition, placed on a
/// flat part with centre `centre`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiBasis {
    pub centre: Point,
    pub big_h: f64,
    pub h: f64,
    /// `|M| / |M'|`, the weight of `phi_0` on the shape-regular part.
    pub flat_over_top: f64,
}

impl PhiBasis {
    fn local(&self, p: Point) -> Point {
        [p[0] - self.centre[0], p[1] - self.centre[1]]
    }

    /// `phi_i` for `i = 1..8`, in the coordinates of the flat part.
    pub fn eval(&self, i: usize, p: Point) -> f64 {
        let [x, y] = self.local(p);
        let (bh, h) = (self.big_h, self.h);
        let s3 = 3.0_f64.sqrt();
        let p1 = x / bh;
        let p2 = 1.0 - 2.0 * x.abs() / bh;
        let p3 = -y / h;
        let p6 = if y > 0.0 { -(2.0 * y - h) / h } else { (2.0 * y + h) / h };
        match i {
            1 => p1,
            2 => p2,
            3 => p3,
            4 => s3 * p1 * p3,
            5 => s3 * p2 * p3,
            6 => p6,
            7 => s3 * p1 * p6,
            8 => s3 * p2 * p6,
            _ => panic!("phi index {i} out of range"),
        }
    }

    /// `phi_0 = chi_M - |M|/|M'| chi_M'`.
    pub fn phi0(&self, region: Region) -> f64 {
        match region {
            Region::Flat => 1.0,
            _ => -self.flat_over_top,
        }
    }

    /// `phi_{i,M}`: `phi_i` on the flat part, zero elsewhere.
    pub fn on_flat(&self, i: usize, region: Region, p: Point) -> f64 {
        if region == Region::Flat {
            self.eval(i, p)
        } else {
            0.0
        }
    }

    /// `[[phi_0]]` across the interface.
    pub fn phi0_jump(&self) -> f64 {
        1.0 + self.flat_over_top
    }
}

pub(super) struct Discrete {
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub saddle: Saddle,
}

impl Discrete {
    pub fn new(mesh: Mesh) -> Result<Discrete, LemmaError> {
        let dofs = build_dofmap(&mesh, Pair::for_mesh(&mesh)?)?;
        let saddle = assemble_saddle(&mesh, &dofs)?;
        Ok(Discrete { mesh, dofs, saddle })
    }

    /// `(0, f)` on the velocity unknowns.
    pub fn y_velocity(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        interpolate_velocity(&self.dofs, |p| [0.0, f(p)])
    }

    pub fn pressure(&self, f: impl Fn(Region, Point) -> f64) -> Vec<f64> {
        interpolate_pressure(&self.mesh, &self.dofs, f)
    }

    /// `<q, div v>` through the assembled divergence matrix.
    pub fn pairing(&self, q: &[f64], v: &[f64]) -> f64 {
        dot(q, &self.saddle.b.mul_vec(v))
    }
}

pub(super) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub struct PhiGram {
    pub quadrature: DMatrix<f64>,
    pub matrix: DMatrix<f64>,
    pub lines: Vec<LemmaLine>,
}

/// Gram matrix of `phi_1..phi_5` (two cells) or `phi_1..phi_8` (four cells),
/// expected `delta_ij |M| / 3`, together with the zero means.
pub fn check_phi_gram(m: &FlatMacro) -> Result<PhiGram, LemmaError> {
    let n = match m.split {
        Split::Two => 5,
        Split::Four => 8,
    };
    let phi = m.phi();
    let disc = Discrete::new(m.mesh()?)?;
    let diag = m.area() / 3.0;
    let tag = m.tag();

    let mut quadrature = DMatrix::zeros(n, n);
    let mut means_q: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let v = integrate_cells(&disc.mesh, DEGREE, |_, _, x| phi.eval(i + 1, x) * phi.eval(j + 1, x))?;
            quadrature[(i, j)] = v;
            quadrature[(j, i)] = v;
        }
        let mean = integrate_cells(&disc.mesh, DEGREE, |_, _, x| phi.eval(i + 1, x))?;
        means_q = means_q.max(mean.abs());
    }

    let coeffs: Vec<Vec<f64>> = (1..=n).map(|i| disc.pressure(|_, x| phi.eval(i, x))).collect();
    let mut residual: f64 = 0.0;
    for i in 1..=n {
        residual = residual.max(pressure_interpolation_residual(&disc.mesh, &disc.dofs, |_, x| phi.eval(i, x), DEGREE)?);
    }
    let matrix = DMatrix::from_fn(n, n, |i, j| disc.saddle.mp.inner(&coeffs[i], &coeffs[j]));
    let means_m = coeffs
        .iter()
        .map(|c| disc.saddle.mp.inner(c, &disc.saddle.one_p).abs())
        .fold(0.0, f64::max);

    let mut lines = Vec::new();
    for (route, g, mean) in [("quad", &quadrature, means_q), ("fe", &matrix, means_m)] {
        let (worst_diag, _) = (0..n)
            .map(|i| (g[(i, i)], (g[(i, i)] - diag).abs()))
            .fold((diag, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| g[(i, j)].abs())
            .fold(0.0, f64::max);
        lines.push(LemmaLine::compare(format!("phi gram diagonal [{tag}] {route}"), diag, worst_diag, diag, IDENTITY_TOL));
        lines.push(LemmaLine::compare(format!("phi gram off-diagonal [{tag}] {route}"), 0.0, off, diag, IDENTITY_TOL));
        lines.push(LemmaLine::compare(format!("phi zero mean [{tag}] {route}"), 0.0, mean, m.area(), IDENTITY_TOL));
    }
    lines.push(LemmaLine::compare(format!("phi in Q1 pressure space [{tag}]"), 0.0, residual, 1.0, INTERPOLATION_TOL));
    Ok(PhiGram {
        quadrature,
        matrix,
        lines,
    })
}

pub struct PairingQuad {
    /// `<d_y v_i, phi_j>` for `i, j = 3..5` by quadrature.
    pub quadrature: DMatrix<f64>,
    pub matrix: DMatrix<f64>,
    pub lines: Vec<LemmaLine>,
}

/// Expected diagonal of `<d_y v_i, phi_j>`.
pub fn pairing_values(big_h: f64) -> [f64; 3] {
    let s3 = 3.0_f64.sqrt();
    [16.0 * big_h / 9.0, 8.0 * big_h / (3.0 * s3), 4.0 * big_h / (3.0 * s3)]
}

/// `<d_y v_i, phi_j>_M` for `i, j = 3..5` on the two-cell macro-element.
pub fn check_pairing_quad(m: &FlatMacro) -> Result<PairingQuad, LemmaError> {
    let m = FlatMacro { split: Split::Two, ..*m };
    let phi = m.phi();
    let disc = Discrete::new(m.mesh()?)?;
    let tag = m.tag();

    let quadrature = DMatrix::from_fn(3, 3, |i, j| {
        integrate_cells(&disc.mesh, DEGREE, |_, _, x| m.v(i + 3, x).1[1] * phi.eval(j + 3, x)).unwrap()
    });
    let vs: Vec<Vec<f64>> = (3..=5).map(|i| disc.y_velocity(|x| m.v(i, x).0)).collect();
    let qs: Vec<Vec<f64>> = (3..=5).map(|j| disc.pressure(|_, x| phi.eval(j, x))).collect();
    let matrix = DMatrix::from_fn(3, 3, |i, j| disc.pairing(&qs[j], &vs[i]));
    let mut residual: f64 = 0.0;
    for k in 0..3 {
        residual = residual.max(velocity_interpolation_residual(&disc.mesh, &disc.dofs, |x| [0.0, m.bubble(k, x).0], DEGREE)?);
    }

    let want = pairing_values(m.big_h);
    let mut lines = Vec::new();
    for (route, p) in [("quad", &quadrature), ("fe", &matrix)] {
        for i in 0..3 {
            lines.push(LemmaLine::compare(
                format!("<dy v{}, phi{}> [{tag}] {route}", i + 3, i + 3),
                want[i],
                p[(i, i)],
                want[i],
                IDENTITY_TOL,
            ));
        }
        let off = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| p[(i, j)].abs())
            .fold(0.0, f64::max);
        lines.push(LemmaLine::compare(format!("<dy v_i, phi_j> off-diagonal [{tag}] {route}"), 0.0, off, want[0], IDENTITY_TOL));
    }
    lines.push(LemmaLine::compare(format!("bubbles b_i in Q2 velocity space [{tag}]"), 0.0, residual, 1.0, INTERPOLATION_TOL));
    Ok(PairingQuad {
        quadrature,
        matrix,
        lines,
    })
}

#[derive(Clone, Debug)]
pub struct VstarCheck {
    pub tag: String,
    pub q: Vec<f64>,
    pub norm_g2: f64,
    /// `<d_y v*, g> - |g|^2`, relative to `|g|^2`, per route.
    pub gap_quad: f64,
    pub gap_fe: f64,
    /// `|v*|_1 / |g|`, per route.
    pub ratio_quad: f64,
    pub ratio_fe: f64,
    /// `<grad v*_1, grad v*_2> / (|v*_1|_1 |v*_2|_1)` for six coefficients.
    pub cross_quad: Option<f64>,
    pub cross_fe: Option<f64>,
    /// `max_i 3 h^2 |v_i|_1^2 / |M|`.
    pub c_tilde: f64,
    pub interpolation_residual: f64,
}

impl VstarCheck {
    pub fn lines(&self) -> Vec<LemmaLine> {
        let q = self.q.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",");
        let name = |what: &str, route: &str| format!("{what} q=({q}) [{}] {route}", self.tag);
        let mut out = vec![
            LemmaLine::compare(name("<dy v*, g> = |g|^2", "quad"), 0.0, self.gap_quad, 1.0, IDENTITY_TOL),
            LemmaLine::compare(name("<dy v*, g> = |g|^2", "fe"), 0.0, self.gap_fe, 1.0, IDENTITY_TOL),
            LemmaLine::compare(
                name("|v*|_1/|g| routes agree", "fe"),
                self.ratio_quad,
                self.ratio_fe,
                self.ratio_quad.max(f64::MIN_POSITIVE),
                IDENTITY_TOL,
            ),
            LemmaLine::info(name("|v*|_1/|g|", "quad"), self.ratio_quad),
            LemmaLine::info(name("C~ = max 3h^2|v_i|^2/|M|", "quad"), self.c_tilde),
            LemmaLine::compare(name("v* in Q2 velocity space", ""), 0.0, self.interpolation_residual, 1.0, INTERPOLATION_TOL),
        ];
        if let (Some(a), Some(b)) = (self.cross_quad, self.cross_fe) {
            out.push(LemmaLine::compare(name("<grad v*_1, grad v*_2> = 0", "quad"), 0.0, a, 1.0, IDENTITY_TOL));
            out.push(LemmaLine::compare(name("<grad v*_1, grad v*_2> = 0", "fe"), 0.0, b, 1.0, IDENTITY_TOL));
        }
        out
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Builds `v*` for `g = sum q_i phi_{i+3}` and checks `<d_y v*, g>_M = |g|^2`.
/// Three coefficients use the two-cell construction, six need the four-cell
/// macro-element.
pub fn check_vstar(m: &FlatMacro, q: &[f64]) -> Result<VstarCheck, LemmaError> {
    assert!(q.len() == 3 || (q.len() == 6 && m.split == Split::Four), "three coefficients, or six on four cells");
    let phi = m.phi();
    let disc = Discrete::new(m.mesh()?)?;
    let g = |x: Point| q.iter().enumerate().map(|(k, c)| c * phi.eval(k + 3, x)).sum::<f64>();

    let pairing = integrate_cells(&disc.mesh, DEGREE, |_, _, x| m.vstar(q, x).1[1] * g(x))?;
    let norm_g2 = integrate_cells(&disc.mesh, DEGREE, |_, _, x| g(x).powi(2))?;
    let semi = |f: &dyn Fn(Point) -> (f64, Point)| {
        integrate_cells(&disc.mesh, DEGREE, |_, _, x| {
            let d = f(x).1;
            d[0] * d[0] + d[1] * d[1]
        })
    };
    let v2 = semi(&|x| m.vstar(q, x))?;

    let vc = disc.y_velocity(|x| m.vstar(q, x).0);
    let gc = disc.pressure(|_, x| g(x));
    let pairing_fe = disc.pairing(&gc, &vc);
    let norm_g2_fe = disc.saddle.mp.inner(&gc, &gc);
    let v2_fe = disc.saddle.a.inner(&vc, &vc);
    let residual = velocity_interpolation_residual(&disc.mesh, &disc.dofs, |x| [0.0, m.vstar(q, x).0], DEGREE)?;

    let (cross_quad, cross_fe) = if q.len() == 6 {
        let a = |x: Point| m.vstar1(&q[..3], x);
        let b = |x: Point| m.vstar2(&q[3..], x);
        let cross = integrate_cells(&disc.mesh, DEGREE, |_, _, x| {
            let (da, db) = (a(x).1, b(x).1);
            da[0] * db[0] + da[1] * db[1]
        })?;
        let (na, nb) = (semi(&a)?, semi(&b)?);
        let ac = disc.y_velocity(|x| a(x).0);
        let bc = disc.y_velocity(|x| b(x).0);
        let cross_fe = disc.saddle.a.inner(&ac, &bc);
        let (na_fe, nb_fe) = (disc.saddle.a.inner(&ac, &ac), disc.saddle.a.inner(&bc, &bc));
        (
            Some(ratio(cross.abs(), (na * nb).sqrt())),
            Some(ratio(cross_fe.abs(), (na_fe * nb_fe).sqrt())),
        )
    } else {
        (None, None)
    };

    let mut c_tilde: f64 = 0.0;
    for i in 3..=5 {
        let s = semi(&|x| m.v(i, x))?;
        c_tilde = c_tilde.max(3.0 * m.h * m.h * s / m.area());
    }

    Ok(VstarCheck {
        tag: m.tag(),
        q: q.to_vec(),
        norm_g2,
        gap_quad: ratio((pairing - norm_g2).abs(), norm_g2),
        gap_fe: ratio((pairing_fe - norm_g2_fe).abs(), norm_g2_fe),
        ratio_quad: ratio(v2.sqrt(), norm_g2.sqrt()),
        ratio_fe: ratio(v2_fe.sqrt(), norm_g2_fe.sqrt()),
        cross_quad,
        cross_fe,
        c_tilde,
        interpolation_residual: residual,
    })
}

/// `<d_y v, phi_s>_M` for `s = 1, 2` over random discrete `v` vanishing on
/// `dM`, relative to `|v|_1 |phi_s|`; the pressures constant in `y` are
/// invisible to vertical derivatives.
pub fn check_dy_orthogonality(m: &FlatMacro, samples: usize, seed: u64) -> Result<Vec<LemmaLine>, LemmaError> {
    let phi = m.phi();
    let disc = Discrete::new(m.mesh()?)?;
    let tag = m.tag();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = disc.dofs.n_v;
    let qs: Vec<Vec<f64>> = (1..=2).map(|s| disc.pressure(|_, x| phi.eval(s, x))).collect();

    let mut worst_fe: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    for _ in 0..samples {
        let mut v = vec![0.0; 2 * nv];
        for c in v[nv..].iter_mut() {
            *c = rng.gen_range(-1.0..=1.0);
        }
        let vn = disc.saddle.a.inner(&v, &v).sqrt();
        for (s, q) in qs.iter().enumerate() {
            let qn = disc.saddle.mp.inner(q, q).sqrt();
            worst_fe = worst_fe.max(ratio(disc.pairing(q, &v).abs(), vn * qn));
            let quad = integrate_cells(&disc.mesh, DEGREE, |c, xi, x| {
                velocity_at(&disc.mesh, &disc.dofs, &v, c, xi).1[1][1] * phi.eval(s + 1, x)
            })?;
            worst_quad = worst_quad.max(ratio(quad.abs(), vn * qn));
        }
    }
    let b1 = integrate_cells(&disc.mesh, DEGREE, |_, _, x| m.bubble(1, x).1[1] * phi.eval(2, x))?;
    let scale = m.area().sqrt() / m.h;
    Ok(vec![
        LemmaLine::compare(format!("<dy v, phi_1|phi_2> = 0, {samples} random v [{tag}] fe"), 0.0, worst_fe, 1.0, IDENTITY_TOL),
        LemmaLine::compare(format!("<dy v, phi_1|phi_2> = 0, {samples} random v [{tag}] quad"), 0.0, worst_quad, 1.0, IDENTITY_TOL),
        LemmaLine::compare(format!("<dy b1, phi2> = 0 [{tag}] quad"), 0.0, b1, scale, IDENTITY_TOL),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_lagrange_functions() {
        assert_eq!(mid_bubble(0.25, 0.0, 0.5).0, 1.0);
        assert_eq!(mid_bubble(0.6, 0.0, 0.5), (0.0, 0.0));
        assert_eq!(vertex_hat(2.0, 2.0, 1.0).0, 1.0);
        assert!(vertex_hat(2.5, 2.0, 1.0).0.abs() < 1e-16);
        assert!(vertex_hat(1.0, 2.0, 1.0).0.abs() < 1e-16);
        // derivative by central differences
        let (x, e) = (0.3, 1e-6);
        let fd = (vertex_hat(x + e, 0.0, 1.0).0 - vertex_hat(x - e, 0.0, 1.0).0) / (2.0 * e);
        assert!((fd - vertex_hat(x, 0.0, 1.0).1).abs() < 1e-8);
        let fd = (vertex_hat(-x + e, 0.0, 1.0).0 - vertex_hat(-x - e, 0.0, 1.0).0) / (2.0 * e);
        assert!((fd - vertex_hat(-x, 0.0, 1.0).1).abs() < 1e-8);
    }

    #[test]
    fn bubbles_are_nodal() {
        let m = FlatMacro::new(0.5, 0.01, Split::Two);
        let p = [[-0.25, 0.0], [0.0, 0.0], [0.25, 0.0]];
        for i in 0..3 {
            for (j, &pj) in p.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m.bubble(i, pj).0 - want).abs() < 1e-15);
            }
            assert_eq!(m.bubble(i, [0.1, 0.01]).0, 0.0);
        }
    }

    #[test]
    fn phi_six_is_even_and_continuous() {
        let phi = FlatMacro::new(0.5, 0.1, Split::Four).phi();
        for y in [0.01, 0.04, 0.09] {
            assert!((phi.eval(6, [0.2, y]) - phi.eval(6, [0.2, -y])).abs() < 1e-15);
        }
        assert!((phi.eval(6, [0.0, 1e-15]) - phi.eval(6, [0.0, 0.0])).abs() < 1e-12);
    }

    #[test]
    fn gram_is_diagonal() {
        for split in [Split::Two, Split::Four] {
            let m = FlatMacro::new(0.5, 1e-3, split);
            let g = check_phi_gram(&m).unwrap();
            for l in &g.lines {
                assert!(l.passed(), "{l}");
            }
            assert!((g.quadrature[(0, 0)] - 6.666_666_666_666_667e-4).abs() < 1e-15);
        }
    }

    #[test]
    fn pairings_are_h_independent() {
        let a = check_pairing_quad(&FlatMacro::new(0.5, 1e-1, Split::Two)).unwrap();
        let b = check_pairing_quad(&FlatMacro::new(0.5, 1e-4, Split::Two)).unwrap();
        assert!((&a.quadrature - &b.quadrature).abs().max() < 1e-13);
        assert!((a.quadrature[(0, 0)] - 0.888_888_888_888_889).abs() < 1e-13);
        for l in a.lines.iter().chain(&b.lines) {
            assert!(l.passed(), "{l}");
        }
    }

    /// `|v*|_1^2 / |g|^2` for `g = phi_3` from one-dimensional integrals of
    /// the separable bubble `v* = (3h/4)(1 - y^2/h^2) B(x)`.
    fn ratio_oracle(big_h: f64, h: f64) -> f64 {
        let int_b2 = 16.0 * big_h / 15.0;
        let int_db2 = 32.0 / (3.0 * big_h);
        let int_dy2 = 8.0 / (3.0 * h);
        let int_y2 = 16.0 * h / 15.0;
        let v2 = (0.75 * h).powi(2) * (int_dy2 * int_b2 + int_y2 * int_db2);
        (v2 / (4.0 * big_h * h / 3.0)).sqrt()
    }

    #[test]
    fn vstar_ratio_matches_oracle() {
        for h in [1e-1, 1e-3, 1e-5] {
            let c = check_vstar(&FlatMacro::new(0.5, h, Split::Two), &[1.0, 0.0, 0.0]).unwrap();
            let want = ratio_oracle(0.5, h);
            assert!((c.ratio_quad - want).abs() < 1e-12 * want);
            assert!(c.gap_quad < 1e-13 && c.gap_fe < 1e-13);
        }
        let small = ratio_oracle(0.5, 1e-3);
        let smaller = ratio_oracle(0.5, 1e-5);
        assert!((small / smaller - 1.0).abs() < 0.01);
    }

    #[test]
    fn zero_coefficients_give_zero_field() {
        let c = check_vstar(&FlatMacro::new(0.5, 1e-2, Split::Two), &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.gap_quad, 0.0);
        assert_eq!(c.ratio_quad, 0.0);
        assert!(c.lines().iter().all(LemmaLine::passed));
    }

    #[test]
    fn four_cell_construction() {
        let c = check_vstar(&FlatMacro::new(0.5, 1e-3, Split::Four), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(c.gap_quad < 1e-13 && c.gap_fe < 1e-13);
        assert!(c.cross_quad.unwrap() < 1e-14);
        let two = check_vstar(&FlatMacro::new(0.5, 1e-3, Split::Two), &[1.0, 1.0, 1.0]).unwrap();
        assert!((c.ratio_quad / two.ratio_quad - 1.0).abs() < 0.05);
    }

    #[test]
    fn vertical_derivatives_miss_x_only_pressures() {
        let lines = check_dy_orthogonality(&FlatMacro::new(0.5, 1e-2, Split::Two), 50, 1).unwrap();
        assert!(lines.iter().all(LemmaLine::passed), "{lines:?}");
    }
}
