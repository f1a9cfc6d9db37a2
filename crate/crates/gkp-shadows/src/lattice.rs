//! Symplectic lattice algebra.
//!
//! A [`LatticeBasis`] holds a `2n x 2n` generator matrix whose rows span the
//! lattice. A [`GkpCode`] bundles the stabilizer lattice with its symplectic
//! dual and the integer Gram matrix `A = M J M^T`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GkpError, Result};
use crate::Complex;

/// Largest dropped-term magnitude tolerated by the automatic theta truncation.
pub const THETA_TAIL: f64 = 1e-14;

/// The symplectic form `J = [[0, I], [-I, 0]]` on `R^{2n}`.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Symplectic pairing `x^T J y`.
pub fn symplectic_product(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
}

/// Generator matrix of the hexagonal lattice `A_2` with unit covolume.
pub fn a2_basis() -> DMatrix<f64> {
    let s = 1.0 / (2.0 * 3f64.sqrt()).sqrt();
    DMatrix::from_row_slice(2, 2, &[2.0 * s, 0.0, s, 3f64.sqrt() * s])
}

/// A full-rank lattice in `R^{2n}` given by row generators.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    n: usize,
    m: DMatrix<f64>,
    m_inv_t: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    n: usize,
    #[serde(rename = "M")]
    m: Vec<Vec<f64>>,
}

impl LatticeBasis {
    /// Builds a basis from a square `2n x 2n` generator matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(GkpError::Rank(format!(
                "generator must be 2n x 2n, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let det = m.determinant();
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        if !det.is_finite() || det.abs() <= 1e-12 * scale.powi(m.nrows() as i32) {
            return Err(GkpError::Rank(format!("singular generator (det = {det:e})")));
        }
        let m_inv_t = m
            .clone()
            .try_inverse()
            .ok_or_else(|| GkpError::Rank("singular generator".into()))?
            .transpose();
        Ok(Self { n: m.nrows() / 2, m, m_inv_t })
    }

    /// Builds a basis from row-major entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(GkpError::Rank("generator rows must form a square matrix".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(k, k, &flat))
    }

    /// Number of modes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `2n` of the ambient phase space.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Generator matrix; rows are basis vectors.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Basis vector `i` (row `i` of the generator).
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.m.row(i).iter().copied().collect()
    }

    /// `|det M|`, the covolume of the lattice.
    pub fn covolume(&self) -> f64 {
        self.m.determinant().abs()
    }

    /// The basis with every vector multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(&self.m * s)
    }

    /// Lattice point `sum_i c_i xi_i` for integer coefficients `c`.
    pub fn point(&self, c: &[i64]) -> Vec<f64> {
        let k = self.dim();
        let mut v = vec![0.0; k];
        for (i, ci) in c.iter().enumerate() {
            if *ci != 0 {
                for (j, vj) in v.iter_mut().enumerate() {
                    *vj += *ci as f64 * self.m[(i, j)];
                }
            }
        }
        v
    }

    /// Real coefficients `c` with `x = M^T c`.
    pub fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        let k = self.dim();
        (0..k)
            .map(|i| (0..k).map(|j| self.m_inv_t[(i, j)] * x[j]).sum())
            .collect()
    }

    /// True when `x` is a lattice point up to `tol` in coefficient space.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.coefficients(x).iter().all(|c| (c - c.round()).abs() < tol)
    }

    /// JSON form `{"n": .., "M": [[..]]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = (0..self.dim()).map(|i| self.row(i)).collect();
        serde_json::to_value(BasisJson { n: self.n, m: rows }).expect("serializable basis")
    }

    /// Parses the JSON form produced by [`LatticeBasis::to_json`].
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let b: BasisJson = serde_json::from_value(v.clone())
            .map_err(|e| GkpError::Validation(format!("basis json: {e}")))?;
        let basis = Self::from_rows(&b.m)?;
        if basis.n != b.n {
            return Err(GkpError::Validation(format!(
                "basis json: n = {} but M is {}x{}",
                b.n,
                basis.dim(),
                basis.dim()
            )));
        }
        Ok(basis)
    }
}

/// Returns `M_perp = M^{-T} J^T`, a basis of the symplectic dual lattice.
///
/// The pairing matrix `M_perp J M^T` is the identity.
pub fn dual_basis(m: &LatticeBasis) -> Result<LatticeBasis> {
    let j = symplectic_form(m.n);
    LatticeBasis::new(&m.m_inv_t * j.transpose())
}

/// Integer symplectic Gram matrix `A = M J M^T`.
pub fn symplectic_gram(m: &LatticeBasis) -> Result<DMatrix<i64>> {
    let a = &m.m * symplectic_form(m.n) * m.m.transpose();
    let mut out = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let r = a[(i, j)].round();
            if (a[(i, j)] - r).abs() > 1e-9 {
                return Err(GkpError::InvalidLattice(format!(
                    "Gram entry ({i},{j}) = {} is not an integer",
                    a[(i, j)]
                )));
            }
            out[(i, j)] = r as i64;
        }
    }
    Ok(out)
}

fn squared_distance(x: &[f64], v: &[f64]) -> f64 {
    x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Closest lattice vector with its integer coefficients.
///
/// Babai rounding followed by an exhaustive search over offsets in
/// `{-2..2}^{2n}`. Ties are broken by the lexicographically smallest
/// coefficient vector.
pub fn cvp_with_coefficients(x: &[f64], m: &LatticeBasis) -> (Vec<i64>, Vec<f64>) {
    let k = m.dim();
    let base: Vec<i64> = m.coefficients(x).iter().map(|c| c.round() as i64).collect();
    let scale = x.iter().map(|v| v * v).sum::<f64>().max(1.0);
    let tol = 1e-12 * scale;
    let mut best_c = base.clone();
    let mut best_v = m.point(&best_c);
    let mut best_d = squared_distance(x, &best_v);
    let mut off = vec![-2i64; k];
    let mut c = vec![0i64; k];
    loop {
        for i in 0..k {
            c[i] = base[i] + off[i];
        }
        let v = m.point(&c);
        let d = squared_distance(x, &v);
        if d < best_d - tol || (d <= best_d + tol && c < best_c) {
            best_d = d;
            best_c.copy_from_slice(&c);
            best_v = v;
        }
        let mut i = 0;
        loop {
            if i == k {
                return (best_c, best_v);
            }
            off[i] += 1;
            if off[i] <= 2 {
                break;
            }
            off[i] = -2;
            i += 1;
        }
    }
}

/// Closest lattice vector to `x`.
pub fn cvp(x: &[f64], m: &LatticeBasis) -> Vec<f64> {
    cvp_with_coefficients(x, m).1
}

/// Voronoi-shell index of `x` relative to the dual lattice of `code`.
///
/// Returns the smallest `k >= 0` such that the closest point of
/// `(2k+1) L_perp` to `x` is the origin.
pub fn shell_index(x: &[f64], code: &GkpCode) -> usize {
    let mut k = 0usize;
    loop {
        let scaled = code
            .dual_basis
            .scaled((2 * k + 1) as f64)
            .expect("scaled dual basis stays full rank");
        let (c, _) = cvp_with_coefficients(x, &scaled);
        if c.iter().all(|&ci| ci == 0) {
            return k;
        }
        k += 1;
    }
}

/// Basic metric constants of a lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConstants {
    /// Length of the shortest nonzero vector.
    pub lambda1: f64,
    /// `lambda1 / 2`.
    pub packing_radius: f64,
    /// Covering radius (largest distance from a point to the lattice).
    pub covering_radius: f64,
}

/// Enumerates all lattice coefficient vectors whose point may lie within
/// radius `r`, calling `f(coefficients, point)` for those that do.
pub fn enumerate_ball(m: &LatticeBasis, r: f64, mut f: impl FnMut(&[i64], &[f64])) {
    let k = m.dim();
    let bounds: Vec<i64> = (0..k)
        .map(|i| {
            let row_norm: f64 = (0..k).map(|j| m.m_inv_t[(i, j)].powi(2)).sum::<f64>().sqrt();
            (r * row_norm + 1e-9).floor() as i64
        })
        .collect();
    let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let r2 = r * r * (1.0 + 1e-12);
    loop {
        let v = m.point(&c);
        if v.iter().map(|x| x * x).sum::<f64>() <= r2 {
            f(&c, &v);
        }
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            c[i] += 1;
            if c[i] <= bounds[i] {
                break;
            }
            c[i] = -bounds[i];
            i += 1;
        }
    }
}

/// Length of the shortest nonzero lattice vector.
pub fn shortest_vector_length(m: &LatticeBasis) -> f64 {
    let r = (0..m.dim())
        .map(|i| m.row(i).iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min);
    let mut best = r;
    enumerate_ball(m, r, |c, v| {
        if c.iter().any(|&x| x != 0) {
            best = best.min(v.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
    });
    best
}

/// Lagrange-Gauss reduction of a 2-D basis (rows of a 2x2 matrix).
pub fn lagrange_reduce_2d(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut b1 = [m[(0, 0)], m[(0, 1)]];
    let mut b2 = [m[(1, 0)], m[(1, 1)]];
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    if dot(b1, b1) > dot(b2, b2) {
        std::mem::swap(&mut b1, &mut b2);
    }
    loop {
        let mu = (dot(b1, b2) / dot(b1, b1)).round();
        b2 = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
        if dot(b2, b2) >= dot(b1, b1) {
            break;
        }
        std::mem::swap(&mut b1, &mut b2);
    }
    DMatrix::from_row_slice(2, 2, &[b1[0], b1[1], b2[0], b2[1]])
}

/// Vertices (counter-clockwise) of the Voronoi cell around the origin of a
/// two-dimensional lattice.
pub fn voronoi_cell_2d(m: &LatticeBasis) -> Result<Vec<[f64; 2]>> {
    if m.dim() != 2 {
        return Err(GkpError::Unsupported("Voronoi cells are implemented for 2-D lattices".into()));
    }
    let red = LatticeBasis::new(lagrange_reduce_2d(&m.m))?;
    let big = 4.0 * (0..2).map(|i| red.row(i).iter().map(|x| x * x).sum::<f64>().sqrt()).sum::<f64>();
    let mut poly: Vec<[f64; 2]> = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            if a == 0 && b == 0 {
                continue;
            }
            let v = red.point(&[a, b]);
            let h = 0.5 * (v[0] * v[0] + v[1] * v[1]);
            poly = clip_half_plane(&poly, [v[0], v[1]], h);
        }
    }
    Ok(poly)
}

fn clip_half_plane(poly: &[[f64; 2]], nrm: [f64; 2], h: f64) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| p[0] * nrm[0] + p[1] * nrm[1] - h;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    out
}

/// Area of a simple polygon.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let k = poly.len();
    0.5 * (0..k)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % k]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

/// Shortest vector, packing radius and (for 2-D lattices) covering radius.
pub fn lattice_constants(m: &LatticeBasis) -> Result<LatticeConstants> {
    if m.n > 2 {
        return Err(GkpError::Unsupported(
            "covering radius is implemented for n <= 2 only".into(),
        ));
    }
    let lambda1 = shortest_vector_length(m);
    let covering_radius = if m.dim() == 2 {
        voronoi_cell_2d(m)?
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
            .fold(0.0, f64::max)
    } else {
        covering_radius_4d(m)
    };
    Ok(LatticeConstants { lambda1, packing_radius: lambda1 / 2.0, covering_radius })
}

/// Covering radius of a 4-D lattice from the vertices of its Voronoi cell,
/// each vertex being equidistant from the origin and four relevant vectors.
///
/// A vector is Voronoi-relevant exactly when it and its negative are the only
/// shortest vectors of their class modulo `2L`.
fn covering_radius_4d(m: &LatticeBasis) -> f64 {
    let rmax = (0..4)
        .map(|i| m.row(i).iter().map(|x| x * x).sum::<f64>().sqrt())
        .sum::<f64>();
    let mut classes: std::collections::HashMap<Vec<i64>, (f64, Vec<Vec<f64>>)> = Default::default();
    enumerate_ball(m, rmax, |c, v| {
        if c.iter().all(|&x| x == 0) {
            return;
        }
        let key: Vec<i64> = c.iter().map(|x| x.rem_euclid(2)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        let e = classes.entry(key).or_insert((f64::INFINITY, Vec::new()));
        if n2 < e.0 - 1e-9 {
            *e = (n2, vec![v.to_vec()]);
        } else if n2 <= e.0 + 1e-9 {
            e.1.push(v.to_vec());
        }
    });
    let rel: Vec<Vec<f64>> = classes
        .into_values()
        .filter(|(_, vs)| vs.len() == 2)
        .flat_map(|(_, vs)| vs)
        .collect();
    let mut best = 0.0f64;
    let k = rel.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for d in c + 1..k {
                    let rows = [&rel[a], &rel[b], &rel[c], &rel[d]];
                    let mat = DMatrix::from_fn(4, 4, |i, j| rows[i][j]);
                    let rhs = DVector::from_fn(4, |i, _| 0.5 * rows[i].iter().map(|x| x * x).sum::<f64>());
                    if let Some(y) = mat.lu().solve(&rhs) {
                        let r2: f64 = y.iter().map(|x| x * x).sum();
                        if r2 <= best * best {
                            continue;
                        }
                        let inside = rel.iter().all(|v| {
                            let s: f64 = v.iter().zip(y.iter()).map(|(p, q)| p * q).sum();
                            s <= 0.5 * v.iter().map(|x| x * x).sum::<f64>() + 1e-9
                        });
                        if inside {
                            best = r2.sqrt();
                        }
                    }
                }
            }
        }
    }
    best
}

/// Truncation radius `t` for which every dropped theta term is below
/// [`THETA_TAIL`], given the smallest eigenvalue of `Im Omega`.
pub fn theta_auto_truncation(lambda_min: f64) -> usize {
    let t = ((-THETA_TAIL.ln()) / (std::f64::consts::PI * lambda_min)).sqrt();
    (t.ceil() as usize).max(1)
}

fn min_eigen_of_imag(omega: &DMatrix<Complex>) -> Result<f64> {
    let g = omega.nrows();
    if omega.ncols() != g {
        return Err(GkpError::Validation("Omega must be square".into()));
    }
    let im = DMatrix::from_fn(g, g, |i, j| 0.5 * (omega[(i, j)].im + omega[(j, i)].im));
    let lmin = im.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if !(lmin > 0.0) {
        return Err(GkpError::Divergence(format!(
            "Im(Omega) is not positive definite (smallest eigenvalue {lmin:e})"
        )));
    }
    Ok(lmin)
}

/// Riemann theta function
/// `theta(z | Omega) = sum_m exp(i 2 pi (m^T Omega m / 2 + m^T z))`
/// truncated to `m in {-t..t}^g`.
pub fn riemann_theta(z: &[Complex], omega: &DMatrix<Complex>, t: usize) -> Result<Complex> {
    let g = z.len();
    if omega.nrows() != g {
        return Err(GkpError::Validation("z and Omega dimensions differ".into()));
    }
    min_eigen_of_imag(omega)?;
    if t < 1 {
        return Err(GkpError::Validation("truncation radius must be at least 1".into()));
    }
    Ok(theta_box(z, omega, &vec![0; g], t as i64))
}

/// Riemann theta function with the truncation chosen automatically.
///
/// The summation box is centred on the maximum of the Gaussian envelope
/// `-(Im Omega)^{-1} Im z` and has half-width [`theta_auto_truncation`].
pub fn riemann_theta_auto(z: &[Complex], omega: &DMatrix<Complex>) -> Result<Complex> {
    let g = z.len();
    if omega.nrows() != g {
        return Err(GkpError::Validation("z and Omega dimensions differ".into()));
    }
    let lmin = min_eigen_of_imag(omega)?;
    let im = DMatrix::from_fn(g, g, |i, j| omega[(i, j)].im);
    let iz = DVector::from_fn(g, |i, _| z[i].im);
    let centre = -(im.try_inverse().expect("positive definite")) * iz;
    let c: Vec<i64> = centre.iter().map(|x| x.round() as i64).collect();
    Ok(theta_box(z, omega, &c, theta_auto_truncation(lmin) as i64 + 1))
}

fn theta_box(z: &[Complex], omega: &DMatrix<Complex>, centre: &[i64], t: i64) -> Complex {
    let g = z.len();
    let two_pi_i = Complex::new(0.0, 2.0 * std::f64::consts::PI);
    let mut m: Vec<i64> = centre.iter().map(|c| c - t).collect();
    let mut acc = Complex::new(0.0, 0.0);
    loop {
        let mut q = Complex::new(0.0, 0.0);
        for i in 0..g {
            let mi = m[i] as f64;
            if mi == 0.0 {
                continue;
            }
            let mut row = Complex::new(0.0, 0.0);
            for j in 0..g {
                row += omega[(i, j)] * m[j] as f64;
            }
            q += mi * (0.5 * row + z[i]);
        }
        acc += (two_pi_i * q).exp();
        let mut i = 0;
        loop {
            if i == g {
                return acc;
            }
            m[i] += 1;
            if m[i] <= centre[i] + t {
                break;
            }
            m[i] = centre[i] - t;
            i += 1;
        }
    }
}

/// Lattice theta constant `Theta_L(z) = sum_{x in L} exp(i 2 pi z |x|^2)`,
/// truncated to coefficients in `{-t..t}^{2n}`.
pub fn lattice_theta(m: &LatticeBasis, z: Complex, t: usize) -> Result<Complex> {
    if z.im <= 0.0 {
        return Err(GkpError::Divergence(format!("Im z = {} must be positive", z.im)));
    }
    let gram = &m.m * m.m.transpose();
    let omega = gram.map(|v| Complex::new(2.0 * v, 0.0) * z);
    riemann_theta(&vec![Complex::new(0.0, 0.0); m.dim()], &omega, t)
}

/// Lattice theta constant at purely imaginary argument `z = i y`, i.e.
/// `sum_{x in L} exp(-2 pi y |x|^2)`, summed over a ball that provably
/// captures all terms above `1e-17` relative size.
pub fn lattice_theta_imag(m: &LatticeBasis, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Err(GkpError::Divergence(format!("Im z = {y} must be positive")));
    }
    let a = 2.0 * std::f64::consts::PI * y;
    let r = (40.0 / a).sqrt();
    let mut acc = 0.0;
    enumerate_ball(m, r, |_, v| acc += (-a * v.iter().map(|x| x * x).sum::<f64>()).exp());
    Ok(acc)
}

/// A GKP code: stabilizer lattice, symplectic dual and integer Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GkpCode {
    /// Stabilizer lattice `L`.
    pub basis: LatticeBasis,
    /// Symplectic dual `L_perp` with basis `M^{-T} J^T`.
    pub dual_basis: LatticeBasis,
    /// Gram matrix `A = M J M^T`.
    pub gram: DMatrix<i64>,
    /// Local dimension for scaled codes (`A = d J`); otherwise `|det A|^{1/2n}`.
    pub d: u64,
    /// Number of modes.
    pub n: usize,
}

impl GkpCode {
    /// Builds a code from a stabilizer basis with integral Gram matrix.
    pub fn new(basis: LatticeBasis) -> Result<Self> {
        let gram = symplectic_gram(&basis)?;
        let dual_basis = dual_basis(&basis)?;
        let n = basis.n();
        let det = gram.map(|v| v as f64).determinant().abs();
        let d = det.powf(1.0 / (2 * n) as f64).round() as u64;
        if d == 0 {
            return Err(GkpError::InvalidLattice("degenerate Gram matrix".into()));
        }
        Ok(Self { basis, dual_basis, gram, d, n })
    }

    /// The scaled code `M = sqrt(d) M0` for a symplectic `M0`.
    pub fn scaled(m0: &DMatrix<f64>, d: u64) -> Result<Self> {
        let basis = LatticeBasis::new(m0 * (d as f64).sqrt())?;
        let code = Self::new(basis)?;
        let target = symplectic_form(code.n).map(|v| (v * d as f64).round() as i64);
        if code.gram != target {
            return Err(GkpError::InvalidLattice("M0 is not symplectic".into()));
        }
        Ok(code)
    }

    /// Square qubit code `M = sqrt(2) I`.
    pub fn square_qubit() -> Self {
        Self::scaled(&DMatrix::identity(2, 2), 2).expect("square code is valid")
    }

    /// Hexagonal qubit code `M = sqrt(2) M_{A2}`.
    pub fn hexagonal_qubit() -> Self {
        Self::scaled(&a2_basis(), 2).expect("hexagonal code is valid")
    }

    /// Looks up a named code: `square` or `hexagonal`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "square" => Ok(Self::square_qubit()),
            "hexagonal" => Ok(Self::hexagonal_qubit()),
            other => Err(GkpError::Validation(format!("unknown code '{other}'"))),
        }
    }

    /// True for the scaled form `A = d J`.
    pub fn is_scaled(&self) -> bool {
        let target = symplectic_form(self.n).map(|v| (v * self.d as f64).round() as i64);
        self.gram == target
    }

    /// Code distance `lambda1(L_perp)`.
    pub fn distance(&self) -> f64 {
        shortest_vector_length(&self.dual_basis)
    }

    /// Logical Pauli coset representatives for single-mode qubit codes in the
    /// order `(I, X, Y, Z)`.
    ///
    /// The `X`, `Z` representatives are half the first and second stabilizer
    /// generators; each representative is replaced by the shortest vector in
    /// its coset of `L`.
    pub fn logical_pauli_reps(&self) -> Result<[Vec<f64>; 4]> {
        if self.n != 1 || self.d != 2 || !self.is_scaled() {
            return Err(GkpError::Unsupported(
                "logical Pauli cosets are implemented for scaled single-mode qubit codes".into(),
            ));
        }
        let r0 = self.basis.row(0);
        let r1 = self.basis.row(1);
        let raw = [
            vec![0.0, 0.0],
            vec![0.5 * r0[0], 0.5 * r0[1]],
            vec![0.5 * (r0[0] + r1[0]), 0.5 * (r0[1] + r1[1])],
            vec![0.5 * r1[0], 0.5 * r1[1]],
        ];
        Ok(raw.map(|xi| {
            let (_, v) = cvp_with_coefficients(&xi, &self.basis);
            vec![xi[0] - v[0], xi[1] - v[1]]
        }))
    }

    /// JSON form `{"n", "M", "d"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.basis.to_json();
        v["d"] = serde_json::json!(self.d);
        v
    }

    /// Parses either a code name string or the JSON form.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        if let Some(name) = v.as_str() {
            return Self::from_name(name);
        }
        let basis = LatticeBasis::from_json(v)?;
        let code = Self::new(basis)?;
        if let Some(d) = v.get("d").and_then(|d| d.as_u64()) {
            if d != code.d {
                return Err(GkpError::Validation(format!(
                    "declared d = {d} but the Gram matrix gives d = {}",
                    code.d
                )));
            }
        }
        Ok(code)
    }
}
