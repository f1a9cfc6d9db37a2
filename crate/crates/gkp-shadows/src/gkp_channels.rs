//! Depolarizing coefficients of twirled measurement channels.
//!
//! After decoding, a twirled measure-and-prepare channel acts on logical
//! Pauli expectation vectors as `x -> alpha x + beta e_I`. This module
//! evaluates `alpha` and `beta` for heterodyne detection, photon-click
//! detection and displaced parity measurements, and inverts the map.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{GkpError, Result};
use crate::lattice::{a2_basis, riemann_theta_auto, shell_index, voronoi_cell_2d, GkpCode, LatticeBasis};
use crate::logical_shadows::Decoder;
use crate::stats::parallel_chunks;
use crate::Complex;

/// Measurement channel a coefficient pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMethod {
    /// Heterodyne detection.
    Heterodyne,
    /// Photon-click detection.
    Click,
    /// Displaced photon parity.
    Parity,
}

/// Coefficients of the decoded channel `Dec C = alpha Dec + beta |Pi_L>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingCoefficients {
    /// Weight of the identity map.
    pub alpha: f64,
    /// Weight of the code-space projector.
    pub beta: f64,
    /// Channel the coefficients describe.
    pub method: ChannelMethod,
    /// Absolute numerical uncertainty of `alpha` and `beta`.
    pub error_bars: f64,
}

impl DepolarizingCoefficients {
    /// Validates `|alpha| <= 1`.
    pub fn new(alpha: f64, beta: f64, method: ChannelMethod, error_bars: f64) -> Result<Self> {
        if !(alpha.abs() <= 1.0 + 1e-12) || !beta.is_finite() {
            return Err(GkpError::Validation(format!("alpha = {alpha} must satisfy |alpha| <= 1")));
        }
        Ok(Self { alpha, beta, method, error_bars })
    }

    /// True when `|alpha| > 1e-6`.
    pub fn is_invertible(&self) -> bool {
        self.alpha.abs() > 1e-6
    }
}

/// Applies `x -> alpha x + beta e_I`.
pub fn depolarize_forward(coeffs: &DepolarizingCoefficients, x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, v)| coeffs.alpha * v + if i == 0 { coeffs.beta } else { 0.0 })
        .collect()
}

/// Inverse map `x -> (x - beta e_I) / alpha`.
pub fn invert_depolarizing(coeffs: &DepolarizingCoefficients, x: &[f64]) -> Result<Vec<f64>> {
    if !coeffs.is_invertible() {
        return Err(GkpError::NonInvertible(format!("alpha = {:e}", coeffs.alpha)));
    }
    Ok(x.iter()
        .enumerate()
        .map(|(i, v)| (v - if i == 0 { coeffs.beta } else { 0.0 }) / coeffs.alpha)
        .collect())
}

fn require_qubit(code: &GkpCode) -> Result<()> {
    if code.d != 2 {
        return Err(GkpError::Unsupported(format!(
            "shell parities need d = 2, the code has d = {}",
            code.d
        )));
    }
    Ok(())
}

/// Monte Carlo Voronoi-shell statistics of heterodyne noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellProbabilities {
    /// Probability of an even shell.
    pub p0: f64,
    /// Probability of an odd shell.
    pub p1: f64,
    /// `p0 - p1`.
    pub alpha_shell: f64,
    /// Standard error of `p0` (and of `p1`).
    pub stderr: f64,
    /// Standard error of `alpha_shell`.
    pub alpha_shell_stderr: f64,
    /// Relative frequency of each shell index.
    pub shell_frequencies: Vec<f64>,
    /// Probability that the closest dual point lies in each Pauli coset.
    pub coset_probabilities: [f64; 4],
    /// Clifford-averaged fidelity parameter `(4 q_I - 1) / 3`.
    pub alpha_coset: f64,
    /// Standard error of `alpha_coset`.
    pub alpha_coset_stderr: f64,
    /// Number of samples.
    pub samples: usize,
}

/// Samples `alpha` from the density `exp(-pi |alpha|^2)` and classifies it by
/// Voronoi shell of `L_perp` and by the logical coset of its closest dual
/// lattice point.
pub fn heterodyne_shell_probs(code: &GkpCode, n_samples: usize, seed: u64) -> Result<ShellProbabilities> {
    require_qubit(code)?;
    if n_samples < 2 {
        return Err(GkpError::Validation("need at least two samples".into()));
    }
    let dec = Decoder::new(code, 1.0)?;
    let normal = Normal::new(0.0, (1.0 / (2.0 * PI)).sqrt()).expect("positive width");
    let dim = 2 * code.n;
    let chunks = parallel_chunks(n_samples, seed, |rng, count| {
        let mut shells: Vec<u64> = Vec::new();
        let mut cosets = [0u64; 4];
        for _ in 0..count {
            let a: Vec<f64> = (0..dim).map(|_| normal.sample(rng)).collect();
            let k = shell_index(&a, code);
            if shells.len() <= k {
                shells.resize(k + 1, 0);
            }
            shells[k] += 1;
            cosets[dec.coset_of(&a)] += 1;
        }
        (shells, cosets)
    });
    let mut shells: Vec<u64> = Vec::new();
    let mut cosets = [0u64; 4];
    for (s, c) in chunks {
        if shells.len() < s.len() {
            shells.resize(s.len(), 0);
        }
        for (a, b) in shells.iter_mut().zip(&s) {
            *a += b;
        }
        for i in 0..4 {
            cosets[i] += c[i];
        }
    }
    let n = n_samples as f64;
    let even: u64 = shells.iter().step_by(2).sum();
    let p0 = even as f64 / n;
    let p1 = 1.0 - p0;
    let stderr = (p0 * p1 / n).sqrt();
    let q: [f64; 4] = cosets.map(|c| c as f64 / n);
    Ok(ShellProbabilities {
        p0,
        p1,
        alpha_shell: p0 - p1,
        stderr,
        alpha_shell_stderr: 2.0 * stderr,
        shell_frequencies: shells.iter().map(|&s| s as f64 / n).collect(),
        coset_probabilities: q,
        alpha_coset: (4.0 * q[0] - 1.0) / 3.0,
        alpha_coset_stderr: 4.0 / 3.0 * (q[0] * (1.0 - q[0]) / n).sqrt(),
        samples: n_samples,
    })
}

/// Heterodyne coefficients consistent with the decoder.
///
/// On ideal code states the decoded heterodyne channel multiplies the
/// `a`-th Pauli expectation by
/// `alpha_a = sum_{l in L} h(xi_a + l) (-1)^{xi_a^T J l} exp(-pi |xi_a + l|^2)`;
/// `alpha` is the Clifford average of `alpha_X, alpha_Y, alpha_Z` and
/// `beta = 1 - alpha` keeps the identity entry fixed.
pub fn heterodyne_coefficients(code: &GkpCode) -> Result<DepolarizingCoefficients> {
    require_qubit(code)?;
    let dec = Decoder::new(code, 8.0)?;
    let f = dec.ideal_heterodyne_factors();
    let alpha = (f[1] + f[2] + f[3]) / 3.0;
    // Dropped terms are bounded by the Gaussian tail at the truncation radius.
    let err = (-PI * (dec.truncation() - 2.0).powi(2)).exp();
    DepolarizingCoefficients::new(alpha, 1.0 - alpha, ChannelMethod::Heterodyne, err)
}

fn is_hexagonal(code: &GkpCode) -> bool {
    let hex = GkpCode::hexagonal_qubit();
    code.basis.dim() == 2 && (code.basis.matrix() - hex.basis.matrix()).amax() < 1e-9
}

/// Partial sums of the ball-bound series for `p0` on the hexagonal code,
/// `[1 - e^{-pi/(3 sqrt 3)}] + sum_{k=1}^{K} (e^{-pi/(3 sqrt 3) (4k-1)^2 l^2} - e^{-pi/(4 sqrt 3) (4k+1)^2 l^2})`
/// with `l = lambda_1(A2) = sqrt(2 / sqrt 3)`.
pub fn heterodyne_p0_series(code: &GkpCode, terms: usize) -> Result<Vec<f64>> {
    if !is_hexagonal(code) {
        return Err(GkpError::Unsupported("the p0 series is derived for the hexagonal code".into()));
    }
    let s3 = 3f64.sqrt();
    let l2 = 2.0 / s3;
    let mut acc = 1.0 - (-PI / (3.0 * s3)).exp();
    let mut out = vec![acc];
    for k in 1..=terms {
        let k = k as f64;
        acc += (-PI / (3.0 * s3) * (4.0 * k - 1.0).powi(2) * l2).exp()
            - (-PI / (4.0 * s3) * (4.0 * k + 1.0).powi(2) * l2).exp();
        out.push(acc);
    }
    Ok(out)
}

/// The ball-bound series for `p0`, summed until terms drop below `1e-16`.
pub fn heterodyne_p0_bound(code: &GkpCode) -> Result<f64> {
    let sums = heterodyne_p0_series(code, 40)?;
    Ok(*sums.last().expect("nonempty"))
}

/// Quadrature settings for the click-detector integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickQuadrature {
    /// Gauss-Legendre order per direction on each triangle.
    pub order: usize,
}

impl Default for ClickQuadrature {
    fn default() -> Self {
        Self { order: 24 }
    }
}

/// Click-detector coefficients and their ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickCoefficients {
    /// `theta(0 | i G_A2)`.
    pub theta: f64,
    /// First hexagon integral.
    pub i1: f64,
    /// Second hexagon integral.
    pub i2: f64,
    /// `1 - 2 theta + I1`.
    pub alpha: f64,
    /// `1 - 2 theta + I2`.
    pub alpha_plus_beta: f64,
    /// Quadrature error estimate of `I1` (order doubling).
    pub i1_error: f64,
    /// Quadrature error estimate of `I2` (order doubling).
    pub i2_error: f64,
    /// Packaged coefficients with `beta = I2 - I1`.
    pub coeffs: DepolarizingCoefficients,
}

fn a2_theta_setup() -> (DMatrix<f64>, DMatrix<Complex>) {
    let m = a2_basis();
    let g = &m * m.transpose();
    let omega = g.map(|v| Complex::new(0.0, v));
    (m, omega)
}

/// Integrand product `theta(M (iI + J) a | i G) theta(M (iI - J) a | i G)`.
fn click_theta_product(m: &DMatrix<f64>, omega: &DMatrix<Complex>, a: [f64; 2]) -> Result<f64> {
    // (iI + J) a = (i a0 + a1, i a1 - a0), (iI - J) a = (i a0 - a1, i a1 + a0).
    let plus = [Complex::new(a[1], a[0]), Complex::new(-a[0], a[1])];
    let minus = [Complex::new(-a[1], a[0]), Complex::new(a[0], a[1])];
    let apply = |v: [Complex; 2]| -> Vec<Complex> {
        (0..2).map(|i| v[0] * m[(i, 0)] + v[1] * m[(i, 1)]).collect()
    };
    let t1 = riemann_theta_auto(&apply(plus), omega)?;
    let t2 = riemann_theta_auto(&apply(minus), omega)?;
    Ok((t1 * t2).re)
}

/// `(I1, I2)` by Duffy-mapped tensor Gauss-Legendre on the six triangles of
/// the A2 Voronoi hexagon.
fn click_integrals(order: usize) -> Result<(f64, f64)> {
    let (m, omega) = a2_theta_setup();
    let cell = voronoi_cell_2d(&LatticeBasis::new(m.clone())?)?;
    let gl = GaussLegendre::new(
        NonZeroUsize::new(order).ok_or_else(|| GkpError::Validation("order must be positive".into()))?,
    );
    let nodes = gl.as_node_weight_pairs();
    let (mut i1, mut i2) = (0.0, 0.0);
    let s2 = 2f64.sqrt();
    for t in 0..cell.len() {
        let b = cell[t];
        let c = cell[(t + 1) % cell.len()];
        let jac_area = (b[0] * (c[1] - b[1]) - b[1] * (c[0] - b[0])).abs();
        for &(u, wu) in nodes {
            let uu = 0.5 * (u + 1.0);
            for &(v, wv) in nodes {
                let vv = 0.5 * (v + 1.0);
                let p = [uu * b[0] + uu * vv * (c[0] - b[0]), uu * b[1] + uu * vv * (c[1] - b[1])];
                let w = jac_area * uu * wu * wv / 4.0;
                let r2 = p[0] * p[0] + p[1] * p[1];
                let th = click_theta_product(&m, &omega, p)?;
                i1 += w * s2 * (-0.5 * PI * r2).exp() * th;
                i2 += w * 2.0 * s2 * (-2.0 * PI * r2).exp() * th;
            }
        }
    }
    Ok((i1, i2))
}

/// Click-detector coefficients `alpha = 1 - 2 theta(0|iG) + I1` and
/// `alpha + beta = 1 - 2 theta(0|iG) + I2` for the hexagonal code.
pub fn click_coefficients(code: &GkpCode, quad: ClickQuadrature) -> Result<ClickCoefficients> {
    if !is_hexagonal(code) {
        return Err(GkpError::Unsupported("click coefficients are derived for the hexagonal code".into()));
    }
    let (_, omega) = a2_theta_setup();
    let theta = riemann_theta_auto(&[Complex::new(0.0, 0.0); 2], &omega)?.re;
    let (i1, i2) = click_integrals(quad.order)?;
    let (i1f, i2f) = click_integrals(2 * quad.order)?;
    let i1_error = (i1f - i1).abs();
    let i2_error = (i2f - i2).abs();
    let (i1, i2) = (i1f, i2f);
    let alpha = 1.0 - 2.0 * theta + i1;
    let alpha_plus_beta = 1.0 - 2.0 * theta + i2;
    let coeffs = DepolarizingCoefficients::new(
        alpha,
        alpha_plus_beta - alpha,
        ChannelMethod::Click,
        i1_error.max(i2_error),
    )?;
    Ok(ClickCoefficients { theta, i1, i2, alpha, alpha_plus_beta, i1_error, i2_error, coeffs })
}

/// Logical fidelity bound of the parity (Wigner-shadow) channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityBound {
    /// `1 - p >= (1 + det(L_perp) / 2^{2n}) / 2`.
    pub fidelity_lower: f64,
    /// Corresponding upper bound on `p`.
    pub p_upper: f64,
    /// `(1 - 2^{-n (2 + (k/n) log2 d)}) / 2`.
    pub p_upper_reparameterized: f64,
    /// Number of encoded qudits `k` with `det(L_perp) = d^-k`.
    pub k: f64,
}

/// Fidelity bound for displaced parity measurements twirled by the lattice
/// Gaussian measure of width `sigma` (the bound does not depend on `sigma`).
pub fn parity_fidelity_bound(code: &GkpCode, sigma: f64) -> Result<ParityBound> {
    if !(sigma > 0.0) {
        return Err(GkpError::Validation("sigma must be positive".into()));
    }
    let n = code.n as f64;
    let det = code.dual_basis.covolume();
    let fidelity_lower = 0.5 * (1.0 + det / 4f64.powf(n));
    let d = code.d as f64;
    let k = -det.ln() / d.ln();
    let p_rep = 0.5 * (1.0 - 2f64.powf(-n * (2.0 + k / n * d.log2())));
    Ok(ParityBound { fidelity_lower, p_upper: 1.0 - fidelity_lower, p_upper_reparameterized: p_rep, k })
}
