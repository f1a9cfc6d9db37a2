//! Haar-random single-mode symplectic lattices and random-lattice Wigner
//! sampling.
//!
//! A unimodular lattice in the plane is symplectic, and the space of such
//! lattices with a frame is `SL_2(Z) \ SL_2(R)`. Samples are drawn from the
//! hyperbolic measure on the modular fundamental domain together with a
//! uniform rotation angle.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{GkpError, Result};
use crate::lattice::{enumerate_ball, lagrange_reduce_2d, LatticeBasis};
use crate::logical_shadows::{batch_count, median_of_means_report, EstimateReport};
use crate::phase_space::{sample_parity, GaussianComponent, StateModel};
use crate::stats::{parallel_chunks, Moments};
use crate::Complex;

/// A Haar-random unimodular lattice with its frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomLatticeSample {
    /// Basis rows `R(theta) b_1, R(theta) b_2` with
    /// `b_1 = (1/sqrt y, 0)`, `b_2 = (x/sqrt y, sqrt y)`.
    pub basis: LatticeBasis,
    /// Point `z = x + i y` of the fundamental domain.
    pub z: (f64, f64),
    /// Rotation angle.
    pub theta: f64,
}

/// Draws `z` from `dx dy / y^2` on `{|x| <= 1/2, |z| >= 1}` by rejection from
/// the strip `y >= sqrt(3)/2`, and `theta` uniformly.
pub fn sample_symplectic_lattice<R: Rng + ?Sized>(rng: &mut R) -> RandomLatticeSample {
    let y0 = 3f64.sqrt() / 2.0;
    let (x, y) = loop {
        let x = rng.random::<f64>() - 0.5;
        let u: f64 = 1.0 - rng.random::<f64>();
        let y = y0 / u;
        if x * x + y * y >= 1.0 {
            break (x, y);
        }
    };
    let theta = 2.0 * PI * rng.random::<f64>();
    let (s, c) = theta.sin_cos();
    let sy = y.sqrt();
    let rows = [[1.0 / sy, 0.0], [x / sy, sy]];
    let m = DMatrix::from_fn(2, 2, |i, j| {
        let (a, b) = (rows[i][0], rows[i][1]);
        if j == 0 {
            c * a - s * b
        } else {
            s * a + c * b
        }
    });
    RandomLatticeSample {
        basis: LatticeBasis::new(m).expect("unimodular basis has full rank"),
        z: (x, y),
        theta,
    }
}

/// Coefficient boxes larger than this are refused by [`siegel_transform`].
pub const ENUMERATION_BUDGET: f64 = 1e8;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn checked_enumerate(m: &LatticeBasis, r: f64, mut f: impl FnMut(&[i64], &[f64])) -> Result<()> {
    let red = LatticeBasis::new(lagrange_reduce_2d(m.matrix()))?;
    let inv = red.matrix().clone().try_inverse().expect("full rank");
    let boxes: f64 = (0..2)
        .map(|i| 2.0 * (r * inv.column(i).norm()).floor() + 1.0)
        .product();
    if boxes > ENUMERATION_BUDGET {
        return Err(GkpError::Validation(format!(
            "support radius {r} needs {boxes:e} coefficient vectors, above {ENUMERATION_BUDGET:e}"
        )));
    }
    enumerate_ball(&red, r, |c, v| f(c, v));
    Ok(())
}

/// Siegel transform `F_f(L) = sum_{v primitive} f(v)` for `f` supported in
/// the ball of radius `r`.
pub fn siegel_transform(f: &dyn Fn(&[f64]) -> f64, lattice: &LatticeBasis, r: f64) -> Result<f64> {
    if lattice.dim() != 2 {
        return Err(GkpError::Unsupported("Siegel transforms are implemented for n = 1".into()));
    }
    let mut acc = 0.0;
    checked_enumerate(lattice, r, |c, v| {
        if gcd(c[0], c[1]) == 1 {
            acc += f(v);
        }
    })?;
    Ok(acc)
}

/// `F~_f(L) = sum_{v in L, v != 0} f(v)`.
pub fn siegel_transform_tilde(f: &dyn Fn(&[f64]) -> f64, lattice: &LatticeBasis, r: f64) -> Result<f64> {
    if lattice.dim() != 2 {
        return Err(GkpError::Unsupported("Siegel transforms are implemented for n = 1".into()));
    }
    let mut acc = 0.0;
    checked_enumerate(lattice, r, |c, v| {
        if c.iter().any(|&x| x != 0) {
            acc += f(v);
        }
    })?;
    Ok(acc)
}

/// `F~_f(L)` evaluated as `sum_{k >= 1} F_{f(k .)}(L)`.
pub fn siegel_transform_tilde_by_multiples(
    f: &dyn Fn(&[f64]) -> f64,
    lattice: &LatticeBasis,
    r: f64,
) -> Result<f64> {
    let lambda = crate::lattice::shortest_vector_length(lattice);
    let kmax = (r / lambda).floor().max(1.0) as usize;
    let mut acc = 0.0;
    for k in 1..=kmax {
        let kf = k as f64;
        let g = |v: &[f64]| f(&[kf * v[0], kf * v[1]]);
        acc += siegel_transform(&g, lattice, r / kf)?;
    }
    Ok(acc)
}

/// Result of a mean value theorem check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MvtCheck {
    /// Monte Carlo mean of the Siegel transform.
    pub mc_mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// `int f / zeta(2)`.
    pub target: f64,
    /// `(mc_mean - target) / stderr`.
    pub z_score: f64,
    /// Number of lattices.
    pub samples: usize,
}

/// Compares the Haar average of `F_f` with `(6 / pi^2) int f`, where
/// `integral` is `int f` and `r` its support radius.
pub fn mvt_check(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    r: f64,
    integral: f64,
    n_lattices: usize,
    seed: u64,
) -> Result<MvtCheck> {
    let parts = parallel_chunks(n_lattices, seed, |rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            let l = sample_symplectic_lattice(rng);
            m.push(siegel_transform(f, &l.basis, r)?);
        }
        Ok::<_, GkpError>(m)
    });
    let mut m = Moments::default();
    for p in parts {
        m = m.merge(p?);
    }
    let target = 6.0 / (PI * PI) * integral;
    let (mean, se) = (m.mean(), m.stderr());
    let z = if se > 0.0 { (mean - target) / se } else if mean == target { 0.0 } else { f64::INFINITY };
    Ok(MvtCheck { mc_mean: mean, stderr: se, target, z_score: z, samples: n_lattices })
}

/// Indicator of the closed ball of radius `r` and its integral `pi r^2`.
pub fn ball_indicator(r: f64) -> (impl Fn(&[f64]) -> f64 + Sync, f64) {
    (move |v: &[f64]| if v[0] * v[0] + v[1] * v[1] <= r * r { 1.0 } else { 0.0 }, PI * r * r)
}

/// `sum_k exp(-a (k - c)^2)` over the integers.
fn theta_1d(a: f64, c: f64) -> f64 {
    if a < PI {
        let s: f64 = (1..)
            .map(|m: i64| (-PI * PI * (m * m) as f64 / a).exp() * (2.0 * PI * m as f64 * c).cos())
            .take_while(|t| t.abs() > 1e-18)
            .sum();
        (PI / a).sqrt() * (1.0 + 2.0 * s)
    } else {
        let r = (40.0 / a).sqrt();
        ((c - r).floor() as i64..=(c + r).ceil() as i64)
            .map(|k| (-a * (k as f64 - c).powi(2)).exp())
            .sum()
    }
}

/// Exact draw from the integers with weights `exp(-a (k - c)^2)`.
fn sample_dgauss_1d<R: Rng + ?Sized>(rng: &mut R, a: f64, c: f64) -> i64 {
    let r = (40.0 / a).sqrt();
    let (lo, hi) = ((c - r).floor() as i64, (c + r).ceil() as i64);
    let total: f64 = (lo..=hi).map(|k| (-a * (k as f64 - c).powi(2)).exp()).sum();
    let mut u = rng.random::<f64>() * total;
    for k in lo..=hi {
        u -= (-a * (k as f64 - c).powi(2)).exp();
        if u <= 0.0 {
            return k;
        }
    }
    hi
}

/// A reduced planar basis in Gram-Schmidt form for discrete Gaussian work.
#[derive(Debug, Clone)]
struct Planar {
    basis: LatticeBasis,
    b1_sq: f64,
    b2s_sq: f64,
    mu: f64,
}

impl Planar {
    fn new(m: &LatticeBasis) -> Self {
        let red = lagrange_reduce_2d(m.matrix());
        let b1 = [red[(0, 0)], red[(0, 1)]];
        let b2 = [red[(1, 0)], red[(1, 1)]];
        let b1_sq = b1[0] * b1[0] + b1[1] * b1[1];
        let mu = (b1[0] * b2[0] + b1[1] * b2[1]) / b1_sq;
        let b2s = [b2[0] - mu * b1[0], b2[1] - mu * b1[1]];
        Self {
            basis: LatticeBasis::new(red).expect("reduced basis has full rank"),
            b1_sq,
            b2s_sq: b2s[0] * b2s[0] + b2s[1] * b2s[1],
            mu,
        }
    }

    /// `sum_{x in L} exp(-s |x|^2)` by direct summation over the last
    /// coefficient.
    fn direct_sum(&self, s: f64) -> f64 {
        let a2 = s * self.b2s_sq;
        let r = (40.0 / a2).sqrt().ceil() as i64;
        (-r..=r)
            .map(|c2| (-a2 * (c2 * c2) as f64).exp() * theta_1d(s * self.b1_sq, self.mu * c2 as f64))
            .sum()
    }

    /// Draws `c_1 b_1 + c_2 b_2` with probability proportional to
    /// `exp(-s |x|^2)`: `c_2` by rejection from its Gram-Schmidt Gaussian,
    /// then `c_1` from its exact conditional.
    fn sample<R: Rng + ?Sized>(&self, s: f64, rng: &mut R) -> Vec<f64> {
        let a1 = s * self.b1_sq;
        let a2 = s * self.b2s_sq;
        let tmax = theta_1d(a1, 0.0);
        loop {
            let c2 = sample_dgauss_1d(rng, a2, 0.0);
            let t = self.mu * c2 as f64;
            if rng.random::<f64>() * tmax <= theta_1d(a1, t) {
                let c1 = sample_dgauss_1d(rng, a1, -t);
                return self.basis.point(&[c1, c2]);
            }
        }
    }
}

/// `Theta_L(i sigma^2 / (4 pi)) = sum_{x in L} exp(-sigma^2 |x|^2 / 2)` for a
/// planar lattice, using Poisson summation when the direct sum is long.
pub fn gaussian_theta(lattice: &LatticeBasis, sigma: f64) -> Result<f64> {
    if lattice.dim() != 2 {
        return Err(GkpError::Unsupported("planar lattices only".into()));
    }
    let s = 0.5 * sigma * sigma;
    let covol = lattice.covolume();
    if s * covol >= PI {
        return Ok(Planar::new(lattice).direct_sum(s));
    }
    let dual = LatticeBasis::new(lattice.matrix().clone().try_inverse().expect("full rank").transpose())?;
    Ok(PI / (s * covol) * Planar::new(&dual).direct_sum(PI * PI / s))
}

/// Draws `x` from `p_sigma(x; L)`: a lattice point with weight
/// `exp(-sigma^2 |xi|^2 / 2)` plus isotropic noise of variance `sigma^2`.
pub fn sample_lattice_point<R: Rng + ?Sized>(lattice: &LatticeBasis, sigma: f64, rng: &mut R) -> Vec<f64> {
    let p = Planar::new(lattice);
    let xi = p.sample(0.5 * sigma * sigma, rng);
    xi.iter().map(|v| v + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal)).collect()
}

/// `|epsilon(sigma)| <= 2 sigma Gamma(n + 1/2) / Gamma(n) (l_rho + l_G)`.
pub fn lipschitz_error_bound(sigma: f64, n: usize, l_rho: f64, l_g: f64) -> Result<f64> {
    if !(sigma > 0.0) || n == 0 {
        return Err(GkpError::Validation("need sigma > 0 and n >= 1".into()));
    }
    let nf = n as f64;
    Ok(2.0 * sigma * (ln_gamma(nf + 0.5) - ln_gamma(nf)).exp() * (l_rho + l_g))
}

/// Riemann zeta function for real `s > 1` (Euler-Maclaurin), infinite at
/// `s <= 1`.
pub fn zeta(s: f64) -> f64 {
    if s <= 1.0 {
        return f64::INFINITY;
    }
    let n = 20.0f64;
    let head: f64 = (1..20).map(|k| (k as f64).powf(-s)).sum();
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let (mut rising, mut fact) = (s, 2.0);
    for (j, bj) in b.iter().enumerate() {
        let k = 2 * j + 1;
        tail += bj / fact * rising * n.powf(-s - k as f64);
        rising *= (s + k as f64) * (s + k as f64 + 1.0);
        fact *= ((k + 2) * (k + 3)) as f64;
    }
    head + tail
}

/// The two second-moment bounds for `G~ = W_rho G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentBounds {
    /// `2^{2n} (1 + (2 pi / sigma^2)^n) ||G||_2^2`.
    pub lemma3_bound: f64,
    /// `zeta(n)^2 / zeta(2n) (4 pi (sigma^-2 + sigma^2) / sigma^4)^n ||G||_1^2`
    /// (infinite for `n = 1`).
    pub exact_inner_bound: f64,
}

/// Evaluates both second-moment bounds.
pub fn second_moment_bounds(n: usize, sigma: f64, norm2_sq: f64, norm1: f64) -> Result<SecondMomentBounds> {
    if !(sigma > 0.0) || n == 0 {
        return Err(GkpError::Validation("need sigma > 0 and n >= 1".into()));
    }
    let nf = n as i32;
    let lemma3 = 4f64.powi(nf) * (1.0 + (2.0 * PI / (sigma * sigma)).powi(nf)) * norm2_sq;
    let z = zeta(n as f64);
    let inner = if z.is_finite() {
        z * z / zeta(2.0 * n as f64)
            * (4.0 * PI * (sigma.powi(-2) + sigma * sigma) / sigma.powi(4)).powi(nf)
            * norm1
            * norm1
    } else {
        f64::INFINITY
    };
    Ok(SecondMomentBounds { lemma3_bound: lemma3, exact_inner_bound: inner })
}

/// Sample plan `N = K B` of the random-lattice protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvBudget {
    /// Kernel width.
    pub sigma: f64,
    /// Number of batches `ceil(2 ln(2M / delta))`.
    pub k: usize,
    /// Batch size `ceil(2^{2n} (1 + (2 pi / sigma^2)^n) max ||G||_2^2 / eps^2)`.
    pub b: usize,
    /// Total samples.
    pub n_total: usize,
}

/// Budget of the random-lattice protocol for `M` observables.
pub fn cv_shadow_budget(
    n: usize,
    sigma: f64,
    epsilon_tilde: f64,
    delta: f64,
    m: usize,
    max_norm2_sq: f64,
) -> Result<CvBudget> {
    if !(epsilon_tilde > 0.0 && delta > 0.0 && delta < 1.0) || m == 0 {
        return Err(GkpError::Validation("need eps > 0, delta in (0, 1), M >= 1".into()));
    }
    let bound = second_moment_bounds(n, sigma, max_norm2_sq, 0.0)?.lemma3_bound;
    let b = ((bound / (epsilon_tilde * epsilon_tilde)) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let k = batch_count(m, delta);
    Ok(CvBudget { sigma, k, b, n_total: k * b })
}

/// One `(lattice, point)` draw of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct CvPoint {
    /// The Haar-random lattice.
    pub lattice: RandomLatticeSample,
    /// `Theta_L(i sigma^2 / 4 pi)`.
    pub theta: f64,
    /// Sampled phase-space point.
    pub point: Vec<f64>,
}

/// Sample plan with its drawn points.
#[derive(Debug, Clone, PartialEq)]
pub struct CvShadowPlan {
    /// Budget.
    pub budget: CvBudget,
    /// The `N = K B` draws.
    pub points: Vec<CvPoint>,
}

/// Draws `budget.n_total` lattices and one point from `p_sigma(.; L)` on
/// each.
pub fn sample_cv_plan(budget: CvBudget, seed: u64) -> Result<CvShadowPlan> {
    let sigma = budget.sigma;
    let chunks = parallel_chunks(budget.n_total, seed, |rng, count| {
        (0..count)
            .map(|_| {
                let lattice = sample_symplectic_lattice(rng);
                let theta = gaussian_theta(&lattice.basis, sigma)?;
                let point = sample_lattice_point(&lattice.basis, sigma, rng);
                Ok(CvPoint { lattice, theta, point })
            })
            .collect::<Result<Vec<_>>>()
    });
    let mut points = Vec::with_capacity(budget.n_total);
    for c in chunks {
        points.extend(c?);
    }
    Ok(CvShadowPlan { budget, points })
}

/// How the Wigner function of the input state is read at each point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum WignerMode {
    /// Exact evaluation.
    Oracle,
    /// Average of `reps` displaced-parity samples times `2^n`.
    Parity {
        /// Parity repetitions per point.
        reps: usize,
    },
}

/// Protocol output for one observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvObservableReport {
    /// Median-of-means estimate of `G_bar = G~(0) + Tr[rho G]`.
    pub estimate: EstimateReport,
    /// Estimated parity offset `G~(0)`.
    pub parity_offset: f64,
    /// Exact parity offset.
    pub parity_offset_exact: f64,
    /// Estimate of `Tr[rho G]` after removing the offset estimate.
    pub trace_estimate: f64,
    /// Exact `Tr[rho G]`.
    pub trace_exact: f64,
    /// Exact `G_bar`.
    pub target: f64,
    /// Haar average of the smoothed estimator, `G_bar + epsilon(sigma)`.
    pub smoothed_target: f64,
    /// `epsilon(sigma)`.
    pub epsilon_sigma: f64,
    /// `||G||_2^2`.
    pub norm2_sq: f64,
    /// Monte Carlo estimate of `E_L int u_sigma(x; L) G~(x)^2 dx`, the
    /// unnormalised second moment bounded by `lemma3_bound`, computed as the mean of
    /// `Theta_L G~(x)^2` over the plan.
    pub second_moment: f64,
    /// Monte Carlo second moment of the unbiased per-sample estimator
    /// `Theta_L G~(x)`. For `n = 1` its Haar expectation diverges
    /// logarithmically, so this value grows slowly with the sample count.
    pub estimator_second_moment: f64,
}

/// Full protocol output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvShadowReport {
    /// Sample plan.
    pub budget: CvBudget,
    /// Wigner read-out mode.
    pub mode: WignerMode,
    /// One report per observable.
    pub observables: Vec<CvObservableReport>,
}

/// Haar average of `Theta_L sum_{xi in L} ...` for the product mixture
/// `P = W_rho G`: `(P * N_sigma)(0) + int exp(-sigma^2 |xi|^2 / 2) (P * N_sigma)(xi)`.
pub fn smoothed_target(product: &StateModel, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let smoothed = product.smoothed(s2);
    let at_zero = smoothed.wigner(&vec![0.0; 2 * product.n()]);
    let k = 2 * product.n();
    let spread: f64 = smoothed
        .components()
        .iter()
        .map(|c| {
            let g = GaussianComponent::new(
                Complex::new(1.0, 0.0),
                c.mean.clone(),
                &c.cov + DMatrix::identity(k, k) / s2,
            )
            .expect("positive definite");
            (c.weight * g.density(&vec![0.0; k])).re
        })
        .sum::<f64>()
        * (2.0 * PI / s2).powi(product.n() as i32);
    at_zero + spread
}

/// Lattice sums over a fixed lattice `L`: the plain sum
/// `sum_{xi in L} P(xi)` and the smoothed sum
/// `sum_{xi in L} exp(-sigma^2 |xi|^2 / 2) (P * N_sigma)(xi)`, which equals
/// `Theta_L(i sigma^2 / 4 pi) E_{x ~ p_sigma(.; L)} P(x)`.
pub fn lattice_sums(product: &StateModel, lattice: &LatticeBasis, sigma: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0) {
        return Err(GkpError::Validation("sigma must be positive".into()));
    }
    let s2 = sigma * sigma;
    let smoothed = product.smoothed(s2);
    let reach = product
        .components()
        .iter()
        .map(|c| {
            let spread = c.cov.symmetric_eigenvalues().max() + s2;
            c.mean.iter().map(|m| m * m).sum::<f64>().sqrt() + (80.0 * spread).sqrt()
        })
        .fold(0.0, f64::max);
    let (mut plain, mut smooth) = (0.0, 0.0);
    enumerate_ball(lattice, reach, |_, xi| {
        plain += product.wigner(xi);
        smooth += (-0.5 * s2 * (xi[0] * xi[0] + xi[1] * xi[1])).exp() * smoothed.wigner(xi);
    });
    Ok((plain, smooth))
}

/// Runs the random-lattice protocol: the per-sample estimator is
/// `Theta_L(i sigma^2 / 4 pi) W^(x) G(x)` with `x ~ p_sigma(.; L)` and `L`
/// Haar-random; its Haar mean tends to `G~(0) + Tr[rho G]` as `sigma -> 0`.
pub fn cv_shadow_run(
    state: &StateModel,
    observables: &[StateModel],
    plan: &CvShadowPlan,
    delta: f64,
    epsilon_tilde: f64,
    mode: WignerMode,
    seed: u64,
) -> Result<CvShadowReport> {
    if observables.is_empty() {
        return Err(GkpError::Validation("no observables".into()));
    }
    if state.n() != 1 || observables.iter().any(|g| g.n() != 1) {
        return Err(GkpError::Unsupported("the random-lattice protocol is implemented for n = 1".into()));
    }
    let sigma = plan.budget.sigma;
    if !(sigma > 0.0) {
        return Err(GkpError::Validation("sigma must be positive".into()));
    }
    let reps = match mode {
        WignerMode::Oracle => 0,
        WignerMode::Parity { reps } => reps.max(1),
    };
    let read = |x: &[f64], rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        if reps == 0 {
            state.wigner(x)
        } else {
            let s: i64 = (0..reps).map(|_| sample_parity(state, x, rng) as i64).sum();
            2.0 * s as f64 / reps as f64
        }
    };
    let wvals: Vec<f64> = parallel_chunks(plan.points.len(), seed, |rng, count| (rng.clone(), count))
        .into_iter()
        .enumerate()
        .flat_map(|(c, (mut rng, count))| {
            let start = c * crate::stats::CHUNK;
            plan.points[start..start + count]
                .iter()
                .map(|p| p.theta * read(&p.point, &mut rng))
                .collect::<Vec<_>>()
        })
        .collect();
    let origin = [0.0, 0.0];
    let w0_exact = state.wigner(&origin);
    let w0_est = if reps == 0 {
        w0_exact
    } else {
        let mut rng = crate::stats::stream_rng(seed, u64::MAX);
        let total = plan.points.len().max(1) * reps;
        let s: i64 = (0..total).map(|_| sample_parity(state, &origin, &mut rng) as i64).sum();
        2.0 * s as f64 / total as f64
    };
    let mut reports = Vec::with_capacity(observables.len());
    for g in observables {
        let values: Vec<f64> = plan
            .points
            .iter()
            .zip(&wvals)
            .map(|(p, w)| w * g.wigner(&p.point))
            .collect();
        let estimate = median_of_means_report(&values, plan.budget.k, epsilon_tilde, delta)?;
        let g0 = g.wigner(&origin);
        let product = state.product(g)?;
        let trace_exact = product.total_weight().re;
        let target = w0_exact * g0 + trace_exact;
        let smoothed = smoothed_target(&product, sigma);
        reports.push(CvObservableReport {
            parity_offset: w0_est * g0,
            parity_offset_exact: w0_exact * g0,
            trace_estimate: estimate.value - w0_est * g0,
            trace_exact,
            target,
            smoothed_target: smoothed,
            epsilon_sigma: smoothed - target,
            norm2_sq: g.overlap(g),
            second_moment: values.iter().zip(&plan.points).map(|(v, p)| v * v / p.theta).sum::<f64>()
                / values.len().max(1) as f64,
            estimator_second_moment: values.iter().map(|v| v * v).sum::<f64>() / values.len().max(1) as f64,
            estimate,
        });
    }
    Ok(CvShadowReport { budget: plan.budget, mode, observables: reports })
}
