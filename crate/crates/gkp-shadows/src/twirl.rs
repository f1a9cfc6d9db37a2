//! Displacement twirls over the dual lattice.
//!
//! [`RandomWalkTwirl`] takes `2m` half-steps `+-xi_i/2` along every dual
//! generator, so its characteristic function is `prod_i cos^{2m}(pi xi_i^T J a)`.
//! [`LatticeGaussianTwirl`] is the Gaussian-regularised lattice measure
//! `p_sigma(g) ~ sum_{xi in L_perp} exp(-sigma^2 |xi|^2/2 - |g - xi|^2/(2 sigma^2))`.

use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::error::{GkpError, Result};
use crate::lattice::{
    cvp, dual_basis, enumerate_ball, lattice_constants, shortest_vector_length, symplectic_product,
    GkpCode, LatticeBasis,
};

/// Random walk with `m` rounds of two half-steps per dual generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomWalkTwirl {
    /// Dual lattice basis; rows are the generators `xi_i`.
    pub dual_basis: LatticeBasis,
    /// Steps per generator.
    pub m: usize,
}

/// Result of [`RandomWalkTwirl::nu_power_error`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerError {
    /// Exact `nu(Delta)^m`.
    pub approx: f64,
    /// Gaussian form `exp(-pi^2 |M_perp|_F^2 |delta|^2 m)`.
    pub bound: f64,
    /// Direction-resolved Gaussian form `exp(-pi^2 |M_perp J delta|^2 m)`.
    pub sharp: f64,
    /// `approx / bound`.
    pub ratio: f64,
    /// Distance `|delta|` from `Delta` to the stabilizer lattice.
    pub delta_norm: f64,
    /// Whether `|delta| < lambda1(L) / 4`.
    pub in_regime: bool,
}

impl RandomWalkTwirl {
    /// Builds a walk; `m = 0` is allowed and gives the trivial twirl.
    pub fn new(dual_basis: LatticeBasis, m: usize) -> Self {
        Self { dual_basis, m }
    }

    /// Walk over the dual generators of `code`.
    pub fn for_code(code: &GkpCode, m: usize) -> Self {
        Self::new(code.dual_basis.clone(), m)
    }

    /// Single-round characteristic `prod_i cos^2(pi xi_i^T J a)`.
    pub fn nu_generators(&self, a: &[f64]) -> f64 {
        (0..self.dual_basis.dim())
            .map(|i| (PI * symplectic_product(&self.dual_basis.row(i), a)).cos().powi(2))
            .product()
    }

    /// Characteristic function of the full walk, `nu_generators^m`.
    pub fn characteristic(&self, a: &[f64]) -> f64 {
        self.nu_generators(a).powi(self.m as i32)
    }

    /// Compares `nu(Delta)^m` with its Gaussian approximations around the
    /// nearest stabilizer lattice point.
    pub fn nu_power_error(&self, delta_pt: &[f64], m: usize) -> PowerError {
        let stab = dual_basis(&self.dual_basis).expect("dual of a full-rank basis");
        let x = cvp(delta_pt, &stab);
        let delta: Vec<f64> = delta_pt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let d2: f64 = delta.iter().map(|v| v * v).sum();
        let frob2: f64 = self.dual_basis.matrix().iter().map(|v| v * v).sum();
        let proj2: f64 = (0..self.dual_basis.dim())
            .map(|i| symplectic_product(&self.dual_basis.row(i), &delta).powi(2))
            .sum();
        let approx = self.nu_generators(delta_pt).powi(m as i32);
        let bound = (-PI * PI * frob2 * d2 * m as f64).exp();
        let sharp = (-PI * PI * proj2 * m as f64).exp();
        let lambda1 = shortest_vector_length(&stab);
        PowerError {
            approx,
            bound,
            sharp,
            ratio: approx / bound,
            delta_norm: d2.sqrt(),
            in_regime: d2.sqrt() < lambda1 / 4.0,
        }
    }

    /// Draws a walk displacement `sum_i (k_i / 2) xi_i` with `k_i` a sum of
    /// `2m` fair signs.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let k = self.dual_basis.dim();
        let mut g = vec![0.0; k];
        for i in 0..k {
            let steps: i64 = (0..2 * self.m).map(|_| if rng.random::<bool>() { 1 } else { -1 }).sum();
            let row = self.dual_basis.row(i);
            for (gj, rj) in g.iter_mut().zip(&row) {
                *gj += 0.5 * steps as f64 * rj;
            }
        }
        g
    }
}

/// Convenience wrapper for [`RandomWalkTwirl::nu_generators`].
pub fn nu_generators(twirl: &RandomWalkTwirl, a: &[f64]) -> f64 {
    twirl.nu_generators(a)
}

/// Convenience wrapper for [`RandomWalkTwirl::nu_power_error`].
pub fn nu_power_error(twirl: &RandomWalkTwirl, delta: &[f64], m: usize) -> PowerError {
    twirl.nu_power_error(delta, m)
}

/// Convenience wrapper for [`RandomWalkTwirl::sample`].
pub fn sample_walk_displacement<R: Rng + ?Sized>(twirl: &RandomWalkTwirl, rng: &mut R) -> Vec<f64> {
    twirl.sample(rng)
}

/// Relative envelope mass tolerated outside the truncation radius.
pub const ENVELOPE_TAIL: f64 = 1e-10;

/// Lattice-Gaussian displacement measure over the dual lattice.
#[derive(Debug, Clone)]
pub struct LatticeGaussianTwirl {
    /// Dual lattice basis.
    pub dual_basis: LatticeBasis,
    /// Width `sigma` of the Gaussian kernel; the envelope has width `1/sigma`.
    pub sigma: f64,
    /// Radius of the retained lattice components.
    pub truncation: f64,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    theta: f64,
    index: WeightedIndex<f64>,
}

/// Envelope mass fraction beyond radius `r` for a `2n`-dimensional lattice
/// with covering radius `mu`: `Q(n, sigma^2 (r - mu)^2 / 2)`.
pub fn envelope_tail(n: usize, sigma: f64, r: f64, mu: f64) -> f64 {
    let s = (r - mu).max(0.0);
    gamma_ur(n as f64, 0.5 * sigma * sigma * s * s)
}

impl LatticeGaussianTwirl {
    /// Builds the measure. The truncation starts at
    /// `max(3 sigma + mu, 5 lambda1)` and doubles until the envelope tail is
    /// below [`ENVELOPE_TAIL`].
    pub fn new(dual_basis: LatticeBasis, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(GkpError::Validation(format!("sigma = {sigma} must be positive")));
        }
        let consts = lattice_constants(&dual_basis)?;
        let mut r = (3.0 * sigma + consts.covering_radius).max(5.0 * consts.lambda1);
        while envelope_tail(dual_basis.n(), sigma, r, consts.covering_radius) > ENVELOPE_TAIL {
            r *= 2.0;
        }
        Self::with_truncation(dual_basis, sigma, r)
    }

    /// Builds the measure with an explicit truncation radius.
    pub fn with_truncation(dual_basis: LatticeBasis, sigma: f64, truncation: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(GkpError::Validation(format!("sigma = {sigma} must be positive")));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        enumerate_ball(&dual_basis, truncation, |_, v| {
            let r2: f64 = v.iter().map(|x| x * x).sum();
            points.push(v.to_vec());
            weights.push((-0.5 * sigma * sigma * r2).exp());
        });
        let theta = weights.iter().sum();
        let index = WeightedIndex::new(&weights)
            .map_err(|e| GkpError::Validation(format!("envelope weights: {e}")))?;
        Ok(Self { dual_basis, sigma, truncation, points, weights, theta, index })
    }

    /// Measure for the dual lattice of `code`.
    pub fn for_code(code: &GkpCode, sigma: f64) -> Result<Self> {
        Self::new(code.dual_basis.clone(), sigma)
    }

    /// Number of retained lattice components.
    pub fn component_count(&self) -> usize {
        self.points.len()
    }

    /// Truncated `Theta_{L_perp}(i sigma^2 / 4 pi)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Estimated envelope mass fraction dropped by the truncation.
    pub fn tail_estimate(&self) -> f64 {
        let mu = lattice_constants(&self.dual_basis).map(|c| c.covering_radius).unwrap_or(0.0);
        envelope_tail(self.dual_basis.n(), self.sigma, self.truncation, mu)
    }

    /// Probability density `p_sigma(g)`.
    pub fn density(&self, g: &[f64]) -> f64 {
        let n = self.dual_basis.n();
        let s2 = self.sigma * self.sigma;
        let norm = (2.0 * PI * s2).powi(n as i32) * self.theta;
        let mut acc = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let d2: f64 = p.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < 80.0 * s2 {
                acc += w * (-0.5 * d2 / s2).exp();
            }
        }
        acc / norm
    }

    /// Exact two-stage draw: a lattice point by envelope weight, then
    /// Gaussian noise of variance `sigma^2`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let p = &self.points[self.index.sample(rng)];
        p.iter()
            .map(|x| x + self.sigma * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }
}

/// Convenience wrapper for [`LatticeGaussianTwirl::density`].
pub fn lattice_gaussian_density(twirl: &LatticeGaussianTwirl, g: &[f64]) -> f64 {
    twirl.density(g)
}

/// Convenience wrapper for [`LatticeGaussianTwirl::sample`].
pub fn sample_lattice_gaussian<R: Rng + ?Sized>(twirl: &LatticeGaussianTwirl, rng: &mut R) -> Vec<f64> {
    twirl.sample(rng)
}

/// Characteristic function of the lattice-Gaussian measure and the
/// associated displacement-error density.
///
/// By Poisson summation over `L_perp`,
/// `nu(D) = E[exp(-i 2 pi g^T J D)] = c^{-1} e^{-2 pi^2 sigma^2 |D|^2} sum_{xi in L} e^{-2 pi^2 |D - xi|^2 / sigma^2}`
/// with `c = det(L_perp) sigma^{2n} Theta / (2 pi)^n`, so that `nu(0) = 1`.
#[derive(Debug, Clone)]
pub struct NuSigma {
    stab: LatticeBasis,
    sigma: f64,
    theta: f64,
    dual_covolume: f64,
    n: usize,
}

impl NuSigma {
    /// Prepares the evaluator for `code` at width `sigma`.
    pub fn new(code: &GkpCode, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(GkpError::Validation(format!("sigma = {sigma} must be positive")));
        }
        let theta = crate::lattice::lattice_theta_imag(&code.dual_basis, sigma * sigma / (4.0 * PI))?;
        Ok(Self {
            stab: code.basis.clone(),
            sigma,
            theta,
            dual_covolume: code.dual_basis.covolume(),
            n: code.n,
        })
    }

    fn lattice_sum(&self, delta: &[f64]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let centre = cvp(delta, &self.stab);
        let local: Vec<f64> = delta.iter().zip(&centre).map(|(a, b)| a - b).collect();
        let r = self.sigma * (40.0f64).sqrt() / PI + 1e-12;
        let mut acc = 0.0;
        enumerate_ball(&self.stab, r + local.iter().map(|v| v * v).sum::<f64>().sqrt(), |_, v| {
            let d2: f64 = local.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
            acc += (-2.0 * PI * PI * d2 / s2).exp();
        });
        acc
    }

    /// Characteristic function `nu(D)`, with `nu(0) = 1`.
    pub fn characteristic(&self, delta: &[f64]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d2: f64 = delta.iter().map(|v| v * v).sum();
        let c = self.dual_covolume * s2.powi(self.n as i32) * self.theta / (2.0 * PI).powi(self.n as i32);
        (-2.0 * PI * PI * s2 * d2).exp() * self.lattice_sum(delta) / c
    }

    /// The same sum normalised by `c' = det(L_perp) sigma^{2n} Theta`, without
    /// the `(2 pi)^n` factor; equals `characteristic / (2 pi)^n`.
    pub fn with_unreduced_constant(&self, delta: &[f64]) -> f64 {
        self.characteristic(delta) / (2.0 * PI).powi(self.n as i32)
    }

    /// Closed-form `int nu(D) dD`
    /// `= (1 + sigma^4)^{-n} sum_{xi in L} e^{-2 pi^2 sigma^2 |xi|^2 / (1 + sigma^4)} / (det(L_perp) Theta)`.
    pub fn total_mass(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        let a = 2.0 * PI * PI * s2 / (1.0 + s2 * s2);
        let r = (40.0 / a).sqrt();
        let mut acc = 0.0;
        enumerate_ball(&self.stab, r, |_, v| acc += (-a * v.iter().map(|x| x * x).sum::<f64>()).exp());
        acc / ((1.0 + s2 * s2).powi(self.n as i32) * self.dual_covolume * self.theta)
    }

    /// Unit-mass displacement-error density `nu(D) / int nu`.
    pub fn density(&self, delta: &[f64]) -> f64 {
        self.characteristic(delta) / self.total_mass()
    }
}

/// Characteristic function of the lattice-Gaussian twirl at `delta`.
pub fn nu_sigma(code: &GkpCode, sigma: f64, delta: &[f64]) -> Result<f64> {
    Ok(NuSigma::new(code, sigma)?.characteristic(delta))
}

/// Serializable twirl specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TwirlSpec {
    /// No displacement twirl.
    None,
    /// Random walk with `m` steps per generator.
    Walk {
        /// Steps per generator.
        m: usize,
    },
    /// Lattice-Gaussian measure of width `sigma`.
    Gaussian {
        /// Kernel width.
        sigma: f64,
    },
}

/// A twirl specification bound to a code, ready for sampling.
#[derive(Debug, Clone)]
pub enum TwirlSampler {
    /// Trivial twirl.
    None(usize),
    /// Random walk.
    Walk(RandomWalkTwirl),
    /// Lattice Gaussian.
    Gaussian(Box<LatticeGaussianTwirl>),
}

impl TwirlSpec {
    /// Binds the specification to the dual lattice of `code`.
    pub fn bind(&self, code: &GkpCode) -> Result<TwirlSampler> {
        Ok(match self {
            TwirlSpec::None => TwirlSampler::None(code.n),
            TwirlSpec::Walk { m } => TwirlSampler::Walk(RandomWalkTwirl::for_code(code, *m)),
            TwirlSpec::Gaussian { sigma } => {
                TwirlSampler::Gaussian(Box::new(LatticeGaussianTwirl::for_code(code, *sigma)?))
            }
        })
    }

    /// Parses `none`, `walk:m` or `gaussian:sigma`.
    pub fn parse(s: &str) -> Result<Self> {
        let (k, v) = s.split_once(':').unwrap_or((s, ""));
        let bad = || GkpError::Validation(format!("bad twirl spec '{s}'"));
        match k {
            "none" => Ok(TwirlSpec::None),
            "walk" => Ok(TwirlSpec::Walk { m: v.parse().map_err(|_| bad())? }),
            "gaussian" => Ok(TwirlSpec::Gaussian { sigma: v.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

impl TwirlSampler {
    /// Draws one twirl displacement.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            TwirlSampler::None(n) => vec![0.0; 2 * n],
            TwirlSampler::Walk(w) => w.sample(rng),
            TwirlSampler::Gaussian(g) => g.sample(rng),
        }
    }
}
