//! Gaussian-mixture phase-space states.
//!
//! A [`StateModel`] is a Wigner function `W(x) = sum_k w_k N(x; mu_k, V_k)`
//! with normalised Gaussian densities `N`. Characteristic, Husimi and overlap
//! integrals are closed-form on this class, and heterodyne pointer states are
//! single Gaussians, so the class is closed under the whole shadow pipeline.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GkpError, Result};
use crate::lattice::GkpCode;
use crate::symplectic::SymplecticMatrix;
use crate::Complex;

/// Wigner covariance of the vacuum, `I / (4 pi)` per quadrature.
pub const VACUUM_VARIANCE: f64 = 1.0 / (4.0 * PI);

/// One weighted Gaussian term of a Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent {
    /// Complex weight; the component integrates to this value.
    pub weight: Complex,
    /// Mean in `R^{2n}`.
    pub mean: Vec<f64>,
    /// Wigner-representation covariance (symmetric positive definite).
    pub cov: DMatrix<f64>,
    prec: Vec<f64>,
    log_norm: f64,
}

impl GaussianComponent {
    /// Validates the covariance and caches its inverse.
    pub fn new(weight: Complex, mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let k = mean.len();
        if cov.nrows() != k || cov.ncols() != k || k % 2 != 0 || k == 0 {
            return Err(GkpError::Validation("mean and covariance dimensions differ".into()));
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(GkpError::Validation("covariance is not symmetric".into()));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| GkpError::Validation("covariance is not positive definite".into()))?;
        let logdet = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let inv = chol.inverse();
        let prec = (0..k * k).map(|t| inv[(t / k, t % k)]).collect();
        let log_norm = -0.5 * (k as f64 * (2.0 * PI).ln() + logdet);
        Ok(Self { weight, mean, cov, prec, log_norm })
    }

    /// Normalised Gaussian density `N(x; mean, cov)` (weight excluded).
    pub fn density(&self, x: &[f64]) -> f64 {
        let k = self.mean.len();
        let mut q = 0.0;
        for i in 0..k {
            let di = x[i] - self.mean[i];
            let mut row = 0.0;
            for j in 0..k {
                row += self.prec[i * k + j] * (x[j] - self.mean[j]);
            }
            q += di * row;
        }
        (self.log_norm - 0.5 * q).exp()
    }

    /// Inverse covariance.
    pub fn precision(&self) -> DMatrix<f64> {
        let k = self.mean.len();
        DMatrix::from_fn(k, k, |i, j| self.prec[i * k + j])
    }

    /// Characteristic function `int N(x) exp(i 2 pi x^T J eta) dx` (weight excluded).
    pub fn characteristic(&self, eta: &[f64]) -> Complex {
        let k = self.mean.len();
        let n = k / 2;
        let mut je = vec![0.0; k];
        for i in 0..n {
            je[i] = eta[n + i];
            je[n + i] = -eta[i];
        }
        let phase: f64 = self.mean.iter().zip(&je).map(|(a, b)| a * b).sum();
        let mut quad = 0.0;
        for i in 0..k {
            for j in 0..k {
                quad += je[i] * self.cov[(i, j)] * je[j];
            }
        }
        Complex::from_polar((-2.0 * PI * PI * quad).exp(), 2.0 * PI * phase)
    }

    /// Smallest eigenvalue of the covariance.
    pub fn min_variance(&self) -> f64 {
        self.cov.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A CV state represented by a Gaussian-mixture Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct StateModel {
    n: usize,
    components: Vec<GaussianComponent>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    w_re: f64,
    w_im: f64,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    components: Vec<ComponentJson>,
}

/// Logical basis states of a single-mode qubit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalState {
    /// `Z = +1` eigenstate.
    Zero,
    /// `Z = -1` eigenstate.
    One,
    /// `X = +1` eigenstate.
    Plus,
    /// `X = -1` eigenstate.
    Minus,
}

impl LogicalState {
    /// Parses `0`, `1`, `+`, `-` (also `plus`, `minus`).
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "0" | "zero" => Ok(Self::Zero),
            "1" | "one" => Ok(Self::One),
            "+" | "plus" => Ok(Self::Plus),
            "-" | "minus" => Ok(Self::Minus),
            other => Err(GkpError::Validation(format!("unknown logical state '{other}'"))),
        }
    }
}

impl StateModel {
    /// Validates dimensions and the normalisation `sum w = 1` to `1e-9`.
    pub fn new(n: usize, components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(GkpError::Validation("state has no components".into()));
        }
        if components.iter().any(|c| c.mean.len() != 2 * n) {
            return Err(GkpError::Validation("component dimension differs from 2n".into()));
        }
        let total: Complex = components.iter().map(|c| c.weight).sum();
        if (total - Complex::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(GkpError::Validation(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { n, components })
    }

    fn new_unchecked(n: usize, components: Vec<GaussianComponent>) -> Self {
        Self { n, components }
    }

    /// A Gaussian-mixture phase-space function without the trace condition,
    /// e.g. the Wigner function of an observable. An empty list is the zero
    /// function.
    pub fn observable(n: usize, components: Vec<GaussianComponent>) -> Result<Self> {
        if components.iter().any(|c| c.mean.len() != 2 * n) {
            return Err(GkpError::Validation("component dimension differs from 2n".into()));
        }
        Ok(Self { n, components })
    }

    /// Pointwise product `W_self(x) W_other(x)`, again a Gaussian mixture.
    pub fn product(&self, other: &StateModel) -> Result<StateModel> {
        if self.n != other.n {
            return Err(GkpError::Validation("mode counts differ".into()));
        }
        let mut comps = Vec::with_capacity(self.components.len() * other.components.len());
        for a in &self.components {
            let pa = a.precision();
            for b in &other.components {
                let pb = b.precision();
                let cov = (&pa + &pb)
                    .try_inverse()
                    .ok_or_else(|| GkpError::Validation("singular product covariance".into()))?;
                let cov = (&cov + cov.transpose()) * 0.5;
                let mean = &cov
                    * (&pa * DVector::from_column_slice(&a.mean) + &pb * DVector::from_column_slice(&b.mean));
                let joint = GaussianComponent::new(Complex::new(1.0, 0.0), a.mean.clone(), &a.cov + &b.cov)?;
                let w = a.weight * b.weight * joint.density(&b.mean);
                comps.push(GaussianComponent::new(w, mean.iter().copied().collect(), cov)?);
            }
        }
        Ok(Self { n: self.n, components: comps })
    }

    /// `int W(x) dx`, the sum of the weights.
    pub fn total_weight(&self) -> Complex {
        self.components.iter().map(|c| c.weight).sum()
    }

    /// Number of modes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mixture components.
    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    /// Sum of `|w_k|`.
    pub fn weight_l1(&self) -> f64 {
        self.components.iter().map(|c| c.weight.norm()).sum()
    }

    /// Wigner function at `x`.
    pub fn wigner(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.weight.re * c.density(x)).sum()
    }

    /// Imaginary part of the mixture at `x`; zero for a valid state.
    pub fn wigner_imag(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.weight.im * c.density(x)).sum()
    }

    /// Characteristic function `chi(eta) = int W(x) exp(i 2 pi x^T J eta) dx`.
    pub fn characteristic(&self, eta: &[f64]) -> Complex {
        self.components.iter().map(|c| c.weight * c.characteristic(eta)).sum()
    }

    /// Husimi function `<alpha| rho |alpha>`, the Wigner function smoothed
    /// by the vacuum kernel.
    pub fn husimi(&self, alpha: &[f64]) -> f64 {
        self.smoothed(VACUUM_VARIANCE).wigner(alpha)
    }

    /// The mixture with `var * I` added to every covariance.
    pub fn smoothed(&self, var: f64) -> StateModel {
        let k = 2 * self.n;
        let add = DMatrix::<f64>::identity(k, k) * var;
        let comps = self
            .components
            .iter()
            .map(|c| {
                GaussianComponent::new(c.weight, c.mean.clone(), &c.cov + &add)
                    .expect("adding a positive multiple of I keeps the covariance valid")
            })
            .collect();
        Self::new_unchecked(self.n, comps)
    }

    /// Displaced state `D(xi) rho D(xi)^dag`, whose Wigner function is `W(x - xi)`.
    pub fn displaced(&self, xi: &[f64]) -> StateModel {
        let comps = self
            .components
            .iter()
            .map(|c| {
                let mean = c.mean.iter().zip(xi).map(|(a, b)| a + b).collect();
                GaussianComponent { mean, ..c.clone() }
            })
            .collect();
        Self::new_unchecked(self.n, comps)
    }

    /// `U_S rho U_S^dag`, whose Wigner function is `W(S x)`.
    pub fn transformed(&self, s: &SymplecticMatrix) -> Result<StateModel> {
        if s.n() != self.n {
            return Err(GkpError::Validation("symplectic matrix has the wrong size".into()));
        }
        let sinv = s.inverse();
        let si = sinv.matrix();
        let comps = self
            .components
            .iter()
            .map(|c| {
                let mean = (si * DVector::from_column_slice(&c.mean)).iter().copied().collect();
                GaussianComponent::new(c.weight, mean, si * &c.cov * si.transpose())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new_unchecked(self.n, comps))
    }

    /// `Tr[rho sigma] = int W_rho W_sigma`.
    pub fn overlap(&self, other: &StateModel) -> f64 {
        let mut acc = Complex::new(0.0, 0.0);
        for a in &self.components {
            for b in &other.components {
                let joint = GaussianComponent::new(
                    Complex::new(1.0, 0.0),
                    a.mean.clone(),
                    &a.cov + &b.cov,
                )
                .expect("sum of positive definite matrices");
                acc += a.weight * b.weight * joint.density(&b.mean);
            }
        }
        acc.re
    }

    /// Mixture `sum_k p_k rho_k`.
    pub fn mixture(parts: &[(f64, &StateModel)]) -> Result<StateModel> {
        let n = parts
            .first()
            .map(|p| p.1.n)
            .ok_or_else(|| GkpError::Validation("empty mixture".into()))?;
        let mut comps = Vec::new();
        for (p, s) in parts {
            for c in &s.components {
                comps.push(GaussianComponent { weight: c.weight * *p, ..c.clone() });
            }
        }
        StateModel::new(n, comps)
    }

    /// JSON form `{"n", "components": [{"w_re","w_im","mean","cov"}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let k = 2 * self.n;
        let comps = self
            .components
            .iter()
            .map(|c| ComponentJson {
                w_re: c.weight.re,
                w_im: c.weight.im,
                mean: c.mean.clone(),
                cov: (0..k).map(|i| (0..k).map(|j| c.cov[(i, j)]).collect()).collect(),
            })
            .collect();
        serde_json::to_value(StateJson { n: self.n, components: comps }).expect("serializable")
    }

    /// Parses the JSON form.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let s: StateJson = serde_json::from_value(v.clone())
            .map_err(|e| GkpError::Validation(format!("state json: {e}")))?;
        let k = 2 * s.n;
        let comps = s
            .components
            .into_iter()
            .map(|c| {
                if c.cov.len() != k || c.cov.iter().any(|r| r.len() != k) {
                    return Err(GkpError::Validation("state json: bad covariance shape".into()));
                }
                let flat: Vec<f64> = c.cov.into_iter().flatten().collect();
                GaussianComponent::new(
                    Complex::new(c.w_re, c.w_im),
                    c.mean,
                    DMatrix::from_row_slice(k, k, &flat),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(s.n, comps)
    }

    /// Builds a state from a name: `vacuum`, `coherent:x,p`,
    /// `thermal:var` or `grid:<code>,delta=D[,logical=0|1|+|-][,trunc=R]`.
    pub fn from_name(spec: &str) -> Result<Self> {
        let (head, args) = spec.split_once(':').unwrap_or((spec, ""));
        let bad = |m: &str| GkpError::Validation(format!("state '{spec}': {m}"));
        match head {
            "vacuum" => Ok(make_vacuum(1)),
            "coherent" => {
                let v: Vec<f64> = args
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| bad("bad coordinate")))
                    .collect::<Result<_>>()?;
                if v.is_empty() || v.len() % 2 != 0 {
                    return Err(bad("coherent needs an even number of coordinates"));
                }
                Ok(make_coherent(&v))
            }
            "thermal" => {
                let var: f64 = args.trim().parse().map_err(|_| bad("bad variance"))?;
                make_thermal(1, var)
            }
            "grid" => {
                let mut parts = args.split(',');
                let code = GkpCode::from_name(parts.next().unwrap_or("").trim())?;
                let (mut delta, mut logical, mut trunc) = (None, LogicalState::Zero, None);
                for p in parts {
                    let (k, v) = p.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                    match k.trim() {
                        "delta" => delta = Some(v.trim().parse::<f64>().map_err(|_| bad("bad delta"))?),
                        "logical" => logical = LogicalState::parse(v.trim())?,
                        "trunc" => trunc = Some(v.trim().parse::<f64>().map_err(|_| bad("bad trunc"))?),
                        other => return Err(bad(&format!("unknown key '{other}'"))),
                    }
                }
                let delta = delta.ok_or_else(|| bad("missing delta"))?;
                let trunc = trunc.unwrap_or_else(|| default_grid_truncation(delta));
                make_grid_state_logical(&code, logical, delta, trunc)
            }
            _ => Err(bad("unknown state family")),
        }
    }
}

/// Vacuum on `n` modes: `W(x) = 2^n exp(-2 pi |x|^2)`.
pub fn make_vacuum(n: usize) -> StateModel {
    make_coherent(&vec![0.0; 2 * n])
}

/// Coherent state `D(alpha)|0>`, a vacuum Gaussian centred at `alpha`.
pub fn make_coherent(alpha: &[f64]) -> StateModel {
    let k = alpha.len();
    let comp = GaussianComponent::new(
        Complex::new(1.0, 0.0),
        alpha.to_vec(),
        DMatrix::identity(k, k) * VACUUM_VARIANCE,
    )
    .expect("vacuum covariance");
    StateModel::new_unchecked(k / 2, vec![comp])
}

/// Isotropic Gaussian state with Wigner variance `var >= 1/(4 pi)`.
pub fn make_thermal(n: usize, var: f64) -> Result<StateModel> {
    if var < VACUUM_VARIANCE * (1.0 - 1e-12) {
        return Err(GkpError::Validation(format!(
            "variance {var} is below the vacuum value {VACUUM_VARIANCE}"
        )));
    }
    let comp = GaussianComponent::new(
        Complex::new(1.0, 0.0),
        vec![0.0; 2 * n],
        DMatrix::identity(2 * n, 2 * n) * var,
    )?;
    Ok(StateModel::new_unchecked(n, vec![comp]))
}

/// Envelope radius beyond which grid spikes carry weight below `1e-12`.
pub fn default_grid_truncation(delta: f64) -> f64 {
    (12.0 * 10f64.ln() / (2.0 * PI)).sqrt() / delta
}

/// Finite-energy `|0>` code state; see [`make_grid_state_logical`].
pub fn make_grid_state(code: &GkpCode, delta: f64, truncation: f64) -> Result<StateModel> {
    make_grid_state_logical(code, LogicalState::Zero, delta, truncation)
}

/// Finite-energy logical basis state of a single-mode qubit code.
///
/// The Wigner function is a comb of Gaussians of variance `delta^2/(4 pi)`
/// under the envelope `exp(-2 pi delta^2 |p|^2)`, which makes the state pure up
/// to corrections of order `delta^2`. With `xi_X`, `xi_Z` half the
/// stabilizer generators, `|0>` has spikes at `m xi_X + (k/2) xi_Z` with sign
/// `(-1)^{mk}`, and `|+>` at `(m/2) xi_X + k xi_Z`; `|1>` and `|->` carry an
/// extra `(-1)^k` or `(-1)^m`. Spikes beyond `truncation` are dropped.
pub fn make_grid_state_logical(
    code: &GkpCode,
    logical: LogicalState,
    delta: f64,
    truncation: f64,
) -> Result<StateModel> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(GkpError::Validation(format!("delta = {delta} must lie in (0, 1)")));
    }
    if code.n != 1 || code.d != 2 {
        return Err(GkpError::Unsupported("grid states need a single-mode qubit code".into()));
    }
    let lambda1 = crate::lattice::shortest_vector_length(&code.basis);
    if truncation < 2.0 * lambda1 {
        return Err(GkpError::Validation(format!(
            "truncation {truncation} is below 2 lambda1 = {}",
            2.0 * lambda1
        )));
    }
    let r0 = code.basis.row(0);
    let r1 = code.basis.row(1);
    let (xx, xz) = ([0.5 * r0[0], 0.5 * r0[1]], [0.5 * r1[0], 0.5 * r1[1]]);
    let (ax, az) = match logical {
        LogicalState::Zero | LogicalState::One => (1.0, 0.5),
        LogicalState::Plus | LogicalState::Minus => (0.5, 1.0),
    };
    let spike = crate::lattice::LatticeBasis::new(DMatrix::from_row_slice(
        2,
        2,
        &[ax * xx[0], ax * xx[1], az * xz[0], az * xz[1]],
    ))?;
    let cov = DMatrix::identity(2, 2) * (delta * delta * VACUUM_VARIANCE);
    let mut raw: Vec<(f64, Vec<f64>)> = Vec::new();
    crate::lattice::enumerate_ball(&spike, truncation, |c, p| {
        let (m, k) = (c[0], c[1]);
        let mut sign = if (m * k).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        match logical {
            LogicalState::One if k.rem_euclid(2) == 1 => sign = -sign,
            LogicalState::Minus if m.rem_euclid(2) == 1 => sign = -sign,
            _ => {}
        }
        let w = sign * (-2.0 * PI * delta * delta * (p[0] * p[0] + p[1] * p[1])).exp();
        if w.abs() > 1e-16 {
            raw.push((w, p.to_vec()));
        }
    });
    let total: f64 = raw.iter().map(|r| r.0).sum();
    if raw.is_empty() || total.abs() < 1e-300 {
        return Err(GkpError::Validation("grid truncation keeps no spikes".into()));
    }
    let comps = raw
        .into_iter()
        .map(|(w, p)| GaussianComponent::new(Complex::new(w / total, 0.0), p, cov.clone()))
        .collect::<Result<Vec<_>>>()?;
    StateModel::new(1, comps)
}

/// A single measurement record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasurementOutcome {
    /// Heterodyne outcome `alpha`.
    Heterodyne {
        /// Outcome point.
        value: Vec<f64>,
    },
    /// Displaced-parity outcome `+-1` at displacement `sample_point`.
    Parity {
        /// Parity eigenvalue.
        value: i8,
        /// Displacement at which the parity was measured.
        sample_point: Vec<f64>,
    },
}

/// Precomputed heterodyne sampler for one state.
///
/// Draws directly from the Husimi mixture when all weights are nonnegative,
/// otherwise rejection-samples against the `|w|`-weighted envelope.
#[derive(Debug, Clone)]
pub struct HeterodyneSampler {
    husimi: StateModel,
    chol: Vec<DMatrix<f64>>,
    index: WeightedIndex<f64>,
    direct: bool,
    envelope_mass: f64,
    buckets: Option<Buckets>,
}

/// Spatial hash of single-mode components for local density evaluation.
#[derive(Debug, Clone)]
struct Buckets {
    h: f64,
    map: HashMap<(i64, i64), Vec<usize>>,
}

impl Buckets {
    fn key(&self, x: &[f64]) -> (i64, i64) {
        ((x[0] / self.h).floor() as i64, (x[1] / self.h).floor() as i64)
    }
}

/// Mixtures with more components than this use bucketed density evaluation.
const BUCKET_THRESHOLD: usize = 64;

/// Minimum rejection-sampler acceptance rate before a state is rejected.
pub const MIN_ACCEPTANCE: f64 = 1e-4;

impl HeterodyneSampler {
    /// Prepares the Husimi mixture of `state`.
    pub fn new(state: &StateModel) -> Result<Self> {
        let husimi = state.smoothed(VACUUM_VARIANCE);
        let direct = husimi.components.iter().all(|c| c.weight.re >= 0.0 && c.weight.im.abs() < 1e-15);
        let weights: Vec<f64> = husimi.components.iter().map(|c| c.weight.norm()).collect();
        let envelope_mass: f64 = weights.iter().sum();
        if 1.0 / envelope_mass < MIN_ACCEPTANCE {
            return Err(GkpError::Pathological(format!(
                "envelope acceptance {:e} below {MIN_ACCEPTANCE:e}",
                1.0 / envelope_mass
            )));
        }
        let index = WeightedIndex::new(&weights)
            .map_err(|e| GkpError::Validation(format!("component weights: {e}")))?;
        let chol = husimi
            .components
            .iter()
            .map(|c| c.cov.clone().cholesky().expect("positive definite").l())
            .collect();
        let buckets = (husimi.n == 1 && husimi.components.len() > BUCKET_THRESHOLD).then(|| {
            let vmax = husimi
                .components
                .iter()
                .map(|c| c.cov.symmetric_eigenvalues().max())
                .fold(0.0, f64::max);
            // Components farther than h contribute below e^-60 of their peak.
            let mut b = Buckets { h: (120.0 * vmax).sqrt(), map: HashMap::new() };
            for (i, c) in husimi.components.iter().enumerate() {
                let k = b.key(&c.mean);
                b.map.entry(k).or_default().push(i);
            }
            b
        });
        Ok(Self { husimi, chol, index, direct, envelope_mass, buckets })
    }

    /// Signed Husimi density and `|w|`-envelope density at `a`.
    fn densities(&self, a: &[f64]) -> (f64, f64) {
        let (mut q, mut env) = (0.0, 0.0);
        let mut add = |c: &GaussianComponent| {
            let dens = c.density(a);
            q += c.weight.re * dens;
            env += c.weight.norm() * dens;
        };
        match &self.buckets {
            Some(b) => {
                let (kx, ky) = b.key(a);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(ids) = b.map.get(&(kx + dx, ky + dy)) {
                            ids.iter().for_each(|&i| add(&self.husimi.components[i]));
                        }
                    }
                }
            }
            None => self.husimi.components.iter().for_each(add),
        }
        (q, env)
    }

    fn draw_envelope<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let k = self.index.sample(rng);
        let c = &self.husimi.components[k];
        let dim = c.mean.len();
        let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let l = &self.chol[k];
        (0..dim)
            .map(|i| c.mean[i] + (0..=i).map(|j| l[(i, j)] * z[j]).sum::<f64>())
            .collect()
    }

    /// Draws one outcome from the Husimi density.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        if self.direct {
            return Ok(self.draw_envelope(rng));
        }
        let mut tries = 0usize;
        loop {
            let a = self.draw_envelope(rng);
            let (q, env) = self.densities(&a);
            if rng.random::<f64>() * env <= q.max(0.0) {
                return Ok(a);
            }
            tries += 1;
            if tries >= 100 && tries as f64 * MIN_ACCEPTANCE > 1.0 {
                return Err(GkpError::Pathological(format!(
                    "no acceptance after {tries} proposals (envelope mass {})",
                    self.envelope_mass
                )));
            }
        }
    }
}

/// Draws one heterodyne outcome from the Husimi density of `state`.
pub fn sample_heterodyne<R: Rng + ?Sized>(state: &StateModel, rng: &mut R) -> Result<Vec<f64>> {
    HeterodyneSampler::new(state)?.sample(rng)
}

/// Displaced-parity outcome at `x`, with mean `2^{-n} W(x)` (clamped to `[-1, 1]`).
pub fn sample_parity<R: Rng + ?Sized>(state: &StateModel, x: &[f64], rng: &mut R) -> i8 {
    let mean = parity_mean(state, x);
    if rng.random::<f64>() < 0.5 * (1.0 + mean) {
        1
    } else {
        -1
    }
}

/// `2^{-n} W(x)` clamped to `[-1, 1]`.
pub fn parity_mean(state: &StateModel, x: &[f64]) -> f64 {
    (state.wigner(x) / 2f64.powi(state.n as i32)).clamp(-1.0, 1.0)
}
