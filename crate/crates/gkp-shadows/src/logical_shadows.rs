//! The logical shadow protocol for single-mode qubit GKP codes.
//!
//! The decoder snaps every phase-space point to the closest point `c` of the
//! dual lattice `L_perp` and reads out the logical Pauli phase of `c`:
//! `decode_a(rho) = int W_rho(x) s_a(cvp(x)) dx`. In Fourier space this is
//! the lattice sum `sum_{xi in xi_a + L} h(xi) chi_rho(xi)`, where `h` is the
//! normalised Fourier transform of the Voronoi cell of `L_perp`. The sum is
//! closed-form on Gaussian mixtures.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{GkpError, Result};
use crate::gkp_channels::{invert_depolarizing, DepolarizingCoefficients};
use crate::lattice::{
    cvp_with_coefficients, enumerate_ball, lattice_constants, polygon_area, symplectic_product,
    voronoi_cell_2d, GkpCode,
};
use crate::phase_space::{make_coherent, HeterodyneSampler, MeasurementOutcome, StateModel};
use crate::stats::{median_of_means, parallel_chunks};
use crate::symplectic::{
    automorphism_lift, elementary_generators, hs_dagger_logical, mixing_budget,
    random_walk_element, SymplecticMatrix,
};
use crate::twirl::{TwirlSampler, TwirlSpec};
use crate::Complex;

/// Labels of the logical Pauli cosets in vector order.
pub const PAULI_LABELS: [&str; 4] = ["I", "X", "Y", "Z"];

/// Largest admissible truncation tail of a decoder lattice sum.
pub const DECODER_TOLERANCE: f64 = 1e-4;

/// Tail targeted when the truncation radius is chosen automatically.
pub const AUTO_TAIL: f64 = 1e-10;

/// Expectations of the logical Pauli cosets, identity first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogicalPauliVector {
    /// Entries in the order `I, X, Y, Z`.
    pub entries: Vec<f64>,
}

impl LogicalPauliVector {
    /// Wraps raw entries.
    pub fn new(entries: Vec<f64>) -> Self {
        Self { entries }
    }

    /// The logical maximally mixed vector `(1, 0, 0, 0)`.
    pub fn identity() -> Self {
        Self { entries: vec![1.0, 0.0, 0.0, 0.0] }
    }

    /// Index of a Pauli label.
    pub fn index_of(label: &str) -> Result<usize> {
        PAULI_LABELS
            .iter()
            .position(|l| l.eq_ignore_ascii_case(label))
            .ok_or_else(|| GkpError::Validation(format!("unknown logical Pauli '{label}'")))
    }

    /// Entry for a Pauli label.
    pub fn get(&self, label: &str) -> Result<f64> {
        Ok(self.entries[Self::index_of(label)?])
    }

    /// Observable vector from a label (`Z`) or comma-separated coefficients.
    pub fn parse_observable(s: &str) -> Result<Self> {
        if let Ok(i) = Self::index_of(s.trim()) {
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            return Ok(Self { entries: e });
        }
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| GkpError::Validation(format!("bad observable '{s}'")))?;
        if entries.len() != 4 {
            return Err(GkpError::Validation("an observable needs 4 coefficients".into()));
        }
        Ok(Self { entries })
    }

    /// Euclidean inner product of entries.
    pub fn dot(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }

    /// Entrywise mean of a nonempty list.
    pub fn mean(vs: &[Self]) -> Result<Self> {
        let first = vs.first().ok_or_else(|| GkpError::Validation("empty list".into()))?;
        let mut acc = vec![0.0; first.entries.len()];
        for v in vs {
            for (a, x) in acc.iter_mut().zip(&v.entries) {
                *a += x;
            }
        }
        let k = vs.len() as f64;
        Ok(Self { entries: acc.into_iter().map(|a| a / k).collect() })
    }
}

/// Logical Hilbert-Schmidt discrepancy `sum_a (r_a - s_a)^2` of two Pauli
/// vectors.
pub fn d_hs(r: &LogicalPauliVector, s: &LogicalPauliVector) -> f64 {
    r.entries.iter().zip(&s.entries).map(|(a, b)| (a - b).powi(2)).sum()
}

#[derive(Debug, Clone, Copy)]
struct CosetPoint {
    xi: [f64; 2],
    h: f64,
    sign: f64,
}

/// Voronoi-binning decoder for a single-mode qubit code.
#[derive(Debug, Clone)]
pub struct Decoder {
    code: GkpCode,
    truncation: f64,
    covering: f64,
    cell: Vec<[f64; 2]>,
    area: f64,
    reps: [Vec<f64>; 4],
    cosets: [Vec<CosetPoint>; 4],
}

impl Decoder {
    /// Decoder summing coset points up to norm `truncation`.
    pub fn new(code: &GkpCode, truncation: f64) -> Result<Self> {
        if !(truncation > 0.0) {
            return Err(GkpError::Validation("truncation must be positive".into()));
        }
        let reps = code.logical_pauli_reps()?;
        let mut cell = voronoi_cell_2d(&code.dual_basis)?;
        if polygon_area(&cell) < 0.0 {
            cell.reverse();
        }
        let area = polygon_area(&cell);
        let covering = lattice_constants(&code.basis)?.covering_radius;
        let mut dec = Self {
            code: code.clone(),
            truncation,
            covering,
            cell,
            area,
            reps: reps.clone(),
            cosets: Default::default(),
        };
        for (a, rep) in reps.iter().enumerate() {
            let rn = rep.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut pts = Vec::new();
            enumerate_ball(&code.basis, truncation + rn, |_, l| {
                let xi = [rep[0] + l[0], rep[1] + l[1]];
                if xi[0].hypot(xi[1]) <= truncation {
                    let sign = if (symplectic_product(rep, l).round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
                    pts.push(CosetPoint { xi, h: dec.window(&xi), sign });
                }
            });
            dec.cosets[a] = pts;
        }
        Ok(dec)
    }

    /// Decoder whose truncation makes the tail on `state` below [`AUTO_TAIL`].
    pub fn for_state(code: &GkpCode, state: &StateModel) -> Result<Self> {
        let covering = lattice_constants(&code.basis)?.covering_radius;
        let r = auto_truncation(state, covering, code.basis.covolume(), AUTO_TAIL)?;
        Self::new(code, r)
    }

    /// The code.
    pub fn code(&self) -> &GkpCode {
        &self.code
    }

    /// Truncation radius of the coset sums.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Shortest coset representatives in the order `I, X, Y, Z`.
    pub fn coset_reps(&self) -> &[Vec<f64>; 4] {
        &self.reps
    }

    /// Number of coset points kept in each sum.
    pub fn point_counts(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|a| self.cosets[a].len())
    }

    /// Normalised Voronoi-cell transform
    /// `h(xi) = |V|^-1 int_V exp(-i 2 pi y^T J xi) dy`.
    pub fn window(&self, xi: &[f64]) -> f64 {
        let k = [2.0 * PI * xi[1], -2.0 * PI * xi[0]];
        let k2 = k[0] * k[0] + k[1] * k[1];
        if k2 < 1e-24 {
            return 1.0;
        }
        let m = self.cell.len();
        let mut acc = Complex::new(0.0, 0.0);
        for i in 0..m {
            let (a, b) = (self.cell[i], self.cell[(i + 1) % m]);
            let e = [b[0] - a[0], b[1] - a[1]];
            let kn = k[0] * e[1] - k[1] * e[0];
            let theta = k[0] * e[0] + k[1] * e[1];
            let phase = Complex::new(0.0, -(k[0] * a[0] + k[1] * a[1])).exp();
            let edge = if theta.abs() < 1e-8 {
                Complex::new(1.0, -0.5 * theta)
            } else {
                (Complex::new(1.0, 0.0) - Complex::new(0.0, -theta).exp()) / Complex::new(0.0, theta)
            };
            acc += kn * phase * edge;
        }
        (Complex::new(0.0, 1.0) * acc / k2).re / self.area
    }

    /// Upper bound on the coset-sum terms dropped by the truncation.
    pub fn tail_bound(&self, state: &StateModel) -> f64 {
        tail_bound(state, self.truncation, self.covering, self.code.basis.covolume())
    }

    /// Logical Pauli expectations of `state`.
    ///
    /// Fails when the truncation tail exceeds [`DECODER_TOLERANCE`].
    pub fn decode(&self, state: &StateModel) -> Result<LogicalPauliVector> {
        if state.n() != 1 {
            return Err(GkpError::Unsupported("the decoder handles single-mode states".into()));
        }
        let tail = self.tail_bound(state);
        if tail > DECODER_TOLERANCE {
            return Err(GkpError::NonConvergence(format!(
                "decoder truncation {} leaves a tail of {tail:e}",
                self.truncation
            )));
        }
        Ok(self.decode_unchecked(state))
    }

    /// Decoding without the tail check.
    pub fn decode_unchecked(&self, state: &StateModel) -> LogicalPauliVector {
        let entries = self
            .cosets
            .iter()
            .map(|pts| {
                pts.iter()
                    .map(|p| p.h * state.characteristic(&p.xi).re)
                    .sum::<f64>()
            })
            .collect();
        LogicalPauliVector { entries }
    }

    /// Expected decoded heterodyne pointer, `decode(C(rho))`, where the
    /// measure-and-prepare channel `C` adds `I / (2 pi)` to the covariance.
    pub fn decode_heterodyne_channel(&self, state: &StateModel) -> Result<LogicalPauliVector> {
        self.decode(&state.smoothed(1.0 / (2.0 * PI)))
    }

    /// Per-Pauli heterodyne damping factors on ideal code states,
    /// `alpha_a = sum_{l in L} h(xi_a + l) (-1)^{xi_a^T J l} exp(-pi |xi_a + l|^2)`.
    pub fn ideal_heterodyne_factors(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|a| {
            self.cosets[a]
                .iter()
                .map(|p| p.h * p.sign * (-PI * (p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1])).exp())
                .sum()
        })
    }

    /// Index of the logical coset of the closest dual-lattice point to `x`.
    pub fn coset_of(&self, x: &[f64]) -> usize {
        let (_, v) = cvp_with_coefficients(x, &self.code.dual_basis);
        let c = self.code.basis.coefficients(&v);
        let bit = |t: f64| ((2.0 * t).round() as i64).rem_euclid(2) as usize;
        match (bit(c[0]), bit(c[1])) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    }
}

/// Bound on `sum_{|xi| > r, xi in L} |chi(xi)|` over all components, using
/// `|chi_k(xi)| <= |w_k| exp(-a_k |xi|^2)` with `a_k = 2 pi^2 lambda_min(V_k)`.
fn tail_bound(state: &StateModel, r: f64, covering: f64, covolume: f64) -> f64 {
    let s = r - 2.0 * covering;
    if s <= 0.0 {
        return f64::INFINITY;
    }
    state
        .components()
        .iter()
        .map(|c| {
            let a = 2.0 * PI * PI * c.min_variance();
            let radial = (-a * s * s).exp() / (2.0 * a)
                + 0.5 * covering * (PI / a).sqrt() * erfc(a.sqrt() * s);
            c.weight.norm() * 2.0 * PI * radial / covolume
        })
        .sum()
}

fn auto_truncation(state: &StateModel, covering: f64, covolume: f64, tol: f64) -> Result<f64> {
    let amin = state
        .components()
        .iter()
        .map(|c| 2.0 * PI * PI * c.min_variance())
        .fold(f64::INFINITY, f64::min);
    let mut r = 2.0 * covering + (-tol.ln() / amin).sqrt();
    for _ in 0..60 {
        if tail_bound(state, r, covering, covolume) < tol {
            return Ok(r);
        }
        r *= 1.1;
    }
    Err(GkpError::NonConvergence("no decoder truncation reaches the tail target".into()))
}

/// Decodes `state`, choosing the truncation automatically when `None`.
pub fn decode_logical_paulis(
    state: &StateModel,
    code: &GkpCode,
    truncation: Option<f64>,
) -> Result<LogicalPauliVector> {
    let dec = match truncation {
        Some(r) => Decoder::new(code, r)?,
        None => Decoder::for_state(code, state)?,
    };
    dec.decode(state)
}

/// Truncation used for coherent-state pointers.
pub fn pointer_decoder(code: &GkpCode) -> Result<Decoder> {
    Decoder::for_state(code, &make_coherent(&vec![0.0; 2 * code.n]))
}

/// One round of the shadow protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowRecord {
    /// Index of the logical Clifford in the sampled set (`usize::MAX` for
    /// random-walk elements).
    pub clifford: usize,
    /// Physical symplectic lift of the Clifford.
    pub unitary: SymplecticMatrix,
    /// Total displacement applied after the symplectic unitary.
    pub displacement: Vec<f64>,
    /// Measured outcome.
    pub outcome: MeasurementOutcome,
    /// Reconstructed pointer state `V^dag |alpha><alpha| V`.
    pub pointer: StateModel,
}

impl ShadowRecord {
    /// JSON object form, one line per record in record files.
    pub fn to_json(&self) -> serde_json::Value {
        let s = self.unitary.matrix();
        let rows: Vec<Vec<f64>> = (0..s.nrows()).map(|i| s.row(i).iter().copied().collect()).collect();
        serde_json::json!({
            "clifford": if self.clifford == usize::MAX { serde_json::Value::Null } else { self.clifford.into() },
            "symplectic": rows,
            "displacement": self.displacement,
            "outcome": self.outcome,
            "pointer": self.pointer.to_json(),
        })
    }

    /// Parses [`ShadowRecord::to_json`] output.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| GkpError::Validation(format!("record field '{what}' is malformed"));
        let rows: Vec<Vec<f64>> =
            serde_json::from_value(v["symplectic"].clone()).map_err(|_| bad("symplectic"))?;
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(bad("symplectic"));
        }
        let unitary = SymplecticMatrix::new(DMatrix::from_fn(k, k, |i, j| rows[i][j]))?;
        Ok(Self {
            clifford: v["clifford"].as_u64().map(|c| c as usize).unwrap_or(usize::MAX),
            unitary,
            displacement: serde_json::from_value(v["displacement"].clone())
                .map_err(|_| bad("displacement"))?,
            outcome: serde_json::from_value(v["outcome"].clone()).map_err(|_| bad("outcome"))?,
            pointer: StateModel::from_json(&v["pointer"])?,
        })
    }
}

/// Prepared sampler for the shadow protocol on one state.
#[derive(Debug, Clone)]
pub struct ShadowProtocol {
    code: GkpCode,
    state: StateModel,
    twirl: TwirlSampler,
    cliffords: Vec<(SymplecticMatrix, HeterodyneSampler)>,
    paulis: Vec<Vec<f64>>,
}

impl ShadowProtocol {
    /// Prepares samplers for the Clifford set of `code`.
    ///
    /// Single-mode qubit codes use the 12-element set `(H S^dag)^k P`, lifted
    /// to the most orthogonal lattice automorphism and a logical displacement;
    /// other codes draw a random-walk Clifford per record.
    pub fn new(state: &StateModel, code: &GkpCode, twirl: &TwirlSpec) -> Result<Self> {
        if state.n() != code.n {
            return Err(GkpError::Validation("state and code have different mode counts".into()));
        }
        let twirl = twirl.bind(code)?;
        let mut cliffords = Vec::new();
        let mut paulis = Vec::new();
        if code.n == 1 && code.d == 2 {
            let g = hs_dagger_logical();
            for k in 0..3 {
                let s = automorphism_lift(&g.pow(k), code)?;
                let sampler = HeterodyneSampler::new(&state.transformed(&s)?)?;
                cliffords.push((s, sampler));
            }
            paulis = code.logical_pauli_reps()?.to_vec();
        }
        Ok(Self { code: code.clone(), state: state.clone(), twirl, cliffords, paulis })
    }

    /// Draws one record.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ShadowRecord> {
        let delta = self.twirl.sample(rng);
        let (clifford, s, pauli, alpha0) = if self.cliffords.is_empty() {
            let gens: Vec<_> =
                elementary_generators(self.code.n, self.code.d)?.into_iter().map(|g| g.1).collect();
            let u = random_walk_element(&gens, mixing_budget(self.code.n, self.code.d).0 as usize, rng)?;
            let s = automorphism_lift(&u, &self.code)?;
            let c: Vec<i64> = (0..2 * self.code.n).map(|_| rng.random_range(0..self.code.d as i64)).collect();
            let pauli = self.code.dual_basis.point(&c);
            let alpha = HeterodyneSampler::new(&self.state.transformed(&s)?)?.sample(rng)?;
            (usize::MAX, s, pauli, alpha)
        } else {
            let k = rng.random_range(0..self.cliffords.len());
            let p = rng.random_range(0..self.paulis.len());
            let (s, sampler) = &self.cliffords[k];
            (k * self.paulis.len() + p, s.clone(), self.paulis[p].clone(), sampler.sample(rng)?)
        };
        let eta: Vec<f64> = pauli.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let alpha: Vec<f64> = alpha0.iter().zip(&eta).map(|(a, b)| a + b).collect();
        let neg: Vec<f64> = eta.iter().map(|x| -x).collect();
        let pointer = make_coherent(&alpha).displaced(&neg).transformed(&s.inverse())?;
        Ok(ShadowRecord {
            clifford,
            unitary: s,
            displacement: eta,
            outcome: MeasurementOutcome::Heterodyne { value: alpha },
            pointer,
        })
    }
}

/// Runs `n_total` rounds of the heterodyne shadow protocol.
///
/// Round `i` applies `V = D(eta) U_S` with a random Clifford lift `S` and a
/// logical-plus-twirl displacement `eta`, samples a heterodyne outcome
/// `alpha` from `V rho V^dag` and stores the pointer `V^dag |alpha><alpha| V`.
/// Results depend only on `seed`, not on the number of worker threads.
pub fn run_shadow_protocol(
    state: &StateModel,
    code: &GkpCode,
    n_total: usize,
    twirl: &TwirlSpec,
    seed: u64,
) -> Result<Vec<ShadowRecord>> {
    let proto = ShadowProtocol::new(state, code, twirl)?;
    let chunks = parallel_chunks(n_total, seed, |rng, count| {
        (0..count).map(|_| proto.sample(rng)).collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(n_total);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// The shadow state `N^-1 sum_i pointer_i` as a Gaussian mixture.
pub fn shadow_reconstruct(records: &[ShadowRecord]) -> Result<StateModel> {
    if records.is_empty() {
        return Err(GkpError::Validation("no records to reconstruct".into()));
    }
    let w = 1.0 / records.len() as f64;
    let parts: Vec<(f64, &StateModel)> = records.iter().map(|r| (w, &r.pointer)).collect();
    StateModel::mixture(&parts)
}

/// Decodes every pointer.
pub fn decode_records(decoder: &Decoder, records: &[ShadowRecord]) -> Result<Vec<LogicalPauliVector>> {
    records.iter().map(|r| decoder.decode(&r.pointer)).collect()
}

/// Median-of-means estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// Median of the batch means.
    pub value: f64,
    /// Number of batches.
    #[serde(rename = "K")]
    pub k: usize,
    /// Batch size.
    #[serde(rename = "N")]
    pub n: usize,
    /// Accuracy target.
    pub epsilon: f64,
    /// Failure probability target.
    pub delta: f64,
    /// Mean of each batch.
    pub per_batch_means: Vec<f64>,
}

/// Number of median-of-means batches `ceil(2 ln(2 M / delta))`.
pub fn batch_count(m: usize, delta: f64) -> usize {
    ceil_guarded(2.0 * (2.0 * m as f64 / delta).ln()).max(1)
}

fn ceil_guarded(x: f64) -> usize {
    (x * (1.0 - 1e-12)).ceil() as usize
}

/// Median of means of `values` over `k` equal batches; trailing values that
/// do not fill a batch are dropped so that `K N` equals the samples used.
pub fn median_of_means_report(values: &[f64], k: usize, epsilon: f64, delta: f64) -> Result<EstimateReport> {
    if k == 0 || values.len() < k {
        return Err(GkpError::Validation(format!(
            "{} values cannot fill {k} batches",
            values.len()
        )));
    }
    let n = values.len() / k;
    let (value, per_batch_means) = median_of_means(&values[..n * k], k);
    Ok(EstimateReport { value, k, n, epsilon, delta, per_batch_means })
}

/// Median-of-means estimate of a logical observable from decoded pointers.
///
/// Each record contributes `<O | M^-1(decode(pointer_i))>`, where `M^-1`
/// undoes the depolarizing channel and `O` lists Pauli coefficients. The
/// batch count is `ceil(2 ln(2 m / delta))` for `m` simultaneous observables.
pub fn estimate_logical_observable(
    decoded: &[LogicalPauliVector],
    observable: &LogicalPauliVector,
    coeffs: &DepolarizingCoefficients,
    epsilon: f64,
    delta: f64,
    m: usize,
) -> Result<EstimateReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(GkpError::Validation("delta must lie in (0, 1)".into()));
    }
    let values = decoded
        .iter()
        .map(|d| Ok(observable.dot(&LogicalPauliVector::new(invert_depolarizing(coeffs, &d.entries)?))))
        .collect::<Result<Vec<_>>>()?;
    median_of_means_report(&values, batch_count(m, delta), epsilon, delta)
}

/// Inverted mean of decoded pointers, the shadow estimate of `decode(rho)`.
pub fn shadow_logical_estimate(
    decoded: &[LogicalPauliVector],
    coeffs: &DepolarizingCoefficients,
) -> Result<LogicalPauliVector> {
    let mean = LogicalPauliVector::mean(decoded)?;
    Ok(LogicalPauliVector::new(invert_depolarizing(coeffs, &mean.entries)?))
}

/// Sample budget `(N, K)` of median-of-means shadow estimation for `M`
/// observables, with `N = 34 max_i 3 Tr[O_i^2] / epsilon^2` and
/// `K = ceil(2 ln(2 M / delta))`.
pub fn sample_budget_hkp(epsilon: f64, delta: f64, m: usize, tr_o2: &[f64]) -> Result<(usize, usize)> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) || m == 0 {
        return Err(GkpError::Validation("need epsilon, delta in (0, 1) and M >= 1".into()));
    }
    let worst = tr_o2.iter().copied().fold(0.0, f64::max);
    Ok((ceil_guarded(34.0 * 3.0 * worst / (epsilon * epsilon)), batch_count(m, delta)))
}

/// Full-state sample budget and the trace-distance guarantee it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullStateBudget {
    /// Number of samples.
    pub n_samples: usize,
    /// Guaranteed logical trace distance `d^{n/2} delta_HS / 2`.
    pub trace_distance: f64,
}

/// `N = ceil(2 d^{2n} / (alpha^2 delta_HS^2) [ln(2/delta) + 2 n ln d])`.
pub fn sample_budget_full_state(d: u64, n: usize, alpha: f64, delta_hs: f64, delta: f64) -> Result<FullStateBudget> {
    if alpha == 0.0 {
        return Err(GkpError::NonInvertible("alpha = 0".into()));
    }
    if !(delta_hs > 0.0 && delta > 0.0 && delta < 1.0) {
        return Err(GkpError::Validation("need delta_HS > 0 and delta in (0, 1)".into()));
    }
    let df = d as f64;
    let dim2 = df.powi(2 * n as i32);
    let bound = 2.0 * dim2 / (alpha * alpha * delta_hs * delta_hs)
        * ((2.0 / delta).ln() + 2.0 * n as f64 * df.ln());
    Ok(FullStateBudget {
        n_samples: ceil_guarded(bound),
        trace_distance: df.powf(n as f64 / 2.0) * delta_hs / 2.0,
    })
}
