//! Symplectic matrices over the reals and over `Z_d`.
//!
//! Modular matrices act on column vectors `(x_1..x_n, z_1..z_n)` of Pauli
//! exponents and satisfy `U^T J U = J (mod d)`. The elementary generators are
//! the qudit Fourier gate `J_i`, the phase gate `P_i`, the CNOT `C_{i->j}` and
//! the upper transvection `B_{i,j}`; mode indices are 1-based in labels.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GkpError, Result};
use crate::lattice::{symplectic_form, GkpCode};
use crate::Complex;

/// Upper bound constant `c` in `len(compile(U)) <= c d n^2`.
pub const COMPILE_LENGTH_CONSTANT: usize = 16;

/// A real symplectic matrix, `S^T J S = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    s: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Validates `S^T J S = J` to `1e-10`.
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        if s.nrows() != s.ncols() || s.nrows() % 2 != 0 {
            return Err(GkpError::Validation("symplectic matrix must be 2n x 2n".into()));
        }
        let n = s.nrows() / 2;
        let j = symplectic_form(n);
        let err = (s.transpose() * &j * &s - &j).amax();
        if err > 1e-10 {
            return Err(GkpError::Validation(format!("S^T J S deviates from J by {err:e}")));
        }
        Ok(Self { n, s })
    }

    /// The identity on `n` modes.
    pub fn identity(n: usize) -> Self {
        Self { n, s: DMatrix::identity(2 * n, 2 * n) }
    }

    /// Rotation by `theta` on a single mode.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { n: 1, s: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]) }
    }

    /// Single-mode squeezer `diag(e^r, e^-r)`.
    pub fn squeezer(r: f64) -> Self {
        Self { n: 1, s: DMatrix::from_row_slice(2, 2, &[r.exp(), 0.0, 0.0, (-r).exp()]) }
    }

    /// Number of modes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// Symplectic inverse `J^T S^T J`.
    pub fn inverse(&self) -> Self {
        let j = symplectic_form(self.n);
        Self { n: self.n, s: j.transpose() * self.s.transpose() * j }
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { n: self.n, s: &self.s * &other.s }
    }

    /// True when `S` is also orthogonal to `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        (self.s.transpose() * &self.s - DMatrix::identity(2 * self.n, 2 * self.n)).amax() < tol
    }
}

/// A symplectic matrix over `Z_d` with entries reduced to `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModSymplecticMatrix {
    n: usize,
    d: u64,
    u: DMatrix<i64>,
}

#[derive(Serialize, Deserialize)]
struct ModJson {
    d: u64,
    #[serde(rename = "U")]
    u: Vec<Vec<i64>>,
}

fn reduce(v: i64, d: u64) -> i64 {
    v.rem_euclid(d as i64)
}

fn mat_mul_mod(a: &DMatrix<i64>, b: &DMatrix<i64>, d: u64) -> DMatrix<i64> {
    let k = a.nrows();
    DMatrix::from_fn(k, b.ncols(), |i, j| {
        reduce((0..a.ncols()).map(|l| a[(i, l)] * b[(l, j)]).sum::<i64>(), d)
    })
}

fn int_form(n: usize) -> DMatrix<i64> {
    symplectic_form(n).map(|v| v as i64)
}

/// Modular inverse of `a` for prime `p`.
pub fn inv_mod(a: i64, p: u64) -> Option<i64> {
    let a = reduce(a, p);
    if a == 0 {
        return None;
    }
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(reduce(t, p))
}

/// Primality test by trial division.
pub fn is_prime(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl ModSymplecticMatrix {
    /// Validates `U^T J U = J (mod d)` after reducing entries.
    pub fn new(u: DMatrix<i64>, d: u64) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() % 2 != 0 || u.nrows() == 0 {
            return Err(GkpError::Validation("modular symplectic matrix must be 2n x 2n".into()));
        }
        if d < 2 {
            return Err(GkpError::Validation("modulus must be at least 2".into()));
        }
        let n = u.nrows() / 2;
        let u = u.map(|v| reduce(v, d));
        let j = int_form(n).map(|v| reduce(v, d));
        if mat_mul_mod(&mat_mul_mod(&u.transpose(), &j, d), &u, d) != j {
            return Err(GkpError::Validation("U^T J U != J (mod d)".into()));
        }
        Ok(Self { n, d, u })
    }

    /// Identity on `n` modes.
    pub fn identity(n: usize, d: u64) -> Self {
        Self { n, d, u: DMatrix::identity(2 * n, 2 * n) }
    }

    /// Number of modes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Modulus.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Reduced integer entries.
    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.u
    }

    /// Product `self * other (mod d)`.
    pub fn mul(&self, other: &Self) -> Self {
        Self { n: self.n, d: self.d, u: mat_mul_mod(&self.u, &other.u, self.d) }
    }

    /// Symplectic inverse `J^{-1} U^T J (mod d)`.
    pub fn inverse(&self) -> Self {
        let j = int_form(self.n);
        let jt = j.transpose();
        let u = mat_mul_mod(&mat_mul_mod(&jt, &self.u.transpose(), self.d), &j, self.d);
        Self { n: self.n, d: self.d, u }
    }

    /// Integer power.
    pub fn pow(&self, k: u64) -> Self {
        (0..k).fold(Self::identity(self.n, self.d), |acc, _| acc.mul(self))
    }

    /// JSON form `{"d": .., "U": [[..]]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = (0..self.u.nrows())
            .map(|i| self.u.row(i).iter().copied().collect())
            .collect();
        serde_json::to_value(ModJson { d: self.d, u: rows }).expect("serializable matrix")
    }

    /// Parses the JSON form.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let m: ModJson = serde_json::from_value(v.clone())
            .map_err(|e| GkpError::Validation(format!("matrix json: {e}")))?;
        let k = m.u.len();
        if m.u.iter().any(|r| r.len() != k) {
            return Err(GkpError::Validation("matrix json: rows must be square".into()));
        }
        let flat: Vec<i64> = m.u.into_iter().flatten().collect();
        Self::new(DMatrix::from_row_slice(k, k, &flat), m.d)
    }
}

/// Label of an elementary generator. Mode indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum Generator {
    /// Qudit Fourier gate `J_i`, with `J_i^2 = -I`.
    Fourier { i: usize },
    /// Phase gate `P_i = [[I, 0], [pi_i, I]]`.
    Phase { i: usize },
    /// CNOT `C_{i->j}`, mapping `X_i -> X_i X_j`.
    #[serde(rename = "CNOT")]
    Cnot { i: usize, j: usize },
    /// Upper transvection `B_{i,j} = [[I, e_ij + e_ji], [0, I]]`.
    B { i: usize, j: usize },
}

impl Generator {
    fn check(&self, n: usize) -> Result<()> {
        let ok = match *self {
            Generator::Fourier { i } | Generator::Phase { i } => (1..=n).contains(&i),
            Generator::Cnot { i, j } | Generator::B { i, j } => {
                (1..=n).contains(&i) && (1..=n).contains(&j) && i != j
            }
        };
        if ok {
            Ok(())
        } else {
            Err(GkpError::Validation(format!("generator {self:?} invalid for n = {n}")))
        }
    }

    /// Matrix of the generator on `n` modes over `Z_d`.
    pub fn matrix(&self, n: usize, d: u64) -> Result<ModSymplecticMatrix> {
        self.check(n)?;
        let mut u = DMatrix::<i64>::identity(2 * n, 2 * n);
        match *self {
            Generator::Fourier { i } => {
                let k = i - 1;
                u[(k, k)] = 0;
                u[(n + k, n + k)] = 0;
                u[(k, n + k)] = 1;
                u[(n + k, k)] = -1;
            }
            Generator::Phase { i } => {
                let k = i - 1;
                u[(n + k, k)] = 1;
            }
            Generator::Cnot { i, j } => {
                let (a, b) = (i - 1, j - 1);
                u[(b, a)] = 1;
                u[(n + a, n + b)] = -1;
            }
            Generator::B { i, j } => {
                let (a, b) = (i - 1, j - 1);
                u[(a, n + b)] = 1;
                u[(b, n + a)] = 1;
            }
        }
        ModSymplecticMatrix::new(u, d)
    }
}

/// An ordered list of generators; its matrix is the left-to-right product.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorSequence {
    /// Generators in multiplication order.
    pub gates: Vec<Generator>,
}

impl GeneratorSequence {
    /// Number of generators.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    /// True for the empty sequence.
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Product of the generator matrices.
    pub fn product(&self, n: usize, d: u64) -> Result<ModSymplecticMatrix> {
        let mut acc = ModSymplecticMatrix::identity(n, d);
        for g in &self.gates {
            acc = acc.mul(&g.matrix(n, d)?);
        }
        Ok(acc)
    }

    fn push_pow(&mut self, g: Generator, k: i64, d: u64) {
        for _ in 0..reduce(k, d) {
            self.gates.push(g);
        }
    }
}

/// All elementary generators `J_i`, `P_i`, `C_{i->j}` and `B_{i,j}` (`i < j`).
pub fn elementary_generators(n: usize, d: u64) -> Result<Vec<(Generator, ModSymplecticMatrix)>> {
    if !is_prime(d) {
        return Err(GkpError::Unsupported(format!("modulus {d} is not prime")));
    }
    if n == 0 {
        return Err(GkpError::Validation("n must be at least 1".into()));
    }
    let mut labels = Vec::new();
    for i in 1..=n {
        labels.push(Generator::Fourier { i });
        labels.push(Generator::Phase { i });
    }
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                labels.push(Generator::Cnot { i, j });
            }
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            labels.push(Generator::B { i, j });
        }
    }
    labels.into_iter().map(|g| Ok((g, g.matrix(n, d)?))).collect()
}

/// Inverse of an `n x n` matrix over `Z_p`.
fn inverse_mod_matrix(a: &DMatrix<i64>, p: u64) -> Option<DMatrix<i64>> {
    let k = a.nrows();
    let mut m = a.map(|v| reduce(v, p));
    let mut inv = DMatrix::<i64>::identity(k, k);
    for col in 0..k {
        let piv = (col..k).find(|&r| m[(r, col)] != 0)?;
        m.swap_rows(col, piv);
        inv.swap_rows(col, piv);
        let s = inv_mod(m[(col, col)], p)?;
        for c in 0..k {
            m[(col, c)] = reduce(m[(col, c)] * s, p);
            inv[(col, c)] = reduce(inv[(col, c)] * s, p);
        }
        for r in 0..k {
            if r != col && m[(r, col)] != 0 {
                let f = m[(r, col)];
                for c in 0..k {
                    m[(r, c)] = reduce(m[(r, c)] - f * m[(col, c)], p);
                    inv[(r, c)] = reduce(inv[(r, c)] - f * inv[(col, c)], p);
                }
            }
        }
    }
    Some(inv)
}

fn block(u: &DMatrix<i64>, n: usize, bi: usize, bj: usize) -> DMatrix<i64> {
    u.view((bi * n, bj * n), (n, n)).into_owned()
}

/// Shortest words in `{J, P}` for every element of `SL_2(Z_p)`, by
/// breadth-first search from the identity.
fn sl2_words(p: u64) -> HashMap<[i64; 4], Vec<Generator>> {
    let jm = [0i64, 1, reduce(-1, p), 0];
    let pm = [1i64, 0, 1, 1];
    let mul = |a: [i64; 4], b: [i64; 4]| {
        [
            reduce(a[0] * b[0] + a[1] * b[2], p),
            reduce(a[0] * b[1] + a[1] * b[3], p),
            reduce(a[2] * b[0] + a[3] * b[2], p),
            reduce(a[2] * b[1] + a[3] * b[3], p),
        ]
    };
    let mut words: HashMap<[i64; 4], Vec<Generator>> = HashMap::new();
    let id = [1, 0, 0, 1];
    words.insert(id, vec![]);
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        let w = words[&m].clone();
        for (g, gm) in [(Generator::Fourier { i: 1 }, jm), (Generator::Phase { i: 1 }, pm)] {
            let next = mul(m, gm);
            if let std::collections::hash_map::Entry::Vacant(e) = words.entry(next) {
                let mut nw = w.clone();
                nw.push(g);
                e.insert(nw);
                queue.push_back(next);
            }
        }
    }
    words
}

fn remap_mode(g: Generator, mode: usize) -> Generator {
    match g {
        Generator::Fourier { .. } => Generator::Fourier { i: mode },
        Generator::Phase { .. } => Generator::Phase { i: mode },
        other => other,
    }
}

/// Compiles `U` into elementary generators.
///
/// Uses `U = Q L(C) D(A) R(B)` with `Q` a product of Fourier gates,
/// `L(C) = [[I, 0], [C, I]]`, `D(A) = A (+) A^{-T}` and `R(B) = [[I, B], [0, I]]`.
/// Triangular factors expand into phase gates and `B_{i,j}` powers (the
/// lower off-diagonal part via Fourier conjugation), and `D(A)` into CNOT
/// powers from Gauss-Jordan elimination plus one single-mode scaling.
/// The length is at most [`COMPILE_LENGTH_CONSTANT`]` * d * n^2`.
pub fn compile_symplectic(u: &ModSymplecticMatrix) -> Result<GeneratorSequence> {
    let (n, p) = (u.n, u.d);
    if !is_prime(p) {
        return Err(GkpError::Unsupported(format!("modulus {p} is not prime")));
    }
    ModSymplecticMatrix::new(u.u.clone(), p)?;
    if u.u == DMatrix::identity(2 * n, 2 * n) {
        return Ok(GeneratorSequence::default());
    }
    let fourier_inv = |mode: usize| {
        let m = Generator::Fourier { i: mode }.matrix(n, p).expect("valid mode");
        m.pow(3)
    };
    // Q = prod_{i in S} J_i such that V = Q^{-1} U has an invertible top-left block.
    let mut found = None;
    for mask in 0u32..(1 << n) {
        let mut qinv = ModSymplecticMatrix::identity(n, p);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                qinv = qinv.mul(&fourier_inv(i + 1));
            }
        }
        let v = qinv.mul(u);
        if let Some(ainv) = inverse_mod_matrix(&block(&v.u, n, 0, 0), p) {
            found = Some((mask, v, ainv));
            break;
        }
    }
    let (mask, v, ainv) = found.ok_or_else(|| {
        GkpError::Validation("no Fourier subset yields an invertible block".into())
    })?;
    let a = block(&v.u, n, 0, 0);
    let bm = mat_mul_mod(&ainv, &block(&v.u, n, 0, 1), p);
    let cm = mat_mul_mod(&block(&v.u, n, 1, 0), &ainv, p);

    let mut seq = GeneratorSequence::default();
    for i in 0..n {
        if mask & (1 << i) != 0 {
            seq.gates.push(Generator::Fourier { i: i + 1 });
        }
    }
    let push_f = |seq: &mut GeneratorSequence, reps: usize| {
        for i in 1..=n {
            for _ in 0..reps {
                seq.gates.push(Generator::Fourier { i });
            }
        }
    };
    // L(C) = L(diag C) * F^{-1} R(-offdiag C) F.
    for i in 0..n {
        seq.push_pow(Generator::Phase { i: i + 1 }, cm[(i, i)], p);
    }
    if (0..n).any(|i| (i + 1..n).any(|j| cm[(i, j)] != 0)) {
        push_f(&mut seq, 3);
        for i in 0..n {
            for j in i + 1..n {
                seq.push_pow(Generator::B { i: i + 1, j: j + 1 }, -cm[(i, j)], p);
            }
        }
        push_f(&mut seq, 1);
    }
    seq.gates.extend(compile_diagonal(&a, n, p)?.gates);
    // R(B) = R(offdiag B) * F^{-1} L(-diag B) F.
    for i in 0..n {
        for j in i + 1..n {
            seq.push_pow(Generator::B { i: i + 1, j: j + 1 }, bm[(i, j)], p);
        }
    }
    if (0..n).any(|i| bm[(i, i)] != 0) {
        push_f(&mut seq, 3);
        for i in 0..n {
            seq.push_pow(Generator::Phase { i: i + 1 }, -bm[(i, i)], p);
        }
        push_f(&mut seq, 1);
    }
    if seq.product(n, p)? != *u {
        return Err(GkpError::Validation("compilation failed to reproduce U".into()));
    }
    Ok(seq)
}

/// Compiles `D(A) = A (+) A^{-T}` into CNOT powers and one scaling.
fn compile_diagonal(a: &DMatrix<i64>, n: usize, p: u64) -> Result<GeneratorSequence> {
    let mut m = a.map(|v| reduce(v, p));
    // Each op (i, j, r) is row_j += r row_i, i.e. C_{i->j}^r.
    let mut ops: Vec<(usize, usize, i64)> = Vec::new();
    let apply = |m: &mut DMatrix<i64>, ops: &mut Vec<(usize, usize, i64)>, i: usize, j: usize, r: i64| {
        let r = reduce(r, p);
        if r == 0 {
            return;
        }
        for c in 0..n {
            m[(j, c)] = reduce(m[(j, c)] + r * m[(i, c)], p);
        }
        ops.push((i, j, r));
    };
    for k in 0..n {
        if m[(k, k)] == 0 {
            let i = (k + 1..n)
                .find(|&i| m[(i, k)] != 0)
                .ok_or_else(|| GkpError::Validation("diagonal block is singular".into()))?;
            apply(&mut m, &mut ops, i, k, 1);
        }
        if m[(k, k)] != 1 && k + 1 < n {
            let j = match (k + 1..n).find(|&j| m[(j, k)] != 0) {
                Some(j) => j,
                None => {
                    apply(&mut m, &mut ops, k, k + 1, 1);
                    k + 1
                }
            };
            let r = reduce((1 - m[(k, k)]) * inv_mod(m[(j, k)], p).expect("nonzero"), p);
            apply(&mut m, &mut ops, j, k, r);
        }
        let piv_inv = inv_mod(m[(k, k)], p).expect("nonzero pivot");
        for i in 0..n {
            if i != k && m[(i, k)] != 0 {
                let r = -m[(i, k)] * piv_inv;
                apply(&mut m, &mut ops, k, i, r);
            }
        }
    }
    let mut seq = GeneratorSequence::default();
    for &(i, j, r) in &ops {
        seq.push_pow(Generator::Cnot { i: i + 1, j: j + 1 }, -r, p);
    }
    let delta = m[(n - 1, n - 1)];
    if delta != 1 {
        let dinv = inv_mod(delta, p).expect("invertible");
        let words = sl2_words(p);
        let w = words
            .get(&[delta, 0, 0, dinv])
            .ok_or_else(|| GkpError::Validation("scaling not reachable".into()))?;
        seq.gates.extend(w.iter().map(|g| remap_mode(*g, n)));
    }
    Ok(seq)
}

/// All elements of `Sp_2(Z_d) = SL_2(Z_d)`.
pub fn sp2_elements(d: u64) -> Vec<ModSymplecticMatrix> {
    let di = d as i64;
    let mut out = Vec::new();
    for a in 0..di {
        for b in 0..di {
            for c in 0..di {
                for e in 0..di {
                    if reduce(a * e - b * c, d) == 1 {
                        out.push(ModSymplecticMatrix {
                            n: 1,
                            d,
                            u: DMatrix::from_row_slice(2, 2, &[a, b, c, e]),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Lazy random walk of `k` steps: each step keeps the current element with
/// probability one half, otherwise multiplies by a uniform generator or, with
/// equal probability, its inverse.
///
/// Holding makes the walk aperiodic; without it the qubit generators are odd
/// permutations of `Sp_2(Z_2) = S_3` and an even number of steps never leaves
/// the alternating subgroup.
pub fn random_walk_element<R: Rng + ?Sized>(
    generators: &[ModSymplecticMatrix],
    k: usize,
    rng: &mut R,
) -> Result<ModSymplecticMatrix> {
    let first = generators
        .first()
        .ok_or_else(|| GkpError::Validation("empty generator set".into()))?;
    let mut acc = ModSymplecticMatrix::identity(first.n, first.d);
    for _ in 0..k {
        if rng.random::<bool>() {
            continue;
        }
        let g = &generators[rng.random_range(0..generators.len())];
        acc = if rng.random::<bool>() { acc.mul(&g.inverse()) } else { acc.mul(g) };
    }
    Ok(acc)
}

/// Random-walk mixing budgets `(d^2 n^6, d n^6)` for the plain generators and
/// for generators with all powers.
pub fn mixing_budget(n: usize, d: u64) -> (u64, u64) {
    let n6 = (n as u64).pow(6);
    (d * d * n6, d * n6)
}

/// Real lift `S = M^T U^T M^{-T}` of an integer matrix `U`.
///
/// Fails unless `S` is symplectic and `U` is unimodular, so that `S` maps the
/// stabilizer lattice and its dual onto themselves.
pub fn automorphism_lift_integer(u: &DMatrix<i64>, code: &GkpCode) -> Result<SymplecticMatrix> {
    let m = code.basis.matrix();
    let uf = u.map(|v| v as f64);
    let det = uf.determinant();
    if (det.abs() - 1.0).abs() > 1e-9 {
        return Err(GkpError::Validation(format!("integer lift has det {det}, not +-1")));
    }
    let m_inv_t = m.clone().try_inverse().expect("full rank").transpose();
    let s = m.transpose() * uf.transpose() * m_inv_t;
    SymplecticMatrix::new(s).map_err(|_| {
        GkpError::Validation("lift is not symplectic: code and U are inconsistent".into())
    })
}

/// Lifts a logical symplectic matrix to a physical lattice automorphism.
///
/// For single-mode codes the integer representative of `U` with entries in
/// `[-d, d]` whose lift is closest to orthogonal is used (ties broken by the
/// smallest shift away from `[0, d)`, then lexicographically); for more modes the representative with entries in
/// `(-d/2, d/2]` must itself be integer-symplectic.
pub fn automorphism_lift(u: &ModSymplecticMatrix, code: &GkpCode) -> Result<SymplecticMatrix> {
    if u.n != code.n || u.d != code.d || !code.is_scaled() {
        return Err(GkpError::Validation("U does not match a scaled code".into()));
    }
    let d = u.d as i64;
    if u.n == 1 {
        let mut best: Option<(f64, [i64; 5], SymplecticMatrix)> = None;
        let r = |v: i64| -> Vec<i64> { (-d..=d).filter(|x| reduce(x - v, u.d) == 0).collect() };
        let (ra, rb, rc, rd) = (r(u.u[(0, 0)]), r(u.u[(0, 1)]), r(u.u[(1, 0)]), r(u.u[(1, 1)]));
        for &a in &ra {
            for &b in &rb {
                for &c in &rc {
                    for &e in &rd {
                        if a * e - b * c != 1 {
                            continue;
                        }
                        let cand = DMatrix::from_row_slice(2, 2, &[a, b, c, e]);
                        let s = automorphism_lift_integer(&cand, code)?;
                        let dev = (s.matrix().transpose() * s.matrix() - DMatrix::identity(2, 2)).norm();
                        let shift = [a, b, c, e].iter().map(|x| (x - reduce(*x, u.d)).abs()).sum::<i64>();
                        let key = [shift, a, b, c, e];
                        let better = match &best {
                            None => true,
                            Some((bd, bk, _)) => dev < bd - 1e-12 || (dev <= bd + 1e-12 && key < *bk),
                        };
                        if better {
                            best = Some((dev, key, s));
                        }
                    }
                }
            }
        }
        return best
            .map(|b| b.2)
            .ok_or_else(|| GkpError::Validation("no integer symplectic representative".into()));
    }
    let centred = u.u.map(|v| if v > d / 2 { v - d } else { v });
    let j = int_form(u.n);
    if centred.transpose() * &j * &centred != j {
        return Err(GkpError::Validation(
            "centred representative is not integer-symplectic; lift fails integrality".into(),
        ));
    }
    automorphism_lift_integer(&centred, code)
}

/// Frame potential `|S|^-2 sum_{U,V} |Tr(U^dag V)|^4` of a set of qubit unitaries.
pub fn frame_potential(set: &[Matrix2<Complex>]) -> Result<f64> {
    if set.is_empty() {
        return Err(GkpError::Validation("empty unitary set".into()));
    }
    let mut acc = 0.0;
    for u in set {
        let ud = u.adjoint();
        for v in set {
            acc += (ud * v).trace().norm().powi(4);
        }
    }
    Ok(acc / (set.len() * set.len()) as f64)
}

/// The single-qubit Pauli matrices `I, X, Y, Z`.
pub fn pauli_matrices() -> [Matrix2<Complex>; 4] {
    let o = Complex::new(0.0, 0.0);
    let l = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

/// The 12 unitaries `(H S^dag)^k P` for `k = 0, 1, 2` and Paulis `P`.
pub fn hs_dagger_pauli_set() -> Vec<Matrix2<Complex>> {
    let h = Matrix2::new(1.0, 1.0, 1.0, -1.0).map(|v| Complex::new(v / 2f64.sqrt(), 0.0));
    let sd = Matrix2::new(
        Complex::new(1.0, 0.0),
        Complex::new(0.0, 0.0),
        Complex::new(0.0, 0.0),
        Complex::new(0.0, -1.0),
    );
    let g = h * sd;
    let mut out = Vec::with_capacity(12);
    let mut gk = Matrix2::<Complex>::identity();
    for _ in 0..3 {
        for p in pauli_matrices() {
            out.push(gk * p);
        }
        gk *= g;
    }
    out
}

/// The logical action of `H S^dag` in `Sp_2(Z_2)`: the Fourier gate times
/// the phase gate.
pub fn hs_dagger_logical() -> ModSymplecticMatrix {
    let j = Generator::Fourier { i: 1 }.matrix(1, 2).expect("valid");
    let p = Generator::Phase { i: 1 }.matrix(1, 2).expect("valid");
    j.mul(&p)
}
