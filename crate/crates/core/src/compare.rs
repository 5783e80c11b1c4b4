//! Chain/ring comparison: shared spectrum, determinant identity and the
//! truncation relation between chain and ring eigenvectors.
//!
//! The open chain has `k n - 1` sites and its partner ring `2 k n` sites.
//! Every chain band state at `theta = pi j / n` coincides with the ring
//! doublet at `l = j` of the doubled ring, and truncating the ring's
//! sine-form vector to the first `k n - 1` coordinates reproduces the chain
//! vector. The `k - 1` boundary states exist only on the chain, the `2 k`
//! states at `l = 0` and `l = n` only on the ring. Characteristic
//! polynomials satisfy
//!
//! `det(C - l)^2 (P(l) - 2 PiD)(P(l) + 2 PiD) = det(R - l) det(H_{1,k-1} - l)^2`
//!
//! with `P(l) = det(H_{1,k} - l) - det(H_{2,k-1} - l) D_k^2` and
//! `PiD = D_1 ... D_k`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, tridiag_char_scaled};
use crate::model::{
    block_char, build_block, build_chain, ChainModel, Model, PeriodicParameters, RingModel,
};
use crate::solver::{closed_form, oracle_eigensystem, EigenSystem, Origin, SpectralLine, Vectors};

/// Matching tolerance factor: lines pair up within `1e-8 (1 + ||H_ring||_F)`.
pub const MATCH_TOL: f64 = 1e-8;
/// Identity residual accepted by [`ComparisonReport::passes`].
pub const IDENTITY_TOL: f64 = 1e-8;
/// Projection residual bound factor, applied as `1e-9 (1 + ||v||_inf)`.
pub const PROJECTION_TOL: f64 = 1e-9;
/// Sampled energies keep at least this distance from every eigenvalue of
/// the chain, the ring and `H_{1,k-1}`, where both sides of the identity
/// vanish.
pub const SAMPLE_EXCLUSION: f64 = 1e-6;
/// Beyond this magnitude either side of the identity is considered unsafe.
pub const OVERFLOW_LIMIT: f64 = 1e280;

const MAX_SAMPLE_ATTEMPTS: usize = 10_000;

/// Result of truncating a ring vector onto a chain vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionCheck {
    /// Max-norm of `s * v[..L] - u`.
    pub residual: f64,
    /// Scalar `s` fixed by the first non-negligible chain coordinate.
    pub scale: f64,
    /// Acceptance bound `1e-9 (1 + ||v||_inf)`.
    pub bound: f64,
}

impl ProjectionCheck {
    pub fn passes(&self) -> bool {
        self.residual <= self.bound && (self.scale - 1.0).abs() <= PROJECTION_TOL
    }
}

/// A chain line matched with a ring doublet.
#[derive(Debug, Clone, Serialize)]
pub struct CommonPair {
    pub value: f64,
    /// Index into the chain eigensystem's lines.
    #[serde(skip)]
    pub chain_line: usize,
    /// Index into the ring eigensystem's lines.
    #[serde(skip)]
    pub ring_line: usize,
    pub chain_mode: Option<String>,
    pub ring_mode: Option<String>,
    pub ring_multiplicity: usize,
    pub projection: Option<ProjectionCheck>,
}

/// An unmatched line.
#[derive(Debug, Clone, Serialize)]
pub struct LoneLine {
    pub value: f64,
    #[serde(skip)]
    pub line: usize,
    pub mode: Option<String>,
    pub origin: Option<Origin>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub common: Vec<CommonPair>,
    pub chain_only: Vec<LoneLine>,
    pub ring_only: Vec<LoneLine>,
    #[serde(skip)]
    pub identity_residuals: Vec<f64>,
    pub identity_max_rel_err: f64,
    pub projection_max_err: f64,
}

impl ComparisonReport {
    /// Whether every identity and projection residual is within bounds.
    pub fn passes(&self) -> bool {
        self.identity_residuals.iter().all(|&r| r <= IDENTITY_TOL)
            && self
                .common
                .iter()
                .all(|c| c.projection.is_none_or(|p| p.passes()))
    }

    /// `(common, chain_only, ring_only)` line counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        (
            self.common.len(),
            self.chain_only.len(),
            self.ring_only.len(),
        )
    }

    /// Pretty JSON with a fixed field order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn lone(lines: &[SpectralLine], i: usize) -> LoneLine {
    let l = &lines[i];
    LoneLine {
        value: l.value,
        line: i,
        mode: l.mode.map(|m| m.to_string()),
        origin: l.origin,
        multiplicity: l.multiplicity,
    }
}

/// Pairs chain lines with ring doublets by greedy nearest matching within
/// `tol`, preferring a ring line with the same mode index. Chain lines tagged
/// as boundary states are never matched; any other chain line without a
/// partner is a [`Error::MatchFailure`]. Projections are not evaluated here.
pub fn spectrum_partition(
    chain: &EigenSystem,
    ring: &EigenSystem,
    tol: f64,
) -> Result<ComparisonReport> {
    let (chain_sites, ring_sites) = (chain.sites(), ring.sites());
    if ring_sites != 2 * (chain_sites + 1) {
        return Err(Error::DimensionMismatch(format!(
            "a chain of {chain_sites} sites pairs with a ring of {} sites, got {ring_sites}",
            2 * (chain_sites + 1)
        )));
    }
    let mut used = vec![false; ring.lines.len()];
    let mut common = Vec::new();
    let mut chain_only = Vec::new();
    for (ci, line) in chain.lines.iter().enumerate() {
        if line.origin == Some(Origin::Boundary) {
            chain_only.push(lone(&chain.lines, ci));
            continue;
        }
        let best = ring
            .lines
            .iter()
            .enumerate()
            .filter(|(ri, r)| !used[*ri] && r.multiplicity == 2)
            .map(|(ri, r)| (ri, (r.value - line.value).abs(), r))
            .filter(|(_, d, _)| *d <= tol)
            .min_by(|a, b| {
                let same = |r: &SpectralLine| match (r.mode, line.mode) {
                    (Some(x), Some(y)) => x.index == y.index && x.band == y.band,
                    _ => false,
                };
                same(b.2).cmp(&same(a.2)).then(a.1.total_cmp(&b.1))
            });
        match best {
            Some((ri, _, r)) => {
                used[ri] = true;
                common.push(CommonPair {
                    value: line.value,
                    chain_line: ci,
                    ring_line: ri,
                    chain_mode: line.mode.map(|m| m.to_string()),
                    ring_mode: r.mode.map(|m| m.to_string()),
                    ring_multiplicity: r.multiplicity,
                    projection: None,
                });
            }
            None if line.origin.is_none() => chain_only.push(lone(&chain.lines, ci)),
            None => {
                return Err(Error::MatchFailure {
                    lambda: line.value,
                    tol,
                })
            }
        }
    }
    let ring_only = (0..ring.lines.len())
        .filter(|&ri| !used[ri])
        .map(|ri| lone(&ring.lines, ri))
        .collect();
    Ok(ComparisonReport {
        common,
        chain_only,
        ring_only,
        identity_residuals: Vec::new(),
        identity_max_rel_err: 0.0,
        projection_max_err: 0.0,
    })
}

/// Compares the chain vector with the first `L` coordinates of the ring's
/// sine-form vector (the last stored vector of the ring line), after one
/// scalar match on the first non-negligible chain coordinate.
pub fn projection_check(chain: &SpectralLine, ring: &SpectralLine) -> Result<ProjectionCheck> {
    let u = chain
        .vectors
        .first()
        .ok_or_else(|| Error::ShapeMismatch("chain line carries no vector".into()))?;
    let v = ring
        .vectors
        .last()
        .ok_or_else(|| Error::ShapeMismatch("ring line carries no vector".into()))?;
    if v.len() <= u.len() {
        return Err(Error::ShapeMismatch(format!(
            "ring vector of length {} cannot be truncated to {}",
            v.len(),
            u.len()
        )));
    }
    let v = &v[..u.len()];
    let u_max = u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let v_max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let pivot = u
        .iter()
        .position(|x| x.abs() > 1e-8 * u_max)
        .ok_or_else(|| Error::ShapeMismatch("chain vector is zero".into()))?;
    let scale = if v[pivot] != 0.0 {
        u[pivot] / v[pivot]
    } else {
        f64::INFINITY
    };
    let residual = u
        .iter()
        .zip(v)
        .map(|(a, b)| (scale * b - a).abs())
        .fold(0.0, f64::max);
    Ok(ProjectionCheck {
        residual,
        scale,
        bound: PROJECTION_TOL * (1.0 + v_max),
    })
}

/// A real number as `mantissa * 2^exp`, for products that would overflow.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    mant: f64,
    exp: i32,
}

impl Scaled {
    fn new(mant: f64, exp: i32) -> Self {
        if mant == 0.0 || !mant.is_finite() {
            return Self { mant, exp: 0 };
        }
        let shift = mant.abs().log2().floor() as i32;
        Self {
            mant: mant * 2f64.powi(-shift),
            exp: exp + shift,
        }
    }

    fn mul(self, other: Scaled) -> Scaled {
        Scaled::new(self.mant * other.mant, self.exp + other.exp)
    }

    fn log2_abs(self) -> f64 {
        if self.mant == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mant.abs().log2() + self.exp as f64
        }
    }

    /// `|a - b| / max(|a|, |b|, 1e-300)`.
    fn relative_difference(a: Scaled, b: Scaled) -> f64 {
        let e = a.exp.max(b.exp);
        let x = a.mant * 2f64.powi((a.exp - e).max(-1074));
        let y = b.mant * 2f64.powi((b.exp - e).max(-1074));
        let denom = x.abs().max(y.abs());
        if denom == 0.0 {
            return 0.0;
        }
        (x - y).abs() / denom
    }
}

/// Relative residual of the determinant identity at each sample energy.
/// The chain side uses the three-term recurrence, the ring side the product
/// over dense-solver eigenvalues.
pub fn determinant_identity_residual(
    params: &PeriodicParameters,
    n: usize,
    lambdas: &[f64],
) -> Result<Vec<f64>> {
    let k = params.k();
    let chain = ChainModel::with_cells(params.clone(), n)?;
    let chain_t = build_chain(&chain);
    let ring = RingModel::new(params.clone(), 2 * n)?;
    let ring_values = hermitian_eig(&ring.operator().to_dense(), 1e-12)?.values;
    let prod = params.coupling_product(1, k);
    let dk2 = params.coupling()[k - 1].powi(2);
    let limit = OVERFLOW_LIMIT.log2();
    lambdas
        .iter()
        .map(|&lambda| {
            let (cm, ce) = tridiag_char_scaled(&chain_t, lambda);
            let chain_det = Scaled::new(cm, ce);
            let p = block_char(params, 1, k, lambda) - block_char(params, 2, k - 1, lambda) * dk2;
            let head = block_char(params, 1, k - 1, lambda);
            let lhs = chain_det
                .mul(chain_det)
                .mul(Scaled::new((p - 2.0 * prod) * (p + 2.0 * prod), 0));
            let ring_det = ring_values.iter().fold(Scaled::new(1.0, 0), |acc, &mu| {
                acc.mul(Scaled::new(mu - lambda, 0))
            });
            let rhs = ring_det.mul(Scaled::new(head * head, 0));
            let magnitude = lhs.log2_abs().max(rhs.log2_abs());
            if magnitude > limit {
                return Err(Error::OverflowRisk {
                    magnitude: 2f64.powf(magnitude.min(1023.0)),
                });
            }
            Ok(Scaled::relative_difference(lhs, rhs))
        })
        .collect()
}

/// Draws `count` energies uniformly from `[min - 1, max + 1]` around the
/// joint spectrum, redrawing any that fall near an eigenvalue of the chain,
/// the ring or `H_{1,k-1}`.
pub fn sample_energies<R: Rng + ?Sized>(
    params: &PeriodicParameters,
    n: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let chain = ChainModel::with_cells(params.clone(), n)?;
    let ring = RingModel::new(params.clone(), 2 * n)?;
    let ring_op = ring.operator();
    let mut avoid = hermitian_eig(&ring_op.to_dense(), 1e-12)?.values;
    avoid.extend(hermitian_eig(&chain.operator().to_dense(), 1e-12)?.values);
    let k = params.k();
    if k > 1 {
        avoid.extend(hermitian_eig(&build_block(params, 1, k - 1).to_dense(), 1e-12)?.values);
    }
    let lo = avoid.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let hi = avoid.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let radius = SAMPLE_EXCLUSION;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > MAX_SAMPLE_ATTEMPTS {
            return Err(Error::InvalidParameters(
                "could not draw energies away from the spectrum".into(),
            ));
        }
        let lambda = rng.gen_range(lo..hi);
        if avoid.iter().all(|&mu| (mu - lambda).abs() > radius) {
            out.push(lambda);
        }
    }
    Ok(out)
}

/// Full comparison of the chain with `k n - 1` sites and the ring with
/// `2 k n` sites: closed-form eigensystems, spectrum partition, projection
/// of every common line and the determinant identity at `samples` energies.
pub fn compare_models<R: Rng + ?Sized>(
    params: &PeriodicParameters,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<ComparisonReport> {
    let chain = closed_form(
        &Model::Chain(ChainModel::with_cells(params.clone(), n)?),
        Vectors::Canonical,
    )?;
    let ring = closed_form(
        &Model::Ring(RingModel::new(params.clone(), 2 * n)?),
        Vectors::Canonical,
    )?;
    let tol = MATCH_TOL * (1.0 + ring.operator().frobenius_norm());
    let mut report = spectrum_partition(&chain, &ring, tol)?;
    let mut projection_max = 0.0_f64;
    for pair in &mut report.common {
        let check = projection_check(&chain.lines[pair.chain_line], &ring.lines[pair.ring_line])?;
        projection_max = projection_max.max(check.residual);
        pair.projection = Some(check);
    }
    let lambdas = sample_energies(params, n, samples, rng)?;
    report.identity_residuals = determinant_identity_residual(params, n, &lambdas)?;
    report.identity_max_rel_err = report
        .identity_residuals
        .iter()
        .copied()
        .fold(0.0, f64::max);
    report.projection_max_err = projection_max;
    Ok(report)
}

/// Sanity comparison of closed-form eigenvalues against the dense solver:
/// largest absolute difference of the sorted value lists.
pub fn oracle_value_gap(model: &Model) -> Result<f64> {
    let closed = closed_form(model, Vectors::Skip)?.values();
    let oracle = oracle_eigensystem(model)?.values();
    if closed.len() != oracle.len() {
        return Err(Error::DimensionMismatch(format!(
            "closed form gave {} values, dense solver {}",
            closed.len(),
            oracle.len()
        )));
    }
    Ok(closed
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
