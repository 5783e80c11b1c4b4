//! Periodic XY models and every matrix built from their coefficients.
//!
//! Site numbering in the public API is 0-based. Block indices for
//! [`build_block`] follow the 1-based cell-residue convention `1..=k`, since
//! that is how the block minors enter the eigenvector formulas.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tridiag_char, HermitianDense, SymTridiag};

/// Period `k` with per-cell Larmor frequencies and nearest-neighbour couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicParameters {
    k: usize,
    omega: Vec<f64>,
    coupling: Vec<f64>,
}

impl PeriodicParameters {
    pub fn new(omega: Vec<f64>, coupling: Vec<f64>) -> Result<Self> {
        let k = omega.len();
        Self::with_period(k, omega, coupling)
    }

    fn with_period(k: usize, omega: Vec<f64>, coupling: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameters("period k must be positive".into()));
        }
        if omega.len() != k {
            return Err(Error::InvalidParameters(format!(
                "omega has {} entries but k = {k}",
                omega.len()
            )));
        }
        if coupling.len() != k {
            return Err(Error::InvalidParameters(format!(
                "coupling has {} entries but k = {k}",
                coupling.len()
            )));
        }
        if let Some(i) = omega.iter().position(|w| !w.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "omega[{i}] is not finite"
            )));
        }
        for (i, d) in coupling.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::InvalidParameters(format!(
                    "coupling[{i}] is not finite"
                )));
            }
            if *d == 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "coupling[{i}] is zero; all couplings must be nonzero"
                )));
            }
        }
        Ok(Self { k, omega, coupling })
    }

    /// Homogeneous (period one) parameters.
    pub fn homogeneous(omega: f64, coupling: f64) -> Result<Self> {
        Self::new(vec![omega], vec![coupling])
    }

    pub fn alternating(omega1: f64, omega2: f64, d1: f64, d2: f64) -> Result<Self> {
        Self::new(vec![omega1, omega2], vec![d1, d2])
    }

    /// Parses the parameter file format `{"k": int, "omega": [...], "coupling": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ParamFile {
            k: usize,
            omega: Vec<f64>,
            coupling: Vec<f64>,
        }
        let file: ParamFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameters(format!("malformed parameter file: {e}")))?;
        Self::with_period(file.k, file.omega, file.coupling)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("parameters serialize")
    }

    /// Random draw with `omega_j` in `[-1, 1]` and `|D_j|` in `[0.5, 2]`
    /// with a random sign.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Self {
        let omega = (0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let coupling = (0..k)
            .map(|_| {
                let mag = rng.gen_range(0.5..=2.0);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        Self::new(omega, coupling).expect("random parameters are valid")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn coupling(&self) -> &[f64] {
        &self.coupling
    }

    /// `omega` at 0-based site `site`, cycling with period k.
    pub fn omega_at(&self, site: usize) -> f64 {
        self.omega[site % self.k]
    }

    /// Coupling between 0-based sites `site` and `site + 1`.
    pub fn coupling_at(&self, site: usize) -> f64 {
        self.coupling[site % self.k]
    }

    /// `D_from * ... * D_to` (1-based, inclusive); 1 when `to < from`.
    pub fn coupling_product(&self, from: usize, to: usize) -> f64 {
        if to < from {
            return 1.0;
        }
        (from..=to).map(|i| self.coupling[i - 1]).product()
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.coupling.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Parameters cyclically relabelled so that cell site 2 becomes site 1.
    pub fn rotated(&self) -> Self {
        let mut omega = self.omega.clone();
        let mut coupling = self.coupling.clone();
        omega.rotate_left(1);
        coupling.rotate_left(1);
        Self {
            k: self.k,
            omega,
            coupling,
        }
    }
}

/// Open chain of `sites` spins with k-periodic coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModel {
    pub params: PeriodicParameters,
    pub sites: usize,
}

impl ChainModel {
    pub fn new(params: PeriodicParameters, sites: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidModel(
                "a chain needs at least one site".into(),
            ));
        }
        Ok(Self { params, sites })
    }

    /// Chain with `k n - 1` sites.
    pub fn with_cells(params: PeriodicParameters, n: usize) -> Result<Self> {
        let k = params.k();
        if n < 1 || k * n < 2 {
            return Err(Error::InvalidModel(format!(
                "k n - 1 must be positive (k = {k}, n = {n})"
            )));
        }
        Self::new(params, k * n - 1)
    }

    /// `n` such that `sites = k n - 1`, if it exists.
    pub fn cells(&self) -> Option<usize> {
        let k = self.params.k();
        if (self.sites + 1).is_multiple_of(k) {
            Some((self.sites + 1) / k)
        } else {
            None
        }
    }

    pub fn operator(&self) -> ModelOperator {
        ModelOperator::chain(build_chain(self))
    }
}

/// Closed ring of `k m` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct RingModel {
    pub params: PeriodicParameters,
    pub cells: usize,
}

impl RingModel {
    pub fn new(params: PeriodicParameters, cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::InvalidModel(format!(
                "a ring needs at least two cells, got {cells}"
            )));
        }
        Ok(Self { params, cells })
    }

    pub fn sites(&self) -> usize {
        self.params.k() * self.cells
    }

    pub fn operator(&self) -> ModelOperator {
        let n = self.sites();
        let chain = ChainModel {
            params: self.params.clone(),
            sites: n,
        };
        ModelOperator::ring(
            build_chain(&chain),
            self.params.coupling()[self.params.k() - 1],
        )
    }
}

/// Chain or ring.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Chain(ChainModel),
    Ring(RingModel),
}

impl Model {
    pub fn params(&self) -> &PeriodicParameters {
        match self {
            Model::Chain(c) => &c.params,
            Model::Ring(r) => &r.params,
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            Model::Chain(c) => c.sites,
            Model::Ring(r) => r.sites(),
        }
    }

    pub fn operator(&self) -> ModelOperator {
        match self {
            Model::Chain(c) => c.operator(),
            Model::Ring(r) => r.operator(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Chain(_) => "chain",
            Model::Ring(_) => "ring",
        }
    }
}

/// Structured one-magnon matrix: a symmetric tridiagonal part plus an
/// optional symmetric corner coupling between the first and last site.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOperator {
    tridiag: SymTridiag,
    corner: f64,
}

impl ModelOperator {
    pub fn chain(tridiag: SymTridiag) -> Self {
        Self {
            tridiag,
            corner: 0.0,
        }
    }

    /// For two sites the corner falls on the existing off-diagonal entry and
    /// is added to it.
    pub fn ring(tridiag: SymTridiag, corner: f64) -> Self {
        if tridiag.order() == 2 {
            let diag = tridiag.diag().to_vec();
            let off = vec![tridiag.offdiag()[0] + corner];
            return Self {
                tridiag: SymTridiag::new(diag, off).expect("2x2 shape"),
                corner: 0.0,
            };
        }
        Self { tridiag, corner }
    }

    pub fn order(&self) -> usize {
        self.tridiag.order()
    }

    pub fn tridiag(&self) -> &SymTridiag {
        &self.tridiag
    }

    pub fn corner(&self) -> f64 {
        self.corner
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.tridiag.matvec(v);
        let n = self.order();
        if self.corner != 0.0 && n > 2 {
            out[0] += self.corner * v[n - 1];
            out[n - 1] += self.corner * v[0];
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let t = self.tridiag.frobenius_norm();
        (t * t + 2.0 * self.corner * self.corner).sqrt()
    }

    pub fn to_dense(&self) -> HermitianDense {
        let mut m = self.tridiag.to_dense();
        let n = self.order();
        if self.corner != 0.0 && n > 2 {
            m.set_pair(0, n - 1, Complex64::new(self.corner, 0.0));
        }
        m
    }

    /// `||H u - lambda u||_2`.
    pub fn residual(&self, lambda: f64, u: &[f64]) -> f64 {
        self.apply(u)
            .iter()
            .zip(u)
            .map(|(hu, x)| (hu - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Open-chain matrix: diagonal `2 omega`, off-diagonal `D`, indices cycling
/// with period k.
pub fn build_chain(model: &ChainModel) -> SymTridiag {
    let n = model.sites;
    let p = &model.params;
    let diag = (0..n).map(|i| 2.0 * p.omega_at(i)).collect();
    let off = (0..n.saturating_sub(1)).map(|i| p.coupling_at(i)).collect();
    SymTridiag::new(diag, off).expect("consistent sizes")
}

/// Dense ring matrix: the chain of `k m` sites plus `D_k` in both corners.
pub fn build_ring(model: &RingModel) -> HermitianDense {
    model.operator().to_dense()
}

/// Block `H_{i,j}` on cell residues `i..=j` (1-based). `j = i - 1` gives the
/// empty matrix.
///
/// # Panics
/// If `i == 0`, `j > k` or `j + 1 < i`.
pub fn build_block(params: &PeriodicParameters, i: usize, j: usize) -> SymTridiag {
    assert!(i >= 1, "block indices are 1-based");
    assert!(
        j <= params.k(),
        "block end {j} exceeds period {}",
        params.k()
    );
    assert!(j + 1 >= i, "block H_{{{i},{j}}} is undefined");
    if j + 1 == i {
        return SymTridiag::empty();
    }
    let diag = (i..=j).map(|t| 2.0 * params.omega()[t - 1]).collect();
    let off = (i..j).map(|t| params.coupling()[t - 1]).collect();
    SymTridiag::new(diag, off).expect("consistent sizes")
}

/// `det(H_{i,j} - lambda I)`, extended by the recurrence convention to `1`
/// for `j = i - 1` and `0` for `j = i - 2`. The last case only arises as
/// `H_{2,0}` when `k = 1`.
pub fn block_char(params: &PeriodicParameters, i: usize, j: usize, lambda: f64) -> f64 {
    if j + 2 == i {
        return 0.0;
    }
    tridiag_char(&build_block(params, i, j), lambda)
}

/// Reduced Bloch block `H_k(q)`: `H_{1,k}` with `q^{-1} D_k` added at the
/// top-right corner and `q D_k` at the bottom-left. For `k = 1` this is the
/// scalar `2 omega_1 + D_1 (q + q^{-1})`.
pub fn build_hk(params: &PeriodicParameters, q: Complex64) -> HermitianDense {
    let k = params.k();
    let mut m = build_block(params, 1, k).to_dense();
    let dk = params.coupling()[k - 1];
    // Renormalise so the corner stays exactly Hermitian for |q| ~ 1.
    let q = q / q.norm();
    m.add_pair(0, k - 1, q.conj() * dk);
    m
}

/// Bloch phase `exp(i theta)`.
pub fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Ring quasimomentum phase `q_l = exp(2 pi i l / m)`.
/// The real phases `q = 1` (`l = 0`) and `q = -1` (`2 l = m`) are exact, so
/// the corresponding blocks stay real.
pub fn ring_phase(l: usize, m: usize) -> Complex64 {
    match (l % m, 2 * (l % m) == m) {
        (0, _) => Complex64::new(1.0, 0.0),
        (_, true) => Complex64::new(-1.0, 0.0),
        _ => phase(2.0 * PI * l as f64 / m as f64),
    }
}

/// Component `u_(j) = (u_j, u_{j+k}, ...)` for residue `j` in `1..=k`.
pub fn extract_component<T: Copy>(u: &[T], j: usize, k: usize) -> Vec<T> {
    assert!(j >= 1 && j <= k, "residue {j} outside 1..={k}");
    u.iter().skip(j - 1).step_by(k).copied().collect()
}

/// Number of coordinates of component `j` (1-based) in a vector of length `n`.
pub fn component_len(n: usize, j: usize, k: usize) -> usize {
    if n >= j {
        (n - j) / k + 1
    } else {
        0
    }
}

/// Interleaves components back into a vector of length `n`.
pub fn assemble_from_components<T: Copy + Default>(
    components: &[Vec<T>],
    k: usize,
    n: usize,
) -> Result<Vec<T>> {
    if components.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "expected {k} components, got {}",
            components.len()
        )));
    }
    for (idx, c) in components.iter().enumerate() {
        let want = component_len(n, idx + 1, k);
        if c.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "component {} has {} coordinates, expected {want} for N = {n}, k = {k}",
                idx + 1,
                c.len()
            )));
        }
    }
    let mut out = vec![T::default(); n];
    for (idx, c) in components.iter().enumerate() {
        for (s, &x) in c.iter().enumerate() {
            out[idx + s * k] = x;
        }
    }
    Ok(out)
}

/// Cyclic shift `(T v)_i = v_{i+1 mod N}`.
pub fn shift_apply<T: Copy>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    if !out.is_empty() {
        out.rotate_left(1);
    }
    out
}

/// Transposed shift `(T^t v)_i = v_{i-1 mod N}`.
pub fn shift_transpose_apply<T: Copy>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    if !out.is_empty() {
        out.rotate_right(1);
    }
    out
}

/// Small dense real rectangular matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<f64>,
}

impl RectMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * x[c]).sum())
            .collect()
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c) * y[r]).sum())
            .collect()
    }
}

/// Odd-to-even coupling map of the alternating chain with `2n - 1` sites:
/// `(n-1) x n` with `D_1` on the diagonal and `D_2` on the superdiagonal.
pub fn l_chain(d1: f64, d2: f64, n: usize) -> RectMatrix {
    let mut m = RectMatrix::zeros(n - 1, n);
    for r in 0..n - 1 {
        m.set(r, r, d1);
        m.set(r, r + 1, d2);
    }
    m
}

/// Ring counterpart of [`l_chain`]: `n x n` with the wrap-around `D_2` in
/// the bottom-left corner.
pub fn l_ring(d1: f64, d2: f64, n: usize) -> RectMatrix {
    let mut m = RectMatrix::zeros(n, n);
    for r in 0..n {
        m.set(r, r, d1);
        let c = (r + 1) % n;
        m.set(r, c, m.get(r, c) + d2);
    }
    m
}

/// `(n-1) x n` selector of the first `n - 1` coordinates.
pub fn q_chain(n: usize) -> RectMatrix {
    let mut m = RectMatrix::zeros(n - 1, n);
    for r in 0..n - 1 {
        m.set(r, r, 1.0);
    }
    m
}

/// `(n-1) x n` selector of the last `n - 1` coordinates.
pub fn r_chain(n: usize) -> RectMatrix {
    let mut m = RectMatrix::zeros(n - 1, n);
    for r in 0..n - 1 {
        m.set(r, r + 1, 1.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dense_real(m: &HermitianDense) -> Vec<f64> {
        m.entries().iter().map(|z| z.re).collect()
    }

    #[test]
    fn homogeneous_chain_fill() {
        let p = PeriodicParameters::homogeneous(0.0, 1.0).unwrap();
        let t = build_chain(&ChainModel::new(p, 3).unwrap());
        assert_eq!(t.diag(), &[0.0, 0.0, 0.0]);
        assert_eq!(t.offdiag(), &[1.0, 1.0]);
    }

    #[test]
    fn period_two_index_arithmetic() {
        let (a, b, c, d) = (0.3, -0.2, 1.1, 0.7);
        let p = PeriodicParameters::alternating(a, b, c, d).unwrap();
        let t = build_chain(&ChainModel::new(p, 5).unwrap());
        assert_eq!(t.diag(), &[2.0 * a, 2.0 * b, 2.0 * a, 2.0 * b, 2.0 * a]);
        assert_eq!(t.offdiag(), &[c, d, c, d]);
    }

    #[test]
    fn component_lengths_for_chain() {
        // k = 3, N = 3 * 4 - 1: u_(3) has m - 1 = 3 coordinates.
        let u: Vec<usize> = (0..11).collect();
        assert_eq!(extract_component(&u, 1, 3).len(), 4);
        assert_eq!(extract_component(&u, 2, 3).len(), 4);
        assert_eq!(extract_component(&u, 3, 3).len(), 3);
    }

    #[test]
    fn homogeneous_ring_is_circulant() {
        let p = PeriodicParameters::homogeneous(0.0, 1.0).unwrap();
        let m = build_ring(&RingModel::new(p, 4).unwrap());
        let expected = [
            0.0, 1.0, 0.0, 1.0, //
            1.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 1.0, //
            1.0, 0.0, 1.0, 0.0,
        ];
        assert_eq!(dense_real(&m), expected);
    }

    #[test]
    fn ring_corners_hold_last_coupling() {
        let p = PeriodicParameters::alternating(0.1, 0.2, 1.5, -0.8).unwrap();
        let m = build_ring(&RingModel::new(p, 2).unwrap());
        assert_eq!(m.get(0, 3).re, -0.8);
        assert_eq!(m.get(3, 0).re, -0.8);
    }

    #[test]
    fn ring_minus_chain_has_two_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = PeriodicParameters::random(&mut rng, 3);
        let ring = build_ring(&RingModel::new(p.clone(), 3).unwrap());
        let chain = build_chain(&ChainModel::new(p, 9).unwrap()).to_dense();
        let nonzero = ring
            .entries()
            .iter()
            .zip(chain.entries())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn two_site_ring_adds_corner() {
        let p = PeriodicParameters::homogeneous(0.5, 1.0).unwrap();
        let m = build_ring(&RingModel::new(p, 2).unwrap());
        assert_eq!(dense_real(&m), [1.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn blocks() {
        let p = PeriodicParameters::new(vec![0.3, -0.4, 0.9], vec![1.0, 2.0, 3.0]).unwrap();
        let h11 = build_block(&p, 1, 1);
        assert_eq!(h11.diag(), &[0.6]);
        assert!(build_block(&p, 2, 1).is_empty());
        let a = PeriodicParameters::alternating(0.3, -0.4, 1.0, 2.0).unwrap();
        assert!(build_block(&a, 2, 1).is_empty());
        let h12 = build_block(&p, 1, 2);
        for lambda in [-1.0, 0.0, 0.5, 2.0] {
            let hand = (0.6 - lambda) * (-0.8 - lambda) - 1.0;
            assert!((tridiag_char(&h12, lambda) - hand).abs() < 1e-14);
        }
    }

    #[test]
    fn hk_period_two() {
        let (w1, w2, d1, d2) = (0.2, -0.3, 1.2, 0.7);
        let p = PeriodicParameters::alternating(w1, w2, d1, d2).unwrap();
        let h = build_hk(&p, Complex64::new(1.0, 0.0));
        assert!((h.get(0, 1).re - (d1 + d2)).abs() < 1e-15);
        assert!((h.get(1, 0).re - (d1 + d2)).abs() < 1e-15);
        assert_eq!(h.get(0, 0).re, 2.0 * w1);
        assert_eq!(h.get(1, 1).re, 2.0 * w2);
        let h = build_hk(&p, Complex64::new(-1.0, 0.0));
        assert!((h.get(0, 1).re - (d1 - d2)).abs() < 1e-15);
    }

    #[test]
    fn hk_is_hermitian_and_extends_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..=5 {
            let p = PeriodicParameters::random(&mut rng, k);
            let h = build_hk(&p, phase(0.37));
            assert_eq!(h, h.conj_transpose());
            if k >= 3 {
                let block = build_block(&p, 1, k).to_dense();
                for r in 0..k {
                    for c in 0..k {
                        if (r, c) != (0, k - 1) && (r, c) != (k - 1, 0) {
                            assert_eq!(h.get(r, c), block.get(r, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hk_period_one_is_cosine_band() {
        let p = PeriodicParameters::homogeneous(0.4, -1.3).unwrap();
        let h = build_hk(&p, phase(1.1));
        assert!((h.get(0, 0).re - (0.8 - 2.6 * 1.1f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn components() {
        let u = [1, 2, 3, 4, 5];
        assert_eq!(extract_component(&u, 1, 2), vec![1, 3, 5]);
        assert_eq!(extract_component(&u, 2, 2), vec![2, 4]);
    }

    #[test]
    fn assemble_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, k) in [(5, 2), (8, 3), (11, 3)] {
            let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let comps: Vec<Vec<f64>> = (1..=k).map(|j| extract_component(&u, j, k)).collect();
            assert_eq!(assemble_from_components(&comps, k, n).unwrap(), u);
        }
    }

    #[test]
    fn assemble_rejects_bad_lengths() {
        let comps = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert!(matches!(
            assemble_from_components(&comps, 2, 5),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn shift() {
        assert_eq!(shift_apply(&[1, 2, 3]), vec![2, 3, 1]);
        assert_eq!(shift_transpose_apply(&[1, 2, 3]), vec![3, 1, 2]);
        let v: Vec<i32> = (0..7).collect();
        let mut w = v.clone();
        for _ in 0..7 {
            w = shift_apply(&w);
        }
        assert_eq!(w, v);
    }

    /// `T H(omega_1..omega_k) T^t = H(omega_2..omega_1)`, column by column.
    #[test]
    fn shift_conjugation_relabels_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = PeriodicParameters::random(&mut rng, 3);
        let ring = RingModel::new(p.clone(), 3).unwrap().operator();
        let rotated = RingModel::new(p.rotated(), 3).unwrap().operator();
        let n = 9;
        for c in 0..n {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            let lhs = shift_apply(&ring.apply(&shift_transpose_apply(&e)));
            assert_eq!(lhs, rotated.apply(&e));
        }
    }

    #[test]
    fn shift_power_commutes_with_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let p = PeriodicParameters::random(&mut rng, 3);
        let ring = RingModel::new(p, 4).unwrap().operator();
        let v: Vec<f64> = (0..12).map(|_| rng.gen::<f64>()).collect();
        let mut tv = v.clone();
        for _ in 0..3 {
            tv = shift_apply(&tv);
        }
        let lhs = ring.apply(&tv);
        let mut rhs = ring.apply(&v);
        for _ in 0..3 {
            rhs = shift_apply(&rhs);
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn chain_is_top_left_of_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = PeriodicParameters::random(&mut rng, 4);
        let ring = build_ring(&RingModel::new(p.clone(), 3).unwrap());
        let chain = build_chain(&ChainModel::with_cells(p, 3).unwrap()).to_dense();
        for r in 0..11 {
            for c in 0..11 {
                assert_eq!(ring.get(r, c), chain.get(r, c));
            }
        }
    }

    #[test]
    fn l_chain_is_corner_of_l_ring() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let p = PeriodicParameters::random(&mut rng, 2);
        let (d1, d2) = (p.coupling()[0], p.coupling()[1]);
        for n in 2..6 {
            let lc = l_chain(d1, d2, n);
            let lr = l_ring(d1, d2, n);
            for r in 0..n - 1 {
                for c in 0..n {
                    assert_eq!(lc.get(r, c), lr.get(r, c));
                }
            }
        }
    }

    #[test]
    fn q_and_r_are_corners_of_identity_and_shift() {
        let n = 5;
        let q = q_chain(n);
        let r = r_chain(n);
        let y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(q.apply_transpose(&y), vec![1.0, 2.0, 3.0, 4.0, 0.0]);
        assert_eq!(r.apply_transpose(&y), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        // R is the top-left (n-1) x n corner of T_n.
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(r.apply(&x), shift_apply(&x)[..n - 1].to_vec());
    }

    #[test]
    fn param_file_parsing() {
        let p =
            PeriodicParameters::from_json(r#"{"k": 2, "omega": [0.1, 0.2], "coupling": [1, -1]}"#)
                .unwrap();
        assert_eq!(p.k(), 2);
        let err = PeriodicParameters::from_json(r#"{"k": 2, "omega": [0.1], "coupling": [1, 1]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("omega"));
        let err =
            PeriodicParameters::from_json(r#"{"k": 3, "omega": [0, 0, 0], "coupling": [1, 0, 1]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("coupling[1]"));
    }
}
