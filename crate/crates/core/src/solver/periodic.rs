//! General k-periodic chains (`k n - 1` sites) and rings (`k m` sites).
//!
//! Band energies at Bloch phase `theta` are the eigenvalues of the reduced
//! block `H_k(e^{i theta})`, whose characteristic polynomial equals
//! `det(H_{1,k} - l) - det(H_{2,k-1} - l) D_k^2 - (-1)^k 2 D_1...D_k cos(theta)`.
//! Rings use `theta = 2 pi l / m`; chains use `theta = pi j / n`.
//!
//! Eigenvectors carry a prescribed residue-k component `u_(k)` (sine or
//! cosine profile) and the remaining components follow from
//! `u_(j),c = alpha_j u_(k),c-1 + beta_j u_(k),c`, with coefficients built
//! from minors of `H_{1,k-1} - lambda`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::oracle::{nearest_oracle_vector, tol_cluster};
use super::{
    chain_model, check_sites, relative_residual, ring_model, EigenSystem, Method, ModeLabel,
    Origin, SpectralLine, VectorSource, Vectors, VECTOR_ACCEPT_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{degeneracy_guard, hermitian_eig, tridiag_char};
use crate::model::{
    assemble_from_components, block_char, build_block, build_hk, component_len, phase, ring_phase,
    ChainModel, ModelOperator, PeriodicParameters, RingModel,
};

const HERMITIAN_TOL: f64 = 1e-12;

/// Component-map coefficients at a fixed energy, for residues `1..k`.
#[derive(Debug, Clone)]
pub(crate) struct ComponentMap {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

/// `None` when `det(H_{1,k-1} - lambda)` falls under the degeneracy guard.
pub(crate) fn component_map(params: &PeriodicParameters, lambda: f64) -> Option<ComponentMap> {
    let k = params.k();
    if k == 1 {
        return Some(ComponentMap {
            alpha: Vec::new(),
            beta: Vec::new(),
        });
    }
    let head = build_block(params, 1, k - 1);
    let det = tridiag_char(&head, lambda);
    if !(det.abs() > degeneracy_guard(&head, lambda)) {
        return None;
    }
    let dk = params.coupling()[k - 1];
    let sign = |e: usize| if e.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut alpha = Vec::with_capacity(k - 1);
    let mut beta = Vec::with_capacity(k - 1);
    for j in 1..k {
        alpha.push(
            sign(j)
                * params.coupling_product(1, j - 1)
                * block_char(params, j + 1, k - 1, lambda)
                * dk
                / det,
        );
        beta.push(
            sign(j + k) * block_char(params, 1, j - 1, lambda) * params.coupling_product(j, k - 1)
                / det,
        );
    }
    Some(ComponentMap { alpha, beta })
}

/// Chain vector of `k n - 1` sites from `u_(k)` of length `n - 1`; the
/// missing neighbours at both ends are zero.
pub(crate) fn chain_vector(map: &ComponentMap, uk: &[f64], k: usize, n: usize) -> Vec<f64> {
    let sites = k * n - 1;
    let mut comps: Vec<Vec<f64>> = (0..k - 1)
        .map(|j| {
            (0..n)
                .map(|c| {
                    let prev = if c > 0 { uk[c - 1] } else { 0.0 };
                    let here = if c < n - 1 { uk[c] } else { 0.0 };
                    map.alpha[j] * prev + map.beta[j] * here
                })
                .collect()
        })
        .collect();
    comps.push(uk.to_vec());
    assemble_from_components(&comps, k, sites).expect("component lengths")
}

/// Ring vector of `k m` sites from `u_(k)` of length `m`, with the cyclic
/// predecessor of the first cell.
pub(crate) fn ring_vector(map: &ComponentMap, uk: &[f64], k: usize, m: usize) -> Vec<f64> {
    let mut comps: Vec<Vec<f64>> = (0..k - 1)
        .map(|j| {
            (0..m)
                .map(|c| map.alpha[j] * uk[(c + m - 1) % m] + map.beta[j] * uk[c])
                .collect()
        })
        .collect();
    comps.push(uk.to_vec());
    assemble_from_components(&comps, k, k * m).expect("component lengths")
}

/// Real representatives extracted from a Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BlochForm {
    /// Real phase (`q = +-1`): one vector.
    Single,
    /// Cosine-form and sine-form pair.
    Pair,
    /// Sine form only (chain truncation of the doubled ring).
    Sine,
}

/// Expands a block eigenvector `mu` of `H_k(e^{i theta})` into the Bloch
/// vector `z_{c k + t} = mu_t e^{i c theta}` on `sites` sites and returns its
/// real representatives. When `mu_k` is not negligible the vector is scaled
/// so that `u_(k)` takes the canonical profile.
pub(crate) fn bloch_vectors(
    mu: &[Complex64],
    theta: f64,
    sites: usize,
    form: BlochForm,
) -> Vec<Vec<f64>> {
    let k = mu.len();
    let norm = mu.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let last = mu[k - 1];
    let scale = if last.norm() > 1e-8 * norm {
        match form {
            BlochForm::Single => last.inv(),
            BlochForm::Pair | BlochForm::Sine => phase(theta) / last,
        }
    } else {
        let big = mu
            .iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("k >= 1");
        big.conj() / (big.norm() * norm)
    };
    let z: Vec<Complex64> = (0..sites)
        .map(|i| {
            let (c, t) = (i / k, i % k);
            mu[t] * phase(c as f64 * theta) * scale
        })
        .collect();
    match form {
        BlochForm::Single => vec![z.iter().map(|w| w.re).collect()],
        BlochForm::Pair => vec![
            z.iter().map(|w| w.re).collect(),
            z.iter().map(|w| w.im).collect(),
        ],
        BlochForm::Sine => vec![z.iter().map(|w| w.im).collect()],
    }
}

fn all_accepted(op: &ModelOperator, lambda: f64, vecs: &[Vec<f64>]) -> bool {
    let scale = op.frobenius_norm();
    vecs.iter()
        .all(|v| relative_residual(op, lambda, v, scale) <= VECTOR_ACCEPT_TOL)
}

/// Residual of the band equation at `lambda` for Bloch angle `theta`,
/// returned with its natural scale
/// `1 + |det(H_{1,k}-l)| + |det(H_{2,k-1}-l)| D_k^2 + 2 |D_1...D_k|`.
pub fn band_equation_residual(params: &PeriodicParameters, lambda: f64, theta: f64) -> (f64, f64) {
    let k = params.k();
    let full = block_char(params, 1, k, lambda);
    let inner = block_char(params, 2, k - 1, lambda);
    let dk2 = params.coupling()[k - 1].powi(2);
    let prod = params.coupling_product(1, k);
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let residual = (full - inner * dk2 - sign * 2.0 * prod * theta.cos()).abs();
    let scale = 1.0 + full.abs() + inner.abs() * dk2 + 2.0 * prod.abs();
    (residual, scale)
}

/// Eigensystem of the k-periodic ring with `m` cells.
///
/// For each `l = 0..=m/2` the `k` eigenvalues of `H_k(q_l)` are the band
/// energies; `0 < l < m/2` yields doublets (cosine and sine profiles of
/// `u_(k)`), `l = 0` and `l = m/2` singlets. Vectors whose closed form is
/// singular or fails the residual check are rebuilt from the block
/// eigenvector.
pub fn periodic_ring(
    params: &PeriodicParameters,
    m: usize,
    vectors: Vectors,
) -> Result<EigenSystem> {
    let ring = RingModel::new(params.clone(), m)?;
    let k = params.k();
    let sites = ring.sites();
    check_sites(sites, vectors)?;
    let op = ring.operator();
    let mut lines = Vec::with_capacity(k * (m / 2 + 1));
    for l in 0..=m / 2 {
        let theta = 2.0 * PI * l as f64 / m as f64;
        let block = hermitian_eig(&build_hk(params, ring_phase(l, m)), HERMITIAN_TOL)?;
        let singlet = l == 0 || 2 * l == m;
        for (band, &lambda) in block.values.iter().enumerate() {
            let (vecs, source) = match vectors {
                Vectors::Skip => (Vec::new(), VectorSource::ClosedForm),
                Vectors::Canonical => {
                    let profiles = ring_profiles(l, m);
                    let closed = component_map(params, lambda).map(|map| {
                        profiles
                            .iter()
                            .map(|uk| ring_vector(&map, uk, k, m))
                            .collect::<Vec<_>>()
                    });
                    match closed {
                        Some(v) if all_accepted(&op, lambda, &v) => (v, VectorSource::ClosedForm),
                        _ => {
                            let form = if singlet {
                                BlochForm::Single
                            } else {
                                BlochForm::Pair
                            };
                            (
                                bloch_vectors(&block.vectors[band], theta, sites, form),
                                VectorSource::Fallback,
                            )
                        }
                    }
                }
            };
            lines.push(SpectralLine {
                value: lambda,
                multiplicity: if singlet { 1 } else { 2 },
                mode: Some(ModeLabel::ring(l, band)),
                origin: Some(if singlet {
                    Origin::Symmetric
                } else {
                    Origin::Bulk
                }),
                angle: Some(theta),
                vectors: vecs,
                source,
            });
        }
    }
    Ok(EigenSystem::new(
        ring_model(params, m),
        Method::ClosedForm,
        lines,
    ))
}

/// Canonical `u_(k)` profiles for ring mode `l`: all ones for `l = 0`,
/// alternating signs for `l = m/2`, otherwise the cosine and sine profiles
/// over `s = 1..=m` (ending in exactly 1 and 0).
pub(crate) fn ring_profiles(l: usize, m: usize) -> Vec<Vec<f64>> {
    if l == 0 {
        return vec![vec![1.0; m]];
    }
    if 2 * l == m {
        return vec![(0..m)
            .map(|s| if s % 2 == 0 { 1.0 } else { -1.0 })
            .collect()];
    }
    let arg = |s: usize| 2.0 * PI * (l * s) as f64 / m as f64;
    let mut cos: Vec<f64> = (1..=m).map(|s| arg(s).cos()).collect();
    let mut sin: Vec<f64> = (1..=m).map(|s| arg(s).sin()).collect();
    cos[m - 1] = 1.0;
    sin[m - 1] = 0.0;
    vec![cos, sin]
}

/// Sine profile `(sin(pi j s / n))_{s=1..n-1}` of a chain bulk mode.
pub(crate) fn chain_profile(j: usize, n: usize) -> Vec<f64> {
    (1..n)
        .map(|s| (PI * (j * s) as f64 / n as f64).sin())
        .collect()
}

/// Eigensystem of the k-periodic chain with `k n - 1` sites.
///
/// Bulk: for `j = 1..n-1` the `k` eigenvalues of `H_k(e^{i pi j/n})`, with
/// `u_(k)` the sine profile. Boundary: the `k - 1` eigenvalues of
/// `H_{1,k-1}`, with `u_(k) = 0` and `u_(1)` spanning the kernel of the
/// two-term recurrence `a u_s - b u_{s+1} = 0`.
pub fn periodic_chain(
    params: &PeriodicParameters,
    n: usize,
    vectors: Vectors,
) -> Result<EigenSystem> {
    if n < 2 {
        return Err(Error::InvalidModel(format!(
            "a closed-form periodic chain needs n >= 2 cells, got {n}"
        )));
    }
    let chain = ChainModel::with_cells(params.clone(), n)?;
    let k = params.k();
    let sites = chain.sites;
    check_sites(sites, vectors)?;
    let op = chain.operator();

    let mut bulk = Vec::with_capacity(n - 1);
    for j in 1..n {
        let theta = PI * j as f64 / n as f64;
        bulk.push((
            j,
            theta,
            hermitian_eig(&build_hk(params, phase(theta)), HERMITIAN_TOL)?,
        ));
    }
    let boundary = if k >= 2 {
        Some(hermitian_eig(
            &build_block(params, 1, k - 1).to_dense(),
            HERMITIAN_TOL,
        )?)
    } else {
        None
    };

    if let Some(bd) = &boundary {
        let tol = tol_cluster(op.frobenius_norm());
        for &b in &bd.values {
            for (j, _, block) in &bulk {
                if let Some(&hit) = block.values.iter().find(|&&v| (v - b).abs() <= tol) {
                    return Err(Error::DegenerateParameters(format!(
                        "bulk root {hit} (j = {j}) collides with boundary eigenvalue {b} of H_{{1,k-1}}"
                    )));
                }
            }
        }
    }

    let mut lines = Vec::with_capacity(sites);
    for (j, theta, block) in &bulk {
        for (band, &lambda) in block.values.iter().enumerate() {
            let (vecs, source) = match vectors {
                Vectors::Skip => (Vec::new(), VectorSource::ClosedForm),
                Vectors::Canonical => {
                    let uk = chain_profile(*j, n);
                    match component_map(params, lambda).map(|map| chain_vector(&map, &uk, k, n)) {
                        Some(v) if all_accepted(&op, lambda, std::slice::from_ref(&v)) => {
                            (vec![v], VectorSource::ClosedForm)
                        }
                        _ => (
                            bloch_vectors(&block.vectors[band], *theta, sites, BlochForm::Sine),
                            VectorSource::Fallback,
                        ),
                    }
                }
            };
            lines.push(SpectralLine {
                value: lambda,
                multiplicity: 1,
                mode: Some(ModeLabel::chain(*j, band)),
                origin: Some(Origin::Bulk),
                angle: Some(*theta),
                vectors: vecs,
                source,
            });
        }
    }
    if let Some(bd) = boundary {
        for (idx, &lambda) in bd.values.iter().enumerate() {
            let (vecs, source) = match vectors {
                Vectors::Skip => (Vec::new(), VectorSource::ClosedForm),
                Vectors::Canonical => {
                    let (v, source) = boundary_vector(params, n, lambda, &op)?;
                    (vec![v], source)
                }
            };
            lines.push(SpectralLine {
                value: lambda,
                multiplicity: 1,
                mode: Some(ModeLabel::boundary(idx)),
                origin: Some(Origin::Boundary),
                angle: None,
                vectors: vecs,
                source,
            });
        }
    }
    Ok(EigenSystem::new(
        chain_model(params, sites),
        Method::ClosedForm,
        lines,
    ))
}

/// Unit-leading kernel vector of the `(n-1) x n` two-term recurrence
/// `a u_s - b u_{s+1} = 0`, i.e. the geometric sequence with ratio `a / b`.
/// The sequence is generated from whichever end keeps it bounded, then
/// rescaled so the first coordinate is 1 unless that would overflow (in
/// which case the largest coordinate is 1).
pub(crate) fn boundary_kernel(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut u = vec![0.0; n];
    if b.abs() >= a.abs() {
        let ratio = a / b;
        u[0] = 1.0;
        for s in 1..n {
            u[s] = u[s - 1] * ratio;
        }
        return u;
    }
    let ratio = b / a;
    u[n - 1] = 1.0;
    for s in (0..n - 1).rev() {
        u[s] = u[s + 1] * ratio;
    }
    let lead = u[0];
    if lead.abs() > f64::MIN_POSITIVE && (1.0 / lead).is_finite() {
        let inv = 1.0 / lead;
        u.iter_mut().for_each(|x| *x *= inv);
        u[0] = 1.0;
    }
    u
}

/// Boundary eigenvector at an eigenvalue of `H_{1,k-1}`.
fn boundary_vector(
    params: &PeriodicParameters,
    n: usize,
    lambda: f64,
    op: &ModelOperator,
) -> Result<(Vec<f64>, VectorSource)> {
    let k = params.k();
    let sites = k * n - 1;
    let a = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 } * params.coupling_product(1, k - 1);
    let inner_block = build_block(params, 2, k - 1);
    let inner = tridiag_char(&inner_block, lambda);
    let b = inner * params.coupling()[k - 1];

    let u1 = boundary_kernel(a, b, n);

    if inner.abs() > degeneracy_guard(&inner_block, lambda) {
        let mut comps = Vec::with_capacity(k);
        comps.push(u1.clone());
        for j in 2..k {
            let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let gamma =
                sign * params.coupling_product(1, j - 1) * block_char(params, j + 1, k - 1, lambda)
                    / inner;
            comps.push(u1.iter().map(|x| gamma * x).collect());
        }
        comps.push(vec![0.0; component_len(sites, k, k)]);
        let v = assemble_from_components(&comps, k, sites)?;
        if all_accepted(op, lambda, std::slice::from_ref(&v)) {
            return Ok((v, VectorSource::ClosedForm));
        }
    }
    Ok((nearest_oracle_vector(op, lambda)?, VectorSource::Fallback))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{homogeneous_chain, homogeneous_ring, normalized};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn period_one_ring_matches_homogeneous() {
        let p = PeriodicParameters::homogeneous(0.3, -1.2).unwrap();
        let a = periodic_ring(&p, 7, Vectors::Skip).unwrap().values();
        let b = homogeneous_ring(0.3, -1.2, 7, Vectors::Skip)
            .unwrap()
            .values();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn period_one_chain_matches_homogeneous() {
        let p = PeriodicParameters::homogeneous(-0.4, 0.8).unwrap();
        let eig = periodic_chain(&p, 6, Vectors::Canonical).unwrap();
        assert_eq!(eig.sites(), 5);
        assert!(eig.lines.iter().all(|l| l.origin == Some(Origin::Bulk)));
        let b = homogeneous_chain(-0.4, 0.8, 5, Vectors::Skip)
            .unwrap()
            .values();
        for (x, y) in eig.values().iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(eig.max_relative_residual() < 1e-14);
    }

    #[test]
    fn ring_multiplicity_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = PeriodicParameters::random(&mut rng, 3);
        let eig = periodic_ring(&p, 4, Vectors::Canonical).unwrap();
        assert_eq!(eig.total_multiplicity(), 12);
        for line in &eig.lines {
            let l = line.mode.unwrap().index;
            let expected = if l == 0 || l == 2 { 1 } else { 2 };
            assert_eq!(line.multiplicity, expected);
            assert_eq!(line.vectors.len(), expected);
        }
        assert_eq!(
            eig.lines
                .iter()
                .filter(|l| l.mode.unwrap().index == 1)
                .count(),
            3
        );
        assert!(eig.max_relative_residual() < 1e-12);
    }

    #[test]
    fn chain_counts_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = PeriodicParameters::random(&mut rng, 3);
        let eig = periodic_chain(&p, 3, Vectors::Canonical).unwrap();
        assert_eq!(eig.sites(), 8);
        let bulk = eig
            .lines
            .iter()
            .filter(|l| l.origin == Some(Origin::Bulk))
            .count();
        let boundary = eig
            .lines
            .iter()
            .filter(|l| l.origin == Some(Origin::Boundary))
            .count();
        assert_eq!((bulk, boundary), (6, 2));
        assert!(eig.max_relative_residual() < 1e-12);
        assert!(eig
            .lines
            .iter()
            .all(|l| l.source == VectorSource::ClosedForm));
    }

    #[test]
    fn boundary_component_k_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = PeriodicParameters::random(&mut rng, 4);
        let eig = periodic_chain(&p, 4, Vectors::Canonical).unwrap();
        for line in eig
            .lines
            .iter()
            .filter(|l| l.origin == Some(Origin::Boundary))
        {
            let v = &line.vectors[0];
            assert_eq!(v[0], 1.0);
            for c in 0..3 {
                assert_eq!(v[c * 4 + 3], 0.0);
            }
        }
    }

    #[test]
    fn bloch_fallback_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = PeriodicParameters::random(&mut rng, 3);
        let m = 5;
        for l in 1..=2 {
            let theta = 2.0 * PI * l as f64 / m as f64;
            let block = hermitian_eig(&build_hk(&p, ring_phase(l, m)), 1e-12).unwrap();
            for (b, &lambda) in block.values.iter().enumerate() {
                let map = component_map(&p, lambda).unwrap();
                let closed: Vec<Vec<f64>> = ring_profiles(l, m)
                    .iter()
                    .map(|uk| ring_vector(&map, uk, 3, m))
                    .collect();
                let bloch = bloch_vectors(&block.vectors[b], theta, 3 * m, BlochForm::Pair);
                for (x, y) in closed.iter().zip(&bloch) {
                    for (a, c) in x.iter().zip(y) {
                        assert!((a - c).abs() < 1e-10, "{a} vs {c}");
                    }
                }
            }
        }
    }

    /// Combining the cosine and sine vectors into `cos + i sin` gives a
    /// Bloch vector: every residue component is `q_l`-geometric.
    #[test]
    fn ring_vectors_are_bloch_waves() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let p = PeriodicParameters::random(&mut rng, 3);
        let m = 6;
        let eig = periodic_ring(&p, m, Vectors::Canonical).unwrap();
        for line in eig.lines.iter().filter(|l| l.multiplicity == 2) {
            let q = ring_phase(line.mode.unwrap().index, m);
            let z: Vec<Complex64> = line.vectors[0]
                .iter()
                .zip(&line.vectors[1])
                .map(|(&c, &s)| Complex64::new(c, s))
                .collect();
            for t in 0..3 {
                for c in 0..m - 1 {
                    let diff = z[(c + 1) * 3 + t] - q * z[c * 3 + t];
                    assert!(diff.norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_alternating_ring_uses_fallback() {
        // w1 = w2 = 0, D1 = D2: at l = m/2 the closed form divides by zero.
        let p = PeriodicParameters::alternating(0.0, 0.0, 1.0, 1.0).unwrap();
        let eig = periodic_ring(&p, 2, Vectors::Canonical).unwrap();
        let v = eig.values();
        let expected = [-2.0, 0.0, 0.0, 2.0];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(eig.max_relative_residual() < 1e-14);
        assert!(eig.lines.iter().any(|l| l.source == VectorSource::Fallback));
    }

    #[test]
    fn kernel_of_two_term_recurrence() {
        assert_eq!(boundary_kernel(1.0, 2.0, 3), vec![1.0, 0.5, 0.25]);
        assert_eq!(boundary_kernel(-1.0, 2.0, 3), vec![1.0, -0.5, 0.25]);
        assert_eq!(boundary_kernel(2.0, 0.0, 3), vec![0.0, 0.0, 1.0]);
        let u = boundary_kernel(3.0, 1.0, 4);
        assert_eq!(u[0], 1.0);
        assert!((u[3] - 27.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_matches_singular_direction() {
        use crate::linalg::smallest_singular_direction;
        for (a, b, n) in [(1.0, 2.0, 6), (-0.7, 0.4, 5), (1.3, -1.3, 7)] {
            let mut m = vec![0.0; (n - 1) * n];
            for s in 0..n - 1 {
                m[s * n + s] = a;
                m[s * n + s + 1] = -b;
            }
            let (dir, sigma) = smallest_singular_direction(n - 1, n, &m).unwrap();
            assert!(sigma < 1e-12);
            let u = normalized(&boundary_kernel(a, b, n));
            let dot: f64 = u.iter().zip(&dir).map(|(x, y)| x * y).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn band_equation_holds_at_block_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for k in 1..=5 {
            let p = PeriodicParameters::random(&mut rng, k);
            let theta = 0.83;
            let block = hermitian_eig(&build_hk(&p, phase(theta)), 1e-12).unwrap();
            for &lambda in &block.values {
                let (res, scale) = band_equation_residual(&p, lambda, theta);
                assert!(res <= 1e-12 * scale, "k = {k}: {res} vs {scale}");
            }
        }
    }
}
