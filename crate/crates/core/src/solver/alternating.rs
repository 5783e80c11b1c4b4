//! Alternating (period-two) chains and rings.
//!
//! With `c(theta) = D1^2 + D2^2 + 2 D1 D2 cos(theta)` the band energies are
//! `lambda = (w1 + w2) +- sqrt((w1 - w2)^2 + c(theta))`. The even-site
//! profile `u_(2)` is a sine (chain) or cosine/sine (ring) wave and the odd
//! sites follow from `u_(1) = L^t u_(2) / (lambda - 2 w1)`.

use std::f64::consts::PI;

use super::oracle::tol_cluster;
use super::periodic::{bloch_vectors, boundary_kernel, chain_profile, ring_profiles, BlochForm};
use super::{
    chain_model, check_sites, relative_residual, ring_model, EigenSystem, Method, ModeLabel,
    Origin, SpectralLine, VectorSource, Vectors, VECTOR_ACCEPT_TOL,
};
use crate::error::Result;
use crate::linalg::{degeneracy_guard, hermitian_eig, SymTridiag};
use crate::model::{
    assemble_from_components, build_hk, l_chain, l_ring, phase, ring_phase, ChainModel,
    ModelOperator, PeriodicParameters, RectMatrix, RingModel,
};

const HERMITIAN_TOL: f64 = 1e-12;

/// The two band energies `(lambda_-, lambda_+)` at `cos(theta)`.
fn band_pair(w1: f64, w2: f64, d1: f64, d2: f64, theta: f64) -> (f64, f64) {
    let c = d1 * d1 + d2 * d2 + 2.0 * d1 * d2 * theta.cos();
    let root = ((w1 - w2).powi(2) + c.max(0.0)).sqrt();
    (w1 + w2 - root, w1 + w2 + root)
}

/// Odd/even interleaving from `u_(2)` through `L^t`, or `None` when
/// `lambda` sits on `2 w1` or the result fails the residual check.
fn closed_vector(
    l: &RectMatrix,
    w1: f64,
    lambda: f64,
    even: &[f64],
    sites: usize,
    op: &ModelOperator,
) -> Option<Vec<f64>> {
    let head = SymTridiag::new(vec![2.0 * w1], vec![]).expect("1x1 block");
    let shift = lambda - 2.0 * w1;
    if !(shift.abs() > degeneracy_guard(&head, lambda)) {
        return None;
    }
    let odd: Vec<f64> = l.apply_transpose(even).iter().map(|x| x / shift).collect();
    let v = assemble_from_components(&[odd, even.to_vec()], 2, sites).ok()?;
    let scale = op.frobenius_norm();
    (relative_residual(op, lambda, &v, scale) <= VECTOR_ACCEPT_TOL).then_some(v)
}

/// Alternating open chain with `2n - 1` sites: `2(n - 1)` band states for
/// `theta = pi j / n`, `j = 1..n-1`, and one boundary state at `2 w1`
/// supported on odd sites, `u_(1) = (1, -D1/D2, (D1/D2)^2, ...)`.
pub fn alternating_chain(
    omega1: f64,
    omega2: f64,
    d1: f64,
    d2: f64,
    n: usize,
    vectors: Vectors,
) -> Result<EigenSystem> {
    let params = PeriodicParameters::alternating(omega1, omega2, d1, d2)?;
    if n < 2 {
        return Err(crate::Error::InvalidModel(format!(
            "N must be 2n-1 with n >= 2 for a closed-form alternating chain (got n = {n})"
        )));
    }
    let chain = ChainModel::with_cells(params.clone(), n)?;
    let sites = chain.sites;
    check_sites(sites, vectors)?;
    let op = chain.operator();
    let l = match vectors {
        Vectors::Canonical => Some(l_chain(d1, d2, n)),
        Vectors::Skip => None,
    };

    let mut lines = Vec::with_capacity(sites);
    for j in 1..n {
        let theta = PI * j as f64 / n as f64;
        let (lo, hi) = band_pair(omega1, omega2, d1, d2, theta);
        for (band, lambda) in [(0, lo), (1, hi)] {
            let (vecs, source) = match &l {
                None => (Vec::new(), VectorSource::ClosedForm),
                Some(l) => {
                    let even = chain_profile(j, n);
                    match closed_vector(l, omega1, lambda, &even, sites, &op) {
                        Some(v) => (vec![v], VectorSource::ClosedForm),
                        None => {
                            let block =
                                hermitian_eig(&build_hk(&params, phase(theta)), HERMITIAN_TOL)?;
                            (
                                bloch_vectors(&block.vectors[band], theta, sites, BlochForm::Sine),
                                VectorSource::Fallback,
                            )
                        }
                    }
                }
            };
            lines.push(SpectralLine {
                value: lambda,
                multiplicity: 1,
                mode: Some(ModeLabel::chain(j, band)),
                origin: Some(Origin::Bulk),
                angle: Some(theta),
                vectors: vecs,
                source,
            });
        }
    }

    let boundary = 2.0 * omega1;
    let vecs = match vectors {
        Vectors::Skip => Vec::new(),
        Vectors::Canonical => {
            let odd = boundary_kernel(-d1, d2, n);
            vec![assemble_from_components(
                &[odd, vec![0.0; n - 1]],
                2,
                sites,
            )?]
        }
    };
    lines.push(SpectralLine {
        value: boundary,
        multiplicity: 1,
        mode: Some(ModeLabel::boundary(0)),
        origin: Some(Origin::Boundary),
        angle: None,
        vectors: vecs,
        source: VectorSource::ClosedForm,
    });
    debug_assert!(lines
        .iter()
        .filter(|l| l.origin == Some(Origin::Bulk))
        .all(|l| (l.value - boundary).abs() > tol_cluster(op.frobenius_norm())));
    Ok(EigenSystem::new(
        chain_model(&params, sites),
        Method::ClosedForm,
        lines,
    ))
}

/// Alternating ring with `2n` sites: for `theta = 2 pi j / n`,
/// `j = 0..=n/2`, two band energies; interior `j` give doublets.
///
/// When `D1 = D2` (or `D1 = -D2`) and `w1 = w2`, the energy `2 w1` occurs at
/// `j = n/2` (`j = 0`) and the `L^t` route is singular; those vectors are
/// taken from the eigenvectors of the 2x2 Bloch block instead.
pub fn alternating_ring(
    omega1: f64,
    omega2: f64,
    d1: f64,
    d2: f64,
    n: usize,
    vectors: Vectors,
) -> Result<EigenSystem> {
    let params = PeriodicParameters::alternating(omega1, omega2, d1, d2)?;
    let ring = RingModel::new(params.clone(), n)?;
    let sites = ring.sites();
    check_sites(sites, vectors)?;
    let op = ring.operator();
    let l = match vectors {
        Vectors::Canonical => Some(l_ring(d1, d2, n)),
        Vectors::Skip => None,
    };

    let mut lines = Vec::with_capacity(2 * (n / 2 + 1));
    for j in 0..=n / 2 {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let singlet = j == 0 || 2 * j == n;
        let (lo, hi) = band_pair(omega1, omega2, d1, d2, theta);
        for (band, lambda) in [(0, lo), (1, hi)] {
            let (vecs, source) = match &l {
                None => (Vec::new(), VectorSource::ClosedForm),
                Some(l) => {
                    let closed: Option<Vec<Vec<f64>>> = ring_profiles(j, n)
                        .iter()
                        .map(|even| closed_vector(l, omega1, lambda, even, sites, &op))
                        .collect();
                    match closed {
                        Some(v) => (v, VectorSource::ClosedForm),
                        None => {
                            let block =
                                hermitian_eig(&build_hk(&params, ring_phase(j, n)), HERMITIAN_TOL)?;
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
                mode: Some(ModeLabel::ring(j, band)),
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
        ring_model(&params, n),
        Method::ClosedForm,
        lines,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;
    use crate::solver::{oracle_eigensystem, periodic_chain, periodic_ring};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn three_site_chain() {
        // 2n - 1 = 3 sites, w = 0, D1 = D2 = 1: eigenvalues -sqrt2, 0, sqrt2.
        let eig = alternating_chain(0.0, 0.0, 1.0, 1.0, 2, Vectors::Canonical).unwrap();
        let r2 = 2f64.sqrt();
        assert!(close(&eig.values(), &[-r2, 0.0, r2], 1e-15));
        assert!(eig.max_relative_residual() < 1e-15);
    }

    #[test]
    fn boundary_state_lives_on_odd_sites() {
        let eig = alternating_chain(0.4, -0.1, 0.5, 1.5, 4, Vectors::Canonical).unwrap();
        let line = eig
            .lines
            .iter()
            .find(|l| l.origin == Some(Origin::Boundary))
            .unwrap();
        assert_eq!(line.value, 0.8);
        let v = &line.vectors[0];
        let r = -0.5 / 1.5;
        let expected = [1.0, 0.0, r, 0.0, r * r, 0.0, r * r * r];
        assert!(close(v, &expected, 1e-15));
        assert!(eig.max_relative_residual() < 1e-14);
    }

    #[test]
    fn chain_matches_oracle_and_general_route() {
        let (w1, w2, d1, d2) = (0.3, -0.6, 1.1, -0.7);
        let n = 6;
        let eig = alternating_chain(w1, w2, d1, d2, n, Vectors::Canonical).unwrap();
        let params = PeriodicParameters::alternating(w1, w2, d1, d2).unwrap();
        let model = Model::Chain(ChainModel::with_cells(params.clone(), n).unwrap());
        let oracle = oracle_eigensystem(&model).unwrap();
        assert!(close(&eig.values(), &oracle.values(), 1e-12));
        let general = periodic_chain(&params, n, Vectors::Canonical).unwrap();
        assert!(close(&eig.values(), &general.values(), 1e-12));
        for (a, b) in eig.lines.iter().zip(&general.lines) {
            assert!(close(&a.vectors[0], &b.vectors[0], 1e-12));
        }
    }

    #[test]
    fn ring_matches_general_route() {
        let (w1, w2, d1, d2) = (-0.2, 0.5, 0.9, 1.3);
        let n = 5;
        let eig = alternating_ring(w1, w2, d1, d2, n, Vectors::Canonical).unwrap();
        let params = PeriodicParameters::alternating(w1, w2, d1, d2).unwrap();
        let general = periodic_ring(&params, n, Vectors::Canonical).unwrap();
        assert_eq!(eig.total_multiplicity(), 10);
        for (a, b) in eig.lines.iter().zip(&general.lines) {
            assert!((a.value - b.value).abs() < 1e-12);
            assert_eq!(a.multiplicity, b.multiplicity);
            for (x, y) in a.vectors.iter().zip(&b.vectors) {
                assert!(close(x, y, 1e-12));
            }
        }
        assert!(eig.max_relative_residual() < 1e-14);
    }

    #[test]
    fn degenerate_ring_falls_back() {
        let eig = alternating_ring(0.0, 0.0, 1.0, 1.0, 4, Vectors::Canonical).unwrap();
        assert!(eig.has_vectors());
        assert!(eig.max_relative_residual() < 1e-14);
        let zero: Vec<_> = eig.lines.iter().filter(|l| l.value.abs() < 1e-15).collect();
        assert!(zero.iter().any(|l| l.source == VectorSource::Fallback));
        let total: usize = zero.iter().map(|l| l.multiplicity).sum();
        assert_eq!(total, 2);
    }
}
