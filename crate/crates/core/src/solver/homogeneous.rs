use std::f64::consts::PI;

use super::{
    chain_model, check_sites, ring_model, EigenSystem, Method, ModeLabel, Origin, SpectralLine,
    VectorSource, Vectors,
};
use crate::error::{Error, Result};
use crate::model::PeriodicParameters;

/// Homogeneous open chain of `sites` spins: `lambda_j = 2w + 2D cos(pi j/(N+1))`
/// with sine eigenvectors `(sin(pi j s/(N+1)))_s`, `j = 1..=N`.
pub fn homogeneous_chain(
    omega: f64,
    coupling: f64,
    sites: usize,
    vectors: Vectors,
) -> Result<EigenSystem> {
    let params = PeriodicParameters::homogeneous(omega, coupling)?;
    if sites == 0 {
        return Err(Error::InvalidModel(
            "a chain needs at least one site".into(),
        ));
    }
    check_sites(sites, vectors)?;
    let denom = (sites + 1) as f64;
    let lines = (1..=sites)
        .map(|j| {
            let angle = PI * j as f64 / denom;
            let vecs = match vectors {
                Vectors::Canonical => vec![(1..=sites)
                    .map(|s| (PI * (j * s) as f64 / denom).sin())
                    .collect()],
                Vectors::Skip => Vec::new(),
            };
            SpectralLine {
                value: 2.0 * omega + 2.0 * coupling * angle.cos(),
                multiplicity: 1,
                mode: Some(ModeLabel::chain(j, 0)),
                origin: Some(Origin::Bulk),
                angle: Some(angle),
                vectors: vecs,
                source: VectorSource::ClosedForm,
            }
        })
        .collect();
    Ok(EigenSystem::new(
        chain_model(&params, sites),
        Method::ClosedForm,
        lines,
    ))
}

/// Homogeneous ring of `sites` spins: `lambda_j = 2w + 2D cos(2 pi j/N)`,
/// `0 <= j <= N/2`. Interior modes are doublets with cosine and sine vectors;
/// `j = 0` (all ones) and `j = N/2` (alternating signs) are singlets.
pub fn homogeneous_ring(
    omega: f64,
    coupling: f64,
    sites: usize,
    vectors: Vectors,
) -> Result<EigenSystem> {
    let params = PeriodicParameters::homogeneous(omega, coupling)?;
    if sites < 2 {
        return Err(Error::InvalidModel(format!(
            "a ring needs at least two sites, got {sites}"
        )));
    }
    check_sites(sites, vectors)?;
    let n = sites as f64;
    let lines = (0..=sites / 2)
        .map(|j| {
            let angle = 2.0 * PI * j as f64 / n;
            let value = 2.0 * omega + 2.0 * coupling * angle.cos();
            let singlet = j == 0 || 2 * j == sites;
            let vecs = match (vectors, singlet) {
                (Vectors::Skip, _) => Vec::new(),
                (Vectors::Canonical, true) if j == 0 => vec![vec![1.0; sites]],
                (Vectors::Canonical, true) => vec![(0..sites)
                    .map(|s| if s % 2 == 0 { 1.0 } else { -1.0 })
                    .collect()],
                (Vectors::Canonical, false) => {
                    let arg = |s: usize| 2.0 * PI * (j * s) as f64 / n;
                    let mut cos: Vec<f64> = (1..=sites).map(|s| arg(s).cos()).collect();
                    let mut sin: Vec<f64> = (1..=sites).map(|s| arg(s).sin()).collect();
                    // Exact values at s = N, where the argument is 2 pi j.
                    cos[sites - 1] = 1.0;
                    sin[sites - 1] = 0.0;
                    vec![cos, sin]
                }
            };
            SpectralLine {
                value,
                multiplicity: if singlet { 1 } else { 2 },
                mode: Some(ModeLabel::ring(j, 0)),
                origin: Some(if singlet {
                    Origin::Symmetric
                } else {
                    Origin::Bulk
                }),
                angle: Some(angle),
                vectors: vecs,
                source: VectorSource::ClosedForm,
            }
        })
        .collect();
    Ok(EigenSystem::new(
        ring_model(&params, sites),
        Method::ClosedForm,
        lines,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_site_chain() {
        let eig = homogeneous_chain(0.0, 1.0, 3, Vectors::Canonical).unwrap();
        let v = eig.values();
        let r2 = 2f64.sqrt();
        assert!((v[0] + r2).abs() < 1e-15);
        assert!(v[1].abs() < 1e-15);
        assert!((v[2] - r2).abs() < 1e-15);
        assert!(eig.max_relative_residual() < 1e-15);
    }

    #[test]
    fn single_site() {
        let eig = homogeneous_chain(5.0, 1.0, 1, Vectors::Canonical).unwrap();
        assert_eq!(eig.values(), vec![10.0]);
    }

    #[test]
    fn canonical_sine_vector() {
        let eig = homogeneous_chain(0.0, 1.0, 3, Vectors::Canonical).unwrap();
        let line = eig
            .lines
            .iter()
            .find(|l| l.mode == Some(ModeLabel::chain(1, 0)))
            .unwrap();
        let expected = [(PI / 4.0).sin(), (PI / 2.0).sin(), (3.0 * PI / 4.0).sin()];
        assert_eq!(line.vectors[0], expected);
    }

    #[test]
    fn four_site_ring() {
        let eig = homogeneous_ring(0.0, 1.0, 4, Vectors::Canonical).unwrap();
        let mults: Vec<(f64, usize)> = eig
            .lines
            .iter()
            .map(|l| (l.value, l.multiplicity))
            .collect();
        assert_eq!(mults.len(), 3);
        assert!((mults[0].0 + 2.0).abs() < 1e-15 && mults[0].1 == 1);
        assert!(mults[1].0.abs() < 1e-15 && mults[1].1 == 2);
        assert!((mults[2].0 - 2.0).abs() < 1e-15 && mults[2].1 == 1);
        assert!(eig.max_relative_residual() < 1e-15);
    }

    #[test]
    fn odd_ring_has_no_half_mode() {
        for n in [3, 5, 7, 9] {
            let eig = homogeneous_ring(0.3, -0.7, n, Vectors::Canonical).unwrap();
            assert_eq!(eig.total_multiplicity(), n);
            assert!(eig.lines.iter().all(|l| 2 * l.mode.unwrap().index != n));
        }
    }

    #[test]
    fn uniform_vector_residual_is_rounding_only() {
        for (w, d) in [(0.3, 1.7), (-2.0, -0.4), (1.1, 0.9)] {
            let eig = homogeneous_ring(w, d, 6, Vectors::Canonical).unwrap();
            let line = eig
                .lines
                .iter()
                .find(|l| l.mode.unwrap().index == 0)
                .unwrap();
            let r = eig.operator().residual(line.value, &line.vectors[0]);
            assert!(r <= 4.0 * f64::EPSILON * (w.abs() + d.abs()) * 6.0);
        }
    }

    #[test]
    fn sine_vector_ends_with_zero() {
        let eig = homogeneous_ring(0.0, 1.0, 8, Vectors::Canonical).unwrap();
        for line in eig.lines.iter().filter(|l| l.multiplicity == 2) {
            assert_eq!(*line.vectors[1].last().unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_coupling_rejected() {
        assert!(homogeneous_chain(0.0, 0.0, 3, Vectors::Skip).is_err());
    }
}
