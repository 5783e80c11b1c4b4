//! One-magnon time evolution from spectral data.
//!
//! `G_pq(t) = sum_lambda phi_lambda(p) phi_lambda(q) e^{-i lambda t}` over an
//! orthonormal eigenbasis. Comparing the amplitude `G_pp` on a chain of
//! `k m - 1` sites with the same site on the ring of `2 k m` sites isolates
//! the effect of the chain ends: the two agree until a wave packet started
//! at `p` reflects from a boundary and returns.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChainModel, Model, PeriodicParameters, RingModel};
use crate::solver::{closed_form, tol_cluster, EigenSystem, Vectors};

/// Largest tolerated deviation of the eigenbasis Gram matrix from identity.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;
/// Default number of time steps (the grid has `steps + 1` points).
pub const DEFAULT_STEPS: usize = 512;

/// Real orthonormal eigenbasis: `vectors[i]` belongs to `values[i]`.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl OrthonormalBasis {
    /// Normalises the eigenvectors of `eig` and orthogonalises (modified
    /// Gram-Schmidt) within each group of numerically equal eigenvalues,
    /// then checks the full Gram matrix.
    pub fn from_eigensystem(eig: &EigenSystem) -> Result<Self> {
        if !eig.has_vectors() {
            return Err(Error::ShapeMismatch(
                "eigensystem carries no eigenvectors".into(),
            ));
        }
        let tol = tol_cluster(eig.operator().frobenius_norm());
        let mut values = Vec::with_capacity(eig.sites());
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(eig.sites());
        let mut group_start = 0;
        for line in &eig.lines {
            if values
                .last()
                .is_none_or(|&last: &f64| (line.value - last).abs() > tol)
            {
                group_start = vectors.len();
            }
            for v in &line.vectors {
                let mut w = v.clone();
                for _ in 0..2 {
                    for prev in &vectors[group_start..] {
                        let c = dot(prev, &w);
                        w.iter_mut().zip(prev).for_each(|(x, p)| *x -= c * p);
                    }
                }
                let norm = dot(&w, &w).sqrt();
                if !(norm > 0.0) {
                    return Err(Error::NonOrthogonalBasis {
                        deviation: f64::INFINITY,
                    });
                }
                w.iter_mut().for_each(|x| *x /= norm);
                values.push(line.value);
                vectors.push(w);
            }
        }
        if vectors.len() != eig.sites() {
            return Err(Error::ShapeMismatch(format!(
                "{} eigenvectors for {} sites",
                vectors.len(),
                eig.sites()
            )));
        }
        let basis = Self { values, vectors };
        let deviation = basis.gram_deviation();
        if deviation > ORTHONORMALITY_TOL {
            return Err(Error::NonOrthogonalBasis { deviation });
        }
        Ok(basis)
    }

    pub fn sites(&self) -> usize {
        self.vectors.len()
    }

    /// `max |<v_i, v_j> - delta_ij|`.
    pub fn gram_deviation(&self) -> f64 {
        let n = self.vectors.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(&self.vectors[i], &self.vectors[j]) - target).abs());
            }
        }
        worst
    }

    /// Amplitude `G_pq(t)` (0-based sites).
    pub fn amplitude(&self, p: usize, q: usize, t: f64) -> Complex64 {
        self.values
            .iter()
            .zip(&self.vectors)
            .map(|(&lambda, v)| Complex64::from_polar(v[p] * v[q], -lambda * t))
            .sum()
    }

    /// Row `(G_pq(t))_q` of the propagator.
    pub fn row(&self, p: usize, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.sites()];
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = Complex64::from_polar(v[p], -lambda * t);
            out.iter_mut().zip(v).for_each(|(o, &x)| *o += w * x);
        }
        out
    }

    /// `|sum_q |G_pq(t)|^2 - 1|`.
    pub fn unitarity_error(&self, p: usize, t: f64) -> f64 {
        (self.row(p, t).iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Uniform grid of `steps + 1` times on `[0, t_max]`.
pub fn time_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps)
        .map(|i| t_max * i as f64 / steps as f64)
        .collect()
}

/// `G_pq` on the given times, from the eigensystem's orthonormalised basis.
pub fn propagator(eig: &EigenSystem, p: usize, q: usize, times: &[f64]) -> Result<Vec<Complex64>> {
    let basis = OrthonormalBasis::from_eigensystem(eig)?;
    check_site(p, basis.sites())?;
    check_site(q, basis.sites())?;
    Ok(times.iter().map(|&t| basis.amplitude(p, q, t)).collect())
}

fn check_site(p: usize, sites: usize) -> Result<()> {
    if p >= sites {
        return Err(Error::InvalidParameters(format!(
            "site {} outside 1..={sites}",
            p + 1
        )));
    }
    Ok(())
}

/// Second track of a divergence run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Partner {
    /// The ring of `2 k m` sites.
    Ring,
    /// The chain itself (control run; never diverges).
    Chain,
}

/// Return amplitudes `G_pp(t)` on the chain and its partner.
#[derive(Debug, Clone)]
pub struct PropagatorSeries {
    /// 0-based site.
    pub site: usize,
    pub partner: Partner,
    pub threshold: f64,
    pub times: Vec<f64>,
    pub chain_amp: Vec<Complex64>,
    pub ring_amp: Vec<Complex64>,
    /// First sampled time with `|G_chain - G_ring| > threshold`; infinite if
    /// none.
    pub divergence_time: f64,
    /// Largest `|sum_q |G_pq|^2 - 1|` over both tracks and all times.
    pub max_unitarity_error: f64,
}

impl PropagatorSeries {
    pub fn differences(&self) -> Vec<f64> {
        self.chain_amp
            .iter()
            .zip(&self.ring_amp)
            .map(|(a, b)| (a - b).norm())
            .collect()
    }
}

/// Default observation site: the middle of a chain of `sites` sites,
/// `ceil(sites / 2)` in 1-based numbering, returned 0-based.
pub fn default_site(sites: usize) -> usize {
    sites.div_ceil(2).saturating_sub(1)
}

/// Short-time horizon `0.25 (k m - 1) / (2 max |D|)` within which chain and
/// ring amplitudes agree closely.
pub fn agreement_horizon(params: &PeriodicParameters, m: usize) -> f64 {
    0.25 * (params.k() * m - 1) as f64 / (2.0 * params.max_abs_coupling())
}

/// Divergence run for the chain of `k m - 1` sites against its partner.
/// `site` is 0-based and defaults to [`default_site`].
pub fn boundary_divergence(
    params: &PeriodicParameters,
    m: usize,
    site: Option<usize>,
    threshold: f64,
    t_max: f64,
    steps: usize,
    partner: Partner,
) -> Result<PropagatorSeries> {
    if !(threshold > 0.0) || !t_max.is_finite() || t_max < 0.0 {
        return Err(Error::InvalidParameters(format!(
            "threshold must be positive and t_max finite and non-negative (got {threshold}, {t_max})"
        )));
    }
    let chain_model = Model::Chain(ChainModel::with_cells(params.clone(), m)?);
    let sites = chain_model.sites();
    let p = site.unwrap_or_else(|| default_site(sites));
    check_site(p, sites)?;
    let chain =
        OrthonormalBasis::from_eigensystem(&closed_form(&chain_model, Vectors::Canonical)?)?;
    let other = match partner {
        Partner::Chain => chain.clone(),
        Partner::Ring => OrthonormalBasis::from_eigensystem(&closed_form(
            &Model::Ring(RingModel::new(params.clone(), 2 * m)?),
            Vectors::Canonical,
        )?)?,
    };
    let times = time_grid(t_max, steps);
    let mut chain_amp = Vec::with_capacity(times.len());
    let mut ring_amp = Vec::with_capacity(times.len());
    let mut divergence_time = f64::INFINITY;
    let mut max_unitarity_error = 0.0_f64;
    for &t in &times {
        let a = chain.amplitude(p, p, t);
        let b = other.amplitude(p, p, t);
        if divergence_time.is_infinite() && (a - b).norm() > threshold {
            divergence_time = t;
        }
        max_unitarity_error = max_unitarity_error
            .max(chain.unitarity_error(p, t))
            .max(other.unitarity_error(p, t));
        chain_amp.push(a);
        ring_amp.push(b);
    }
    Ok(PropagatorSeries {
        site: p,
        partner,
        threshold,
        times,
        chain_amp,
        ring_amp,
        divergence_time,
        max_unitarity_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::oracle_eigensystem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_at_time_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = PeriodicParameters::random(&mut rng, 3);
        let eig = closed_form(
            &Model::Ring(RingModel::new(p, 4).unwrap()),
            Vectors::Canonical,
        )
        .unwrap();
        let basis = OrthonormalBasis::from_eigensystem(&eig).unwrap();
        for a in 0..12 {
            for b in 0..12 {
                let g = basis.amplitude(a, b, 0.0);
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((g - target).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_site_phase() {
        let p = PeriodicParameters::homogeneous(0.7, 1.0).unwrap();
        let eig = closed_form(
            &Model::Chain(ChainModel::new(p, 1).unwrap()),
            Vectors::Canonical,
        )
        .unwrap();
        let g = propagator(&eig, 0, 0, &[0.0, 0.5, 3.0]).unwrap();
        for (z, t) in g.iter().zip([0.0, 0.5, 3.0]) {
            assert!((z - Complex64::from_polar(1.0, -1.4 * t)).norm() < 1e-15);
        }
    }

    #[test]
    fn homogeneous_ring_is_translation_invariant() {
        let p = PeriodicParameters::homogeneous(0.2, -0.9).unwrap();
        let eig = closed_form(
            &Model::Ring(RingModel::new(p, 7).unwrap()),
            Vectors::Canonical,
        )
        .unwrap();
        let basis = OrthonormalBasis::from_eigensystem(&eig).unwrap();
        for t in [0.3, 1.7, 4.0] {
            for d in 0..7 {
                let reference = basis.amplitude(0, d, t).norm();
                for p in 1..7 {
                    let g = basis.amplitude(p, (p + d) % 7, t).norm();
                    assert!((g - reference).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_oracle_propagator() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = PeriodicParameters::random(&mut rng, 2);
        let model = Model::Ring(RingModel::new(p, 6).unwrap());
        let closed = closed_form(&model, Vectors::Canonical).unwrap();
        let oracle = oracle_eigensystem(&model).unwrap();
        let times = time_grid(5.0, 20);
        for (a, b) in [(0, 0), (2, 5), (7, 3)] {
            let x = propagator(&closed, a, b, &times).unwrap();
            let y = propagator(&oracle, a, b, &times).unwrap();
            for (u, v) in x.iter().zip(&y) {
                assert!((u - v).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn unreachable_threshold_never_diverges() {
        let p = PeriodicParameters::alternating(0.1, -0.2, 1.0, 0.7).unwrap();
        let s = boundary_divergence(&p, 6, None, 2.1, 50.0, 64, Partner::Ring).unwrap();
        assert!(s.divergence_time.is_infinite());
        assert_eq!(s.times.len(), 65);
    }

    #[test]
    fn control_run_never_diverges() {
        let p = PeriodicParameters::alternating(0.1, -0.2, 1.0, 0.7).unwrap();
        let s = boundary_divergence(&p, 6, None, 1e-12, 50.0, 64, Partner::Chain).unwrap();
        assert!(s.divergence_time.is_infinite());
    }

    #[test]
    fn divergence_respects_propagation_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = PeriodicParameters::random(&mut rng, 2);
        let m = 16;
        let sites = 2 * m - 1;
        let t_max = 4.0 * sites as f64 / p.max_abs_coupling();
        let s = boundary_divergence(&p, m, None, 1e-3, t_max, 2048, Partner::Ring).unwrap();
        assert!(s.divergence_time.is_finite());
        let distance = (s.site).min(sites - 1 - s.site) as f64;
        assert!(s.divergence_time >= 0.5 * distance / (2.0 * p.max_abs_coupling()));
        assert!(s.max_unitarity_error < 1e-9);
    }

    #[test]
    fn default_site_is_middle() {
        assert_eq!(default_site(15), 7);
        assert_eq!(default_site(1), 0);
        assert_eq!(default_site(4), 1);
    }
}
