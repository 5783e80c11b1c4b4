//! Dense reference solver: full Jacobi diagonalisation of the model matrix.

use super::{EigenSystem, Method, SpectralLine, VectorSource};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, tridiag_eigvec_near};
use crate::model::{Model, ModelOperator};

/// Largest model the dense reference solver accepts.
pub const ORACLE_MAX_SITES: usize = 4096;

const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues closer than this are treated as one line with multiplicity.
pub fn tol_cluster(frobenius_norm: f64) -> f64 {
    1e-7 * (1.0 + frobenius_norm)
}

/// Eigensystem by dense diagonalisation, with nearby eigenvalues grouped
/// into lines (mean value, orthonormal vectors). Lines carry no mode labels.
pub fn oracle_eigensystem(model: &Model) -> Result<EigenSystem> {
    let sites = model.sites();
    if sites > ORACLE_MAX_SITES {
        return Err(Error::InvalidModel(format!(
            "{sites} sites exceeds the dense solver limit of {ORACLE_MAX_SITES}"
        )));
    }
    let op = model.operator();
    let eig = hermitian_eig(&op.to_dense(), HERMITIAN_TOL)?;
    let tol = tol_cluster(op.frobenius_norm());
    let mut lines: Vec<SpectralLine> = Vec::new();
    let mut start = 0;
    while start < eig.len() {
        let mut end = start + 1;
        while end < eig.len() && eig.values[end] - eig.values[end - 1] <= tol {
            end += 1;
        }
        let members = start..end;
        let value = eig.values[members.clone()].iter().sum::<f64>() / (end - start) as f64;
        lines.push(SpectralLine {
            value,
            multiplicity: end - start,
            mode: None,
            origin: None,
            angle: None,
            vectors: members.map(|i| eig.real_vector(i)).collect(),
            source: VectorSource::Oracle,
        });
        start = end;
    }
    Ok(EigenSystem::new(model.clone(), Method::Oracle, lines))
}

/// Unit eigenvector of `op` for the eigenvalue nearest `lambda`, with its
/// largest coordinate positive. Open chains use tridiagonal inverse
/// iteration; rings fall back to dense diagonalisation.
pub(crate) fn nearest_oracle_vector(op: &ModelOperator, lambda: f64) -> Result<Vec<f64>> {
    let mut v = if op.corner() == 0.0 {
        tridiag_eigvec_near(op.tridiag(), lambda)
    } else {
        if op.order() > ORACLE_MAX_SITES {
            return Err(Error::InvalidModel(format!(
                "{} sites exceeds the dense solver limit of {ORACLE_MAX_SITES}",
                op.order()
            )));
        }
        let eig = hermitian_eig(&op.to_dense(), HERMITIAN_TOL)?;
        let best = (0..eig.len())
            .min_by(|&a, &b| {
                (eig.values[a] - lambda)
                    .abs()
                    .total_cmp(&(eig.values[b] - lambda).abs())
            })
            .ok_or_else(|| Error::InvalidModel("empty operator".into()))?;
        eig.real_vector(best)
    };
    let peak = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if peak < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChainModel, PeriodicParameters, RingModel};

    #[test]
    fn ring_doublets_are_grouped() {
        let p = PeriodicParameters::homogeneous(0.0, 1.0).unwrap();
        let eig = oracle_eigensystem(&Model::Ring(RingModel::new(p, 6).unwrap())).unwrap();
        let mults: Vec<usize> = eig.lines.iter().map(|l| l.multiplicity).collect();
        assert_eq!(mults, vec![1, 2, 2, 1]);
        assert!(eig.max_relative_residual() < 1e-13);
    }

    #[test]
    fn chain_nearest_vector() {
        let p = PeriodicParameters::alternating(0.2, -0.3, 1.0, 0.6).unwrap();
        let chain = ChainModel::new(p, 9).unwrap();
        let op = chain.operator();
        let eig = oracle_eigensystem(&Model::Chain(chain)).unwrap();
        let lambda = eig.lines[4].value;
        let v = nearest_oracle_vector(&op, lambda).unwrap();
        assert!(op.residual(lambda, &v) < 1e-12);
    }

    #[test]
    fn oversized_model_rejected() {
        let p = PeriodicParameters::homogeneous(0.0, 1.0).unwrap();
        let model = Model::Chain(ChainModel::new(p, ORACLE_MAX_SITES + 1).unwrap());
        assert!(matches!(
            oracle_eigensystem(&model),
            Err(Error::InvalidModel(_))
        ));
    }
}
