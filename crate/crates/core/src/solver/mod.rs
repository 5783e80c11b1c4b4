//! Eigensystems of chain and ring models.
//!
//! Closed-form solvers return eigenvectors in their canonical, unnormalised
//! form: the sine/cosine profiles and component formulas exactly as they
//! arise from the band structure, so that chain vectors coincide with
//! truncated ring vectors entry by entry.

mod alternating;
mod homogeneous;
mod oracle;
mod periodic;

use std::fmt;

use serde::Serialize;

pub use alternating::{alternating_chain, alternating_ring};
pub use homogeneous::{homogeneous_chain, homogeneous_ring};
pub use oracle::{oracle_eigensystem, tol_cluster, ORACLE_MAX_SITES};
pub use periodic::{band_equation_residual, periodic_chain, periodic_ring};

use crate::error::{Error, Result};
use crate::model::{ChainModel, Model, ModelOperator, PeriodicParameters, RingModel};

/// Largest model for which canonical eigenvectors are materialised.
pub const MAX_VECTOR_SITES: usize = 4096;

/// Largest model for closed-form eigenvalues without vectors.
pub const MAX_VALUES_SITES: usize = 1_000_000;

/// Relative residual above which a closed-form vector is rebuilt through
/// the Bloch-block route.
pub(crate) const VECTOR_ACCEPT_TOL: f64 = 1e-10;

/// Whether a solver should build eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vectors {
    Canonical,
    Skip,
}

/// Where an eigenvalue sits in the chain/ring comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Band state shared between the chain and the doubled ring.
    Bulk,
    /// Chain state at an eigenvalue of `H_{1,k-1}`, vanishing on residue k.
    Boundary,
    /// Non-degenerate ring state at quasimomentum `l = 0` or `l = m/2`.
    Symmetric,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Bulk => "bulk",
            Origin::Boundary => "boundary",
            Origin::Symmetric => "symmetric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeFamily {
    /// Standing-wave index `j` of an open chain.
    Chain,
    /// Quasimomentum index `l` of a ring.
    Ring,
    /// Index of the eigenvalue of `H_{1,k-1}` (ascending).
    Boundary,
}

/// Mode label: family, mode index and band (ascending within the mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ModeLabel {
    pub family: ModeFamily,
    pub index: usize,
    pub band: usize,
}

impl ModeLabel {
    pub fn chain(index: usize, band: usize) -> Self {
        Self {
            family: ModeFamily::Chain,
            index,
            band,
        }
    }

    pub fn ring(index: usize, band: usize) -> Self {
        Self {
            family: ModeFamily::Ring,
            index,
            band,
        }
    }

    pub fn boundary(index: usize) -> Self {
        Self {
            family: ModeFamily::Boundary,
            index,
            band: 0,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            ModeFamily::Chain => write!(f, "j={}/b={}", self.index, self.band),
            ModeFamily::Ring => write!(f, "l={}/b={}", self.index, self.band),
            ModeFamily::Boundary => write!(f, "boundary={}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorSource {
    /// Vectors from the closed-form component formulas.
    ClosedForm,
    /// Closed form was singular or failed validation; vectors were rebuilt
    /// from the Bloch block eigenvector or the dense reference solver.
    Fallback,
    /// Dense reference solver.
    Oracle,
}

/// One eigenvalue with its multiplicity and eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralLine {
    pub value: f64,
    pub multiplicity: usize,
    pub mode: Option<ModeLabel>,
    pub origin: Option<Origin>,
    /// Bloch phase angle `theta` with `cos(theta)` on the right of the band
    /// equation (`pi j / n` for chains, `2 pi l / m` for rings).
    pub angle: Option<f64>,
    /// Either empty (values only) or exactly `multiplicity` vectors. For
    /// ring doublets the cosine-form vector comes first, then the sine form.
    pub vectors: Vec<Vec<f64>>,
    pub source: VectorSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::Oracle => "oracle",
        })
    }
}

/// Full spectrum of a model as lines sorted by value.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub model: Model,
    pub method: Method,
    pub lines: Vec<SpectralLine>,
}

impl EigenSystem {
    pub(crate) fn new(model: Model, method: Method, mut lines: Vec<SpectralLine>) -> Self {
        lines.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.mode.cmp(&b.mode)));
        Self {
            model,
            method,
            lines,
        }
    }

    pub fn sites(&self) -> usize {
        self.model.sites()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .lines
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.value, l.multiplicity))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn total_multiplicity(&self) -> usize {
        self.lines.iter().map(|l| l.multiplicity).sum()
    }

    pub fn has_vectors(&self) -> bool {
        self.lines.iter().all(|l| l.vectors.len() == l.multiplicity)
    }

    pub fn operator(&self) -> ModelOperator {
        self.model.operator()
    }

    /// Largest `||H u - lambda u|| / (||H||_F ||u||)` over all stored vectors.
    pub fn max_relative_residual(&self) -> f64 {
        let op = self.operator();
        max_relative_residual_with(&op, self)
    }
}

/// Residual audit against an arbitrary operator, e.g. a perturbed one.
pub fn max_relative_residual_with(op: &ModelOperator, eig: &EigenSystem) -> f64 {
    let scale = op.frobenius_norm().max(f64::MIN_POSITIVE);
    eig.lines
        .iter()
        .flat_map(|l| l.vectors.iter().map(move |v| (l.value, v)))
        .map(|(lambda, v)| relative_residual(op, lambda, v, scale))
        .fold(0.0, f64::max)
}

pub(crate) fn relative_residual(op: &ModelOperator, lambda: f64, v: &[f64], scale: f64) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return f64::INFINITY;
    }
    op.residual(lambda, v) / (scale * norm)
}

pub(crate) fn check_sites(sites: usize, vectors: Vectors) -> Result<()> {
    let cap = match vectors {
        Vectors::Canonical => MAX_VECTOR_SITES,
        Vectors::Skip => MAX_VALUES_SITES,
    };
    if sites > cap {
        return Err(Error::InvalidModel(format!(
            "{sites} sites exceeds the limit of {cap} for this request"
        )));
    }
    Ok(())
}

/// Closed-form eigensystem of any supported model, dispatching on the
/// period: homogeneous for `k = 1`, alternating for `k = 2`, general
/// periodic otherwise. Chains with `k > 1` need `k n - 1` sites, `n >= 2`.
pub fn closed_form(model: &Model, vectors: Vectors) -> Result<EigenSystem> {
    let p = model.params();
    let k = p.k();
    match model {
        Model::Chain(chain) => {
            let n = chain_cells(chain)?;
            match k {
                1 => homogeneous_chain(p.omega()[0], p.coupling()[0], chain.sites, vectors),
                2 => alternating_chain(
                    p.omega()[0],
                    p.omega()[1],
                    p.coupling()[0],
                    p.coupling()[1],
                    n,
                    vectors,
                ),
                _ => periodic_chain(p, n, vectors),
            }
        }
        Model::Ring(ring) => match k {
            1 => homogeneous_ring(p.omega()[0], p.coupling()[0], ring.sites(), vectors),
            2 => alternating_ring(
                p.omega()[0],
                p.omega()[1],
                p.coupling()[0],
                p.coupling()[1],
                ring.cells,
                vectors,
            ),
            _ => periodic_ring(p, ring.cells, vectors),
        },
    }
}

/// `n` for a chain of `k n - 1` sites, or a validation error explaining the
/// constraint. Period-one chains accept any length.
pub fn chain_cells(chain: &ChainModel) -> Result<usize> {
    let k = chain.params.k();
    if k == 1 {
        return Ok(chain.sites + 1);
    }
    match chain.cells() {
        Some(n) if n >= 2 => Ok(n),
        _ => Err(Error::InvalidModel(if k == 2 {
            format!(
                "N must be 2n-1 with n >= 2 for a closed-form alternating chain (got N = {})",
                chain.sites
            )
        } else {
            format!(
                "N must equal k*n-1 = {k}n-1 with n >= 2 for a closed-form {k}-periodic chain (got N = {})",
                chain.sites
            )
        })),
    }
}

pub(crate) fn chain_model(params: &PeriodicParameters, sites: usize) -> Model {
    Model::Chain(ChainModel {
        params: params.clone(),
        sites,
    })
}

pub(crate) fn ring_model(params: &PeriodicParameters, cells: usize) -> Model {
    Model::Ring(RingModel {
        params: params.clone(),
        cells,
    })
}

/// Unit-normalises a vector.
pub fn normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}
