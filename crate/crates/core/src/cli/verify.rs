//! Randomised property suite: each family draws its own deterministic
//! instances from the seed and reports the worst observed metric against
//! its bound.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compare::{compare_models, ComparisonReport, IDENTITY_TOL, PROJECTION_TOL};
use crate::dynamics::{agreement_horizon, boundary_divergence, Partner};
use crate::error::Result;
use crate::model::{ChainModel, Model, PeriodicParameters, RingModel};
use crate::solver::{
    alternating_chain, alternating_ring, band_equation_residual, closed_form, homogeneous_chain,
    homogeneous_ring, max_relative_residual_with, oracle_eigensystem, periodic_chain,
    periodic_ring, EigenSystem, Origin, Vectors,
};

pub const ORACLE_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const SPECIALIZATION_TOL: f64 = 1e-10;
pub const BAND_EQUATION_TOL: f64 = 1e-8;
pub const SHORT_TIME_TOL: f64 = 1e-6;
pub const UNITARITY_TOL: f64 = 1e-9;

/// Chain and ring sizes for the comparison families.
pub const COMPARE_KMAX: usize = 4;
pub const COMPARE_NMAX: usize = 6;
/// Cells per chain in the dynamics family.
pub const DYNAMICS_CELLS: usize = 16;
pub const DYNAMICS_KMAX: usize = 3;
const DYNAMICS_STEPS: usize = 64;
const IDENTITY_SAMPLES: usize = 20;
const SWEEP_NMAX: usize = 8;

/// Outcome of one property family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub worst: f64,
    pub bound: f64,
    pub failures: usize,
}

impl FamilyOutcome {
    fn new(name: &'static str, bound: f64) -> Self {
        Self {
            name,
            trials: 0,
            worst: 0.0,
            bound,
            failures: 0,
        }
    }

    /// Records one metric; NaN counts as a failure.
    fn record(&mut self, metric: f64) {
        if metric.is_nan() || metric > self.bound {
            self.failures += 1;
        }
        self.worst = if metric.is_nan() {
            f64::NAN
        } else {
            self.worst.max(metric)
        };
    }

    fn fail(&mut self) {
        self.failures += 1;
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

impl fmt::Display for FamilyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {} trials={} worst={:.3e} bound={:.0e} failures={}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.trials,
            self.worst,
            self.bound,
            self.failures
        )
    }
}

/// Suite configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub kmax: usize,
    /// Flip the sign of one coupling in the operator used by the residual
    /// family halfway through, which must be detected.
    pub inject_fault: bool,
}

/// One instance of the oracle sweep: parameters, chain cells, ring cells.
#[derive(Debug, Clone)]
pub struct SweepCase {
    pub params: PeriodicParameters,
    pub chain_cells: usize,
    pub ring_cells: usize,
}

fn family_rng(seed: u64, family: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family);
    rng
}

/// Random instances with `k` in `1..=kmax` and cell counts in `2..=8`.
pub fn sweep_cases(seed: u64, trials: usize, kmax: usize) -> Vec<SweepCase> {
    let mut rng = family_rng(seed, 1);
    (0..trials)
        .map(|_| {
            let k = rng.gen_range(1..=kmax);
            let params = PeriodicParameters::random(&mut rng, k);
            SweepCase {
                params,
                chain_cells: rng.gen_range(2..=SWEEP_NMAX),
                ring_cells: rng.gen_range(2..=SWEEP_NMAX),
            }
        })
        .collect()
}

fn sweep_models(case: &SweepCase) -> Result<[Model; 2]> {
    Ok([
        Model::Chain(ChainModel::with_cells(
            case.params.clone(),
            case.chain_cells,
        )?),
        Model::Ring(RingModel::new(case.params.clone(), case.ring_cells)?),
    ])
}

/// Sorted closed-form values against the dense solver, scaled by
/// `1 + ||H||_F`.
pub fn oracle_equivalence(cases: &[SweepCase]) -> FamilyOutcome {
    let mut out = FamilyOutcome::new("oracle_equivalence", ORACLE_TOL);
    for case in cases {
        out.trials += 1;
        let Ok(models) = sweep_models(case) else {
            out.fail();
            continue;
        };
        for model in &models {
            let scale = 1.0 + model.operator().frobenius_norm();
            match (closed_form(model, Vectors::Skip), oracle_eigensystem(model)) {
                (Ok(a), Ok(b)) => {
                    let (a, b) = (a.values(), b.values());
                    if a.len() != b.len() {
                        out.fail();
                        continue;
                    }
                    let gap = a
                        .iter()
                        .zip(&b)
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    out.record(gap / scale);
                }
                _ => out.fail(),
            }
        }
    }
    out
}

/// Relative residual of every canonical eigenvector. With `fault`, the
/// operator of the middle case is built with one coupling sign flipped.
pub fn eigenvector_residuals(cases: &[SweepCase], fault: bool) -> FamilyOutcome {
    let mut out = FamilyOutcome::new("eigenvector_residual", RESIDUAL_TOL);
    for (i, case) in cases.iter().enumerate() {
        out.trials += 1;
        let Ok(models) = sweep_models(case) else {
            out.fail();
            continue;
        };
        for model in &models {
            let Ok(eig) = closed_form(model, Vectors::Canonical) else {
                out.fail();
                continue;
            };
            let op = if fault && i == cases.len() / 2 {
                corrupted(model).operator()
            } else {
                model.operator()
            };
            out.record(max_relative_residual_with(&op, &eig));
        }
    }
    out
}

fn corrupted(model: &Model) -> Model {
    let p = model.params();
    let mut coupling = p.coupling().to_vec();
    coupling[0] = -coupling[0];
    let params = PeriodicParameters::new(p.omega().to_vec(), coupling).expect("valid flip");
    match model {
        Model::Chain(c) => Model::Chain(ChainModel {
            params,
            sites: c.sites,
        }),
        Model::Ring(r) => Model::Ring(RingModel {
            params,
            cells: r.cells,
        }),
    }
}

/// Band equation at every closed-form bulk and symmetric line.
pub fn band_equation(cases: &[SweepCase]) -> FamilyOutcome {
    let mut out = FamilyOutcome::new("band_equation", BAND_EQUATION_TOL);
    for case in cases {
        out.trials += 1;
        let Ok(models) = sweep_models(case) else {
            out.fail();
            continue;
        };
        for model in &models {
            match closed_form(model, Vectors::Skip) {
                Ok(eig) => out.record(worst_band_residual(&case.params, &eig)),
                Err(_) => out.fail(),
            }
        }
    }
    out
}

fn worst_band_residual(params: &PeriodicParameters, eig: &EigenSystem) -> f64 {
    eig.lines
        .iter()
        .filter(|l| l.origin != Some(Origin::Boundary))
        .filter_map(|l| l.angle.map(|a| (l.value, a)))
        .map(|(lambda, angle)| {
            let (r, scale) = band_equation_residual(params, lambda, angle);
            r / scale
        })
        .fold(0.0, f64::max)
}

/// Full chain/ring comparisons for `k <= min(4, kmax)`, `n <= 6`.
pub fn comparison_reports(
    seed: u64,
    trials: usize,
    kmax: usize,
) -> Vec<(PeriodicParameters, usize, Result<ComparisonReport>)> {
    let mut rng = family_rng(seed, 2);
    (0..trials)
        .map(|_| {
            let k = rng.gen_range(1..=kmax.min(COMPARE_KMAX));
            let n = rng.gen_range(2..=COMPARE_NMAX);
            let params = PeriodicParameters::random(&mut rng, k);
            let report = compare_models(&params, n, IDENTITY_SAMPLES, &mut rng);
            (params, n, report)
        })
        .collect()
}

type Reports = [(PeriodicParameters, usize, Result<ComparisonReport>)];

/// Exact `(k(n-1), k-1, 2k)` line counts; the metric is the number of
/// mismatched counts.
pub fn spectrum_partition(reports: &Reports) -> FamilyOutcome {
    let mut out = FamilyOutcome::new("spectrum_partition", 0.0);
    for (params, n, report) in reports {
        out.trials += 1;
        let k = params.k();
        match report {
            Ok(r) => {
                let (c, a, b) = r.counts();
                let ring_doublets = r.common.iter().all(|p| p.ring_multiplicity == 2);
                let misses = [c == k * (n - 1), a == k - 1, b == 2 * k, ring_doublets]
                    .iter()
                    .filter(|ok| !**ok)
                    .count();
                out.record(misses as f64);
            }
            Err(_) => out.fail(),
        }
    }
    out
}

pub fn determinant_identity(reports: &Reports) -> FamilyOutcome {
    let mut out = FamilyOutcome::new("determinant_identity", IDENTITY_TOL);
    for (_, _, report) in reports {
        out.trials += 1;
        match report {
            Ok(r) if r.identity_residuals.len() == IDENTITY_SAMPLES => {
                for &res in &r.identity_residuals {
                    out.record(res);
                }
            }
            _ => out.fail(),
        }
    }
    out
}

/// Projection residual relative to its bound `1e-9 (1 + ||v||_inf)`, and
/// the rescale factor within `1e-9` of 1.
pub fn projection(reports: &Reports) -> FamilyOutcome {
    let mut out = FamilyOutcome::new("projection", PROJECTION_TOL);
    for (_, _, report) in reports {
        out.trials += 1;
        let Ok(r) = report else {
            out.fail();
            continue;
        };
        for pair in &r.common {
            match pair.projection {
                Some(p) => {
                    out.record(p.residual / (p.bound / PROJECTION_TOL));
                    out.record((p.scale - 1.0).abs());
                }
                None => out.fail(),
            }
        }
    }
    out
}

/// Periodic solvers at `k = 1, 2` against the dedicated solvers.
pub fn specialization(seed: u64, trials: usize) -> FamilyOutcome {
    let mut out = FamilyOutcome::new("specialization", SPECIALIZATION_TOL);
    let mut rng = family_rng(seed, 3);
    for t in 0..trials {
        out.trials += 1;
        let k = 1 + t % 2;
        let p = PeriodicParameters::random(&mut rng, k);
        let n = rng.gen_range(2..=SWEEP_NMAX);
        let (w, d) = (p.omega(), p.coupling());
        let pairs = if k == 1 {
            [
                (
                    periodic_chain(&p, n, Vectors::Skip),
                    homogeneous_chain(w[0], d[0], n - 1, Vectors::Skip),
                ),
                (
                    periodic_ring(&p, n, Vectors::Skip),
                    homogeneous_ring(w[0], d[0], n, Vectors::Skip),
                ),
            ]
        } else {
            [
                (
                    periodic_chain(&p, n, Vectors::Skip),
                    alternating_chain(w[0], w[1], d[0], d[1], n, Vectors::Skip),
                ),
                (
                    periodic_ring(&p, n, Vectors::Skip),
                    alternating_ring(w[0], w[1], d[0], d[1], n, Vectors::Skip),
                ),
            ]
        };
        for pair in pairs {
            match pair {
                (Ok(a), Ok(b)) if a.total_multiplicity() == b.total_multiplicity() => {
                    let gap = a
                        .values()
                        .iter()
                        .zip(&b.values())
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    out.record(gap);
                }
                _ => out.fail(),
            }
        }
    }
    out
}

/// Dynamics checks for `k <= min(3, kmax)` and 16 cells: short-time
/// agreement, unitarity of both tracks and a control run that never
/// diverges. Returns `(agreement, unitarity, control)`.
pub fn dynamics(
    seed: u64,
    trials: usize,
    kmax: usize,
) -> (FamilyOutcome, FamilyOutcome, FamilyOutcome) {
    let mut agree = FamilyOutcome::new("short_time_agreement", SHORT_TIME_TOL);
    let mut unit = FamilyOutcome::new("unitarity", UNITARITY_TOL);
    let mut control = FamilyOutcome::new("control_divergence", 0.0);
    let mut rng = family_rng(seed, 4);
    let kmax = kmax.min(DYNAMICS_KMAX);
    for t in 0..trials {
        let k = 1 + t % kmax;
        let p = PeriodicParameters::random(&mut rng, k);
        let horizon = agreement_horizon(&p, DYNAMICS_CELLS);
        agree.trials += 1;
        unit.trials += 1;
        control.trials += 1;
        match boundary_divergence(
            &p,
            DYNAMICS_CELLS,
            None,
            SHORT_TIME_TOL,
            horizon,
            DYNAMICS_STEPS,
            Partner::Ring,
        ) {
            Ok(s) => {
                agree.record(s.differences().iter().copied().fold(0.0, f64::max));
                unit.record(s.max_unitarity_error);
            }
            Err(_) => {
                agree.fail();
                unit.fail();
            }
        }
        match boundary_divergence(
            &p,
            DYNAMICS_CELLS,
            None,
            f64::MIN_POSITIVE,
            8.0 * horizon,
            DYNAMICS_STEPS,
            Partner::Chain,
        ) {
            Ok(s) => control.record(if s.divergence_time.is_infinite() {
                0.0
            } else {
                1.0
            }),
            Err(_) => control.fail(),
        }
    }
    (agree, unit, control)
}

/// Runs every family and returns the outcomes in a fixed order.
pub fn run_suite(config: &VerifyConfig) -> Vec<FamilyOutcome> {
    let kmax = config.kmax.max(1);
    let cases = sweep_cases(config.seed, config.trials, kmax);
    let reports = comparison_reports(config.seed, config.trials, kmax);
    let (agree, unit, control) = dynamics(config.seed, config.trials.min(6), kmax);
    vec![
        oracle_equivalence(&cases),
        eigenvector_residuals(&cases, config.inject_fault),
        spectrum_partition(&reports),
        determinant_identity(&reports),
        projection(&reports),
        specialization(config.seed, config.trials),
        band_equation(&cases),
        agree,
        unit,
        control,
    ]
}
