//! Regularity diagnostics for families of subspaces.
//!
//! The central quantity is the witness gap: the smallest eigenvalue of
//! sum_k (I - P(L_k)) restricted to the orthogonal complement of
//! L = intersection of the L_k. A small gap certifies a unit vector far from
//! the common intersection yet close to every member of the family; the
//! dichotomy scan tracks the gap and the fitted cyclic rate across
//! truncation levels and flags vanishing trends.

use serde::{Deserialize, Serialize};

use crate::error::input;
use crate::linalg;
use crate::parallel;
use crate::schedule::{fit_rate, run_trajectory, Schedule};
use crate::subspace::{Subspace, Vector, RANK_TOL};
use crate::{Error, Result};

/// Pairwise Friedrichs cosine entry (1-based indices, i < j).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FriedrichsPair {
    pub i: usize,
    pub j: usize,
    pub cos: f64,
}

/// Witness diagnostics at one truncation level.
#[derive(Clone, Debug)]
pub struct RegularityReport {
    /// Ambient dimension N of the truncation.
    pub truncation_dim: usize,
    /// Smallest eigenvalue of sum_k (I - P(L_k)) on L-perp.
    pub witness_gap: f64,
    /// Unit eigenvector attaining the gap (not unique under ties).
    pub witness: Vector,
    /// max_k dist(witness, L_k).
    pub max_dist: f64,
    /// Fitted per-cycle rate of the cyclic trajectory started at the witness;
    /// 0 when the trajectory collapses to zero in finitely many steps.
    pub rate: Option<f64>,
    pub friedrichs_pairs: Vec<FriedrichsPair>,
}

/// Knobs for [`witness_search_with`].
#[derive(Clone, Debug)]
pub struct WitnessOptions {
    pub compute_rate: bool,
    /// Cycles of the cyclic schedule used for the rate fit.
    pub rate_cycles: usize,
    pub compute_friedrichs: bool,
    pub tol: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            compute_rate: true,
            rate_cycles: 60,
            compute_friedrichs: true,
            tol: RANK_TOL,
        }
    }
}

/// Witness search with default options.
pub fn witness_search(subspaces: &[Subspace]) -> Result<RegularityReport> {
    witness_search_with(subspaces, &WitnessOptions::default())
}

/// Minimize sum_k dist(w, L_k)^2 over unit w orthogonal to the common
/// intersection: a symmetric eigenproblem. Errors with EMPTY when the
/// intersection fills the ambient space.
pub fn witness_search_with(
    subspaces: &[Subspace],
    opts: &WitnessOptions,
) -> Result<RegularityReport> {
    let first = subspaces
        .first()
        .ok_or_else(|| input("witness_search: empty family"))?;
    let n = first.ambient_dim();
    if subspaces.iter().any(|s| s.ambient_dim() != n) {
        return Err(input("witness_search: mixed ambient dims"));
    }
    let k = subspaces.len();
    let common = Subspace::intersect_all(subspaces, opts.tol)?;
    let q = n - common.dim();
    if q == 0 {
        return Err(Error::Empty(
            "witness_search: intersection fills the space".into(),
        ));
    }

    // Restricted operator on the complement of the intersection:
    // K I - sum_k P(L_k). With M = (I - P_L)[B_1 .. B_K] the largest
    // restricted eigenvalue of the projection sum equals the largest
    // eigenvalue of the Gram M^T M, and its eigenvector lifts through M.
    let total_d: usize = subspaces.iter().map(|s| s.dim()).sum();
    let (lambda_max, y) = if total_d == 0 {
        (0.0, Vector::zeros(n))
    } else if total_d <= n {
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, total_d);
        let mut col = 0;
        for s in subspaces {
            if s.dim() > 0 {
                m.view_mut((0, col), (n, s.dim())).copy_from(s.basis());
                col += s.dim();
            }
        }
        if !common.is_zero() {
            let coeffs = common.basis().tr_mul(&m);
            m -= common.basis() * coeffs;
        }
        let gram = m.tr_mul(&m);
        let (lambda, v) = linalg::largest_sym_eigenpair(gram);
        (lambda.max(0.0), &m * v)
    } else {
        // Dense operator route for wide families: sum_k P(L_k) deflated on
        // the intersection by -K P_L.
        let mut op = nalgebra::DMatrix::<f64>::zeros(n, n);
        for s in subspaces {
            if s.dim() > 0 {
                op += s.basis() * s.basis().transpose();
            }
        }
        if !common.is_zero() {
            op -= common.projector() * k as f64;
        }
        let (lambda, v) = linalg::largest_sym_eigenpair(op);
        let y = &v - common.project_unchecked(&v);
        (lambda.max(0.0), y)
    };
    let witness_gap = (k as f64 - lambda_max).max(0.0);
    let y_norm = y.norm();
    let witness = if y_norm > 1e-9 {
        y / y_norm
    } else {
        first_complement_direction(&common, n)?
    };

    let mut max_dist: f64 = 0.0;
    for s in subspaces {
        max_dist = max_dist.max(s.distance(&witness)?);
    }

    let rate = if opts.compute_rate {
        Some(cyclic_rate(subspaces, &witness, opts.rate_cycles)?)
    } else {
        None
    };

    let mut friedrichs_pairs = Vec::new();
    if opts.compute_friedrichs {
        for i in 0..k {
            for j in (i + 1)..k {
                let cos = if subspaces[i].is_zero() || subspaces[j].is_zero() {
                    0.0
                } else {
                    subspaces[i]
                        .principal_angles(&subspaces[j], opts.tol)?
                        .friedrichs_cos
                };
                friedrichs_pairs.push(FriedrichsPair {
                    i: i + 1,
                    j: j + 1,
                    cos,
                });
            }
        }
    }

    Ok(RegularityReport {
        truncation_dim: n,
        witness_gap,
        witness,
        max_dist,
        rate,
        friedrichs_pairs,
    })
}

/// First standard basis direction with a nonzero component off the common
/// intersection, normalized. Deterministic fallback witness for degenerate
/// spectra.
fn first_complement_direction(common: &Subspace, n: usize) -> Result<Vector> {
    for i in 0..n {
        let e = crate::subspace::basis_vector(n, i);
        let r = &e - common.project_unchecked(&e);
        let norm = r.norm();
        if norm > 1e-6 {
            return Ok(r / norm);
        }
    }
    Err(Error::Empty(
        "witness_search: no complement direction found".into(),
    ))
}

/// Fitted per-cycle rate of the cyclic trajectory from `z0`. A trajectory
/// that collapses to an unusably small norm before two cycles reports 0.
fn cyclic_rate(subspaces: &[Subspace], z0: &Vector, cycles: usize) -> Result<f64> {
    let k = subspaces.len();
    let cycles = cycles.max(2);
    let steps = cycles * k;
    let traj = run_trajectory(subspaces, &Schedule::Cyclic { k }, z0, steps)?;
    match fit_rate(&traj, k, None) {
        Ok(r) => Ok(r),
        Err(Error::ZeroNorm(_)) => {
            // Shrink the window to the cycles before the underflow.
            let mut last = 0;
            for c in 0..=cycles {
                if traj.norms[c * k] > 1e-300 {
                    last = c;
                }
            }
            if last >= 2 {
                match fit_rate(&traj, k, Some(last / 2..last + 1)) {
                    Ok(r) => Ok(r),
                    Err(Error::ZeroNorm(_)) => Ok(0.0),
                    Err(e) => Err(e),
                }
            } else {
                Ok(0.0)
            }
        }
        Err(e) => Err(e),
    }
}

/// Scan result: one report per truncation level plus trend flags.
#[derive(Clone, Debug)]
pub struct DichotomyScan {
    pub truncations: Vec<usize>,
    pub reports: Vec<RegularityReport>,
    /// Witness gap decreased by at least 10x from first to last level.
    pub gap_vanishing: bool,
    /// 1 - rate decreased by at least 10x from first to last level.
    pub rate_to_one: bool,
}

/// Decay factor that sets the trend flags.
pub const TREND_DECAY: f64 = 10.0;

/// Run a witness search at each truncation level of a constructor and flag
/// vanishing trends. Levels run in parallel (capped by PROJEKTOR_THREADS);
/// output is independent of the worker count.
pub fn dichotomy_scan_with<F>(build: F, truncations: &[usize]) -> Result<DichotomyScan>
where
    F: Fn(usize) -> Result<Vec<Subspace>> + Sync,
{
    dichotomy_scan_opts(build, truncations, &WitnessOptions::default())
}

pub fn dichotomy_scan_opts<F>(
    build: F,
    truncations: &[usize],
    opts: &WitnessOptions,
) -> Result<DichotomyScan>
where
    F: Fn(usize) -> Result<Vec<Subspace>> + Sync,
{
    if truncations.is_empty() {
        return Err(input("dichotomy_scan: no truncation levels"));
    }
    if truncations.windows(2).any(|w| w[0] >= w[1]) {
        return Err(input("dichotomy_scan: truncations must strictly increase"));
    }
    let results = parallel::map_indexed(truncations.len(), |i| {
        build(truncations[i]).and_then(|family| witness_search_with(&family, opts))
    });
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    let first = &reports[0];
    let last = &reports[reports.len() - 1];
    let gap_vanishing =
        first.witness_gap > 0.0 && last.witness_gap * TREND_DECAY <= first.witness_gap;
    let rate_to_one = match (first.rate, last.rate) {
        (Some(rf), Some(rl)) => {
            let df = 1.0 - rf;
            let dl = 1.0 - rl;
            df > 0.0 && dl * TREND_DECAY <= df
        }
        _ => false,
    };
    Ok(DichotomyScan {
        truncations: truncations.to_vec(),
        reports,
        gap_vanishing,
        rate_to_one,
    })
}

/// Per-truncation witnesses with their max distances: the finite stand-in
/// for a normalized sequence almost shared by the family.
pub fn extract_witness_sequence(reports: &[RegularityReport]) -> Vec<(usize, Vector, f64)> {
    reports
        .iter()
        .map(|r| (r.truncation_dim, r.witness.clone(), r.max_dist))
        .collect()
}
