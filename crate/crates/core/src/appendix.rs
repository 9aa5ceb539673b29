//! Elementary estimates used throughout: bounds for an operator that
//! perturbs an orthonormal family, extraction of an almost-orthonormal
//! subsequence, and almost-orthogonality bounds for a pair of subspaces.
//!
//! Operator norms are computed as largest singular values of explicit
//! matrices; ambient dimensions are capped at 2000.

use nalgebra::DMatrix;

use crate::error::{input, precondition};
use crate::linalg;
use crate::subspace::{Subspace, Vector};
use crate::Result;

/// Largest ambient dimension accepted by the explicit-matrix norm routines.
pub const MAX_DIM: usize = 2000;

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(input(format!(
            "ambient dimension {n} exceeds the explicit-matrix cap {MAX_DIM}"
        )));
    }
    Ok(())
}

/// Norm bounds for the operator T f_n = w_n on the span of an orthonormal
/// family.
#[derive(Clone, Debug)]
pub struct PerturbationReport {
    pub beta: f64,
    pub norm_t: f64,
    pub norm_t_inv: f64,
    /// max |T x - x| over unit x in the domain.
    pub max_deviation: f64,
}

/// Bound the operator defined by f_n -> w_n when |w_n - f_n| <= alpha_n and
/// the alphas sum below beta < 1/4: |T| <= 1 + beta, |T^-1| <= 1/(1 - beta),
/// and |T x - x| <= beta |x|. The hypotheses are checked; the returned
/// bounds are measured, not assumed.
pub fn perturbed_iso_bounds(
    f_basis: &[Vector],
    w_list: &[Vector],
    alphas: &[f64],
    beta: f64,
) -> Result<PerturbationReport> {
    if f_basis.is_empty() || f_basis.len() != w_list.len() || f_basis.len() != alphas.len() {
        return Err(input("perturbed_iso_bounds: mismatched input lengths"));
    }
    let n = f_basis[0].len();
    check_dim(n)?;
    if !(0.0..0.25).contains(&beta) || beta == 0.0 {
        return Err(precondition("perturbed_iso_bounds: need 0 < beta < 1/4"));
    }
    let alpha_sum: f64 = alphas.iter().sum();
    if alpha_sum >= beta {
        return Err(precondition(format!(
            "perturbed_iso_bounds: sum of alphas {alpha_sum} must stay below beta {beta}"
        )));
    }
    // Orthonormality of the f family.
    for (i, f) in f_basis.iter().enumerate() {
        if f.len() != n || (f.norm() - 1.0).abs() > 1e-10 {
            return Err(precondition(
                "perturbed_iso_bounds: f family not normalized",
            ));
        }
        for g in &f_basis[..i] {
            if f.dot(g).abs() > 1e-10 {
                return Err(precondition(
                    "perturbed_iso_bounds: f family not orthogonal",
                ));
            }
        }
    }
    for ((w, f), a) in w_list.iter().zip(f_basis).zip(alphas) {
        if w.len() != n {
            return Err(input("perturbed_iso_bounds: ambient dim mismatch"));
        }
        if (w - f).norm() > *a + 1e-12 {
            return Err(precondition(
                "perturbed_iso_bounds: |w_n - f_n| exceeds alpha_n",
            ));
        }
    }
    let d = f_basis.len();
    let mut w_mat = DMatrix::<f64>::zeros(n, d);
    let mut f_mat = DMatrix::<f64>::zeros(n, d);
    for j in 0..d {
        w_mat.set_column(j, &w_list[j]);
        f_mat.set_column(j, &f_basis[j]);
    }
    // In f coordinates the operator is x -> W a with |x| = |a|.
    let singular = linalg::singular_values_desc(&w_mat);
    let norm_t = singular[0];
    let smallest = singular[singular.len() - 1];
    if smallest <= 0.0 {
        return Err(precondition("perturbed_iso_bounds: operator is singular"));
    }
    let norm_t_inv = 1.0 / smallest;
    let max_deviation = linalg::operator_norm(&(&w_mat - &f_mat));

    let report = PerturbationReport {
        beta,
        norm_t,
        norm_t_inv,
        max_deviation,
    };
    if report.norm_t > 1.0 + beta + 1e-9
        || report.norm_t_inv > 1.0 / (1.0 - beta) + 1e-9
        || report.max_deviation > beta + 1e-9
    {
        return Err(precondition(format!(
            "perturbed_iso_bounds: measured bounds escaped the estimates: |T| = {}, |T^-1| = {}, deviation = {}",
            report.norm_t, report.norm_t_inv, report.max_deviation
        )));
    }
    Ok(report)
}

/// Outcome of the almost-orthonormal extraction.
#[derive(Clone, Debug)]
pub enum Extraction {
    /// One pick per requested tolerance, in order.
    Complete {
        indices: Vec<usize>,
        vectors: Vec<Vector>,
    },
    /// The candidate list ran out; the partial picks are returned.
    Exhausted {
        indices: Vec<usize>,
        vectors: Vec<Vector>,
    },
}

/// Greedy finite-horizon extraction: walk the candidate list and pick w_n
/// whenever its normalized residual e against the avoid space (V joined
/// with all previous picks) satisfies |w_n - e| <= a_i. Finite lists need
/// not contain a full subsequence; the exhausted outcome is a value, not an
/// error.
pub fn extract_almost_orthonormal(
    w_seq: &[Vector],
    a_seq: &[f64],
    v: &Subspace,
) -> Result<Extraction> {
    if w_seq.is_empty() || a_seq.is_empty() {
        return Err(input("extract_almost_orthonormal: empty inputs"));
    }
    let n = v.ambient_dim();
    check_dim(n)?;
    if a_seq.iter().any(|&a| a <= 0.0 || a > 0.5) {
        return Err(precondition(
            "extract_almost_orthonormal: tolerances must lie in (0, 1/2]",
        ));
    }
    if a_seq.windows(2).any(|w| w[0] < w[1]) {
        return Err(precondition(
            "extract_almost_orthonormal: tolerances must be nonincreasing",
        ));
    }
    for w in w_seq {
        if w.len() != n {
            return Err(input("extract_almost_orthonormal: ambient dim mismatch"));
        }
        if (w.norm() - 1.0).abs() > 1e-9 {
            return Err(precondition(
                "extract_almost_orthonormal: candidates must be unit vectors",
            ));
        }
    }
    let mut avoid: Vec<Vector> = (0..v.dim())
        .map(|j| Vector::from(v.basis().column(j)))
        .collect();
    let mut indices = Vec::new();
    let mut vectors = Vec::new();
    let mut next_candidate = 0;
    for &a in a_seq {
        let mut picked = false;
        while next_candidate < w_seq.len() {
            let w = &w_seq[next_candidate];
            next_candidate += 1;
            let mut r = w.clone();
            for _ in 0..2 {
                for b in &avoid {
                    let c = b.dot(&r);
                    r.axpy(-c, b, 1.0);
                }
            }
            let norm = r.norm();
            if norm <= 1e-12 {
                continue;
            }
            let e = r / norm;
            if (w - &e).norm() <= a {
                indices.push(next_candidate - 1);
                vectors.push(e.clone());
                avoid.push(e);
                picked = true;
                break;
            }
        }
        if !picked {
            return Ok(Extraction::Exhausted { indices, vectors });
        }
    }
    Ok(Extraction::Complete { indices, vectors })
}

/// Measured norms and their almost-orthogonality bounds for a subspace pair.
#[derive(Clone, Debug)]
pub struct AlmostOrthReport {
    /// Largest singular value of basis_F^T basis_G: the largest inner
    /// product of unit vectors from F and G.
    pub alpha: f64,
    /// |P(F) + P(G) - P(F v G)|.
    pub sum_norm: f64,
    /// 4 sqrt(alpha).
    pub sum_bound: f64,
    /// |P(F) P(G)|.
    pub prod_norm: f64,
    /// sqrt(alpha).
    pub prod_bound: f64,
    /// Smallest singular value of the stacked basis [B_F B_G]; at least 1/2
    /// guarantees that any x in F v G with |x| <= 1/2 splits as f + g with
    /// |f|, |g| <= 1.
    pub split_min_sv: f64,
    pub ok: bool,
}

/// Almost-orthogonality bounds: with alpha < 1/3,
/// |P(F) + P(G) - P(F v G)| <= 4 sqrt(alpha) and |P(F) P(G)| <= sqrt(alpha).
/// Exact orthogonality (alpha = 0) is allowed; alpha >= 1/3 is a
/// precondition violation.
pub fn almost_orthogonality_bounds(f: &Subspace, g: &Subspace) -> Result<AlmostOrthReport> {
    if f.ambient_dim() != g.ambient_dim() {
        return Err(input("almost_orthogonality_bounds: ambient dims differ"));
    }
    check_dim(f.ambient_dim())?;
    if f.is_zero() || g.is_zero() {
        return Err(input("almost_orthogonality_bounds: zero subspace"));
    }
    let cross = f.basis().tr_mul(g.basis());
    let alpha = linalg::operator_norm(&cross);
    if alpha >= 1.0 / 3.0 {
        return Err(precondition(format!(
            "almost_orthogonality_bounds: alpha {alpha} not below 1/3"
        )));
    }
    let join = f.join(g)?;
    let sum_matrix = f.projector() + g.projector() - join.projector();
    let sum_norm = linalg::operator_norm(&sum_matrix);
    let prod_norm = linalg::operator_norm(&(f.projector() * g.projector()));
    let sum_bound = 4.0 * alpha.sqrt();
    let prod_bound = alpha.sqrt();

    let mut stacked = DMatrix::<f64>::zeros(f.ambient_dim(), f.dim() + g.dim());
    stacked
        .view_mut((0, 0), (f.ambient_dim(), f.dim()))
        .copy_from(f.basis());
    stacked
        .view_mut((0, f.dim()), (f.ambient_dim(), g.dim()))
        .copy_from(g.basis());
    let split_min_sv = *linalg::singular_values_desc(&stacked)
        .last()
        .expect("nonempty");

    let ok = sum_norm <= sum_bound + 1e-9 && prod_norm <= prod_bound + 1e-9;
    Ok(AlmostOrthReport {
        alpha,
        sum_norm,
        sum_bound,
        prod_norm,
        prod_bound,
        split_min_sv,
        ok,
    })
}
