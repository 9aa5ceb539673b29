//! Index schedules and projection trajectories.
//!
//! A trajectory iterates z_n = P(L_{k_n}) z_{n-1} over a family of subspaces
//! under a cyclic, seeded-random, or explicit schedule, recording norms and
//! per-step norm drops.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{input, precondition};
use crate::rng::stateless;
use crate::subspace::{Subspace, Vector};
use crate::{Error, Result};

/// Index schedule over subspaces 1..=K.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// Emits 1, 2, ..., K, 1, 2, ...
    Cyclic { k: usize },
    /// Uniform i.i.d. over 1..=K, reproducible from the seed. Draws are
    /// counter-based, so index n depends only on (seed, n).
    SeededRandom { k: usize, seed: u64 },
    /// Explicit list, replayed verbatim and then an error past its end.
    Explicit { k: usize, indices: Vec<usize> },
}

impl Schedule {
    pub fn k(&self) -> usize {
        match self {
            Schedule::Cyclic { k }
            | Schedule::SeededRandom { k, .. }
            | Schedule::Explicit { k, .. } => *k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k() == 0 {
            return Err(input("schedule: K must be positive"));
        }
        if let Schedule::Explicit { k, indices } = self {
            if indices.is_empty() {
                return Err(input("schedule: explicit index list is empty"));
            }
            if let Some(bad) = indices.iter().find(|&&i| i == 0 || i > *k) {
                return Err(input(format!("schedule: index {bad} outside 1..={k}")));
            }
        }
        Ok(())
    }

    /// 1-based index for step n >= 1.
    pub fn index_at(&self, step: usize) -> Result<usize> {
        if step == 0 {
            return Err(input("schedule: steps are 1-based"));
        }
        match self {
            Schedule::Cyclic { k } => Ok((step - 1) % k + 1),
            Schedule::SeededRandom { k, seed } => {
                Ok((stateless(*seed, step as u64) % *k as u64) as usize + 1)
            }
            Schedule::Explicit { indices, .. } => indices
                .get(step - 1)
                .copied()
                .ok_or_else(|| input(format!("schedule: step {step} past explicit list"))),
        }
    }

    /// First `steps` indices.
    pub fn indices(&self, steps: usize) -> Result<Vec<usize>> {
        (1..=steps).map(|n| self.index_at(n)).collect()
    }
}

/// Finite-horizon stand-in for "each index appears infinitely often": every
/// sliding window of the given length contains every index in 1..=K.
/// The conventional window is 10*K.
pub fn covers_within_windows(indices: &[usize], k: usize, window: usize) -> bool {
    if window == 0 || indices.len() < window {
        return false;
    }
    let mut counts = vec![0usize; k + 1];
    let mut missing = k;
    for (i, &idx) in indices.iter().enumerate() {
        if idx == 0 || idx > k {
            return false;
        }
        if counts[idx] == 0 {
            missing -= 1;
        }
        counts[idx] += 1;
        if i >= window {
            let out = indices[i - window];
            counts[out] -= 1;
            if counts[out] == 0 {
                missing += 1;
            }
        }
        if i + 1 >= window && missing > 0 {
            return false;
        }
    }
    true
}

/// Iterate record: points z_0..z_n with norms, applied indices, and per-step
/// squared-norm drops.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<Vector>,
    pub norms: Vec<f64>,
    /// k_1..k_n, 1-based.
    pub schedule_used: Vec<usize>,
    /// |z_{i-1}|^2 - |z_i|^2 for i = 1..n.
    pub per_step_drop: Vec<f64>,
    /// Number of subspaces in the family the trajectory ran over.
    pub k: usize,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.schedule_used.len()
    }

    pub fn final_norm(&self) -> f64 {
        *self.norms.last().expect("trajectory has z0")
    }
}

fn check_family(subspaces: &[Subspace], z0: &Vector) -> Result<usize> {
    let first = subspaces
        .first()
        .ok_or_else(|| input("trajectory: empty subspace list"))?;
    let n = first.ambient_dim();
    if subspaces.iter().any(|s| s.ambient_dim() != n) {
        return Err(input("trajectory: subspaces have mixed ambient dims"));
    }
    if z0.len() != n {
        return Err(input(format!(
            "trajectory: z0 has dim {}, subspaces {n}",
            z0.len()
        )));
    }
    Ok(n)
}

/// Run z_n = P(L_{k_n}) z_{n-1} for the given number of steps.
pub fn run_trajectory(
    subspaces: &[Subspace],
    schedule: &Schedule,
    z0: &Vector,
    steps: usize,
) -> Result<Trajectory> {
    check_family(subspaces, z0)?;
    schedule.validate()?;
    if steps == 0 {
        return Err(input("trajectory: steps must be >= 1"));
    }
    if schedule.k() != subspaces.len() {
        return Err(input(format!(
            "trajectory: schedule K = {} but {} subspaces",
            schedule.k(),
            subspaces.len()
        )));
    }
    let mut points = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    let mut schedule_used = Vec::with_capacity(steps);
    let mut per_step_drop = Vec::with_capacity(steps);
    points.push(z0.clone());
    norms.push(z0.norm());
    let mut z = z0.clone();
    for n in 1..=steps {
        let k = schedule.index_at(n)?;
        z = subspaces[k - 1].project_unchecked(&z);
        let norm = z.norm();
        let prev = norms[n - 1];
        per_step_drop.push(prev * prev - norm * norm);
        norms.push(norm);
        schedule_used.push(k);
        points.push(z.clone());
    }
    Ok(Trajectory {
        points,
        norms,
        schedule_used,
        per_step_drop,
        k: subspaces.len(),
    })
}

/// Storage-free runner: iterate until the norm falls below `target` or
/// `max_steps` is reached. Returns (steps taken, final norm).
pub fn run_to_norm(
    subspaces: &[Subspace],
    schedule: &Schedule,
    z0: &Vector,
    max_steps: usize,
    target: f64,
) -> Result<(usize, f64)> {
    check_family(subspaces, z0)?;
    schedule.validate()?;
    if schedule.k() != subspaces.len() {
        return Err(input("run_to_norm: schedule K != subspace count"));
    }
    let mut z = z0.clone();
    let mut norm = z.norm();
    let mut step = 0;
    while norm >= target && step < max_steps {
        step += 1;
        let k = schedule.index_at(step)?;
        z = subspaces[k - 1].project_unchecked(&z);
        norm = z.norm();
    }
    Ok((step, norm))
}

/// Indices k whose subspace comes within `delta` of z_m: the set
/// {k : dist(z_m, L_k) < delta}. A ball around z_m meets L_k exactly when
/// the distance test passes.
pub fn active_set(
    traj: &Trajectory,
    subspaces: &[Subspace],
    m: usize,
    delta: f64,
) -> Result<BTreeSet<usize>> {
    if delta <= 0.0 {
        return Err(input("active_set: delta must be positive"));
    }
    let z = traj
        .points
        .get(m)
        .ok_or_else(|| input(format!("active_set: index {m} out of range")))?;
    let mut out = BTreeSet::new();
    for (i, s) in subspaces.iter().enumerate() {
        if s.distance(z)? < delta {
            out.insert(i + 1);
        }
    }
    Ok(out)
}

/// Largest pairwise distance among points z_m, m >= from.
pub fn oscillation(traj: &Trajectory, from: usize) -> Result<f64> {
    if from >= traj.points.len() {
        return Err(input("oscillation: start index past trajectory end"));
    }
    let pts = &traj.points[from..];
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max((&pts[i] - &pts[j]).norm());
        }
    }
    Ok(best)
}

/// Least-squares per-cycle contraction rate from log-norms at cycle
/// boundaries (steps 0, K, 2K, ...). `window` selects a cycle range; `None`
/// uses the last half of the cycles, skipping the transient.
pub fn fit_rate(
    traj: &Trajectory,
    cycle_len: usize,
    window: Option<std::ops::Range<usize>>,
) -> Result<f64> {
    if cycle_len == 0 {
        return Err(input("fit_rate: cycle length must be positive"));
    }
    let n_cycles = traj.steps() / cycle_len;
    if n_cycles < 2 {
        return Err(input("fit_rate: need at least two full cycles"));
    }
    let window = window.unwrap_or(n_cycles / 2..n_cycles + 1);
    if window.start >= window.end || window.end > n_cycles + 1 {
        return Err(input("fit_rate: bad cycle window"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for c in window {
        let norm = traj.norms[c * cycle_len];
        if norm <= 0.0 || norm < 1e-300 {
            return Err(Error::ZeroNorm(format!(
                "fit_rate: norm underflow at cycle {c}"
            )));
        }
        xs.push(c as f64);
        ys.push(norm.ln());
    }
    if xs.len() < 2 {
        return Err(input("fit_rate: window selects fewer than two cycles"));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    Ok(slope.exp().clamp(0.0, 1.0))
}

/// Segment inequality for stretches using at most two distinct indices:
/// |z_n - z_m|^2 <= |z_m|^2 - |z_n|^2 + 1e-9.
pub fn check_two_space_drop(traj: &Trajectory, m: usize, n: usize) -> Result<bool> {
    if m > n || n >= traj.points.len() {
        return Err(input("check_two_space_drop: bad index range"));
    }
    let distinct: BTreeSet<usize> = traj.schedule_used[m..n].iter().copied().collect();
    if distinct.len() > 2 {
        return Err(precondition(format!(
            "check_two_space_drop: {} distinct indices in segment ({m}, {n}]",
            distinct.len()
        )));
    }
    let lhs = (&traj.points[n] - &traj.points[m]).norm_squared();
    let rhs = traj.norms[m] * traj.norms[m] - traj.norms[n] * traj.norms[n];
    Ok(lhs <= rhs + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::basis_vector;

    fn line(n: usize, coords: &[(usize, f64)]) -> Subspace {
        let mut v = Vector::zeros(n);
        for &(i, c) in coords {
            v[i] = c;
        }
        Subspace::line(&v).unwrap()
    }

    fn two_lines_at(theta: f64) -> Vec<Subspace> {
        vec![
            line(2, &[(0, 1.0)]),
            line(2, &[(0, theta.cos()), (1, theta.sin())]),
        ]
    }

    #[test]
    fn cyclic_emits_in_order() {
        let s = Schedule::Cyclic { k: 3 };
        assert_eq!(s.indices(7).unwrap(), vec![1, 2, 3, 1, 2, 3, 1]);
    }

    #[test]
    fn seeded_random_replays() {
        let s = Schedule::SeededRandom { k: 4, seed: 99 };
        let a = s.indices(50).unwrap();
        let b = s.indices(50).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&i| (1..=4).contains(&i)));
    }

    #[test]
    fn explicit_enforces_bounds() {
        let s = Schedule::Explicit {
            k: 2,
            indices: vec![1, 2, 3],
        };
        assert_eq!(s.validate().unwrap_err().code(), "INPUT_ERROR");
    }

    #[test]
    fn window_coverage() {
        let cyc = Schedule::Cyclic { k: 3 }.indices(30).unwrap();
        assert!(covers_within_windows(&cyc, 3, 3));
        assert!(covers_within_windows(&cyc, 3, 30));
        assert!(!covers_within_windows(&[1, 1, 1, 1], 2, 2));
    }

    #[test]
    fn alternating_lines_closed_form() {
        // Oracle: each projection between lines at angle theta multiplies the
        // norm by cos theta. Four alternating projections starting on the
        // other line give cos^4; the cyclic schedule starting with the line
        // containing z0 wastes its first step and gives cos^3.
        let theta = std::f64::consts::FRAC_PI_3;
        let spaces = two_lines_at(theta);
        let z0 = basis_vector(2, 0);

        let explicit = Schedule::Explicit {
            k: 2,
            indices: vec![2, 1, 2, 1],
        };
        let t = run_trajectory(&spaces, &explicit, &z0, 4).unwrap();
        assert!((t.final_norm() - theta.cos().powi(4)).abs() < 1e-12);
        assert!((t.final_norm() - 0.0625).abs() < 1e-12);

        let cyclic = Schedule::Cyclic { k: 2 };
        let t = run_trajectory(&spaces, &cyclic, &z0, 4).unwrap();
        assert!((t.final_norm() - theta.cos().powi(3)).abs() < 1e-12);
    }

    #[test]
    fn single_subspace_constant_after_first() {
        let spaces = vec![line(3, &[(0, 1.0), (1, 1.0)])];
        let z0 = Vector::from_vec(vec![1.0, 0.0, 2.0]);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 1 }, &z0, 5).unwrap();
        for i in 2..=5 {
            assert!((&t.points[i] - &t.points[1]).norm() < 1e-14);
        }
    }

    #[test]
    fn fixed_point_in_intersection() {
        let spaces = vec![
            Subspace::span(&[basis_vector(3, 0), basis_vector(3, 1)], 1e-10).unwrap(),
            Subspace::span(&[basis_vector(3, 0), basis_vector(3, 2)], 1e-10).unwrap(),
        ];
        let z0 = 3.0 * basis_vector(3, 0);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 6).unwrap();
        for p in &t.points {
            assert!((p - &z0).norm() < 1e-12);
        }
    }

    #[test]
    fn trajectory_norms_nonincreasing_and_pythagoras() {
        let mut rng = crate::rng::SplitMix64::new(3);
        let spaces: Vec<Subspace> = (0..3)
            .map(|_| {
                let vs: Vec<Vector> = (0..2).map(|_| rng.gaussian_vector(5)).collect();
                Subspace::span(&vs, 1e-10).unwrap()
            })
            .collect();
        let z0 = rng.unit_vector(5);
        let t =
            run_trajectory(&spaces, &Schedule::SeededRandom { k: 3, seed: 8 }, &z0, 40).unwrap();
        for i in 1..t.norms.len() {
            assert!(t.norms[i] <= t.norms[i - 1] + 1e-12);
            let step = (&t.points[i] - &t.points[i - 1]).norm_squared();
            assert!((step - t.per_step_drop[i - 1]).abs() < 1e-10);
        }
    }

    #[test]
    fn active_set_contains_current_space_and_all_below_norm() {
        let spaces = two_lines_at(std::f64::consts::FRAC_PI_3);
        let z0 = basis_vector(2, 0);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 3).unwrap();
        // z_1 lies on L_1.
        let a = active_set(&t, &spaces, 1, 1e-6).unwrap();
        assert!(a.contains(&1));
        // A radius above |z_m| captures every subspace through the origin.
        let all = active_set(&t, &spaces, 1, t.norms[1] + 1.0).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn oscillation_of_constant_trajectory_is_zero() {
        let spaces = vec![Subspace::full(2)];
        let z0 = basis_vector(2, 0);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 1 }, &z0, 4).unwrap();
        assert_eq!(oscillation(&t, 0).unwrap(), 0.0);
    }

    #[test]
    fn oscillation_sees_distant_points() {
        // Two orthogonal lines: z0 = e1 collapses to 0 after projecting on L2.
        let spaces = vec![line(2, &[(0, 1.0)]), line(2, &[(1, 1.0)])];
        let z0 = basis_vector(2, 0);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 2).unwrap();
        assert!((oscillation(&t, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rate_matches_power_iteration() {
        // Oracle: power iteration on the cycle operator P(L2)P(L1).
        let theta = std::f64::consts::FRAC_PI_3;
        let spaces = two_lines_at(theta);
        let cycle = spaces[1].projector() * spaces[0].projector();
        let mut x = Vector::from_vec(vec![0.6, 0.8]);
        let mut ratio = 0.0;
        for _ in 0..200 {
            let next = &cycle * &x;
            let norm = next.norm();
            ratio = norm / x.norm();
            if norm == 0.0 {
                break;
            }
            x = next / norm;
        }
        assert!((ratio - 0.25).abs() < 1e-9);

        let z0 = basis_vector(2, 0);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 40).unwrap();
        let r = fit_rate(&t, 2, None).unwrap();
        assert!((r - ratio).abs() < 1e-6);
        assert!((r - 0.25).abs() < 1e-6);
    }

    #[test]
    fn fit_rate_zero_norm_on_orthogonal_lines() {
        let spaces = vec![line(2, &[(0, 1.0)]), line(2, &[(1, 1.0)])];
        let z0 = basis_vector(2, 0);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 8).unwrap();
        assert_eq!(fit_rate(&t, 2, None).unwrap_err().code(), "ZERO_NORM");
    }

    #[test]
    fn fit_rate_one_for_equal_lines() {
        let l = line(2, &[(0, 1.0), (1, 2.0)]);
        let spaces = vec![l.clone(), l];
        let z0 = Vector::from_vec(vec![1.0, 2.0]) / 5.0_f64.sqrt();
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 20).unwrap();
        assert!((fit_rate(&t, 2, None).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_space_drop_holds_on_random_two_line_segments() {
        // Oracle for the segment inequality: direct evaluation over 100
        // random two-line configurations.
        let mut rng = crate::rng::SplitMix64::new(77);
        for trial in 0..100 {
            let dim = 2 + (trial % 4);
            let spaces = vec![
                Subspace::line(&rng.unit_vector(dim)).unwrap(),
                Subspace::line(&rng.unit_vector(dim)).unwrap(),
            ];
            let z0 = rng.unit_vector(dim);
            let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 12).unwrap();
            // z_m must itself be an iterate (on one of the two lines), so the
            // segment starts at m >= 1.
            for m in 1..4 {
                for n in m..12 {
                    assert!(check_two_space_drop(&t, m, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn two_space_drop_trivial_cases() {
        let spaces = two_lines_at(1.0);
        let z0 = basis_vector(2, 0);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 2 }, &z0, 4).unwrap();
        assert!(check_two_space_drop(&t, 2, 2).unwrap());
    }

    #[test]
    fn two_space_drop_rejects_three_indices() {
        let spaces = vec![
            line(3, &[(0, 1.0)]),
            line(3, &[(1, 1.0)]),
            line(3, &[(0, 1.0), (1, 1.0), (2, 1.0)]),
        ];
        let z0 = Vector::from_vec(vec![1.0, 1.0, 1.0]);
        let t = run_trajectory(&spaces, &Schedule::Cyclic { k: 3 }, &z0, 6).unwrap();
        assert_eq!(
            check_two_space_drop(&t, 0, 4).unwrap_err().code(),
            "PRECONDITION_VIOLATED"
        );
    }
}
