//! Named example configurations at finite truncation.
//!
//! Each constructor lays blocks out on a contiguous 0-based ambient basis;
//! the original two- or three-vector blocks indexed by j become coordinates
//! 2(j-1).. or 3(j-1)... Truncation always keeps blocks j = 1..=J.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::input;
use crate::johnson::{FourSet, FourTupleLabel};
use crate::parallel;
use crate::regularity::{witness_search_with, WitnessOptions};
use crate::subspace::{basis_vector, Subspace, Vector, RANK_TOL};
use crate::transport::{build_transport_plan, TransportPlan};
use crate::{Error, Result};

/// Three subspaces of R^(3J): a pair with vanishing angles inside blocks,
/// plus a third space orthogonal to both. The triple stays regular while
/// the pair degenerates.
pub fn build_bk(j_max: usize) -> Result<Vec<Subspace>> {
    if j_max == 0 {
        return Err(input("bk: J must be >= 1"));
    }
    let n = 3 * j_max;
    let mut l1 = Vec::with_capacity(j_max);
    let mut l2 = Vec::with_capacity(j_max);
    let mut l3 = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let base = 3 * (j - 1);
        l1.push(basis_vector(n, base + 1));
        l2.push(basis_vector(n, base + 1) + basis_vector(n, base + 2) / j as f64);
        l3.push(basis_vector(n, base));
    }
    Ok(vec![
        Subspace::span(&l1, RANK_TOL)?,
        Subspace::span(&l2, RANK_TOL)?,
        Subspace::span(&l3, RANK_TOL)?,
    ])
}

/// Three families of lines in R^(2J) whose block angles shrink like 1/j:
/// the complement sums degenerate, yet every trajectory still converges.
pub fn build_slownono(j_max: usize) -> Result<Vec<Subspace>> {
    if j_max == 0 {
        return Err(input("slownono: J must be >= 1"));
    }
    let n = 2 * j_max;
    let mut l1 = Vec::with_capacity(j_max);
    let mut l2 = Vec::with_capacity(j_max);
    let mut l3 = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let base = 2 * (j - 1);
        let lead = basis_vector(n, base);
        let tilt = basis_vector(n, base + 1) / j as f64;
        l1.push(lead.clone());
        l2.push(&lead + &tilt);
        l3.push(&lead + &tilt * 2.0);
    }
    Ok(vec![
        Subspace::span(&l1, RANK_TOL)?,
        Subspace::span(&l2, RANK_TOL)?,
        Subspace::span(&l3, RANK_TOL)?,
    ])
}

/// K subspaces of R^(2J) for K >= 4: the slownono pair plus K - 2 mutually
/// orthogonal line families split by residue class. Every 4-tuple stays
/// regular although each triple {1, 2, i} degenerates.
pub fn build_not3(k: usize, j_max: usize) -> Result<Vec<Subspace>> {
    if k < 4 {
        return Err(input("not3: K must be >= 4"));
    }
    if j_max < k - 2 {
        return Err(input(format!(
            "not3: J must be >= K-2 = {} so every residue class is inhabited",
            k - 2
        )));
    }
    let n = 2 * j_max;
    let modulus = k - 2;
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut rest: Vec<Vec<Vector>> = vec![Vec::new(); k - 2];
    for j in 1..=j_max {
        let base = 2 * (j - 1);
        let lead = basis_vector(n, base);
        let tilt = basis_vector(n, base + 1) / j as f64;
        l1.push(lead.clone());
        l2.push(&lead + &tilt);
        for i in 3..=k {
            if j % modulus == i % modulus {
                rest[i - 3].push(&lead + &tilt * 2.0);
            }
        }
    }
    let mut out = vec![
        Subspace::span(&l1, RANK_TOL)?,
        Subspace::span(&l2, RANK_TOL)?,
    ];
    for vectors in rest {
        out.push(Subspace::span(&vectors, RANK_TOL)?);
    }
    Ok(out)
}

/// K subspaces of R^(5 |V| n_max) realizing a prescribed 4-tuple geometry:
/// every A in V becomes degenerate (growing intersection when alpha(A) is
/// false, vanishing witness gap when alpha(A) is true) while every 4-tuple
/// outside V stays regular.
///
/// Layout: one 5 n_max-dimensional block per A in sorted V order; within a
/// block the five orthonormal families interleave by n, the shared family
/// first and then one family per member of A in increasing order.
pub fn build_johnbio(
    k: usize,
    v: &[FourSet],
    alpha: &[bool],
    n_max: usize,
) -> Result<Vec<Subspace>> {
    if k < 4 {
        return Err(input("johnbio: K must be >= 4"));
    }
    if v.is_empty() || v.len() != alpha.len() {
        return Err(input("johnbio: V and alpha must be nonempty and aligned"));
    }
    if n_max == 0 {
        return Err(input("johnbio: n_max must be >= 1"));
    }
    let mut sorted: Vec<(FourSet, bool)> = v.iter().copied().zip(alpha.iter().copied()).collect();
    sorted.sort_by_key(|(a, _)| *a);
    sorted.dedup_by_key(|(a, _)| *a);
    if sorted.len() != v.len() {
        return Err(input("johnbio: V has duplicate members"));
    }
    let mut covered = BTreeSet::new();
    for (a, _) in &sorted {
        if a.max_member() > k {
            return Err(input("johnbio: V member exceeds K"));
        }
        for m in a.members() {
            covered.insert(m);
        }
    }
    if covered.len() != k {
        return Err(input("johnbio: V does not cover [K]"));
    }

    let n = 5 * sorted.len() * n_max;
    // Index of e^A_n and of the member families e^A_{i, n}.
    let shared = |block: usize, nn: usize| -> usize { 5 * (block * n_max + (nn - 1)) };
    let member = |block: usize, slot: usize, nn: usize| -> usize {
        5 * (block * n_max + (nn - 1)) + slot + 1
    };

    let mut spans: Vec<Vec<Vector>> = vec![Vec::new(); k];
    for (block, (a, deg)) in sorted.iter().enumerate() {
        let members = a.members();
        for nn in 1..=n_max {
            for (slot, &kk) in members.iter().enumerate() {
                let mut vec = basis_vector(n, shared(block, nn));
                if *deg {
                    vec += basis_vector(n, member(block, slot, nn)) / nn as f64;
                }
                spans[kk - 1].push(vec);
            }
        }
    }
    spans
        .into_iter()
        .map(|vectors| Subspace::span(&vectors, RANK_TOL))
        .collect()
}

/// The five-or-more space divergence configuration: the chained transport
/// spaces as L_1, L_2, L_3 and the chain vectors split by residue class
/// into pairwise orthogonal L_4..L_K.
#[derive(Clone, Debug)]
pub struct Example5 {
    pub subspaces: Vec<Subspace>,
    /// Chain vectors e_1..e_{n+1} in ambient coordinates.
    pub markers: Vec<Vector>,
    pub plan: TransportPlan,
}

impl Example5 {
    pub fn k(&self) -> usize {
        self.subspaces.len()
    }

    /// 1-based residue owner of marker i: the k in 4..=K whose class
    /// contains i.
    pub fn marker_owner(&self, i: usize, k: usize) -> usize {
        let modulus = k - 3;
        (4..=k)
            .find(|kk| kk % modulus == i % modulus)
            .expect("classes partition the indices")
    }

    /// Measured loss of the composite product: per block, project onto the
    /// owner of the block start and then run the block word.
    pub fn composite_loss(&self) -> Result<f64> {
        let k = self.k();
        let mut z = self.markers[0].clone();
        for (i, block) in self.plan.blocks.iter().enumerate() {
            let owner = self.marker_owner(i + 1, k);
            z = self.subspaces[owner - 1].project(&z)?;
            z = crate::transport::eval_word_projections(&block.word, &block.lines, &z)?;
        }
        Ok((&z - self.markers.last().expect("markers")).norm())
    }
}

/// Build the configuration for K >= 5 from per-block transport targets.
pub fn build_example5(k: usize, epsilons: &[f64]) -> Result<Example5> {
    if k < 5 {
        return Err(input("example5: K must be >= 5"));
    }
    if epsilons.is_empty() {
        return Err(input("example5: epsilons must be nonempty"));
    }
    let plan = build_transport_plan(epsilons).map_err(|e| match e {
        Error::ChainDegraded { .. } => e,
        Error::ConstructionFailed(msg) => {
            Error::ConstructionFailed(format!("example5: transport construction failed: {msg}"))
        }
        other => other,
    })?;
    let n_markers = plan.blocks.len() + 1;
    let modulus = k - 3;
    if n_markers < modulus {
        return Err(input(format!(
            "example5: need at least {modulus} chain vectors for K = {k}, got {n_markers}"
        )));
    }
    let mut markers = Vec::with_capacity(n_markers);
    markers.push(plan.blocks[0].from.clone());
    for b in &plan.blocks {
        markers.push(b.to.clone());
    }
    let mut subspaces = vec![plan.x.clone(), plan.y.clone(), plan.z.clone()];
    for kk in 4..=k {
        let class: Vec<Vector> = (1..=n_markers)
            .filter(|i| i % modulus == kk % modulus)
            .map(|i| markers[i - 1].clone())
            .collect();
        if class.is_empty() {
            return Err(input(format!("example5: residue class of {kk} is empty")));
        }
        subspaces.push(Subspace::span(&class, RANK_TOL)?);
    }
    Ok(Example5 {
        subspaces,
        markers,
        plan,
    })
}

/// Thresholds of the 4-tuple classifier.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// Witness-gap decay factor (first to last level) that marks a tuple's
    /// complement sum as degenerate.
    pub gap_decay: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds { gap_decay: 10.0 }
    }
}

/// Classify every 4-tuple of a truncation-parameterized family.
///
/// A tuple is INF_INTERSECTION when its intersection dimension strictly
/// grows at every ladder step, NONCLOSED_SUM when its witness gap decays by
/// the threshold factor from first to last level, and REGULAR otherwise.
pub fn classify_fourtuples<F>(
    build: F,
    truncations: &[usize],
    thresholds: &ClassifyThresholds,
) -> Result<BTreeMap<FourSet, FourTupleLabel>>
where
    F: Fn(usize) -> Result<Vec<Subspace>> + Sync,
{
    if truncations.len() < 2 {
        return Err(input("classify_fourtuples: need at least two levels"));
    }
    if truncations.windows(2).any(|w| w[0] >= w[1]) {
        return Err(input("classify_fourtuples: levels must strictly increase"));
    }
    let families: Vec<Vec<Subspace>> = {
        let built = parallel::map_indexed(truncations.len(), |i| build(truncations[i]));
        let mut out = Vec::with_capacity(built.len());
        for f in built {
            out.push(f?);
        }
        out
    };
    let k = families[0].len();
    if k < 4 {
        return Err(input("classify_fourtuples: need at least 4 subspaces"));
    }
    if families.iter().any(|f| f.len() != k) {
        return Err(input(
            "classify_fourtuples: family size changes across levels",
        ));
    }
    let tuples = crate::johnson::build_johnson(k)?.vertices;
    let opts = WitnessOptions {
        compute_rate: false,
        compute_friedrichs: false,
        ..WitnessOptions::default()
    };
    let results = parallel::map_indexed(tuples.len(), |t| -> Result<(FourSet, FourTupleLabel)> {
        let tuple = tuples[t];
        let mut dims = Vec::with_capacity(families.len());
        let mut gaps = Vec::with_capacity(families.len());
        for family in &families {
            let sub: Vec<Subspace> = tuple
                .members()
                .iter()
                .map(|&i| family[i - 1].clone())
                .collect();
            dims.push(Subspace::intersect_all(&sub, RANK_TOL)?.dim());
            let gap = match witness_search_with(&sub, &opts) {
                Ok(r) => r.witness_gap,
                Err(Error::Empty(_)) => 0.0,
                Err(e) => return Err(e),
            };
            gaps.push(gap);
        }
        let growing = dims.windows(2).all(|w| w[0] < w[1]);
        let label = if growing {
            FourTupleLabel::InfIntersection
        } else {
            let first = gaps[0];
            let last = gaps[gaps.len() - 1];
            if first > 0.0 && last * thresholds.gap_decay <= first {
                FourTupleLabel::NonclosedSum
            } else {
                FourTupleLabel::Regular
            }
        };
        Ok((tuple, label))
    });
    let mut labels = BTreeMap::new();
    for r in results {
        let (tuple, label) = r?;
        labels.insert(tuple, label);
    }
    Ok(labels)
}

/// Serializable description of a gallery configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GalleryConfig {
    Bk {
        j: usize,
    },
    Slownono {
        j: usize,
    },
    Example5 {
        k: usize,
        epsilons: Vec<f64>,
    },
    Not3 {
        k: usize,
        j: usize,
    },
    Johnbio {
        k: usize,
        v: Vec<[usize; 4]>,
        alpha: Vec<bool>,
        n_max: usize,
    },
}

impl GalleryConfig {
    pub fn family_name(&self) -> &'static str {
        match self {
            GalleryConfig::Bk { .. } => "bk",
            GalleryConfig::Slownono { .. } => "slownono",
            GalleryConfig::Example5 { .. } => "example5",
            GalleryConfig::Not3 { .. } => "not3",
            GalleryConfig::Johnbio { .. } => "johnbio",
        }
    }

    /// How the family's block indexing maps onto the contiguous 0-based
    /// ambient basis; recorded next to the config when subspaces are
    /// written out.
    pub fn layout_note(&self) -> &'static str {
        match self {
            GalleryConfig::Bk { .. } => {
                "block j = 1..=J occupies coordinates 3(j-1)..3(j-1)+2; \
                 L1 spans offset 1, L2 spans offset 1 tilted by offset 2 over j, \
                 L3 spans offset 0"
            }
            GalleryConfig::Slownono { .. } | GalleryConfig::Not3 { .. } => {
                "block j = 1..=J occupies coordinates 2(j-1)..2(j-1)+1; \
                 lines span offset 0 tilted by offset 1 over j"
            }
            GalleryConfig::Johnbio { .. } => {
                "one 5*n_max block per member of sorted V; within a block the \
                 five families interleave by n: shared vector first, then one \
                 slot per member in increasing order"
            }
            GalleryConfig::Example5 { .. } => {
                "coordinate i-1 is the i-th chain vector; L1..L3 are the \
                 transport plan's X, Y, Z and L4.. split the chain vectors by \
                 residue class"
            }
        }
    }

    /// Number of subspaces the configuration builds.
    pub fn k(&self) -> usize {
        match self {
            GalleryConfig::Bk { .. } | GalleryConfig::Slownono { .. } => 3,
            GalleryConfig::Example5 { k, .. }
            | GalleryConfig::Not3 { k, .. }
            | GalleryConfig::Johnbio { k, .. } => *k,
        }
    }

    /// The configured truncation knob (J or n_max); the transport-backed
    /// family has none and reports the block count.
    pub fn truncation(&self) -> usize {
        match self {
            GalleryConfig::Bk { j }
            | GalleryConfig::Slownono { j }
            | GalleryConfig::Not3 { j, .. } => *j,
            GalleryConfig::Johnbio { n_max, .. } => *n_max,
            GalleryConfig::Example5 { epsilons, .. } => epsilons.len(),
        }
    }

    /// Build at the configured truncation.
    pub fn build(&self) -> Result<Vec<Subspace>> {
        self.build_at(self.truncation())
    }

    /// Build with the truncation knob overridden. The transport-backed
    /// family ignores the override (its size is set by the epsilon list).
    pub fn build_at(&self, truncation: usize) -> Result<Vec<Subspace>> {
        match self {
            GalleryConfig::Bk { .. } => build_bk(truncation),
            GalleryConfig::Slownono { .. } => build_slownono(truncation),
            GalleryConfig::Not3 { k, .. } => build_not3(*k, truncation),
            GalleryConfig::Johnbio { k, v, alpha, .. } => {
                let sets: Vec<FourSet> =
                    v.iter().map(|m| FourSet::new(*m)).collect::<Result<_>>()?;
                build_johnbio(*k, &sets, alpha, truncation)
            }
            GalleryConfig::Example5 { k, epsilons } => Ok(build_example5(*k, epsilons)?.subspaces),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularity::witness_search;

    #[test]
    fn bk_first_block_angle_is_quarter_pi() {
        // At j = 1 the pair's block lines meet at exactly pi/4: the tilted
        // direction is e2 + e3 with cosine 1/sqrt(2) against e2.
        let family = build_bk(1).unwrap();
        let prof = family[0].principal_angles(&family[1], RANK_TOL).unwrap();
        assert!((prof.principal_angles[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert_eq!(family[0].intersect(&family[1], RANK_TOL).unwrap().dim(), 0);
    }

    #[test]
    fn bk_third_space_is_orthogonal_to_the_pair() {
        for j in [1usize, 4, 9] {
            let family = build_bk(j).unwrap();
            for other in 0..2 {
                let cross = family[2].basis().tr_mul(family[other].basis());
                assert!(cross.norm() < 1e-12, "J={j}");
            }
        }
    }

    #[test]
    fn bk_pair_gap_shrinks_triple_gap_does_not() {
        let family = build_bk(30).unwrap();
        let pair = witness_search(&[family[0].clone(), family[1].clone()]).unwrap();
        assert!(pair.witness_gap <= 2.0 / 900.0);
        let triple = witness_search(&family).unwrap();
        assert!(triple.witness_gap >= 0.5);
    }

    #[test]
    fn slownono_intersection_is_zero() {
        for j in [1usize, 5, 12] {
            let family = build_slownono(j).unwrap();
            let common = Subspace::intersect_all(&family, RANK_TOL).unwrap();
            assert_eq!(common.dim(), 0, "J={j}");
        }
    }

    #[test]
    fn slownono_last_block_distances() {
        // dist(e_{2J-1}, L_k) <= 2/J for every k; exact values are the sines
        // of the block angles.
        let j = 25;
        let family = build_slownono(j).unwrap();
        let probe = basis_vector(2 * j, 2 * (j - 1));
        for (idx, s) in family.iter().enumerate() {
            let d = s.distance(&probe).unwrap();
            assert!(d <= 2.0 / j as f64 + 1e-12, "L{} dist {d}", idx + 1);
        }
        let tilt = 1.0 / j as f64;
        let expect_l2 = tilt / (1.0 + tilt * tilt).sqrt();
        assert!((family[1].distance(&probe).unwrap() - expect_l2).abs() < 1e-12);
    }

    #[test]
    fn slownono_trajectories_reach_zero() {
        let j = 4;
        let family = build_slownono(j).unwrap();
        let mut rng = crate::rng::SplitMix64::new(17);
        for seed in 0..3u64 {
            let z0 = rng.unit_vector(2 * j);
            let schedule = crate::schedule::Schedule::SeededRandom { k: 3, seed };
            let (_, norm) =
                crate::schedule::run_to_norm(&family, &schedule, &z0, 200_000, 1e-3).unwrap();
            assert!(norm < 1e-3);
        }
    }

    #[test]
    fn not3_tail_spaces_pairwise_orthogonal() {
        let family = build_not3(6, 12).unwrap();
        assert_eq!(family.len(), 6);
        for i in 2..6 {
            for j in (i + 1)..6 {
                let cross = family[i].basis().tr_mul(family[j].basis());
                assert!(cross.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn not3_requires_enough_blocks() {
        assert!(build_not3(6, 3).is_err());
        assert!(build_not3(3, 10).is_err());
    }

    #[test]
    fn johnbio_alpha_zero_grows_intersection() {
        let v = [FourSet::new([1, 2, 3, 4]).unwrap()];
        let family = build_johnbio(4, &v, &[false], 6).unwrap();
        let common = Subspace::intersect_all(&family, RANK_TOL).unwrap();
        assert_eq!(common.dim(), 6);
    }

    #[test]
    fn johnbio_alpha_one_has_near_vectors() {
        let v = [FourSet::new([1, 2, 3, 4]).unwrap()];
        let n_max = 8;
        let family = build_johnbio(4, &v, &[true], n_max).unwrap();
        let common = Subspace::intersect_all(&family, RANK_TOL).unwrap();
        assert_eq!(common.dim(), 0);
        for nn in 1..=n_max {
            let probe = basis_vector(5 * n_max, 5 * (nn - 1));
            for s in &family {
                assert!(s.distance(&probe).unwrap() <= 1.0 / nn as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn johnbio_tuples_outside_v_stay_regular() {
        let v = [
            FourSet::new([1, 2, 3, 4]).unwrap(),
            FourSet::new([2, 3, 4, 5]).unwrap(),
        ];
        let family = build_johnbio(5, &v, &[true, true], 6).unwrap();
        let outside = FourSet::new([1, 3, 4, 5]).unwrap();
        let sub: Vec<Subspace> = outside
            .members()
            .iter()
            .map(|&i| family[i - 1].clone())
            .collect();
        assert_eq!(Subspace::intersect_all(&sub, RANK_TOL).unwrap().dim(), 0);
        let gap = witness_search(&sub).unwrap().witness_gap;
        let bound = 1.0 / (4.0 * (v.len() * v.len()) as f64);
        assert!(gap >= bound, "gap {gap} below {bound}");
    }

    #[test]
    fn johnbio_validates_cover() {
        let v = [FourSet::new([1, 2, 3, 4]).unwrap()];
        assert!(build_johnbio(5, &v, &[true], 4).is_err());
    }

    #[test]
    fn example5_structure() {
        let ex = build_example5(5, &[0.3, 0.3, 0.3]).unwrap();
        assert_eq!(ex.k(), 5);
        let l4 = &ex.subspaces[3];
        let l5 = &ex.subspaces[4];
        let cross = l4.basis().tr_mul(l5.basis());
        assert!(cross.norm() < 1e-12);
        let joined = l4.complement().join(&l5.complement()).unwrap();
        assert_eq!(joined.dim(), l4.ambient_dim());
        // Markers project onto their residue owner untouched.
        let k = ex.k();
        for (i, marker) in ex.markers.iter().enumerate() {
            let owner = ex.marker_owner(i + 1, k);
            let p = ex.subspaces[owner - 1].project(marker).unwrap();
            assert!((p - marker).norm() < 1e-12);
        }
        let loss = ex.composite_loss().unwrap();
        assert!(loss <= 0.9);
    }

    #[test]
    fn classify_recovers_johnbio_labels_small() {
        let v = [
            FourSet::new([1, 2, 3, 4]).unwrap(),
            FourSet::new([2, 3, 4, 5]).unwrap(),
        ];
        let alpha = [true, false];
        // The gap decays quadratically in the level, so a 4x level ratio
        // clears the 10x threshold with margin.
        let build = |n_max: usize| build_johnbio(5, &v, &alpha, n_max);
        let labels = classify_fourtuples(build, &[8, 32], &ClassifyThresholds::default()).unwrap();
        assert_eq!(labels[&v[0]], FourTupleLabel::NonclosedSum);
        assert_eq!(labels[&v[1]], FourTupleLabel::InfIntersection);
        for (tuple, label) in &labels {
            if !v.contains(tuple) {
                assert_eq!(*label, FourTupleLabel::Regular, "tuple {tuple}");
            }
        }
    }

    #[test]
    fn gallery_config_round_trips_serde() {
        let cfg = GalleryConfig::Johnbio {
            k: 5,
            v: vec![[1, 2, 3, 4], [2, 3, 4, 5]],
            alpha: vec![true, false],
            n_max: 10,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: GalleryConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.k(), 5);
        assert_eq!(back.truncation(), 10);
        assert_eq!(back.family_name(), "johnbio");
    }
}
