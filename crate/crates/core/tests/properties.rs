//! Property tests for the core invariants: projection algebra, trajectory
//! bookkeeping, word evaluation, and walk block structure.

use proptest::prelude::*;

use projektor::johnson::{build_johnson, symbol_sequences, validate_block_structure, FourSet};
use projektor::rng::SplitMix64;
use projektor::schedule::{run_trajectory, Schedule};
use projektor::subspace::{Subspace, Vector, RANK_TOL};
use projektor::transport::{eval_word_projections, Word};

fn vector_strategy(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-10.0..10.0f64, dim).prop_map(Vector::from_vec)
}

fn family_strategy(dim: usize, count: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(vector_strategy(dim), 1..=count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_is_idempotent(vs in family_strategy(6, 4), x in vector_strategy(6)) {
        let s = Subspace::span(&vs, RANK_TOL).unwrap();
        let once = s.project(&x).unwrap();
        let twice = s.project(&once).unwrap();
        prop_assert!((&twice - &once).norm() <= 1e-12 * (1.0 + x.norm()));
    }

    #[test]
    fn residual_is_orthogonal_to_the_basis(vs in family_strategy(6, 4), x in vector_strategy(6)) {
        let s = Subspace::span(&vs, RANK_TOL).unwrap();
        let residual = &x - s.project(&x).unwrap();
        for b in s.basis().column_iter() {
            prop_assert!(b.dot(&residual).abs() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn projection_contracts(vs in family_strategy(5, 3), x in vector_strategy(5)) {
        let s = Subspace::span(&vs, RANK_TOL).unwrap();
        prop_assert!(s.project(&x).unwrap().norm() <= x.norm() + 1e-12);
    }

    #[test]
    fn complement_splits_the_space(vs in family_strategy(7, 5)) {
        let s = Subspace::span(&vs, RANK_TOL).unwrap();
        let c = s.complement();
        prop_assert_eq!(s.join(&c).unwrap().dim(), 7);
        prop_assert_eq!(s.intersect(&c, RANK_TOL).unwrap().dim(), 0);
    }

    #[test]
    fn join_and_complement_intersection_partition_dimensions(
        vs in family_strategy(6, 3),
        ws in family_strategy(6, 3),
    ) {
        // dim(S join T) + dim(S-perp meet T-perp) = N.
        let s = Subspace::span(&vs, RANK_TOL).unwrap();
        let t = Subspace::span(&ws, RANK_TOL).unwrap();
        let joined = s.join(&t).unwrap().dim();
        let met = s
            .complement()
            .intersect(&t.complement(), 1e-8)
            .unwrap()
            .dim();
        prop_assert_eq!(joined + met, 6);
    }

    #[test]
    fn principal_angles_are_symmetric(
        vs in family_strategy(6, 3),
        ws in family_strategy(6, 3)
    ) {
        let s = Subspace::span(&vs, RANK_TOL).unwrap();
        let t = Subspace::span(&ws, RANK_TOL).unwrap();
        prop_assume!(!s.is_zero() && !t.is_zero());
        let a = s.principal_angles(&t, RANK_TOL).unwrap();
        let b = t.principal_angles(&s, RANK_TOL).unwrap();
        prop_assert_eq!(a.principal_angles.len(), b.principal_angles.len());
        // Cosines are the computed primitive; arccos amplifies rounding
        // near zero angles, so symmetry is asserted on cosines.
        for (x, y) in a.principal_angles.iter().zip(&b.principal_angles) {
            prop_assert!((x.cos() - y.cos()).abs() <= 1e-12);
        }
        prop_assert!((a.friedrichs_cos - b.friedrichs_cos).abs() <= 1e-12);
        prop_assert_eq!(a.dim_intersection, b.dim_intersection);
    }

    #[test]
    fn trajectories_decrease_and_satisfy_pythagoras(
        seed in 0u64..1000,
        steps in 1usize..40,
    ) {
        let mut rng = SplitMix64::new(seed);
        let n = 4 + rng.next_index(4);
        let family: Vec<Subspace> = (0..3)
            .map(|_| {
                let vs: Vec<Vector> = (0..1 + rng.next_index(3))
                    .map(|_| rng.gaussian_vector(n))
                    .collect();
                Subspace::span(&vs, RANK_TOL).unwrap()
            })
            .collect();
        let z0 = rng.unit_vector(n);
        let schedule = Schedule::SeededRandom { k: 3, seed };
        let t = run_trajectory(&family, &schedule, &z0, steps).unwrap();
        for i in 1..t.norms.len() {
            prop_assert!(t.norms[i] <= t.norms[i - 1] + 1e-12);
            let step = (&t.points[i] - &t.points[i - 1]).norm_squared();
            prop_assert!((step - t.per_step_drop[i - 1]).abs() <= 1e-10);
        }
    }

    #[test]
    fn word_concat_composes(
        first in prop::collection::vec(1usize..=3, 0..6),
        second in prop::collection::vec(1usize..=3, 0..6),
        seed in 0u64..500,
    ) {
        let mut rng = SplitMix64::new(seed);
        let spaces: Vec<Subspace> = (0..3)
            .map(|_| Subspace::line(&rng.unit_vector(5)).unwrap())
            .collect();
        let x = rng.gaussian_vector(5);
        let wf = Word::new(first, 3).unwrap();
        let ws = Word::new(second, 3).unwrap();
        let combined = Word::concat(&ws, &wf).unwrap();
        let direct = eval_word_projections(&combined, &spaces, &x).unwrap();
        let staged = eval_word_projections(
            &ws,
            &spaces,
            &eval_word_projections(&wf, &spaces, &x).unwrap(),
        ).unwrap();
        prop_assert!((direct - staged).norm() <= 1e-12 * (1.0 + x.norm()));
    }

    #[test]
    fn random_walks_have_block_structure(
        k in 5usize..=8,
        seed in 0u64..200,
    ) {
        // A uniformly random neighbor walk, independent of the library's
        // spanning-walk generator.
        let graph = build_johnson(k).unwrap();
        let mut adjacency = vec![Vec::new(); graph.vertices.len()];
        for &(a, b) in &graph.edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut rng = SplitMix64::new(seed);
        let mut at = rng.next_index(graph.vertices.len());
        let mut walk: Vec<FourSet> = vec![graph.vertices[at]];
        for _ in 0..30 {
            at = adjacency[at][rng.next_index(adjacency[at].len())];
            walk.push(graph.vertices[at]);
        }
        let seqs = symbol_sequences(&walk, k).unwrap();
        for row in &seqs.sequences {
            prop_assert!(validate_block_structure(row));
        }
    }
}
