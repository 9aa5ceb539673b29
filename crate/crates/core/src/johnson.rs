//! The Johnson graph J(K,4) and its role in the divergence condition:
//! covers, connectivity, walks, and the X/Y/Z/0 symbol sequences read off a
//! walk.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{input, precondition};
use crate::rng::SplitMix64;
use crate::Result;

/// Sorted 4-element subset of [K], members 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FourSet {
    members: [usize; 4],
}

impl FourSet {
    pub fn new(mut members: [usize; 4]) -> Result<Self> {
        members.sort_unstable();
        if members[0] == 0 {
            return Err(input("four-set: members are 1-based"));
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(input("four-set: members must be distinct"));
        }
        Ok(FourSet { members })
    }

    pub fn members(&self) -> [usize; 4] {
        self.members
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members.contains(&k)
    }

    pub fn max_member(&self) -> usize {
        self.members[3]
    }

    pub fn intersection(&self, other: &FourSet) -> Vec<usize> {
        self.members
            .iter()
            .filter(|m| other.contains(**m))
            .copied()
            .collect()
    }

    pub fn intersection_size(&self, other: &FourSet) -> usize {
        self.members.iter().filter(|m| other.contains(**m)).count()
    }
}

impl std::fmt::Display for FourSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.members[0], self.members[1], self.members[2], self.members[3]
        )
    }
}

/// J(K,4): vertices are 4-subsets of [K], edges join subsets sharing 3
/// elements.
#[derive(Clone, Debug)]
pub struct JohnsonGraph {
    pub k: usize,
    /// Lexicographically ordered.
    pub vertices: Vec<FourSet>,
    /// Index pairs (i, j) with i < j into `vertices`.
    pub edges: Vec<(usize, usize)>,
}

impl JohnsonGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }
}

/// Build the full J(K,4) with deterministic lexicographic vertex order.
pub fn build_johnson(k: usize) -> Result<JohnsonGraph> {
    if k < 4 {
        return Err(input(format!("J(K,4) needs K >= 4, got {k}")));
    }
    let mut vertices = Vec::new();
    for a in 1..=k {
        for b in (a + 1)..=k {
            for c in (b + 1)..=k {
                for d in (c + 1)..=k {
                    vertices.push(FourSet {
                        members: [a, b, c, d],
                    });
                }
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            if vertices[i].intersection_size(&vertices[j]) == 3 {
                edges.push((i, j));
            }
        }
    }
    Ok(JohnsonGraph { k, vertices, edges })
}

/// Vertices (as member lists) and edges of a generalized subsets graph.
pub type SubsetsGraph = (Vec<Vec<usize>>, Vec<(usize, usize)>);

/// Generalized subsets graph: vertices are `set_size`-subsets of [K], edges
/// join subsets whose intersection has exactly `overlap` elements. Used for
/// the 3-subset variant of the divergence condition.
pub fn subsets_graph(k: usize, set_size: usize, overlap: usize) -> Result<SubsetsGraph> {
    if set_size == 0 || set_size > k || overlap >= set_size {
        return Err(input("subsets_graph: bad parameters"));
    }
    let mut vertices: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..=k {
            cur.push(v);
            rec(v + 1, k, size, cur, out);
            cur.pop();
        }
    }
    rec(1, k, set_size, &mut current, &mut vertices);
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            let inter = vertices[i]
                .iter()
                .filter(|m| vertices[j].contains(m))
                .count();
            if inter == overlap {
                edges.push((i, j));
            }
        }
    }
    Ok((vertices, edges))
}

/// Whether the family covers [K] and whether its induced graph (edges where
/// the intersection has 3 elements) is connected. The empty family is
/// neither; a single vertex is connected.
pub fn is_connected_cover(v: &[FourSet], k: usize) -> (bool, bool) {
    if v.is_empty() {
        return (false, false);
    }
    let mut seen = BTreeSet::new();
    for s in v {
        for m in s.members() {
            seen.insert(m);
        }
    }
    let cover = (1..=k).all(|m| seen.contains(&m));

    let mut visited = vec![false; v.len()];
    let mut queue = VecDeque::new();
    queue.push_back(0);
    visited[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..v.len() {
            if !visited[j] && v[i].intersection_size(&v[j]) == 3 {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    (cover, visited.iter().all(|&b| b))
}

/// Per-4-tuple classification of a family of subspaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FourTupleLabel {
    /// The intersection over the tuple keeps growing with truncation.
    InfIntersection,
    /// The tuple's witness gap decays across the truncation ladder.
    NonclosedSum,
    Regular,
}

impl FourTupleLabel {
    /// Short label used in CSV files.
    pub fn as_csv(&self) -> &'static str {
        match self {
            FourTupleLabel::InfIntersection => "INF",
            FourTupleLabel::NonclosedSum => "NONCLOSED",
            FourTupleLabel::Regular => "REGULAR",
        }
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        match s {
            "INF" => Ok(FourTupleLabel::InfIntersection),
            "NONCLOSED" => Ok(FourTupleLabel::NonclosedSum),
            "REGULAR" => Ok(FourTupleLabel::Regular),
            other => Err(input(format!("unknown label {other:?}"))),
        }
    }
}

/// Search for a connected covering family among the degenerate (non-regular)
/// 4-tuples. Returns the verdict and, when it holds, the lexicographically
/// first qualifying connected component as certificate.
///
/// Taking components of the whole non-regular vertex set is sound and
/// complete: any qualifying family sits inside one component, and enlarging
/// a family preserves cover and connectivity.
pub fn condition_d(
    labels: &BTreeMap<FourSet, FourTupleLabel>,
    k: usize,
) -> (bool, Option<Vec<FourSet>>) {
    let candidates: Vec<FourSet> = labels
        .iter()
        .filter(|(_, l)| **l != FourTupleLabel::Regular)
        .map(|(s, _)| *s)
        .collect();
    if candidates.is_empty() {
        return (false, None);
    }
    // Connected components of the induced graph.
    let mut component = vec![usize::MAX; candidates.len()];
    let mut n_components = 0;
    for start in 0..candidates.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let id = n_components;
        n_components += 1;
        let mut queue = VecDeque::new();
        queue.push_back(start);
        component[start] = id;
        while let Some(i) = queue.pop_front() {
            for j in 0..candidates.len() {
                if component[j] == usize::MAX
                    && candidates[i].intersection_size(&candidates[j]) == 3
                {
                    component[j] = id;
                    queue.push_back(j);
                }
            }
        }
    }
    // Components inherit candidate order, which is lexicographic (BTreeMap);
    // scanning by id therefore finds the lexicographically first qualifier.
    for id in 0..n_components {
        let members: Vec<FourSet> = candidates
            .iter()
            .zip(&component)
            .filter(|(_, c)| **c == id)
            .map(|(s, _)| *s)
            .collect();
        let (cover, connected) = is_connected_cover(&members, k);
        debug_assert!(connected);
        if cover && connected {
            return (true, Some(members));
        }
    }
    (false, None)
}

/// Walk validity: consecutive vertices intersect in exactly 3 elements.
pub fn validate_walk(walk: &[FourSet]) -> bool {
    walk.windows(2).all(|w| w[0].intersection_size(&w[1]) == 3)
}

/// Generate a walk of the requested length in the graph induced on `v`.
///
/// The walk repeats a closed spanning walk (depth-first traversal with
/// backtracking, neighbor order shuffled by the seed), so every window of
/// 4|V| steps visits all vertices and hence covers [K]. A single-vertex
/// family yields the constant walk.
pub fn generate_walk(v: &[FourSet], k: usize, len: usize, seed: u64) -> Result<Vec<FourSet>> {
    if len == 0 {
        return Err(input("generate_walk: length must be positive"));
    }
    let (cover, connected) = is_connected_cover(v, k);
    if !cover {
        return Err(precondition("generate_walk: family does not cover [K]"));
    }
    if !connected {
        return Err(precondition("generate_walk: induced graph is disconnected"));
    }
    if v.len() == 1 {
        return Ok(vec![v[0]; len]);
    }
    // Closed spanning walk by DFS with backtracking.
    let mut rng = SplitMix64::new(seed);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); v.len()];
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i != j && v[i].intersection_size(&v[j]) == 3 {
                adjacency[i].push(j);
            }
        }
    }
    for neighbors in adjacency.iter_mut() {
        rng.shuffle(neighbors);
    }
    let mut tour = Vec::new();
    let mut visited = vec![false; v.len()];
    fn dfs(i: usize, adjacency: &[Vec<usize>], visited: &mut [bool], tour: &mut Vec<usize>) {
        visited[i] = true;
        tour.push(i);
        for &j in &adjacency[i] {
            if !visited[j] {
                dfs(j, adjacency, visited, tour);
                tour.push(i);
            }
        }
    }
    dfs(0, &adjacency, &mut visited, &mut tour);
    debug_assert!(visited.iter().all(|&b| b));
    // The tour starts and ends at vertex 0, so tiling it (dropping the
    // repeated endpoint) stays a walk.
    let period = &tour[..tour.len() - 1];
    let mut walk = Vec::with_capacity(len);
    for step in 0..len {
        walk.push(v[period[step % period.len()]]);
    }
    debug_assert!(validate_walk(&walk));
    Ok(walk)
}

/// Window length within which a generated walk is guaranteed to cover [K].
pub fn covering_window(v_len: usize) -> usize {
    4 * v_len
}

/// Symbol alphabet of the sequences read off a walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    X,
    Y,
    Z,
    /// Zero: index k is inactive at this step.
    O,
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            Symbol::X => 'X',
            Symbol::Y => 'Y',
            Symbol::Z => 'Z',
            Symbol::O => '0',
        };
        write!(f, "{c}")
    }
}

/// Per-index symbol sequences derived from a walk: row k-1 holds the
/// sequence for index k, column i the step reading E_i = A_i cap A_{i+1}.
#[derive(Clone, Debug)]
pub struct SymbolSequences {
    pub k: usize,
    /// `sequences[k-1][i-1]` is the symbol of index k at step i.
    pub sequences: Vec<Vec<Symbol>>,
    pub walk: Vec<FourSet>,
}

impl SymbolSequences {
    pub fn steps(&self) -> usize {
        self.sequences.first().map(|s| s.len()).unwrap_or(0)
    }

    /// Indices active at step i (1-based): {k : s^k_i != 0}.
    pub fn active(&self, step: usize) -> BTreeSet<usize> {
        (1..=self.k)
            .filter(|&k| self.sequences[k - 1][step - 1] != Symbol::O)
            .collect()
    }
}

/// Read the X/Y/Z/0 sequences off a walk.
///
/// Step 1 assigns X, Y, Z to E_1 = A_1 cap A_2 in increasing index order.
/// At step i with E_{i-1} = {a, b, c} and E_i = {a, b, d} (possibly c = d),
/// a and b keep their symbols and d takes over the symbol of c.
pub fn symbol_sequences(walk: &[FourSet], k: usize) -> Result<SymbolSequences> {
    if walk.len() < 2 {
        return Err(input("symbol_sequences: walk needs at least two vertices"));
    }
    if !validate_walk(walk) {
        return Err(input(
            "symbol_sequences: consecutive vertices must share exactly 3 elements",
        ));
    }
    if walk.iter().any(|s| s.max_member() > k) {
        return Err(input("symbol_sequences: walk member exceeds K"));
    }
    let steps = walk.len() - 1;
    let mut sequences = vec![vec![Symbol::O; steps]; k];

    let e1 = walk[0].intersection(&walk[1]);
    sequences[e1[0] - 1][0] = Symbol::X;
    sequences[e1[1] - 1][0] = Symbol::Y;
    sequences[e1[2] - 1][0] = Symbol::Z;

    let mut prev = e1;
    for i in 2..=steps {
        let cur = walk[i - 1].intersection(&walk[i]);
        let carried: Vec<usize> = prev.iter().filter(|m| cur.contains(m)).copied().collect();
        for &m in &carried {
            sequences[m - 1][i - 1] = sequences[m - 1][i - 2];
        }
        if carried.len() == 2 {
            let gone = *prev.iter().find(|m| !cur.contains(m)).expect("one leaves");
            let fresh = *cur.iter().find(|m| !prev.contains(m)).expect("one enters");
            sequences[fresh - 1][i - 1] = sequences[gone - 1][i - 2];
        }
        prev = cur;
    }
    Ok(SymbolSequences {
        k,
        sequences,
        walk: walk.to_vec(),
    })
}

/// Block-structure check for one per-index sequence: the nonzero indicator
/// must be constant, or consist of nonzero runs separated by zero runs of
/// length at least two. Leading and trailing zeros are unconstrained.
pub fn validate_block_structure(seq: &[Symbol]) -> bool {
    let indicator: Vec<bool> = seq.iter().map(|s| *s != Symbol::O).collect();
    if indicator.iter().all(|&b| b) || indicator.iter().all(|&b| !b) {
        return true;
    }
    let mut i = 0;
    // Skip leading zeros.
    while i < indicator.len() && !indicator[i] {
        i += 1;
    }
    while i < indicator.len() {
        // Inside a nonzero run.
        while i < indicator.len() && indicator[i] {
            i += 1;
        }
        // Count the zero run that follows.
        let mut zeros = 0;
        while i < indicator.len() && !indicator[i] {
            zeros += 1;
            i += 1;
        }
        if i < indicator.len() && zeros < 2 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(m: [usize; 4]) -> FourSet {
        FourSet::new(m).unwrap()
    }

    #[test]
    fn four_set_requires_distinct_members() {
        assert!(FourSet::new([1, 2, 3, 3]).is_err());
        assert!(FourSet::new([0, 1, 2, 3]).is_err());
        assert_eq!(fs([4, 2, 3, 1]).members(), [1, 2, 3, 4]);
    }

    #[test]
    fn johnson_k4_is_a_point() {
        let g = build_johnson(4).unwrap();
        assert_eq!(g.vertices.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn johnson_k5_is_complete() {
        let g = build_johnson(5).unwrap();
        assert_eq!(g.vertices.len(), 5);
        assert_eq!(g.edges.len(), 10);
    }

    #[test]
    fn johnson_k6_counts_from_brute_force() {
        // Oracle: brute force over all vertex pairs.
        let g = build_johnson(6).unwrap();
        assert_eq!(g.vertices.len(), 15);
        let mut brute = 0;
        for i in 0..g.vertices.len() {
            for j in (i + 1)..g.vertices.len() {
                if g.vertices[i].intersection_size(&g.vertices[j]) == 3 {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 60);
        assert_eq!(g.edges.len(), 60);
    }

    #[test]
    fn johnson_degrees_match_closed_form() {
        // Degree of J(K,4) is 4(K-4), checked against adjacency counts.
        for k in 5..=9 {
            let g = build_johnson(k).unwrap();
            for v in 0..g.vertices.len() {
                assert_eq!(g.degree(v), 4 * (k - 4), "K={k} vertex {v}");
            }
        }
    }

    #[test]
    fn johnson_rejects_small_k() {
        assert_eq!(build_johnson(3).unwrap_err().code(), "INPUT_ERROR");
    }

    #[test]
    fn connected_cover_cases() {
        assert_eq!(is_connected_cover(&[fs([1, 2, 3, 4])], 4), (true, true));
        assert_eq!(
            is_connected_cover(&[fs([1, 2, 3, 4]), fs([5, 6, 7, 8])], 8),
            (true, false)
        );
        assert_eq!(
            is_connected_cover(&[fs([1, 2, 3, 4]), fs([2, 3, 4, 5])], 5),
            (true, true)
        );
    }

    #[test]
    fn condition_d_all_nonclosed_k5() {
        let g = build_johnson(5).unwrap();
        let labels: BTreeMap<FourSet, FourTupleLabel> = g
            .vertices
            .iter()
            .map(|v| (*v, FourTupleLabel::NonclosedSum))
            .collect();
        let (holds, cert) = condition_d(&labels, 5);
        assert!(holds);
        assert_eq!(cert.unwrap().len(), 5);
    }

    #[test]
    fn condition_d_all_regular_fails() {
        let g = build_johnson(5).unwrap();
        let labels: BTreeMap<FourSet, FourTupleLabel> = g
            .vertices
            .iter()
            .map(|v| (*v, FourTupleLabel::Regular))
            .collect();
        let (holds, cert) = condition_d(&labels, 5);
        assert!(!holds);
        assert!(cert.is_none());
    }

    #[test]
    fn condition_d_two_tuple_cover() {
        // Oracle: is_connected_cover on the candidate set.
        let g = build_johnson(5).unwrap();
        let special = [fs([1, 2, 3, 4]), fs([1, 2, 3, 5])];
        let (cover, connected) = is_connected_cover(&special, 5);
        assert!(cover && connected);

        let labels: BTreeMap<FourSet, FourTupleLabel> = g
            .vertices
            .iter()
            .map(|v| {
                let label = if special.contains(v) {
                    FourTupleLabel::NonclosedSum
                } else {
                    FourTupleLabel::Regular
                };
                (*v, label)
            })
            .collect();
        let (holds, cert) = condition_d(&labels, 5);
        assert!(holds);
        assert_eq!(cert.unwrap(), special.to_vec());
    }

    #[test]
    fn condition_d_is_monotone() {
        // Adding non-regular labels never flips the verdict to false.
        let g = build_johnson(6).unwrap();
        let special = [fs([1, 2, 3, 4]), fs([2, 3, 4, 5]), fs([3, 4, 5, 6])];
        let mut labels: BTreeMap<FourSet, FourTupleLabel> = g
            .vertices
            .iter()
            .map(|v| {
                let label = if special.contains(v) {
                    FourTupleLabel::NonclosedSum
                } else {
                    FourTupleLabel::Regular
                };
                (*v, label)
            })
            .collect();
        assert!(condition_d(&labels, 6).0);
        let upgrade: Vec<FourSet> = g.vertices.to_vec();
        for v in upgrade {
            labels.insert(v, FourTupleLabel::InfIntersection);
            assert!(condition_d(&labels, 6).0);
        }
    }

    #[test]
    fn walk_on_single_vertex_is_constant() {
        let walk = generate_walk(&[fs([1, 2, 3, 4])], 4, 5, 0).unwrap();
        assert_eq!(walk.len(), 5);
        assert!(walk.iter().all(|a| *a == fs([1, 2, 3, 4])));
    }

    #[test]
    fn walk_k5_is_valid_and_covers_windows() {
        // Oracle: pairwise intersection check on the generated walk.
        let g = build_johnson(5).unwrap();
        let walk = generate_walk(&g.vertices, 5, 40, 0).unwrap();
        assert_eq!(walk.len(), 40);
        assert!(validate_walk(&walk));
        let window = covering_window(g.vertices.len());
        for start in 0..walk.len().saturating_sub(window) {
            let mut seen = BTreeSet::new();
            for a in &walk[start..start + window] {
                for m in a.members() {
                    seen.insert(m);
                }
            }
            assert_eq!(seen.len(), 5);
        }
    }

    #[test]
    fn walk_rejects_non_cover() {
        let err = generate_walk(&[fs([1, 2, 3, 4])], 5, 3, 0).unwrap_err();
        assert_eq!(err.code(), "PRECONDITION_VIOLATED");
    }

    #[test]
    fn walk_rejects_disconnected() {
        let err = generate_walk(&[fs([1, 2, 3, 4]), fs([5, 6, 7, 8])], 8, 3, 0).unwrap_err();
        assert_eq!(err.code(), "PRECONDITION_VIOLATED");
    }

    #[test]
    fn symbols_first_step_in_index_order() {
        let walk = [fs([1, 2, 3, 4]), fs([1, 2, 3, 5])];
        let seqs = symbol_sequences(&walk, 5).unwrap();
        assert_eq!(seqs.sequences[0][0], Symbol::X);
        assert_eq!(seqs.sequences[1][0], Symbol::Y);
        assert_eq!(seqs.sequences[2][0], Symbol::Z);
        assert_eq!(seqs.sequences[3][0], Symbol::O);
        assert_eq!(seqs.sequences[4][0], Symbol::O);
    }

    #[test]
    fn symbols_carry_over_on_backtrack() {
        // Oracle: independent hand simulation of the transfer rule. With
        // E_1 = E_2 = {1,2,3} every active index keeps its symbol.
        let walk = [fs([1, 2, 3, 4]), fs([1, 2, 3, 5]), fs([1, 2, 3, 4])];
        let seqs = symbol_sequences(&walk, 5).unwrap();
        for k in 0..3 {
            assert_eq!(seqs.sequences[k][1], seqs.sequences[k][0]);
        }
        assert_eq!(seqs.sequences[3][1], Symbol::O);
    }

    #[test]
    fn symbols_transfer_to_entering_index() {
        // E_1 = {2,3,4}: X,Y,Z on 2,3,4. E_2 = {2,3,5}: 4 leaves, 5 enters
        // and takes over the symbol of 4.
        let walk = [fs([1, 2, 3, 4]), fs([2, 3, 4, 5]), fs([2, 3, 5, 6])];
        let seqs = symbol_sequences(&walk, 6).unwrap();
        assert_eq!(seqs.sequences[1][0], Symbol::X);
        assert_eq!(seqs.sequences[2][0], Symbol::Y);
        assert_eq!(seqs.sequences[3][0], Symbol::Z);
        assert_eq!(seqs.sequences[1][1], Symbol::X);
        assert_eq!(seqs.sequences[2][1], Symbol::Y);
        assert_eq!(seqs.sequences[4][1], Symbol::Z);
        assert_eq!(seqs.sequences[3][1], Symbol::O);
    }

    #[test]
    fn each_column_has_exactly_one_of_each_symbol() {
        let g = build_johnson(6).unwrap();
        let walk = generate_walk(&g.vertices, 6, 60, 3).unwrap();
        let seqs = symbol_sequences(&walk, 6).unwrap();
        for i in 1..=seqs.steps() {
            let mut counts = BTreeMap::new();
            for k in 1..=6 {
                *counts.entry(seqs.sequences[k - 1][i - 1]).or_insert(0) += 1;
            }
            assert_eq!(counts.get(&Symbol::X), Some(&1));
            assert_eq!(counts.get(&Symbol::Y), Some(&1));
            assert_eq!(counts.get(&Symbol::Z), Some(&1));
            // Active set equals the step's edge intersection.
            let e: BTreeSet<usize> = seqs.walk[i - 1]
                .intersection(&seqs.walk[i])
                .into_iter()
                .collect();
            assert_eq!(seqs.active(i), e);
        }
    }

    #[test]
    fn block_structure_examples() {
        use Symbol::{O, X};
        assert!(validate_block_structure(&[X, X, X, O, O, X, X]));
        assert!(!validate_block_structure(&[X, O, X]));
        assert!(validate_block_structure(&[O, O, O]));
        assert!(validate_block_structure(&[X, X]));
        assert!(validate_block_structure(&[O, X, X, O]));
        assert!(!validate_block_structure(&[O, X, O, X, O]));
    }

    #[test]
    fn subsets_graph_triples() {
        let (vertices, edges) = subsets_graph(4, 3, 2).unwrap();
        assert_eq!(vertices.len(), 4);
        // Any two distinct 3-subsets of [4] share exactly 2 elements.
        assert_eq!(edges.len(), 6);
    }
}
