//! Vertex pairings: can the sites be split into adjacent disjoint pairs so
//! that a full layer of two-qubit gates executes in one time step? The
//! matching check decides it; the Hamiltonian-cycle search additionally
//! produces the alternate-edge pairing used by cycle-structured layouts.

use crate::graph::{norm_edge, GraphError, InteractionGraph};
use petgraph::graph::UnGraph;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDecomposition {
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingOutcome {
    /// A matching of size `floor(n/2)` exists; all sites (up to one, for odd
    /// n) can gate simultaneously.
    Full(PairDecomposition),
    /// Best matching found, plus the sites left out by it.
    Deficient { pairs: PairDecomposition, unmatched: Vec<usize> },
}

/// Maximum matching test for one-step full-layer execution.
pub fn check_pairing_feasibility(g: &InteractionGraph) -> MatchingOutcome {
    let n = g.vertex_count();
    let mut pg = UnGraph::<(), ()>::default();
    let nodes: Vec<_> = (0..n).map(|_| pg.add_node(())).collect();
    for &(u, v) in g.edges() {
        pg.add_edge(nodes[u], nodes[v], ());
    }
    let matching = petgraph::algo::matching::maximum_matching(&pg);
    let mut pairs: Vec<(usize, usize)> =
        matching.edges().map(|(a, b)| norm_edge(a.index(), b.index())).collect();
    pairs.sort_unstable();
    let mut matched = vec![false; n];
    for &(u, v) in &pairs {
        matched[u] = true;
        matched[v] = true;
    }
    let decomposition = PairDecomposition { pairs };
    if decomposition.pairs.len() == n / 2 {
        MatchingOutcome::Full(decomposition)
    } else {
        let unmatched = (0..n).filter(|&v| !matched[v]).collect();
        MatchingOutcome::Deficient { pairs: decomposition, unmatched }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HamiltonianOutcome {
    /// A Hamiltonian cycle was found; `pairs` takes its alternate edges.
    Pairs { pairs: PairDecomposition, cycle: Vec<usize> },
    /// Exhaustive search finished without a cycle. Says nothing about
    /// whether some pairing exists (see [`check_pairing_feasibility`]).
    NotFound,
    /// Budget exhausted before the search finished; inconclusive.
    TimedOut,
}

pub const DEFAULT_HAMILTONIAN_BUDGET: Duration = Duration::from_secs(5);

/// Backtracking Hamiltonian-cycle search (neighbors tried in ascending
/// degree, then id), turning a found cycle into the pairing of its
/// alternate edges. Even `n` required, since the point is a pairing.
pub fn hamiltonian_pairing(
    g: &InteractionGraph,
    budget: Option<Duration>,
) -> Result<HamiltonianOutcome, GraphError> {
    let n = g.vertex_count();
    if n % 2 != 0 {
        return Err(GraphError::InvalidParameter(format!(
            "pairing needs an even vertex count, got {n}"
        )));
    }
    if n == 2 {
        // No simple cycle exists on two vertices; the edge itself is the
        // only candidate pairing and the matching check covers it.
        return Ok(HamiltonianOutcome::NotFound);
    }
    let budget = budget.unwrap_or(DEFAULT_HAMILTONIAN_BUDGET);
    let deadline = Instant::now() + budget;

    let mut order: Vec<Vec<usize>> = (0..n)
        .map(|v| g.neighbors(v).to_vec())
        .collect();
    for nbrs in &mut order {
        nbrs.sort_unstable_by_key(|&w| (g.degree(w), w));
    }

    let mut path = vec![0usize];
    let mut visited = vec![false; n];
    visited[0] = true;
    // Stack of per-depth iterators, represented as (vertex, next neighbor index).
    let mut cursor = vec![0usize];
    let mut ticks = 0u32;
    loop {
        ticks += 1;
        if ticks & 0x3ff == 0 && Instant::now() >= deadline {
            return Ok(HamiltonianOutcome::TimedOut);
        }
        let depth = path.len() - 1;
        let here = path[depth];
        let next = order[here].get(cursor[depth]).copied();
        cursor[depth] += 1;
        match next {
            None => {
                // Exhausted this vertex; back up.
                visited[here] = false;
                path.pop();
                cursor.pop();
                if path.is_empty() {
                    return Ok(HamiltonianOutcome::NotFound);
                }
            }
            Some(w) => {
                if path.len() == n {
                    if w == 0 {
                        let pairs = (0..n / 2).map(|i| norm_edge(path[2 * i], path[2 * i + 1])).collect();
                        return Ok(HamiltonianOutcome::Pairs {
                            pairs: PairDecomposition { pairs },
                            cycle: path,
                        });
                    }
                } else if !visited[w] {
                    visited[w] = true;
                    path.push(w);
                    cursor.push(0);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_complete, build_random_regular};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cycle(n: usize) -> InteractionGraph {
        InteractionGraph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)).collect()).unwrap()
    }

    /// Independent check: maximum matching size by exhaustive branch on the
    /// lowest uncovered vertex.
    fn max_matching_exhaustive(n: usize, edges: &[(usize, usize)], used: u32) -> usize {
        let Some(v) = (0..n).find(|&v| used & (1 << v) == 0) else { return 0 };
        // Either v stays unmatched...
        let mut best = max_matching_exhaustive(n, edges, used | (1 << v));
        // ...or it matches any free neighbor.
        for &(a, b) in edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if used & (1 << w) == 0 {
                best = best.max(1 + max_matching_exhaustive(n, edges, used | (1 << v) | (1 << w)));
            }
        }
        best
    }

    fn matching_size(outcome: &MatchingOutcome) -> usize {
        match outcome {
            MatchingOutcome::Full(p) => p.pairs.len(),
            MatchingOutcome::Deficient { pairs, .. } => pairs.pairs.len(),
        }
    }

    fn assert_valid_matching(g: &InteractionGraph, outcome: &MatchingOutcome) {
        let pairs = match outcome {
            MatchingOutcome::Full(p) => &p.pairs,
            MatchingOutcome::Deficient { pairs, .. } => &pairs.pairs,
        };
        let mut seen = vec![false; g.vertex_count()];
        for &(u, v) in pairs {
            assert!(g.contains_edge(u, v));
            assert!(!seen[u] && !seen[v]);
            seen[u] = true;
            seen[v] = true;
        }
    }

    #[test]
    fn matching_agrees_with_exhaustive_search_up_to_n8() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut cases: Vec<(usize, Vec<(usize, usize)>)> = vec![
            (4, vec![(0, 1), (1, 2), (2, 3)]),            // path
            (4, vec![(0, 1), (0, 2), (0, 3)]),            // star: deficient
            (6, (0..6).map(|v| (v, (v + 1) % 6)).collect()),
            (8, build_complete(8).unwrap().edges().to_vec()),
        ];
        for _ in 0..60 {
            let n = rng.gen_range(2..=8);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            cases.push((n, edges));
        }
        for (n, edges) in cases {
            let g = InteractionGraph::from_edges(n, edges.clone()).unwrap();
            let outcome = check_pairing_feasibility(&g);
            assert_valid_matching(&g, &outcome);
            let want = max_matching_exhaustive(n, g.edges(), 0);
            assert_eq!(matching_size(&outcome), want, "n={n} edges={edges:?}");
            match outcome {
                MatchingOutcome::Full(_) => assert_eq!(want, n / 2),
                MatchingOutcome::Deficient { unmatched, .. } => {
                    assert_ne!(want, n / 2);
                    assert_eq!(unmatched.len(), n - 2 * want);
                }
            }
        }
    }

    #[test]
    fn star_is_deficient_with_witness() {
        let g = InteractionGraph::from_edges(4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        match check_pairing_feasibility(&g) {
            MatchingOutcome::Deficient { pairs, unmatched } => {
                assert_eq!(pairs.pairs.len(), 1);
                assert_eq!(unmatched.len(), 2);
            }
            other => panic!("expected deficiency, got {other:?}"),
        }
    }

    #[test]
    fn c6_pairs_alternate_edges() {
        let g = cycle(6);
        match hamiltonian_pairing(&g, None).unwrap() {
            HamiltonianOutcome::Pairs { pairs, cycle } => {
                assert_eq!(cycle, vec![0, 1, 2, 3, 4, 5]);
                assert_eq!(pairs.pairs, vec![(0, 1), (2, 3), (4, 5)]);
            }
            other => panic!("expected pairing, got {other:?}"),
        }
    }

    #[test]
    fn petersen_graph_has_no_hamiltonian_cycle() {
        // Outer C5, inner pentagram, spokes.
        let mut edges: Vec<(usize, usize)> = (0..5).map(|v| (v, (v + 1) % 5)).collect();
        edges.extend((0..5).map(|v| (5 + v, 5 + (v + 2) % 5)));
        edges.extend((0..5).map(|v| (v, v + 5)));
        let g = InteractionGraph::from_edges(10, edges).unwrap();
        assert_eq!(hamiltonian_pairing(&g, None).unwrap(), HamiltonianOutcome::NotFound);
        // Yet a full pairing exists (the spokes are a perfect matching).
        assert!(matches!(check_pairing_feasibility(&g), MatchingOutcome::Full(_)));
    }

    #[test]
    fn odd_vertex_count_is_a_parameter_error() {
        let g = cycle(5);
        assert!(matches!(hamiltonian_pairing(&g, None), Err(GraphError::InvalidParameter(_))));
    }

    #[test]
    fn random_regular_graphs_pair_up() {
        for seed in 0..5 {
            let g = build_random_regular(8, 3, seed).unwrap();
            if let HamiltonianOutcome::Pairs { pairs, cycle } = hamiltonian_pairing(&g, None).unwrap()
            {
                assert_eq!(cycle.len(), 8);
                assert_eq!(pairs.pairs.len(), 4);
                for &(u, v) in &pairs.pairs {
                    assert!(g.contains_edge(u, v));
                }
            }
        }
    }

    #[test]
    fn tiny_budget_times_out_on_a_slow_instance() {
        // A graph big enough that the search cannot finish in zero time.
        let g = build_random_regular(40, 3, 2).unwrap();
        match hamiltonian_pairing(&g, Some(Duration::from_nanos(1))).unwrap() {
            HamiltonianOutcome::TimedOut | HamiltonianOutcome::Pairs { .. } => {}
            HamiltonianOutcome::NotFound => panic!("exhausted a 40-vertex search instantly"),
        }
    }
}
