//! Exact small-instance oracles. Everything here enumerates state spaces
//! outright, so it only works for a handful of qubits, but within that range
//! it gives ground truth: the true one-step transition set, the true number
//! of steps needed to reach any placement, and the true optimal routed depth
//! of a circuit. The scalable routers and bounds are tested against these.

use crate::circuit::LayeredCircuit;
use crate::graph::InteractionGraph;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance too large for exact enumeration: {0}")]
    SizeLimit(String),
    #[error("interaction graph is disconnected")]
    Disconnected,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Hard cap for matching enumeration; the count grows super-exponentially.
const MAX_TRANSITION_N: usize = 12;
/// Default cap for placement-space searches (`n!` states).
const MAX_EMULATION_N: usize = 6;
/// Caps for the routed-depth search (`n!` times the gate-progress space).
const MAX_DEPTH_N: usize = 5;
const MAX_DEPTH_M: usize = 4;

/// All distinct one-step swap actions: the non-empty matchings of the graph.
/// Matchings are emitted in lexicographic edge order provided the edge list
/// is sorted, which `InteractionGraph` guarantees.
pub fn one_step_transitions(
    g: &InteractionGraph,
) -> Result<Vec<Vec<(usize, usize)>>, OracleError> {
    let n = g.vertex_count();
    if n > MAX_TRANSITION_N {
        return Err(OracleError::SizeLimit(format!(
            "matching enumeration capped at n = {MAX_TRANSITION_N}, got {n}"
        )));
    }
    let edges = g.edges();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn recurse(
        edges: &[(usize, usize)],
        from: usize,
        used: u32,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        for (i, &(u, v)) in edges.iter().enumerate().skip(from) {
            let mask = (1u32 << u) | (1u32 << v);
            if used & mask != 0 {
                continue;
            }
            current.push((u, v));
            out.push(current.clone());
            recurse(edges, i + 1, used | mask, current, out);
            current.pop();
        }
    }
    recurse(edges, 0, 0, &mut current, &mut out);
    Ok(out)
}

/// Rank of a placement (a permutation of `0..n`) in lexicographic order.
pub fn rank_placement(placement: &[usize]) -> usize {
    let n = placement.len();
    let mut rank = 0usize;
    let mut factorial = 1usize;
    for i in 1..n {
        factorial *= i;
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    for (i, &p) in placement.iter().enumerate() {
        let pos = remaining.iter().position(|&x| x == p).expect("valid permutation");
        rank += pos * factorial;
        remaining.remove(pos);
        if i + 1 < n {
            factorial /= n - 1 - i;
        }
    }
    rank
}

/// Inverse of [`rank_placement`].
pub fn unrank_placement(mut rank: usize, n: usize) -> Vec<usize> {
    let mut factorial = 1usize;
    for i in 1..n {
        factorial *= i;
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let pos = rank / factorial;
        rank %= factorial;
        out.push(remaining.remove(pos));
        if i + 1 < n {
            factorial /= n - 1 - i;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmulationReport {
    pub n: usize,
    /// Number of distinct one-step actions (non-empty matchings).
    pub r_prime: usize,
    /// Steps needed to reach the hardest placement from any start. The
    /// placement state graph looks the same from every vertex, so the
    /// eccentricity of the identity is already the diameter.
    pub diameter: usize,
    /// Lexicographically least placement at that distance from identity.
    pub witness: Vec<usize>,
}

/// Exhaustive worst-case routing distance over the placement space.
pub fn emulation_complexity(
    g: &InteractionGraph,
    allow_n7: bool,
) -> Result<EmulationReport, OracleError> {
    let n = g.vertex_count();
    let cap = if allow_n7 { 7 } else { MAX_EMULATION_N };
    if n > cap {
        return Err(OracleError::SizeLimit(format!(
            "placement enumeration capped at n = {cap}, got {n}"
        )));
    }
    if n == 0 {
        return Err(OracleError::InvalidParameter("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    let transitions = one_step_transitions(g)?;
    let nfact: usize = (1..=n).product();
    let mut dist = vec![usize::MAX; nfact];
    let identity: Vec<usize> = (0..n).collect();
    let start = rank_placement(&identity);
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(rank) = queue.pop_front() {
        let placement = unrank_placement(rank, n);
        for matching in &transitions {
            let mut next = placement.clone();
            for &(u, v) in matching {
                next.swap(u, v);
            }
            let next_rank = rank_placement(&next);
            if dist[next_rank] == usize::MAX {
                dist[next_rank] = dist[rank] + 1;
                queue.push_back(next_rank);
            }
        }
    }
    // Connected hardware reaches every placement; swaps generate the whole
    // symmetric group on a connected graph.
    let diameter = *dist.iter().max().expect("nonempty");
    debug_assert_ne!(diameter, usize::MAX);
    let witness_rank = dist.iter().position(|&d| d == diameter).expect("attained");
    Ok(EmulationReport {
        n,
        r_prime: transitions.len(),
        diameter,
        witness: unrank_placement(witness_rank, n),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionBoundsReport {
    pub n: usize,
    pub r: usize,
    /// Actual count of one-step actions.
    pub r_prime: u64,
    /// `2^(n/4)`: guaranteed floor once `n >= 4`.
    pub bound_low: f64,
    /// `(r + 1)^n`: counting ceiling.
    pub bound_high: u64,
    pub pass: bool,
    /// Below `n = 4` the floor argument has no room to work, so a failed
    /// lower bound is reported but does not count against `pass`.
    pub degenerate: bool,
}

/// Checks `2^(n/4) <= r' <= (r+1)^n` on an `r`-regular graph by counting
/// the transitions outright.
pub fn verify_transition_bounds(
    g: &InteractionGraph,
) -> Result<TransitionBoundsReport, OracleError> {
    let n = g.vertex_count();
    let r = g.regular_degree().ok_or_else(|| {
        OracleError::InvalidParameter("transition bounds are stated for regular graphs".into())
    })?;
    let r_prime = one_step_transitions(g)?.len() as u64;
    let bound_low = (n as f64 / 4.0).exp2();
    let bound_high = ((r + 1) as u64)
        .checked_pow(n as u32)
        .ok_or_else(|| OracleError::SizeLimit("(r+1)^n overflows".into()))?;
    let degenerate = n < 4;
    let low_ok = r_prime as f64 >= bound_low;
    let high_ok = r_prime <= bound_high;
    Ok(TransitionBoundsReport {
        n,
        r,
        r_prime,
        bound_low,
        bound_high,
        pass: high_ok && (low_ok || degenerate),
        degenerate,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimalRoute {
    /// Fewest hardware steps that execute the whole circuit, minimized over
    /// all initial placements.
    pub depth: usize,
    /// An initial placement achieving it.
    pub initial_placement: Vec<usize>,
}

/// Exact optimal routed depth by breadth-first search over
/// (placement, per-qubit gate progress) states, seeded with every initial
/// placement at once. Each step is a non-empty matching whose edges either
/// swap or execute a gate; a gate fires only when its two qubits sit on the
/// edge and it is the next gate in order for both.
pub fn optimal_routed_depth(
    g: &InteractionGraph,
    c: &LayeredCircuit,
) -> Result<OptimalRoute, OracleError> {
    let n = g.vertex_count();
    if n > MAX_DEPTH_N || c.depth() > MAX_DEPTH_M {
        return Err(OracleError::SizeLimit(format!(
            "routed-depth search capped at n = {MAX_DEPTH_N}, m = {MAX_DEPTH_M}; \
             got n = {n}, m = {}",
            c.depth()
        )));
    }
    if c.n > n {
        return Err(OracleError::InvalidParameter(format!(
            "circuit on {} qubits cannot run on {n} sites",
            c.n
        )));
    }
    if !c.validate().is_empty() {
        return Err(OracleError::InvalidParameter("circuit fails validation".into()));
    }
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    // Per-qubit gate sequences; qubits beyond c.n never gate.
    let seqs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|q| if q < c.n { c.qubit_gate_sequence(q) } else { Vec::new() })
        .collect();
    let radix: Vec<usize> = seqs.iter().map(|s| s.len() + 1).collect();
    let progress_space: usize = radix.iter().product();
    let encode = |progress: &[usize]| -> usize {
        let mut code = 0usize;
        for q in (0..n).rev() {
            code = code * radix[q] + progress[q];
        }
        code
    };
    let goal_code = encode(&seqs.iter().map(Vec::len).collect::<Vec<_>>());
    let transitions = one_step_transitions(g)?;
    let nfact: usize = (1..=n).product();

    if goal_code == 0 {
        return Ok(OptimalRoute { depth: 0, initial_placement: unrank_placement(0, n) });
    }
    // dist keyed by rank * progress_space + code; value is the BFS source
    // rank so the winning initial placement can be reported.
    let mut seen: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    for rank in 0..nfact {
        let key = rank * progress_space;
        seen.insert(key, (0, rank));
        queue.push_back(key);
    }

    let mut progress = vec![0usize; n];
    while let Some(key) = queue.pop_front() {
        let (depth, source) = seen[&key];
        let rank = key / progress_space;
        let mut code = key % progress_space;
        let placement = unrank_placement(rank, n);
        for q in 0..n {
            progress[q] = code % radix[q];
            code /= radix[q];
        }
        for matching in &transitions {
            // Per-edge choices: swap always, gate when enabled right now.
            // Walk the cartesian product of choices with a small stack.
            let choices: Vec<bool> = matching
                .iter()
                .map(|&(u, v)| {
                    let a = placement[u];
                    let b = placement[v];
                    let (pa, pb) = (progress[a], progress[b]);
                    pa < seqs[a].len()
                        && pb < seqs[b].len()
                        && seqs[a][pa] == (seqs[b][pb].0, b)
                        && seqs[b][pb].1 == a
                })
                .collect();
            let k = matching.len();
            let mut labels = vec![false; k]; // false = swap, true = gate
            loop {
                let mut next_place = placement.clone();
                let mut next_progress = progress.clone();
                for (i, &(u, v)) in matching.iter().enumerate() {
                    if labels[i] {
                        let a = placement[u];
                        let b = placement[v];
                        next_progress[a] += 1;
                        next_progress[b] += 1;
                    } else {
                        next_place.swap(u, v);
                    }
                }
                let next_code = encode(&next_progress);
                let next_key = rank_placement(&next_place) * progress_space + next_code;
                if let Entry::Vacant(e) = seen.entry(next_key) {
                    e.insert((depth + 1, source));
                    if next_code == goal_code {
                        return Ok(OptimalRoute {
                            depth: depth + 1,
                            initial_placement: unrank_placement(source, n),
                        });
                    }
                    queue.push_back(next_key);
                }
                // Advance to the next label combination that only enables
                // gates where allowed.
                let mut i = 0;
                loop {
                    if i == k {
                        break;
                    }
                    if !labels[i] && choices[i] {
                        labels[i] = true;
                        break;
                    }
                    labels[i] = false;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
    }
    Err(OracleError::InvalidParameter(
        "circuit cannot complete; some gate pair never meets (unreachable on connected graphs)"
            .into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::generate_full_layer_circuit;
    use crate::families::build_complete;

    fn graph(n: usize, edges: Vec<(usize, usize)>) -> InteractionGraph {
        InteractionGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn rank_and_unrank_are_inverse_bijections() {
        for n in 1..=6 {
            let nfact: usize = (1..=n).product();
            let mut seen = vec![false; nfact];
            for rank in 0..nfact {
                let p = unrank_placement(rank, n);
                assert_eq!(rank_placement(&p), rank);
                assert!(!seen[rank]);
                seen[rank] = true;
            }
        }
        assert_eq!(rank_placement(&[0, 1, 2]), 0);
        assert_eq!(rank_placement(&[2, 1, 0]), 5);
    }

    #[test]
    fn transition_counts_match_hand_enumeration() {
        // C4: four single edges plus two disjoint opposite pairs.
        let c4 = graph(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]);
        let t = one_step_transitions(&c4).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.contains(&vec![(0, 1), (2, 3)]));
        assert!(t.contains(&vec![(0, 3), (1, 2)]));
        // K3: three edges, no two disjoint.
        let k3 = graph(3, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(one_step_transitions(&k3).unwrap().len(), 3);
        // K4: six single + three perfect matchings.
        let k4 = build_complete(4).unwrap();
        assert_eq!(one_step_transitions(&k4).unwrap().len(), 9);
        // Every emitted set really is a matching.
        for m in one_step_transitions(&k4).unwrap() {
            let mut seen = [false; 4];
            for (u, v) in m {
                assert!(!seen[u] && !seen[v]);
                seen[u] = true;
                seen[v] = true;
            }
        }
    }

    #[test]
    fn single_edge_and_triangle_distances_are_exact() {
        let edge = graph(2, vec![(0, 1)]);
        let report = emulation_complexity(&edge, false).unwrap();
        assert_eq!(report.diameter, 1);
        assert_eq!(report.r_prime, 1);
        assert_eq!(report.witness, vec![1, 0]);

        let k3 = graph(3, vec![(0, 1), (0, 2), (1, 2)]);
        let report = emulation_complexity(&k3, false).unwrap();
        // Two swaps compose to any 3-cycle; one swap gives transpositions.
        assert_eq!(report.diameter, 2);
        assert_eq!(report.r_prime, 3);
    }

    #[test]
    fn path_needs_bubble_sort_distance() {
        // Reversing a path of 3 takes 3 adjacent transpositions.
        let p3 = graph(3, vec![(0, 1), (1, 2)]);
        let report = emulation_complexity(&p3, false).unwrap();
        assert_eq!(report.diameter, 3);
        assert_eq!(report.witness, vec![2, 1, 0]);
    }

    #[test]
    fn disconnected_graphs_are_rejected() {
        let g = graph(4, vec![(0, 1), (2, 3)]);
        assert!(matches!(emulation_complexity(&g, false), Err(OracleError::Disconnected)));
    }

    #[test]
    fn size_caps_are_enforced_and_liftable() {
        let g = build_complete(7).unwrap();
        assert!(matches!(emulation_complexity(&g, false), Err(OracleError::SizeLimit(_))));
        let report = emulation_complexity(&g, true).unwrap();
        assert_eq!(report.diameter, 2, "any permutation of 7 items is two matchings deep on K7");
    }

    #[test]
    fn transition_bounds_on_c4_and_k4() {
        let c4 = graph(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]);
        let report = verify_transition_bounds(&c4).unwrap();
        assert_eq!((report.r_prime, report.bound_high), (6, 81));
        assert_eq!(report.bound_low, 2.0);
        assert!(report.pass && !report.degenerate);

        let k4 = build_complete(4).unwrap();
        let report = verify_transition_bounds(&k4).unwrap();
        assert_eq!(report.r_prime, 9);
        assert_eq!(report.bound_high, 256);
        assert!(report.pass);
    }

    #[test]
    fn two_vertex_case_is_degenerate_not_failed() {
        let edge = graph(2, vec![(0, 1)]);
        let report = verify_transition_bounds(&edge).unwrap();
        assert!(report.degenerate);
        assert!(report.pass);
        assert!((report.r_prime as f64) < report.bound_low);
    }

    #[test]
    fn irregular_graphs_are_rejected_by_the_bounds_check() {
        let p3 = graph(3, vec![(0, 1), (1, 2)]);
        assert!(matches!(
            verify_transition_bounds(&p3),
            Err(OracleError::InvalidParameter(_))
        ));
    }

    #[test]
    fn optimal_depth_on_complete_graph_equals_layer_count() {
        // On K4 every full layer is one step with the right placement.
        let k4 = build_complete(4).unwrap();
        for m in 1..=3 {
            let c = generate_full_layer_circuit(4, m, 11).unwrap();
            let opt = optimal_routed_depth(&k4, &c).unwrap();
            assert_eq!(opt.depth, m, "m = {m}");
        }
    }

    #[test]
    fn optimal_depth_accounts_for_movement_on_sparse_graphs() {
        // Path 0-1-2-3 with gates (0,1) and (2,3) in one layer: both gates
        // can run somewhere adjacent with a good placement, in one step.
        let p4 = graph(4, vec![(0, 1), (1, 2), (2, 3)]);
        let c = LayeredCircuit::new(4, vec![vec![(0, 1), (2, 3)]], None);
        assert_eq!(optimal_routed_depth(&p4, &c).unwrap().depth, 1);
        // Crossing layer (0,2),(1,3) then (0,1),(2,3): no placement serves
        // both layers at once, so some movement is forced.
        let c2 = LayeredCircuit::new(4, vec![vec![(0, 2), (1, 3)], vec![(0, 1), (2, 3)]], None);
        let opt = optimal_routed_depth(&p4, &c2).unwrap();
        assert!(opt.depth >= 3, "two layers plus at least one move, got {}", opt.depth);
        // The reported witness placement must be a permutation.
        let mut w = opt.initial_placement.clone();
        w.sort_unstable();
        assert_eq!(w, vec![0, 1, 2, 3]);
    }

    #[test]
    fn optimal_depth_zero_for_empty_circuits() {
        let p4 = graph(4, vec![(0, 1), (1, 2), (2, 3)]);
        let c = LayeredCircuit::new(4, vec![], None);
        assert_eq!(optimal_routed_depth(&p4, &c).unwrap().depth, 0);
    }

    #[test]
    fn depth_search_caps_are_enforced() {
        let k6 = build_complete(6).unwrap();
        let c = generate_full_layer_circuit(6, 2, 0).unwrap();
        assert!(matches!(optimal_routed_depth(&k6, &c), Err(OracleError::SizeLimit(_))));
        let k4 = build_complete(4).unwrap();
        let c5 = generate_full_layer_circuit(4, 5, 0).unwrap();
        assert!(matches!(optimal_routed_depth(&k4, &c5), Err(OracleError::SizeLimit(_))));
    }
}
