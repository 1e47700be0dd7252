//! Two-coloring of qubits for round-based gate execution. Partnered qubits
//! (the two sharing a site) must split across the rounds, while interacting
//! qubits must land in the same round so their gate can run. Both demands
//! together form paths and cycles; a cycle with an odd number of partner
//! pairs cannot be satisfied, so exactly one of its interactions is deferred
//! to the next round.

use crate::graph::{norm_edge, GraphError};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    A,
    B,
}

impl Label {
    fn flip(self) -> Label {
        match self {
            Label::A => Label::B,
            Label::B => Label::A,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LayerLabeling {
    /// Round assignment per qubit; every qubit gets one.
    pub labels: Vec<Label>,
    /// Interactions pushed to the next round, one per infeasible cycle.
    pub deferred: Vec<(usize, usize)>,
}

fn matching_map(
    n: usize,
    pairs: &[(usize, usize)],
    what: &str,
) -> Result<Vec<Option<usize>>, GraphError> {
    let mut map = vec![None; n];
    for &(a, b) in pairs {
        if a >= n || b >= n || a == b {
            return Err(GraphError::InvalidParameter(format!(
                "{what} ({a}, {b}) is not a pair of distinct qubits below {n}"
            )));
        }
        if map[a].is_some() || map[b].is_some() {
            return Err(GraphError::InvalidParameter(format!(
                "{what} ({a}, {b}) reuses a qubit"
            )));
        }
        map[a] = Some(b);
        map[b] = Some(a);
    }
    Ok(map)
}

/// Alternating walk that leaves `start` over its partner edge. Returns the
/// far path endpoint, or `None` when the walk closes back into `start`
/// (which can only happen over `start`'s interaction edge).
fn walk_from_partner(
    start: usize,
    partner: &[Option<usize>],
    inter: &[Option<usize>],
) -> Option<usize> {
    let mut cur = partner[start].expect("perfect matching");
    loop {
        match inter[cur] {
            None => return Some(cur),
            Some(u) if u == start => return None,
            Some(u) => cur = partner[u].expect("perfect matching"),
        }
    }
}

/// Same walk leaving `start` over its interaction edge; only called on path
/// components, so it always reaches an endpoint.
fn walk_from_inter(start: usize, partner: &[Option<usize>], inter: &[Option<usize>]) -> usize {
    let mut cur = inter[start].expect("caller checked");
    loop {
        let t = partner[cur].expect("perfect matching");
        match inter[t] {
            None => return t,
            Some(u) => {
                debug_assert_ne!(u, start, "paths cannot close");
                cur = u;
            }
        }
    }
}

/// Labels all `n` qubits A or B such that every partner pair has one of
/// each and every interaction, minus the returned deferrals, has both
/// qubits alike. `partner_pairs` must be a perfect matching of `0..n`;
/// `interactions` a matching disjoint from it (a gate between partners is
/// already executable in place and must not be passed here). The starting
/// label of each path or cycle carries no information, so it is drawn from
/// `rng` to keep the rounds balanced on average.
pub fn label_layer(
    n: usize,
    partner_pairs: &[(usize, usize)],
    interactions: &[(usize, usize)],
    rng: &mut impl Rng,
) -> Result<LayerLabeling, GraphError> {
    let partner = matching_map(n, partner_pairs, "partner pair")?;
    if partner.iter().any(Option::is_none) {
        return Err(GraphError::InvalidParameter(
            "partner pairs must cover every qubit".into(),
        ));
    }
    let inter = matching_map(n, interactions, "interaction")?;
    for q in 0..n {
        if inter[q].is_some() && inter[q] == partner[q] {
            return Err(GraphError::InvalidParameter(format!(
                "interaction between partners {q} and {} belongs on their shared site",
                partner[q].unwrap()
            )));
        }
    }

    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut deferred = Vec::new();
    for s in 0..n {
        if labels[s].is_some() {
            continue;
        }
        // Anchor choice: for a path, its least endpoint (an endpoint has no
        // interaction edge, so the labeling walk below covers everything);
        // for a cycle, its least member.
        let anchor = match walk_from_partner(s, &partner, &inter) {
            Some(far_end) => {
                let near_end = if inter[s].is_none() {
                    s
                } else {
                    walk_from_inter(s, &partner, &inter)
                };
                far_end.min(near_end)
            }
            None => {
                let mut least = s;
                let mut cur = partner[s].unwrap();
                while cur != s {
                    least = least.min(cur);
                    let t = inter[cur].expect("cycle members all interact");
                    least = least.min(t);
                    if t == s {
                        break;
                    }
                    cur = partner[t].unwrap();
                }
                least
            }
        };

        // Labeling walk: leave the anchor over its partner edge, flip on
        // partner edges, copy on interaction edges. A cycle closes over the
        // anchor's interaction edge, so a parity conflict lands on exactly
        // that interaction, which is deferred.
        let start = if rng.gen::<bool>() { Label::A } else { Label::B };
        labels[anchor] = Some(start);
        let mut cur = anchor;
        loop {
            let t = partner[cur].unwrap();
            debug_assert!(labels[t].is_none(), "partner step revisits {t}");
            labels[t] = Some(labels[cur].unwrap().flip());
            match inter[t] {
                None => break,
                Some(u) if u == anchor => {
                    if labels[u] != labels[t] {
                        deferred.push(norm_edge(t, u));
                    }
                    break;
                }
                Some(u) => {
                    debug_assert!(labels[u].is_none(), "interaction step revisits {u}");
                    labels[u] = labels[t];
                    cur = u;
                }
            }
        }
    }

    Ok(LayerLabeling {
        labels: labels.into_iter().map(|l| l.expect("all components labeled")).collect(),
        deferred,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_invariants(
        n: usize,
        partners: &[(usize, usize)],
        interactions: &[(usize, usize)],
        out: &LayerLabeling,
    ) {
        assert_eq!(out.labels.len(), n);
        for &(a, b) in partners {
            assert_ne!(out.labels[a], out.labels[b], "partners {a},{b} share a label");
        }
        for &(a, b) in interactions {
            let e = norm_edge(a, b);
            if out.deferred.contains(&e) {
                assert_ne!(out.labels[a], out.labels[b], "deferred {a},{b} was satisfiable");
            } else {
                assert_eq!(out.labels[a], out.labels[b], "interaction {a},{b} split");
            }
        }
        for d in &out.deferred {
            assert!(interactions.iter().any(|&(a, b)| norm_edge(a, b) == *d));
        }
    }

    #[test]
    fn crossing_layer_on_two_sites_needs_no_deferral() {
        let partners = [(0, 1), (2, 3)];
        let interactions = [(0, 2), (1, 3)];
        for seed in 0..16 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = label_layer(4, &partners, &interactions, &mut rng).unwrap();
            assert!(out.deferred.is_empty());
            check_invariants(4, &partners, &interactions, &out);
        }
    }

    #[test]
    fn odd_cycle_defers_exactly_the_closing_interaction() {
        // 0-1, 2-3, 4-5 partners; interactions chain them into one cycle
        // with three partner edges, which is odd, so one interaction waits.
        let partners = [(0, 1), (2, 3), (4, 5)];
        let interactions = [(1, 2), (3, 4), (5, 0)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = label_layer(6, &partners, &interactions, &mut rng).unwrap();
        assert_eq!(out.deferred, vec![(0, 5)], "conflict must land on the anchor's interaction");
        check_invariants(6, &partners, &interactions, &out);
    }

    #[test]
    fn paths_never_defer() {
        // 0-1-2-3-4-5 alternating partner/interaction, open at both ends.
        let partners = [(0, 1), (2, 3), (4, 5)];
        let interactions = [(1, 2), (3, 4)];
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = label_layer(6, &partners, &interactions, &mut rng).unwrap();
            assert!(out.deferred.is_empty());
            check_invariants(6, &partners, &interactions, &out);
        }
    }

    #[test]
    fn intra_pair_interactions_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(label_layer(2, &[(0, 1)], &[(1, 0)], &mut rng).is_err());
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // Partner cover incomplete.
        assert!(label_layer(4, &[(0, 1)], &[], &mut rng).is_err());
        // Qubit reused across interactions.
        assert!(label_layer(4, &[(0, 1), (2, 3)], &[(0, 2), (0, 3)], &mut rng).is_err());
        // Out of range.
        assert!(label_layer(4, &[(0, 1), (2, 9)], &[], &mut rng).is_err());
    }

    /// Independent deferral count: components where following the structure
    /// exhaustively yields a cycle with an odd number of partner edges.
    fn expected_deferrals(n: usize, partner: &[Option<usize>], inter: &[Option<usize>]) -> usize {
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            // Flood the component over both edge kinds.
            let mut stack = vec![s];
            let mut members = Vec::new();
            while let Some(q) = stack.pop() {
                if seen[q] {
                    continue;
                }
                seen[q] = true;
                members.push(q);
                if let Some(w) = partner[q] {
                    stack.push(w);
                }
                if let Some(w) = inter[q] {
                    stack.push(w);
                }
            }
            // A component is a cycle iff every member has both edges.
            let is_cycle = members.iter().all(|&q| inter[q].is_some());
            if is_cycle && (members.len() / 2) % 2 == 1 {
                count += 1;
            }
        }
        count
    }

    proptest! {
        #[test]
        fn random_structures_satisfy_all_invariants(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let half = (rng.gen::<u64>() % 9 + 1) as usize; // 1..=9 pairs
            let n = half * 2;
            // Random perfect matching via a shuffle.
            use rand::seq::SliceRandom;
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let partners: Vec<(usize, usize)> =
                order.chunks_exact(2).map(|c| norm_edge(c[0], c[1])).collect();
            // Random interaction matching avoiding partner duplicates.
            let mut free: Vec<usize> = (0..n).collect();
            free.shuffle(&mut rng);
            let mut interactions = Vec::new();
            let mut used = vec![false; n];
            for i in 0..n {
                if used[free[i]] {
                    continue;
                }
                for j in i + 1..n {
                    let (a, b) = (free[i], free[j]);
                    if used[b] || !rng.gen_bool(0.7) {
                        continue;
                    }
                    if partners.contains(&norm_edge(a, b)) {
                        continue;
                    }
                    used[a] = true;
                    used[b] = true;
                    interactions.push(norm_edge(a, b));
                    break;
                }
            }
            let out = label_layer(n, &partners, &interactions, &mut rng).unwrap();
            check_invariants(n, &partners, &interactions, &out);

            let partner_map = super::matching_map(n, &partners, "p").unwrap();
            let inter_map = super::matching_map(n, &interactions, "i").unwrap();
            prop_assert_eq!(
                out.deferred.len(),
                expected_deferrals(n, &partner_map, &inter_map)
            );
        }
    }
}
