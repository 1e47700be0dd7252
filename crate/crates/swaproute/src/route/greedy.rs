//! Deterministic greedy router for arbitrary connected graphs. Each step it
//! executes every gate whose qubits are adjacent, then walks the remaining
//! ready gates one hop along shortest paths toward each other. No attempt
//! at optimality; this is the baseline the structured router is compared
//! against, and the fallback for graphs without butterfly structure.

use super::{EdgeOp, RouteError, RouteResult, RoutedSchedule};
use crate::circuit::LayeredCircuit;
use crate::graph::InteractionGraph;

/// Above this size the all-pairs distance table (2 bytes per pair) is
/// replaced by per-target searches.
const DISTANCE_MATRIX_LIMIT: usize = 4096;

struct Distances {
    matrix: Option<Vec<Vec<u16>>>,
    adj: Vec<Vec<usize>>,
}

impl Distances {
    fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<u16> {
        let mut dist = vec![u16::MAX; adj.len()];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == u16::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn new(adj: Vec<Vec<usize>>) -> Result<Self, RouteError> {
        let n = adj.len();
        let matrix = if n <= DISTANCE_MATRIX_LIMIT {
            let rows: Vec<Vec<u16>> = (0..n).map(|v| Self::bfs(&adj, v)).collect();
            if rows.iter().flatten().any(|&d| d == u16::MAX) {
                return Err(RouteError::Disconnected);
            }
            Some(rows)
        } else {
            if Self::bfs(&adj, 0).iter().any(|&d| d == u16::MAX) {
                return Err(RouteError::Disconnected);
            }
            None
        };
        Ok(Distances { matrix, adj })
    }

    /// Distances from every vertex to `target`.
    fn to_target(&self, target: usize) -> std::borrow::Cow<'_, [u16]> {
        match &self.matrix {
            Some(m) => std::borrow::Cow::Borrowed(&m[target]),
            None => std::borrow::Cow::Owned(Self::bfs(&self.adj, target)),
        }
    }

    fn diameter(&self) -> usize {
        match &self.matrix {
            Some(m) => m.iter().flatten().copied().max().unwrap_or(0) as usize,
            // Without the table, a single eccentricity doubles as a bound.
            None => 2 * Self::bfs(&self.adj, 0).iter().copied().max().unwrap_or(0) as usize,
        }
    }
}

#[derive(Clone, Copy)]
struct GateRef {
    layer: usize,
    a: usize,
    b: usize,
    done: bool,
}

/// Routes `c` on any connected graph from the identity placement. The
/// schedule is fully determined by the inputs; `_seed` exists so both
/// routers share a call shape.
pub fn route_greedy(
    g: &InteractionGraph,
    c: &LayeredCircuit,
    _seed: u64,
) -> Result<RouteResult, RouteError> {
    let n = g.vertex_count();
    if c.n > n {
        return Err(RouteError::TooWide { needed: c.n, available: n });
    }
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(RouteError::InvalidCircuit(violations));
    }

    let mut adj = vec![Vec::new(); n];
    for (u, v) in g.routable_edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
    }
    let routable = |u: usize, v: usize| adj[u].binary_search(&v).is_ok();
    let dists = Distances::new(adj.clone())?;

    let seqs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|q| if q < c.n { c.qubit_gate_sequence(q) } else { Vec::new() })
        .collect();
    let mut ptr = vec![0usize; n];
    let mut gates: Vec<GateRef> = c
        .layers
        .iter()
        .enumerate()
        .flat_map(|(layer, pairs)| {
            pairs.iter().map(move |&(a, b)| GateRef { layer, a, b, done: false })
        })
        .collect();
    let total = gates.len();

    let mut place: Vec<usize> = (0..n).collect();
    let mut site_of: Vec<usize> = (0..n).collect();
    let mut steps: Vec<Vec<EdgeOp>> = Vec::new();
    let mut layer_steps = vec![0usize; c.depth()];

    let cap = 4 * (total + 1) * (dists.diameter() + 2) + 64;
    let mut remaining = total;
    while remaining > 0 {
        if steps.len() > cap {
            return Err(RouteError::Internal(format!(
                "no convergence after {} steps with {remaining} gates left",
                steps.len()
            )));
        }
        // Ready gates in circuit order: next pending for both qubits.
        let enabled: Vec<usize> = (0..gates.len())
            .filter(|&i| {
                let GateRef { layer, a, b, done, .. } = gates[i];
                !done
                    && seqs[a].get(ptr[a]) == Some(&(layer, b))
                    && seqs[b].get(ptr[b]) == Some(&(layer, a))
            })
            .collect();
        debug_assert!(!enabled.is_empty(), "pending gates but none ready");

        let front_layer = gates[enabled[0]].layer;
        let mut used = vec![false; n];
        let mut ops = Vec::new();

        // Execute whatever already sits on an edge.
        for &i in &enabled {
            let GateRef { layer, a, b, .. } = gates[i];
            let (u, v) = (site_of[a], site_of[b]);
            if used[u] || used[v] || !routable(u, v) {
                continue;
            }
            ops.push(EdgeOp::gate(u, v, layer, a, b));
            used[u] = true;
            used[v] = true;
            gates[i].done = true;
            ptr[a] += 1;
            ptr[b] += 1;
            remaining -= 1;
        }

        // Walk the rest one hop closer, highest priority first. Both
        // endpoints are reserved afterwards either way, so a later gate can
        // never drag an earlier gate's qubit away; the front gate therefore
        // gets strictly closer whenever nothing executed, which bounds the
        // schedule length.
        for &i in &enabled {
            if gates[i].done {
                continue;
            }
            let GateRef { a, b, .. } = gates[i];
            let (u, v) = (site_of[a], site_of[b]);
            if used[u] || used[v] {
                continue;
            }
            let mut swap = None;
            for (from, target) in [(u, v), (v, u)] {
                let d = dists.to_target(target);
                let step_to = dists.adj[from]
                    .iter()
                    .copied()
                    .filter(|&w| !used[w] && d[w] + 1 == d[from])
                    .min();
                if let Some(w) = step_to {
                    swap = Some((from, w));
                    break;
                }
            }
            if let Some((from, w)) = swap {
                ops.push(EdgeOp::swap(from, w));
                used[w] = true;
                let (qa, qb) = (place[from], place[w]);
                place.swap(from, w);
                site_of[qa] = w;
                site_of[qb] = from;
            }
            used[u] = true;
            used[v] = true;
        }

        if ops.is_empty() {
            return Err(RouteError::Internal("step produced no operations".into()));
        }
        layer_steps[front_layer] += 1;
        steps.push(ops);
    }

    Ok(RouteResult {
        schedule: RoutedSchedule { initial_placement: (0..n).collect(), steps },
        layer_steps,
        layer_rounds: vec![1; c.depth()],
    })
}
