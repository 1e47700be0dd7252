//! Butterfly-layer scheduler. Every circuit layer completes in a step
//! count proportional to the ring length `2k`, i.e. logarithmic in the
//! qubit count, by sorting the interacting qubits onto the internal edges
//! and firing a whole layer at once.
//!
//! Layer recipe. The pendant attached to each split vertex makes every
//! site a two-slot cell (main + pendant), so site co-residents can be
//! labeled A/B and a layer splits into two half-rounds whose gates touch
//! each cell once. A half-round lifts its class into the main slots,
//! permutes the main slots so interacting pairs land on internal edges,
//! and fires the gates. The permutation runs in three phases: a coloring
//! pass spreads each row's items so every ring position holds one item per
//! destination row (phase i), each position cohort then rides the wiring
//! once around the ring and back while switch decisions fix its row bits
//! (phase ii), and a final transposition sort orders each row by target
//! position (phase iii).

use rand_chacha::ChaCha8Rng;

use super::label::{label_layer, Label};
use super::{merge_pendant_steps, EdgeOp, OpKind, RouteError, RouteResult, RoutedSchedule};
use crate::circuit::LayeredCircuit;
use crate::families::ButterflyLayout;
use crate::graph::{norm_edge, InteractionGraph};

/// Sub-rounds per layer before giving up. A sub-round executes every
/// interaction except one per infeasible cycle, so two suffice in practice
/// and the cap only guards against internal bugs.
const MAX_ROUNDS_PER_LAYER: usize = 64;

pub fn route_butterfly(
    g: &InteractionGraph,
    c: &LayeredCircuit,
    seed: u64,
) -> Result<RouteResult, RouteError> {
    let layout = ButterflyLayout::for_graph(g)
        .ok_or_else(|| RouteError::WrongFamily(g.family().tag()))?;
    let n = g.vertex_count();
    if c.n > n {
        return Err(RouteError::TooWide { needed: c.n, available: n });
    }
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(RouteError::InvalidCircuit(violations));
    }

    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let originals = layout.originals();
    let mut router = Router {
        layout,
        graph: g,
        n,
        originals,
        place: (0..n).collect(),
        site_of: (0..n).collect(),
        steps: Vec::new(),
    };

    let mut steps = Vec::new();
    let mut layer_steps = Vec::with_capacity(c.depth());
    let mut layer_rounds = Vec::with_capacity(c.depth());
    let is_pendant = move |e: (usize, usize)| e.0 < originals && e.1 == e.0 + originals;
    for (li, layer) in c.layers.iter().enumerate() {
        let rounds = router.route_layer(li, layer, &mut rng)?;
        // Merging pure pendant sweeps keeps the net permutation, so the
        // router state stays in sync with the recorded steps.
        let block = merge_pendant_steps(std::mem::take(&mut router.steps), is_pendant);
        layer_steps.push(block.len());
        layer_rounds.push(rounds);
        steps.extend(block);
    }

    Ok(RouteResult {
        schedule: RoutedSchedule { initial_placement: (0..n).collect(), steps },
        layer_steps,
        layer_rounds,
    })
}

struct Router<'a> {
    layout: ButterflyLayout,
    graph: &'a InteractionGraph,
    n: usize,
    originals: usize,
    /// Qubit on each site.
    place: Vec<usize>,
    /// Site of each qubit.
    site_of: Vec<usize>,
    /// Steps recorded for the layer in progress.
    steps: Vec<Vec<EdgeOp>>,
}

/// One member of a ring-position cohort during the switching phase:
/// which qubit, its current row, and its `2k` crossing decisions.
struct CohortItem {
    qubit: usize,
    row: usize,
    stages: Vec<bool>,
}

impl Router<'_> {
    fn pendant(&self, v: usize) -> usize {
        self.originals + v
    }

    /// Record a step and apply its swaps. Empty steps are dropped.
    fn push_step(&mut self, ops: Vec<EdgeOp>) {
        if ops.is_empty() {
            return;
        }
        if cfg!(debug_assertions) {
            let mut seen = vec![false; self.n];
            for op in &ops {
                let (u, v) = op.edge;
                assert!(self.graph.contains_edge(u, v), "step uses a non-edge ({u}, {v})");
                assert!(!self.graph.is_unused(u, v), "step uses a padding edge ({u}, {v})");
                assert!(!seen[u] && !seen[v], "step touches a site twice");
                seen[u] = true;
                seen[v] = true;
            }
        }
        for op in &ops {
            if matches!(op.kind, OpKind::Swap) {
                let (u, v) = op.edge;
                let (qu, qv) = (self.place[u], self.place[v]);
                self.place[u] = qv;
                self.place[v] = qu;
                self.site_of[qu] = v;
                self.site_of[qv] = u;
            }
        }
        self.steps.push(ops);
    }

    fn route_layer(
        &mut self,
        li: usize,
        layer: &[(usize, usize)],
        rng: &mut ChaCha8Rng,
    ) -> Result<usize, RouteError> {
        let mut remaining: Vec<(usize, usize)> = layer.to_vec();
        let mut rounds = 0;
        while !remaining.is_empty() {
            rounds += 1;
            if rounds > MAX_ROUNDS_PER_LAYER {
                return Err(RouteError::Internal(format!(
                    "layer {li} still has {} interactions after {MAX_ROUNDS_PER_LAYER} sub-rounds",
                    remaining.len()
                )));
            }

            // Pairs already sharing a cell fire where they sit.
            let mut in_place = Vec::new();
            let originals = self.originals;
            remaining.retain(|&(a, b)| {
                let (sa, sb) = (self.site_of[a], self.site_of[b]);
                let main = sa.min(sb);
                if main < originals && sa.max(sb) == main + originals {
                    in_place.push(EdgeOp::gate(main, main + originals, li, a, b));
                    false
                } else {
                    true
                }
            });
            self.push_step(in_place);
            if remaining.is_empty() {
                break;
            }

            // Cell co-residents are the partner pairs; interactions between
            // co-residents were just consumed, so the labeling never sees an
            // intra-pair interaction.
            let partners: Vec<(usize, usize)> = (0..self.originals)
                .map(|v| norm_edge(self.place[v], self.place[self.pendant(v)]))
                .collect();
            let labeling = label_layer(self.n, &partners, &remaining, rng)
                .map_err(|e| RouteError::Internal(format!("layer {li} labeling failed: {e}")))?;
            let mut deferred = labeling.deferred;
            deferred.sort_unstable();
            let active: Vec<(usize, usize)> = remaining
                .iter()
                .copied()
                .filter(|e| deferred.binary_search(e).is_err())
                .collect();
            debug_assert!(!active.is_empty(), "a sub-round must make progress");

            for class in [Label::A, Label::B] {
                let gates: Vec<(usize, usize)> = active
                    .iter()
                    .copied()
                    .filter(|&(a, _)| labeling.labels[a] == class)
                    .collect();
                if gates.is_empty() {
                    continue;
                }
                self.run_half_round(li, class, &gates, &labeling.labels)?;
            }
            remaining = deferred;
        }
        Ok(rounds)
    }

    /// Execute all `gates` of one label class: arrange the class into the
    /// main slots, sort interaction `j` onto internal edge `j`, fire.
    fn run_half_round(
        &mut self,
        li: usize,
        class: Label,
        gates: &[(usize, usize)],
        labels: &[Label],
    ) -> Result<(), RouteError> {
        debug_assert!(gates.len() <= self.originals / 2);
        // Each cell holds one qubit of each label, so one sweep of pendant
        // swaps puts the whole class into the main slots.
        let arrange: Vec<EdgeOp> = (0..self.originals)
            .filter(|&v| labels[self.place[v]] != class)
            .map(|v| EdgeOp::swap(v, self.pendant(v)))
            .collect();
        self.push_step(arrange);
        debug_assert!((0..self.originals).all(|v| labels[self.place[v]] == class));

        // Interaction j claims internal edge j = sites (2j, 2j+1). Fillers
        // keep their slot when free, otherwise take the lowest free one.
        let mut target = vec![usize::MAX; self.n];
        let mut taken = vec![false; self.originals];
        for (j, &(a, b)) in gates.iter().enumerate() {
            target[a] = 2 * j;
            target[b] = 2 * j + 1;
            taken[2 * j] = true;
            taken[2 * j + 1] = true;
        }
        for v in 0..self.originals {
            let q = self.place[v];
            if target[q] == usize::MAX && !taken[v] {
                target[q] = v;
                taken[v] = true;
            }
        }
        let free: Vec<usize> = (0..self.originals).filter(|&v| !taken[v]).collect();
        let mut free = free.into_iter();
        for v in 0..self.originals {
            let q = self.place[v];
            if target[q] == usize::MAX {
                target[q] = free.next().ok_or_else(|| {
                    RouteError::Internal("main slots underflow while placing fillers".into())
                })?;
            }
        }

        self.sort_main(&target)?;

        if cfg!(debug_assertions) {
            for (j, &(a, b)) in gates.iter().enumerate() {
                assert!(self.place[2 * j] == a && self.place[2 * j + 1] == b);
            }
        }
        let fire: Vec<EdgeOp> = gates
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| EdgeOp::gate(2 * j, 2 * j + 1, li, a, b))
            .collect();
        self.push_step(fire);
        Ok(())
    }

    /// Permute the main slots so the qubit on each one reaches
    /// `target[qubit]`.
    fn sort_main(&mut self, target: &[usize]) -> Result<(), RouteError> {
        let needs_row_move = (0..self.originals).any(|v| {
            self.layout.pos_row(v).1 != self.layout.pos_row(target[self.place[v]]).1
        });
        if needs_row_move {
            let color = self.row_colors(target)?;
            self.ring_sort(&color)?;
            self.switch_rounds(target)?;
        }
        let mut key = vec![0usize; self.n];
        for v in 0..self.originals {
            let q = self.place[v];
            key[q] = self.layout.pos_row(target[q]).0;
        }
        self.ring_sort(&key)?;
        debug_assert!((0..self.originals).all(|v| target[self.place[v]] == v));
        Ok(())
    }

    /// Odd-even transposition sort along every row's ring, ordering main
    /// qubits by `key[qubit]`. Keys are distinct within a row, so `2k`
    /// alternating rounds settle everything; even positions use internal
    /// edges, odd positions the straight wires.
    fn ring_sort(&mut self, key: &[usize]) -> Result<(), RouteError> {
        let ring = self.layout.ring_len();
        let rows = self.layout.rows();
        for round in 0..ring + 2 {
            if self.rows_ordered(key) {
                return Ok(());
            }
            let mut ops = Vec::new();
            for w in 0..rows {
                let mut p = round % 2;
                while p + 1 < ring {
                    let (su, sv) = (self.layout.vertex(p, w), self.layout.vertex(p + 1, w));
                    if key[self.place[su]] > key[self.place[sv]] {
                        ops.push(EdgeOp::swap(su, sv));
                    }
                    p += 2;
                }
            }
            self.push_step(ops);
        }
        if self.rows_ordered(key) {
            Ok(())
        } else {
            Err(RouteError::Internal("ring sort failed to converge".into()))
        }
    }

    fn rows_ordered(&self, key: &[usize]) -> bool {
        let ring = self.layout.ring_len();
        (0..self.layout.rows()).all(|w| {
            (0..ring - 1).all(|p| {
                key[self.place[self.layout.vertex(p, w)]]
                    <= key[self.place[self.layout.vertex(p + 1, w)]]
            })
        })
    }

    /// Ring-position colors for the row-routing phase. Each main qubit is
    /// an edge (current row, target row) of a `2k`-regular bipartite
    /// multigraph; peeling `2k` perfect matchings colors the edges so every
    /// row holds exactly one item of each color, and so does every target
    /// row. Sorting rows by color therefore leaves each position cohort a
    /// full permutation of the rows.
    fn row_colors(&self, target: &[usize]) -> Result<Vec<usize>, RouteError> {
        let ring = self.layout.ring_len();
        let rows = self.layout.rows();
        // adj[current row] lists (site, target row); sites act as edge ids.
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(ring); rows];
        for v in 0..self.originals {
            let cur = self.layout.pos_row(v).1;
            let tgt = self.layout.pos_row(target[self.place[v]]).1;
            adj[cur].push((v, tgt));
        }
        let mut used = vec![false; self.originals];
        let mut color = vec![0usize; self.n];
        for c in 0..ring {
            let matched = perfect_bipartite_matching(rows, &adj, &used)?;
            for &site in &matched {
                used[site] = true;
                color[self.place[site]] = c;
            }
        }
        debug_assert!(used.iter().all(|&u| u));
        Ok(color)
    }

    /// Phase ii: every cohort travels once around the ring and back. The
    /// crossing wires passed on the way out hit each row dimension once,
    /// and the way back repeats them in reverse, which is exactly a
    /// rearrangeable switching network for the cohort's row permutation.
    fn switch_rounds(&mut self, target: &[usize]) -> Result<(), RouteError> {
        let ring = self.layout.ring_len();
        let rows = self.layout.rows();
        let k = self.layout.k;

        let mut cohorts: Vec<Vec<CohortItem>> = Vec::with_capacity(ring);
        for c in 0..ring {
            let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(rows);
            let mut qubits: Vec<usize> = Vec::with_capacity(rows);
            for w in 0..rows {
                let q = self.place[self.layout.vertex(c, w)];
                pairs.push((w, self.layout.pos_row(target[q]).1));
                qubits.push(q);
            }
            // Dimensions in the order this cohort's outbound walk crosses
            // them: the odd ring positions starting from c.
            let dims: Vec<usize> = (0..ring)
                .map(|t| (c + t) % ring)
                .filter(|p| p % 2 == 1)
                .map(|p| p / 2)
                .collect();
            let stages = switch_decisions(pairs, k, &dims)
                .map_err(|msg| RouteError::Internal(format!("cohort {c}: {msg}")))?;
            cohorts.push(
                qubits
                    .into_iter()
                    .zip(stages)
                    .enumerate()
                    .map(|(w, (qubit, stages))| CohortItem { qubit, row: w, stages })
                    .collect(),
            );
        }

        let mut cursor = vec![0usize; ring];
        for half in 0..2 {
            for t in 0..ring {
                let mut to_of = vec![usize::MAX; self.originals];
                for (c, items) in cohorts.iter_mut().enumerate() {
                    let (from_pos, to_pos, cross_dim) = if half == 0 {
                        let p = (c + t) % ring;
                        (p, (p + 1) % ring, (p % 2 == 1).then_some(p / 2))
                    } else {
                        let p = (c + ring - t) % ring;
                        let prev = (p + ring - 1) % ring;
                        (p, prev, (prev % 2 == 1).then_some(prev / 2))
                    };
                    for item in items.iter_mut() {
                        let from = self.layout.vertex(from_pos, item.row);
                        debug_assert_eq!(self.place[from], item.qubit);
                        if let Some(d) = cross_dim {
                            if item.stages[cursor[c]] {
                                item.row ^= 1 << d;
                            }
                        }
                        to_of[from] = self.layout.vertex(to_pos, item.row);
                    }
                    if cross_dim.is_some() {
                        cursor[c] += 1;
                    }
                }
                self.apply_move_round(&to_of)?;
            }
        }
        debug_assert!(cursor.iter().all(|&x| x == 2 * k));
        Ok(())
    }

    /// Realize one round of main-slot moves, a fixed-point-free permutation
    /// stepping every item one ring position, in five physical steps. Move
    /// cycles have even length, so their edges split into alternating O and
    /// E sets of vertex-disjoint real edges: stash the O-move targets in
    /// their pendants, swap the O edges, sweep every pendant to hand the
    /// moved items back and stash the rest, swap the E edges, unstash.
    fn apply_move_round(&mut self, to_of: &[usize]) -> Result<(), RouteError> {
        let before = if cfg!(debug_assertions) { self.place.clone() } else { Vec::new() };
        let mut visited = vec![false; self.originals];
        let mut odd_targets = Vec::new();
        let mut odd_edges = Vec::new();
        let mut even_edges = Vec::new();
        for start in 0..self.originals {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut cur = to_of[start];
            while cur != start {
                if cur >= self.originals || visited[cur] {
                    return Err(RouteError::Internal("move round is not a permutation".into()));
                }
                visited[cur] = true;
                cycle.push(cur);
                cur = to_of[cur];
            }
            if cycle.len() % 2 != 0 {
                return Err(RouteError::Internal(format!(
                    "move cycle of odd length {} cannot be scheduled",
                    cycle.len()
                )));
            }
            for (j, &u) in cycle.iter().enumerate() {
                let v = cycle[(j + 1) % cycle.len()];
                if j % 2 == 1 {
                    odd_edges.push(EdgeOp::swap(u, v));
                    odd_targets.push(v);
                } else {
                    even_edges.push(EdgeOp::swap(u, v));
                }
            }
        }
        let stash: Vec<EdgeOp> =
            odd_targets.iter().map(|&v| EdgeOp::swap(v, self.pendant(v))).collect();
        let sweep: Vec<EdgeOp> =
            (0..self.originals).map(|v| EdgeOp::swap(v, self.pendant(v))).collect();
        self.push_step(stash.clone());
        self.push_step(odd_edges);
        self.push_step(sweep);
        self.push_step(even_edges);
        self.push_step(stash);
        if cfg!(debug_assertions) {
            for v in 0..self.originals {
                assert_eq!(self.place[to_of[v]], before[v], "move round misrouted site {v}");
            }
        }
        Ok(())
    }
}

/// One perfect matching among the not-yet-used edges of a bipartite
/// multigraph with `rows` vertices per side. `adj[left]` lists
/// (edge id, right); returns the matched edge id per left vertex. The
/// remainder stays regular every time a matching is peeled, so failure
/// means a caller bug rather than bad input.
fn perfect_bipartite_matching(
    rows: usize,
    adj: &[Vec<(usize, usize)>],
    used: &[bool],
) -> Result<Vec<usize>, RouteError> {
    let mut match_right: Vec<Option<(usize, usize)>> = vec![None; rows];
    let mut match_left: Vec<Option<usize>> = vec![None; rows];
    for left in 0..rows {
        let mut visited = vec![false; rows];
        if !augment(left, adj, used, &mut visited, &mut match_right, &mut match_left) {
            return Err(RouteError::Internal(
                "regular bipartite row graph lost its perfect matching".into(),
            ));
        }
    }
    Ok(match_left.into_iter().map(|e| e.expect("every row matched")).collect())
}

fn augment(
    left: usize,
    adj: &[Vec<(usize, usize)>],
    used: &[bool],
    visited: &mut [bool],
    match_right: &mut [Option<(usize, usize)>],
    match_left: &mut [Option<usize>],
) -> bool {
    for &(edge, right) in &adj[left] {
        if used[edge] || visited[right] {
            continue;
        }
        visited[right] = true;
        let free = match match_right[right] {
            None => true,
            Some((prev_left, _)) => {
                augment(prev_left, adj, used, visited, match_right, match_left)
            }
        };
        if free {
            match_right[right] = Some((left, edge));
            match_left[left] = Some(edge);
            return true;
        }
    }
    false
}

/// Switch settings for one cohort. `pairs[i]` holds item `i`'s (current
/// row, target row); `dims[j]` is the row bit controlled by the `j`-th
/// crossing wire of the outbound walk, and the return walk crosses the
/// same dimensions in reverse. Item `i` gets `2k` booleans: slots `j` and
/// `2k-1-j` bracket recursion level `j`. Standard rearrangeable-network
/// peeling: items sharing an entry or exit switch on the current dimension
/// must part ways, the conflict graph is a union of even cycles, so a
/// 2-coloring splits the permutation into two half-sized ones.
fn switch_decisions(
    mut pairs: Vec<(usize, usize)>,
    k: usize,
    dims: &[usize],
) -> Result<Vec<Vec<bool>>, String> {
    let m = pairs.len();
    let stages = 2 * k;
    let mut out = vec![vec![false; stages]; m];
    let mut by_src = vec![usize::MAX; m];
    let mut by_dst = vec![usize::MAX; m];
    let mut half = vec![u8::MAX; m];
    for (level, &d) in dims.iter().enumerate() {
        let bit = 1usize << d;
        by_src.iter_mut().for_each(|x| *x = usize::MAX);
        by_dst.iter_mut().for_each(|x| *x = usize::MAX);
        for (i, &(s, t)) in pairs.iter().enumerate() {
            if s >= m || t >= m || by_src[s] != usize::MAX || by_dst[t] != usize::MAX {
                return Err("cohort rows are not a permutation".into());
            }
            by_src[s] = i;
            by_dst[t] = i;
        }
        half.iter_mut().for_each(|x| *x = u8::MAX);
        for i in 0..m {
            if half[i] != u8::MAX {
                continue;
            }
            half[i] = 0;
            let mut stack = vec![i];
            while let Some(j) = stack.pop() {
                let other = 1 - half[j];
                for p in [by_src[pairs[j].0 ^ bit], by_dst[pairs[j].1 ^ bit]] {
                    if half[p] == u8::MAX {
                        half[p] = other;
                        stack.push(p);
                    } else if half[p] != other {
                        return Err("switch constraints are not 2-colorable".into());
                    }
                }
            }
        }
        for i in 0..m {
            let (s, t) = pairs[i];
            let h = half[i] as usize;
            out[i][level] = (s >> d) & 1 != h;
            out[i][stages - 1 - level] = (t >> d) & 1 != h;
            pairs[i] = ((s & !bit) | (h << d), (t & !bit) | (h << d));
        }
    }
    if pairs.iter().any(|&(s, t)| s != t) {
        return Err("switch recursion left items misrouted".into());
    }
    Ok(out)
}
