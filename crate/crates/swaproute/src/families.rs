//! Graph constructors. All are deterministic functions of their parameters
//! (and seed, where one applies).

use crate::graph::{norm_edge, GraphError, GraphFamily, InteractionGraph};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Retry budget for rejection-sampled constructions.
const GENERATION_ATTEMPTS: usize = 10_000;

/// Cyclic butterfly: vertices `(i, w)` with level `i` in `Z_k` and row
/// `w` in `{0,1}^k`; edges join `(i, w)` to `(i+1 mod k, w)` and to
/// `(i+1 mod k, w xor e_i)`. For `k >= 3` this is 4-regular with
/// `k·2^k` vertices; at `k = 2` the two straight wirings of each row pair
/// collapse onto one undirected edge, leaving degree 3.
pub fn build_cyclic_butterfly(k: u32) -> Result<InteractionGraph, GraphError> {
    if k < 2 {
        return Err(GraphError::InvalidParameter(format!(
            "cyclic butterfly needs k >= 2 levels, got {k}"
        )));
    }
    if k > 16 {
        return Err(GraphError::InvalidParameter(format!("k = {k} is out of supported range")));
    }
    let k = k as usize;
    let rows = 1usize << k;
    let n = k * rows;
    let vid = |level: usize, row: usize| (level % k) * rows + row;
    let mut edges = Vec::with_capacity(2 * n);
    for level in 0..k {
        for row in 0..rows {
            edges.push((vid(level, row), vid(level + 1, row)));
            edges.push((vid(level, row), vid(level + 1, row ^ (1 << level))));
        }
    }
    InteractionGraph::new(n, edges, GraphFamily::Butterfly { k: k as u32 }, Vec::new(), Vec::new())
}

/// Coordinate bookkeeping for the modified butterfly, a pure function of
/// `k`. Each butterfly vertex `b = level·2^k + row` splits into an in-half
/// `2b` (carrying the backward wires) and an out-half `2b+1` (carrying the
/// forward wires), joined by an internal edge. Within a fixed row the
/// split vertices form a ring of `2k` positions: position `2i` is the
/// in-half at level `i`, position `2i+1` the out-half. Odd-position ring
/// transitions are where the cross edges live (dimension `i` flips row bit
/// `i`). Pendants occupy ids `[2·k·2^k, 4·k·2^k)`.
#[derive(Debug, Clone, Copy)]
pub struct ButterflyLayout {
    pub k: usize,
}

impl ButterflyLayout {
    pub fn for_graph(g: &InteractionGraph) -> Option<ButterflyLayout> {
        match g.family() {
            GraphFamily::ModifiedButterfly { k, .. } => Some(ButterflyLayout { k: k as usize }),
            _ => None,
        }
    }

    pub fn rows(&self) -> usize {
        1 << self.k
    }

    /// Ring length per row, i.e. number of level positions.
    pub fn ring_len(&self) -> usize {
        2 * self.k
    }

    /// Number of split (original) vertices.
    pub fn originals(&self) -> usize {
        2 * self.k * self.rows()
    }

    /// Total vertex count including pendants.
    pub fn total(&self) -> usize {
        2 * self.originals()
    }

    pub fn vertex(&self, pos: usize, row: usize) -> usize {
        let level = pos / 2;
        2 * (level * self.rows() + row) + pos % 2
    }

    pub fn pos_row(&self, v: usize) -> (usize, usize) {
        let b = v / 2;
        (2 * (b / self.rows()) + v % 2, b % self.rows())
    }

    pub fn pendant(&self, v: usize) -> usize {
        self.originals() + v
    }

    pub fn is_original(&self, v: usize) -> bool {
        v < self.originals()
    }

    /// Internal edges `(in-half, out-half)`, one per butterfly vertex; they
    /// pair up the original vertices, so a sorted layer can execute on them
    /// simultaneously.
    pub fn internal_edges(&self) -> Vec<(usize, usize)> {
        (0..self.originals() / 2).map(|b| (2 * b, 2 * b + 1)).collect()
    }

    /// Step one position forward around the ring. `cross` selects the
    /// row-bit flip and is only legal on odd (out-half) positions.
    pub fn advance(&self, pos: usize, row: usize, cross: bool) -> (usize, usize) {
        debug_assert!(!cross || pos % 2 == 1);
        let next_pos = (pos + 1) % self.ring_len();
        let next_row = if cross { row ^ (1 << (pos / 2)) } else { row };
        (next_pos, next_row)
    }

    /// Step one position backward; `cross` is only legal on even
    /// (in-half) positions, flipping the dimension of the transition
    /// being re-crossed.
    pub fn retreat(&self, pos: usize, row: usize, cross: bool) -> (usize, usize) {
        debug_assert!(!cross || pos % 2 == 0);
        let prev_pos = (pos + self.ring_len() - 1) % self.ring_len();
        let next_row = if cross { row ^ (1 << (prev_pos / 2)) } else { row };
        (prev_pos, next_row)
    }
}

/// Degree-reduced routing butterfly: split every butterfly vertex into an
/// in/out pair (degree 3 results), attach one pendant per split vertex, and pad with
/// seed-chosen extra edges until the graph is `r`-regular. Padding edges
/// are flagged unused; routers never traverse them.
pub fn build_modified_butterfly(
    k: u32,
    r: usize,
    seed: u64,
) -> Result<InteractionGraph, GraphError> {
    if k < 2 || k > 12 {
        return Err(GraphError::InvalidParameter(format!(
            "modified butterfly needs 2 <= k <= 12, got {k}"
        )));
    }
    let layout = ButterflyLayout { k: k as usize };
    let rows = layout.rows();
    let originals = layout.originals();
    let n = layout.total();
    // Split vertices carry degree 4 (two wires + internal + pendant), so
    // nothing smaller is reachable by adding edges.
    if r < 4 {
        return Err(GraphError::InvalidParameter(format!(
            "modified butterfly degree must be at least 4, got {r}"
        )));
    }
    if r >= n {
        return Err(GraphError::InvalidParameter(format!("degree {r} needs more than {n} vertices")));
    }
    if n * r % 2 != 0 {
        return Err(GraphError::InvalidParameter(format!(
            "no {r}-regular graph on {n} vertices exists (odd degree sum)"
        )));
    }

    let kk = k as usize;
    let mut edges = Vec::new();
    for b in 0..originals / 2 {
        edges.push((2 * b, 2 * b + 1));
    }
    for level in 0..kk {
        for row in 0..rows {
            let out = layout.vertex(2 * level + 1, row);
            let next_level = (level + 1) % kk;
            edges.push((out, layout.vertex(2 * next_level, row)));
            edges.push((out, layout.vertex(2 * next_level, row ^ (1 << level))));
        }
    }
    let pendant_pairs: Vec<(usize, usize)> =
        (0..originals).map(|v| (v, layout.pendant(v))).collect();
    edges.extend_from_slice(&pendant_pairs);

    let existing: BTreeSet<(usize, usize)> = edges.iter().map(|&(u, v)| norm_edge(u, v)).collect();
    let mut degree = vec![0usize; n];
    for &(u, v) in &existing {
        degree[u] += 1;
        degree[v] += 1;
    }
    debug_assert!(degree.iter().enumerate().all(|(v, &d)| if v < originals { d == 4 } else { d == 1 }));

    let mut stubs: Vec<usize> = Vec::new();
    for (v, &d) in degree.iter().enumerate() {
        stubs.extend(std::iter::repeat(v).take(r - d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let padding = pair_stubs(&stubs, &existing, &mut rng)?;
    edges.extend_from_slice(&padding);

    InteractionGraph::new(
        n,
        edges,
        GraphFamily::ModifiedButterfly { k, r },
        pendant_pairs,
        padding,
    )
}

/// One pairing (configuration model) attempt: shuffle the stub list, pair
/// consecutive entries, reject loops and repeated or already-present edges.
fn pair_stubs_once(
    stubs: &mut [usize],
    existing: &BTreeSet<(usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(usize, usize)>> {
    debug_assert!(stubs.len() % 2 == 0);
    stubs.shuffle(rng);
    let mut chosen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for pair in stubs.chunks_exact(2) {
        let e = norm_edge(pair[0], pair[1]);
        if e.0 == e.1 || existing.contains(&e) || !chosen.insert(e) {
            return None;
        }
    }
    Some(chosen.into_iter().collect())
}

fn pair_stubs(
    stubs: &[usize],
    existing: &BTreeSet<(usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>, GraphError> {
    let mut stubs = stubs.to_vec();
    for _ in 0..GENERATION_ATTEMPTS {
        if let Some(edges) = pair_stubs_once(&mut stubs, existing, rng) {
            return Ok(edges);
        }
    }
    Err(GraphError::GenerationFailed(GENERATION_ATTEMPTS))
}

/// Uniform-ish random `r`-regular simple connected graph via the pairing
/// model with full rejection.
pub fn build_random_regular(n: usize, r: usize, seed: u64) -> Result<InteractionGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter(format!("need n >= 2 vertices, got {n}")));
    }
    if r == 0 || r >= n {
        return Err(GraphError::InvalidParameter(format!(
            "regular degree must satisfy 1 <= r < n, got r={r}, n={n}"
        )));
    }
    if n * r % 2 != 0 {
        return Err(GraphError::InvalidParameter(format!(
            "no {r}-regular graph on {n} vertices exists (odd degree sum)"
        )));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(r)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let empty = BTreeSet::new();
    for _ in 0..GENERATION_ATTEMPTS {
        let Some(edges) = pair_stubs_once(&mut stubs, &empty, &mut rng) else {
            continue;
        };
        let g =
            InteractionGraph::new(n, edges, GraphFamily::RandomRegular { r }, Vec::new(), Vec::new())?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationFailed(GENERATION_ATTEMPTS))
}

/// `rows x cols` grid, for comparison experiments.
pub fn build_lattice(rows: usize, cols: usize) -> Result<InteractionGraph, GraphError> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(GraphError::InvalidParameter(format!(
            "lattice needs at least two sites, got {rows}x{cols}"
        )));
    }
    let vid = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((vid(r, c), vid(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((vid(r, c), vid(r + 1, c)));
            }
        }
    }
    InteractionGraph::new(rows * cols, edges, GraphFamily::Lattice { rows, cols }, Vec::new(), Vec::new())
}

pub fn build_complete(n: usize) -> Result<InteractionGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidParameter(format!("complete graph needs n >= 2, got {n}")));
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    InteractionGraph::new(n, edges, GraphFamily::Complete, Vec::new(), Vec::new())
}
