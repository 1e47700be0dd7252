//! Schedule types shared by the routers, plus the replay verifier that
//! checks a schedule against its graph and circuit with no knowledge of how
//! the schedule was produced.

mod butterfly;
mod greedy;
pub mod label;

pub use butterfly::route_butterfly;
pub use greedy::route_greedy;

use crate::circuit::LayeredCircuit;
use crate::graph::{norm_edge, GraphError, InteractionGraph};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Swap,
    /// Executes the circuit gate `pair` from layer `layer` on this edge.
    Gate { layer: usize, pair: (usize, usize) },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeOp {
    pub edge: (usize, usize),
    pub kind: OpKind,
}

impl EdgeOp {
    pub fn swap(u: usize, v: usize) -> Self {
        EdgeOp { edge: norm_edge(u, v), kind: OpKind::Swap }
    }

    pub fn gate(u: usize, v: usize, layer: usize, a: usize, b: usize) -> Self {
        EdgeOp { edge: norm_edge(u, v), kind: OpKind::Gate { layer, pair: norm_edge(a, b) } }
    }
}

/// A hardware schedule: time steps of vertex-disjoint edge operations,
/// starting from an explicit placement (`initial_placement[vertex]` is the
/// qubit put there before step 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedSchedule {
    pub initial_placement: Vec<usize>,
    pub steps: Vec<Vec<EdgeOp>>,
}

impl RoutedSchedule {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn swap_count(&self) -> usize {
        self.steps
            .iter()
            .flatten()
            .filter(|op| matches!(op.kind, OpKind::Swap))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScheduleFile::from(self))
            .expect("schedule serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: ScheduleFile =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        file.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeOpFile {
    edge: [usize; 2],
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    gate: Option<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    initial_placement: Vec<usize>,
    steps: Vec<Vec<EdgeOpFile>>,
}

impl From<&RoutedSchedule> for ScheduleFile {
    fn from(s: &RoutedSchedule) -> Self {
        let steps = s
            .steps
            .iter()
            .map(|step| {
                step.iter()
                    .map(|op| match op.kind {
                        OpKind::Swap => EdgeOpFile {
                            edge: [op.edge.0, op.edge.1],
                            kind: "SWAP".into(),
                            gate: None,
                        },
                        OpKind::Gate { layer, pair } => EdgeOpFile {
                            edge: [op.edge.0, op.edge.1],
                            kind: "GATE".into(),
                            gate: Some([layer, pair.0, pair.1]),
                        },
                    })
                    .collect()
            })
            .collect();
        ScheduleFile { initial_placement: s.initial_placement.clone(), steps }
    }
}

impl TryFrom<ScheduleFile> for RoutedSchedule {
    type Error = GraphError;

    fn try_from(file: ScheduleFile) -> Result<Self, GraphError> {
        let mut steps = Vec::with_capacity(file.steps.len());
        for step in file.steps {
            let mut ops = Vec::with_capacity(step.len());
            for op in step {
                let kind = match (op.kind.as_str(), op.gate) {
                    ("SWAP", None) => OpKind::Swap,
                    ("GATE", Some([layer, a, b])) => OpKind::Gate { layer, pair: (a, b) },
                    _ => {
                        return Err(GraphError::Malformed(format!(
                            "op kind {:?} with gate {:?}",
                            op.kind, op.gate
                        )))
                    }
                };
                ops.push(EdgeOp { edge: (op.edge[0], op.edge[1]), kind });
            }
            steps.push(ops);
        }
        Ok(RoutedSchedule { initial_placement: file.initial_placement, steps })
    }
}

/// Router output: the schedule plus how the steps split across circuit
/// layers and how many labeling rounds each layer took.
#[derive(Debug, Clone)]
pub struct RouteResult {
    pub schedule: RoutedSchedule,
    /// Steps spent on each layer, in layer order; sums to the total depth.
    pub layer_steps: Vec<usize>,
    /// Sub-rounds per layer (1 unless some interactions had to wait).
    pub layer_rounds: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("this router needs a modified-butterfly graph, got family {0}")]
    WrongFamily(String),
    #[error("circuit needs {needed} qubits but the graph has {available} sites")]
    TooWide { needed: usize, available: usize },
    #[error("circuit fails validation: {0:?}")]
    InvalidCircuit(Vec<crate::circuit::CircuitViolation>),
    #[error("the swap-usable part of the graph is disconnected")]
    Disconnected,
    #[error("internal scheduling failure: {0}")]
    Internal(String),
}

/// Routed steps per circuit layer, exact and as a float.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthOverhead {
    pub steps: usize,
    pub layers: usize,
    pub exact: Ratio<u64>,
}

impl DepthOverhead {
    pub fn new(steps: usize, layers: usize) -> Result<Self, GraphError> {
        if layers == 0 {
            return Err(GraphError::InvalidParameter(
                "overhead per layer needs at least one layer".into(),
            ));
        }
        Ok(DepthOverhead { steps, layers, exact: Ratio::new(steps as u64, layers as u64) })
    }

    pub fn value(&self) -> f64 {
        self.steps as f64 / self.layers as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    /// `initial_placement` is not a permutation of the sites.
    NotAPermutation,
    UnknownEdge { step: usize, edge: (usize, usize) },
    /// The edge exists only as regularity padding and cannot be operated.
    PaddingEdge { step: usize, edge: (usize, usize) },
    /// Two ops in one step touch the same site.
    OverlappingOps { step: usize, vertex: usize },
    /// The named gate is not in the circuit.
    GateUnknown { step: usize, layer: usize, pair: (usize, usize) },
    /// The gate's qubits are not the two sitting on this edge.
    GateNotCoLocated { step: usize, layer: usize, pair: (usize, usize) },
    /// A qubit still has an earlier gate pending.
    GateOutOfOrder { step: usize, layer: usize, pair: (usize, usize) },
    GateRepeated { step: usize, layer: usize, pair: (usize, usize) },
    /// The schedule ended without executing this gate.
    GateMissing { layer: usize, pair: (usize, usize) },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // The derived debug text is already the clearest thing to print.
        write!(f, "{self:?}")
    }
}

/// Replays a schedule against the graph and circuit, reporting every rule it
/// breaks. An empty result means the schedule is valid: it only operates
/// real non-padding edges, one op per site per step, and executes every gate
/// exactly once, in order, on co-located qubits.
pub fn verify_schedule(
    g: &InteractionGraph,
    c: &LayeredCircuit,
    s: &RoutedSchedule,
) -> Vec<ScheduleViolation> {
    let n = g.vertex_count();
    let mut violations = Vec::new();

    let mut seen = vec![false; n];
    let mut is_perm = s.initial_placement.len() == n;
    if is_perm {
        for &q in &s.initial_placement {
            if q >= n || seen[q] {
                is_perm = false;
                break;
            }
            seen[q] = true;
        }
    }
    if !is_perm {
        violations.push(ScheduleViolation::NotAPermutation);
        return violations;
    }

    let seqs: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|q| if q < c.n { c.qubit_gate_sequence(q) } else { Vec::new() })
        .collect();
    let mut ptr = vec![0usize; n];
    let mut executed: Vec<Vec<bool>> = c.layers.iter().map(|l| vec![false; l.len()]).collect();

    let mut placement = s.initial_placement.clone();
    for (t, step) in s.steps.iter().enumerate() {
        let mut used = vec![false; n];
        for op in step {
            let (u, v) = op.edge;
            if u >= n || v >= n || !g.contains_edge(u, v) {
                violations.push(ScheduleViolation::UnknownEdge { step: t, edge: op.edge });
                continue;
            }
            if g.is_unused(u, v) {
                violations.push(ScheduleViolation::PaddingEdge { step: t, edge: op.edge });
                continue;
            }
            let mut overlapped = false;
            for w in [u, v] {
                if used[w] {
                    violations.push(ScheduleViolation::OverlappingOps { step: t, vertex: w });
                    overlapped = true;
                }
                used[w] = true;
            }
            if overlapped {
                continue;
            }
            match op.kind {
                OpKind::Swap => placement.swap(u, v),
                OpKind::Gate { layer, pair } => {
                    let (a, b) = pair;
                    let index = c
                        .layers
                        .get(layer)
                        .and_then(|l| l.iter().position(|&p| p == pair));
                    let Some(index) = index else {
                        violations.push(ScheduleViolation::GateUnknown { step: t, layer, pair });
                        continue;
                    };
                    if a >= n || b >= n {
                        violations.push(ScheduleViolation::GateUnknown { step: t, layer, pair });
                        continue;
                    }
                    if executed[layer][index] {
                        violations.push(ScheduleViolation::GateRepeated { step: t, layer, pair });
                        continue;
                    }
                    let here = (placement[u], placement[v]);
                    if norm_edge(here.0, here.1) != pair {
                        violations.push(ScheduleViolation::GateNotCoLocated {
                            step: t,
                            layer,
                            pair,
                        });
                        continue;
                    }
                    if seqs[a].get(ptr[a]) != Some(&(layer, b))
                        || seqs[b].get(ptr[b]) != Some(&(layer, a))
                    {
                        violations.push(ScheduleViolation::GateOutOfOrder { step: t, layer, pair });
                        continue;
                    }
                    executed[layer][index] = true;
                    ptr[a] += 1;
                    ptr[b] += 1;
                }
            }
        }
    }

    for (layer, done) in executed.iter().enumerate() {
        for (index, &ok) in done.iter().enumerate() {
            if !ok {
                violations.push(ScheduleViolation::GateMissing {
                    layer,
                    pair: c.layers[layer][index],
                });
            }
        }
    }
    violations
}

/// Merges runs of consecutive steps that consist only of pendant-pair swaps.
/// Disjoint swaps commute and a repeated swap cancels, so such a run equals
/// one step swapping the pairs that appear an odd number of times.
pub(crate) fn merge_pendant_steps(
    steps: Vec<Vec<EdgeOp>>,
    is_pendant_edge: impl Fn((usize, usize)) -> bool,
) -> Vec<Vec<EdgeOp>> {
    let mut out: Vec<Vec<EdgeOp>> = Vec::with_capacity(steps.len());
    let mut run: Vec<(usize, usize)> = Vec::new();
    let flush = |run: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<EdgeOp>>| {
        if run.is_empty() {
            return;
        }
        run.sort_unstable();
        let mut step = Vec::new();
        let mut i = 0;
        while i < run.len() {
            let mut count = 1;
            while i + count < run.len() && run[i + count] == run[i] {
                count += 1;
            }
            if count % 2 == 1 {
                step.push(EdgeOp { edge: run[i], kind: OpKind::Swap });
            }
            i += count;
        }
        if !step.is_empty() {
            out.push(step);
        }
        run.clear();
    };
    for step in steps {
        let mergeable = !step.is_empty()
            && step
                .iter()
                .all(|op| matches!(op.kind, OpKind::Swap) && is_pendant_edge(op.edge));
        if mergeable {
            run.extend(step.iter().map(|op| op.edge));
        } else {
            flush(&mut run, &mut out);
            if !step.is_empty() {
                out.push(step);
            }
        }
    }
    flush(&mut run, &mut out);
    out
}
