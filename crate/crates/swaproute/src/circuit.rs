//! Layered two-qubit circuits. A layer is a set of disjoint qubit pairs; a
//! full layer touches every qubit, which is the worst case for routing.

use crate::graph::{norm_edge, GraphError};
use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredCircuit {
    /// Number of logical qubits, numbered `0..n`.
    pub n: usize,
    /// Gate layers, front to back. Pairs are stored `(a, b)` with `a < b`.
    pub layers: Vec<Vec<(usize, usize)>>,
    /// Seed used by the generator, when the circuit came from one.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircuitViolation {
    QubitOutOfRange { layer: usize, qubit: usize },
    DuplicateQubit { layer: usize, qubit: usize },
    SelfPair { layer: usize, qubit: usize },
}

impl LayeredCircuit {
    pub fn new(n: usize, layers: Vec<Vec<(usize, usize)>>, seed: Option<u64>) -> Self {
        LayeredCircuit { n, layers, seed }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Per-qubit gate order: `(layer, partner)` entries front to back.
    /// Routing correctness is judged against this sequence.
    pub fn qubit_gate_sequence(&self, q: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            for &(a, b) in layer {
                if a == q {
                    out.push((i, b));
                } else if b == q {
                    out.push((i, a));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Vec<CircuitViolation> {
        let mut violations = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut seen = vec![false; self.n];
            for &(a, b) in layer {
                if a == b {
                    violations.push(CircuitViolation::SelfPair { layer: i, qubit: a });
                }
                for q in [a, b] {
                    if q >= self.n {
                        violations.push(CircuitViolation::QubitOutOfRange { layer: i, qubit: q });
                    } else if seen[q] && a != b {
                        violations.push(CircuitViolation::DuplicateQubit { layer: i, qubit: q });
                    } else {
                        seen[q] = true;
                    }
                }
            }
        }
        violations
    }

    pub fn to_json(&self) -> String {
        let file = CircuitFile {
            n: self.n,
            m: self.layers.len(),
            layers: self.layers.clone(),
            seed: self.seed,
        };
        serde_json::to_string_pretty(&file).expect("circuit serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: CircuitFile =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        if file.m != file.layers.len() {
            return Err(GraphError::Malformed(format!(
                "declared depth {} but {} layers present",
                file.m,
                file.layers.len()
            )));
        }
        Ok(LayeredCircuit { n: file.n, layers: file.layers, seed: file.seed })
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitFile {
    n: usize,
    m: usize,
    layers: Vec<Vec<(usize, usize)>>,
    seed: Option<u64>,
}

/// Sample `m` independent uniform perfect matchings of the qubits. Each
/// layer shuffles `0..n` and pairs consecutive entries, so every matching
/// arises from exactly `2^(n/2) * (n/2)!` shuffles and the draw is uniform.
pub fn generate_full_layer_circuit(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<LayeredCircuit, GraphError> {
    if n < 2 || n % 2 != 0 {
        return Err(GraphError::InvalidParameter(format!(
            "full layers need an even qubit count >= 2, got {n}"
        )));
    }
    if m == 0 {
        return Err(GraphError::InvalidParameter("need at least one layer".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(m);
    for _ in 0..m {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut layer: Vec<(usize, usize)> =
            order.chunks_exact(2).map(|c| norm_edge(c[0], c[1])).collect();
        layer.sort_unstable();
        layers.push(layer);
    }
    Ok(LayeredCircuit { n, layers, seed: Some(seed) })
}

/// Number of perfect matchings of `n` labeled points: `n! / (2^(n/2) (n/2)!)`.
pub fn count_layer_matchings(n: usize) -> Result<BigUint, GraphError> {
    if n % 2 != 0 {
        return Err(GraphError::InvalidParameter(format!(
            "matchings of an odd set do not cover it, got n = {n}"
        )));
    }
    // Equivalent double-factorial form (n-1)!! avoids the division.
    let mut out = BigUint::one();
    let mut i = 1usize;
    while i < n {
        out *= BigUint::from(i);
        i += 2;
    }
    Ok(out)
}
