//! Seeded one-to-all shortest paths over nonnegative arc weights.
//!
//! Instead of a source vertex with possibly negative outgoing arcs, each
//! vertex may carry an initial label (its seed). Seeding vertex `h` with `-d_h`
//! computes exactly what a source vertex with arcs of weight `-d_h` would,
//! while every arc handled by the priority queue stays nonnegative.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsspError {
    #[error(
        "arc ({tail},{head}) has invalid weight {weight}; weights must be finite and nonnegative"
    )]
    InvalidWeight {
        tail: usize,
        head: usize,
        weight: f64,
    },

    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("seed label of vertex {vertex} is not a finite number: {value}")]
    InvalidSeed { vertex: usize, value: f64 },

    #[error("at least one seeded vertex is required")]
    NoSeeds,
}

/// Directed graph with nonnegative weights, stored as forward adjacency
/// (compressed rows).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    offsets: Vec<usize>,
    heads: Vec<usize>,
    weights: Vec<f64>,
}

impl WeightedDigraph {
    pub fn new(
        vertex_count: usize,
        arcs: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, SsspError> {
        let arcs: Vec<(usize, usize, f64)> = arcs.into_iter().collect();
        let mut offsets = vec![0usize; vertex_count + 1];
        for &(tail, head, weight) in &arcs {
            for v in [tail, head] {
                if v >= vertex_count {
                    return Err(SsspError::VertexOutOfRange {
                        vertex: v,
                        vertex_count,
                    });
                }
            }
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(SsspError::InvalidWeight { tail, head, weight });
            }
            offsets[tail + 1] += 1;
        }
        for v in 0..vertex_count {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut heads = vec![0usize; arcs.len()];
        let mut weights = vec![0.0; arcs.len()];
        for (tail, head, weight) in arcs {
            let slot = fill[tail];
            heads[slot] = head;
            weights[slot] = weight;
            fill[tail] += 1;
        }
        Ok(Self {
            offsets,
            heads,
            weights,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.heads.len()
    }

    pub fn out_arcs(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.heads[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// All arcs as `(tail, head, weight)`, grouped by tail.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |t| self.out_arcs(t).map(move |(h, w)| (t, h, w)))
    }
}

/// Initial distance labels. Vertices without a seed start at `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedLabels {
    seeds: Vec<(usize, f64)>,
}

impl SeedLabels {
    /// Repeated vertices keep their smallest label.
    pub fn new(seeds: Vec<(usize, f64)>) -> Result<Self, SsspError> {
        if seeds.is_empty() {
            return Err(SsspError::NoSeeds);
        }
        for &(vertex, value) in &seeds {
            if !value.is_finite() {
                return Err(SsspError::InvalidSeed { vertex, value });
            }
        }
        Ok(Self { seeds })
    }

    /// Seeds vertex `i` with `values[i]`; `+∞` entries are left unseeded.
    pub fn dense(values: &[f64]) -> Result<Self, SsspError> {
        Self::new(
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != f64::INFINITY)
                .map(|(i, v)| (i, *v))
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.seeds.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    fn initial_labels(&self, vertex_count: usize) -> Result<Vec<f64>, SsspError> {
        let mut dist = vec![f64::INFINITY; vertex_count];
        for &(vertex, value) in &self.seeds {
            if vertex >= vertex_count {
                return Err(SsspError::VertexOutOfRange {
                    vertex,
                    vertex_count,
                });
            }
            if value < dist[vertex] {
                dist[vertex] = value;
            }
        }
        Ok(dist)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    // Reversed for a min-heap; ties go to the lowest vertex index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra with every seeded vertex in the queue from the start.
///
/// `dist[v]` is the minimum over seeded `h` and `h → v` paths of the seed of
/// `h` plus the path weight, or `+∞` when no seeded vertex reaches `v`.
pub fn shortest_paths_seeded(
    graph: &WeightedDigraph,
    seeds: &SeedLabels,
) -> Result<Vec<f64>, SsspError> {
    let n = graph.vertex_count();
    let mut dist = seeds.initial_labels(n)?;
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::with_capacity(n);
    for (vertex, &d) in dist.iter().enumerate() {
        if d.is_finite() {
            heap.push(QueueEntry { dist: d, vertex });
        }
    }
    while let Some(QueueEntry { dist: d, vertex }) = heap.pop() {
        if settled[vertex] || d > dist[vertex] {
            continue;
        }
        settled[vertex] = true;
        for (head, w) in graph.out_arcs(vertex) {
            let candidate = d + w;
            if candidate < dist[head] {
                dist[head] = candidate;
                heap.push(QueueEntry {
                    dist: candidate,
                    vertex: head,
                });
            }
        }
    }
    Ok(dist)
}

/// FIFO label-correcting variant of [`shortest_paths_seeded`].
///
/// Slower but structurally independent; it relaxes arcs until no label
/// improves, which converges because no arc weight is negative.
pub fn shortest_paths_label_correcting(
    graph: &WeightedDigraph,
    seeds: &SeedLabels,
) -> Result<Vec<f64>, SsspError> {
    let n = graph.vertex_count();
    let mut dist = seeds.initial_labels(n)?;
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    for (v, d) in dist.iter().enumerate() {
        if d.is_finite() {
            queued[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let dv = dist[v];
        for (head, w) in graph.out_arcs(v) {
            let candidate = dv + w;
            if candidate < dist[head] {
                dist[head] = candidate;
                if !queued[head] {
                    queued[head] = true;
                    queue.push_back(head);
                }
            }
        }
    }
    Ok(dist)
}
