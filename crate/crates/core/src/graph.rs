//! Directed metric graphs, their incidence structure and the graph classes
//! used by the symmetry results.
//!
//! Edge `j` runs from `tails[j]` (its value at `x = 0`) to `heads[j]` (its
//! value at `x = 1`). All edges have unit length.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricGraph {
    n_nodes: usize,
    tails: Vec<usize>,
    heads: Vec<usize>,
}

impl MetricGraph {
    /// Builds a graph on `n_nodes` nodes from `(tail, head)` pairs.
    ///
    /// Multiple edges are allowed; self-loops and isolated nodes are not.
    pub fn new(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut touched = vec![false; n_nodes];
        for (j, &(t, h)) in edges.iter().enumerate() {
            for v in [t, h] {
                if v >= n_nodes {
                    return Err(Error::BadIndex { index: v, n_nodes });
                }
                touched[v] = true;
            }
            if t == h {
                return Err(Error::SelfLoop(j));
            }
        }
        if let Some(k) = touched.iter().position(|&seen| !seen) {
            return Err(Error::IsolatedNode(k));
        }
        Ok(Self {
            n_nodes,
            tails: edges.iter().map(|e| e.0).collect(),
            heads: edges.iter().map(|e| e.1).collect(),
        })
    }

    /// Builds a graph whose node set is `0..=max index`.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self> {
        let n = edges.iter().map(|&(t, h)| t.max(h) + 1).max().unwrap_or(0);
        Self::new(n, edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.tails.len()
    }

    pub fn tails(&self) -> &[usize] {
        &self.tails
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn edge(&self, j: usize) -> (usize, usize) {
        (self.tails[j], self.heads[j])
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.tails.iter().copied().zip(self.heads.iter().copied()).collect()
    }

    /// Γ⁺(v): edges starting at `v`.
    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.n_edges()).filter(|&j| self.tails[j] == v).collect()
    }

    /// Γ⁻(v): edges ending at `v`.
    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.n_edges()).filter(|&j| self.heads[j] == v).collect()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.tails.iter().filter(|&&t| t == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.heads.iter().filter(|&&h| h == v).count()
    }

    /// |Γ(v)|
    pub fn degree(&self, v: usize) -> usize {
        self.out_degree(v) + self.in_degree(v)
    }

    /// The same graph with every edge reversed.
    pub fn reversed(&self) -> Self {
        Self {
            n_nodes: self.n_nodes,
            tails: self.heads.clone(),
            heads: self.tails.clone(),
        }
    }

    /// Node sets of the weakly connected components, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.undirected_adjacency();
        let mut seen = vec![false; self.n_nodes];
        let mut out = Vec::new();
        for start in 0..self.n_nodes {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(w, _, _) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// No two edges join the same unordered pair of nodes.
    pub fn is_simple(&self) -> bool {
        let mut pairs: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .map(|(t, h)| (t.min(h), t.max(h)))
            .collect();
        pairs.sort_unstable();
        pairs.windows(2).all(|w| w[0] != w[1])
    }

    /// For each node: `(neighbour, edge, +1 if traversed tail→head else -1)`.
    fn undirected_adjacency(&self) -> Vec<Vec<(usize, usize, i64)>> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for (j, (t, h)) in self.edges().into_iter().enumerate() {
            adj[t].push((h, j, 1));
            adj[h].push((t, j, -1));
        }
        adj
    }

    pub fn incidence(&self) -> IncidenceSet {
        IncidenceSet::new(self)
    }

    pub fn classify(&self) -> GraphClass {
        classify(self)
    }
}

/// Incidence matrices `I⁺`, `I⁻`, the stacked `Ĩ = ((I⁺)ᵀ; (I⁻)ᵀ)` and the
/// degree matrix `D = ĨᵀĨ`, all in integer arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceSet {
    /// n×m, entry (k, j) is 1 iff edge j starts at node k.
    pub i_plus: DMatrix<i64>,
    /// n×m, entry (k, j) is 1 iff edge j ends at node k.
    pub i_minus: DMatrix<i64>,
    /// 2m×n; maps nodal values `d` to the endpoint traces `(f(0), f(1))`.
    pub i_tilde: DMatrix<i64>,
    /// n×n diagonal matrix of degrees |Γ(v_k)|.
    pub degree: DMatrix<i64>,
}

impl IncidenceSet {
    fn new(g: &MetricGraph) -> Self {
        let (n, m) = (g.n_nodes(), g.n_edges());
        let mut i_plus = DMatrix::zeros(n, m);
        let mut i_minus = DMatrix::zeros(n, m);
        for j in 0..m {
            i_plus[(g.tails[j], j)] = 1;
            i_minus[(g.heads[j], j)] = 1;
        }
        let mut i_tilde = DMatrix::zeros(2 * m, n);
        i_tilde.rows_mut(0, m).copy_from(&i_plus.transpose());
        i_tilde.rows_mut(m, m).copy_from(&i_minus.transpose());
        let degree = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            (0..n).map(|k| g.degree(k) as i64),
        ));
        Self {
            i_plus,
            i_minus,
            i_tilde,
            degree,
        }
    }

    /// The graph-theoretic incidence matrix `I⁺ − I⁻`.
    pub fn signed(&self) -> DMatrix<i64> {
        &self.i_plus - &self.i_minus
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.degree.diagonal().iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarDirection {
    Inbound,
    Outbound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub direction: StarDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDegrees {
    pub outgoing: usize,
    pub incoming: usize,
}

/// A partition of the nodes into layers `V_1, …, V_L` (here 0-based) such
/// that every edge leaving `V_p` ends in `V_{p+1}`, and edges leaving the last
/// layer end in the first one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDecomposition {
    pub layers: Vec<Vec<usize>>,
    /// Whether some edge leaves the last layer (and therefore ends in the first).
    pub wraps: bool,
    /// In- and out-degrees depend only on the layer.
    pub symmetric: bool,
    /// Per-layer degrees, present when `symmetric`.
    pub degrees: Option<Vec<LayerDegrees>>,
}

impl LayerDecomposition {
    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    /// Layer index of every node.
    pub fn node_layers(&self, n_nodes: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n_nodes];
        for (p, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                out[v] = p;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphClass {
    pub connected: bool,
    pub simple: bool,
    pub completely_unconnected: bool,
    pub bipartite: bool,
    pub eulerian: bool,
    pub star: Option<Star>,
    pub layers: Option<LayerDecomposition>,
}

pub fn classify(g: &MetricGraph) -> GraphClass {
    let n = g.n_nodes();
    let completely_unconnected = (0..n).all(|v| g.degree(v) == 1);
    let bipartite = (0..n).all(|v| g.out_degree(v) == 0 || g.in_degree(v) == 0);
    let eulerian = (0..n).all(|v| g.out_degree(v) == g.in_degree(v));
    GraphClass {
        connected: g.is_connected(),
        simple: g.is_simple(),
        completely_unconnected,
        bipartite,
        eulerian,
        star: find_star(g),
        layers: find_layers(g),
    }
}

/// A star has a node that is the tail (outbound) or the head (inbound) of
/// every edge. Outbound is reported when both hold.
pub fn find_star(g: &MetricGraph) -> Option<Star> {
    let t0 = g.tails[0];
    if g.tails.iter().all(|&t| t == t0) {
        return Some(Star {
            center: t0,
            direction: StarDirection::Outbound,
        });
    }
    let h0 = g.heads[0];
    if g.heads.iter().all(|&h| h == h0) {
        return Some(Star {
            center: h0,
            direction: StarDirection::Inbound,
        });
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Layer potentials: one integer per node with `pot(head) = pot(tail) + 1`
/// along a spanning forest. Returns the potentials and the gcd of the
/// discrepancies of all remaining edges (0 when every cycle is balanced).
fn layer_potentials(g: &MetricGraph) -> (Vec<i64>, u64, Vec<Vec<usize>>) {
    let adj = g.undirected_adjacency();
    let comps = g.components();
    let mut pot = vec![0i64; g.n_nodes()];
    let mut seen = vec![false; g.n_nodes()];
    for comp in &comps {
        let root = comp[0];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, _, dir) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    pot[w] = pot[v] + dir;
                    queue.push_back(w);
                }
            }
        }
        let lo = comp.iter().map(|&v| pot[v]).min().unwrap_or(0);
        for &v in comp {
            pot[v] -= lo;
        }
    }
    let period = g
        .edges()
        .into_iter()
        .map(|(t, h)| (pot[h] - pot[t] - 1).unsigned_abs())
        .fold(0, gcd);
    (pot, period, comps)
}

fn decomposition_for(g: &MetricGraph, pot: &[i64], n_layers: usize) -> LayerDecomposition {
    let l = n_layers as i64;
    let mut layers = vec![Vec::new(); n_layers];
    for (v, &p) in pot.iter().enumerate() {
        layers[p.rem_euclid(l) as usize].push(v);
    }
    let wraps = g
        .tails()
        .iter()
        .any(|&t| pot[t].rem_euclid(l) == l - 1);
    let mut degrees = Vec::with_capacity(n_layers);
    let mut symmetric = true;
    for layer in &layers {
        let first = layer[0];
        let d = LayerDegrees {
            outgoing: g.out_degree(first),
            incoming: g.in_degree(first),
        };
        if layer
            .iter()
            .any(|&v| g.out_degree(v) != d.outgoing || g.in_degree(v) != d.incoming)
        {
            symmetric = false;
        }
        degrees.push(d);
    }
    LayerDecomposition {
        layers,
        wraps,
        symmetric,
        degrees: symmetric.then_some(degrees),
    }
}

/// Finds a layer decomposition with at least two layers.
///
/// Candidate layer counts come from the cycle structure: the gcd of the
/// cycle imbalances if some cycle is unbalanced, otherwise every count up to
/// the longest acyclic layering. Candidates are tried from finest to coarsest
/// and the first symmetric one is returned; without a symmetric candidate the
/// finest decomposition is returned.
pub fn find_layers(g: &MetricGraph) -> Option<LayerDecomposition> {
    let (pot, period, comps) = layer_potentials(g);
    let candidates: Vec<usize> = if period == 0 {
        let span = comps
            .iter()
            .map(|c| c.iter().map(|&v| pot[v]).max().unwrap_or(0) + 1)
            .max()
            .unwrap_or(1) as usize;
        (2..=span).rev().collect()
    } else {
        (2..=period as usize).rev().filter(|l| (period as usize).is_multiple_of(*l)).collect()
    };
    let mut finest = None;
    for &l in &candidates {
        let dec = decomposition_for(g, &pot, l);
        if dec.layers.iter().any(|layer| layer.is_empty()) {
            continue;
        }
        if dec.symmetric {
            return Some(dec);
        }
        finest.get_or_insert(dec);
    }
    finest
}

/// Edge order in which layers are contiguous, together with the block bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerNumbering {
    /// `permutation[i]` is the original index of the i-th edge in the new order.
    pub permutation: Vec<usize>,
    /// Block `p` holds the new indices `bounds[p]..bounds[p + 1]`.
    pub bounds: Vec<usize>,
    pub wraps: bool,
}

impl LayerNumbering {
    pub fn n_blocks(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Block of every edge, indexed by the original edge index.
    pub fn edge_blocks(&self) -> Vec<usize> {
        let mut out = vec![0; self.permutation.len()];
        for p in 0..self.n_blocks() {
            for &e in &self.permutation[self.bounds[p]..self.bounds[p + 1]] {
                out[e] = p;
            }
        }
        out
    }
}

/// Relabels edges so that the edges of each layer (edges leaving the nodes of
/// that layer) are contiguous. Empty edge layers are dropped.
pub fn canonical_layer_numbering(g: &MetricGraph) -> Result<LayerNumbering> {
    let dec = find_layers(g).ok_or(Error::NotLayerGraph)?;
    Ok(numbering_from(g, &dec))
}

pub fn numbering_from(g: &MetricGraph, dec: &LayerDecomposition) -> LayerNumbering {
    let node_layer = dec.node_layers(g.n_nodes());
    let mut permutation = Vec::with_capacity(g.n_edges());
    let mut bounds = vec![0];
    for p in 0..dec.n_layers() {
        let mut block: Vec<usize> = (0..g.n_edges())
            .filter(|&j| node_layer[g.tails[j]] == p)
            .collect();
        if block.is_empty() {
            continue;
        }
        block.sort_by_key(|&j| (g.tails[j], g.heads[j], j));
        permutation.extend(block);
        bounds.push(permutation.len());
    }
    LayerNumbering {
        permutation,
        bounds,
        wraps: dec.wraps,
    }
}

/// Re-checks the numbering rules on the permuted graph: edges sharing a tail
/// or a head lie in one block, and an edge starting where another ends lies
/// in the next block (or in the first block, for edges closing the cycle).
pub fn validate_layer_numbering(g: &MetricGraph, numbering: &LayerNumbering) -> bool {
    let m = g.n_edges();
    if numbering.bounds.first() != Some(&0) || numbering.bounds.last() != Some(&m) {
        return false;
    }
    let mut sorted = numbering.permutation.clone();
    sorted.sort_unstable();
    if sorted != (0..m).collect::<Vec<_>>() {
        return false;
    }
    let block = numbering.edge_blocks();
    let last = numbering.n_blocks() - 1;
    for i in 0..m {
        for j in 0..m {
            let (ti, hi) = g.edge(i);
            let (tj, hj) = g.edge(j);
            if (ti == tj || hi == hj) && block[i] != block[j] {
                return false;
            }
            if ti == hj {
                let next = block[i] == block[j] + 1;
                let closing = numbering.wraps && block[j] == last && block[i] == 0;
                if !next && !closing {
                    return false;
                }
            }
        }
    }
    true
}

/// Every connected graph on `min_nodes..=max_nodes` labelled nodes whose
/// underlying undirected graph is simple with at most `max_edges` edges, in
/// every orientation.
pub fn enumerate_oriented(min_nodes: usize, max_nodes: usize, max_edges: usize) -> Vec<MetricGraph> {
    let mut out = Vec::new();
    for n in min_nodes.max(2)..=max_nodes {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        for mask in 1u64..(1u64 << pairs.len()) {
            let m = mask.count_ones() as usize;
            if m > max_edges || m + 1 < n {
                continue;
            }
            let chosen: Vec<(usize, usize)> = (0..pairs.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            let Ok(base) = MetricGraph::new(n, &chosen) else {
                continue;
            };
            if !base.is_connected() {
                continue;
            }
            for orient in 0u64..(1u64 << m) {
                let edges: Vec<(usize, usize)> = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| if orient >> i & 1 == 1 { (b, a) } else { (a, b) })
                    .collect();
                out.push(MetricGraph::new(n, &edges).expect("valid by construction"));
            }
        }
    }
    out
}
