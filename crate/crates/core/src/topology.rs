//! Network graphs and Metropolis combination weights.
//!
//! Every node counts itself as a neighbor, so `|N_k|` is the degree plus one.
//! The Metropolis self-weight is whatever is left after the off-diagonal
//! weights are assigned, which makes each row of the combination matrix sum
//! to one.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;

use crate::{Error, Result};

/// Undirected connected graph with self-loops on every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n_nodes: usize,
    adjacency: Vec<bool>,
}

impl Topology {
    /// Builds a topology from an explicit edge list, validating symmetry and
    /// connectivity.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidTopology("graph needs at least one node".into()));
        }
        let mut topo = Topology::isolated(n_nodes);
        for &(a, b) in edges {
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::InvalidTopology(format!(
                    "edge ({a}, {b}) references a node outside 0..{n_nodes}"
                )));
            }
            topo.link(a, b);
        }
        if !topo.is_connected() {
            return Err(Error::InvalidTopology("graph is not connected".into()));
        }
        Ok(topo)
    }

    /// Complete graph on `n_nodes` nodes.
    pub fn complete(n_nodes: usize) -> Self {
        assert!(n_nodes >= 1, "graph needs at least one node");
        Topology {
            n_nodes,
            adjacency: vec![true; n_nodes * n_nodes],
        }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn line(n_nodes: usize) -> Self {
        assert!(n_nodes >= 1, "graph needs at least one node");
        let mut topo = Topology::isolated(n_nodes);
        for k in 1..n_nodes {
            topo.link(k - 1, k);
        }
        topo
    }

    /// Star with node 0 at the center.
    pub fn star(n_nodes: usize) -> Self {
        assert!(n_nodes >= 1, "graph needs at least one node");
        let mut topo = Topology::isolated(n_nodes);
        for k in 1..n_nodes {
            topo.link(0, k);
        }
        topo
    }

    fn isolated(n_nodes: usize) -> Self {
        let mut adjacency = vec![false; n_nodes * n_nodes];
        for k in 0..n_nodes {
            adjacency[k * n_nodes + k] = true;
        }
        Topology { n_nodes, adjacency }
    }

    fn link(&mut self, a: usize, b: usize) {
        self.adjacency[a * self.n_nodes + b] = true;
        self.adjacency[b * self.n_nodes + a] = true;
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn is_linked(&self, k: usize, l: usize) -> bool {
        self.adjacency[k * self.n_nodes + l]
    }

    /// Neighborhood of `k`, including `k` itself, in increasing index order.
    pub fn neighbors(&self, k: usize) -> Vec<usize> {
        (0..self.n_nodes).filter(|&l| self.is_linked(k, l)).collect()
    }

    /// `|N_k|`, counting the node itself.
    pub fn neighborhood_size(&self, k: usize) -> usize {
        (0..self.n_nodes).filter(|&l| self.is_linked(k, l)).count()
    }

    /// Connected components, each sorted, ordered by their smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_nodes];
        let mut out = Vec::new();
        for start in 0..self.n_nodes {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(k) = queue.pop_front() {
                comp.push(k);
                for l in self.neighbors(k) {
                    if !seen[l] {
                        seen[l] = true;
                        queue.push_back(l);
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

    /// Renders the graph as one line per node, `k: l1 l2 ...`, listing the
    /// neighbors other than `k` itself.
    pub fn to_adjacency_list(&self) -> String {
        let mut out = String::new();
        for k in 0..self.n_nodes {
            let _ = write!(out, "{k}:");
            for l in self.neighbors(k).into_iter().filter(|&l| l != k) {
                let _ = write!(out, " {l}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format produced by [`Topology::to_adjacency_list`]. Blank
    /// lines and `#` comments are ignored; nodes must appear in order.
    pub fn from_adjacency_list(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, tail) = line.split_once(':').ok_or_else(|| {
                Error::InvalidTopology(format!("line {}: expected `node: neighbors`", lineno + 1))
            })?;
            let node: usize = head.trim().parse().map_err(|_| {
                Error::InvalidTopology(format!("line {}: bad node index {:?}", lineno + 1, head.trim()))
            })?;
            if node != rows.len() {
                return Err(Error::InvalidTopology(format!(
                    "line {}: expected node {}, found {node}",
                    lineno + 1,
                    rows.len()
                )));
            }
            let neighbors = tail
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| {
                        Error::InvalidTopology(format!("line {}: bad neighbor {tok:?}", lineno + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(neighbors);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTopology("adjacency list is empty".into()));
        }
        let mut topo = Topology::isolated(n);
        for (k, nbrs) in rows.iter().enumerate() {
            for &l in nbrs {
                if l >= n {
                    return Err(Error::InvalidTopology(format!("node {k} lists unknown neighbor {l}")));
                }
                if !rows[l].contains(&k) && l != k {
                    return Err(Error::InvalidTopology(format!(
                        "link {k} -> {l} is not listed in both directions"
                    )));
                }
                topo.link(k, l);
            }
        }
        if !topo.is_connected() {
            return Err(Error::InvalidTopology("graph is not connected".into()));
        }
        Ok(topo)
    }
}

/// Random connected graph: every pair is linked independently with
/// `link_probability`, then components are bridged in order of their
/// smallest node, each bridge joining the smallest nodes of two consecutive
/// components.
pub fn generate_topology<R: Rng + ?Sized>(n_nodes: usize, link_probability: f64, rng: &mut R) -> Topology {
    assert!(n_nodes >= 1, "graph needs at least one node");
    assert!(
        link_probability > 0.0 && link_probability <= 1.0,
        "link probability must lie in (0, 1]"
    );
    let mut topo = Topology::isolated(n_nodes);
    for k in 0..n_nodes {
        for l in (k + 1)..n_nodes {
            if rng.random::<f64>() < link_probability {
                topo.link(k, l);
            }
        }
    }
    let comps = topo.components();
    for pair in comps.windows(2) {
        topo.link(pair[0][0], pair[1][0]);
    }
    topo
}

/// Row-stochastic combination weights `c_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    n_nodes: usize,
    weights: Vec<f64>,
}

impl CombinationMatrix {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn weight(&self, k: usize, l: usize) -> f64 {
        self.weights[k * self.n_nodes + l]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.weights[k * self.n_nodes..(k + 1) * self.n_nodes]
    }
}

/// Metropolis rule: `c_kl = 1 / max(|N_k|, |N_l|)` for linked `k != l`,
/// `c_kk = 1 - Σ_{l != k} c_kl`.
pub fn metropolis_weights(topology: &Topology) -> CombinationMatrix {
    let n = topology.n_nodes();
    let sizes: Vec<usize> = (0..n).map(|k| topology.neighborhood_size(k)).collect();
    let mut weights = vec![0.0; n * n];
    for k in 0..n {
        let mut off = 0.0;
        for l in 0..n {
            if l != k && topology.is_linked(k, l) {
                let w = 1.0 / sizes[k].max(sizes[l]) as f64;
                weights[k * n + l] = w;
                off += w;
            }
        }
        weights[k * n + k] = 1.0 - off;
    }
    CombinationMatrix { n_nodes: n, weights }
}
