//! Max-flow / min-cut with Dinic's algorithm.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    residual: f64,
}

/// A flow network over `n` inner nodes plus a source and a sink. Arcs are
/// stored in pairs: arc `e` and its reverse `e ^ 1`.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    n: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    max_capacity: f64,
}

/// Outcome of [`max_flow`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaxFlow {
    pub flow: f64,
    /// `true` for inner nodes on the source side of the minimum cut.
    pub source_side: Vec<bool>,
}

impl FlowNetwork {
    pub fn new(inner_nodes: usize) -> Self {
        Self {
            n: inner_nodes,
            arcs: Vec::new(),
            adj: vec![Vec::new(); inner_nodes + 2],
            max_capacity: 0.0,
        }
    }

    pub fn inner_nodes(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> usize {
        self.n
    }

    pub fn sink(&self) -> usize {
        self.n + 1
    }

    /// Adds `u -> v` with capacity `cap` and `v -> u` with `rev_cap`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64, rev_cap: f64) {
        assert!(cap >= 0.0 && rev_cap >= 0.0, "negative capacity");
        assert!(cap.is_finite() && rev_cap.is_finite(), "non-finite capacity");
        let e = self.arcs.len();
        self.arcs.push(Arc { to: v, residual: cap });
        self.arcs.push(Arc {
            to: u,
            residual: rev_cap,
        });
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
        self.max_capacity = self.max_capacity.max(cap).max(rev_cap);
    }

    /// Terminal links of an inner node: `source -> node` and `node -> sink`.
    pub fn add_tlinks(&mut self, node: usize, from_source: f64, to_sink: f64) {
        let (s, t) = (self.source(), self.sink());
        if from_source > 0.0 {
            self.add_edge(s, node, from_source, 0.0);
        }
        if to_sink > 0.0 {
            self.add_edge(node, t, to_sink, 0.0);
        }
    }

    fn levels(&self, eps: f64) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.adj.len()];
        let s = self.source();
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let arc = &self.arcs[e];
                if arc.residual > eps && level[arc.to] == usize::MAX {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    /// Pushes a blocking flow through the level graph; returns the amount.
    fn blocking_flow(&mut self, level: &mut [usize], eps: f64) -> f64 {
        let (s, t) = (self.source(), self.sink());
        let mut next = vec![0usize; self.adj.len()];
        let mut path: Vec<usize> = Vec::new();
        let mut total = 0.0;
        let mut u = s;
        loop {
            if u == t {
                let push = path
                    .iter()
                    .map(|&e| self.arcs[e].residual)
                    .fold(f64::INFINITY, f64::min);
                for &e in &path {
                    self.arcs[e].residual -= push;
                    self.arcs[e ^ 1].residual += push;
                }
                total += push;
                path.clear();
                u = s;
                continue;
            }
            let mut advanced = false;
            while next[u] < self.adj[u].len() {
                let e = self.adj[u][next[u]];
                let arc = &self.arcs[e];
                if arc.residual > eps && level[arc.to] != usize::MAX && level[arc.to] == level[u] + 1 {
                    path.push(e);
                    u = arc.to;
                    advanced = true;
                    break;
                }
                next[u] += 1;
            }
            if advanced {
                continue;
            }
            if u == s {
                return total;
            }
            // dead end: drop u from the level graph and retreat
            level[u] = usize::MAX;
            let e = path.pop().expect("non-source node has an entry arc");
            u = self.arcs[e ^ 1].to;
            next[u] += 1;
        }
    }
}

/// Computes the maximum flow and the minimum cut; nodes reachable from the
/// source in the final residual graph form the source side.
pub fn max_flow(mut net: FlowNetwork) -> MaxFlow {
    let eps = net.max_capacity * 1e-13;
    let mut flow = 0.0;
    loop {
        let mut level = net.levels(eps);
        if level[net.sink()] == usize::MAX {
            break;
        }
        flow += net.blocking_flow(&mut level, eps);
    }
    let level = net.levels(eps);
    let source_side = (0..net.n).map(|v| level[v] != usize::MAX).collect();
    MaxFlow { flow, source_side }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel() {
        let mut net = FlowNetwork::new(1);
        net.add_tlinks(0, 5.0, 3.0);
        let r = max_flow(net);
        assert_eq!(r.flow, 3.0);
        assert_eq!(r.source_side, vec![true]);
    }

    #[test]
    fn two_pixels() {
        let mut net = FlowNetwork::new(2);
        net.add_tlinks(0, 4.0, 0.0);
        net.add_tlinks(1, 0.0, 4.0);
        net.add_edge(0, 1, 1.0, 1.0);
        let r = max_flow(net);
        assert_eq!(r.flow, 1.0);
        assert_eq!(r.source_side, vec![true, false]);
    }

    #[test]
    fn empty_network() {
        let r = max_flow(FlowNetwork::new(0));
        assert_eq!(r.flow, 0.0);
        assert!(r.source_side.is_empty());
    }

    #[test]
    fn long_chain_does_not_recurse() {
        let n = 100_000;
        let mut net = FlowNetwork::new(n);
        net.add_tlinks(0, 7.0, 0.0);
        for i in 0..n - 1 {
            net.add_edge(i, i + 1, 9.0, 0.0);
        }
        net.add_tlinks(n - 1, 0.0, 8.0);
        assert_eq!(max_flow(net).flow, 7.0);
    }
}
