//! Backtracking graph isomorphism with degree pruning (VF2-style state:
//! a partial injective map grown along a BFS order of the pattern).

use std::collections::BTreeSet;

/// Undirected simple graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u != v {
                adj[u].insert(v);
                adj[v].insert(u);
            }
        }
        Self { adj }
    }

    pub fn from_adjacency(adj: Vec<BTreeSet<usize>>) -> Self {
        Self { adj }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        bfs_order(self).len() == self.n()
    }

    fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<_> = (0..self.n()).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }
}

/// Vertices reachable from 0, in BFS order.
fn bfs_order(g: &SimpleGraph) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    let mut order = Vec::with_capacity(g.n());
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order
}

/// BFS order covering every component.
fn full_order(g: &SimpleGraph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.n());
    let mut seen = vec![false; g.n()];
    for start in 0..g.n() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Returns an isomorphism `pattern -> host` if one exists. When both label
/// slices are given, vertex `v` may only map to a host vertex with the same
/// label.
pub fn find_isomorphism(
    pattern: &SimpleGraph,
    host: &SimpleGraph,
    labels: Option<(&[u32], &[u32])>,
) -> Option<Vec<usize>> {
    if pattern.n() != host.n() || pattern.edge_count() != host.edge_count() {
        return None;
    }
    if pattern.degree_sequence() != host.degree_sequence() {
        return None;
    }
    if let Some((pl, hl)) = labels {
        let mut a = pl.to_vec();
        let mut b = hl.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return None;
        }
    }
    let order = full_order(pattern);
    let mut map = vec![usize::MAX; pattern.n()];
    let mut used = vec![false; host.n()];
    if extend(pattern, host, labels, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

pub fn is_isomorphic(
    pattern: &SimpleGraph,
    host: &SimpleGraph,
    labels: Option<(&[u32], &[u32])>,
) -> bool {
    find_isomorphism(pattern, host, labels).is_some()
}

fn extend(
    pattern: &SimpleGraph,
    host: &SimpleGraph,
    labels: Option<(&[u32], &[u32])>,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    // Candidates: neighbours of an already-mapped pattern neighbour's image,
    // or every host vertex when v starts a new component.
    let anchor = pattern
        .neighbors(v)
        .iter()
        .find(|&&u| map[u] != usize::MAX)
        .map(|&u| map[u]);
    let candidates: Vec<usize> = match anchor {
        Some(h) => host.neighbors(h).iter().copied().collect(),
        None => (0..host.n()).collect(),
    };
    for h in candidates {
        if used[h] || host.degree(h) != pattern.degree(v) {
            continue;
        }
        if let Some((pl, hl)) = labels {
            if pl[v] != hl[h] {
                continue;
            }
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| pattern.has_edge(u, v) == host.has_edge(map[u], h));
        if !consistent {
            continue;
        }
        map[v] = h;
        used[h] = true;
        if extend(pattern, host, labels, order, depth + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[h] = false;
    }
    false
}
