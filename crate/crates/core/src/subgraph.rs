//! Subhypergraph containment by exhaustive injective-map search.

use serde::{Deserialize, Serialize};

use crate::error::{check_bound, Result};
use crate::hypergraph::{Edge, Hypergraph3};

pub const DEFAULT_PATTERN_BOUND: usize = 8;
pub const DEFAULT_HOST_BOUND: usize = 16;

/// Injective map from pattern vertices to host vertices: `map[v]` is the
/// image of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexMap {
    pub map: Vec<usize>,
}

impl VertexMap {
    /// Whether the map is injective into `host` and carries every pattern
    /// edge onto a host edge.
    pub fn is_embedding(&self, pattern: &Hypergraph3, host: &Hypergraph3) -> bool {
        if self.map.len() != pattern.n() || self.map.iter().any(|&v| v >= host.n()) {
            return false;
        }
        let mut used = vec![false; host.n()];
        for &v in &self.map {
            if std::mem::replace(&mut used[v], true) {
                return false;
            }
        }
        pattern
            .edges()
            .iter()
            .all(|e| host.has_edge(self.map[e[0]], self.map[e[1]], self.map[e[2]]))
    }
}

struct Search<'a> {
    host: &'a Hypergraph3,
    host_deg: Vec<usize>,
    pat_deg: Vec<usize>,
    order: Vec<usize>,
    /// Pattern edges whose last vertex in `order` is at this position.
    closing: Vec<Vec<Edge>>,
    image: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn dfs(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        let v = self.order[pos];
        for w in 0..self.host.n() {
            if self.used[w] || self.host_deg[w] < self.pat_deg[v] {
                continue;
            }
            self.image[v] = w;
            let fits = self.closing[pos].iter().all(|e| {
                self.host
                    .has_edge(self.image[e[0]], self.image[e[1]], self.image[e[2]])
            });
            if fits {
                self.used[w] = true;
                if self.dfs(pos + 1) {
                    return true;
                }
                self.used[w] = false;
            }
        }
        false
    }
}

/// Greedy order: next is the unplaced vertex sharing most edges with the
/// placed ones, ties broken by degree.
fn placement_order(pattern: &Hypergraph3, deg: &[usize]) -> Vec<usize> {
    let n = pattern.n();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let score = |v: usize| {
            let linked = pattern
                .edges()
                .iter()
                .filter(|e| e.contains(&v) && e.iter().any(|&u| u != v && placed[u]))
                .count();
            (linked, deg[v])
        };
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (score(v), std::cmp::Reverse(v)))
            .expect("unplaced vertex");
        placed[v] = true;
        order.push(v);
    }
    order
}

pub fn contains_subhypergraph(host: &Hypergraph3, pattern: &Hypergraph3) -> Result<Option<VertexMap>> {
    contains_subhypergraph_with_bounds(host, pattern, DEFAULT_HOST_BOUND, DEFAULT_PATTERN_BOUND)
}

pub fn contains_subhypergraph_with_bounds(
    host: &Hypergraph3,
    pattern: &Hypergraph3,
    host_bound: usize,
    pattern_bound: usize,
) -> Result<Option<VertexMap>> {
    check_bound("containment host vertex count", host.n(), host_bound)?;
    check_bound("containment pattern vertex count", pattern.n(), pattern_bound)?;
    if pattern.n() > host.n() || pattern.edge_count() > host.edge_count() {
        return Ok(None);
    }
    let pat_deg = pattern.degrees();
    let order = placement_order(pattern, &pat_deg);
    let mut pos_of = vec![0; pattern.n()];
    for (i, &v) in order.iter().enumerate() {
        pos_of[v] = i;
    }
    let mut closing = vec![Vec::new(); pattern.n()];
    for e in pattern.edges() {
        closing[e.iter().map(|&v| pos_of[v]).max().unwrap()].push(*e);
    }
    let mut s = Search {
        host,
        host_deg: host.degrees(),
        pat_deg,
        order,
        closing,
        image: vec![0; pattern.n()],
        used: vec![false; host.n()],
    };
    Ok(s.dfs(0).then(|| VertexMap { map: s.image }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{complete, tight_cycle};

    #[test]
    fn basic_cases() {
        let single = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        let c6 = tight_cycle(6);
        let m = contains_subhypergraph(&c6, &single).unwrap().unwrap();
        assert!(m.is_embedding(&single, &c6));
        assert!(contains_subhypergraph(&single, &c6).unwrap().is_none());
        let m = contains_subhypergraph(&c6, &c6).unwrap().unwrap();
        assert!(m.is_embedding(&c6, &c6));
        assert!(contains_subhypergraph(&c6, &complete(4)).unwrap().is_none());
        assert!(contains_subhypergraph(&complete(6), &c6).unwrap().is_some());
    }

    #[test]
    fn isolated_pattern_vertices_need_room() {
        let p = Hypergraph3::from_edges(5, [[0, 1, 2]]).unwrap();
        let host = Hypergraph3::from_edges(4, [[0, 1, 2]]).unwrap();
        assert!(contains_subhypergraph(&host, &p).unwrap().is_none());
        let host = Hypergraph3::from_edges(5, [[1, 3, 4]]).unwrap();
        let m = contains_subhypergraph(&host, &p).unwrap().unwrap();
        assert!(m.is_embedding(&p, &host));
    }

    #[test]
    fn bounds() {
        assert!(contains_subhypergraph(&Hypergraph3::empty(17), &Hypergraph3::empty(3)).is_err());
        assert!(contains_subhypergraph(&Hypergraph3::empty(10), &Hypergraph3::empty(9)).is_err());
    }
}
