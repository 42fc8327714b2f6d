//! Directed-triangle characterisation of vanishing orderings.
//!
//! A 3-graph is vanishing iff there is a simple digraph on its vertices in
//! which every edge is a cyclically directed triangle coloured 1, 2, 3 in
//! cyclic order, and some two colours span an acyclic subgraph. Fixing the
//! orientation and colouring of one edge forces every edge reachable through
//! shared pairs, so each pair-connected component has either no consistent
//! colouring or exactly six (three colour rotations times two orientations).
//! The search fixes the first component and branches over the six choices of
//! every other one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_bound, Result};
use crate::hypergraph::{Edge, Hypergraph3};

/// Default vertex bound for [`digraph_vanishing_oracle`].
pub const DEFAULT_DIGRAPH_BOUND: usize = 12;

/// The three two-colour subgraphs, in this order.
pub const COLOR_PAIRS: [(u8, u8); 3] = [(1, 2), (1, 3), (2, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub color: u8,
}

/// A simple coloured digraph together with the acyclicity of its three
/// two-colour subgraphs (indexed like [`COLOR_PAIRS`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphColoring {
    pub n: usize,
    pub arcs: Vec<Arc>,
    pub acyclic: [bool; 3],
}

impl DigraphColoring {
    fn from_arcs(n: usize, mut arcs: Vec<Arc>) -> Self {
        arcs.sort_by_key(|a| (a.from.min(a.to), a.from.max(a.to)));
        let acyclic = COLOR_PAIRS.map(|cp| find_cycle(n, &arcs, cp).is_none());
        Self { n, arcs, acyclic }
    }

    fn arc_map(&self) -> Option<BTreeMap<(usize, usize), Arc>> {
        let mut m = BTreeMap::new();
        for a in &self.arcs {
            if a.from == a.to || a.from >= self.n || a.to >= self.n || !(1..=3).contains(&a.color)
            {
                return None;
            }
            if m.insert((a.from.min(a.to), a.from.max(a.to)), *a).is_some() {
                return None;
            }
        }
        Some(m)
    }

    /// Simple, arcs exactly on the pairs covered by `h`, and every edge of `h`
    /// is a cyclic triangle coloured 1, 2, 3 along its direction.
    pub fn is_consistent_with(&self, h: &Hypergraph3) -> bool {
        if self.n != h.n() {
            return false;
        }
        let Some(m) = self.arc_map() else {
            return false;
        };
        if !m.keys().copied().eq(h.covered_pairs()) {
            return false;
        }
        h.edges().iter().all(|e| {
            let arcs: Option<Vec<Arc>> = [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])]
                .iter()
                .map(|p| m.get(p).copied())
                .collect();
            match arcs {
                Some(a) => is_colored_triangle(&a),
                None => false,
            }
        })
    }

    /// A directed cycle using only the two given colours, if any.
    pub fn cycle(&self, colors: (u8, u8)) -> Option<Vec<usize>> {
        find_cycle(self.n, &self.arcs, colors)
    }

    /// Whether `cycle` is a directed cycle of the `colors` subgraph.
    pub fn has_cycle(&self, colors: (u8, u8), cycle: &[usize]) -> bool {
        if cycle.len() < 2 {
            return false;
        }
        let Some(m) = self.arc_map() else {
            return false;
        };
        let mut seen = vec![false; self.n];
        for (i, &u) in cycle.iter().enumerate() {
            if u >= self.n || seen[u] {
                return false;
            }
            seen[u] = true;
            let v = cycle[(i + 1) % cycle.len()];
            match m.get(&(u.min(v), u.max(v))) {
                Some(a) if a.from == u && a.to == v && (a.color == colors.0 || a.color == colors.1) => {}
                _ => return false,
            }
        }
        true
    }
}

fn is_colored_triangle(arcs: &[Arc]) -> bool {
    // Cyclic orientation: every vertex is the tail of exactly one arc.
    for a in arcs {
        if arcs.iter().filter(|b| b.from == a.from).count() != 1 {
            return false;
        }
    }
    // Colours increase by one (mod 3) along the direction.
    arcs.iter().all(|a| {
        let next = arcs.iter().find(|b| b.from == a.to).unwrap();
        next.color == a.color % 3 + 1
    })
}

/// Finds a directed cycle among arcs whose colour is in `colors`.
fn find_cycle(n: usize, arcs: &[Arc], colors: (u8, u8)) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for a in arcs {
        if a.color == colors.0 || a.color == colors.1 {
            adj[a.from].push(a.to);
        }
    }
    for v in adj.iter_mut() {
        v.sort_unstable();
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        state[s] = 1;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < adj[u].len() {
                let w = adj[u][*i];
                *i += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        parent[w] = u;
                        stack.push((w, 0));
                    }
                    1 => {
                        let mut cyc = vec![u];
                        let mut x = u;
                        while x != w {
                            x = parent[x];
                            cyc.push(x);
                        }
                        cyc.reverse();
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                state[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Why no admissible digraph exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DigraphRefutation {
    /// Forcing from `seed` reaches a pair that must carry two different arcs.
    Inconsistent { seed: Edge, pair: (usize, usize) },
    /// A consistent colouring in which all three two-colour subgraphs contain
    /// the listed cycles. When `components == 1` this colouring is unique up
    /// to symmetries that preserve the property, so it refutes on its own.
    Cyclic {
        components: usize,
        coloring: DigraphColoring,
        cycles: [Vec<usize>; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphVerdict {
    pub vanishing: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<DigraphColoring>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub refutation: Option<DigraphRefutation>,
}

/// The six ways to orient and colour the triangle on `e`.
fn option_arcs(e: &Edge, opt: u8) -> [Arc; 3] {
    let [a, b, c] = *e;
    let cyc = if opt / 3 == 0 { [a, b, c] } else { [a, c, b] };
    let rot = opt % 3;
    std::array::from_fn(|i| Arc {
        from: cyc[i],
        to: cyc[(i + 1) % 3],
        color: (i as u8 + rot) % 3 + 1,
    })
}

/// The option of `e` whose arc on the pair of `arc` equals `arc`.
fn option_matching(e: &Edge, arc: &Arc) -> u8 {
    (0..6)
        .find(|&o| option_arcs(e, o).contains(arc))
        .expect("some option matches any arc on a pair of the edge")
}

/// Pair-connected components of the edge set, each listed from its smallest edge.
pub fn pair_components(h: &Hypergraph3) -> Vec<Vec<usize>> {
    let edges = h.edges();
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        for p in [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])] {
            by_pair.entry(p).or_default().push(i);
        }
    }
    let mut comp = vec![usize::MAX; edges.len()];
    let mut out = Vec::new();
    for s in 0..edges.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![s];
        let mut k = 0;
        while k < members.len() {
            let e = edges[members[k]];
            k += 1;
            for p in [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])] {
                for &j in &by_pair[&p] {
                    if comp[j] == usize::MAX {
                        comp[j] = id;
                        members.push(j);
                    }
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Propagates the choice `opt` for the first edge of `component`; returns the
/// forced arcs or the pair where forcing clashes.
fn propagate(
    edges: &[Edge],
    component: &[usize],
    opt: u8,
) -> std::result::Result<Vec<Arc>, (usize, usize)> {
    let mut arc_of: BTreeMap<(usize, usize), Arc> = BTreeMap::new();
    let mut choice: BTreeMap<usize, u8> = BTreeMap::new();
    let mut pair_edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &i in component {
        let e = edges[i];
        for p in [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])] {
            pair_edges.entry(p).or_default().push(i);
        }
    }
    let seed = component[0];
    choice.insert(seed, opt);
    let mut queue = vec![seed];
    while let Some(i) = queue.pop() {
        for arc in option_arcs(&edges[i], choice[&i]) {
            let key = (arc.from.min(arc.to), arc.from.max(arc.to));
            match arc_of.get(&key) {
                Some(prev) if *prev != arc => return Err(key),
                Some(_) => continue,
                None => {
                    arc_of.insert(key, arc);
                }
            }
            for &j in &pair_edges[&key] {
                let o = option_matching(&edges[j], &arc);
                match choice.get(&j) {
                    Some(&c) if c != o => return Err(key),
                    Some(_) => {}
                    None => {
                        choice.insert(j, o);
                        queue.push(j);
                    }
                }
            }
        }
    }
    Ok(arc_of.into_values().collect())
}

/// Applies a global symmetry (colour rotation `opt % 3`, reversal when
/// `opt >= 3`) to a component colouring computed with option 0.
fn transform(arcs: &[Arc], opt: u8) -> Vec<Arc> {
    arcs.iter()
        .map(|a| {
            let (from, to, color) = if opt >= 3 {
                // Reversing every arc and swapping colours 1 and 3 keeps each
                // triangle coloured 1, 2, 3 along its direction.
                (a.to, a.from, 4 - a.color)
            } else {
                (a.from, a.to, a.color)
            };
            Arc {
                from,
                to,
                color: (color - 1 + opt % 3) % 3 + 1,
            }
        })
        .collect()
}

struct ComboSearch<'a> {
    n: usize,
    comps: &'a [Vec<Arc>],
    colors: (u8, u8),
    chosen: Vec<u8>,
    /// Arcs of the target colours chosen so far.
    arcs: Vec<Arc>,
}

impl ComboSearch<'_> {
    fn run(&mut self, k: usize) -> bool {
        if k == self.comps.len() {
            return true;
        }
        let opts: &[u8] = if k == 0 { &[0] } else { &[0, 1, 2, 3, 4, 5] };
        for &o in opts {
            let mark = self.arcs.len();
            self.arcs.extend(
                transform(&self.comps[k], o)
                    .into_iter()
                    .filter(|a| a.color == self.colors.0 || a.color == self.colors.1),
            );
            if find_cycle(self.n, &self.arcs, self.colors).is_none() {
                self.chosen.push(o);
                if self.run(k + 1) {
                    return true;
                }
                self.chosen.pop();
            }
            self.arcs.truncate(mark);
        }
        false
    }
}

/// Decides vanishing through the coloured-digraph criterion; independent of
/// the ordering search.
pub fn digraph_vanishing_oracle(h: &Hypergraph3) -> Result<DigraphVerdict> {
    digraph_vanishing_oracle_with_bound(h, DEFAULT_DIGRAPH_BOUND)
}

pub fn digraph_vanishing_oracle_with_bound(h: &Hypergraph3, bound: usize) -> Result<DigraphVerdict> {
    check_bound("digraph oracle vertex count", h.n(), bound)?;
    let edges = h.edges();
    let comps = pair_components(h);
    let mut base = Vec::with_capacity(comps.len());
    for c in &comps {
        match propagate(edges, c, 0) {
            Ok(arcs) => base.push(arcs),
            Err(pair) => {
                return Ok(DigraphVerdict {
                    vanishing: false,
                    witness: None,
                    refutation: Some(DigraphRefutation::Inconsistent {
                        seed: edges[c[0]],
                        pair,
                    }),
                })
            }
        }
    }
    for colors in COLOR_PAIRS {
        let mut s = ComboSearch {
            n: h.n(),
            comps: &base,
            colors,
            chosen: Vec::new(),
            arcs: Vec::new(),
        };
        if s.run(0) {
            let arcs = base
                .iter()
                .zip(&s.chosen)
                .flat_map(|(c, &o)| transform(c, o))
                .collect();
            return Ok(DigraphVerdict {
                vanishing: true,
                witness: Some(DigraphColoring::from_arcs(h.n(), arcs)),
                refutation: None,
            });
        }
    }
    let coloring = DigraphColoring::from_arcs(h.n(), base.concat());
    let cycles = COLOR_PAIRS.map(|cp| coloring.cycle(cp).expect("every pair is cyclic"));
    Ok(DigraphVerdict {
        vanishing: false,
        witness: None,
        refutation: Some(DigraphRefutation::Cyclic {
            components: comps.len(),
            coloring,
            cycles,
        }),
    })
}

/// Polynomial check that a refutation proves `h` has no vanishing ordering.
///
/// `Inconsistent` is re-derived by forcing from the stated seed. `Cyclic` is
/// accepted only for pair-connected `h`, where the colouring is forced up to
/// symmetry.
pub fn verify_refutation(h: &Hypergraph3, refutation: &DigraphRefutation) -> bool {
    match refutation {
        DigraphRefutation::Inconsistent { seed, .. } => {
            let comps = pair_components(h);
            let edges = h.edges();
            let Some(comp) = comps.iter().find(|c| edges[c[0]] == *seed) else {
                return false;
            };
            propagate(edges, comp, 0).is_err()
        }
        DigraphRefutation::Cyclic {
            coloring, cycles, ..
        } => {
            if h.is_empty() || pair_components(h).len() != 1 {
                return false;
            }
            coloring.is_consistent_with(h)
                && COLOR_PAIRS
                    .iter()
                    .zip(cycles)
                    .all(|(&cp, cyc)| coloring.has_cycle(cp, cyc))
        }
    }
}

/// Topological order of an acyclic two-colour subgraph of a witness; with the
/// colours rotated so that this pair is {1, 2} it is a vanishing ordering.
pub fn witness_ordering(w: &DigraphColoring) -> Option<Vec<usize>> {
    let k = w.acyclic.iter().position(|&a| a)?;
    let colors = COLOR_PAIRS[k];
    let mut indeg = vec![0usize; w.n];
    let mut adj = vec![Vec::new(); w.n];
    for a in &w.arcs {
        if a.color == colors.0 || a.color == colors.1 {
            adj[a.from].push(a.to);
            indeg[a.to] += 1;
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..w.n).filter(|&v| indeg[v] == 0).collect();
    let mut out = Vec::with_capacity(w.n);
    while let Some(v) = ready.pop_first() {
        out.push(v);
        for &u in &adj[v] {
            indeg[u] -= 1;
            if indeg[u] == 0 {
                ready.insert(u);
            }
        }
    }
    (out.len() == w.n).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{complete, tight_cycle};
    use crate::orderings::{roles_under_ordering, VertexOrder};

    fn example9() -> Hypergraph3 {
        Hypergraph3::from_letters(7, "abc,ade,bcd,bcf,cde,def,abg,cdg,efg").unwrap()
    }

    #[test]
    fn options_are_colored_triangles() {
        let e = [0, 1, 2];
        for o in 0..6 {
            assert!(is_colored_triangle(&option_arcs(&e, o)));
            for t in 0..6 {
                assert!(is_colored_triangle(&transform(&option_arcs(&e, o), t)));
            }
        }
    }

    #[test]
    fn single_edge_is_vanishing() {
        let h = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        let v = digraph_vanishing_oracle(&h).unwrap();
        assert!(v.vanishing);
        let w = v.witness.unwrap();
        assert!(w.is_consistent_with(&h));
        assert_eq!(w.acyclic, [true, true, true]);
    }

    #[test]
    fn example9_is_cyclic_in_all_three_subgraphs() {
        let h = example9();
        let v = digraph_vanishing_oracle(&h).unwrap();
        assert!(!v.vanishing);
        match v.refutation.as_ref().unwrap() {
            DigraphRefutation::Cyclic {
                components,
                coloring,
                ..
            } => {
                assert_eq!(*components, 1);
                assert_eq!(coloring.acyclic, [false, false, false]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(verify_refutation(&h, v.refutation.as_ref().unwrap()));
        // The same evidence does not refute the vanishing graph without abg.
        let h2 = h.delete_edge([0, 1, 6]).unwrap();
        assert!(!verify_refutation(&h2, v.refutation.as_ref().unwrap()));
    }

    #[test]
    fn k4_and_tight_cycle() {
        assert!(!digraph_vanishing_oracle(&complete(4)).unwrap().vanishing);
        let c6 = tight_cycle(6);
        let v = digraph_vanishing_oracle(&c6).unwrap();
        assert!(v.vanishing);
        let w = v.witness.unwrap();
        assert!(w.is_consistent_with(&c6));
        let ord = VertexOrder::new(witness_ordering(&w).unwrap()).unwrap();
        assert!(roles_under_ordering(&c6, &ord).is_ok());
    }

    #[test]
    fn witness_topological_order_is_vanishing() {
        // Two triangles sharing only a vertex: two components.
        let h = Hypergraph3::from_edges(5, [[0, 1, 2], [2, 3, 4]]).unwrap();
        let v = digraph_vanishing_oracle(&h).unwrap();
        let ord = VertexOrder::new(witness_ordering(v.witness.as_ref().unwrap()).unwrap()).unwrap();
        assert!(roles_under_ordering(&h, &ord).is_ok());
        assert_eq!(pair_components(&h).len(), 2);
    }

    #[test]
    fn bound_is_enforced() {
        assert!(digraph_vanishing_oracle(&Hypergraph3::empty(13)).is_err());
    }
}
