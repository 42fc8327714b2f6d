//! Vanishing orderings: role forcing, exhaustive search and certificate checks.
//!
//! Under a fixed ordering every edge `v_i < v_j < v_k` forces its pairs to be
//! left `(v_i, v_j)`, top `(v_i, v_k)` and right `(v_j, v_k)`. An ordering is
//! vanishing when no pair receives two different roles.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_bound, Result};
use crate::hypergraph::{choose2, pair_index, Edge, Hypergraph3};

/// Default vertex bound for exhaustive ordering searches.
pub const DEFAULT_ORDER_BOUND: usize = 12;

/// Role of a pair inside an edge under a fixed ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "T")]
    Top,
    #[serde(rename = "R")]
    Right,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Left, Role::Top, Role::Right];

    pub(crate) fn code(self) -> u8 {
        match self {
            Role::Left => 1,
            Role::Top => 2,
            Role::Right => 3,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Role> {
        match c {
            1 => Some(Role::Left),
            2 => Some(Role::Top),
            3 => Some(Role::Right),
            _ => None,
        }
    }

    /// Mirror image under reversal of the ordering.
    pub fn reversed(self) -> Role {
        match self {
            Role::Left => Role::Right,
            Role::Top => Role::Top,
            Role::Right => Role::Left,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Role::Left => 'L',
            Role::Top => 'T',
            Role::Right => 'R',
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A linear order of the vertices: `sequence[i]` is the vertex at position `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexOrder(Vec<usize>);

impl VertexOrder {
    /// Fails unless `sequence` is a permutation of `0..len`.
    pub fn new(sequence: Vec<usize>) -> Result<Self> {
        let o = VertexOrder(sequence);
        if o.is_permutation_of(o.0.len()) {
            Ok(o)
        } else {
            Err(crate::TuranError::Invalid(format!(
                "{:?} is not a permutation",
                o.0
            )))
        }
    }

    /// Wraps a sequence without checking it; verifiers re-check.
    pub fn from_unchecked(sequence: Vec<usize>) -> Self {
        VertexOrder(sequence)
    }

    pub fn identity(n: usize) -> Self {
        VertexOrder((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_permutation_of(&self, n: usize) -> bool {
        if self.0.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in &self.0 {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    /// `positions()[v]` is the position of vertex `v`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        VertexOrder(self.0.iter().rev().copied().collect())
    }

    /// Builds an order from letters, e.g. `"egbdfac"`.
    pub fn from_letters(word: &str) -> Result<Self> {
        Self::new(word.bytes().map(|b| (b - b'a') as usize).collect())
    }
}

/// Roles of vertex pairs, keyed by `(a, b)` with `a < b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoleAssignment(BTreeMap<(usize, usize), Role>);

impl RoleAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, a: usize, b: usize) -> Option<Role> {
        self.0.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn set(&mut self, a: usize, b: usize, role: Role) {
        self.0.insert((a.min(b), a.max(b)), role);
    }

    pub fn remove(&mut self, a: usize, b: usize) -> Option<Role> {
        self.0.remove(&(a.min(b), a.max(b)))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), Role)> + '_ {
        self.0.iter().map(|(&k, &r)| (k, r))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Swaps left and right, as under reversal of the ordering.
    pub fn reversed(&self) -> Self {
        RoleAssignment(self.0.iter().map(|(&k, &r)| (k, r.reversed())).collect())
    }
}

impl Serialize for RoleAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, Role> = self
            .0
            .iter()
            .map(|(&(a, b), &r)| (format!("{a},{b}"), r))
            .collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RoleAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m: BTreeMap<String, Role> = BTreeMap::deserialize(d)?;
        let mut out = RoleAssignment::new();
        for (k, r) in m {
            let (a, b) = parse_pair_key(&k).map_err(D::Error::custom)?;
            out.set(a, b, r);
        }
        Ok(out)
    }
}

/// Parses a pair key of the form `"i,j"` with `i != j`.
pub(crate) fn parse_pair_key(k: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = k
        .split_once(',')
        .ok_or_else(|| format!("bad pair key {k:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad pair key {k:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad pair key {k:?}"))?;
    if a == b {
        return Err(format!("degenerate pair key {k:?}"));
    }
    Ok((a.min(b), a.max(b)))
}

/// An ordering together with the pair roles it induces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingCertificate {
    pub ordering: VertexOrder,
    pub roles: RoleAssignment,
}

/// A pair forced into two different roles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub pair: (usize, usize),
    pub roles: (Role, Role),
}

/// The roles `(left, top, right)` of an edge under the given positions.
pub fn edge_roles(e: &Edge, pos: &[usize]) -> [((usize, usize), Role); 3] {
    let mut t = *e;
    t.sort_by_key(|&v| pos[v]);
    let [x, y, z] = t;
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    [
        (key(x, y), Role::Left),
        (key(x, z), Role::Top),
        (key(y, z), Role::Right),
    ]
}

/// Every pair forced into more than one role, in lexicographic pair order.
pub fn role_conflicts(h: &Hypergraph3, ord: &VertexOrder) -> Vec<Conflict> {
    assert!(ord.is_permutation_of(h.n()), "ordering must be a permutation");
    let pos = ord.positions();
    let mut forced: BTreeMap<(usize, usize), [bool; 3]> = BTreeMap::new();
    for e in h.edges() {
        for (p, r) in edge_roles(e, &pos) {
            forced.entry(p).or_default()[r.code() as usize - 1] = true;
        }
    }
    forced
        .into_iter()
        .filter_map(|(pair, f)| {
            let rs: Vec<Role> = Role::ALL
                .iter()
                .zip(f)
                .filter(|(_, on)| *on)
                .map(|(r, _)| *r)
                .collect();
            (rs.len() > 1).then(|| Conflict {
                pair,
                roles: (rs[0], rs[1]),
            })
        })
        .collect()
}

/// Roles forced by `ord` on every covered pair, or the lexicographically
/// first pair that receives two roles.
pub fn roles_under_ordering(
    h: &Hypergraph3,
    ord: &VertexOrder,
) -> std::result::Result<RoleAssignment, Conflict> {
    if let Some(c) = role_conflicts(h, ord).into_iter().next() {
        return Err(c);
    }
    let pos = ord.positions();
    let mut roles = RoleAssignment::new();
    for e in h.edges() {
        for ((a, b), r) in edge_roles(e, &pos) {
            roles.set(a, b, r);
        }
    }
    Ok(roles)
}

// ---------------------------------------------------------------------------
// Search engine
// ---------------------------------------------------------------------------

const NONE: usize = usize::MAX;

/// Left-to-right ordering search over one or more edge layers, each layer
/// with its own role table. Roles of an edge are fixed as soon as two of its
/// vertices are placed, because the third must come later.
pub(crate) struct OrderSearch {
    n: usize,
    npairs: usize,
    /// `incident[v]` lists `(x, y, layer)` for every edge `{v, x, y}`.
    incident: Vec<Vec<(usize, usize, usize)>>,
    roles: Vec<u8>,
    trail: Vec<usize>,
    pos: Vec<usize>,
    order: Vec<usize>,
    free: Vec<bool>,
    pub(crate) nodes: u64,
}

impl OrderSearch {
    pub(crate) fn new(n: usize, layers: &[&[Edge]]) -> Self {
        let npairs = choose2(n);
        let mut incident = vec![Vec::new(); n];
        for (l, edges) in layers.iter().enumerate() {
            for &[a, b, c] in edges.iter() {
                incident[a].push((b, c, l));
                incident[b].push((a, c, l));
                incident[c].push((a, b, l));
            }
        }
        let free = incident.iter().map(|i| i.is_empty()).collect();
        Self {
            n,
            npairs,
            incident,
            roles: vec![0; npairs * layers.len().max(1)],
            trail: Vec::new(),
            pos: vec![NONE; n],
            order: Vec::with_capacity(n),
            free,
            nodes: 0,
        }
    }

    /// Fixes a role before the search starts.
    pub(crate) fn preset(&mut self, layer: usize, a: usize, b: usize, role: Role) -> bool {
        let i = layer * self.npairs + pair_index(a, b);
        match self.roles[i] {
            0 => {
                self.roles[i] = role.code();
                true
            }
            c => c == role.code(),
        }
    }

    #[inline]
    fn assign(&mut self, layer: usize, a: usize, b: usize, role: u8) -> bool {
        let i = layer * self.npairs + pair_index(a, b);
        match self.roles[i] {
            0 => {
                self.roles[i] = role;
                self.trail.push(i);
                true
            }
            c => c == role,
        }
    }

    fn place(&mut self, v: usize) -> bool {
        self.pos[v] = self.order.len();
        self.order.push(v);
        for k in 0..self.incident[v].len() {
            let (x, y, l) = self.incident[v][k];
            let (px, py) = (self.pos[x], self.pos[y]);
            // Exactly one partner placed: that partner, then v, then the other.
            let (first, last) = match (px != NONE, py != NONE) {
                (true, false) => (x, y),
                (false, true) => (y, x),
                _ => continue,
            };
            if !(self.assign(l, first, v, 1)
                && self.assign(l, first, last, 2)
                && self.assign(l, v, last, 3))
            {
                return false;
            }
        }
        true
    }

    fn unplace(&mut self, v: usize, mark: usize) {
        while self.trail.len() > mark {
            let i = self.trail.pop().unwrap();
            self.roles[i] = 0;
        }
        self.order.pop();
        self.pos[v] = NONE;
    }

    fn dfs(&mut self) -> bool {
        self.nodes += 1;
        if self.order.len() == self.n {
            return true;
        }
        for v in 0..self.n {
            if self.pos[v] != NONE {
                continue;
            }
            let mark = self.trail.len();
            if self.place(v) && self.dfs() {
                return true;
            }
            self.unplace(v, mark);
            if self.free[v] {
                // A vertex in no edge constrains nothing; if the prefix fails
                // with it appended, the prefix fails outright.
                return false;
            }
        }
        false
    }

    /// Runs the search; on success the lexicographically least valid
    /// ordering is left in place.
    pub(crate) fn solve(&mut self) -> bool {
        self.dfs()
    }

    pub(crate) fn ordering(&self) -> VertexOrder {
        VertexOrder(self.order.clone())
    }

    /// Role table of one layer restricted to pairs covered in that layer.
    pub(crate) fn layer_roles(&self, layer: usize, edges: &[Edge]) -> RoleAssignment {
        let mut out = RoleAssignment::new();
        for &[a, b, c] in edges {
            for (x, y) in [(a, b), (a, c), (b, c)] {
                let code = self.roles[layer * self.npairs + pair_index(x, y)];
                out.set(x, y, Role::from_code(code).expect("covered pair has a role"));
            }
        }
        out
    }
}

/// Lexicographically least vanishing ordering with its roles, if any.
pub fn find_vanishing_ordering(h: &Hypergraph3) -> Result<Option<VanishingCertificate>> {
    find_vanishing_ordering_with_bound(h, DEFAULT_ORDER_BOUND)
}

pub fn find_vanishing_ordering_with_bound(
    h: &Hypergraph3,
    bound: usize,
) -> Result<Option<VanishingCertificate>> {
    check_bound("vanishing search vertex count", h.n(), bound)?;
    let mut s = OrderSearch::new(h.n(), &[h.edges()]);
    if !s.solve() {
        return Ok(None);
    }
    Ok(Some(VanishingCertificate {
        ordering: s.ordering(),
        roles: s.layer_roles(0, h.edges()),
    }))
}

/// Existence-only variant used by bulk callers; no bound check.
pub(crate) fn is_vanishing_edges(n: usize, edges: &[Edge]) -> bool {
    OrderSearch::new(n, &[edges]).solve()
}

/// Whether `h` has a vanishing ordering (bounded exhaustive search).
pub fn is_vanishing(h: &Hypergraph3) -> Result<bool> {
    check_bound("vanishing search vertex count", h.n(), DEFAULT_ORDER_BOUND)?;
    Ok(is_vanishing_edges(h.n(), h.edges()))
}

/// Checks that the certificate's ordering forces no conflict and that its
/// roles agree with the forced roles on every covered pair.
pub fn verify_vanishing_certificate(h: &Hypergraph3, cert: &VanishingCertificate) -> bool {
    if !cert.ordering.is_permutation_of(h.n()) {
        return false;
    }
    if cert.roles.iter().any(|((a, b), _)| a >= h.n() || b >= h.n()) {
        return false;
    }
    let pos = cert.ordering.positions();
    h.edges().iter().all(|e| {
        edge_roles(e, &pos)
            .iter()
            .all(|&((a, b), r)| cert.roles.get(a, b) == Some(r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{complete, tight_cycle};

    fn example9() -> Hypergraph3 {
        Hypergraph3::from_letters(7, "abc,ade,bcd,bcf,cde,def,abg,cdg,efg").unwrap()
    }

    #[test]
    fn single_edge_roles() {
        let h = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        let r = roles_under_ordering(&h, &VertexOrder::identity(3)).unwrap();
        assert_eq!(r.get(0, 1), Some(Role::Left));
        assert_eq!(r.get(0, 2), Some(Role::Top));
        assert_eq!(r.get(1, 2), Some(Role::Right));
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn k4_conflicts() {
        let k4 = complete(4);
        let c = roles_under_ordering(&k4, &VertexOrder::identity(4)).unwrap_err();
        assert_eq!(c.pair, (0, 2));
        // The middle pair is forced right by {0,1,2} and left by {1,2,3}.
        let all = role_conflicts(&k4, &VertexOrder::identity(4));
        assert!(all.contains(&Conflict {
            pair: (1, 2),
            roles: (Role::Left, Role::Right)
        }));
    }

    #[test]
    fn h2_ordering_from_proof() {
        let h2 = example9().delete_edge([0, 1, 6]).unwrap();
        let ord = VertexOrder::from_letters("egbdfac").unwrap();
        let roles = roles_under_ordering(&h2, &ord).unwrap();
        assert_eq!(roles.get(0, 1), Some(Role::Left));
        let cert = VanishingCertificate { ordering: ord, roles };
        assert!(verify_vanishing_certificate(&h2, &cert));
    }

    #[test]
    fn search_decisions() {
        let single = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        let c = find_vanishing_ordering(&single).unwrap().unwrap();
        assert_eq!(c.ordering, VertexOrder::identity(3));
        assert!(find_vanishing_ordering(&complete(4)).unwrap().is_none());
        let c6 = find_vanishing_ordering(&tight_cycle(6)).unwrap().unwrap();
        assert!(verify_vanishing_certificate(&tight_cycle(6), &c6));
        assert!(find_vanishing_ordering(&example9()).unwrap().is_none());
        let empty = find_vanishing_ordering(&Hypergraph3::empty(5)).unwrap().unwrap();
        assert_eq!(empty.ordering, VertexOrder::identity(5));
        assert!(empty.roles.is_empty());
        assert!(find_vanishing_ordering(&Hypergraph3::empty(13)).is_err());
    }

    #[test]
    fn flipped_role_is_rejected() {
        let h = tight_cycle(6);
        let mut c = find_vanishing_ordering(&h).unwrap().unwrap();
        let ((a, b), r) = c.roles.iter().next().unwrap();
        c.roles.set(a, b, if r == Role::Left { Role::Top } else { Role::Left });
        assert!(!verify_vanishing_certificate(&h, &c));
    }

    #[test]
    fn isolated_vertices_do_not_change_the_verdict() {
        let k4 = Hypergraph3::from_edges(8, complete(4).edges().to_vec()).unwrap();
        assert!(!is_vanishing(&k4).unwrap());
        let c6 = Hypergraph3::from_edges(9, tight_cycle(6).edges().to_vec()).unwrap();
        let cert = find_vanishing_ordering(&c6).unwrap().unwrap();
        assert!(verify_vanishing_certificate(&c6, &cert));
    }

    #[test]
    fn certificate_json_shape() {
        let h = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        let c = find_vanishing_ordering(&h).unwrap().unwrap();
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(
            j,
            r#"{"ordering":[0,1,2],"roles":{"0,1":"L","0,2":"T","1,2":"R"}}"#
        );
        let back: VanishingCertificate = serde_json::from_str(&j).unwrap();
        assert_eq!(back, c);
    }
}
