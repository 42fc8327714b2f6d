//! 3-uniform hypergraphs on labeled vertices `0..n`, and their text format.
//!
//! Edges are kept twice: as a sorted list of triples (for iteration and
//! output) and as a bit set indexed by the colex rank of the triple, which
//! gives constant-time membership tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, Result, TuranError};

/// A 3-element edge with its members in increasing order.
pub type Edge = [usize; 3];

#[inline]
pub const fn choose2(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

#[inline]
pub const fn choose3(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Colex rank of the pair `a < b`.
#[inline]
pub const fn pair_rank(a: usize, b: usize) -> usize {
    choose2(b) + a
}

/// Colex rank of an unordered pair given in any order.
#[inline]
pub fn pair_index(a: usize, b: usize) -> usize {
    if a < b {
        pair_rank(a, b)
    } else {
        pair_rank(b, a)
    }
}

/// Colex rank of the triple `a < b < c`; independent of the vertex count.
#[inline]
pub const fn triple_rank(a: usize, b: usize, c: usize) -> usize {
    choose3(c) + choose2(b) + a
}

/// Sorts three vertices; fails when two coincide.
pub fn sort_triple(a: usize, b: usize, c: usize) -> std::result::Result<Edge, usize> {
    let mut t = [a, b, c];
    t.sort_unstable();
    if t[0] == t[1] {
        return Err(t[0]);
    }
    if t[1] == t[2] {
        return Err(t[1]);
    }
    Ok(t)
}

/// Inverse of [`triple_rank`].
pub fn unrank_triple(mut rank: usize) -> Edge {
    let mut c = 2;
    while choose3(c + 1) <= rank {
        c += 1;
    }
    rank -= choose3(c);
    let mut b = 1;
    while choose2(b + 1) <= rank {
        b += 1;
    }
    rank -= choose2(b);
    [rank, b, c]
}

/// Inverse of [`pair_rank`].
pub fn unrank_pair(rank: usize) -> (usize, usize) {
    let mut b = 1;
    while choose2(b + 1) <= rank {
        b += 1;
    }
    (rank - choose2(b), b)
}

/// A 3-uniform hypergraph ("3-graph") on the vertex set `0..n`.
/// Serialized as `{"n": .., "edges": [[a, b, c], ..]}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph", into = "RawHypergraph")]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<Edge>,
    bits: Vec<u64>,
}

impl Hypergraph3 {
    /// The edgeless hypergraph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            bits: vec![0; choose3(n).div_ceil(64)],
        }
    }

    /// Builds a hypergraph from triples given in any vertex order.
    ///
    /// Repeated vertices, out-of-range vertices and duplicate edges are errors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = [usize; 3]>,
    {
        let mut h = Self::empty(n);
        for [a, b, c] in edges {
            let e = sort_triple(a, b, c)
                .map_err(|v| TuranError::Invalid(format!("repeated vertex {v} in edge")))?;
            if e[2] >= n {
                return Err(TuranError::Invalid(format!(
                    "vertex {} out of range for n = {n}",
                    e[2]
                )));
            }
            if !h.insert(e) {
                return Err(TuranError::Invalid(format!("duplicate edge {e:?}")));
            }
        }
        h.edges.sort_unstable();
        Ok(h)
    }

    /// Builds the hypergraph whose edge set is the colex-indexed bit mask.
    pub fn from_mask(n: usize, mask: u128) -> Self {
        let mut h = Self::empty(n);
        let mut m = mask;
        while m != 0 {
            let r = m.trailing_zeros() as usize;
            m &= m - 1;
            let e = unrank_triple(r);
            debug_assert!(e[2] < n);
            h.insert(e);
        }
        h.edges.sort_unstable();
        h
    }

    fn insert(&mut self, e: Edge) -> bool {
        let r = triple_rank(e[0], e[1], e[2]);
        let (w, b) = (r / 64, r % 64);
        if self.bits[w] >> b & 1 == 1 {
            return false;
        }
        self.bits[w] |= 1 << b;
        self.edges.push(e);
        true
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Membership test; the vertices may be given in any order.
    pub fn has_edge(&self, a: usize, b: usize, c: usize) -> bool {
        match sort_triple(a, b, c) {
            Ok(e) if e[2] < self.n => {
                let r = triple_rank(e[0], e[1], e[2]);
                self.bits[r / 64] >> (r % 64) & 1 == 1
            }
            _ => false,
        }
    }

    /// The edge set as a colex-indexed mask, available while `C(n,3) <= 128`.
    pub fn mask128(&self) -> Option<u128> {
        if choose3(self.n) > 128 {
            return None;
        }
        Some(
            self.edges
                .iter()
                .fold(0u128, |m, e| m | 1u128 << triple_rank(e[0], e[1], e[2])),
        )
    }

    /// Same vertex set, the edge `e` removed.
    pub fn delete_edge(&self, e: Edge) -> Result<Self> {
        let e = sort_triple(e[0], e[1], e[2]).map_err(|_| TuranError::MissingEdge(e))?;
        if !self.has_edge(e[0], e[1], e[2]) {
            return Err(TuranError::MissingEdge(e));
        }
        Ok(self.filter_edges(|f| *f != e))
    }

    /// Same vertex set, the edge `e` added.
    pub fn add_edge(&self, e: Edge) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push(e);
        Self::from_edges(self.n, edges)
    }

    /// Keeps the edges accepted by `keep`, on the same vertex set.
    pub fn filter_edges<F: FnMut(&Edge) -> bool>(&self, mut keep: F) -> Self {
        let mut h = Self::empty(self.n);
        for e in &self.edges {
            if keep(e) {
                h.insert(*e);
            }
        }
        h
    }

    /// Renames vertex `v` to `perm[v]`. `perm` must be a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        let mut h = Self::empty(self.n);
        for &[a, b, c] in &self.edges {
            let e = sort_triple(perm[a], perm[b], perm[c]).expect("perm must be injective");
            h.insert(e);
        }
        h.edges.sort_unstable();
        h
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                d[v] += 1;
            }
        }
        d
    }

    /// Number of vertices lying in no edge.
    pub fn isolated_count(&self) -> usize {
        self.degrees().iter().filter(|&&d| d == 0).count()
    }

    /// Whether the two vertices lie in a common edge.
    pub fn pair_covered(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|e| e.contains(&a) && e.contains(&b))
    }

    /// All pairs `(a, b)`, `a < b`, lying in at least one edge, sorted.
    pub fn covered_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (a, c), (b, c)])
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Parses the text format: a header line `n m`, then `m` edge lines.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines
            .next()
            .ok_or(ParseError::MalformedHeader { line: 1 })?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        let parse_num = |s: &str| s.parse::<usize>().ok();
        let (n, m) = match nums.as_slice() {
            [a, b] => match (parse_num(a), parse_num(b)) {
                (Some(n), Some(m)) => (n, m),
                _ => return Err(ParseError::MalformedHeader { line: hline }),
            },
            _ => return Err(ParseError::MalformedHeader { line: hline }),
        };

        let mut h = Self::empty(n);
        let mut found = 0;
        for (line, l) in lines {
            let vs: Vec<usize> = l
                .split_whitespace()
                .map(parse_num)
                .collect::<Option<_>>()
                .ok_or(ParseError::MalformedEdge { line })?;
            let [a, b, c] = <[usize; 3]>::try_from(vs.as_slice())
                .map_err(|_| ParseError::MalformedEdge { line })?;
            for v in [a, b, c] {
                if v >= n {
                    return Err(ParseError::VertexOutOfRange { line, vertex: v, n });
                }
            }
            let e = sort_triple(a, b, c)
                .map_err(|vertex| ParseError::RepeatedVertex { line, vertex })?;
            if !h.insert(e) {
                return Err(ParseError::DuplicateEdge { line, edge: e });
            }
            found += 1;
        }
        if found != m {
            return Err(ParseError::EdgeCountMismatch { expected: m, found });
        }
        h.edges.sort_unstable();
        Ok(h)
    }

    /// Serializes to the text format with edges sorted lexicographically.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}", self.n, self.edges.len());
        for [a, b, c] in &self.edges {
            s.push_str(&format!("\n{a} {b} {c}"));
        }
        s
    }

    /// Edges written with letters `a, b, c, ...` (only meaningful for n <= 26).
    pub fn letters(&self) -> String {
        let name = |v: usize| (b'a' + v as u8) as char;
        self.edges
            .iter()
            .map(|e| e.iter().map(|&v| name(v)).collect::<String>())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Builds a hypergraph on `n` vertices from letter triples like `"abc,ade"`.
    pub fn from_letters(n: usize, spec: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for word in spec.split(|c: char| c == ',' || c.is_whitespace()) {
            let word = word.trim();
            if word.is_empty() {
                continue;
            }
            let vs: Vec<usize> = word
                .bytes()
                .map(|b| {
                    if b.is_ascii_lowercase() {
                        Ok((b - b'a') as usize)
                    } else {
                        Err(TuranError::Invalid(format!("bad letter in {word:?}")))
                    }
                })
                .collect::<Result<_>>()?;
            let t = <[usize; 3]>::try_from(vs.as_slice())
                .map_err(|_| TuranError::Invalid(format!("{word:?} is not a triple")))?;
            edges.push(t);
        }
        Self::from_edges(n, edges)
    }
}

#[derive(Serialize, Deserialize)]
struct RawHypergraph {
    n: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawHypergraph> for Hypergraph3 {
    type Error = TuranError;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        Hypergraph3::from_edges(raw.n, raw.edges)
    }
}

impl From<Hypergraph3> for RawHypergraph {
    fn from(h: Hypergraph3) -> Self {
        RawHypergraph {
            n: h.n,
            edges: h.edges,
        }
    }
}

impl fmt::Debug for Hypergraph3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypergraph3(n={}, {:?})", self.n, self.edges)
    }
}

impl fmt::Display for Hypergraph3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Hypergraph3 {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// The complete 3-graph on `n` vertices.
pub fn complete(n: usize) -> Hypergraph3 {
    let mut edges = Vec::new();
    for c in 2..n {
        for b in 1..c {
            for a in 0..b {
                edges.push([a, b, c]);
            }
        }
    }
    Hypergraph3::from_edges(n, edges).expect("complete graph is well formed")
}

/// The tight cycle with edges `{i, i+1, i+2} mod n`.
pub fn tight_cycle(n: usize) -> Hypergraph3 {
    Hypergraph3::from_edges(n, (0..n).map(|i| [i, (i + 1) % n, (i + 2) % n]))
        .expect("tight cycle needs n >= 4")
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE9: &str = "7 9\n0 1 2\n0 3 4\n1 2 3\n1 2 5\n2 3 4\n3 4 5\n0 1 6\n2 3 6\n4 5 6";

    #[test]
    fn parse_single_edge() {
        let h: Hypergraph3 = "3 1\n0 1 2".parse().unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.edges(), &[[0, 1, 2]]);
    }

    #[test]
    fn parse_example9_matches_letters() {
        let h = Hypergraph3::parse(EXAMPLE9).unwrap();
        let l = Hypergraph3::from_letters(7, "abc,ade,bcd,bcf,cde,def,abg,cdg,efg").unwrap();
        assert_eq!(h, l);
        assert_eq!(h.edge_count(), 9);
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(
            Hypergraph3::parse("3 1\n0 1 1"),
            Err(ParseError::RepeatedVertex { line: 2, vertex: 1 })
        );
        assert_eq!(
            Hypergraph3::parse("3 1\n0 1 3"),
            Err(ParseError::VertexOutOfRange { line: 2, vertex: 3, n: 3 })
        );
        assert_eq!(
            Hypergraph3::parse("4 2\n0 1 2\n# dup\n2 1 0"),
            Err(ParseError::DuplicateEdge { line: 4, edge: [0, 1, 2] })
        );
        assert_eq!(
            Hypergraph3::parse("three 1\n0 1 2"),
            Err(ParseError::MalformedHeader { line: 1 })
        );
        assert_eq!(
            Hypergraph3::parse("4 1\n0 1"),
            Err(ParseError::MalformedEdge { line: 2 })
        );
        assert!(matches!(
            Hypergraph3::parse("4 2\n0 1 2"),
            Err(ParseError::EdgeCountMismatch { .. })
        ));
    }

    #[test]
    fn unsorted_input_is_normalized() {
        let h = Hypergraph3::parse("# comment\n5 2\n4 2 0\n3 1 0\n").unwrap();
        assert_eq!(h.edges(), &[[0, 1, 3], [0, 2, 4]]);
    }

    #[test]
    fn serialize_forms() {
        let h = Hypergraph3::from_edges(3, [[2, 0, 1]]).unwrap();
        assert_eq!(h.to_text(), "3 1\n0 1 2");
        assert_eq!(Hypergraph3::empty(0).to_text(), "0 0");
        let e9 = Hypergraph3::parse(EXAMPLE9).unwrap();
        assert_eq!(Hypergraph3::parse(&e9.to_text()).unwrap(), e9);
    }

    #[test]
    fn ranks_round_trip() {
        for r in 0..choose3(12) {
            let [a, b, c] = unrank_triple(r);
            assert!(a < b && b < c);
            assert_eq!(triple_rank(a, b, c), r);
        }
        for r in 0..choose2(12) {
            let (a, b) = unrank_pair(r);
            assert_eq!(pair_rank(a, b), r);
        }
    }

    #[test]
    fn delete_edge_cases() {
        let e9 = Hypergraph3::parse(EXAMPLE9).unwrap();
        let h2 = e9.delete_edge([6, 1, 0]).unwrap();
        assert_eq!(h2.edge_count(), 8);
        assert!(!h2.has_edge(0, 1, 6));
        let single = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        assert!(single.delete_edge([0, 1, 2]).unwrap().is_empty());
        assert_eq!(
            single.delete_edge([0, 1, 3]),
            Err(TuranError::MissingEdge([0, 1, 3]))
        );
    }

    #[test]
    fn mask_round_trip() {
        let e9 = Hypergraph3::parse(EXAMPLE9).unwrap();
        let m = e9.mask128().unwrap();
        assert_eq!(Hypergraph3::from_mask(7, m), e9);
        assert_eq!(m.count_ones(), 9);
    }

    #[test]
    fn builders() {
        assert_eq!(complete(5).edge_count(), 10);
        assert_eq!(tight_cycle(6).edge_count(), 6);
        assert_eq!(complete(4).isolated_count(), 0);
        assert_eq!(Hypergraph3::from_edges(6, [[0, 1, 2]]).unwrap().isolated_count(), 3);
    }
}
