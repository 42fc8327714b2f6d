//! Partitioned hypergraphs: vertex parts `V_ij` indexed by pairs of indices,
//! with every edge spanning a triad `V_ij, V_ik, V_jk` for some `i < j < k`.
//! Indices are 0-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_bound, ParseError, Result, TuranError};
use crate::hypergraph::Hypergraph3;
use crate::palette::Palette;

pub type Pair = (usize, usize);
pub type Triad = (usize, usize, usize);

pub const EMBED_PATTERN_BOUND: usize = 7;
pub const EMBED_INDEX_BOUND: usize = 10;
pub const EMBED_PART_BOUND: usize = 8;

/// An edge of the `(i, j, k)` triad: `u` in `V_ij`, `v` in `V_ik`, `w` in `V_jk`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriadEdge {
    pub triad: Triad,
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

impl TriadEdge {
    fn parts(&self) -> [Pair; 3] {
        let (i, j, k) = self.triad;
        [(i, j), (i, k), (j, k)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedHypergraph {
    n: usize,
    sizes: BTreeMap<Pair, usize>,
    edges: BTreeSet<TriadEdge>,
}

fn ordered(a: usize, b: usize) -> Pair {
    (a.min(b), a.max(b))
}

impl PartitionedHypergraph {
    /// Index count `n` and part sizes for every pair `i < j < n` (missing
    /// pairs are empty).
    pub fn new(n: usize, sizes: BTreeMap<Pair, usize>) -> Result<Self> {
        if let Some(&(i, j)) = sizes.keys().find(|&&(i, j)| i >= j || j >= n) {
            return Err(TuranError::Invalid(format!("no part V_{i},{j} for n = {n}")));
        }
        let mut all = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                all.insert((i, j), sizes.get(&(i, j)).copied().unwrap_or(0));
            }
        }
        Ok(Self {
            n,
            sizes: all,
            edges: BTreeSet::new(),
        })
    }

    /// Every part of the same size.
    pub fn uniform(n: usize, size: usize) -> Self {
        let sizes = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| ((i, j), size)))
            .collect();
        Self::new(n, sizes).expect("valid pairs")
    }

    /// The palette pattern: each part holds one vertex per colour, and a
    /// triad edge is present iff its `(V_ij, V_ik, V_jk)` colours form an
    /// allowed `(left, top, right)` triple.
    pub fn from_palette(n: usize, p: &Palette) -> Self {
        let c = p.colors().len();
        let mut ph = Self::uniform(n, c);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for &[u, v, w] in p.allowed() {
                        ph.edges.insert(TriadEdge {
                            triad: (i, j, k),
                            u,
                            v,
                            w,
                        });
                    }
                }
            }
        }
        ph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn part_size(&self, i: usize, j: usize) -> usize {
        self.sizes.get(&ordered(i, j)).copied().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = &TriadEdge> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, e: &TriadEdge) -> bool {
        self.edges.contains(e)
    }

    pub fn add_edge(&mut self, e: TriadEdge) -> Result<bool> {
        let (i, j, k) = e.triad;
        if !(i < j && j < k && k < self.n) {
            return Err(TuranError::Invalid(format!("bad triad {:?}", e.triad)));
        }
        for (p, x) in e.parts().into_iter().zip([e.u, e.v, e.w]) {
            if x >= self.sizes[&p] {
                return Err(TuranError::Invalid(format!(
                    "vertex {x} outside V_{},{} of size {}",
                    p.0, p.1, self.sizes[&p]
                )));
            }
        }
        Ok(self.edges.insert(e))
    }

    fn triad_edges(&self, t: Triad) -> impl Iterator<Item = &TriadEdge> {
        let lo = TriadEdge {
            triad: t,
            u: 0,
            v: 0,
            w: 0,
        };
        self.edges.range(lo..).take_while(move |e| e.triad == t)
    }

    fn check_triad(&self, t: Triad) -> Result<()> {
        let (i, j, k) = t;
        if i < j && j < k && k < self.n {
            Ok(())
        } else {
            Err(TuranError::Invalid(format!("bad triad {t:?}")))
        }
    }

    /// Parses `P n`, an `n x n` symmetric part-size matrix, then edge lines
    /// `i j u  i k v  j k w`. `#` lines are comments.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(ParseError::MalformedHeader { line: 1 })?;
        let n: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["P", n] => n.parse().map_err(|_| ParseError::MalformedHeader { line: hl })?,
            _ => return Err(ParseError::MalformedHeader { line: hl }),
        };
        let mut matrix = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, row) = lines.next().ok_or(ParseError::MalformedHeader { line: hl })?;
            let row: Vec<usize> = row
                .split_whitespace()
                .map(|x| x.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| ParseError::Other {
                    line,
                    message: "malformed part-size row".into(),
                })?;
            if row.len() != n {
                return Err(ParseError::Other {
                    line,
                    message: format!("expected {n} part sizes"),
                });
            }
            matrix.push((line, row));
        }
        let mut sizes = BTreeMap::new();
        for i in 0..n {
            let (line, row) = &matrix[i];
            for j in 0..n {
                if row[j] != matrix[j].1[i] || (i == j && row[j] != 0) {
                    return Err(ParseError::Other {
                        line: *line,
                        message: "part-size matrix must be symmetric with zero diagonal".into(),
                    });
                }
                if i < j {
                    sizes.insert((i, j), row[j]);
                }
            }
        }
        let mut ph = Self::new(n, sizes).expect("pairs in range");
        for (line, l) in lines {
            let nums: Vec<usize> = l
                .split_whitespace()
                .map(|x| x.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| ParseError::MalformedEdge { line })?;
            let [i, j, u, i2, k, v, j2, k2, w] = nums[..] else {
                return Err(ParseError::MalformedEdge { line });
            };
            if i != i2 || j != j2 || k != k2 {
                return Err(ParseError::Other {
                    line,
                    message: "edge parts do not form a triad".into(),
                });
            }
            let e = TriadEdge {
                triad: (i, j, k),
                u,
                v,
                w,
            };
            match ph.add_edge(e) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(ParseError::Other {
                        line,
                        message: "duplicate edge".into(),
                    })
                }
                Err(err) => {
                    return Err(ParseError::Other {
                        line,
                        message: err.to_string(),
                    })
                }
            }
        }
        Ok(ph)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("P {}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| if i == j { 0 } else { self.part_size(i, j) }.to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        for e in &self.edges {
            let (i, j, k) = e.triad;
            out.push_str(&format!("{i} {j} {}  {i} {k} {}  {j} {k} {}\n", e.u, e.v, e.w));
        }
        out
    }
}

impl fmt::Display for PartitionedHypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Exact triad densities. Triads with an empty part get density 0 and are
/// listed in `empty_triads`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriadStats {
    pub densities: BTreeMap<Triad, BigRational>,
    pub empty_triads: Vec<Triad>,
    /// `None` when there are fewer than three indices.
    pub minimum: Option<(Triad, BigRational)>,
}

pub fn triad_stats(ph: &PartitionedHypergraph) -> TriadStats {
    let n = ph.n;
    let mut densities = BTreeMap::new();
    let mut empty_triads = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let t = (i, j, k);
                let vol = ph.part_size(i, j) * ph.part_size(i, k) * ph.part_size(j, k);
                let d = if vol == 0 {
                    empty_triads.push(t);
                    BigRational::zero()
                } else {
                    BigRational::new(
                        BigInt::from(ph.triad_edges(t).count()),
                        BigInt::from(vol),
                    )
                };
                densities.insert(t, d);
            }
        }
    }
    let minimum = densities
        .iter()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(t, d)| (*t, d.clone()));
    TriadStats {
        densities,
        empty_triads,
        minimum,
    }
}

/// Normalised degree of vertex `v` of part `part` within triad `t`: triad
/// edges through `v` divided by the product of the two other part sizes.
pub fn part_vertex_degree(
    ph: &PartitionedHypergraph,
    t: Triad,
    part: Pair,
    v: usize,
) -> Result<BigRational> {
    ph.check_triad(t)?;
    let (i, j, k) = t;
    let slot = [(i, j), (i, k), (j, k)]
        .iter()
        .position(|&p| p == ordered(part.0, part.1))
        .ok_or_else(|| TuranError::Invalid(format!("part {part:?} is not in triad {t:?}")))?;
    if v >= ph.part_size(part.0, part.1) {
        return Err(TuranError::Invalid(format!("vertex {v} outside part {part:?}")));
    }
    let others: Vec<Pair> = [(i, j), (i, k), (j, k)]
        .into_iter()
        .enumerate()
        .filter(|&(s, _)| s != slot)
        .map(|(_, p)| p)
        .collect();
    let denom = others.iter().map(|&(a, b)| ph.part_size(a, b)).product::<usize>();
    if denom == 0 {
        return Err(TuranError::Invalid("an opposite part is empty".into()));
    }
    let count = ph
        .triad_edges(t)
        .filter(|e| [e.u, e.v, e.w][slot] == v)
        .count();
    Ok(BigRational::new(BigInt::from(count), BigInt::from(denom)))
}

/// Normalised co-degree of `v` (in part `p1`) and `v2` (in part `p2`) within
/// triad `t`: common triad edges divided by the size of the third part.
pub fn pair_codegree(
    ph: &PartitionedHypergraph,
    t: Triad,
    (p1, v1): (Pair, usize),
    (p2, v2): (Pair, usize),
) -> Result<BigRational> {
    ph.check_triad(t)?;
    let (i, j, k) = t;
    let parts = [(i, j), (i, k), (j, k)];
    let slot = |p: Pair| {
        parts
            .iter()
            .position(|&q| q == ordered(p.0, p.1))
            .ok_or_else(|| TuranError::Invalid(format!("part {p:?} is not in triad {t:?}")))
    };
    let (s1, s2) = (slot(p1)?, slot(p2)?);
    if s1 == s2 {
        return Err(TuranError::Invalid("both vertices lie in the same part".into()));
    }
    if v1 >= ph.part_size(p1.0, p1.1) || v2 >= ph.part_size(p2.0, p2.1) {
        return Err(TuranError::Invalid("vertex outside its part".into()));
    }
    let third = parts[3 - s1 - s2];
    let denom = ph.part_size(third.0, third.1);
    if denom == 0 {
        return Err(TuranError::Invalid("the third part is empty".into()));
    }
    let count = ph
        .triad_edges(t)
        .filter(|e| {
            let x = [e.u, e.v, e.w];
            x[s1] == v1 && x[s2] == v2
        })
        .count();
    Ok(BigRational::new(BigInt::from(count), BigInt::from(denom)))
}

/// The reverse: `V'_ij = V_{n-1-j, n-1-i}`. The `(i, j, k)` edge `(u, v, w)`
/// becomes the `(n-1-k, n-1-j, n-1-i)` edge `(w, v, u)`.
pub fn reverse_partitioned(ph: &PartitionedHypergraph) -> PartitionedHypergraph {
    let n = ph.n;
    let sizes = ph
        .sizes
        .iter()
        .map(|(&(i, j), &s)| ((n - 1 - j, n - 1 - i), s))
        .collect();
    let edges = ph
        .edges
        .iter()
        .map(|e| {
            let (i, j, k) = e.triad;
            TriadEdge {
                triad: (n - 1 - k, n - 1 - j, n - 1 - i),
                u: e.w,
                v: e.v,
                w: e.u,
            }
        })
        .collect();
    PartitionedHypergraph { n, sizes, edges }
}

/// `indices[x]` is the index chosen for vertex `x` of the pattern, and
/// `vertices[(x, y)]` the vertex of `V_{indices[x], indices[y]}` chosen for
/// the covered pair `x < y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedEmbedding {
    pub indices: Vec<usize>,
    pub vertices: BTreeMap<Pair, usize>,
}

impl PartitionedEmbedding {
    fn host_edge(&self, e: &[usize; 3], pick: impl Fn(Pair) -> usize) -> TriadEdge {
        let [x, y, z] = *e;
        let slots = [
            (self.indices[x], self.indices[y], pick((x, y))),
            (self.indices[x], self.indices[z], pick((x, z))),
            (self.indices[y], self.indices[z], pick((y, z))),
        ];
        let mut idx = [self.indices[x], self.indices[y], self.indices[z]];
        idx.sort_unstable();
        let [i, j, k] = idx;
        let find = |p: Pair| {
            slots
                .iter()
                .find(|s| ordered(s.0, s.1) == p)
                .expect("part of the triad")
                .2
        };
        TriadEdge {
            triad: (i, j, k),
            u: find((i, j)),
            v: find((i, k)),
            w: find((j, k)),
        }
    }

    pub fn verify(&self, h0: &Hypergraph3, ph: &PartitionedHypergraph) -> bool {
        if self.indices.len() != h0.n() || self.indices.iter().any(|&a| a >= ph.n()) {
            return false;
        }
        let distinct: BTreeSet<usize> = self.indices.iter().copied().collect();
        if distinct.len() != self.indices.len() {
            return false;
        }
        for (&(x, y), &v) in &self.vertices {
            if x >= y || y >= h0.n() || v >= ph.part_size(self.indices[x], self.indices[y]) {
                return false;
            }
        }
        h0.edges().iter().all(|e| {
            let pairs = [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])];
            pairs.iter().all(|p| self.vertices.contains_key(p))
                && ph.has_edge(&self.host_edge(e, |p| self.vertices[&p]))
        })
    }
}

struct EmbedSearch<'a> {
    h0: &'a Hypergraph3,
    ph: &'a PartitionedHypergraph,
    pairs: Vec<Pair>,
    /// Edges of `h0` completed when pair `pairs[p]` is assigned.
    closing: Vec<Vec<[usize; 3]>>,
    emb: PartitionedEmbedding,
    used: Vec<bool>,
}

impl EmbedSearch<'_> {
    fn assign_indices(&mut self, x: usize) -> bool {
        if x == self.h0.n() {
            return self.assign_pairs(0);
        }
        for a in 0..self.ph.n() {
            if self.used[a] {
                continue;
            }
            self.emb.indices[x] = a;
            // Every edge closed at `x` needs a non-empty triad.
            let ok = self.h0.edges().iter().filter(|e| e[2] == x).all(|e| {
                let idx: Vec<usize> = e.iter().map(|&y| self.emb.indices[y]).collect();
                [(0, 1), (0, 2), (1, 2)]
                    .iter()
                    .all(|&(p, q)| self.ph.part_size(idx[p], idx[q]) > 0)
            });
            if ok {
                self.used[a] = true;
                if self.assign_indices(x + 1) {
                    return true;
                }
                self.used[a] = false;
            }
        }
        false
    }

    fn assign_pairs(&mut self, p: usize) -> bool {
        if p == self.pairs.len() {
            return true;
        }
        let (x, y) = self.pairs[p];
        let size = self.ph.part_size(self.emb.indices[x], self.emb.indices[y]);
        for v in 0..size {
            self.emb.vertices.insert((x, y), v);
            let ok = self.closing[p].iter().all(|e| {
                let t = self.emb.host_edge(e, |q| self.emb.vertices[&q]);
                self.ph.has_edge(&t)
            });
            if ok && self.assign_pairs(p + 1) {
                return true;
            }
        }
        self.emb.vertices.remove(&(x, y));
        false
    }
}

/// Exhaustive search for distinct indices `a_x` and part vertices carrying
/// every edge of `h0` onto an edge of `ph`. The indices may come in any
/// order.
pub fn embed_into_partitioned(
    h0: &Hypergraph3,
    ph: &PartitionedHypergraph,
) -> Result<Option<PartitionedEmbedding>> {
    check_bound("embedded pattern vertex count", h0.n(), EMBED_PATTERN_BOUND)?;
    check_bound("partitioned index count", ph.n(), EMBED_INDEX_BOUND)?;
    let largest = ph.sizes.values().copied().max().unwrap_or(0);
    check_bound("partitioned part size", largest, EMBED_PART_BOUND)?;
    if h0.n() > ph.n() {
        return Ok(None);
    }
    let pairs = h0.covered_pairs();
    let mut closing = vec![Vec::new(); pairs.len()];
    for e in h0.edges() {
        let last = [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])]
            .iter()
            .map(|p| pairs.binary_search(p).expect("covered pair"))
            .max()
            .unwrap();
        closing[last].push(*e);
    }
    let mut s = EmbedSearch {
        h0,
        ph,
        pairs,
        closing,
        emb: PartitionedEmbedding {
            indices: vec![0; h0.n()],
            vertices: BTreeMap::new(),
        },
        used: vec![false; ph.n()],
    };
    Ok(s.assign_indices(0).then_some(s.emb))
}
