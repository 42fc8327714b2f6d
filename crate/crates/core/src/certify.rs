//! Certificates that a 3-graph has uniform Turán density exactly 1/27.
//!
//! A certificate has three parts: evidence that the graph has no vanishing
//! ordering, and two splittings of the edge set into spanning parts `H1`,
//! `H2` with a common ordering vanishing for both. In the horizontal split a
//! pair shared by an edge of each part is right in `H1` and left in `H2`; in
//! the vertical split it is top in `H1` and left in `H2`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::digraph::{
    digraph_vanishing_oracle_with_bound, verify_refutation, DigraphRefutation,
};
use crate::error::{check_bound, Result};
use crate::hypergraph::{Edge, Hypergraph3};
use crate::orderings::{
    find_vanishing_ordering, roles_under_ordering, OrderSearch, Role, RoleAssignment, VertexOrder,
    DEFAULT_ORDER_BOUND,
};

/// Default vertex bound for the bipartition search.
pub const DEFAULT_CERTIFY_BOUND: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionMode {
    /// Shared pairs are right in part 1 and left in part 2.
    Horizontal,
    /// Shared pairs are top in part 1 and left in part 2.
    Vertical,
}

impl IntersectionMode {
    /// Required role of a shared pair in part 1.
    pub fn part1_role(self) -> Role {
        match self {
            IntersectionMode::Horizontal => Role::Right,
            IntersectionMode::Vertical => Role::Top,
        }
    }
}

/// Two complementary edge sets on the full vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBipartition {
    pub part1: Vec<Edge>,
    pub part2: Vec<Edge>,
}

impl EdgeBipartition {
    /// Pairs `e1 ∩ e2` with `e1` in part 1, `e2` in part 2, `|e1 ∩ e2| = 2`.
    pub fn shared_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for e1 in &self.part1 {
            for e2 in &self.part2 {
                let common: Vec<usize> = e1.iter().filter(|v| e2.contains(v)).copied().collect();
                if common.len() == 2 {
                    out.insert((common[0].min(common[1]), common[0].max(common[1])));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartitionCertificate {
    pub mode: IntersectionMode,
    pub bipartition: EdgeBipartition,
    pub ordering: VertexOrder,
    pub roles1: RoleAssignment,
    pub roles2: RoleAssignment,
}

/// Evidence for the absence of a vanishing ordering. Without a refutation
/// the verifier repeats the exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonVanishingEvidence {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub refutation: Option<DigraphRefutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuranCertificate {
    pub nonvanishing: NonVanishingEvidence,
    pub horizontal: BipartitionCertificate,
    pub vertical: BipartitionCertificate,
}

/// Outcome of a certification attempt, recording each condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub vanishing: bool,
    pub horizontal_found: bool,
    pub vertical_found: bool,
    pub certificate: Option<TuranCertificate>,
}

impl CertifyReport {
    pub fn failed_conditions(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.vanishing {
            out.push("has a vanishing ordering");
        }
        if !self.horizontal_found {
            out.push("no horizontal bipartition");
        }
        if !self.vertical_found {
            out.push("no vertical bipartition");
        }
        out
    }
}

/// Searches one fixed split for a common ordering; shared pair roles are
/// fixed up front so conflicts surface as early as possible.
fn search_split(
    h: &Hypergraph3,
    part1: &[Edge],
    part2: &[Edge],
    mode: IntersectionMode,
) -> Option<BipartitionCertificate> {
    let bip = EdgeBipartition {
        part1: part1.to_vec(),
        part2: part2.to_vec(),
    };
    let mut s = OrderSearch::new(h.n(), &[part1, part2]);
    for &(a, b) in &bip.shared_pairs() {
        if !s.preset(0, a, b, mode.part1_role()) || !s.preset(1, a, b, Role::Left) {
            return None;
        }
    }
    if !s.solve() {
        return None;
    }
    Some(BipartitionCertificate {
        mode,
        ordering: s.ordering(),
        roles1: s.layer_roles(0, part1),
        roles2: s.layer_roles(1, part2),
        bipartition: bip,
    })
}

/// Next `k`-combination of `0..m` in lexicographic order.
fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exhaustive search over splittings (by increasing size of part 1, then
/// lexicographically) and orderings. The empty part 1 is allowed.
pub fn find_bipartition_certificate(
    h: &Hypergraph3,
    mode: IntersectionMode,
) -> Result<Option<BipartitionCertificate>> {
    check_bound("bipartition search vertex count", h.n(), DEFAULT_CERTIFY_BOUND)?;
    let edges = h.edges();
    let m = edges.len();
    for k in 0..=m {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            let in1: BTreeSet<usize> = comb.iter().copied().collect();
            let part1: Vec<Edge> = comb.iter().map(|&i| edges[i]).collect();
            let part2: Vec<Edge> = (0..m).filter(|i| !in1.contains(i)).map(|i| edges[i]).collect();
            if let Some(c) = search_split(h, &part1, &part2, mode) {
                return Ok(Some(c));
            }
            if k == 0 || !next_combination(&mut comb, m) {
                break;
            }
        }
    }
    Ok(None)
}

/// Checks every invariant of a bipartition certificate directly from the
/// definitions, without any search.
pub fn verify_bipartition_certificate(h: &Hypergraph3, cert: &BipartitionCertificate) -> bool {
    let bip = &cert.bipartition;
    let p1: BTreeSet<Edge> = bip.part1.iter().copied().collect();
    let p2: BTreeSet<Edge> = bip.part2.iter().copied().collect();
    if p1.len() != bip.part1.len() || p2.len() != bip.part2.len() || !p1.is_disjoint(&p2) {
        return false;
    }
    let all: BTreeSet<Edge> = h.edges().iter().copied().collect();
    if p1.union(&p2).copied().collect::<BTreeSet<_>>() != all {
        return false;
    }
    if !cert.ordering.is_permutation_of(h.n()) {
        return false;
    }
    let h1 = h.filter_edges(|e| p1.contains(e));
    let h2 = h.filter_edges(|e| p2.contains(e));
    for (part, claimed) in [(&h1, &cert.roles1), (&h2, &cert.roles2)] {
        if claimed.iter().any(|((a, b), _)| a >= h.n() || b >= h.n()) {
            return false;
        }
        let Ok(forced) = roles_under_ordering(part, &cert.ordering) else {
            return false;
        };
        if forced.iter().any(|((a, b), r)| claimed.get(a, b) != Some(r)) {
            return false;
        }
    }
    bip.shared_pairs().iter().all(|&(a, b)| {
        cert.roles1.get(a, b) == Some(cert.mode.part1_role())
            && cert.roles2.get(a, b) == Some(Role::Left)
    })
}

/// Refutation evidence from the digraph criterion, when one exists.
fn nonvanishing_evidence(h: &Hypergraph3, bound: usize) -> Option<DigraphRefutation> {
    digraph_vanishing_oracle_with_bound(h, bound)
        .ok()
        .and_then(|v| v.refutation)
}

/// Runs all three conditions and assembles a certificate when they hold.
pub fn certify_uniform_turan_1_27(h: &Hypergraph3) -> Result<CertifyReport> {
    check_bound("bipartition search vertex count", h.n(), DEFAULT_CERTIFY_BOUND)?;
    let vanishing = find_vanishing_ordering(h)?.is_some();
    let horizontal = find_bipartition_certificate(h, IntersectionMode::Horizontal)?;
    let vertical = find_bipartition_certificate(h, IntersectionMode::Vertical)?;
    let certificate = match (&horizontal, &vertical) {
        (Some(hz), Some(vt)) if !vanishing => Some(TuranCertificate {
            nonvanishing: NonVanishingEvidence {
                refutation: nonvanishing_evidence(h, DEFAULT_ORDER_BOUND),
            },
            horizontal: hz.clone(),
            vertical: vt.clone(),
        }),
        _ => None,
    };
    Ok(CertifyReport {
        vanishing,
        horizontal_found: horizontal.is_some(),
        vertical_found: vertical.is_some(),
        certificate,
    })
}

/// Verifies non-vanishing, then both bipartition certificates.
///
/// Standalone refutations (forcing conflicts, or cyclic colourings of a
/// pair-connected graph) must check out; otherwise the exhaustive ordering
/// search is rerun, which needs `n <= 12`.
pub fn verify_turan_certificate(h: &Hypergraph3, cert: &TuranCertificate) -> bool {
    if cert.horizontal.mode != IntersectionMode::Horizontal
        || cert.vertical.mode != IntersectionMode::Vertical
    {
        return false;
    }
    let standalone = match &cert.nonvanishing.refutation {
        Some(r @ DigraphRefutation::Inconsistent { .. }) => Some(verify_refutation(h, r)),
        Some(
            r @ DigraphRefutation::Cyclic {
                components,
                coloring,
                cycles,
            },
        ) => {
            if *components == 1 {
                Some(verify_refutation(h, r))
            } else {
                let ok = coloring.is_consistent_with(h)
                    && crate::digraph::COLOR_PAIRS
                        .iter()
                        .zip(cycles)
                        .all(|(&cp, c)| coloring.has_cycle(cp, c));
                if !ok {
                    return false;
                }
                None
            }
        }
        None => None,
    };
    let nonvanishing = match standalone {
        Some(ok) => ok,
        None => matches!(find_vanishing_ordering(h), Ok(None)),
    };
    nonvanishing
        && verify_bipartition_certificate(h, &cert.horizontal)
        && verify_bipartition_certificate(h, &cert.vertical)
}

fn split_certificate(
    h: &Hypergraph3,
    part1: Vec<Edge>,
    ordering: VertexOrder,
    mode: IntersectionMode,
) -> BipartitionCertificate {
    let part2: Vec<Edge> = h.edges().iter().filter(|e| !part1.contains(e)).copied().collect();
    let h1 = h.filter_edges(|e| part1.contains(e));
    let h2 = h.filter_edges(|e| part2.contains(e));
    let roles1 = roles_under_ordering(&h1, &ordering).expect("part 1 is vanishing");
    let roles2 = roles_under_ordering(&h2, &ordering).expect("part 2 is vanishing");
    BipartitionCertificate {
        mode,
        bipartition: EdgeBipartition { part1, part2 },
        ordering,
        roles1,
        roles2,
    }
}

/// The 7-vertex 9-edge example (`a..g` as `0..6`).
pub fn example9_graph() -> Hypergraph3 {
    Hypergraph3::from_letters(7, "abc,ade,bcd,bcf,cde,def,abg,cdg,efg").unwrap()
}

/// The 7-vertex example with its hand-derived certificate: part 1 is the
/// single edge `abg`, with orderings `egbdfac` (horizontal) and `ebgdfac`
/// (vertical).
pub fn build_example9() -> (Hypergraph3, TuranCertificate) {
    let h = example9_graph();
    let abg = [0, 1, 6];
    let horizontal = split_certificate(
        &h,
        vec![abg],
        VertexOrder::from_letters("egbdfac").unwrap(),
        IntersectionMode::Horizontal,
    );
    let vertical = split_certificate(
        &h,
        vec![abg],
        VertexOrder::from_letters("ebgdfac").unwrap(),
        IntersectionMode::Vertical,
    );
    let cert = TuranCertificate {
        nonvanishing: NonVanishingEvidence {
            refutation: nonvanishing_evidence(&h, usize::MAX),
        },
        horizontal,
        vertical,
    };
    (h, cert)
}

/// Vertex labels of the family `H^k`: `a = 0`, `b = 1`, then the chains
/// `c_0..c_k`, `d_0..d_k`, `e_0..e_k`.
#[derive(Clone, Copy, Debug)]
pub struct Example8Labels {
    pub k: usize,
}

impl Example8Labels {
    pub const A: usize = 0;
    pub const B: usize = 1;

    pub fn c(&self, i: usize) -> usize {
        2 + i
    }
    pub fn d(&self, i: usize) -> usize {
        3 + self.k + i
    }
    pub fn e(&self, i: usize) -> usize {
        4 + 2 * self.k + i
    }
    pub fn n(&self) -> usize {
        5 + 3 * self.k
    }
    /// The chain `x` (0 = c, 1 = d, 2 = e) at index `i`.
    pub fn chain(&self, x: usize, i: usize) -> usize {
        match x {
            0 => self.c(i),
            1 => self.d(i),
            _ => self.e(i),
        }
    }
}

/// The graph `H^k` on `5 + 3k` vertices with `3(k + 2)` edges.
pub fn example8_graph(k: usize) -> Result<Hypergraph3> {
    if k < 1 {
        return Err(crate::TuranError::Invalid("k must be at least 1".into()));
    }
    let l = Example8Labels { k };
    let (a, b) = (Example8Labels::A, Example8Labels::B);
    let mut edges = Vec::new();
    for x in 0..3 {
        let next = (x + 1) % 3;
        edges.push([a, b, l.chain(x, 0)]);
        edges.push([b, l.chain(x, 0), l.chain(x, 1)]);
        for i in 0..k.saturating_sub(1) {
            edges.push([l.chain(x, i), l.chain(x, i + 1), l.chain(x, i + 2)]);
        }
        edges.push([l.chain(x, k - 1), l.chain(x, k), l.chain(next, k)]);
    }
    Hypergraph3::from_edges(l.n(), edges)
}

/// `H^k` with the certificate from its construction. Part 1 is the single
/// edge `e_{k-1} e_k c_k`. With blocks `A`, `B`, `C` grouping chain vertices
/// by index modulo 3 (`a` and `b` continuing the chains at indices -2 and
/// -1), the horizontal ordering is `A - {e_{k-1}}, c_k, e_{k-1}, d_k, B, C`
/// and the vertical one is `A, c_k, d_k, B, C`. Inside a block vertices are
/// listed c-chain, d-chain, e-chain, then `a`, `b`, each chain by index.
pub fn build_example8(k: usize) -> Result<(Hypergraph3, TuranCertificate)> {
    let h = example8_graph(k)?;
    let l = Example8Labels { k };
    let ki = k as i64;
    // Block of a chain index: 2 -> A (i = k-1), 0 -> B (i = k), 1 -> C (i = k+1).
    let block_of = |i: i64| (i - ki).rem_euclid(3);
    let mut blocks: [Vec<usize>; 3] = Default::default();
    let slot = |r: i64| match r {
        2 => 0,
        0 => 1,
        _ => 2,
    };
    for x in 0..3 {
        for i in 0..=k {
            let v = l.chain(x, i);
            if v == l.c(k) || v == l.d(k) {
                continue;
            }
            blocks[slot(block_of(i as i64))].push(v);
        }
    }
    blocks[slot(block_of(-2))].push(Example8Labels::A);
    blocks[slot(block_of(-1))].push(Example8Labels::B);
    let [block_a, block_b, block_c] = blocks;
    let (ck, dk, ek1) = (l.c(k), l.d(k), l.e(k - 1));

    let mut horiz: Vec<usize> = block_a.iter().copied().filter(|&v| v != ek1).collect();
    horiz.extend([ck, ek1, dk]);
    horiz.extend(&block_b);
    horiz.extend(&block_c);

    let mut vert: Vec<usize> = block_a.clone();
    vert.extend([ck, dk]);
    vert.extend(&block_b);
    vert.extend(&block_c);

    let part1 = vec![{
        let mut e = [ek1, l.e(k), ck];
        e.sort_unstable();
        e
    }];
    let horizontal = split_certificate(
        &h,
        part1.clone(),
        VertexOrder::new(horiz)?,
        IntersectionMode::Horizontal,
    );
    let vertical = split_certificate(&h, part1, VertexOrder::new(vert)?, IntersectionMode::Vertical);
    let cert = TuranCertificate {
        nonvanishing: NonVanishingEvidence {
            refutation: nonvanishing_evidence(&h, usize::MAX),
        },
        horizontal,
        vertical,
    };
    Ok((h, cert))
}
