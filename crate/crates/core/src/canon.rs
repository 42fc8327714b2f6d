//! Canonical forms and isomorphism for small 3-graphs.
//!
//! The canonical code is the minimum edge-set image over all relabelings that
//! respect an isomorphism-invariant vertex colouring (degrees refined by the
//! colours of edge partners and co-degrees). Relabelings are explored position
//! by position with prefix pruning, and every relabeling reaching the minimum
//! is an automorphism composed with one canonical relabeling.

use serde::{Deserialize, Serialize};

use crate::error::{check_bound, Result};
use crate::hypergraph::{choose3, triple_rank, Edge, Hypergraph3};

/// Largest vertex count whose edge set fits in a 128-bit code.
pub const MAX_CANON_N: usize = 10;

/// Default bound for [`canonical_form`].
pub const DEFAULT_CANON_BOUND: usize = 10;

/// Isomorphism-invariant fingerprint of a hypergraph on a fixed vertex count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub n: usize,
    #[serde(with = "hex_u128")]
    pub code: u128,
    pub automorphisms: u64,
}

impl CanonicalForm {
    /// The canonical representative: the hypergraph whose edge image is `code`.
    pub fn representative(&self) -> Hypergraph3 {
        Hypergraph3::from_mask(self.n, code_to_mask(self.n, self.code))
    }

    pub fn code_hex(&self) -> String {
        format!("{:032x}", self.code)
    }
}

pub(crate) mod hex_u128 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:032x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        u128::from_str_radix(&s, 16).map_err(serde::de::Error::custom)
    }
}

/// Bit position of colex rank `r` inside a code on `n` vertices: low ranks
/// occupy the most significant bits so that positions fixed early in the
/// search decide the leading bits.
#[inline]
fn code_bit(total: usize, r: usize) -> u128 {
    1u128 << (total - 1 - r)
}

/// Converts a canonical code back into a colex edge mask.
pub fn code_to_mask(n: usize, code: u128) -> u128 {
    let total = choose3(n);
    let mut mask = 0u128;
    let mut c = code;
    while c != 0 {
        let b = c.trailing_zeros() as usize;
        c &= c - 1;
        mask |= 1u128 << (total - 1 - b);
    }
    mask
}

pub(crate) type Perm = [u8; MAX_CANON_N];

/// Result of a canonical labeling search.
#[derive(Clone, Debug)]
pub(crate) struct Labeling {
    pub code: u128,
    /// Every relabeling (vertex -> position) whose image equals `code`.
    pub perms: Vec<Perm>,
}

impl Labeling {
    /// Image of a triple under the first canonical relabeling, as a colex rank.
    pub fn image_rank(perm: &Perm, e: &Edge) -> usize {
        let mut t = [perm[e[0]] as usize, perm[e[1]] as usize, perm[e[2]] as usize];
        t.sort_unstable();
        triple_rank(t[0], t[1], t[2])
    }
}

/// Iterated colour refinement; returns colour ids in `0..k` that are
/// invariant under relabeling.
fn refine_colors(n: usize, edges: &[Edge]) -> Vec<u32> {
    let mut codeg = [[0u8; MAX_CANON_N]; MAX_CANON_N];
    let mut deg = [0u32; MAX_CANON_N];
    for &[a, b, c] in edges {
        for (x, y) in [(a, b), (a, c), (b, c)] {
            codeg[x][y] += 1;
            codeg[y][x] += 1;
        }
        deg[a] += 1;
        deg[b] += 1;
        deg[c] += 1;
    }
    let mut colors: Vec<u32> = relabel_distinct(&deg[..n].to_vec());
    let mut classes = count_distinct(&colors);
    loop {
        if classes == n {
            break;
        }
        let sigs: Vec<(u32, Vec<(u32, u32)>, Vec<(u32, u8)>)> = (0..n)
            .map(|v| {
                let mut partners: Vec<(u32, u32)> = edges
                    .iter()
                    .filter(|e| e.contains(&v))
                    .map(|e| {
                        let mut o = e.iter().filter(|&&x| x != v).map(|&x| colors[x]);
                        let (p, q) = (o.next().unwrap(), o.next().unwrap());
                        (p.min(q), p.max(q))
                    })
                    .collect();
                partners.sort_unstable();
                let mut co: Vec<(u32, u8)> = (0..n)
                    .filter(|&u| u != v && codeg[v][u] > 0)
                    .map(|u| (colors[u], codeg[v][u]))
                    .collect();
                co.sort_unstable();
                (colors[v], partners, co)
            })
            .collect();
        let next = relabel_distinct(&sigs);
        let k = count_distinct(&next);
        colors = next;
        if k == classes {
            break;
        }
        classes = k;
    }
    colors
}

fn relabel_distinct<T: Ord + Clone>(values: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort();
    sorted.dedup();
    values
        .iter()
        .map(|v| sorted.binary_search(v).unwrap() as u32)
        .collect()
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

struct LabelSearch<'a> {
    n: usize,
    total: usize,
    /// For each vertex, the other two members of its edges.
    partners: Vec<Vec<(usize, usize)>>,
    /// Vertices allowed at each position.
    cell_of_pos: Vec<&'a [usize]>,
    pos: [u8; MAX_CANON_N],
    placed: [bool; MAX_CANON_N],
    best: Option<u128>,
    perms: Vec<Perm>,
    keep_perms: bool,
    count: u64,
}

const UNPLACED: u8 = u8::MAX;

impl LabelSearch<'_> {
    fn run(&mut self, p: usize, key: u128) {
        if p == self.n {
            match self.best {
                Some(b) if key > b => {}
                Some(b) if key == b => {
                    self.count += 1;
                    if self.keep_perms {
                        self.perms.push(self.pos);
                    }
                }
                _ => {
                    self.best = Some(key);
                    self.count = 1;
                    self.perms.clear();
                    if self.keep_perms {
                        self.perms.push(self.pos);
                    }
                }
            }
            return;
        }
        let known = choose3(p + 1);
        let shift = self.total - known;
        for &v in self.cell_of_pos[p] {
            if self.placed[v] {
                continue;
            }
            let mut k = key;
            for &(x, y) in &self.partners[v] {
                let (px, py) = (self.pos[x], self.pos[y]);
                if px != UNPLACED && py != UNPLACED {
                    let (a, b) = if px < py { (px, py) } else { (py, px) };
                    k |= code_bit(self.total, triple_rank(a as usize, b as usize, p));
                }
            }
            if let Some(best) = self.best {
                // Compare the `known` leading bits.
                let (kp, bp) = if shift >= 128 {
                    (0, 0)
                } else {
                    (k >> shift, best >> shift)
                };
                if kp > bp {
                    continue;
                }
            }
            self.pos[v] = p as u8;
            self.placed[v] = true;
            self.run(p + 1, k);
            self.placed[v] = false;
            self.pos[v] = UNPLACED;
        }
    }
}

/// Computes the canonical code and (optionally) all canonical relabelings.
/// Requires `n <= MAX_CANON_N`.
pub(crate) fn canonical_labeling(n: usize, edges: &[Edge], keep_perms: bool) -> (Labeling, u64) {
    assert!(n <= MAX_CANON_N);
    let colors = refine_colors(n, edges);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (colors[v], v));
    let mut cells: Vec<&[usize]> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && colors[order[end]] == colors[order[start]] {
            end += 1;
        }
        for _ in start..end {
            cells.push(&order[start..end]);
        }
        start = end;
    }
    let mut partners = vec![Vec::new(); n];
    for &[a, b, c] in edges {
        partners[a].push((b, c));
        partners[b].push((a, c));
        partners[c].push((a, b));
    }
    let mut search = LabelSearch {
        n,
        total: choose3(n),
        partners,
        cell_of_pos: cells,
        pos: [UNPLACED; MAX_CANON_N],
        placed: [false; MAX_CANON_N],
        best: None,
        perms: Vec::new(),
        keep_perms,
        count: 0,
    };
    search.run(0, 0);
    let code = search.best.unwrap_or(0);
    (
        Labeling {
            code,
            perms: search.perms,
        },
        search.count,
    )
}

/// Canonical form with the default vertex bound.
pub fn canonical_form(h: &Hypergraph3) -> Result<CanonicalForm> {
    canonical_form_with_bound(h, DEFAULT_CANON_BOUND)
}

/// Canonical form; refuses hypergraphs with more than `bound` vertices.
pub fn canonical_form_with_bound(h: &Hypergraph3, bound: usize) -> Result<CanonicalForm> {
    check_bound("canonical form vertex count", h.n(), bound.min(MAX_CANON_N))?;
    let (lab, count) = canonical_labeling(h.n(), h.edges(), false);
    Ok(CanonicalForm {
        n: h.n(),
        code: lab.code,
        automorphisms: count,
    })
}

/// Whether a vertex bijection maps the edges of `a` onto the edges of `b`.
pub fn are_isomorphic(a: &Hypergraph3, b: &Hypergraph3) -> Result<bool> {
    check_bound("canonical form vertex count", a.n(), DEFAULT_CANON_BOUND)?;
    check_bound("canonical form vertex count", b.n(), DEFAULT_CANON_BOUND)?;
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let mut da = a.degrees();
    let mut db = b.degrees();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(false);
    }
    Ok(canonical_form(a)?.code == canonical_form(b)?.code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{complete, tight_cycle};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example9() -> Hypergraph3 {
        Hypergraph3::from_letters(7, "abc,ade,bcd,bcf,cde,def,abg,cdg,efg").unwrap()
    }

    /// Brute-force minimum over all n! relabelings of the colex-reversed code.
    fn brute_min(h: &Hypergraph3) -> (u128, u64) {
        let n = h.n();
        let total = choose3(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = u128::MAX;
        let mut count = 0;
        let mut all = Vec::new();
        permute(&mut perm, 0, &mut all);
        for p in all {
            let code = h.relabel(&p).edges().iter().fold(0u128, |k, e| {
                k | code_bit(total, triple_rank(e[0], e[1], e[2]))
            });
            if code < best {
                best = code;
                count = 1;
            } else if code == best {
                count += 1;
            }
        }
        (best, count)
    }

    fn permute(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, out);
            p.swap(k, i);
        }
    }

    #[test]
    fn invariant_under_random_relabeling() {
        let h = example9();
        let f = canonical_form(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let mut p: Vec<usize> = (0..7).collect();
            p.shuffle(&mut rng);
            assert_eq!(canonical_form(&h.relabel(&p)).unwrap(), f);
        }
        assert_eq!(f.representative().edge_count(), 9);
        assert!(are_isomorphic(&f.representative(), &h).unwrap());
    }

    #[test]
    fn automorphism_counts() {
        // The example has a mirror symmetry.
        assert_eq!(canonical_form(&example9()).unwrap().automorphisms, 2);
        assert_eq!(canonical_form(&complete(5)).unwrap().automorphisms, 120);
        assert_eq!(canonical_form(&tight_cycle(6)).unwrap().automorphisms, 12);
        assert_eq!(canonical_form(&Hypergraph3::empty(4)).unwrap().automorphisms, 24);
    }

    #[test]
    fn matches_brute_force_on_five_vertices() {
        // Not the same code as the unrestricted minimum, but the partition into
        // classes and the automorphism counts must agree.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        use rand::Rng;
        for _ in 0..200 {
            let mask: u128 = rng.gen::<u16>() as u128 & ((1 << 10) - 1);
            let h = Hypergraph3::from_mask(5, mask);
            let f = canonical_form(&h).unwrap();
            let (_, count) = brute_min(&h);
            assert_eq!(f.automorphisms, count, "{h:?}");
        }
    }

    #[test]
    fn distinguishes_edge_counts_and_bounds() {
        let a = Hypergraph3::from_edges(5, [[0, 1, 2]]).unwrap();
        let b = Hypergraph3::from_edges(5, [[0, 1, 2], [0, 1, 3]]).unwrap();
        assert_ne!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        assert!(!are_isomorphic(&a, &b).unwrap());
        assert!(are_isomorphic(&a, &a).unwrap());
        assert!(canonical_form(&Hypergraph3::empty(11)).is_err());
    }

    #[test]
    fn code_round_trips_to_mask() {
        let f = canonical_form(&example9()).unwrap();
        let rep = Hypergraph3::from_mask(7, code_to_mask(7, f.code));
        assert_eq!(canonical_form(&rep).unwrap().code, f.code);
    }
}
