//! Palettes: coloured pair patterns generalising the vanishing construction.
//!
//! A palette lists colour triples `(left, top, right)`. A hypergraph embeds in
//! a palette if some vertex ordering and colouring of its covered pairs sends
//! every edge to an allowed triple. Random hosts built from a palette contain
//! only hypergraphs that embed in it.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_bound, Result, TuranError};
use crate::hypergraph::{choose2, pair_index, Edge, Hypergraph3};
use crate::orderings::{edge_roles, parse_pair_key, Role, VertexOrder};
use crate::rational::{format_rational, parse_rational, ratio};

pub const DEFAULT_PALETTE_VERTEX_BOUND: usize = 12;
pub const MAX_PALETTE_COLORS: usize = 4;

/// Colour names with the allowed `(left, top, right)` triples, stored as
/// indices into `colors`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<String>,
    allowed: Vec<[usize; 3]>,
}

impl Palette {
    pub fn new(colors: Vec<String>, allowed: Vec<[usize; 3]>) -> Result<Self> {
        if colors.is_empty() {
            return Err(TuranError::Invalid("palette needs at least one colour".into()));
        }
        let mut sorted = colors.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != colors.len() {
            return Err(TuranError::Invalid("duplicate colour name".into()));
        }
        if allowed.iter().flatten().any(|&c| c >= colors.len()) {
            return Err(TuranError::Invalid("allowed triple uses an unknown colour".into()));
        }
        let mut allowed = allowed;
        allowed.sort_unstable();
        allowed.dedup();
        Ok(Self { colors, allowed })
    }

    /// Builds a palette from colour names.
    pub fn from_names(colors: &[&str], allowed: &[[&str; 3]]) -> Result<Self> {
        let colors: Vec<String> = colors.iter().map(|s| s.to_string()).collect();
        let idx = |name: &str| {
            colors
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| TuranError::Invalid(format!("unknown colour {name:?}")))
        };
        let allowed = allowed
            .iter()
            .map(|t| Ok([idx(t[0])?, idx(t[1])?, idx(t[2])?]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(colors, allowed)
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn allowed(&self) -> &[[usize; 3]] {
        &self.allowed
    }

    pub fn color_index(&self, name: &str) -> Option<usize> {
        self.colors.iter().position(|c| c == name)
    }

    pub fn allows(&self, t: [usize; 3]) -> bool {
        self.allowed.contains(&t)
    }
}

/// Probability of each colour, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorDistribution(BTreeMap<String, BigRational>);

impl ColorDistribution {
    pub fn new(probs: BTreeMap<String, BigRational>) -> Result<Self> {
        if probs.values().any(|p| *p < BigRational::zero()) {
            return Err(TuranError::Invalid("negative probability".into()));
        }
        let total: BigRational = probs.values().cloned().sum();
        if !total.is_one() {
            return Err(TuranError::Invalid(format!(
                "probabilities sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform(colors: &[String]) -> Self {
        let p = ratio(1, colors.len() as u64);
        Self(colors.iter().map(|c| (c.clone(), p.clone())).collect())
    }

    pub fn get(&self, color: &str) -> Option<&BigRational> {
        self.0.get(color)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigRational)> {
        self.0.iter()
    }

    /// Whether the distribution is over exactly the palette's colours.
    pub fn matches(&self, p: &Palette) -> bool {
        self.0.len() == p.colors.len() && p.colors.iter().all(|c| self.0.contains_key(c))
    }
}

/// Limiting edge density of the random host built from `p` and `dist`:
/// the sum over allowed triples of the product of the three colour
/// probabilities.
pub fn palette_density(p: &Palette, dist: &ColorDistribution) -> Result<BigRational> {
    if !dist.matches(p) {
        return Err(TuranError::Invalid(
            "distribution does not cover exactly the palette colours".into(),
        ));
    }
    let prob = |i: usize| dist.get(&p.colors[i]).cloned().unwrap();
    Ok(p.allowed
        .iter()
        .map(|&[l, t, r]| prob(l) * prob(t) * prob(r))
        .sum())
}

/// A palette together with its colour distribution, as stored in palette files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaletteSpec {
    pub name: String,
    pub palette: Palette,
    pub dist: ColorDistribution,
}

impl PaletteSpec {
    pub fn density(&self) -> BigRational {
        palette_density(&self.palette, &self.dist).expect("spec is validated on construction")
    }

    /// Parses `{"colors": [...], "allowed": [[l, t, r], ...], "probs": {"c": "p/q"}}`.
    pub fn from_json(name: &str, text: &str) -> Result<Self> {
        let raw: PaletteFile =
            serde_json::from_str(text).map_err(|e| TuranError::Invalid(e.to_string()))?;
        let colors: Vec<&str> = raw.colors.iter().map(String::as_str).collect();
        let allowed: Vec<[&str; 3]> = raw
            .allowed
            .iter()
            .map(|t| [t[0].as_str(), t[1].as_str(), t[2].as_str()])
            .collect();
        let palette = Palette::from_names(&colors, &allowed)?;
        let probs = raw
            .probs
            .iter()
            .map(|(c, p)| Ok((c.clone(), parse_rational(p)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let dist = ColorDistribution::new(probs)?;
        if !dist.matches(&palette) {
            return Err(TuranError::Invalid(
                "probs must name exactly the palette colours".into(),
            ));
        }
        Ok(Self {
            name: name.to_string(),
            palette,
            dist,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let c = &self.palette.colors;
        serde_json::json!({
            "colors": c,
            "allowed": self.palette.allowed.iter()
                .map(|t| [c[t[0]].clone(), c[t[1]].clone(), c[t[2]].clone()])
                .collect::<Vec<_>>(),
            "probs": self.dist.iter()
                .map(|(k, v)| (k.clone(), format_rational(v)))
                .collect::<BTreeMap<_, _>>(),
        })
    }
}

#[derive(Deserialize)]
struct PaletteFile {
    colors: Vec<String>,
    allowed: Vec<[String; 3]>,
    probs: BTreeMap<String, String>,
}

/// The vanishing palette (uniform over A, B, C) and the two red/blue
/// palettes with red = 2/3, blue = 1/3.
pub fn builtin_palettes() -> Vec<PaletteSpec> {
    let two_color = |name: &str, triple: [&str; 3]| {
        let palette = Palette::from_names(&["red", "blue"], &[triple]).unwrap();
        let dist = ColorDistribution::new(BTreeMap::from([
            ("red".to_string(), ratio(2, 3)),
            ("blue".to_string(), ratio(1, 3)),
        ]))
        .unwrap();
        PaletteSpec {
            name: name.to_string(),
            palette,
            dist,
        }
    };
    let vanishing = Palette::from_names(&["A", "B", "C"], &[["A", "B", "C"]]).unwrap();
    let dist = ColorDistribution::uniform(vanishing.colors());
    vec![
        PaletteSpec {
            name: "vanishing".into(),
            palette: vanishing,
            dist,
        },
        // left and right red, top blue
        two_color("four27_a", ["red", "blue", "red"]),
        // left and top red, right blue
        two_color("four27_b", ["red", "red", "blue"]),
    ]
}

pub fn builtin_palette(name: &str) -> Option<PaletteSpec> {
    builtin_palettes().into_iter().find(|p| p.name == name)
}

/// Ordering plus a colouring of the covered pairs witnessing that a
/// hypergraph embeds in a palette.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaletteEmbedding {
    pub ordering: VertexOrder,
    pub coloring: BTreeMap<(usize, usize), String>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    ordering: VertexOrder,
    coloring: BTreeMap<String, String>,
}

impl Serialize for PaletteEmbedding {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EmbeddingJson {
            ordering: self.ordering.clone(),
            coloring: self
                .coloring
                .iter()
                .map(|(&(a, b), c)| (format!("{a},{b}"), c.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PaletteEmbedding {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = EmbeddingJson::deserialize(d)?;
        let coloring = raw
            .coloring
            .into_iter()
            .map(|(k, c)| parse_pair_key(&k).map(|p| (p, c)))
            .collect::<std::result::Result<_, _>>()
            .map_err(D::Error::custom)?;
        Ok(Self {
            ordering: raw.ordering,
            coloring,
        })
    }
}

const UNSET: u8 = u8::MAX;
const NONE: usize = usize::MAX;

struct EmbedSearch<'a> {
    n: usize,
    palette: &'a Palette,
    incident: Vec<Vec<(usize, usize)>>,
    color: Vec<u8>,
    trail: Vec<usize>,
    pos: Vec<usize>,
    order: Vec<usize>,
    free: Vec<bool>,
}

impl EmbedSearch<'_> {
    fn set(&mut self, pair: usize, c: u8) -> bool {
        match self.color[pair] {
            UNSET => {
                self.color[pair] = c;
                self.trail.push(pair);
                true
            }
            old => old == c,
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let p = self.trail.pop().unwrap();
            self.color[p] = UNSET;
        }
    }

    /// Colours the `(left, top, right)` pair triples in `pending[k..]`, then
    /// continues with the next vertex.
    fn color_pending(&mut self, pending: &[[usize; 3]], k: usize) -> bool {
        if k == pending.len() {
            return self.dfs();
        }
        let pairs = pending[k];
        for t in 0..self.palette.allowed.len() {
            let triple = self.palette.allowed[t];
            let mark = self.trail.len();
            if (0..3).all(|i| self.set(pairs[i], triple[i] as u8))
                && self.color_pending(pending, k + 1)
            {
                return true;
            }
            self.undo(mark);
        }
        false
    }

    fn dfs(&mut self) -> bool {
        if self.order.len() == self.n {
            return true;
        }
        for v in 0..self.n {
            if self.pos[v] != NONE {
                continue;
            }
            self.pos[v] = self.order.len();
            self.order.push(v);
            // Edges whose order becomes known: exactly one partner placed.
            let pending: Vec<[usize; 3]> = self.incident[v]
                .iter()
                .filter_map(|&(x, y)| match (self.pos[x] != NONE, self.pos[y] != NONE) {
                    (true, false) => Some((x, y)),
                    (false, true) => Some((y, x)),
                    _ => None,
                })
                .map(|(first, last)| {
                    [
                        pair_index(first, v),
                        pair_index(first, last),
                        pair_index(v, last),
                    ]
                })
                .collect();
            let ok = self.color_pending(&pending, 0);
            if ok {
                return true;
            }
            self.order.pop();
            self.pos[v] = NONE;
            if self.free[v] {
                return false;
            }
        }
        false
    }
}

/// Exhaustive search for an embedding; `None` means the palette avoids `h`.
pub fn find_palette_embedding(h: &Hypergraph3, p: &Palette) -> Result<Option<PaletteEmbedding>> {
    check_bound("palette search vertex count", h.n(), DEFAULT_PALETTE_VERTEX_BOUND)?;
    check_bound("palette colour count", p.colors.len(), MAX_PALETTE_COLORS)?;
    Ok(embed_unbounded(h, p))
}

pub(crate) fn embed_unbounded(h: &Hypergraph3, p: &Palette) -> Option<PaletteEmbedding> {
    let n = h.n();
    let mut incident = vec![Vec::new(); n];
    for &[a, b, c] in h.edges() {
        incident[a].push((b, c));
        incident[b].push((a, c));
        incident[c].push((a, b));
    }
    let free = incident.iter().map(Vec::is_empty).collect();
    let mut s = EmbedSearch {
        n,
        palette: p,
        incident,
        color: vec![UNSET; choose2(n)],
        trail: Vec::new(),
        pos: vec![NONE; n],
        order: Vec::with_capacity(n),
        free,
    };
    if !s.dfs() {
        return None;
    }
    let coloring = h
        .covered_pairs()
        .into_iter()
        .map(|(a, b)| {
            let c = s.color[pair_index(a, b)];
            ((a, b), p.colors[c as usize].clone())
        })
        .collect();
    Some(PaletteEmbedding {
        ordering: VertexOrder::from_unchecked(s.order),
        coloring,
    })
}

/// Checks every edge's `(left, top, right)` colours against the palette.
pub fn verify_palette_embedding(h: &Hypergraph3, p: &Palette, emb: &PaletteEmbedding) -> bool {
    if !emb.ordering.is_permutation_of(h.n()) {
        return false;
    }
    if emb
        .coloring
        .iter()
        .any(|(&(a, b), c)| a >= b || b >= h.n() || p.color_index(c).is_none())
    {
        return false;
    }
    let pos = emb.ordering.positions();
    h.edges().iter().all(|e: &Edge| {
        let roles = edge_roles(e, &pos);
        let mut t = [0usize; 3];
        for (pair, role) in roles {
            let slot = match role {
                Role::Left => 0,
                Role::Top => 1,
                Role::Right => 2,
            };
            match emb.coloring.get(&pair).and_then(|c| p.color_index(c)) {
                Some(i) => t[slot] = i,
                None => return false,
            }
        }
        p.allows(t)
    })
}
