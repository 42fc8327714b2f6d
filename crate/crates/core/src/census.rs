//! Isomorph-free enumeration by canonical augmentation, and the census of
//! minimal non-vanishing 3-graphs on a fixed number of labeled vertices.
//!
//! Adding edges never creates a vanishing ordering, so the minimal
//! non-vanishing graphs are exactly the non-vanishing one-edge extensions of
//! vanishing graphs whose every single-edge deletion vanishes. The census
//! therefore only grows vanishing graphs.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canon::{canonical_labeling, code_to_mask, CanonicalForm, Labeling, MAX_CANON_N};
use crate::certify::{certify_uniform_turan_1_27, TuranCertificate};
use crate::error::{check_bound, Result, TuranError};
use crate::hypergraph::{choose3, unrank_triple, Edge, Hypergraph3};
use crate::orderings::is_vanishing_edges;
use crate::palette::{builtin_palette, find_palette_embedding};

/// Vertex bound of the full minimal census.
pub const MAX_CENSUS_N: usize = 7;

/// Default depth (edge count) at which the augmentation tree is cut into tasks.
pub const DEFAULT_SPLIT_DEPTH: usize = 4;

/// The palettes used to show that uncertified graphs have density above 1/27.
pub const AVOIDING_PALETTES: [&str; 2] = ["four27_a", "four27_b"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Node {
    pub mask: u128,
    pub code: u128,
}

pub(crate) fn mask_edges(mask: u128) -> Vec<Edge> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let r = m.trailing_zeros() as usize;
        m &= m - 1;
        out.push(unrank_triple(r));
    }
    out
}

fn root(n: usize) -> Node {
    let (lab, _) = canonical_labeling(n, &[], false);
    Node {
        mask: 0,
        code: lab.code,
    }
}

fn representative(n: usize, code: u128) -> Hypergraph3 {
    Hypergraph3::from_mask(n, code_to_mask(n, code))
}

/// Accepted one-edge extensions of `node`: each child class is produced by
/// exactly one parent class, and only once per parent.
pub(crate) fn children(n: usize, node: &Node) -> Vec<Node> {
    let total = choose3(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in 0..total {
        if node.mask >> r & 1 == 1 {
            continue;
        }
        let mask = node.mask | 1u128 << r;
        let edges = mask_edges(mask);
        let (lab, _) = canonical_labeling(n, &edges, true);
        if !is_canonical_extension(&lab, &edges, &unrank_triple(r)) {
            continue;
        }
        if seen.insert(lab.code) {
            out.push(Node {
                mask,
                code: lab.code,
            });
        }
    }
    out
}

/// Whether `added` lies in the automorphism orbit of the canonical deletion
/// edge (the edge whose canonical image has the smallest colex rank).
fn is_canonical_extension(lab: &Labeling, edges: &[Edge], added: &Edge) -> bool {
    let first = &lab.perms[0];
    let target = edges
        .iter()
        .map(|e| Labeling::image_rank(first, e))
        .min()
        .expect("extension has an edge");
    lab.perms
        .iter()
        .any(|p| Labeling::image_rank(p, added) == target)
}

/// Position in the preorder walk: `path[d]` is the number of children of the
/// depth-`d` node already visited.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumCursor {
    pub started: bool,
    pub path: Vec<usize>,
}

struct Frame {
    children: Vec<Node>,
    next: usize,
}

/// Preorder stream of canonical representatives, one per class with at most
/// `max_edges` edges.
pub struct Enumeration {
    n: usize,
    max_edges: usize,
    started: bool,
    stack: Vec<Frame>,
}

impl Enumeration {
    pub fn cursor(&self) -> EnumCursor {
        EnumCursor {
            started: self.started,
            path: self.stack.iter().map(|f| f.next).collect(),
        }
    }

}

impl Iterator for Enumeration {
    type Item = Hypergraph3;

    fn next(&mut self) -> Option<Hypergraph3> {
        if !self.started {
            self.started = true;
            let r = root(self.n);
            if self.max_edges > 0 {
                self.stack.push(Frame {
                    children: children(self.n, &r),
                    next: 0,
                });
            }
            return Some(representative(self.n, r.code));
        }
        loop {
            let top = self.stack.last_mut()?;
            if top.next == top.children.len() {
                self.stack.pop();
                continue;
            }
            let c = top.children[top.next];
            top.next += 1;
            if (c.mask.count_ones() as usize) < self.max_edges {
                let children = children(self.n, &c);
                self.stack.push(Frame { children, next: 0 });
            }
            return Some(representative(self.n, c.code));
        }
    }
}

fn check_enumeration(n: usize, max_edges: usize) -> Result<()> {
    check_bound("enumeration vertex count", n, MAX_CANON_N)?;
    check_bound("enumeration edge count", max_edges, choose3(n))
}

/// All isomorphism classes on `n` vertices with at most `max_edges` edges.
pub fn enumerate_nonisomorphic(n: usize, max_edges: usize) -> Result<Enumeration> {
    check_enumeration(n, max_edges)?;
    Ok(Enumeration {
        n,
        max_edges,
        started: false,
        stack: Vec::new(),
    })
}

/// Restarts an enumeration at a cursor taken from a run with the same
/// parameters.
pub fn resume_enumeration(n: usize, max_edges: usize, cursor: &EnumCursor) -> Result<Enumeration> {
    let mut e = enumerate_nonisomorphic(n, max_edges)?;
    if !cursor.started {
        return Ok(e);
    }
    e.started = true;
    let mut node = root(n);
    for (d, &next) in cursor.path.iter().enumerate() {
        if node.mask.count_ones() as usize >= max_edges {
            return Err(TuranError::Checkpoint("cursor deeper than the edge bound".into()));
        }
        let children = children(n, &node);
        if next > children.len() || (d + 1 < cursor.path.len() && next == 0) {
            return Err(TuranError::Checkpoint("cursor does not match this enumeration".into()));
        }
        if d + 1 < cursor.path.len() {
            node = children[next - 1];
        }
        e.stack.push(Frame { children, next });
    }
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bucket {
    #[serde(rename = "CERTIFIED_1_27")]
    Certified,
    #[serde(rename = "PALETTE_AVOIDED")]
    PaletteAvoided,
    #[serde(rename = "UNRESOLVED")]
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub canonical: CanonicalForm,
    pub representative: Hypergraph3,
    pub vanishing: bool,
    pub minimal: bool,
    pub isolated_vertex_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turan_certified: Option<TuranCertificate>,
    /// Palette name -> whether the graph embeds in it.
    #[serde(default)]
    pub palette_avoidance: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bucket: Option<Bucket>,
}

impl CensusRecord {
    /// Builds a record for the class of `h`, checking vanishing and
    /// single-edge minimality with the ordering search.
    pub fn new(h: &Hypergraph3) -> Result<Self> {
        let canonical = crate::canon::canonical_form(h)?;
        let rep = canonical.representative();
        let vanishing = is_vanishing_edges(rep.n(), rep.edges());
        let minimal = !vanishing
            && rep.edges().iter().all(|e| {
                let rest: Vec<Edge> = rep.edges().iter().filter(|f| *f != e).copied().collect();
                is_vanishing_edges(rep.n(), &rest)
            });
        Ok(Self {
            canonical,
            isolated_vertex_count: rep.isolated_count(),
            representative: rep,
            vanishing,
            minimal,
            turan_certified: None,
            palette_avoidance: BTreeMap::new(),
            bucket: None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub minimal: usize,
    pub certified: usize,
    pub palette_avoided: usize,
    pub unresolved: usize,
    pub isolated: usize,
}

impl std::fmt::Display for CensusSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} minimal, {} certified, {} avoided, {} with isolated vertices",
            self.minimal, self.certified, self.palette_avoided, self.isolated
        )?;
        if self.unresolved > 0 {
            write!(f, ", {} UNRESOLVED", self.unresolved)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub n: usize,
    pub split_depth: usize,
    pub complete: bool,
    pub tasks_total: usize,
    pub tasks_done: usize,
    pub records: Vec<CensusRecord>,
}

impl Catalog {
    pub fn summary(&self) -> CensusSummary {
        let mut s = CensusSummary {
            minimal: self.records.iter().filter(|r| r.minimal).count(),
            isolated: self.records.iter().filter(|r| r.isolated_vertex_count > 0).count(),
            ..Default::default()
        };
        for r in &self.records {
            match r.bucket {
                Some(Bucket::Certified) => s.certified += 1,
                Some(Bucket::PaletteAvoided) => s.palette_avoided += 1,
                Some(Bucket::Unresolved) => s.unresolved += 1,
                None => {}
            }
        }
        s
    }

    /// One hypergraph-format block per record.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.records.iter().enumerate() {
            out.push_str(&format!("# record {i} code {}", r.canonical.code_hex()));
            if let Some(b) = r.bucket {
                out.push_str(&format!(" {}", serde_json::to_value(b).unwrap().as_str().unwrap()));
            }
            out.push('\n');
            out.push_str(&r.representative.to_text());
            out.push_str("\n\n");
        }
        out
    }

    /// SHA-256 of the JSON serialization of the records.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&self.records).expect("records serialize");
        hex::encode(Sha256::digest(bytes))
    }
}

/// Runtime knobs of a census run.
#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub jobs: Option<usize>,
    pub split_depth: usize,
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
    /// Stop after this many newly finished tasks (the catalog is then marked
    /// incomplete). Used to simulate interruptions.
    pub max_new_tasks: Option<usize>,
    /// Report task progress on stderr.
    pub progress: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            jobs: None,
            split_depth: DEFAULT_SPLIT_DEPTH,
            checkpoint: None,
            resume: false,
            max_new_tasks: None,
            progress: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    n: usize,
    split_depth: usize,
    /// Digest of the task frontier, so a checkpoint cannot be replayed
    /// against a different tree.
    frontier: String,
    /// Finished task code -> masks of the minimal graphs found below it.
    done: BTreeMap<String, Vec<String>>,
    nodes: u64,
}

fn is_minimal_extension(n: usize, edges: &[Edge]) -> bool {
    edges.iter().all(|f| {
        let rest: Vec<Edge> = edges.iter().filter(|g| *g != f).copied().collect();
        is_vanishing_edges(n, &rest)
    })
}

/// Walks the vanishing subtree below `node`, collecting minimal
/// non-vanishing children.
fn explore(n: usize, node: &Node, found: &mut Vec<Node>, nodes: &mut u64) {
    *nodes += 1;
    for c in children(n, node) {
        let edges = mask_edges(c.mask);
        if is_vanishing_edges(n, &edges) {
            explore(n, &c, found, nodes);
        } else if is_minimal_extension(n, &edges) {
            found.push(c);
        }
    }
}

/// Expands the vanishing tree level by level down to `depth`, returning the
/// task frontier and the minimal graphs met on the way.
fn frontier(n: usize, depth: usize) -> (Vec<Node>, Vec<Node>) {
    let mut level = vec![root(n)];
    let mut found = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for node in &level {
            for c in children(n, node) {
                let edges = mask_edges(c.mask);
                if is_vanishing_edges(n, &edges) {
                    next.push(c);
                } else if is_minimal_extension(n, &edges) {
                    found.push(c);
                }
            }
        }
        if next.is_empty() {
            return (next, found);
        }
        level = next;
    }
    (level, found)
}

fn frontier_digest(tasks: &[Node]) -> String {
    let mut h = Sha256::new();
    for t in tasks {
        h.update(t.code.to_be_bytes());
    }
    hex::encode(h.finalize())
}

fn write_checkpoint(path: &PathBuf, cp: &Checkpoint) -> Result<()> {
    let text = serde_json::to_string_pretty(cp).expect("checkpoint serializes");
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| TuranError::Checkpoint(format!("{}: {e}", path.display())))
}

fn parse_hex(s: &str) -> Result<u128> {
    u128::from_str_radix(s, 16).map_err(|_| TuranError::Checkpoint(format!("bad mask {s:?}")))
}

/// All minimal non-vanishing classes on exactly `n` vertices (isolated
/// vertices allowed). Records are unclassified.
pub fn find_minimal_nonvanishing(n: usize) -> Result<Catalog> {
    check_bound("census vertex count", n, MAX_CENSUS_N)?;
    run_census(n, &CensusOptions::default())
}

/// The census with explicit options; accepts up to 10 vertices.
pub fn run_census(n: usize, opts: &CensusOptions) -> Result<Catalog> {
    check_bound("census vertex count", n, MAX_CANON_N)?;
    let (tasks, mut found) = frontier(n, opts.split_depth);
    let fdigest = frontier_digest(&tasks);
    let mut cp = Checkpoint {
        n,
        split_depth: opts.split_depth,
        frontier: fdigest.clone(),
        done: BTreeMap::new(),
        nodes: 0,
    };
    if opts.resume {
        let path = opts
            .checkpoint
            .as_ref()
            .ok_or_else(|| TuranError::Checkpoint("resume requested without a checkpoint path".into()))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| TuranError::Checkpoint(format!("{}: {e}", path.display())))?;
        let old: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| TuranError::Checkpoint(format!("{}: {e}", path.display())))?;
        if old.n != n || old.split_depth != opts.split_depth || old.frontier != fdigest {
            return Err(TuranError::Checkpoint(format!(
                "checkpoint was written for n = {}, split depth {}; refusing to resume n = {n}, split depth {}",
                old.n, old.split_depth, opts.split_depth
            )));
        }
        cp = old;
    }

    let pending: Vec<&Node> = tasks
        .iter()
        .filter(|t| !cp.done.contains_key(&format!("{:032x}", t.code)))
        .take(opts.max_new_tasks.unwrap_or(usize::MAX))
        .collect();
    let total = tasks.len();
    let state = Mutex::new(cp);
    let work = || -> Result<()> {
        pending.par_iter().try_for_each(|t| {
            let mut out = Vec::new();
            let mut nodes = 0;
            explore(n, t, &mut out, &mut nodes);
            let mut cp = state.lock().expect("checkpoint lock");
            cp.nodes += nodes;
            cp.done.insert(
                format!("{:032x}", t.code),
                out.iter().map(|c| format!("{:032x}", c.mask)).collect(),
            );
            if opts.progress {
                eprintln!("census n={n}: {}/{total} tasks", cp.done.len());
            }
            match &opts.checkpoint {
                Some(path) => write_checkpoint(path, &cp),
                None => Ok(()),
            }
        })
    };
    match opts.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| TuranError::Invalid(e.to_string()))?
            .install(work)?,
        None => work()?,
    }
    let cp = state.into_inner().expect("checkpoint lock");

    for masks in cp.done.values() {
        for m in masks {
            let mask = parse_hex(m)?;
            let (lab, _) = canonical_labeling(n, &mask_edges(mask), false);
            found.push(Node { mask, code: lab.code });
        }
    }
    let mut by_code: BTreeMap<u128, Node> = BTreeMap::new();
    for f in found {
        by_code.entry(f.code).or_insert(f);
    }
    let mut records = by_code
        .values()
        .map(|f| CensusRecord::new(&Hypergraph3::from_mask(n, f.mask)))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.representative.edge_count(), r.canonical.code));
    Ok(Catalog {
        n,
        split_depth: opts.split_depth,
        complete: cp.done.len() == total,
        tasks_total: total,
        tasks_done: cp.done.len(),
        records,
    })
}

/// Certifies each record and tests it against the two 4/27 palettes, then
/// sorts it into exactly one bucket.
pub fn classify_catalog(mut cat: Catalog) -> Catalog {
    cat.records.par_iter_mut().for_each(classify_record);
    cat
}

fn classify_record(r: &mut CensusRecord) {
    let h = &r.representative;
    r.turan_certified = certify_uniform_turan_1_27(h)
        .ok()
        .and_then(|rep| rep.certificate);
    r.palette_avoidance = AVOIDING_PALETTES
        .iter()
        .map(|name| {
            let spec = builtin_palette(name).expect("builtin palette");
            let embeds = find_palette_embedding(h, &spec.palette)
                .map(|e| e.is_some())
                .unwrap_or(true);
            (name.to_string(), embeds)
        })
        .collect();
    r.bucket = Some(if !r.minimal {
        Bucket::Unresolved
    } else if r.turan_certified.is_some() {
        Bucket::Certified
    } else if r.palette_avoidance.values().any(|&embeds| !embeds) {
        Bucket::PaletteAvoided
    } else {
        Bucket::Unresolved
    });
}

/// The nine certified 7-vertex graphs as printed (`a..g` as `0..6`), in
/// their printed order.
pub fn paper_catalog_seven() -> Vec<Hypergraph3> {
    [
        "abc,abd,abe,acf,acg,bdf,bdg,cef,deg",
        "abc,abd,abe,acf,acg,bdf,cdg,cef,efg",
        "abc,abd,abe,acf,adg,bdf,cef,efg",
        "abc,abd,abe,acf,aeg,bdf,bfg,cde,cdg,cef",
        "abc,abd,abe,acf,bcg,bdf,cde,ceg,efg",
        "abc,abd,ace,adg,bcf,bde,bfg,cdf,ceg",
        "abc,abd,ace,aef,afg,bcf,bde,beg,cdf,cdg",
        "abc,abd,ace,afg,bcf,bde,bfg,def",
        "abc,abd,ace,bde,bfg,cdf,ceg,cfg",
    ]
    .iter()
    .map(|s| Hypergraph3::from_letters(7, s).expect("catalog line"))
    .collect()
}
