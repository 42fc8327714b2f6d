//! Random palette hosts and density measurements on them.
//!
//! Randomness is ChaCha8 seeded from a `u64`. Sampled measurements draw
//! trial `t` from its own stream `t` of the master seed, so trials can run
//! in any order or in parallel without changing results.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_bound, Result, TuranError};
use crate::hypergraph::{choose3, Hypergraph3};
use crate::palette::PaletteSpec;
use crate::rational::{format_rational, ratio};

/// Name of the generator recorded in transcripts.
pub const RNG_NAME: &str = "ChaCha8Rng/seed_from_u64";

/// Exact measurements enumerate all vertex subsets.
pub const EXACT_MEASURE_BOUND: usize = 20;

/// Transcript of a palette host: every pair colour plus the resulting edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostSample {
    pub hypergraph: Hypergraph3,
    pub palette: String,
    pub seed: u64,
    pub pair_colors: BTreeMap<(usize, usize), String>,
}

#[derive(Serialize, Deserialize)]
struct Transcript {
    seed: u64,
    rng: String,
    palette: String,
    n: usize,
    pair_colors: BTreeMap<String, String>,
}

impl HostSample {
    /// `{"seed", "rng", "palette", "n", "pair_colors": {"i,j": colour}}`.
    pub fn transcript_json(&self) -> serde_json::Value {
        let t = Transcript {
            seed: self.seed,
            rng: RNG_NAME.into(),
            palette: self.palette.clone(),
            n: self.hypergraph.n(),
            pair_colors: self
                .pair_colors
                .iter()
                .map(|(&(i, j), c)| (format!("{i},{j}"), c.clone()))
                .collect(),
        };
        serde_json::to_value(t).expect("transcript serializes")
    }

    /// Whether the edges are exactly the triples whose pair colours form an
    /// allowed triple of `spec` under the natural order.
    pub fn is_consistent(&self, spec: &PaletteSpec) -> bool {
        let n = self.hypergraph.n();
        let color = |i: usize, j: usize| {
            self.pair_colors
                .get(&(i, j))
                .and_then(|c| spec.palette.color_index(c))
        };
        for i in 0..n {
            for j in i + 1..n {
                if color(i, j).is_none() {
                    return false;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t = [color(i, j).unwrap(), color(i, k).unwrap(), color(j, k).unwrap()];
                    if spec.palette.allows(t) != self.hypergraph.has_edge(i, j, k) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Colours each pair independently by the exact distribution and keeps the
/// triples `i < j < k` whose `(ij, ik, jk)` colours are allowed.
pub fn sample_palette_host(n: usize, spec: &PaletteSpec, seed: u64) -> Result<HostSample> {
    if !spec.dist.matches(&spec.palette) {
        return Err(TuranError::Invalid("distribution does not match the palette".into()));
    }
    // Draw integers below the common denominator: exact probabilities.
    let colors = spec.palette.colors();
    let probs: Vec<&BigRational> = colors.iter().map(|c| spec.dist.get(c).unwrap()).collect();
    let den = probs
        .iter()
        .fold(BigInt::from(1), |acc, p| acc.lcm(p.denom()));
    let den_u = den
        .to_u64()
        .ok_or_else(|| TuranError::Invalid("probability denominators too large".into()))?;
    let mut cum = Vec::with_capacity(colors.len());
    let mut acc = 0u64;
    for p in &probs {
        acc += (p.numer() * (&den / p.denom())).to_u64().expect("below denominator");
        cum.push(acc);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![vec![0usize; n]; n];
    let mut pair_colors = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let x = rng.gen_range(0..den_u);
            let c = cum.iter().position(|&b| x < b).expect("cumulative reaches denominator");
            idx[i][j] = c;
            pair_colors.insert((i, j), colors[c].clone());
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if spec.palette.allows([idx[i][j], idx[i][k], idx[j][k]]) {
                    edges.push([i, j, k]);
                }
            }
        }
    }
    Ok(HostSample {
        hypergraph: Hypergraph3::from_edges(n, edges)?,
        palette: spec.name.clone(),
        seed,
        pair_colors,
    })
}

/// Overall edge density `m / C(n, 3)`.
pub fn edge_density(h: &Hypergraph3) -> BigRational {
    let t = choose3(h.n());
    if t == 0 {
        return BigRational::zero();
    }
    ratio(h.edge_count() as u64, t as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum MeasureMode {
    Exact,
    Sampled { trials: usize, seed: u64 },
}

/// A density value with the mode that produced it. Sampled values are upper
/// bounds on the true minimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub mode: MeasureMode,
    #[serde(with = "crate::rational::serde_ratio")]
    pub value: BigRational,
    pub upper_bound_only: bool,
    pub subset_size: usize,
    /// A subset attaining `value`; empty when no subset qualifies.
    pub witness: Vec<usize>,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn induced_edges(h: &Hypergraph3, members: &[bool]) -> usize {
    h.edges()
        .iter()
        .filter(|e| members[e[0]] && members[e[1]] && members[e[2]])
        .count()
}

/// Edge counts induced by every vertex subset, indexed by bit mask.
fn subset_edge_counts(h: &Hypergraph3) -> Vec<u32> {
    let n = h.n();
    let mut at: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &[a, b, c] in h.edges() {
        // Attribute each edge to its largest vertex.
        at[c].push((a, b));
    }
    let mut counts = vec![0u32; 1 << n];
    for mask in 1usize..1 << n {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let added = at[top]
            .iter()
            .filter(|&&(a, b)| rest >> a & 1 == 1 && rest >> b & 1 == 1)
            .count() as u32;
        counts[mask] = counts[rest] + added;
    }
    counts
}

fn mask_members(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Smallest admissible subset size: `max(ceil(eps * n), 3)`.
fn min_subset_size(n: usize, eps: &BigRational) -> usize {
    let x = eps * BigRational::from(BigInt::from(n));
    x.ceil().to_integer().to_usize().unwrap_or(usize::MAX).max(3)
}

/// Minimum density of an induced subhypergraph on at least `eps * n` (and at
/// least 3) vertices. Zero if no subset is large enough.
pub fn epsilon_linear_density(h: &Hypergraph3, eps: &BigRational, mode: MeasureMode) -> Result<DensityEstimate> {
    let n = h.n();
    let s = min_subset_size(n, eps);
    let none = |mode| DensityEstimate {
        mode,
        value: BigRational::zero(),
        upper_bound_only: false,
        subset_size: s,
        witness: Vec::new(),
    };
    match mode {
        MeasureMode::Exact => {
            check_bound("exact measurement vertex count", n, EXACT_MEASURE_BOUND)?;
            if s > n {
                return Ok(none(mode));
            }
            let counts = subset_edge_counts(h);
            let mut best: Option<(BigRational, usize)> = None;
            for (mask, &c) in counts.iter().enumerate() {
                let k = mask.count_ones() as usize;
                if k < s {
                    continue;
                }
                let d = ratio(c as u64, choose3(k) as u64);
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, mask));
                }
            }
            let (value, mask) = best.expect("a subset qualifies");
            Ok(DensityEstimate {
                mode,
                value,
                upper_bound_only: false,
                subset_size: s,
                witness: mask_members(mask),
            })
        }
        MeasureMode::Sampled { trials, seed } => {
            if s > n || trials == 0 {
                return Ok(none(mode));
            }
            let results: Vec<(usize, Vec<usize>)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, t);
                    let mut w = sample(&mut rng, n, s).into_vec();
                    w.sort_unstable();
                    let mut members = vec![false; n];
                    for &v in &w {
                        members[v] = true;
                    }
                    (induced_edges(h, &members), w)
                })
                .collect();
            let (count, witness) = results
                .into_iter()
                .min_by_key(|(c, _)| *c)
                .expect("at least one trial");
            Ok(DensityEstimate {
                mode,
                value: ratio(count as u64, choose3(s) as u64),
                upper_bound_only: true,
                subset_size: s,
                witness,
            })
        }
    }
}

/// Outcome of a `(d, eps)`-denseness check. In sampled mode `holds` only
/// means that no violation was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseVerdict {
    pub mode: MeasureMode,
    pub holds: bool,
    pub one_sided: bool,
    pub subsets_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<usize>>,
}

/// Checks `e(W) >= d * C(|W|, 3) - eps * n^3` for vertex subsets `W`.
///
/// Exact mode scans subsets by increasing size and reports the first
/// violation. Sampled mode draws each trial's size uniformly from `3..=n`;
/// sizes whose threshold is not positive cannot be violated and are
/// accepted without counting.
pub fn check_d_eps_dense(
    h: &Hypergraph3,
    d: &BigRational,
    eps: &BigRational,
    mode: MeasureMode,
) -> Result<DenseVerdict> {
    let n = h.n();
    let slack = eps * BigRational::from(BigInt::from(n).pow(3));
    let threshold = |k: usize| d * BigRational::from(BigInt::from(choose3(k))) - &slack;
    let violated = |count: usize, k: usize| BigRational::from(BigInt::from(count)) < threshold(k);
    match mode {
        MeasureMode::Exact => {
            check_bound("exact measurement vertex count", n, EXACT_MEASURE_BOUND)?;
            let counts = subset_edge_counts(h);
            let mut masks: Vec<usize> = (0..counts.len()).collect();
            masks.sort_by_key(|&m| (m.count_ones(), m));
            let counterexample = masks
                .iter()
                .find(|&&m| violated(counts[m] as usize, m.count_ones() as usize))
                .map(|&m| mask_members(m));
            Ok(DenseVerdict {
                mode,
                holds: counterexample.is_none(),
                one_sided: false,
                subsets_checked: counts.len() as u64,
                counterexample,
            })
        }
        MeasureMode::Sampled { trials, seed } => {
            if n < 3 {
                return Ok(DenseVerdict {
                    mode,
                    holds: true,
                    one_sided: true,
                    subsets_checked: 0,
                    counterexample: None,
                });
            }
            let found: Vec<Option<Vec<usize>>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, t);
                    let k = rng.gen_range(3..=n);
                    if threshold(k) <= BigRational::zero() {
                        return None;
                    }
                    let mut w = sample(&mut rng, n, k).into_vec();
                    w.sort_unstable();
                    let mut members = vec![false; n];
                    for &v in &w {
                        members[v] = true;
                    }
                    violated(induced_edges(h, &members), k).then_some(w)
                })
                .collect();
            let counterexample = found.into_iter().flatten().next();
            Ok(DenseVerdict {
                mode,
                holds: counterexample.is_none(),
                one_sided: true,
                subsets_checked: trials as u64,
                counterexample,
            })
        }
    }
}

/// Human-readable form of a density estimate.
pub fn describe_estimate(e: &DensityEstimate) -> String {
    let kind = if e.upper_bound_only { "upper bound (sampled)" } else { "exact" };
    format!("{} ({kind}, subsets of size >= {})", format_rational(&e.value), e.subset_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::complete;
    use crate::palette::builtin_palette;

    #[test]
    fn sampling_is_deterministic_and_consistent() {
        let spec = builtin_palette("vanishing").unwrap();
        let a = sample_palette_host(30, &spec, 11).unwrap();
        let b = sample_palette_host(30, &spec, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.transcript_json().to_string(), b.transcript_json().to_string());
        assert!(a.is_consistent(&spec));
        let c = sample_palette_host(30, &spec, 12).unwrap();
        assert_ne!(a.pair_colors, c.pair_colors);
    }

    #[test]
    fn four27_host_is_consistent() {
        let spec = builtin_palette("four27_a").unwrap();
        let s = sample_palette_host(15, &spec, 3).unwrap();
        assert!(s.is_consistent(&spec));
        // Flipping one pair colour breaks consistency unless no triple sees it.
        let mut t = s.clone();
        let c = t.pair_colors.get_mut(&(0, 1)).unwrap();
        *c = if c == "red" { "blue".into() } else { "red".into() };
        let touched = (2..15).any(|k| {
            let col = |i, j| spec.palette.color_index(&t.pair_colors[&(i, j)]).unwrap();
            spec.palette.allows([col(0, 1), col(0, k), col(1, k)]) != t.hypergraph.has_edge(0, 1, k)
        });
        assert_eq!(t.is_consistent(&spec), !touched);
    }

    #[test]
    fn linear_density_small_cases() {
        let one = ratio(1, 1);
        let e = epsilon_linear_density(&complete(5), &one, MeasureMode::Exact).unwrap();
        assert_eq!(e.value, one);
        let e = epsilon_linear_density(&Hypergraph3::empty(6), &ratio(1, 2), MeasureMode::Exact).unwrap();
        assert_eq!(e.value, ratio(0, 1));
        let single = Hypergraph3::from_edges(3, [[0, 1, 2]]).unwrap();
        let e = epsilon_linear_density(&single, &one, MeasureMode::Exact).unwrap();
        assert_eq!(e.value, one);
        assert_eq!(e.witness, vec![0, 1, 2]);
        assert!(epsilon_linear_density(&Hypergraph3::empty(21), &one, MeasureMode::Exact).is_err());
    }

    #[test]
    fn sampled_density_is_an_upper_bound() {
        let spec = builtin_palette("four27_b").unwrap();
        let h = sample_palette_host(14, &spec, 5).unwrap().hypergraph;
        let eps = ratio(1, 2);
        let exact = epsilon_linear_density(&h, &eps, MeasureMode::Exact).unwrap();
        let est = epsilon_linear_density(&h, &eps, MeasureMode::Sampled { trials: 200, seed: 1 }).unwrap();
        assert!(est.upper_bound_only);
        assert!(exact.value <= est.value);
    }

    #[test]
    fn subset_counts_match_direct_count() {
        let spec = builtin_palette("vanishing").unwrap();
        let h = sample_palette_host(9, &spec, 2).unwrap().hypergraph;
        let counts = subset_edge_counts(&h);
        for mask in [0usize, 7, 0b1_0110_1101, 511] {
            let members: Vec<bool> = (0..9).map(|v| mask >> v & 1 == 1).collect();
            assert_eq!(counts[mask] as usize, induced_edges(&h, &members));
        }
    }

    #[test]
    fn denseness_checks() {
        let h = Hypergraph3::empty(10);
        let zero = ratio(0, 1);
        let v = check_d_eps_dense(&h, &zero, &zero, MeasureMode::Exact).unwrap();
        assert!(v.holds);
        let v = check_d_eps_dense(&h, &ratio(1, 1), &zero, MeasureMode::Exact).unwrap();
        assert!(!v.holds);
        assert_eq!(v.counterexample.unwrap().len(), 3);
        let v = check_d_eps_dense(&h, &ratio(1, 1), &zero, MeasureMode::Sampled { trials: 50, seed: 0 }).unwrap();
        assert!(!v.holds && v.one_sided);
    }

    #[test]
    fn bad_distribution_is_rejected() {
        let mut spec = builtin_palette("four27_a").unwrap();
        spec.dist = builtin_palette("vanishing").unwrap().dist;
        assert!(sample_palette_host(5, &spec, 0).is_err());
    }
}
