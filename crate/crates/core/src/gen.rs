//! Seeded synthetic N-Triples with Zipf-distributed predicate frequencies
//! and heavy-tailed object degrees.

use std::collections::HashSet;
use std::io::{self, Write};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Zipf};

use crate::error::GenError;

pub const NODE_PREFIX: &str = "http://example.org/n";
pub const PREDICATE_PREFIX: &str = "http://example.org/p";

/// Exponent of the object popularity distribution.
const OBJECT_ZIPF: f64 = 1.0;
/// Draws allowed per triple before giving up on finding a new pair.
const MAX_DRAWS: u32 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig {
    pub triples: u64,
    pub predicates: u32,
    pub zipf: f64,
    pub seed: u64,
    /// Size of the node pool; `None` picks half the triple count.
    pub nodes: Option<u64>,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.triples == 0 {
            return Err(GenError::InvalidParameter(
                "triples must be at least 1".into(),
            ));
        }
        if self.predicates == 0 {
            return Err(GenError::InvalidParameter(
                "predicates must be at least 1".into(),
            ));
        }
        if !self.zipf.is_finite() || self.zipf < 0.0 {
            return Err(GenError::InvalidParameter(format!(
                "zipf exponent must be a finite number >= 0, got {}",
                self.zipf
            )));
        }
        if self.nodes.is_some_and(|n| n < 2) {
            return Err(GenError::InvalidParameter(
                "nodes must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Size of the node pool. The default, half the triple count, is never
    /// so small that a predicate could run out of distinct pairs.
    pub fn node_count(&self) -> u64 {
        self.nodes
            .unwrap_or_else(|| self.triples.div_ceil(2).max(4))
    }
}

/// Splits `total` over `k` ranks in proportion to `1 / rank^s`, using
/// largest remainders so the counts sum exactly to `total`. Counts are
/// non-increasing in rank.
pub fn zipf_allocation(total: u64, k: u32, s: f64) -> Vec<u64> {
    let weights: Vec<f64> = (1..=k).map(|r| (r as f64).powf(-s)).collect();
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<u64> = exact.iter().map(|e| e.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..k as usize).collect();
    // Ties go to the lower rank, which keeps counts monotone.
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    // Rounding can only break monotonicity by one between neighbours;
    // sorting restores it without changing the multiset.
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts
}

/// A generated statement as (subject node, predicate rank, object node),
/// all 1-based.
pub type GenTriple = (u64, u32, u64);

/// Generates `triples` distinct statements in a seeded random order.
pub fn generate(cfg: &GenConfig) -> Result<Vec<GenTriple>, GenError> {
    cfg.validate()?;
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let nodes = cfg.node_count();
    let objects = Zipf::new(nodes as f64, OBJECT_ZIPF)
        .map_err(|e| GenError::InvalidParameter(e.to_string()))?;
    let counts = zipf_allocation(cfg.triples, cfg.predicates, cfg.zipf);

    let mut out = Vec::with_capacity(cfg.triples as usize);
    for (rank, &count) in counts.iter().enumerate() {
        let p = rank as u32 + 1;
        let mut seen: HashSet<(u64, u64)> = HashSet::with_capacity(count as usize);
        for _ in 0..count {
            let mut draws = 0;
            loop {
                let s = rng.random_range(1..=nodes);
                let o = objects.sample(&mut rng) as u64;
                if seen.insert((s, o)) {
                    out.push((s, p, o));
                    break;
                }
                draws += 1;
                if draws == MAX_DRAWS {
                    return Err(GenError::InvalidParameter(format!(
                        "cannot place {count} distinct triples on predicate {p}; \
                         lower the zipf exponent or add predicates"
                    )));
                }
            }
        }
    }
    out.shuffle(&mut rng);
    Ok(out)
}

pub fn write_ntriples<W: Write>(triples: &[GenTriple], mut out: W) -> io::Result<()> {
    for &(s, p, o) in triples {
        writeln!(
            out,
            "<{NODE_PREFIX}{s}> <{PREDICATE_PREFIX}{p}> <{NODE_PREFIX}{o}> ."
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(triples: u64, predicates: u32, zipf: f64, seed: u64) -> GenConfig {
        GenConfig {
            triples,
            predicates,
            zipf,
            seed,
            nodes: None,
        }
    }

    fn render(c: &GenConfig) -> Vec<u8> {
        let mut buf = Vec::new();
        write_ntriples(&generate(c).unwrap(), &mut buf).unwrap();
        buf
    }

    #[test]
    fn deterministic_for_a_seed() {
        let c = cfg(100, 5, 1.0, 42);
        assert_eq!(render(&c), render(&c));
        assert_ne!(render(&c), render(&cfg(100, 5, 1.0, 43)));
    }

    #[test]
    fn one_triple_is_one_line() {
        let out = String::from_utf8(render(&cfg(1, 3, 1.0, 7))).unwrap();
        assert_eq!(out.lines().count(), 1);
        assert!(out.contains("/p1>"));
    }

    #[test]
    fn allocation_sums_and_is_monotone() {
        for (total, k, s) in [(100, 5, 1.0), (7, 3, 0.0), (1, 8, 2.0), (1_000_000, 8, 1.3)] {
            let c = zipf_allocation(total, k, s);
            assert_eq!(c.len(), k as usize);
            assert_eq!(c.iter().sum::<u64>(), total);
            assert!(c.windows(2).all(|w| w[0] >= w[1]), "{c:?}");
        }
        assert_eq!(zipf_allocation(6, 3, 0.0), [2, 2, 2]);
        // weights 1, 1/2, 1/3 of 11: 6, 3, 2
        assert_eq!(zipf_allocation(11, 3, 1.0), [6, 3, 2]);
    }

    #[test]
    fn statements_are_distinct() {
        let t = generate(&cfg(2000, 3, 1.5, 1)).unwrap();
        let set: HashSet<_> = t.iter().collect();
        assert_eq!(set.len(), t.len());
        assert_eq!(t.len(), 2000);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate(&cfg(0, 1, 1.0, 0)).is_err());
        assert!(generate(&cfg(1, 0, 1.0, 0)).is_err());
        assert!(generate(&cfg(1, 1, -1.0, 0)).is_err());
        assert!(generate(&cfg(1, 1, f64::NAN, 0)).is_err());
        let tiny = GenConfig {
            nodes: Some(2),
            ..cfg(5, 1, 0.0, 0)
        };
        assert!(matches!(
            generate(&tiny),
            Err(GenError::InvalidParameter(_))
        ));
    }
}
