use std::fmt;

use super::Store;

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeBucket {
    /// Inclusive upper degree bound; `None` for the overflow bucket.
    pub upper: Option<u64>,
    pub nodes: u64,
    pub percent: f64,
}

/// Share of nodes by total (in + out) degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeHistogram {
    pub node_count: u64,
    pub buckets: Vec<DegreeBucket>,
}

/// Geometric bounds `ceil(n / 10^k)` for `k` from `digits(n) - 2` down to 0.
pub fn default_bounds(node_count: u64) -> Vec<u64> {
    if node_count == 0 {
        return Vec::new();
    }
    let top = node_count.ilog10().saturating_sub(1);
    let mut bounds: Vec<u64> = (0..=top)
        .rev()
        .map(|k| node_count.div_ceil(10u64.pow(k)))
        .collect();
    bounds.dedup();
    bounds
}

impl Store {
    /// Total degree per node, indexed by `id - 1`. A self loop counts twice.
    pub fn node_degrees(&self) -> Vec<u64> {
        let mut degrees = vec![0u64; self.node_count()];
        for m in self.matrices() {
            for &[s, o] in m.so_pairs() {
                degrees[s as usize - 1] += 1;
                degrees[o as usize - 1] += 1;
            }
        }
        degrees
    }

    /// Buckets are `[0, b0]`, `(b0, b1]`, ..., plus an overflow bucket above
    /// the last bound. Unsorted bounds are sorted first.
    pub fn degree_histogram(&self, bounds: &[u64]) -> DegreeHistogram {
        let mut bounds = bounds.to_vec();
        bounds.sort_unstable();
        bounds.dedup();
        let mut counts = vec![0u64; bounds.len() + 1];
        let degrees = self.node_degrees();
        for &d in &degrees {
            counts[bounds.partition_point(|&b| b < d)] += 1;
        }
        let total = degrees.len() as u64;
        let buckets = counts
            .into_iter()
            .enumerate()
            .map(|(i, nodes)| DegreeBucket {
                upper: bounds.get(i).copied(),
                nodes,
                percent: if total == 0 {
                    0.0
                } else {
                    100.0 * nodes as f64 / total as f64
                },
            })
            .collect();
        DegreeHistogram {
            node_count: total,
            buckets,
        }
    }
}

/// One `bucket<TAB>nodes<TAB>percent` line per bucket.
impl fmt::Display for DegreeHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lower = None;
        for b in &self.buckets {
            match (b.upper, lower) {
                (Some(u), _) => write!(f, "<={u}")?,
                (None, Some(l)) => write!(f, ">{l}")?,
                (None, None) => f.write_str(">=0")?,
            }
            writeln!(f, "\t{}\t{:.4}", b.nodes, b.percent)?;
            lower = b.upper;
        }
        Ok(())
    }
}
