//! Isolation forest on one-dimensional return windows. Scores are
//! `s(x) = 2^(-E[h(x)]/c(psi))` with `h` the tree path length, truncated
//! trees contributing `c(size)` at their external nodes.

use super::{check_series, AnomalyError, DetectionPoint, DetectionSeries, DetectorConfig};
use crate::rng::SplitMix64;

/// Harmonic-number constant in the path-length normalizer; the examples in
/// this crate are pinned to this truncation of the Euler-Mascheroni value.
const EULER_GAMMA: f64 = 0.5772;

/// Average path length `c(s)` of an unsuccessful binary search in a node of
/// `s` points: 0 for a single point, 1 for two, and
/// `2 (ln(s-1) + gamma) - 2 (s-1)/s` beyond.
pub fn average_path_length(s: usize) -> f64 {
    match s {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let sf = s as f64;
            2.0 * ((sf - 1.0).ln() + EULER_GAMMA) - 2.0 * (sf - 1.0) / sf
        }
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split { value: f64, left: u32, right: u32 },
    Leaf { size: u32 },
}

#[derive(Debug, Clone, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn grow(sample: Vec<f64>, max_depth: usize, rng: &mut SplitMix64) -> Self {
        let mut nodes = Vec::new();
        Self::grow_node(&mut nodes, sample, 0, max_depth, rng);
        Tree { nodes }
    }

    fn grow_node(
        nodes: &mut Vec<Node>,
        sample: Vec<f64>,
        depth: usize,
        max_depth: usize,
        rng: &mut SplitMix64,
    ) -> u32 {
        let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if sample.len() <= 1 || depth >= max_depth || lo == hi {
            nodes.push(Node::Leaf {
                size: sample.len() as u32,
            });
            return (nodes.len() - 1) as u32;
        }
        let split = lo + rng.next_f64() * (hi - lo);
        let (left_vals, right_vals): (Vec<f64>, Vec<f64>) =
            sample.into_iter().partition(|v| *v < split);
        let idx = nodes.len();
        // Placeholder patched once the children exist.
        nodes.push(Node::Leaf { size: 0 });
        let left = Self::grow_node(nodes, left_vals, depth + 1, max_depth, rng);
        let right = Self::grow_node(nodes, right_vals, depth + 1, max_depth, rng);
        nodes[idx] = Node::Split {
            value: split,
            left,
            right,
        };
        idx as u32
    }

    fn path_length(&self, x: f64) -> f64 {
        let mut idx = 0usize;
        let mut depth = 0.0;
        loop {
            match &self.nodes[idx] {
                Node::Split { value, left, right } => {
                    depth += 1.0;
                    idx = if x < *value { *left } else { *right } as usize;
                }
                Node::Leaf { size } => return depth + average_path_length(*size as usize),
            }
        }
    }
}

/// A fitted forest; scoring is independent of the fitting sample.
#[derive(Debug, Clone, PartialEq)]
pub struct IForestModel {
    trees: Vec<Tree>,
    psi: usize,
    c_psi: f64,
    seed: u64,
    /// All fitting values equal: every score is 0.5 by convention.
    degenerate: bool,
}

impl IForestModel {
    /// Builds `trees` isolation trees, each on a without-replacement
    /// subsample of `min(subsample, len)` values, depth-capped at
    /// `ceil(log2 psi)`.
    pub fn fit(values: &[f64], trees: usize, subsample: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let psi = subsample.min(values.len()).max(1);
        let max_depth = ceil_log2(psi);
        let mut built = Vec::with_capacity(trees);
        for _ in 0..trees {
            let mut indices: Vec<usize> = (0..values.len()).collect();
            for i in 0..psi {
                let j = i + rng.next_below((values.len() - i) as u64) as usize;
                indices.swap(i, j);
            }
            let sample: Vec<f64> = indices[..psi].iter().map(|&i| values[i]).collect();
            built.push(Tree::grow(sample, max_depth, &mut rng));
        }
        IForestModel {
            trees: built,
            psi,
            c_psi: average_path_length(psi),
            seed,
            degenerate: values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    pub fn c_psi(&self) -> f64 {
        self.c_psi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Mean path length over the forest.
    pub fn mean_path_length(&self, x: f64) -> f64 {
        self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64
    }

    /// Anomaly score in (0,1); a degenerate fit (all-equal sample, or a
    /// psi = 1 normalizer) scores 0.5 by convention.
    pub fn score(&self, x: f64) -> f64 {
        if self.degenerate || self.c_psi <= 0.0 {
            return 0.5;
        }
        2f64.powf(-self.mean_path_length(x) / self.c_psi)
    }
}

pub fn iforest_detect(r: &[f64], cfg: &DetectorConfig) -> Result<DetectionSeries, AnomalyError> {
    cfg.validate()?;
    let w = cfg.window;
    check_series(r, w)?;
    let psi = cfg.effective_subsample();
    let mut points = Vec::with_capacity(r.len().saturating_sub(w));
    for t in w..r.len() {
        let window = &r[t - w + 1..t];
        // Per-window stream from (seed, t): flags cannot depend on the order
        // windows are evaluated in.
        let window_seed = SplitMix64::derived(cfg.seed, t as u64).next_u64();
        let model = IForestModel::fit(window, cfg.trees, psi, window_seed);
        let stat = model.score(r[t]);
        points.push(DetectionPoint {
            index: t,
            value: r[t],
            stat,
            flagged: stat > cfg.score_threshold,
            fallback: false,
        });
    }
    Ok(DetectionSeries {
        method: cfg.method.label().to_string(),
        len: r.len(),
        window: w,
        points,
    })
}
