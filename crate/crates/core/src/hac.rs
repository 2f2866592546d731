//! Ward-linkage agglomerative clustering and the binary classifiability
//! read off its last merge.
//!
//! Distances follow the usual convention: singletons start at their
//! Euclidean distance and two clusters `A`, `B` sit at
//! `√(2|A||B|/(|A|+|B|)) · ‖c_A − c_B‖`. Merging uses the Lance–Williams
//! recurrence on squared distances.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// One agglomeration step. Leaves are ids `0..T`; the cluster created by
/// merge `k` gets id `T + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeTree {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

impl MergeTree {
    pub fn cluster_size(&self, id: usize) -> usize {
        if id < self.leaves {
            1
        } else {
            self.merges[id - self.leaves].size
        }
    }

    pub fn last(&self) -> &Merge {
        self.merges.last().expect("a merge tree has at least one merge")
    }

    /// Leaf ids of the two clusters joined by the final merge.
    pub fn final_split(&self) -> (Vec<usize>, Vec<usize>) {
        let last = self.last();
        (self.leaves_of(last.left), self.leaves_of(last.right))
    }

    pub fn leaves_of(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if c < self.leaves {
                out.push(c);
            } else {
                let m = &self.merges[c - self.leaves];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out.sort_unstable();
        out
    }

    /// CSV with header `left,right,distance,size`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "left,right,distance,size")?;
        for m in &self.merges {
            writeln!(w, "{},{},{},{}", m.left, m.right, m.distance, m.size)?;
        }
        Ok(())
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Ward clustering of `points`. Among equal distances the pair with the
/// smallest `(min id, max id)` wins.
pub fn hac_ward(points: &[Vec<f64>]) -> Result<MergeTree> {
    let t = points.len();
    if t < 2 {
        return domain(format!("clustering needs at least two points, got {t}"));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return domain("points must share a positive dimension");
    }
    // Slot-indexed squared distance matrix; slot s holds cluster ids[s].
    let mut d2 = vec![0.0; t * t];
    for i in 0..t {
        for j in (i + 1)..t {
            let v = squared_distance(&points[i], &points[j]);
            d2[i * t + j] = v;
            d2[j * t + i] = v;
        }
    }
    let mut ids: Vec<usize> = (0..t).collect();
    let mut sizes = vec![1usize; t];
    let mut active = vec![true; t];
    let mut merges = Vec::with_capacity(t - 1);
    for step in 0..(t - 1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..t {
            if !active[a] {
                continue;
            }
            for b in (a + 1)..t {
                if !active[b] {
                    continue;
                }
                let v = d2[a * t + b];
                let (lo, hi) = (ids[a].min(ids[b]), ids[a].max(ids[b]));
                let better = match best {
                    None => true,
                    Some((bv, blo, bhi, _, _)) => v < bv || (v == bv && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((v, lo, hi, a, b));
                }
            }
        }
        let (v, lo, hi, a, b) = best.expect("at least two active clusters");
        let (na, nb) = (sizes[a] as f64, sizes[b] as f64);
        for k in 0..t {
            if !active[k] || k == a || k == b {
                continue;
            }
            let nk = sizes[k] as f64;
            let updated = ((na + nk) * d2[a * t + k] + (nb + nk) * d2[b * t + k] - nk * v)
                / (na + nb + nk);
            d2[a * t + k] = updated;
            d2[k * t + a] = updated;
        }
        sizes[a] += sizes[b];
        active[b] = false;
        ids[a] = t + step;
        merges.push(Merge {
            left: lo,
            right: hi,
            distance: v.max(0.0).sqrt(),
            size: sizes[a],
        });
    }
    Ok(MergeTree { leaves: t, merges })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifiabilityMode {
    /// Linkage distance of the final merge.
    #[default]
    Raw,
    /// Final distance times `min(|C₁|,|C₂|)/max(|C₁|,|C₂|)`.
    Balanced,
}

pub fn classifiability(tree: &MergeTree, mode: ClassifiabilityMode) -> f64 {
    let last = tree.last();
    match mode {
        ClassifiabilityMode::Raw => last.distance,
        ClassifiabilityMode::Balanced => {
            let a = tree.cluster_size(last.left) as f64;
            let b = tree.cluster_size(last.right) as f64;
            last.distance * (a.min(b) / a.max(b))
        }
    }
}
