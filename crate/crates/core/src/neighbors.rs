//! Per-point k-th largest `alpha` over a sample: a naive all-pairs oracle
//! and an exact prefix-trie accelerator.
//!
//! The accelerator exploits the bi-Lipschitz bracket `p - 1 <= alpha <= p`
//! (`p` = first mismatch position): candidates are enumerated in
//! nonincreasing order of shared-prefix depth, and refinement stops once
//! the k-th best exact value dominates the upper bound of everything not
//! yet visited. Both paths evaluate surviving candidates with the exact
//! same floating-point fold, so their outputs agree bit for bit.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{alpha_raw, LambdaFamily};
use crate::seq::Sample;

/// Per-point k-th largest `alpha` values for a set of requested orders.
#[derive(Debug, Clone)]
pub struct NeighborResult {
    orders: Vec<usize>,
    per_point: Vec<Vec<f64>>,
}

impl NeighborResult {
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn per_point(&self) -> &[Vec<f64>] {
        &self.per_point
    }

    pub fn value(&self, point: usize, order_idx: usize) -> f64 {
        self.per_point[point][order_idx]
    }

    /// Mean over points for one order, summed in point-index order so the
    /// reduction is bit-stable regardless of query parallelism.
    pub fn mean(&self, order_idx: usize) -> f64 {
        let total: f64 = self.per_point.iter().map(|v| v[order_idx]).sum();
        total / self.per_point.len() as f64
    }
}

fn check_orders(orders: &[usize], available: usize) -> Result<()> {
    if orders.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one neighbor order is required".into(),
        ));
    }
    for &k in orders {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "neighbor orders are 1-based; got 0".into(),
            ));
        }
        if k > available {
            return Err(Error::InsufficientNeighbors { k, available });
        }
    }
    Ok(())
}

/// k-th largest `alpha(x_i, x_j)` over `i != j` for one point, for each
/// requested order, by brute-force enumeration of all pairs.
pub fn kmax_alpha_naive(
    sample: &Sample,
    j: usize,
    orders: &[usize],
    family: &LambdaFamily,
) -> Result<Vec<f64>> {
    check_orders(orders, sample.num_points() - 1)?;
    let xj = sample.point(j).symbols();
    let mut alphas: Vec<f64> = (0..sample.num_points())
        .filter(|&i| i != j)
        .map(|i| alpha_raw(sample.point(i).symbols(), xj, family))
        .collect();
    alphas.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(orders.iter().map(|&k| alphas[k - 1]).collect())
}

/// Trie-accelerated k-th largest `alpha` for every point of the sample.
///
/// Output is elementwise identical to running [`kmax_alpha_naive`] for
/// every point. Per-point queries run in parallel over a read-only trie.
pub fn kmax_alpha_trie(
    sample: &Sample,
    orders: &[usize],
    family: &LambdaFamily,
) -> Result<NeighborResult> {
    check_orders(orders, sample.num_points() - 1)?;
    let trie = PrefixTrie::build(sample);
    let kmax = *orders.iter().max().unwrap();
    let per_point: Vec<Vec<f64>> = (0..sample.num_points())
        .into_par_iter()
        .map(|j| {
            if family.is_zero() {
                trie.query_zero(sample, j, orders)
            } else {
                trie.query(sample, j, orders, kmax, family)
            }
        })
        .collect();
    Ok(NeighborResult {
        orders: orders.to_vec(),
        per_point,
    })
}

const NO_NODE: u32 = u32::MAX;

/// Prefix trie over the sample points. Every point is a length-`m` path
/// from the root; each node records its subtree point count and a slice
/// of the DFS point ordering, so subtree enumeration is a slice scan.
struct PrefixTrie {
    asize: usize,
    depth: usize,
    children: Vec<u32>,
    count: Vec<u32>,
    range: Vec<(u32, u32)>,
    point_order: Vec<u32>,
}

impl PrefixTrie {
    fn build(sample: &Sample) -> Self {
        let asize = sample.alphabet().size();
        let depth = sample.depth();
        let np = sample.num_points();

        let mut children: Vec<u32> = vec![NO_NODE; asize];
        let mut count: Vec<u32> = vec![0];
        let mut leaf_head: Vec<u32> = vec![u32::MAX];
        let mut next_point: Vec<u32> = vec![u32::MAX; np];

        for (i, point) in sample.points().iter().enumerate() {
            let mut node = 0usize;
            count[node] += 1;
            for &s in point.symbols() {
                let slot = node * asize + s as usize;
                let child = if children[slot] == NO_NODE {
                    let id = count.len() as u32;
                    children[slot] = id;
                    let grown = children.len() + asize;
                    children.resize(grown, NO_NODE);
                    count.push(0);
                    leaf_head.push(u32::MAX);
                    id
                } else {
                    children[slot]
                };
                node = child as usize;
                count[node] += 1;
            }
            next_point[i] = leaf_head[node];
            leaf_head[node] = i as u32;
        }

        // DFS in symbol order to lay out per-node point ranges.
        let num_nodes = count.len();
        let mut range = vec![(0u32, 0u32); num_nodes];
        let mut point_order: Vec<u32> = Vec::with_capacity(np);
        let mut stack: Vec<(u32, u32)> = vec![(0, 0)];
        while let Some((node, cursor)) = stack.pop() {
            let node_us = node as usize;
            if cursor == 0 {
                range[node_us].0 = point_order.len() as u32;
            }
            let mut descended = false;
            for s in cursor as usize..asize {
                let c = children[node_us * asize + s];
                if c != NO_NODE {
                    stack.push((node, s as u32 + 1));
                    stack.push((c, 0));
                    descended = true;
                    break;
                }
            }
            if !descended {
                let mut p = leaf_head[node_us];
                while p != u32::MAX {
                    point_order.push(p);
                    p = next_point[p as usize];
                }
                range[node_us].1 = point_order.len() as u32;
            }
        }

        Self {
            asize,
            depth,
            children,
            count,
            range,
            point_order,
        }
    }

    #[inline]
    fn child(&self, node: u32, symbol: usize) -> u32 {
        self.children[node as usize * self.asize + symbol]
    }

    fn path_of(&self, symbols: &[u32]) -> Vec<u32> {
        let mut path = Vec::with_capacity(self.depth + 1);
        let mut node = 0u32;
        path.push(node);
        for &s in symbols {
            node = self.child(node, s as usize);
            debug_assert_ne!(node, NO_NODE, "query point must be in the trie");
            path.push(node);
        }
        path
    }

    /// General-family query: exact alpha for every candidate that survives
    /// the depth bound, deepest shared prefixes first.
    fn query(
        &self,
        sample: &Sample,
        j: usize,
        orders: &[usize],
        kmax: usize,
        family: &LambdaFamily,
    ) -> Vec<f64> {
        let xs = sample.point(j).symbols();
        let m = self.depth;
        let path = self.path_of(xs);
        let mut top = TopK::new(kmax);

        // Points identical to j (same leaf) attain the maximum alpha = m.
        let dup = self.count[*path.last().unwrap() as usize] as usize - 1;
        for _ in 0..dup {
            top.push(m as f64);
        }

        for q in (1..=m).rev() {
            // Everything not yet visited mismatches at some position <= q,
            // so its alpha is at most q.
            if top.is_full() && top.kth_best() >= q as f64 {
                break;
            }
            let parent = path[q - 1];
            let sj = xs[q - 1] as usize;
            for s in 0..self.asize {
                if s == sj {
                    continue;
                }
                let c = self.child(parent, s);
                if c == NO_NODE {
                    continue;
                }
                let (lo, hi) = self.range[c as usize];
                for &i in &self.point_order[lo as usize..hi as usize] {
                    let ys = sample.point(i as usize).symbols();
                    // Reproduce the full fold exactly: suffix after the
                    // mismatch, one lambda step, then q-1 unit steps for
                    // the shared prefix.
                    let mut t = alpha_raw(&xs[q..], &ys[q..], family);
                    t = family.eval_raw(t);
                    for _ in 0..q - 1 {
                        t += 1.0;
                    }
                    top.push(t);
                }
            }
        }
        orders.iter().map(|&k| top.kth(k)).collect()
    }

    /// Zero-family query: alpha depends only on the mismatch position, so
    /// order statistics are read directly off subtree counts.
    fn query_zero(&self, sample: &Sample, j: usize, orders: &[usize]) -> Vec<f64> {
        let xs = sample.point(j).symbols();
        let m = self.depth;
        let path = self.path_of(xs);
        let dup = self.count[*path.last().unwrap() as usize] as usize - 1;

        // level_cnt[q] = points whose first mismatch with j is exactly q;
        // their alpha is q - 1. Duplicates of j have alpha m.
        let mut level_cnt = vec![0usize; m + 1];
        for q in 1..=m {
            let parent = path[q - 1];
            let sj = xs[q - 1] as usize;
            level_cnt[q] = (0..self.asize)
                .filter(|&s| s != sj)
                .map(|s| {
                    let c = self.child(parent, s);
                    if c == NO_NODE {
                        0
                    } else {
                        self.count[c as usize] as usize
                    }
                })
                .sum();
        }

        orders
            .iter()
            .map(|&k| {
                let mut remaining = k;
                if remaining <= dup {
                    return m as f64;
                }
                remaining -= dup;
                for q in (1..=m).rev() {
                    if remaining <= level_cnt[q] {
                        return (q - 1) as f64;
                    }
                    remaining -= level_cnt[q];
                }
                unreachable!("orders are validated against the neighbor count")
            })
            .collect()
    }
}

/// Fixed-capacity collector of the largest values seen, kept sorted
/// descending.
struct TopK {
    cap: usize,
    values: Vec<f64>,
}

impl TopK {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            values: Vec::with_capacity(cap + 1),
        }
    }

    #[inline]
    fn push(&mut self, v: f64) {
        if self.values.len() == self.cap {
            if v <= self.values[self.cap - 1] {
                return;
            }
            self.values.pop();
        }
        let pos = self.values.partition_point(|&x| x >= v);
        self.values.insert(pos, v);
    }

    #[inline]
    fn is_full(&self) -> bool {
        self.values.len() == self.cap
    }

    /// Smallest kept value; only meaningful when full.
    #[inline]
    fn kth_best(&self) -> f64 {
        self.values[self.cap - 1]
    }

    fn kth(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}
