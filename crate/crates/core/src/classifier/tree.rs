use std::mem;

use serde::{Deserialize, Serialize};

use super::params::LEAF_L2;

/// A node of a regression tree. Children always have larger indices than
/// their parent, so traversal from node 0 terminates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `features[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// `value` is in log-odds space, before learning-rate shrinkage.
    /// `count` is the number of training rows that reached the leaf.
    Leaf { value: f64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub(crate) fn leaf_value(&self, features: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if features[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// `(depth, training count)` of every leaf; the root has depth 0.
    pub fn leaves(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            match &self.nodes[i] {
                Node::Leaf { count, .. } => out.push((d, *count)),
                Node::Split { left, right, .. } => {
                    stack.push((*right, d + 1));
                    stack.push((*left, d + 1));
                }
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.leaves().iter().map(|l| l.0).max().unwrap_or(0)
    }
}

/// Column-major copy of the training features plus, per feature, all row
/// ids sorted by value. Built once per fit and shared by every tree.
pub(crate) struct Columns {
    pub(crate) cols: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
}

impl Columns {
    pub(crate) fn new(rows: &[&[f64]], width: usize) -> Self {
        let cols: Vec<Vec<f64>> = (0..width)
            .map(|f| rows.iter().map(|r| r[f]).collect())
            .collect();
        let sorted = cols
            .iter()
            .map(|c| {
                let mut idx: Vec<u32> = (0..c.len() as u32).collect();
                idx.sort_by(|&a, &b| c[a as usize].total_cmp(&c[b as usize]));
                idx
            })
            .collect();
        Columns { cols, sorted }
    }

    pub(crate) fn width(&self) -> usize {
        self.cols.len()
    }
}

pub(crate) struct TreeLimits {
    pub max_depth: usize,
    pub num_leaves: usize,
    pub min_data_in_leaf: usize,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct OpenLeaf {
    node: usize,
    depth: usize,
    /// Row ids of this leaf, sorted by each feature in turn.
    rows: Vec<Vec<u32>>,
    grad: f64,
    hess: f64,
    count: usize,
    best: Option<Candidate>,
}

fn score(g: f64, h: f64) -> f64 {
    g * g / (h + LEAF_L2)
}

fn leaf_value(g: f64, h: f64) -> f64 {
    -g / (h + LEAF_L2)
}

/// Grows one tree leaf-wise on the rows with non-zero `weight`, using the
/// weighted gradient/hessian statistics.
pub(crate) fn grow_tree(
    data: &Columns,
    grad: &[f64],
    hess: &[f64],
    weight: &[f64],
    limits: &TreeLimits,
) -> Tree {
    let root_rows: Vec<Vec<u32>> = data
        .sorted
        .iter()
        .map(|s| s.iter().copied().filter(|&r| weight[r as usize] > 0.0).collect())
        .collect();
    let members = root_rows.first().map(|r| r.as_slice()).unwrap_or(&[]);
    let (g, h) = members.iter().fold((0.0, 0.0), |(g, h), &r| {
        let w = weight[r as usize];
        (g + w * grad[r as usize], h + w * hess[r as usize])
    });

    let mut nodes = vec![Node::Leaf {
        value: leaf_value(g, h),
        count: members.len(),
    }];
    let mut root = OpenLeaf {
        node: 0,
        depth: 0,
        count: members.len(),
        rows: root_rows,
        grad: g,
        hess: h,
        best: None,
    };
    root.best = best_split(data, grad, hess, weight, &root, limits);
    let mut open = vec![root];
    let mut leaves = 1;

    while leaves < limits.num_leaves {
        // largest gain first; ties go to the earliest-created leaf
        let pick = open
            .iter()
            .enumerate()
            .filter_map(|(k, l)| l.best.map(|c| (k, c.gain)))
            .fold(None::<(usize, f64)>, |acc, (k, gain)| match acc {
                Some((_, best)) if best >= gain => acc,
                _ => Some((k, gain)),
            });
        let Some((k, _)) = pick else { break };
        let leaf = open.swap_remove(k);
        let cand = leaf.best.expect("picked leaf has a candidate");

        let (left_rows, right_rows) = partition(data, &leaf.rows, cand);
        let stats = |rows: &[Vec<u32>]| {
            rows[0].iter().fold((0.0, 0.0), |(g, h), &r| {
                let w = weight[r as usize];
                (g + w * grad[r as usize], h + w * hess[r as usize])
            })
        };
        let (lg, lh) = stats(&left_rows);
        let (rg, rh) = stats(&right_rows);
        let left_id = nodes.len();
        let right_id = left_id + 1;
        let mut children = [
            OpenLeaf {
                node: left_id,
                depth: leaf.depth + 1,
                count: left_rows[0].len(),
                rows: left_rows,
                grad: lg,
                hess: lh,
                best: None,
            },
            OpenLeaf {
                node: right_id,
                depth: leaf.depth + 1,
                count: right_rows[0].len(),
                rows: right_rows,
                grad: rg,
                hess: rh,
                best: None,
            },
        ];
        for c in &children {
            nodes.push(Node::Leaf {
                value: leaf_value(c.grad, c.hess),
                count: c.count,
            });
        }
        nodes[leaf.node] = Node::Split {
            feature: cand.feature,
            threshold: cand.threshold,
            left: left_id,
            right: right_id,
        };
        leaves += 1;
        for c in children.iter_mut() {
            c.best = best_split(data, grad, hess, weight, c, limits);
        }
        let [l, r] = children;
        open.push(l);
        open.push(r);
        // keep creation order so ties resolve deterministically
        open.sort_by_key(|l| l.node);
    }
    Tree { nodes }
}

fn partition(data: &Columns, rows: &[Vec<u32>], cand: Candidate) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let col = &data.cols[cand.feature];
    let goes_left = |r: u32| col[r as usize] <= cand.threshold;
    let mut left = Vec::with_capacity(rows.len());
    let mut right = Vec::with_capacity(rows.len());
    for list in rows {
        let (l, r): (Vec<u32>, Vec<u32>) = list.iter().partition(|&&r| goes_left(r));
        left.push(l);
        right.push(r);
    }
    (left, right)
}

/// Exact scan over every feature's sorted values. Splits must leave at least
/// `min_data_in_leaf` rows on each side and have non-negative gain; the first
/// best (lowest feature, lowest threshold) wins ties.
fn best_split(
    data: &Columns,
    grad: &[f64],
    hess: &[f64],
    weight: &[f64],
    leaf: &OpenLeaf,
    limits: &TreeLimits,
) -> Option<Candidate> {
    if leaf.depth >= limits.max_depth || leaf.count < 2 * limits.min_data_in_leaf {
        return None;
    }
    let parent = score(leaf.grad, leaf.hess);
    let mut best: Option<Candidate> = None;
    for f in 0..data.width() {
        let col = &data.cols[f];
        let rows = &leaf.rows[f];
        let (mut gl, mut hl) = (0.0, 0.0);
        for k in 0..rows.len() - 1 {
            let r = rows[k] as usize;
            gl += weight[r] * grad[r];
            hl += weight[r] * hess[r];
            let left_n = k + 1;
            if left_n < limits.min_data_in_leaf {
                continue;
            }
            if rows.len() - left_n < limits.min_data_in_leaf {
                break;
            }
            let (lo, hi) = (col[r], col[rows[k + 1] as usize]);
            if lo >= hi {
                continue;
            }
            let gain = score(gl, hl) + score(leaf.grad - gl, leaf.hess - hl) - parent;
            if gain >= 0.0 && best.is_none_or(|b| gain > b.gain) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(Candidate {
                    gain,
                    feature: f,
                    threshold,
                });
            }
        }
    }
    best
}

impl Node {
    pub(crate) fn size_bytes() -> usize {
        mem::size_of::<Node>()
    }
}
