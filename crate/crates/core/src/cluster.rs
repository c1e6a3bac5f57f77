//! Agglomerative centroid-linkage clustering of scalar scores.
//!
//! On the real line the centroid distance between two clusters is the
//! absolute difference of their means. Merge heights are recorded as computed
//! and never adjusted for monotonicity.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrecError};

/// One agglomeration step. Node ids follow the usual convention: leaves are
/// `0..n` in input order and the cluster created by merge `i` is `n + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

#[derive(Debug, Clone)]
struct Cluster {
    node: usize,
    members: Vec<usize>,
    sum: f64,
}

impl Cluster {
    fn mean(&self) -> f64 {
        self.sum / self.members.len() as f64
    }

    /// Smallest member index, used for deterministic tie-breaking.
    fn key(&self) -> usize {
        self.members[0]
    }
}

/// Clusters `scores` (named by `names`) down to a single root.
/// Ties in merge distance go to the pair with the smallest member indices.
pub fn centroid_linkage(names: &[String], scores: &[f64]) -> Result<Dendrogram> {
    if names.len() != scores.len() {
        return Err(TrecError::LengthMismatch {
            expected: names.len(),
            found: scores.len(),
        });
    }
    let n = scores.len();
    let mut active: Vec<Cluster> = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| Cluster {
            node: i,
            members: vec![i],
            sum: s,
        })
        .collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..active.len() {
            for b in (a + 1)..active.len() {
                let d = (active[a].mean() - active[b].mean()).abs();
                let (ka, kb) = (active[a].key(), active[b].key());
                let key = (ka.min(kb), ka.max(kb));
                let better = match &best {
                    None => true,
                    Some((bd, bkey, _, _)) => d < *bd || (d == *bd && key < *bkey),
                };
                if better {
                    best = Some((d, key, a, b));
                }
            }
        }
        let (height, _, a, b) = best.expect("at least two active clusters");
        let right = active.remove(b);
        let left = active.remove(a);
        let (first, second) = if left.key() < right.key() {
            (left, right)
        } else {
            (right, left)
        };
        let mut members = first.members.clone();
        members.extend(&second.members);
        members.sort_unstable();
        let node = n + merges.len();
        merges.push(Merge {
            left: first.node,
            right: second.node,
            height,
            size: members.len(),
        });
        active.push(Cluster {
            node,
            members,
            sum: first.sum + second.sum,
        });
    }

    Ok(Dendrogram {
        leaves: names.to_vec(),
        merges,
    })
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    /// Leaf indices under `node`, left subtree first.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let n = self.n_leaves();
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(id) = stack.pop() {
            if id < n {
                out.push(id);
            } else {
                let m = &self.merges[id - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }

    pub fn root(&self) -> Option<usize> {
        match (self.n_leaves(), self.merges.len()) {
            (0, _) => None,
            (_, 0) => Some(0),
            (n, m) => Some(n + m - 1),
        }
    }

    /// Leaf order for drawing: an in-order walk of the tree, so no edges cross.
    pub fn leaf_order(&self) -> Vec<usize> {
        self.root().map(|r| self.leaves_under(r)).unwrap_or_default()
    }

    /// Partition into `k` clusters by undoing the last `k - 1` merges.
    /// Each cluster lists leaf indices ascending; clusters are ordered by
    /// their smallest leaf.
    pub fn cut(&self, k: usize) -> Result<Vec<Vec<usize>>> {
        let n = self.n_leaves();
        if k == 0 || k > n {
            return Err(TrecError::InvalidArgument(format!(
                "cannot cut {n} leaves into {k} clusters"
            )));
        }
        let kept = n - k;
        let mut parent: Vec<usize> = (0..n + kept).collect();
        for (i, m) in self.merges.iter().take(kept).enumerate() {
            parent[m.left] = n + i;
            parent[m.right] = n + i;
        }
        let find = |mut x: usize| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        };
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for leaf in 0..n {
            let r = find(leaf);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, members)) => members.push(leaf),
                None => groups.push((r, vec![leaf])),
            }
        }
        Ok(groups.into_iter().map(|(_, m)| m).collect())
    }

    /// Nested-parenthesis form: a leaf is its name, a merge is
    /// `(left,right):height`.
    pub fn to_text(&self) -> String {
        fn walk(d: &Dendrogram, id: usize, out: &mut String) {
            let n = d.n_leaves();
            if id < n {
                out.push_str(&d.leaves[id]);
            } else {
                let m = &d.merges[id - n];
                out.push('(');
                walk(d, m.left, out);
                out.push(',');
                walk(d, m.right, out);
                out.push_str(&format!("):{}", m.height));
            }
        }
        let mut out = String::new();
        if let Some(r) = self.root() {
            walk(self, r, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("V{i}")).collect()
    }

    #[test]
    fn two_points() {
        let d = centroid_linkage(&names(2), &[1.5, -2.0]).unwrap();
        assert_eq!(d.merges.len(), 1);
        assert_eq!(d.merges[0].height, 3.5);
        assert_eq!(d.cut(2).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(d.to_text(), "(V1,V2):3.5");
    }

    #[test]
    fn separated_groups() {
        let d = centroid_linkage(&names(3), &[10.0, 9.0, -10.0]).unwrap();
        assert_eq!(d.cut(2).unwrap(), vec![vec![0, 1], vec![2]]);
        assert_eq!(d.merges[1].height, 19.5);
        assert_eq!(d.leaf_order().len(), 3);
    }

    #[test]
    fn single_leaf() {
        let d = centroid_linkage(&names(1), &[3.0]).unwrap();
        assert!(d.merges.is_empty());
        assert_eq!(d.leaf_order(), vec![0]);
        assert_eq!(d.to_text(), "V1");
        assert!(d.cut(2).is_err());
    }

    #[test]
    fn tie_prefers_smallest_indices() {
        // V1-V2 and V2-V3 are both at distance 1; V1,V2 merge first.
        let d = centroid_linkage(&names(3), &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!((d.merges[0].left, d.merges[0].right), (0, 1));
    }
}
