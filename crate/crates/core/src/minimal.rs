//! Minimal about-partitions and their tree normal form.
//!
//! A partition about `x` is *minimal* when `ν = β + 1` at `x`.  Minimal
//! about-partitions are exactly the partitions obtained by `k = β`
//! successive hyperplane splits through `x` along distinct axes, where at
//! each step exactly one intermediate box is split in two.  The splitting
//! schedule is recorded by a *labelled full simple tree*: `k + 1` levels,
//! exactly one node per non-terminal level with two children (labelled
//! `+1`/`-1`), lone children labelled `0`.  This module builds partitions
//! from `(indices, tree)` data, recovers the data from a partition by
//! repeatedly merging sibling pieces, and enumerates all minimal
//! about-partitions of given rank.
//!
//! A useful rigidity fact used throughout: in a partition about `x`, every
//! face of a piece either passes through `x` or lies on the window boundary,
//! so a piece is determined by its boundary-incidence row.  Pieces and
//! matrix rows are interchangeable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Point, Rect};
use crate::matrix::principal_matrix;
use crate::partition::{AboutPartition, LocalPartition, PartitionError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MinimalError {
    #[error("tree is not a labelled full simple tree: {0}")]
    BadTree(String),
    #[error("indices must be distinct axes below the dimension")]
    BadIndices,
    #[error("index count {0} does not match tree levels {1}")]
    IndexTreeMismatch(usize, usize),
    #[error("no sibling pair with opposite incidence exists")]
    NoEjPair,
    #[error("partition is not minimal about its base point")]
    NotMinimal,
    #[error("base point must be interior to the window")]
    PointNotInterior,
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A node of a labelled simple tree.  `label` is `+1` or `-1` for sibling
/// pairs and `0` for lone children and the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub label: i8,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(label: i8) -> Self {
        TreeNode { label, children: Vec::new() }
    }

    /// Number of levels below and including this node (a leaf has 1).
    pub fn levels(&self) -> usize {
        1 + self.children.iter().map(|c| c.levels()).max().unwrap_or(0)
    }

    fn nodes_at_level(&self, level: usize) -> Vec<&TreeNode> {
        if level == 0 {
            return vec![self];
        }
        self.children
            .iter()
            .flat_map(|c| c.nodes_at_level(level - 1))
            .collect()
    }

    /// Child with the given label, for split nodes.
    fn child_labelled(&self, label: i8) -> Option<&TreeNode> {
        self.children.iter().find(|c| c.label == label)
    }
}

/// Check the labelled-full-simple-tree axioms and return `k` (levels − 1).
pub fn validate_full_simple_tree(root: &TreeNode) -> Result<usize, MinimalError> {
    if root.label != 0 {
        return Err(MinimalError::BadTree("root must be labelled 0".into()));
    }
    let k = root.levels() - 1;
    for level in 0..=k {
        let nodes = root.nodes_at_level(level);
        let mut splits = 0;
        for node in &nodes {
            match node.children.len() {
                0 => {
                    if level != k {
                        return Err(MinimalError::BadTree(format!(
                            "terminal above the last level ({level} < {k})"
                        )));
                    }
                }
                1 => {
                    if node.children[0].label != 0 {
                        return Err(MinimalError::BadTree("lone child must be labelled 0".into()));
                    }
                }
                2 => {
                    splits += 1;
                    let mut labels: Vec<i8> = node.children.iter().map(|c| c.label).collect();
                    labels.sort_unstable();
                    if labels != vec![-1, 1] {
                        return Err(MinimalError::BadTree(
                            "sibling pair must be labelled {+1, -1}".into(),
                        ));
                    }
                }
                _ => return Err(MinimalError::BadTree("node with more than two children".into())),
            }
        }
        if level < k && splits != 1 {
            return Err(MinimalError::BadTree(format!(
                "level {level} has {splits} split nodes, expected exactly 1"
            )));
        }
        if level == k && splits != 0 {
            return Err(MinimalError::BadTree("terminal level cannot split".into()));
        }
    }
    Ok(k)
}

/// Remove the all-singleton levels `ℓ > 0` of a simple tree, returning the
/// derived tree together with the removed level indices in increasing order.
fn derive(root: &TreeNode) -> (TreeNode, Vec<usize>) {
    let mut tree = root.clone();
    tree.label = 0;
    let k = tree.levels() - 1;
    let mut removed = Vec::new();
    for level in 1..=k {
        let all_singletons = tree
            .nodes_at_level(level)
            .iter()
            .all(|node| node.label == 0);
        // A level is all-singleton exactly when no node on it has a sibling;
        // siblings are the labelled ±1 nodes.
        if all_singletons {
            removed.push(level);
        }
    }
    for &level in removed.iter().rev() {
        remove_level(&mut tree, level);
    }
    (tree, removed)
}

fn remove_level(node: &mut TreeNode, level: usize) {
    if level == 1 {
        debug_assert_eq!(node.children.len(), 1);
        let only = node.children.remove(0);
        node.children = only.children;
    } else {
        for c in &mut node.children {
            remove_level(c, level - 1);
        }
    }
}

/// Build the minimal partition of `window` about `x` encoded by distinct
/// axes `indices` and a labelled full simple tree with `indices.len() + 1`
/// levels.  The result has exactly `k + 1` pieces and is minimal.
pub fn build_from_tree(
    window: &Rect,
    x: &Point,
    indices: &[usize],
    tree: &TreeNode,
) -> Result<AboutPartition, MinimalError> {
    let n = window.dim_ambient();
    if !window.interior_contains_point(x) {
        return Err(MinimalError::PointNotInterior);
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n || seen[i] {
            return Err(MinimalError::BadIndices);
        }
        seen[i] = true;
    }
    let k = validate_full_simple_tree(tree)?;
    if k != indices.len() {
        return Err(MinimalError::IndexTreeMismatch(indices.len(), tree.levels()));
    }
    let pieces = build_rec(window.clone(), x, indices, tree);
    let base = LocalPartition::new(window.clone(), pieces)?;
    let ap = AboutPartition::new(base, x.clone())?;
    debug_assert!(ap.is_minimal_about());
    Ok(ap)
}

fn build_rec(region: Rect, x: &Point, indices: &[usize], tree: &TreeNode) -> Vec<Rect> {
    if indices.is_empty() {
        return vec![region];
    }
    let axis = indices[0];
    let mut minus = region.clone();
    minus.hi[axis] = x.0[axis];
    let mut plus = region;
    plus.lo[axis] = x.0[axis];

    let t_plus = tree.child_labelled(1).expect("validated split node");
    let t_minus = tree.child_labelled(-1).expect("validated split node");
    let (derived_plus, removed_in_minus) = {
        let (dp, _) = derive(t_plus);
        let (_, rm) = derive(t_minus);
        (dp, rm)
    };
    let (derived_minus, removed_in_plus) = {
        let (dm, _) = derive(t_minus);
        let (_, rp) = derive(t_plus);
        (dm, rp)
    };
    // Levels that are singleton on one side carry the splits of the other
    // side: the removed level indices of the minus subtree are exactly the
    // (0-based) positions into `indices[1..]`… shifted so that removed level
    // j of the subtree is original position j of the full index list.
    let plus_indices: Vec<usize> = removed_in_minus.iter().map(|&j| indices[j]).collect();
    let minus_indices: Vec<usize> = removed_in_plus.iter().map(|&j| indices[j]).collect();
    debug_assert_eq!(plus_indices.len() + 1, derived_plus.levels());
    debug_assert_eq!(minus_indices.len() + 1, derived_minus.levels());
    debug_assert_eq!(plus_indices.len() + minus_indices.len() + 1, indices.len());
    let mut pieces = build_rec(minus, x, &minus_indices, &derived_minus);
    pieces.extend(build_rec(plus, x, &plus_indices, &derived_plus));
    pieces
}

/// Find two pieces whose incidence rows at the base point differ in exactly
/// one axis, where they carry opposite nonzero signs.  Returns
/// `(axis, plus piece, minus piece)` for the first such pair in scan order.
pub fn find_ej_pair(ap: &AboutPartition) -> Result<(usize, usize, usize), MinimalError> {
    let m = principal_matrix(ap.pieces(), ap.x()).expect("about-partition rows");
    let rows = &m.rows;
    for j in 0..m.cols() {
        for a in 0..rows.len() {
            for b in 0..rows.len() {
                if a == b || rows[a][j] != 1 || rows[b][j] != -1 {
                    continue;
                }
                let elsewhere_equal =
                    (0..m.cols()).all(|i| i == j || rows[a][i] == rows[b][i]);
                if elsewhere_equal {
                    return Ok((j, a, b));
                }
            }
        }
    }
    Err(MinimalError::NoEjPair)
}

/// Merge an `e_j`-pair into one piece.  The union is a box because the two
/// pieces agree away from `j` and abut at the base coordinate on `j`; the
/// result is again a partition about the same point with `β` reduced by
/// exactly one.
pub fn merge_ej_pair(
    ap: &AboutPartition,
    axis: usize,
    plus: usize,
    minus: usize,
) -> Result<AboutPartition, MinimalError> {
    let pieces = ap.pieces();
    let p = &pieces[plus];
    let q = &pieces[minus];
    for i in 0..ap.dim() {
        if i != axis && (p.lo[i] != q.lo[i] || p.hi[i] != q.hi[i]) {
            return Err(MinimalError::BadTree(
                "pair does not merge to a box".into(),
            ));
        }
    }
    if p.lo[axis] != q.hi[axis] {
        return Err(MinimalError::BadTree("pair does not abut at the base point".into()));
    }
    let merged = Rect::new(q.lo.clone(), p.hi.clone());
    let (_, beta_before) = ap.stats();
    let mut rest: Vec<Rect> = pieces
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != plus && i != minus)
        .map(|(_, r)| r.clone())
        .collect();
    rest.push(merged);
    let base = LocalPartition::new(ap.window().clone(), rest)?;
    let out = AboutPartition::new(base, ap.x().clone())?;
    let (_, beta_after) = out.stats();
    debug_assert_eq!(beta_after + 1, beta_before);
    Ok(out)
}

/// The normal form of a minimal about-partition: axes in split order and the
/// labelled full simple tree.  Recovered by repeatedly merging a sibling
/// pair; the pair found at step `k - ℓ` becomes the split on level `ℓ`.
pub fn canonical_form(ap: &AboutPartition) -> Result<(Vec<usize>, TreeNode), MinimalError> {
    if !ap.is_minimal_about() {
        return Err(MinimalError::NotMinimal);
    }
    let (indices, tree, _) = canonical_rec(ap)?;
    Ok((indices, tree))
}

/// Returns `(indices, tree, terminal order)` where the terminal order lists,
/// for each terminal in DFS order (label `-1` child first), the index of the
/// corresponding piece of `ap`.
fn canonical_rec(ap: &AboutPartition) -> Result<(Vec<usize>, TreeNode, Vec<usize>), MinimalError> {
    let (nu, beta) = ap.stats();
    debug_assert_eq!(nu, beta + 1);
    if beta == 0 {
        return Ok((Vec::new(), TreeNode::leaf(0), vec![0]));
    }
    let (axis, plus, minus) = find_ej_pair(ap)?;
    let merged = merge_ej_pair(ap, axis, plus, minus)?;
    // merge_ej_pair keeps the unmerged pieces first, in order, and appends
    // the merged piece last.
    let survivors: Vec<usize> = (0..ap.pieces().len())
        .filter(|&i| i != plus && i != minus)
        .collect();
    let merged_idx = survivors.len();
    let (mut indices, mut tree, terminal_order) = canonical_rec(&merged)?;
    indices.push(axis);
    let mut new_order = Vec::new();
    let mut order_iter = terminal_order.iter();
    extend_terminals(&mut tree, &mut |_| {
        let &piece = order_iter.next().expect("one terminal per order entry");
        if piece == merged_idx {
            new_order.push(minus);
            new_order.push(plus);
            vec![TreeNode::leaf(-1), TreeNode::leaf(1)]
        } else {
            new_order.push(survivors[piece]);
            vec![TreeNode::leaf(0)]
        }
    });
    Ok((indices, tree, new_order))
}

/// Append children to every terminal, DFS order with the `-1` child first.
fn extend_terminals(node: &mut TreeNode, f: &mut impl FnMut(&TreeNode) -> Vec<TreeNode>) {
    if node.children.is_empty() {
        node.children = f(node);
        return;
    }
    node.children.sort_by_key(|c| c.label);
    for c in &mut node.children {
        extend_terminals(c, f);
    }
}

/// All labelled full simple trees with `k + 1` levels; there are `k!`.
pub fn enumerate_trees(k: usize) -> Vec<TreeNode> {
    let mut trees = vec![TreeNode::leaf(0)];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &trees {
            let terminals = count_terminals(t);
            for split in 0..terminals {
                let mut s = t.clone();
                let mut idx = 0;
                extend_terminals(&mut s, &mut |_| {
                    let children = if idx == split {
                        vec![TreeNode::leaf(-1), TreeNode::leaf(1)]
                    } else {
                        vec![TreeNode::leaf(0)]
                    };
                    idx += 1;
                    children
                });
                next.push(s);
            }
        }
        trees = next;
    }
    trees
}

fn count_terminals(node: &TreeNode) -> usize {
    if node.children.is_empty() {
        1
    } else {
        node.children.iter().map(count_terminals).sum()
    }
}

/// Every minimal partition of `window` about `x` with exactly `k` boundary
/// axes, without duplicates.  Covers all axis selections, orders, and trees.
pub fn enumerate_minimal_about(
    window: &Rect,
    x: &Point,
    k: usize,
) -> Result<Vec<AboutPartition>, MinimalError> {
    let n = window.dim_ambient();
    if k > n {
        return Err(MinimalError::BadIndices);
    }
    let trees = enumerate_trees(k);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for indices in permutations_of_size(n, k) {
        for tree in &trees {
            let ap = build_from_tree(window, x, &indices, tree)?;
            let mut key: Vec<Rect> = ap.pieces().to_vec();
            key.sort();
            if seen.insert(key) {
                out.push(ap);
            }
        }
    }
    Ok(out)
}

fn permutations_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(n, k, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(n, k, &mut current, &mut used, &mut out);
    out
}

/// Project the pieces on the `sign` side of the hyperplane through `x`
/// normal to `axis`: keep the pieces whose incidence is not `-sign`, drop
/// the axis.  The result is a partition about the projected point, and its
/// principal matrix is the half matrix of the original.
pub fn project_halves(
    ap: &AboutPartition,
    axis: usize,
    sign: i8,
) -> Result<AboutPartition, MinimalError> {
    assert!(sign == 1 || sign == -1);
    let m = principal_matrix(ap.pieces(), ap.x()).expect("about-partition rows");
    let pieces: Vec<Rect> = ap
        .pieces()
        .iter()
        .zip(&m.rows)
        .filter(|(_, row)| row[axis] != -sign)
        .map(|(p, _)| p.drop_axis(axis))
        .collect();
    let base = LocalPartition::new(ap.window().drop_axis(axis), pieces)?;
    Ok(AboutPartition::new(base, ap.x().drop_axis(axis))?)
}

/// Two about-partitions at the same point are orthogonal when no axis is a
/// boundary direction of both.
pub fn are_orthogonal_about(a: &AboutPartition, b: &AboutPartition) -> bool {
    let (_, _, axes_a) = a.base().point_stats(a.x());
    let (_, _, axes_b) = b.base().point_stats(b.x());
    axes_a.iter().all(|j| !axes_b.contains(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::submatrix_half;

    fn window(n: usize) -> Rect {
        Rect::new(vec![-2; n], vec![2; n])
    }

    fn split_pair(k_minus_child_splits: bool) -> TreeNode {
        // Two-level helper trees for k = 2.
        let split = vec![TreeNode::leaf(-1), TreeNode::leaf(1)];
        let lone = vec![TreeNode::leaf(0)];
        TreeNode {
            label: 0,
            children: vec![
                TreeNode {
                    label: -1,
                    children: if k_minus_child_splits { split.clone() } else { lone.clone() },
                },
                TreeNode {
                    label: 1,
                    children: if k_minus_child_splits { lone } else { split },
                },
            ],
        }
    }

    #[test]
    fn build_produces_k_plus_one_pieces() {
        let ap = build_from_tree(&window(2), &Point::origin(2), &[0, 1], &split_pair(true))
            .unwrap();
        assert_eq!(ap.pieces().len(), 3);
        assert!(ap.is_minimal_about());
        let mut pieces = ap.pieces().to_vec();
        pieces.sort();
        assert_eq!(
            pieces,
            vec![
                Rect::from_pairs(&[(-2, 0), (-2, 0)]),
                Rect::from_pairs(&[(-2, 0), (0, 2)]),
                Rect::from_pairs(&[(0, 2), (-2, 2)]),
            ]
        );
    }

    #[test]
    fn rank_two_enumeration_in_the_plane_has_four_members() {
        let all = enumerate_minimal_about(&window(2), &Point::origin(2), 2).unwrap();
        assert_eq!(all.len(), 4);
        for ap in &all {
            assert_eq!(ap.pieces().len(), 3);
        }
    }

    #[test]
    fn round_trip_through_canonical_form() {
        for n in 1..=3usize {
            for k in 0..=n {
                for ap in enumerate_minimal_about(&window(n), &Point::origin(n), k).unwrap() {
                    let (indices, tree) = canonical_form(&ap).unwrap();
                    let rebuilt =
                        build_from_tree(&window(n), &Point::origin(n), &indices, &tree).unwrap();
                    let mut a = ap.pieces().to_vec();
                    let mut b = rebuilt.pieces().to_vec();
                    a.sort();
                    b.sort();
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn octant_merge_has_no_sibling_pair() {
        let ap = crate::partition::tests::octant_merge_partition();
        assert_eq!(find_ej_pair(&ap), Err(MinimalError::NoEjPair));
        assert_eq!(canonical_form(&ap), Err(MinimalError::NotMinimal));
    }

    #[test]
    fn merging_reduces_beta_by_one() {
        let ap = build_from_tree(&window(3), &Point::origin(3), &[2, 0], &split_pair(false))
            .unwrap();
        let (axis, plus, minus) = find_ej_pair(&ap).unwrap();
        let merged = merge_ej_pair(&ap, axis, plus, minus).unwrap();
        let (nu, beta) = merged.stats();
        assert_eq!((nu, beta), (2, 1));
    }

    #[test]
    fn projection_matches_the_half_matrix() {
        for ap in enumerate_minimal_about(&window(3), &Point::origin(3), 3).unwrap() {
            let m = principal_matrix(ap.pieces(), ap.x()).unwrap();
            for axis in 0..3 {
                for sign in [1i8, -1] {
                    let projected = project_halves(&ap, axis, sign).unwrap();
                    let got = principal_matrix(projected.pieces(), projected.x()).unwrap();
                    let expected = submatrix_half(&m, axis, sign).unwrap();
                    assert_eq!(got, expected);
                }
            }
        }
    }

    #[test]
    fn tree_count_is_factorial() {
        assert_eq!(enumerate_trees(0).len(), 1);
        assert_eq!(enumerate_trees(1).len(), 1);
        assert_eq!(enumerate_trees(2).len(), 2);
        assert_eq!(enumerate_trees(3).len(), 6);
        assert_eq!(enumerate_trees(4).len(), 24);
    }

    #[test]
    fn invalid_trees_are_rejected() {
        // Two splits on one level.
        let double = TreeNode {
            label: 0,
            children: vec![
                TreeNode {
                    label: -1,
                    children: vec![TreeNode::leaf(-1), TreeNode::leaf(1)],
                },
                TreeNode {
                    label: 1,
                    children: vec![TreeNode::leaf(-1), TreeNode::leaf(1)],
                },
            ],
        };
        assert!(validate_full_simple_tree(&double).is_err());
        // No split between the root and the terminals.
        let chain = TreeNode {
            label: 0,
            children: vec![TreeNode { label: 0, children: vec![TreeNode::leaf(0)] }],
        };
        assert!(validate_full_simple_tree(&chain).is_err());
        // Mislabelled sibling pair.
        let twins = TreeNode {
            label: 0,
            children: vec![TreeNode::leaf(1), TreeNode::leaf(1)],
        };
        assert!(validate_full_simple_tree(&twins).is_err());
        // Repeated axis in the index list.
        let ok_tree = TreeNode {
            label: 0,
            children: vec![TreeNode::leaf(-1), TreeNode::leaf(1)],
        };
        assert!(matches!(
            build_from_tree(&window(2), &Point::origin(2), &[0, 0], &ok_tree),
            Err(MinimalError::BadIndices | MinimalError::IndexTreeMismatch(..))
        ));
    }

    #[test]
    fn orthogonality_is_disjoint_boundary_axes() {
        let a = build_from_tree(
            &window(2),
            &Point::origin(2),
            &[0],
            &TreeNode { label: 0, children: vec![TreeNode::leaf(-1), TreeNode::leaf(1)] },
        )
        .unwrap();
        let b = build_from_tree(
            &window(2),
            &Point::origin(2),
            &[1],
            &TreeNode { label: 0, children: vec![TreeNode::leaf(-1), TreeNode::leaf(1)] },
        )
        .unwrap();
        assert!(are_orthogonal_about(&a, &b));
        assert!(!are_orthogonal_about(&a, &a));
    }
}
