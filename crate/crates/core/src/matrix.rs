//! Principal matrices and the separative recursion.
//!
//! At a point `x` of a partition, each piece contributes a row over
//! `{-1, 0, +1}`: its boundary incidence at `x`.  The *separative* predicate
//! is defined by recursion on the number of columns: a one-column matrix is
//! separative when the column is constantly zero or contains both signs; a
//! `k`-column matrix is separative when all `2k` half matrices obtained by
//! fixing a side of one column are.  Separativeness is what forces
//! `ν ≥ β + 1`: a separative matrix keeps at least `β + 1` rows.
//!
//! Matrices with no rows are *not* separative: the empty family covers
//! nothing, and admitting it would break the row-count bound.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{boundary_incidence, Point, Rect};
use crate::partition::PartitionError;

/// A matrix over `{-1, 0, +1}` whose rows are boundary-incidence vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrincipalMatrix {
    pub rows: Vec<Vec<i8>>,
}

impl PrincipalMatrix {
    pub fn new(rows: Vec<Vec<i8>>) -> Self {
        if let Some(first) = rows.first() {
            let k = first.len();
            assert!(rows.iter().all(|r| r.len() == k), "ragged rows");
        }
        assert!(
            rows.iter().flatten().all(|&e| (-1..=1).contains(&e)),
            "entries must be -1, 0, or +1"
        );
        PrincipalMatrix { rows }
    }

    pub fn cols(&self) -> usize {
        self.rows.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Number of columns containing a nonzero entry (the boundary rank β).
    pub fn boundary_rank(&self) -> usize {
        (0..self.cols())
            .filter(|&j| self.rows.iter().any(|r| r[j] != 0))
            .count()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("piece {0} does not contain the base point")]
    PieceMissesPoint(usize),
    #[error("matrix is not separative; cover is not guaranteed")]
    NotSeparative,
    #[error("column {0} out of range")]
    ColumnOutOfRange(usize),
    #[error("axis {0} is not a boundary direction of the family")]
    NotBoundaryAxis(usize),
}

/// The principal matrix of a family of boxes at a common point.
pub fn principal_matrix(pieces: &[Rect], x: &Point) -> Result<PrincipalMatrix, MatrixError> {
    let mut rows = Vec::with_capacity(pieces.len());
    for (i, p) in pieces.iter().enumerate() {
        match boundary_incidence(p, x) {
            Some(r) => rows.push(r),
            None => return Err(MatrixError::PieceMissesPoint(i)),
        }
    }
    Ok(PrincipalMatrix::new(rows))
}

/// Remove column `j` and every row whose `j` entry is `-sign`: the rows that
/// survive on the `sign` side of the hyperplane through `x` normal to `e_j`.
pub fn submatrix_half(
    m: &PrincipalMatrix,
    j: usize,
    sign: i8,
) -> Result<PrincipalMatrix, MatrixError> {
    if j >= m.cols() {
        return Err(MatrixError::ColumnOutOfRange(j));
    }
    assert!(sign == 1 || sign == -1);
    let rows = m
        .rows
        .iter()
        .filter(|r| r[j] != -sign)
        .map(|r| {
            let mut s = r.clone();
            s.remove(j);
            s
        })
        .collect();
    Ok(PrincipalMatrix { rows })
}

/// Memo table for the separative recursion, keyed on the sorted distinct
/// rows: separativeness depends only on the set of rows, and every half
/// matrix of a set is again computed from the set.
#[derive(Default)]
pub struct SeparativeCache {
    memo: HashMap<Vec<Vec<i8>>, bool>,
}

impl SeparativeCache {
    pub fn is_separative(&mut self, m: &PrincipalMatrix) -> bool {
        let mut rows = m.rows.clone();
        rows.sort_unstable();
        rows.dedup();
        self.recurse(rows)
    }

    fn recurse(&mut self, rows: Vec<Vec<i8>>) -> bool {
        if rows.is_empty() {
            return false;
        }
        let k = rows[0].len();
        if k == 0 {
            // Columns exhausted with rows remaining: the one-column base case
            // never recurses this far, so this only happens for 0-column
            // inputs, which carry no geometry.
            return false;
        }
        if k == 1 {
            let has_plus = rows.iter().any(|r| r[0] == 1);
            let has_minus = rows.iter().any(|r| r[0] == -1);
            let all_zero = rows.iter().all(|r| r[0] == 0);
            return all_zero || (has_plus && has_minus);
        }
        if let Some(&v) = self.memo.get(&rows) {
            return v;
        }
        let mut ok = true;
        'outer: for j in 0..k {
            for sign in [1i8, -1] {
                let mut half: Vec<Vec<i8>> = rows
                    .iter()
                    .filter(|r| r[j] != -sign)
                    .map(|r| {
                        let mut s = r.clone();
                        s.remove(j);
                        s
                    })
                    .collect();
                half.sort_unstable();
                half.dedup();
                if !self.recurse(half) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        self.memo.insert(rows, ok);
        ok
    }
}

/// One-shot separativeness check.
pub fn is_separative(m: &PrincipalMatrix) -> bool {
    SeparativeCache::default().is_separative(m)
}

/// The box a row describes inside the window `[-1, 1]^k` (half-units
/// `[-2, 2]^k`): `+1` picks `[0, 1]`, `-1` picks `[-1, 0]`, `0` the full
/// extent.  Every partition of that window about the origin has pieces of
/// exactly this shape, so rows and pieces are interchangeable here.
pub fn row_box(row: &[i8]) -> Rect {
    Rect::new(
        row.iter().map(|&e| if e == 1 { 0 } else { -2 }).collect(),
        row.iter().map(|&e| if e == -1 { 0 } else { 2 }).collect(),
    )
}

/// The window the row boxes live in.
pub fn row_window(k: usize) -> Rect {
    Rect::new(vec![-2; k], vec![2; k])
}

/// A family of boxes in a window, all containing a base point, that covers
/// the window — interiors may overlap.  This is the natural output shape of
/// [`cover_from_matrix`]: separativeness guarantees the cover but nothing
/// forces disjointness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AboutCover {
    pub window: Rect,
    pub pieces: Vec<Rect>,
    pub x: Point,
}

impl AboutCover {
    /// Check the covering axioms, reporting failures like the partition
    /// validator but without the disjointness requirement.
    pub fn validate(&self) -> Vec<PartitionError> {
        let mut errs = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if !p.is_full_dim() {
                errs.push(PartitionError::DegeneratePiece(i));
            }
            if !self.window.contains_rect(p) {
                errs.push(PartitionError::PieceOutsideWindow(i));
            }
            if !p.contains_point(&self.x) {
                errs.push(PartitionError::NotAbout(i));
            }
        }
        if errs.is_empty()
            && !crate::arrangement::Region::new(self.pieces.clone()).covers_rect(&self.window)
        {
            errs.push(PartitionError::CoverGap(self.window.clone()));
        }
        errs
    }
}

/// Realize a separative matrix as a cover of `[-1, 1]^k` about the origin.
/// Non-separative matrices are rejected: the converse of the cover theorem
/// fails (a matrix can cover without being separative), so covering is not
/// checked in place of the predicate.
pub fn cover_from_matrix(m: &PrincipalMatrix) -> Result<AboutCover, MatrixError> {
    if !is_separative(m) {
        return Err(MatrixError::NotSeparative);
    }
    let k = m.cols();
    Ok(AboutCover {
        window: row_window(k),
        pieces: m.rows.iter().map(|r| row_box(r)).collect(),
        x: Point::origin(k),
    })
}

/// `(ν, β, ν ≥ β + 1)` for a cover about a point, via its principal matrix.
/// `ν` counts distinct pieces (coinciding boxes are one piece).
pub fn verify_cover_bound(cover: &AboutCover) -> Result<(usize, usize, bool), MatrixError> {
    let m = principal_matrix(&cover.pieces, &cover.x)?;
    if !is_separative(&m) {
        return Err(MatrixError::NotSeparative);
    }
    let mut distinct = cover.pieces.clone();
    distinct.sort();
    distinct.dedup();
    let nu = distinct.len();
    let beta = m.boundary_rank();
    Ok((nu, beta, nu >= beta + 1))
}

/// For a set `V` of boundary axes, count the pieces incident to some axis of
/// `V` at `x` (all pieces when `V` is empty) and compare with `|V| + 1`.
pub fn boundary_subset_bound(
    pieces: &[Rect],
    x: &Point,
    v: &[usize],
) -> Result<(usize, bool), MatrixError> {
    let m = principal_matrix(pieces, x)?;
    for &axis in v {
        if axis >= m.cols() {
            return Err(MatrixError::ColumnOutOfRange(axis));
        }
        if m.rows.iter().all(|r| r[axis] == 0) {
            return Err(MatrixError::NotBoundaryAxis(axis));
        }
    }
    let count = if v.is_empty() {
        m.rows.len()
    } else {
        m.rows
            .iter()
            .filter(|r| v.iter().any(|&axis| r[axis] != 0))
            .count()
    };
    Ok((count, count >= v.len() + 1))
}

/// Bitmask of the orthants of the origin covered by a row's box: orthant
/// `ε ∈ {0,1}^k` is covered iff no axis pins the row to the other side.
pub fn row_orthant_mask(row: &[i8]) -> u32 {
    let k = row.len();
    let mut mask = 0u32;
    'orthant: for eps in 0..(1u32 << k) {
        for (i, &e) in row.iter().enumerate() {
            let positive_side = (eps >> i) & 1 == 1;
            if (e == 1 && !positive_side) || (e == -1 && positive_side) {
                continue 'orthant;
            }
        }
        mask |= 1 << eps;
    }
    mask
}

/// Enumerate all multisets of `m` rows over `{-1,0,+1}^k` for every
/// `1 ≤ m ≤ max_rows`, visiting each multiset once (row order never matters
/// for the quantities checked here).  The callback receives the rows.
pub fn for_each_row_multiset(k: usize, max_rows: usize, mut f: impl FnMut(&[Vec<i8>])) {
    let alphabet = all_rows(k);
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        alphabet: &[Vec<i8>],
        stack: &mut Vec<usize>,
        max_rows: usize,
        start: usize,
        f: &mut impl FnMut(&[Vec<i8>]),
    ) {
        if !stack.is_empty() {
            let rows: Vec<Vec<i8>> = stack.iter().map(|&i| alphabet[i].clone()).collect();
            f(&rows);
        }
        if stack.len() == max_rows {
            return;
        }
        for i in start..alphabet.len() {
            stack.push(i);
            rec(alphabet, stack, max_rows, i, f);
            stack.pop();
        }
    }
    rec(&alphabet, &mut stack, max_rows, 0, &mut f);
}

/// All `3^k` rows in lexicographic order.
pub fn all_rows(k: usize) -> Vec<Vec<i8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for r in &out {
            for e in [-1i8, 0, 1] {
                let mut s = r.clone();
                s.push(e);
                next.push(s);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::validate_local_partition;

    fn octant_merge_matrix() -> PrincipalMatrix {
        PrincipalMatrix::new(vec![
            vec![1, 0, 1],
            vec![-1, 1, 0],
            vec![-1, -1, 1],
            vec![1, 1, -1],
            vec![0, -1, -1],
        ])
    }

    #[test]
    fn octant_merge_partition_matches_its_matrix() {
        let cover = cover_from_matrix(&octant_merge_matrix()).unwrap();
        assert!(cover.validate().is_empty());
        // The boxes actually tile the window: no pair shares interior.
        assert!(validate_local_partition(&cover.window, &cover.pieces).is_empty());
        let (nu, beta, ok) = verify_cover_bound(&cover).unwrap();
        assert_eq!((nu, beta), (5, 3));
        assert!(ok);
    }

    #[test]
    fn octant_merge_matrix_is_separative() {
        assert!(is_separative(&octant_merge_matrix()));
    }

    #[test]
    fn half_matrix_drops_the_far_side() {
        let m = octant_merge_matrix();
        let h = submatrix_half(&m, 0, 1).unwrap();
        assert_eq!(h.rows, vec![vec![0, 1], vec![1, -1], vec![-1, -1]]);
    }

    #[test]
    fn covering_does_not_imply_separative() {
        // One column, rows {0, +1}: the boxes [-1,1] and [0,1] cover [-1,1],
        // but the column is neither constant zero nor two-sided.
        let m = PrincipalMatrix::new(vec![vec![0], vec![1]]);
        assert!(!is_separative(&m));
        let mask = row_orthant_mask(&m.rows[0]) | row_orthant_mask(&m.rows[1]);
        assert_eq!(mask, 0b11);
        assert_eq!(cover_from_matrix(&m), Err(MatrixError::NotSeparative));
    }

    #[test]
    fn empty_matrix_is_not_separative() {
        assert!(!is_separative(&PrincipalMatrix::new(vec![])));
    }

    #[test]
    fn one_sided_pair_is_not_separative_even_in_two_columns() {
        let m = PrincipalMatrix::new(vec![vec![1, 0], vec![1, 1]]);
        assert!(!is_separative(&m));
    }

    #[test]
    fn zero_row_is_separative_in_any_width() {
        assert!(is_separative(&PrincipalMatrix::new(vec![vec![0, 0, 0]])));
    }

    #[test]
    fn boundary_subset_bound_counts_incident_pieces() {
        let cover = cover_from_matrix(&octant_merge_matrix()).unwrap();
        // V = {0}: rows with nonzero first entry: 4 of 5.
        let (count, ok) = boundary_subset_bound(&cover.pieces, &cover.x, &[0]).unwrap();
        assert_eq!(count, 4);
        assert!(ok);
        // V = all axes: every row is incident somewhere.
        let (count, ok) = boundary_subset_bound(&cover.pieces, &cover.x, &[0, 1, 2]).unwrap();
        assert_eq!(count, 5);
        assert!(ok);
        // Empty V counts the whole family.
        let (count, ok) = boundary_subset_bound(&cover.pieces, &cover.x, &[]).unwrap();
        assert_eq!(count, 5);
        assert!(ok);
    }

    #[test]
    fn boundary_subset_bound_rejects_inactive_axes() {
        let pieces = vec![row_box(&[0, 0])];
        let err = boundary_subset_bound(&pieces, &Point::origin(2), &[1]).unwrap_err();
        assert_eq!(err, MatrixError::NotBoundaryAxis(1));
    }

    #[test]
    fn multiset_enumeration_counts() {
        // 1 column: 3 rows; multisets of size <= 2: 3 + 6 = 9.
        let mut count = 0;
        for_each_row_multiset(1, 2, |_| count += 1);
        assert_eq!(count, 9);
    }

    #[test]
    fn row_boxes_partition_iff_orthant_masks_tile() {
        // Cross-check the bitmask tiling oracle against the geometric
        // validator on every 2-column multiset of up to 4 rows.
        let window = row_window(2);
        for_each_row_multiset(2, 4, |rows| {
            let mut union = 0u32;
            let mut disjoint = true;
            for r in rows {
                let m = row_orthant_mask(r);
                if union & m != 0 {
                    disjoint = false;
                }
                union |= m;
            }
            let exact = disjoint && union == 0b1111;
            let boxes: Vec<Rect> = rows.iter().map(|r| row_box(r)).collect();
            let valid = validate_local_partition(&window, &boxes).is_empty();
            assert_eq!(exact, valid, "mask oracle disagrees on {rows:?}");
        });
    }
}
