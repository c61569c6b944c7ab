//! Local partitions of a window box and partitions about a point.
//!
//! A *local partition* is a finite family of full-dimensional boxes inside a
//! window that covers the window and has pairwise disjoint interiors.  It is
//! *about* a point `x` when every piece contains `x`; equivalently every
//! internal face passes through `x`.  The central quantities at a point are
//! `ν` (number of containing pieces) and `β` (number of axes along which the
//! point lies on a face of a containing piece); a partition is *minimal* at
//! `x` when `ν = β + 1`, the smallest value the separativeness bound allows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{cell_stats, point_stats, Arrangement, Cell};
use crate::geom::{Point, Rect};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("piece {0} is not full-dimensional")]
    DegeneratePiece(usize),
    #[error("piece {0} is not contained in the window")]
    PieceOutsideWindow(usize),
    #[error("window is not covered on the cell {0:?}")]
    CoverGap(Rect),
    #[error("pieces {0} and {1} share interior on the cell {2:?}")]
    Overlap(usize, usize, Rect),
    #[error("piece {0} does not contain the base point")]
    NotAbout(usize),
    #[error("point {0:?} is not interior to the window")]
    NotInterior(Point),
    #[error("no pieces given")]
    Empty,
    #[error("{0}")]
    Other(String),
}

/// Check the local-partition axioms, reporting every failure found with a
/// cell witness.  An empty report means the family is a valid partition.
pub fn validate_local_partition(window: &Rect, pieces: &[Rect]) -> Vec<PartitionError> {
    let mut errs = Vec::new();
    if pieces.is_empty() {
        errs.push(PartitionError::Empty);
        return errs;
    }
    for (i, p) in pieces.iter().enumerate() {
        if !p.is_full_dim() {
            errs.push(PartitionError::DegeneratePiece(i));
        }
        if !window.contains_rect(p) {
            errs.push(PartitionError::PieceOutsideWindow(i));
        }
    }
    if !errs.is_empty() {
        return errs;
    }
    let n = window.dim_ambient();
    let mut all: Vec<&Rect> = pieces.iter().collect();
    all.push(window);
    let arr = Arrangement::from_rects(n, all.into_iter());
    arr.for_each_cell_in(window, |cell| {
        if cell.at.iter().any(|&a| a) {
            return; // cover and overlap are decided on full-dimensional cells
        }
        let mut first = None;
        for (k, p) in pieces.iter().enumerate() {
            if p.contains_rect(&cell.rect) {
                match first {
                    None => first = Some(k),
                    Some(j) => {
                        errs.push(PartitionError::Overlap(j, k, cell.rect.clone()));
                        return;
                    }
                }
            }
        }
        if first.is_none() {
            errs.push(PartitionError::CoverGap(cell.rect.clone()));
        }
    });
    errs
}

/// A validated partition of a window into full-dimensional boxes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPartition {
    window: Rect,
    pieces: Vec<Rect>,
}

impl LocalPartition {
    pub fn new(window: Rect, pieces: Vec<Rect>) -> Result<Self, PartitionError> {
        match validate_local_partition(&window, &pieces).into_iter().next() {
            None => Ok(LocalPartition { window, pieces }),
            Some(e) => Err(e),
        }
    }

    /// Trusted constructor for callers that re-verify validity separately
    /// (large generated partitions whose axioms are checked by scan).
    pub fn from_parts_unchecked(window: Rect, pieces: Vec<Rect>) -> Self {
        LocalPartition { window, pieces }
    }

    pub fn window(&self) -> &Rect {
        &self.window
    }

    pub fn pieces(&self) -> &[Rect] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.window.dim_ambient()
    }

    /// `(ν, β, boundary axes)` at a point of the window.
    pub fn point_stats(&self, x: &Point) -> (usize, usize, Vec<usize>) {
        point_stats(x, &self.pieces)
    }

    /// First interior cell where `ν ≠ β + 1`, if any.  The scan covers every
    /// cell of the face decomposition, not only vertices: a violation can
    /// live on a positive-dimensional cell whose closure meets no interior
    /// vertex (four full-height columns meeting along an edge do exactly
    /// that), so vertices alone would under-report.
    pub fn minimality_violation(&self) -> Option<Cell> {
        let n = self.dim();
        let mut all: Vec<&Rect> = self.pieces.iter().collect();
        all.push(&self.window);
        let arr = Arrangement::from_rects(n, all.into_iter());
        let mut found = None;
        arr.for_each_interior_cell(&self.window, |cell| {
            if found.is_some() {
                return;
            }
            let (containing, axes) = cell_stats(cell, &self.pieces);
            if containing.len() != axes.len() + 1 {
                found = Some(cell.clone());
            }
        });
        found
    }

    /// True when `ν = β + 1` holds at every interior point.
    pub fn is_minimal_local(&self) -> bool {
        self.minimality_violation().is_none()
    }

    /// Restrict to a sub-window: pieces are clipped and degenerate clips are
    /// dropped.  The result is always a valid partition of `sub`.
    pub fn restrict(&self, sub: &Rect) -> Result<LocalPartition, PartitionError> {
        if !self.window.contains_rect(sub) {
            return Err(PartitionError::Other(format!(
                "restriction window {sub:?} exceeds the partition window"
            )));
        }
        let pieces = restrict_pieces(&self.pieces, sub);
        LocalPartition::new(sub.clone(), pieces)
    }

    /// Cross-section at `level` on `axis`, which must not be a face level of
    /// any piece: the cut pieces project to a partition one dimension down.
    pub fn slice_at(&self, axis: usize, level: i64) -> Result<LocalPartition, PartitionError> {
        if level <= self.window.lo[axis] || level >= self.window.hi[axis] {
            return Err(PartitionError::Other(format!(
                "slice level {level} is not interior to the window on axis {axis}"
            )));
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if p.lo[axis] == level || p.hi[axis] == level {
                return Err(PartitionError::Other(format!(
                    "slice level {level} is a face level of piece {i}"
                )));
            }
        }
        let pieces: Vec<Rect> = self
            .pieces
            .iter()
            .filter(|p| p.lo[axis] < level && level < p.hi[axis])
            .map(|p| p.drop_axis(axis))
            .collect();
        LocalPartition::new(self.window.drop_axis(axis), pieces)
    }
}

/// Clip every piece to `sub`, keeping the full-dimensional clips.
pub fn restrict_pieces(pieces: &[Rect], sub: &Rect) -> Vec<Rect> {
    pieces
        .iter()
        .filter_map(|p| p.intersect(sub))
        .filter(|q| q.is_full_dim())
        .collect()
}

/// A partition about a base point: every piece contains `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AboutPartition {
    base: LocalPartition,
    x: Point,
}

impl AboutPartition {
    pub fn new(base: LocalPartition, x: Point) -> Result<Self, PartitionError> {
        for (i, p) in base.pieces().iter().enumerate() {
            if !p.contains_point(&x) {
                return Err(PartitionError::NotAbout(i));
            }
        }
        Ok(AboutPartition { base, x })
    }

    pub fn base(&self) -> &LocalPartition {
        &self.base
    }

    pub fn x(&self) -> &Point {
        &self.x
    }

    pub fn window(&self) -> &Rect {
        self.base.window()
    }

    pub fn pieces(&self) -> &[Rect] {
        self.base.pieces()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `(ν, β)` at the base point.
    pub fn stats(&self) -> (usize, usize) {
        let (nu, beta, _) = self.base.point_stats(&self.x)        ;
        (nu, beta)
    }

    /// Minimality at the base point: `ν = β + 1`.
    pub fn is_minimal_about(&self) -> bool {
        let (nu, beta) = self.stats();
        nu == beta + 1
    }
}

/// Localize a partition about an interior point `x`: pick the box bounded by
/// the nearest face coordinates strictly on either side of `x` per axis
/// (window faces included), intersect with every piece having `x` interior,
/// and restrict.  Every surviving piece contains `x`, so the restriction is
/// a partition about `x` of the same `(ν, β)`.
pub fn localize_about(
    partition: &LocalPartition,
    x: &Point,
) -> Result<AboutPartition, PartitionError> {
    let window = partition.window();
    if !window.interior_contains_point(x) {
        return Err(PartitionError::NotInterior(x.clone()));
    }
    let n = partition.dim();
    let mut all: Vec<&Rect> = partition.pieces().iter().collect();
    all.push(window);
    let arr = Arrangement::from_rects(n, all.into_iter());
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let prev = arr.coords[i]
            .iter()
            .copied()
            .filter(|&c| c < x.0[i])
            .max()
            .ok_or_else(|| PartitionError::NotInterior(x.clone()))?;
        let next = arr.coords[i]
            .iter()
            .copied()
            .filter(|&c| c > x.0[i])
            .min()
            .ok_or_else(|| PartitionError::NotInterior(x.clone()))?;
        lo.push(prev);
        hi.push(next);
    }
    let mut rx = Rect::new(lo, hi);
    for p in partition.pieces() {
        if p.interior_contains_point(x) {
            rx = rx
                .intersect(p)
                .expect("interior-containing piece meets the localization box");
        }
    }
    let restricted = partition.restrict(&rx)?;
    AboutPartition::new(restricted, x.clone())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn pt(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    /// The partition of [-1,1]^3 about 0 into five pieces that merges four
    /// of the octants pairwise; at the origin ν = 5 and β = 3.
    pub(crate) fn octant_merge_partition() -> AboutPartition {
        let window = Rect::from_pairs(&[(-2, 2), (-2, 2), (-2, 2)]);
        let pieces = vec![
            Rect::from_pairs(&[(0, 2), (-2, 2), (0, 2)]),
            Rect::from_pairs(&[(-2, 0), (0, 2), (-2, 2)]),
            Rect::from_pairs(&[(-2, 0), (-2, 0), (0, 2)]),
            Rect::from_pairs(&[(0, 2), (0, 2), (-2, 0)]),
            Rect::from_pairs(&[(-2, 2), (-2, 0), (-2, 0)]),
        ];
        let base = LocalPartition::new(window, pieces).unwrap();
        AboutPartition::new(base, Point::origin(3)).unwrap()
    }

    #[test]
    fn octant_merge_is_a_valid_about_partition() {
        let ap = octant_merge_partition();
        assert_eq!(ap.stats(), (5, 3));
        assert!(!ap.is_minimal_about());
    }

    #[test]
    fn missing_cell_is_reported() {
        let window = Rect::from_pairs(&[(0, 4), (0, 4)]);
        let pieces = vec![
            Rect::from_pairs(&[(0, 2), (0, 4)]),
            Rect::from_pairs(&[(2, 4), (0, 2)]),
        ];
        let errs = validate_local_partition(&window, &pieces);
        assert!(matches!(errs[0], PartitionError::CoverGap(_)));
    }

    #[test]
    fn overlap_is_reported_with_the_pair() {
        let window = Rect::from_pairs(&[(0, 4)]);
        let pieces = vec![Rect::from_pairs(&[(0, 3)]), Rect::from_pairs(&[(2, 4)])];
        let errs = validate_local_partition(&window, &pieces);
        assert!(matches!(errs[0], PartitionError::Overlap(0, 1, _)));
    }

    #[test]
    fn minimality_scan_accepts_a_plus_junction_free_partition() {
        let window = Rect::from_pairs(&[(0, 4), (0, 4)]);
        let pieces = vec![
            Rect::from_pairs(&[(0, 2), (0, 2)]),
            Rect::from_pairs(&[(2, 4), (0, 2)]),
            Rect::from_pairs(&[(0, 4), (2, 4)]),
        ];
        let p = LocalPartition::new(window, pieces).unwrap();
        assert!(p.is_minimal_local());
    }

    #[test]
    fn minimality_scan_rejects_a_plus_junction() {
        let window = Rect::from_pairs(&[(0, 4), (0, 4)]);
        let pieces = vec![
            Rect::from_pairs(&[(0, 2), (0, 2)]),
            Rect::from_pairs(&[(2, 4), (0, 2)]),
            Rect::from_pairs(&[(0, 2), (2, 4)]),
            Rect::from_pairs(&[(2, 4), (2, 4)]),
        ];
        let p = LocalPartition::new(window, pieces).unwrap();
        let cell = p.minimality_violation().unwrap();
        assert_eq!(cell.as_point(), Some(pt(&[2, 2])));
    }

    #[test]
    fn minimality_scan_catches_violations_without_interior_vertices() {
        // Four full-height columns around the axis {2}x{2}x[0,4]: ν = 4 and
        // β = 2 along the shared edge, but the face decomposition has no
        // interior vertex at all.  This is the case a vertex-only scan misses.
        let window = Rect::from_pairs(&[(0, 4), (0, 4), (0, 4)]);
        let pieces = vec![
            Rect::from_pairs(&[(0, 2), (0, 2), (0, 4)]),
            Rect::from_pairs(&[(2, 4), (0, 2), (0, 4)]),
            Rect::from_pairs(&[(0, 2), (2, 4), (0, 4)]),
            Rect::from_pairs(&[(2, 4), (2, 4), (0, 4)]),
        ];
        let p = LocalPartition::new(window, pieces).unwrap();
        let cell = p.minimality_violation().unwrap();
        assert_eq!(cell.rect, Rect::from_pairs(&[(2, 2), (2, 2), (0, 4)]));
    }

    #[test]
    fn localize_keeps_stats_and_is_about_x() {
        // 1D pair {[0,2],[2,4]} about x = 2 localizes to the window itself
        // with both pieces kept.
        let p = LocalPartition::new(
            Rect::from_pairs(&[(0, 8)]),
            vec![Rect::from_pairs(&[(0, 4)]), Rect::from_pairs(&[(4, 8)])],
        )
        .unwrap();
        let ap = localize_about(&p, &pt(&[4])).unwrap();
        assert_eq!(ap.window(), &Rect::from_pairs(&[(0, 8)]));
        assert_eq!(ap.stats(), (2, 1));
    }

    #[test]
    fn localize_inside_a_piece_gives_one_piece() {
        let p = LocalPartition::new(
            Rect::from_pairs(&[(0, 8)]),
            vec![Rect::from_pairs(&[(0, 4)]), Rect::from_pairs(&[(4, 8)])],
        )
        .unwrap();
        let ap = localize_about(&p, &pt(&[2])).unwrap();
        assert_eq!(ap.pieces().len(), 1);
        assert_eq!(ap.stats(), (1, 0));
    }

    #[test]
    fn localize_at_a_t_junction_stays_valid() {
        let p = LocalPartition::new(
            Rect::from_pairs(&[(0, 4), (0, 4)]),
            vec![
                Rect::from_pairs(&[(0, 2), (0, 2)]),
                Rect::from_pairs(&[(2, 4), (0, 2)]),
                Rect::from_pairs(&[(0, 4), (2, 4)]),
            ],
        )
        .unwrap();
        // On the face x1 = 2 below the junction: two pieces meet, the slab
        // above is cut away by the nearest-coordinate box.
        let ap = localize_about(&p, &pt(&[2, 1])).unwrap();
        assert_eq!(ap.stats(), (2, 1));
        assert_eq!(ap.window(), &Rect::from_pairs(&[(0, 4), (0, 2)]));
    }

    #[test]
    fn slice_at_non_level_projects_the_partition() {
        let p = LocalPartition::new(
            Rect::from_pairs(&[(0, 4), (0, 4), (0, 2)]),
            vec![
                Rect::from_pairs(&[(0, 2), (0, 4), (0, 2)]),
                Rect::from_pairs(&[(2, 4), (0, 4), (0, 2)]),
            ],
        )
        .unwrap();
        let s = p.slice_at(2, 1).unwrap();
        assert_eq!(s.pieces().len(), 2);
        assert!(p.slice_at(2, 2).is_err()); // face level of the window
    }

    #[test]
    fn restriction_drops_degenerate_clips() {
        let p = LocalPartition::new(
            Rect::from_pairs(&[(0, 8)]),
            vec![
                Rect::from_pairs(&[(0, 4)]),
                Rect::from_pairs(&[(4, 6)]),
                Rect::from_pairs(&[(6, 8)]),
            ],
        )
        .unwrap();
        let r = p.restrict(&Rect::from_pairs(&[(2, 6)])).unwrap();
        assert_eq!(r.pieces().len(), 2);
    }
}
