//! Cell decomposition induced by a family of boxes.
//!
//! The faces of a finite family of boxes cut space into *cells*: products
//! over axes of either a face coordinate or an open gap between consecutive
//! coordinates.  The set of pieces containing a point is constant on each
//! cell, so every pointwise quantity we care about (piece count, boundary
//! directions) can be computed exactly by enumerating cells.  Cells are
//! represented by their closed hull plus a per-axis degeneracy flag; a box
//! contains the open cell iff it contains the hull, because box faces lie on
//! arrangement coordinates.

use crate::geom::{Point, Rect};

/// Sorted, deduplicated face coordinates per axis.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub coords: Vec<Vec<i64>>,
}

/// One cell of the decomposition: `rect` is the closed hull, `at[i]` is true
/// when the cell is pinned to a single coordinate on axis `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub rect: Rect,
    pub at: Vec<bool>,
}

impl Cell {
    /// A cell made of a single point (every axis pinned).
    pub fn vertex(p: &Point) -> Cell {
        Cell {
            rect: Rect::new(p.0.clone(), p.0.clone()),
            at: vec![true; p.dim()],
        }
    }

    pub fn is_vertex(&self) -> bool {
        self.at.iter().all(|&a| a)
    }

    /// The pinned-axes point when this cell is a vertex.
    pub fn as_point(&self) -> Option<Point> {
        if self.is_vertex() {
            Some(Point(self.rect.lo.clone()))
        } else {
            None
        }
    }

    /// A representative interior point, doubled in scale so gap midpoints
    /// stay integral.  Only used in diagnostics.
    pub fn witness_doubled(&self) -> Point {
        Point(
            (0..self.rect.dim_ambient())
                .map(|i| self.rect.lo[i] + self.rect.hi[i])
                .collect(),
        )
    }
}

impl Arrangement {
    /// Collect face coordinates of `rects` (and nothing else).
    pub fn from_rects<'a, I: IntoIterator<Item = &'a Rect>>(n: usize, rects: I) -> Self {
        let mut coords = vec![Vec::new(); n];
        for r in rects {
            for i in 0..n {
                coords[i].push(r.lo[i]);
                coords[i].push(r.hi[i]);
            }
        }
        for axis in &mut coords {
            axis.sort_unstable();
            axis.dedup();
        }
        Arrangement { coords }
    }

    /// Visit every cell whose hull lies inside `clip` (pass the bounding box
    /// of the family for all cells).  Axes with no coordinate inside `clip`
    /// are impossible when `clip` comes from the same family.
    pub fn for_each_cell_in(&self, clip: &Rect, mut f: impl FnMut(&Cell)) {
        let n = self.coords.len();
        // Per-axis items: (lo, hi, pinned).
        let mut items: Vec<Vec<(i64, i64, bool)>> = Vec::with_capacity(n);
        for i in 0..n {
            let cs: Vec<i64> = self.coords[i]
                .iter()
                .copied()
                .filter(|&c| clip.lo[i] <= c && c <= clip.hi[i])
                .collect();
            let mut ax = Vec::new();
            for (k, &c) in cs.iter().enumerate() {
                ax.push((c, c, true));
                if k + 1 < cs.len() {
                    ax.push((c, cs[k + 1], false));
                }
            }
            if ax.is_empty() {
                return; // no cells inside the clip window
            }
            items.push(ax);
        }
        let mut idx = vec![0usize; n];
        loop {
            let cell = Cell {
                rect: Rect {
                    lo: (0..n).map(|i| items[i][idx[i]].0).collect(),
                    hi: (0..n).map(|i| items[i][idx[i]].1).collect(),
                },
                at: (0..n).map(|i| items[i][idx[i]].2).collect(),
            };
            f(&cell);
            let mut axis = 0;
            loop {
                if axis == n {
                    return;
                }
                idx[axis] += 1;
                if idx[axis] < items[axis].len() {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
    }

    /// Visit every cell of the open interior of `window`: pinned coordinates
    /// strictly inside, gaps contained in the closed window.
    pub fn for_each_interior_cell(&self, window: &Rect, mut f: impl FnMut(&Cell)) {
        self.for_each_cell_in(window, |cell| {
            let inside = (0..cell.at.len()).all(|i| {
                if cell.at[i] {
                    window.lo[i] < cell.rect.lo[i] && cell.rect.hi[i] < window.hi[i]
                } else {
                    true // gap hulls are already clipped to the window
                }
            });
            if inside {
                f(cell);
            }
        });
    }
}

/// Pointwise statistics of a family of boxes on one cell: the indices of the
/// containing pieces and the axes along which the cell sits on a face of a
/// containing piece (the *boundary directions*).
pub fn cell_stats(cell: &Cell, pieces: &[Rect]) -> (Vec<usize>, Vec<usize>) {
    let n = cell.at.len();
    let mut containing = Vec::new();
    for (k, p) in pieces.iter().enumerate() {
        if p.contains_rect(&cell.rect) {
            containing.push(k);
        }
    }
    let mut axes = Vec::new();
    for j in 0..n {
        if !cell.at[j] {
            continue;
        }
        let v = cell.rect.lo[j];
        let active = containing.iter().any(|&k| {
            let p = &pieces[k];
            (p.lo[j] == v && p.hi[j] > v) || (p.hi[j] == v && p.lo[j] < v)
        });
        if active {
            axes.push(j);
        }
    }
    (containing, axes)
}

/// Statistics at a single point: `(ν, β, boundary axes)` where `ν` counts
/// containing pieces and `β` counts axes with a face of a containing piece
/// through the point.
pub fn point_stats(x: &Point, pieces: &[Rect]) -> (usize, usize, Vec<usize>) {
    let (containing, axes) = cell_stats(&Cell::vertex(x), pieces);
    (containing.len(), axes.len(), axes)
}

/// A union of closed full-dimensional boxes, with exact queries through its
/// own cell decomposition.
#[derive(Clone, Debug)]
pub struct Region {
    pub boxes: Vec<Rect>,
}

impl Region {
    pub fn new(boxes: Vec<Rect>) -> Self {
        Region { boxes }
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.iter().all(|b| b.volume() == 0) && self.boxes.is_empty()
    }

    pub fn dim_ambient(&self) -> usize {
        self.boxes.first().map(|b| b.dim_ambient()).unwrap_or(0)
    }

    /// Smallest box containing the union.
    pub fn bounding_box(&self) -> Option<Rect> {
        let first = self.boxes.first()?;
        let mut lo = first.lo.clone();
        let mut hi = first.hi.clone();
        for b in &self.boxes[1..] {
            for i in 0..lo.len() {
                lo[i] = lo[i].min(b.lo[i]);
                hi[i] = hi[i].max(b.hi[i]);
            }
        }
        Some(Rect { lo, hi })
    }

    /// Exact test: does the union contain `target` entirely?  Decides by
    /// checking that every cell of the joint decomposition inside `target`
    /// meets some member box.
    pub fn covers_rect(&self, target: &Rect) -> bool {
        let n = target.dim_ambient();
        let mut all = self.boxes.clone();
        all.push(target.clone());
        let arr = Arrangement::from_rects(n, all.iter());
        let mut ok = true;
        arr.for_each_cell_in(target, |cell| {
            if ok && !self.boxes.iter().any(|b| b.contains_rect(&cell.rect)) {
                ok = false;
            }
        });
        ok
    }

    /// True when the union equals its bounding box.
    pub fn equals_bounding_box(&self) -> bool {
        match self.bounding_box() {
            None => false,
            Some(bb) => self.covers_rect(&bb),
        }
    }
}
