use crate::config::{Torus, TorusConfig, TorusError};
use crate::net::{MarkerSet, PointGrid};
use crate::rectangles::LayeredBoxes;
use boxpart_core::Rect;
use serde::{Deserialize, Serialize};

/// Box partition of the torus. Pieces are stored flat (stride `2n`: the
/// lower corner normalized into `[0, m)`, then the upper corner, which may
/// exceed `m` when the piece wraps). `source[i]` is the marker a piece was
/// carved from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusPartition {
    pub n: usize,
    pub m: i64,
    pub data: Vec<i64>,
    pub source: Vec<u32>,
}

impl TorusPartition {
    pub fn new(n: usize, m: i64) -> Self {
        TorusPartition {
            n,
            m,
            data: Vec::new(),
            source: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    #[inline]
    pub fn lo(&self, i: usize, a: usize) -> i64 {
        self.data[2 * self.n * i + a]
    }

    #[inline]
    pub fn hi(&self, i: usize, a: usize) -> i64 {
        self.data[2 * self.n * i + self.n + a]
    }

    #[inline]
    pub fn side(&self, i: usize, a: usize) -> i64 {
        self.hi(i, a) - self.lo(i, a)
    }

    /// Piece as a plain box in its own (unwrapped) frame.
    pub fn piece_rect(&self, i: usize) -> Rect {
        let lo = (0..self.n).map(|a| self.lo(i, a)).collect();
        let hi = (0..self.n).map(|a| self.hi(i, a)).collect();
        Rect::new(lo, hi)
    }

    pub fn push_piece(&mut self, lo: &[i64], hi: &[i64], source: u32) {
        let m = self.m;
        for a in 0..self.n {
            let nl = lo[a].rem_euclid(m);
            self.data.push(nl);
        }
        for a in 0..self.n {
            let nl = lo[a].rem_euclid(m);
            self.data.push(nl + (hi[a] - lo[a]));
        }
        self.source.push(source);
    }

    /// Offset of `x` into piece `i` along `a`, in `[0, m)`; the piece
    /// contains `x` on that axis iff the offset is at most the side.
    #[inline]
    pub fn offset_in(&self, i: usize, a: usize, x: i64) -> i64 {
        (x - self.lo(i, a)).rem_euclid(self.m)
    }

    pub fn contains(&self, i: usize, x: &[i64]) -> bool {
        (0..self.n).all(|a| self.offset_in(i, a, x[a]) <= self.side(i, a))
    }

    /// Incidence row of piece `i` at a contained point: +1 on the lower
    /// face, -1 on the upper face, 0 strictly inside, per axis.
    pub fn incidence_row(&self, i: usize, x: &[i64]) -> Vec<i8> {
        (0..self.n)
            .map(|a| {
                let d = self.offset_in(i, a, x[a]);
                if d == 0 {
                    1
                } else if d == self.side(i, a) {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    pub fn total_volume(&self) -> i128 {
        (0..self.len())
            .map(|i| (0..self.n).map(|a| self.side(i, a) as i128).product::<i128>())
            .sum()
    }
}

/// Pieces of `p` not interior-meeting `b`, tiling the closure of their
/// difference; slabs are emitted along the axis priority given by `axes`.
pub fn subtract_box(p: &Rect, b: &Rect, axes: &[usize], out: &mut Vec<Rect>) {
    if !p.interior_intersects(b) {
        out.push(p.clone());
        return;
    }
    let mut cur = p.clone();
    for &a in axes {
        if b.lo[a] > cur.lo[a] {
            let mut slab = cur.clone();
            slab.hi[a] = b.lo[a];
            out.push(slab);
            cur.lo[a] = b.lo[a];
        }
        if b.hi[a] < cur.hi[a] {
            let mut slab = cur.clone();
            slab.lo[a] = b.hi[a];
            out.push(slab);
            cur.hi[a] = b.hi[a];
        }
    }
}

pub(crate) fn subtract_region(cells: Vec<Rect>, b: &Rect, axes: &[usize]) -> Vec<Rect> {
    let mut out = Vec::with_capacity(cells.len() + 2);
    for c in cells {
        subtract_box(&c, b, axes, &mut out);
    }
    out
}

fn region_volume(cells: &[Rect]) -> i128 {
    cells.iter().map(|c| c.volume() as i128).sum()
}

/// Whether the union of `a` is contained in the union of `b` (up to measure
/// zero); all boxes are full-dimensional.
fn region_subset(a: &[Rect], b: &[Rect]) -> bool {
    for cell in a {
        let mut rest = vec![cell.clone()];
        let axes: Vec<usize> = (0..cell.dim_ambient()).collect();
        for bb in b {
            rest = subtract_region(rest, bb, &axes);
            if rest.is_empty() {
                break;
            }
        }
        if !rest.is_empty() {
            return false;
        }
    }
    true
}

fn footprints(cells: &[Rect], axis: usize) -> Vec<Rect> {
    cells.iter().map(|c| c.drop_axis(axis)).collect()
}

/// Carves a rectangular polyhedron (given as disjoint full-dimensional
/// boxes) into boxes by extending its faces of the highest axis into
/// hyperplanes, then recursing on each cross-section slab one axis lower.
/// Axis 0 faces are never extended: at the bottom of the recursion the
/// region is a disjoint union of segments which are merged, not cut.
pub fn divide_region(cells: Vec<Rect>, axis: usize, out: &mut Vec<Rect>) {
    if cells.is_empty() {
        return;
    }
    if cells.len() == 1 {
        out.push(cells.into_iter().next().unwrap());
        return;
    }
    if axis == 0 {
        // All other extents agree here; glue abutting segments.
        let mut cells = cells;
        cells.sort_by_key(|c| c.lo[0]);
        let mut cur = cells[0].clone();
        for c in &cells[1..] {
            if c.lo[0] == cur.hi[0] {
                cur.hi[0] = c.hi[0];
            } else {
                out.push(std::mem::replace(&mut cur, c.clone()));
            }
        }
        out.push(cur);
        return;
    }
    let mut levels: Vec<i64> = cells
        .iter()
        .flat_map(|c| [c.lo[axis], c.hi[axis]])
        .collect();
    levels.sort_unstable();
    levels.dedup();
    // Atomic slabs between consecutive levels.
    let mut slabs: Vec<(i64, i64, Vec<Rect>)> = Vec::new();
    for w in levels.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut content: Vec<Rect> = Vec::new();
        for c in &cells {
            if c.lo[axis] <= a && c.hi[axis] >= b {
                let mut clipped = c.clone();
                clipped.lo[axis] = a;
                clipped.hi[axis] = b;
                content.push(clipped);
            }
        }
        if !content.is_empty() {
            slabs.push((a, b, content));
        }
    }
    // A level interior to a run of equal cross-sections is not a face level
    // of the region, so such slabs merge back together.
    let mut i = 0;
    while i < slabs.len() {
        let mut j = i + 1;
        while j < slabs.len() && slabs[j].0 == slabs[j - 1].1 {
            let fa = footprints(&slabs[i].2, axis);
            let fb = footprints(&slabs[j].2, axis);
            if region_volume(&fa) == region_volume(&fb) && region_subset(&fa, &fb) {
                j += 1;
            } else {
                break;
            }
        }
        let (lo, hi) = (slabs[i].0, slabs[j - 1].1);
        let rep: Vec<Rect> = slabs[i]
            .2
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.lo[axis] = lo;
                c.hi[axis] = hi;
                c
            })
            .collect();
        divide_region(rep, axis - 1, out);
        i = j;
    }
}

/// Subtracts all earlier boxes from each marker's box and divides the rest
/// into rectangles, in construction order. Verifies local disjointness as
/// it goes; the global cover identity is checked by `verify_partition`.
pub fn divide_polyhedra(
    torus: Torus,
    cfg: &TorusConfig,
    s1: &MarkerSet,
    boxes: &LayeredBoxes,
) -> Result<TorusPartition, TorusError> {
    let n = torus.n;
    let reach = 2 * (cfg.r1 + boxes.max_disp) + 2;
    let mut grid = PointGrid::new(torus, reach);
    for p in &s1.points {
        grid.insert(p.clone());
    }
    let mut pos = vec![usize::MAX; s1.points.len()];
    for (k, &zi) in boxes.order.iter().enumerate() {
        pos[zi] = k;
    }
    let mut part = TorusPartition::new(n, torus.m);
    let axes: Vec<usize> = (0..n).collect();
    for &zi in &boxes.order {
        let z = &s1.points[zi];
        let rz = Rect::new(boxes.off_lo[zi].clone(), boxes.off_hi[zi].clone());
        let mut h = vec![rz.clone()];
        let mut earlier: Vec<Rect> = Vec::new();
        grid.for_each_within(z, reach, |uid, u| {
            let ui = uid as usize;
            if ui == zi || pos[ui] >= pos[zi] {
                return;
            }
            let du = torus.rel(z, u);
            let touches = (0..n).all(|a| {
                du[a] + boxes.off_lo[ui][a] < rz.hi[a] && rz.lo[a] < du[a] + boxes.off_hi[ui][a]
            });
            if !touches {
                return;
            }
            let ulo: Vec<i64> = (0..n).map(|a| du[a] + boxes.off_lo[ui][a]).collect();
            let uhi: Vec<i64> = (0..n).map(|a| du[a] + boxes.off_hi[ui][a]).collect();
            earlier.push(Rect::new(ulo, uhi));
        });
        for ub in &earlier {
            h = subtract_region(h, ub, &axes);
            if h.is_empty() {
                break;
            }
        }
        let mut local = Vec::new();
        divide_region(h, n - 1, &mut local);
        for (i, p) in local.iter().enumerate() {
            if !rz.contains_rect(p) {
                return Err(TorusError::Verification(format!(
                    "piece {p:?} escapes its source box at marker {z:?}"
                )));
            }
            for q in &local[i + 1..] {
                if p.interior_intersects(q) {
                    return Err(TorusError::Verification(format!(
                        "pieces overlap inside the region of marker {z:?}"
                    )));
                }
            }
            for ub in &earlier {
                if p.interior_intersects(ub) {
                    return Err(TorusError::Verification(format!(
                        "piece at marker {z:?} re-enters an earlier box"
                    )));
                }
            }
        }
        for p in &local {
            let lo: Vec<i64> = (0..n).map(|a| z[a] + p.lo[a]).collect();
            let hi: Vec<i64> = (0..n).map(|a| z[a] + p.hi[a]).collect();
            part.push_piece(&lo, &hi, zi as u32);
        }
    }
    Ok(part)
}

/// The cover identity: pieces are pairwise interior-disjoint by the local
/// checks above, so covering the torus is equivalent to the volumes summing
/// to `m^n` exactly; degenerate or oversized pieces are also rejected here.
pub fn verify_partition(torus: Torus, part: &TorusPartition) -> Result<(), TorusError> {
    let max_side = torus.m / 2;
    for i in 0..part.len() {
        for a in 0..torus.n {
            let s = part.side(i, a);
            if s <= 0 || s > max_side {
                return Err(TorusError::Verification(format!(
                    "piece {i} has side {s} on axis {a}"
                )));
            }
        }
    }
    let want: i128 = (0..torus.n).map(|_| torus.m as i128).product();
    let got = part.total_volume();
    if got != want {
        return Err(TorusError::Verification(format!(
            "piece volumes sum to {got}, expected {want}"
        )));
    }
    Ok(())
}
