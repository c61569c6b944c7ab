//! Periodic partitions of the whole space.
//!
//! A `PeriodicPartition` stores one fundamental batch of boxes whose
//! translates along the period lattice tile space.  All global quantifiers
//! (tiling, the regulation number γ = max ν, pointwise minimality,
//! orthogonality) reduce to finite scans over the cells of one period
//! block, since the containment pattern of any point recurs inside the
//! block.  Scans run over piece-containment bitsets accumulated axis by
//! axis, which keeps the five-dimensional constructions cheap.
//!
//! The headline construction is `orthogonal_minimal_pair`: an inductive
//! even-coordinate partition with regulation number exactly `n + 1`
//! together with its diagonal translate; the two are orthogonal because
//! their face levels never coincide.

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::partition::{
    localize_about, validate_local_partition, AboutPartition, LocalPartition, PartitionError,
};

/// A periodic partition: `fundamental` boxes translated by all integer
/// combinations of the per-axis periods tile space.  `d` is the minimal
/// spacing between distinct face levels (per axis, cyclically), recording
/// the discreteness of the coordinate set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPartition {
    pub n: usize,
    pub period: Vec<i64>,
    pub fundamental: Vec<Rect>,
    pub d: i64,
}

impl PeriodicPartition {
    /// Validate and compute the discreteness constant.
    pub fn new(
        n: usize,
        period: Vec<i64>,
        fundamental: Vec<Rect>,
    ) -> Result<Self, PartitionError> {
        let mut pp = PeriodicPartition { n, period, fundamental, d: 0 };
        pp.d = pp.coordinate_gap()?;
        let errors = pp.validate();
        if let Some(e) = errors.into_iter().next() {
            return Err(e);
        }
        Ok(pp)
    }

    /// Minimal cyclic gap between distinct face levels over all axes.
    fn coordinate_gap(&self) -> Result<i64, PartitionError> {
        if self.fundamental.is_empty() {
            return Err(PartitionError::Empty);
        }
        let mut gap = i64::MAX;
        for axis in 0..self.n {
            let p = self.period[axis];
            if p <= 0 {
                return Err(PartitionError::Other(format!(
                    "period on axis {axis} must be positive"
                )));
            }
            let mut levels: Vec<i64> = Vec::new();
            for r in &self.fundamental {
                levels.push(r.lo[axis].rem_euclid(p));
                levels.push(r.hi[axis].rem_euclid(p));
            }
            levels.sort_unstable();
            levels.dedup();
            for w in levels.windows(2) {
                gap = gap.min(w[1] - w[0]);
            }
            // Wrap-around gap from the last level to the first.
            gap = gap.min(levels[0] + p - levels[levels.len() - 1]);
            if levels.len() == 1 {
                gap = gap.min(p);
            }
        }
        if gap <= 0 {
            return Err(PartitionError::Other("face levels are not discrete".into()));
        }
        Ok(gap)
    }

    /// All tiling defects, checked exactly on a three-period block: by
    /// periodicity, any global gap or overlap recurs there.
    pub fn validate(&self) -> Vec<PartitionError> {
        let mut errors = Vec::new();
        for (axis, &p) in self.period.iter().enumerate() {
            if p <= 0 {
                errors.push(PartitionError::Other(format!(
                    "period on axis {axis} must be positive"
                )));
                return errors;
            }
        }
        for (i, r) in self.fundamental.iter().enumerate() {
            if r.dim_ambient() != self.n {
                errors.push(PartitionError::Other("piece dimension mismatch".into()));
                return errors;
            }
            if !r.is_full_dim() {
                errors.push(PartitionError::DegeneratePiece(i));
            }
        }
        if !errors.is_empty() {
            return errors;
        }
        let lo: Vec<i64> = self.period.iter().map(|&p| -p).collect();
        let hi: Vec<i64> = self.period.iter().map(|&p| 2 * p).collect();
        let block = Rect::new(lo, hi);
        let local = crate::partition::restrict_pieces(&self.pieces_intersecting(&block), &block);
        errors.extend(validate_local_partition(&block, &local));
        errors
    }

    /// Every translate of a fundamental piece that meets `window` (closed
    /// intersection), untrimmed.
    pub fn pieces_intersecting(&self, window: &Rect) -> Vec<Rect> {
        let mut out = Vec::new();
        for r in &self.fundamental {
            let mut ranges = Vec::with_capacity(self.n);
            for i in 0..self.n {
                let p = self.period[i];
                let m_lo = div_ceil(window.lo[i] - r.hi[i], p);
                let m_hi = div_floor(window.hi[i] - r.lo[i], p);
                ranges.push((m_lo, m_hi));
            }
            if ranges.iter().any(|&(a, b)| a > b) {
                continue;
            }
            let mut m: Vec<i64> = ranges.iter().map(|&(a, _)| a).collect();
            'odometer: loop {
                let shift: Vec<i64> =
                    m.iter().zip(&self.period).map(|(&mi, &p)| mi * p).collect();
                out.push(r.translate(&shift));
                for i in 0..self.n {
                    if m[i] < ranges[i].1 {
                        m[i] += 1;
                        continue 'odometer;
                    }
                    m[i] = ranges[i].0;
                }
                break;
            }
        }
        out
    }

    /// The induced local partition on a window.
    pub fn restrict_to_window(&self, window: &Rect) -> Result<LocalPartition, PartitionError> {
        let pieces =
            crate::partition::restrict_pieces(&self.pieces_intersecting(window), window);
        LocalPartition::new(window.clone(), pieces)
    }

    /// The induced about-partition at a point.
    pub fn localize(&self, x: &Point) -> Result<AboutPartition, PartitionError> {
        let lo: Vec<i64> = x.0.iter().zip(&self.period).map(|(&c, &p)| c - p).collect();
        let hi: Vec<i64> = x.0.iter().zip(&self.period).map(|(&c, &p)| c + p).collect();
        let local = self.restrict_to_window(&Rect::new(lo, hi))?;
        localize_about(&local, x)
    }

    /// Translate the whole partition.
    pub fn translate(&self, v: &[i64]) -> PeriodicPartition {
        PeriodicPartition {
            n: self.n,
            period: self.period.clone(),
            fundamental: self.fundamental.iter().map(|r| r.translate(v)).collect(),
            d: self.d,
        }
    }

    fn period_block(&self) -> Rect {
        Rect::new(vec![0; self.n], self.period.clone())
    }

    /// γ: the largest number of pieces sharing a point.  Complete by a cell
    /// scan of one period block.
    pub fn regulation_number(&self) -> usize {
        let mut gamma = 0;
        scan_cells(&self.period_block(), &self.pieces_intersecting(&self.period_block()), |c| {
            gamma = gamma.max(c.nu());
        });
        gamma
    }

    /// A vertex attaining the maximal ν, with its ν.  Always satisfies
    /// ν ≥ n + 1; anything less would falsify the lower-bound lemma.
    pub fn witness_high_point(&self) -> (Point, usize) {
        let block = self.period_block();
        let pieces = self.pieces_intersecting(&block);
        let mut best: Option<(Point, usize)> = None;
        scan_cells(&block, &pieces, |c| {
            if !c.is_vertex() {
                return;
            }
            let nu = c.nu();
            if best.as_ref().map_or(true, |&(_, b)| nu > b) {
                best = Some((c.vertex_point(), nu));
            }
        });
        let (point, nu) = best.expect("period block contains vertices");
        assert!(nu >= self.n + 1, "regulation number lower bound violated");
        (point, nu)
    }

    /// Check both sides of the minimality characterization: γ = n+1 on one
    /// side, ν = β + 1 at every point on the other.  Returns the report;
    /// the characterization holds when the two sides agree.
    pub fn verify_minimal_characterization(&self) -> MinimalityReport {
        let block = self.period_block();
        let pieces = self.pieces_intersecting(&block);
        let mut gamma = 0;
        let mut pointwise = true;
        let mut violation = None;
        scan_cells(&block, &pieces, |c| {
            let nu = c.nu();
            gamma = gamma.max(nu);
            if nu != c.beta() + 1 && violation.is_none() {
                pointwise = false;
                violation = Some(c.witness_doubled());
            }
        });
        let gamma_minimal = gamma == self.n + 1;
        MinimalityReport {
            gamma,
            gamma_minimal,
            pointwise_minimal: pointwise,
            equivalence_holds: gamma_minimal == pointwise,
            violation_doubled: violation,
        }
    }

    /// Orthogonality: no point is on a face level of both partitions in the
    /// same axis.  Scanned over the joint arrangement of one common block.
    pub fn is_orthogonal_to(&self, other: &PeriodicPartition) -> Result<bool, PartitionError> {
        if self.n != other.n {
            return Err(PartitionError::Other("dimension mismatch".into()));
        }
        let common: Vec<i64> = self
            .period
            .iter()
            .zip(&other.period)
            .map(|(&a, &b)| lcm(a, b))
            .collect();
        let block = Rect::new(vec![0; self.n], common);
        let mine = self.pieces_intersecting(&block);
        let theirs = other.pieces_intersecting(&block);
        let mut all: Vec<Rect> = mine.clone();
        all.extend(theirs.iter().cloned());
        let split = mine.len();
        let mut orthogonal = true;
        scan_cells(&block, &all, |c| {
            if !orthogonal {
                return;
            }
            for axis in 0..c.n {
                if c.axis_active_among(axis, 0, split) && c.axis_active_among(axis, split, all.len())
                {
                    orthogonal = false;
                    return;
                }
            }
        });
        Ok(orthogonal)
    }
}

/// Outcome of `verify_minimal_characterization`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub gamma: usize,
    pub gamma_minimal: bool,
    pub pointwise_minimal: bool,
    pub equivalence_holds: bool,
    /// Interior witness of a ν ≠ β + 1 cell, at doubled coordinates.
    pub violation_doubled: Option<Point>,
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// One cell of the block sweep, exposing ν, β, and piece membership through
/// the accumulated containment bitsets.
pub struct SweepCell<'a> {
    n: usize,
    items: &'a [Vec<(i64, i64)>],
    state: &'a [usize],
    acc: &'a [Vec<u64>],
    faces: &'a [Vec<Vec<u64>>],
}

impl SweepCell<'_> {
    fn containing(&self) -> &[u64] {
        &self.acc[self.n - 1]
    }

    pub fn nu(&self) -> usize {
        self.containing().iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of pinned axes where a containing piece has a face.
    pub fn beta(&self) -> usize {
        (0..self.n).filter(|&axis| self.axis_active(axis)).count()
    }

    fn axis_active(&self, axis: usize) -> bool {
        let (lo, hi) = self.items[axis][self.state[axis]];
        if lo != hi {
            return false;
        }
        let face = &self.faces[axis][self.state[axis]];
        self.containing().iter().zip(face).any(|(a, b)| a & b != 0)
    }

    /// Like `axis_active`, restricted to pieces with indices in `[from, to)`.
    fn axis_active_among(&self, axis: usize, from: usize, to: usize) -> bool {
        let (lo, hi) = self.items[axis][self.state[axis]];
        if lo != hi {
            return false;
        }
        let face = &self.faces[axis][self.state[axis]];
        let containing = self.containing();
        (from..to).any(|p| {
            let w = p / 64;
            let bit = 1u64 << (p % 64);
            containing[w] & face[w] & bit != 0
        })
    }

    pub fn is_vertex(&self) -> bool {
        (0..self.n).all(|axis| {
            let (lo, hi) = self.items[axis][self.state[axis]];
            lo == hi
        })
    }

    pub fn vertex_point(&self) -> Point {
        Point((0..self.n).map(|axis| self.items[axis][self.state[axis]].0).collect())
    }

    /// An interior point of the cell at doubled coordinates (gap midpoints
    /// need half-steps).
    pub fn witness_doubled(&self) -> Point {
        Point(
            (0..self.n)
                .map(|axis| {
                    let (lo, hi) = self.items[axis][self.state[axis]];
                    lo + hi
                })
                .collect(),
        )
    }
}

/// Visit every arrangement cell of `pieces` clipped to `block`, providing
/// exact ν/β statistics against the (untrimmed) pieces.  Containment is
/// accumulated axis by axis as bitsets over the piece list.
pub fn scan_cells(block: &Rect, pieces: &[Rect], mut f: impl FnMut(&SweepCell)) {
    let n = block.dim_ambient();
    let words = pieces.len().div_ceil(64);
    let mut items: Vec<Vec<(i64, i64)>> = Vec::with_capacity(n);
    let mut covers: Vec<Vec<Vec<u64>>> = Vec::with_capacity(n);
    let mut faces: Vec<Vec<Vec<u64>>> = Vec::with_capacity(n);
    for axis in 0..n {
        let mut coords: Vec<i64> = vec![block.lo[axis], block.hi[axis]];
        for p in pieces {
            for c in [p.lo[axis], p.hi[axis]] {
                if c >= block.lo[axis] && c <= block.hi[axis] {
                    coords.push(c);
                }
            }
        }
        coords.sort_unstable();
        coords.dedup();
        let mut axis_items = Vec::new();
        for (i, &c) in coords.iter().enumerate() {
            axis_items.push((c, c));
            if i + 1 < coords.len() {
                axis_items.push((c, coords[i + 1]));
            }
        }
        let mut axis_cover = vec![vec![0u64; words]; axis_items.len()];
        let mut axis_faces = vec![vec![0u64; words]; axis_items.len()];
        for (idx, &(lo, hi)) in axis_items.iter().enumerate() {
            for (p, piece) in pieces.iter().enumerate() {
                if piece.lo[axis] <= lo && hi <= piece.hi[axis] {
                    axis_cover[idx][p / 64] |= 1 << (p % 64);
                }
                if lo == hi && (piece.lo[axis] == lo || piece.hi[axis] == lo) {
                    axis_faces[idx][p / 64] |= 1 << (p % 64);
                }
            }
        }
        items.push(axis_items);
        covers.push(axis_cover);
        faces.push(axis_faces);
    }
    let mut state = vec![0usize; n];
    let mut acc: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
    rec_scan(0, n, &items, &covers, &faces, &mut state, &mut acc, &mut f);
}

#[allow(clippy::too_many_arguments)]
fn rec_scan(
    axis: usize,
    n: usize,
    items: &[Vec<(i64, i64)>],
    covers: &[Vec<Vec<u64>>],
    faces: &[Vec<Vec<u64>>],
    state: &mut Vec<usize>,
    acc: &mut Vec<Vec<u64>>,
    f: &mut impl FnMut(&SweepCell),
) {
    for idx in 0..items[axis].len() {
        state[axis] = idx;
        if axis == 0 {
            acc[0].copy_from_slice(&covers[0][idx]);
        } else {
            let (before, after) = acc.split_at_mut(axis);
            for (w, out) in after[0].iter_mut().enumerate() {
                *out = before[axis - 1][w] & covers[axis][idx][w];
            }
        }
        if axis + 1 == n {
            let cell = SweepCell { n, items, state, acc, faces };
            f(&cell);
        } else {
            rec_scan(axis + 1, n, items, covers, faces, state, acc, f);
        }
    }
}

/// The even-coordinate minimal partition and its diagonal translate.  The
/// base case tiles the line by `[4k, 4k + 4]`; each inductive step doubles
/// the cross-section and alternates it with its translate in slabs of
/// height 4 half-units.  Both members have regulation number exactly
/// `n + 1`, and their face levels are disjoint modulo 4, so they are
/// orthogonal.
pub fn orthogonal_minimal_pair(n: usize) -> (PeriodicPartition, PeriodicPartition) {
    assert!(n >= 1);
    let base = even_minimal(n);
    let shift = vec![2i64; n];
    let mate = base.translate(&shift);
    (base, mate)
}

fn even_minimal(n: usize) -> PeriodicPartition {
    if n == 1 {
        return PeriodicPartition {
            n: 1,
            period: vec![4],
            fundamental: vec![Rect::new(vec![0], vec![4])],
            d: 4,
        };
    }
    let prev = even_minimal(n - 1);
    let period: Vec<i64> = prev
        .period
        .iter()
        .map(|&p| 2 * p)
        .chain(std::iter::once(8))
        .collect();
    let mut fundamental = Vec::new();
    for r in &prev.fundamental {
        let doubled = r.scale(2);
        // Lower slab from the doubled partition, upper slab from its
        // diagonal translate (translate by 1 before doubling = 4 after).
        fundamental.push(doubled.insert_axis(n - 1, 0, 4));
        fundamental
            .push(doubled.translate(&vec![4; n - 1]).insert_axis(n - 1, 4, 8));
    }
    PeriodicPartition { n, period, fundamental, d: 4 }
}

/// The axis-aligned unit-grid product partition: every corner meets 2ⁿ
/// pieces, the non-minimal extreme.
pub fn unit_grid(n: usize) -> PeriodicPartition {
    PeriodicPartition {
        n,
        period: vec![4; n],
        fundamental: vec![Rect::new(vec![0; n], vec![4; n])],
        d: 4,
    }
}
