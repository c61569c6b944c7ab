//! Maximal surfaces, virtual spans, surface growth, and respected segments.
//!
//! Fix a sweep axis (the last coordinate by default).  At a level `d` —
//! an interior face height — the pieces whose tops sit at `d` leave an
//! `(n−1)`-dimensional footprint; the connected-interior components of that
//! footprint are the *maximal surfaces* at `d`.  On minimal partitions each
//! one is a single box.  A box `M` is *virtual* from `d₁` to `d₂` when the
//! cylinder wall `∂M × [d₁, d₂]` lies inside the union of piece boundaries;
//! `grow_surface` pushes a virtual surface upward into a strictly larger
//! one, either a maximal surface at the break height (case i) or another
//! virtual box grown along exactly one axis (case ii).  Chaining the growth
//! and charging each step's gain against the coordinate discreteness yields
//! a long axis-parallel segment inside a fixed-normal boundary —
//! `find_respected_segment` — cross-checkable against an exhaustive scan.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{Arrangement, Region};
use crate::geom::{Point, Rect};
use crate::partition::LocalPartition;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("{0} is not a level of the partition on this axis")]
    NotALevel(i64),
    #[error("the box is not respected at the start height")]
    NotRespected,
    #[error("hypothesis violated: {0}")]
    BadHypothesis(String),
    #[error("structure promised by the growth theorem is absent: {0}")]
    Falsified(String),
}

/// A maximal surface: the footprint cells at `level` of one
/// connected-interior component, in projected coordinates (sweep axis
/// dropped).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surface {
    pub axis: usize,
    pub level: i64,
    pub cells: Vec<Rect>,
}

impl Surface {
    pub fn region(&self) -> Region {
        Region::new(self.cells.clone())
    }

    /// The single box equal to this surface, when there is one.
    pub fn as_rectangle(&self) -> Option<Rect> {
        is_box_like(&self.cells)
    }
}

/// One link of a growth chain: `rect` is virtual from `d1` to `d2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub rect: Rect,
    pub d1: i64,
    pub d2: i64,
}

/// A strictly increasing sequence of virtual surfaces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SurfaceChain {
    pub axis: usize,
    pub links: Vec<ChainLink>,
}

impl SurfaceChain {
    /// Heights strictly increase and boxes strictly grow along the chain.
    pub fn is_strictly_increasing(&self) -> bool {
        self.links.windows(2).all(|w| {
            w[0].d2 <= w[1].d1
                && w[1].rect.contains_rect(&w[0].rect)
                && w[1].rect != w[0].rect
        }) && self.links.iter().all(|l| l.d1 < l.d2)
    }
}

/// Outcome of one growth step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrowOutcome {
    /// Case (i): the unique maximal surface at the break height strictly
    /// containing the input.
    MaximalAt(Rect),
    /// Case (ii): a virtual surface from the break height to `d3`, grown
    /// along exactly one projected axis.
    VirtualTo(Rect, i64),
}

/// Interior heights at which some piece has its top face.  By the tiling
/// these are exactly the heights at which some piece has its bottom face.
pub fn levels(partition: &LocalPartition, axis: usize) -> Vec<i64> {
    let window = partition.window();
    let mut out: Vec<i64> = partition
        .pieces()
        .iter()
        .map(|p| p.hi[axis])
        .filter(|&d| d > window.lo[axis] && d < window.hi[axis])
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// The maximal surfaces at a level: components of the top-face footprint
/// union, connected through shared facets (interior connectivity).
pub fn maximal_surfaces(
    partition: &LocalPartition,
    axis: usize,
    level: i64,
) -> Result<Vec<Surface>, SurfaceError> {
    if !levels(partition, axis).contains(&level) {
        return Err(SurfaceError::NotALevel(level));
    }
    let footprints: Vec<Rect> = partition
        .pieces()
        .iter()
        .filter(|p| p.hi[axis] == level)
        .map(|p| p.drop_axis(axis))
        .collect();
    Ok(footprint_components(&footprints)
        .into_iter()
        .map(|cells| Surface { axis, level, cells })
        .collect())
}

/// Split a union of full-dimensional boxes into connected-interior
/// components; each component is returned as its arrangement cells.
pub fn footprint_components(footprints: &[Rect]) -> Vec<Vec<Rect>> {
    if footprints.is_empty() {
        return Vec::new();
    }
    let k = footprints[0].dim_ambient();
    let arr = Arrangement::from_rects(k, footprints.iter());
    // Gap intervals per axis.
    let gaps: Vec<Vec<(i64, i64)>> = arr
        .coords
        .iter()
        .map(|cs| cs.windows(2).map(|w| (w[0], w[1])).collect())
        .collect();
    let dims: Vec<usize> = gaps.iter().map(|g| g.len()).collect();
    if dims.iter().any(|&g| g == 0) {
        return Vec::new();
    }
    let total: usize = dims.iter().product();
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut pos = vec![0; k];
        for a in (0..k).rev() {
            pos[a] = idx % dims[a];
            idx /= dims[a];
        }
        pos
    };
    let hull = |pos: &[usize]| -> Rect {
        Rect::new(
            (0..k).map(|a| gaps[a][pos[a]].0).collect(),
            (0..k).map(|a| gaps[a][pos[a]].1).collect(),
        )
    };
    let in_region: Vec<bool> = (0..total)
        .map(|i| {
            let h = hull(&decode(i));
            footprints.iter().any(|f| f.contains_rect(&h))
        })
        .collect();
    let mut component = vec![usize::MAX; total];
    let mut components: Vec<Vec<Rect>> = Vec::new();
    for start in 0..total {
        if !in_region[start] || component[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut cells = Vec::new();
        let mut stack = vec![start];
        component[start] = id;
        while let Some(cur) = stack.pop() {
            let pos = decode(cur);
            cells.push(hull(&pos));
            for a in 0..k {
                let stride: usize = dims[a + 1..].iter().product();
                if pos[a] > 0 {
                    let nb = cur - stride;
                    if in_region[nb] && component[nb] == usize::MAX {
                        component[nb] = id;
                        stack.push(nb);
                    }
                }
                if pos[a] + 1 < dims[a] {
                    let nb = cur + stride;
                    if in_region[nb] && component[nb] == usize::MAX {
                        component[nb] = id;
                        stack.push(nb);
                    }
                }
            }
        }
        cells.sort();
        components.push(cells);
    }
    components
}

/// The local box criterion: a connected-interior union of boxes is a single
/// box iff at every arrangement vertex the incident in-region orthants form
/// a per-axis product set.  Returns the box when the criterion holds.
pub fn is_box_like(region: &[Rect]) -> Option<Rect> {
    if region.is_empty() {
        return None;
    }
    if footprint_components(region).len() != 1 {
        return None;
    }
    let k = region[0].dim_ambient();
    if k == 0 {
        return Some(region[0].clone());
    }
    let arr = Arrangement::from_rects(k, region.iter());
    let coords = &arr.coords;
    let gaps: Vec<Vec<(i64, i64)>> = coords
        .iter()
        .map(|cs| cs.windows(2).map(|w| (w[0], w[1])).collect())
        .collect();
    let in_region = |pos: &[isize]| -> bool {
        if pos.iter().enumerate().any(|(a, &p)| p < 0 || p as usize >= gaps[a].len()) {
            return false;
        }
        let h = Rect::new(
            (0..k).map(|a| gaps[a][pos[a] as usize].0).collect(),
            (0..k).map(|a| gaps[a][pos[a] as usize].1).collect(),
        );
        region.iter().any(|f| f.contains_rect(&h))
    };
    // Every vertex: gather incident orthants (choose gap below or above per
    // axis), require product structure.
    let vertex_counts: Vec<usize> = coords.iter().map(|cs| cs.len()).collect();
    let total: usize = vertex_counts.iter().product();
    for vidx in 0..total {
        let mut rest = vidx;
        let mut vpos = vec![0usize; k];
        for a in (0..k).rev() {
            vpos[a] = rest % vertex_counts[a];
            rest /= vertex_counts[a];
        }
        let mut pattern: Vec<Vec<isize>> = Vec::new();
        let mut choice = vec![0usize; k];
        'orthants: loop {
            let pos: Vec<isize> = (0..k)
                .map(|a| vpos[a] as isize - 1 + choice[a] as isize)
                .collect();
            if in_region(&pos) {
                pattern.push(pos.clone());
            }
            for a in 0..k {
                if choice[a] == 0 {
                    choice[a] = 1;
                    continue 'orthants;
                }
                choice[a] = 0;
            }
            break;
        }
        if pattern.is_empty() {
            continue;
        }
        let mut product = 1usize;
        for a in 0..k {
            let mut dirs: Vec<isize> = pattern.iter().map(|p| p[a]).collect();
            dirs.sort_unstable();
            dirs.dedup();
            product *= dirs.len();
        }
        if pattern.len() != product {
            return None;
        }
    }
    let bbox = Region::new(region.to_vec()).bounding_box().expect("nonempty");
    debug_assert!(Region::new(region.to_vec()).covers_rect(&bbox));
    Some(bbox)
}

/// All faces of all pieces, including the ones on the window shell.
fn all_faces(partition: &LocalPartition) -> Vec<Rect> {
    let mut faces = Vec::new();
    for p in partition.pieces() {
        for a in 0..p.dim_ambient() {
            faces.push(p.face(a, p.lo[a]));
            faces.push(p.face(a, p.hi[a]));
        }
    }
    faces
}

/// Exact containment of a (possibly degenerate) box in the union of piece
/// boundaries: every cell of the box's own decomposition must lie inside
/// some face.
fn covered_by_faces(target: &Rect, faces: &[Rect]) -> bool {
    let n = target.dim_ambient();
    let arr = Arrangement::from_rects(n, faces.iter().chain(std::iter::once(target)));
    let mut ok = true;
    arr.for_each_cell_in(target, |cell| {
        if !ok {
            return;
        }
        // Only cells that are full-dimensional relative to the target: on
        // every axis where the target has extent, the cell must be a gap.
        for a in 0..n {
            if target.lo[a] < target.hi[a] && cell.at[a] {
                return;
            }
        }
        if !faces.iter().any(|f| f.contains_rect(&cell.rect)) {
            ok = false;
        }
    });
    ok
}

/// Does the partition respect `rect` (projected coordinates) as a wall from
/// height `lo` to `hi`?  Exact: each of the `2(n−1)` wall slabs must lie in
/// the union of piece boundaries.
pub fn respects(
    partition: &LocalPartition,
    axis: usize,
    rect: &Rect,
    lo: i64,
    hi: i64,
) -> bool {
    assert!(lo <= hi);
    let faces = all_faces(partition);
    let lifted = rect.insert_axis(axis, lo, hi);
    for proj_axis in 0..rect.dim_ambient() {
        let real_axis = if proj_axis < axis { proj_axis } else { proj_axis + 1 };
        for level in [lifted.lo[real_axis], lifted.hi[real_axis]] {
            let wall = lifted.face(real_axis, level);
            if !covered_by_faces(&wall, &faces) {
                return false;
            }
        }
    }
    true
}

/// Largest `d₂ ≥ d₁` such that the wall over `rect` holds from `d₁` to
/// `d₂`.  Errors when even the zero-height wall at `d₁` fails.
pub fn virtual_span(
    partition: &LocalPartition,
    axis: usize,
    rect: &Rect,
    d1: i64,
) -> Result<i64, SurfaceError> {
    if !respects(partition, axis, rect, d1, d1) {
        return Err(SurfaceError::NotRespected);
    }
    let window = partition.window();
    let mut heights: Vec<i64> = partition
        .pieces()
        .iter()
        .flat_map(|p| [p.lo[axis], p.hi[axis]])
        .chain([window.hi[axis]])
        .filter(|&t| t > d1)
        .collect();
    heights.sort_unstable();
    heights.dedup();
    let mut cur = d1;
    for t in heights {
        if respects(partition, axis, rect, cur, t) {
            cur = t;
        } else {
            break;
        }
    }
    Ok(cur)
}

/// One growth step of the surface chain.  Preconditions: the partition is
/// minimal, `m1` is virtual from `d1` to `d2`, `d2` is the largest such and
/// lies strictly below the window top.  On minimal inputs one of the two
/// cases must apply; a miss is reported as a falsification, not papered
/// over.
pub fn grow_surface(
    partition: &LocalPartition,
    axis: usize,
    m1: &Rect,
    d1: i64,
    d2: i64,
) -> Result<GrowOutcome, SurfaceError> {
    let window = partition.window();
    if d1 >= d2 {
        return Err(SurfaceError::BadHypothesis("need d1 < d2".into()));
    }
    if d2 >= window.hi[axis] {
        return Err(SurfaceError::BadHypothesis("d2 must be below the window top".into()));
    }
    let span = virtual_span(partition, axis, m1, d1)?;
    if span != d2 {
        return Err(SurfaceError::BadHypothesis(format!(
            "d2={d2} is not the maximal span, which is {span}"
        )));
    }
    let surfaces = maximal_surfaces(partition, axis, d2)
        .map_err(|_| SurfaceError::Falsified("break height is not a level".into()))?;
    // Case (i): a maximal surface strictly containing m1.
    let mut containing: Vec<&Surface> = surfaces
        .iter()
        .filter(|s| {
            let region = s.region();
            region.covers_rect(m1) && !s.cells.iter().all(|c| m1.contains_rect(c))
        })
        .collect();
    if containing.len() > 1 {
        return Err(SurfaceError::Falsified(
            "multiple maximal surfaces strictly contain the virtual surface".into(),
        ));
    }
    if let Some(s) = containing.pop() {
        let rect = s.as_rectangle().ok_or_else(|| {
            SurfaceError::Falsified("maximal surface is not a box on minimal input".into())
        })?;
        return Ok(GrowOutcome::MaximalAt(rect));
    }
    // Case (ii): extend along one side that the overhanging pieces touch.
    let pk = m1.dim_ambient();
    let overhanging: Vec<Rect> = partition
        .pieces()
        .iter()
        .filter(|p| p.lo[axis] == d2)
        .map(|p| p.drop_axis(axis))
        .filter(|f| f.interior_intersects(m1))
        .filter(|f| (0..pk).any(|a| f.lo[a] < m1.lo[a] || f.hi[a] > m1.hi[a]))
        .collect();
    let mut candidates: Vec<(Rect, i64)> = Vec::new();
    for side_axis in 0..pk {
        for side_hi in [false, true] {
            let level = if side_hi { m1.hi[side_axis] } else { m1.lo[side_axis] };
            let side = m1.face(side_axis, level);
            let touched = overhanging.iter().any(|f| open_meets(f, &side, side_axis, level));
            if !touched {
                continue;
            }
            let host = surfaces.iter().find(|s| s.region().covers_rect(&side));
            let Some(host) = host else {
                return Err(SurfaceError::Falsified(
                    "touched side is not covered at the break height".into(),
                ));
            };
            let host_rect = host.as_rectangle().ok_or_else(|| {
                SurfaceError::Falsified("maximal surface is not a box on minimal input".into())
            })?;
            let mut m2 = m1.clone();
            if side_hi {
                if host_rect.hi[side_axis] <= m1.hi[side_axis] {
                    continue;
                }
                m2.hi[side_axis] = host_rect.hi[side_axis];
            } else {
                if host_rect.lo[side_axis] >= m1.lo[side_axis] {
                    continue;
                }
                m2.lo[side_axis] = host_rect.lo[side_axis];
            }
            let Ok(d3) = virtual_span(partition, axis, &m2, d2) else {
                continue;
            };
            if d3 <= d2 {
                continue;
            }
            if !new_points_on_meeting_surfaces(&m2, m1, &surfaces) {
                continue;
            }
            if partition.dim() == 3 && !meeting_surfaces_inside(&m2, m1, &surfaces) {
                continue;
            }
            candidates.push((m2, d3));
        }
    }
    candidates.sort();
    candidates.dedup();
    match candidates.into_iter().next() {
        Some((m2, d3)) => Ok(GrowOutcome::VirtualTo(m2, d3)),
        None => Err(SurfaceError::Falsified(
            "no growth candidate satisfies the virtual-surface conditions".into(),
        )),
    }
}

/// Does the open footprint `f` meet the side face `side` (degenerate on
/// `side_axis` at `level`)?
fn open_meets(f: &Rect, side: &Rect, side_axis: usize, level: i64) -> bool {
    (0..f.dim_ambient()).all(|a| {
        if a == side_axis {
            f.lo[a] < level && level < f.hi[a]
        } else {
            f.lo[a] < side.hi[a] && f.hi[a] > side.lo[a]
        }
    })
}

/// Growth condition: every point gained by `m2` lies on a maximal surface
/// whose interior meets the interior of `m1`.
fn new_points_on_meeting_surfaces(m2: &Rect, m1: &Rect, surfaces: &[Surface]) -> bool {
    let meeting: Vec<Rect> = surfaces
        .iter()
        .filter(|s| s.cells.iter().any(|c| c.interior_intersects(m1)))
        .flat_map(|s| s.cells.iter().cloned())
        .collect();
    let mut covered = meeting;
    covered.push(m1.clone());
    Region::new(covered).covers_rect(m2)
}

/// Three-dimensional growth condition: every maximal surface whose interior
/// meets the interior of `m1` stays inside `m2`.
fn meeting_surfaces_inside(m2: &Rect, m1: &Rect, surfaces: &[Surface]) -> bool {
    surfaces
        .iter()
        .filter(|s| s.cells.iter().any(|c| c.interior_intersects(m1)))
        .all(|s| s.cells.iter().all(|c| m2.contains_rect(c)))
}

/// An axis-parallel segment inside a fixed-normal part of the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    /// Direction of the segment.
    pub direction: usize,
    /// Normal of the hosting boundary faces.
    pub normal: usize,
    pub from: Point,
    pub to: Point,
}

impl Segment {
    pub fn length(&self) -> i64 {
        self.to.0[self.direction] - self.from.0[self.direction]
    }
}

/// Is the segment covered by faces with the given normal?  One-dimensional
/// exact cover along the segment line.
pub fn segment_on_normal_faces(partition: &LocalPartition, seg: &Segment) -> bool {
    if seg.normal == seg.direction {
        return false;
    }
    let j = seg.direction;
    let mut intervals: Vec<(i64, i64)> = Vec::new();
    for p in partition.pieces() {
        for level in [p.lo[seg.normal], p.hi[seg.normal]] {
            let face = p.face(seg.normal, level);
            // The line through the segment must lie inside the face on every
            // axis except the direction.
            let on_line = (0..face.dim_ambient()).all(|a| {
                a == j || (face.lo[a] <= seg.from.0[a] && seg.from.0[a] <= face.hi[a])
            });
            if on_line {
                intervals.push((face.lo[j], face.hi[j]));
            }
        }
    }
    intervals.sort_unstable();
    let mut reach = seg.from.0[j];
    for (a, b) in intervals {
        if a > reach {
            break;
        }
        reach = reach.max(b);
    }
    reach >= seg.to.0[j]
}

/// Exhaustive oracle: the longest axis-parallel segment inside the union of
/// faces with a fixed normal, over all normals and levels.  Window-shell
/// levels can be excluded to focus on interior structure.
pub fn longest_boundary_segment(
    partition: &LocalPartition,
    interior_only: bool,
) -> Option<Segment> {
    let n = partition.dim();
    let window = partition.window();
    let mut best: Option<Segment> = None;
    for normal in 0..n {
        let mut levels_here: Vec<i64> = partition
            .pieces()
            .iter()
            .flat_map(|p| [p.lo[normal], p.hi[normal]])
            .collect();
        levels_here.sort_unstable();
        levels_here.dedup();
        for level in levels_here {
            if interior_only && (level == window.lo[normal] || level == window.hi[normal]) {
                continue;
            }
            let faces: Vec<Rect> = partition
                .pieces()
                .iter()
                .filter(|p| p.lo[normal] == level || p.hi[normal] == level)
                .map(|p| p.face(normal, level).drop_axis(normal))
                .collect();
            if faces.is_empty() {
                continue;
            }
            let k = n - 1;
            let arr = Arrangement::from_rects(k, faces.iter());
            let gaps: Vec<Vec<(i64, i64)>> = arr
                .coords
                .iter()
                .map(|cs| cs.windows(2).map(|w| (w[0], w[1])).collect())
                .collect();
            for dir in 0..k {
                let real_dir = if dir < normal { dir } else { dir + 1 };
                // Transversal positions: a gap choice on every other axis.
                let mut trans: Vec<usize> = Vec::new();
                let others: Vec<usize> = (0..k).filter(|&a| a != dir).collect();
                if others.iter().any(|&a| gaps[a].is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; others.len()];
                'columns: loop {
                    trans.clear();
                    trans.extend(idx.iter().copied());
                    let mut run_start: Option<i64> = None;
                    let mut run_end = 0i64;
                    for (gi, &(glo, ghi)) in gaps[dir].iter().enumerate() {
                        let _ = gi;
                        let hull = Rect::new(
                            (0..k)
                                .map(|a| {
                                    if a == dir {
                                        glo
                                    } else {
                                        let oi = others.iter().position(|&x| x == a).unwrap();
                                        gaps[a][idx[oi]].0
                                    }
                                })
                                .collect(),
                            (0..k)
                                .map(|a| {
                                    if a == dir {
                                        ghi
                                    } else {
                                        let oi = others.iter().position(|&x| x == a).unwrap();
                                        gaps[a][idx[oi]].1
                                    }
                                })
                                .collect(),
                        );
                        let inside = faces.iter().any(|f| f.contains_rect(&hull));
                        if inside {
                            if run_start.is_none() {
                                run_start = Some(glo);
                            }
                            run_end = ghi;
                        }
                        if !inside || gaps[dir].len() == 1 {
                            if let Some(start) = run_start.take() {
                                record_run(
                                    &mut best, partition, normal, real_dir, level, start,
                                    run_end, &others, &gaps, &idx, dir,
                                );
                            }
                        }
                    }
                    if let Some(start) = run_start.take() {
                        record_run(
                            &mut best, partition, normal, real_dir, level, start, run_end,
                            &others, &gaps, &idx, dir,
                        );
                    }
                    for (slot, &a) in others.iter().enumerate() {
                        if idx[slot] + 1 < gaps[a].len() {
                            idx[slot] += 1;
                            continue 'columns;
                        }
                        idx[slot] = 0;
                    }
                    break;
                }
            }
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn record_run(
    best: &mut Option<Segment>,
    partition: &LocalPartition,
    normal: usize,
    real_dir: usize,
    level: i64,
    start: i64,
    end: i64,
    others: &[usize],
    gaps: &[Vec<(i64, i64)>],
    idx: &[usize],
    dir: usize,
) {
    let n = partition.dim();
    let mut from = vec![0i64; n];
    from[normal] = level;
    for (slot, &a) in others.iter().enumerate() {
        let real = if a < normal { a } else { a + 1 };
        from[real] = gaps[a][idx[slot]].0;
    }
    let k_dir = if dir < normal { dir } else { dir + 1 };
    debug_assert_eq!(k_dir, real_dir);
    from[real_dir] = start;
    let mut to = from.clone();
    to[real_dir] = end;
    let seg = Segment {
        direction: real_dir,
        normal,
        from: Point(from),
        to: Point(to),
    };
    if best.as_ref().map_or(true, |b| seg.length() > b.length()) {
        *best = Some(seg);
    }
}

/// Report from the respected-segment sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub segment: Segment,
    /// Chain of virtual surfaces the sweep walked, when one was needed.
    pub chain: SurfaceChain,
}

/// Exact integer form of `len ≥ √(b·d)/(n−1)`.
pub fn segment_long_enough(len: i64, b: i64, d: i64, n: usize) -> bool {
    let f = (n as i64 - 1) * (n as i64 - 1);
    len >= 0 && len * len * f >= b * d
}

/// Constructive sweep for a long axis-parallel boundary segment.  Follows
/// the growth chain along the last axis: an over-tall wall yields a
/// vertical segment, an over-wide surface a horizontal one; the coordinate
/// discreteness forces one of the two before the chain tops out.
pub fn find_respected_segment(
    partition: &LocalPartition,
    b: i64,
    d: i64,
) -> Result<SegmentReport, SurfaceError> {
    let n = partition.dim();
    if n < 2 || b <= d || d <= 0 {
        return Err(SurfaceError::BadHypothesis("need n ≥ 2 and b > d > 0".into()));
    }
    let window = partition.window();
    if (0..n).any(|a| window.side(a) < b) {
        return Err(SurfaceError::BadHypothesis("window sides must be at least b".into()));
    }
    if partition.pieces().len() <= 1 {
        return Err(SurfaceError::BadHypothesis(
            "partition has no interior boundary".into(),
        ));
    }
    // Trivial case: a piece already has a long side.
    for p in partition.pieces() {
        for j in 0..n {
            if segment_long_enough(p.side(j), b, d, n) {
                let normal = (0..n).find(|&i| i != j).unwrap();
                let mut to = p.lo.clone();
                to[j] = p.hi[j];
                let seg = Segment {
                    direction: j,
                    normal,
                    from: Point(p.lo.clone()),
                    to: Point(to),
                };
                debug_assert!(segment_on_normal_faces(partition, &seg));
                return Ok(SegmentReport { segment: seg, chain: SurfaceChain::default() });
            }
        }
    }
    let axis = n - 1;
    let all_levels = levels(partition, axis);
    let first_level = *all_levels.first().ok_or_else(|| {
        SurfaceError::BadHypothesis("no interior level on the sweep axis".into())
    })?;
    let start = maximal_surfaces(partition, axis, first_level)?
        .into_iter()
        .next()
        .ok_or_else(|| SurfaceError::Falsified("level without a surface".into()))?;
    let mut m = start.as_rectangle().ok_or_else(|| {
        SurfaceError::Falsified("maximal surface is not a box on minimal input".into())
    })?;
    let mut d_cur = first_level;
    let mut chain = SurfaceChain { axis, links: Vec::new() };
    loop {
        let d_next = virtual_span(partition, axis, &m, d_cur)?;
        chain.links.push(ChainLink { rect: m.clone(), d1: d_cur, d2: d_next });
        // Tall wall: vertical segment on a corner edge of the cylinder.
        if segment_long_enough(d_next - d_cur, b, d, n) {
            let seg = corner_wall_segment(&m, axis, d_cur, d_next);
            if segment_on_normal_faces(partition, &seg) {
                return Ok(SegmentReport { segment: seg, chain });
            }
            return Err(SurfaceError::Falsified(
                "wall segment is not hosted by fixed-normal faces".into(),
            ));
        }
        // Wide surface: horizontal segment along an edge of the box.
        for pa in 0..n - 1 {
            if segment_long_enough(m.side(pa), b, d, n) {
                let real_dir = if pa < axis { pa } else { pa + 1 };
                let normal_proj = (0..n - 1).find(|&a| a != pa).unwrap();
                let normal = if normal_proj < axis { normal_proj } else { normal_proj + 1 };
                let lifted = m.insert_axis(axis, d_cur, d_cur);
                let mut to = lifted.lo.clone();
                to[real_dir] = lifted.hi[real_dir];
                let seg = Segment {
                    direction: real_dir,
                    normal,
                    from: Point(lifted.lo),
                    to: Point(to),
                };
                if segment_on_normal_faces(partition, &seg) {
                    return Ok(SegmentReport { segment: seg, chain });
                }
                return Err(SurfaceError::Falsified(
                    "surface edge is not hosted by fixed-normal faces".into(),
                ));
            }
        }
        if d_next >= window.hi[axis] {
            return Err(SurfaceError::Falsified(
                "chain topped out before producing a long segment".into(),
            ));
        }
        match grow_surface(partition, axis, &m, d_cur, d_next)? {
            GrowOutcome::MaximalAt(m2) => {
                m = m2;
                d_cur = d_next;
            }
            GrowOutcome::VirtualTo(m2, _) => {
                m = m2;
                d_cur = d_next;
            }
        }
    }
}

fn corner_wall_segment(m: &Rect, axis: usize, d1: i64, d2: i64) -> Segment {
    let lifted = m.insert_axis(axis, d1, d2);
    let normal = if axis == 0 { 1 } else { 0 };
    let mut to = lifted.lo.clone();
    to[axis] = d2;
    Segment { direction: axis, normal, from: Point(lifted.lo), to: Point(to) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn towers() -> LocalPartition {
        // Two towers of different heights plus a cap, in a 3D window.
        let window = Rect::from_pairs(&[(0, 8), (0, 6), (0, 6)]);
        LocalPartition::new(
            window,
            vec![
                Rect::from_pairs(&[(0, 4), (0, 6), (0, 2)]),
                Rect::from_pairs(&[(4, 8), (0, 6), (0, 4)]),
                Rect::from_pairs(&[(0, 4), (0, 6), (2, 4)]),
                Rect::from_pairs(&[(0, 8), (0, 6), (4, 6)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn levels_are_interior_tops_and_bottoms() {
        let p = towers();
        assert_eq!(levels(&p, 2), vec![2, 4]);
        assert_eq!(levels(&p, 0), vec![4]);
        assert_eq!(levels(&p, 1), Vec::<i64>::new());
        // Every upper level is a lower level of another piece.
        for d in levels(&p, 2) {
            assert!(p.pieces().iter().any(|q| q.lo[2] == d));
        }
    }

    #[test]
    fn surfaces_at_the_lower_top_are_the_lower_footprint() {
        let p = towers();
        let at2 = maximal_surfaces(&p, 2, 2).unwrap();
        assert_eq!(at2.len(), 1);
        assert_eq!(
            at2[0].as_rectangle().unwrap(),
            Rect::from_pairs(&[(0, 4), (0, 6)])
        );
        let at4 = maximal_surfaces(&p, 2, 4).unwrap();
        assert_eq!(at4.len(), 1);
        assert_eq!(
            at4[0].as_rectangle().unwrap(),
            Rect::from_pairs(&[(0, 8), (0, 6)])
        );
        assert_eq!(maximal_surfaces(&p, 2, 3), Err(SurfaceError::NotALevel(3)));
    }

    #[test]
    fn separated_footprints_make_two_surfaces() {
        let window = Rect::from_pairs(&[(0, 10), (0, 4), (0, 4)]);
        let p = LocalPartition::new(
            window,
            vec![
                Rect::from_pairs(&[(0, 4), (0, 4), (0, 2)]),
                Rect::from_pairs(&[(6, 10), (0, 4), (0, 2)]),
                Rect::from_pairs(&[(4, 6), (0, 4), (0, 4)]),
                Rect::from_pairs(&[(0, 4), (0, 4), (2, 4)]),
                Rect::from_pairs(&[(6, 10), (0, 4), (2, 4)]),
            ],
        )
        .unwrap();
        let at2 = maximal_surfaces(&p, 2, 2).unwrap();
        assert_eq!(at2.len(), 2);
    }

    #[test]
    fn box_likeness_is_the_local_product_criterion() {
        assert_eq!(
            is_box_like(&[Rect::from_pairs(&[(0, 4), (0, 2)])]),
            Some(Rect::from_pairs(&[(0, 4), (0, 2)]))
        );
        // Two pieces of one box.
        assert_eq!(
            is_box_like(&[
                Rect::from_pairs(&[(0, 4), (0, 2)]),
                Rect::from_pairs(&[(0, 4), (2, 6)])
            ]),
            Some(Rect::from_pairs(&[(0, 4), (0, 6)]))
        );
        // An L shape has a concave corner.
        assert_eq!(
            is_box_like(&[
                Rect::from_pairs(&[(0, 4), (0, 2)]),
                Rect::from_pairs(&[(0, 2), (2, 6)])
            ]),
            None
        );
        // A three-dimensional cross fails at its inner corners.
        assert_eq!(
            is_box_like(&[
                Rect::from_pairs(&[(0, 6), (2, 4), (0, 2)]),
                Rect::from_pairs(&[(2, 4), (0, 6), (0, 2)]),
            ]),
            None
        );
        // Disconnected unions are rejected.
        assert_eq!(
            is_box_like(&[
                Rect::from_pairs(&[(0, 2), (0, 2)]),
                Rect::from_pairs(&[(4, 6), (0, 2)])
            ]),
            None
        );
    }

    #[test]
    fn virtual_span_of_the_lower_tower() {
        let p = towers();
        // The footprint of the lower tower is respected from 0 up to 4:
        // its wall at x=4 is interior shared boundary, the rest is shell.
        let m = Rect::from_pairs(&[(0, 4), (0, 6)]);
        assert_eq!(virtual_span(&p, 2, &m, 0).unwrap(), 4);
        // The full cross-section is respected to the very top.
        let full = Rect::from_pairs(&[(0, 8), (0, 6)]);
        assert_eq!(virtual_span(&p, 2, &full, 0).unwrap(), 6);
        // A box whose wall is off every face plane: at the window bottom its
        // zero-height wall still lies on the bottom faces, but it cannot
        // rise; started in a piece interior it is not respected at all.
        let off = Rect::from_pairs(&[(1, 3), (1, 5)]);
        assert_eq!(virtual_span(&p, 2, &off, 0).unwrap(), 0);
        assert_eq!(virtual_span(&p, 2, &off, 1), Err(SurfaceError::NotRespected));
    }

    #[test]
    fn growth_finds_the_union_footprint() {
        let p = towers();
        let m1 = Rect::from_pairs(&[(0, 4), (0, 6)]);
        // m1 is virtual from 0 to 4 (maximal), 4 < window top 6.
        match grow_surface(&p, 2, &m1, 0, 4).unwrap() {
            GrowOutcome::MaximalAt(m2) => {
                assert_eq!(m2, Rect::from_pairs(&[(0, 8), (0, 6)]));
            }
            other => panic!("expected case (i), got {other:?}"),
        }
        // Wrong d2 is rejected.
        assert!(matches!(
            grow_surface(&p, 2, &m1, 0, 2),
            Err(SurfaceError::BadHypothesis(_))
        ));
    }

    #[test]
    fn growth_case_two_extends_one_axis() {
        // An overhanging brick Q straddles the y=4 wall of m1 above height
        // 4, breaking the span there, while part of m1's column keeps going
        // up — so no maximal surface at 4 contains m1 and the growth must
        // extend m1 along the one touched side.
        let window = Rect::from_pairs(&[(0, 4), (0, 8), (0, 8)]);
        let p = LocalPartition::new(
            window,
            vec![
                Rect::from_pairs(&[(0, 4), (0, 4), (0, 2)]),
                Rect::from_pairs(&[(0, 4), (0, 2), (2, 6)]),
                Rect::from_pairs(&[(0, 4), (2, 4), (2, 4)]),
                Rect::from_pairs(&[(0, 4), (4, 8), (0, 4)]),
                Rect::from_pairs(&[(0, 4), (2, 8), (4, 6)]),
                Rect::from_pairs(&[(0, 4), (0, 8), (6, 8)]),
            ],
        )
        .unwrap();
        let m1 = Rect::from_pairs(&[(0, 4), (0, 4)]);
        assert_eq!(virtual_span(&p, 2, &m1, 2).unwrap(), 4);
        match grow_surface(&p, 2, &m1, 2, 4).unwrap() {
            GrowOutcome::VirtualTo(m2, d3) => {
                assert_eq!(m2, Rect::from_pairs(&[(0, 4), (0, 8)]));
                assert_eq!(d3, 8);
            }
            other => panic!("expected case (ii), got {other:?}"),
        }
    }

    #[test]
    fn respected_segment_in_a_sliced_window() {
        // Slabs stacked along the last axis: every piece has long sides, so
        // the trivial case fires.
        let window = Rect::from_pairs(&[(0, 16), (0, 16), (0, 16)]);
        let p = LocalPartition::new(
            window,
            (0..4)
                .map(|i| Rect::from_pairs(&[(0, 16), (0, 16), (4 * i, 4 * i + 4)]))
                .collect(),
        )
        .unwrap();
        let report = find_respected_segment(&p, 16, 2).unwrap();
        assert!(segment_long_enough(report.segment.length(), 16, 2, 3));
        assert!(segment_on_normal_faces(&p, &report.segment));
    }

    #[test]
    fn exhaustive_scan_agrees_on_towers() {
        let p = towers();
        let best = longest_boundary_segment(&p, true).unwrap();
        // Interior boundary: the tower interface at x=4 hosts a segment of
        // length 6; the z=2 and z=4 interfaces host one of length 8.
        assert_eq!(best.length(), 8);
        assert!(segment_on_normal_faces(&p, &best));
    }

    #[test]
    fn chain_links_validate() {
        let chain = SurfaceChain {
            axis: 2,
            links: vec![
                ChainLink { rect: Rect::from_pairs(&[(0, 2), (0, 2)]), d1: 0, d2: 2 },
                ChainLink { rect: Rect::from_pairs(&[(0, 4), (0, 2)]), d1: 2, d2: 4 },
            ],
        };
        assert!(chain.is_strictly_increasing());
        let bad = SurfaceChain {
            axis: 2,
            links: vec![
                ChainLink { rect: Rect::from_pairs(&[(0, 4), (0, 2)]), d1: 0, d2: 2 },
                ChainLink { rect: Rect::from_pairs(&[(0, 2), (0, 2)]), d1: 2, d2: 4 },
            ],
        };
        assert!(!bad.is_strictly_increasing());
    }
}
