use crate::config::{Torus, TorusError};
use crate::divide::TorusPartition;
use boxpart_core::geom::directional_boundary;
use boxpart_core::{lattice_points, Point};
use serde::Serialize;
use std::collections::BTreeMap;

/// Point-to-piece queries: every piece is indexed under each grid cell it
/// overlaps, so the pieces containing a point all sit in the point's own
/// bucket. The grid is sized to the piece count, keeping both the index and
/// the per-query work proportional.
pub struct PieceLocator<'a> {
    torus: Torus,
    part: &'a TorusPartition,
    nb: i64,
    start: Vec<u32>,
    ids: Vec<u32>,
}

impl<'a> PieceLocator<'a> {
    pub fn new(torus: Torus, part: &'a TorusPartition) -> Self {
        let n = torus.n;
        let m = torus.m;
        let nb = (part.len() as f64)
            .powf(1.0 / n as f64)
            .round()
            .max(1.0)
            .min((m / 4).max(1) as f64) as i64;
        let nbuckets = (nb as usize).pow(n as u32);
        // Two CSR passes over the piece/bucket incidences.
        let mut start = vec![0u32; nbuckets + 1];
        for i in 0..part.len() {
            Self::buckets_of_piece(torus, part, nb, i, |idx| start[idx + 1] += 1);
        }
        for k in 1..start.len() {
            start[k] += start[k - 1];
        }
        let mut fill = start.clone();
        let mut ids = vec![0u32; *start.last().unwrap() as usize];
        for i in 0..part.len() {
            Self::buckets_of_piece(torus, part, nb, i, |idx| {
                ids[fill[idx] as usize] = i as u32;
                fill[idx] += 1;
            });
        }
        PieceLocator {
            torus,
            part,
            nb,
            start,
            ids,
        }
    }

    /// Visits the flat index of every grid cell the closed piece overlaps;
    /// counted on the unwrapped line so wrapping pieces still cover every
    /// cell exactly once.
    fn buckets_of_piece<F: FnMut(usize)>(
        torus: Torus,
        part: &TorusPartition,
        nb: i64,
        i: usize,
        mut f: F,
    ) {
        let n = torus.n;
        let m = torus.m;
        let mut ranges = [(0i64, 0i64); 8];
        for a in 0..n {
            let lo = part.lo(i, a);
            let t = |x: i64| (x * nb).div_euclid(m);
            let b0 = t(lo);
            let span = (t(lo + part.side(i, a)) - b0 + 1).min(nb);
            ranges[a] = (b0.rem_euclid(nb), span);
        }
        let mut cursor = [0i64; 8];
        loop {
            let mut idx = 0usize;
            for a in 0..n {
                let b = (ranges[a].0 + cursor[a]).rem_euclid(nb);
                idx = idx * nb as usize + b as usize;
            }
            f(idx);
            let mut a = n;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                cursor[a] += 1;
                if cursor[a] < ranges[a].1 {
                    break;
                }
                cursor[a] = 0;
            }
        }
    }

    #[inline]
    fn bucket_index(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        for &c in x {
            let b = self.torus.norm(c) * self.nb / self.torus.m;
            idx = idx * self.nb as usize + b as usize;
        }
        idx
    }

    pub fn for_each_containing<F: FnMut(u32)>(&self, x: &[i64], mut f: F) {
        let idx = self.bucket_index(x);
        let s = self.start[idx] as usize;
        let e = self.start[idx + 1] as usize;
        for &pid in &self.ids[s..e] {
            if self.part.contains(pid as usize, x) {
                f(pid);
            }
        }
    }

    pub fn pieces_containing(&self, x: &[i64]) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each_containing(x, |pid| out.push(pid));
        out.sort_unstable();
        out
    }

    /// Sup-metric distance from `x` to piece `pid` on the torus.
    pub fn piece_dist(&self, pid: usize, x: &[i64]) -> i64 {
        let mut best = 0;
        for a in 0..self.torus.n {
            let off = self.part.offset_in(pid, a, x[a]);
            let side = self.part.side(pid, a);
            if off > side {
                best = best.max((off - side).min(self.torus.m - off));
            }
        }
        best
    }

    /// Number of pieces within sup-distance `d` of `x`. A piece within `d`
    /// overlaps some cell of the query window, so walking the window's
    /// buckets (deduplicated) finds them all.
    pub fn count_within(&self, x: &[i64], d: i64) -> usize {
        let n = self.torus.n;
        let m = self.torus.m;
        let nb = self.nb;
        let mut ranges = Vec::with_capacity(n);
        for &c in x {
            let c = self.torus.norm(c);
            let t = |v: i64| (v * nb).div_euclid(m);
            let b0 = t(c - d);
            let span = (t(c + d) - b0 + 1).min(nb);
            ranges.push((b0.rem_euclid(nb), span));
        }
        let mut seen: Vec<u32> = Vec::new();
        let mut cursor = vec![0i64; n];
        'cells: loop {
            let mut idx = 0usize;
            for a in 0..n {
                let b = (ranges[a].0 + cursor[a]).rem_euclid(nb);
                idx = idx * nb as usize + b as usize;
            }
            let s = self.start[idx] as usize;
            let e = self.start[idx + 1] as usize;
            seen.extend_from_slice(&self.ids[s..e]);
            let mut a = n;
            loop {
                if a == 0 {
                    break 'cells;
                }
                a -= 1;
                cursor[a] += 1;
                if cursor[a] < ranges[a].1 {
                    break;
                }
                cursor[a] = 0;
            }
        }
        seen.sort_unstable();
        seen.dedup();
        seen.retain(|&pid| self.piece_dist(pid as usize, x) <= d);
        seen.len()
    }
}

/// True when `x` is a corner of piece `i`: on a face of every axis.
fn is_corner_of(part: &TorusPartition, i: usize, x: &[i64]) -> bool {
    (0..part.n).all(|a| {
        let d = part.offset_in(i, a, x[a]);
        d == 0 || d == part.side(i, a)
    })
}

/// Visits every arrangement vertex that is the corner of at least one piece,
/// exactly once, with the ids of all pieces containing it. Every point with
/// multiplicity above `2^(n-1)` is such a corner: the local cones of the
/// pieces at a point partition the `2^n` orthants, so more than `2^(n-1)`
/// pieces force a one-orthant cone, whose apex piece has the point as a
/// corner. Each vertex is reported by its smallest corner-owning piece.
pub(crate) fn scan_vertices<F: FnMut(&[i64], &[u32])>(
    torus: Torus,
    part: &TorusPartition,
    locator: &PieceLocator,
    mut visit: F,
) {
    let n = torus.n;
    let mut x = vec![0i64; n];
    let mut containing: Vec<u32> = Vec::new();
    for i in 0..part.len() {
        for mask in 0u32..(1 << n) {
            for a in 0..n {
                let c = if mask >> a & 1 == 1 {
                    part.hi(i, a)
                } else {
                    part.lo(i, a)
                };
                x[a] = c.rem_euclid(torus.m);
            }
            containing.clear();
            let mut owner = u32::MAX;
            locator.for_each_containing(&x, |pid| {
                containing.push(pid);
                if pid < owner && is_corner_of(part, pid as usize, &x) {
                    owner = pid;
                }
            });
            if owner == i as u32 {
                containing.sort_unstable();
                visit(&x, &containing);
            }
        }
    }
}

/// `crosses[j][l]`: the faces through the point with normal axis `j` reach
/// both sides of the hyperplane with normal axis `l`. A piece with a face
/// through the point on axis `j` touches the side of that hyperplane it
/// extends into; a piece straddling axis `l` touches both sides.
pub fn crossing_matrix(rows: &[Vec<i8>]) -> Vec<Vec<bool>> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut out = vec![vec![false; n]; n];
    for j in 0..n {
        for l in 0..n {
            if j == l {
                continue;
            }
            let plus = rows.iter().any(|r| r[j] != 0 && r[l] >= 0);
            let minus = rows.iter().any(|r| r[j] != 0 && r[l] <= 0);
            out[j][l] = plus && minus;
        }
    }
    out
}

/// Ordered axis pairs `(j, l)` where the faces normal to `e_j` stay on one
/// side of the hyperplane normal to `e_l`.
fn failing_pairs(rows: &[Vec<i8>]) -> Vec<(usize, usize)> {
    let m = crossing_matrix(rows);
    let n = m.len();
    let mut out = Vec::new();
    for j in 0..n {
        for l in 0..n {
            if j != l && !m[j][l] {
                out.push((j, l));
            }
        }
    }
    out
}

/// Orthant bitmask of a piece's local cone at a contained point: bit `o`
/// is set when the cone covers the orthant whose sign on axis `a` is
/// `+` iff bit `a` of `o` is set.
fn orthant_mask(row: &[i8]) -> u32 {
    let n = row.len();
    let mut mask = 0u32;
    for o in 0u32..(1 << n) {
        let covered = (0..n).all(|a| {
            let plus = o >> a & 1 == 1;
            match row[a] {
                0 => true,
                1 => plus,
                _ => !plus,
            }
        });
        if covered {
            mask |= 1 << o;
        }
    }
    mask
}

/// Multiplicity statistics over the vertices of the partition arrangement.
///
/// The histogram counts vertices that are corners of at least one piece
/// (see `scan_vertices`: any point with multiplicity above `2^(n-1)` is
/// one). `gamma_upper` therefore bounds the multiplicity of *every* point;
/// it is exact whenever `max_corner_nu` is at least `non_corner_cap`.
#[derive(Debug, Clone, Serialize)]
pub struct RegulationStats {
    pub histogram: BTreeMap<usize, u64>,
    pub vertices: u64,
    pub max_corner_nu: usize,
    pub non_corner_cap: usize,
    pub gamma_upper: usize,
    pub bound: usize,
    pub crossing_checked: u64,
    pub crossing_violations: u64,
}

/// Full vertex scan: multiplicity histogram plus, at every vertex meeting
/// the bound `3·2^(n-2)`, the crossing-lemma invariant that some ordered
/// axis pair fails to cross.
pub fn regulation_stats(torus: Torus, part: &TorusPartition) -> RegulationStats {
    let n = torus.n;
    let locator = PieceLocator::new(torus, part);
    let bound = 3usize << (n - 2);
    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    let mut vertices = 0u64;
    let mut max_nu = 0usize;
    let mut checked = 0u64;
    let mut violations = 0u64;
    scan_vertices(torus, part, &locator, |x, ids| {
        let nu = ids.len();
        *histogram.entry(nu).or_insert(0) += 1;
        vertices += 1;
        max_nu = max_nu.max(nu);
        if nu == bound {
            let rows: Vec<Vec<i8>> = ids
                .iter()
                .map(|&pid| part.incidence_row(pid as usize, x))
                .collect();
            checked += 1;
            if failing_pairs(&rows).is_empty() {
                violations += 1;
            }
        }
    });
    let cap = 1usize << (n - 1);
    RegulationStats {
        histogram,
        vertices,
        max_corner_nu: max_nu,
        non_corner_cap: cap,
        gamma_upper: max_nu.max(cap),
        bound,
        crossing_checked: checked,
        crossing_violations: violations,
    }
}

/// A multiplicity-6 vertex of a 3-dimensional partition, classified: the
/// two `pair` pieces straddle axis 1 and share the side `sigma` of the
/// `axis` hyperplane; the four `singles` fill the opposite side. Axis 1
/// fails to cross `axis`, and that is the only failing ordered pair.
#[derive(Debug, Clone, Serialize)]
pub struct Troublesome {
    pub x: Vec<i64>,
    pub axis: usize,
    pub sigma: i8,
    pub pair_pos: u32,
    pub pair_neg: u32,
    pub singles: [u32; 4],
}

pub(crate) fn classify_troublesome(
    x: &[i64],
    ids: &[u32],
    rows: &[Vec<i8>],
) -> Result<Troublesome, TorusError> {
    let fail = |why: String| {
        Err(TorusError::Verification(format!(
            "multiplicity-6 vertex {x:?} does not match the two-pair pattern: {why}"
        )))
    };
    let mut mask_union = 0u32;
    let mut mask_total = 0u32;
    for r in rows {
        let m = orthant_mask(r);
        if mask_union & m != 0 {
            return fail("local cones overlap".into());
        }
        mask_union |= m;
        mask_total += m.count_ones();
    }
    if mask_union != 0xff || mask_total != 8 {
        return fail("local cones do not partition the orthants".into());
    }
    let pairs: Vec<usize> = (0..rows.len())
        .filter(|&k| rows[k].iter().filter(|&&e| e == 0).count() == 1)
        .collect();
    if pairs.len() != 2 {
        return fail(format!("{} straddling pieces instead of 2", pairs.len()));
    }
    if rows[pairs[0]][1] != 0 || rows[pairs[1]][1] != 0 {
        return fail("straddled axis is not axis 1".into());
    }
    let failing = failing_pairs(rows);
    if failing.len() != 1 || failing[0].0 != 1 {
        return fail(format!("failing crossing pairs {failing:?}"));
    }
    let axis = failing[0].1;
    if axis != 0 && axis != 2 {
        return fail(format!("non-crossed axis {axis}"));
    }
    let c = 2 - axis;
    let sigma = rows[pairs[0]][axis];
    if sigma == 0 || rows[pairs[1]][axis] != sigma {
        return fail("pair pieces disagree on the shared side".into());
    }
    if rows[pairs[0]][c] + rows[pairs[1]][c] != 0 || rows[pairs[0]][c] == 0 {
        return fail("pair pieces do not split the third axis".into());
    }
    let (pair_pos, pair_neg) = if rows[pairs[0]][c] == 1 {
        (ids[pairs[0]], ids[pairs[1]])
    } else {
        (ids[pairs[1]], ids[pairs[0]])
    };
    let mut singles = [0u32; 4];
    let mut seen = [false; 4];
    let mut k = 0;
    for (idx, r) in rows.iter().enumerate() {
        if pairs.contains(&idx) {
            continue;
        }
        if r[axis] != -sigma || r[1] == 0 || r[c] == 0 {
            return fail(format!("single piece row {r:?}"));
        }
        let slot = ((r[1] == 1) as usize) << 1 | (r[c] == 1) as usize;
        if seen[slot] {
            return fail("two singles in one orthant pair".into());
        }
        seen[slot] = true;
        singles[k] = ids[idx];
        k += 1;
    }
    Ok(Troublesome {
        x: x.to_vec(),
        axis,
        sigma,
        pair_pos,
        pair_neg,
        singles,
    })
}

/// All multiplicity-6 vertices of a 3-dimensional partition, each verified
/// to match the two-pair pattern (an error reports any that does not).
pub fn find_troublesome(
    torus: Torus,
    part: &TorusPartition,
) -> Result<Vec<Troublesome>, TorusError> {
    if torus.n != 3 {
        return Err(TorusError::Verification(
            "troublesome-vertex analysis applies to 3-dimensional partitions".into(),
        ));
    }
    let locator = PieceLocator::new(torus, part);
    let mut out: Vec<Result<Troublesome, TorusError>> = Vec::new();
    scan_vertices(torus, part, &locator, |x, ids| {
        if ids.len() == 6 {
            let rows: Vec<Vec<i8>> = ids
                .iter()
                .map(|&pid| part.incidence_row(pid as usize, x))
                .collect();
            out.push(classify_troublesome(x, ids, &rows));
        }
    });
    out.into_iter().collect()
}

/// A partition is nondegenerate when every axis has a piece of lattice
/// extent at least one step (side ≥ 4 half-units). For such partitions the
/// directional boundary `∂_u \ ∂_v` is nonempty for all signed lattice
/// units `u ≠ ±v`, which is checked directly on witness pieces.
pub fn check_nondegenerate(torus: Torus, part: &TorusPartition) -> bool {
    let n = torus.n;
    let mut witness: Vec<Option<usize>> = vec![None; n];
    for i in 0..part.len() {
        for a in 0..n {
            if witness[a].is_none() && part.side(i, a) >= 4 {
                witness[a] = Some(i);
            }
        }
    }
    if witness.iter().any(|w| w.is_none()) {
        return false;
    }
    for va in 0..n {
        let pts = lattice_points(&part.piece_rect(witness[va].unwrap()));
        for vs in [1i64, -1] {
            let mut v = vec![0i64; n];
            v[va] = vs;
            for ua in 0..n {
                if ua == va {
                    continue;
                }
                for us in [1i64, -1] {
                    let mut u = vec![0i64; n];
                    u[ua] = us;
                    let bu = directional_boundary(&pts, &u);
                    let bv: std::collections::HashSet<Point> =
                        directional_boundary(&pts, &v).into_iter().collect();
                    if !bu.iter().any(|p| !bv.contains(p)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 2x2 brick pattern on an 8-wide torus, each course offset by a
    /// quarter turn: every vertex is a T-joint of multiplicity 3.
    fn brick_partition() -> (Torus, TorusPartition) {
        let torus = Torus { n: 2, m: 8 };
        let mut part = TorusPartition::new(2, 8);
        let boxes = [
            ([1, 1], [5, 5]),
            ([5, 1], [9, 5]),
            ([3, 5], [7, 9]),
            ([7, 5], [11, 9]),
        ];
        for (k, (lo, hi)) in boxes.iter().enumerate() {
            part.push_piece(&lo[..], &hi[..], k as u32);
        }
        (torus, part)
    }

    #[test]
    fn brick_vertices_all_have_multiplicity_three() {
        let (torus, part) = brick_partition();
        assert_eq!(part.total_volume(), 64);
        let stats = regulation_stats(torus, &part);
        assert_eq!(stats.vertices, 8);
        assert_eq!(stats.histogram.get(&3), Some(&8));
        assert_eq!(stats.max_corner_nu, 3);
        assert_eq!(stats.gamma_upper, 3);
        assert_eq!(stats.bound, 3);
        assert_eq!(stats.crossing_checked, 8);
        assert_eq!(stats.crossing_violations, 0);
    }

    #[test]
    fn locator_finds_exactly_the_containing_pieces() {
        let (torus, part) = brick_partition();
        let locator = PieceLocator::new(torus, &part);
        assert_eq!(locator.pieces_containing(&[3, 5]), vec![0, 2, 3]);
        assert_eq!(locator.pieces_containing(&[2, 2]), vec![0]);
        assert_eq!(locator.count_within(&[2, 2], 0), 1);
        assert_eq!(locator.count_within(&[3, 5], 8), 4);
        assert_eq!(locator.piece_dist(1, &[2, 2]), 1);
    }

    #[test]
    fn aligned_grid_reports_coincident_corners_honestly() {
        // A perfectly aligned 2x2 grid of squares: each of the 4 torus
        // vertices has multiplicity 4, above the n=2 bound.
        let torus = Torus { n: 2, m: 8 };
        let mut part = TorusPartition::new(2, 8);
        for (k, (lx, ly)) in [(1, 1), (5, 1), (1, 5), (5, 5)].iter().enumerate() {
            part.push_piece(&[*lx, *ly], &[lx + 4, ly + 4], k as u32);
        }
        let stats = regulation_stats(torus, &part);
        assert_eq!(stats.vertices, 4);
        assert_eq!(stats.histogram.get(&4), Some(&4));
        assert_eq!(stats.max_corner_nu, 4);
    }

    #[test]
    fn crossing_matrix_on_the_two_pair_pattern() {
        // Rows of the classified multiplicity-6 vertex with axis=2, sigma=+:
        // axis 1 must fail to cross axis 2 and nothing else may fail.
        let rows: Vec<Vec<i8>> = vec![
            vec![1, 0, 1],
            vec![-1, 0, 1],
            vec![1, 1, -1],
            vec![1, -1, -1],
            vec![-1, 1, -1],
            vec![-1, -1, -1],
        ];
        let m = crossing_matrix(&rows);
        assert!(!m[1][2]);
        assert!(m[0][1] && m[0][2] && m[1][0] && m[2][0] && m[2][1]);
        assert_eq!(failing_pairs(&rows), vec![(1, 2)]);
    }

    #[test]
    fn classify_recovers_the_pattern_tags() {
        let rows: Vec<Vec<i8>> = vec![
            vec![1, 0, 1],
            vec![-1, 0, 1],
            vec![1, 1, -1],
            vec![1, -1, -1],
            vec![-1, 1, -1],
            vec![-1, -1, -1],
        ];
        let ids = [10u32, 11, 12, 13, 14, 15];
        let t = classify_troublesome(&[7, 7, 7], &ids, &rows).unwrap();
        assert_eq!(t.axis, 2);
        assert_eq!(t.sigma, 1);
        // third axis is axis 0: pair_pos extends + there
        assert_eq!(t.pair_pos, 10);
        assert_eq!(t.pair_neg, 11);
        assert_eq!(t.singles.len(), 4);

        // A multiplicity-6 vertex straddling axis 0 violates the pattern.
        let bad: Vec<Vec<i8>> = vec![
            vec![0, 1, 1],
            vec![0, -1, 1],
            vec![1, 1, -1],
            vec![1, -1, -1],
            vec![-1, 1, -1],
            vec![-1, -1, -1],
        ];
        assert!(classify_troublesome(&[7, 7, 7], &ids, &bad).is_err());
    }

    #[test]
    fn slab_partition_is_degenerate_on_thin_axes() {
        let torus = Torus { n: 2, m: 8 };
        let mut part = TorusPartition::new(2, 8);
        for k in 0..4 {
            part.push_piece(&[1 + 2 * k, 1], &[3 + 2 * k, 9], k as u32);
        }
        assert!(!check_nondegenerate(torus, &part));
        let (torus2, bricks) = brick_partition();
        assert!(check_nondegenerate(torus2, &bricks));
    }
}
