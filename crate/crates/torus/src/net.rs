use crate::config::{Torus, TorusError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Spatial hash over torus points; bucket side is at least the query radius
/// it is built for, so a ball query touches at most three buckets per axis.
pub struct PointGrid {
    torus: Torus,
    nb: i64,
    buckets: Vec<Vec<u32>>,
    pub points: Vec<Vec<i64>>,
}

impl PointGrid {
    pub fn new(torus: Torus, radius: i64) -> Self {
        let nb = (torus.m / radius.max(1)).clamp(1, 64);
        let count = (nb as usize).pow(torus.n as u32);
        PointGrid {
            torus,
            nb,
            buckets: vec![Vec::new(); count],
            points: Vec::new(),
        }
    }

    #[inline]
    fn bucket_of_coord(&self, x: i64) -> i64 {
        self.torus.norm(x) * self.nb / self.torus.m
    }

    fn bucket_index(&self, p: &[i64]) -> usize {
        let mut idx = 0usize;
        for &c in p {
            idx = idx * self.nb as usize + self.bucket_of_coord(c) as usize;
        }
        idx
    }

    pub fn insert(&mut self, p: Vec<i64>) -> u32 {
        let id = self.points.len() as u32;
        let idx = self.bucket_index(&p);
        self.buckets[idx].push(id);
        self.points.push(p);
        id
    }

    /// Visits every stored point at sup-distance at most `radius` from `p`.
    pub fn for_each_within<F: FnMut(u32, &[i64])>(&self, p: &[i64], radius: i64, mut f: F) {
        let mut ranges = Vec::with_capacity(self.torus.n);
        for &c in p {
            // Count buckets on the unwrapped line so an arc that wraps all
            // the way around (or back into its starting bucket) still visits
            // everything; distinct wrapped buckets are capped at `nb`.
            let c = self.torus.norm(c);
            let t = |x: i64| (x * self.nb).div_euclid(self.torus.m);
            let lo = t(c - radius);
            let span = (t(c + radius) - lo + 1).min(self.nb);
            ranges.push((lo.rem_euclid(self.nb), span));
        }
        let mut cursor = vec![0i64; self.torus.n];
        loop {
            let mut idx = 0usize;
            for a in 0..self.torus.n {
                let b = (ranges[a].0 + cursor[a]).rem_euclid(self.nb);
                idx = idx * self.nb as usize + b as usize;
            }
            for &id in &self.buckets[idx] {
                let q = &self.points[id as usize];
                if self.torus.dist(p, q) <= radius {
                    f(id, q);
                }
            }
            let mut a = self.torus.n;
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

    pub fn min_dist(&self, p: &[i64], radius: i64) -> Option<i64> {
        let mut best: Option<i64> = None;
        self.for_each_within(p, radius, |_, q| {
            let d = self.torus.dist(p, q);
            if best.map_or(true, |b| d < b) {
                best = Some(d);
            }
        });
        best
    }
}

/// A set of lattice markers with a guaranteed pairwise separation; a maximal
/// such set is automatically a covering net of the same radius.
#[derive(Debug, Clone)]
pub struct MarkerSet {
    pub points: Vec<Vec<i64>>,
    pub separation: i64,
}

/// Greedy maximal `> r`-separated subset of the even lattice on the torus.
///
/// A seeded random saturation phase fixes the look of the net; a
/// deterministic recursive completion pass then guarantees maximality, which
/// implies the net covers the torus at radius `r`.
pub fn greedy_net(torus: Torus, r: i64, seed: u64) -> Result<MarkerSet, TorusError> {
    if r <= 0 || r >= torus.m / 4 {
        return Err(TorusError::Net(format!(
            "net radius must satisfy 0 < r < m/4, got r = {r}, m = {}",
            torus.m
        )));
    }
    let mut grid = PointGrid::new(torus, r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_axis = (torus.m / 2) as u64;
    let expected = {
        let mut e = 1f64;
        for _ in 0..torus.n {
            e *= torus.m as f64 / r as f64;
        }
        e
    };
    let attempts = ((expected * 10.0) as u64).clamp(1000, 20_000_000);
    for _ in 0..attempts {
        let p: Vec<i64> = (0..torus.n)
            .map(|_| 2 * rng.gen_range(0..per_axis) as i64)
            .collect();
        if grid.min_dist(&p, r).is_none() {
            grid.insert(p);
        }
    }
    complete_net(&mut grid, r, true)?;
    Ok(MarkerSet {
        points: grid.points,
        separation: r,
    })
}

/// Recursive sweep over the whole torus. With `add` set, every lattice point
/// left uncovered is adopted as a new marker (restoring maximality); without
/// it, an uncovered point is reported as a verification failure.
fn complete_net(grid: &mut PointGrid, r: i64, add: bool) -> Result<(), TorusError> {
    let torus = grid.torus;
    let root_cand: Vec<u32> = (0..grid.points.len() as u32).collect();
    let lo = vec![0i64; torus.n];
    let hi = vec![torus.m - 2; torus.n];
    let mut stack = vec![(lo, hi, root_cand)];
    while let Some((lo, hi, cand)) = stack.pop() {
        // A candidate whose ball contains the whole cell settles it.
        let mut covered = false;
        for &id in &cand {
            let q = &grid.points[id as usize];
            let mut inside = true;
            for a in 0..torus.n {
                // The cell [lo, hi] never wraps and is shorter than m/2.
                let dlo = torus.wrap_diff(lo[a] - q[a]).abs();
                let dhi = torus.wrap_diff(hi[a] - q[a]).abs();
                let width = hi[a] - lo[a];
                if dlo > r || dhi > r || (dlo + dhi < width) {
                    inside = false;
                    break;
                }
            }
            if inside {
                covered = true;
                break;
            }
        }
        if covered {
            continue;
        }
        if lo == hi {
            // Candidate lists can be stale while markers are being added, so
            // consult the live grid before trusting "uncovered".
            if grid.min_dist(&lo, r).is_some() {
                continue;
            }
            if add {
                grid.insert(lo);
            } else {
                return Err(TorusError::Verification(format!(
                    "point {lo:?} is farther than {r} from every marker"
                )));
            }
            continue;
        }
        let axis = (0..torus.n).max_by_key(|&a| hi[a] - lo[a]).unwrap();
        let mid = lo[axis] + (hi[axis] - lo[axis]) / 2;
        let mid = mid - mid % 2;
        for (a, b) in [(lo[axis], mid), (mid + 2, hi[axis])] {
            if a > b {
                continue;
            }
            let mut clo = lo.clone();
            let mut chi = hi.clone();
            clo[axis] = a;
            chi[axis] = b;
            let sub: Vec<u32> = cand
                .iter()
                .copied()
                .filter(|&id| {
                    let q = &grid.points[id as usize];
                    (0..torus.n).all(|ax| {
                        let dlo = torus.wrap_diff(clo[ax] - q[ax]);
                        let dhi = torus.wrap_diff(chi[ax] - q[ax]);
                        // Ball [q-r, q+r] must meet [clo, chi] on this axis.
                        dlo.abs() <= r || dhi.abs() <= r || (dlo < 0 && dhi > 0)
                    })
                })
                .collect();
            stack.push((clo, chi, sub));
        }
    }
    Ok(())
}

/// Greedy maximal `> sep`-separated subset of an existing net, visiting the
/// parent markers in a seeded pseudorandom order.
pub fn refine_net(
    torus: Torus,
    parent: &MarkerSet,
    sep: i64,
    seed: u64,
) -> Result<MarkerSet, TorusError> {
    if sep <= parent.separation {
        return Err(TorusError::Net(format!(
            "refinement separation {sep} must exceed the parent separation {}",
            parent.separation
        )));
    }
    let mut order: Vec<usize> = (0..parent.points.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut grid = PointGrid::new(torus, sep);
    for idx in order {
        let p = &parent.points[idx];
        if grid.min_dist(p, sep).is_none() {
            grid.insert(p.clone());
        }
    }
    Ok(MarkerSet {
        points: grid.points,
        separation: sep,
    })
}

impl MarkerSet {
    /// Re-checks the separation of every pair and, via a full recursive
    /// sweep, that no torus lattice point lies farther than `cover_radius`
    /// from the set.
    pub fn verify(&self, torus: Torus, cover_radius: i64) -> Result<(), TorusError> {
        let mut grid = PointGrid::new(torus, self.separation.max(cover_radius));
        for p in &self.points {
            for &c in p {
                if c % 2 != 0 || c < 0 || c >= torus.m {
                    return Err(TorusError::Verification(format!(
                        "marker {p:?} is not a normalized lattice point"
                    )));
                }
            }
            grid.insert(p.clone());
        }
        for p in &self.points {
            let mut violation = None;
            grid.for_each_within(p, self.separation, |_, q| {
                if q != p.as_slice() {
                    violation = Some(q.to_vec());
                }
            });
            if let Some(q) = violation {
                return Err(TorusError::Verification(format!(
                    "markers {p:?} and {q:?} are within separation {}",
                    self.separation
                )));
            }
        }
        complete_net(&mut grid, cover_radius, false)
    }

    /// Distance from `p` to the nearest marker, searching out to `radius`.
    pub fn nearest_within(&self, torus: Torus, p: &[i64], radius: i64) -> Option<i64> {
        self.points
            .iter()
            .map(|q| torus.dist(p, q))
            .filter(|&d| d <= radius)
            .min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_net_is_separated_and_covering() {
        let torus = Torus { n: 2, m: 48 };
        let net = greedy_net(torus, 5, 11).unwrap();
        net.verify(torus, 5).unwrap();
        assert!(net.points.len() >= (48 / 11) * (48 / 11));
    }

    #[test]
    fn same_seed_reproduces_the_net_and_different_seeds_differ() {
        let torus = Torus { n: 2, m: 64 };
        let a = greedy_net(torus, 5, 3).unwrap();
        let b = greedy_net(torus, 5, 3).unwrap();
        let c = greedy_net(torus, 5, 4).unwrap();
        assert_eq!(a.points, b.points);
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn oversized_radius_is_rejected() {
        let torus = Torus { n: 2, m: 40 };
        assert!(greedy_net(torus, 10, 0).is_err());
    }

    #[test]
    fn refinement_is_a_sparse_subset_with_witnessed_maximality() {
        let torus = Torus { n: 2, m: 96 };
        let s1 = greedy_net(torus, 5, 2).unwrap();
        let s2 = refine_net(torus, &s1, 17, 2).unwrap();
        for p in &s2.points {
            assert!(s1.points.contains(p));
        }
        for (i, p) in s2.points.iter().enumerate() {
            for q in &s2.points[i + 1..] {
                assert!(torus.dist(p, q) > 17);
            }
        }
        // Maximality: every parent marker sits within the refinement radius
        // of the subset, which yields the covering bound for the torus.
        for p in &s1.points {
            assert!(s2.nearest_within(torus, p, 17).is_some());
        }
    }

    #[test]
    fn three_dimensional_net_verifies() {
        let torus = Torus { n: 3, m: 32 };
        let net = greedy_net(torus, 5, 9).unwrap();
        net.verify(torus, 5).unwrap();
    }
}
