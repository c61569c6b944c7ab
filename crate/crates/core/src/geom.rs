//! Exact axis-aligned boxes on the half-unit grid.
//!
//! Every coordinate in this crate is an integer number of *half-units*: a
//! stored value of `2k` is the real coordinate `k`, and odd values are the
//! half-integer levels between lattice points.  Working at this resolution
//! keeps lattice points, box corners, and the half-integer face levels of
//! lattice boxes all exactly representable, so no floating point appears
//! anywhere.

use serde::{Deserialize, Serialize};

/// A point of the ambient space, in half-units.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The origin of `n`-space.
    pub fn origin(n: usize) -> Self {
        Point(vec![0; n])
    }

    /// Coordinate-wise sum.
    pub fn add(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Drop coordinate `axis`, projecting to the remaining axes.
    pub fn drop_axis(&self, axis: usize) -> Point {
        let mut v = self.0.clone();
        v.remove(axis);
        Point(v)
    }
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p{:?}", self.0)
    }
}

/// A closed axis-aligned box `∏ [lo_i, hi_i]`, possibly degenerate
/// (`lo_i == hi_i`) in any subset of axes.  Coordinates are half-units.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl std::fmt::Debug for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.lo.len() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "{}..{}", self.lo[i], self.hi[i])?;
        }
        write!(f, "]")
    }
}

impl Rect {
    /// Build a box from per-axis `[lo, hi]` pairs, checking `lo <= hi`.
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "mismatched bound lengths");
        for i in 0..lo.len() {
            assert!(lo[i] <= hi[i], "inverted interval on axis {i}: [{}, {}]", lo[i], hi[i]);
        }
        Rect { lo, hi }
    }

    /// Convenience constructor from `(lo, hi)` pairs.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        Rect::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    pub fn dim_ambient(&self) -> usize {
        self.lo.len()
    }

    /// Number of axes with a non-degenerate extent.
    pub fn dim(&self) -> usize {
        (0..self.dim_ambient()).filter(|&i| self.lo[i] < self.hi[i]).count()
    }

    /// True when no axis is degenerate.
    pub fn is_full_dim(&self) -> bool {
        self.dim() == self.dim_ambient()
    }

    pub fn side(&self, axis: usize) -> i64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        p.0.iter()
            .enumerate()
            .all(|(i, &x)| self.lo[i] <= x && x <= self.hi[i])
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        (0..self.dim_ambient()).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Intersection as a closed box, or `None` when empty.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let mut lo = Vec::with_capacity(self.dim_ambient());
        let mut hi = Vec::with_capacity(self.dim_ambient());
        for i in 0..self.dim_ambient() {
            let a = self.lo[i].max(other.lo[i]);
            let b = self.hi[i].min(other.hi[i]);
            if a > b {
                return None;
            }
            lo.push(a);
            hi.push(b);
        }
        Some(Rect { lo, hi })
    }

    /// True when the interiors intersect, i.e. the intersection is
    /// full-dimensional.
    pub fn interior_intersects(&self, other: &Rect) -> bool {
        (0..self.dim_ambient())
            .all(|i| self.lo[i].max(other.lo[i]) < self.hi[i].min(other.hi[i]))
    }

    /// True when `p` lies in the open interior.
    pub fn interior_contains_point(&self, p: &Point) -> bool {
        p.0.iter()
            .enumerate()
            .all(|(i, &x)| self.lo[i] < x && x < self.hi[i])
    }

    /// The face `{x : x_axis = level}` of this box, as a degenerate box.
    /// `level` must be `lo[axis]` or `hi[axis]`.
    pub fn face(&self, axis: usize, level: i64) -> Rect {
        assert!(level == self.lo[axis] || level == self.hi[axis]);
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo[axis] = level;
        hi[axis] = level;
        Rect { lo, hi }
    }

    /// Drop `axis` entirely, projecting to the remaining coordinates.
    pub fn drop_axis(&self, axis: usize) -> Rect {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.remove(axis);
        hi.remove(axis);
        Rect { lo, hi }
    }

    /// Insert a new axis at position `axis` with extent `[a, b]`.
    pub fn insert_axis(&self, axis: usize, a: i64, b: i64) -> Rect {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.insert(axis, a);
        hi.insert(axis, b);
        Rect::new(lo, hi)
    }

    /// Translate by `v`.
    pub fn translate(&self, v: &[i64]) -> Rect {
        Rect {
            lo: self.lo.iter().zip(v).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(v).map(|(a, b)| a + b).collect(),
        }
    }

    /// Scale all coordinates by `k > 0`.
    pub fn scale(&self, k: i64) -> Rect {
        assert!(k > 0);
        Rect {
            lo: self.lo.iter().map(|a| a * k).collect(),
            hi: self.hi.iter().map(|a| a * k).collect(),
        }
    }

    /// All corner points (2^d for a d-dimensional box; degenerate axes
    /// contribute a single value).
    pub fn corners(&self) -> Vec<Point> {
        let n = self.dim_ambient();
        let mut out = vec![Point(Vec::with_capacity(n))];
        for i in 0..n {
            let mut next = Vec::new();
            for p in &out {
                let mut a = p.0.clone();
                a.push(self.lo[i]);
                next.push(Point(a));
                if self.hi[i] != self.lo[i] {
                    let mut b = p.0.clone();
                    b.push(self.hi[i]);
                    next.push(Point(b));
                }
            }
            out = next;
        }
        out
    }

    /// Volume in half-unit cells (zero when degenerate).
    pub fn volume(&self) -> i64 {
        (0..self.dim_ambient()).map(|i| self.side(i)).product()
    }
}

/// Boundary incidence of a box at a point it contains: per axis,
/// `+1` when the point sits on the lower face of a non-degenerate extent,
/// `-1` on the upper face, `0` in the interior of the extent or when the
/// extent is degenerate.
///
/// The sign convention records the direction the box extends away from the
/// point: `+1` means the box lies on the positive side.
pub fn boundary_incidence(rect: &Rect, x: &Point) -> Option<Vec<i8>> {
    if !rect.contains_point(x) {
        return None;
    }
    let mut v = Vec::with_capacity(rect.dim_ambient());
    for i in 0..rect.dim_ambient() {
        let e = if rect.lo[i] == rect.hi[i] {
            0 // degenerate extent carries no direction
        } else if x.0[i] == rect.lo[i] {
            1
        } else if x.0[i] == rect.hi[i] {
            -1
        } else {
            0
        };
        v.push(e);
    }
    Some(v)
}

/// The closed half-unit cube of side one real unit centered at a lattice
/// point: lattice points have even half-unit coordinates, so the corners
/// land on odd half-units.
pub fn lattice_cell(z: &Point) -> Rect {
    for &c in &z.0 {
        assert!(c % 2 == 0, "lattice points have even half-unit coordinates");
    }
    Rect {
        lo: z.0.iter().map(|c| c - 1).collect(),
        hi: z.0.iter().map(|c| c + 1).collect(),
    }
}

/// Convert a lattice box (given by its lattice corner points, inclusive)
/// to the real box made of the unit cells around its lattice points.  A
/// lattice box `[a, b]` maps to the real box `[a - 1/2, b + 1/2]`, whose
/// half-unit corners are odd.
pub fn z_to_r(lattice_lo: &Point, lattice_hi: &Point) -> Rect {
    let cell_lo = lattice_cell(lattice_lo);
    let cell_hi = lattice_cell(lattice_hi);
    Rect::new(cell_lo.lo, cell_hi.hi)
}

/// Inverse of [`z_to_r`]: recover the lattice corners of a box whose faces
/// all lie on odd half-units.  Returns `None` when some face is not on the
/// half-integer grid or the box contains no lattice point in some axis.
pub fn r_to_z(rect: &Rect) -> Option<(Point, Point)> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for i in 0..rect.dim_ambient() {
        if rect.lo[i] % 2 == 0 || rect.hi[i] % 2 == 0 {
            return None;
        }
        let a = rect.lo[i] + 1;
        let b = rect.hi[i] - 1;
        if a > b {
            return None;
        }
        lo.push(a);
        hi.push(b);
    }
    Some((Point(lo), Point(hi)))
}

/// Lattice points of a box: every point of `ℤ^n` (even half-units) inside.
pub fn lattice_points(rect: &Rect) -> Vec<Point> {
    let n = rect.dim_ambient();
    let mut out = vec![Vec::new()];
    for i in 0..n {
        let first = if rect.lo[i] % 2 == 0 { rect.lo[i] } else { rect.lo[i] + 1 };
        let mut next = Vec::new();
        let mut c = first;
        while c <= rect.hi[i] {
            for p in &out {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
            c += 2;
        }
        out = next;
    }
    out.into_iter().map(Point).collect()
}

/// Directional lattice boundary `∂_v A = {x ∈ A : x + v ∉ A}` of a set of
/// lattice points, for a lattice direction `v` (coordinates in lattice
/// steps, i.e. `v = e_j` is one real unit = two half-units).
pub fn directional_boundary(points: &[Point], v: &[i64]) -> Vec<Point> {
    let set: std::collections::HashSet<&Point> = points.iter().collect();
    points
        .iter()
        .filter(|p| {
            let shifted = Point(
                p.0.iter()
                    .zip(v)
                    .map(|(a, b)| a + 2 * b)
                    .collect(),
            );
            !set.contains(&shifted)
        })
        .cloned()
        .collect()
}

/// Relative lattice boundary `∂_{u∖v} A = ∂_u A ∖ ∂_v A`.
pub fn relative_boundary(points: &[Point], u: &[i64], v: &[i64]) -> Vec<Point> {
    let bv: std::collections::HashSet<Point> =
        directional_boundary(points, v).into_iter().collect();
    directional_boundary(points, u)
        .into_iter()
        .filter(|p| !bv.contains(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    #[test]
    fn incidence_on_mixed_faces() {
        // Real box [0,3]x[0,2]x[0,1] at the real point (0,1,0): lower face in
        // axes 1 and 3, interior in axis 2.
        let r = Rect::from_pairs(&[(0, 6), (0, 4), (0, 2)]);
        let x = pt(&[0, 2, 0]);
        assert_eq!(boundary_incidence(&r, &x), Some(vec![1, 0, 1]));
    }

    #[test]
    fn incidence_ignores_degenerate_axes() {
        let r = Rect::from_pairs(&[(0, 4), (3, 3)]);
        let x = pt(&[0, 3]);
        assert_eq!(boundary_incidence(&r, &x), Some(vec![1, 0]));
    }

    #[test]
    fn incidence_outside_is_none() {
        let r = Rect::from_pairs(&[(0, 2)]);
        assert_eq!(boundary_incidence(&r, &pt(&[3])), None);
    }

    #[test]
    fn singleton_lattice_box_becomes_unit_cell() {
        // {(0,0)} -> [-1/2,1/2]^2, i.e. [-1,1]^2 in half-units.
        let r = z_to_r(&pt(&[0, 0]), &pt(&[0, 0]));
        assert_eq!(r, Rect::from_pairs(&[(-1, 1), (-1, 1)]));
    }

    #[test]
    fn lattice_segment_round_trips() {
        // Lattice box [0,2]x[0,0] (real units 0..1 by 0) -> real box
        // [-1/2, 5/2] x [-1/2, 1/2]; note the corner parity is odd.
        let lo = pt(&[0, 0]);
        let hi = pt(&[4, 0]);
        let r = z_to_r(&lo, &hi);
        assert_eq!(r, Rect::from_pairs(&[(-1, 5), (-1, 1)]));
        assert_eq!(r_to_z(&r), Some((lo, hi)));
    }

    #[test]
    fn r_to_z_rejects_even_faces() {
        assert_eq!(r_to_z(&Rect::from_pairs(&[(0, 5)])), None);
    }

    #[test]
    fn containment_respects_degenerate_membership() {
        // x ∈ P iff the cell around x is inside the real box: equivalent to
        // plain closed containment after the z_to_r change of scale.
        let p = z_to_r(&pt(&[0, 0]), &pt(&[4, 2]));
        assert!(p.contains_rect(&lattice_cell(&pt(&[0, 0]))));
        assert!(p.contains_rect(&lattice_cell(&pt(&[4, 2]))));
        assert!(!p.contains_rect(&lattice_cell(&pt(&[6, 2]))));
    }

    #[test]
    fn directional_boundary_of_a_square() {
        // ∂_{+e1}([0,2]^2 ∩ ℤ^2) = {(2,0),(2,1),(2,2)} in real coordinates.
        let pts = lattice_points(&Rect::from_pairs(&[(0, 4), (0, 4)]));
        let mut b = directional_boundary(&pts, &[1, 0]);
        b.sort();
        assert_eq!(b, vec![pt(&[4, 0]), pt(&[4, 2]), pt(&[4, 4])]);
    }

    #[test]
    fn relative_boundary_removes_the_shared_corner_row() {
        // ∂_{+e1 ∖ +e2}([0,2]^2) = {(2,0),(2,1)}: the corner (2,2) is also on
        // the +e2 boundary and is removed.
        let pts = lattice_points(&Rect::from_pairs(&[(0, 4), (0, 4)]));
        let mut b = relative_boundary(&pts, &[1, 0], &[0, 1]);
        b.sort();
        assert_eq!(b, vec![pt(&[4, 0]), pt(&[4, 2])]);
    }

    #[test]
    fn corners_of_degenerate_box() {
        let r = Rect::from_pairs(&[(0, 2), (1, 1)]);
        let mut c = r.corners();
        c.sort();
        assert_eq!(c, vec![pt(&[0, 1]), pt(&[2, 1])]);
    }
}
