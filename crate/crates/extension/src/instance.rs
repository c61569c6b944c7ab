//! Extension-problem instances: a window with required interior pieces.

use boxpart_core::Rect;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ExtensionError;

/// A window rectangle together with pairwise interior-disjoint,
/// full-dimensional required pieces that any solution partition must
/// contain verbatim. Coordinates are half-units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionInstance {
    pub window: Rect,
    pub required: Vec<Rect>,
}

impl ExtensionInstance {
    pub fn new(window: Rect, required: Vec<Rect>) -> Result<Self, ExtensionError> {
        let inst = ExtensionInstance { window, required };
        inst.validate()?;
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.window.dim_ambient()
    }

    pub fn validate(&self) -> Result<(), ExtensionError> {
        if !self.window.is_full_dim() {
            return Err(ExtensionError::InvalidInstance(
                "window must be full-dimensional".into(),
            ));
        }
        for (i, p) in self.required.iter().enumerate() {
            if p.dim_ambient() != self.dim() {
                return Err(ExtensionError::InvalidInstance(format!(
                    "required piece {i} has mismatched dimension"
                )));
            }
            if !p.is_full_dim() {
                return Err(ExtensionError::InvalidInstance(format!(
                    "required piece {i} is degenerate"
                )));
            }
            if !self.window.contains_rect(p) {
                return Err(ExtensionError::InvalidInstance(format!(
                    "required piece {i} leaves the window"
                )));
            }
            for (j, q) in self.required.iter().enumerate().take(i) {
                if p.interior_intersects(q) {
                    return Err(ExtensionError::InvalidInstance(format!(
                        "required pieces {j} and {i} overlap"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Are all coordinates (window and pieces) multiples of `g`?
    pub fn on_grid(&self, g: i64) -> bool {
        let on = |r: &Rect| {
            r.lo.iter().chain(r.hi.iter()).all(|&c| c.rem_euclid(g) == 0)
        };
        g > 0 && on(&self.window) && self.required.iter().all(on)
    }

    /// Axis permutations combined with per-axis reflections that map the
    /// window onto itself and the required set onto itself. Each symmetry
    /// is returned as `(perm, flip)`: output axis `a` reads input axis
    /// `perm[a]`, reflected when `flip[a]`.
    pub fn automorphisms(&self) -> Vec<(Vec<usize>, Vec<bool>)> {
        let n = self.dim();
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permutations(n, &mut vec![false; n], &mut Vec::new(), &mut perms);
        let mut out = Vec::new();
        for perm in &perms {
            // The window must map onto itself: matching side lengths.
            if (0..n).any(|a| self.window.side(perm[a]) != self.window.side(a)) {
                continue;
            }
            for flips in 0u32..(1 << n) {
                let flip: Vec<bool> = (0..n).map(|a| flips >> a & 1 == 1).collect();
                let mapped: Vec<Rect> = self
                    .required
                    .iter()
                    .map(|r| apply_symmetry(&self.window, r, perm, &flip))
                    .collect();
                let same = mapped.len() == self.required.len()
                    && mapped.iter().all(|m| self.required.contains(m));
                if same {
                    out.push((perm.clone(), flip.clone()));
                }
            }
        }
        out
    }
}

fn permutations(
    n: usize,
    used: &mut Vec<bool>,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if cur.len() == n {
        out.push(cur.clone());
        return;
    }
    for a in 0..n {
        if !used[a] {
            used[a] = true;
            cur.push(a);
            permutations(n, used, cur, out);
            cur.pop();
            used[a] = false;
        }
    }
}

/// Image of `r` under the symmetry `(perm, flip)` of `window`.
fn apply_symmetry(window: &Rect, r: &Rect, perm: &[usize], flip: &[bool]) -> Rect {
    let n = perm.len();
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for a in 0..n {
        let src = perm[a];
        if flip[a] {
            lo[a] = window.lo[a] + (window.hi[src] - r.hi[src]);
            hi[a] = lo[a] + r.side(src);
        } else {
            lo[a] = window.lo[a] + (r.lo[src] - window.lo[src]);
            hi[a] = lo[a] + r.side(src);
        }
    }
    Rect::new(lo, hi)
}

/// The three-piece window that admits no minimal completion, and its lifts.
/// In dimension 3 the window is the cube of real side 4 with pieces placed
/// so that the surface chain started on the first piece's roof is squeezed
/// between the second piece's column and the third piece's overhang. Higher
/// dimensions append a unit factor to the window and every piece.
pub fn obstruction_instance(n: usize) -> Result<ExtensionInstance, ExtensionError> {
    if n < 3 {
        return Err(ExtensionError::Dimension(format!(
            "the obstruction requires dimension at least 3, got {n}"
        )));
    }
    let mut window = Rect::from_pairs(&[(0, 8), (0, 8), (0, 8)]);
    let mut required = vec![
        Rect::from_pairs(&[(0, 6), (0, 4), (0, 2)]),
        Rect::from_pairs(&[(4, 8), (6, 8), (0, 6)]),
        Rect::from_pairs(&[(0, 2), (2, 8), (4, 8)]),
    ];
    for _ in 3..n {
        window = window.insert_axis(window.dim_ambient(), 0, 2);
        required = required
            .iter()
            .map(|r| r.insert_axis(r.dim_ambient(), 0, 2))
            .collect();
    }
    ExtensionInstance::new(window, required)
}

/// A random two-dimensional instance on integer half-unit coordinates:
/// up to `max_pieces` boxes drawn by rejection inside `window`.
pub fn random_instance_2d<R: Rng>(
    window: &Rect,
    max_pieces: usize,
    rng: &mut R,
) -> ExtensionInstance {
    assert_eq!(window.dim_ambient(), 2);
    let mut required: Vec<Rect> = Vec::new();
    let mut tries = 0;
    while required.len() < max_pieces && tries < 200 {
        tries += 1;
        let mut lo = vec![0i64; 2];
        let mut hi = vec![0i64; 2];
        for a in 0..2 {
            let s = rng.gen_range(window.lo[a]..window.hi[a]);
            let e = rng.gen_range(s + 1..=window.hi[a]);
            lo[a] = s;
            hi[a] = e;
        }
        let r = Rect::new(lo, hi);
        if !required.iter().any(|q| q.interior_intersects(&r)) {
            required.push(r);
        }
    }
    ExtensionInstance {
        window: window.clone(),
        required,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn obstruction_boxes_are_the_pinned_ones() {
        let inst = obstruction_instance(3).unwrap();
        assert_eq!(inst.window, Rect::from_pairs(&[(0, 8), (0, 8), (0, 8)]));
        assert_eq!(inst.required.len(), 3);
        assert_eq!(
            inst.required[0],
            Rect::from_pairs(&[(0, 6), (0, 4), (0, 2)])
        );
        assert_eq!(
            inst.required[1],
            Rect::from_pairs(&[(4, 8), (6, 8), (0, 6)])
        );
        assert_eq!(
            inst.required[2],
            Rect::from_pairs(&[(0, 2), (2, 8), (4, 8)])
        );
        assert!(inst.on_grid(2));
        assert!(obstruction_instance(2).is_err());
    }

    #[test]
    fn lift_appends_a_unit_factor() {
        let inst = obstruction_instance(4).unwrap();
        assert_eq!(inst.dim(), 4);
        assert_eq!(inst.window.lo[3], 0);
        assert_eq!(inst.window.hi[3], 2);
        for r in &inst.required {
            assert_eq!((r.lo[3], r.hi[3]), (0, 2));
        }
        inst.validate().unwrap();
    }

    #[test]
    fn overlapping_required_pieces_are_rejected() {
        let window = Rect::from_pairs(&[(0, 8), (0, 8)]);
        let bad = ExtensionInstance::new(
            window.clone(),
            vec![
                Rect::from_pairs(&[(0, 4), (0, 4)]),
                Rect::from_pairs(&[(2, 6), (2, 6)]),
            ],
        );
        assert!(bad.is_err());
        // Touching along a face is allowed.
        let ok = ExtensionInstance::new(
            window,
            vec![
                Rect::from_pairs(&[(0, 4), (0, 4)]),
                Rect::from_pairs(&[(4, 6), (2, 6)]),
            ],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn obstruction_has_cyclic_symmetry_and_squares_have_eight() {
        // The three required boxes rotate into each other: each axis plays
        // each of the three roles (floor normal, column gap, overhang) once,
        // so the automorphism group is cyclic of order three.
        let inst = obstruction_instance(3).unwrap();
        let autos = inst.automorphisms();
        assert_eq!(autos.len(), 3);
        assert!(autos
            .iter()
            .any(|(p, f)| p == &vec![0, 1, 2] && f.iter().all(|&x| !x)));
        for (perm, flips) in &autos {
            let mut got: Vec<Rect> = inst
                .required
                .iter()
                .map(|r| apply_symmetry(&inst.window, r, perm, flips))
                .collect();
            got.sort();
            let mut want = inst.required.clone();
            want.sort();
            assert_eq!(got, want);
        }

        let square = ExtensionInstance::new(
            Rect::from_pairs(&[(0, 8), (0, 8)]),
            vec![Rect::from_pairs(&[(2, 6), (2, 6)])],
        )
        .unwrap();
        assert_eq!(square.automorphisms().len(), 8);
    }

    #[test]
    fn random_instances_validate() {
        let window = Rect::from_pairs(&[(0, 12), (0, 12)]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let inst = random_instance_2d(&window, 4, &mut rng);
            inst.validate().unwrap();
        }
    }
}
