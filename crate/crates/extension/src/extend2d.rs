//! Planar extension: every two-dimensional instance admits a minimal
//! completion, built by extending the vertical sides of the required
//! pieces until they hit a horizontal side.

use boxpart_core::{LocalPartition, Rect};

use crate::instance::ExtensionInstance;
use crate::ExtensionError;

/// Completes a two-dimensional instance to a minimal partition of its
/// window. Every vertical side of a required piece is stretched up and
/// down until it reaches a horizontal side of the window or of another
/// required piece; the complementary components of the resulting wall
/// arrangement are the new pieces. No horizontal line is ever introduced,
/// which is what keeps every interior junction a T.
pub fn extend_2d(instance: &ExtensionInstance) -> Result<LocalPartition, ExtensionError> {
    if instance.dim() != 2 {
        return Err(ExtensionError::Dimension(
            "the planar extension applies to two-dimensional instances".into(),
        ));
    }
    instance.validate()?;
    let window = &instance.window;
    let required = &instance.required;

    // Maximal extension of each vertical side: a wall segment at fixed x.
    // A side only stops where a required piece strictly straddles its line
    // (collinear sides merge into one wall instead).
    let mut walls: Vec<(i64, i64, i64)> = Vec::new(); // (x, y_lo, y_hi)
    for p in required {
        for x in [p.lo[0], p.hi[0]] {
            if x == window.lo[0] || x == window.hi[0] {
                continue;
            }
            let mut y_lo = window.lo[1];
            let mut y_hi = window.hi[1];
            for q in required {
                if q.lo[0] < x && x < q.hi[0] {
                    if q.hi[1] <= p.lo[1] {
                        y_lo = y_lo.max(q.hi[1]);
                    }
                    if q.lo[1] >= p.hi[1] {
                        y_hi = y_hi.min(q.lo[1]);
                    }
                }
            }
            walls.push((x, y_lo, y_hi));
        }
    }

    // Grid of the arrangement: x-levels of walls, y-levels of horizontal
    // sides, plus the window shell.
    let mut xs: Vec<i64> = vec![window.lo[0], window.hi[0]];
    xs.extend(walls.iter().map(|w| w.0));
    let mut ys: Vec<i64> = vec![window.lo[1], window.hi[1]];
    ys.extend(required.iter().flat_map(|p| [p.lo[1], p.hi[1]]));
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;

    // Cell ownership: required pieces first, then flood-filled components
    // of the complement. Two horizontally adjacent cells are separated
    // exactly by a wall; vertically adjacent complement cells never are,
    // because the construction adds no horizontal line.
    const FREE: usize = usize::MAX;
    let mut owner = vec![FREE; nx * ny];
    let idx = |i: usize, j: usize| j * nx + i;
    for (k, p) in required.iter().enumerate() {
        for i in 0..nx {
            for j in 0..ny {
                let cell = Rect::from_pairs(&[(xs[i], xs[i + 1]), (ys[j], ys[j + 1])]);
                if p.contains_rect(&cell) {
                    owner[idx(i, j)] = k;
                }
            }
        }
    }
    let wall_between = |i: usize, j: usize| -> bool {
        // Between cells (i-1, j) and (i, j): the open edge x = xs[i],
        // y in (ys[j], ys[j+1]).
        walls
            .iter()
            .any(|&(x, lo, hi)| x == xs[i] && lo <= ys[j] && ys[j + 1] <= hi)
    };
    let mut pieces: Vec<Rect> = required.clone();
    for start in 0..nx * ny {
        if owner[start] != FREE {
            continue;
        }
        let id = pieces.len();
        let mut stack = vec![start];
        owner[start] = id;
        let mut cells = Vec::new();
        while let Some(c) = stack.pop() {
            let (i, j) = (c % nx, c / nx);
            cells.push((i, j));
            let mut neighbors: [(usize, bool); 4] = [(usize::MAX, true); 4];
            if i > 0 {
                neighbors[0] = (idx(i - 1, j), wall_between(i, j));
            }
            if i + 1 < nx {
                neighbors[1] = (idx(i + 1, j), wall_between(i + 1, j));
            }
            if j > 0 {
                neighbors[2] = (idx(i, j - 1), false);
            }
            if j + 1 < ny {
                neighbors[3] = (idx(i, j + 1), false);
            }
            for (t, wall) in neighbors {
                if t != usize::MAX && !wall && owner[t] == FREE {
                    owner[t] = id;
                    stack.push(t);
                }
            }
        }
        let lo_i = cells.iter().map(|c| c.0).min().unwrap();
        let hi_i = cells.iter().map(|c| c.0).max().unwrap();
        let lo_j = cells.iter().map(|c| c.1).min().unwrap();
        let hi_j = cells.iter().map(|c| c.1).max().unwrap();
        if cells.len() != (hi_i - lo_i + 1) * (hi_j - lo_j + 1) {
            return Err(ExtensionError::Falsified(
                "a complementary component is not a box".into(),
            ));
        }
        pieces.push(Rect::from_pairs(&[
            (xs[lo_i], xs[hi_i + 1]),
            (ys[lo_j], ys[hi_j + 1]),
        ]));
    }

    LocalPartition::new(window.clone(), pieces)
        .map_err(|e| ExtensionError::Falsified(format!("extension is not a partition: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxpart_core::Rect;

    fn instance(window: &[(i64, i64); 2], required: &[[(i64, i64); 2]]) -> ExtensionInstance {
        ExtensionInstance::new(
            Rect::from_pairs(window),
            required.iter().map(|p| Rect::from_pairs(p)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_center_piece_makes_five() {
        let inst = instance(&[(0, 8), (0, 8)], &[[(2, 4), (2, 4)]]);
        let part = extend_2d(&inst).unwrap();
        let mut got = part.pieces().to_vec();
        got.sort();
        let mut want = vec![
            Rect::from_pairs(&[(0, 2), (0, 8)]),
            Rect::from_pairs(&[(2, 4), (0, 2)]),
            Rect::from_pairs(&[(2, 4), (2, 4)]),
            Rect::from_pairs(&[(2, 4), (4, 8)]),
            Rect::from_pairs(&[(4, 8), (0, 8)]),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(part.is_minimal_local());
    }

    #[test]
    fn empty_instance_returns_the_window() {
        let inst = instance(&[(0, 6), (0, 4)], &[]);
        let part = extend_2d(&inst).unwrap();
        assert_eq!(part.pieces(), &[Rect::from_pairs(&[(0, 6), (0, 4)])]);
        assert!(part.is_minimal_local());
    }

    #[test]
    fn side_stopped_by_a_straddling_piece() {
        // The lower piece's right side at x=4 is blocked above by the
        // wide upper piece straddling that line; the wall stops at the
        // blocker's bottom side, a non-endpoint junction.
        let inst = instance(&[(0, 10), (0, 10)], &[[(0, 4), (0, 2)], [(2, 8), (6, 8)]]);
        let part = extend_2d(&inst).unwrap();
        assert!(part.is_minimal_local());
        assert!(part
            .pieces()
            .contains(&Rect::from_pairs(&[(2, 8), (8, 10)])));
        // The lower piece's right wall stops at the blocker's bottom side
        // (a non-endpoint junction), while the blocker's own left wall
        // runs all the way down past the lower piece's top.
        assert!(part.pieces().contains(&Rect::from_pairs(&[(2, 4), (2, 6)])));
        assert!(part.pieces().contains(&Rect::from_pairs(&[(4, 8), (0, 6)])));
        assert!(part.pieces().contains(&Rect::from_pairs(&[(0, 2), (2, 10)])));
    }

    #[test]
    fn collinear_sides_merge_at_an_endpoint_junction() {
        // Two required pieces share the line x=4 corner to corner; the
        // walls merge instead of blocking each other.
        let inst = instance(&[(0, 8), (0, 8)], &[[(0, 4), (0, 2)], [(4, 8), (4, 6)]]);
        let part = extend_2d(&inst).unwrap();
        assert!(part.is_minimal_local());
        assert!(part.pieces().contains(&Rect::from_pairs(&[(0, 4), (2, 8)])));
        assert!(part.pieces().contains(&Rect::from_pairs(&[(4, 8), (0, 4)])));
        assert!(part.pieces().contains(&Rect::from_pairs(&[(4, 8), (6, 8)])));
    }

    #[test]
    fn required_pieces_survive_verbatim() {
        let inst = instance(
            &[(0, 12), (0, 10)],
            &[[(1, 3), (1, 5)], [(5, 9), (2, 4)], [(4, 7), (7, 9)]],
        );
        let part = extend_2d(&inst).unwrap();
        for r in &inst.required {
            assert!(part.pieces().contains(r));
        }
        assert!(part.is_minimal_local());
    }
}
