//! Box-union topology: a decomposition certificate showing that any
//! subfamily of a minimal about-partition unions up to a deformed box, and
//! an independent contractibility oracle for cross-validation.
//!
//! The certificate mirrors the inductive argument: pick the sibling pair
//! `(P, Q)` of the last split, on axis `j`.  If the subfamily contains both
//! or neither, merge the pair — the union is unchanged and the ambient
//! partition loses one split (`Reduce`).  If it contains exactly one, say
//! `P` on the positive side, then every other member spans the full `j`
//! extent, so the union is a cylinder over the other members' projection,
//! glued along a facet slab to a cylinder over the whole projection
//! (`Split`); both projections live in a minimal partition one dimension
//! down.  Chasing the recursion to single boxes certifies that the union
//! deforms to a box.
//!
//! The oracle is deliberately independent of the construction: it builds
//! the cell complex of the union and checks connectedness, Euler
//! characteristic 1, and greedy free-face collapsibility.  These are
//! necessary conditions (a contractibility certificate), not a full
//! homeomorphism test — enough to falsify a wrong decomposition on the
//! small complexes that arise here.

use thiserror::Error;

use crate::arrangement::{Arrangement, Region};
use crate::geom::Rect;
use crate::minimal::{find_ej_pair, merge_ej_pair, project_halves, MinimalError};
use crate::partition::AboutPartition;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HomeoError {
    #[error("subfamily must be a nonempty set of piece indices")]
    EmptySubfamily,
    #[error("piece index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Minimal(#[from] MinimalError),
}

/// Recursive witness that a union of boxes deforms to a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoxCertificate {
    /// The union is literally a single box.
    Atom(Rect),
    /// The last sibling pair is wholly in or wholly out of the subfamily:
    /// merging it leaves the union untouched.
    Reduce {
        pair: (Rect, Rect),
        merged: Rect,
        /// Whether the pair belongs to the subfamily (and is replaced by
        /// `merged` below) or is absent entirely.
        present: bool,
        inner: Box<BoxCertificate>,
    },
    /// Exactly one member of the pair is present.  All other members span
    /// the full extent on `axis`; the present piece covers the `sign` half
    /// from `mid`.  The union is
    /// `(base × full extent) ∪ (extended × half extent)`.
    Split {
        axis: usize,
        sign: i8,
        mid: i64,
        piece: Rect,
        base: Box<BoxCertificate>,
        extended: Box<BoxCertificate>,
    },
}

/// Decide whether the union of the subfamily `subset` (piece indices) of a
/// minimal about-partition deforms to a box, returning the decomposition
/// certificate.  For valid minimal inputs the answer is always true, so the
/// value of the call is the certificate itself; validate it with
/// [`verify_certificate`] and cross-check with [`collapses_to_a_point`].
pub fn union_box_homeomorphic(
    ap: &AboutPartition,
    subset: &[usize],
) -> Result<(bool, BoxCertificate), HomeoError> {
    if subset.is_empty() {
        return Err(HomeoError::EmptySubfamily);
    }
    let mut chosen: Vec<usize> = subset.to_vec();
    chosen.sort_unstable();
    chosen.dedup();
    for &i in &chosen {
        if i >= ap.pieces().len() {
            return Err(HomeoError::BadIndex(i));
        }
    }
    if !ap.is_minimal_about() {
        return Err(HomeoError::Minimal(MinimalError::NotMinimal));
    }
    let cert = cert_rec(ap, &chosen)?;
    let boxes: Vec<Rect> = chosen.iter().map(|&i| ap.pieces()[i].clone()).collect();
    Ok((verify_certificate(&cert, &boxes), cert))
}

fn cert_rec(ap: &AboutPartition, subset: &[usize]) -> Result<BoxCertificate, HomeoError> {
    if subset.len() == 1 {
        return Ok(BoxCertificate::Atom(ap.pieces()[subset[0]].clone()));
    }
    let (_, beta) = ap.stats();
    debug_assert!(beta >= 1, "multiple pieces force at least one split");
    let (axis, plus, minus) = find_ej_pair(ap)?;
    let has_plus = subset.contains(&plus);
    let has_minus = subset.contains(&minus);
    if has_plus == has_minus {
        let merged = merge_ej_pair(ap, axis, plus, minus)?;
        let survivors: Vec<usize> =
            (0..ap.pieces().len()).filter(|&i| i != plus && i != minus).collect();
        let merged_idx = survivors.len();
        let mut inner_subset: Vec<usize> = subset
            .iter()
            .filter(|&&i| i != plus && i != minus)
            .map(|&i| survivors.binary_search(&i).expect("survivor"))
            .collect();
        if has_plus {
            inner_subset.push(merged_idx);
        }
        let inner = cert_rec(&merged, &inner_subset)?;
        return Ok(BoxCertificate::Reduce {
            pair: (ap.pieces()[minus].clone(), ap.pieces()[plus].clone()),
            merged: merged.pieces()[merged_idx].clone(),
            present: has_plus,
            inner: Box::new(inner),
        });
    }
    let (present, sign) = if has_plus { (plus, 1i8) } else { (minus, -1i8) };
    let absent = if has_plus { minus } else { plus };
    // In a minimal partition the pair's column is clean, so all members
    // other than the present piece have incidence 0 on `axis` and survive
    // the projection to the `sign` half.
    let projected = project_halves(ap, axis, sign)?;
    let kept: Vec<usize> =
        (0..ap.pieces().len()).filter(|&i| i != absent).collect();
    let project_index = |i: usize| kept.binary_search(&i).expect("kept piece");
    let base_subset: Vec<usize> = subset
        .iter()
        .filter(|&&i| i != present)
        .map(|&i| project_index(i))
        .collect();
    let extended_subset: Vec<usize> = subset.iter().map(|&i| project_index(i)).collect();
    let base = cert_rec(&projected, &base_subset)?;
    let extended = cert_rec(&projected, &extended_subset)?;
    Ok(BoxCertificate::Split {
        axis,
        sign,
        mid: ap.x().0[axis],
        piece: ap.pieces()[present].clone(),
        base: Box::new(base),
        extended: Box::new(extended),
    })
}

/// Check a certificate against the boxes whose union it describes.  Each
/// constructor's geometric side conditions are verified exactly; `Atom`
/// additionally checks that the boxes tile the claimed box.
pub fn verify_certificate(cert: &BoxCertificate, boxes: &[Rect]) -> bool {
    if boxes.is_empty() {
        return false;
    }
    match cert {
        BoxCertificate::Atom(r) => {
            boxes.iter().all(|b| r.contains_rect(b))
                && Region::new(boxes.to_vec()).covers_rect(r)
        }
        BoxCertificate::Reduce { pair, merged, present, inner } => {
            let (q, p) = pair;
            // The pair must abut on exactly one axis, match on the others,
            // and union to `merged`.
            let n = merged.lo.len();
            let mut abut_axes = 0;
            for i in 0..n {
                let same_extent = q.lo[i] == p.lo[i] && q.hi[i] == p.hi[i];
                let abuts = q.hi[i] == p.lo[i] && q.lo[i] < q.hi[i] && p.lo[i] < p.hi[i];
                if same_extent {
                    if merged.lo[i] != q.lo[i] || merged.hi[i] != q.hi[i] {
                        return false;
                    }
                } else if abuts {
                    if merged.lo[i] != q.lo[i] || merged.hi[i] != p.hi[i] {
                        return false;
                    }
                    abut_axes += 1;
                } else {
                    return false;
                }
            }
            if abut_axes != 1 {
                return false;
            }
            let mut inner_boxes: Vec<Rect> = Vec::new();
            let mut seen_q = false;
            let mut seen_p = false;
            for b in boxes {
                if *present && !seen_q && b == q {
                    seen_q = true;
                } else if *present && !seen_p && b == p {
                    seen_p = true;
                } else if !*present && (b == q || b == p) {
                    return false;
                } else {
                    inner_boxes.push(b.clone());
                }
            }
            if *present {
                if !seen_q || !seen_p {
                    return false;
                }
                inner_boxes.push(merged.clone());
            }
            verify_certificate(inner, &inner_boxes)
        }
        BoxCertificate::Split { axis, sign, mid, piece, base, extended } => {
            let j = *axis;
            let Some(pos) = boxes.iter().position(|b| b == piece) else {
                return false;
            };
            let rest: Vec<Rect> = boxes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pos)
                .map(|(_, b)| b.clone())
                .collect();
            if rest.is_empty() {
                return false;
            }
            let (c, d) = (rest[0].lo[j], rest[0].hi[j]);
            if !(c < *mid && *mid < d) {
                return false;
            }
            if !rest.iter().all(|b| b.lo[j] == c && b.hi[j] == d) {
                return false;
            }
            let half_ok = match sign {
                1 => piece.lo[j] == *mid && piece.hi[j] == d,
                -1 => piece.lo[j] == c && piece.hi[j] == *mid,
                _ => false,
            };
            if !half_ok {
                return false;
            }
            let rest_proj: Vec<Rect> = rest.iter().map(|b| b.drop_axis(j)).collect();
            let mut all_proj = rest_proj.clone();
            all_proj.push(piece.drop_axis(j));
            verify_certificate(base, &rest_proj) && verify_certificate(extended, &all_proj)
        }
    }
}

/// A cell of the coordinate arrangement of the union, encoded per axis as
/// `(lo, hi)` with `lo == hi` for pinned axes and `(lo, hi)` a gap between
/// consecutive arrangement coordinates otherwise.
type CCell = Vec<(i64, i64)>;

fn cell_dim(c: &CCell) -> usize {
    c.iter().filter(|(a, b)| a < b).count()
}

/// `a` is a proper face of `b` (any codimension).
fn is_proper_face(a: &CCell, b: &CCell) -> bool {
    a != b
        && a.iter().zip(b).all(|(&(alo, ahi), &(blo, bhi))| {
            (alo == blo && ahi == bhi) || (alo == ahi && (alo == blo || alo == bhi))
        })
}

fn complex_cells(boxes: &[Rect]) -> Vec<CCell> {
    let n = boxes[0].dim_ambient();
    let arr = Arrangement::from_rects(n, boxes.iter());
    let hull = Region::new(boxes.to_vec()).bounding_box().expect("nonempty");
    let mut cells = Vec::new();
    arr.for_each_cell_in(&hull, |cell| {
        if boxes.iter().any(|b| b.contains_rect(&cell.rect)) {
            let encoded: CCell =
                cell.rect.lo.iter().zip(&cell.rect.hi).map(|(&a, &b)| (a, b)).collect();
            cells.push(encoded);
        }
    });
    cells
}

/// Independent contractibility oracle: the cell complex of the union is
/// connected, has Euler characteristic 1, and collapses to a point by
/// greedily removing free faces.
pub fn collapses_to_a_point(boxes: &[Rect]) -> bool {
    if boxes.is_empty() {
        return false;
    }
    let cells = complex_cells(boxes);
    let euler: i64 = cells
        .iter()
        .map(|c| if cell_dim(c) % 2 == 0 { 1i64 } else { -1i64 })
        .sum();
    if euler != 1 {
        return false;
    }
    if !face_connected(&cells) {
        return false;
    }
    // Greedy free-face collapse.
    let mut alive: Vec<CCell> = cells;
    loop {
        if alive.len() == 1 {
            return cell_dim(&alive[0]) == 0;
        }
        let mut removed = None;
        'scan: for (i, sigma) in alive.iter().enumerate() {
            let mut coface = None;
            for (j, tau) in alive.iter().enumerate() {
                if is_proper_face(sigma, tau) {
                    if coface.is_some() {
                        continue 'scan;
                    }
                    coface = Some(j);
                }
            }
            if let Some(j) = coface {
                removed = Some((i, j));
                break;
            }
        }
        match removed {
            Some((i, j)) => {
                let (first, second) = (i.min(j), i.max(j));
                alive.swap_remove(second);
                alive.swap_remove(first);
            }
            None => return false,
        }
    }
}

fn face_connected(cells: &[CCell]) -> bool {
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..cells.len() {
        for j in 0..cells.len() {
            if i != j && is_proper_face(&cells[i], &cells[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (0..cells.len()).all(|i| find(&mut parent, i) == root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::minimal::enumerate_minimal_about;

    fn window(n: usize) -> Rect {
        Rect::new(vec![-2; n], vec![2; n])
    }

    #[test]
    fn oracle_accepts_boxes_and_facet_unions() {
        assert!(collapses_to_a_point(&[Rect::from_pairs(&[(0, 4), (0, 2)])]));
        // An L shape.
        assert!(collapses_to_a_point(&[
            Rect::from_pairs(&[(0, 4), (0, 2)]),
            Rect::from_pairs(&[(0, 2), (2, 6)]),
        ]));
    }

    #[test]
    fn oracle_rejects_disconnected_and_holed_unions() {
        assert!(!collapses_to_a_point(&[
            Rect::from_pairs(&[(0, 2), (0, 2)]),
            Rect::from_pairs(&[(4, 6), (0, 2)]),
        ]));
        // A square ring with a hole in the middle.
        assert!(!collapses_to_a_point(&[
            Rect::from_pairs(&[(0, 6), (0, 2)]),
            Rect::from_pairs(&[(0, 2), (2, 4)]),
            Rect::from_pairs(&[(4, 6), (2, 4)]),
            Rect::from_pairs(&[(0, 6), (4, 6)]),
        ]));
    }

    #[test]
    fn oracle_is_only_a_contractibility_check() {
        // Two squares sharing a corner collapse to the corner even though
        // the union is not a deformed box; the oracle is a necessary
        // condition, kept honest by the decomposition certificate.
        assert!(collapses_to_a_point(&[
            Rect::from_pairs(&[(0, 2), (0, 2)]),
            Rect::from_pairs(&[(2, 4), (2, 4)]),
        ]));
    }

    #[test]
    fn every_subfamily_in_the_plane_is_certified() {
        for k in 0..=2usize {
            for ap in enumerate_minimal_about(&window(2), &Point::origin(2), k).unwrap() {
                let m = ap.pieces().len();
                for mask in 1u32..(1 << m) {
                    let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
                    let (ok, cert) = union_box_homeomorphic(&ap, &subset).unwrap();
                    assert!(ok, "certificate failed for {subset:?}");
                    let boxes: Vec<Rect> =
                        subset.iter().map(|&i| ap.pieces()[i].clone()).collect();
                    assert!(verify_certificate(&cert, &boxes));
                    assert!(collapses_to_a_point(&boxes));
                }
            }
        }
    }

    #[test]
    fn a_three_dimensional_subfamily_produces_a_split_certificate() {
        let all = enumerate_minimal_about(&window(3), &Point::origin(3), 3).unwrap();
        let ap = &all[0];
        let m = ap.pieces().len();
        assert_eq!(m, 4);
        let mut saw_split = false;
        for mask in 1u32..(1 << m) {
            let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            let (ok, cert) = union_box_homeomorphic(&ap, &subset).unwrap();
            assert!(ok);
            if matches!(cert, BoxCertificate::Split { .. }) {
                saw_split = true;
            }
        }
        assert!(saw_split);
    }

    #[test]
    fn whole_family_reduces_to_the_window() {
        let ap = enumerate_minimal_about(&window(2), &Point::origin(2), 1)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        let (ok, cert) = union_box_homeomorphic(&ap, &[0, 1]).unwrap();
        assert!(ok);
        match cert {
            BoxCertificate::Reduce { present, inner, .. } => {
                assert!(present);
                assert_eq!(*inner, BoxCertificate::Atom(window(2)));
            }
            other => panic!("expected a reduction, got {other:?}"),
        }
    }

    #[test]
    fn bad_subsets_are_rejected() {
        let ap = enumerate_minimal_about(&window(2), &Point::origin(2), 1)
            .unwrap()
            .into_iter()
            .next()
            .unwrap();
        assert_eq!(union_box_homeomorphic(&ap, &[]), Err(HomeoError::EmptySubfamily));
        assert_eq!(union_box_homeomorphic(&ap, &[5]), Err(HomeoError::BadIndex(5)));
        let octant = crate::partition::tests::octant_merge_partition();
        assert!(matches!(
            union_box_homeomorphic(&octant, &[0]),
            Err(HomeoError::Minimal(MinimalError::NotMinimal))
        ));
    }
}
