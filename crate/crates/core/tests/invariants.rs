//! Cross-checks of the central theorems, quantified over full enumerations
//! in low dimension.  Two independent generators are played against each
//! other: a geometric exact-cover search for every partition of a window
//! about its center, and the tree-based constructive enumeration of minimal
//! partitions.  Matrix-level statements are checked against both.

use boxpart_core::matrix::{
    all_rows, cover_from_matrix, is_separative, principal_matrix, row_box, row_orthant_mask,
    row_window, submatrix_half, verify_cover_bound, AboutCover, PrincipalMatrix,
};
use boxpart_core::minimal::{
    are_orthogonal_about, build_from_tree, canonical_form, enumerate_minimal_about, find_ej_pair,
    project_halves,
};
use boxpart_core::partition::{AboutPartition, LocalPartition};
use boxpart_core::{Point, Rect};

/// Every partition of `[-1,1]^k` about the origin, found by exact cover of
/// the `2^k` orthant cells by the `3^k` boxes through the origin.  This is
/// a complete, purely geometric enumeration with no tree theory in it.
fn all_about_tilings(k: usize) -> Vec<AboutPartition> {
    let rows = all_rows(k);
    let masks: Vec<u32> = rows.iter().map(|r| row_orthant_mask(r)).collect();
    let full: u32 = if k == 32 { u32::MAX } else { (1u32 << (1 << k)) - 1 };
    let mut chosen: Vec<usize> = Vec::new();
    let mut out: Vec<AboutPartition> = Vec::new();
    fn dfs(
        masks: &[u32],
        full: u32,
        covered: u32,
        chosen: &mut Vec<usize>,
        emit: &mut impl FnMut(&[usize]),
    ) {
        if covered == full {
            emit(chosen);
            return;
        }
        let target = (!covered & full).trailing_zeros();
        for (i, &m) in masks.iter().enumerate() {
            if m & (1 << target) != 0 && m & covered == 0 {
                chosen.push(i);
                dfs(masks, full, covered | m, chosen, emit);
                chosen.pop();
            }
        }
    }
    dfs(&masks, full, 0, &mut chosen, &mut |chosen| {
        let pieces: Vec<Rect> = chosen.iter().map(|&i| row_box(&rows[i])).collect();
        let base = LocalPartition::new(row_window(k), pieces)
            .expect("an exact orthant cover is a partition");
        out.push(AboutPartition::new(base, Point::origin(k)).expect("all boxes meet the origin"));
    });
    out
}

#[test]
fn tiling_search_counts_match_hand_enumeration_in_low_dimension() {
    // 1D: the whole window, or the two halves.
    assert_eq!(all_about_tilings(1).len(), 2);
    // 2D: whole; one split per axis; split-then-split-one-half four ways;
    // four quarters.
    assert_eq!(all_about_tilings(2).len(), 8);
}

#[test]
fn every_about_tiling_has_a_separative_matrix_that_covers() {
    for k in 1..=3 {
        for ap in all_about_tilings(k) {
            let m = principal_matrix(ap.pieces(), ap.x()).unwrap();
            assert!(is_separative(&m), "partition matrix must be separative: {m:?}");
            let cover = cover_from_matrix(&m).unwrap();
            assert!(cover.validate().is_empty(), "reconstructed cover must cover");
            let (nu, beta, bound) = verify_cover_bound(&cover).unwrap();
            assert!(bound, "ν={nu} < β+1 with β={beta}");
            let (nu_geom, beta_geom) = ap.stats();
            assert_eq!((nu, beta), (nu_geom, beta_geom));
        }
    }
}

#[test]
fn covering_does_not_imply_separative() {
    // A full interval plus its right half covers the window but fails the
    // column condition: the predicate is strictly stronger than covering.
    let m = PrincipalMatrix::new(vec![vec![0], vec![1]]);
    assert!(!is_separative(&m));
    let cover = AboutCover {
        window: row_window(1),
        pieces: vec![row_box(&[0]), row_box(&[1])],
        x: Point::origin(1),
    };
    assert!(cover.validate().is_empty());
}

#[test]
fn half_matrices_match_projected_halves_on_every_tiling() {
    for k in 2..=3 {
        for ap in all_about_tilings(k) {
            let m = principal_matrix(ap.pieces(), ap.x()).unwrap();
            for axis in 0..k {
                for sign in [-1i8, 1] {
                    let half = submatrix_half(&m, axis, sign).unwrap();
                    let projected = project_halves(&ap, axis, sign)
                        .expect("halves of any about-partition are partitions");
                    let proj_matrix =
                        principal_matrix(projected.pieces(), projected.x()).unwrap();
                    assert_eq!(half, proj_matrix);
                }
            }
        }
    }
}

#[test]
fn tree_enumeration_agrees_with_the_geometric_tiling_search() {
    for n in 1..=3 {
        let tilings = all_about_tilings(n);
        for k in 0..=n {
            let from_trees =
                enumerate_minimal_about(&row_window(n), &Point::origin(n), k).unwrap();
            let mut tree_keys: Vec<Vec<Rect>> = from_trees
                .iter()
                .map(|ap| {
                    let mut v = ap.pieces().to_vec();
                    v.sort();
                    v
                })
                .collect();
            tree_keys.sort();
            let mut geometric_keys: Vec<Vec<Rect>> = tilings
                .iter()
                .filter(|ap| ap.is_minimal_about() && ap.stats().1 == k)
                .map(|ap| {
                    let mut v = ap.pieces().to_vec();
                    v.sort();
                    v
                })
                .collect();
            geometric_keys.sort();
            assert_eq!(tree_keys, geometric_keys, "n={n}, k={k}");
        }
    }
    // The planar two-axis case has exactly four minimal partitions.
    let planar = enumerate_minimal_about(&row_window(2), &Point::origin(2), 2).unwrap();
    assert_eq!(planar.len(), 4);
}

#[test]
fn four_dimensional_enumeration_round_trips_and_projects_minimally() {
    let window = row_window(4);
    let x = Point::origin(4);
    for k in 1..=4 {
        let all = enumerate_minimal_about(&window, &x, k).unwrap();
        assert!(!all.is_empty());
        for ap in &all {
            // Canonical form rebuilds the same piece set.
            let (indices, tree) = canonical_form(ap).unwrap();
            let rebuilt = build_from_tree(&window, &x, &indices, &tree).unwrap();
            let mut a = ap.pieces().to_vec();
            let mut b = rebuilt.pieces().to_vec();
            a.sort();
            b.sort();
            assert_eq!(a, b);
            // A boundary axis always yields a mergeable pair.
            assert!(find_ej_pair(ap).is_ok());
            // Both halves of every axis are again minimal.
            for axis in 0..4 {
                for sign in [-1i8, 1] {
                    let half = project_halves(ap, axis, sign).unwrap();
                    assert!(half.is_minimal_about(), "axis {axis} sign {sign}");
                }
            }
        }
    }
}

#[test]
fn fully_active_axes_split_into_orthogonal_halves() {
    // Whenever an axis column of a minimal partition has no zero entry,
    // the two projected halves are orthogonal.
    let mut cases = 0usize;
    for n in 2..=3 {
        for k in 1..=n {
            for ap in enumerate_minimal_about(&row_window(n), &Point::origin(n), k).unwrap() {
                let m = principal_matrix(ap.pieces(), ap.x()).unwrap();
                for axis in 0..n {
                    if m.rows.iter().any(|r| r[axis] == 0) {
                        continue;
                    }
                    cases += 1;
                    let plus = project_halves(&ap, axis, 1).unwrap();
                    let minus = project_halves(&ap, axis, -1).unwrap();
                    assert!(are_orthogonal_about(&plus, &minus));
                }
            }
        }
    }
    assert!(cases > 0, "the sweep must exercise some fully active axis");
}

#[test]
fn all_spatial_subfamilies_are_certified_and_the_oracle_agrees() {
    use boxpart_core::homeo::{collapses_to_a_point, union_box_homeomorphic};
    for k in 0..=3 {
        for ap in enumerate_minimal_about(&row_window(3), &Point::origin(3), k).unwrap() {
            let count = ap.pieces().len();
            for mask in 1u32..(1 << count) {
                let subset: Vec<usize> =
                    (0..count).filter(|&i| mask & (1 << i) != 0).collect();
                let (ok, cert) = union_box_homeomorphic(&ap, &subset).unwrap();
                assert!(ok, "certificate must verify for {subset:?} of {:?}", ap.pieces());
                let boxes: Vec<Rect> =
                    subset.iter().map(|&i| ap.pieces()[i].clone()).collect();
                assert!(
                    collapses_to_a_point(&boxes),
                    "oracle disagrees on {subset:?}: {cert:?}"
                );
            }
        }
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = PrincipalMatrix> {
        (1usize..=3).prop_flat_map(|k| {
            proptest::collection::vec(proptest::collection::vec(-1i8..=1, k..=k), 1..=5)
                .prop_map(PrincipalMatrix::new)
        })
    }

    proptest! {
        #[test]
        fn separativeness_ignores_row_order_and_repetition(
            m in arb_matrix(),
            seed in 0usize..120,
            dup in 0usize..5,
        ) {
            let baseline = is_separative(&m);
            let mut rows = m.rows.clone();
            // A deterministic shuffle driven by the seed.
            for i in (1..rows.len()).rev() {
                rows.swap(i, seed % (i + 1));
            }
            prop_assert_eq!(is_separative(&PrincipalMatrix::new(rows.clone())), baseline);
            rows.push(rows[dup % rows.len()].clone());
            prop_assert_eq!(is_separative(&PrincipalMatrix::new(rows)), baseline);
        }

        #[test]
        fn separative_matrices_always_reconstruct_a_cover(m in arb_matrix()) {
            if is_separative(&m) {
                let cover = cover_from_matrix(&m).unwrap();
                prop_assert!(cover.validate().is_empty());
                let (_, _, bound) = verify_cover_bound(&cover).unwrap();
                prop_assert!(bound);
            } else {
                prop_assert!(cover_from_matrix(&m).is_err());
            }
        }

        #[test]
        fn lattice_round_trip(
            pairs in proptest::collection::vec((-4i64..=4, -4i64..=4), 1..=3),
        ) {
            // Lattice points live on even half-units.
            let lo = Point(pairs.iter().map(|&(a, b)| 2 * a.min(b)).collect());
            let hi = Point(pairs.iter().map(|&(a, b)| 2 * a.max(b)).collect());
            let rect = boxpart_core::geom::z_to_r(&lo, &hi);
            let back = boxpart_core::geom::r_to_z(&rect);
            prop_assert_eq!(back, Some((lo, hi)));
        }
    }
}
