use crate::config::{Torus, TorusConfig, TorusError};
use crate::layers::Layers;
use crate::net::{MarkerSet, PointGrid};

/// One axis-aligned box per marker, stored as offsets from its marker so
/// wraparound never enters the box arithmetic (boxes are tiny next to `m`).
#[derive(Debug, Clone)]
pub struct LayeredBoxes {
    pub off_lo: Vec<Vec<i64>>,
    pub off_hi: Vec<Vec<i64>>,
    /// Marker indices in construction order (layer rank, then marker).
    pub order: Vec<usize>,
    /// Smallest face margin chosen while adjusting, and how many adjusted
    /// faces settled below the target margin `l`.
    pub min_margin: i64,
    pub pairs_below_l: usize,
    /// Faces that had to move beyond the regular budget to reach their
    /// margin (every in-budget level was too close to an interacting face).
    pub escalations: usize,
    /// Faces left coincident with an interacting parallel face because every
    /// candidate level out to the ceiling was occupied. At dense parameter
    /// choices (small `r1` relative to the marker density) this is
    /// unavoidable; the partition statistics verify the multiplicity bound
    /// directly instead of relying on face margins.
    pub coincident_faces: usize,
    /// Largest outward displacement actually used by any face. Downstream
    /// interaction radii are derived from this, not from the ceiling.
    pub max_disp: i64,
}

/// Regular outward displacement budget of a face (a tenth of `r1`), within
/// which the adjustment aims for full `l`-margins.
pub fn adjustment_budget(r1: i64) -> i64 {
    2 * (r1 / 20)
}

/// Hard ceiling on face displacement (just under `r1`). The range beyond
/// the regular budget is used only when every in-budget level fails the
/// margin; boxes therefore always stay inside the ball of radius `2 * r1`,
/// far within the same-layer separation of `6 * r1`.
pub fn escalation_cap(r1: i64) -> i64 {
    (r1 - 1) & !1
}

/// Grows a box `[z - r1, z + r1]` around every marker, processing layers in
/// order. Each face of a later-layer box moves outward (in 2-half-unit
/// steps, keeping odd levels) when a parallel face of a nearby earlier box
/// comes closer than `l`. Candidate levels are tried in a fixed cascade:
/// first a level within the regular budget with margin at least `l` against
/// every parallel face of interacting earlier boxes, then such a level out
/// to the ceiling, then any non-coincident level, and finally — when every
/// level out to the ceiling is occupied — the level meeting the fewest
/// interacting faces. Interacting means the boxes overlap in the face's own
/// projection. Every compromise is counted so callers can report it.
pub fn build_rectangles(
    torus: Torus,
    cfg: &TorusConfig,
    s1: &MarkerSet,
    layers: &Layers,
) -> Result<LayeredBoxes, TorusError> {
    let n = torus.n;
    let r1 = cfg.r1;
    let l = cfg.l;
    let budget = adjustment_budget(r1);
    let cap = escalation_cap(r1);
    let mut order: Vec<usize> = (0..s1.points.len()).collect();
    order.sort_by(|&a, &b| {
        layers.of_marker[a]
            .cmp(&layers.of_marker[b])
            .then_with(|| s1.points[a].cmp(&s1.points[b]))
    });
    let mut grid = PointGrid::new(torus, 6 * r1);
    for p in &s1.points {
        grid.insert(p.clone());
    }
    let mut off_lo = vec![vec![-r1; n]; s1.points.len()];
    let mut off_hi = vec![vec![r1; n]; s1.points.len()];
    let mut built = vec![false; s1.points.len()];
    let mut min_margin = i64::MAX;
    let mut pairs_below_l = 0usize;
    let mut escalations = 0usize;
    let mut coincident_faces = 0usize;
    let mut max_disp = 0i64;
    for &zi in &order {
        let z = &s1.points[zi];
        if layers.of_marker[zi] > 0 {
            for axis in 0..n {
                for hi_side in [false, true] {
                    let c = if hi_side {
                        off_hi[zi][axis]
                    } else {
                        off_lo[zi][axis]
                    };
                    // Parallel face levels of earlier interacting boxes, in
                    // z-relative coordinates, split by trigger distance.
                    let mut trigger = Vec::new();
                    let mut constraint = Vec::new();
                    grid.for_each_within(z, 6 * r1, |uid, u| {
                        let ui = uid as usize;
                        if ui == zi || !built[ui] {
                            return;
                        }
                        let du = torus.rel(z, u);
                        let overlaps = (0..n).all(|b| {
                            b == axis || {
                                let zlo = off_lo[zi][b] - cap;
                                let zhi = off_hi[zi][b] + cap;
                                let ulo = du[b] + off_lo[ui][b];
                                let uhi = du[b] + off_hi[ui][b];
                                zlo <= uhi && ulo <= zhi
                            }
                        });
                        if !overlaps {
                            return;
                        }
                        // Boxes displaced near the ceiling can still place a
                        // face next to ours from four radii away.
                        let close = torus.dist(z, u) <= 4 * r1;
                        for level in [du[axis] + off_lo[ui][axis], du[axis] + off_hi[ui][axis]] {
                            constraint.push(level);
                            if close {
                                trigger.push(level);
                            }
                        }
                    });
                    if !trigger.iter().any(|&lam| (lam - c).abs() < l) {
                        continue;
                    }
                    // Margin and occupancy of every candidate level.
                    let candidates: Vec<(i64, i64, usize)> = (0..=cap / 2)
                        .map(|step| {
                            let d = 2 * step;
                            let c2 = if hi_side { c + d } else { c - d };
                            let margin = constraint
                                .iter()
                                .map(|&lam| (lam - c2).abs())
                                .min()
                                .unwrap_or(i64::MAX);
                            let hits = constraint.iter().filter(|&&lam| lam == c2).count();
                            (d, margin, hits)
                        })
                        .collect();
                    let pick = candidates
                        .iter()
                        .find(|&&(d, margin, _)| d <= budget && margin >= l)
                        .or_else(|| candidates.iter().find(|&&(_, margin, _)| margin >= l))
                        .or_else(|| candidates.iter().find(|&&(_, margin, _)| margin > 0))
                        .or_else(|| candidates.iter().min_by_key(|&&(d, _, hits)| (hits, d)));
                    let &(d, margin, _) = pick.expect("candidate list is never empty");
                    if margin == 0 {
                        coincident_faces += 1;
                    }
                    if margin < l {
                        pairs_below_l += 1;
                    }
                    if d > budget {
                        escalations += 1;
                    }
                    if margin < min_margin {
                        min_margin = margin;
                    }
                    if d > max_disp {
                        max_disp = d;
                    }
                    let c2 = if hi_side { c + d } else { c - d };
                    if hi_side {
                        off_hi[zi][axis] = c2;
                    } else {
                        off_lo[zi][axis] = c2;
                    }
                }
            }
        }
        built[zi] = true;
    }
    Ok(LayeredBoxes {
        off_lo,
        off_hi,
        order,
        min_margin,
        pairs_below_l,
        escalations,
        coincident_faces,
        max_disp,
    })
}

impl LayeredBoxes {
    /// Scan-verifies the defining properties of the box family: every box
    /// contains its marker ball, stays within the displacement ceiling and on
    /// odd face levels, and same-layer markers are far apart. Returns the
    /// smallest margin between parallel faces of interacting boxes along
    /// with the number of interacting face pairs that coincide.
    pub fn verify(
        &self,
        torus: Torus,
        cfg: &TorusConfig,
        s1: &MarkerSet,
        layers: &Layers,
    ) -> Result<(i64, usize), TorusError> {
        let n = torus.n;
        let r1 = cfg.r1;
        let cap = escalation_cap(r1);
        let fail = |msg: String| Err(TorusError::Verification(msg));
        for i in 0..s1.points.len() {
            for a in 0..n {
                let (lo, hi) = (self.off_lo[i][a], self.off_hi[i][a]);
                if lo > -r1 || lo < -r1 - cap || hi < r1 || hi > r1 + cap {
                    return fail(format!(
                        "box of {:?} violates the ball/budget bounds on axis {a}",
                        s1.points[i]
                    ));
                }
                if lo.rem_euclid(2) != 1 || hi.rem_euclid(2) != 1 {
                    return fail(format!(
                        "box of {:?} has an even face level on axis {a}",
                        s1.points[i]
                    ));
                }
            }
        }
        let mut grid = PointGrid::new(torus, 6 * r1);
        for p in &s1.points {
            grid.insert(p.clone());
        }
        let mut min_margin = i64::MAX;
        let mut coincident_pairs = 0usize;
        for (i, z) in s1.points.iter().enumerate() {
            let mut problem = None;
            grid.for_each_within(z, 6 * r1, |uid, u| {
                let ui = uid as usize;
                if ui == i || problem.is_some() {
                    return;
                }
                if layers.of_marker[ui] == layers.of_marker[i] {
                    problem = Some(format!(
                        "same-layer markers {z:?} and {u:?} are within 6*r1"
                    ));
                    return;
                }
                let du = torus.rel(z, u);
                for axis in 0..n {
                    let overlaps = (0..n).all(|b| {
                        b == axis || {
                            self.off_lo[i][b] <= du[b] + self.off_hi[ui][b]
                                && du[b] + self.off_lo[ui][b] <= self.off_hi[i][b]
                        }
                    });
                    if !overlaps {
                        continue;
                    }
                    for za in [self.off_lo[i][axis], self.off_hi[i][axis]] {
                        for ua in [du[axis] + self.off_lo[ui][axis], du[axis] + self.off_hi[ui][axis]]
                        {
                            let margin = (za - ua).abs();
                            if margin == 0 {
                                coincident_pairs += 1;
                            }
                            min_margin = min_margin.min(margin);
                        }
                    }
                }
            });
            if let Some(msg) = problem {
                return fail(msg);
            }
        }
        Ok((min_margin, coincident_pairs / 2))
    }
}
