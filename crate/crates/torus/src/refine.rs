use crate::config::{Torus, TorusConfig, TorusError};
use crate::divide::{subtract_box, verify_partition, TorusPartition};
use crate::stats::{
    classify_troublesome, find_troublesome, regulation_stats, PieceLocator, RegulationStats,
};
use boxpart_core::Rect;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RefineReport {
    /// Number of small boxes inserted, one per treated vertex.
    pub inserted: usize,
    /// Scan passes until no multiplicity-6 vertex remained.
    pub iterations: usize,
    /// Largest observed count of pieces within `6·r1` of a treated vertex
    /// (the local density constant behind the margin `l / (2C)`).
    pub max_local_pieces: usize,
    pub final_stats: RegulationStats,
}

impl TorusPartition {
    /// Replaces the pieces flagged in `drop` by `pieces` (each given in an
    /// unwrapped local frame with its source marker).
    fn replace_many(&mut self, drop: &[bool], pieces: &[(Rect, u32)]) {
        let stride = 2 * self.n;
        let mut data = Vec::with_capacity(self.data.len() + stride * pieces.len());
        let mut source = Vec::with_capacity(self.source.len() + pieces.len());
        for k in 0..self.len() {
            if !drop[k] {
                data.extend_from_slice(&self.data[stride * k..stride * (k + 1)]);
                source.push(self.source[k]);
            }
        }
        self.data = data;
        self.source = source;
        for (r, src) in pieces {
            self.push_piece(&r.lo, &r.hi, *src);
        }
    }

    /// Piece `i` as a box in the frame whose coordinates agree with `x`
    /// (no wraparound between the box and `x`).
    fn piece_in_frame(&self, i: usize, x: &[i64]) -> Rect {
        let lo: Vec<i64> = (0..self.n)
            .map(|a| x[a] - self.offset_in(i, a, x[a]))
            .collect();
        let hi: Vec<i64> = (0..self.n).map(|a| lo[a] + self.side(i, a)).collect();
        Rect::new(lo, hi)
    }
}

/// Lowers the maximum vertex multiplicity of a 3-dimensional partition
/// from 6 to 5 by inserting a small box around every multiplicity-6 vertex
/// and re-dividing the two pieces it meets. Each pass plans one treatment
/// per vertex — skipping any whose pieces an earlier treatment of the same
/// pass already replaced — applies them in a single rebuild, and scans
/// again; errors if the vertices persist after 20 passes or the final
/// partition fails any verification.
pub fn refine_to_5(
    torus: Torus,
    cfg: &TorusConfig,
    part: &TorusPartition,
) -> Result<(TorusPartition, RefineReport), TorusError> {
    if torus.n != 3 {
        return Err(TorusError::Refinement(
            "multiplicity-5 refinement applies to 3-dimensional partitions".into(),
        ));
    }
    let mut cur = part.clone();
    let mut inserted = 0usize;
    let mut iterations = 0usize;
    let mut max_local = 0usize;
    loop {
        let list = find_troublesome(torus, &cur)?;
        if list.is_empty() {
            break;
        }
        if iterations == 20 {
            return Err(TorusError::Refinement(format!(
                "{} multiplicity-6 vertices persist after 20 passes",
                list.len()
            )));
        }
        iterations += 1;
        let locator = PieceLocator::new(torus, &cur);
        let mut drop = vec![false; cur.len()];
        let mut new_pieces: Vec<(Rect, u32)> = Vec::new();
        for t in &list {
            if drop[t.pair_pos as usize] || drop[t.pair_neg as usize] {
                continue; // stale vertex; the next pass rescans it
            }
            if let Some(update) = plan_treatment(cfg, &locator, &cur, &t.x, &mut max_local)? {
                drop[update.drop_i] = true;
                drop[update.drop_j] = true;
                new_pieces.extend(update.pieces);
                inserted += 1;
            }
        }
        cur.replace_many(&drop, &new_pieces);
    }
    verify_partition(torus, &cur)?;
    let final_stats = regulation_stats(torus, &cur);
    if final_stats.max_corner_nu > 5 {
        return Err(TorusError::Verification(format!(
            "refined partition still has a vertex of multiplicity {}",
            final_stats.max_corner_nu
        )));
    }
    Ok((
        cur,
        RefineReport {
            inserted,
            iterations,
            max_local_pieces: max_local,
            final_stats,
        },
    ))
}

struct Treatment {
    drop_i: usize,
    drop_j: usize,
    pieces: Vec<(Rect, u32)>,
}

/// Plans the treatment of one multiplicity-6 vertex: a small box `L` flush
/// on the non-crossed hyperplane, spanning one half-unit along that axis
/// and one to each side on the other two, replacing the two straddling
/// pieces by `L` plus their guillotine remainders. All new faces land on
/// even levels, so parity keeps them at least half a unit from every face
/// of the unrefined partition. Returns `None` when an earlier treatment
/// already lowered the vertex.
fn plan_treatment(
    cfg: &TorusConfig,
    locator: &PieceLocator,
    part: &TorusPartition,
    x: &[i64],
    max_local: &mut usize,
) -> Result<Option<Treatment>, TorusError> {
    let ids = locator.pieces_containing(x);
    if ids.len() < 6 {
        return Ok(None);
    }
    let rows: Vec<Vec<i8>> = ids
        .iter()
        .map(|&pid| part.incidence_row(pid as usize, x))
        .collect();
    let t = classify_troublesome(x, &ids, &rows)?;
    let local = locator.count_within(x, 6 * cfg.r1);
    *max_local = (*max_local).max(local);
    if cfg.l > 2 * local as i64 {
        return Err(TorusError::Refinement(format!(
            "margin l/(2C) = {}/{} exceeds one half-unit; l is too large for \
             the local piece count",
            cfg.l,
            2 * local
        )));
    }
    let (a, c) = (t.axis, 2 - t.axis);
    let sigma = t.sigma as i64;
    let mut lo = vec![x[0] - 1, x[1] - 1, x[2] - 1];
    let mut hi = vec![x[0] + 1, x[1] + 1, x[2] + 1];
    if sigma > 0 {
        lo[a] = x[a];
    } else {
        hi[a] = x[a];
    }
    let l_box = Rect::new(lo, hi);
    let p_pos = part.piece_in_frame(t.pair_pos as usize, x);
    let p_neg = part.piece_in_frame(t.pair_neg as usize, x);
    let mut half_pos = l_box.clone();
    half_pos.lo[c] = x[c];
    let mut half_neg = l_box.clone();
    half_neg.hi[c] = x[c];
    if !p_pos.contains_rect(&half_pos) || !p_neg.contains_rect(&half_neg) {
        return Err(TorusError::Verification(format!(
            "straddling pieces at {x:?} are too thin to hold the inserted box"
        )));
    }
    let src_pos = part.source[t.pair_pos as usize];
    let src_neg = part.source[t.pair_neg as usize];
    let mut pieces: Vec<(Rect, u32)> = vec![(l_box.clone(), src_pos)];
    let mut q = Vec::new();
    subtract_box(&p_pos, &l_box, &[0, 1, 2], &mut q);
    pieces.extend(q.drain(..).map(|r| (r, src_pos)));
    subtract_box(&p_neg, &l_box, &[2, 1, 0], &mut q);
    pieces.extend(q.drain(..).map(|r| (r, src_neg)));
    Ok(Some(Treatment {
        drop_i: t.pair_pos as usize,
        drop_j: t.pair_neg as usize,
        pieces,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guillotine_orders_fill_the_bitten_pieces() {
        // The two straddling pieces of the classified pattern with
        // axis = 2, sigma = +1, third axis 0, around x = (7,7,7).
        let p_pos = Rect::from_pairs(&[(7, 11), (3, 11), (7, 11)]);
        let p_neg = Rect::from_pairs(&[(3, 7), (3, 11), (7, 11)]);
        let l_box = Rect::from_pairs(&[(6, 8), (6, 8), (7, 8)]);
        let mut q1 = Vec::new();
        subtract_box(&p_pos, &l_box, &[0, 1, 2], &mut q1);
        let mut q2 = Vec::new();
        subtract_box(&p_neg, &l_box, &[2, 1, 0], &mut q2);
        assert!(q1.len() <= 4 && q2.len() <= 4);
        let vol: i64 = q1.iter().chain(&q2).map(|r| r.volume()).sum::<i64>()
            + l_box.volume();
        assert_eq!(vol, p_pos.volume() + p_neg.volume());
        for (i, r) in q1.iter().chain(&q2).enumerate() {
            assert!(!r.interior_intersects(&l_box));
            for s in q1.iter().chain(&q2).skip(i + 1) {
                assert!(!r.interior_intersects(s));
            }
        }
        // No fragment keeps touching x itself.
        for r in q1.iter().chain(&q2) {
            assert!(!r.contains_point(&boxpart_core::Point(vec![7, 7, 7])) );
        }
    }
}
