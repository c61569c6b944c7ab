//! Chain tracing against the three-piece obstruction: any candidate
//! completion is either non-minimal (a concrete witness is produced) or
//! drives the surface chain into its terminal contradiction.

use boxpart_core::arrangement::cell_stats;
use boxpart_core::surfaces::{
    grow_surface, maximal_surfaces, virtual_span, ChainLink, GrowOutcome, SurfaceChain,
};
use boxpart_core::{LocalPartition, Rect};
use serde::{Deserialize, Serialize};

use crate::instance::ExtensionInstance;
use crate::ExtensionError;

/// Replay of the impossibility argument on one candidate: the chain of
/// virtual surfaces grows strictly inside the confinement box until its
/// span hits the blocker's lower level, where the surface carrying the
/// blocker's footprint both overlaps the chain top and escapes the box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    /// Sweep axis of the chain (the last coordinate).
    pub axis: usize,
    /// Box the chain may never leave, forced by the tall column piece.
    pub cap: Rect,
    /// Footprint of the floor piece, contained in every chain surface.
    pub start_footprint: Rect,
    /// Footprint of the overhang piece, which escapes the cap.
    pub blocker_footprint: Rect,
    /// The strictly growing chain; the span ends are the height sequence.
    pub chain: SurfaceChain,
    /// Lower level of the overhang piece, where the chain must terminate.
    pub final_level: i64,
    /// The surface at `final_level` carrying the blocker's footprint.
    pub clash_surface: Rect,
}

impl ObstructionCertificate {
    /// Internal consistency: strict chain growth inside the cap, heights
    /// capped by the final level, and the terminal clash itself — the
    /// clash surface overlaps the chain top yet leaves the cap.
    pub fn verify(&self) -> bool {
        let top = match self.chain.links.last() {
            Some(l) => &l.rect,
            None => return false,
        };
        self.chain.is_strictly_increasing()
            && self.chain.links.iter().all(|l| self.cap.contains_rect(&l.rect))
            && self
                .chain
                .links
                .iter()
                .all(|l| l.rect.contains_rect(&self.start_footprint))
            && self.chain.links.iter().all(|l| l.d2 <= self.final_level)
            && self.chain.links.last().map(|l| l.d2) == Some(self.final_level)
            && self.clash_surface.interior_intersects(top)
            && self.clash_surface.contains_rect(&self.blocker_footprint)
            && !self.cap.contains_rect(&self.clash_surface)
    }
}

/// What tracing a candidate produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceOutcome {
    /// The candidate is minimal and the chain argument ran to its
    /// contradiction. No candidate should ever reach this on a window the
    /// obstruction occupies — reaching it refutes nothing, accepting is
    /// reserved for the (never observed) failure of the argument itself.
    Certificate(Box<ObstructionCertificate>),
    /// The candidate is not minimal: hull of a violating cell, with the
    /// multiplicity and boundary-rank found there.
    NonMinimal {
        cell: Rect,
        nu: usize,
        beta: usize,
    },
    /// The tracer could not refute the candidate. Never produced by the
    /// present argument; kept so the oracle's claim stays falsifiable.
    Accepted,
}

/// Roles of the three required pieces, derived from their geometry.
struct Roles {
    /// Top of the floor piece: the chain starts here.
    d1: i64,
    /// Lower level of the overhang piece: the chain must end here.
    final_level: i64,
    cap: Rect,
    start_footprint: Rect,
    blocker_footprint: Rect,
}

fn derive_roles(instance: &ExtensionInstance) -> Result<Roles, ExtensionError> {
    if instance.dim() != 3 {
        return Err(ExtensionError::Dimension(
            "chain tracing applies to three-dimensional instances".into(),
        ));
    }
    if instance.required.len() != 3 {
        return Err(ExtensionError::InvalidInstance(
            "chain tracing needs the three-piece obstruction layout".into(),
        ));
    }
    let w = &instance.window;
    let (floor, column, overhang) = (
        &instance.required[0],
        &instance.required[1],
        &instance.required[2],
    );
    let d1 = floor.hi[2];
    let final_level = overhang.lo[2];
    // The column must wall off high second-coordinate values throughout
    // the chain's height range, and the overhang must start above the
    // floor's roof and poke out beyond the column's inner face.
    let cap = Rect::from_pairs(&[
        (w.lo[0], w.hi[0]),
        (w.lo[1], column.lo[1]),
    ]);
    let start_footprint = floor.drop_axis(2);
    let blocker_footprint = overhang.drop_axis(2);
    if !(column.lo[2] <= d1 && column.hi[2] >= final_level && d1 < final_level) {
        return Err(ExtensionError::InvalidInstance(
            "the column does not span the chain heights".into(),
        ));
    }
    if !cap.contains_rect(&start_footprint) {
        return Err(ExtensionError::InvalidInstance(
            "the floor footprint is not confined by the column".into(),
        ));
    }
    if cap.contains_rect(&blocker_footprint) {
        return Err(ExtensionError::InvalidInstance(
            "the overhang footprint does not escape the confinement box".into(),
        ));
    }
    if !blocker_footprint.interior_intersects(&start_footprint) {
        return Err(ExtensionError::InvalidInstance(
            "the overhang footprint misses the floor footprint".into(),
        ));
    }
    Ok(Roles {
        d1,
        final_level,
        cap,
        start_footprint,
        blocker_footprint,
    })
}

/// Traces one candidate completion of the obstruction instance.
pub fn trace_obstruction_chain(
    instance: &ExtensionInstance,
    candidate: &LocalPartition,
) -> Result<TraceOutcome, ExtensionError> {
    let roles = derive_roles(instance)?;
    if candidate.window() != &instance.window {
        return Err(ExtensionError::InvalidCandidate(
            "candidate window differs from the instance window".into(),
        ));
    }
    for (i, r) in instance.required.iter().enumerate() {
        if !candidate.pieces().contains(r) {
            return Err(ExtensionError::InvalidCandidate(format!(
                "candidate does not contain required piece {i} verbatim"
            )));
        }
    }
    if let Some(cell) = candidate.minimality_violation() {
        let (containing, axes) = cell_stats(&cell, candidate.pieces());
        return Ok(TraceOutcome::NonMinimal {
            cell: cell.rect,
            nu: containing.len(),
            beta: axes.len(),
        });
    }
    follow_chain(candidate, &roles)
}

/// Runs the chain on a candidate already known to be minimal. Errors of
/// kind `Falsified` mean the partition contradicts a structural law of
/// minimal partitions — impossible unless the minimality scan was wrong.
fn follow_chain(
    candidate: &LocalPartition,
    roles: &Roles,
) -> Result<TraceOutcome, ExtensionError> {
    let axis = 2usize;
    let falsify = |m: String| ExtensionError::Falsified(m);
    let surfaces = maximal_surfaces(candidate, axis, roles.d1)
        .map_err(|e| falsify(format!("no surfaces at the floor roof: {e}")))?;
    let start = surfaces
        .iter()
        .find(|s| s.region().covers_rect(&roles.start_footprint))
        .ok_or_else(|| falsify("no surface carries the floor footprint".into()))?;
    let mut m = start
        .as_rectangle()
        .ok_or_else(|| falsify("maximal surface is not a box on minimal input".into()))?;
    if !roles.cap.contains_rect(&m) {
        return Err(falsify("the starting surface already escapes the cap".into()));
    }
    let mut d_cur = roles.d1;
    let mut chain = SurfaceChain {
        axis,
        links: Vec::new(),
    };
    let max_steps = candidate.pieces().len() * 6 + 16;
    for _ in 0..max_steps {
        let span = virtual_span(candidate, axis, &m, d_cur)
            .map_err(|e| falsify(format!("chain surface lost its wall: {e}")))?;
        if span > roles.final_level {
            return Err(falsify(
                "a chain span passed the blocker level, which its walls cannot".into(),
            ));
        }
        if span == d_cur {
            return Err(falsify("a chain surface has no upward span".into()));
        }
        chain.links.push(ChainLink {
            rect: m.clone(),
            d1: d_cur,
            d2: span,
        });
        if span == roles.final_level {
            let tops = maximal_surfaces(candidate, axis, roles.final_level)
                .map_err(|e| falsify(format!("no surfaces at the blocker level: {e}")))?;
            let host = tops
                .iter()
                .find(|s| s.region().covers_rect(&roles.blocker_footprint))
                .ok_or_else(|| {
                    falsify("no surface carries the blocker footprint".into())
                })?;
            let clash = host.as_rectangle().ok_or_else(|| {
                falsify("maximal surface is not a box on minimal input".into())
            })?;
            let cert = ObstructionCertificate {
                axis,
                cap: roles.cap.clone(),
                start_footprint: roles.start_footprint.clone(),
                blocker_footprint: roles.blocker_footprint.clone(),
                chain,
                final_level: roles.final_level,
                clash_surface: clash.clone(),
            };
            if cert.verify() {
                return Ok(TraceOutcome::Certificate(Box::new(cert)));
            }
            return Ok(TraceOutcome::Accepted);
        }
        let grown = grow_surface(candidate, axis, &m, d_cur, span)
            .map_err(|e| falsify(format!("chain growth failed: {e}")))?;
        let m2 = match grown {
            GrowOutcome::MaximalAt(m2) => m2,
            GrowOutcome::VirtualTo(m2, _) => m2,
        };
        if !(m2.contains_rect(&m) && m2 != m) {
            return Err(falsify("grown surface does not strictly extend".into()));
        }
        if !roles.cap.contains_rect(&m2) {
            return Err(falsify("grown surface escapes the confinement box".into()));
        }
        m = m2;
        d_cur = span;
    }
    Err(falsify("chain did not terminate within the step budget".into()))
}
