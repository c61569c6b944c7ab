use crate::config::{TorusConfig, TorusError};
use crate::divide::{divide_polyhedra, verify_partition, TorusPartition};
use crate::layers::layer_markers;
use crate::net::{greedy_net, refine_net};
use crate::normalize::{normalize_to_bound, NormalizeReport};
use crate::rectangles::build_rectangles;
use crate::refine::{refine_to_5, RefineReport};
use crate::stats::{check_nondegenerate, find_troublesome, regulation_stats, RegulationStats};
use serde::Serialize;

/// Everything a simulation run produces, with every construction inequality
/// re-verified by scans before it is returned.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationOutput {
    pub config: TorusConfig,
    pub marker_count: usize,
    pub subnet_count: usize,
    pub layer_count: usize,
    /// Smallest perpendicular distance between parallel faces of nearby
    /// boxes with overlapping projections (0 when coincidences were forced).
    pub min_margin: i64,
    /// Interacting face pairs left closer than `l` by the best-effort
    /// adjustment.
    pub pairs_below_l: usize,
    /// Faces left coincident with an interacting parallel face because every
    /// candidate level out to the displacement ceiling was occupied.
    pub coincident_faces: usize,
    /// Largest outward face displacement any box needed.
    pub max_displacement: i64,
    /// Repair of over-dense vertices left by far-reaching face extensions.
    pub normalize: NormalizeReport,
    /// Multiplicity-6 vertices of the unrefined partition (3D only, else 0).
    pub troublesome_count: usize,
    /// Whether the final partition realizes every axis direction.
    pub nondegenerate: bool,
    /// Vertex statistics of the final partition (refined when requested).
    pub stats: RegulationStats,
    pub refine: Option<RefineReport>,
    pub partition: TorusPartition,
}

/// Runs the whole pipeline: maximal net, sparse subnet, layers, boxes with
/// face adjustment, carving into rectangles, dissolution of over-dense
/// vertices, and the vertex scans; with `refine5` (3D only) the
/// multiplicity-6 vertices are then removed.
///
/// Each stage's defining inequalities are re-checked post hoc:
/// separation and covering of both nets, layer keys and their minimality,
/// box bounds and face margins, the exact cover identity, and the
/// multiplicity statistics themselves.
pub fn simulate(cfg: &TorusConfig, refine5: bool) -> Result<SimulationOutput, TorusError> {
    cfg.validate()?;
    let torus = cfg.torus();
    if refine5 && torus.n != 3 {
        return Err(TorusError::Refinement(
            "multiplicity-5 refinement applies to 3-dimensional partitions".into(),
        ));
    }

    let s1 = greedy_net(torus, cfg.r1, cfg.seed)?;
    s1.verify(torus, cfg.r1)?;
    let s2 = refine_net(torus, &s1, cfg.r2 - 2 * cfg.r1, cfg.seed)?;
    // Maximality inside an r1-covering net yields covering of the whole
    // torus with the slack of one net radius.
    s2.verify(torus, cfg.r2 - cfg.r1)?;

    let layers = layer_markers(torus, &s1, &s2, cfg.r1, cfg.r2)?;
    layers.verify(torus, &s1, &s2, cfg.r1, cfg.r2)?;

    let boxes = build_rectangles(torus, cfg, &s1, &layers)?;
    let (min_margin, _coincident_pairs) = boxes.verify(torus, cfg, &s1, &layers)?;

    let mut part = divide_polyhedra(torus, cfg, &s1, &boxes)?;
    verify_partition(torus, &part)?;
    let normalize = normalize_to_bound(torus, &mut part)?;

    let troublesome_count = if torus.n == 3 {
        find_troublesome(torus, &part)?.len()
    } else {
        0
    };

    let (partition, refine) = if refine5 {
        let (refined, report) = refine_to_5(torus, cfg, &part)?;
        (refined, Some(report))
    } else {
        (part, None)
    };

    let stats = regulation_stats(torus, &partition);
    let nondegenerate = check_nondegenerate(torus, &partition);

    Ok(SimulationOutput {
        config: cfg.clone(),
        marker_count: s1.points.len(),
        subnet_count: s2.points.len(),
        layer_count: layers.keys.len(),
        min_margin,
        pairs_below_l: boxes.pairs_below_l,
        coincident_faces: boxes.coincident_faces,
        max_displacement: boxes.max_disp,
        normalize,
        troublesome_count,
        nondegenerate,
        stats,
        refine,
        partition,
    })
}
