//! Timing spike for large simulation configs:
//! `cargo run --release -p boxpart-torus --example spike -- n m l r1 r2 seed [refine5]`

use boxpart_torus::{simulate, TorusConfig};
use std::time::Instant;

fn main() {
    let args: Vec<i64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("numeric args"))
        .collect();
    let cfg = TorusConfig {
        n: args[0] as usize,
        m: args[1],
        l: args[2],
        r1: args[3],
        r2: args[4],
        seed: args[5] as u64,
    };
    let refine5 = args.get(6).copied().unwrap_or(0) != 0;
    let t0 = Instant::now();
    let out = simulate(&cfg, refine5).expect("simulate");
    let dt = t0.elapsed();
    println!(
        "n={} m={} l={} r1={} r2={} seed={} refine5={refine5}",
        cfg.n, cfg.m, cfg.l, cfg.r1, cfg.r2, cfg.seed
    );
    println!(
        "time={dt:?} markers={} subnet={} layers={} pieces={}",
        out.marker_count,
        out.subnet_count,
        out.layer_count,
        out.partition.len()
    );
    println!(
        "min_margin={} below_l={} coincident={} max_disp={} normalize={:?}",
        out.min_margin, out.pairs_below_l, out.coincident_faces, out.max_displacement, out.normalize
    );
    println!(
        "max_nu={} bound={} histogram={:?} violations={} troublesome={} nondegenerate={}",
        out.stats.max_corner_nu,
        out.stats.bound,
        out.stats.histogram,
        out.stats.crossing_violations,
        out.troublesome_count,
        out.nondegenerate
    );
    if let Some(r) = &out.refine {
        println!("refine={r:?}");
    }
}
