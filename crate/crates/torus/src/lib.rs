//! Seeded construction of bounded-multiplicity box partitions of a discrete
//! torus, following a layered marker-net scheme:
//!
//! 1. build a maximal `r1`-separated (hence `r1`-covering) marker net,
//! 2. refine it to a sparse subnet, classify markers into layers by the
//!    translation joining them to the subnet,
//! 3. grow a box around every marker, nudging faces outward so that parallel
//!    faces of nearby boxes keep a perpendicular margin,
//! 4. carve each box minus its predecessors into rectangles by extending
//!    faces axis by axis (highest axis first, axis 0 never),
//! 5. dissolve the rare over-dense vertices left by far-reaching face
//!    extensions inside small even-faced envelope boxes,
//! 6. verify every defining inequality and the multiplicity bound by
//!    exhaustive scans — nothing is trusted from the construction.
//!
//! All coordinates are integer half-units: lattice points sit at even
//! values, box faces at odd values.

pub mod config;
pub mod divide;
pub mod layers;
pub mod net;
pub mod normalize;
pub mod rectangles;
pub mod refine;
pub mod simulate;
pub mod stats;

pub use config::{Torus, TorusConfig, TorusError};
pub use divide::{divide_polyhedra, TorusPartition};
pub use layers::{layer_markers, Layers};
pub use net::{greedy_net, refine_net, MarkerSet};
pub use normalize::{normalize_to_bound, NormalizeReport};
pub use rectangles::{build_rectangles, LayeredBoxes};
pub use refine::{refine_to_5, RefineReport};
pub use simulate::{simulate, SimulationOutput};
pub use stats::{
    check_nondegenerate, crossing_matrix, find_troublesome, regulation_stats, RegulationStats,
    Troublesome,
};
