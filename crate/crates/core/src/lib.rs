//! Exact combinatorics of axis-aligned box partitions.
//!
//! Everything is integer arithmetic on the half-unit grid (stored value =
//! twice the real coordinate).  The crate provides, in dependency order:
//!
//! - [`geom`]: boxes, lattice/real conversions, boundary incidence;
//! - [`arrangement`]: the cell decomposition induced by a box family and
//!   exact pointwise statistics `(ν, β)`;
//! - [`partition`]: validated local partitions, partitions about a point,
//!   localization, minimality scans;
//! - [`matrix`]: principal matrices and the separative recursion;
//! - [`minimal`]: the tree calculus of minimal about-partitions;
//! - [`homeo`]: box-homeomorphism certificates for unions of pieces;
//! - [`wrap`]: periodic (wraparound) partitions and their regulation number;
//! - [`surfaces`]: level surfaces, virtual spans, and the growth lemma.

pub mod arrangement;
pub mod geom;
pub mod homeo;
pub mod matrix;
pub mod minimal;
pub mod partition;
pub mod surfaces;
pub mod wrap;

pub use arrangement::{point_stats, Arrangement, Cell, Region};
pub use geom::{boundary_incidence, lattice_points, z_to_r, Point, Rect};
pub use matrix::{
    cover_from_matrix, is_separative, principal_matrix, submatrix_half, PrincipalMatrix,
};
pub use partition::{
    localize_about, validate_local_partition, AboutPartition, LocalPartition, PartitionError,
};
