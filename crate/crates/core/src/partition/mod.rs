//! Constructive pieces of the uniqueness argument: the dyadic partition
//! subordinate to a ball cover, the signed interval decomposition around a
//! tag, and the doubling-radius search.

mod doubling;
mod kvadry;
mod subordinate;

pub use doubling::{find_doubling_radius, DoublingOutcome, DoublingQuery};
pub use kvadry::{kvadry_decomposition, Kvadry, KvadryCheck, SignedInterval};
pub use subordinate::{subordinate_partition, AssignedCube, PartitionCheck, SubordinatePartition};
