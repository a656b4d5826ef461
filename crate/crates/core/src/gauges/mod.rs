//! Gauges, packings, tagged partitions, Cousin partitions and Vitali selection.

mod cousin;
mod gauge;
mod packing;
mod partition;
mod vitali;

pub use cousin::{cousin_partition_1d, cousin_walk, CousinItem, CousinPartition};
pub use gauge::{Gauge, GaugeSpec, RadiusFn, ZeroPart};
pub use packing::{sample_packing, sample_packing_with, Ball, FinenessReport, Packing, PackingSampler};
pub use partition::{TaggedItem, TaggedPartition};
pub use vitali::{inside_dilation, verify_vitali, vitali_disjoint_subfamily, VitaliSelection};
