//! Arithmetic-progression structures in subsets of the integers and of
//! F_q^n: exact k-AP and triangle counting, AP hypergraphs with container
//! statistics, the Ellenberg–Gijswijt constants c_q and C_q, additive
//! energy, extremal (largest progression-free subset) search, and
//! seeded construct-then-delete pipelines including the annulus
//! projection that certifies 3-AP-free subsets.

pub mod annulus;
pub mod constants;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod extremal;
pub mod fq;
pub mod ground;
pub mod hypergraph;
pub mod progressions;
pub mod rng;
pub mod supersaturation;

pub use error::{Error, Result};
pub use fq::{Elem, FieldSpace};
pub use ground::{interval_set, Ambient, BitSet, GroundSet};
pub use hypergraph::{build_hypergraph, delta_function, APHypergraph};
pub use progressions::{count_3aps, count_4aps, count_triangles, APCounts};
