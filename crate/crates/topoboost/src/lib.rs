//! Topological-feature-augmented gradient boosting for image classification.
//!
//! The crate has two halves. The topology half ([`ph`], [`image_topo`]) turns
//! an image into a point cloud, builds a Vietoris-Rips filtration, reduces its
//! boundary matrix over GF(2) and vectorizes the resulting persistence
//! diagrams into a fixed-length feature block. The learning half ([`gbdt`])
//! is a histogram-binned, leaf-wise boosted-tree classifier. [`pipeline`]
//! fuses truncated pixel and topological vectors, injects Gaussian noise,
//! and runs the truncation-sweep experiment comparing pixel-only against
//! fused features.
//!
//! All entry points are deterministic for a fixed seed, independent of the
//! worker count. The `parallel` feature (on by default) enables rayon-backed
//! inner loops; disabling it falls back to sequential iteration with
//! identical output.

pub mod dataset;
pub mod gbdt;
pub mod image_topo;
pub mod parallel;
pub mod ph;
pub mod pipeline;
pub mod plot;
pub mod seed;

pub use parallel::Parallelism;
