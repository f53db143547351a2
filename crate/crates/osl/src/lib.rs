//! Outlier-robust single linkage clustering.
//!
//! Single linkage merges the two closest clusters until everything is joined;
//! cutting the resulting dendrogram at a radius `r` yields the connected
//! components of the `r`-neighborhood graph. With outliers present, the
//! classical cut (the largest radius leaving at least `M` clusters) chains
//! through the noise. The robust selector used here instead picks the largest
//! radius maximizing the size of the `M`-th largest cluster, which ignores
//! small satellite components formed by outliers.
//!
//! The crate ships the clustering core ([`linkage`], [`select`]), synthetic
//! mixture models and samplers ([`datagen`]), Monte Carlo risk and ARI
//! evaluation ([`evaluate`]), the theoretical risk bound ([`theory`]), file
//! loading ([`io`]) and the command layer behind the `osl` binary ([`cli`]).

pub mod cli;
pub mod datagen;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod linkage;
pub mod select;
pub mod theory;

pub use error::{Error, Result};
pub use evaluate::Algorithm;
pub use linkage::{build_dendrogram, Dendrogram, Partition, PointSet};
pub use select::{osl_cluster, sl_cluster, Clustering};
