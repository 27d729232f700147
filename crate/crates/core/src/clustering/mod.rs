//! Spectral embedding of similarity matrices, Davies-Bouldin evaluation
//! against reference labels, and DBSCAN on `exp(-W)`.

mod davies_bouldin;
mod dbscan;
mod spectral;

pub use davies_bouldin::{davies_bouldin, davies_bouldin_points, ClusterEvaluation, Spread};
pub use dbscan::{
    auto_eps, dbscan_cluster, dbscan_precomputed, dissimilarity, k_distances, DbscanResult,
    DEFAULT_MIN_PTS,
};
pub use spectral::{affinity, laplacian, spectral_embed, spectral_embed_matrix, SpectralEmbedding};
