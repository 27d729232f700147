//! Upper-quadrant copula similarity between anomaly-score columns.
//!
//! Scores are rank transformed to pseudo-observations, each column pair is
//! summarized by a survival-Clayton fit restricted to the upper quadrant
//! `[q, 1]^2` (or by one of the baseline measures), and the resulting
//! similarity matrix feeds a spectral embedding, Davies-Bouldin evaluation,
//! DBSCAN clustering and cluster-aware score ensembles.

pub mod cli;
pub mod clustering;
pub mod copula;
pub mod datagen;
pub mod empirical;
pub mod ensemble;
pub mod error;
pub mod estimators;
pub mod optimize;
pub mod similarity;

pub use copula::{Rho, Theta, UnitPoint, THETA_MAX, THETA_MIN};
pub use empirical::{rank_transform, PseudoMatrix, QuadrantLevel, ScoreMatrix};
pub use error::{Error, Result};
pub use estimators::{fit_pair, BoundaryFlag, QuadrantFit};
pub use similarity::{build_similarity, build_similarity_pseudo, Measure, SimilarityMatrix};
