//! Embeddings of l2-squared (negative-type) point sets into l2 with
//! worst-case and average distortion guarantees, and their use in rounding
//! the Sparsest Cut semidefinite relaxation.
//!
//! The crate is organized bottom-up:
//!
//! - [`points`], [`graph`], [`pairs`]: point sets, the l2-squared check,
//!   difference matrices, weighted graphs and cut sparsity.
//! - [`spectral`]: SVD and stable rank of difference matrices, Laplacians
//!   and generalized eigenvalues of a cost/demand pencil.
//! - [`embed`], [`mvee`]: the contraction embeddings and their distortion.
//! - [`sdp`]: a small first-order solver for the Sparsest Cut SDP.
//! - [`round`]: sweep-cut rounding and a brute-force optimum.
//! - [`gen`]: seeded generators of point sets and instances.
//! - [`verify`]: claim-by-claim verification reports.

pub mod embed;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod mvee;
pub mod pairs;
pub mod points;
pub mod round;
pub mod sdp;
pub mod spectral;
pub mod verify;

pub use embed::{distortion_report, DistortionReport, EmbeddingOperator, Method};
pub use error::{Error, Result};
pub use graph::{cut_sparsity, Cut, CutResult, WeightedGraph};
pub use mvee::{goemans_embedding, mvee_centered, EllipsoidResult};
pub use pairs::{pair_count, pair_index};
pub use points::{check_l22, difference_matrix, weighted_difference_matrix, DifferenceMatrix, L22Report, PointSet};
pub use spectral::{generalized_eigs, laplacian, svd_spectrum, DifferenceSpectrum, GeneralizedSpectrum};
