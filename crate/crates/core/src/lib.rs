//! Optimal trade-off between output fidelity F and estimation fidelity G
//! for covariant operations on uniformly distributed coherent states.
//!
//! The best achievable weighted fidelity p F + (1-p) G equals the dominant
//! eigenvalue of the trade-off operator R(p) = p R_F + (1-p) R_G, which is
//! block-diagonal over the photon-number difference between input and
//! output. This crate builds the truncated blocks, extracts their Perron
//! eigenpairs, and compares the resulting curve against the closed-form
//! Gaussian (two-mode squeezed vacuum) and photon-subtracted baselines,
//! including the lossy-channel application.
//!
//! Every reported value is a lower bound on the untruncated optimum: a
//! truncated block is a compression of the full operator, so its dominant
//! eigenvalue can only grow as the dimension or the number of scanned
//! blocks increases.

pub mod channel;
pub mod eig;
pub mod gaussianity;
mod jacobi;
pub mod numerics;
pub mod operator;
pub mod oracle;
mod par;
pub mod schmidt;
pub mod tradeoff;

pub use eig::{block_scan, dominant_eig, BlockScanResult, BlockScanner, EigResult, ScanParams};
pub use schmidt::SchmidtState;
