//! Multiway correspondence analysis (MWCA) of contingency tensors.
//!
//! A d-way table is turned into relative frequencies, moved into the standard
//! Euclidean space by the isometry `ν(F) = (D_1⁻¹, …, D_d⁻¹) F` with
//! `D_µ = diag(√f^µ)`, and decomposed with a Tucker basis (HOSVD by default).
//! Every mode gets its own principal-component point cloud, and [`verify`]
//! checks the linear and barycentric relations that tie those clouds together.
//!
//! ```
//! use mwca_core::{datasets, mwca::{run_mwca, Algorithm}, decompose::RankSpec};
//!
//! let table = datasets::health_survey().unwrap();
//! let res = run_mwca(&table, &RankSpec::Full, Algorithm::Hosvd).unwrap();
//! assert_eq!(res.y[1].nrows(), 7);
//! ```

pub mod datasets;
pub mod decompose;
pub mod error;
pub mod metric;
pub mod mwca;
pub mod table;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use table::ContingencyTable;
pub use tensor::{DenseMatrix, DenseTensor};
