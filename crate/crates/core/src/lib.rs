//! License extraction, interpretation and incompatibility detection for
//! software projects.

pub mod attitude;
pub mod compat;
pub mod exec;
pub mod extraction;
pub mod license;
pub mod pipeline;
pub mod preprocess;
pub mod registry;
pub mod report;
pub mod term_id;
pub mod terms;

pub use exec::Execution;
pub use license::{LicenseInstance, LicenseKind, Origin, PackageRef, Role};
pub use terms::{Attitude, Category, TermId, TERM_COUNT};
