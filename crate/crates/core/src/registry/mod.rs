//! Resolution of referenced licenses: SPDX names and URLs, and package
//! metadata from an offline index snapshot with optional remote fallback.

mod remote;
mod snapshot;
mod spdx;

use std::path::{Path, PathBuf};

pub use remote::{RemoteError, RemoteLookup};
#[cfg(feature = "remote")]
pub use remote::PypiJsonLookup;
pub use snapshot::{
    normalize_package_name, resolve_package, PackageIndexSnapshot, PackageResolver, SnapshotEntry,
};
pub use spdx::{resolve_reference, resolve_reference_at, SpdxDb, SpdxEntry, MAX_REFERENCE_LEN};

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("license file {0} listed in the index is missing")]
    MissingFile(String),
    #[error("license {0} has empty text")]
    EmptyText(String),
    #[error("duplicate license id {0}")]
    DuplicateId(String),
    #[error("alias {alias:?} is claimed by both {first} and {second}")]
    AliasCollision {
        alias: String,
        first: String,
        second: String,
    },
}

impl RegistryError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RegistryError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
