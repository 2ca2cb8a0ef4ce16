/// Failure talking to a package index.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("remote package index unavailable: {0}")]
pub struct RemoteError(pub String);

/// Looks up the license of a package in a remote index.
///
/// `Ok(None)` means the index answered and knows no license; errors mean the
/// index could not be asked.
pub trait RemoteLookup: Send + Sync {
    fn request(&self, name: &str, version: Option<&str>) -> Result<Option<String>, RemoteError>;
}

#[cfg(feature = "remote")]
pub use http::PypiJsonLookup;

#[cfg(feature = "remote")]
mod http {
    use std::time::Duration;

    use serde_json::Value;

    use super::{RemoteError, RemoteLookup};

    /// Client for the PyPI-style JSON API (`{base}/pypi/{name}[/{version}]/json`).
    pub struct PypiJsonLookup {
        base_url: String,
        agent: ureq::Agent,
    }

    impl PypiJsonLookup {
        pub const DEFAULT_BASE_URL: &'static str = "https://pypi.org";
        pub const TIMEOUT: Duration = Duration::from_secs(10);

        pub fn new(base_url: impl Into<String>) -> Self {
            let agent = ureq::AgentBuilder::new().timeout(Self::TIMEOUT).build();
            PypiJsonLookup {
                base_url: base_url.into().trim_end_matches('/').to_string(),
                agent,
            }
        }

        fn url(&self, name: &str, version: Option<&str>) -> String {
            match version {
                Some(v) => format!("{}/pypi/{name}/{v}/json", self.base_url),
                None => format!("{}/pypi/{name}/json", self.base_url),
            }
        }
    }

    impl Default for PypiJsonLookup {
        fn default() -> Self {
            Self::new(Self::DEFAULT_BASE_URL)
        }
    }

    impl RemoteLookup for PypiJsonLookup {
        fn request(&self, name: &str, version: Option<&str>) -> Result<Option<String>, RemoteError> {
            let resp = match self.agent.get(&self.url(name, version)).call() {
                Ok(r) => r,
                Err(ureq::Error::Status(404, _)) => return Ok(None),
                Err(e) => return Err(RemoteError(e.to_string())),
            };
            let body: Value = resp.into_json().map_err(|e| RemoteError(e.to_string()))?;
            Ok(license_from_metadata(&body))
        }
    }

    /// Picks the license from package metadata: the SPDX expression field,
    /// then the free-text field, then the last segment of a license classifier.
    pub(crate) fn license_from_metadata(body: &Value) -> Option<String> {
        let info = body.get("info")?;
        let field = |k: &str| {
            info.get(k)
                .and_then(Value::as_str)
                .map(str::trim)
                .filter(|s| !s.is_empty() && !s.eq_ignore_ascii_case("unknown"))
                .map(str::to_string)
        };
        field("license_expression").or_else(|| field("license")).or_else(|| {
            info.get("classifiers")?
                .as_array()?
                .iter()
                .filter_map(Value::as_str)
                .filter(|c| c.starts_with("License ::"))
                .filter_map(|c| c.rsplit("::").next().map(|s| s.trim().to_string()))
                .find(|s| !s.is_empty())
        })
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn metadata_field_priority() {
            let v: Value = serde_json::json!({"info": {"license_expression": "MIT", "license": "x"}});
            assert_eq!(license_from_metadata(&v).as_deref(), Some("MIT"));
            let v: Value = serde_json::json!({"info": {"license": "", "classifiers": [
                "Programming Language :: Python",
                "License :: OSI Approved :: Apache Software License"
            ]}});
            assert_eq!(license_from_metadata(&v).as_deref(), Some("Apache Software License"));
            let v: Value = serde_json::json!({"info": {"license": "UNKNOWN"}});
            assert_eq!(license_from_metadata(&v), None);
        }

        #[test]
        fn url_shape() {
            let l = PypiJsonLookup::new("http://localhost:1/");
            assert_eq!(l.url("requests", Some("2.28.1")), "http://localhost:1/pypi/requests/2.28.1/json");
            assert_eq!(l.url("requests", None), "http://localhost:1/pypi/requests/json");
        }
    }
}
