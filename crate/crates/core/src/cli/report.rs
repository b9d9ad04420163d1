//! Versioned JSON reports. Everything outside `run_meta` is a pure function of the
//! normalized configuration.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::cache::CacheEvent;
use super::config::NormalizedConfig;

pub const SCHEMA: &str = "schurcat.report/v1";

/// Coefficients live in Q(q) or Q in place of C; every equality in a report is exact there.
pub const EXACT_FIELD: &str =
    "scalars are exact elements of Q(q) (or Q after specialization) standing in for the complex numbers";

#[derive(Clone, Debug, Serialize)]
pub struct RunMeta {
    pub elapsed_ms: u128,
    pub cache_dir: Option<String>,
    pub cache_events: Vec<CacheEvent>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub version: &'static str,
    pub config_hash: String,
    pub config: NormalizedConfig,
    pub assumptions: Vec<String>,
    pub result: serde_json::Value,
    pub run_meta: RunMeta,
}

pub fn config_hash(cfg: &NormalizedConfig) -> String {
    hex::encode(Sha256::digest(serde_json::to_string(cfg).unwrap().as_bytes()))
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    /// The report without `run_meta`; byte-identical across repeated runs of one configuration.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).unwrap();
        v.as_object_mut().unwrap().remove("run_meta");
        serde_json::to_string_pretty(&v).unwrap()
    }

    /// Short human-readable summary derived from the JSON result.
    pub fn render_table(&self) -> String {
        let r = &self.result;
        let mut out = format!("{} ({}), config {}\n", self.command, self.schema, &self.config_hash[..12]);
        if let Some(v) = r.get("verdict") {
            out.push_str(&format!("verdict: {}\n", v));
        }
        if let Some(p) = r.get("pbw") {
            out.push_str(&format!("pbw: {}\n", p.as_str().unwrap_or("?")));
        }
        let table = r.get("table").or_else(|| r.get("schur").and_then(|s| s.get("table")));
        if let Some(t) = table {
            let names: Vec<String> = t["modules"]
                .as_array()
                .map(|a| a.iter().map(|x| x.as_str().unwrap_or("?").to_string()).collect())
                .unwrap_or_default();
            for e in t["entries"].as_array().into_iter().flatten() {
                let (v, w) = (e["v"].as_u64().unwrap_or(0) as usize, e["w"].as_u64().unwrap_or(0) as usize);
                let dims = e["dims_by_window"].as_array().and_then(|a| a.last()).cloned().unwrap_or_default();
                let stable: Vec<&str> = e["stable"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .map(|s| if s.as_bool() == Some(true) { "s" } else { "?" })
                    .collect();
                out.push_str(&format!(
                    "Ext({}, {}) = {}  [{}]\n",
                    names.get(v).map(String::as_str).unwrap_or("?"),
                    names.get(w).map(String::as_str).unwrap_or("?"),
                    dims,
                    stable.join("")
                ));
            }
        }
        out
    }
}
