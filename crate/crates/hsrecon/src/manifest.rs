//! Run manifests: a JSON record written next to every output with everything
//! needed to regenerate it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub params: BTreeMap<String, Value>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub duration_seconds: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, Value>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            params: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            threads: None,
            duration_seconds: 0.0,
            results: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_owned(), value.into());
        self
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.duration_seconds = elapsed.as_secs_f64();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest values are serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// `<output>.manifest.json`, keeping the output's full file name.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// A float for JSON; infinities become the strings `"inf"` and `"-inf"`.
pub fn float_value(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v > 0.0 {
        Value::from("inf")
    } else if v < 0.0 {
        Value::from("-inf")
    } else {
        Value::from("nan")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_and_round_trip() {
        assert_eq!(manifest_path(Path::new("out/cap.scub")), Path::new("out/cap.scub.manifest.json"));
        let mut m = RunManifest::new("evaluate");
        m.param("level", 10.0).result("psnr_db", float_value(f64::INFINITY));
        m.seed = Some(3);
        let back = RunManifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.results["psnr_db"], "inf");
    }
}
