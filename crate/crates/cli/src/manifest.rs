use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use qkm_core::randomness::Calibration;
use qkm_core::Result;

/// Everything needed to rerun a command; embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub artifact_version: String,
    pub calibration_version: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: &impl Serialize, seed: u64) -> Self {
        let parameters = match serde_json::to_value(parameters) {
            Ok(Value::Object(map)) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            calibration_version: Calibration::current().version.to_string(),
        }
    }

    /// Single-line form for `#` comment headers.
    pub fn line(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// The manifest line followed by a note on which batch member a file
    /// belongs to.
    pub fn preamble(&self, member_seed: u64) -> Vec<String> {
        vec![format!("manifest {}", self.line()), format!("member_seed {member_seed}")]
    }
}

#[derive(Serialize)]
struct WithManifest<'a, T: Serialize> {
    manifest: &'a RunManifest,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON document `{ "manifest": ..., <body fields> }`.
pub fn write_json<T: Serialize>(path: Option<&Path>, manifest: &RunManifest, body: &T) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, &WithManifest { manifest, body })?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
