//! Run manifests: every output file gets a `<file>.manifest.json` sidecar
//! tying it to the exact command, configuration, tolerances, and a content
//! hash of the inputs. The data files themselves stay timestamp-free so that
//! identical flags give byte-identical outputs.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

pub const MANIFEST_SCHEMA: &str = "v1";

#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize, P: Serialize> {
    pub schema: &'static str,
    /// The subcommand and its arguments as invoked.
    pub command: Vec<String>,
    /// Echo of the physical configuration.
    pub config: C,
    pub tolerances: Tolerances,
    /// SHA-256 over the command and configuration (the run's identity).
    pub input_hash: String,
    /// RFC 3339 timestamp; the only run-dependent field.
    pub timestamp: String,
    /// Command-specific provenance payload (records, solution, grid, ...).
    pub provenance: P,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub lattice_sum_abs: f64,
    pub root_bisection: f64,
    pub threshold_guard: f64,
    pub det_guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lattice_sum_abs: bicgrate_core::DEFAULT_TOL,
            root_bisection: 1e-12,
            threshold_guard: bicgrate_core::THRESHOLD_GUARD,
            det_guard: bicgrate_core::scattering::DET_GUARD,
        }
    }
}

pub fn write_manifest<C: Serialize, P: Serialize>(
    out_path: &Path,
    command: Vec<String>,
    config: C,
    provenance: P,
) -> std::io::Result<()> {
    let config_json = serde_json::to_string(&config).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(command.join("\u{1f}").as_bytes());
    hasher.update(config_json.as_bytes());
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA,
        command,
        config,
        tolerances: Tolerances::default(),
        input_hash: hex::encode(hasher.finalize()),
        timestamp: time::OffsetDateTime::now_utc()
            .format(&time::format_description::well_known::Rfc3339)
            .unwrap_or_else(|_| "unknown".into()),
        provenance,
    };
    let path = manifest_path(out_path);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)
}

pub fn manifest_path(out_path: &Path) -> std::path::PathBuf {
    let mut name = out_path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out_path.with_file_name(name)
}
