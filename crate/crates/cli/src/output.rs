//! Input descriptors, atomic file output, digests, and the experiment
//! manifest that makes every run re-derivable.

use anyhow::{anyhow, bail, Context, Result};
use aplab_core::fq::FieldSpace;
use aplab_core::ground::{interval_set, Ambient, GroundSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

/// `interval:N`, `f<q>^<n>:full`, or a ground-set file path.
pub fn parse_ground_spec(spec: &str) -> Result<GroundSet> {
    if let Some(n) = spec.strip_prefix("interval:") {
        let n: u64 = n.parse().with_context(|| format!("bad interval size in {:?}", spec))?;
        return Ok(interval_set(n));
    }
    if let Some(body) = spec.strip_prefix('f') {
        if let Some(dims) = body.strip_suffix(":full") {
            if let Some((q, n)) = dims.split_once('^') {
                if let (Ok(q), Ok(n)) = (q.parse::<u64>(), n.parse::<u32>()) {
                    let space = FieldSpace::make(q, n)?;
                    return Ok(GroundSet::full(Ambient::Field(space)));
                }
            }
            bail!("malformed field descriptor {:?} (want f<q>^<n>:full)", spec);
        }
    }
    let file = fs::File::open(spec).with_context(|| format!("cannot open {:?}", spec))?;
    Ok(GroundSet::read_from(&mut BufReader::new(file))?)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{:02x}", b)).collect()
}

/// Write via a temp file and rename, so partial outputs never land.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp-write");
    fs::write(&tmp, bytes).with_context(|| format!("writing {:?}", tmp))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {:?}", path))?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputRecord {
    pub role: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Enough to reproduce any output bit-for-bit: the argv (with output paths
/// as originally given), the generator, and the digests produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub generator_id: String,
    pub threads: usize,
    pub outputs: Vec<OutputRecord>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: Vec<String>, threads: usize) -> Manifest {
        Manifest {
            tool: "aplab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            generator_id: aplab_core::rng::GENERATOR_ID.into(),
            threads,
            outputs: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn record_output(&mut self, role: &str, path: &Path, bytes: &[u8]) {
        self.outputs.push(OutputRecord {
            role: role.into(),
            path: path.to_string_lossy().into_owned(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
    }

    pub fn write_next_to(&self, primary_output: &Path) -> Result<PathBuf> {
        let path = manifest_path(primary_output);
        let text = serde_json::to_string_pretty(self)?;
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

pub fn manifest_path(primary_output: &Path) -> PathBuf {
    let mut name = primary_output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    primary_output.with_file_name(name)
}

pub fn report_path(primary_output: &Path) -> PathBuf {
    let mut name = primary_output.file_name().unwrap_or_default().to_os_string();
    name.push(".report.json");
    primary_output.with_file_name(name)
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {:?}", path))?;
    Ok(serde_json::from_str(&text)?)
}

/// Rebuild the recorded argv with every output path redirected into `out_dir`.
pub fn redirect_command(manifest: &Manifest, out_dir: &Path) -> Result<Vec<String>> {
    let mut argv = manifest.command.clone();
    for rec in &manifest.outputs {
        if rec.role == "report" || rec.role == "manifest" {
            continue; // derived from the primary output path
        }
        let old = &rec.path;
        let file = Path::new(old)
            .file_name()
            .ok_or_else(|| anyhow!("output record {:?} has no file name", old))?;
        let new = out_dir.join(file).to_string_lossy().into_owned();
        let mut replaced = false;
        for tok in argv.iter_mut() {
            if tok == old {
                *tok = new.clone();
                replaced = true;
            }
        }
        if !replaced {
            bail!("output path {:?} not found in recorded command", old);
        }
    }
    Ok(argv)
}
