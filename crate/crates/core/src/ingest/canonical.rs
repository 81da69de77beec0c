//! Canonical on-disk dataset: a `manifest.json` plus one headerless
//! little-endian `f32` file per recording, channel-major.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GridLayout, Recording, RecordingMeta, SignalMatrix};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestGrid {
    pub rows: usize,
    pub cols: usize,
    pub module_width: usize,
    pub pitch_mm: f64,
}

impl From<GridLayout> for ManifestGrid {
    fn from(g: GridLayout) -> Self {
        ManifestGrid {
            rows: g.rows,
            cols: g.cols,
            module_width: g.module_width,
            pitch_mm: g.pitch_mm,
        }
    }
}

impl ManifestGrid {
    pub fn layout(&self) -> Result<GridLayout> {
        GridLayout::new(self.rows, self.cols, self.module_width, self.pitch_mm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub subject: u32,
    pub session: u32,
    pub gesture: u32,
    pub repetition: u32,
    pub sample_count: usize,
}

impl ManifestEntry {
    pub fn meta(&self) -> RecordingMeta {
        RecordingMeta {
            subject: self.subject,
            session: self.session,
            gesture: self.gesture,
            repetition: self.repetition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub fs_hz: f64,
    pub grid: ManifestGrid,
    pub recordings: Vec<ManifestEntry>,
}

/// Relative data-file path for a recording.
pub fn recording_path(meta: &RecordingMeta) -> String {
    format!(
        "s{:02}/session{}/g{:02}_r{:02}.f32",
        meta.subject, meta.session, meta.gesture, meta.repetition
    )
}

/// Streams recordings to disk; the manifest is written by [`ManifestWriter::finish`].
pub struct ManifestWriter {
    root: PathBuf,
    layout: GridLayout,
    manifest: Manifest,
}

impl ManifestWriter {
    pub fn create(root: impl AsRef<Path>, layout: GridLayout, fs_hz: f64) -> Result<Self> {
        layout.validate()?;
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(ManifestWriter {
            root,
            layout,
            manifest: Manifest {
                format_version: FORMAT_VERSION,
                fs_hz,
                grid: layout.into(),
                recordings: Vec::new(),
            },
        })
    }

    pub fn add(&mut self, rec: &Recording) -> Result<()> {
        if rec.layout != self.layout || rec.fs != self.manifest.fs_hz {
            return Err(Error::param(format!(
                "recording {:?} does not share the dataset's grid and sampling rate",
                rec.meta
            )));
        }
        let rel = recording_path(&rec.meta);
        let path = self.root.join(&rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        for &v in rec.samples.as_slice() {
            out.write_all(&(v as f32).to_le_bytes())
                .map_err(|e| Error::io(&path, e))?;
        }
        out.flush().map_err(|e| Error::io(&path, e))?;
        self.manifest.recordings.push(ManifestEntry {
            path: rel,
            subject: rec.meta.subject,
            session: rec.meta.session,
            gesture: rec.meta.gesture,
            repetition: rec.meta.repetition,
            sample_count: rec.samples.len(),
        });
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf> {
        let path = self.root.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Writes `recordings` under `root` and returns the manifest path.
pub fn write_canonical(root: impl AsRef<Path>, layout: GridLayout, fs_hz: f64, recordings: &[Recording]) -> Result<PathBuf> {
    let mut writer = ManifestWriter::create(root, layout, fs_hz)?;
    for rec in recordings {
        writer.add(rec)?;
    }
    writer.finish()
}

/// An opened canonical dataset; recordings are loaded on demand.
#[derive(Debug, Clone)]
pub struct CanonicalDataset {
    root: PathBuf,
    manifest: Manifest,
    layout: GridLayout,
}

impl CanonicalDataset {
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(Error::Version {
                found: manifest.format_version,
                expected: FORMAT_VERSION,
            });
        }
        if !(manifest.fs_hz.is_finite() && manifest.fs_hz > 0.0) {
            return Err(Error::Corrupt {
                path,
                reason: format!("invalid fs_hz {}", manifest.fs_hz),
            });
        }
        let layout = manifest.grid.layout()?;
        for entry in &manifest.recordings {
            let rel = Path::new(&entry.path);
            if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
                return Err(Error::Corrupt {
                    path: path.clone(),
                    reason: format!("recording path {:?} is not a plain relative path", entry.path),
                });
            }
        }
        Ok(CanonicalDataset {
            root,
            manifest,
            layout,
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    pub fn fs(&self) -> f64 {
        self.manifest.fs_hz
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Distinct subject ids in ascending order.
    pub fn subjects(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.manifest.recordings.iter().map(|r| r.subject).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn load(&self, entry: &ManifestEntry) -> Result<Recording> {
        let path = self.root.join(&entry.path);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let channels = self.layout.channel_count();
        let expected = entry.sample_count * channels * 4;
        if bytes.len() != expected {
            return Err(Error::Corrupt {
                path,
                reason: format!(
                    "{} bytes on disk, manifest implies {expected} ({} samples x {channels} channels)",
                    bytes.len(),
                    entry.sample_count
                ),
            });
        }
        let data = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
            .collect();
        let samples = SignalMatrix::from_channel_major(channels, entry.sample_count, data)?;
        Recording::new(entry.meta(), self.fs(), self.layout, samples)
    }

    pub fn load_all(&self) -> Result<Vec<Recording>> {
        self.manifest.recordings.iter().map(|e| self.load(e)).collect()
    }
}

pub fn read_canonical(root: impl AsRef<Path>) -> Result<Vec<Recording>> {
    CanonicalDataset::open(root)?.load_all()
}
