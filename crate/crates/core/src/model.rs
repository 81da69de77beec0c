//! Shared domain types: grid geometry, recordings, labelled windows and the
//! deterministic seeding contract.
//!
//! Grid orientation: row 0 is the most distal electrode row and the row index
//! grows proximally. Columns run around the forearm circumference and are
//! grouped into acquisition modules of `module_width` adjacent columns.
//! Channels are numbered row-major (`row * cols + col`).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of a high-density electrode grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    /// Proximal-distal electrode positions.
    pub rows: usize,
    /// Circumferential electrode positions.
    pub cols: usize,
    /// Columns per acquisition module.
    pub module_width: usize,
    /// Distance between adjacent rows in millimetres.
    pub pitch_mm: f64,
}

impl GridLayout {
    pub fn new(rows: usize, cols: usize, module_width: usize, pitch_mm: f64) -> Result<Self> {
        let layout = GridLayout {
            rows,
            cols,
            module_width,
            pitch_mm,
        };
        layout.validate()?;
        Ok(layout)
    }

    /// The 8x16 CapgMyo grid: eight 2-column modules, 8 mm row pitch.
    pub const fn capgmyo() -> Self {
        GridLayout {
            rows: 8,
            cols: 16,
            module_width: 2,
            pitch_mm: 8.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.module_width == 0 {
            return Err(Error::param(format!(
                "grid dimensions must be positive, got {}x{} with module width {}",
                self.rows, self.cols, self.module_width
            )));
        }
        if self.cols % self.module_width != 0 {
            return Err(Error::param(format!(
                "{} columns do not divide into modules of width {}",
                self.cols, self.module_width
            )));
        }
        if !(self.pitch_mm.is_finite() && self.pitch_mm > 0.0) {
            return Err(Error::param(format!("pitch must be positive, got {}", self.pitch_mm)));
        }
        Ok(())
    }

    pub fn channel_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn modules(&self) -> usize {
        self.cols / self.module_width
    }

    /// Row-major channel index of grid cell `(row, col)`.
    pub fn channel_at(&self, row: usize, col: usize) -> Result<usize> {
        if row >= self.rows {
            return Err(Error::Range {
                what: "grid row",
                index: row,
                limit: self.rows,
            });
        }
        if col >= self.cols {
            return Err(Error::Range {
                what: "grid column",
                index: col,
                limit: self.cols,
            });
        }
        Ok(row * self.cols + col)
    }

    /// Inverse of [`GridLayout::channel_at`].
    pub fn cell_of(&self, channel: usize) -> Result<(usize, usize)> {
        if channel >= self.channel_count() {
            return Err(Error::Range {
                what: "channel",
                index: channel,
                limit: self.channel_count(),
            });
        }
        Ok((channel / self.cols, channel % self.cols))
    }
}

/// Dense real matrix stored channel-major: all samples of channel 0, then
/// channel 1, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    channels: usize,
    len: usize,
    data: Vec<f64>,
}

impl SignalMatrix {
    pub fn zeros(channels: usize, len: usize) -> Self {
        SignalMatrix {
            channels,
            len,
            data: vec![0.0; channels * len],
        }
    }

    pub fn from_channel_major(channels: usize, len: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * len {
            return Err(Error::param(format!(
                "{} values cannot form a {}x{} matrix",
                data.len(),
                channels,
                len
            )));
        }
        Ok(SignalMatrix {
            channels,
            len,
            data,
        })
    }

    /// Builds a matrix from per-channel rows of equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let len = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * len);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != len {
                return Err(Error::param(format!(
                    "channel {i} has {} samples, expected {len}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(SignalMatrix {
            channels: rows.len(),
            len,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn channel(&self, ch: usize) -> &[f64] {
        &self.data[ch * self.len..(ch + 1) * self.len]
    }

    pub fn channel_mut(&mut self, ch: usize) -> &mut [f64] {
        &mut self.data[ch * self.len..(ch + 1) * self.len]
    }

    pub fn iter_channels(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics; an empty matrix simply has no channels to yield.
        self.data.chunks(self.len.max(1)).take(self.channels)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Copies the listed channels, in the listed order.
    pub fn select_channels(&self, channels: &[usize]) -> Result<SignalMatrix> {
        let mut data = Vec::with_capacity(channels.len() * self.len);
        for &ch in channels {
            if ch >= self.channels {
                return Err(Error::Range {
                    what: "channel",
                    index: ch,
                    limit: self.channels,
                });
            }
            data.extend_from_slice(self.channel(ch));
        }
        Ok(SignalMatrix {
            channels: channels.len(),
            len: self.len,
            data,
        })
    }

    /// Copies samples `start..start + len` of every channel.
    pub fn slice_samples(&self, start: usize, len: usize) -> Result<SignalMatrix> {
        if start + len > self.len {
            return Err(Error::Range {
                what: "sample",
                index: start + len,
                limit: self.len,
            });
        }
        let mut data = Vec::with_capacity(self.channels * len);
        for ch in self.iter_channels() {
            data.extend_from_slice(&ch[start..start + len]);
        }
        Ok(SignalMatrix {
            channels: self.channels,
            len,
            data,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Identity of one gesture repetition. Gestures and repetitions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub subject: u32,
    pub session: u32,
    pub gesture: u32,
    pub repetition: u32,
}

impl AsRef<RecordingMeta> for RecordingMeta {
    fn as_ref(&self) -> &RecordingMeta {
        self
    }
}

/// One gesture repetition recorded over the full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub meta: RecordingMeta,
    pub fs: f64,
    pub layout: GridLayout,
    /// `layout.channel_count()` channels in canonical row-major order.
    pub samples: SignalMatrix,
}

impl Recording {
    pub fn new(meta: RecordingMeta, fs: f64, layout: GridLayout, samples: SignalMatrix) -> Result<Self> {
        layout.validate()?;
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::param(format!("sampling rate must be positive, got {fs}")));
        }
        if samples.channels() != layout.channel_count() {
            return Err(Error::param(format!(
                "recording has {} channels but the grid has {}",
                samples.channels(),
                layout.channel_count()
            )));
        }
        if samples.len() == 0 {
            return Err(Error::param("recording has no samples"));
        }
        Ok(Recording {
            meta,
            fs,
            layout,
            samples,
        })
    }
}

impl AsRef<RecordingMeta> for Recording {
    fn as_ref(&self) -> &RecordingMeta {
        &self.meta
    }
}

/// Which electrodes a window covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubsetTag {
    FullGrid,
    /// One channel per module at the given grid row.
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub subject: u32,
    pub session: u32,
    pub repetition: u32,
    pub start_sample: usize,
    pub subset: SubsetTag,
}

/// A `channels x T` slice of a recording with its gesture label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledWindow {
    pub samples: SignalMatrix,
    pub gesture: u32,
    pub provenance: Provenance,
}

/// Ordered collection of windows sharing channel count and length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    windows: Vec<LabeledWindow>,
    classes: u32,
}

impl Dataset {
    pub fn new(windows: Vec<LabeledWindow>, classes: u32) -> Result<Self> {
        if let Some(first) = windows.first() {
            let (ch, t) = (first.samples.channels(), first.samples.len());
            for (i, w) in windows.iter().enumerate() {
                if w.samples.channels() != ch || w.samples.len() != t {
                    return Err(Error::param(format!(
                        "window {i} is {}x{}, expected {ch}x{t}",
                        w.samples.channels(),
                        w.samples.len()
                    )));
                }
                if w.gesture == 0 || w.gesture > classes {
                    return Err(Error::param(format!(
                        "window {i} has gesture {} outside 1..={classes}",
                        w.gesture
                    )));
                }
            }
        }
        Ok(Dataset { windows, classes })
    }

    pub fn windows(&self) -> &[LabeledWindow] {
        &self.windows
    }

    pub fn into_windows(self) -> Vec<LabeledWindow> {
        self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Number of gesture classes `G`.
    pub fn classes(&self) -> u32 {
        self.classes
    }
}

/// Root seed for everything random. Independent streams are derived from a
/// path of integers so work can be split across threads without changing
/// results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Mixes `path` into the seed with splitmix64 finalisation.
    pub fn derive(&self, path: &[u64]) -> u64 {
        let mut state = splitmix(self.0 ^ 0x6a09_e667_f3bc_c909);
        for &p in path {
            state = splitmix(state ^ splitmix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        state
    }

    pub fn rng(&self, path: &[u64]) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derive(path))
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
