//! Synthetic HD-sEMG generator.
//!
//! Each gesture activates `K` point-like sources at fixed, seeded grid
//! positions. A source emits Gaussian noise band-limited to 20-450 Hz and is
//! picked up by electrode `(r, c)` with weight
//! `exp(-((r - row)^2 + d_circ(c, col)^2) / (2 sigma^2))`, where `d_circ` wraps
//! around the forearm circumference. White sensor noise is added at the
//! requested SNR (relative to the RMS of the whole clean grid).
//!
//! Sessions after the first translate every source by `session_row_shift`
//! rows (clamped at the grid edges, not wrapped) and apply a per-channel gain
//! drawn from `1 +/- amplitude_jitter`: an electrode shift plus contact
//! changes. Outputs are rounded to `f32` so they survive the canonical format
//! unchanged.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dsp::filter::{design_highpass, design_lowpass};
use crate::error::{Error, Result};
use crate::model::{GridLayout, Recording, RecordingMeta, RngSeed, SignalMatrix};

const SOURCE_BAND_HZ: (f64, f64) = (20.0, 450.0);
/// Discarded filter start-up samples per source.
const WARMUP: usize = 256;

// Stream tags for seed derivation.
const TAG_CENTRES: u64 = 1;
const TAG_SOURCE: u64 = 2;
const TAG_NOISE: u64 = 3;
const TAG_GAIN: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub layout: GridLayout,
    pub fs_hz: f64,
    pub gestures: u32,
    pub repetitions: u32,
    pub sessions: u32,
    pub subject: u32,
    pub duration_s: f64,
    pub sources_per_gesture: usize,
    /// Spread of a source's pickup, in grid cells.
    pub spatial_sigma: f64,
    /// Sensor SNR; `+inf` disables sensor noise.
    pub snr_db: f64,
    /// Rows added to every source position in sessions 2 and later.
    pub session_row_shift: i32,
    pub amplitude_jitter: f64,
    pub seed: RngSeed,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            layout: GridLayout::capgmyo(),
            fs_hz: 1000.0,
            gestures: 8,
            repetitions: 10,
            sessions: 2,
            subject: 1,
            duration_s: 1.2,
            sources_per_gesture: 3,
            spatial_sigma: 1.5,
            snr_db: 20.0,
            session_row_shift: 2,
            amplitude_jitter: 0.1,
            seed: RngSeed(0),
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        if !(self.fs_hz.is_finite() && self.fs_hz > 2.0 * SOURCE_BAND_HZ.0) {
            return Err(Error::param(format!("unsupported sampling rate {}", self.fs_hz)));
        }
        if self.gestures == 0 || self.repetitions == 0 || self.sessions == 0 {
            return Err(Error::param("gestures, repetitions and sessions must be positive"));
        }
        if self.sources_per_gesture == 0 {
            return Err(Error::param("each gesture needs at least one source"));
        }
        if !(self.spatial_sigma > 0.0) {
            return Err(Error::param("spatial_sigma must be positive"));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::param("snr_db must be a number"));
        }
        if self.session_row_shift.unsigned_abs() as usize >= self.layout.rows {
            return Err(Error::param(format!(
                "row shift {} must be smaller than the {} grid rows",
                self.session_row_shift, self.layout.rows
            )));
        }
        if !(0.0..1.0).contains(&self.amplitude_jitter) {
            return Err(Error::param("amplitude_jitter must lie in [0, 1)"));
        }
        // Long enough for at least one 256 ms window.
        if self.samples_per_recording() < crate::dsp::samples_for(0.256, self.fs_hz) {
            return Err(Error::param(format!(
                "{} s recordings are shorter than one analysis window",
                self.duration_s
            )));
        }
        Ok(())
    }

    pub fn samples_per_recording(&self) -> usize {
        crate::dsp::samples_for(self.duration_s, self.fs_hz)
    }
}

/// Grid position of a source, in (row, column) cell units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceCentre {
    pub row: f64,
    pub col: f64,
}

/// Mixes `sources` onto the grid with Gaussian pickup weights.
pub fn render_field(layout: &GridLayout, sigma: f64, centres: &[SourceCentre], sources: &[Vec<f64>]) -> Result<SignalMatrix> {
    if centres.len() != sources.len() {
        return Err(Error::param("one source signal per centre required"));
    }
    let len = sources.first().map_or(0, Vec::len);
    if sources.iter().any(|s| s.len() != len) {
        return Err(Error::param("source signals differ in length"));
    }
    let cols = layout.cols as f64;
    let mut out = SignalMatrix::zeros(layout.channel_count(), len);
    for r in 0..layout.rows {
        for c in 0..layout.cols {
            let ch = layout.channel_at(r, c)?;
            let dst = out.channel_mut(ch);
            for (centre, src) in centres.iter().zip(sources) {
                let dr = r as f64 - centre.row;
                let raw = (c as f64 - centre.col).abs() % cols;
                let dc = raw.min(cols - raw);
                let w = (-(dr * dr + dc * dc) / (2.0 * sigma * sigma)).exp();
                if w == 0.0 {
                    continue;
                }
                dst.iter_mut().zip(src).for_each(|(d, s)| *d += w * s);
            }
        }
    }
    Ok(out)
}

/// Generator state for one subject: source layouts and per-session gains.
#[derive(Debug, Clone)]
pub struct SyntheticSubject {
    spec: SyntheticSpec,
    /// `centres[g - 1]` for gesture `g`, session 1 positions.
    centres: Vec<Vec<SourceCentre>>,
}

impl SyntheticSubject {
    pub fn new(spec: SyntheticSpec) -> Result<Self> {
        spec.validate()?;
        let max_row = (spec.layout.rows - 1) as f64;
        let cols = spec.layout.cols as f64;
        let centres = (1..=spec.gestures)
            .map(|g| {
                let mut rng = spec.seed.rng(&[TAG_CENTRES, spec.subject.into(), g.into()]);
                (0..spec.sources_per_gesture)
                    .map(|_| SourceCentre {
                        row: rng.random::<f64>() * max_row,
                        col: rng.random::<f64>() * cols,
                    })
                    .collect()
            })
            .collect();
        Ok(SyntheticSubject { spec, centres })
    }

    pub fn spec(&self) -> &SyntheticSpec {
        &self.spec
    }

    /// Source positions for `gesture` as seen in `session`.
    pub fn centres(&self, session: u32, gesture: u32) -> Vec<SourceCentre> {
        let shift = if session > 1 {
            f64::from(self.spec.session_row_shift)
        } else {
            0.0
        };
        let max_row = (self.spec.layout.rows - 1) as f64;
        self.centres[(gesture - 1) as usize]
            .iter()
            .map(|c| SourceCentre {
                row: (c.row + shift).clamp(0.0, max_row),
                col: c.col,
            })
            .collect()
    }

    /// Band-limited, unit-RMS source waveforms for one repetition.
    pub fn source_signals(&self, session: u32, gesture: u32, repetition: u32) -> Result<Vec<Vec<f64>>> {
        let fs = self.spec.fs_hz;
        let hp = design_highpass(fs, SOURCE_BAND_HZ.0)?;
        let lp = design_lowpass(fs, SOURCE_BAND_HZ.1.min(0.45 * fs))?;
        let len = self.spec.samples_per_recording();
        (0..self.spec.sources_per_gesture)
            .map(|k| {
                let mut rng = self.spec.seed.rng(&[
                    TAG_SOURCE,
                    self.spec.subject.into(),
                    session.into(),
                    gesture.into(),
                    repetition.into(),
                    k as u64,
                ]);
                let mut x: Vec<f64> = (0..WARMUP + len).map(|_| rng.sample(StandardNormal)).collect();
                hp.apply_in_place(&mut x);
                lp.apply_in_place(&mut x);
                let mut x = x.split_off(WARMUP);
                let rms = (x.iter().map(|v| v * v).sum::<f64>() / len as f64).sqrt();
                if rms > 0.0 {
                    x.iter_mut().for_each(|v| *v /= rms);
                }
                Ok(x)
            })
            .collect()
    }

    fn channel_gains(&self, session: u32) -> Vec<f64> {
        let n = self.spec.layout.channel_count();
        if session <= 1 || self.spec.amplitude_jitter == 0.0 {
            return vec![1.0; n];
        }
        let j = self.spec.amplitude_jitter;
        let mut rng = self.spec.seed.rng(&[TAG_GAIN, self.spec.subject.into(), session.into()]);
        (0..n).map(|_| rng.random_range(1.0 - j..=1.0 + j)).collect()
    }

    pub fn recording(&self, session: u32, gesture: u32, repetition: u32) -> Result<Recording> {
        let spec = &self.spec;
        if session == 0 || session > spec.sessions || gesture == 0 || gesture > spec.gestures || repetition == 0 || repetition > spec.repetitions {
            return Err(Error::param(format!(
                "no synthetic recording for session {session}, gesture {gesture}, repetition {repetition}"
            )));
        }
        let sources = self.source_signals(session, gesture, repetition)?;
        let mut field = render_field(&spec.layout, spec.spatial_sigma, &self.centres(session, gesture), &sources)?;

        if spec.snr_db.is_finite() {
            let power = field.as_slice().iter().map(|v| v * v).sum::<f64>() / field.as_slice().len() as f64;
            let noise_sd = power.sqrt() / 10f64.powf(spec.snr_db / 20.0);
            let mut rng = spec.seed.rng(&[
                TAG_NOISE,
                spec.subject.into(),
                session.into(),
                gesture.into(),
                repetition.into(),
            ]);
            for ch in 0..field.channels() {
                for v in field.channel_mut(ch) {
                    *v += noise_sd * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
        let gains = self.channel_gains(session);
        for (ch, g) in gains.iter().enumerate() {
            for v in field.channel_mut(ch) {
                *v = ((*v * g) as f32) as f64;
            }
        }
        let meta = RecordingMeta {
            subject: spec.subject,
            session,
            gesture,
            repetition,
        };
        Recording::new(meta, spec.fs_hz, spec.layout, field)
    }

    /// All recordings in (session, gesture, repetition) order, generated lazily.
    pub fn recordings(&self) -> impl Iterator<Item = Result<Recording>> + '_ {
        let spec = &self.spec;
        (1..=spec.sessions).flat_map(move |s| {
            (1..=spec.gestures).flat_map(move |g| (1..=spec.repetitions).map(move |r| self.recording(s, g, r)))
        })
    }
}

/// Every recording of the spec's subject, all sessions.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<Recording>> {
    SyntheticSubject::new(spec.clone())?.recordings().collect()
}
