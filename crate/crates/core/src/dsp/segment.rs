//! Central-interval extraction and sliding-window segmentation.

use crate::error::{Error, Result};
use crate::model::SignalMatrix;

/// Number of samples covering `duration_s` at `fs`.
pub fn samples_for(duration_s: f64, fs: f64) -> usize {
    (duration_s * fs).round() as usize
}

/// Start index of the centred `n`-sample slice of an `len`-sample signal.
pub fn central_start(len: usize, n: usize) -> Result<usize> {
    if n > len {
        return Err(Error::param(format!(
            "recording of {len} samples is shorter than the {n}-sample central interval"
        )));
    }
    Ok((len - n) / 2)
}

/// The centred `duration_s` slice of every channel.
pub fn central_segment(samples: &SignalMatrix, fs: f64, duration_s: f64) -> Result<SignalMatrix> {
    let n = samples_for(duration_s, fs);
    if n == 0 {
        return Err(Error::param("central interval is empty"));
    }
    let start = central_start(samples.len(), n)?;
    samples.slice_samples(start, n)
}

/// Window start offsets: `floor((len - window) / stride)` windows at
/// `0, stride, 2*stride, ...`.
///
/// There is deliberately no `+ 1`: the CapgMyo protocol counts of 1960 and
/// 3920 instances (49 windows per 1 s interval at 256/15 samples) only come
/// out this way. A segment exactly one window long therefore yields nothing.
pub fn window_starts(len: usize, window: usize, stride: usize) -> Result<Vec<usize>> {
    if window == 0 || stride == 0 {
        return Err(Error::param("window and stride must be positive"));
    }
    if len < window {
        return Err(Error::param(format!(
            "segment of {len} samples is shorter than the {window}-sample window"
        )));
    }
    let count = (len - window) / stride;
    Ok((0..count).map(|i| i * stride).collect())
}

pub fn slide_windows(segment: &SignalMatrix, window: usize, stride: usize) -> Result<Vec<SignalMatrix>> {
    window_starts(segment.len(), window, stride)?
        .into_iter()
        .map(|s| segment.slice_samples(s, window))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_interval_examples() {
        assert_eq!(central_start(3000, 1000).unwrap(), 1000);
        assert_eq!(central_start(1001, 1000).unwrap(), 0);
        assert!(central_start(500, 1000).is_err());

        let ramp: Vec<f64> = (0..3000).map(f64::from).collect();
        let m = SignalMatrix::from_rows(&[ramp]).unwrap();
        let seg = central_segment(&m, 1000.0, 1.0).unwrap();
        assert_eq!(seg.len(), 1000);
        assert_eq!(seg.channel(0)[0], 1000.0);
        assert_eq!(seg.channel(0)[999], 1999.0);
    }

    #[test]
    fn window_count_examples() {
        assert_eq!(window_starts(1000, 256, 15).unwrap().len(), 49);
        assert!(window_starts(256, 256, 15).unwrap().is_empty());
        assert_eq!(window_starts(1000, 256, 744).unwrap(), vec![0]);
        assert!(window_starts(100, 256, 15).is_err());
        assert!(window_starts(1000, 256, 0).is_err());
    }

    #[test]
    fn protocol_instance_counts() {
        let per_rep = window_starts(1000, 256, 15).unwrap().len();
        assert_eq!(8 * 5 * per_rep, 1960);
        assert_eq!(8 * 10 * per_rep, 3920);
    }

    #[test]
    fn windows_are_slices() {
        let m = SignalMatrix::from_rows(&[(0..20).map(f64::from).collect::<Vec<_>>()]).unwrap();
        let w = slide_windows(&m, 5, 4).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w[2].channel(0), &[8.0, 9.0, 10.0, 11.0, 12.0]);
    }
}
