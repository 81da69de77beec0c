//! Per-channel z-scoring with statistics fitted on training data only.

use crate::error::{Error, Result};
use crate::model::SignalMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub mean: Vec<f64>,
    /// Population standard deviation; constant channels carry 1.
    pub std: Vec<f64>,
}

impl ChannelStats {
    /// Pools every sample of each channel across `parts`.
    pub fn fit<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SignalMatrix>,
        I::IntoIter: Clone,
    {
        let parts = parts.into_iter();
        let channels = match parts.clone().next() {
            Some(m) => m.channels(),
            None => return Err(Error::param("no data to fit channel statistics")),
        };
        let mut count = 0usize;
        let mut sum = vec![0.0; channels];
        for m in parts.clone() {
            if m.channels() != channels {
                return Err(Error::param(format!(
                    "mixed channel counts: {} and {channels}",
                    m.channels()
                )));
            }
            count += m.len();
            for (ch, x) in m.iter_channels().enumerate() {
                sum[ch] += x.iter().sum::<f64>();
            }
        }
        if count < 2 {
            return Err(Error::param(format!(
                "need at least 2 samples per channel, got {count}"
            )));
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
        let mut sq = vec![0.0; channels];
        for m in parts {
            for (ch, x) in m.iter_channels().enumerate() {
                sq[ch] += x.iter().map(|v| (v - mean[ch]).powi(2)).sum::<f64>();
            }
        }
        let std = sq
            .iter()
            .map(|s| {
                let sd = (s / count as f64).sqrt();
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(ChannelStats { mean, std })
    }

    pub fn channels(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, data: &SignalMatrix) -> Result<SignalMatrix> {
        let mut out = data.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, data: &mut SignalMatrix) -> Result<()> {
        if data.channels() != self.channels() {
            return Err(Error::param(format!(
                "data has {} channels, statistics have {}",
                data.channels(),
                self.channels()
            )));
        }
        for ch in 0..data.channels() {
            let (m, s) = (self.mean[ch], self.std[ch]);
            data.channel_mut(ch).iter_mut().for_each(|v| *v = (*v - m) / s);
        }
        Ok(())
    }
}
