//! Electrode-shift augmentation over channel subsets.
//!
//! A channel subset emulates a low-density armband: one electrode per
//! acquisition module, all on the same grid row. Moving the armband along the
//! forearm is a change of row, so the valid subsets are exactly one per row.
//! Training on every row ("all valid subsets") exposes a classifier to the
//! proximal-distal shifts it will meet across sessions, while the input stays
//! eight channels wide. Augmented copies keep their gesture label.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, GridLayout, LabeledWindow, SignalMatrix, SubsetTag};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSubset {
    pub row: usize,
    /// One channel per module, strictly increasing.
    pub channels: Vec<usize>,
}

impl ChannelSubset {
    /// The subset on `row`, taking column `column_offset` of every module.
    pub fn at_row(layout: &GridLayout, row: usize, column_offset: usize) -> Result<Self> {
        layout.validate()?;
        if column_offset >= layout.module_width {
            return Err(Error::param(format!(
                "column offset {column_offset} must be below module width {}",
                layout.module_width
            )));
        }
        let channels = (0..layout.modules())
            .map(|m| layout.channel_at(row, m * layout.module_width + column_offset))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelSubset { row, channels })
    }

    pub fn label(&self) -> String {
        format!("subset-{}", self.row)
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// One subset per grid row, in ascending row order.
pub fn enumerate_subsets(layout: &GridLayout, column_offset: usize) -> Result<Vec<ChannelSubset>> {
    (0..layout.rows)
        .map(|r| ChannelSubset::at_row(layout, r, column_offset))
        .collect()
}

/// Row of the central subset: `floor((rows - 1) / 2)`. On the 8-row CapgMyo
/// grid this is row 3, three rows from the distal edge and four from the
/// proximal one.
pub fn central_row(layout: &GridLayout) -> usize {
    (layout.rows.max(1) - 1) / 2
}

pub fn central_subset(layout: &GridLayout) -> Result<ChannelSubset> {
    ChannelSubset::at_row(layout, central_row(layout), 0)
}

/// Largest shift, in millimetres, that stays on the grid when starting from
/// `subset`: `(distal, proximal)`.
pub fn max_shift_mm(layout: &GridLayout, subset: &ChannelSubset) -> (f64, f64) {
    let distal = subset.row as f64 * layout.pitch_mm;
    let proximal = (layout.rows - 1 - subset.row) as f64 * layout.pitch_mm;
    (distal, proximal)
}

fn check_subset(layout: &GridLayout, subset: &ChannelSubset) -> Result<()> {
    let n = layout.channel_count();
    if subset.len() != layout.modules()
        || subset.row >= layout.rows
        || subset.channels.iter().any(|&c| c >= n || c / layout.cols != subset.row)
    {
        return Err(Error::param(format!(
            "{} does not belong to a {}x{} grid",
            subset.label(),
            layout.rows,
            layout.cols
        )));
    }
    Ok(())
}

/// Picks the subset's channels out of a full-grid sample matrix.
pub fn select_channels(samples: &SignalMatrix, layout: &GridLayout, subset: &ChannelSubset) -> Result<SignalMatrix> {
    check_subset(layout, subset)?;
    if samples.channels() != layout.channel_count() {
        return Err(Error::param(format!(
            "expected {} full-grid channels, got {}",
            layout.channel_count(),
            samples.channels()
        )));
    }
    samples.select_channels(&subset.channels)
}

/// Applies the subset transformation to a full-grid window.
pub fn select_subset(window: &LabeledWindow, layout: &GridLayout, subset: &ChannelSubset) -> Result<LabeledWindow> {
    if window.provenance.subset != SubsetTag::FullGrid {
        return Err(Error::param("window has already been reduced to a channel subset"));
    }
    let samples = select_channels(&window.samples, layout, subset)?;
    let mut provenance = window.provenance;
    provenance.subset = SubsetTag::Row(subset.row);
    Ok(LabeledWindow {
        samples,
        gesture: window.gesture,
        provenance,
    })
}

/// Expands every full-grid window into one window per valid subset
/// (window-major, then ascending row).
pub fn augment_avs(dataset: &Dataset, layout: &GridLayout, column_offset: usize) -> Result<Dataset> {
    let subsets = enumerate_subsets(layout, column_offset)?;
    let mut out = Vec::with_capacity(dataset.len() * subsets.len());
    for w in dataset.windows() {
        for s in &subsets {
            out.push(select_subset(w, layout, s)?);
        }
    }
    Dataset::new(out, dataset.classes())
}

/// Reduces every full-grid window to the central subset.
pub fn central_only(dataset: &Dataset, layout: &GridLayout, column_offset: usize) -> Result<Dataset> {
    let subset = ChannelSubset::at_row(layout, central_row(layout), column_offset)?;
    let windows = dataset
        .windows()
        .iter()
        .map(|w| select_subset(w, layout, &subset))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(windows, dataset.classes())
}
