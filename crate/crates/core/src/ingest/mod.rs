//! Dataset input/output: the canonical manifest + binary format and the
//! synthetic HD-sEMG generator used when real recordings are unavailable.

pub mod canonical;
pub mod synthetic;

pub use canonical::{
    read_canonical, write_canonical, CanonicalDataset, Manifest, ManifestEntry, ManifestGrid, ManifestWriter,
    FORMAT_VERSION, MANIFEST_FILE,
};
pub use synthetic::{generate_synthetic, render_field, SourceCentre, SyntheticSpec, SyntheticSubject};
