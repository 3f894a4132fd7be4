//! The learned robustness classifier: rasterizes assembly operations into
//! 2-channel start/goal images and trains a small convolutional network from
//! scratch (explicit forward/backward passes, Adam) to predict whether an
//! operation's simulated robustness lands in the high band `[0.95, 1]`.

mod dataset;
mod model;
mod nn;
mod raster;
mod train;

pub use dataset::{read_dataset, write_dataset, Dataset, DatasetRecord};
pub use model::{load_model, save_model, CnnArch, CnnModel, Prediction};
pub use nn::{Real, Tensor};
pub use raster::{rasterize, rasterize_setup, ImagePair, IMG_PIXELS, IMG_SIZE};
pub use train::{train, EpochStats, TrainConfig, TrainExample};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary robustness class. `High` means the simulator score is in `[0.95, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    NotHigh,
    High,
}

impl Label {
    pub fn index(self) -> usize {
        match self {
            Label::NotHigh => 0,
            Label::High => 1,
        }
    }

    pub fn from_index(i: usize) -> Label {
        if i == 1 {
            Label::High
        } else {
            Label::NotHigh
        }
    }
}

/// Quantizes a simulator score into the two classes (closed left endpoint).
pub fn label_from_score(r: f64) -> Result<Label, SurrogateError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(SurrogateError::ScoreOutOfRange(r));
    }
    Ok(if r >= 0.95 { Label::High } else { Label::NotHigh })
}

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dataset contains a single class; training needs both")]
    SingleClassDataset,
    #[error("model file has wrong magic or unsupported version")]
    VersionMismatch,
    #[error("model or dataset file is corrupt: {0}")]
    CorruptFile(String),
    #[error("robustness score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_threshold_is_closed_at_95() {
        assert_eq!(label_from_score(0.95).unwrap(), Label::High);
        assert_eq!(label_from_score(0.949).unwrap(), Label::NotHigh);
        assert_eq!(label_from_score(1.0).unwrap(), Label::High);
        assert_eq!(label_from_score(0.0).unwrap(), Label::NotHigh);
        assert!(label_from_score(1.2).is_err());
        assert!(label_from_score(-0.1).is_err());
    }
}
