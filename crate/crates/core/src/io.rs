// Copyright 2026 qrecur Contributors
// SPDX-License-Identifier: Apache-2.0

//! Channel files.
//!
//! ```json
//! {"dim": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}
//! ```
//!
//! `kraus[j][row][col]` is an `[re, im]` pair. Loading checks shapes only;
//! physical validity is left to [`QuantumChannel::validate`].

use std::path::Path;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::c64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim: usize,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelFile {
    pub fn from_channel(channel: &QuantumChannel) -> Self {
        let d = channel.dim();
        let kraus = channel
            .kraus()
            .iter()
            .map(|a| {
                (0..d)
                    .map(|i| (0..d).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect())
                    .collect()
            })
            .collect();
        Self { dim: d, kraus }
    }

    /// Shape-checked conversion. Shape problems are reported as
    /// [`Error::Parse`] since they are defects of the file, not the channel.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        if self.kraus.is_empty() {
            return Err(Error::Parse("kraus list is empty".into()));
        }
        let mut ops = Vec::with_capacity(self.kraus.len());
        for (k, rows) in self.kraus.iter().enumerate() {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::Parse(format!("Kraus operator {k} is not {d}x{d}")));
            }
            if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("Kraus operator {k} has non-finite entries")));
            }
            ops.push(Mat::from_fn(d, d, |i, j| c64::new(rows[i][j][0], rows[i][j][1])));
        }
        QuantumChannel::from_kraus_unchecked(ops)
    }
}

pub fn channel_from_json(text: &str) -> Result<QuantumChannel> {
    let file: ChannelFile = serde_json::from_str(text)?;
    file.to_channel()
}

pub fn channel_to_json(channel: &QuantumChannel) -> String {
    serde_json::to_string(&ChannelFile::from_channel(channel)).expect("channel file serializes")
}

pub fn load_channel(path: &Path) -> Result<QuantumChannel> {
    channel_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_channel(channel: &QuantumChannel, path: &Path) -> Result<()> {
    std::fs::write(path, channel_to_json(channel))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::population_transfer;
    use crate::numerics::max_abs_diff;

    #[test]
    fn round_trip_preserves_kraus_set() {
        let ch = population_transfer(4, 1, 0.37).unwrap();
        let back = channel_from_json(&channel_to_json(&ch)).unwrap();
        assert_eq!(back.num_kraus(), ch.num_kraus());
        for (a, b) in ch.kraus().iter().zip(back.kraus()) {
            assert_eq!(max_abs_diff(a.as_ref(), b.as_ref()), 0.0);
        }
    }

    #[test]
    fn malformed_files_are_parse_errors() {
        for text in [
            "{",
            r#"{"dim": 2}"#,
            r#"{"dim": 2, "kraus": []}"#,
            r#"{"dim": 2, "kraus": [[[[1, 0]], [[0, 0], [1, 0]]]]}"#,
            r#"{"dim": 1, "kraus": [[[[1, 0, 3]]]]}"#,
        ] {
            assert!(matches!(channel_from_json(text), Err(Error::Parse(_))), "{text}");
        }
    }

    #[test]
    fn non_normalized_file_loads_but_fails_validation() {
        let ch = channel_from_json(r#"{"dim": 1, "kraus": [[[[0.5, 0]]]]}"#).unwrap();
        assert!(!ch.validate(&Default::default()).trace_preserving);
    }
}
