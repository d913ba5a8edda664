//! JSON channel files: `x_size`, `s_size`, `y_size`, `W[x][s][y]`, `cost[s]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::{Avc, PROB_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDocument {
    x_size: usize,
    s_size: usize,
    y_size: usize,
    #[serde(rename = "W")]
    w: Vec<Vec<Vec<f64>>>,
    cost: Vec<f64>,
}

fn field_error(field: String, msg: impl std::fmt::Display) -> Error {
    Error::ChannelFile(format!("field {field}: {msg}"))
}

impl ChannelDocument {
    fn validate(&self) -> Result<()> {
        if self.x_size == 0 || self.s_size == 0 || self.y_size == 0 {
            return Err(Error::ChannelFile("alphabet sizes must be positive".into()));
        }
        if self.w.len() != self.x_size {
            return Err(field_error(
                "W".into(),
                format!("{} entries, x_size is {}", self.w.len(), self.x_size),
            ));
        }
        for (x, block) in self.w.iter().enumerate() {
            if block.len() != self.s_size {
                return Err(field_error(
                    format!("W[{x}]"),
                    format!("{} entries, s_size is {}", block.len(), self.s_size),
                ));
            }
            for (s, row) in block.iter().enumerate() {
                let name = format!("W[{x}][{s}]");
                if row.len() != self.y_size {
                    return Err(field_error(
                        name,
                        format!("{} entries, y_size is {}", row.len(), self.y_size),
                    ));
                }
                if let Some(y) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
                    return Err(field_error(
                        format!("{name}[{y}]"),
                        format!("invalid probability {}", row[y]),
                    ));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > PROB_TOL {
                    return Err(field_error(name, format!("row sums to {sum}")));
                }
            }
        }
        if self.cost.len() != self.s_size {
            return Err(field_error(
                "cost".into(),
                format!("{} entries, s_size is {}", self.cost.len(), self.s_size),
            ));
        }
        if let Some(s) = self.cost.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(field_error(
                format!("cost[{s}]"),
                format!("invalid cost {}", self.cost[s]),
            ));
        }
        Ok(())
    }
}

pub fn parse_channel(text: &str) -> Result<Avc> {
    let doc: ChannelDocument = serde_json::from_str(text).map_err(|e| {
        Error::ChannelFile(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    doc.validate()?;
    Avc::from_nested(&doc.w, doc.cost).map_err(|e| Error::ChannelFile(e.to_string()))
}

pub fn read_channel(path: &Path) -> Result<Avc> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ChannelFile(format!("{}: {e}", path.display())))?;
    parse_channel(&text)
}

pub fn channel_to_json(avc: &Avc) -> String {
    let doc = ChannelDocument {
        x_size: avc.nx(),
        s_size: avc.ns(),
        y_size: avc.ny(),
        w: avc.to_nested(),
        cost: avc.cost().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("channel document serializes")
}
