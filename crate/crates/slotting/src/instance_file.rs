//! JSON instance files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "num_shelves": 2,
//!   "shelves": [{"remaining_capacity": 2, "pre_affinity": []}, ...],
//!   "pallets": [{"cost": 1}, ...],
//!   "lambda": [[0.0, 0.1, 0.9], ...]
//! }
//! ```
//!
//! `pre_affinity` holds one row of length N per pallet already on the
//! shelf; `lambda` is the full symmetric N x N matrix.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use slotting_core::model::{Instance, MatchingMatrix, Pallet, Shelf};

use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    version: u32,
    num_shelves: usize,
    shelves: Vec<ShelfRecord>,
    pallets: Vec<PalletRecord>,
    lambda: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShelfRecord {
    remaining_capacity: u64,
    pre_affinity: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PalletRecord {
    cost: u64,
}

pub fn to_json(instance: &Instance) -> String {
    let record = InstanceRecord {
        version: FORMAT_VERSION,
        num_shelves: instance.num_shelves(),
        shelves: instance
            .shelves()
            .iter()
            .map(|s| ShelfRecord {
                remaining_capacity: s.remaining_capacity,
                pre_affinity: s.pre_affinity.clone(),
            })
            .collect(),
        pallets: instance.pallets().iter().map(|p| PalletRecord { cost: p.cost }).collect(),
        lambda: instance.matching().rows().map(<[f64]>::to_vec).collect(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("instance records always serialize");
    text.push('\n');
    text
}

pub fn from_json(text: &str) -> Result<Instance> {
    let record: InstanceRecord = serde_json::from_str(text)?;
    if record.version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported instance format version {}, expected {FORMAT_VERSION}",
            record.version
        )));
    }
    if record.num_shelves != record.shelves.len() {
        return Err(Error::Format(format!(
            "num_shelves is {} but {} shelves are listed",
            record.num_shelves,
            record.shelves.len()
        )));
    }
    let matching = MatchingMatrix::from_rows(&record.lambda)?;
    let shelves = record
        .shelves
        .into_iter()
        .map(|s| Shelf {
            remaining_capacity: s.remaining_capacity,
            pre_affinity: s.pre_affinity,
        })
        .collect();
    let pallets = record.pallets.into_iter().map(|p| Pallet { cost: p.cost }).collect();
    Ok(Instance::new(shelves, pallets, matching)?)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(instance)).map_err(|e| Error::io(path, e))
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text)
}
