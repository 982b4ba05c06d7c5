//! Reading and writing QUBO/Ising text files.

use std::fs;
use std::path::Path;

use slotting_core::qubo::text::{parse_ising, parse_qubo, render_ising, render_qubo};
use slotting_core::qubo::{IsingModel, QuboModel};

use crate::{Error, Result};

pub fn export_qubo(model: &QuboModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_qubo(model)).map_err(|e| Error::io(path, e))
}

pub fn import_qubo(path: impl AsRef<Path>) -> Result<QuboModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_qubo(&text)?)
}

pub fn export_ising(model: &IsingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_ising(model)).map_err(|e| Error::io(path, e))
}

pub fn import_ising(path: impl AsRef<Path>) -> Result<IsingModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_ising(&text)?)
}
