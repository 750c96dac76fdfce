//! Tabulate each unit reward exhaustively, transform it, and confirm that the
//! spectrum lives on the unit's block index set and reproduces the table.

use anyhow::{bail, Result};
use netband_core::environment::{InterferenceGraph, SparseFourierModel};
use netband_core::fourier::{
    bits_per_unit, block_positions, character_bits, fourier_transform, profile_count, sign_word, ActionProfile,
};

use crate::model_file::ModelFile;

/// Largest encoding width the check will tabulate.
pub const MAX_WIDTH: usize = 7;

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitReport {
    pub unit: usize,
    /// Largest `|θ_S|` over `S` not contained in the unit's block.
    pub max_off_support: f64,
    pub max_reconstruction_error: f64,
}

impl UnitReport {
    pub fn passed(&self) -> bool {
        self.max_off_support <= TOLERANCE && self.max_reconstruction_error <= TOLERANCE
    }
}

/// Refuses problems whose profile table would exceed the cap.
pub fn check_size(units: usize, arms: u32) -> Result<()> {
    let width = bits_per_unit(arms)?.saturating_mul(units);
    if width > MAX_WIDTH {
        bail!("N log2 A = {width} exceeds the exhaustive cap of {MAX_WIDTH} (N <= 7 for A = 2)");
    }
    Ok(())
}

/// `r_n` at every profile, from the model's own evaluator.
pub fn tabulate_model(model: &SparseFourierModel) -> Result<Vec<Vec<f64>>> {
    check_size(model.units(), model.arms())?;
    let count = profile_count(model.units(), model.arms()).expect("checked above");
    let mut tables = vec![Vec::with_capacity(count as usize); model.units()];
    for index in 0..count {
        let rewards = model.true_reward(&ActionProfile::from_index(index, model.units(), model.arms()))?;
        for (table, r) in tables.iter_mut().zip(rewards) {
            table.push(r);
        }
    }
    Ok(tables)
}

/// `r_n` at every profile, summing the file's terms as written.
pub fn tabulate_file(file: &ModelFile) -> Result<Vec<Vec<f64>>> {
    check_size(file.units, file.arms)?;
    let width = file.width()?;
    let count = profile_count(file.units, file.arms).expect("checked above");
    let terms = file.term_bits()?;
    Ok(terms
        .iter()
        .map(|unit| {
            (0..count)
                .map(|i| {
                    let sw = sign_word(i, width);
                    unit.iter().map(|&(m, theta)| theta * character_bits(m, sw)).sum()
                })
                .collect()
        })
        .collect())
}

pub fn check_tables(graph: &InterferenceGraph, arms: u32, tables: &[Vec<f64>]) -> Result<Vec<UnitReport>> {
    let units = graph.units();
    check_size(units, arms)?;
    let bits = bits_per_unit(arms)?;
    tables
        .iter()
        .enumerate()
        .map(|(n, table)| {
            let support = block_positions(graph.neighborhood(n), bits).iter().fold(0u64, |acc, &p| acc | 1 << p);
            let spectrum = fourier_transform(table, units, arms)?;
            let max_off_support =
                spectrum.iter_bits().filter(|(m, _)| m & !support != 0).fold(0.0f64, |acc, (_, c)| acc.max(c.abs()));
            let max_reconstruction_error = table
                .iter()
                .enumerate()
                .fold(0.0f64, |acc, (i, &v)| acc.max((spectrum.reconstruct(i as u64) - v).abs()));
            Ok(UnitReport { unit: n, max_off_support, max_reconstruction_error })
        })
        .collect()
}

pub fn check_model(model: &SparseFourierModel) -> Result<Vec<UnitReport>> {
    check_tables(model.graph(), model.arms(), &tabulate_model(model)?)
}

pub fn check_file(file: &ModelFile) -> Result<Vec<UnitReport>> {
    check_tables(&file.graph()?, file.arms, &tabulate_file(file)?)
}
