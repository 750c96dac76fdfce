//! JSON form of a reward model, meant to be inspected and hand-edited.
//!
//! Coefficients are stored as raw terms so a file may deliberately put mass
//! outside a unit's support; nothing here rejects that.

use std::path::Path;

use anyhow::{bail, Context, Result};
use netband_core::environment::{InterferenceGraph, SparseFourierModel};
use netband_core::fourier::bits_per_unit;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    /// Encoding positions of the character, `0 <= p < N log2 A`.
    pub positions: Vec<usize>,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub units: usize,
    pub arms: u32,
    pub sparsity: usize,
    pub neighborhoods: Vec<Vec<usize>>,
    /// One term list per unit.
    pub coefficients: Vec<Vec<Term>>,
}

impl ModelFile {
    pub fn from_model(model: &SparseFourierModel) -> Self {
        let graph = model.graph();
        Self {
            units: model.units(),
            arms: model.arms(),
            sparsity: graph.sparsity(),
            neighborhoods: graph.neighborhoods().to_vec(),
            coefficients: (0..model.units())
                .map(|n| {
                    model
                        .coefficients(n)
                        .into_iter()
                        .map(|(mask, theta)| Term { positions: mask.positions().collect(), theta })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn graph(&self) -> Result<InterferenceGraph> {
        if self.neighborhoods.len() != self.units {
            bail!("{} neighborhoods listed for {} units", self.neighborhoods.len(), self.units);
        }
        Ok(InterferenceGraph::new(self.neighborhoods.clone(), self.sparsity)?)
    }

    pub fn width(&self) -> Result<usize> {
        Ok(bits_per_unit(self.arms)? * self.units)
    }

    /// Every unit's terms as `(mask bits, θ)`, checking positions and width.
    pub fn term_bits(&self) -> Result<Vec<Vec<(u64, f64)>>> {
        let width = self.width()?;
        if width > 64 {
            bail!("encoding width {width} exceeds 64 bits");
        }
        if self.coefficients.len() != self.units {
            bail!("{} coefficient lists for {} units", self.coefficients.len(), self.units);
        }
        self.coefficients
            .iter()
            .enumerate()
            .map(|(n, terms)| {
                terms
                    .iter()
                    .map(|term| {
                        let mut bits = 0u64;
                        for &p in &term.positions {
                            if p >= width {
                                bail!("unit {n}: position {p} outside width {width}");
                            }
                            bits |= 1 << p;
                        }
                        Ok((bits, term.theta))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a model file", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use netband_core::environment::{generate_graph, generate_model};

    #[test]
    fn round_trips_through_json() {
        let model = generate_model(generate_graph(5, 2, 1).unwrap(), 2, 2).unwrap();
        let file = ModelFile::from_model(&model);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        file.save(&path).unwrap();
        let back = ModelFile::load(&path).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.graph().unwrap(), *model.graph());
        for n in 0..5 {
            let mut a = back.term_bits().unwrap()[n].clone();
            let mut b = model.coefficient_bits(n);
            a.sort_by_key(|t| t.0);
            b.sort_by_key(|t| t.0);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_positions_outside_the_encoding() {
        let model = generate_model(generate_graph(3, 2, 1).unwrap(), 2, 2).unwrap();
        let mut file = ModelFile::from_model(&model);
        file.coefficients[0].push(Term { positions: vec![3], theta: 0.1 });
        assert!(file.term_bits().is_err());
    }
}
