use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;
use wellfilled::approximation::{EngineConfig, IndividualConfig};
use wellfilled::invariants::Pi1Config;

/// Everything that determines a run. Equal configs and inputs give
/// byte-identical reports; the config is echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; affects scheduling only, never the report.
    #[serde(skip)]
    pub jobs: usize,
    /// Equally spaced times checked along a homotopy.
    pub t_grid: usize,
    /// Random points per simplex in sampled checks.
    pub samples_per_simplex: usize,
    /// Cap on barycentric subdivisions.
    pub max_subdivision: usize,
    /// Samples of the density check.
    pub density_samples: usize,
    /// Doublings tried by the prism oracle of the injectivity leg.
    pub max_refinements: usize,
    /// Input files by role.
    pub inputs: BTreeMap<String, PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ind = IndividualConfig::default();
        RunConfig {
            seed: ind.seed,
            jobs: 1,
            t_grid: ind.t_grid,
            samples_per_simplex: ind.samples_per_simplex,
            max_subdivision: ind.engine.max_subdivision,
            density_samples: 200,
            max_refinements: Pi1Config::default().max_refinements,
            inputs: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn individual(&self) -> IndividualConfig {
        IndividualConfig {
            engine: EngineConfig {
                max_subdivision: self.max_subdivision,
            },
            t_grid: self.t_grid,
            samples_per_simplex: self.samples_per_simplex,
            seed: self.seed,
        }
    }

    pub fn pi1(&self) -> Pi1Config {
        Pi1Config {
            individual: self.individual(),
            max_refinements: self.max_refinements,
            ..Pi1Config::default()
        }
    }

    pub fn input(&mut self, role: &str, path: &std::path::Path) {
        self.inputs.insert(role.to_string(), path.to_path_buf());
    }
}
