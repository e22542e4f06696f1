use serde::{Deserialize, Serialize};

use crate::ca::Weighting;
use crate::cliques::CliqueCaps;
use crate::error::{Error, Result};
use crate::morpho::NormalizationPolicy;
use crate::relations::{FilterConfig, RelationMode};

/// Everything that shapes a build. Serialized verbatim into the resource
/// manifest, so a resource can be rebuilt from the same corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub mode: RelationMode,
    pub window_width: usize,
    pub filter: FilterConfig,
    pub normalization: NormalizationPolicy,
    pub edge_min: usize,
    pub min_freq: u64,
    pub caps: CliqueCaps,
    pub weighting: Weighting,
    /// Single-linkage cut, as a fraction of the map diameter.
    pub cluster_threshold: f64,
}

impl BuildConfig {
    pub fn for_mode(mode: RelationMode) -> Self {
        BuildConfig {
            mode,
            window_width: 50,
            filter: FilterConfig::for_mode(mode),
            normalization: NormalizationPolicy::default(),
            edge_min: 1,
            min_freq: 3,
            caps: CliqueCaps::default(),
            weighting: Weighting::Binary,
            cluster_threshold: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        if self.mode == RelationMode::Window && self.window_width < 2 {
            return Err(Error::Config("window width must be at least 2".into()));
        }
        if self.edge_min < 1 {
            return Err(Error::Config("edge_min must be at least 1".into()));
        }
        if self.caps.max_cliques == 0 || self.caps.max_clique_size < 2 {
            return Err(Error::Config("clique caps are too small".into()));
        }
        if !(self.cluster_threshold >= 0.0 && self.cluster_threshold <= 1.0) {
            return Err(Error::Config("cluster threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig::for_mode(RelationMode::Sentence)
    }
}
