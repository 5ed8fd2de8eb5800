use std::path::Path;

use serde::{Deserialize, Serialize};

use flatsurf::developing::Limits;

/// Knobs shared by every subcommand. Precedence: command-line flag, then
/// `FLATSURF_CHART_CAP` (chart cap only), then the config file, then defaults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    /// Maximum number of developed charts per unfolding.
    pub chart_cap: usize,
    /// Dyadic grid depth of the generalized immersion radius.
    pub grid_depth: u32,
    /// Emit JSON instead of text.
    pub json: bool,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            chart_cap: Limits::default().chart_cap,
            grid_depth: 6,
            json: false,
        }
    }
}

impl CliConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("bad config: {e}"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain struct")
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn limits(&self) -> Limits {
        Limits {
            chart_cap: self.chart_cap,
        }
    }
}
