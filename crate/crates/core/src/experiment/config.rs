use serde::{Deserialize, Serialize};

use crate::altmin::{AltMinConfig, Tolerance};
use crate::array::AngleGrid;
use crate::{Error, Result};

/// Monte Carlo experiment description. Field names double as the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_streams: usize,
    pub n_rf: usize,
    pub n_paths: usize,
    pub target_angles_deg: Vec<f64>,
    /// Defaults to `n_rx` when absent.
    pub total_power: Option<f64>,
    pub eta_values: Vec<f64>,
    pub snr_db_values: Vec<f64>,
    pub num_trials: usize,
    pub base_seed: u64,
    /// Relative stop tolerance: `epsilon = tolerance * (1 + f^(0))`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub beampattern_grid_deg: AngleGrid,
    /// Average the waveform covariance over `num_trials` channel draws
    /// instead of using a single run.
    pub average_beampattern: bool,
}

/// `0.40, 0.45, ..., 1.00`.
pub fn default_eta_grid() -> Vec<f64> {
    (0..=12).map(|i| (40 + 5 * i) as f64 / 100.0).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_tx: 120,
            n_rx: 6,
            n_streams: 6,
            n_rf: 24,
            n_paths: 10,
            target_angles_deg: vec![-30.0, 0.0, 30.0],
            total_power: None,
            eta_values: default_eta_grid(),
            snr_db_values: vec![-10.0, -5.0, 0.0, 5.0, 10.0],
            num_trials: 100,
            base_seed: 0,
            tolerance: 1e-5,
            max_iterations: 100,
            beampattern_grid_deg: AngleGrid::default(),
            average_beampattern: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn effective_total_power(&self) -> f64 {
        self.total_power.unwrap_or(self.n_rx as f64)
    }

    pub fn num_targets(&self) -> usize {
        self.target_angles_deg.len()
    }

    /// Trial `t` uses seed `base_seed + t` for both the channel draw and the
    /// optimizer start (on separate random streams).
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    pub fn altmin_config(&self, eta: f64, seed: u64) -> AltMinConfig {
        AltMinConfig {
            eta,
            total_power: self.effective_total_power(),
            tolerance: Tolerance::Relative(self.tolerance),
            max_iterations: self.max_iterations,
            rng_seed: seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_tx", self.n_tx),
            ("n_rx", self.n_rx),
            ("n_streams", self.n_streams),
            ("n_rf", self.n_rf),
            ("n_paths", self.n_paths),
            ("num_trials", self.num_trials),
            ("max_iterations", self.max_iterations),
        ] {
            if v == 0 {
                return Err(Error::config(name, "must be positive"));
            }
        }
        if self.target_angles_deg.is_empty() {
            return Err(Error::config("target_angles_deg", "needs at least one target"));
        }
        if let Some(a) = self
            .target_angles_deg
            .iter()
            .find(|a| !(a.is_finite() && a.abs() <= 90.0))
        {
            return Err(Error::config("target_angles_deg", format!("{a} outside [-90, 90]")));
        }
        if self.n_tx % self.n_rf != 0 {
            return Err(Error::config(
                "n_rf",
                format!("n_tx = {} is not divisible by n_rf = {}", self.n_tx, self.n_rf),
            ));
        }
        if self.n_tx % self.num_targets() != 0 {
            return Err(Error::config(
                "target_angles_deg",
                format!(
                    "n_tx = {} is not divisible by {} targets",
                    self.n_tx,
                    self.num_targets()
                ),
            ));
        }
        if self.n_streams > self.n_tx.min(self.n_rx) {
            return Err(Error::config(
                "n_streams",
                format!("{} exceeds min(n_tx, n_rx)", self.n_streams),
            ));
        }
        if self.n_streams < self.num_targets() {
            return Err(Error::config(
                "n_streams",
                format!("{} streams cannot cover {} targets", self.n_streams, self.num_targets()),
            ));
        }
        if self.eta_values.is_empty() {
            return Err(Error::config("eta_values", "must not be empty"));
        }
        if let Some(e) = self.eta_values.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::config("eta_values", format!("{e} outside [0, 1]")));
        }
        if self.snr_db_values.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("snr_db_values", "must be finite"));
        }
        let p = self.effective_total_power();
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::config("total_power", format!("must be positive, got {p}")));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::config("tolerance", "must be positive"));
        }
        self.beampattern_grid_deg
            .validate()
            .map_err(|e| Error::config("beampattern_grid_deg", e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_paper_setup() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.effective_total_power(), 6.0);
        assert_eq!(c.eta_values.len(), 13);
        assert_eq!(c.eta_values[0], 0.4);
        assert_eq!(c.eta_values[12], 1.0);
        assert_eq!(c.eta_values[11], 0.95);
    }

    #[test]
    fn json_round_trip() {
        let mut c = ExperimentConfig::default();
        c.total_power = Some(3.25);
        c.snr_db_values = vec![0.1, -7.3];
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_json_takes_defaults() {
        let c = ExperimentConfig::from_json(r#"{"n_tx": 12, "n_rf": 4}"#).unwrap();
        assert_eq!(c.n_tx, 12);
        assert_eq!(c.n_rx, 6);
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"n_txx": 12}"#).is_err());
    }

    #[test]
    fn validation_names_field() {
        let c = ExperimentConfig {
            n_rf: 7,
            ..Default::default()
        };
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "n_rf"),
            other => panic!("unexpected {other:?}"),
        }
        let c = ExperimentConfig {
            eta_values: vec![0.5, 1.5],
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "eta_values"));
        let c = ExperimentConfig {
            target_angles_deg: vec![0.0; 7],
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
