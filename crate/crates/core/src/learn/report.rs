use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;

/// Outcome of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// `"qgan"`, `"direct"` or `"classify"`.
    pub task: String,
    pub spec: AnsatzSpec,
    pub seed: u64,
    pub epochs: usize,
    /// Mean training loss per epoch.
    pub losses: Vec<f64>,
    /// Hellinger distance (distribution tasks) or test accuracy (classification).
    pub final_metric: f64,
    pub wall_time_s: f64,
    /// The task metric after each epoch.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metric_trace: Vec<f64>,
}
