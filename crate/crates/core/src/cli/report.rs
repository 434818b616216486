use serde::{Deserialize, Serialize};

/// Evaluation report, written as TOML in field order.
///
/// `false_safe_rate` is the fraction of truly unsafe nodes (`truth <= 0`)
/// predicted safe (`pred > 0`); `sign_mismatch_rate` counts nodes where
/// `pred > 0` and `truth > 0` disagree. Both are pooled over all samples.
/// Times are per-sample means in seconds; `mean_solve_seconds` is present
/// only when ground truth was re-solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: String,
    pub dataset: String,
    pub samples: usize,
    pub resolution: Vec<usize>,
    pub resolution_scale: usize,
    pub mean_rel_l2: f64,
    pub max_rel_l2: f64,
    pub sign_mismatch_rate: f64,
    pub false_safe_rate: f64,
    pub mean_inference_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_solve_seconds: Option<f64>,
    pub per_sample_rel_l2: Vec<f64>,
}

impl Report {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report fields are TOML-representable")
    }

    pub fn from_toml(s: &str) -> Result<Self, String> {
        toml::from_str(s).map_err(|e| e.to_string())
    }
}

/// Node counts behind the sign statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignCounts {
    pub nodes: usize,
    pub mismatched: usize,
    pub unsafe_nodes: usize,
    pub false_safe: usize,
}

impl SignCounts {
    pub fn add(&mut self, pred: &[f64], truth: &[f64]) {
        for (&p, &t) in pred.iter().zip(truth) {
            self.nodes += 1;
            if (p > 0.0) != (t > 0.0) {
                self.mismatched += 1;
            }
            if t <= 0.0 {
                self.unsafe_nodes += 1;
                if p > 0.0 {
                    self.false_safe += 1;
                }
            }
        }
    }

    pub fn mismatch_rate(&self) -> f64 {
        ratio(self.mismatched, self.nodes)
    }

    pub fn false_safe_rate(&self) -> f64 {
        ratio(self.false_safe, self.unsafe_nodes)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}
