use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub samples: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            level: 0.95,
            seed: 0,
        }
    }
}

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap interval for accuracy over per-item outcomes.
///
/// Each resample draws `n` items with replacement. The interval is widened
/// if needed so that it always contains the point estimate.
pub fn bootstrap_ci(correct: &[bool], cfg: &BootstrapConfig) -> Result<(f64, f64)> {
    if correct.is_empty() {
        return Err(Error::Config("bootstrap over an empty test set".into()));
    }
    if cfg.samples == 0 || !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::Config(format!(
            "bootstrap needs samples >= 1 and level in (0, 1), got {} and {}",
            cfg.samples, cfg.level
        )));
    }
    let n = correct.len();
    let point = correct.iter().filter(|&&c| c).count() as f64 / n as f64;
    let mut rng = seed::rng(cfg.seed);
    let mut stats: Vec<f64> = (0..cfg.samples)
        .map(|_| {
            let hits = (0..n).filter(|_| correct[rng.gen_range(0..n)]).count();
            hits as f64 / n as f64
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let tail = (1.0 - cfg.level) / 2.0;
    let low = quantile_sorted(&stats, tail).min(point);
    let high = quantile_sorted(&stats, 1.0 - tail).max(point);
    Ok((low, high))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_correct_is_degenerate() {
        assert_eq!(bootstrap_ci(&[true; 50], &BootstrapConfig::default()).unwrap(), (1.0, 1.0));
        assert_eq!(bootstrap_ci(&[false; 5], &BootstrapConfig::default()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile_sorted(&s, 0.0), 0.0);
        assert_eq!(quantile_sorted(&s, 0.5), 1.5);
        assert_eq!(quantile_sorted(&s, 1.0), 3.0);
    }

    #[test]
    fn deterministic_and_validated() {
        let data: Vec<bool> = (0..200).map(|i| i % 3 != 0).collect();
        let cfg = BootstrapConfig { seed: 9, ..Default::default() };
        assert_eq!(bootstrap_ci(&data, &cfg).unwrap(), bootstrap_ci(&data, &cfg).unwrap());
        assert!(bootstrap_ci(&[], &cfg).is_err());
        assert!(bootstrap_ci(&data, &BootstrapConfig { samples: 0, ..cfg.clone() }).is_err());
        assert!(bootstrap_ci(&data, &BootstrapConfig { level: 1.0, ..cfg }).is_err());
    }
}
