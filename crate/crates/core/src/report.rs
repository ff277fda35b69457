//! Convergence reports and the log-log order fit.

use std::collections::BTreeMap;

use crate::{Error, Result};

/// Errors at or below this value are treated as converged to roundoff.
pub const ERROR_FLOOR: f64 = 10.0 * f64::EPSILON;

/// Least-squares slope of `log(error)` against `log(t)`.
///
/// Points whose error is at or below [`ERROR_FLOOR`] are ignored; when fewer
/// than two points remain the errors have reached roundoff and the order is
/// reported as `f64::INFINITY`.
pub fn fit_order(t_values: &[f64], errors: &[f64]) -> Result<f64> {
    if t_values.len() != errors.len() {
        return Err(Error::Contract(
            "t values and errors differ in length".into(),
        ));
    }
    if t_values.len() < 3 {
        return Err(Error::Contract("order fit needs at least 3 points".into()));
    }
    if t_values.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Contract("order fit needs positive t values".into()));
    }
    if errors.iter().any(|e| e.is_nan() || *e < 0.0) {
        return Err(Error::Contract("errors must be non-negative".into()));
    }
    let pts: Vec<(f64, f64)> = t_values
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > ERROR_FLOOR)
        .map(|(t, e)| (t.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Ok(f64::INFINITY);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Contract("order fit needs distinct t values".into()));
    }
    Ok(sxy / sxx)
}

/// True when every entry is strictly smaller than its predecessor.
pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Checks that a ladder of scales is strictly decreasing inside `(0, 1]`.
pub fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::Contract("t ladder is empty".into()));
    }
    if ladder.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::Contract("t ladder values must lie in (0, 1]".into()));
    }
    if !strictly_decreasing(ladder) {
        return Err(Error::Contract(
            "t ladder must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// `2^-lo, ..., 2^-hi`.
pub fn dyadic_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(-k)).collect()
}

/// Per-metric error sequences along a ladder of scales.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub t_values: Vec<f64>,
    pub errors: BTreeMap<String, Vec<f64>>,
    pub fitted_order: BTreeMap<String, f64>,
    pub passed: bool,
}

impl ConvergenceReport {
    pub fn new(t_values: Vec<f64>) -> Self {
        Self {
            t_values,
            ..Default::default()
        }
    }

    /// Adds a metric; its order is fitted when the ladder has at least 3 points.
    pub fn insert(&mut self, name: &str, errors: Vec<f64>) -> Result<()> {
        if errors.len() != self.t_values.len() {
            return Err(Error::Contract(format!(
                "metric {name} has the wrong length"
            )));
        }
        if self.t_values.len() >= 3 {
            let order = fit_order(&self.t_values, &errors)?;
            self.fitted_order.insert(name.to_string(), order);
        }
        self.errors.insert(name.to_string(), errors);
        Ok(())
    }

    pub fn metric(&self, name: &str) -> &[f64] {
        self.errors.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn order(&self, name: &str) -> f64 {
        self.fitted_order.get(name).copied().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_orders() {
        let t = dyadic_ladder(1, 8);
        let e1: Vec<f64> = t.iter().map(|t| 3.0 * t).collect();
        assert!((fit_order(&t, &e1).unwrap() - 1.0).abs() < 0.01);
        let e2: Vec<f64> = t.iter().map(|t| 0.5 * t * t).collect();
        assert!((fit_order(&t, &e2).unwrap() - 2.0).abs() < 0.01);
        let e0 = vec![1e-16; t.len()];
        assert_eq!(fit_order(&t, &e0).unwrap(), f64::INFINITY);
        assert_eq!(fit_order(&t, &vec![0.0; t.len()]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn floor_points_are_ignored() {
        let t = dyadic_ladder(1, 6);
        let mut e: Vec<f64> = t.iter().map(|t| t * t).collect();
        e[5] = 0.0;
        assert!((fit_order(&t, &e).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fit_preconditions() {
        assert!(fit_order(&[1.0, 0.5], &[1.0, 0.5]).is_err());
        assert!(fit_order(&[1.0, 0.5, 0.0], &[1.0, 0.5, 0.1]).is_err());
        assert!(validate_ladder(&[]).is_err());
        assert!(validate_ladder(&[0.5, 0.5, 0.25]).is_err());
        assert!(validate_ladder(&[1.5, 0.5]).is_err());
        assert!(validate_ladder(&[1.0, 0.5, 0.25]).is_ok());
    }
}
