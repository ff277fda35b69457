//! Experiment parameters: per-experiment defaults, overridden by a TOML
//! config file, overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub tol: BTreeMap<String, f64>,
}

macro_rules! overlay {
    ($self:ident, $other:ident; $($f:ident),*) => {
        $( if $other.$f.is_some() { $self.$f = $other.$f.clone(); } )*
    };
}

impl Params {
    /// Fields set in `other` replace those of `self`.
    pub fn overlay(mut self, other: &Params) -> Params {
        overlay!(self, other; t, samples, seed, lambda, chi, range, resolution, radius, m, weight, h);
        for (k, v) in &other.tol {
            self.tol.insert(k.clone(), *v);
        }
        self
    }

    pub fn from_toml_file(path: &Path) -> anyhow::Result<Params> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        for (k, v) in &self.tol {
            if !(*v > 0.0) {
                bail!("tolerance {k} must be positive, got {v}");
            }
        }
        Ok(())
    }

    pub fn t(&self) -> &[f64] {
        self.t.as_deref().unwrap_or(&[])
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(1)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn f(&self, v: Option<f64>, what: &str) -> anyhow::Result<f64> {
        v.with_context(|| format!("missing parameter {what}"))
    }
}

/// Parses `1,0.5,0.25`; entries may also be written as `2^-k`.
pub fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            if let Some(exp) = item.strip_prefix("2^") {
                let k: i32 = exp
                    .parse()
                    .with_context(|| format!("bad exponent in {item}"))?;
                Ok(2f64.powi(k))
            } else {
                item.parse::<f64>()
                    .with_context(|| format!("bad number {item}"))
            }
        })
        .collect()
}

/// Parses `name=value` tolerance overrides.
pub fn parse_tol(s: &str) -> anyhow::Result<(String, f64)> {
    let (k, v) = s.split_once('=').context("tolerance must be name=value")?;
    Ok((
        k.trim().to_string(),
        v.trim().parse().context("tolerance value")?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_config() {
        let defaults = Params {
            samples: Some(200),
            seed: Some(1),
            ..Default::default()
        };
        let config: Params =
            toml::from_str("samples = 50\nseed = 9\n[tol]\norder = 0.2\n").unwrap();
        let flags = Params {
            seed: Some(3),
            ..Default::default()
        };
        let p = defaults.overlay(&config).overlay(&flags);
        assert_eq!(p.samples, Some(50));
        assert_eq!(p.seed, Some(3));
        assert_eq!(p.tol["order"], 0.2);
        assert!(toml::from_str::<Params>("bogus = 1").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("1, 0.5,2^-2").unwrap(), vec![1.0, 0.5, 0.25]);
        assert!(parse_list("a").is_err());
        assert_eq!(
            parse_tol("final = 1e-3").unwrap(),
            ("final".to_string(), 1e-3)
        );
    }
}
