//! `key = value` tracker configuration files. Missing keys keep their
//! defaults; unknown keys are rejected.

use std::path::Path;
use std::str::FromStr;

use bagtrack_core::{Resampling, TrackerConfig};

use crate::error::{Error, Result};

/// Recognised keys, in the order [`format_config`] writes them.
pub const KEYS: &[&str] = &[
    "N",
    "n",
    "P",
    "K",
    "W",
    "alpha",
    "sigma",
    "H1",
    "H2",
    "var_x",
    "var_y",
    "var_s",
    "s_min",
    "s_max",
    "seed",
    "center_before_svd",
    "resampling",
];

pub fn load_config(path: &Path) -> Result<TrackerConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

pub fn parse_config(text: &str, origin: &Path) -> Result<TrackerConfig> {
    let mut cfg = TrackerConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(origin, i + 1, "expected `key = value`"));
        };
        set_key(&mut cfg, key.trim(), value.trim())?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

/// Validates and maps core errors onto the offending key.
pub fn validate(cfg: &TrackerConfig) -> Result<()> {
    cfg.validate().map_err(|e| match e {
        bagtrack_core::Error::InvalidConfig { key, reason } => Error::Config {
            key: key.to_owned(),
            message: reason,
        },
        other => Error::Core(other),
    })
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        key: key.to_owned(),
        message: format!("cannot parse `{value}`"),
    })
}

/// Sets one key on `cfg` without validating the whole config.
pub fn set_key(cfg: &mut TrackerConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "N" => cfg.particles = parse_value(key, value)?,
        "n" => cfg.subspace_dim = parse_value(key, value)?,
        "P" => cfg.history_len = parse_value(key, value)?,
        "K" => cfg.bag_size = parse_value(key, value)?,
        "W" => cfg.update_period = parse_value(key, value)?,
        "alpha" => cfg.alpha = parse_value(key, value)?,
        "sigma" => cfg.sigma = parse_value(key, value)?,
        "H1" => cfg.patch_h = parse_value(key, value)?,
        "H2" => cfg.patch_w = parse_value(key, value)?,
        "var_x" => cfg.motion.var_x = parse_value(key, value)?,
        "var_y" => cfg.motion.var_y = parse_value(key, value)?,
        "var_s" => cfg.motion.var_s = parse_value(key, value)?,
        "s_min" => cfg.s_min = parse_value(key, value)?,
        "s_max" => cfg.s_max = parse_value(key, value)?,
        "seed" => cfg.seed = parse_value(key, value)?,
        "center_before_svd" => cfg.center_before_svd = parse_value(key, value)?,
        "resampling" => {
            cfg.resampling = match value {
                "multinomial" => Resampling::Multinomial,
                "systematic" => Resampling::Systematic,
                _ => {
                    return Err(Error::Config {
                        key: key.to_owned(),
                        message: format!("unknown scheme `{value}`"),
                    })
                }
            }
        }
        _ => {
            return Err(Error::Config {
                key: key.to_owned(),
                message: "unknown key".to_owned(),
            })
        }
    }
    Ok(())
}

/// Canonical `key=value` pairs for every key.
pub fn config_pairs(cfg: &TrackerConfig) -> Vec<(&'static str, String)> {
    let resampling = match cfg.resampling {
        Resampling::Multinomial => "multinomial",
        Resampling::Systematic => "systematic",
    };
    vec![
        ("N", cfg.particles.to_string()),
        ("n", cfg.subspace_dim.to_string()),
        ("P", cfg.history_len.to_string()),
        ("K", cfg.bag_size.to_string()),
        ("W", cfg.update_period.to_string()),
        ("alpha", cfg.alpha.to_string()),
        ("sigma", cfg.sigma.to_string()),
        ("H1", cfg.patch_h.to_string()),
        ("H2", cfg.patch_w.to_string()),
        ("var_x", cfg.motion.var_x.to_string()),
        ("var_y", cfg.motion.var_y.to_string()),
        ("var_s", cfg.motion.var_s.to_string()),
        ("s_min", cfg.s_min.to_string()),
        ("s_max", cfg.s_max.to_string()),
        ("seed", cfg.seed.to_string()),
        ("center_before_svd", cfg.center_before_svd.to_string()),
        ("resampling", resampling.to_owned()),
    ]
}

/// Config file text that [`parse_config`] reads back to `cfg`.
pub fn format_config(cfg: &TrackerConfig) -> String {
    config_pairs(cfg)
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}
