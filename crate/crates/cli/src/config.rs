//! Resolved run configuration: CLI flags merged over an optional
//! `key = value` config file, with documented defaults.

use anyhow::{bail, Context, Result};
use cvclone_core::{InputSpec, ResourceFamily, Variant};

use crate::Shared;

/// How a run addresses the network.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    Symmetric(Variant),
    /// Asymmetric topology, measured with the irreversible scheme by
    /// default; `network` selects the scheme via --protocol instead.
    Asymmetric,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub protocol: Protocol,
    pub resource: ResourceFamily,
    pub input: InputSpec,
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
    pub epsilon: f64,
    pub taus: Option<Vec<f64>>,
    pub out: Option<String>,
    pub seed: u64,
}

fn parse_file(path: &str) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file `{path}`"))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {} is not `key = value`: `{line}`", lineno + 1);
        };
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Merges flags over the config file and applies defaults. The default r
/// range is [0, 1], matching the regime where the analysis is carried out.
pub fn resolve(mut shared: Shared) -> Result<Config> {
    if let Some(path) = &shared.config {
        for (key, value) in parse_file(path)? {
            match key.as_str() {
                "protocol" => drop(shared.protocol.get_or_insert(value)),
                "resource" => drop(shared.resource.get_or_insert(value)),
                "input" => drop(shared.input.get_or_insert(value)),
                "r-min" | "r_min" => drop(shared.r_min.get_or_insert(value.parse()?)),
                "r-max" | "r_max" => drop(shared.r_max.get_or_insert(value.parse()?)),
                "r-steps" | "r_steps" => drop(shared.r_steps.get_or_insert(value.parse()?)),
                "epsilon" => drop(shared.epsilon.get_or_insert(value.parse()?)),
                "taus" => drop(shared.taus.get_or_insert(value)),
                "out" => drop(shared.out.get_or_insert(value)),
                "seed" => drop(shared.seed.get_or_insert(value.parse()?)),
                "threads" => drop(shared.threads.get_or_insert(value.parse()?)),
                other => bail!("unknown config key `{other}`"),
            }
        }
    }
    crate::init_threads(shared.threads);

    let protocol = match shared.protocol.as_deref().unwrap_or("irreversible") {
        "asymmetric" | "asym" => Protocol::Asymmetric,
        text => Protocol::Symmetric(Variant::parse(text)?),
    };
    let resource = ResourceFamily::parse(shared.resource.as_deref().unwrap_or("tmsv"))?;
    let input = InputSpec::parse(shared.input.as_deref().unwrap_or("coherent"))?;
    let taus = shared
        .taus
        .as_deref()
        .map(|list| -> Result<Vec<f64>> {
            list.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .with_context(|| format!("bad transmissivity `{t}`"))
                })
                .collect()
        })
        .transpose()?;

    let r_min = shared.r_min.unwrap_or(0.0);
    let r_max = shared.r_max.unwrap_or(1.0);
    let r_steps = shared.r_steps.unwrap_or(101);
    if r_steps < 2 {
        bail!(cvclone_core::Error::InvalidArgument(
            "r-steps must be at least 2".into()
        ));
    }
    if r_min > r_max || r_min < 0.0 || r_min.is_nan() || r_max.is_nan() {
        bail!(cvclone_core::Error::InvalidArgument(format!(
            "invalid r range [{r_min}, {r_max}]"
        )));
    }
    let epsilon = shared.epsilon.unwrap_or(0.0);
    if epsilon < 0.0 {
        bail!(cvclone_core::Error::InvalidArgument(
            "epsilon must be ≥ 0".into()
        ));
    }

    Ok(Config {
        protocol,
        resource,
        input,
        r_min,
        r_max,
        r_steps,
        epsilon,
        taus,
        out: shared.out,
        seed: shared.seed.unwrap_or(1),
    })
}
