//! Flat key-value experiment configuration: parsing with line-level errors,
//! defaults, validation, and a canonical serialization that downstream
//! hashing can rely on.

use crate::HarnessError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pipeline {
    Stable,
    Brownian,
    Exploration,
    Coupling,
    Heatkernel,
    Cutpoints,
    Kconstant,
}

impl Pipeline {
    fn parse(s: &str) -> Option<Pipeline> {
        Some(match s {
            "stable" => Pipeline::Stable,
            "brownian" => Pipeline::Brownian,
            "exploration" => Pipeline::Exploration,
            "coupling" => Pipeline::Coupling,
            "heatkernel" => Pipeline::Heatkernel,
            "cutpoints" => Pipeline::Cutpoints,
            "kconstant" => Pipeline::Kconstant,
            _ => return None,
        })
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Pipeline::Stable => "stable",
            Pipeline::Brownian => "brownian",
            Pipeline::Exploration => "exploration",
            Pipeline::Coupling => "coupling",
            Pipeline::Heatkernel => "heatkernel",
            Pipeline::Cutpoints => "cutpoints",
            Pipeline::Kconstant => "kconstant",
        };
        f.write_str(name)
    }
}

/// Named tolerances with their defaults; every tolerance a pipeline consults
/// must appear here so configs never silently invent one.
pub const TOLERANCE_DEFAULTS: &[(&str, f64)] = &[
    ("geom_ks", 0.02),
    ("ks", 0.05),
    ("kstar_rel", 0.15),
    ("slope_brownian", 0.05),
    ("slope_heat", 0.20),
    ("slope_stable", 0.15),
    ("success_rate", 0.9),
    ("symmetry", 1e-10),
    ("var_flatness", 0.10),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    pub d: usize,
    pub s: f64,
    pub beta: f64,
    pub l: i64,
    pub seed: u64,
    /// Walks per grid point (or trials, for the fixture pipelines).
    pub walks: u64,
    /// Independent environments / seeds for the ensemble pipelines.
    pub envs: u64,
    /// Long-edge threshold override for the exploration pipeline.
    pub rho: Option<u64>,
    /// Ball radius for local typing and heat-kernel truncation.
    pub radius: i64,
    /// Type-grid resolution J.
    pub bins: usize,
    pub out: String,
    pub n_grid: Vec<u64>,
    pub k_grid: Vec<u32>,
    pub s_sweep: Vec<f64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn tolerance(&self, name: &str) -> f64 {
        *self
            .tolerances
            .get(name)
            .unwrap_or_else(|| panic!("tolerance {name} has no default"))
    }

    pub fn params(&self) -> percolation_core::ModelParams {
        percolation_core::ModelParams::new(self.d, self.s, self.beta, self.l)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let p = self.params();
        p.validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.n_grid.is_empty() || self.k_grid.is_empty() || self.s_sweep.is_empty() {
            return Err(HarnessError::Config("grids must be nonempty".into()));
        }
        if self.n_grid.iter().any(|&n| n == 0) || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config(
                "n grid must be strictly increasing and positive".into(),
            ));
        }
        if self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("k grid must be strictly increasing".into()));
        }
        if self.s_sweep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("s sweep must be strictly increasing".into()));
        }
        if self.walks == 0 || self.envs == 0 {
            return Err(HarnessError::Config("walks and envs must be positive".into()));
        }
        if self.radius < 1 || self.bins == 0 {
            return Err(HarnessError::Config("radius and bins must be positive".into()));
        }
        Ok(())
    }

    /// Canonical key-value form: fixed key order, one key per line, lists
    /// space-separated. Hashes of a config are hashes of this string.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("pipeline: {}\n", self.pipeline));
        s.push_str(&format!("d: {}\n", self.d));
        s.push_str(&format!("s: {}\n", self.s));
        s.push_str(&format!("beta: {}\n", self.beta));
        s.push_str(&format!("L: {}\n", self.l));
        s.push_str(&format!("seed: {}\n", self.seed));
        s.push_str(&format!("walks: {}\n", self.walks));
        s.push_str(&format!("envs: {}\n", self.envs));
        if let Some(rho) = self.rho {
            s.push_str(&format!("rho: {rho}\n"));
        }
        s.push_str(&format!("radius: {}\n", self.radius));
        s.push_str(&format!("bins: {}\n", self.bins));
        s.push_str(&format!("out: {}\n", self.out));
        s.push_str("[grids]\n");
        s.push_str(&format!("n: {}\n", join(&self.n_grid)));
        s.push_str(&format!("k: {}\n", join(&self.k_grid)));
        s.push_str(&format!("s_sweep: {}\n", join(&self.s_sweep)));
        s.push_str("[tolerances]\n");
        for (k, v) in &self.tolerances {
            s.push_str(&format!("{k}: {v}\n"));
        }
        s
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_err(line_no: usize, msg: impl fmt::Display) -> HarnessError {
    HarnessError::Config(format!("line {line_no}: {msg}"))
}

fn parse_num<T: std::str::FromStr>(line_no: usize, key: &str, v: &str) -> Result<T, HarnessError> {
    v.parse()
        .map_err(|_| parse_err(line_no, format!("value {v:?} for key {key} has the wrong type")))
}

fn parse_list<T: std::str::FromStr>(
    line_no: usize,
    key: &str,
    v: &str,
) -> Result<Vec<T>, HarnessError> {
    v.split_whitespace()
        .map(|tok| parse_num(line_no, key, tok))
        .collect()
}

/// Parses the flat key-value document. `#` starts a comment, `[grids]` and
/// `[tolerances]` open sections, everything else is `key: value`. Unknown
/// keys and type mismatches are rejected with their line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut pipeline = None;
    let mut d = 1usize;
    let mut s_val = None;
    let mut beta = 1.0f64;
    let mut l = None;
    let mut seed = 0u64;
    let mut walks = 100u64;
    let mut envs = 20u64;
    let mut rho = None;
    let mut radius = 8i64;
    let mut bins = 4usize;
    let mut out = String::from("out");
    let mut n_grid: Vec<u64> = (8..=14).map(|e| 1u64 << e).collect();
    let mut k_grid: Vec<u32> = vec![8, 10, 12];
    let mut s_sweep: Vec<f64> = (12..=19).map(|i| i as f64 / 10.0).collect();
    let mut tolerances: BTreeMap<String, f64> =
        TOLERANCE_DEFAULTS.iter().map(|&(k, v)| (k.to_string(), v)).collect();

    #[derive(PartialEq)]
    enum Section {
        Top,
        Grids,
        Tolerances,
    }
    let mut section = Section::Top;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            section = match name {
                "grids" => Section::Grids,
                "tolerances" => Section::Tolerances,
                other => return Err(parse_err(line_no, format!("unknown section [{other}]"))),
            };
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| parse_err(line_no, "expected `key: value`"))?;
        let (key, value) = (key.trim(), value.trim());
        match section {
            Section::Top => match key {
                "pipeline" => {
                    pipeline = Some(Pipeline::parse(value).ok_or_else(|| {
                        parse_err(line_no, format!("unknown pipeline {value:?}"))
                    })?)
                }
                "d" => d = parse_num(line_no, key, value)?,
                "s" => s_val = Some(parse_num::<f64>(line_no, key, value)?),
                "beta" => beta = parse_num(line_no, key, value)?,
                "L" => l = Some(parse_num::<i64>(line_no, key, value)?),
                "seed" => seed = parse_num(line_no, key, value)?,
                "walks" => walks = parse_num(line_no, key, value)?,
                "envs" => envs = parse_num(line_no, key, value)?,
                "rho" => rho = Some(parse_num(line_no, key, value)?),
                "radius" => radius = parse_num(line_no, key, value)?,
                "bins" => bins = parse_num(line_no, key, value)?,
                "out" => out = value.to_string(),
                other => return Err(parse_err(line_no, format!("unknown key {other:?}"))),
            },
            Section::Grids => match key {
                "n" => n_grid = parse_list(line_no, key, value)?,
                "k" => k_grid = parse_list(line_no, key, value)?,
                "s_sweep" => s_sweep = parse_list(line_no, key, value)?,
                other => {
                    return Err(parse_err(line_no, format!("unknown grid key {other:?}")))
                }
            },
            Section::Tolerances => {
                if !tolerances.contains_key(key) {
                    return Err(parse_err(line_no, format!("unknown tolerance {key:?}")));
                }
                tolerances.insert(key.to_string(), parse_num(line_no, key, value)?);
            }
        }
    }

    let pipeline =
        pipeline.ok_or_else(|| HarnessError::Config("missing required key `pipeline`".into()))?;
    let s_val = s_val.ok_or_else(|| HarnessError::Config("missing required key `s`".into()))?;
    let l = l.ok_or_else(|| HarnessError::Config("missing required key `L`".into()))?;

    let config = ExperimentConfig {
        pipeline,
        d,
        s: s_val,
        beta,
        l,
        seed,
        walks,
        envs,
        rho,
        radius,
        bins,
        out,
        n_grid,
        k_grid,
        s_sweep,
        tolerances,
    };
    config.validate()?;
    Ok(config)
}
