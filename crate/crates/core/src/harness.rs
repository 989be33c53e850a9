//! Repeated annealing over random instances, with statistics and sweeps.
//!
//! Seeds are derived from a single master seed so that every table is
//! reproducible and independent of how runs are spread over threads:
//!
//! * instance `i` is generated with `derive_seed(master, i, 0)`;
//! * run `r` on instance `i` anneals with `derive_seed(master, i, r + 1)`.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{simulated_annealing_with, SaConfig};
use crate::cost::CostOptions;
use crate::error::{Error, Result};
use crate::scenario::{Params, Scenario};

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `stream` of `instance`: stream 0 generates the instance, stream
/// `r + 1` drives annealing run `r`.
pub fn derive_seed(master: u64, instance: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ instance) ^ stream)
}

/// How random instances are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioTemplate {
    pub n_locations: usize,
    pub area_km2: f64,
    /// Demand range in kg.
    pub demand_range: (f64, f64),
    pub params: Params,
}

impl Default for ScenarioTemplate {
    fn default() -> Self {
        Self {
            n_locations: 6,
            area_km2: 0.25,
            demand_range: (0.5, 2.0),
            params: Params::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub template: ScenarioTemplate,
    pub instances: usize,
    pub runs: usize,
    /// Annealing schedule; its seed is replaced per run.
    pub sa: SaConfig,
    /// Every route gets its own drone.
    pub reuse_disabled: bool,
    /// Same battery weight in kg on every route instead of per-route sizing.
    pub fixed_battery_weight: Option<f64>,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            template: ScenarioTemplate::default(),
            instances: 50,
            runs: 20,
            sa: SaConfig::default(),
            reuse_disabled: false,
            fixed_battery_weight: None,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.instances < 1 || self.runs < 1 {
            return Err(Error::InvalidConfig(format!(
                "need at least one instance and one run, got {} and {}",
                self.instances, self.runs
            )));
        }
        self.sa.validate()?;
        self.cost_options()?;
        self.instance(0).map(|_| ())
    }

    pub fn cost_options(&self) -> Result<CostOptions> {
        let mut options = match self.fixed_battery_weight {
            Some(weight) => CostOptions::fixed_battery(weight)?,
            None => CostOptions::default(),
        };
        options.reuse = !self.reuse_disabled;
        Ok(options)
    }

    /// The `index`-th random instance.
    pub fn instance(&self, index: usize) -> Result<Scenario> {
        let t = &self.template;
        Scenario::generate_random(
            t.n_locations,
            t.area_km2,
            t.demand_range,
            derive_seed(self.master_seed, index as u64, 0),
            t.params,
        )
    }

    pub fn run_seed(&self, instance: usize, run: usize) -> u64 {
        derive_seed(self.master_seed, instance as u64, run as u64 + 1)
    }
}

/// Statistics of the annealing runs on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: usize,
    pub min: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Seconds.
    pub mean_runtime: f64,
    /// Runs whose final solution still carried a penalty.
    pub penalized_runs: usize,
}

/// Averages of the per-instance statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub avg_min: f64,
    pub avg_mean: f64,
    pub avg_std: f64,
    pub avg_runtime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-instance statistics from `objectives[instance][run]`, then averaged.
pub fn aggregate(objectives: &[Vec<f64>], runtimes: &[Vec<f64>], penalized: &[usize]) -> ExperimentResult {
    let rows: Vec<ResultRow> = objectives
        .iter()
        .enumerate()
        .map(|(i, runs)| {
            let (mean, std) = mean_std(runs);
            ResultRow {
                instance: i,
                min: runs.iter().copied().fold(f64::INFINITY, f64::min),
                mean,
                std,
                mean_runtime: mean_std(&runtimes[i]).0,
                penalized_runs: penalized[i],
            }
        })
        .collect();
    let avg = |f: fn(&ResultRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let summary = Summary {
        avg_min: avg(|r| r.min),
        avg_mean: avg(|r| r.mean),
        avg_std: avg(|r| r.std),
        avg_runtime: avg(|r| r.mean_runtime),
    };
    ExperimentResult { rows, summary }
}

/// Anneals every instance `cfg.runs` times and tabulates the objective.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let options = cfg.cost_options()?;
    let scenarios = (0..cfg.instances)
        .map(|i| cfg.instance(i))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.instances)
        .flat_map(|i| (0..cfg.runs).map(move |r| (i, r)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(i, r)| {
            let sa = cfg.sa.with_seed(cfg.run_seed(i, r));
            let started = Instant::now();
            let out = simulated_annealing_with(&scenarios[i], &sa, &options)?;
            let elapsed = started.elapsed().as_secs_f64();
            Ok((out.breakdown.objective(sa.objective), elapsed, out.breakdown.penalized))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut objectives = vec![Vec::with_capacity(cfg.runs); cfg.instances];
    let mut runtimes = vec![Vec::with_capacity(cfg.runs); cfg.instances];
    let mut penalized = vec![0; cfg.instances];
    for (&(i, _), &(obj, secs, pen)) in jobs.iter().zip(&outcomes) {
        objectives[i].push(obj);
        runtimes[i].push(secs);
        penalized[i] += usize::from(pen);
    }
    Ok(aggregate(&objectives, &runtimes, &penalized))
}

/// Experiment parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    /// Delivery time limit in seconds.
    TimeLimit,
    Budget,
    /// Area in km².
    Area,
    NLocations,
    /// Fixed battery weight in kg on every route.
    BatteryWeight,
}

impl SweepParameter {
    pub fn apply(self, cfg: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut out = cfg.clone();
        match self {
            SweepParameter::TimeLimit => out.template.params.time_limit = value,
            SweepParameter::Budget => out.template.params.budget = value,
            SweepParameter::Area => out.template.area_km2 = value,
            SweepParameter::NLocations => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "location count must be a positive integer, got {value}"
                    )));
                }
                out.template.n_locations = value as usize;
            }
            SweepParameter::BatteryWeight => out.fixed_battery_weight = Some(value),
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub avg_min: f64,
    pub avg_mean: f64,
    pub avg_std: f64,
    pub avg_runtime: f64,
}

/// One experiment per value of `parameter`; instance seeds are shared across
/// values.
pub fn sweep(cfg: &ExperimentConfig, parameter: SweepParameter, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| parameter.apply(cfg, v))
        .collect::<Result<Vec<_>>>()?;
    for c in &configs {
        c.validate()?;
    }
    values
        .iter()
        .zip(&configs)
        .map(|(&value, c)| {
            let s = run_experiment(c)?.summary;
            Ok(SweepRow {
                value,
                avg_min: s.avg_min,
                avg_mean: s.avg_mean,
                avg_std: s.avg_std,
                avg_runtime: s.avg_runtime,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// `(x - x') / x'` as a percentage.
pub fn percent_improvement(x: f64, x_prime: f64) -> Result<f64> {
    if x_prime == 0.0 {
        return Err(Error::Domain("percent improvement over a zero baseline".into()));
    }
    Ok((x - x_prime) / x_prime * 100.0)
}
