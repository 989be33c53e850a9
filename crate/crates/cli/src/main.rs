use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dronevrp::anneal::{simulated_annealing_with, SaConfig};
use dronevrp::cost::{BatteryPolicy, CostOptions, CostRecord};
use dronevrp::harness::{
    run_experiment, sweep, write_sweep_csv, ExperimentConfig, SweepParameter,
};
use dronevrp::milp::{
    build_model, export_lp, string_to_assignment, validate_assignment, MilpAssignment,
};
use dronevrp::oracle::enumerate_optimal_with;
use dronevrp::schedule::list_schedule_assignment;
use dronevrp::{cost_with, Objective, Params, Scenario, SolutionString};

#[derive(Parser)]
#[command(name = "dronevrp", version, about = "Multi-trip drone delivery planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random scenario as TOML.
    Generate(GenerateArgs),
    /// Anneal one scenario and print the best plan as JSON.
    Solve(SolveArgs),
    /// Repeated annealing over random instances; one CSV row per instance.
    Experiment(ExperimentArgs),
    /// Repeat an experiment for several values of one parameter.
    Sweep(SweepArgs),
    /// Exact optimum of a small scenario by enumeration.
    Oracle(OracleArgs),
    /// Write the MILP in CPLEX LP format.
    ExportLp(ExportLpArgs),
    /// Check a plan or MILP assignment against every MILP constraint.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinCost,
    MinTime,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MinCost => Objective::MinCost,
            ObjectiveArg::MinTime => Objective::MinTime,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ParameterArg {
    TimeLimit,
    Budget,
    Area,
    NLocations,
    BatteryWeight,
}

impl From<ParameterArg> for SweepParameter {
    fn from(p: ParameterArg) -> Self {
        match p {
            ParameterArg::TimeLimit => SweepParameter::TimeLimit,
            ParameterArg::Budget => SweepParameter::Budget,
            ParameterArg::Area => SweepParameter::Area,
            ParameterArg::NLocations => SweepParameter::NLocations,
            ParameterArg::BatteryWeight => SweepParameter::BatteryWeight,
        }
    }
}

/// Overrides for the scenario constants.
#[derive(Args, Default)]
struct ParamArgs {
    /// Budget in dollars.
    #[arg(long)]
    budget: Option<f64>,
    /// Delivery time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Price of one drone in dollars.
    #[arg(long)]
    drone_cost: Option<f64>,
    /// Maximum number of drones.
    #[arg(long)]
    max_drones: Option<u32>,
    /// Penalty constant.
    #[arg(long)]
    big_k: Option<f64>,
}

impl ParamArgs {
    fn apply(&self, p: &mut Params) {
        if let Some(v) = self.budget {
            p.budget = v;
        }
        if let Some(v) = self.time_limit {
            p.time_limit = v;
        }
        if let Some(v) = self.drone_cost {
            p.drone_cost = v;
        }
        if let Some(v) = self.max_drones {
            p.max_drones = v;
        }
        if let Some(v) = self.big_k {
            p.big_k = v;
        }
    }
}

#[derive(Args)]
struct AnnealArgs {
    #[arg(long, value_enum, default_value = "min-time")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 1.0)]
    initial_temperature: f64,
    #[arg(long, default_value_t = 0.001)]
    final_temperature: f64,
    #[arg(long, default_value_t = 0.99)]
    cooling: f64,
    #[arg(long, default_value_t = 1000)]
    rounds: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl AnnealArgs {
    fn config(&self) -> Result<SaConfig> {
        Ok(SaConfig::new(
            self.initial_temperature,
            self.final_temperature,
            self.cooling,
            self.rounds,
            self.objective.into(),
            self.seed,
        )?)
    }
}

#[derive(Args)]
struct ModeArgs {
    /// Give every route its own drone.
    #[arg(long)]
    reuse_disabled: bool,
    /// Carry a battery of this many kg on every route.
    #[arg(long, conflicts_with = "discrete_battery")]
    fixed_battery: Option<f64>,
    /// Pick batteries from the scenario's battery types.
    #[arg(long)]
    discrete_battery: bool,
}

impl ModeArgs {
    fn options(&self) -> Result<CostOptions> {
        let mut options = match self.fixed_battery {
            Some(w) => CostOptions::fixed_battery(w)?,
            None => CostOptions::default(),
        };
        if self.discrete_battery {
            options.battery = BatteryPolicy::Discrete;
        }
        options.reuse = !self.reuse_disabled;
        Ok(options)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 6)]
    locations: usize,
    /// Square area in km².
    #[arg(long, default_value_t = 0.25)]
    area: f64,
    #[arg(long, default_value_t = 0.5)]
    demand_min: f64,
    #[arg(long, default_value_t = 2.0)]
    demand_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: ParamArgs,
    /// Scenario file to write; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the distance matrix as CSV.
    #[arg(long)]
    distances: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    scenario: PathBuf,
    #[command(flatten)]
    anneal: AnnealArgs,
    #[command(flatten)]
    mode: ModeArgs,
    /// Write the per-phase annealing trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment configuration in TOML; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    locations: Option<usize>,
    #[arg(long)]
    area: Option<f64>,
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    #[arg(long)]
    cooling: Option<f64>,
    #[arg(long)]
    rounds: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reuse_disabled: bool,
    #[arg(long)]
    fixed_battery: Option<f64>,
    #[command(flatten)]
    params: ParamArgs,
    /// CSV output; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.instances {
            cfg.instances = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.locations {
            cfg.template.n_locations = v;
        }
        if let Some(v) = self.area {
            cfg.template.area_km2 = v;
        }
        if let Some(v) = self.objective {
            cfg.sa.objective = v.into();
        }
        if let Some(v) = self.cooling {
            cfg.sa.cooling_factor = v;
        }
        if let Some(v) = self.rounds {
            cfg.sa.rounds_per_phase = v;
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if self.reuse_disabled {
            cfg.reuse_disabled = true;
        }
        if self.fixed_battery.is_some() {
            cfg.fixed_battery_weight = self.fixed_battery;
        }
        self.params.apply(&mut cfg.template.params);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, value_enum)]
    parameter: ParameterArg,
    /// Comma-separated values, e.g. `600,1200,1800`.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
}

#[derive(Args)]
struct OracleArgs {
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "min-time")]
    objective: ObjectiveArg,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Args)]
struct ExportLpArgs {
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "min-time")]
    objective: ObjectiveArg,
    /// Use the scenario's battery types.
    #[arg(long)]
    discrete_battery: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "min-time")]
    objective: ObjectiveArg,
    /// Use the scenario's battery types.
    #[arg(long)]
    discrete_battery: bool,
    /// Plan such as "[0 1 2 0 3 0 0]"; routes are list scheduled.
    #[arg(long, conflicts_with = "assignment", required_unless_present = "assignment")]
    solution: Option<String>,
    /// JSON object mapping every variable name to its value.
    #[arg(long)]
    assignment: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(a) => {
            let mut params = Params::default();
            a.params.apply(&mut params);
            let scn = Scenario::generate_random(
                a.locations,
                a.area,
                (a.demand_min, a.demand_max),
                a.seed,
                params,
            )?;
            match &a.output {
                Some(p) => scn.save(p)?,
                None => print!("{}", scn.to_toml_string()),
            }
            if let Some(p) = &a.distances {
                scn.write_distance_csv(output(Some(p))?)?;
            }
        }
        Command::Solve(a) => {
            let scn = Scenario::load(&a.scenario)?;
            let out = simulated_annealing_with(&scn, &a.anneal.config()?, &a.mode.options()?)?;
            if let Some(p) = &a.trace {
                out.trace.write_csv(output(Some(p))?)?;
            }
            let record = CostRecord::new(&out.solution, &out.breakdown);
            println!("{}", serde_json::to_string_pretty(&record)?);
        }
        Command::Experiment(a) => {
            let cfg = a.config()?;
            let result = run_experiment(&cfg)?;
            result.write_csv(output(a.output.as_deref())?)?;
            let s = result.summary;
            eprintln!(
                "avg min {:.4}  avg mean {:.4}  avg std {:.4}  avg runtime {:.3}s",
                s.avg_min, s.avg_mean, s.avg_std, s.avg_runtime
            );
        }
        Command::Sweep(a) => {
            let cfg = a.experiment.config()?;
            let rows = sweep(&cfg, a.parameter.into(), &a.values)?;
            write_sweep_csv(&rows, output(a.experiment.output.as_deref())?)?;
        }
        Command::Oracle(a) => {
            let scn = Scenario::load(&a.scenario)?;
            let best = enumerate_optimal_with(&scn, a.objective.into(), &a.mode.options()?)?;
            let record = CostRecord::new(&best.solution, &best.breakdown);
            println!("{}", serde_json::to_string_pretty(&record)?);
        }
        Command::ExportLp(a) => {
            let scn = Scenario::load(&a.scenario)?;
            let types = a.discrete_battery.then(|| scn.battery_types());
            let model = build_model(&scn, a.objective.into(), types)?;
            export_lp(&model, &a.output)?;
        }
        Command::Validate(a) => return validate(a),
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(a: ValidateArgs) -> Result<ExitCode> {
    let scn = Scenario::load(&a.scenario)?;
    let objective: Objective = a.objective.into();
    let types = a.discrete_battery.then(|| scn.battery_types());
    let model = build_model(&scn, objective, types)?;
    let asn = match (&a.solution, &a.assignment) {
        (Some(text), _) => {
            let s: SolutionString = text.parse()?;
            let options = CostOptions {
                battery: if a.discrete_battery {
                    BatteryPolicy::Discrete
                } else {
                    BatteryPolicy::PerRoute
                },
                ..CostOptions::default()
            };
            let b = cost_with(&s, objective, &scn, &options)?;
            if b.penalized {
                bail!("plan violates the cost function's constraints: {:?}", b.violations);
            }
            let timing = dronevrp::cost::route_times(&s, &scn);
            let schedule = list_schedule_assignment(&timing.pairs, b.drone_count);
            string_to_assignment(&model, &s, &schedule.drone_of_route, &scn)?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            MilpAssignment {
                values: serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?,
            }
        }
        (None, None) => bail!("pass --solution or --assignment"),
    };
    let violations = validate_assignment(&model, &asn, a.tolerance)?;
    for v in &violations {
        println!("{v}");
    }
    if violations.is_empty() {
        println!("feasible; objective {}", model.objective_value(&asn)?);
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} violated constraints", violations.len());
        Ok(ExitCode::from(2))
    }
}
