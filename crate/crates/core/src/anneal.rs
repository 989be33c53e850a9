//! Simulated annealing over solution strings.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{CostBreakdown, CostOptions, Evaluator, Objective};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::solution::SolutionString;

/// Annealing schedule and search objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub initial_temperature: f64,
    pub final_temperature: f64,
    /// Temperature multiplier applied at the start of each phase.
    pub cooling_factor: f64,
    /// Neighbour proposals per temperature.
    pub rounds_per_phase: u32,
    pub objective: Objective,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            final_temperature: 0.001,
            cooling_factor: 0.99,
            rounds_per_phase: 1000,
            objective: Objective::MinTime,
            seed: 0,
        }
    }
}

impl SaConfig {
    pub fn new(
        initial_temperature: f64,
        final_temperature: f64,
        cooling_factor: f64,
        rounds_per_phase: u32,
        objective: Objective,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            initial_temperature,
            final_temperature,
            cooling_factor,
            rounds_per_phase,
            objective,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling_factor
            )));
        }
        if !(self.final_temperature > 0.0
            && self.final_temperature < self.initial_temperature
            && self.initial_temperature.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "temperatures must satisfy 0 < final < initial, got {} and {}",
                self.final_temperature, self.initial_temperature
            )));
        }
        if self.rounds_per_phase == 0 {
            return Err(Error::InvalidConfig("rounds per phase must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of cooling phases, `ceil(ln(final / initial) / ln(mu))`.
    pub fn phase_count(&self) -> usize {
        ((self.final_temperature / self.initial_temperature).ln() / self.cooling_factor.ln()).ceil()
            as usize
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaPhase {
    pub phase: usize,
    pub temperature: f64,
    /// Best objective seen up to the end of this phase.
    pub best_objective: f64,
    /// Objective of the incumbent at the end of this phase.
    pub current_objective: f64,
    pub accepted: u32,
}

/// Per-phase record of one annealing run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SaTrace {
    pub phases: Vec<SaPhase>,
}

impl SaTrace {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.phases {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaOutcome {
    pub solution: SolutionString,
    pub breakdown: CostBreakdown,
    pub trace: SaTrace,
}

/// Neighbourhood moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExchangeRule {
    /// Exchange the elements at `i` and `j`.
    Swap,
    /// Remove the element at `i` and reinsert it at `j`.
    Relocate,
    /// Reverse the elements between `i` and `j` inclusive.
    TwoOpt,
}

impl ExchangeRule {
    pub const ALL: [ExchangeRule; 3] = [Self::Swap, Self::Relocate, Self::TwoOpt];
}

/// Random string: the locations and `n - 1` interior zeros in uniformly
/// shuffled order, framed by the two depot zeros.
pub fn random_solution<R: Rng + ?Sized>(n_locations: usize, rng: &mut R) -> Result<SolutionString> {
    if n_locations == 0 {
        return Err(Error::Domain("a solution needs at least one location".into()));
    }
    let mut interior: Vec<usize> = (1..=n_locations)
        .chain(std::iter::repeat_n(0, n_locations - 1))
        .collect();
    interior.shuffle(rng);
    let mut entries = Vec::with_capacity(2 * n_locations + 1);
    entries.push(0);
    entries.extend(interior);
    entries.push(0);
    Ok(SolutionString::from_entries_unchecked(entries))
}

/// Applies `rule` at interior positions `i` and `j`.
pub fn apply_exchange(
    s: &SolutionString,
    rule: ExchangeRule,
    i: usize,
    j: usize,
) -> Result<SolutionString> {
    let last = s.len() - 2;
    for k in [i, j] {
        if k == 0 || k > last {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: s.len(),
            });
        }
    }
    let mut out = s.clone();
    exchange_in_place(out.entries_mut(), rule, i, j);
    Ok(out)
}

fn exchange_in_place(v: &mut [usize], rule: ExchangeRule, i: usize, j: usize) {
    match rule {
        ExchangeRule::Swap => v.swap(i, j),
        ExchangeRule::Relocate => {
            if i < j {
                v[i..=j].rotate_left(1);
            } else {
                v[j..=i].rotate_right(1);
            }
        }
        ExchangeRule::TwoOpt => v[i.min(j)..=i.max(j)].reverse(),
    }
}

/// Metropolis annealing from a random start with the default cost function.
pub fn simulated_annealing(scn: &Scenario, cfg: &SaConfig) -> Result<SaOutcome> {
    simulated_annealing_with(scn, cfg, &CostOptions::default())
}

pub fn simulated_annealing_with(
    scn: &Scenario,
    cfg: &SaConfig,
    options: &CostOptions,
) -> Result<SaOutcome> {
    cfg.validate()?;
    let mut eval = Evaluator::new(scn, cfg.objective, *options)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = random_solution(scn.n_customers(), &mut rng)?;
    let mut current_obj = eval.objective_value(&current);
    let mut best_obj = current_obj;
    let mut candidate = current.clone();
    let hi = current.len() - 2;
    let mut trace = SaTrace::default();
    let mut temperature = cfg.initial_temperature;
    let mut phase = 0;

    // With one location every move is the identity.
    let movable = hi >= 2;
    while temperature > cfg.final_temperature {
        temperature *= cfg.cooling_factor;
        phase += 1;
        let mut accepted = 0;
        for _ in 0..cfg.rounds_per_phase {
            let i = rng.gen_range(1..=hi);
            let j = rng.gen_range(1..=hi);
            let rule = ExchangeRule::ALL[rng.gen_range(0..3)];
            let x: f64 = rng.gen();
            if !movable {
                continue;
            }
            candidate
                .entries_mut()
                .copy_from_slice(current.as_slice());
            exchange_in_place(candidate.entries_mut(), rule, i, j);
            let obj = eval.objective_value(&candidate);
            if (-(obj - current_obj) / temperature).exp() >= x {
                std::mem::swap(&mut current, &mut candidate);
                current_obj = obj;
                best_obj = best_obj.min(obj);
                accepted += 1;
            }
        }
        trace.phases.push(SaPhase {
            phase,
            temperature,
            best_objective: best_obj,
            current_objective: current_obj,
            accepted,
        });
    }

    let breakdown = eval.evaluate(&current);
    Ok(SaOutcome {
        solution: current,
        breakdown,
        trace,
    })
}
