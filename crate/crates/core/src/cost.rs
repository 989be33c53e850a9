//! Cost and overall delivery time of a solution string.
//!
//! Evaluation runs in two phases: a back-to-front sweep that prices the
//! battery energy of every route, then a drone-count decision followed by list
//! scheduling to find the overall delivery time. Constraint violations are not
//! rejected; they inflate cost and time by the penalty constant `K`.

use serde::{Deserialize, Serialize};

use crate::battery::{min_knapsack, required_energy, usable_energy};
use crate::energy::LinearPowerModel;
use crate::error::{Error, Result};
use crate::scenario::{Params, Scenario};
use crate::schedule::{ListScheduler, RoutePair, RouteTiming};
use crate::solution::SolutionString;

/// Which DDP variant is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Minimise total cost subject to the delivery time limit.
    MinCost,
    /// Minimise overall delivery time subject to the budget.
    MinTime,
}

impl Objective {
    pub fn minimizes_cost(self) -> bool {
        matches!(self, Objective::MinCost)
    }
}

/// How battery energy is provisioned for each route.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum BatteryPolicy {
    /// Every route gets exactly the energy it needs, found from the fixed
    /// point of energy and battery weight.
    #[default]
    PerRoute,
    /// Every route carries a battery of the same weight (kg).
    Fixed { weight: f64 },
    /// Each route buys the cheapest sufficient combination of the scenario's
    /// battery types.
    Discrete,
}

/// Variants of the cost function used for ablations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostOptions {
    /// When false, every route gets its own drone.
    pub reuse: bool,
    pub battery: BatteryPolicy,
}

impl Default for CostOptions {
    fn default() -> Self {
        Self {
            reuse: true,
            battery: BatteryPolicy::PerRoute,
        }
    }
}

impl CostOptions {
    /// Drone count equals route count; no binary search, no budget-driven
    /// fleet size.
    pub fn reuse_disabled() -> Self {
        Self {
            reuse: false,
            ..Self::default()
        }
    }

    /// Identical battery weight `weight` kg on every route.
    pub fn fixed_battery(weight: f64) -> Result<Self> {
        let options = Self {
            battery: BatteryPolicy::Fixed { weight },
            ..Self::default()
        };
        options.validate()?;
        Ok(options)
    }

    pub fn validate(&self) -> Result<()> {
        match self.battery {
            BatteryPolicy::Fixed { weight } if !(weight > 0.0 && weight.is_finite()) => Err(
                Error::InvalidConfig(format!("fixed battery weight must be positive, got {weight}")),
            ),
            _ => Ok(()),
        }
    }

    fn validate_for(&self, scn: &Scenario) -> Result<()> {
        self.validate()?;
        if self.battery == BatteryPolicy::Discrete && scn.battery_types().is_empty() {
            return Err(Error::InvalidConfig(
                "discrete battery policy needs battery types in the scenario".into(),
            ));
        }
        Ok(())
    }
}

/// Running totals of the back-to-front sweep over one route.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RouteAccumulator {
    /// Route duration so far, s.
    pub route_time: f64,
    /// Sum of leg time times payload carried on that leg, kg·s.
    pub time_weight: f64,
    /// Payload picked up so far (going backwards), kg.
    pub payload: f64,
}

impl RouteAccumulator {
    /// Adds leg `j -> i` walked backwards: the payload before `j` delivers is
    /// what was carried after it, so the time-weight product is updated first.
    #[inline]
    pub fn add_leg(&mut self, leg_time: f64, demand_at_start: f64) {
        self.route_time += leg_time;
        self.time_weight += self.payload * leg_time;
        self.payload += demand_at_start;
    }
}

/// Battery energy in kJ that powers a route, including the energy spent
/// lifting that battery:
/// `E = (alpha * omega + beta * t) / (1 - alpha * t / xi)`.
///
/// Past the pole `t = xi / alpha` the value is negative (or infinite at it);
/// callers penalise rather than reject.
#[inline]
pub fn battery_energy(
    route_time: f64,
    time_weight_product: f64,
    model: &LinearPowerModel,
    energy_density: f64,
) -> f64 {
    (model.alpha * time_weight_product + model.beta * route_time)
        / (1.0 - model.alpha / energy_density * route_time)
}

/// Which penalties fired during an evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violations {
    /// Some route had non-positive or insufficient battery energy.
    pub energy: bool,
    /// Some route exceeded the carrying capacity.
    pub capacity: bool,
    pub budget: bool,
    pub time: bool,
}

impl Violations {
    pub fn any(&self) -> bool {
        self.energy || self.capacity || self.budget || self.time
    }
}

/// Output of the energy pricing sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCost {
    /// Energy spend including energy/capacity penalties (lambda).
    pub cost: f64,
    /// Battery energy per non-empty route in string order, kJ.
    pub route_energies: Vec<f64>,
    pub violations: Violations,
}

/// Drone purchase decision and resulting schedule length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DroneCost {
    pub drone_cost: f64,
    pub delivery_time: f64,
    pub drone_count: usize,
}

/// Full evaluation of a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub energy_cost: f64,
    pub drone_cost: f64,
    pub total_cost: f64,
    /// Seconds until the last package is delivered.
    pub delivery_time: f64,
    pub drone_count: usize,
    pub penalized: bool,
    pub violations: Violations,
    /// kJ per non-empty route, string order.
    pub route_energies: Vec<f64>,
}

impl CostBreakdown {
    /// Cost for [`Objective::MinCost`], delivery time for
    /// [`Objective::MinTime`].
    pub fn objective(&self, objective: Objective) -> f64 {
        match objective {
            Objective::MinCost => self.total_cost,
            Objective::MinTime => self.delivery_time,
        }
    }

    pub fn route_count(&self) -> usize {
        self.route_energies.len()
    }
}

/// Flat CSV row for one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub solution: String,
    pub energy_cost: f64,
    pub drone_cost: f64,
    pub total_cost: f64,
    pub delivery_time: f64,
    pub drone_count: usize,
    pub route_count: usize,
    pub penalized: bool,
}

impl CostRecord {
    pub fn new(solution: &SolutionString, breakdown: &CostBreakdown) -> Self {
        Self {
            solution: solution.to_string(),
            energy_cost: breakdown.energy_cost,
            drone_cost: breakdown.drone_cost,
            total_cost: breakdown.total_cost,
            delivery_time: breakdown.delivery_time,
            drone_count: breakdown.drone_count,
            route_count: breakdown.route_count(),
            penalized: breakdown.penalized,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Summary {
    energy_cost: f64,
    drone_cost: f64,
    total_cost: f64,
    delivery_time: f64,
    drone_count: usize,
    violations: Violations,
}

/// Cost function with reusable scratch buffers.
///
/// The annealer evaluates hundreds of thousands of neighbours per run; this
/// keeps those evaluations allocation-free.
#[derive(Debug)]
pub struct Evaluator<'a> {
    scn: &'a Scenario,
    objective: Objective,
    options: CostOptions,
    energies: Vec<f64>,
    timing: Vec<RoutePair>,
    scheduler: ListScheduler,
    usable: Vec<f64>,
    battery_costs: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(scn: &'a Scenario, objective: Objective, options: CostOptions) -> Result<Self> {
        options.validate_for(scn)?;
        Ok(Self {
            scn,
            objective,
            options,
            energies: Vec::new(),
            timing: Vec::new(),
            scheduler: ListScheduler::default(),
            usable: Vec::new(),
            battery_costs: scn.battery_types().iter().map(|b| b.cost).collect(),
        })
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scn
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn options(&self) -> &CostOptions {
        &self.options
    }

    pub fn evaluate(&mut self, s: &SolutionString) -> CostBreakdown {
        let summary = self.run(s.as_slice());
        CostBreakdown {
            energy_cost: summary.energy_cost,
            drone_cost: summary.drone_cost,
            total_cost: summary.total_cost,
            delivery_time: summary.delivery_time,
            drone_count: summary.drone_count,
            penalized: summary.violations.any(),
            violations: summary.violations,
            route_energies: self.energies.clone(),
        }
    }

    /// Objective value only, without allocating.
    pub fn objective_value(&mut self, s: &SolutionString) -> f64 {
        let summary = self.run(s.as_slice());
        match self.objective {
            Objective::MinCost => summary.total_cost,
            Objective::MinTime => summary.delivery_time,
        }
    }

    fn run(&mut self, s: &[usize]) -> Summary {
        let (energy_cost, mut violations) = self.price_energy(s);
        fill_route_times(s, self.scn, &mut self.timing);
        let drones = self.drone_cost(energy_cost);
        let params = self.scn.params();

        let mut total_cost = energy_cost + drones.drone_cost;
        let mut delivery_time = drones.delivery_time;
        if total_cost > params.budget {
            let penalty = params.big_k * (total_cost - params.budget);
            total_cost += penalty;
            delivery_time += penalty;
            violations.budget = true;
        } else if delivery_time > params.time_limit {
            let penalty = params.big_k * (delivery_time - params.time_limit);
            total_cost += penalty;
            delivery_time += penalty;
            violations.time = true;
        }
        Summary {
            energy_cost,
            drone_cost: drones.drone_cost,
            total_cost,
            delivery_time,
            drone_count: drones.drone_count,
            violations,
        }
    }

    /// Back-to-front sweep; leaves per-route energies in `self.energies` in
    /// string order.
    fn price_energy(&mut self, s: &[usize]) -> (f64, Violations) {
        let scn = self.scn;
        let params = scn.params();
        self.energies.clear();
        let mut acc = RouteAccumulator::default();
        let mut lambda = 0.0;
        let mut violations = Violations::default();
        for k in (0..s.len() - 1).rev() {
            let (i, j) = (s[k + 1], s[k]);
            if i == 0 && j == 0 {
                continue;
            }
            acc.add_leg(scn.leg_time(i, j), scn.demand(j));
            if j == 0 {
                let priced = self.price_route(&acc, params);
                lambda += priced.cost;
                violations.energy |= priced.energy_violation;
                violations.capacity |= priced.capacity_violation;
                self.energies.push(priced.energy);
                acc = RouteAccumulator::default();
            }
        }
        self.energies.reverse();
        (lambda, violations)
    }

    fn price_route(&mut self, acc: &RouteAccumulator, params: &Params) -> PricedRoute {
        let model = &params.power_model;
        let (k, eps, xi, q) = (
            params.big_k,
            params.energy_price,
            params.energy_density,
            params.capacity,
        );
        let mut out = PricedRoute::default();
        let carried_battery;
        match self.options.battery {
            BatteryPolicy::PerRoute => {
                let limit = k * k;
                let e = battery_energy(acc.route_time, acc.time_weight, model, xi);
                let e = if e.is_nan() { limit } else { e.clamp(-limit, limit) };
                if e > 0.0 {
                    out.cost += e * eps;
                } else {
                    out.cost += -k * (e * eps);
                    out.energy_violation = true;
                }
                out.energy = e;
                carried_battery = e / xi;
            }
            BatteryPolicy::Fixed { weight } => {
                let e = xi * weight;
                out.cost += e * eps;
                let need = model.alpha * (acc.time_weight + weight * acc.route_time)
                    + model.beta * acc.route_time;
                if need > e {
                    out.cost += k * (need - e) * eps;
                    out.energy_violation = true;
                }
                out.energy = e;
                carried_battery = weight;
            }
            BatteryPolicy::Discrete => {
                let types = self.scn.battery_types();
                self.usable = usable_energy(types, acc.route_time, model);
                let need = required_energy(acc.route_time, acc.time_weight, model);
                let picks: Vec<usize> =
                    match min_knapsack(&self.usable, &self.battery_costs, need) {
                        Ok(choice) => {
                            out.cost += choice.cost;
                            choice.picks
                        }
                        Err(_) => {
                            // Carry every helpful battery and pay for the shortfall.
                            let picks: Vec<usize> =
                                (0..types.len()).filter(|&j| self.usable[j] > 0.0).collect();
                            let covered: f64 = picks.iter().map(|&j| self.usable[j]).sum();
                            out.cost += picks.iter().map(|&j| types[j].cost).sum::<f64>();
                            out.cost += k * (need - covered) * eps;
                            out.energy_violation = true;
                            picks
                        }
                    };
                out.energy = picks.iter().map(|&j| types[j].energy).sum();
                carried_battery = picks.iter().map(|&j| types[j].weight).sum();
            }
        }
        let load = acc.payload + carried_battery;
        if load > q {
            out.cost += k * (load - q);
            out.capacity_violation = true;
        }
        out
    }

    fn drone_cost(&mut self, energy_cost: f64) -> DroneCost {
        let params = self.scn.params();
        let n = if !self.options.reuse {
            self.timing.len().max(1)
        } else {
            match self.objective {
                Objective::MinCost => min_drones_for_time_limit(
                    &mut self.scheduler,
                    &self.timing,
                    params.time_limit,
                    params.max_drones as usize,
                ),
                Objective::MinTime => drones_within_budget(energy_cost, params),
            }
        };
        DroneCost {
            drone_cost: n as f64 * params.drone_cost,
            delivery_time: self.scheduler.run(&self.timing, n),
            drone_count: n,
        }
    }
}

#[derive(Debug, Default)]
struct PricedRoute {
    cost: f64,
    energy: f64,
    energy_violation: bool,
    capacity_violation: bool,
}

/// Largest affordable fleet after paying for energy, at least one and at
/// most `max_drones`.
pub fn drones_within_budget(energy_cost: f64, params: &Params) -> usize {
    let n = ((params.budget - energy_cost) / params.drone_cost).floor();
    if n < 1.0 || n.is_nan() {
        1
    } else {
        n.min(f64::from(params.max_drones)) as usize
    }
}

fn min_drones_for_time_limit(
    scheduler: &mut ListScheduler,
    timing: &[RoutePair],
    time_limit: f64,
    max_drones: usize,
) -> usize {
    // Fleets of at least one drone per route all schedule identically, so
    // the search never needs to look past the route count.
    let cap = max_drones.min(timing.len().max(1));
    if scheduler.run(timing, cap) > time_limit {
        return max_drones;
    }
    let (mut lo, mut hi) = (1, cap);
    while lo < hi {
        let n = lo + (hi - lo) / 2;
        if scheduler.run(timing, n) <= time_limit {
            hi = n;
        } else {
            lo = n + 1;
        }
    }
    lo
}

/// Binary search for the smallest fleet whose list schedule meets
/// `time_limit`; falls back to `max_drones` when none does.
pub fn min_drones_binary_search(timing: &RouteTiming, time_limit: f64, max_drones: usize) -> usize {
    assert!(max_drones >= 1);
    min_drones_for_time_limit(
        &mut ListScheduler::default(),
        &timing.pairs,
        time_limit,
        max_drones,
    )
}

fn fill_route_times(s: &[usize], scn: &Scenario, out: &mut Vec<RoutePair>) {
    out.clear();
    let mut arrival = 0.0;
    for k in 1..s.len() {
        let (i, j) = (s[k], s[k - 1]);
        if i == 0 && j == 0 {
            continue;
        }
        let delivery = arrival;
        arrival += scn.leg_time(j, i);
        if i == 0 {
            out.push(RoutePair::new(delivery, arrival));
            arrival = 0.0;
        }
    }
}

/// Battery energy cost of `s` under per-route sizing.
pub fn energy_cost(s: &SolutionString, scn: &Scenario) -> EnergyCost {
    energy_cost_with(s, scn, &CostOptions::default()).expect("default options are always valid")
}

pub fn energy_cost_with(
    s: &SolutionString,
    scn: &Scenario,
    options: &CostOptions,
) -> Result<EnergyCost> {
    let mut ev = Evaluator::new(scn, Objective::MinCost, *options)?;
    let (cost, violations) = ev.price_energy(s.as_slice());
    Ok(EnergyCost {
        cost,
        route_energies: ev.energies,
        violations,
    })
}

/// Delivery and arrival time of every non-empty route, front to back.
pub fn route_times(s: &SolutionString, scn: &Scenario) -> RouteTiming {
    let mut pairs = Vec::new();
    fill_route_times(s.as_slice(), scn, &mut pairs);
    RouteTiming { pairs }
}

/// Fleet size, drone spend and overall delivery time given the energy spend
/// `energy_cost`.
pub fn drone_cost_and_delivery_time(
    s: &SolutionString,
    energy_cost: f64,
    objective: Objective,
    scn: &Scenario,
) -> DroneCost {
    drone_cost_and_delivery_time_with(s, energy_cost, objective, scn, &CostOptions::default())
        .expect("default options are always valid")
}

pub fn drone_cost_and_delivery_time_with(
    s: &SolutionString,
    energy_cost: f64,
    objective: Objective,
    scn: &Scenario,
    options: &CostOptions,
) -> Result<DroneCost> {
    let mut ev = Evaluator::new(scn, objective, *options)?;
    fill_route_times(s.as_slice(), scn, &mut ev.timing);
    Ok(ev.drone_cost(energy_cost))
}

/// Total cost and overall delivery time of `s`, with penalties applied.
pub fn cost(s: &SolutionString, objective: Objective, scn: &Scenario) -> CostBreakdown {
    cost_with(s, objective, scn, &CostOptions::default()).expect("default options are always valid")
}

pub fn cost_with(
    s: &SolutionString,
    objective: Objective,
    scn: &Scenario,
    options: &CostOptions,
) -> Result<CostBreakdown> {
    Ok(Evaluator::new(scn, objective, *options)?.evaluate(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{BatteryType, Point};
    use crate::schedule::list_schedule;

    fn params() -> Params {
        Params::default()
    }

    /// Depot at the origin, location 1 at 180 m so each leg takes 60 + 30 s.
    fn one_stop() -> Scenario {
        Scenario::new(
            vec![Point::new(0.0, 0.0), Point::new(180.0, 0.0)],
            vec![1.0],
            Params {
                budget: 1e9,
                time_limit: 1e9,
                ..params()
            },
        )
        .unwrap()
    }

    fn line(n: usize, spacing: f64, budget: f64, time_limit: f64) -> Scenario {
        let locations = (0..=n).map(|k| Point::new(k as f64 * spacing, 0.0)).collect();
        Scenario::new(
            locations,
            vec![0.5; n],
            Params {
                budget,
                time_limit,
                ..params()
            },
        )
        .unwrap()
    }

    #[test]
    fn battery_energy_empty_route() {
        let m = LinearPowerModel::measured_hexacopter();
        assert_eq!(battery_energy(0.0, 0.0, &m, 650.0), 0.0);
    }

    #[test]
    fn battery_energy_hand_value_and_fixed_point() {
        let m = LinearPowerModel::measured_hexacopter();
        let e = battery_energy(100.0, 50.0, &m, 650.0);
        assert!((e - 29.35 / 0.966_615_384_615_384_6).abs() < 1e-9);
        assert!((e - 30.364).abs() < 1e-3);
        let residual = e * (1.0 - 0.217 * 100.0 / 650.0) - (0.217 * 50.0 + 0.185 * 100.0);
        assert!(residual.abs() < 1e-9);
    }

    #[test]
    fn battery_energy_pole() {
        let m = LinearPowerModel::measured_hexacopter();
        let pole: f64 = 650.0 / 0.217;
        assert!((pole - 2995.4).abs() < 0.05);
        assert!(battery_energy(pole + 1.0, 0.0, &m, 650.0) < 0.0);
        assert!(battery_energy(pole * 0.999_999, 0.0, &m, 650.0) > 1e6);
    }

    #[test]
    fn all_empty_string_costs_nothing_in_energy() {
        let scn = line(3, 50.0, 1e9, 1e9);
        let s = SolutionString::new(vec![0, 1, 2, 3, 0, 0, 0]).unwrap();
        // Energy of the only route is positive, but an all-empty string is
        // impossible with customers; check the zero-route path via accumulator.
        assert!(energy_cost(&s, &scn).cost > 0.0);
        let mut ev = Evaluator::new(&scn, Objective::MinCost, CostOptions::default()).unwrap();
        let (lambda, v) = ev.price_energy(&[0, 0, 0, 0]);
        assert_eq!(lambda, 0.0);
        assert!(!v.any());
    }

    #[test]
    fn single_route_hand_trace() {
        let scn = one_stop();
        let s = SolutionString::single();
        let e = energy_cost(&s, &scn);
        let expected: f64 = (0.217 * 90.0 + 0.185 * 180.0) / (1.0 - 0.217 * 180.0 / 650.0);
        assert!((expected - 56.21).abs() < 0.01);
        assert_eq!(e.route_energies.len(), 1);
        assert!((e.route_energies[0] - expected).abs() < 1e-9);
        assert!((e.cost - expected * 0.1).abs() < 1e-9);
        assert!(!e.violations.any());

        let u = route_times(&s, &scn);
        assert_eq!(u.pairs, vec![RoutePair::new(90.0, 180.0)]);
    }

    #[test]
    fn capacity_penalty_applies() {
        let scn = Scenario::new(
            vec![Point::new(0.0, 0.0), Point::new(100.0, 0.0), Point::new(0.0, 100.0)],
            vec![2.0, 1.5],
            params(),
        )
        .unwrap();
        let s = SolutionString::new(vec![0, 1, 2, 0, 0]).unwrap();
        let e = energy_cost(&s, &scn);
        assert!(e.violations.capacity);
        let energy = e.route_energies[0];
        let expected = energy * 0.1 + 1e6 * (3.5 + energy / 650.0 - 3.0);
        assert!((e.cost - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn energies_are_reported_in_string_order() {
        let scn = line(3, 60.0, 1e9, 1e9);
        let s = SolutionString::new(vec![0, 3, 0, 1, 0, 2, 0]).unwrap();
        let e = energy_cost(&s, &scn);
        let singles: Vec<f64> = [3, 1, 2]
            .iter()
            .map(|&loc| {
                let s1 = SolutionString::from_routes(&[vec![loc]], 1);
                // Recompute directly from the closed form.
                drop(s1);
                let t = 2.0 * scn.leg_time(0, loc);
                let omega = 0.5 * scn.leg_time(0, loc);
                battery_energy(t, omega, &scn.params().power_model, 650.0)
            })
            .collect();
        for (a, b) in e.route_energies.iter().zip(&singles) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn route_times_skip_empty_routes_and_order_strictly() {
        let scn = line(3, 60.0, 1e9, 1e9);
        let s = SolutionString::new(vec![0, 0, 2, 1, 0, 0, 3]).unwrap_err();
        assert!(matches!(s, Error::InvalidSolution(_)));
        let s = SolutionString::new(vec![0, 0, 2, 1, 0, 3, 0]).unwrap();
        let u = route_times(&s, &scn);
        assert_eq!(u.len(), 2);
        for p in &u.pairs {
            assert!(p.delivery < p.arrival);
        }
        // 0 -> 2 -> 1 -> 0: legs of 120, 60 and 60 metres.
        let leg = |d: f64| 60.0 + d / 6.0;
        assert_eq!(u.pairs[0], RoutePair::new(leg(120.0) + leg(60.0), leg(120.0) + 2.0 * leg(60.0)));
    }

    #[test]
    fn budget_driven_fleet_size() {
        let p = Params {
            budget: 1500.0,
            drone_cost: 500.0,
            ..params()
        };
        assert_eq!(drones_within_budget(100.0, &p), 2);
        assert_eq!(drones_within_budget(2000.0, &p), 1);
        let capped = Params { max_drones: 2, budget: 1e9, ..p };
        assert_eq!(drones_within_budget(0.0, &capped), 2);
    }

    #[test]
    fn binary_search_finds_three_drones() {
        // Six identical routes of (100, 150); three drones finish at 250.
        let u = RouteTiming::from_tuples(&[(100.0, 150.0); 6]).unwrap();
        assert_eq!(list_schedule(&u.pairs, 2), 400.0);
        assert_eq!(list_schedule(&u.pairs, 3), 250.0);
        assert_eq!(min_drones_binary_search(&u, 260.0, 10), 3);
        let linear = (1..=10).find(|&n| list_schedule(&u.pairs, n) <= 260.0).unwrap();
        assert_eq!(linear, 3);
        // No feasible fleet: falls back to the upper bound.
        assert_eq!(min_drones_binary_search(&u, 50.0, 10), 10);
    }

    #[test]
    fn feasible_cost_is_sum_of_parts() {
        let scn = line(4, 40.0, 1e9, 1e9);
        let s = SolutionString::new(vec![0, 1, 2, 0, 3, 4, 0, 0, 0]).unwrap();
        let b = cost(&s, Objective::MinCost, &scn);
        assert!(!b.penalized);
        assert_eq!(b.total_cost, b.energy_cost + b.drone_cost);
        assert_eq!(b.drone_count, 1);
    }

    #[test]
    fn budget_penalty_substitution() {
        // Energy is tiny; two drones at $600 each with B = 1000 violates the
        // budget by the drone cost excess.
        let scn = line(2, 30.0, 1000.0, 1e9);
        let p = Params {
            drone_cost: 600.0,
            budget: 1000.0,
            big_k: 1000.0,
            time_limit: 1e9,
            ..params()
        };
        let scn = scn.with_params(p).unwrap();
        let s = SolutionString::new(vec![0, 1, 0, 2, 0]).unwrap();
        let b = cost_with(&s, Objective::MinCost, &scn, &CostOptions::reuse_disabled()).unwrap();
        let raw = b.energy_cost + 1200.0;
        assert!(b.violations.budget && !b.violations.time);
        assert!((b.total_cost - (raw + 1000.0 * (raw - 1000.0))).abs() < 1e-6);
    }

    #[test]
    fn time_penalty_substitution() {
        let scn = line(1, 600.0, 1e9, 1e9);
        let p = Params {
            time_limit: 100.0,
            big_k: 1000.0,
            budget: 1e9,
            ..params()
        };
        let scn = scn.with_params(p).unwrap();
        let s = SolutionString::single();
        // A single drone; the fleet search would otherwise buy the maximum.
        let b = cost_with(&s, Objective::MinCost, &scn, &CostOptions::reuse_disabled()).unwrap();
        // delivery = 60 + 100 = 160 s
        assert!(b.violations.time && !b.violations.budget);
        let raw_cost = b.energy_cost + 500.0;
        assert!((b.delivery_time - (160.0 + 1000.0 * 60.0)).abs() < 1e-6);
        assert!((b.total_cost - (raw_cost + 1000.0 * 60.0)).abs() < 1e-6);
    }

    #[test]
    fn reuse_disabled_buys_one_drone_per_route() {
        let scn = line(3, 40.0, 1e9, 1e9);
        let s = SolutionString::new(vec![0, 1, 0, 2, 0, 3, 0]).unwrap();
        let b = cost_with(&s, Objective::MinCost, &scn, &CostOptions::reuse_disabled()).unwrap();
        assert_eq!(b.drone_count, 3);
        let u = route_times(&s, &scn);
        let max_p = u.pairs.iter().map(|p| p.delivery).fold(0.0, f64::max);
        assert_eq!(b.delivery_time, max_p);
    }

    #[test]
    fn fixed_battery_prices_whole_battery() {
        let scn = one_stop();
        let opts = CostOptions::fixed_battery(0.3).unwrap();
        let e = energy_cost_with(&SolutionString::single(), &scn, &opts).unwrap();
        assert!((e.cost - 650.0 * 0.3 * 0.1).abs() < 1e-9);
        assert!(!e.violations.any());
        // 0.05 kg holds 32.5 kJ, far below the ~56 kJ this route needs.
        let small = CostOptions::fixed_battery(0.05).unwrap();
        let e = energy_cost_with(&SolutionString::single(), &scn, &small).unwrap();
        assert!(e.violations.energy);
        assert!(CostOptions::fixed_battery(0.0).is_err());
        assert!(CostOptions::fixed_battery(-1.0).is_err());
    }

    #[test]
    fn discrete_policy_uses_knapsack() {
        let types = vec![
            BatteryType {
                weight: 0.1,
                energy: 65.0,
                cost: 6.5,
            },
            BatteryType {
                weight: 0.05,
                energy: 32.5,
                cost: 3.0,
            },
        ];
        let scn = one_stop().with_battery_types(types).unwrap();
        let opts = CostOptions {
            battery: BatteryPolicy::Discrete,
            ..CostOptions::default()
        };
        let e = energy_cost_with(&SolutionString::single(), &scn, &opts).unwrap();
        assert!(!e.violations.any());
        assert_eq!(e.route_energies, vec![65.0]);
        assert!((e.cost - 6.5).abs() < 1e-12);
        assert!(Evaluator::new(&one_stop(), Objective::MinCost, opts).is_err());
    }

    #[test]
    fn objective_selector() {
        let scn = one_stop();
        let b = cost(&SolutionString::single(), Objective::MinTime, &scn);
        assert_eq!(b.objective(Objective::MinTime), b.delivery_time);
        assert_eq!(b.objective(Objective::MinCost), b.total_cost);
        let mut ev = Evaluator::new(&scn, Objective::MinTime, CostOptions::default()).unwrap();
        assert_eq!(ev.objective_value(&SolutionString::single()), b.delivery_time);
    }
}
