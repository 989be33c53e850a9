//! Brute-force exact solvers for small instances.

use rayon::prelude::*;

use crate::battery::BatteryChoice;
use crate::cost::{CostBreakdown, CostOptions, Evaluator, Objective};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::schedule::RouteTiming;
use crate::solution::SolutionString;

pub const MAX_ENUMERATED_LOCATIONS: usize = 9;
pub const MAX_MAKESPAN_ROUTES: usize = 10;
pub const MAX_MAKESPAN_DRONES: usize = 4;
pub const MAX_KNAPSACK_TYPES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub solution: SolutionString,
    pub breakdown: CostBreakdown,
}

/// Exact optimum by enumerating every location order and every way of
/// cutting it into routes. Unpenalized solutions always beat penalized ones.
pub fn enumerate_optimal(scn: &Scenario, objective: Objective) -> Result<OracleResult> {
    enumerate_optimal_with(scn, objective, &CostOptions::default())
}

pub fn enumerate_optimal_with(
    scn: &Scenario,
    objective: Objective,
    options: &CostOptions,
) -> Result<OracleResult> {
    let n = scn.n_customers();
    if n > MAX_ENUMERATED_LOCATIONS {
        return Err(Error::TooLarge {
            what: "locations",
            size: n,
            limit: MAX_ENUMERATED_LOCATIONS,
        });
    }
    // Fail early on invalid options rather than inside the workers.
    Evaluator::new(scn, objective, *options)?;

    let best = (1..=n)
        .into_par_iter()
        .map(|first| best_with_first(scn, objective, options, first))
        .reduce_with(|a, b| if better(&b, &a) { b } else { a })
        .expect("at least one location");

    let breakdown = Evaluator::new(scn, objective, *options)?.evaluate(&best.solution);
    Ok(OracleResult {
        objective: best.objective,
        solution: best.solution,
        breakdown,
    })
}

struct Candidate {
    penalized: bool,
    objective: f64,
    solution: SolutionString,
}

/// Total order used by the search; the string itself breaks exact ties so the
/// result does not depend on the parallel split.
fn better(a: &Candidate, b: &Candidate) -> bool {
    (a.penalized, a.objective)
        .partial_cmp(&(b.penalized, b.objective))
        .map(|o| o.then_with(|| a.solution.as_slice().cmp(b.solution.as_slice())))
        .is_some_and(|o| o.is_lt())
}

fn best_with_first(
    scn: &Scenario,
    objective: Objective,
    options: &CostOptions,
    first: usize,
) -> Candidate {
    let n = scn.n_customers();
    let mut eval = Evaluator::new(scn, objective, *options).expect("options checked by caller");
    let mut order: Vec<usize> = std::iter::once(first)
        .chain((1..=n).filter(|&k| k != first))
        .collect();
    let mut entries = Vec::with_capacity(2 * n + 1);
    let mut best: Option<Candidate> = None;
    loop {
        for mask in 0u32..(1 << (n - 1)) {
            fill_entries(&order, mask, &mut entries);
            let s = SolutionString::from_entries_unchecked(entries.clone());
            let b = eval.evaluate(&s);
            let cand = Candidate {
                penalized: b.penalized,
                objective: b.objective(objective),
                solution: s,
            };
            if best.as_ref().is_none_or(|cur| better(&cand, cur)) {
                best = Some(cand);
            }
        }
        if !next_permutation(&mut order[1..]) {
            break;
        }
    }
    best.expect("every order yields a candidate")
}

/// Bit `k` of `mask` cuts the route after the `k`-th location of `order`.
fn fill_entries(order: &[usize], mask: u32, out: &mut Vec<usize>) {
    let n = order.len();
    out.clear();
    out.push(0);
    for (k, &loc) in order.iter().enumerate() {
        out.push(loc);
        if k + 1 < n && mask & (1 << k) != 0 {
            out.push(0);
        }
    }
    out.resize(2 * n + 1, 0);
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Optimal overall delivery time for running `u` on `n_drones` drones.
///
/// A drone flying a set of routes back to back finishes its last delivery at
/// `sum(q) - q_last + p_last`, which is smallest when the last route has the
/// largest `q - p`. Every assignment of routes to drones is enumerated.
pub fn min_makespan(u: &RouteTiming, n_drones: usize) -> Result<f64> {
    let r = u.len();
    if r > MAX_MAKESPAN_ROUTES {
        return Err(Error::TooLarge {
            what: "routes",
            size: r,
            limit: MAX_MAKESPAN_ROUTES,
        });
    }
    if n_drones > MAX_MAKESPAN_DRONES {
        return Err(Error::TooLarge {
            what: "drones",
            size: n_drones,
            limit: MAX_MAKESPAN_DRONES,
        });
    }
    if n_drones == 0 {
        return Err(Error::Domain("need at least one drone".into()));
    }
    let mut best = f64::INFINITY;
    let mut drone_of = vec![0usize; r];
    let mut sum_q = vec![0.0; n_drones];
    let mut max_gap = vec![0.0f64; n_drones];
    loop {
        sum_q.iter_mut().for_each(|x| *x = 0.0);
        max_gap.iter_mut().for_each(|x| *x = f64::NEG_INFINITY);
        for (route, &d) in u.pairs.iter().zip(&drone_of) {
            sum_q[d] += route.arrival;
            max_gap[d] = max_gap[d].max(route.arrival - route.delivery);
        }
        let mut span = 0.0f64;
        for d in 0..n_drones {
            if max_gap[d].is_finite() {
                span = span.max(sum_q[d] - max_gap[d]);
            }
        }
        best = best.min(span);
        // Odometer increment over n_drones^r assignments.
        let mut k = 0;
        while k < r {
            drone_of[k] += 1;
            if drone_of[k] < n_drones {
                break;
            }
            drone_of[k] = 0;
            k += 1;
        }
        if k == r {
            break;
        }
    }
    Ok(if r == 0 { 0.0 } else { best })
}

/// Cheapest subset with `sum values >= need`, by trying all of them.
pub fn knapsack_exhaustive(values: &[f64], costs: &[f64], need: f64) -> Result<BatteryChoice> {
    assert_eq!(values.len(), costs.len());
    let m = values.len();
    if m > MAX_KNAPSACK_TYPES {
        return Err(Error::TooLarge {
            what: "battery types",
            size: m,
            limit: MAX_KNAPSACK_TYPES,
        });
    }
    let mut best: Option<(f64, u32)> = None;
    for mask in 0u32..(1 << m) {
        let (mut value, mut cost) = (0.0, 0.0);
        for j in 0..m {
            if mask & (1 << j) != 0 {
                value += values[j];
                cost += costs[j];
            }
        }
        if value >= need && best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, mask));
        }
    }
    let (cost, mask) = best.ok_or_else(|| {
        Error::Infeasible(format!("no subset of battery types covers {need} kJ"))
    })?;
    Ok(BatteryChoice {
        picks: (0..m).filter(|&j| mask & (1 << j) != 0).collect(),
        cost,
    })
}
