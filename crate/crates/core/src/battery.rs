//! Discrete battery selection as a minimum knapsack problem.
//!
//! Carrying battery `j` on a route of duration `t` costs `alpha * w_j * t` of
//! its own energy, so its usable contribution is `Y_j = e_j - alpha * w_j * t`.
//! The route needs `Z = alpha * omega + beta * t`. We pick the cheapest subset
//! with `sum Y_j >= Z`.

use serde::{Deserialize, Serialize};

use crate::energy::LinearPowerModel;
use crate::error::{Error, Result};
use crate::scenario::BatteryType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryChoice {
    /// Indices into the battery type list, ascending.
    pub picks: Vec<usize>,
    pub cost: f64,
}

impl BatteryChoice {
    pub fn energy(&self, types: &[BatteryType]) -> f64 {
        self.picks.iter().map(|&j| types[j].energy).sum()
    }

    pub fn weight(&self, types: &[BatteryType]) -> f64 {
        self.picks.iter().map(|&j| types[j].weight).sum()
    }
}

/// Usable energy of each type on a route of `route_time` seconds.
pub fn usable_energy(types: &[BatteryType], route_time: f64, model: &LinearPowerModel) -> Vec<f64> {
    types
        .iter()
        .map(|b| b.energy - model.alpha * b.weight * route_time)
        .collect()
}

/// Energy the route needs before counting battery weight.
pub fn required_energy(route_time: f64, time_weight_product: f64, model: &LinearPowerModel) -> f64 {
    model.alpha * time_weight_product + model.beta * route_time
}

/// Cheapest set of batteries that powers a route.
pub fn discrete_battery_assign(
    route_time: f64,
    time_weight_product: f64,
    types: &[BatteryType],
    model: &LinearPowerModel,
) -> Result<BatteryChoice> {
    if types.is_empty() {
        return Err(Error::Domain("no battery types to choose from".into()));
    }
    let usable = usable_energy(types, route_time, model);
    let costs: Vec<f64> = types.iter().map(|b| b.cost).collect();
    min_knapsack(
        &usable,
        &costs,
        required_energy(route_time, time_weight_product, model),
    )
}

/// Branch and bound for `min sum c_j h_j  s.t.  sum y_j h_j >= z`, `h` binary.
///
/// Items with `y_j <= 0` can never help a cover and are dropped. The bound at
/// each node is the LP relaxation: fill the remaining need greedily by
/// cost-per-unit, taking a fraction of the last item.
pub fn min_knapsack(values: &[f64], costs: &[f64], need: f64) -> Result<BatteryChoice> {
    assert_eq!(values.len(), costs.len());
    if need <= 0.0 {
        return Ok(BatteryChoice {
            picks: Vec::new(),
            cost: 0.0,
        });
    }
    let mut items: Vec<usize> = (0..values.len()).filter(|&j| values[j] > 0.0).collect();
    let available: f64 = items.iter().map(|&j| values[j]).sum();
    if available < need {
        return Err(Error::Infeasible(format!(
            "battery types provide at most {available} kJ of usable energy, route needs {need}"
        )));
    }
    items.sort_by(|&a, &b| {
        (costs[a] / values[a])
            .total_cmp(&(costs[b] / values[b]))
            .then(a.cmp(&b))
    });
    let y: Vec<f64> = items.iter().map(|&j| values[j]).collect();
    let c: Vec<f64> = items.iter().map(|&j| costs[j]).collect();
    let mut suffix = vec![0.0; y.len() + 1];
    for k in (0..y.len()).rev() {
        suffix[k] = suffix[k + 1] + y[k];
    }

    let mut search = Search {
        y: &y,
        c: &c,
        suffix: &suffix,
        best_cost: f64::INFINITY,
        best: Vec::new(),
        current: Vec::new(),
    };
    search.descend(0, need, 0.0);

    let mut picks: Vec<usize> = search.best.iter().map(|&k| items[k]).collect();
    picks.sort_unstable();
    Ok(BatteryChoice {
        picks,
        cost: search.best_cost,
    })
}

struct Search<'a> {
    y: &'a [f64],
    c: &'a [f64],
    suffix: &'a [f64],
    best_cost: f64,
    best: Vec<usize>,
    current: Vec<usize>,
}

impl Search<'_> {
    fn lower_bound(&self, from: usize, mut need: f64) -> f64 {
        let mut extra = 0.0;
        for k in from..self.y.len() {
            if need <= 0.0 {
                break;
            }
            if self.y[k] >= need {
                extra += self.c[k] * need / self.y[k];
                need = 0.0;
            } else {
                extra += self.c[k];
                need -= self.y[k];
            }
        }
        extra
    }

    fn descend(&mut self, k: usize, need: f64, cost: f64) {
        if need <= 0.0 {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best.clone_from(&self.current);
            }
            return;
        }
        if k == self.y.len() || self.suffix[k] < need {
            return;
        }
        if cost + self.lower_bound(k, need) >= self.best_cost {
            return;
        }
        self.current.push(k);
        self.descend(k + 1, need - self.y[k], cost + self.c[k]);
        self.current.pop();
        self.descend(k + 1, need, cost);
    }
}
