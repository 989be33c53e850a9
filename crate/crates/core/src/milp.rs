//! Mixed-integer linear program for the drone delivery problems.
//!
//! The model is built symbolically so it can be exported to LP text for an
//! external solver and used to check concrete assignments. Location `0` is the
//! depot; its visit time and consumed energy are the constant zero and are not
//! declared as variables.
//!
//! Variable names: `x_i_j` edge used, `z_i_j` drone reused from the route
//! ending at `i` for the route starting at `j`, `f_i_j` payload on an edge,
//! `w_i_j` battery weight on an edge, `b_i` battery weight at a location,
//! `a_i` visit time, `r_i` depot return time after `i`, `e_i` energy consumed
//! on reaching `i`, `g_i` energy of the route ending at `i`, `h_k_i` battery
//! type `k` carried on the route ending at `i`, plus `l` and `c`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::battery::discrete_battery_assign;
use crate::cost::{battery_energy, Objective};
use crate::error::{Error, Result};
use crate::scenario::{BatteryType, Scenario};
use crate::solution::SolutionString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// Binary whose value switches a big-K row off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guard {
    pub var: usize,
    /// Value of `var` at which the row is relaxed.
    pub relaxed_when: f64,
    pub big_k: f64,
}

/// One linear row `sum(coef * var) <sense> rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Constraint family, such as `4a` or `9c`.
    pub group: &'static str,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub guard: Option<Guard>,
}

impl Constraint {
    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// Non-negative when satisfied.
    pub fn slack(&self, values: &[f64]) -> f64 {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => self.rhs - lhs,
            Sense::Ge => lhs - self.rhs,
            Sense::Eq => -(lhs - self.rhs).abs(),
        }
    }
}

/// Every constraint family in build order.
pub const GROUPS: [&str; 24] = [
    "4a", "4b", "5a", "5b", "5c", "6a", "6b", "7a", "7b", "7b_guard", "7c", "7d", "7e", "8a",
    "8b", "8c", "8d", "8e", "9a", "9b", "9c", "10a", "10b", "bat",
];

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    n_locations: usize,
    objective: Objective,
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
    objective_var: usize,
    battery_types: Vec<BatteryType>,
}

impl MilpModel {
    pub fn n_locations(&self) -> usize {
        self.n_locations
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn has_battery_types(&self) -> bool {
        !self.battery_types.is_empty()
    }

    pub fn battery_types(&self) -> &[BatteryType] {
        &self.battery_types
    }

    pub fn group_count(&self, group: &str) -> usize {
        self.constraints.iter().filter(|c| c.group == group).count()
    }

    /// Closed-form variable count: `4N^2 + 7N + 2`, plus `|B| * N` battery
    /// picks.
    pub fn expected_variable_count(n: usize, battery_types: usize) -> usize {
        4 * n * n + 7 * n + 2 + battery_types * n
    }

    /// Closed-form row count for group `group` over `n` locations.
    pub fn expected_group_count(group: &str, n: usize, with_batteries: bool) -> usize {
        match group {
            "4a" | "5a" | "5b" | "6a" | "7b" | "7b_guard" | "7d" | "8b" | "8e" | "9b" | "9c" => n,
            "4b" => n + 1,
            "5c" | "7e" | "10a" | "10b" => 1,
            "6b" | "8a" => (n + 1) * n,
            "7a" | "8d" | "9a" => n * n,
            "7c" | "8c" => n * (n - 1),
            "bat" if with_batteries => n,
            _ => 0,
        }
    }

    fn values_of(&self, asn: &MilpAssignment) -> Result<Vec<f64>> {
        self.variables
            .iter()
            .map(|v| {
                asn.values
                    .get(&v.name)
                    .copied()
                    .ok_or_else(|| Error::MissingVariable(v.name.clone()))
            })
            .collect()
    }

    /// Value of `l` or `c`, whichever this model minimises.
    pub fn objective_value(&self, asn: &MilpAssignment) -> Result<f64> {
        let name = &self.variables[self.objective_var].name;
        asn.values
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingVariable(name.clone()))
    }

    /// Value of the right-hand side of the total cost definition.
    pub fn cost_expression(&self, asn: &MilpAssignment) -> Result<f64> {
        let values = self.values_of(asn)?;
        let c = self.index["c"];
        let row = self
            .constraints
            .iter()
            .find(|r| r.group == "10a")
            .expect("model has a cost row");
        // Row is `c - (drone and energy terms) = 0`.
        Ok(values[c] - row.lhs(&values))
    }

    /// LP text in CPLEX format. Output depends only on the model.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        let obj = match self.objective {
            Objective::MinTime => "min_time",
            Objective::MinCost => "min_cost",
        };
        let _ = writeln!(
            out,
            "\\ drone delivery MILP, {} locations, objective {obj}",
            self.n_locations
        );
        out.push_str("Minimize\n");
        let _ = writeln!(out, " obj: {}", self.variables[self.objective_var].name);
        out.push_str("Subject To\n");
        for row in &self.constraints {
            let _ = write!(out, " {}:", row.name);
            for (k, &(v, coef)) in row.terms.iter().enumerate() {
                if k > 0 && k % 8 == 0 {
                    out.push_str("\n  ");
                }
                write_term(&mut out, coef, &self.variables[v].name, k == 0);
            }
            let _ = writeln!(out, " {} {}", row.sense.symbol(), LpNum(row.rhs));
        }
        out.push_str("Binaries\n");
        let binaries: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        for chunk in binaries.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
        out.push_str("End\n");
        out
    }
}

struct LpNum(f64);

impl fmt::Display for LpNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `{}` on f64 never uses exponents, which every LP reader accepts.
        if self.0 == 0.0 {
            f.write_str("0")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn write_term(out: &mut String, coef: f64, name: &str, first: bool) {
    let sign = if coef < 0.0 { "-" } else { "+" };
    let mag = coef.abs();
    if first && sign == "+" {
        out.push(' ');
    } else {
        let _ = write!(out, " {sign} ");
    }
    if mag == 1.0 {
        out.push_str(name);
    } else {
        let _ = write!(out, "{} {name}", LpNum(mag));
    }
}

/// Writes [`MilpModel::to_lp_string`] to `path`.
pub fn export_lp(model: &MilpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_lp_string()).map_err(|e| Error::io(path, e))
}

/// A value for every model variable, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MilpAssignment {
    pub values: BTreeMap<String, f64>,
}

impl MilpAssignment {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    /// Every model variable at zero.
    pub fn zeros(model: &MilpModel) -> Self {
        Self {
            values: model.variables.iter().map(|v| (v.name.clone(), 0.0)).collect(),
        }
    }
}

/// A row or bound that an assignment breaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub group: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Negative; how far the row is from holding.
    pub slack: f64,
    pub tolerance: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (group {}): lhs {} rhs {} slack {:e} tolerance {:e}",
            self.constraint, self.group, self.lhs, self.rhs, self.slack, self.tolerance
        )
    }
}

/// Every row, bound and integrality requirement violated by more than `tol`.
pub fn validate_assignment(
    model: &MilpModel,
    asn: &MilpAssignment,
    tol: f64,
) -> Result<Vec<Violation>> {
    let values = model.values_of(asn)?;
    let mut out = Vec::new();
    for (v, var) in model.variables.iter().enumerate() {
        let x = values[v];
        let (bound_ok, rhs) = match var.kind {
            VarKind::Binary => {
                let nearest = x.round().clamp(0.0, 1.0);
                ((x - nearest).abs() <= tol, nearest)
            }
            VarKind::Continuous => (x >= -tol, 0.0),
        };
        if !bound_ok || !x.is_finite() {
            out.push(Violation {
                constraint: format!("bound_{}", var.name),
                group: "bound".into(),
                lhs: x,
                rhs,
                slack: -(x - rhs).abs(),
                tolerance: tol,
            });
        }
    }
    for row in &model.constraints {
        let slack = row.slack(&values);
        if slack < -tol || slack.is_nan() {
            out.push(Violation {
                constraint: row.name.clone(),
                group: row.group.to_string(),
                lhs: row.lhs(&values),
                rhs: row.rhs,
                slack,
                tolerance: tol,
            });
        }
    }
    Ok(out)
}

struct Builder {
    variables: Vec<Variable>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind) -> usize {
        let k = self.variables.len();
        self.index.insert(name.clone(), k);
        self.variables.push(Variable { name, kind });
        k
    }

    fn id(&self, name: &str) -> usize {
        self.index[name]
    }

    fn row(
        &mut self,
        group: &'static str,
        suffix: &str,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
        guard: Option<Guard>,
    ) {
        let name = if suffix.is_empty() {
            format!("c{group}")
        } else {
            format!("c{group}_{suffix}")
        };
        self.constraints.push(Constraint {
            name,
            group,
            terms,
            sense,
            rhs,
            guard,
        });
    }
}

/// Builds the model for `scn`. With `battery_types`, route batteries are
/// picked from those types instead of being sized continuously.
pub fn build_model(
    scn: &Scenario,
    objective: Objective,
    battery_types: Option<&[BatteryType]>,
) -> Result<MilpModel> {
    let battery_types = battery_types.unwrap_or(&[]).to_vec();
    for b in &battery_types {
        b.validate()?;
    }
    let n = scn.n_customers();
    let p = scn.params();
    let (alpha, beta) = (p.power_model.alpha, p.power_model.beta);
    let (q, xi) = (p.capacity, p.energy_density);
    let longest_leg = p.service_time + scn.max_distance() / p.speed;
    let type_energy: f64 = battery_types.iter().map(|b| b.energy).sum();
    let energy_cap = (xi * q).max(type_energy);
    let k = |safe: f64| p.big_k.min(safe);
    let k_time = k(p.time_limit + longest_leg);
    let k_reuse = k(p.time_limit + 2.0 * longest_leg);
    let k_load = k(q);
    let k_energy = k(energy_cap + (alpha * q + beta) * longest_leg);
    let k_route_energy = k(energy_cap);

    let all = 0..=n;
    let cust = 1..=n;
    let mut bld = Builder {
        variables: Vec::new(),
        index: HashMap::new(),
        constraints: Vec::new(),
    };

    for i in all.clone() {
        for j in all.clone().filter(|&j| j != i) {
            bld.var(format!("x_{i}_{j}"), VarKind::Binary);
        }
    }
    for i in cust.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            bld.var(format!("z_{i}_{j}"), VarKind::Binary);
        }
    }
    for prefix in ["f", "w"] {
        for i in all.clone() {
            for j in all.clone().filter(|&j| j != i) {
                bld.var(format!("{prefix}_{i}_{j}"), VarKind::Continuous);
            }
        }
    }
    for prefix in ["b", "a", "r", "e", "g"] {
        for i in cust.clone() {
            bld.var(format!("{prefix}_{i}"), VarKind::Continuous);
        }
    }
    let l = bld.var("l".into(), VarKind::Continuous);
    let c = bld.var("c".into(), VarKind::Continuous);
    for t in 0..battery_types.len() {
        for i in cust.clone() {
            bld.var(format!("h_{t}_{i}"), VarKind::Binary);
        }
    }

    let x = |b: &Builder, i: usize, j: usize| b.id(&format!("x_{i}_{j}"));
    let z = |b: &Builder, i: usize, j: usize| b.id(&format!("z_{i}_{j}"));
    let two = |b: &Builder, pre: &str, i: usize, j: usize| b.id(&format!("{pre}_{i}_{j}"));
    let one = |b: &Builder, pre: &str, i: usize| b.id(&format!("{pre}_{i}"));
    // Location-indexed variable that is the constant zero at the depot.
    let at = |b: &Builder, pre: &str, i: usize| (i > 0).then(|| b.id(&format!("{pre}_{i}")));
    let guard_off_at_zero = |var: usize, big_k: f64| {
        Some(Guard {
            var,
            relaxed_when: 0.0,
            big_k,
        })
    };
    let guard_off_at_one = |var: usize, big_k: f64| {
        Some(Guard {
            var,
            relaxed_when: 1.0,
            big_k,
        })
    };

    // Flow.
    for i in cust.clone() {
        let terms = all.clone().filter(|&j| j != i).map(|j| (x(&bld, i, j), 1.0)).collect();
        bld.row("4a", &i.to_string(), terms, Sense::Eq, 1.0, None);
    }
    for i in all.clone() {
        let mut terms: Vec<(usize, f64)> =
            all.clone().filter(|&j| j != i).map(|j| (x(&bld, i, j), 1.0)).collect();
        terms.extend(all.clone().filter(|&j| j != i).map(|j| (x(&bld, j, i), -1.0)));
        bld.row("4b", &i.to_string(), terms, Sense::Eq, 0.0, None);
    }

    // Reuse.
    for i in cust.clone() {
        let mut terms: Vec<(usize, f64)> =
            cust.clone().filter(|&j| j != i).map(|j| (z(&bld, i, j), 1.0)).collect();
        terms.push((x(&bld, i, 0), -1.0));
        bld.row("5a", &i.to_string(), terms, Sense::Le, 0.0, None);
    }
    for i in cust.clone() {
        let mut terms: Vec<(usize, f64)> =
            cust.clone().filter(|&j| j != i).map(|j| (z(&bld, j, i), 1.0)).collect();
        terms.push((x(&bld, 0, i), -1.0));
        bld.row("5b", &i.to_string(), terms, Sense::Le, 0.0, None);
    }
    let mut fleet: Vec<(usize, f64)> = cust.clone().map(|i| (x(&bld, 0, i), 1.0)).collect();
    for i in cust.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            fleet.push((z(&bld, i, j), -1.0));
        }
    }
    bld.row("5c", "", fleet, Sense::Le, f64::from(p.max_drones), None);

    // Demand.
    for i in cust.clone() {
        let mut terms: Vec<(usize, f64)> =
            all.clone().filter(|&j| j != i).map(|j| (two(&bld, "f", j, i), 1.0)).collect();
        terms.extend(all.clone().filter(|&j| j != i).map(|j| (two(&bld, "f", i, j), -1.0)));
        bld.row("6a", &i.to_string(), terms, Sense::Eq, scn.demand(i), None);
    }
    for i in all.clone() {
        for j in all.clone().filter(|&j| j != i) {
            let xij = x(&bld, i, j);
            let terms = vec![(two(&bld, "f", i, j), 1.0), (xij, -k_load)];
            bld.row("6b", &format!("{i}_{j}"), terms, Sense::Le, 0.0, guard_off_at_one(xij, k_load));
        }
    }

    // Timing.
    for i in all.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            let xij = x(&bld, i, j);
            let mut terms = Vec::new();
            if let Some(ai) = at(&bld, "a", i) {
                terms.push((ai, 1.0));
            }
            terms.push((one(&bld, "a", j), -1.0));
            terms.push((xij, k_time));
            let rhs = k_time - scn.leg_time(i, j);
            bld.row("7a", &format!("{i}_{j}"), terms, Sense::Le, rhs, guard_off_at_zero(xij, k_time));
        }
    }
    for i in cust.clone() {
        let xi0 = x(&bld, i, 0);
        let terms = vec![(one(&bld, "a", i), 1.0), (one(&bld, "r", i), -1.0), (xi0, k_time)];
        let rhs = k_time - scn.leg_time(i, 0);
        bld.row("7b", &i.to_string(), terms, Sense::Le, rhs, guard_off_at_zero(xi0, k_time));
    }
    for i in cust.clone() {
        let xi0 = x(&bld, i, 0);
        let terms = vec![(one(&bld, "r", i), 1.0), (xi0, -k_time)];
        bld.row("7b_guard", &i.to_string(), terms, Sense::Le, 0.0, guard_off_at_one(xi0, k_time));
    }
    for i in cust.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            let zij = z(&bld, i, j);
            let terms = vec![(one(&bld, "r", i), 1.0), (one(&bld, "a", j), -1.0), (zij, k_reuse)];
            let rhs = k_reuse - scn.leg_time(0, j);
            bld.row("7c", &format!("{i}_{j}"), terms, Sense::Le, rhs, guard_off_at_zero(zij, k_reuse));
        }
    }
    for i in cust.clone() {
        let terms = vec![(one(&bld, "a", i), 1.0), (l, -1.0)];
        bld.row("7d", &i.to_string(), terms, Sense::Le, 0.0, None);
    }
    bld.row("7e", "", vec![(l, 1.0)], Sense::Le, p.time_limit, None);

    // Capacity.
    for i in all.clone() {
        for j in all.clone().filter(|&j| j != i) {
            let terms = vec![
                (two(&bld, "w", i, j), 1.0),
                (two(&bld, "f", i, j), 1.0),
                (x(&bld, i, j), -q),
            ];
            bld.row("8a", &format!("{i}_{j}"), terms, Sense::Le, 0.0, None);
        }
    }
    for i in cust.clone() {
        let xi0 = x(&bld, i, 0);
        let mut terms = if battery_types.is_empty() {
            vec![(one(&bld, "g", i), 1.0 / xi)]
        } else {
            battery_types
                .iter()
                .enumerate()
                .map(|(t, b)| (bld.id(&format!("h_{t}_{i}")), b.weight))
                .collect()
        };
        terms.push((one(&bld, "b", i), -1.0));
        terms.push((xi0, k_load));
        bld.row("8b", &i.to_string(), terms, Sense::Le, k_load, guard_off_at_zero(xi0, k_load));
    }
    for i in cust.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            let xji = x(&bld, j, i);
            let terms = vec![(one(&bld, "b", i), 1.0), (one(&bld, "b", j), -1.0), (xji, k_load)];
            bld.row("8c", &format!("{i}_{j}"), terms, Sense::Le, k_load, guard_off_at_zero(xji, k_load));
        }
    }
    for i in all.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            let xij = x(&bld, i, j);
            let terms = vec![
                (two(&bld, "w", i, j), 1.0),
                (one(&bld, "b", j), -1.0),
                (xij, -k_load),
            ];
            bld.row("8d", &format!("{i}_{j}"), terms, Sense::Ge, -k_load, guard_off_at_zero(xij, k_load));
        }
    }
    for i in cust.clone() {
        let xi0 = x(&bld, i, 0);
        let terms = vec![
            (two(&bld, "w", i, 0), 1.0),
            (one(&bld, "b", i), -1.0),
            (xi0, -k_load),
        ];
        bld.row("8e", &i.to_string(), terms, Sense::Ge, -k_load, guard_off_at_zero(xi0, k_load));
    }

    // Energy, with P(m) = alpha * m + beta expanded over each leg.
    for i in all.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            let t = scn.leg_time(i, j);
            let xij = x(&bld, i, j);
            let mut terms = Vec::new();
            if let Some(ei) = at(&bld, "e", i) {
                terms.push((ei, 1.0));
            }
            terms.push((one(&bld, "e", j), -1.0));
            terms.push((two(&bld, "w", i, j), alpha * t));
            terms.push((two(&bld, "f", i, j), alpha * t));
            terms.push((xij, k_energy));
            let rhs = k_energy - beta * t;
            bld.row("9a", &format!("{i}_{j}"), terms, Sense::Le, rhs, guard_off_at_zero(xij, k_energy));
        }
    }
    for i in cust.clone() {
        let t = scn.leg_time(i, 0);
        let xi0 = x(&bld, i, 0);
        let terms = vec![
            (one(&bld, "e", i), 1.0),
            (one(&bld, "g", i), -1.0),
            (two(&bld, "w", i, 0), alpha * t),
            (two(&bld, "f", i, 0), alpha * t),
            (xi0, k_energy),
        ];
        let rhs = k_energy - beta * t;
        bld.row("9b", &i.to_string(), terms, Sense::Le, rhs, guard_off_at_zero(xi0, k_energy));
    }
    for i in cust.clone() {
        let xi0 = x(&bld, i, 0);
        let terms = vec![(one(&bld, "g", i), 1.0), (xi0, -k_route_energy)];
        bld.row("9c", &i.to_string(), terms, Sense::Le, 0.0, guard_off_at_one(xi0, k_route_energy));
    }

    // Cost.
    let mut cost_terms = vec![(c, 1.0)];
    cost_terms.extend(cust.clone().map(|i| (x(&bld, 0, i), -p.drone_cost)));
    for i in cust.clone() {
        for j in cust.clone().filter(|&j| j != i) {
            cost_terms.push((z(&bld, i, j), p.drone_cost));
        }
    }
    if battery_types.is_empty() {
        cost_terms.extend(cust.clone().map(|i| (one(&bld, "g", i), -p.energy_price)));
    } else {
        for i in cust.clone() {
            for (t, b) in battery_types.iter().enumerate() {
                cost_terms.push((bld.id(&format!("h_{t}_{i}")), -b.cost));
            }
        }
    }
    bld.row("10a", "", cost_terms, Sense::Eq, 0.0, None);
    bld.row("10b", "", vec![(c, 1.0)], Sense::Le, p.budget, None);

    for i in cust.clone() {
        if battery_types.is_empty() {
            break;
        }
        let mut terms: Vec<(usize, f64)> = battery_types
            .iter()
            .enumerate()
            .map(|(t, b)| (bld.id(&format!("h_{t}_{i}")), b.energy))
            .collect();
        terms.push((one(&bld, "g", i), -1.0));
        bld.row("bat", &i.to_string(), terms, Sense::Ge, 0.0, None);
    }

    let objective_var = match objective {
        Objective::MinTime => l,
        Objective::MinCost => c,
    };
    Ok(MilpModel {
        n_locations: n,
        objective,
        variables: bld.variables,
        index: bld.index,
        constraints: bld.constraints,
        objective_var,
        battery_types,
    })
}

/// Model variable values that realise solution string `s`.
///
/// `drone_of_route[k]` is the drone flying the `k`-th non-empty route; each
/// drone flies its routes in string order, leaving as soon as it is back.
/// Batteries are sized exactly for each route, or picked from the model's
/// battery types by the cheapest sufficient set.
pub fn string_to_assignment(
    model: &MilpModel,
    s: &SolutionString,
    drone_of_route: &[usize],
    scn: &Scenario,
) -> Result<MilpAssignment> {
    let n = scn.n_customers();
    if model.n_locations != n || s.n_customers() != n {
        return Err(Error::Conversion(format!(
            "model has {} locations, scenario {n}, solution {}",
            model.n_locations,
            s.n_customers()
        )));
    }
    let routes: Vec<&[usize]> = s.routes().collect();
    if drone_of_route.len() != routes.len() {
        return Err(Error::Conversion(format!(
            "{} routes but {} drone assignments",
            routes.len(),
            drone_of_route.len()
        )));
    }
    let p = scn.params();
    let drones_used = {
        let mut d = drone_of_route.to_vec();
        d.sort_unstable();
        d.dedup();
        d.len()
    };
    if drones_used > p.max_drones as usize {
        return Err(Error::Conversion(format!(
            "schedule uses {drones_used} drones, at most {} allowed",
            p.max_drones
        )));
    }

    let (alpha, beta) = (p.power_model.alpha, p.power_model.beta);
    let mut asn = MilpAssignment::zeros(model);
    let mut clock: HashMap<usize, (f64, usize)> = HashMap::new();
    let mut latest = 0.0f64;
    let mut reuses = 0usize;
    let mut battery_spend = 0.0;

    for (route, &drone) in routes.iter().zip(drone_of_route) {
        let mut stops = Vec::with_capacity(route.len() + 2);
        stops.push(0);
        stops.extend_from_slice(route);
        stops.push(0);
        let total_demand: f64 = route.iter().map(|&v| scn.demand(v)).sum();

        let (mut t, mut omega, mut payload) = (0.0, 0.0, total_demand);
        for leg in stops.windows(2) {
            let dt = scn.leg_time(leg[0], leg[1]);
            t += dt;
            omega += payload * dt;
            payload -= scn.demand(leg[1]);
        }
        let last = *route.last().expect("routes are non-empty");
        let battery = if model.has_battery_types() {
            let choice = discrete_battery_assign(t, omega, &model.battery_types, &p.power_model)
                .map_err(|e| Error::Conversion(format!("route ending at {last}: {e}")))?;
            for &k in &choice.picks {
                asn.set(format!("h_{k}_{last}"), 1.0);
            }
            battery_spend += choice.cost;
            choice.weight(&model.battery_types)
        } else {
            let energy = battery_energy(t, omega, &p.power_model, p.energy_density);
            if !(energy > 0.0 && energy.is_finite()) {
                return Err(Error::Conversion(format!(
                    "route ending at {last} has no finite positive battery energy"
                )));
            }
            energy / p.energy_density
        };

        let (start, previous) = match clock.get(&drone) {
            Some(&(free_at, prev_last)) => (free_at, Some(prev_last)),
            None => (0.0, None),
        };
        if let Some(prev_last) = previous {
            asn.set(format!("z_{prev_last}_{}", route[0]), 1.0);
            reuses += 1;
        }

        let (mut now, mut consumed, mut payload) = (start, 0.0, total_demand);
        for leg in stops.windows(2) {
            let (i, j) = (leg[0], leg[1]);
            let dt = scn.leg_time(i, j);
            asn.set(format!("x_{i}_{j}"), 1.0);
            asn.set(format!("f_{i}_{j}"), payload);
            asn.set(format!("w_{i}_{j}"), battery);
            consumed += (alpha * (battery + payload) + beta) * dt;
            now += dt;
            if j == 0 {
                asn.set(format!("r_{i}"), now);
                asn.set(format!("g_{i}"), consumed);
            } else {
                asn.set(format!("a_{j}"), now);
                asn.set(format!("e_{j}"), consumed);
                asn.set(format!("b_{j}"), battery);
                latest = latest.max(now);
                payload -= scn.demand(j);
            }
        }
        clock.insert(drone, (now, last));
        if !model.has_battery_types() {
            battery_spend += p.energy_price * consumed;
        }
    }

    asn.set("l", latest);
    asn.set("c", (routes.len() - reuses) as f64 * p.drone_cost + battery_spend);
    Ok(asn)
}
