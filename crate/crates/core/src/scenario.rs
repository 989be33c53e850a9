//! Delivery instances: locations, demands and the physical/economic constants.
//!
//! Scenario files are TOML. Location 0 is the depot; `demands` lists one
//! entry per non-depot location in index order.
//!
//! ```toml
//! locations = [[250.0, 250.0], [10.0, 20.0], [400.0, 35.5]]
//! demands = [1.25, 0.5]
//!
//! [params]
//! drone_cost = 500.0
//! capacity = 3.0
//! # ...
//! [params.power_model]
//! alpha = 0.217
//! beta = 0.185
//!
//! [[battery_types]]
//! weight = 0.25
//! energy = 162.5
//! cost = 16.25
//! ```

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{FrameSpec, LinearPowerModel};
use crate::error::{Error, Result};

/// Planar position in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Constants shared by the cost function and the MILP.
///
/// Units: money in dollars, weight in kg, distance in m, time in s, energy in
/// kJ, power in kW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    /// Price of one drone (F).
    pub drone_cost: f64,
    /// Battery plus payload capacity (Q).
    pub capacity: f64,
    /// Cruise speed in m/s (v).
    pub speed: f64,
    /// Time spent at each location to descend, deliver and ascend (tau).
    pub service_time: f64,
    /// Battery energy density in kJ/kg (xi).
    pub energy_density: f64,
    /// Price of one kJ of battery energy (epsilon).
    pub energy_price: f64,
    pub power_model: LinearPowerModel,
    /// Upper bound on drones that may be purchased (M).
    pub max_drones: u32,
    /// B.
    pub budget: f64,
    /// T, seconds.
    pub time_limit: f64,
    /// Penalty and linearisation constant (K).
    pub big_k: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            drone_cost: 500.0,
            capacity: 3.0,
            speed: 6.0,
            service_time: 60.0,
            energy_density: 650.0,
            energy_price: 0.1,
            power_model: LinearPowerModel::measured_hexacopter(),
            max_drones: 1000,
            budget: 1500.0,
            time_limit: 600.0,
            big_k: 1e6,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("drone_cost", self.drone_cost),
            ("capacity", self.capacity),
            ("speed", self.speed),
            ("service_time", self.service_time),
            ("energy_density", self.energy_density),
            ("energy_price", self.energy_price),
            ("budget", self.budget),
            ("time_limit", self.time_limit),
            ("big_k", self.big_k),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidScenario(format!(
                    "parameter {name} must be positive and finite, got {value}"
                )));
            }
        }
        if self.max_drones < 1 {
            return Err(Error::InvalidScenario("max_drones must be at least 1".into()));
        }
        self.power_model
            .validate()
            .map_err(|e| Error::InvalidScenario(e.to_string()))
    }

    /// Travel time of one leg: service time plus flight time.
    #[inline]
    pub fn leg_time(&self, distance: f64) -> f64 {
        self.service_time + distance / self.speed
    }
}

/// A purchasable battery type for the discrete-battery variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryType {
    /// kg.
    pub weight: f64,
    /// kJ.
    pub energy: f64,
    pub cost: f64,
}

impl BatteryType {
    pub fn validate(&self) -> Result<()> {
        if [self.weight, self.energy, self.cost]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidScenario(format!(
                "battery type fields must be positive, got {self:?}"
            )))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    locations: Vec<Point>,
    demands: Vec<f64>,
    params: Params,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    battery_types: Vec<BatteryType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<FrameSpec>,
}

/// An immutable delivery instance with a precomputed distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    locations: Vec<Point>,
    /// Indexed by location; entry 0 (depot) is always zero.
    demand: Vec<f64>,
    params: Params,
    battery_types: Vec<BatteryType>,
    frame: Option<FrameSpec>,
    dist: Vec<f64>,
}

impl Scenario {
    /// `demands[k]` belongs to location `k + 1`.
    pub fn new(locations: Vec<Point>, demands: Vec<f64>, params: Params) -> Result<Self> {
        Self::with_extras(locations, demands, params, Vec::new(), None)
    }

    pub fn with_extras(
        locations: Vec<Point>,
        demands: Vec<f64>,
        params: Params,
        battery_types: Vec<BatteryType>,
        frame: Option<FrameSpec>,
    ) -> Result<Self> {
        if locations.len() < 2 {
            return Err(Error::InvalidScenario(
                "a scenario needs a depot and at least one delivery location".into(),
            ));
        }
        if demands.len() != locations.len() - 1 {
            return Err(Error::InvalidScenario(format!(
                "{} delivery locations but {} demands",
                locations.len() - 1,
                demands.len()
            )));
        }
        if let Some(p) = locations.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidScenario(format!("non-finite coordinate {p:?}")));
        }
        if let Some((k, d)) = demands
            .iter()
            .enumerate()
            .find(|(_, d)| !(**d > 0.0 && d.is_finite()))
        {
            return Err(Error::InvalidScenario(format!(
                "demand of location {} must be positive, got {d}",
                k + 1
            )));
        }
        params.validate()?;
        for b in &battery_types {
            b.validate()?;
        }
        if let Some(f) = &frame {
            f.validate().map_err(|e| Error::InvalidScenario(e.to_string()))?;
        }

        let n = locations.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = locations[i].distance(&locations[j]);
            }
        }
        let mut demand = Vec::with_capacity(n);
        demand.push(0.0);
        demand.extend_from_slice(&demands);
        Ok(Self {
            locations,
            demand,
            params,
            battery_types,
            frame,
            dist,
        })
    }

    /// Random instance on a square of `area_km2` with the depot at its centre.
    ///
    /// Coordinates and demands are drawn i.i.d. uniform from a ChaCha8 stream
    /// seeded with `seed`: for each location in index order, x then y, and
    /// then all demands in index order.
    pub fn generate_random(
        n_locations: usize,
        area_km2: f64,
        demand_range: (f64, f64),
        seed: u64,
        params: Params,
    ) -> Result<Self> {
        if n_locations < 1 {
            return Err(Error::InvalidScenario("need at least one location".into()));
        }
        if !(area_km2 > 0.0 && area_km2.is_finite()) {
            return Err(Error::InvalidScenario(format!("area must be positive, got {area_km2}")));
        }
        let (lo, hi) = demand_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "demand range must satisfy 0 < lo <= hi, got {demand_range:?}"
            )));
        }
        let side = (area_km2 * 1.0e6).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut locations = Vec::with_capacity(n_locations + 1);
        locations.push(Point::new(side / 2.0, side / 2.0));
        for _ in 0..n_locations {
            let x = rng.gen_range(0.0..side);
            let y = rng.gen_range(0.0..side);
            locations.push(Point::new(x, y));
        }
        let demands = (0..n_locations)
            .map(|_| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect();
        Self::new(locations, demands, params)
    }

    /// Number of delivery locations, excluding the depot.
    #[inline]
    pub fn n_customers(&self) -> usize {
        self.locations.len() - 1
    }

    pub fn locations(&self) -> &[Point] {
        &self.locations
    }

    #[inline]
    pub fn demand(&self, i: usize) -> f64 {
        self.demand[i]
    }

    /// Demands of locations `1..=n`.
    pub fn demands(&self) -> &[f64] {
        &self.demand[1..]
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn battery_types(&self) -> &[BatteryType] {
        &self.battery_types
    }

    pub fn frame(&self) -> Option<&FrameSpec> {
        self.frame.as_ref()
    }

    /// Same locations and demands under different constants.
    pub fn with_params(&self, params: Params) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            ..self.clone()
        })
    }

    pub fn with_battery_types(&self, battery_types: Vec<BatteryType>) -> Result<Self> {
        for b in &battery_types {
            b.validate()?;
        }
        Ok(Self {
            battery_types,
            ..self.clone()
        })
    }

    /// Euclidean distance in metres between two location indices.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let len = self.locations.len();
        for index in [i, j] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        Ok(self.dist(i, j))
    }

    #[inline]
    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.locations.len() + j]
    }

    /// Service plus flight time between two locations.
    #[inline]
    pub(crate) fn leg_time(&self, i: usize, j: usize) -> f64 {
        self.params.leg_time(self.dist(i, j))
    }

    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_toml_string(&self) -> String {
        let file = ScenarioFile {
            locations: self.locations.clone(),
            demands: self.demands().to_vec(),
            params: self.params,
            battery_types: self.battery_types.clone(),
            frame: self.frame,
        };
        toml::to_string(&file).expect("scenario fields are always representable in TOML")
    }

    /// Parses a scenario; `origin` only labels error messages.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        if file.demands.len() + 1 != file.locations.len() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                message: format!(
                    "`demands` has {} entries but there are {} delivery locations",
                    file.demands.len(),
                    file.locations.len().saturating_sub(1)
                ),
            });
        }
        Self::with_extras(
            file.locations,
            file.demands,
            file.params,
            file.battery_types,
            file.frame,
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_toml_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    /// Full distance matrix as CSV, one row per origin location.
    pub fn write_distance_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let n = self.locations.len();
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<String> = std::iter::once("from".to_string())
            .chain((0..n).map(|j| j.to_string()))
            .collect();
        w.write_record(&header)?;
        for i in 0..n {
            let row: Vec<String> = std::iter::once(i.to_string())
                .chain((0..n).map(|j| self.dist(i, j).to_string()))
                .collect();
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<distance csv>", e))?;
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} locations, total demand {:.3} kg",
            self.n_customers(),
            self.demands().iter().sum::<f64>()
        )
    }
}
