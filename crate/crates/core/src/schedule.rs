//! Greedy list scheduling of routes onto drones.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Delivery and arrival time of one route, both measured from the moment the
/// route leaves the depot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutePair {
    /// Time of the last delivery on the route (p).
    pub delivery: f64,
    /// Time the drone is back at the depot (q).
    pub arrival: f64,
}

impl RoutePair {
    pub const fn new(delivery: f64, arrival: f64) -> Self {
        Self { delivery, arrival }
    }
}

/// Per-route timing pairs in string order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteTiming {
    pub pairs: Vec<RoutePair>,
}

impl RouteTiming {
    pub fn new(pairs: Vec<RoutePair>) -> Result<Self> {
        if let Some(p) = pairs
            .iter()
            .find(|p| !(p.delivery > 0.0 && p.delivery <= p.arrival && p.arrival.is_finite()))
        {
            return Err(Error::Domain(format!(
                "route timing needs 0 < delivery <= arrival, got {p:?}"
            )));
        }
        Ok(Self { pairs })
    }

    pub fn from_tuples(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(p, q)| RoutePair::new(p, q)).collect())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Heap entry ordered so that `BinaryHeap::pop` yields the drone with the
/// smallest arrival time, lowest index first on ties.
#[derive(Debug, Clone, Copy)]
struct Slot {
    arrival: f64,
    drone: usize,
}

impl PartialEq for Slot {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Slot {}

impl PartialOrd for Slot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slot {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .arrival
            .total_cmp(&self.arrival)
            .then_with(|| other.drone.cmp(&self.drone))
    }
}

/// Where each route went under list scheduling.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleAssignment {
    pub makespan: f64,
    /// Drone index per route, in route order.
    pub drone_of_route: Vec<usize>,
    /// Departure time of each route from the depot.
    pub start_of_route: Vec<f64>,
}

/// Reusable buffers for repeated scheduling inside the annealer.
#[derive(Debug, Default)]
pub(crate) struct ListScheduler {
    heap: BinaryHeap<Slot>,
    delivery: Vec<f64>,
}

impl ListScheduler {
    pub(crate) fn run(&mut self, routes: &[RoutePair], n_drones: usize) -> f64 {
        self.run_inner(routes, n_drones, |_, _, _| {})
    }

    fn run_inner(
        &mut self,
        routes: &[RoutePair],
        n_drones: usize,
        mut on_assign: impl FnMut(usize, usize, f64),
    ) -> f64 {
        assert!(n_drones >= 1, "list scheduling needs at least one drone");
        // Drones beyond the route count stay idle at (0, 0) and never change
        // the result, so they are not materialised.
        let active = n_drones.min(routes.len()).max(1);
        self.heap.clear();
        self.delivery.clear();
        self.delivery.resize(active, 0.0);
        for drone in 0..active {
            self.heap.push(Slot { arrival: 0.0, drone });
        }
        for (k, route) in routes.iter().enumerate() {
            let slot = self.heap.pop().expect("heap holds one slot per drone");
            on_assign(k, slot.drone, slot.arrival);
            self.delivery[slot.drone] = slot.arrival + route.delivery;
            self.heap.push(Slot {
                arrival: slot.arrival + route.arrival,
                drone: slot.drone,
            });
        }
        self.delivery.iter().copied().fold(0.0, f64::max)
    }
}

/// Overall delivery time when `routes` are assigned in order to the drone
/// that is back at the depot first.
///
/// # Panics
/// If `n_drones` is zero.
pub fn list_schedule(routes: &[RoutePair], n_drones: usize) -> f64 {
    ListScheduler::default().run(routes, n_drones)
}

/// [`list_schedule`] that also reports the drone and departure time chosen
/// for every route.
pub fn list_schedule_assignment(routes: &[RoutePair], n_drones: usize) -> ScheduleAssignment {
    let mut drone_of_route = vec![0; routes.len()];
    let mut start_of_route = vec![0.0; routes.len()];
    let makespan = ListScheduler::default().run_inner(routes, n_drones, |k, drone, start| {
        drone_of_route[k] = drone;
        start_of_route[k] = start;
    });
    ScheduleAssignment {
        makespan,
        drone_of_route,
        start_of_route,
    }
}
