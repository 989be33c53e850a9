//! Multirotor hover power as a function of carried weight.
//!
//! The exact model follows momentum theory for `n` rotors sharing the total
//! mass equally; the linear model `P(m) = alpha * m + beta` is what the route
//! cost function and the MILP consume. Power here is in watts unless a
//! [`LinearPowerModel`] has been converted with
//! [`LinearPowerModel::to_kilowatts`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard gravity in m/s².
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Physical description of a multirotor frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub rotor_count: u32,
    /// Air density in kg/m³.
    pub fluid_density: f64,
    /// Disc area of a single rotor in m².
    pub rotor_disc_area: f64,
    /// Frame weight in kg.
    pub frame_weight: f64,
    /// m/s².
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

impl FrameSpec {
    /// Six-rotor frame used for the reference fit: 1.204 kg/m³ air, 0.2 m²
    /// discs, 1.5 kg frame.
    pub fn hexacopter() -> Self {
        Self {
            rotor_count: 6,
            fluid_density: 1.204,
            rotor_disc_area: 0.2,
            frame_weight: 1.5,
            gravity: STANDARD_GRAVITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rotor_count >= 1
            && self.fluid_density > 0.0
            && self.rotor_disc_area > 0.0
            && self.frame_weight >= 0.0
            && self.gravity > 0.0
            && [self.fluid_density, self.rotor_disc_area, self.frame_weight, self.gravity]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid frame specification {self:?}")))
        }
    }
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self::hexacopter()
    }
}

/// Hover power in W of a single rotor producing `thrust` newtons.
pub fn power_single_rotor(thrust: f64, frame: &FrameSpec) -> Result<f64> {
    if !(thrust >= 0.0) {
        return Err(Error::Domain(format!("thrust must be non-negative, got {thrust}")));
    }
    frame.validate()?;
    Ok(thrust.powf(1.5) / (2.0 * frame.fluid_density * frame.rotor_disc_area).sqrt())
}

/// Hover power in W of the whole frame carrying `carried_weight` kg of
/// battery and payload.
pub fn power_exact(carried_weight: f64, frame: &FrameSpec) -> Result<f64> {
    if !(carried_weight >= 0.0) {
        return Err(Error::Domain(format!(
            "carried weight must be non-negative, got {carried_weight}"
        )));
    }
    frame.validate()?;
    Ok(exact_unchecked(carried_weight, frame))
}

fn exact_unchecked(m: f64, frame: &FrameSpec) -> f64 {
    let g = frame.gravity;
    let denom = 2.0 * frame.fluid_density * frame.rotor_disc_area * f64::from(frame.rotor_count);
    (frame.frame_weight + m).powf(1.5) * (g * g * g / denom).sqrt()
}

/// `P(m) = alpha * m + beta`.
///
/// The unit family is whatever the coefficients carry: the fit produces W/kg
/// and W, while scenario parameters store kW/kg and kW so that power times
/// seconds gives kJ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPowerModel {
    pub alpha: f64,
    pub beta: f64,
}

impl LinearPowerModel {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// Coefficients measured on the reference hexacopter, in kW/kg and kW.
    pub const fn measured_hexacopter() -> Self {
        Self::new(0.217, 0.185)
    }

    #[inline]
    pub fn power(&self, carried_weight: f64) -> f64 {
        self.alpha * carried_weight + self.beta
    }

    /// W-based coefficients to kW-based ones.
    pub fn to_kilowatts(self) -> Self {
        Self::new(self.alpha / 1000.0, self.beta / 1000.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "power model needs alpha > 0 and beta > 0, got alpha={} beta={}",
                self.alpha, self.beta
            )))
        }
    }
}

/// Linear evaluation of the power model. Kept as a free function to mirror
/// [`power_exact`].
pub fn power_linear(carried_weight: f64, model: &LinearPowerModel) -> f64 {
    model.power(carried_weight)
}

/// Quality of a linear fit against the exact model, measured on the fit grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub mean_percent_error: f64,
    /// W.
    pub max_abs_difference: f64,
    pub fit_range: (f64, f64),
    pub step: f64,
    pub samples: usize,
}

/// Uniform grid `lo, lo + step, ...` up to and including `hi` (within a
/// rounding tolerance of one millionth of a step).
pub fn weight_grid(range: (f64, f64), step: f64) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::Domain(format!(
            "weight grid needs a non-empty finite range and positive step, got {range:?} step {step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-6).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

/// Ordinary least-squares fit of [`power_exact`] sampled on a uniform grid.
///
/// The returned coefficients are in W/kg and W. They are not validated
/// against the `alpha > 0, beta > 0` invariant because wide ranges can push
/// the intercept negative.
pub fn fit_linear(
    frame: &FrameSpec,
    range: (f64, f64),
    step: f64,
) -> Result<(LinearPowerModel, FitReport)> {
    frame.validate()?;
    if range.0 < 0.0 {
        return Err(Error::Domain("fit range must start at a non-negative weight".into()));
    }
    let grid = weight_grid(range, step)?;
    if grid.len() < 2 {
        return Err(Error::Domain(format!(
            "fit needs at least two samples, grid has {}",
            grid.len()
        )));
    }
    let power: Vec<f64> = grid.iter().map(|&m| exact_unchecked(m, frame)).collect();

    let n = grid.len() as f64;
    let mean_m = grid.iter().sum::<f64>() / n;
    let mean_p = power.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&m, &p) in grid.iter().zip(&power) {
        sxy += (m - mean_m) * (p - mean_p);
        sxx += (m - mean_m) * (m - mean_m);
    }
    let alpha = sxy / sxx;
    let model = LinearPowerModel::new(alpha, mean_p - alpha * mean_m);

    let mut pct = 0.0;
    let mut max_abs: f64 = 0.0;
    for (&m, &p) in grid.iter().zip(&power) {
        let diff = (model.power(m) - p).abs();
        pct += diff / p;
        max_abs = max_abs.max(diff);
    }
    let report = FitReport {
        mean_percent_error: 100.0 * pct / n,
        max_abs_difference: max_abs,
        fit_range: range,
        step,
        samples: grid.len(),
    };
    Ok((model, report))
}
