//! Eversion force from pressure-to-grow measurements.
//!
//! Short robots of several diameters are pressurised until they grow. Since
//! `P_e = Fe / A`, the eversion force is the slope of pressure-to-grow
//! against inverse area, fitted through the origin.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::statics::cross_section_area;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeSample {
    /// Cross-sectional area (m^2).
    pub area: f64,
    /// Pressure at which growth began (Pa).
    pub pressure_to_grow: f64,
}

impl FeSample {
    pub fn new(area: f64, pressure_to_grow: f64) -> Result<Self> {
        check_positive(area, "sample area")?;
        check_non_negative(pressure_to_grow, "sample pressure to grow")?;
        Ok(FeSample {
            area,
            pressure_to_grow,
        })
    }

    pub fn from_diameter(diameter: f64, pressure_to_grow: f64) -> Result<Self> {
        check_positive(diameter, "sample diameter")?;
        Self::new(cross_section_area(diameter), pressure_to_grow)
    }

    /// `P_e * A`, the force this sample alone would imply.
    pub fn implied_force(&self) -> f64 {
        self.pressure_to_grow * self.area
    }
}

/// Ordinary least squares line `P_e = slope / A + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnconstrainedFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeFit {
    /// Fitted eversion force (N).
    pub force: f64,
    /// `P_e - Fe / A` per sample (Pa).
    pub residuals: Vec<f64>,
    /// `P_e * A` per sample (N).
    pub implied_forces: Vec<f64>,
    /// Diagnostic fit with an intercept; `None` when all areas coincide.
    pub unconstrained: Option<UnconstrainedFit>,
}

/// Least-squares slope through the origin: `Fe = sum(P_e/A) / sum(1/A^2)`.
pub fn fit_eversion_force(samples: &[FeSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("at least one pressure-to-grow sample is required"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for s in samples {
        check_positive(s.area, "sample area")?;
        check_non_negative(s.pressure_to_grow, "sample pressure to grow")?;
        let x = s.area.recip();
        num += s.pressure_to_grow * x;
        den += x * x;
    }
    Ok(num / den)
}

/// The through-origin fit with residuals and the unconstrained diagnostic.
pub fn fit_eversion_force_report(samples: &[FeSample]) -> Result<FeFit> {
    let force = fit_eversion_force(samples)?;
    let residuals = samples
        .iter()
        .map(|s| s.pressure_to_grow - force / s.area)
        .collect();
    let implied_forces = samples.iter().map(FeSample::implied_force).collect();
    Ok(FeFit {
        force,
        residuals,
        implied_forces,
        unconstrained: unconstrained_fit(samples),
    })
}

fn unconstrained_fit(samples: &[FeSample]) -> Option<UnconstrainedFit> {
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.area.recip()).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.pressure_to_grow).sum::<f64>() / n;
    let (sxx, sxy) = samples.iter().fold((0.0, 0.0), |(sxx, sxy), s| {
        let dx = s.area.recip() - mean_x;
        (sxx + dx * dx, sxy + dx * (s.pressure_to_grow - mean_y))
    });
    if sxx <= f64::EPSILON * mean_x * mean_x * n {
        return None;
    }
    let slope = sxy / sxx;
    Some(UnconstrainedFit {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}
