//! Upper bounds on the noncommutativity from the 1s–2s measurement.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::hydrogen::energy0;
use crate::nc_model::NcParameters;
use crate::ns_series::{delta_e_ns, S1S0};

/// Measured 1s–2s line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentInput {
    /// Absolute frequency in Hz. Carried for provenance and a sanity check
    /// of the constants table; the bound itself only uses the uncertainty.
    pub frequency_hz: f64,
    pub rel_uncertainty: f64,
    #[serde(default)]
    pub source: String,
}

impl ExperimentInput {
    /// The 2011 MPQ hydrogen 1s–2s measurement.
    pub fn hydrogen_1s2s() -> Self {
        Self {
            frequency_hz: 2_466_061_413_187_018.0,
            rel_uncertainty: 4.5e-15,
            source: "H 1s-2s, MPQ 2011".into(),
        }
    }

    pub fn with_uncertainty(mut self, rel_uncertainty: f64) -> Self {
        self.rel_uncertainty = rel_uncertainty;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_uncertainty > 0.0) || !self.rel_uncertainty.is_finite() {
            return Err(Error::Domain(format!(
                "rel_uncertainty must be finite and > 0, got {}",
                self.rel_uncertainty
            )));
        }
        if !(self.frequency_hz > 0.0) || !self.frequency_hz.is_finite() {
            return Err(Error::Domain(format!(
                "frequency_hz must be finite and > 0, got {}",
                self.frequency_hz
            )));
        }
        Ok(())
    }
}

impl Default for ExperimentInput {
    fn default() -> Self {
        Self::hydrogen_1s2s()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub rel_uncertainty: f64,
    pub coefficient: f64,
    pub t_bound: f64,
    pub hbar_sqrt_theta2_bound_m2: f64,
    pub alpha_bound: f64,
    pub bohr_radius_m: f64,
    pub planck_length_m: f64,
    pub constants_label: String,
}

/// `(7/(3√6)) S_1s(0)`: relative 1s–2s shift per unit `t`.
pub fn relative_shift_coefficient() -> f64 {
    relative_shift_coefficient_with(S1S0)
}

pub fn relative_shift_coefficient_with(s1s0: f64) -> f64 {
    7.0 / (3.0 * 6f64.sqrt()) * s1s0
}

pub fn bound_from_uncertainty(input: &ExperimentInput, constants: &PhysicalConstants) -> Result<BoundResult> {
    input.validate()?;
    constants.validate()?;
    let coefficient = relative_shift_coefficient();
    let t_bound = input.rel_uncertainty / coefficient;
    let a = constants.bohr_radius_m;
    let lp = constants.planck_length_m;
    let hbar_sqrt_theta2 = t_bound * a * a;
    Ok(BoundResult {
        rel_uncertainty: input.rel_uncertainty,
        coefficient,
        t_bound,
        hbar_sqrt_theta2_bound_m2: hbar_sqrt_theta2,
        alpha_bound: hbar_sqrt_theta2 / (1.5f64.sqrt() * lp * lp),
        bohr_radius_m: a,
        planck_length_m: lp,
        constants_label: constants.label.clone(),
    })
}

/// Relative 1s–2s shift `|ΔE₂ₛ − ΔE₁ₛ| / (E⁰₂ − E⁰₁)` at strength `nc`.
pub fn relative_shift(nc: &NcParameters) -> Result<f64> {
    let shift = delta_e_ns(2, nc)? - delta_e_ns(1, nc)?;
    let gap = energy0(2)? - energy0(1)?;
    Ok((shift / gap).abs())
}

/// Diagnostics of feeding a bound back through the level shifts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundTrip {
    /// Relative defect of the recovered uncertainty, via `t_bound`.
    pub via_t: f64,
    /// Same, starting from `alpha_bound` and the constants table.
    pub via_alpha: f64,
    /// `(3/8)E_h/h` against the measured frequency, relative.
    pub frequency_defect: f64,
}

/// Largest plausible gap between `(3/8)E_h/h` and the measured line:
/// reduced mass (5.4e-4) plus Lamb and fine structure.
pub const FREQUENCY_TOLERANCE: f64 = 2e-3;

pub fn round_trip(
    input: &ExperimentInput,
    bound: &BoundResult,
    constants: &PhysicalConstants,
) -> Result<RoundTrip> {
    constants.validate()?;
    let from_t = NcParameters::from_t(bound.t_bound, constants.planck_length_m, constants.bohr_radius_m)?;
    let from_alpha = NcParameters::from_alpha(bound.alpha_bound, constants.planck_length_m, constants.bohr_radius_m)?;
    let rel = input.rel_uncertainty;
    let gap_hz = 0.375 * constants.hartree_j / (2.0 * std::f64::consts::PI * constants.hbar_js);
    Ok(RoundTrip {
        via_t: (relative_shift(&from_t)? / rel - 1.0).abs(),
        via_alpha: (relative_shift(&from_alpha)? / rel - 1.0).abs(),
        frequency_defect: (gap_hz / input.frequency_hz - 1.0).abs(),
    })
}

impl RoundTrip {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.via_t <= rel_tol && self.via_alpha <= rel_tol && self.frequency_defect <= FREQUENCY_TOLERANCE
    }
}
