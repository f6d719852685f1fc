//! First-order level shifts for `l >= 2` and the oscillator-excitation
//! channel of second order.
//!
//! All first-order values are coefficients of `t²` in hartree.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::hydrogen::{expectation_quadrature_with, inv_r_moment_closed, radial, radial_quadrature_spec, QuantumState};
use crate::nc_model::NcParameters;
use crate::specfun::{integrate_semiinfinite, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionMethod {
    ClosedForm,
    Assembled,
    EffectiveHamiltonian,
}

/// Split of `ΔE⁽¹⁾/t²` into the three pieces of the effective operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTerms {
    /// `-(1/8)⟨L²/r⁵⟩`
    pub theta_l_squared: f64,
    /// `(1/24)⟨r⁻²p²r⁻¹ + r⁻¹p²r⁻²⟩`
    pub kinetic_cross: f64,
    /// `(1/24)⟨r⁻⁵⟩`
    pub inv_r5: f64,
}

impl CorrectionTerms {
    pub fn sum(&self) -> f64 {
        self.theta_l_squared + self.kinetic_cross + self.inv_r5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub state: QuantumState,
    /// `ΔE⁽¹⁾` per unit `t²`, hartree.
    pub value: f64,
    pub terms: CorrectionTerms,
    pub method: CorrectionMethod,
}

impl CorrectionResult {
    fn new(state: QuantumState, terms: CorrectionTerms, method: CorrectionMethod) -> Self {
        Self {
            state,
            value: terms.sum(),
            terms,
            method,
        }
    }

    /// Bracket `B(n,l)` with `ΔE⁽¹⁾ = -(t²/n⁵) B`.
    pub fn bracket(&self) -> f64 {
        -self.value * (self.state.n() as f64).powi(5)
    }

    /// `ΔE⁽¹⁾` in hartree for the given strength.
    pub fn energy(&self, nc: &NcParameters) -> f64 {
        self.value * nc.theta2_mean()
    }
}

fn require_l2(state: QuantumState) -> Result<()> {
    match state.l() {
        0 => Err(Error::DivergentCorrection {
            l: 0,
            factors: "l".into(),
        }),
        1 => Err(Error::DivergentCorrection {
            l: 1,
            factors: "l-1".into(),
        }),
        _ => Ok(()),
    }
}

// The four bracket pieces T1..T4 with B = T1 - T2 + T3 - T4.
fn bracket_pieces(n: f64, l: f64) -> [f64; 4] {
    let ll = l * (l + 1.0);
    let x = 5.0 * n * n - 3.0 * ll + 1.0;
    let t1 = 1.0 / (6.0 * ll * (2.0 * l + 1.0));
    let t2 = (6.0 * n * n - 2.0 * ll) / (3.0 * ll * (2.0 * l + 1.0) * (2.0 * l + 3.0) * (2.0 * l - 1.0));
    let t3 = x / (2.0 * (l + 2.0) * (2.0 * l + 1.0) * (2.0 * l + 3.0) * (l - 1.0) * (2.0 * l - 1.0));
    let t4 = 5.0 / 6.0 * x
        / (ll * (l + 2.0) * (2.0 * l + 1.0) * (2.0 * l + 3.0) * (l - 1.0) * (2.0 * l - 1.0));
    [t1, t2, t3, t4]
}

/// Bracket `B(n,l)` of the closed form.
pub fn bracket_closed(state: QuantumState) -> Result<f64> {
    require_l2(state)?;
    let [t1, t2, t3, t4] = bracket_pieces(state.n() as f64, state.l() as f64);
    Ok(t1 - t2 + t3 - t4)
}

/// `ΔE⁽¹⁾ = -(t²/n⁵)·B(n,l)`.
pub fn delta_e1_closed(state: QuantumState) -> Result<CorrectionResult> {
    require_l2(state)?;
    let n5 = (state.n() as f64).powi(5);
    let [t1, t2, t3, t4] = bracket_pieces(state.n() as f64, state.l() as f64);
    let terms = CorrectionTerms {
        theta_l_squared: -t3 / n5,
        kinetic_cross: -(t1 - t2 - 0.8 * t4) / n5,
        inv_r5: t4 / (5.0 * n5),
    };
    Ok(CorrectionResult::new(state, terms, CorrectionMethod::ClosedForm))
}

/// Source of the radial moments for [`delta_e1_assembled_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    Closed,
    Quadrature,
}

/// Assembly from `⟨r⁻³⟩, ⟨r⁻⁴⟩, ⟨r⁻⁵⟩` with `⟨(θ·L)²⟩ = (t²/3) l(l+1)`.
pub fn delta_e1_assembled(state: QuantumState) -> Result<CorrectionResult> {
    delta_e1_assembled_with(state, MomentSource::Closed)
}

pub fn delta_e1_assembled_with(state: QuantumState, source: MomentSource) -> Result<CorrectionResult> {
    require_l2(state)?;
    let moment = |k: u32| -> Result<f64> {
        match source {
            MomentSource::Closed => inv_r_moment_closed(state, k),
            MomentSource::Quadrature => {
                let spec = radial_quadrature_spec(state.n());
                Ok(expectation_quadrature_with(state, |r| r.powi(-(k as i32)), &spec)?.value)
            }
        }
    };
    let (m3, m4, m5) = (moment(3)?, moment(4)?, moment(5)?);
    let n = state.n() as f64;
    let l = state.l() as f64;
    let terms = CorrectionTerms {
        theta_l_squared: -(3.0 / 8.0) * (l * (l + 1.0) / 3.0) * m5,
        kinetic_cross: (1.0 / 24.0) * (-2.0 / (n * n) * m3 + 4.0 * m4 + 4.0 * m5),
        inv_r5: m5 / 24.0,
    };
    Ok(CorrectionResult::new(state, terms, CorrectionMethod::Assembled))
}

/// `∫ (|∂_θ Y|² + m²|Y|²/sin²θ) dΩ / ∫ |Y|² dΩ` by Gauss–Legendre in cos θ.
///
/// Equals `l(l+1)` for every `m`.
pub fn angular_factor(l: u32, m: i32) -> f64 {
    let m = m.unsigned_abs();
    let gl = GaussLegendre::new(l as usize + 4).expect("order >= 4");
    let mut norm = 0.0;
    let mut grad = 0.0;
    for (&x, &w) in gl.nodes().iter().zip(gl.weights()) {
        let (p, p_prev) = assoc_legendre_pair(l, m, x);
        let s2 = 1.0 - x * x;
        // (1 - x²) dP/dx = (l + m) P_{l-1} - l x P_l
        let dp_s = (l + m) as f64 * p_prev - l as f64 * x * p;
        norm += w * p * p;
        grad += w * (dp_s * dp_s / s2 + (m * m) as f64 * p * p / s2);
    }
    grad / norm
}

// (P_l^m(x), P_{l-1}^m(x)), unnormalized, P_{m-1}^m = 0.
fn assoc_legendre_pair(l: u32, m: u32, x: f64) -> (f64, f64) {
    let s = (1.0 - x * x).sqrt();
    let mut pmm = 1.0;
    for i in 1..=m {
        pmm *= -((2 * i - 1) as f64) * s;
    }
    if l == m {
        return (pmm, 0.0);
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    for k in (m + 2)..=l {
        let next = ((2 * k - 1) as f64 * x * cur - (k + m - 1) as f64 * prev) / (k - m) as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Expectation of the two `⟨θ²⟩` terms of the effective Hamiltonian,
/// `-L²/(8r⁵) + (r⁻²p²r⁻¹ + r⁻¹p²r⁻² + r⁻⁵)/24`, by radial quadrature.
///
/// The kinetic pieces are integrated by parts,
/// `⟨r⁻²p²r⁻¹ + h.c.⟩ = 2∫ (g'h' + A g h / r²) r² dr` with `g = R/r²`,
/// `h = R/r` and `A` the numerically integrated angular factor of `Y_lm`.
pub fn delta_e1_effective(state: QuantumState) -> Result<CorrectionResult> {
    require_l2(state)?;
    let rf = radial(state);
    let a = angular_factor(state.l(), state.m());
    let spec = radial_quadrature_spec(state.n());
    let m5 = integrate_semiinfinite(
        |r| {
            let v = rf.eval(r);
            v * v / (r * r * r)
        },
        &spec,
    )?
    .value;
    let kin = integrate_semiinfinite(
        |r| {
            let v = rf.eval(r);
            let d = rf.derivative(r);
            let g = v / (r * r);
            let h = v / r;
            let dg = d / (r * r) - 2.0 * v / (r * r * r);
            let dh = d / r - v / (r * r);
            (dg * dh + a * g * h / (r * r)) * r * r
        },
        &spec,
    )?
    .value;
    let terms = CorrectionTerms {
        theta_l_squared: -a * m5 / 8.0,
        kinetic_cross: 2.0 * kin / 24.0,
        inv_r5: m5 / 24.0,
    };
    Ok(CorrectionResult::new(state, terms, CorrectionMethod::EffectiveHamiltonian))
}

/// Second-order shift from the term linear in θ through one-quantum
/// excitation of the auxiliary oscillators, hydrogen state held fixed:
/// `-(t²/3)(m⟨r⁻³⟩/2)² / (2ω)` in atomic units.
///
/// Only this channel is computed; it is not the full second-order sum.
/// `omega` is in rad/s.
pub fn second_order_oscillator_channel(state: QuantumState, omega: f64, nc: &NcParameters) -> Result<f64> {
    second_order_oscillator_channel_with(state, omega, nc, &PhysicalConstants::codata2018())
}

pub fn second_order_oscillator_channel_with(
    state: QuantumState,
    omega: f64,
    nc: &NcParameters,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite and > 0, got {omega}")));
    }
    if state.l() == 0 || state.m() == 0 {
        return Ok(0.0);
    }
    let omega_au = omega * constants.atomic_time_s();
    let m3 = inv_r_moment_closed(state, 3)?;
    let lin = state.m() as f64 * m3 / 2.0;
    Ok(-(nc.theta2_mean() / 3.0) * lin * lin / (2.0 * omega_au))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn st(n: i64, l: i64) -> QuantumState {
        QuantumState::nl(n, l).unwrap()
    }

    #[test]
    fn closed_form_example() {
        let r = delta_e1_closed(st(3, 2)).unwrap();
        assert_relative_eq!(r.bracket(), 1.0 / 135.0, max_relative = 1e-13);
        assert_relative_eq!(r.value, -1.0 / 32_805.0, max_relative = 1e-13);
        assert_relative_eq!(r.value, -3.048e-5, max_relative = 1e-3);
        assert_relative_eq!(r.value, r.terms.sum(), max_relative = 1e-12);
    }

    #[test]
    fn divergent_for_small_l() {
        assert!(matches!(
            delta_e1_closed(st(3, 1)),
            Err(Error::DivergentCorrection { l: 1, .. })
        ));
        assert!(matches!(
            delta_e1_assembled(st(3, 0)),
            Err(Error::DivergentCorrection { l: 0, .. })
        ));
        assert!(delta_e1_effective(st(2, 1)).is_err());
    }

    #[test]
    fn closed_matches_assembled_terms() {
        for (n, l) in [(3, 2), (4, 2), (5, 3), (10, 9)] {
            let c = delta_e1_closed(st(n, l)).unwrap();
            let a = delta_e1_assembled(st(n, l)).unwrap();
            assert_relative_eq!(c.value, a.value, max_relative = 1e-12);
            assert_relative_eq!(c.terms.theta_l_squared, a.terms.theta_l_squared, max_relative = 1e-12);
            assert_relative_eq!(c.terms.kinetic_cross, a.terms.kinetic_cross, max_relative = 1e-12);
            assert_relative_eq!(c.terms.inv_r5, a.terms.inv_r5, max_relative = 1e-12);
        }
    }

    #[test]
    fn kinetic_identity_exact_values() {
        // ⟨r⁻²p²r⁻¹ + h.c.⟩ + ⟨r⁻⁵⟩ = 24·(kinetic_cross + inv_r5), exact rationals
        for ((n, l), exact) in [
            ((3, 2), 28.0 / 10_935.0),
            ((4, 2), 43.0 / 30_720.0),
            ((4, 3), 9.0 / 71_680.0),
            ((5, 3), 4.0 / 46_875.0),
            ((6, 2), 2_363.0 / 4_898_880.0),
        ] {
            let e = delta_e1_effective(st(n, l)).unwrap();
            assert_relative_eq!(24.0 * (e.terms.kinetic_cross + e.terms.inv_r5), exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn effective_matches_closed() {
        for (n, l) in [(3, 2), (4, 3)] {
            let c = delta_e1_closed(st(n, l)).unwrap();
            let e = delta_e1_effective(st(n, l)).unwrap();
            assert_relative_eq!(e.value, c.value, max_relative = 1e-8);
        }
    }

    #[test]
    fn angular_factor_is_l_l_plus_1() {
        for l in 0..=9u32 {
            for m in -(l as i32)..=(l as i32) {
                assert_relative_eq!(angular_factor(l, m), (l * (l + 1)) as f64, max_relative = 1e-12, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn energy_scales_with_t_squared() {
        let c = delta_e1_closed(st(5, 2)).unwrap();
        let p1 = NcParameters::from_t(1e-3, 1.0, 1.0).unwrap();
        let p2 = NcParameters::from_t(2e-3, 1.0, 1.0).unwrap();
        assert_eq!(c.energy(&p2) / c.energy(&p1), 4.0);
        let p0 = NcParameters::from_t(0.0, 1.0, 1.0).unwrap();
        assert_eq!(c.energy(&p0), 0.0);
    }

    #[test]
    fn second_order_channel() {
        let nc = NcParameters::from_t(1e-10, 1.616255e-35, 5.29177210903e-11).unwrap();
        let s = QuantumState::new(3, 0, 0).unwrap();
        assert_eq!(second_order_oscillator_channel(s, 1e20, &nc).unwrap(), 0.0);
        let p = QuantumState::new(3, 2, 1).unwrap();
        let v1 = second_order_oscillator_channel(p, 1e20, &nc).unwrap();
        let v2 = second_order_oscillator_channel(p, 0.5e20, &nc).unwrap();
        assert!(v1 < 0.0);
        assert_relative_eq!(v2 / v1, 2.0, max_relative = 1e-14);
        assert_eq!(second_order_oscillator_channel(QuantumState::new(3, 2, 0).unwrap(), 1e20, &nc).unwrap(), 0.0);
        assert!(second_order_oscillator_channel(p, 0.0, &nc).is_err());
        assert!(second_order_oscillator_channel(p, -1.0, &nc).is_err());
    }
}
