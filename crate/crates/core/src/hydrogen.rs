//! Hydrogen bound states in atomic units (a_B = 1, energies in hartree).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{integrate_semiinfinite, laguerre, ln_gamma, QuadratureResult, QuadratureSpec};

/// Quantum numbers `(n, l, m)` with `n >= 1`, `l < n`, `|m| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct QuantumState {
    n: u32,
    l: u32,
    m: i32,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    n: i64,
    l: i64,
    #[serde(default)]
    m: i64,
}

impl TryFrom<RawState> for QuantumState {
    type Error = Error;
    fn try_from(r: RawState) -> Result<Self> {
        QuantumState::new(r.n, r.l, r.m)
    }
}

impl From<QuantumState> for RawState {
    fn from(s: QuantumState) -> Self {
        RawState {
            n: s.n as i64,
            l: s.l as i64,
            m: s.m as i64,
        }
    }
}

impl QuantumState {
    pub fn new(n: i64, l: i64, m: i64) -> Result<Self> {
        let ok = n >= 1 && n <= u32::MAX as i64 && l >= 0 && l < n && m.abs() <= l;
        if !ok {
            return Err(Error::InvalidState { n, l, m });
        }
        Ok(Self {
            n: n as u32,
            l: l as u32,
            m: m as i32,
        })
    }

    /// The `m = 0` member of the `(n, l)` multiplet.
    pub fn nl(n: i64, l: i64) -> Result<Self> {
        Self::new(n, l, 0)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> i32 {
        self.m
    }
}

/// Unperturbed level `-1/(2n²)`.
pub fn energy0(n: i64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(format!("principal quantum number must be >= 1, got {n}")));
    }
    let n = n as f64;
    Ok(-0.5 / (n * n))
}

/// `R_{n,l}(r) = N e^{-r/n} (2r/n)^l L^{2l+1}_{n-l-1}(2r/n)`, normalized so
/// that `∫ R² r² dr = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialFunction {
    state: QuantumState,
    norm: f64,
}

pub fn radial(state: QuantumState) -> RadialFunction {
    let n = state.n as f64;
    let l = state.l as f64;
    let ln_norm = 0.5
        * (3.0 * (2.0 / n).ln() + ln_gamma(n - l).expect("n - l >= 1")
            - (2.0 * n).ln()
            - ln_gamma(n + l + 1.0).expect("n + l + 1 >= 2"));
    RadialFunction {
        state,
        norm: ln_norm.exp(),
    }
}

impl RadialFunction {
    pub fn state(&self) -> QuantumState {
        self.state
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.state.n;
        let l = self.state.l;
        let x = 2.0 * r / n as f64;
        self.norm * (-0.5 * x).exp() * x.powi(l as i32) * laguerre(n - l - 1, (2 * l + 1) as f64, x)
    }

    /// `dR/dr`, from `d/dx L^a_k = -L^{a+1}_{k-1}`.
    pub fn derivative(&self, r: f64) -> f64 {
        let n = self.state.n;
        let l = self.state.l;
        let k = n - l - 1;
        let a = (2 * l + 1) as f64;
        let x = 2.0 * r / n as f64;
        let lag = laguerre(k, a, x);
        let dlag = if k == 0 { 0.0 } else { -laguerre(k - 1, a + 1.0, x) };
        let xl = x.powi(l as i32);
        let xl1 = if l == 0 { 0.0 } else { l as f64 * x.powi(l as i32 - 1) };
        let dx = (xl1 * lag + xl * dlag - 0.5 * xl * lag) * (-0.5 * x).exp();
        self.norm * dx * 2.0 / n as f64
    }
}

/// Closed-form `⟨r^{-k}⟩` for `k = 3, 4, 5`.
pub fn inv_r_moment_closed(state: QuantumState, k: u32) -> Result<f64> {
    let min_l = match k {
        3 | 4 => 1,
        5 => 2,
        _ => return Err(Error::Domain(format!("closed moments exist for k = 3, 4, 5; got {k}"))),
    };
    if state.l < min_l {
        return Err(Error::DivergentMoment {
            power: k,
            l: state.l,
            min_l,
        });
    }
    let n = state.n as f64;
    let l = state.l as f64;
    let ll = l * (l + 1.0);
    let v = match k {
        3 => 2.0 / (n.powi(3) * ll * (2.0 * l + 1.0)),
        4 => {
            4.0 * (3.0 * n * n - ll)
                / (n.powi(5) * ll * (2.0 * l + 1.0) * (2.0 * l + 3.0) * (2.0 * l - 1.0))
        }
        _ => {
            let x = 5.0 * n * n - 3.0 * ll + 1.0;
            4.0 * x
                / (n.powi(5)
                    * ll
                    * (l + 2.0)
                    * (2.0 * l + 1.0)
                    * (2.0 * l + 3.0)
                    * (l - 1.0)
                    * (2.0 * l - 1.0))
        }
    };
    Ok(v)
}

/// Quadrature spec tuned to the radial scale of level `n`.
pub fn radial_quadrature_spec(n: u32) -> QuadratureSpec {
    QuadratureSpec {
        split: 40.0_f64.max(4.0 * (n * n) as f64),
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        ..QuadratureSpec::default()
    }
}

/// `∫ R_{n,l}(r)² w(r) r² dr` by adaptive quadrature.
pub fn expectation_quadrature<W: Fn(f64) -> f64>(state: QuantumState, weight: W) -> Result<QuadratureResult> {
    expectation_quadrature_with(state, weight, &radial_quadrature_spec(state.n))
}

pub fn expectation_quadrature_with<W: Fn(f64) -> f64>(
    state: QuantumState,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let rf = radial(state);
    integrate_semiinfinite(
        |r| {
            let v = rf.eval(r);
            v * v * weight(r) * r * r
        },
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn st(n: i64, l: i64) -> QuantumState {
        QuantumState::nl(n, l).unwrap()
    }

    #[test]
    fn state_validation() {
        assert!(QuantumState::new(0, 0, 0).is_err());
        assert!(QuantumState::new(2, 2, 0).is_err());
        assert!(QuantumState::new(3, 1, -2).is_err());
        assert!(QuantumState::new(3, -1, 0).is_err());
        let s = QuantumState::new(3, 2, -2).unwrap();
        assert_eq!((s.n(), s.l(), s.m()), (3, 2, -2));
    }

    #[test]
    fn state_serde_validates() {
        let s: QuantumState = serde_json::from_str(r#"{"n":3,"l":2,"m":1}"#).unwrap();
        assert_eq!(s, QuantumState::new(3, 2, 1).unwrap());
        assert!(serde_json::from_str::<QuantumState>(r#"{"n":2,"l":2}"#).is_err());
    }

    #[test]
    fn energies() {
        assert_eq!(energy0(1).unwrap(), -0.5);
        assert_eq!(energy0(2).unwrap(), -0.125);
        assert_relative_eq!(energy0(3).unwrap(), -1.0 / 18.0);
        assert!(energy0(0).is_err());
    }

    #[test]
    fn radial_examples() {
        assert_relative_eq!(radial(st(1, 0)).eval(0.0), 2.0, max_relative = 1e-14);
        assert!(radial(st(2, 0)).eval(2.0).abs() < 1e-15);
        for n in 1..=5u32 {
            let rf = radial(st(n as i64, 0));
            for &r in &[0.0, 0.3, 1.7, 5.0, 12.5] {
                let nf = n as f64;
                let direct = (4.0 / nf.powi(5)).sqrt() * (-r / nf).exp() * laguerre(n - 1, 1.0, 2.0 * r / nf);
                assert_relative_eq!(rf.eval(r), direct, epsilon = 1e-15, max_relative = 1e-12);
            }
        }
        // R_21 = r e^{-r/2} / (2√6)
        let r = 1.3;
        assert_relative_eq!(
            radial(st(2, 1)).eval(r),
            r * (-r / 2.0).exp() / (2.0 * 6f64.sqrt()),
            max_relative = 1e-13
        );
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        for &(n, l) in &[(1, 0), (3, 1), (4, 2), (6, 3), (7, 0)] {
            let rf = radial(st(n, l));
            for &r in &[0.4, 2.0, 9.0] {
                let fd = (rf.eval(r + h) - rf.eval(r - h)) / (2.0 * h);
                assert_relative_eq!(rf.derivative(r), fd, epsilon = 1e-9, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn closed_moment_examples() {
        assert_relative_eq!(inv_r_moment_closed(st(2, 1), 3).unwrap(), 1.0 / 24.0, max_relative = 1e-14);
        assert_relative_eq!(inv_r_moment_closed(st(2, 1), 4).unwrap(), 1.0 / 24.0, max_relative = 1e-14);
        assert_relative_eq!(
            inv_r_moment_closed(st(3, 2), 5).unwrap(),
            112.0 / 612_360.0,
            max_relative = 1e-14
        );
        assert!(matches!(
            inv_r_moment_closed(st(3, 0), 3),
            Err(Error::DivergentMoment { power: 3, l: 0, min_l: 1 })
        ));
        assert!(matches!(
            inv_r_moment_closed(st(3, 1), 5),
            Err(Error::DivergentMoment { power: 5, l: 1, min_l: 2 })
        ));
        assert!(inv_r_moment_closed(st(3, 2), 2).is_err());
    }

    #[test]
    fn quadrature_examples() {
        let one = expectation_quadrature(st(1, 0), |_| 1.0).unwrap();
        assert_relative_eq!(one.value, 1.0, max_relative = 1e-12);
        let r = expectation_quadrature(st(1, 0), |r| r).unwrap();
        assert_relative_eq!(r.value, 1.5, max_relative = 1e-12);
        let q = expectation_quadrature(st(2, 1), |r| r.powi(-3)).unwrap();
        assert_relative_eq!(q.value, 1.0 / 24.0, max_relative = 1e-10);
    }
}
