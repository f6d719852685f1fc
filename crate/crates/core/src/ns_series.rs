//! s-level shifts from the expansion of `(ρ² + p_ρ²)^{-1/2}` over its
//! eigenbasis.
//!
//! With `f(ρ) = e^{-βρ/n} L¹_{n-1}(2βρ/n)` the series is
//! `S_ns(β) = 4 Σ_k (C_k I_k - C_k²/√λ_k)` where `C_k = ∫ ρ² φ_k f` and
//! `I_k = ∫ ρ φ_k f`, and the level shift is `ΔE_ns = β² S_ns(β) / n⁵`.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nc_model::NcParameters;
use crate::specfun::{
    accelerate_alternating, accelerate_unchecked, hyp2f1_terminating, integrate_semiinfinite, laguerre, ln_gamma, AccelerationConfig,
    AccelerationReport, CompositeRule, GaussLegendre, QuadratureSpec, TailModel,
};

/// Limit of the 1s series at `β = 0`.
///
/// Sum of the smooth part `Σ 8(1 - Γ(k+3/2)/(k!√(k+3/4)))` and the
/// alternating remainder (which sums to exactly 2), each evaluated to
/// about 1e-14.
pub const S1S0: f64 = 1.720_067_458_176_837_6;

pub const DEFAULT_K: usize = 200;

/// `φ_k(ρ) = √(2k!/Γ(k+3/2)) e^{-ρ²/2} L^{1/2}_k(ρ²)`, orthonormal with
/// weight `ρ²` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OscillatorBasis {
    pub max_index: usize,
}

impl OscillatorBasis {
    pub fn new(max_index: usize) -> Self {
        Self { max_index }
    }

    pub fn eigenvalue(k: usize) -> f64 {
        4.0 * k as f64 + 3.0
    }

    /// `φ_0(ρ) .. φ_K(ρ)` at one point.
    pub fn eval_all(&self, rho: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.max_index + 1);
        let mut it = PhiIter::new(rho * rho);
        for _ in 0..=self.max_index {
            out.push(it.value());
            it.advance();
        }
        out
    }

    pub fn eval(k: usize, rho: f64) -> f64 {
        let mut it = PhiIter::new(rho * rho);
        for _ in 0..k {
            it.advance();
        }
        it.value()
    }
}

const RESCALE: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_107;
const SQRT2: f64 = std::f64::consts::SQRT_2;
// 1/√Γ(3/2)
const INV_SQRT_GAMMA_3_2: f64 = 1.062_251_932_027_197;

// Normalized recurrence ℓ_k = √(k!/Γ(k+3/2)) L^{1/2}_k(x) with the factor
// e^{-x/2} carried as a log scale so large x neither overflows nor
// underflows.
struct PhiIter {
    x: f64,
    k: usize,
    prev: f64,
    cur: f64,
    log_scale: f64,
    factor: f64,
}

impl PhiIter {
    fn new(x: f64) -> Self {
        Self {
            x,
            k: 0,
            prev: 0.0,
            cur: INV_SQRT_GAMMA_3_2,
            log_scale: -0.5 * x,
            factor: (-0.5 * x).exp(),
        }
    }

    fn value(&self) -> f64 {
        SQRT2 * self.cur * self.factor
    }

    fn advance(&mut self) {
        let k = self.k as f64;
        let a = 0.5;
        let next = (2.0 * k + 1.0 + a - self.x) * self.cur / ((k + 1.0) * (k + a + 1.0)).sqrt()
            - (k * (k + a) / ((k + 1.0) * (k + a + 1.0))).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        if self.cur.abs() > RESCALE {
            self.cur /= RESCALE;
            self.prev /= RESCALE;
            self.log_scale += LN_RESCALE;
            self.factor = self.log_scale.exp();
        }
    }
}

/// The expanded ns radial factor `e^{-βρ/n} L¹_{n-1}(2βρ/n)`.
pub fn expanded_function(beta: f64, n: u32, rho: f64) -> f64 {
    let nf = n as f64;
    (-beta * rho / nf).exp() * laguerre(n - 1, 1.0, 2.0 * beta * rho / nf)
}

fn check_args(beta: f64, n: u32) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be finite and >= 0, got {beta}")));
    }
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    Ok(())
}

fn single_coefficient(k: usize, beta: f64, n: u32, power: i32) -> Result<f64> {
    check_args(beta, n)?;
    let spec = QuadratureSpec {
        split: (4.0 * k as f64 + 3.0).sqrt() + 12.0,
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_panels: 20_000,
        ..QuadratureSpec::default()
    };
    let r = integrate_semiinfinite(
        |rho| rho.powi(power) * OscillatorBasis::eval(k, rho) * expanded_function(beta, n, rho),
        &spec,
    )?;
    Ok(r.value)
}

/// `C_k = ∫ ρ² φ_k f dρ` by adaptive quadrature.
pub fn coeff_c(k: usize, beta: f64, n: u32) -> Result<f64> {
    single_coefficient(k, beta, n, 2)
}

/// `I_k = ∫ ρ φ_k f dρ` by adaptive quadrature.
pub fn coeff_i(k: usize, beta: f64, n: u32) -> Result<f64> {
    single_coefficient(k, beta, n, 1)
}

/// `C_0 .. C_K` and `I_0 .. I_K` on one shared composite rule.
///
/// Panels are narrow enough to resolve `φ_K` and the rule reaches past its
/// classical turning point `√(4K+3)` far enough for the Gaussian tail to
/// vanish.
pub fn coefficients(beta: f64, n: u32, max_index: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_args(beta, n)?;
    let turning = (4.0 * max_index as f64 + 3.0).sqrt();
    let rho_max = turning + 12.0;
    let width = (6.0 / turning).min(0.25);
    let panels = (rho_max / width).ceil() as usize;
    let gl = GaussLegendre::new(32)?;
    let rule = CompositeRule::uniform(&gl, 0.0, rho_max, panels);

    let m = rule.len();
    let mut wc = Vec::with_capacity(m);
    let mut wi = Vec::with_capacity(m);
    let mut iters = Vec::with_capacity(m);
    for (&rho, &w) in rule.nodes.iter().zip(&rule.weights) {
        let f = expanded_function(beta, n, rho);
        wc.push(w * rho * rho * f);
        wi.push(w * rho * f);
        iters.push(PhiIter::new(rho * rho));
    }
    let mut c = Vec::with_capacity(max_index + 1);
    let mut i_k = Vec::with_capacity(max_index + 1);
    for _ in 0..=max_index {
        let mut sc = 0.0;
        let mut si = 0.0;
        for ((it, a), b) in iters.iter_mut().zip(&wc).zip(&wi) {
            let phi = it.value();
            sc += a * phi;
            si += b * phi;
            it.advance();
        }
        c.push(sc);
        i_k.push(si);
    }
    Ok((c, i_k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub k: usize,
    pub c: f64,
    pub i: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub n: u32,
    pub beta: f64,
    /// Accelerated limit.
    pub value: f64,
    pub error: f64,
    /// Index of the last term summed.
    pub truncation: usize,
    /// Plain partial sum through `truncation`.
    pub partial_sum: f64,
    pub terms: Vec<SeriesTerm>,
    pub acceleration: AccelerationReport,
    /// Set when the acceleration cross-checks disagree.
    pub flagged: bool,
}

impl SeriesReport {
    fn from_terms(n: u32, beta: f64, terms: Vec<SeriesTerm>, config: &AccelerationConfig) -> Result<Self> {
        let contributions: Vec<f64> = terms.iter().map(|t| t.contribution).collect();
        // a tail that is still growing at K is reported, not rejected
        let acc = match accelerate_alternating(&contributions, config) {
            Err(Error::Acceleration(_)) => accelerate_unchecked(&contributions, config)?,
            other => other?,
        };
        Ok(Self {
            n,
            beta,
            value: acc.value,
            error: acc.error,
            truncation: terms.len() - 1,
            partial_sum: acc.partial_sum,
            flagged: !acc.consistent,
            terms,
            acceleration: acc,
        })
    }

    /// CSV with header `k,C_k,I_k,term`; `digits` significant digits.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut s = String::from("k,C_k,I_k,term\n");
        let p = digits.saturating_sub(1);
        for t in &self.terms {
            let _ = writeln!(s, "{},{:.*e},{:.*e},{:.*e}", t.k, p, t.c, p, t.i, p, t.contribution);
        }
        s
    }
}

/// Acceleration settings for the series at the given β.
///
/// At β = 0 the averaged tail carries integer and half-integer powers;
/// for β > 0 the cusp of `e^{-βρ}` at the origin adds a `K^{-3/2}` family.
pub fn acceleration_config(beta: f64) -> AccelerationConfig {
    let ladders = if beta == 0.0 {
        vec![TailModel::Integer, TailModel::Mixed]
    } else {
        vec![TailModel::Integer, TailModel::HalfInteger, TailModel::Mixed]
    };
    AccelerationConfig {
        ladders,
        ..AccelerationConfig::default()
    }
}

/// `S_ns(β)` summed through `k = K` and accelerated.
pub fn s_ns(beta: f64, n: u32, max_index: usize) -> Result<SeriesReport> {
    if max_index < 10 {
        return Err(Error::Domain(format!("K must be >= 10, got {max_index}")));
    }
    let (c, i) = coefficients(beta, n, max_index)?;
    let terms = c
        .iter()
        .zip(&i)
        .enumerate()
        .map(|(k, (&c, &i))| SeriesTerm {
            k,
            c,
            i,
            contribution: 4.0 * (c * i - c * c / OscillatorBasis::eigenvalue(k).sqrt()),
        })
        .collect();
    SeriesReport::from_terms(n, beta, terms, &acceleration_config(beta))
}

/// k-th term of `16√(2/π) Σ Γ(k+3/2)/k! (₂F₁(-k,1/2;3/2;2) - √(π/(8k+6)))`.
pub fn s_1s0_closed_term(k: usize) -> f64 {
    let kf = k as f64;
    let ratio = (ln_gamma(kf + 1.5).expect("positive") - ln_gamma(kf + 1.0).expect("positive")).exp();
    let f = hyp2f1_terminating(k as u32).to_f64().expect("finite rational");
    16.0 * (2.0 / std::f64::consts::PI).sqrt() * ratio * (f - (std::f64::consts::PI / (8.0 * kf + 6.0)).sqrt())
}

/// The closed hypergeometric series for `S_1s(0)`, accelerated.
pub fn s_1s0_closed(max_index: usize) -> Result<SeriesReport> {
    if max_index < 10 {
        return Err(Error::Domain(format!("K must be >= 10, got {max_index}")));
    }
    let terms = (0..=max_index)
        .map(|k| SeriesTerm {
            k,
            c: f64::NAN,
            i: f64::NAN,
            contribution: s_1s0_closed_term(k),
        })
        .collect();
    SeriesReport::from_terms(1, 0.0, terms, &acceleration_config(0.0))
}

/// Leading-order shift `ΔE_ns = (t/√6) S_1s(0) / n³` in hartree.
pub fn delta_e_ns(n: u32, nc: &NcParameters) -> Result<f64> {
    delta_e_ns_with(n, nc, S1S0)
}

/// As [`delta_e_ns`] with an explicit value of `S_1s(0)`.
pub fn delta_e_ns_with(n: u32, nc: &NcParameters, s1s0: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    Ok(nc.t() / 6f64.sqrt() * s1s0 / (n as f64).powi(3))
}

/// `ΔE_ns = β² S_ns(β) / n⁵` from a computed series.
pub fn delta_e_ns_from_series(report: &SeriesReport) -> f64 {
    report.beta * report.beta * report.value / (report.n as f64).powi(5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::specfun::{gamma, integrate_semiinfinite};

    #[test]
    fn eigenvalues() {
        for k in 0..=30 {
            assert_eq!(OscillatorBasis::eigenvalue(k), (4 * k + 3) as f64);
        }
    }

    #[test]
    fn basis_matches_direct_formula() {
        for k in [0usize, 1, 2, 5, 12] {
            for &rho in &[0.0f64, 0.4, 1.3, 3.0] {
                let kf = k as f64;
                let norm = (2.0 * gamma(kf + 1.0).unwrap() / gamma(kf + 1.5).unwrap()).sqrt();
                let direct = norm * (-rho * rho / 2.0).exp() * laguerre(k as u32, 0.5, rho * rho);
                assert_relative_eq!(OscillatorBasis::eval(k, rho), direct, epsilon = 1e-14, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn basis_orthonormal() {
        let spec = QuadratureSpec {
            abs_tol: 1e-13,
            ..QuadratureSpec::default()
        };
        for j in [0usize, 3, 10, 30] {
            for k in [0usize, 3, 10, 30] {
                let v = integrate_semiinfinite(
                    |r| r * r * OscillatorBasis::eval(j, r) * OscillatorBasis::eval(k, r),
                    &spec,
                )
                .unwrap()
                .value;
                let target = if j == k { 1.0 } else { 0.0 };
                assert!((v - target).abs() < 1e-10, "j={j} k={k} -> {v}");
            }
        }
    }

    #[test]
    fn large_index_stays_finite() {
        let b = OscillatorBasis::new(4000);
        let v = b.eval_all(60.0);
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(v[0] == 0.0 && v[4000].abs() > 0.0);
    }

    #[test]
    fn coefficient_examples() {
        let c0 = coeff_c(0, 0.0, 1).unwrap();
        assert_relative_eq!(c0, 1.882_792_527_553_429_6, max_relative = 1e-10);
        assert_relative_eq!(
            c0,
            (2.0 / gamma(1.5).unwrap()).sqrt() * (std::f64::consts::PI / 2.0).sqrt(),
            max_relative = 1e-12
        );
        // ∫ρ² e^{-ρ²/2}(3/2 - ρ²) dρ = (3/2 - 3)√(π/2)
        let c1 = coeff_c(1, 0.0, 1).unwrap();
        let exact = (2.0 / gamma(2.5).unwrap()).sqrt() * (-1.5) * (std::f64::consts::PI / 2.0).sqrt();
        assert_relative_eq!(c1, exact, max_relative = 1e-12);
        let i0 = coeff_i(0, 0.0, 1).unwrap();
        assert_relative_eq!(i0, (2.0 / gamma(1.5).unwrap()).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(i0, 1.502_25, max_relative = 1e-5);
    }

    #[test]
    fn i_k_alternates_at_beta_zero() {
        let (_, i) = coefficients(0.0, 1, 10).unwrap();
        for k in 0..10 {
            assert!(i[k] * i[k + 1] < 0.0, "k={k}");
        }
    }

    #[test]
    fn i_k_vanishes_for_large_beta() {
        let small = coeff_i(3, 1.0, 1).unwrap().abs();
        let tiny = coeff_i(3, 200.0, 1).unwrap().abs();
        assert!(tiny < 1e-3 * small);
    }

    #[test]
    fn batched_matches_adaptive() {
        let (c, i) = coefficients(0.3, 2, 40).unwrap();
        for k in [0usize, 7, 25, 40] {
            assert_relative_eq!(c[k], coeff_c(k, 0.3, 2).unwrap(), epsilon = 1e-12, max_relative = 1e-9);
            assert_relative_eq!(i[k], coeff_i(k, 0.3, 2).unwrap(), epsilon = 1e-12, max_relative = 1e-9);
        }
    }

    #[test]
    fn unsettled_tail_is_flagged_not_rejected() {
        // at K = 200 the n = 2, β = 0.1 envelope is still rising
        let r = s_ns(0.1, 2, 200).unwrap();
        assert!(r.flagged);
        let reference = 5.871_825_814_955_41;
        assert!((r.value - reference).abs() <= r.error, "{} +- {}", r.value, r.error);
    }

    #[test]
    fn parseval_beta_one() {
        let (c, _) = coefficients(1.0, 1, 200).unwrap();
        let s: f64 = c.iter().map(|x| x * x).sum();
        assert_relative_eq!(s, 0.25, max_relative = 1e-4);
    }

    #[test]
    fn closed_first_term() {
        let t0 = s_1s0_closed_term(0);
        let hand = 16.0 * (2.0 / std::f64::consts::PI).sqrt() * gamma(1.5).unwrap()
            * (1.0 - (std::f64::consts::PI / 6.0).sqrt());
        assert_relative_eq!(t0, hand, max_relative = 1e-14);
        assert_relative_eq!(t0, 3.127, max_relative = 2e-4);
    }

    #[test]
    fn series_and_closed_terms_agree() {
        let r = s_ns(0.0, 1, 60).unwrap();
        for t in &r.terms {
            assert_relative_eq!(t.contribution, s_1s0_closed_term(t.k), epsilon = 1e-11, max_relative = 1e-9);
        }
        let first: Vec<f64> = r.terms[..3].iter().map(|t| t.contribution).collect();
        assert!((first[0] - 3.13).abs() < 0.01 && (first[1] + 2.38).abs() < 0.01 && (first[2] - 1.88).abs() < 0.01);
    }

    #[test]
    fn s1s0_reference() {
        let r = s_1s0_closed(400).unwrap();
        assert!((r.value - S1S0).abs() < 1e-9, "{} ± {}", r.value, r.error);
        assert!((r.value - 1.72006).abs() < 1e-4);
        assert!((r.value - r.acceleration.cross_check).abs() <= r.error);
    }

    #[test]
    fn delta_e_examples() {
        let p = NcParameters::from_t(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(delta_e_ns(1, &p).unwrap(), 1.72006 / 6f64.sqrt(), max_relative = 1e-5);
        assert_relative_eq!(delta_e_ns(1, &p).unwrap(), 0.70221, max_relative = 1e-5);
        assert_relative_eq!(delta_e_ns(1, &p).unwrap() / delta_e_ns(2, &p).unwrap(), 8.0, max_relative = 1e-15);
        let z = NcParameters::from_t(0.0, 1.0, 1.0).unwrap();
        assert_eq!(delta_e_ns(3, &z).unwrap(), 0.0);
    }

    #[test]
    fn csv_layout() {
        let r = s_ns(0.0, 1, 12).unwrap();
        let csv = r.to_csv(6);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,C_k,I_k,term"));
        assert_eq!(csv.lines().count(), 14);
        assert!(lines.next().unwrap().starts_with("0,1.88279e0,"));
    }
}
