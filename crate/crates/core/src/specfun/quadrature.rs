use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("Gauss-Legendre needs n >= 2, got {n}")));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Globally adaptive bisection of Gauss–Legendre panels.
    AdaptiveGaussLegendre,
}

/// Settings for [`integrate`] and [`integrate_semiinfinite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    /// Gauss–Legendre points per panel.
    pub nodes: usize,
    /// `[0, ∞)` is cut here; the remainder is mapped onto a finite interval.
    pub split: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            scheme: QuadratureScheme::AdaptiveGaussLegendre,
            nodes: 20,
            split: 40.0,
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Domain(format!("node count must be >= 2, got {}", self.nodes)));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be > 0".into()));
        }
        if !(self.split > 0.0) || !self.split.is_finite() {
            return Err(Error::Domain(format!("split point must be finite and > 0, got {}", self.split)));
        }
        if self.max_panels == 0 {
            return Err(Error::Domain("max_panels must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Adaptive<'a, F> {
    rule: &'a GaussLegendre,
    f: F,
    evaluations: usize,
}

impl<F: FnMut(f64) -> f64> Adaptive<'_, F> {
    // Panel value from its two halves; error from the comparison with the whole.
    fn panel(&mut self, a: f64, b: f64) -> Panel {
        let m = 0.5 * (a + b);
        let n = self.rule.len();
        let whole = self.rule.integrate(&mut self.f, a, b);
        let mut abs_value = 0.0;
        let mut halves = 0.0;
        for (lo, hi) in [(a, m), (m, b)] {
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let v = w * (self.f)(c + h * x) * h;
                halves += v;
                abs_value += v.abs();
            }
        }
        self.evaluations += 3 * n;
        Panel {
            a,
            b,
            value: halves,
            error: (halves - whole).abs(),
            abs_value,
        }
    }
}

fn adaptive_over<F: FnMut(f64) -> f64>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    let rule = GaussLegendre::new(spec.nodes)?;
    let mut state = Adaptive {
        rule: &rule,
        f,
        evaluations: 0,
    };
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        heap.push(state.panel(w[0], w[1]));
    }
    loop {
        let (value, error, abs_value) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |acc, p| (acc.0 + p.value, acc.1 + p.error, acc.2 + p.abs_value));
        if !value.is_finite() {
            return Err(Error::Domain("integrand produced a non-finite value".into()));
        }
        // rounding floor: no bisection can beat the cancellation already present
        let floor = 50.0 * f64::EPSILON * abs_value;
        let target = spec.abs_tol.max(spec.rel_tol * value.abs()).max(floor);
        if error <= target {
            return Ok(QuadratureResult {
                value,
                error,
                panels: heap.len(),
                evaluations: state.evaluations,
            });
        }
        if heap.len() >= spec.max_panels {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                panels: heap.len() + 1,
            });
        }
        heap.push(state.panel(worst.a, m));
        heap.push(state.panel(m, worst.b));
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !a.is_finite() || !b.is_finite() || b < a {
        return Err(Error::Domain(format!("need finite a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error: 0.0,
            panels: 0,
            evaluations: 0,
        });
    }
    let breaks: Vec<f64> = (0..=4).map(|i| a + (b - a) * i as f64 / 4.0).collect();
    adaptive_over(f, &breaks, spec)
}

/// Integrates `f` over `[0, ∞)`.
///
/// `[0, split]` is integrated directly; `[split, ∞)` goes through
/// `r = split·(1 + s/(1 − s))`, `s ∈ [0, 1)`. Both pieces share one
/// adaptive panel queue so the error budget is spent where it is needed.
pub fn integrate_semiinfinite<F: FnMut(f64) -> f64>(mut f: F, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    spec.validate()?;
    let c = spec.split;
    let mapped = move |u: f64| {
        if u <= 1.0 {
            c * f(c * u)
        } else {
            let s = u - 1.0;
            let q = 1.0 - s;
            if q <= 0.0 {
                return 0.0;
            }
            let jac = c / (q * q);
            let v = f(c + c * s / q);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        }
    };
    let breaks: Vec<f64> = (0..=16).map(|i| i as f64 / 8.0).collect();
    adaptive_over(mapped, &breaks, spec)
}

/// A fixed composite Gauss–Legendre rule stored as flat node/weight arrays,
/// for sweeping many integrands over the same points.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// `panels` equal panels of `rule` across `[a, b]`.
    pub fn uniform(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Self {
        let mut nodes = Vec::with_capacity(panels * rule.len());
        let mut weights = Vec::with_capacity(panels * rule.len());
        let width = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let c = lo + 0.5 * width;
            let h = 0.5 * width;
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                nodes.push(c + h * x);
                weights.push(w * h);
            }
        }
        Self { nodes, weights }
    }

    /// Appends the nodes of `other`.
    pub fn extend(&mut self, other: CompositeRule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}
