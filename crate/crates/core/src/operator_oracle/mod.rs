//! Brute-force check of the series: discretize `A = ρ² + p_ρ²` on a radial
//! grid and evaluate the sandwich integral with `A^{-1/2}` from the
//! eigendecomposition.
//!
//! On `u = ρf` the operator is `ρ² - d²/dρ²` with `u(0) = u(ρ_max) = 0`.

mod eigen;

use serde::{Deserialize, Serialize};

pub use eigen::{eigen_projections, eigenvalues, eigenvector_for, SymTridiagonal, SymmetricSpectrum};

use crate::error::{Error, Result};
use crate::ns_series::expanded_function;

/// Node placement of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GridKind {
    /// `ρ_i = i·h`, `h = ρ_max/(N+1)`.
    Uniform,
    /// `ρ_i = ρ_max sinh(κ ξ_i)/sinh(κ)`, `ξ_i = i/(N+1)`: fine near the
    /// origin, coarse in the far tail.
    Sinh { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub rho_max: f64,
    pub points: usize,
    pub kind: GridKind,
}

pub const MIN_POINTS: usize = 100;

impl RadialGrid {
    pub fn uniform(rho_max: f64, points: usize) -> Result<Self> {
        Self::new(rho_max, points, GridKind::Uniform)
    }

    pub fn sinh(rho_max: f64, points: usize, kappa: f64) -> Result<Self> {
        Self::new(rho_max, points, GridKind::Sinh { kappa })
    }

    pub fn new(rho_max: f64, points: usize, kind: GridKind) -> Result<Self> {
        let g = Self { rho_max, points, kind };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_max > 0.0) || !self.rho_max.is_finite() {
            return Err(Error::Domain(format!("rho_max must be finite and > 0, got {}", self.rho_max)));
        }
        if self.points < MIN_POINTS {
            return Err(Error::Domain(format!("grid needs >= {MIN_POINTS} points, got {}", self.points)));
        }
        if let GridKind::Sinh { kappa } = self.kind {
            if !(kappa > 0.0) || !kappa.is_finite() {
                return Err(Error::Domain(format!("kappa must be finite and > 0, got {kappa}")));
            }
        }
        Ok(())
    }

    /// Interior nodes `ρ_1 .. ρ_N`.
    pub fn nodes(&self) -> Vec<f64> {
        let n1 = (self.points + 1) as f64;
        (1..=self.points)
            .map(|i| {
                let xi = i as f64 / n1;
                match self.kind {
                    GridKind::Uniform => self.rho_max * xi,
                    GridKind::Sinh { kappa } => self.rho_max * (kappa * xi).sinh() / kappa.sinh(),
                }
            })
            .collect()
    }

    /// Nodes and trapezoid weights `w_i = (h_{i-1/2} + h_{i+1/2})/2`.
    pub fn nodes_and_weights(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let rho = self.nodes();
        let n = rho.len();
        let mut h = Vec::with_capacity(n + 1);
        let mut last = 0.0;
        for &r in &rho {
            h.push(r - last);
            last = r;
        }
        h.push(self.rho_max - last);
        let w = (0..n).map(|i| 0.5 * (h[i] + h[i + 1])).collect();
        (rho, w, h)
    }

    pub fn with_points(&self, points: usize) -> Self {
        Self { points, ..*self }
    }

    pub fn with_rho_max(&self, rho_max: f64) -> Self {
        Self { rho_max, ..*self }
    }
}

/// `ρ² - d²/dρ²` on the grid, symmetrized with the trapezoid weights so the
/// matrix stays symmetric tridiagonal on non-uniform grids. On a uniform
/// grid this is `ρ_i² + 2/h²` on the diagonal and `-1/h²` off it.
pub fn build_operator(grid: &RadialGrid) -> Result<SymTridiagonal> {
    grid.validate()?;
    let (rho, w, h) = grid.nodes_and_weights();
    let n = rho.len();
    let diag = (0..n).map(|i| (1.0 / h[i] + 1.0 / h[i + 1]) / w[i] + rho[i] * rho[i]).collect();
    let off = (0..n - 1).map(|i| -1.0 / (h[i + 1] * (w[i] * w[i + 1]).sqrt())).collect();
    SymTridiagonal::new(diag, off)
}

/// `Q Λ^{-1/2} Qᵀ u`.
pub fn inv_sqrt_apply(spectrum: &SymmetricSpectrum, u: &[f64]) -> Result<Vec<f64>> {
    spectral_apply(spectrum, u, -0.5)
}

/// `Q Λ^p Qᵀ u` for a positive spectrum.
pub fn spectral_apply(spectrum: &SymmetricSpectrum, u: &[f64], power: f64) -> Result<Vec<f64>> {
    let n = spectrum.len();
    if u.len() != n {
        return Err(Error::Domain(format!("vector length {} does not match operator size {n}", u.len())));
    }
    if let Some(&bad) = spectrum.values.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::NonPositiveEigenvalue(bad));
    }
    let mut out = vec![0.0; n];
    for (lam, q) in spectrum.values.iter().zip(&spectrum.vectors) {
        let p: f64 = q.iter().zip(u).map(|(a, b)| a * b).sum();
        let c = p * lam.powf(power);
        for (o, qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub beta: f64,
    pub n: u32,
    /// Richardson combination of the `N` and `2N` values.
    pub value: f64,
    /// `|S(2N) - S(N)|/3`, the size of the Richardson correction.
    pub error: f64,
    pub coarse: f64,
    pub fine: f64,
    pub points: usize,
    pub rho_max: f64,
    /// Set when `error` exceeds the requested tolerance.
    pub resolution_warning: bool,
}

/// Default oracle grid: sinh-stretched, `N = 2000`, `ρ_max` starting at 12.
pub fn default_oracle_grid() -> RadialGrid {
    RadialGrid {
        rho_max: 12.0,
        points: 2000,
        kind: GridKind::Sinh { kappa: 6.0 },
    }
}

pub const ORACLE_TOLERANCE: f64 = 1e-5;

/// Doubles `rho_max` until `u = ρf` at the boundary is negligible:
/// `u(ρ_max)² <= 1e-12 max u²`.
pub fn fit_rho_max(beta: f64, n: u32, start: f64) -> f64 {
    let u = |r: f64| r * expanded_function(beta, n, r);
    let mut rho_max = start;
    for _ in 0..40 {
        let samples = 4000;
        let peak = (1..=samples)
            .map(|i| u(rho_max * i as f64 / samples as f64).powi(2))
            .fold(0.0, f64::max);
        // the boundary itself plus the last stretch before it
        let edge = (0..=40)
            .map(|i| u(rho_max * (1.0 - 0.05 * i as f64 / 40.0)).powi(2))
            .fold(0.0, f64::max);
        if edge <= 1e-12 * peak {
            return rho_max;
        }
        rho_max *= 2.0;
    }
    rho_max
}

fn sandwich(beta: f64, n: u32, grid: &RadialGrid) -> Result<f64> {
    let t = build_operator(grid)?;
    let (rho, w, _) = grid.nodes_and_weights();
    let u: Vec<f64> = rho.iter().map(|&r| r * expanded_function(beta, n, r)).collect();
    let ut: Vec<f64> = u.iter().zip(&w).map(|(u, w)| u * w.sqrt()).collect();
    let (vals, proj) = eigen_projections(&t, &[&ut])?;
    if let Some(&bad) = vals.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::NonPositiveEigenvalue(bad));
    }
    let quad: f64 = proj[0].iter().zip(&vals).map(|(p, l)| p * p / l.sqrt()).sum();
    let lin: f64 = u.iter().zip(&w).zip(&rho).map(|((u, w), r)| w * u * u / r).sum();
    Ok(4.0 * (lin - quad))
}

/// `S_ns(β) = 4[⟨u, u/ρ⟩ - ⟨u, A^{-1/2} u⟩]` on the grid, Richardson over
/// `N` and `2N` points. `rho_max` is enlarged as needed for the support of `u`.
pub fn s_ns_oracle(beta: f64, n: u32, grid: &RadialGrid) -> Result<OracleResult> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "the oracle needs beta > 0 (u is not normalizable at beta = 0), got {beta}"
        )));
    }
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    grid.validate()?;
    let rho_max = fit_rho_max(beta, n, grid.rho_max);
    let coarse_grid = grid.with_rho_max(rho_max);
    let coarse = sandwich(beta, n, &coarse_grid)?;
    let fine = sandwich(beta, n, &coarse_grid.with_points(2 * grid.points + 1))?;
    let value = (4.0 * fine - coarse) / 3.0;
    let error = (fine - coarse).abs() / 3.0;
    Ok(OracleResult {
        beta,
        n,
        value,
        error,
        coarse,
        fine,
        points: grid.points,
        rho_max,
        resolution_warning: error > ORACLE_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extrapolation {
    pub betas: Vec<f64>,
    pub values: Vec<f64>,
    /// Polynomial extrapolation of the values to `β = 0`.
    pub limit: f64,
    /// Difference to the extrapolation that drops the largest β.
    pub error: f64,
}

/// Neville extrapolation of oracle values to `β → 0⁺`.
pub fn extrapolate_to_zero(betas: &[f64], n: u32, grid: &RadialGrid) -> Result<Extrapolation> {
    if betas.len() < 2 {
        return Err(Error::Domain("need at least two beta values".into()));
    }
    let values = betas
        .iter()
        .map(|&b| s_ns_oracle(b, n, grid).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let limit = neville_at_zero(betas, &values);
    let reduced = neville_at_zero(&betas[1..], &values[1..]);
    Ok(Extrapolation {
        betas: betas.to_vec(),
        values,
        limit,
        error: (limit - reduced).abs(),
    })
}

fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let m = x.len();
    for level in 1..m {
        for i in 0..m - level {
            let (xa, xb) = (x[i], x[i + level]);
            p[i] = (xb * p[i] - xa * p[i + 1]) / (xb - xa);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::uniform(12.0, 50).is_err());
        assert!(RadialGrid::uniform(-1.0, 500).is_err());
        assert!(RadialGrid::sinh(12.0, 500, 0.0).is_err());
        let g = RadialGrid::uniform(12.0, 119).unwrap();
        let (rho, w, _) = g.nodes_and_weights();
        assert!((rho[0] - 0.1).abs() < 1e-15 && (w[5] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn uniform_operator_entries() {
        let g = RadialGrid::uniform(12.0, 119).unwrap();
        let t = build_operator(&g).unwrap();
        let h = 0.1;
        for i in [0usize, 50, 118] {
            let r = (i + 1) as f64 * h;
            assert!((t.diag[i] - (r * r + 2.0 / (h * h))).abs() < 1e-9);
        }
        assert!(t.off.iter().all(|&o| (o + 1.0 / (h * h)).abs() < 1e-9));
        let a = t.to_dense();
        for i in 0..a.len() {
            for j in 0..a.len() {
                assert_eq!(a[i][j], a[j][i]);
            }
        }
    }

    #[test]
    fn low_spectrum_and_ground_state() {
        let g = RadialGrid::uniform(12.0, 2000).unwrap();
        let t = build_operator(&g).unwrap();
        let vals = eigenvalues(&t).unwrap();
        for k in 0..6 {
            assert!((vals[k] - (4 * k + 3) as f64).abs() < 1e-3, "k={k}: {}", vals[k]);
        }
        let v = eigenvector_for(&t, vals[0]);
        let h = 12.0f64 / 2001.0;
        // ρφ_0 ∝ ρ e^{-ρ²/2}; both scaled to unit continuum norm
        let exact: Vec<f64> = g.nodes().iter().map(|r| r * (-r * r / 2.0).exp()).collect();
        let norm = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
        let worst = v
            .iter()
            .zip(&exact)
            .map(|(a, b)| ((a - b / norm) / h.sqrt()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "max deviation {worst}");
    }

    #[test]
    fn inv_sqrt_examples() {
        let g = RadialGrid::uniform(10.0, 120).unwrap();
        let t = build_operator(&g).unwrap();
        let sp = SymmetricSpectrum::compute(&t).unwrap();
        // eigenvector in, scaled eigenvector out
        let k = 2;
        let out = inv_sqrt_apply(&sp, &sp.vectors[k]).unwrap();
        for (o, q) in out.iter().zip(&sp.vectors[k]) {
            assert!((o - q / sp.values[k].sqrt()).abs() < 1e-12);
        }
        let u: Vec<f64> = (0..120).map(|i| ((i as f64) * 0.21).sin() + 0.3).collect();
        let twice = inv_sqrt_apply(&sp, &inv_sqrt_apply(&sp, &u).unwrap()).unwrap();
        let inv = spectral_apply(&sp, &u, -1.0).unwrap();
        let scale = inv.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (a, b) in twice.iter().zip(&inv) {
            assert!((a - b).abs() <= 1e-10 * scale);
        }
        let au = inv_sqrt_apply(&sp, &u).unwrap();
        assert!(u.iter().zip(&au).map(|(a, b)| a * b).sum::<f64>() > 0.0);
        let bad = SymmetricSpectrum {
            values: vec![-1.0, 2.0],
            vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert!(matches!(inv_sqrt_apply(&bad, &[1.0, 1.0]), Err(Error::NonPositiveEigenvalue(_))));
    }

    #[test]
    fn inv_sqrt_is_symmetric() {
        let g = RadialGrid::uniform(10.0, 150).unwrap();
        let sp = SymmetricSpectrum::compute(&build_operator(&g).unwrap()).unwrap();
        let u: Vec<f64> = (0..150).map(|i| ((i as f64) * 0.13).cos()).collect();
        let v: Vec<f64> = (0..150).map(|i| ((i as f64) * 0.05).exp().recip()).collect();
        let a: f64 = u.iter().zip(&inv_sqrt_apply(&sp, &v).unwrap()).map(|(x, y)| x * y).sum();
        let b: f64 = v.iter().zip(&inv_sqrt_apply(&sp, &u).unwrap()).map(|(x, y)| x * y).sum();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn oracle_rejects_beta_zero() {
        assert!(s_ns_oracle(0.0, 1, &default_oracle_grid()).is_err());
    }

    #[test]
    fn oracle_half() {
        let r = s_ns_oracle(0.5, 1, &default_oracle_grid()).unwrap();
        assert!((r.value - 0.826_477_394_001).abs() < 1e-6, "{r:?}");
        assert!(!r.resolution_warning);
    }

    #[test]
    fn neville_recovers_quadratic() {
        let x = [0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|b| 1.5 - 2.0 * b + 3.0 * b * b).collect();
        assert!((neville_at_zero(&x, &y) - 1.5).abs() < 1e-13);
    }
}
