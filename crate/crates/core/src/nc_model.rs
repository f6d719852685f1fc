//! Noncommutativity parameters and the ground-state moments of θ.
//!
//! θ = (α/ħ)[a × b] with `a`, `b` the coordinates of two auxiliary 3D
//! oscillators of length scale `√(ħ/mω) = l_p`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strength of the noncommutativity.
///
/// `t = ħ√⟨θ²⟩/a_B²` is the only stored strength; `β = (t²/6)^{1/4}` is
/// always recomputed from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcParameters {
    alpha: f64,
    planck_length_m: f64,
    bohr_radius_m: f64,
    t: f64,
}

impl NcParameters {
    /// From the dimensionless constant α.
    pub fn from_alpha(alpha: f64, planck_length_m: f64, bohr_radius_m: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        check_length("planck_length", planck_length_m)?;
        check_length("bohr_radius", bohr_radius_m)?;
        let ratio = planck_length_m / bohr_radius_m;
        Ok(Self {
            alpha,
            planck_length_m,
            bohr_radius_m,
            t: 1.5f64.sqrt() * alpha * ratio * ratio,
        })
    }

    /// From the dimensionless strength `t`; α is inferred.
    pub fn from_t(t: f64, planck_length_m: f64, bohr_radius_m: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
        }
        check_length("planck_length", planck_length_m)?;
        check_length("bohr_radius", bohr_radius_m)?;
        let ratio = planck_length_m / bohr_radius_m;
        Ok(Self {
            alpha: t / (1.5f64.sqrt() * ratio * ratio),
            planck_length_m,
            bohr_radius_m,
            t,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn planck_length_m(&self) -> f64 {
        self.planck_length_m
    }

    pub fn bohr_radius_m(&self) -> f64 {
        self.bohr_radius_m
    }

    /// `t = ħ√⟨θ²⟩/a_B²`.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// `t² = ħ²⟨θ²⟩/a_B⁴`.
    pub fn theta2_mean(&self) -> f64 {
        self.t * self.t
    }

    pub fn beta(&self) -> f64 {
        (self.theta2_mean() / 6.0).sqrt().sqrt()
    }

    /// `ħ√⟨θ²⟩` in m².
    pub fn hbar_sqrt_theta2_m2(&self) -> f64 {
        self.t * self.bohr_radius_m * self.bohr_radius_m
    }
}

fn check_length(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

/// First and second moments of θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaMoments {
    pub first_moment: [f64; 3],
    pub second_moment: [[f64; 3]; 3],
    /// Standard errors of the second moment (zero for deterministic paths).
    pub second_moment_stderr: [[f64; 3]; 3],
}

impl ThetaMoments {
    /// Exact isotropic moments with the given `⟨θ²⟩`.
    pub fn isotropic(theta2: f64) -> Self {
        let mut second = [[0.0; 3]; 3];
        for (i, row) in second.iter_mut().enumerate() {
            row[i] = theta2 / 3.0;
        }
        Self {
            first_moment: [0.0; 3],
            second_moment: second,
            second_moment_stderr: [[0.0; 3]; 3],
        }
    }

    pub fn trace(&self) -> f64 {
        (0..3).map(|i| self.second_moment[i][i]).sum()
    }

    /// Largest deviation from `(trace/3)·δ_ij` relative to `trace/3`.
    pub fn isotropy_defect(&self) -> f64 {
        let d = self.trace() / 3.0;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { d } else { 0.0 };
                worst = worst.max((self.second_moment[i][j] - target).abs());
            }
        }
        worst / d.abs()
    }
}

/// Parameters plus moments in units of `(a_B²/ħ)²`, so `⟨θ²⟩ = t²`.
pub fn moments_from_alpha(
    alpha: f64,
    planck_length_m: f64,
    bohr_radius_m: f64,
) -> Result<(NcParameters, ThetaMoments)> {
    let p = NcParameters::from_alpha(alpha, planck_length_m, bohr_radius_m)?;
    Ok((p, ThetaMoments::isotropic(p.theta2_mean())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum MomentOracle {
    /// Tensor-product Gauss–Hermite rule over the six oscillator coordinates.
    GaussHermite { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for MomentOracle {
    fn default() -> Self {
        MomentOracle::GaussHermite { nodes: 3 }
    }
}

/// Gauss–Hermite nodes and weights for the density `e^{-x²}/√π`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 100 {
        return Err(Error::Domain(format!("Gauss-Hermite order must be in 1..=100, got {n}")));
    }
    // orthonormal recurrence h_{k+1} = x√(2/(k+1)) h_k - √(k/(k+1)) h_{k-1}
    let eval = |x: f64| -> (f64, f64) {
        let mut p0 = 0.0;
        let mut p1 = std::f64::consts::PI.powf(-0.25);
        for k in 0..n {
            let kf = k as f64;
            let p2 = x * (2.0 / (kf + 1.0)).sqrt() * p1 - (kf / (kf + 1.0)).sqrt() * p0;
            p0 = p1;
            p1 = p2;
        }
        // h_n' = √(2n) h_{n-1}
        (p1, (2.0 * n as f64).sqrt() * p0)
    };
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut x = 0.0;
    for i in 0..m {
        // largest roots first, standard starting guesses
        x = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.855_75 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => x - 1.14 * (n as f64).powf(0.426) / x,
            2 => 1.86 * x - 0.86 * nodes[0],
            3 => 1.91 * x - 0.91 * nodes[1],
            _ => 2.0 * x - nodes[i - 2],
        };
        for _ in 0..200 {
            let (p, dp) = eval(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = eval(x);
        nodes[i] = x;
        // weight for e^{-x²} is 2/h_n'², then divide by √π
        weights[i] = 2.0 / (dp * dp) / std::f64::consts::PI.sqrt();
    }
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 0..m {
        xs.push(-nodes[i]);
        ws.push(weights[i]);
    }
    for i in (0..n / 2).rev() {
        xs.push(nodes[i]);
        ws.push(weights[i]);
    }
    if n % 2 == 1 {
        xs[m - 1] = 0.0;
    }
    Ok((xs, ws))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Moments of θ = a × b in units `α = ħ = l_p = 1`, with each coordinate of
/// `a` and `b` drawn from the oscillator ground-state density `e^{-x²}/√π`.
/// The exact values are `⟨θ_i⟩ = 0` and `⟨θ_iθ_j⟩ = δ_ij/2`.
pub fn moment_tensor_oracle(method: MomentOracle) -> Result<ThetaMoments> {
    match method {
        MomentOracle::GaussHermite { nodes } => {
            let (x, w) = gauss_hermite(nodes)?;
            let n = x.len();
            let mut first = [0.0; 3];
            let mut second = [[0.0; 3]; 3];
            let mut idx = [0usize; 6];
            loop {
                let weight: f64 = idx.iter().map(|&i| w[i]).product();
                let a = [x[idx[0]], x[idx[1]], x[idx[2]]];
                let b = [x[idx[3]], x[idx[4]], x[idx[5]]];
                let th = cross(a, b);
                for i in 0..3 {
                    first[i] += weight * th[i];
                    for j in 0..3 {
                        second[i][j] += weight * th[i] * th[j];
                    }
                }
                // odometer over the six coordinates
                let mut d = 0;
                loop {
                    idx[d] += 1;
                    if idx[d] < n {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                    if d == 6 {
                        return Ok(ThetaMoments {
                            first_moment: first,
                            second_moment: second,
                            second_moment_stderr: [[0.0; 3]; 3],
                        });
                    }
                }
            }
        }
        MomentOracle::MonteCarlo { samples, seed } => {
            if samples < 10_000 {
                return Err(Error::Domain(format!("Monte Carlo needs >= 10000 samples, got {samples}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
            let mut first = [0.0; 3];
            let mut second = [[0.0; 3]; 3];
            let mut second_sq = [[0.0; 3]; 3];
            for _ in 0..samples {
                let a = [normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng)];
                let b = [normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng)];
                let th = cross(a, b);
                for i in 0..3 {
                    first[i] += th[i];
                    for j in 0..3 {
                        let v = th[i] * th[j];
                        second[i][j] += v;
                        second_sq[i][j] += v * v;
                    }
                }
            }
            let ns = samples as f64;
            let mut stderr = [[0.0; 3]; 3];
            for i in 0..3 {
                first[i] /= ns;
                for j in 0..3 {
                    second[i][j] /= ns;
                    let var = (second_sq[i][j] / ns - second[i][j] * second[i][j]).max(0.0);
                    stderr[i][j] = (var / ns).sqrt();
                }
            }
            Ok(ThetaMoments {
                first_moment: first,
                second_moment: second,
                second_moment_stderr: stderr,
            })
        }
    }
}
