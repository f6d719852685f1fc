use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power ladder assumed for the remainder `S - S_K ~ Σ c_p K^{-p}` after
/// the alternating part has been averaged away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    /// K^-1 .. K^-4
    Integer,
    /// K^-3/2, K^-5/2, K^-7/2
    HalfInteger,
    /// K^-1, K^-3/2, .., K^-3
    Mixed,
}

impl TailModel {
    pub fn powers(self) -> &'static [f64] {
        match self {
            TailModel::Integer => &[1.0, 2.0, 3.0, 4.0],
            TailModel::HalfInteger => &[1.5, 2.5, 3.5],
            TailModel::Mixed => &[1.0, 1.5, 2.0, 2.5, 3.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "tail")]
pub enum AccelerationMethod {
    Euler,
    Aitken,
    /// Repeated averaging of partial sums followed by a least-squares fit of
    /// the tail model.
    EulerMeansRichardson(TailModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelerationConfig {
    /// Number of repeated averagings of the partial sums.
    pub averaging: usize,
    /// Fraction of the sequence skipped before the fit window starts.
    pub window: f64,
    pub ladders: Vec<TailModel>,
    /// Below this many terms only Euler and Aitken are attempted.
    pub min_fit_terms: usize,
}

impl Default for AccelerationConfig {
    fn default() -> Self {
        Self {
            averaging: 6,
            window: 0.5,
            ladders: vec![TailModel::Integer, TailModel::HalfInteger, TailModel::Mixed],
            min_fit_terms: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccelerationReport {
    pub value: f64,
    pub error: f64,
    pub method: AccelerationMethod,
    pub terms: usize,
    /// Plain partial sum of all terms.
    pub partial_sum: f64,
    pub euler: f64,
    pub euler_error: f64,
    pub aitken: f64,
    pub aitken_error: f64,
    /// The estimate the chosen value was checked against.
    pub cross_check: f64,
    /// False when Euler and Aitken disagree beyond their errors and no
    /// fallback was possible.
    pub consistent: bool,
}

/// Estimates the limit of `Σ terms`.
///
/// Clean alternating tails are summed by the Euler transform with iterated
/// Aitken as a cross-check. If the two disagree, or the tail is not cleanly
/// alternating, and there are enough terms, the partial sums are averaged
/// repeatedly and the remaining power-law tail is removed by least squares
/// over each ladder in `config.ladders`.
pub fn accelerate_alternating(terms: &[f64], config: &AccelerationConfig) -> Result<AccelerationReport> {
    accelerate(terms, config, true)
}

/// As [`accelerate_alternating`] but without the divergence checks on the
/// tail, for sequences known to converge whose envelope has not settled
/// yet. The result is always marked inconsistent and its error covers the
/// Euler/Aitken gap and the last term.
pub fn accelerate_unchecked(terms: &[f64], config: &AccelerationConfig) -> Result<AccelerationReport> {
    let mut r = accelerate(terms, config, false)?;
    let gap = (r.euler - r.aitken).abs();
    r.error = r.error.max(gap).max(terms[terms.len() - 1].abs());
    r.consistent = false;
    Ok(r)
}

fn accelerate(terms: &[f64], config: &AccelerationConfig, checked: bool) -> Result<AccelerationReport> {
    let n = terms.len();
    if n < 4 {
        return Err(Error::Acceleration(format!("need at least 4 terms, got {n}")));
    }
    if terms.iter().any(|t| !t.is_finite()) {
        return Err(Error::Acceleration("non-finite term".into()));
    }
    let alternating = if checked {
        check_tail(terms)?
    } else {
        last_quarter_alternates(terms)
    };

    let partial_sum: f64 = terms.iter().sum();
    let (euler, euler_error) = euler_transform(terms);
    let (aitken, aitken_error) = iterated_aitken(terms);
    let gap = (euler - aitken).abs();
    let agree = gap <= euler_error + aitken_error;

    let mut report = AccelerationReport {
        value: euler,
        error: euler_error.max(gap),
        method: AccelerationMethod::Euler,
        terms: n,
        partial_sum,
        euler,
        euler_error,
        aitken,
        aitken_error,
        cross_check: aitken,
        consistent: agree,
    };

    if alternating && agree {
        return Ok(report);
    }
    if n >= config.min_fit_terms && !config.ladders.is_empty() {
        let (value, error, model, cross) = match richardson_estimate(terms, config) {
            Ok(v) => v,
            Err(_) if !checked => return Ok(report),
            Err(e) => return Err(e),
        };
        report.value = value;
        report.error = error;
        report.method = AccelerationMethod::EulerMeansRichardson(model);
        report.cross_check = cross;
        report.consistent = true;
        return Ok(report);
    }
    if !alternating && checked {
        return Err(Error::Acceleration(format!(
            "tail is not alternating and {n} terms are too few for the tail fit (need {})",
            config.min_fit_terms
        )));
    }
    // Short alternating input where the two disagree: keep the tighter one,
    // widen the error to cover both and flag it.
    if aitken_error < euler_error {
        report.value = aitken;
        report.method = AccelerationMethod::Aitken;
        report.cross_check = euler;
        report.error = aitken_error.max(gap);
    }
    Ok(report)
}

fn last_quarter_alternates(terms: &[f64]) -> bool {
    let q = (terms.len() / 4).max(2);
    terms[terms.len() - q..].windows(2).all(|w| w[0] * w[1] < 0.0)
}

// Rejects divergent tails. Returns whether the last quarter strictly alternates.
fn check_tail(terms: &[f64]) -> Result<bool> {
    let n = terms.len();
    let q = (n / 4).max(2);
    let last = &terms[n - q..];
    let prev = &terms[n - 2 * q.min(n / 2)..n - q];
    let mean_abs = |s: &[f64]| s.iter().map(|t| t.abs()).sum::<f64>() / s.len().max(1) as f64;
    let alternating = last_quarter_alternates(terms);
    let (m_last, m_prev) = (mean_abs(last), mean_abs(prev));
    if !prev.is_empty() && m_last > m_prev * (1.0 + 1e-12) && m_last > 0.0 {
        return Err(Error::Acceleration(format!(
            "tail magnitude grows ({m_prev:e} -> {m_last:e})"
        )));
    }
    if !alternating {
        let positive = last.iter().all(|&t| t >= 0.0);
        let negative = last.iter().all(|&t| t <= 0.0);
        if positive || negative {
            // a single-signed tail must decay faster than 1/k to be summable
            if let Some(slope) = log_slope(terms) {
                if slope > -1.05 {
                    return Err(Error::Acceleration(format!(
                        "single-signed tail decays too slowly (|a_k| ~ k^{slope:.2})"
                    )));
                }
            }
        }
    }
    Ok(alternating)
}

// Fitted exponent of |a_k| against k over the second half.
fn log_slope(terms: &[f64]) -> Option<f64> {
    let n = terms.len();
    let pts: Vec<(f64, f64)> = (n / 2..n)
        .filter(|&k| terms[k] != 0.0 && k > 0)
        .map(|k| ((k as f64).ln(), terms[k].abs().ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Euler transform of `Σ (-1)^k u_k` with `u_k = (-1)^k a_k`.
///
/// Stops at the smallest increment; the error is twice that increment.
fn euler_transform(terms: &[f64]) -> (f64, f64) {
    let mut d: Vec<f64> = terms
        .iter()
        .enumerate()
        .map(|(k, &a)| if k % 2 == 0 { a } else { -a })
        .collect();
    let mut sum = 0.0;
    let mut best = (0.0, f64::INFINITY);
    let mut scale = 0.5;
    let mut rising = 0;
    for j in 0..terms.len() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let inc = sign * d[0] * scale;
        sum += inc;
        if inc.abs() < best.1 {
            best = (sum, inc.abs());
            rising = 0;
        } else {
            rising += 1;
            if rising >= 3 {
                break;
            }
        }
        for i in 0..d.len() - 1 {
            d[i] = d[i + 1] - d[i];
        }
        d.pop();
        scale *= 0.5;
    }
    let roundoff = 8.0 * f64::EPSILON * terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
    (best.0, 2.0 * best.1 + roundoff)
}

/// Repeated Aitken Δ² on the partial sums.
fn iterated_aitken(terms: &[f64]) -> (f64, f64) {
    let mut s: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let mut prev_last = s[s.len() - 2];
    loop {
        if s.len() < 3 {
            break;
        }
        let mut next = Vec::with_capacity(s.len() - 2);
        for w in s.windows(3) {
            let denom = w[2] - 2.0 * w[1] + w[0];
            if denom == 0.0 || !denom.is_finite() {
                break;
            }
            next.push(w[2] - (w[2] - w[1]).powi(2) / denom);
        }
        if next.len() < 2 || next.iter().any(|v| !v.is_finite()) {
            break;
        }
        prev_last = *s.last().expect("non-empty");
        s = next;
    }
    let last = *s.last().expect("non-empty");
    let roundoff = 8.0 * f64::EPSILON * last.abs().max(1e-300);
    let self_err = if s.len() >= 2 {
        (last - s[s.len() - 2]).abs().max((last - prev_last).abs())
    } else {
        (last - prev_last).abs()
    };
    (last, self_err + roundoff)
}

fn averaged_sums(terms: &[f64], rounds: usize) -> Vec<f64> {
    let mut s: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    for _ in 0..rounds {
        for i in (1..s.len()).rev() {
            s[i] = 0.5 * (s[i] + s[i - 1]);
        }
    }
    s
}

// Least-squares limit and RMS residual for one ladder.
fn fit_limit(terms: &[f64], rounds: usize, window: f64, powers: &[f64]) -> Result<(f64, f64)> {
    let s = averaged_sums(terms, rounds);
    let n = s.len();
    let start = ((n as f64) * window) as usize;
    let rows: Vec<usize> = (start..n).collect();
    let cols = powers.len() + 1;
    if rows.len() <= cols {
        return Err(Error::Acceleration(format!(
            "fit window has {} points for {cols} unknowns",
            rows.len()
        )));
    }
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .map(|&k| {
            let x = (k + 1) as f64;
            std::iter::once(1.0).chain(powers.iter().map(|p| x.powf(-p))).collect()
        })
        .collect();
    let b: Vec<f64> = rows.iter().map(|&k| s[k]).collect();
    let coef = least_squares(&mut a, &b)?;
    let rss: f64 = a_times(&rows, powers, &coef)
        .iter()
        .zip(&b)
        .map(|(p, y)| (p - y).powi(2))
        .sum();
    Ok((coef[0], (rss / rows.len() as f64).sqrt()))
}

fn a_times(rows: &[usize], powers: &[f64], coef: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|&k| {
            let x = (k + 1) as f64;
            coef[0] + powers.iter().zip(&coef[1..]).map(|(p, c)| c * x.powf(-p)).sum::<f64>()
        })
        .collect()
}

/// Householder QR least squares; columns are scaled to unit norm first.
fn least_squares(a: &mut [Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let m = a.len();
    let n = a[0].len();
    let mut scale = vec![0.0; n];
    for (j, sc) in scale.iter_mut().enumerate() {
        *sc = a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
        if *sc == 0.0 {
            return Err(Error::Acceleration("degenerate fit column".into()));
        }
        for r in a.iter_mut() {
            r[j] /= *sc;
        }
    }
    let mut y = b.to_vec();
    for j in 0..n {
        let norm = (j..m).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Acceleration("rank-deficient fit".into()));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..m).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in j..n {
            let dot: f64 = (j..m).map(|i| v[i - j] * a[i][c]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..m {
                a[i][c] -= f * v[i - j];
            }
        }
        let dot: f64 = (j..m).map(|i| v[i - j] * y[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in j..m {
            y[i] -= f * v[i - j];
        }
    }
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let mut s = y[j];
        for c in j + 1..n {
            s -= a[j][c] * x[c];
        }
        if a[j][j] == 0.0 {
            return Err(Error::Acceleration("singular triangular factor".into()));
        }
        x[j] = s / a[j][j];
    }
    for (xj, sc) in x.iter_mut().zip(&scale) {
        *xj /= sc;
    }
    Ok(x)
}

// Best ladder by residual; error from ladder spread, a shortened prefix and
// a lower averaging order.
fn richardson_estimate(terms: &[f64], config: &AccelerationConfig) -> Result<(f64, f64, TailModel, f64)> {
    let mut fits = Vec::with_capacity(config.ladders.len());
    for &model in &config.ladders {
        let (v, rms) = fit_limit(terms, config.averaging, config.window, model.powers())?;
        fits.push((model, v, rms));
    }
    let &(model, value, _) = fits
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .expect("at least one ladder");
    let n = terms.len();
    let (prefix, _) = fit_limit(&terms[..3 * n / 4], config.averaging, config.window, model.powers())?;
    let lower = config.averaging.saturating_sub(2);
    let (fewer, _) = fit_limit(terms, lower, config.window, model.powers())?;
    let mut error = (value - prefix).abs().max((value - fewer).abs());
    let mut cross = prefix;
    for &(_, v, _) in &fits {
        if (value - v).abs() > error {
            error = (value - v).abs();
        }
    }
    if (value - fewer).abs() > (value - cross).abs() {
        cross = fewer;
    }
    error = error.max(8.0 * f64::EPSILON * value.abs());
    Ok((value, error, model, cross))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln2_terms(n: usize) -> Vec<f64> {
        (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (k + 1) as f64).collect()
    }

    #[test]
    fn ln2_twenty_terms() {
        let r = accelerate_alternating(&ln2_terms(20), &AccelerationConfig::default()).unwrap();
        assert!((r.value - std::f64::consts::LN_2).abs() < 1e-6, "{r:?}");
        assert!(r.consistent);
        assert!((r.value - r.cross_check).abs() <= r.error);
    }

    #[test]
    fn pi_over_4_twenty_terms() {
        let terms: Vec<f64> = (0..20)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (2 * k + 1) as f64)
            .collect();
        let r = accelerate_alternating(&terms, &AccelerationConfig::default()).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_4).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn unchecked_accepts_growing_envelope_and_flags_it() {
        // alternating terms whose envelope rises before decaying like 1/k
        let terms: Vec<f64> = (0..120)
            .map(|k| {
                let k = k as f64;
                (-1f64).powi(k as i32) * (k + 1.0) / ((k + 1.0) * (k + 1.0) / 1e4 + 1.0) / 100.0
            })
            .collect();
        assert!(accelerate_alternating(&terms, &AccelerationConfig::default()).is_err());
        let r = accelerate_unchecked(&terms, &AccelerationConfig::default()).unwrap();
        assert!(!r.consistent);
        assert!(r.error >= terms[terms.len() - 1].abs());
        assert!(r.value.is_finite());
    }

    #[test]
    fn growing_tail_rejected() {
        let terms: Vec<f64> = (0..30).map(|k| (-1f64).powi(k) * (k as f64 + 1.0)).collect();
        assert!(matches!(
            accelerate_alternating(&terms, &AccelerationConfig::default()),
            Err(Error::Acceleration(_))
        ));
    }

    #[test]
    fn harmonic_tail_rejected() {
        let terms: Vec<f64> = (0..60).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        assert!(accelerate_alternating(&terms, &AccelerationConfig::default()).is_err());
    }

    #[test]
    fn summable_single_signed_tail_accepted() {
        // Σ 1/(k+1)^3 = ζ(3)
        let terms: Vec<f64> = (0..400).map(|k| (k as f64 + 1.0).powi(-3)).collect();
        let r = accelerate_alternating(&terms, &AccelerationConfig::default()).unwrap();
        let zeta3 = 1.202_056_903_159_594_3;
        assert!((r.value - zeta3).abs() < 1e-8, "{r:?}");
        assert!((r.value - zeta3).abs() <= r.error.max(1e-12));
    }

    #[test]
    fn mixed_alternating_and_smooth_tail() {
        // alternating k^-1/2 piece plus a smooth k^-2 piece, like the 1s series
        let n = 300;
        let terms: Vec<f64> = (0..n)
            .map(|k| {
                let x = k as f64 + 1.0;
                (-1f64).powi(k) / x.sqrt() + 1.0 / (x * x)
            })
            .collect();
        // Σ(-1)^k/√(k+1) = (1 - √2)ζ(1/2), Σ 1/(k+1)^2 = π²/6
        let eta_half = 0.604_898_643_421_630_4;
        let exact = eta_half + std::f64::consts::PI.powi(2) / 6.0;
        let r = accelerate_alternating(&terms, &AccelerationConfig::default()).unwrap();
        assert!(matches!(r.method, AccelerationMethod::EulerMeansRichardson(_)));
        assert!((r.value - exact).abs() < 1e-7, "{} vs {exact}", r.value);
        assert!((r.value - exact).abs() <= r.error);
    }

    #[test]
    fn least_squares_recovers_line() {
        let mut a: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64]).collect();
        let b: Vec<f64> = (0..10).map(|i| 3.0 - 0.5 * i as f64).collect();
        let x = least_squares(&mut a, &b).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-13 && (x[1] + 0.5).abs() < 1e-13);
    }
}
