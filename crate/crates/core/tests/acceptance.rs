//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use nc_hydrogen::bounds::{bound_from_uncertainty, ExperimentInput};
use nc_hydrogen::constants::PhysicalConstants;
use nc_hydrogen::corrections::{
    delta_e1_assembled, delta_e1_closed, delta_e1_effective, second_order_oscillator_channel,
};
use nc_hydrogen::hydrogen::{expectation_quadrature, inv_r_moment_closed, QuantumState};
use nc_hydrogen::nc_model::{moment_tensor_oracle, MomentOracle, NcParameters};
use nc_hydrogen::ns_series::{s_1s0_closed, s_ns};
use nc_hydrogen::operator_oracle::{build_operator, default_oracle_grid, eigenvalues, s_ns_oracle, RadialGrid};
use nc_hydrogen::Error;

const S1S0_PUBLISHED: f64 = 1.72006;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

type Check = fn() -> Result<Verdict, Error>;

// 1: both routes give 1.72006 ± 1e-4 at K = 200 within 60 s.
fn s1s0_reproduction() -> Result<Verdict, Error> {
    let start = Instant::now();
    let series = s_ns(0.0, 1, 200)?;
    let closed = s_1s0_closed(200)?;
    let secs = start.elapsed().as_secs_f64();
    let ok = |v: f64, e: f64| (v - S1S0_PUBLISHED).abs() <= 1e-4 && e <= 1e-4;
    Ok(verdict(
        ok(series.value, series.error) && ok(closed.value, closed.error) && secs <= 60.0,
        format!(
            "series {:.7} +- {:.1e}, closed {:.7} +- {:.1e}, {secs:.2} s",
            series.value, series.error, closed.value, closed.error
        ),
    ))
}

// 2: 7.7e-36 m² and 2.4e34 at two significant figures, under a second.
fn bound_reproduction() -> Result<Verdict, Error> {
    let start = Instant::now();
    let input = ExperimentInput::default().with_uncertainty(4.5e-15);
    let b = bound_from_uncertainty(&input, &PhysicalConstants::codata2018())?;
    let secs = start.elapsed().as_secs_f64();
    let h = format!("{:.1e}", b.hbar_sqrt_theta2_bound_m2);
    let a = format!("{:.1e}", b.alpha_bound);
    Ok(verdict(
        h == "7.7e-36" && a == "2.4e34" && secs < 1.0,
        format!("hbar*sqrt<theta^2> <= {h} m^2, alpha <= {a}, {secs:.3} s"),
    ))
}

// 3: S_ns(0)/n² = S_1s(0) within 1e-3 relative, n = 1..5.
fn n_squared_law() -> Result<Verdict, Error> {
    let mut worst = 0.0f64;
    for n in 1..=5u32 {
        let r = s_ns(0.0, n, 200)?;
        worst = worst.max((r.value / (n * n) as f64 / S1S0_PUBLISHED - 1.0).abs());
    }
    Ok(verdict(worst <= 1e-3, format!("worst relative deviation {worst:.1e}")))
}

// 4: grid oracle and series agree within their combined errors, N = 2000,
// at most three minutes.
fn oracle_equivalence() -> Result<Verdict, Error> {
    let start = Instant::now();
    let grid = default_oracle_grid();
    assert_eq!(grid.points, 2000);
    let mut worst = 0.0f64;
    let mut at = (0, 0.0);
    for n in [1u32, 2] {
        for beta in [0.05, 0.1, 0.2, 0.5] {
            let s = s_ns(beta, n, 4000)?;
            let o = s_ns_oracle(beta, n, &grid)?;
            let ratio = (s.value - o.value).abs() / (s.error + o.error);
            if ratio > worst {
                worst = ratio;
                at = (n, beta);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(verdict(
        worst <= 1.0 && secs <= 180.0,
        format!(
            "max |diff|/(combined error) = {worst:.2} at n={} beta={}, {secs:.1} s",
            at.0, at.1
        ),
    ))
}

// 5: closed, assembled and effective-Hamiltonian shifts agree to 1e-8.
fn three_way_corrections() -> Result<Verdict, Error> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 3..=10i64 {
        for l in 2..n {
            let s = QuantumState::nl(n, l)?;
            let c = delta_e1_closed(s)?.value;
            let a = delta_e1_assembled(s)?.value;
            let e = delta_e1_effective(s)?.value;
            worst = worst.max(((a - c) / c).abs()).max(((e - c) / c).abs()).max(((e - a) / a).abs());
            count += 1;
        }
    }
    Ok(verdict(
        worst <= 1e-8,
        format!("{count} levels, worst relative spread {worst:.1e}"),
    ))
}

// 6: closed <r^-3>, <r^-4>, <r^-5> equal quadrature to 1e-10, n ≤ 10.
fn moments_vs_quadrature() -> Result<Verdict, Error> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 1..=10i64 {
        for l in 0..n {
            let s = QuantumState::nl(n, l)?;
            for k in 3..=5u32 {
                let closed = match inv_r_moment_closed(s, k) {
                    Ok(v) => v,
                    Err(Error::DivergentMoment { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let q = expectation_quadrature(s, |r| r.powi(-(k as i32)))?.value;
                worst = worst.max((q / closed - 1.0).abs());
                count += 1;
            }
        }
    }
    Ok(verdict(
        worst <= 1e-10,
        format!("{count} moments, worst relative deviation {worst:.1e}"),
    ))
}

// 7: the six lowest eigenvalues of ρ² + p² are 4k+3 within 1e-3 at N = 2000.
fn operator_spectrum() -> Result<Verdict, Error> {
    let ev = eigenvalues(&build_operator(&RadialGrid::uniform(12.0, 2000)?)?)?;
    let dev: Vec<f64> = (0..6).map(|k| (ev[k] - (4 * k + 3) as f64).abs()).collect();
    let worst = dev.iter().cloned().fold(0.0, f64::max);
    Ok(verdict(
        worst <= 1e-3,
        format!("lambda_0..5 = {:.5?}, worst deviation {worst:.1e}", &ev[..6]),
    ))
}

// 8: ω^(-1.00 ± 0.01) over two decades, and exactly zero for ns states.
fn second_order_scaling() -> Result<Verdict, Error> {
    let c = PhysicalConstants::codata2018();
    let nc = NcParameters::from_t(2.7e-15, c.planck_length_m, c.bohr_radius_m)?;
    let mut worst = 0.0f64;
    for (n, l, m) in [(2, 1, 1), (3, 2, -2), (5, 3, 1)] {
        let state = QuantumState::new(n, l, m)?;
        let pts: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let omega = 1e14 * 10f64.powf(i as f64 / 10.0);
                let e = second_order_oscillator_channel(state, omega, &nc).unwrap();
                (omega.ln(), e.abs().ln())
            })
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        worst = worst.max((sxy / sxx + 1.0).abs());
    }
    let mut ns_zero = true;
    for n in 1..=6 {
        for omega in [1e12, 1e16, 1e20] {
            ns_zero &= second_order_oscillator_channel(QuantumState::nl(n, 0)?, omega, &nc)? == 0.0;
        }
    }
    Ok(verdict(
        worst <= 0.01 && ns_zero,
        format!("worst |exponent + 1| = {worst:.1e}, ns states zero: {ns_zero}"),
    ))
}

// 9: <θ_i θ_j> = (<θ²>/3) δ_ij from the Gauss–Hermite oracle to 1e-3.
fn moment_identity() -> Result<Verdict, Error> {
    let m = moment_tensor_oracle(MomentOracle::GaussHermite { nodes: 3 })?;
    // exact <θ²> = 3/2 in units α = ħ = l_p = 1
    let third = 1.5 / 3.0;
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { third } else { 0.0 };
            worst = worst.max((m.second_moment[i][j] - want).abs() / third);
        }
    }
    Ok(verdict(worst <= 1e-3, format!("worst relative deviation {worst:.1e}")))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("S_1s(0) reproduction", s1s0_reproduction),
        ("bound reproduction", bound_reproduction),
        ("n^2 law", n_squared_law),
        ("oracle equivalence", oracle_equivalence),
        ("three-way correction equivalence", three_way_corrections),
        ("expectation-value oracle", moments_vs_quadrature),
        ("discretized operator spectrum", operator_spectrum),
        ("second-order scaling", second_order_scaling),
        ("moment identity", moment_identity),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        if !v.passed {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
