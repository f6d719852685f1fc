"""Smoke test for the nc_hydrogen extension module.

Build and install first:

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml
    python python/smoke_test.py
"""

import math
from fractions import Fraction

import nc_hydrogen as nc


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    assert close(nc.S1S0, 1.72006, 1e-5)

    # hydrogen
    assert nc.energy0(2) == -0.125
    assert close(nc.inv_r_moment(3, 2, 3), nc.inv_r_moment_quadrature(3, 2, 3), 1e-10)

    # first-order shifts, three routes
    routes = [nc.delta_e1(5, 3, 1, method=m) for m in ("closed", "assembled", "effective")]
    for r in routes[1:]:
        assert close(r.value, routes[0].value, 1e-8), (r, routes[0])
    try:
        nc.delta_e1(3, 1)
    except ValueError as e:
        assert "diverges" in str(e)
    else:
        raise AssertionError("l = 1 must be rejected")

    p = nc.NcParameters.from_t(1e-3)
    assert close(6 * p.beta ** 4, p.t ** 2, 1e-12)
    assert close(routes[0].energy(p), routes[0].value * 1e-6, 1e-12)

    # ns series and its closed form
    s = nc.s_ns(0.0, n=1, k=200)
    c = nc.s_1s0_closed(200)
    assert abs(s.value - 1.72006) < 1e-4 and abs(c.value - 1.72006) < 1e-4
    assert not s.flagged and len(s.terms) == 201
    assert s.csv.startswith("k,C_k,I_k,term\n")
    assert close(nc.s_ns(0.0, n=2).value / 4, s.value, 1e-6)

    o = nc.s_ns_oracle(0.5, n=1)
    ref = nc.s_ns(0.5, n=1)
    assert abs(o.value - ref.value) <= o.error + ref.error, (o, ref)

    # bounds
    b = nc.bound_from_uncertainty(4.5e-15)
    assert float(f"{b.hbar_sqrt_theta2_bound_m2:.1e}") == 7.7e-36, b
    assert float(f"{b.alpha_bound:.1e}") == 2.4e34, b
    assert close(nc.relative_shift_coefficient(), 7 / (3 * math.sqrt(6)) * nc.S1S0, 1e-15)

    # moments and special functions
    m = nc.moment_tensor()
    for i in range(3):
        for j in range(3):
            assert abs(m[i][j] - (0.5 if i == j else 0.0)) < 1e-12
    assert Fraction(nc.hyp2f1_terminating(2)) == Fraction(7, 15)
    assert nc.laguerre(2, 0.5, 1.0) == -0.125

    print("nc_hydrogen smoke test passed")


if __name__ == "__main__":
    main()
