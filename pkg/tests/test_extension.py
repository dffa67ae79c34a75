import math

import numpy as np
import pytest

import oracle_values as ov
from fracdirac.errors import ParameterError
from fracdirac.extension import (
    BATCH_COLUMNS, Bump, ModeProblem, closed_form_mode, dtn_extract, energy_convergence,
    energy_rhs, higher_derivative_dtn, map_modes, mode_energy, random_bumps, read_modes_csv,
    sobolev_gap, solve_batch, solve_mode_ode, write_batch_csv,
)
from fracdirac.specfun import d_lambda


def rel(a, b):
    return np.abs(a - b) / np.abs(b)


def test_problem_validation():
    for kw in (dict(lam=0.5), dict(lam=1.2), dict(lam=0.0), dict(xi=0.0), dict(s=0), dict(M=4)):
        args = dict(n=2, lam=0.3, xi=1.0, s=1) | kw
        with pytest.raises(ParameterError):
            ModeProblem(**args)
    p = ModeProblem(2, 0.3, 2.0, 1)
    assert p.T_max == 20.0
    t = p.grid
    assert t[0] > 0 and np.all(np.diff(t) > 0) and t[-1] == pytest.approx(20.0)


@pytest.mark.parametrize("s", [1, -1])
@pytest.mark.parametrize("lam", [0.1, 0.3, 0.7])
def test_ode_matches_closed_form(lam, s):
    p = ModeProblem(2, lam, 1.0, s)
    t = np.geomspace(0.01, 5.0, 12)
    ode, closed = solve_mode_ode(p), closed_form_mode(ModeProblem(2, lam, 1.0, s, M=8))
    psi_o, flux_o = ode.evaluate(t)
    psi_c, flux_c = closed.evaluate(t)
    assert np.max(rel(psi_o, psi_c)) <= 1e-7
    assert np.max(rel(flux_o, flux_c)) <= 1e-7


def test_normalization_at_smallest_node():
    for lam in (0.1, 0.3, 0.7):
        p = ModeProblem(2, lam, 1.0, 1)
        sol = solve_mode_ode(p)
        t1 = sol.t[0]
        assert abs(sol.psi[0] - t1 ** (2 * lam) * sol.flux[0] / (2 * lam) - 1) <= 1e-8
        assert sol.diagnostics["drift"] <= 1e-6


def test_closed_form_large_t_asymptotics():
    # Psi ~ t^{2 lam - a} e^{-kt}, so the log-derivative is -k + (2 lam - a)/t + O(t^-2)
    for lam, k, s in [(0.3, 1.0, 1), (0.3, 2.0, -1), (0.7, 0.5, 1)]:
        p = ModeProblem(2, lam, k, s, M=8)
        t = 30.0 / k
        psi, flux = closed_form_mode(p).evaluate([t])
        logd = flux[0] * t ** (2 * lam - 1) / psi[0]
        a = p.kummer_a
        assert abs(logd - (-k + (2 * lam - a) / t)) <= 1e-3 * k
        assert abs(logd + k) <= 0.05 * k


def test_closed_form_small_t_exponents():
    # Psi = 1 + c t^{2 lam} + O(t): the leading correction has exponent 2 lam
    # and c = -s |xi|^{2 lam} / d_lam
    for lam, s in [(0.1, 1), (0.3, -1), (0.3, 1)]:
        p = ModeProblem(2, lam, 1.0, s, M=8)
        t = np.geomspace(1e-9, 1e-7, 6)
        psi, _ = closed_form_mode(p).evaluate(t)
        dev = psi - 1
        slope = np.polyfit(np.log(t), np.log(np.abs(dev)), 1)[0]
        assert abs(slope - 2 * lam) <= 1e-3
        A = np.column_stack([t ** (2 * lam), t])
        coef = np.linalg.lstsq(A, dev, rcond=None)[0]
        assert rel(-d_lambda(lam) * coef[0], p.target) <= 1e-4


def test_xi_scaling():
    p1, p2 = ModeProblem(2, 0.3, 1.0, 1), ModeProblem(2, 0.3, 2.0, 1)
    s1, s2 = solve_mode_ode(p1), solve_mode_ode(p2)
    t = np.geomspace(0.01, 5.0, 20)
    assert np.max(rel(s2.evaluate(t)[0], s1.evaluate(2 * t)[0])) <= 1e-9


def test_dtn_examples():
    sol = solve_mode_ode(ModeProblem(2, 0.3, 1.0, 1))
    assert rel(sol.dtn, 1.0) <= 1e-4
    sol = solve_mode_ode(ModeProblem(2, 0.3, 2.0, -1))
    assert rel(sol.dtn, ov.DTN_XI2_LAM03_NEG) <= 1e-4
    sol = solve_mode_ode(ModeProblem(3, 0.7, 1.0, 1))
    assert rel(dtn_extract(sol, 0.7), 1.0) <= 1e-3


@pytest.mark.parametrize("lam", [0.1, 0.3, 0.7])
@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0])
def test_dtn_grid(lam, xi):
    tol = 1e-4 if lam < 0.5 else 1e-3
    for s in (1, -1):
        p = ModeProblem(1, lam, xi, s)
        assert rel(dtn_extract(solve_mode_ode(p), lam), p.target) <= tol


def test_dtn_independent_of_n():
    vals = [solve_mode_ode(ModeProblem(n, 0.3, 1.0, -1)).dtn for n in (1, 2, 3)]
    assert vals[0] == vals[1] == vals[2]


def test_dtn_lambda_mismatch():
    sol = solve_mode_ode(ModeProblem(2, 0.3, 1.0, 1))
    with pytest.raises(ParameterError):
        dtn_extract(sol, 0.4)
    with pytest.raises(ParameterError):
        higher_derivative_dtn(sol, 0.4)


def test_higher_derivative_variant():
    sol = solve_mode_ode(ModeProblem(2, 0.3, 1.0, 1))
    assert abs(higher_derivative_dtn(sol, 0.3) - dtn_extract(sol, 0.3)) <= 1e-6
    sol = solve_mode_ode(ModeProblem(3, 0.7, 1.0, -1))
    a, b = higher_derivative_dtn(sol, 0.7), dtn_extract(sol, 0.7)
    assert rel(a, b) <= 1e-3
    assert rel(a, -1.0) <= 1e-3


def test_continuity_across_half():
    xi = 1.7
    for lam in (0.45, 0.55):
        p = ModeProblem(2, lam, xi, 1)
        sol = solve_mode_ode(p)
        tol = 1e-4 if lam < 0.5 else 1e-3
        assert rel(dtn_extract(sol, lam), xi ** (2 * lam)) <= tol
        assert rel(higher_derivative_dtn(sol, lam), xi ** (2 * lam)) <= tol


@pytest.mark.parametrize("s", [1, -1])
def test_energy_identity(s):
    p = ModeProblem(2, 0.3, 1.0, s)
    lhs, rhs = mode_energy(p, solve_mode_ode(p), 0.3)
    assert rel(lhs, rhs) <= 1e-3
    assert np.sign(lhs) == np.sign(rhs) == s
    assert rhs == pytest.approx(2 * 0.3 / d_lambda(0.3) * s)


def test_energy_scaling_in_xi():
    p1, p2 = ModeProblem(2, 0.1, 1.0, 1), ModeProblem(2, 0.1, 2.0, 1)
    l1, r1 = mode_energy(p1, solve_mode_ode(p1), 0.1)
    l2, r2 = mode_energy(p2, solve_mode_ode(p2), 0.1)
    assert r2 / r1 == pytest.approx(2**0.2, rel=1e-14)
    assert rel(l2 / l1, 2**0.2) <= 1e-3


@pytest.mark.parametrize("lam", [0.1, 0.3, 0.45])
def test_energy_convergence_order(lam):
    p = ModeProblem(2, lam, 1.0, 1)
    gaps, orders = energy_convergence(p, solve_mode_ode(p))
    assert gaps[-1] <= 1e-3
    assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))
    assert min(orders) >= 1


def test_energy_rejects_upper_range():
    p = ModeProblem(2, 0.7, 1.0, 1)
    with pytest.raises(ParameterError):
        mode_energy(p, solve_mode_ode(p), 0.7)


@pytest.mark.parametrize("s", [1, -1])
def test_sobolev_gap(s, rng):
    p = ModeProblem(2, 0.3, 1.0, s)
    sol = solve_mode_ode(p)
    zero = sobolev_gap(p, Bump(1.0, 0.5, 0.0), 0.3, sol)
    assert abs(zero) <= 1e-3 * abs(energy_rhs(p))
    gaps = [sobolev_gap(p, b, 0.3, sol) for b in random_bumps(rng, 100, p.xi)]
    assert min(gaps) > 1e-3 * abs(energy_rhs(p))


def test_sobolev_quadratic_growth():
    p = ModeProblem(2, 0.3, 1.0, 1)
    sol = solve_mode_ode(p)
    bump = Bump(1.5, 0.8, 1.0)
    base = sobolev_gap(p, bump.scaled(0.0), 0.3, sol)
    eps = np.array([0.05, 0.1, 0.2, 0.4])
    gaps = np.array([sobolev_gap(p, bump.scaled(e), 0.3, sol) for e in eps]) - base
    slope = np.polyfit(np.log(eps), np.log(gaps), 1)[0]
    assert abs(slope - 2) <= 0.1


def test_sobolev_trace_error():
    p = ModeProblem(2, 0.3, 1.0, 1)
    with pytest.raises(ParameterError):
        sobolev_gap(p, Bump(0.0, 0.5, 1.0), 0.3)
    with pytest.raises(ParameterError):
        Bump(1.0, 0.0, 1.0)


def test_bump_derivative():
    b = Bump(1.0, 0.4, 0.7)
    t = np.linspace(0.65, 1.35, 9)
    h = 1e-6
    fd = (b(t + h)[0] - b(t - h)[0]) / (2 * h)
    assert np.max(np.abs(fd - b(t)[1])) <= 1e-6


def test_batch_roundtrip(tmp_path):
    path = tmp_path / "modes.csv"
    path.write_text("n,lambda,xi,s\n2,0.3,1.0,1\n3,0.7,2.0,-1\n1,0.1,0.5,-1\n")
    problems = read_modes_csv(path)
    rows = solve_batch(problems)
    assert [r["xi"] for r in rows] == [1.0, 2.0, 0.5]
    assert all(r["rel_err"] <= 1e-3 for r in rows)
    assert math.isnan(rows[1]["energy_lhs"])
    out = tmp_path / "out.csv"
    write_batch_csv(out, rows)
    lines = out.read_text().splitlines()
    assert lines[0].split(",") == BATCH_COLUMNS
    assert len(lines) == 4


def test_batch_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("n,lambda,xi\n2,0.3,1.0\n")
    with pytest.raises(ParameterError):
        read_modes_csv(path)


def _square(x):
    return x * x


def test_map_modes_keeps_order():
    assert map_modes(_square, range(6), workers=2) == [0, 1, 4, 9, 16, 25]
    assert map_modes(_square, range(6)) == [0, 1, 4, 9, 16, 25]
