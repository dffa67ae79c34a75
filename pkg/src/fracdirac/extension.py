"""Per-Fourier-mode extension problem on the half space.

After removing the factor ``t^{n/2 - lam}`` the mode with frequency ``|xi| = k``
on the ``s``-eigenspace of ``M(xi)`` solves

    t Psi'' + (1 - 2 lam) Psi' - k^2 t Psi - s k Psi = 0,   Psi(0) = 1,

decaying as ``t -> inf``. The problem does not depend on ``n``. The flux
``P = t^{1-2 lam} Psi'`` stays bounded at ``t = 0`` for ``lam < 1/2`` and the
Dirichlet-to-Neumann value is ``-(d_lam / 2 lam) P(0) = s k^{2 lam}``.
For ``lam > 1/2`` the term ``s k t^{1-2 lam} / (1 - 2 lam)`` is subtracted
from ``P`` first.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, ParameterError, PrecisionError
from .specfun import d_lambda, gamma, kummer_V

T_FLOOR = 1e-12
RICHARDSON_T0 = 1e-6
RICHARDSON_DEPTH = 3


@dataclass(frozen=True)
class ModeProblem:
    n: int
    lam: float
    xi: float
    s: int
    M: int = 4096
    T_max: float | None = None
    grade: float = 3.0

    def __post_init__(self):
        if not (0 < self.lam < 1) or self.lam == 0.5:
            raise ParameterError(f"lambda={self.lam} must lie in (0, 1) minus {{1/2}}")
        if not self.xi > 0:
            raise ParameterError(f"|xi|={self.xi} must be positive")
        if self.s not in (1, -1):
            raise ParameterError(f"branch sign s={self.s} must be +1 or -1")
        if self.M < 8 or self.grade < 1:
            raise ParameterError("graded grid needs M >= 8 and grade >= 1")
        if self.T_max is None:
            object.__setattr__(self, "T_max", 40.0 / self.xi)
        if not self.T_max > 0:
            raise ParameterError(f"T_max={self.T_max} must be positive")

    @property
    def grid(self) -> np.ndarray:
        """``t_i = T_max (i/M)^grade`` for ``i = 1..M``."""
        i = np.arange(1, self.M + 1)
        return self.T_max * (i / self.M) ** self.grade

    @property
    def kummer_a(self) -> float:
        return 0.5 + self.lam + 0.5 * self.s

    @property
    def target(self) -> float:
        """Flat closed form ``s |xi|^{2 lam}``."""
        return self.s * self.xi ** (2 * self.lam)


@dataclass(frozen=True, eq=False)
class ModeSolution:
    """Profile normalized to ``Psi(0) = 1`` sampled on the problem grid.

    ``evaluate(t)`` returns ``(Psi, P)`` at arbitrary ``0 < t <= T_max`` with
    ``P = t^{1-2 lam} Psi'``.
    """

    problem: ModeProblem
    t: np.ndarray
    psi: np.ndarray
    flux: np.ndarray
    evaluate: Callable = field(repr=False)
    method: str = "ode"
    diagnostics: dict = field(default_factory=dict)

    @property
    def dtn(self) -> float:
        return dtn_extract(self, self.problem.lam)


# --- closed form ---------------------------------------------------------------------

def closed_form_mode(p: ModeProblem) -> ModeSolution:
    """Decaying solution through Tricomi's function:

    ``Psi = Gamma(a)/Gamma(2 lam) (2k)^{2 lam} t^{2 lam} e^{-kt} V(a, 1 + 2 lam, 2kt)``
    with ``a = 1/2 + lam + s/2``.
    """
    lam, k, a = p.lam, p.xi, p.kummer_a
    b = 1.0 + 2 * lam
    const = gamma(a) / gamma(2 * lam) * (2 * k) ** (2 * lam)

    def evaluate(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        psi = np.empty_like(t)
        flux = np.empty_like(t)
        for i, ti in enumerate(t):
            z = 2 * k * ti
            base = const * ti ** (2 * lam) * math.exp(-k * ti)
            v = kummer_V(a, b, z)
            # V'(a, b, z) = -a V(a+1, b+1, z)
            dv = -a * kummer_V(a + 1.0, b + 1.0, z) if a != 0 else 0.0
            psi[i] = base * v
            dpsi = base * ((2 * lam / ti - k) * v + 2 * k * dv)
            flux[i] = ti ** (1 - 2 * lam) * dpsi
        return psi, flux

    t = p.grid
    psi, flux = evaluate(t)
    return ModeSolution(p, t, psi, flux, evaluate, method="closed")


# --- numerical ODE solve ----------------------------------------------------------

def _asymptotic_seed(lam, k, s, T):
    """Two-term large-t expansion of the decaying solution, unnormalized."""
    a = 0.5 + lam + 0.5 * s
    c = -a * (a - 2 * lam) / (2 * k)
    power = 2 * lam - a
    psi = math.exp(-k * T) * T**power * (1 + c / T)
    dpsi = psi * (-k + power / T) - math.exp(-k * T) * T**power * c / T**2
    return psi, T ** (1 - 2 * lam) * dpsi


def _integrate(lam, k, s, T, t_end, rtol):
    def rhs(u, y):
        t = math.exp(u)
        return (t ** (2 * lam) * y[1], t ** (1 - 2 * lam) * (k * k * t + s * k) * y[0])

    psi0, flux0 = _asymptotic_seed(lam, k, s, T)
    # normalize the seed so the solution is O(1) near t = 0
    scale = 1.0 / psi0 * math.exp(-k * T)
    sol = solve_ivp(rhs, (math.log(T), math.log(t_end)), [psi0 * scale, flux0 * scale],
                    method="DOP853", rtol=rtol, atol=1e-300, dense_output=True)
    if not sol.success:
        raise IntegrationError(f"integrator failed: {sol.message}",
                               {"nfev": sol.nfev, "t_reached": math.exp(sol.t[-1]), "T_max": T})
    return sol


def _normalization(lam, sol, t):
    psi, flux = sol.sol(math.log(t))
    # Psi(0) up to O(t): remove the t^{2 lam} branch carried by the flux
    return psi - t ** (2 * lam) * flux / (2 * lam)


@lru_cache(maxsize=512)
def _solve_cached(lam, k, s, T, rtol):
    t_end = min(T_FLOOR, T * 1e-12)
    sol = _integrate(lam, k, s, T, t_end, rtol)
    alpha = _normalization(lam, sol, t_end)
    # contamination check: restart further out and compare normalized profiles
    sol2 = _integrate(lam, k, s, 1.5 * T, t_end, rtol)
    alpha2 = _normalization(lam, sol2, t_end)
    probe = np.log(np.geomspace(t_end * 10, T / 2, 9))
    drift = float(np.max(np.abs(sol.sol(probe)[0] / alpha - sol2.sol(probe)[0] / alpha2)))
    if drift > 1e-6:
        raise IntegrationError("growing mode contaminates the inward solution",
                               {"drift": drift, "T_max": T, "T_check": 1.5 * T})
    return sol, alpha, t_end, drift, sol.nfev + sol2.nfev


def solve_mode_ode(p: ModeProblem, rtol: float = 1e-12) -> ModeSolution:
    """Integrate inward in ``u = ln t`` from ``T_max`` with the decaying seed.

    The system ``dPsi/du = t^{2 lam} P``, ``dP/du = t^{1-2 lam}(k^2 t + s k) Psi``
    is regular at both ends; the growing solution decays along the inward
    direction so the seed error is damped by ``exp(-k T_max)``.
    """
    sol, alpha, t_end, drift, nfev = _solve_cached(p.lam, p.xi, p.s, p.T_max, rtol)

    def evaluate(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < t_end) or np.any(t > p.T_max):
            raise ParameterError(f"evaluation outside [{t_end}, {p.T_max}]")
        y = sol.sol(np.log(t)) / alpha
        return y[0], y[1]

    t = p.grid
    psi, flux = evaluate(t)
    diag = {"nfev": int(nfev), "t_min": t_end, "drift": drift, "scale": float(alpha), "rtol": rtol}
    return ModeSolution(p, t, psi, flux, evaluate, method="ode", diagnostics=diag)


# --- Dirichlet-to-Neumann -------------------------------------------------------

def _richardson(nodes, values, exponents):
    """Limit at 0 of ``values ~ L + sum_j c_j t^{e_j}`` through the given nodes."""
    A = np.column_stack([np.ones_like(nodes)] + [nodes**e for e in exponents])
    return float(np.linalg.solve(A, values)[0])


def _extrapolate(nodes, values, exponents, depth, label):
    full = _richardson(nodes[: depth + 1], values[: depth + 1], exponents[:depth])
    lower = _richardson(nodes[:depth], values[:depth], exponents[: depth - 1])
    if abs(full - lower) > 1e-6 * max(abs(full), 1e-300):
        raise PrecisionError(f"{label}: extrapolation did not settle",
                             {"nodes": nodes.tolist(), "values": values.tolist(),
                              "depth": depth, "estimates": [lower, full]})
    return full


def _correction_exponents(lam):
    if lam < 0.5:
        return [1 - 2 * lam, 1.0, 2 - 2 * lam, 2.0]
    return [2 - 2 * lam, 1.0, 3 - 2 * lam, 2.0]


def dtn_extract(sol: ModeSolution, lam: float, depth: int = RICHARDSON_DEPTH) -> float:
    """``-(d_lam / 2 lam) lim t^{1-2 lam} Psi'`` by Richardson extrapolation.

    The minus sign makes the limit the outward normal derivative, which is
    what reproduces ``s |xi|^{2 lam}``. For ``lam > 1/2`` the divergent
    ``s k t^{1-2 lam}/(1 - 2 lam)`` part is removed before the limit.
    """
    p = sol.problem
    if lam != p.lam:
        raise ParameterError(f"solution was computed for lambda={p.lam}, not {lam}")
    nodes = RICHARDSON_T0 / p.xi * 0.5 ** np.arange(depth + 1)
    _, flux = sol.evaluate(nodes)
    if lam > 0.5:
        flux = flux - p.s * p.xi * nodes ** (1 - 2 * lam) / (1 - 2 * lam)
    limit = _extrapolate(nodes, flux, _correction_exponents(lam), depth, "DtN limit")
    return -d_lambda(lam) / (2 * lam) * limit


def higher_derivative_dtn(sol: ModeSolution, lam: float, depth: int = RICHARDSON_DEPTH,
                          rel_step: float = 1e-4) -> float:
    """Variant through ``lim t^{1+j-2 lam} d^{j+1}Psi/dt^{j+1}``, ``j = floor(2 lam)``.

    ``Psi''`` is taken by a central difference of ``Psi'``; no subtraction is
    needed because differentiating once more removes the smooth ``t`` term.
    """
    p = sol.problem
    if lam != p.lam:
        raise ParameterError(f"solution was computed for lambda={p.lam}, not {lam}")
    j = math.floor(2 * lam)
    nodes = RICHARDSON_T0 / p.xi * 0.5 ** np.arange(depth + 1)

    def dpsi(t):
        _, flux = sol.evaluate(t)
        return flux * t ** (2 * lam - 1)

    if j == 0:
        deriv = dpsi(nodes)
        norm = 2 * lam
    else:
        h = rel_step * nodes
        deriv = (dpsi(nodes + h) - dpsi(nodes - h)) / (2 * h)
        norm = 2 * lam * (2 * lam - 1)
    values = nodes ** (1 + j - 2 * lam) * deriv
    limit = _extrapolate(nodes, values, _correction_exponents(lam), depth, "derivative DtN limit")
    return -d_lambda(lam) / norm * limit


# --- weighted energy ----------------------------------------------------------------

def _product_weights(t, gamma):
    """Weights ``w`` with ``sum w f(t_i) = int_0^T t^gamma I[f]``, ``I[f]`` the
    piecewise-linear interpolant through ``(0, f(0)=f(t_1))`` and the nodes.

    Power weights are integrated exactly cell by cell, which keeps the
    rule accurate for the integrable singularities at ``t = 0``.
    """
    a = np.concatenate(([0.0], t[:-1]))
    b = t
    m0 = (b ** (gamma + 1) - a ** (gamma + 1)) / (gamma + 1)
    m1 = (b ** (gamma + 2) - a ** (gamma + 2)) / (gamma + 2)
    h = b - a
    left = (b * m0 - m1) / h  # weight of the left endpoint value
    right = (m1 - a * m0) / h
    w = right.copy()
    w[:-1] += left[1:]
    w[0] += left[0]  # value at t=0 taken equal to the first node (bounded factor)
    return w


@lru_cache(maxsize=64)
def _cached_weights(key, gamma):
    return _product_weights(np.frombuffer(key), gamma)


def _weighted_energy(p, t, psi, dpsi, flux):
    """``int_0^inf t^{1-2 lam}(Psi'^2 + k^2 Psi^2 + s k Psi^2/t) dt`` on the graded grid.

    Written as ``t^{2 lam-1} P^2 + k^2 t^{1-2 lam} Psi^2 + s k t^{-2 lam} Psi^2``
    with bounded factors ``P^2`` and ``Psi^2`` handled by product integration;
    the tail beyond ``T_max`` uses the ``exp(-2kt)`` decay of the integrand.
    """
    lam, k, s = p.lam, p.xi, p.s
    key = np.ascontiguousarray(t).tobytes()
    w_flux = _cached_weights(key, 2 * lam - 1)
    w_mass = _cached_weights(key, 1 - 2 * lam)
    w_pot = _cached_weights(key, -2 * lam)
    body = w_flux @ flux**2 + k * k * (w_mass @ psi**2) + s * k * (w_pot @ psi**2)
    T = t[-1]
    dens_T = T ** (1 - 2 * lam) * (dpsi[-1] ** 2 + k * k * psi[-1] ** 2) + s * k * T ** (-2 * lam) * psi[-1] ** 2
    return float(body + dens_T / (2 * k))


def energy_rhs(p: ModeProblem) -> float:
    return 2 * p.lam / d_lambda(p.lam) * p.target


def mode_energy(p: ModeProblem, sol: ModeSolution, lam: float):
    """``(lhs, rhs)`` of the per-mode energy identity, ``rhs = (2 lam/d_lam) s |xi|^{2 lam}``."""
    if not 0 < lam < 0.5:
        raise ParameterError(f"energy identity is tested for 0 < lambda < 1/2, got {lam}")
    if lam != p.lam:
        raise ParameterError(f"problem has lambda={p.lam}, not {lam}")
    t = p.grid if sol.problem.M != p.M else sol.t
    psi, flux = sol.evaluate(t)
    dpsi = flux * t ** (2 * lam - 1)
    return _weighted_energy(p, t, psi, dpsi, flux), energy_rhs(p)


def energy_convergence(p: ModeProblem, sol: ModeSolution, levels=(1024, 2048, 4096)):
    """Relative energy gaps on refined grids and the observed order."""
    gaps = []
    for M in levels:
        q = ModeProblem(p.n, p.lam, p.xi, p.s, M=M, T_max=p.T_max, grade=p.grade)
        lhs, rhs = mode_energy(q, sol, p.lam)
        gaps.append(abs(lhs - rhs) / abs(rhs))
    orders = [math.log2(gaps[i] / gaps[i + 1]) for i in range(len(gaps) - 1)]
    return gaps, orders


# --- Sobolev gap -----------------------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """``amplitude * exp(-1/(1 - x^2))`` with ``x = (t - center)/width``, zero outside."""

    center: float
    width: float
    amplitude: float

    def __post_init__(self):
        if not self.width > 0:
            raise ParameterError("bump width must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        x = (t - self.center) / self.width
        inside = np.abs(x) < 1
        val = np.zeros_like(t)
        der = np.zeros_like(t)
        xi = x[inside]
        e = np.exp(-1.0 / (1.0 - xi**2))
        val[inside] = self.amplitude * e
        der[inside] = self.amplitude * e * (-2 * xi / (1 - xi**2) ** 2) / self.width
        return val, der

    def scaled(self, eps: float) -> "Bump":
        return Bump(self.center, self.width, eps * self.amplitude)


def random_bumps(rng: np.random.Generator, count: int, xi: float = 1.0):
    """Bumps supported in ``(0, 6/xi)`` with random center, width and sign."""
    out = []
    for _ in range(count):
        width = rng.uniform(0.05, 1.0) / xi
        center = rng.uniform(width * 1.05, 5.0 / xi)
        out.append(Bump(center, width, rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 1.0)))
    return out


def sobolev_gap(p: ModeProblem, perturbation, lam: float, sol: ModeSolution | None = None) -> float:
    """``E(Psi + eta) - (2 lam/d_lam) s |xi|^{2 lam}`` for a zero-trace ``eta``.

    ``perturbation(t)`` returns ``(eta, eta')``. The energy of the sum is
    evaluated directly, cross term included.
    """
    if lam != p.lam:
        raise ParameterError(f"problem has lambda={p.lam}, not {lam}")
    eta0, _ = perturbation(np.array([0.0]))
    if abs(float(eta0[0])) > 1e-14:
        raise ParameterError(f"perturbation has nonzero trace eta(0)={float(eta0[0])}")
    if sol is None:
        sol = solve_mode_ode(p)
    t = p.grid
    psi, flux = sol.evaluate(t)
    dpsi = flux * t ** (2 * lam - 1)
    eta, deta = perturbation(t)
    total = _weighted_energy(p, t, psi + eta, dpsi + deta, flux + t ** (1 - 2 * lam) * deta)
    return total - energy_rhs(p)


# --- batch -----------------------------------------------------------------------------

def _solve_row(p: ModeProblem):
    sol = solve_mode_ode(p)
    dtn = dtn_extract(sol, p.lam)
    row = {"n": p.n, "lambda": p.lam, "xi": p.xi, "s": p.s, "dtn_numeric": dtn,
           "dtn_closed": p.target, "rel_err": abs(dtn - p.target) / abs(p.target),
           "energy_lhs": math.nan, "energy_rhs": math.nan}
    if p.lam < 0.5:
        row["energy_lhs"], row["energy_rhs"] = mode_energy(p, sol, p.lam)
    return row


def map_modes(func, problems, workers: int = 1):
    """Apply ``func`` to every problem; results come back in input order."""
    problems = list(problems)
    if workers <= 1:
        return [func(p) for p in problems]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, problems))


def solve_batch(problems, workers: int = 1):
    return map_modes(_solve_row, problems, workers)


def read_modes_csv(path, **grid) -> list[ModeProblem]:
    """Rows ``n,lambda,xi,s``."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"n", "lambda", "xi", "s"} - set(reader.fieldnames or [])
        if missing:
            raise ParameterError(f"mode file lacks columns {sorted(missing)}")
        for row in reader:
            out.append(ModeProblem(int(row["n"]), float(row["lambda"]), float(row["xi"]),
                                   int(float(row["s"])), **grid))
    return out


BATCH_COLUMNS = ["n", "lambda", "xi", "s", "dtn_numeric", "dtn_closed", "rel_err", "energy_lhs", "energy_rhs"]


def write_batch_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BATCH_COLUMNS)
        for row in rows:
            w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in BATCH_COLUMNS])
