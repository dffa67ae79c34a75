"""Rayleigh-quotient form of the fractional spinorial Yamabe problem on the torus.

    J(phi) = ||phi||_q^2 / |Re <Dbar^{-1} phi, phi>|,   q = 2n/(n + 2 lam)

with ``Dbar^{-1}`` the spectral pseudo-inverse of ``Dbar^{2 lam}`` (zero on
the constant mode). Critical points give ``psi = Dbar^{-1} phi`` solving
``Dbar psi = mu |psi|^{4 lam/(n - 2 lam)} psi``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, OptimizationError, ParameterError
from .flat import SpinorField, geometric_inverse, remove_mean, yamabe_residual

DENOM_FLOOR = 1e-14


def exponent_q(n: int, lam: float) -> float:
    return 2 * n / (n + 2 * lam)


def _parts(phi: SpinorField, lam: float):
    n = phi.grid.n
    if not 0 < lam < n / 2:
        raise ParameterError(f"lambda={lam} outside (0, n/2)")
    q = exponent_q(n, lam)
    dv = phi.grid.cell_volume
    norm = phi.pointwise_norm
    s_q = float(np.sum(norm**q) * dv)
    inv = geometric_inverse(phi, lam)
    den = float(np.real(np.vdot(inv.values, phi.values)) * dv)
    return q, norm, s_q, inv, den


def functional(phi: SpinorField, lam: float) -> float:
    q, _, s_q, _, den = _parts(phi, lam)
    if abs(den) < DENOM_FLOOR:
        raise DegenerateError(f"pairing {den:.3e} is below {DENOM_FLOOR}: field lies in the kernel")
    return s_q ** (2 / q) / abs(den)


def value_and_gradient(phi: SpinorField, lam: float):
    """``J`` and its gradient for the real pairing ``Re sum_x <u, v> dx``."""
    q, norm, s_q, inv, den = _parts(phi, lam)
    if abs(den) < DENOM_FLOOR:
        raise DegenerateError(f"pairing {den:.3e} is below {DENOM_FLOOR}")
    J = s_q ** (2 / q) / abs(den)
    weight = np.zeros_like(norm)
    nz = norm > 0
    weight[nz] = norm[nz] ** (q - 2)
    grad_num = 2 * s_q ** (2 / q - 1) * weight[..., None] * phi.values
    grad = (grad_num - 2 * J * math.copysign(1.0, den) * inv.values) / abs(den)
    return J, phi.with_values(grad)


def gradient(phi: SpinorField, lam: float) -> SpinorField:
    return value_and_gradient(phi, lam)[1]


@dataclass
class YamabeState:
    phi: SpinorField
    lam: float
    value: float
    iterations: int = 0
    trace: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    converged: bool = False

    @property
    def n(self) -> int:
        return self.phi.grid.n


def _normalize(phi):
    return phi.with_values(phi.values / phi.l2_norm())


def minimize(initial: SpinorField, lam: float, max_iters: int = 200, tol: float = 1e-6,
             step: float = 0.05, armijo: float = 1e-4, max_halvings: int = 60) -> YamabeState:
    """Normalized gradient descent with backtracking.

    Iterates are kept mean-free and of unit L^2 norm (J is 0-homogeneous).
    Each step moves along ``-g/||g||`` by a length that starts at twice the
    last accepted one and is halved until the Armijo condition holds.
    """
    phi = _normalize(remove_mean(initial))
    J, g = value_and_gradient(phi, lam)
    state = YamabeState(phi, lam, J, trace=[J])
    alpha = step
    for it in range(max_iters):
        g = remove_mean(g)
        gnorm = g.l2_norm()
        state.grad_norms.append(gnorm)
        if gnorm <= tol * J:
            state.converged = True
            break
        direction = -g.values / gnorm
        trial_alpha = min(2 * alpha, 1.0)
        for _ in range(max_halvings):
            cand = _normalize(phi.with_values(phi.values + trial_alpha * direction))
            J_new, g_new = value_and_gradient(cand, lam)
            if J_new <= J - armijo * trial_alpha * gnorm:
                break
            trial_alpha /= 2
        else:
            raise OptimizationError("line search found no descent step",
                                    {"iteration": it, "J": J, "grad_norm": gnorm, "trace": state.trace})
        phi, J, g, alpha = cand, J_new, g_new, trial_alpha
        state.phi, state.value = phi, J
        state.trace.append(J)
        state.iterations = it + 1
    return state


def euler_lagrange_mu(phi: SpinorField, lam: float) -> float:
    """Coefficient ``mu`` such that a critical ``phi`` gives ``Dbar psi = mu |psi|^p psi``.

    From ``grad J = 0``: ``|phi|^{q-2} phi = c psi`` with
    ``c = sgn * J * S^{1 - 2/q}``, hence ``mu = sgn |c|^{(n+2 lam)/(n-2 lam)}``.
    """
    n = phi.grid.n
    q, _, s_q, _, den = _parts(phi, lam)
    J = s_q ** (2 / q) / abs(den)
    c = J * s_q ** (1 - 2 / q)
    return math.copysign(c ** ((n + 2 * lam) / (n - 2 * lam)), den)


def el_residual(state: YamabeState, mu: float | None = None) -> float:
    """Relative Euler-Lagrange residual of ``psi = Dbar^{-1} phi``."""
    psi = geometric_inverse(state.phi, state.lam)
    if not np.any(np.abs(psi.values) > 0):
        raise DegenerateError("psi = Dbar^{-1} phi vanishes")
    if mu is None:
        mu = euler_lagrange_mu(state.phi, state.lam)
    return yamabe_residual(psi, state.lam, mu)


def run_report(state: YamabeState, residual: float) -> dict:
    g = state.phi.grid
    return {
        "lambda": state.lam,
        "n": g.n,
        "grid": {"L": g.L, "m": g.m},
        "iterations": state.iterations,
        "J_trace": list(state.trace),
        "final_J": state.value,
        "el_residual": residual,
    }


def write_run_report(path, state: YamabeState, residual: float) -> None:
    with open(path, "w") as fh:
        json.dump(run_report(state, residual), fh, indent=2)
