"""Round sphere model in the eigenbasis of ``nu.D``.

Eigenvalues of ``nu.D`` come in pairs ``+-mu_k`` with ``mu_k = n/2 + k - 1``.
The fractional operator is diagonal there, acting on the ``s``-branch of
level ``k`` by ``s Gamma(mu_k + 1/2 + lam) / Gamma(mu_k + 1/2 - lam)``.
Radial hypergeometric profiles give an independent route to the same
numbers through their expansion at the conformal boundary.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, ParameterError, PoleError
from .specfun import d_lambda, digamma, gamma_ratio, hyp2f1

SIGNS = (1, -1)


def mu(n: int, k: int) -> float:
    if k < 1 or int(k) != k:
        raise ParameterError(f"level k={k} must be an integer >= 1")
    return n / 2 + k - 1


def gamma_multiplier(lam: float, mu_val: float) -> float:
    """``F(lam, mu) = Gamma(mu + 1/2 + lam) / Gamma(mu + 1/2 - lam)``."""
    try:
        return gamma_ratio(mu_val + 0.5 + lam, mu_val + 0.5 - lam)
    except PoleError as exc:
        raise PoleError(f"multiplier pole at lambda={lam}, mu={mu_val}: {exc}",
                        argument=exc.argument, where=f"F(lambda={lam}, mu={mu_val})") from exc


def sphere_multiplier(lam: float, mu_val: float, s: int) -> float:
    if s not in SIGNS:
        raise ParameterError(f"branch sign s={s} must be +1 or -1")
    if not lam > 0:
        raise ParameterError(f"lambda={lam} must be positive")
    return s * gamma_multiplier(lam, mu_val)


@dataclass(frozen=True, eq=False)
class SphereSpectrum:
    """Coefficients ``c[k-1, 0]`` on the ``+`` branch and ``c[k-1, 1]`` on the ``-`` branch."""

    n: int
    coeffs: np.ndarray  # (K, 2) complex

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[1] != 2 or c.shape[0] < 1:
            raise ParameterError(f"coefficients must have shape (K, 2), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ParameterError("non-finite spectral coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def delta(cls, n, K, k, s) -> "SphereSpectrum":
        c = np.zeros((K, 2), dtype=complex)
        c[k - 1, SIGNS.index(s)] = 1.0
        return cls(n, c)

    def _diagonal(self, value) -> "SphereSpectrum":
        mult = np.empty((self.K, 2))
        for k in range(1, self.K + 1):
            for col, s in enumerate(SIGNS):
                try:
                    mult[k - 1, col] = value(k, s)
                except PoleError as exc:
                    raise PoleError(f"mode (k={k}, s={s:+d}): {exc}", argument=exc.argument,
                                    where=f"mode (k={k}, s={s:+d})") from exc
        return SphereSpectrum(self.n, self.coeffs * mult)


def apply_fractional_dirac_sphere(spec: SphereSpectrum, lam: float) -> SphereSpectrum:
    return spec._diagonal(lambda k, s: sphere_multiplier(lam, mu(spec.n, k), s))


def recursion_gap(lam: float, mu_val: float) -> float:
    """Relative defect of ``F(lam+1) = (mu^2 - (lam+1/2)^2) F(lam)``."""
    upper = gamma_multiplier(lam + 1.0, mu_val)
    lower = gamma_multiplier(lam, mu_val)
    return abs(upper - (mu_val**2 - (lam + 0.5) ** 2) * lower) / abs(upper)


def q_multiplier(n: int, mu_val: float, s: int) -> float:
    """``-d/dlam`` of the ``s``-multiplier at ``lam = n/2``."""
    a, b = mu_val + 0.5 + n / 2, mu_val + 0.5 - n / 2
    if b <= 0:
        raise PoleError(f"digamma pole: mu + 1/2 - n/2 = {b}", argument=b, where="q_operator")
    return -s * gamma_ratio(a, b) * (digamma(a) + digamma(b))


def q_operator_sphere(spec: SphereSpectrum, n: int | None = None) -> SphereSpectrum:
    n = spec.n if n is None else n
    if n != spec.n:
        raise ParameterError(f"spectrum lives on S^{spec.n}, not S^{n}")
    return spec._diagonal(lambda k, s: q_multiplier(n, mu(n, k), s))


# --- hypergeometric radial profiles ----------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialProfile:
    n: int
    k: int
    lam: float
    kind: str
    y: np.ndarray
    values: np.ndarray


def _profile_value(n, k, lam, kind, y):
    m = mu(n, k)
    a, b = m + 0.5 - lam, m + 0.5 + lam
    sh, ch = math.sinh(y / 2), math.cosh(y / 2)
    z = -sh * sh
    if kind == "f":
        return sh ** (k - 1) * ch**k * hyp2f1(a, b, m + 0.5, z)
    return sh**k * ch ** (k - 1) * hyp2f1(a, b, m + 1.5, z)


def radial_profile(n: int, k: int, lam: float, kind: str, y_grid) -> RadialProfile:
    """Sample ``f_k`` (``kind='f'``) or ``g_k`` (``kind='g'``) on ``y > 0``.

    Both are regular at ``y = 0``; ``f_k`` goes with the eigenvalue ``+mu_k``
    of ``nu.D`` and ``g_k`` with ``-mu_k``.
    """
    if kind not in ("f", "g"):
        raise ParameterError(f"kind must be 'f' or 'g', got {kind!r}")
    y = np.atleast_1d(np.asarray(y_grid, dtype=float))
    if np.any(y <= 0):
        raise ParameterError("radial profiles need y > 0")
    vals = np.empty_like(y)
    for i, yi in enumerate(y):
        try:
            vals[i] = _profile_value(n, k, lam, kind, yi)
        except Exception as exc:
            raise type(exc)(f"{exc} [profile n={n} k={k} lambda={lam} kind={kind} y={yi}]") from exc
    return RadialProfile(n, k, lam, kind, y, vals)


@dataclass(frozen=True)
class ScatteringFit:
    value: float
    c1: float
    c2: float
    condition: float
    residual: float


def fit_scattering(n: int, k: int, lam: float, s: int = 1, window=(1e-4, 1e-2),
                   points: int = 40, terms: int = 6) -> ScatteringFit:
    """Least-squares fit of the profile in ``r = 2 e^{-y}`` near ``r = 0``.

    The basis is ``r^{n/2 - lam + j}`` and ``r^{n/2 + lam + j}`` for
    ``j < terms``; the returned value is ``d_lam c2/c1`` built from the two
    leading coefficients.
    """
    if not 0 < lam < 0.5:
        raise ParameterError(f"profile extraction needs 0 < lambda < 1/2, got {lam}")
    if s not in SIGNS:
        raise ParameterError(f"branch sign s={s} must be +1 or -1")
    lo, hi = window
    ncols = 2 * terms
    if points < ncols or not 0 < lo < hi:
        raise ConditioningError(
            f"fit window {window} with {points} points cannot determine {ncols} coefficients",
            {"window": window, "points": points, "columns": ncols})
    r = np.geomspace(lo, hi, points)
    prof = radial_profile(n, k, lam, "f" if s == 1 else "g", np.log(2.0 / r))
    rho = r / hi  # scaled variable keeps the columns O(1)
    exps = [n / 2 - lam + j for j in range(terms)] + [n / 2 + lam + j for j in range(terms)]
    A = np.column_stack([rho**e for e in exps])
    scale = np.linalg.norm(A, axis=0)
    coef, _, rank, sv = np.linalg.lstsq(A / scale, prof.values, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if rank < ncols or cond > 1e12:
        raise ConditioningError(f"ill-conditioned profile fit on window {window}",
                                {"window": window, "condition": cond, "rank": int(rank)})
    coef = coef / scale
    c1 = coef[0] * hi ** (-exps[0])
    c2 = coef[terms] * hi ** (-exps[terms])
    resid = float(np.linalg.norm(A @ coef - prof.values) / np.linalg.norm(prof.values))
    return ScatteringFit(d_lambda(lam) * c2 / c1, c1, c2, cond, resid)


def scattering_from_profile(n: int, k: int, lam: float, s: int = 1, **kw) -> float:
    """Multiplier of level ``k`` recovered from the boundary expansion of its radial profile."""
    return fit_scattering(n, k, lam, s, **kw).value


# --- I/O -------------------------------------------------------------------------

def write_spectrum_csv(path, spec: SphereSpectrum) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "s", "re", "im"])
        for k in range(1, spec.K + 1):
            for col, s in enumerate(SIGNS):
                c = spec.coeffs[k - 1, col]
                w.writerow([k, s, repr(float(c.real)), repr(float(c.imag))])


def read_spectrum_csv(path, n: int) -> SphereSpectrum:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((int(row["k"]), int(row["s"]), complex(float(row["re"]), float(row["im"]))))
    K = max(k for k, _, _ in rows)
    c = np.zeros((K, 2), dtype=complex)
    for k, s, v in rows:
        c[k - 1, SIGNS.index(s)] = v
    return SphereSpectrum(n, c)
