"""Real special functions: Gamma family, Gauss 2F1 on z <= 0, Kummer M and V.

Poles are reported with :class:`~fracdirac.errors.PoleError` instead of
silently returning infinities. ``kummer_V`` is Tricomi's confluent function
(``t**(b-1) V(a, b, t) -> Gamma(b-1)/Gamma(a)`` as ``t -> 0``).
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DegenerateParameterError, ParameterError, PoleError

_SERIES_MAX_TERMS = 20000
_EPS = np.finfo(float).eps


def _is_pole(x) -> bool:
    return x <= 0 and float(x).is_integer()


def _check_pole(x, where):
    if _is_pole(x):
        raise PoleError(f"Gamma pole at {where} argument {x!r}", argument=x, where=where)


def gamma(x: float) -> float:
    _check_pole(x, "gamma")
    return math.gamma(x)


def lgamma_signed(x: float):
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``."""
    _check_pole(x, "lgamma")
    if x > 0:
        return math.lgamma(x), 1.0
    sign = 1.0 if math.floor(x) % 2 == 0 else -1.0
    return math.lgamma(x), sign


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b), overflow-free for large arguments.

    Uses the direct quotient while both factors are representable and falls
    back to signed log-Gamma differences otherwise.
    """
    _check_pole(a, "gamma_ratio numerator")
    _check_pole(b, "gamma_ratio denominator")
    if abs(a) < 170.0 and abs(b) < 170.0:
        ga, gb = math.gamma(a), math.gamma(b)
        if ga != 0.0 and gb != 0.0 and math.isfinite(ga) and math.isfinite(gb):
            return ga / gb
    la, sa = lgamma_signed(a)
    lb, sb = lgamma_signed(b)
    return sa * sb * math.exp(la - lb)


def _gamma_fraction(num, den) -> float:
    """prod Gamma(num) / prod Gamma(den); a denominator pole contributes 1/Gamma = 0."""
    for x in num:
        _check_pole(x, "numerator")
    if any(_is_pole(x) for x in den):
        return 0.0
    log, sign = 0.0, 1.0
    for x in num:
        lx, sx = lgamma_signed(x)
        log += lx
        sign *= sx
    for x in den:
        lx, sx = lgamma_signed(x)
        log -= lx
        sign *= sx
    return sign * math.exp(log)


def digamma(x: float) -> float:
    _check_pole(x, "digamma")
    return float(special.digamma(x))


def d_lambda(lam: float) -> float:
    """Normalization ``2^{2 lam} Gamma(1/2 + lam) / Gamma(1/2 - lam)``."""
    if lam < 0:
        raise ParameterError(f"lambda={lam} must be nonnegative")
    if _is_pole(0.5 - lam):
        raise PoleError(f"d_lambda has a pole at lambda={lam} (1/2 + integer)",
                        argument=lam, where="d_lambda")
    return 2.0 ** (2 * lam) * gamma_ratio(0.5 + lam, 0.5 - lam)


def c_lambda(lam: float) -> float:
    """Scalar scattering constant ``2^{2 lam} Gamma(lam) / Gamma(-lam)``."""
    if lam <= 0 or float(lam).is_integer():
        raise PoleError(f"c_lambda undefined at lambda={lam} (need lambda > 0, not an integer)",
                        argument=lam, where="c_lambda")
    return 2.0 ** (2 * lam) * gamma_ratio(lam, -lam)


# --- Gauss hypergeometric -------------------------------------------------------

def _hyp2f1_series(a, b, c, z):
    term = 1.0
    total = 1.0
    small = 0
    for k in range(_SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= 1e-17 * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ConvergenceError(
        "2F1 series did not converge",
        {"a": a, "b": b, "c": c, "z": z, "terms": _SERIES_MAX_TERMS, "last_term": term, "sum": total},
    )


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss 2F1(a, b; c; z) for real parameters and ``z <= 0``.

    Direct series for ``|z| <= 1/2``, the Pfaff transformation on
    ``[-2, -1/2)``, and the 1/z inversion for ``z < -2`` (scipy's
    logarithmic-case evaluator when ``a - b`` is an integer).
    """
    if z > 0:
        raise ParameterError(f"hyp2f1 implemented for z <= 0 only, got z={z}")
    if _is_pole(c):
        raise PoleError(f"2F1 lower parameter c={c} is a non-positive integer", argument=c, where="hyp2f1 c")
    if z == 0.0:
        return 1.0
    if z >= -0.5:
        return _hyp2f1_series(a, b, c, z)
    if z >= -2.0:
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _hyp2f1_series(a, c - b, c, w)
    if float(a - b).is_integer():
        # logarithmic case of the 1/z expansion
        return float(special.hyp2f1(a, b, c, z))
    return hyp2f1_inversion(a, b, c, z)


def hyp2f1_inversion(a: float, b: float, c: float, z: float) -> float:
    """Two-term 1/z connection formula, valid for ``z < 0`` and ``a - b`` not an integer."""
    if not z < 0:
        raise ParameterError(f"inversion needs z < 0, got z={z}")
    if float(a - b).is_integer():
        raise DegenerateParameterError(f"a - b = {a - b} is an integer; the two-term formula is singular")
    if _is_pole(c):
        raise PoleError(f"2F1 lower parameter c={c} is a non-positive integer", argument=c, where="hyp2f1 c")
    w = 1.0 / z
    x = -z
    first = _gamma_fraction([b - a, c], [b, c - a])
    second = _gamma_fraction([a - b, c], [a, c - b])
    out = 0.0
    if first != 0.0:
        out += first * x ** (-a) * hyp2f1(a, a - c + 1.0, a - b + 1.0, w)
    if second != 0.0:
        out += second * x ** (-b) * hyp2f1(b, b - c + 1.0, b - a + 1.0, w)
    return out


# --- Kummer ----------------------------------------------------------------------

def kummer_M(a: float, b: float, t: float) -> float:
    """Kummer's M(a, b, t) = 1F1(a; b; t) by its power series."""
    if _is_pole(b):
        raise PoleError(f"Kummer M: b={b} is a non-positive integer", argument=b, where="kummer_M b")
    if t == 0.0:
        return 1.0
    term = 1.0
    total = 1.0
    small = 0
    for k in range(_SERIES_MAX_TERMS):
        term *= (a + k) / ((b + k) * (k + 1)) * t
        total += term
        if term == 0.0:
            return total
        if abs(term) <= 1e-17 * abs(total) and k > abs(t):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ConvergenceError("Kummer M series did not converge", {"a": a, "b": b, "t": t, "sum": total})


_V_SWITCH = 1.0


def _kummer_V_connection(a, b, t):
    first = kummer_M(a, b, t) * _gamma_fraction([], [1.0 + a - b, b])
    second = t ** (1.0 - b) * kummer_M(1.0 + a - b, 2.0 - b, t) * _gamma_fraction([], [a, 2.0 - b])
    return math.pi / math.sin(math.pi * b) * (first - second)


def _kummer_V_integral(a, b, t):
    # V = t^-a / Gamma(a) * int_0^inf e^-s s^(a-1) (1 + s/t)^(b-a-1) ds
    p = b - a - 1.0

    def smooth(s):
        return math.exp(-s) * (1.0 + s / t) ** p

    head, _ = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0),
                             epsabs=0.0, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(lambda s: smooth(s) * s ** (a - 1.0), 1.0, np.inf,
                             epsabs=0.0, epsrel=1e-13, limit=200)
    return t ** (-a) * (head + tail) / math.gamma(a)


def kummer_V(a: float, b: float, t: float) -> float:
    """Second Kummer solution V(a, b, t) (Tricomi U) for ``t > 0`` and non-integer ``b``.

    Small ``t`` uses the M-connection formula; for ``t > 1`` and ``a > 0`` the
    Laplace integral avoids the exponential cancellation between the two
    M terms.
    """
    if not t > 0:
        raise ParameterError(f"kummer_V needs t > 0, got {t}")
    if float(b).is_integer():
        raise PoleError(f"kummer_V: integer b={b} is a pole of the connection formula",
                        argument=b, where="kummer_V b")
    if a == 0.0:
        return 1.0
    if t <= _V_SWITCH:
        return _kummer_V_connection(a, b, t)
    if a > 0:
        return _kummer_V_integral(a, b, t)
    if float(a).is_integer():
        # V(-m, b, t) is a polynomial; the connection formula is exact up to rounding there
        return _kummer_V_connection(a, b, t)
    # lower a from a positive pair: V(a-1) = (2a - b + t) V(a) - a(a - b + 1) V(a+1)
    shift = math.floor(a) - 1
    top = a - shift
    upper, current = _kummer_V_integral(top + 1.0, b, t), _kummer_V_integral(top, b, t)
    x = top
    while x > a + 0.5:
        upper, current = current, (2 * x - b + t) * current - x * (x - b + 1.0) * upper
        x -= 1.0
    return current
