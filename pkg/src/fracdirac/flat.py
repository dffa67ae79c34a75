"""Flat model: D^{2 lam} as a Fourier multiplier on a periodic box.

The box ``[-L/2, L/2)^n`` with ``m`` points per axis stands in for R^n.
Per mode the operator acts by ``|xi|^{2 lam - 1} M(xi)`` with ``M`` the
Hermitian symbol from :mod:`fracdirac.clifford`; the zero mode is sent to 0.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .clifford import CliffordRep, boundary_mult, build_clifford
from .errors import DegenerateError, ParameterError
from .specfun import gamma_ratio

MAX_POINTS = 2**24
_HEADER = struct.Struct("<idii")  # n, L, m, N


@dataclass(frozen=True)
class TorusGrid:
    n: int
    L: float
    m: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"dimension n={self.n} must be a positive integer")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ParameterError(f"box side L={self.L} must be positive")
        m = int(self.m)
        if m != self.m or m < 2 or m & (m - 1):
            raise ParameterError(f"m={self.m} must be a power of two >= 2")
        if m**self.n > MAX_POINTS:
            raise ParameterError(f"m**n = {m**self.n} exceeds {MAX_POINTS} points")

    @property
    def shape(self):
        return (self.m,) * self.n

    @property
    def h(self) -> float:
        return self.L / self.m

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @cached_property
    def axis(self) -> np.ndarray:
        """Centered coordinates ``-L/2 + j h``."""
        return (np.arange(self.m) - self.m // 2) * self.h

    @cached_property
    def coords(self):
        return np.meshgrid(*([self.axis] * self.n), indexing="ij")

    @cached_property
    def radius2(self) -> np.ndarray:
        return sum(x**2 for x in self.coords)

    @cached_property
    def wavenumbers(self):
        """Angular frequencies per axis in FFT order (``2 pi fftfreq``)."""
        k = 2 * np.pi * np.fft.fftfreq(self.m, d=self.h)
        return np.meshgrid(*([k] * self.n), indexing="ij")

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt(sum(k**2 for k in self.wavenumbers))


@dataclass(frozen=True, eq=False)
class SpinorField:
    grid: TorusGrid
    values: np.ndarray  # shape grid.shape + (N,)
    rep: CliffordRep = field(default=None)

    def __post_init__(self):
        if self.rep is None:
            object.__setattr__(self, "rep", build_clifford(self.grid.n))
        if self.rep.n != self.grid.n:
            raise ParameterError("representation and grid dimensions differ")
        want = self.grid.shape + (self.rep.N,)
        if self.values.shape != want:
            raise ParameterError(f"values shape {self.values.shape} != {want}")
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("spinor field has non-finite entries")

    def with_values(self, values) -> "SpinorField":
        return SpinorField(self.grid, np.asarray(values, dtype=complex), self.rep)

    @property
    def pointwise_norm(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.values) ** 2, axis=-1))

    def inner(self, other: "SpinorField") -> complex:
        """Discrete L^2 pairing ``sum_x (self, other) dx`` (conjugate-linear in self)."""
        return np.vdot(self.values, other.values) * self.grid.cell_volume

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))


def zero_field(grid: TorusGrid) -> SpinorField:
    rep = build_clifford(grid.n)
    return SpinorField(grid, np.zeros(grid.shape + (rep.N,), dtype=complex), rep)


def random_field(grid: TorusGrid, rng: np.random.Generator) -> SpinorField:
    rep = build_clifford(grid.n)
    shape = grid.shape + (rep.N,)
    vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return SpinorField(grid, vals, rep)


# --- spectral machinery -------------------------------------------------------------

def _axes(grid):
    return tuple(range(grid.n))


def _fft(field):
    return np.fft.fftn(field.values, axes=_axes(field.grid))


def _ifft(grid, values_hat):
    return np.fft.ifftn(values_hat, axes=_axes(grid))


def _apply_symbol(rep, grid, values_hat):
    """``sum_j xi_j (i gamma_j) v`` for every mode (without the |xi| power)."""
    out = np.zeros_like(values_hat)
    for j, kj in enumerate(grid.wavenumbers):
        mat = 1j * rep.gammas[j]
        out += kj[..., None] * (values_hat @ mat.T)
    return out


def _radial_power(grid, power):
    """``|xi|^power`` with the zero mode set to 0."""
    xi = grid.xi_norm
    out = np.zeros_like(xi)
    nz = xi > 0
    out[nz] = xi[nz] ** power
    return out


def apply_multiplier(field: SpinorField, radial_power: float, symbol: bool) -> SpinorField:
    """Generic ``|xi|^p`` (times ``M(xi)`` if ``symbol``) multiplier, zero mode killed."""
    grid = field.grid
    vh = _fft(field)
    if symbol:
        vh = _apply_symbol(field.rep, grid, vh)
    vh *= _radial_power(grid, radial_power)[..., None]
    return field.with_values(_ifft(grid, vh))


def fractional_dirac_flat(field: SpinorField, lam: float) -> SpinorField:
    """``D^{2 lam}`` with symbol ``|xi|^{2 lam - 1} M(xi)``; lam = 1/2 is the classical ``nu.D``."""
    if not (np.isfinite(lam) and lam >= 0):
        raise ParameterError(f"lambda={lam} must be finite and >= 0")
    return apply_multiplier(field, 2 * lam - 1, symbol=True)


def nu_mult(field: SpinorField) -> SpinorField:
    return field.with_values(field.values @ field.rep.nu.T)


def geometric_fractional_dirac(field: SpinorField, lam: float) -> SpinorField:
    """``Dbar^{2 lam} = -nu . D^{2 lam}``."""
    out = fractional_dirac_flat(field, lam)
    return out.with_values(-(out.values @ field.rep.nu.T))


def geometric_inverse(field: SpinorField, lam: float) -> SpinorField:
    """Spectral pseudo-inverse of ``Dbar^{2 lam}`` (zero on the zero mode).

    Since ``Dbar^2 = |xi|^{4 lam}`` per mode, the inverse is
    ``Dbar / |xi|^{4 lam}``.
    """
    out = apply_multiplier(field, -2 * lam - 1, symbol=True)
    return out.with_values(-(out.values @ field.rep.nu.T))


def remove_mean(field: SpinorField) -> SpinorField:
    axes = _axes(field.grid)
    return field.with_values(field.values - field.values.mean(axis=axes, keepdims=True))


# --- bubble and Euler-Lagrange residual ------------------------------------------

def first_eigenvalue_sphere(n: int, lam: float) -> float:
    """``Gamma(n/2 + 1/2 + lam) / Gamma(n/2 + 1/2 - lam)``."""
    return gamma_ratio(n / 2 + 0.5 + lam, n / 2 + 0.5 - lam)


def edge_taper(grid: TorusGrid, frac: float) -> np.ndarray:
    """Smooth tensor-product window, 1 in the inner part of the box.

    Each axis factor equals 1 for ``|x| <= (1 - frac) L/2`` and falls to 0 at
    the box edge through a C-infinity ramp, so the periodic extension of a
    tapered field is smooth.
    """
    if not 0 <= frac < 1:
        raise ParameterError(f"taper fraction {frac} outside [0, 1)")
    if frac == 0:
        return np.ones(grid.shape)
    half = grid.L / 2
    u = (np.abs(grid.axis) - (1 - frac) * half) / (frac * half)
    u = np.clip(u, 0.0, 1.0)

    def bump(v):
        out = np.zeros_like(v)
        pos = v > 0
        out[pos] = np.exp(-1.0 / v[pos])
        return out

    ramp = bump(1 - u) / (bump(1 - u) + bump(u))
    window = np.ones(grid.shape)
    for j in range(grid.n):
        shape = [1] * grid.n
        shape[j] = grid.m
        window = window * ramp.reshape(shape)
    return window


def bubble(grid: TorusGrid, lam: float, phi0, taper: float = 0.0) -> SpinorField:
    """``f^{(n+1-2 lam)/2} (1 - sum_j x_j ebar_j) phi0`` with ``f = 2/(1+|x|^2)``.

    With ``|phi0| = 1/sqrt(2)`` this solves ``Dbar psi = lam_1 |psi|^{4 lam/(n-2 lam)} psi``
    on R^n, ``lam_1`` being :func:`first_eigenvalue_sphere`. ``taper > 0``
    multiplies by :func:`edge_taper` to remove the jump at the box boundary.
    """
    n = grid.n
    if not 0 < lam < n / 2:
        raise ParameterError(f"bubble needs 0 < lambda < n/2 = {n / 2}, got {lam}")
    rep = build_clifford(n)
    phi0 = np.asarray(phi0, dtype=complex)
    if phi0.shape != (rep.N,):
        raise ParameterError(f"phi0 must have shape ({rep.N},)")
    f = 2.0 / (1.0 + grid.radius2)
    vals = np.broadcast_to(phi0, grid.shape + (rep.N,)).copy()
    for j, xj in enumerate(grid.coords, start=1):
        vals -= xj[..., None] * (boundary_mult(rep, j) @ phi0)
    vals *= (f ** ((n + 1 - 2 * lam) / 2))[..., None]
    if taper:
        vals *= edge_taper(grid, taper)[..., None]
    return SpinorField(grid, vals, rep)


def nonlinear_term(psi: SpinorField, lam: float) -> np.ndarray:
    """``|psi|^{4 lam/(n - 2 lam)} psi`` with value 0 where psi vanishes."""
    p = 4 * lam / (psi.grid.n - 2 * lam)
    norm = psi.pointwise_norm
    weight = np.zeros_like(norm)
    nz = norm > 0
    weight[nz] = norm[nz] ** p
    return weight[..., None] * psi.values


def yamabe_residual(psi: SpinorField, lam: float, mu: float) -> float:
    """``||Dbar psi - mu N(psi)|| / ||Dbar psi||`` on the grid.

    ``N(psi)`` is the nonlinear term with its mean removed: the left side
    has no zero mode on the torus, so the constant part of ``N(psi)`` is
    outside the operator's range and is not counted.
    """
    if not np.isfinite(mu):
        raise ParameterError(f"mu={mu} must be finite")
    if not np.any(psi.values):
        raise DegenerateError("psi vanishes identically")
    lhs = geometric_fractional_dirac(psi, lam).values
    rhs = nonlinear_term(psi, lam)
    rhs = rhs - rhs.mean(axis=_axes(psi.grid), keepdims=True)
    denom = np.linalg.norm(lhs)
    if denom == 0:
        raise DegenerateError("Dbar psi vanishes identically")
    return float(np.linalg.norm(lhs - mu * rhs) / denom)


# --- I/O ------------------------------------------------------------------------

def write_field(path, field: SpinorField) -> None:
    """Binary snapshot: little-endian header (n, L, m, N) then row-major complex128."""
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.n, float(g.L), g.m, field.rep.N))
        fh.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes())


def read_field(path) -> SpinorField:
    with open(path, "rb") as fh:
        n, L, m, N = _HEADER.unpack(fh.read(_HEADER.size))
        body = np.frombuffer(fh.read(), dtype="<c16")
    grid = TorusGrid(n, L, m)
    rep = build_clifford(n)
    if rep.N != N:
        raise ParameterError(f"file spinor dimension {N} does not match n={n}")
    return SpinorField(grid, body.reshape(grid.shape + (N,)).astype(complex), rep)


def write_slice_csv(path, field: SpinorField, axis: int = 0) -> None:
    """Line through the box center along ``axis``: x, |psi|, then Re/Im per component."""
    g = field.grid
    index = [g.m // 2] * g.n
    index[axis] = slice(None)
    line = field.values[tuple(index)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["x", "abs"]
        for c in range(field.rep.N):
            header += [f"re{c}", f"im{c}"]
        w.writerow(header)
        for x, v in zip(g.axis, line):
            row = [repr(float(x)), repr(float(np.linalg.norm(v)))]
            for z in v:
                row += [repr(float(z.real)), repr(float(z.imag))]
            w.writerow(row)
