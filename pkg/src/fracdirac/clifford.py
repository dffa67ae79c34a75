"""Complex matrix representations of the Clifford algebra of R^{n+1}.

Conventions: generators are skew-Hermitian with
``gamma_i gamma_j + gamma_j gamma_i = -2 delta_ij``. The last generator
(index ``n``, zero-based) is the normal direction ``nu``. Boundary
Clifford multiplication is ``ebar_j = gamma_j gamma_nu`` and the self-adjoint
symbol of the flat boundary operator ``nu.D`` is ``M(xi) = i sum_j xi_j gamma_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import ParameterError

MAX_DIM = 8

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _kron(mats):
    return reduce(np.kron, mats)


@dataclass(frozen=True, eq=False)
class CliffordRep:
    n: int
    gammas: np.ndarray  # shape (n+1, N, N)

    @property
    def N(self) -> int:
        return self.gammas.shape[1]

    @property
    def nu_index(self) -> int:
        """One-based index of the normal generator (always n+1)."""
        return self.n + 1

    @property
    def nu(self) -> np.ndarray:
        return self.gammas[self.n]

    def gamma(self, j: int) -> np.ndarray:
        """Generator gamma_j with one-based j in 1..n+1."""
        if not 1 <= j <= self.n + 1:
            raise ParameterError(f"generator index {j} outside 1..{self.n + 1}")
        return self.gammas[j - 1]


def _hermitian_generators(d):
    # Jordan-Wigner: 2m mutually anticommuting Hermitian involutions on m qubits
    m = (d + 1) // 2
    out = []
    for j in range(m):
        left = [_Z] * j
        right = [_I2] * (m - j - 1)
        out.append(_kron(left + [_X] + right))
        out.append(_kron(left + [_Y] + right))
    return out[:d]


@lru_cache(maxsize=None)
def _build(n):
    herm = _hermitian_generators(n + 1)
    gammas = np.array([1j * g for g in herm])
    gammas.setflags(write=False)
    return CliffordRep(n=n, gammas=gammas)


def build_clifford(n: int) -> CliffordRep:
    """Deterministic representation for boundary dimension ``1 <= n <= 8``.

    The spinor dimension is ``2**ceil((n+1)/2)``. Representations are cached,
    so repeated calls return the same (read-only) object.
    """
    if int(n) != n or not 1 <= n <= MAX_DIM:
        raise ParameterError(f"boundary dimension n={n} outside 1..{MAX_DIM}")
    return _build(int(n))


def boundary_mult(rep: CliffordRep, j: int) -> np.ndarray:
    """Boundary Clifford multiplication ``ebar_j = gamma_j gamma_{n+1}``."""
    if not 1 <= j <= rep.n:
        raise ParameterError(f"tangent index {j} outside 1..{rep.n}")
    return rep.gammas[j - 1] @ rep.nu


def nu_dirac_symbol(rep: CliffordRep, xi) -> np.ndarray:
    """Hermitian symbol ``M(xi) = i sum_j xi_j gamma_j``; squares to ``|xi|^2``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (rep.n,):
        raise ParameterError(f"xi must have shape ({rep.n},), got {xi.shape}")
    return 1j * np.tensordot(xi, rep.gammas[: rep.n], axes=1)


def projectors_pm(rep: CliffordRep):
    """Projectors onto ``ker(nu + i)`` and ``ker(nu - i)``."""
    eye = np.eye(rep.N, dtype=complex)
    p_plus = 0.5 * (eye + 1j * rep.nu)
    p_minus = 0.5 * (eye - 1j * rep.nu)
    return p_plus, p_minus
