import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracdirac.clifford import (
    MAX_DIM, boundary_mult, build_clifford, nu_dirac_symbol, projectors_pm,
)
from fracdirac.errors import ParameterError

DIMS = range(1, MAX_DIM + 1)


def opnorm(a):
    return np.linalg.norm(a, 2)


@pytest.mark.parametrize("n", DIMS)
def test_anticommutation_and_skew_hermitian(n):
    rep = build_clifford(n)
    eye = np.eye(rep.N)
    assert rep.N == 2 ** int(np.ceil((n + 1) / 2))
    assert len(rep.gammas) == n + 1
    for i in range(n + 1):
        gi = rep.gammas[i]
        assert opnorm(gi.conj().T + gi) <= 1e-14
        for j in range(n + 1):
            ac = gi @ rep.gammas[j] + rep.gammas[j] @ gi
            assert opnorm(ac + 2 * (i == j) * eye) <= 1e-14


def test_smallest_case():
    rep = build_clifford(1)
    assert rep.N == 2
    assert rep.nu_index == 2
    assert np.allclose(rep.gamma(1) @ rep.gamma(1), -np.eye(2))
    assert np.allclose(rep.nu @ rep.nu, -np.eye(2))


@pytest.mark.parametrize("n", [0, 9, -1, 2.5])
def test_size_errors(n):
    with pytest.raises(ParameterError):
        build_clifford(n)


def test_cached_and_read_only():
    rep = build_clifford(3)
    assert build_clifford(3) is rep
    with pytest.raises(ValueError):
        rep.gammas[0, 0, 0] = 1.0


@pytest.mark.parametrize("n", [2, 3, 5])
def test_boundary_mult_relations(n):
    rep = build_clifford(n)
    eye = np.eye(rep.N)
    for i in range(1, n + 1):
        ei = boundary_mult(rep, i)
        # nu anticommutes with every ebar_j
        assert opnorm(rep.nu @ ei + ei @ rep.nu) <= 1e-14
        for j in range(1, n + 1):
            ej = boundary_mult(rep, j)
            assert opnorm(ei @ ej + ej @ ei + 2 * (i == j) * eye) <= 1e-14


def test_boundary_mult_index_errors():
    rep = build_clifford(2)
    for j in (0, 3):
        with pytest.raises(ParameterError):
            boundary_mult(rep, j)


def test_symbol_zero_and_linear():
    rep = build_clifford(3)
    assert np.all(nu_dirac_symbol(rep, np.zeros(3)) == 0)
    xi = np.array([0.3, -1.2, 0.7])
    assert np.allclose(nu_dirac_symbol(rep, 2 * xi), 2 * nu_dirac_symbol(rep, xi), atol=1e-15)
    with pytest.raises(ParameterError):
        nu_dirac_symbol(rep, np.ones(2))


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_unit_symbol_spectrum(n, rng):
    rep = build_clifford(n)
    xi = rng.standard_normal(n)
    xi /= np.linalg.norm(xi)
    ev = np.sort(np.linalg.eigvalsh(nu_dirac_symbol(rep, xi)))
    half = rep.N // 2
    assert np.allclose(ev[:half], -1, atol=1e-13)
    assert np.allclose(ev[half:], 1, atol=1e-13)


@pytest.mark.parametrize("n", DIMS)
def test_symbol_squares_hermitian_anticommutes(n, rng):
    rep = build_clifford(n)
    eye = np.eye(rep.N)
    for _ in range(100):
        xi = rng.standard_normal(n) * rng.uniform(0.1, 10)
        M = nu_dirac_symbol(rep, xi)
        r2 = xi @ xi
        assert opnorm(M @ M - r2 * eye) <= 1e-13 * r2
        assert opnorm(M - M.conj().T) <= 1e-13 * np.sqrt(r2)
        assert opnorm(M @ rep.nu + rep.nu @ M) <= 1e-13 * np.sqrt(r2)


@pytest.mark.parametrize("n", DIMS)
def test_projector_algebra(n, rng):
    rep = build_clifford(n)
    pp, pm = projectors_pm(rep)
    eye = np.eye(rep.N)
    assert opnorm(pp @ pp - pp) <= 1e-13
    assert opnorm(pm @ pm - pm) <= 1e-13
    assert opnorm(pp + pm - eye) <= 1e-13
    assert opnorm(pp @ pm) <= 1e-13
    assert opnorm(rep.nu @ pp + 1j * pp) <= 1e-13
    assert np.linalg.matrix_rank(pp) == rep.N // 2
    assert np.linalg.matrix_rank(pm) == rep.N // 2
    xi = rng.standard_normal(n)
    M = nu_dirac_symbol(rep, xi)
    assert opnorm(M @ pp - pm @ M) <= 1e-13 * np.linalg.norm(xi)
    v = rng.standard_normal(rep.N) + 1j * rng.standard_normal(rep.N)
    assert np.linalg.norm(pp @ (pp @ v) - pp @ v) <= 1e-14 * np.linalg.norm(v)


@given(st.integers(1, MAX_DIM), st.lists(st.floats(-50, 50), min_size=MAX_DIM, max_size=MAX_DIM))
def test_symbol_square_property(n, coords):
    rep = build_clifford(n)
    xi = np.array(coords[:n])
    M = nu_dirac_symbol(rep, xi)
    scale = max(xi @ xi, 1.0)
    assert opnorm(M @ M - (xi @ xi) * np.eye(rep.N)) <= 1e-13 * scale
