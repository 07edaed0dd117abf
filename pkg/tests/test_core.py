import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcomm.core import (
    Povm, KrausChannel, apply_channel, as_density, as_pure, basis_povm, dephasing_channel,
    hermitian_fn, is_density, ket, measure_povm, partial_trace, permute_factors, projector,
    purity, random_channel, random_density, random_isometry, random_povm, random_pure,
    random_unitary, tensor,
)

PLUS = np.array([1, 1]) / np.sqrt(2)
MINUS = np.array([1, -1]) / np.sqrt(2)
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_tensor_examples():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(tensor(ket(0, 2), ket(1, 2)), ket(1, 4))


def test_as_density_rejects_invalid():
    with pytest.raises(ValueError):
        as_density(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        as_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        as_density(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        as_pure([1.0, 1.0])


def test_partial_trace_examples():
    rng = np.random.default_rng(0)
    ra, rb = random_density(2, None, rng), random_density(3, None, rng)
    assert np.allclose(partial_trace(np.kron(ra, rb), (2, 3), [0]), ra, atol=1e-10)
    assert np.allclose(partial_trace(np.kron(ra, rb), (2, 3), [1]), rb, atol=1e-10)
    assert np.allclose(partial_trace(projector(BELL), (2, 2), [0]), np.eye(2) / 2)


def test_partial_trace_layout_mismatch():
    with pytest.raises(ValueError):
        partial_trace(np.eye(6) / 6, (2, 2), [0])


def test_permute_factors_swaps_product():
    rng = np.random.default_rng(1)
    ra, rb = random_density(2, None, rng), random_density(3, None, rng)
    assert np.allclose(permute_factors(np.kron(ra, rb), (2, 3), [1, 0]), np.kron(rb, ra))


def test_hermitian_fn_examples():
    assert np.allclose(hermitian_fn(np.eye(3), "sqrt"), np.eye(3))
    assert np.allclose(hermitian_fn(np.diag([4.0, 9.0]), "sqrt"), np.diag([2.0, 3.0]))
    assert np.allclose(hermitian_fn(np.diag([1.0, 4.0]), "log2"), np.diag([0.0, 2.0]))
    with pytest.raises(ValueError):
        hermitian_fn(np.diag([1.0, -1.0]), "sqrt")


def test_channel_examples():
    rng = np.random.default_rng(2)
    rho = random_density(3, None, rng)
    ident = KrausChannel([np.eye(3)])
    assert np.allclose(apply_channel(ident, rho), rho)
    assert np.allclose(apply_channel(dephasing_channel(2), projector(PLUS)), np.eye(2) / 2)
    with pytest.raises(ValueError):
        KrausChannel([np.eye(2) * 0.5])


def test_povm_examples():
    assert np.allclose(measure_povm(basis_povm(2), np.diag([0.3, 0.7])), [0.3, 0.7])
    pm = Povm([projector(PLUS), projector(MINUS)])
    assert np.allclose(measure_povm(pm, projector(ket(0, 2))), [0.5, 0.5])
    with pytest.raises(ValueError):
        Povm([np.eye(2), np.eye(2)])


def test_random_density_examples():
    assert purity(random_density(4, 1, 5)) == pytest.approx(1.0, abs=1e-9)
    assert np.array_equal(random_density(5, 3, 11), random_density(5, 3, 11))
    r = random_density(8, 8, 3)
    assert is_density(r) and np.linalg.matrix_rank(r, tol=1e-10) == 8


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_random_objects_are_valid(dim, seed):
    rng = np.random.default_rng(seed)
    u = random_unitary(dim, rng)
    assert np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-10)
    v = random_isometry(dim, dim + 2, rng)
    assert np.allclose(v.conj().T @ v, np.eye(dim), atol=1e-10)
    assert np.linalg.norm(random_pure(dim, rng)) == pytest.approx(1.0)
    rank = int(rng.integers(1, dim + 1))
    rho = random_density(dim, rank, rng)
    assert is_density(rho)
    ch = random_channel(dim, 2, dim, rng)
    assert is_density(apply_channel(ch, rho))
    povm = random_povm(dim, 3, rng)
    p = measure_povm(povm, rho)
    assert p.min() >= -1e-12 and p.sum() == pytest.approx(1.0)
