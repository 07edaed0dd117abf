"""Density matrices, pure states, channels and measurements.

States are plain numpy arrays: a density matrix is a ``(d, d)`` complex
array, a pure state a ``(d,)`` complex vector.  The ``as_density`` and
``as_pure`` validators clean up eigensolver noise and return read-only
copies.  Multipartite systems are described by a tuple of factor
dimensions; factor 0 is the most significant tensor axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

TOL = 1e-9


def rng_from(seed) -> np.random.Generator:
    """Return a Generator for an int seed, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_density(m, tol: float = TOL) -> np.ndarray:
    """Validate ``m`` as a density matrix and return a cleaned read-only copy.

    Hermiticity, positivity and unit trace are checked to within ``tol``.
    Eigenvalues in ``[-tol, 0)`` are clamped to zero and the trace is
    renormalised.
    """
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("density matrix has non-finite entries")
    if np.linalg.norm(m - m.conj().T) > tol:
        raise ValueError("density matrix is not Hermitian")
    m = (m + m.conj().T) / 2
    evals, evecs = np.linalg.eigh(m)
    if evals.min() < -tol:
        raise ValueError(f"density matrix has eigenvalue {evals.min():.3g} < 0")
    tr = evals.sum()
    if abs(tr - 1) > tol:
        raise ValueError(f"density matrix has trace {tr:.12g}")
    if evals.min() < 0:
        evals = np.clip(evals, 0, None)
        m = (evecs * evals) @ evecs.conj().T
    return _freeze(m / np.trace(m).real)


def as_pure(v, tol: float = TOL) -> np.ndarray:
    v = np.array(v, dtype=complex).ravel()
    nrm = np.vdot(v, v).real
    if abs(nrm - 1) > tol:
        raise ValueError(f"pure state has squared norm {nrm:.12g}")
    return _freeze(v / np.sqrt(nrm))


def is_density(m, tol: float = TOL) -> bool:
    try:
        as_density(m, tol)
    except ValueError:
        return False
    return True


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two matrices or of two state vectors."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("tensor operands must both be vectors or both be matrices")
    return np.kron(a, b)


def _check_layout(dim: int, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"factor dimensions must be >= 1, got {dims}")
    if int(np.prod(dims)) != dim:
        raise ValueError(f"layout {dims} does not match dimension {dim}")
    return dims


def partial_trace(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced state on the factors in ``keep`` (kept in ascending order)."""
    rho = np.asarray(rho, dtype=complex)
    dims = _check_layout(rho.shape[0], dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep={keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * n > len(letters):
        raise ValueError("too many tensor factors")
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return red.reshape(d_keep, d_keep)


def permute_factors(rho, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor ``i`` is old factor ``order[i]``."""
    rho = np.asarray(rho, dtype=complex)
    dims = _check_layout(rho.shape[0], dims)
    n = len(dims)
    order = list(order)
    t = rho.reshape(dims + dims).transpose(order + [n + i for i in order])
    d = rho.shape[0]
    return t.reshape(d, d)


def hermitian_fn(m, f: str, tol: float = TOL) -> np.ndarray:
    """Apply ``sqrt`` or ``log2`` to a Hermitian matrix via its eigenbasis.

    ``sqrt`` clamps eigenvalues in ``[-tol, 0)`` to zero.  ``log2`` is taken
    on the support only: eigenvalues ``<= tol`` contribute nothing.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("hermitian_fn needs a square matrix")
    if np.linalg.norm(m - m.conj().T) > tol:
        raise ValueError("matrix is not Hermitian")
    evals, evecs = np.linalg.eigh((m + m.conj().T) / 2)
    if f == "sqrt":
        if evals.min() < -tol:
            raise ValueError(f"sqrt of matrix with eigenvalue {evals.min():.3g}")
        g = np.sqrt(np.clip(evals, 0, None))
    elif f == "log2":
        g = np.zeros_like(evals)
        supp = evals > tol
        g[supp] = np.log2(evals[supp])
    else:
        raise ValueError(f"unknown function tag {f!r}")
    return (evecs * g) @ evecs.conj().T


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must share one shape")
        total = sum(k.conj().T @ k for k in ops)
        if np.linalg.norm(total - np.eye(shape[1])) > TOL:
            raise ValueError("Kraus operators do not sum to the identity")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def in_dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def __call__(self, rho):
        return apply_channel(self, rho)


def apply_channel(t: KrausChannel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (t.in_dim, t.in_dim):
        raise ValueError(f"channel input dim {t.in_dim} does not match {rho.shape}")
    return sum(k @ rho @ k.conj().T for k in t.kraus_ops)


@dataclass(frozen=True)
class Povm:
    elements: tuple

    def __post_init__(self):
        els = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not els:
            raise ValueError("POVM needs at least one element")
        d = els[0].shape[0]
        for e in els:
            if e.shape != (d, d):
                raise ValueError("POVM elements must be square and of equal size")
            if np.linalg.norm(e - e.conj().T) > TOL or np.linalg.eigvalsh(e).min() < -TOL:
                raise ValueError("POVM element is not positive semidefinite")
        if np.linalg.norm(sum(els) - np.eye(d)) > TOL:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


def measure_povm(povm: Povm, rho) -> np.ndarray:
    """Outcome distribution ``Tr(rho E_m)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (povm.dim, povm.dim):
        raise ValueError("POVM and state dimensions differ")
    return np.array([np.trace(rho @ e).real for e in povm.elements])


def basis_povm(dim: int) -> Povm:
    return Povm(tuple(projector(ket(i, dim)) for i in range(dim)))


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary (QR of a Ginibre matrix with phase correction)."""
    rng = rng_from(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_isometry(in_dim: int, out_dim: int, seed=None) -> np.ndarray:
    if out_dim < in_dim:
        raise ValueError("isometry needs out_dim >= in_dim")
    return random_unitary(out_dim, seed)[:, :in_dim]


def random_pure(dim: int, seed=None) -> np.ndarray:
    rng = rng_from(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random state of the given rank, the reduced state of a Haar-random
    pure state on ``dim x rank`` (Ginibre construction)."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    rng = rng_from(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return as_density(rho / np.trace(rho).real)


def random_channel(in_dim: int, out_dim: int | None = None, ancilla: int = 2,
                   seed=None) -> KrausChannel:
    """Channel from a Haar-random Stinespring isometry into out x ancilla."""
    out_dim = in_dim if out_dim is None else out_dim
    v = random_isometry(in_dim, out_dim * ancilla, seed)
    v = v.reshape(out_dim, ancilla, in_dim)
    return KrausChannel(tuple(v[:, a, :] for a in range(ancilla)))


def random_povm(dim: int, outcomes: int = 2, seed=None) -> Povm:
    """Naimark-style random POVM: ``E_m = V_m^dagger V_m`` for a random isometry."""
    v = random_isometry(dim, outcomes * dim, seed).reshape(outcomes, dim, dim)
    return Povm(tuple(v[m].conj().T @ v[m] for m in range(outcomes)))


def dephasing_channel(dim: int) -> KrausChannel:
    return KrausChannel(tuple(projector(ket(i, dim)) for i in range(dim)))


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.trace(rho @ rho).real)
