"""Shared helpers: independent dense constructions used as test oracles.

These rebuild operators from scratch with naive kron sums so that package
results are checked against a second code path, not against themselves.
"""

import numpy as np
import pytest

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
S1 = np.eye(2, dtype=complex)


def kron_chain(ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def embed(n, site_ops):
    """Operator with 2x2 blocks at given sites: embed(3, {0: SZ, 1: SZ})."""
    return kron_chain([site_ops.get(j, S1) for j in range(n)])


def naive_tfim(n, coupling, field):
    """Reference Hamiltonian pair built by plain kron sums."""
    dim = 2**n
    h1 = np.zeros((dim, dim), dtype=complex)
    for b in range(n - 1):
        h1 -= coupling * embed(n, {b: SZ, b + 1: SZ})
    h2 = np.zeros((dim, dim), dtype=complex)
    for j in range(n):
        h2 -= field * embed(n, {j: SX})
    return h1, h2


def operator_norm(a):
    return float(np.linalg.norm(a, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)
