import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochjac.exactmath import RatPoly, poly_from_roots
from blochjac.numerics import (
    NonHermitianError,
    RootFindingError,
    cluster_roots,
    hermitian_eigs,
    refine_bracket,
    roots_all,
)


def test_roots_quadratic():
    rs = roots_all(RatPoly([-4, 0, 1]))
    assert abs(rs[0] - (-2)) < 1e-10 and abs(rs[1] - 2) < 1e-10


def test_roots_multiplier_equation():
    # tau^2 - z*tau + 1 at z = 3
    rs = roots_all([1, -3, 1])
    golden = (3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2
    assert abs(rs[0] - golden[0]) < 1e-10
    assert abs(rs[1] - golden[1]) < 1e-10


def test_roots_double_root_clusters():
    # 4z^2 + 4z + 1 has the double root -1/2
    rs = roots_all([1, 4, 4])
    clusters = cluster_roots(rs)
    assert len(clusters) == 1
    center, mult = clusters[0]
    assert mult == 2
    assert abs(center - (-0.5)) < 1e-7


def test_roots_zero_roots_factored():
    rs = roots_all([0, 0, -1, 1])  # z^2 (z - 1)
    assert sum(1 for r in rs if r == 0) == 2
    assert abs(rs[-1] - 1) < 1e-10


def test_roots_deterministic():
    cs = [3, -2, 0, 1, 5]
    assert roots_all(cs) == roots_all(cs)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=8),
                min_size=1, max_size=8, unique=True))
def test_roots_recover_rational_roots(roots):
    f = poly_from_roots(roots)
    got = roots_all(f)
    want = sorted(float(r) for r in roots)
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert abs(g - w) < 1e-9


def test_roots_error_carries_best_iterate():
    with pytest.raises(RootFindingError) as ei:
        roots_all([1, -8, 28, -56, 70, -56, 28, -8, 1], max_iter=1)  # (z-1)^8
    assert len(ei.value.best) == 8
    assert len(ei.value.residuals) == 8


def test_roots_rejects_constants():
    with pytest.raises(ValueError):
        roots_all([5])


def test_hermitian_eigs_examples():
    assert np.allclose(hermitian_eigs([[0, 1], [1, 0]]), [-1, 1])
    assert np.allclose(hermitian_eigs([[0, 2], [2, 0]]), [-2, 2])


def test_hermitian_eigs_free_floquet_cosines():
    for x in (0.3, 1.1, 2.9):
        tau = complex(math.cos(x), math.sin(x))
        L = np.array([[0, 1 + tau.conjugate()], [1 + tau, 0]])
        eigs = hermitian_eigs(L)
        want = sorted(2 * math.cos((x + 2 * math.pi * n) / 2) for n in range(2))
        assert np.allclose(eigs, want, atol=1e-9)


def test_hermitian_eigs_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        hermitian_eigs([[0, 1], [1 + 1e-6, 0]])


def test_hermitian_eigs_trace_and_rotation_invariance():
    rng = random.Random(7)
    n = 5
    A = np.zeros((n, n), dtype=complex)
    for i in range(n):
        A[i, i] = rng.uniform(-2, 2)
        for j in range(i + 1, n):
            v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            A[i, j] = v
            A[j, i] = v.conjugate()
    eigs = hermitian_eigs(A)
    assert abs(sum(eigs) - A.trace().real) < 1e-9 * (1 + np.linalg.norm(A))
    U = np.eye(n, dtype=complex)
    for _ in range(6):
        i, j = rng.sample(range(n), 2)
        th = rng.uniform(0, 2 * math.pi)
        R = np.eye(n, dtype=complex)
        R[i, i] = R[j, j] = math.cos(th)
        R[i, j] = -math.sin(th)
        R[j, i] = math.sin(th)
        U = U @ R
    eigs2 = hermitian_eigs(U @ A @ U.conj().T)
    assert np.allclose(eigs, eigs2, atol=1e-9)


def test_refine_bracket():
    assert abs(refine_bracket(lambda z: z - 1, 0, 2, 1e-12) - 1.0) < 1e-11
    delta = lambda z: z * z / 2 - 1
    assert abs(refine_bracket(lambda z: delta(z) - 1, 1.5, 2.5, 1e-12) - 2.0) < 1e-11
    d11 = lambda z: (z * z - z - 3) / 2
    got = refine_bracket(lambda z: d11(z) + 1, 1, 2, 1e-12)
    assert abs(got - (1 + math.sqrt(5)) / 2) < 1e-10


def test_refine_bracket_requires_sign_change():
    with pytest.raises(ValueError):
        refine_bracket(lambda z: z * z + 1, -1, 1)
