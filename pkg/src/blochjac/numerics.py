"""Floating-point layer: polynomial roots, Hermitian eigenvalues, bisection.

Everything upstream is exact; this module is the only place roots and
eigenvalues become floats, with explicit tolerances at every boundary.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .exactmath import RatPoly

DEFAULT_REL_TOL = 1e-12
MAX_ITER = 500
CLUSTER_SCALE = 1e-6
STAGNATION = 1e-14


class RootFindingError(RuntimeError):
    """Raised when the simultaneous iteration fails its residual contract.

    Carries the best iterate and per-root residuals for diagnosis.
    """

    def __init__(self, message, best, residuals):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


class NonHermitianError(ValueError):
    pass


def _as_complex_coeffs(f):
    if isinstance(f, RatPoly):
        cs = f.complex_coeffs()
    else:
        cs = [complex(c) for c in f]
    for c in cs:
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError("non-finite coefficient")
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _poly_and_deriv(cs, x):
    p = 0j
    dp = 0j
    for c in reversed(cs):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _residual_scale(cs, x):
    ax = abs(x)
    s = 0.0
    t = 1.0
    for c in cs:
        s += abs(c) * t
        t *= ax
    return max(s, 1e-300)


def roots_all(f, rel_tol=DEFAULT_REL_TOL, max_iter=MAX_ITER):
    """All complex roots of f (RatPoly or ascending coefficient sequence).

    Aberth-Ehrlich simultaneous iteration started on a circle of radius
    1 + max|c_k/c_n|; stops when every point stagnates, then enforces
    |f(r)| <= rel_tol * sum|c_k||r|^k. Exact zero roots are factored out
    first. Output sorted by (re, im).
    """
    cs = _as_complex_coeffs(f)
    if len(cs) < 2:
        raise ValueError("degree >= 1 required")
    zeros = []
    while cs and cs[0] == 0:
        zeros.append(0j)
        cs = cs[1:]
    n = len(cs) - 1
    if n == 0:
        return sorted(zeros, key=lambda r: (r.real, r.imag))
    lead = cs[-1]
    mon = [c / lead for c in cs]
    radius = 1.0 + max(abs(c) for c in mon[:-1]) if n > 0 else 1.0
    pts = [radius * cmath.exp(1j * (2 * math.pi * k / n + 0.4)) for k in range(n)]
    locked = [False] * n
    for _ in range(max_iter):
        moved = False
        for j in range(n):
            if locked[j]:
                continue
            z = pts[j]
            p, dp = _poly_and_deriv(mon, z)
            if p == 0:
                locked[j] = True
                continue
            if dp == 0:
                w = p / max(abs(p), 1e-300) * 1e-6
            else:
                w = p / dp
            s = 0j
            for k in range(n):
                if k != j:
                    d = z - pts[k]
                    if d == 0:
                        d = 1e-12 * (1 + abs(z))
                    s += 1 / d
            denom = 1 - w * s
            step = w if denom == 0 else w / denom
            pts[j] = z - step
            if abs(step) <= STAGNATION * (1 + abs(pts[j])):
                locked[j] = True
            else:
                moved = True
        if not moved:
            break
    residuals = []
    bad = False
    for r in pts:
        res = abs(_poly_and_deriv(cs, r)[0])
        residuals.append(res)
        if res > rel_tol * _residual_scale(cs, r):
            bad = True
    if bad:
        raise RootFindingError(
            f"root refinement did not meet the residual contract (rel_tol={rel_tol})",
            best=sorted(pts, key=lambda r: (r.real, r.imag)),
            residuals=residuals,
        )
    out = zeros + pts
    return sorted(out, key=lambda r: (r.real, r.imag))


def cluster_roots(roots, scale=CLUSTER_SCALE):
    """Group nearby roots into multiplicity clusters.

    Two roots join when |r_i - r_j| <= scale * (1 + (|r_i|+|r_j|)/2);
    clusters are connected components. Returns [(center, multiplicity)]
    sorted by (re, im) of the center.
    """
    rs = list(roots)
    n = len(rs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            tol = scale * (1 + (abs(rs[i]) + abs(rs[j])) / 2)
            if abs(rs[i] - rs[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(rs[i])
    out = []
    for members in groups.values():
        center = sum(members) / len(members)
        out.append((center, len(members)))
    out.sort(key=lambda cm: (cm[0].real, cm[0].imag))
    return out


def hermitian_eigs(H):
    """Ascending real eigenvalues of a Hermitian matrix.

    Accepts anything numpy can turn into a square complex matrix; rejects
    inputs whose Hermiticity defect exceeds 1e-12 absolute. Accuracy
    contract: 1e-10 * ||H||.
    """
    A = np.asarray(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    if not np.all(np.isfinite(A)):
        raise ValueError("non-finite entry")
    defect = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if defect > 1e-12:
        raise NonHermitianError(f"Hermiticity defect {defect:.3e} exceeds 1e-12")
    return [float(v) for v in np.linalg.eigvalsh(A)]


def refine_bracket(f, lo, hi, tol=1e-12):
    """Bisection on a sign change; returns the midpoint of the final bracket."""
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    a, b = float(lo), float(hi)
    for _ in range(4096):
        if b - a <= tol:
            break
        mid = (a + b) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if flo * fm < 0:
            b = mid
        else:
            a, flo = mid, fm
    return (a + b) / 2
