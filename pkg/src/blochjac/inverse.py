"""Recovery of the characteristic determinant from finite spectral data.

Given the full Floquet spectrum at one frequency and progressively smaller
eigenvalue subsets at m further frequencies (with pairwise distinct cosines),
the coefficients of q(z, tau) are determined by a sequence of exactly square
linear solves: each z-coefficient eta_n(tau) is a symmetric Laurent polynomial
whose half-degree s(n) depends only on which index block K_s the degree n
falls in, so s(n) + 1 sample values pin it down through a cosine system.

Recovery runs in float arithmetic (the frequencies enter as e^{i kappa});
snap_to_rational is the optional post-pass that reconstructs exact rational
coefficients when the data came from a rational operator.
"""

import cmath
import math
import random
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .exactmath import BiPoly, RatPoly, squarefree_decomposition
from .numerics import cluster_roots, roots_all
from .operators import PeriodicOperator, require_valid
from .spectral import CharDeterminant, InternalConsistencyError, build_char_determinant, char_determinant

SNAP_DENOMINATOR = 10**6
SNAP_TOL = 1e-7
RESIDUAL_TOL = 1e-7


class InconsistentDataError(ValueError):
    """Spectral data that no determinant of the declared shape interpolates."""


class SpectralData(NamedTuple):
    p: int
    m: int
    kappas: tuple
    lambda_sets: tuple  # lambda_sets[j] has (m-j)*p + 1 values for j >= 1, p*m for j = 0


def half_degree(p: int, m: int, n: int) -> int:
    """s(n): the Laurent half-degree of the z^n coefficient of q."""
    if not 0 <= n <= p * m:
        raise ValueError(f"coefficient index {n} outside 0..{p * m}")
    if n == 0:
        return m
    return m - ((n + p - 1) // p)


def coefficient_blocks(p: int, m: int) -> tuple:
    """K_0..K_m: z-degree indices grouped by half-degree; they tile 0..pm."""
    blocks = []
    for s in range(m):
        blocks.append(tuple(range(p * (m - s - 1) + 1, p * (m - s) + 1)))
    blocks.append((0,))
    return tuple(blocks)


class EtaTable:
    """Coefficients zeta_{m-j, n} of eta_n against the basis tau^j + tau^-j.

    rows[n][j] is the z^n coefficient of the tau^j Laurent coefficient of q;
    entries beyond j = s(n) vanish by the degree bound deg zeta_{m-j} <= p(m-j)
    and are not stored.  Entries are Fractions when built from an exact
    determinant and complex floats when produced by recovery.
    """

    __slots__ = ("p", "m", "rows")

    def __init__(self, p, m, rows):
        if len(rows) != p * m + 1:
            raise ValueError(f"need {p * m + 1} coefficient rows, got {len(rows)}")
        for n, row in enumerate(rows):
            if len(row) != half_degree(p, m, n) + 1:
                raise ValueError(f"row {n} must have {half_degree(p, m, n) + 1} entries")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "rows", tuple(tuple(r) for r in rows))

    def __setattr__(self, name, value):
        raise AttributeError("EtaTable is immutable")

    @classmethod
    def from_char(cls, cd: CharDeterminant) -> "EtaTable":
        rows = []
        for n in range(cd.p * cd.m + 1):
            s = half_degree(cd.p, cd.m, n)
            rows.append(tuple(cd.q.coeff(j).coeff(n) for j in range(s + 1)))
            for j in range(s + 1, cd.m + 1):
                if cd.q.coeff(j).coeff(n) != 0:
                    raise InternalConsistencyError(
                        f"z^{n} appears in the tau^{j} coefficient beyond its half-degree"
                    )
        return cls(cd.p, cd.m, rows)

    def eta_at(self, n: int, kappa: float) -> complex:
        """eta_n(e^{i kappa}), real by Laurent symmetry."""
        row = self.rows[n]
        return complex(sum((2 * math.cos(j * kappa) if j else 1) * complex(v) for j, v in enumerate(row)))

    def section_at(self, kappa: float) -> list:
        """Ascending z-coefficients of q(., e^{i kappa})."""
        return [self.eta_at(n, kappa) for n in range(self.p * self.m + 1)]

    def __eq__(self, other):
        return (
            isinstance(other, EtaTable)
            and (self.p, self.m, self.rows) == (other.p, other.m, other.rows)
        )

    def __repr__(self):
        return f"EtaTable(p={self.p}, m={self.m})"


class Recovery(NamedTuple):
    eta: EtaTable
    q: dict  # tau-power j >= 0 -> ascending z coefficients (complex floats)
    D: dict  # tau-power i = 0..2m -> ascending z coefficients (complex floats)
    c: complex


def cosine_matrix(kappas) -> tuple:
    """(W, solve) with W[r][j] = cos(j kappa_r) over a prefix of frequencies.

    solve(rhs) returns W^-1 rhs and insists on a small residual; a condition
    number above 1e12 means two cosines nearly coincide and the system cannot
    separate the basis elements.
    """
    ks = [float(k) for k in kappas]
    n = len(ks)
    W = np.array([[math.cos(j * k) for j in range(n)] for k in ks])
    if np.linalg.cond(W) > 1e12:
        raise ValueError("kappa values too close")

    def solve(rhs):
        vec = np.asarray(rhs, dtype=complex)
        x = np.linalg.solve(W, vec)
        residual = float(np.linalg.norm(W @ x - vec))
        if residual > 1e-9 * max(1.0, float(np.linalg.norm(vec))):
            raise ValueError("kappa values too close")
        return [complex(v) for v in x]

    return W, solve


def constrained_poly(roots, top_coeffs) -> list:
    """The unique r = g * prod(z - root) with prescribed top coefficients.

    top_coeffs[i] is the coefficient of z^(k+i) in r, k = len(roots), so
    top_coeffs[-1] is the leading one; deg r = k + len(top_coeffs) - 1.  The
    factor h = prod(z - root) is monic, which makes the system for g's
    coefficients triangular from the top down.  Returns ascending coefficients.
    """
    if not roots:
        raise ValueError("need at least one root")
    if not top_coeffs:
        raise ValueError("need at least one prescribed coefficient")
    h = [complex(1)]
    for r in roots:
        nxt = [complex(0)] * (len(h) + 1)
        for i, hv in enumerate(h):
            nxt[i + 1] += hv
            nxt[i] -= complex(r) * hv
        h = nxt
    k = len(roots)
    s = len(top_coeffs) - 1
    g = [complex(0)] * (s + 1)
    for i in range(s, -1, -1):
        acc = complex(top_coeffs[i])
        for b in range(i + 1, min(s, k + i) + 1):
            acc -= h[k + i - b] * g[b]
        g[i] = acc
    out = [complex(0)] * (k + s + 1)
    for i, hv in enumerate(h):
        for b, gv in enumerate(g):
            out[i + b] += hv * gv
    return out


def require_spectral_data(sd: SpectralData):
    """Raise InconsistentDataError unless the shape invariants hold."""
    problems = []
    if sd.p < 1 or sd.m < 1:
        problems.append(f"p = {sd.p}, m = {sd.m} must be positive")
    else:
        if len(sd.kappas) != sd.m + 1:
            problems.append(f"need {sd.m + 1} frequencies, got {len(sd.kappas)}")
        if len(sd.lambda_sets) != sd.m + 1:
            problems.append(f"need {sd.m + 1} eigenvalue sets, got {len(sd.lambda_sets)}")
        else:
            for j, lam in enumerate(sd.lambda_sets):
                want = sd.p * sd.m if j == 0 else (sd.m - j) * sd.p + 1
                if len(lam) != want:
                    problems.append(f"lambda set {j} has {len(lam)} values, needs {want}")
        cosines = [math.cos(float(k)) for k in sd.kappas]
        for i in range(len(cosines)):
            for j in range(i + 1, len(cosines)):
                if abs(cosines[i] - cosines[j]) <= 1e-9:
                    problems.append(f"cos kappa_{i} and cos kappa_{j} coincide")
    if problems:
        raise InconsistentDataError("inconsistent spectral data: " + "; ".join(problems))


def _exact_cosines(kappa: float, m: int):
    """cos(j*kappa) for j = 0..m as Fractions, or None when any is irrational.

    The default frequency battery (0, pi, pi/2, pi/3) has rational cosines
    at every multiple, which is what makes the exact path below available.
    """
    out = []
    for j in range(m + 1):
        c = math.cos(j * kappa)
        f = Fraction(c).limit_denominator(10**6)
        if abs(float(f) - c) > 1e-12:
            return None
        out.append(f)
    return out


def _section_roots(cd, table, kappa: float) -> list:
    """Multiplicity-counted roots of q(., e^{i kappa}), sorted by (re, im).

    With rational cos(j*kappa) the section is an exact rational polynomial,
    so multiplicities come from squarefree decomposition and every root is
    a root of a squarefree factor (full accuracy even for repeated roots).
    Otherwise the roots are clustered: a split k-fold root would poison the
    partial sets, while the cluster mean is first-order accurate.
    """
    cos_exact = _exact_cosines(kappa, cd.m)
    out = []
    if cos_exact is not None:
        coeffs = []
        for row in table.rows:
            acc = row[0]
            for j in range(1, len(row)):
                acc += 2 * cos_exact[j] * row[j]
            coeffs.append(acc)
        for g, k in squarefree_decomposition(RatPoly(coeffs, "z")):
            for r in roots_all(g):
                out.extend([r] * k)
    else:
        raw = roots_all(cd.q.eval_tau_complex(cmath.exp(1j * kappa)))
        for center, count in cluster_roots(raw):
            out.extend([center] * count)
    out.sort(key=lambda w: (w.real, w.imag))
    return out


def forward_spectral_data(op: PeriodicOperator, kappas, subset_rule: str = "ascending", seed: int = 0) -> SpectralData:
    """Generate recovery input from an operator: full spectrum at kappa_0, subsets after.

    subset_rule picks which (m-j)p + 1 of the pm roots of q(., e^{i kappa_j})
    enter Lambda_j: "ascending" keeps the smallest in (re, im) order,
    "descending" the largest, "random" a seeded sample.  Recovery must not
    care, which is exactly what the round-trip tests exercise.
    """
    require_valid(op)
    if subset_rule not in ("ascending", "descending", "random"):
        raise ValueError(f"unknown subset rule {subset_rule!r}")
    cd = char_determinant(op)
    p, m = cd.p, cd.m
    pm = p * m
    if len(kappas) != m + 1:
        raise ValueError(f"need {m + 1} frequencies, got {len(kappas)}")
    rng = random.Random(seed)
    table = EtaTable.from_char(cd)
    sets = []
    for j, kappa in enumerate(kappas):
        roots = _section_roots(cd, table, float(kappa))
        if j == 0:
            sets.append(tuple(roots))
            continue
        size = (m - j) * p + 1
        if subset_rule == "ascending":
            chosen = roots[:size]
        elif subset_rule == "descending":
            chosen = roots[-size:]
        else:
            chosen = [roots[i] for i in sorted(rng.sample(range(pm), size))]
        sets.append(tuple(chosen))
    return SpectralData(p=p, m=m, kappas=tuple(float(k) for k in kappas), lambda_sets=tuple(sets))


def _poly_from_roots(roots) -> list:
    coeffs = [complex(1)]
    for r in roots:
        nxt = [complex(0)] * (len(coeffs) + 1)
        for i, v in enumerate(coeffs):
            nxt[i + 1] += v
            nxt[i] -= complex(r) * v
        coeffs = nxt
    return coeffs


def _max_root_distance(eta: EtaTable, kappa: float, lambdas) -> float:
    """How far the given values sit from actual roots of the recovered section."""
    section = eta.section_at(kappa)
    roots = roots_all(section)
    worst = 0.0
    for lam in lambdas:
        d = min(abs(complex(lam) - r) for r in roots)
        worst = max(worst, d / max(1.0, abs(complex(lam))))
    return worst


def _section_residual(eta: EtaTable, kappa: float, lambdas) -> float:
    """Largest scaled |section(lam)| over the given values.

    Root distance blows up at a k-fold root, where even honest data splits
    by eps^(1/k); the evaluation residual stays near machine precision
    there, so the consistency guard accepts whichever measure is happy.
    """
    section = eta.section_at(kappa)
    worst = 0.0
    for lam in lambdas:
        z = complex(lam)
        val = 0j
        scale = 0.0
        power = 1 + 0j
        grow = max(1.0, abs(z))
        bound = 1.0
        for c in section:
            val += c * power
            scale += abs(c) * bound
            power *= z
            bound *= grow
        worst = max(worst, abs(val) / max(scale, 1e-300))
    return worst


def recover_determinant(sd: SpectralData) -> Recovery:
    """Rebuild (eta table, q, D, c) from eigenvalue sets at m+1 frequencies.

    Step 0 multiplies out q(., e^{i kappa_0}) from the full set Lambda_0 and
    reads off the constant-in-tau coefficients (block K_0).  Step s completes
    q(., e^{i kappa_s}) from the partial set Lambda_s with constrained_poly
    (the top ps coefficients are already known), then solves the cosine
    system on block K_s.  After step m every zeta is known; c = 1/zeta_0 and
    D = c tau^m q.  The recovered sections must reproduce every input value
    as a root, else the data is declared inconsistent.
    """
    require_spectral_data(sd)
    p, m = sd.p, sd.m
    pm = p * m
    kappas = [float(k) for k in sd.kappas]
    blocks = coefficient_blocks(p, m)

    sections = [_poly_from_roots(sd.lambda_sets[0])]
    rows = [None] * (pm + 1)
    for n in blocks[0]:
        rows[n] = (sections[0][n],)

    try:
        for s in range(1, m + 1):
            tops = []
            for n in range(p * (m - s) + 1, pm + 1):
                row = rows[n]
                tops.append(
                    sum((2 * math.cos(j * kappas[s]) if j else 1) * v for j, v in enumerate(row))
                )
            sections.append(constrained_poly(sd.lambda_sets[s], tops))
            _, solve = cosine_matrix(kappas[: s + 1])
            for n in blocks[s]:
                rhs = [sections[r][n] / 2 for r in range(s + 1)]
                sol = solve(rhs)
                rows[n] = tuple([2 * sol[0]] + sol[1:])
    except ValueError as exc:
        raise InconsistentDataError(f"inconsistent spectral data: {exc}") from exc

    eta = EtaTable(p, m, rows)
    zeta0 = rows[0][m]
    if abs(zeta0) < 1e-300:
        raise InconsistentDataError("inconsistent spectral data: vanishing leading constant")
    c = 1 / zeta0

    q = {}
    for j in range(m + 1):
        q[j] = tuple(rows[n][j] if j < len(rows[n]) else complex(0) for n in range(pm + 1))
    D = {}
    for i in range(2 * m + 1):
        D[i] = tuple(c * v for v in q[abs(m - i)])

    for j, kappa in enumerate(kappas):
        worst = _max_root_distance(eta, kappa, sd.lambda_sets[j])
        if worst > RESIDUAL_TOL and _section_residual(eta, kappa, sd.lambda_sets[j]) > RESIDUAL_TOL:
            raise InconsistentDataError(
                f"inconsistent spectral data: recovered section at kappa_{j} "
                f"misses an input eigenvalue by {worst:.3e}"
            )
    return Recovery(eta=eta, q=q, D=D, c=c)


def _snap_value(v: complex):
    if abs(v.imag) > SNAP_TOL:
        return None
    x = v.real
    if abs(x) <= 1e-9:
        return Fraction(0)
    f = Fraction(x).limit_denominator(SNAP_DENOMINATOR)
    return f if abs(float(f) - x) <= SNAP_TOL else None


def snap_to_rational(rec: Recovery) -> CharDeterminant:
    """Round the recovered determinant to exact rational coefficients.

    Every coefficient must sit within 1e-7 of a rational with denominator
    at most 10^6 (and have negligible imaginary part), or the data is not
    a clean snapshot of a rational operator and the whole pass refuses.
    """
    p, m = rec.eta.p, rec.eta.m
    cols = []
    for i in range(2 * m + 1):
        snapped = []
        for n, v in enumerate(rec.D[i]):
            f = _snap_value(v)
            if f is None:
                raise InconsistentDataError(
                    f"inconsistent spectral data: D coefficient tau^{i} z^{n} = {v} "
                    "is not near a small rational"
                )
            snapped.append(f)
        cols.append(RatPoly(snapped, "z"))
    D = BiPoly(tuple(cols), outer="tau")
    try:
        return build_char_determinant(D, p, m)
    except InternalConsistencyError as exc:
        raise InconsistentDataError(f"inconsistent spectral data: {exc}") from exc
