"""Spectral analysis of periodic block Jacobi operators.

Everything here is driven by the characteristic determinant
D(z, tau) = det(M(z) - tau*I) of the normalized monodromy matrix:
the surface polynomial in the Chebyshev variable nu = (tau + 1/tau)/2,
Lyapunov branches, resonances (branch points), the band structure with
multiplicities, gap classification, and a battery of identity checks.
"""

import cmath
import itertools
import math
import random
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .exactmath import (
    BiPoly,
    I,
    RatPoly,
    bipoly_squarefree_part,
    chebyshev,
    det_ring,
    discriminant,
    laurent_from_bipoly,
    palindrome_to_nu,
    squarefree_decomposition,
)
from .numerics import hermitian_eigs, roots_all
from .operators import (
    PeriodicOperator,
    charpoly,
    floquet_matrix,
    floquet_matrix_exact,
    modified_monodromy,
    require_valid,
    symplectic_defect,
    trace_powers,
)

REAL_TOL = 1e-9
EDGE_TOL = 1e-9
CROSS_TOL = 1e-7
DEFAULT_GRID = 257
_SUBSAMPLES = 17


class InternalConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagreed."""


class CharDeterminant:
    """det(M(z) - tau*I) with its coefficient family and normalized form.

    Fields: D (polynomial in tau with z-polynomial coefficients), xi
    (coefficients of tau^{2m-j}), c (the leading constant), q (D/(c tau^m),
    monic of degree pm in z), and the periods p, m.
    """

    __slots__ = ("D", "xi", "c", "q", "p", "m")

    def __init__(self, D, xi, c, q, p, m):
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("CharDeterminant is immutable")

    def __repr__(self):
        return f"CharDeterminant(p={self.p}, m={self.m}, c={self.c})"


class SurfacePoly:
    """Phi(z, nu) = sum phi_j(z) nu^(m-j), monic in nu (phi_0 = 1)."""

    __slots__ = ("phi",)

    def __init__(self, phi):
        object.__setattr__(self, "phi", tuple(phi))

    def __setattr__(self, name, value):
        raise AttributeError("SurfacePoly is immutable")

    @property
    def m(self):
        return len(self.phi) - 1

    def as_bipoly(self) -> BiPoly:
        return BiPoly(tuple(reversed(self.phi)), outer="nu")

    def nu_coeffs_at(self, z) -> list:
        """Ascending complex coefficients of Phi(z, .) at a numeric z."""
        return [p(complex(z)) for p in reversed(self.phi)]

    def __repr__(self):
        return f"SurfacePoly(m={self.m})"


class LyapunovBranch(NamedTuple):
    value: complex
    real: bool


class ResonanceSet(NamedTuple):
    values: tuple
    real: tuple
    clusters: tuple
    degenerate: bool
    rho: RatPoly


class Segment(NamedTuple):
    lo: float
    hi: float
    multiplicity: int


class Edge(NamedTuple):
    value: float
    kind: str
    branches: tuple


class BandStructure(NamedTuple):
    segments: tuple
    edges: tuple
    branch_bands: tuple


class Gap(NamedTuple):
    lo: float
    hi: float
    multiplicity: int
    kind: str
    lo_kinds: tuple
    hi_kinds: tuple


class IdentityCheck(NamedTuple):
    name: str
    status: str  # "pass" | "fail" | "n/a"
    residual: float
    detail: str


def _check(name, ok, residual=0.0, detail=""):
    return IdentityCheck(name, "pass" if ok else "fail", residual, detail)


def _na(name, detail):
    return IdentityCheck(name, "n/a", 0.0, detail)


def build_char_determinant(D: BiPoly, p: int, m: int) -> CharDeterminant:
    """Validate a candidate determinant and package it with xi, c, q.

    Checks the palindrome, the xi symmetry and degree bounds, and the
    leading structure of xi_m; any violation is an internal error because
    these are structural facts, not data-dependent ones.
    """
    if D.degree != 2 * m:
        raise InternalConsistencyError(f"determinant has tau-degree {D.degree}, expected {2*m}")
    xi = tuple(D.coeff(2 * m - j) for j in range(2 * m + 1))
    if xi[0] != RatPoly.one(xi[0].var):
        raise InternalConsistencyError("xi_0 != 1")
    for j in range(2 * m + 1):
        if xi[j] != xi[2 * m - j]:
            raise InternalConsistencyError(f"xi_{j} != xi_{2*m-j}: palindrome broken")
        if xi[j].degree > p * j:
            raise InternalConsistencyError(f"deg xi_{j} = {xi[j].degree} exceeds {p*j}")
    if xi[m].degree != p * m:
        raise InternalConsistencyError(f"deg xi_m = {xi[m].degree}, expected {p*m}")
    c = xi[m].coeff(p * m)
    q = laurent_from_bipoly(D, m).scale(Fraction(1) / c)
    return CharDeterminant(D=D, xi=xi, c=c, q=q, p=p, m=m)


def char_determinant(op: PeriodicOperator) -> CharDeterminant:
    """D(z, tau) computed two independent ways, which must agree exactly.

    Route one expands det(M(z) - tau*I) over the bivariate polynomial ring.
    Route two builds the tau-coefficients from the traces T_n = Tr M_p^n
    through the Newton recursion xi_s = -(1/s) * sum_{j<s} T_{s-j} xi_j
    and mirrors them across the palindrome.
    """
    require_valid(op)
    m = op.m
    n = 2 * m
    M = modified_monodromy(op)
    tau = BiPoly.outer_var("tau")
    mat = [
        [BiPoly((M.entry(i, j),)) - (tau if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    D_det = det_ring(mat, BiPoly.zero(), BiPoly.one())

    traces = trace_powers(op, m)
    xi = [RatPoly.one("z")]
    for s in range(1, m + 1):
        acc = RatPoly.zero("z")
        for j in range(s):
            acc = acc + traces[s - j - 1] * xi[j]
        xi.append(acc * Fraction(-1, s))
    mirrored = xi + [xi[m - 1 - j] for j in range(m)]
    D_trace = BiPoly(tuple(reversed(mirrored)), outer="tau")

    if D_det != D_trace:
        raise InternalConsistencyError(
            "determinant route and trace route disagree on D(z, tau)"
        )
    cd = build_char_determinant(D_det, op.p, m)
    if cd.c != op.leading_constant():
        raise InternalConsistencyError(
            f"leading constant {cd.c} != (-1)^m det A_p = {op.leading_constant()}"
        )
    return cd


def surface_poly(cd: CharDeterminant) -> SurfacePoly:
    """Phi(z, nu) = D / (2 tau)^m under nu = (tau + 1/tau)/2. Exact."""
    sym = laurent_from_bipoly(cd.D, cd.m)
    as_nu = palindrome_to_nu(sym) * Fraction(1, 2**cd.m)
    phi = tuple(as_nu.coeff(cd.m - j) for j in range(cd.m + 1))
    if phi[0] != RatPoly.one(phi[0].var):
        raise InternalConsistencyError("surface polynomial is not monic in nu")
    return SurfacePoly(phi)


def _branch_values(sp: SurfacePoly, z) -> list:
    return roots_all(sp.nu_coeffs_at(z))


def lyapunov_at(sp: SurfacePoly, z) -> list:
    """The m branch values of nu at z, sorted by (re, im), with real flags."""
    vals = sorted(_branch_values(sp, z), key=lambda w: (w.real, w.imag))
    return [LyapunovBranch(v, abs(v.imag) <= REAL_TOL) for v in vals]


def multipliers_at(cd: CharDeterminant, z) -> list:
    """2m multiplier values as m pairs (tau_j, 1/tau_j) at the point z.

    Each pair solves tau^2 - 2 nu_j tau + 1 = 0 for a Lyapunov branch nu_j;
    the pair product is 1 by construction. z lies in the spectrum exactly
    when some |tau_j| = 1.
    """
    sp = surface_poly(cd)
    pairs = []
    for b in lyapunov_at(sp, z):
        nu = b.value
        s = cmath.sqrt(nu * nu - 1)
        t = nu + s if abs(nu + s) >= abs(nu - s) else nu - s
        pair = sorted((t, 1 / t), key=lambda w: (w.real, w.imag))
        pairs.append(tuple(pair))
    return pairs


def resonance_poly(sp: SurfacePoly):
    """(rho, degenerate): the discriminant of Phi in nu, deflated if it vanishes.

    rho = prod_{i<j} (Delta_i - Delta_j)^2 up to the usual discriminant
    normalization; identically zero means permanently repeated branches
    (for example any free operator with m >= 2), in which case Phi is
    replaced by its squarefree part in nu and the flag is set.
    """
    if sp.m == 1:
        return RatPoly.one("z"), False
    rho = discriminant(sp.as_bipoly())
    if not rho.is_zero():
        return rho, False
    deflated = bipoly_squarefree_part(sp.as_bipoly())
    if deflated.degree <= 1:
        return RatPoly.one("z"), True
    return discriminant(deflated), True


def resonances(sp: SurfacePoly) -> ResonanceSet:
    """All zeros of rho, conjugate-paired, with exact multiplicities."""
    rho, degenerate = resonance_poly(sp)
    if rho.degree <= 0:
        return ResonanceSet((), (), (), degenerate, rho)
    clusters = []
    vals = []
    for g, k in squarefree_decomposition(rho):
        for r in _conjugate_symmetrize(roots_all(g)):
            clusters.append((r, k))
            vals.extend([r] * k)
    clusters.sort(key=lambda c: (c[0].real, c[0].imag))
    vals = tuple(sorted(vals, key=lambda w: (w.real, w.imag)))
    flags = tuple(abs(v.imag) <= REAL_TOL for v in vals)
    return ResonanceSet(vals, flags, tuple(clusters), degenerate, rho)


def _conjugate_symmetrize(roots):
    """Snap near-real roots to the axis and average conjugate partners."""
    real = [complex(r.real, 0.0) for r in roots if abs(r.imag) <= REAL_TOL]
    upper = sorted((r for r in roots if r.imag > REAL_TOL), key=lambda w: (w.real, w.imag))
    lower = sorted((r for r in roots if r.imag < -REAL_TOL), key=lambda w: (w.real, -w.imag))
    if len(upper) != len(lower):
        return list(roots)  # leave asymmetric output untouched; clustering still works
    out = list(real)
    for u, v in zip(upper, lower):
        w = (u + v.conjugate()) / 2
        out.extend((w, w.conjugate()))
    return out


def _eigs_at_tau(cd: CharDeterminant, tau0) -> list:
    f = cd.q.eval_tau(tau0)
    if f.degree != cd.p * cd.m:
        raise InternalConsistencyError(f"q(., {tau0}) has degree {f.degree}")
    out = []
    for g, mult in squarefree_decomposition(f):
        for r in roots_all(g):
            if abs(r.imag) > 1e-7:
                raise InternalConsistencyError(
                    f"non-real root {r} of q(., {tau0}) for a self-adjoint operator"
                )
            out.append((r.real, mult))
    return sorted(out)


def periodic_eigs(cd: CharDeterminant) -> list:
    """Roots of q(z, 1) as (value, multiplicity), ascending."""
    return _eigs_at_tau(cd, Fraction(1))


def antiperiodic_eigs(cd: CharDeterminant) -> list:
    """Roots of q(z, -1) as (value, multiplicity), ascending."""
    return _eigs_at_tau(cd, Fraction(-1))


def _candidate_edges(cd, sp):
    """Sorted deduplicated (value, kinds) from eigenvalues and resonances."""
    tagged = []
    for v, _ in periodic_eigs(cd):
        tagged.append((v, "periodic"))
    for v, _ in antiperiodic_eigs(cd):
        tagged.append((v, "antiperiodic"))
    for center, _ in resonances(sp).clusters:
        if abs(center.imag) <= 1e-7:
            tagged.append((center.real, "resonance"))
    tagged.sort(key=lambda t: t[0])
    merged = []
    for v, kind in tagged:
        if merged and v - merged[-1][0][-1] <= EDGE_TOL:
            merged[-1][0].append(v)
            merged[-1][1].add(kind)
        else:
            merged.append(([v], {kind}))
    return [(sum(vs) / len(vs), frozenset(kinds)) for vs, kinds in merged]


def _match_order(prev, cur):
    """Reorder cur to follow prev by minimal total displacement."""
    m = len(prev)
    if m == 1:
        return list(cur)
    best, best_cost = None, None
    for perm in itertools.permutations(range(m)):
        cost = sum(abs(prev[i] - cur[perm[i]]) for i in range(m))
        if best_cost is None or cost < best_cost - 1e-15:
            best, best_cost = perm, cost
    return [cur[best[i]] for i in range(m)]


def _in_band(v) -> bool:
    return abs(v.imag) <= REAL_TOL and -1 - 1e-10 <= v.real <= 1 + 1e-10


def _branch_values_exact(sp: SurfacePoly, x) -> list:
    """Branch values at a float or Fraction x, exactly, multiplicity-aware.

    Aberth splits a k-fold root into a cloud of diameter eps^(1/k), which for
    a permanently double branch (any free operator with m >= 2) fakes a
    conjugate pair and breaks realness flags.  Evaluating Phi exactly and
    peeling multiplicities off first leaves only simple roots for the solver.
    """
    fx = Fraction(x)
    poly = RatPoly([p(fx) for p in reversed(sp.phi)], "nu")
    out = []
    for g, k in squarefree_decomposition(poly):
        for r in roots_all(g):
            out.extend([r] * k)
    return out


def _flags_from_exact(cur, vals) -> tuple:
    """in-band flags for the tracked values cur, read off nearest exact values."""
    rem = list(vals)
    flags = []
    for v in cur:
        j = min(range(len(rem)), key=lambda i: abs(rem[i] - v))
        flags.append(_in_band(rem.pop(j)))
    return tuple(flags)


def band_structure(op: PeriodicOperator, grid: int = DEFAULT_GRID, tol: float = EDGE_TOL) -> BandStructure:
    """Bands with multiplicity, edge provenance, and per-branch intervals.

    Candidate edges are the real roots of q(., 1), q(., -1) and the real
    resonances; multiplicity on each interval between consecutive candidates
    is the number of real Lyapunov branches inside [-1, 1] at its midpoint.
    The result is cross-validated against Floquet eigenvalues on a grid.
    """
    require_valid(op)
    cd = char_determinant(op)
    sp = surface_poly(cd)
    bs = band_structure_from_char(cd, sp, tol=tol)
    _cross_validate(op, bs, grid)
    return bs


def band_structure_from_char(cd: CharDeterminant, sp: SurfacePoly = None, tol: float = EDGE_TOL) -> BandStructure:
    """The band computation alone, usable when only D(z, tau) is known.

    No Floquet cross-validation happens here (there is no operator to
    build L(tau) from); band_structure wraps this and adds it.
    """
    if sp is None:
        sp = surface_poly(cd)
    m = cd.m
    cands = _candidate_edges(cd, sp)
    if not cands:
        raise InternalConsistencyError("no candidate band edges found")
    values = [v for v, _ in cands]

    # Track branch identity through sub-sampled interval interiors.  The
    # matching target is a linear extrapolation of each branch, so that two
    # real branches crossing transversally (which happens exactly at interval
    # boundaries) are continued analytically instead of swapping into upper
    # and lower envelopes.
    member = []  # per interval: tuple of booleans per branch
    prev = prev2 = None
    xprev = xprev2 = 0.0
    for left, right in zip(values, values[1:]):
        xs = np.linspace(left, right, _SUBSAMPLES + 2)[1:-1]
        mid_flags = None
        for idx, x in enumerate(xs):
            x = float(x)
            cur = _branch_values(sp, x)
            if prev is None:
                cur = sorted(cur, key=lambda w: (w.real, w.imag))
            elif prev2 is None:
                cur = _match_order(prev, cur)
            else:
                r = (x - xprev) / (xprev - xprev2)
                cur = _match_order([a + (a - b) * r for a, b in zip(prev, prev2)], cur)
            prev2, xprev2 = prev, xprev
            prev, xprev = cur, x
            if idx == _SUBSAMPLES // 2:
                mid_flags = _flags_from_exact(cur, _branch_values_exact(sp, x))
        member.append(mid_flags)

    if not member:  # single candidate point: no interior, no bands
        return BandStructure((), (), tuple(() for _ in range(m)))

    mults = [sum(flags) for flags in member]
    segments = []
    for i, mult in enumerate(mults):
        if segments and segments[-1][2] == mult and segments[-1][1] == values[i]:
            segments[-1][1] = values[i + 1]
        else:
            segments.append([values[i], values[i + 1], mult])
    positive = tuple(Segment(lo, hi, mult) for lo, hi, mult in segments if mult > 0)

    branch_bands = []
    for j in range(m):
        bands = []
        for i, flags in enumerate(member):
            if not flags[j]:
                continue
            if bands and bands[-1][1] == values[i]:
                bands[-1][1] = values[i + 1]
            else:
                bands.append([values[i], values[i + 1]])
        branch_bands.append(tuple((lo, hi) for lo, hi in bands))

    edges = []
    for value, kinds in cands:
        touching = tuple(
            j
            for j in range(m)
            if any(abs(value - e) <= tol for band in branch_bands[j] for e in band)
        )
        if touching:
            for kind in sorted(kinds):
                edges.append(Edge(value, kind, touching))
    return BandStructure(positive, tuple(edges), tuple(branch_bands))


def _cross_validate(op, bs: BandStructure, grid: int):
    segs = bs.segments
    for x in np.linspace(0.0, 2 * math.pi, grid):
        tau = complex(math.cos(x), math.sin(x))
        for lam in hermitian_eigs(floquet_matrix(op, tau)):
            dist = min((max(lo - lam, lam - hi, 0.0) for lo, hi, _ in segs), default=math.inf)
            if dist > CROSS_TOL:
                raise InternalConsistencyError(
                    f"Floquet eigenvalue {lam} at x={x} misses every band by {dist}"
                )


def classify_gaps(bs: BandStructure, cd: CharDeterminant, sp: SurfacePoly) -> list:
    """Maximal intervals where some branch leaves [-1, 1], with endpoint kinds.

    Both true spectral gaps (multiplicity 0 between bands) and interior
    stretches of reduced multiplicity are reported. Kind is "stable" when
    both endpoints are periodic or antiperiodic eigenvalues, "resonance"
    when both are branch points only, "mixed" otherwise.
    """
    m = sp.m
    kind_at = {}
    for e in bs.edges:
        kind_at.setdefault(e.value, set()).add(e.kind)

    intervals = []
    for seg in bs.segments:
        if seg.multiplicity < m:
            intervals.append((seg.lo, seg.hi, seg.multiplicity))
    for left, right in zip(bs.segments, bs.segments[1:]):
        if left.hi < right.lo:
            intervals.append((left.hi, right.lo, 0))
    intervals.sort()

    out = []
    for lo, hi, mult in intervals:
        lo_kinds = tuple(sorted(kind_at.get(lo, set())))
        hi_kinds = tuple(sorted(kind_at.get(hi, set())))
        sides = []
        for kinds in (lo_kinds, hi_kinds):
            if "periodic" in kinds or "antiperiodic" in kinds:
                sides.append("eigenvalue")
            else:
                sides.append("resonance")
        if sides == ["eigenvalue", "eigenvalue"]:
            kind = "stable"
        elif sides == ["resonance", "resonance"]:
            kind = "resonance"
        else:
            kind = "mixed"
        out.append(Gap(lo, hi, mult, kind, lo_kinds, hi_kinds))
    return out


def _sum_traces(op, f):
    total = Fraction(0)
    for n in range(1, op.p + 1):
        total += f(n)
    return total


def _trace_of(mat):
    t = mat[0][0]
    for i in range(1, len(mat)):
        t = t + mat[i][i]
    return t


def _frobenius_sq(mat):
    return sum(x * x for row in mat for x in row)


def verify_identities(op: PeriodicOperator, bands: BandStructure = None) -> list:
    """Run every executable identity for one operator; returns IdentityChecks.

    Exact checks: the symplectic normalization, the palindrome and dual
    routes (implicit in char_determinant), the Floquet determinant match
    at tau in {1, -1, i}, the first two eigenvalue-moment identities read
    off q's top coefficients. Float checks: the second-moment lower bound,
    the norm sandwich from band extremes, and the trace-vs-Chebyshev
    sampling identity.

    The moment identities compare Tr L(tau)^s with coefficient data; for
    p = 1 the wrap-around couples tau into every diagonal block and for
    p = 2 the first power of tau survives in Tr L^2, so those cases are
    reported as not applicable exactly where the cancellation fails.
    """
    require_valid(op)
    p, m = op.p, op.m
    pm = p * m
    report = []

    defect = symplectic_defect(op)
    report.append(_check("symplectic-normalization", defect.is_zero()))

    try:
        cd = char_determinant(op)
        report.append(_check("palindrome-and-dual-route", True))
    except InternalConsistencyError as exc:
        report.append(_check("palindrome-and-dual-route", False, detail=str(exc)))
        return report
    sp = surface_poly(cd)

    for tau0, label in ((Fraction(1), "1"), (Fraction(-1), "-1"), (I, "i")):
        lhs = cd.q.eval_tau(tau0)
        rhs = charpoly(floquet_matrix_exact(op, tau0))
        report.append(
            _check(f"floquet-determinant-tau={label}", lhs == rhs)
        )

    trace_b = _sum_traces(op, lambda n: _trace_of(op.b_at(n)))
    if p >= 2:
        eta_top = cd.q.z_coefficient(pm - 1)
        constant = set(eta_top) <= {0}
        ok = constant and eta_top.get(0, Fraction(0)) == -trace_b
        report.append(_check("moment-1-coefficient", ok))
    else:
        report.append(_na("moment-1-coefficient", "period 1 couples tau into Tr L"))

    # Tr(b^2) = |b|_F^2 for symmetric b and Tr(a a^T) = |a|_F^2, so the
    # second-moment target is a plain sum of squared entries.
    target2 = Fraction(0)
    for n in range(1, p + 1):
        target2 += _frobenius_sq(op.b_at(n)) + 2 * _frobenius_sq(op.a_at(n))

    def moment2_at(tau0):
        f = cd.q.eval_tau(tau0)
        e1 = f.coeff(pm - 1)
        e2 = f.coeff(pm - 2)
        return e1 * e1 - 2 * e2

    if p >= 3:
        report.append(_check("moment-2-tau=1", moment2_at(Fraction(1)) == target2))
    else:
        report.append(_na("moment-2-tau=1", "survives only for period >= 3"))
    if p >= 2:
        report.append(_check("moment-2-tau=i", moment2_at(I) == target2))
    else:
        report.append(_na("moment-2-tau=i", "period 1 couples tau into Tr L^2"))

    if p >= 2:
        det_prod = Fraction(1)
        for n in range(1, p + 1):
            det_prod *= _det_fraction(op.a_at(n))
        rhs = 2 * pm * float(det_prod * det_prod) ** (1.0 / pm)
        sum2 = float(target2)
        report.append(
            _check(
                "moment-2-lower-bound",
                sum2 >= rhs - 1e-9,
                residual=sum2 - rhs,
                detail=f"sum {sum2} vs bound {rhs}",
            )
        )
    else:
        report.append(_na("moment-2-lower-bound", "stated for period >= 2"))

    if bands is None:
        bands = band_structure(op)
    norm_inf = float(op.norm_infty())
    lo = bands.segments[0].lo
    hi = bands.segments[-1].hi
    norm_j = max(abs(lo), abs(hi))
    ok = norm_inf <= norm_j + 1e-9 and norm_j <= (4 * m - 1) * norm_inf + 1e-9
    report.append(
        _check("norm-sandwich", ok, detail=f"|J|_inf={norm_inf}, |J|={norm_j}")
    )
    if trace_b == 0:
        half_width = (hi - lo) / 2
        center = abs(hi + lo) / 2
        ok = (
            norm_inf + center <= half_width + 1e-9
            and half_width <= (4 * m - 1) * norm_inf + 1e-9
        )
        report.append(_check("norm-sandwich-traceless", ok))
    else:
        report.append(_na("norm-sandwich-traceless", "requires sum Tr b_n = 0"))

    traces = trace_powers(op, 3)
    rng = random.Random(0xB10C)
    worst = 0.0
    ok = True
    for _ in range(5):
        z0 = Fraction(rng.randint(-194, 194), 97)
        branches = _branch_values_exact(sp, z0)
        for n in (1, 2, 3):
            lhs = complex(traces[n - 1](z0)) / 2
            rhs = sum(chebyshev(n)(v) for v in branches)
            err = abs(lhs - rhs)
            tol = 1e-8 * max(1.0, abs(lhs))
            worst = max(worst, err)
            if err > tol:
                ok = False
    report.append(_check("trace-chebyshev-sampling", ok, residual=worst))
    return report


def _det_fraction(mat):
    rows = [list(r) for r in mat]
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = Fraction(1) / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor:
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return det


def leading_asymptotics(cd: CharDeterminant, op: PeriodicOperator) -> list:
    """High-energy structure checks: exact degrees plus |z| = 1e3 float ratios."""
    p, m = cd.p, cd.m
    pm = p * m
    report = []

    top = cd.q.z_coefficient(pm)
    report.append(_check("q-monic", top == {0: Fraction(1)}))
    report.append(_check("xi-m-leading", cd.xi[m].coeff(pm) == cd.c))
    report.append(
        _check("xi-degree-bounds", all(cd.xi[j].degree <= p * j for j in range(2 * m + 1)))
    )

    sp = surface_poly(cd)
    z0 = 1000.0
    scaled = sorted(
        (b.value / z0**p for b in lyapunov_at(sp, z0)), key=lambda w: (w.real, w.imag)
    )
    ap = np.array([[float(x) for x in row] for row in op.a_product_inverse()])
    targets = sorted(np.linalg.eigvals(ap / 2), key=lambda w: (w.real, w.imag))
    ok = all(abs(s - t) <= 0.1 * abs(t) for s, t in zip(scaled, targets))
    report.append(_check("branch-asymptote", ok, detail=f"{scaled} vs {targets}"))

    rho, degenerate = resonance_poly(sp)
    ap_poly = charpoly([[Fraction(x) / 2 for x in row] for row in op.a_product_inverse()])
    dis = discriminant(ap_poly)
    if degenerate or dis == 0:
        report.append(_na("resonance-asymptote", "repeated leading eigenvalues"))
    else:
        val = complex(rho(z0)) / z0 ** (pm * (m - 1))
        ok = abs(val - float(dis)) <= 0.1 * abs(float(dis))
        report.append(_check("resonance-asymptote", ok, detail=f"{val} vs {float(dis)}"))
    return report
