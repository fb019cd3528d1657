import math
from fractions import Fraction

import numpy as np
import pytest

import blochjac.spectral as spectral_mod
from blochjac.exactmath import BiPoly, RatPoly, chebyshev
from blochjac.fixtures import (
    example2_const,
    example3,
    example4,
    free_operator,
    random_operator,
    rotation_operator,
    scalar_operator,
)
from blochjac.numerics import hermitian_eigs
from blochjac.operators import floquet_matrix
from blochjac.spectral import (
    BandStructure,
    InternalConsistencyError,
    Segment,
    _cross_validate,
    antiperiodic_eigs,
    band_structure,
    build_char_determinant,
    char_determinant,
    classify_gaps,
    leading_asymptotics,
    lyapunov_at,
    multipliers_at,
    periodic_eigs,
    resonance_poly,
    resonances,
    surface_poly,
    verify_identities,
)


def zpoly(*coeffs):
    return RatPoly(coeffs, "z")


def free_block(p):
    """tau^2 + 1 - 2 tau T_p(z/2), the single-band building block."""
    half_z = zpoly(0, Fraction(1, 2))
    return BiPoly((RatPoly.one("z"), chebyshev(p)(half_z) * (-2), RatPoly.one("z")), outer="tau")


def test_char_determinant_minimal_free():
    cd = char_determinant(free_operator(1, 1))
    assert cd.D == BiPoly((RatPoly.one("z"), zpoly(0, -1), RatPoly.one("z")), outer="tau")
    assert cd.xi == (RatPoly.one("z"), zpoly(0, -1), RatPoly.one("z"))
    assert cd.c == -1


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_char_determinant_free_formula(p, m):
    cd = char_determinant(free_operator(p, m))
    assert cd.D == free_block(p) ** m
    assert cd.c == (-1) ** m


@pytest.mark.parametrize(
    "op,first_trace",
    [
        (example3(1), zpoly(-5, 0, 2)),
        (example3(Fraction(7, 3)), zpoly(-5, 0, 2)),
        (example4(0), zpoly(-3, -2, 2)),
        (example4(Fraction(1, 2)), zpoly(-3, -2, 2)),
        (example2_const(1), zpoly(1, 4, 2)),
    ],
)
def test_first_trace_coefficient(op, first_trace):
    # xi_1 = -Tr M_p, and the palindrome repeats it at xi_{2m-1}.
    cd = char_determinant(op)
    assert cd.xi[1] == -first_trace
    assert cd.xi[3] == -first_trace
    assert cd.c == 1


def test_free_q_is_laurent_symmetric():
    cd = char_determinant(free_operator(2, 1))
    assert cd.c == -1
    assert cd.q.coeff(0) == zpoly(-2, 0, 1)
    assert cd.q.coeff(1) == zpoly(-1)
    assert cd.q.coeff(-1) == zpoly(-1)


def test_example2_floquet_sections_factor():
    z = zpoly(0, 1)
    cd = char_determinant(example2_const(1))
    assert cd.q.eval_tau(Fraction(1)) == (z + 2) ** 2 * ((z - 2) ** 2 - 4)
    assert cd.q.eval_tau(Fraction(-1)) == (z**2 - 2) ** 2


def test_surface_poly_free():
    half_z = zpoly(0, Fraction(1, 2))
    sp = surface_poly(char_determinant(free_operator(3, 1)))
    assert sp.phi == (RatPoly.one("z"), -chebyshev(3)(half_z))
    sp2 = surface_poly(char_determinant(free_operator(2, 2)))
    body = zpoly(-1, 0, Fraction(1, 2))
    assert sp2.phi == (RatPoly.one("z"), body * (-2), body * body)


def test_surface_poly_example3_branch_product():
    sp = surface_poly(char_determinant(example3(1)))
    d1 = zpoly(Fraction(-3, 2), Fraction(-1, 2), Fraction(1, 2))
    d2 = zpoly(-1, Fraction(1, 2), Fraction(1, 2))
    assert sp.phi == (RatPoly.one("z"), -(d1 + d2), d1 * d2)


def test_lyapunov_point_samples():
    sp = surface_poly(char_determinant(free_operator(2, 1)))
    (b,) = lyapunov_at(sp, 0)
    assert b.real and abs(b.value - (-1)) < 1e-12
    (b,) = lyapunov_at(sp, 10)
    assert b.real and abs(b.value - 49) < 1e-9

    sp4 = surface_poly(char_determinant(example4(0)))
    vals = [b.value for b in lyapunov_at(sp4, 0)]
    assert all(b.real for b in lyapunov_at(sp4, 0))
    assert abs(vals[0] - (-1)) < 1e-12 and abs(vals[1] - (-0.5)) < 1e-12


def test_lyapunov_double_point_example3():
    # At a real zero of rho the two branches collide.
    sp = surface_poly(char_determinant(example3(2)))
    z0 = (-1 + math.sqrt(3) / 2) / 2
    a, b = lyapunov_at(sp, z0)
    assert abs(a.value - b.value) < 1e-6
    # z0 carries float error, so the collision only pins the values up to
    # a sqrt(eps)-sized split; realness of each is not decidable here.
    assert abs(a.value.imag) < 1e-6 and abs(b.value.imag) < 1e-6


def test_multipliers_free():
    cd = char_determinant(free_operator(2, 1))
    ((t1, t2),) = multipliers_at(cd, 0)
    assert abs(t1 - (-1)) < 1e-9 and abs(t2 - (-1)) < 1e-9
    ((t1, t2),) = multipliers_at(cd, 3)
    assert abs(t1 * t2 - 1) < 1e-12
    assert abs(t2 - (3.5 + math.sqrt(11.25))) < 1e-9
    ((t1, t2),) = multipliers_at(cd, 1)  # inside the band
    assert abs(abs(t1) - 1) < 1e-12 and abs(abs(t2) - 1) < 1e-12


def test_resonance_poly_exact_families():
    rho, deg = resonance_poly(surface_poly(char_determinant(example3(1))))
    assert (rho, deg) == (zpoly(Fraction(1, 4), 1, 1), False)
    rho, deg = resonance_poly(surface_poly(char_determinant(example4(0))))
    assert (rho, deg) == (zpoly(Fraction(1, 4), -1, 1), False)
    # (2z+1)^2 (4z+9) / 4 for unit off-diagonal constant coefficients
    rho, deg = resonance_poly(surface_poly(char_determinant(example2_const(1))))
    assert (rho, deg) == (zpoly(Fraction(9, 4), 10, 13, 4), False)
    rho, deg = resonance_poly(surface_poly(char_determinant(free_operator(2, 1))))
    assert (rho, deg) == (RatPoly.one("z"), False)


def test_resonance_poly_degenerate_free():
    rho, deg = resonance_poly(surface_poly(char_determinant(free_operator(2, 2))))
    assert deg is True
    assert rho == RatPoly.one("z")
    rs = resonances(surface_poly(char_determinant(free_operator(2, 2))))
    assert rs.values == () and rs.degenerate


def test_resonances_real_pair():
    rs = resonances(surface_poly(char_determinant(example3(2))))
    lo, hi = (-1 - math.sqrt(3) / 2) / 2, (-1 + math.sqrt(3) / 2) / 2
    assert len(rs.values) == 2 and all(rs.real)
    assert abs(rs.values[0] - lo) < 1e-12 and abs(rs.values[1] - hi) < 1e-12
    assert [k for _, k in rs.clusters] == [1, 1]


def test_resonances_complex_pair():
    rs = resonances(surface_poly(char_determinant(example3(Fraction(1, 2)))))
    assert len(rs.values) == 2 and not any(rs.real)
    want = complex(-0.5, math.sqrt(3) / 2)
    assert abs(rs.values[0] - want.conjugate()) < 1e-12
    assert abs(rs.values[1] - want) < 1e-12
    assert rs.values[0] == rs.values[1].conjugate()


def test_resonances_double_point_example4():
    rs = resonances(surface_poly(char_determinant(example4(0))))
    assert rs.clusters == (((0.5 + 0j), 2),)
    assert rs.values == (0.5, 0.5) and all(rs.real)


def test_periodic_antiperiodic_free():
    cd = char_determinant(free_operator(2, 1))
    per = periodic_eigs(cd)
    assert [m for _, m in per] == [1, 1]
    assert abs(per[0][0] + 2) < 1e-12 and abs(per[1][0] - 2) < 1e-12
    assert antiperiodic_eigs(cd) == [(0.0, 2)]


def test_periodic_antiperiodic_example2():
    cd = char_determinant(example2_const(1))
    per = periodic_eigs(cd)
    assert [(round(v, 9), k) for v, k in per] == [(-2.0, 2), (0.0, 1), (4.0, 1)]
    anti = antiperiodic_eigs(cd)
    r2 = math.sqrt(2)
    assert [k for _, k in anti] == [2, 2]
    assert abs(anti[0][0] + r2) < 1e-12 and abs(anti[1][0] - r2) < 1e-12

    # beta = 2 merges the double periodic eigenvalue with a simple one.
    per = periodic_eigs(char_determinant(example2_const(2)))
    assert [(round(v, 9), k) for v, k in per] == [(-2.0, 3), (6.0, 1)]


def test_band_structure_free_single_band():
    bs = band_structure(free_operator(2, 1))
    assert len(bs.segments) == 1
    seg = bs.segments[0]
    assert abs(seg.lo + 2) < 1e-9 and abs(seg.hi - 2) < 1e-9 and seg.multiplicity == 1
    assert len(bs.branch_bands) == 1 and len(bs.branch_bands[0]) == 1
    assert {(e.kind, round(e.value)) for e in bs.edges} == {("periodic", -2), ("periodic", 2)}


def _assert_segments(bs, expected, tol=1e-9):
    assert len(bs.segments) == len(expected)
    for seg, (lo, hi, mult) in zip(bs.segments, expected):
        assert abs(seg.lo - lo) < tol and abs(seg.hi - hi) < tol
        assert seg.multiplicity == mult
    for a, b in zip(bs.segments, bs.segments[1:]):
        assert a.hi <= b.lo + 1e-12


def test_band_structure_example4_t0():
    bs = band_structure(example4(0))
    _assert_segments(bs, [(-2, -1, 1), (-1, 2, 2), (2, 3, 1)])
    bands = sorted(bs.branch_bands, key=lambda bands: bands[0][0])
    assert len(bands[0]) == 1 and len(bands[1]) == 1
    assert abs(bands[0][0][0] + 2) < 1e-9 and abs(bands[0][0][1] - 2) < 1e-9
    assert abs(bands[1][0][0] + 1) < 1e-9 and abs(bands[1][0][1] - 3) < 1e-9


def test_band_structure_example3_t1():
    s5, s17, s21 = math.sqrt(5), math.sqrt(17), math.sqrt(21)
    bs = band_structure(example3(1))
    _assert_segments(
        bs,
        [
            (-(1 + s17) / 2, (1 - s21) / 2, 1),
            ((1 - s21) / 2, -1, 2),
            (-1, (1 - s5) / 2, 1),
            (0, (s17 - 1) / 2, 1),
            ((1 + s5) / 2, (1 + s21) / 2, 1),
        ],
    )
    bands = sorted(bs.branch_bands, key=lambda bands: bands[0][0])
    flat = [e for band in bands[0] for e in band], [e for band in bands[1] for e in band]
    want0 = [-(1 + s17) / 2, -1, 0, (s17 - 1) / 2]
    want1 = [(1 - s21) / 2, (1 - s5) / 2, (1 + s5) / 2, (1 + s21) / 2]
    assert all(abs(a - b) < 1e-9 for a, b in zip(flat[0], want0))
    assert all(abs(a - b) < 1e-9 for a, b in zip(flat[1], want1))


def test_classify_gaps_free_trivial():
    op = free_operator(2, 1)
    cd = char_determinant(op)
    sp = surface_poly(cd)
    assert classify_gaps(band_structure(op), cd, sp) == []


def test_classify_gaps_example3_stable():
    op = example3(1)
    cd = char_determinant(op)
    sp = surface_poly(cd)
    gaps = classify_gaps(band_structure(op), cd, sp)
    s5 = math.sqrt(5)
    true_gaps = [g for g in gaps if g.multiplicity == 0]
    assert len(true_gaps) == 2
    g = true_gaps[0]
    assert abs(g.lo - (1 - s5) / 2) < 1e-9 and abs(g.hi - 0) < 1e-9
    assert g.kind == "stable"
    assert g.lo_kinds == ("antiperiodic",) and g.hi_kinds == ("antiperiodic",)
    assert true_gaps[1].kind == "stable"
    # every multiplicity-1 stretch is also reported for m = 2
    assert len(gaps) == 2 + sum(1 for s in band_structure(op).segments if s.multiplicity == 1)


def test_classify_gaps_example4_resonance_gap():
    op = example4(Fraction(1, 2))
    cd = char_determinant(op)
    sp = surface_poly(cd)
    gaps = classify_gaps(band_structure(op), cd, sp)
    shift = 0.5 / (2 * math.sqrt(1.25))
    res = [g for g in gaps if g.kind == "resonance"]
    assert len(res) == 1
    g = res[0]
    assert g.multiplicity == 0
    assert abs(g.lo - (0.5 - shift)) < 1e-9 and abs(g.hi - (0.5 + shift)) < 1e-9
    assert g.lo_kinds == ("resonance",) and g.hi_kinds == ("resonance",)


def test_branches_monotone_between_candidates():
    for op in (example4(0), example3(1)):
        cd = char_determinant(op)
        sp = surface_poly(cd)
        cands = sorted(
            [v for v, _ in periodic_eigs(cd)]
            + [v for v, _ in antiperiodic_eigs(cd)]
            + [c.real for c, _ in resonances(sp).clusters if abs(c.imag) < 1e-9]
        )
        for left, right in zip(cands, cands[1:]):
            if right - left < 1e-8:
                continue
            xs = np.linspace(left, right, 67)[1:-1]
            rows = [sorted(b.value.real for b in lyapunov_at(sp, x) if b.real) for x in xs]
            if len({len(r) for r in rows}) != 1:
                continue
            for slot in range(len(rows[0])):
                track = [r[slot] for r in rows]
                if max(abs(v) for v in track) >= 1:
                    continue
                diffs = [b - a for a, b in zip(track, track[1:])]
                assert all(d > 0 for d in diffs) or all(d < 0 for d in diffs)


def test_band_edges_are_attained():
    op = example4(0)
    bs = band_structure(op)
    samples = []
    for x in np.linspace(0.0, 2 * math.pi, 257):
        tau = complex(math.cos(x), math.sin(x))
        samples.extend(hermitian_eigs(floquet_matrix(op, tau)))
    for lo, hi, _ in bs.segments:
        inside = [s for s in samples if lo - 1e-9 <= s <= hi + 1e-9]
        width = hi - lo
        assert inside
        assert min(inside) <= lo + 0.05 * width
        assert max(inside) >= hi - 0.05 * width


def test_band_structure_deterministic():
    op = example4(Fraction(1, 2))
    assert band_structure(op) == band_structure(op)


def test_cross_validation_guard():
    op = free_operator(2, 1)
    fake = BandStructure((Segment(-0.5, 0.5, 1),), (), ((-0.5, 0.5),))
    with pytest.raises(InternalConsistencyError):
        _cross_validate(op, fake, 33)


def test_dual_route_tamper_detected(monkeypatch):
    op = free_operator(2, 1)
    real = spectral_mod.trace_powers
    monkeypatch.setattr(spectral_mod, "trace_powers", lambda o, k: [t + 1 for t in real(o, k)])
    with pytest.raises(InternalConsistencyError):
        char_determinant(op)


def test_build_char_determinant_rejects_bad_shapes():
    one = RatPoly.one("z")
    with pytest.raises(InternalConsistencyError):
        build_char_determinant(BiPoly((zpoly(2), zpoly(0, -1), one), outer="tau"), 1, 1)
    with pytest.raises(InternalConsistencyError):
        build_char_determinant(BiPoly((one, zpoly(0, 0, -1), one), outer="tau"), 1, 1)
    with pytest.raises(InternalConsistencyError):
        build_char_determinant(BiPoly((one, RatPoly.zero("z"), one), outer="tau"), 1, 1)


def _status(report, name):
    (row,) = [c for c in report if c.name == name]
    return row.status


def test_verify_identities_statuses():
    report = verify_identities(free_operator(3, 2))
    assert all(c.status != "fail" for c in report)
    assert _status(report, "moment-2-tau=1") == "pass"
    assert _status(report, "norm-sandwich-traceless") == "pass"

    report = verify_identities(example3(1))
    assert all(c.status != "fail" for c in report)
    assert _status(report, "moment-2-tau=1") == "n/a"
    assert _status(report, "moment-2-tau=i") == "pass"
    assert _status(report, "moment-1-coefficient") == "pass"

    report = verify_identities(free_operator(1, 2))
    assert all(c.status != "fail" for c in report)
    assert _status(report, "moment-1-coefficient") == "n/a"

    report = verify_identities(random_operator(11, 3, 2))
    assert all(c.status != "fail" for c in report)


def test_moment_bound_equality_cases():
    for op in (free_operator(2, 1), rotation_operator(3)):
        report = verify_identities(op)
        (row,) = [c for c in report if c.name == "moment-2-lower-bound"]
        assert row.status == "pass"
        assert abs(row.residual) < 1e-9


def test_leading_asymptotics_free():
    op = free_operator(2, 2)
    report = leading_asymptotics(char_determinant(op), op)
    by_name = {c.name: c.status for c in report}
    assert by_name == {
        "q-monic": "pass",
        "xi-m-leading": "pass",
        "xi-degree-bounds": "pass",
        "branch-asymptote": "pass",
        "resonance-asymptote": "n/a",
    }


def test_leading_asymptotics_scalar_and_block_family():
    op = scalar_operator([2], [0])
    report = leading_asymptotics(char_determinant(op), op)
    assert all(c.status == "pass" for c in report)

    op = example3(1)
    report = leading_asymptotics(char_determinant(op), op)
    by_name = {c.name: c.status for c in report}
    assert by_name["branch-asymptote"] == "pass"
    assert by_name["resonance-asymptote"] == "n/a"
