"""Exact arithmetic underneath the spectral pipeline.

Everything in this module is rational: Gaussian rationals, univariate
polynomials with a variable tag, symmetric Laurent polynomials in tau,
and bivariate polynomials (an outer variable over polynomials in z).
Floating point is confined to the numerics module; coefficients here are
ints, Fractions, or CRationals, never floats.
"""

from __future__ import annotations

import math
from fractions import Fraction

Rational = Fraction

_HASH_IM = 1000003


def _is_real_scalar(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class CRational:
    """Gaussian rational re + im*i with exact Fraction parts.

    Supports mixed arithmetic with int and Fraction; equal-to-Fraction
    values hash consistently with the Fraction they equal.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("CRational is immutable")

    @staticmethod
    def _coerce(x):
        if isinstance(x, CRational):
            return x
        if _is_real_scalar(x):
            return CRational(x, 0)
        return None

    def demote(self):
        """Return the plain Fraction when the imaginary part vanishes."""
        return self.re if self.im == 0 else self

    def conjugate(self):
        return CRational(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def inverse(self):
        d = self.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero CRational")
        return CRational(self.re / d, -self.im / d)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CRational(self.re * o.re - self.im * o.im,
                         self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = CRational(1, 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __neg__(self):
        return CRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash(self.re) + _HASH_IM * hash(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"CRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = CRational(0, 1)


def _norm_coeff(c):
    if isinstance(c, bool):
        raise TypeError("bool is not a polynomial coefficient")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, Fraction):
        return c
    if isinstance(c, CRational):
        return c.demote()
    raise TypeError(f"exact coefficients only (int, Fraction, CRational), got {type(c).__name__}")


def as_complex(x):
    """Exact scalar -> python complex (boundary to the numerics module)."""
    if isinstance(x, CRational):
        return complex(x)
    return complex(Fraction(x))


class RatPoly:
    """Univariate polynomial with exact coefficients and a variable tag.

    coeffs are stored ascending (index = monomial degree) with no trailing
    zeros; the zero polynomial has an empty tuple and degree -inf.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs=(), var="z"):
        cs = [_norm_coeff(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, name, value):
        raise AttributeError("RatPoly is immutable")

    @classmethod
    def zero(cls, var="z"):
        return cls((), var)

    @classmethod
    def one(cls, var="z"):
        return cls((1,), var)

    @classmethod
    def const(cls, c, var="z"):
        return cls((c,), var)

    @classmethod
    def x(cls, var="z"):
        return cls((0, 1), var)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return len(self.coeffs) <= 1

    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def _join_var(self, other):
        if self.var == other.var or other.is_constant():
            return self.var
        if self.is_constant():
            return other.var
        raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def _lift(self, other):
        if isinstance(other, RatPoly):
            return other
        try:
            c = _norm_coeff(other)
        except TypeError:
            return None
        return RatPoly((c,), self.var)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        var = self._join_var(o)
        n = max(len(self.coeffs), len(o.coeffs))
        return RatPoly([self.coeff(k) + o.coeff(k) for k in range(n)], var)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __neg__(self):
        return RatPoly([-c for c in self.coeffs], self.var)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        var = self._join_var(o)
        if not self.coeffs or not o.coeffs:
            return RatPoly.zero(var)
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return RatPoly(out, var)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        c = _norm_coeff(scalar)
        if not c:
            raise ZeroDivisionError("division of polynomial by zero scalar")
        return RatPoly([a / c for a in self.coeffs], self.var)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("nonnegative integer exponent required")
        out = RatPoly.one(self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __divmod__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        var = self._join_var(o)
        rem = list(self.coeffs)
        dq = len(rem) - len(o.coeffs)
        if dq < 0:
            return RatPoly.zero(var), self
        quot = [Fraction(0)] * (dq + 1)
        dlc = o.lc()
        for k in range(dq, -1, -1):
            top = rem[k + len(o.coeffs) - 1]
            if top:
                f = top / dlc
                quot[k] = f
                for j, b in enumerate(o.coeffs):
                    rem[k + j] = rem[k + j] - f * b
        return RatPoly(quot, var), RatPoly(rem, var)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def derivative(self):
        return RatPoly([k * c for k, c in enumerate(self.coeffs) if k > 0], self.var)

    def monic(self):
        if self.is_zero():
            raise ValueError("zero polynomial cannot be made monic")
        return self / self.lc()

    def shift(self, k):
        """Multiply by var**k."""
        if self.is_zero():
            return self
        return RatPoly((Fraction(0),) * k + self.coeffs, self.var)

    def __call__(self, x):
        if isinstance(x, RatPoly):
            acc = RatPoly.zero(x.var)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if isinstance(x, (float, complex)):
            acc = 0j
            for c in reversed(self.coeffs):
                acc = acc * x + as_complex(c)
            return acc
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if isinstance(acc, CRational):
            acc = acc.demote()
        return acc

    def complex_coeffs(self):
        return [as_complex(c) for c in self.coeffs]

    def map_coeffs(self, f):
        return RatPoly([f(c) for c in self.coeffs], self.var)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.coeffs != o.coeffs:
            return False
        return self.is_constant() or o.is_constant() or self.var == o.var

    def __hash__(self):
        return hash((self.coeffs, self.var if len(self.coeffs) > 1 else None))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"RatPoly({list(self.coeffs)!r}, var={self.var!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            if k == 0:
                mono = ""
            elif k == 1:
                mono = self.var
            else:
                mono = f"{self.var}^{k}"
            if isinstance(c, CRational):
                cs = f"({c})"
            elif c == 1 and mono:
                cs = ""
            elif c == -1 and mono:
                cs = "-"
            else:
                cs = str(c)
            term = cs + ("*" if cs not in ("", "-") and mono else "") + mono
            if parts and not term.startswith("-"):
                parts.append("+ " + term)
            elif parts:
                parts.append("- " + term[1:])
            else:
                parts.append(term)
        return " ".join(parts)


def poly_from_roots(roots, var="z"):
    out = RatPoly.one(var)
    x = RatPoly.x(var)
    for r in roots:
        out = out * (x - r)
    return out


def gcd(f: RatPoly, g: RatPoly) -> RatPoly:
    """Monic gcd of univariate polynomials via the Euclidean algorithm."""
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(f: RatPoly) -> RatPoly:
    """f with repeated roots collapsed: f / gcd(f, f'), made monic."""
    if f.is_zero():
        raise ValueError("squarefree part of zero polynomial")
    if f.degree < 1:
        return RatPoly.one(f.var)
    g = gcd(f, f.derivative())
    return f.exact_div(g).monic()


def squarefree_decomposition(f: RatPoly) -> list[tuple[RatPoly, int]]:
    """Yun's algorithm: monic, pairwise coprime g_k with f = lc(f) * prod g_k^k.

    Returns [(g_k, k)] for the factors of degree >= 1, ascending in k.  Root
    multiplicities come out exactly, so callers never have to guess them from
    clustered float approximations.
    """
    if f.is_zero():
        raise ValueError("squarefree decomposition of zero polynomial")
    f = f.monic()
    out: list[tuple[RatPoly, int]] = []
    if f.degree < 1:
        return out
    df = f.derivative()
    a = gcd(f, df)
    b = f.exact_div(a)
    d = df.exact_div(a) - b.derivative()
    k = 1
    while b.degree > 0:
        g = gcd(b, d)
        if g.degree > 0:
            out.append((g, k))
        b = b.exact_div(g)
        d = d.exact_div(g) - b.derivative()
        k += 1
    return out


_cheb_cache = [RatPoly((1,), "nu"), RatPoly((0, 1), "nu")]


def chebyshev(n: int) -> RatPoly:
    """Chebyshev polynomial T_n in the variable nu, T_n((t+1/t)/2) = (t^n+t^-n)/2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    two_nu = RatPoly((0, 2), "nu")
    while len(_cheb_cache) <= n:
        _cheb_cache.append(two_nu * _cheb_cache[-1] - _cheb_cache[-2])
    return _cheb_cache[n]


class LaurentSym:
    """Symmetric Laurent polynomial in tau with RatPoly-in-z coefficients.

    coeffs maps exponent k to the polynomial multiplying tau^k; construction
    rejects inputs where the k and -k coefficients differ.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        clean = {}
        for k, v in coeffs.items():
            if not isinstance(v, RatPoly):
                v = RatPoly((v,), "z")
            if not v.is_zero():
                clean[int(k)] = v
        for k, v in clean.items():
            if clean.get(-k, RatPoly.zero(v.var)) != v:
                raise ValueError("not palindromic")
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentSym is immutable")

    def coeff(self, k):
        got = self.coeffs.get(k)
        if got is not None:
            return got
        var = next((v.var for v in self.coeffs.values()), "z")
        return RatPoly.zero(var)

    def max_exp(self):
        return max((abs(k) for k in self.coeffs), default=0)

    def scale(self, s):
        return LaurentSym({k: v * s for k, v in self.coeffs.items()})

    def eval_tau(self, tau0):
        """Exact evaluation at a nonzero rational or Gaussian-rational tau."""
        if isinstance(tau0, CRational):
            t = tau0
        else:
            t = Fraction(tau0)
        if not t:
            raise ZeroDivisionError("tau = 0 is outside the Laurent domain")
        out = None
        for k, v in self.coeffs.items():
            tk = t ** k if isinstance(t, CRational) else (t ** k if k >= 0 else Fraction(1) / t ** (-k))
            term = v * tk
            out = term if out is None else out + term
        if out is None:
            return RatPoly.zero("z")
        return out

    def eval_tau_complex(self, tau0: complex):
        """Float evaluation at complex tau; returns ascending complex z-coefficients."""
        if tau0 == 0:
            raise ZeroDivisionError("tau = 0 is outside the Laurent domain")
        n = max((p.degree for p in self.coeffs.values() if not p.is_zero()), default=0)
        n = int(n) if n != -math.inf else 0
        out = [0j] * (n + 1)
        for k, v in self.coeffs.items():
            tk = tau0 ** k
            for j, c in enumerate(v.coeffs):
                out[j] += as_complex(c) * tk
        return out

    def z_coefficient(self, n):
        """The z^n coefficient as a scalar symmetric Laurent polynomial (dict k -> scalar)."""
        out = {}
        for k, v in self.coeffs.items():
            c = v.coeff(n)
            if c:
                out[k] = c
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentSym):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        items = ", ".join(f"{k}: {v}" for k, v in sorted(self.coeffs.items()))
        return f"LaurentSym({{{items}}})"


class BiPoly:
    """Polynomial in an outer variable whose coefficients are RatPoly in z.

    Index in coeffs = power of the outer variable. Houses D(z, tau) (outer
    tau) and Phi(z, nu) (outer nu).
    """

    __slots__ = ("coeffs", "outer")

    def __init__(self, coeffs=(), outer="tau"):
        inner_var = "z"
        for c in coeffs:
            if isinstance(c, RatPoly) and not c.is_constant():
                inner_var = c.var
                break
        cs = [c if isinstance(c, RatPoly) else RatPoly((c,), inner_var) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "outer", outer)

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @classmethod
    def zero(cls, outer="tau"):
        return cls((), outer)

    @classmethod
    def one(cls, outer="tau"):
        return cls((RatPoly.one("z"),), outer)

    @classmethod
    def outer_var(cls, outer="tau"):
        return cls((RatPoly.zero("z"), RatPoly.one("z")), outer)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self):
        return not self.coeffs

    def coeff(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else RatPoly.zero(self._inner_var())

    def _inner_var(self):
        for c in self.coeffs:
            if not c.is_constant():
                return c.var
        return "z"

    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _check(self, other):
        if self.outer != other.outer:
            raise ValueError(f"outer variable mismatch: {self.outer} vs {other.outer}")

    def _lift(self, other):
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, RatPoly):
            if other.var == self.outer and not other.is_constant():
                inner = self._inner_var()
                return BiPoly([RatPoly((c,), inner) for c in other.coeffs], self.outer)
            return BiPoly((other,), self.outer)
        try:
            c = _norm_coeff(other)
        except TypeError:
            return None
        return BiPoly((RatPoly((c,), self._inner_var()),), self.outer)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        self._check(o)
        n = max(len(self.coeffs), len(o.coeffs))
        return BiPoly([self.coeff(k) + o.coeff(k) for k in range(n)], self.outer)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __neg__(self):
        return BiPoly([-c for c in self.coeffs], self.outer)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        self._check(o)
        if not self.coeffs or not o.coeffs:
            return BiPoly.zero(self.outer)
        zero = RatPoly.zero(self._inner_var())
        out = [zero] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coeffs):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b
        return BiPoly(out, self.outer)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("nonnegative integer exponent required")
        out = BiPoly.one(self.outer)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def derivative_outer(self):
        return BiPoly([k * c for k, c in enumerate(self.coeffs) if k > 0], self.outer)

    def eval_outer(self, x):
        """Evaluate the outer variable at an exact scalar; RatPoly in z remains."""
        acc = RatPoly.zero(self._inner_var())
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_inner(self, z0):
        """Evaluate z at an exact scalar; RatPoly in the outer variable remains."""
        return RatPoly([c(z0) for c in self.coeffs], self.outer)

    def subs_outer(self, g: RatPoly):
        """Substitute a z-polynomial for the outer variable."""
        acc = RatPoly.zero(g.var)
        for c in reversed(self.coeffs):
            if c.is_constant():
                cc = c.coeff(0)
            else:
                cc = c
            acc = acc * g + cc
        return acc

    def content(self) -> RatPoly:
        nz = [c for c in self.coeffs if not c.is_zero()]
        if not nz:
            return RatPoly.zero(self._inner_var())
        g = nz[0]
        for c in nz[1:]:
            g = gcd(g, c)
            if g.degree == 0:
                break
        return g.monic()

    def primitive(self):
        c = self.content()
        if c.is_zero():
            return self
        return BiPoly([p.exact_div(c) for p in self.coeffs], self.outer)

    def exact_div(self, other):
        """Exact division where the divisor's leading coefficient is a nonzero constant."""
        o = self._lift(other)
        self._check(o)
        if o.is_zero():
            raise ZeroDivisionError("division by zero BiPoly")
        if not o.lc().is_constant():
            raise ValueError("exact BiPoly division requires a constant leading coefficient")
        dlc = o.lc().coeff(0)
        rem = list(self.coeffs)
        dq = len(rem) - len(o.coeffs)
        if dq < 0:
            if self.is_zero():
                return self
            raise ValueError("division is not exact")
        quot = [RatPoly.zero(self._inner_var())] * (dq + 1)
        for k in range(dq, -1, -1):
            top = rem[k + len(o.coeffs) - 1]
            if not top.is_zero():
                f = top / dlc
                quot[k] = f
                for j, b in enumerate(o.coeffs):
                    rem[k + j] = rem[k + j] - f * b
        if any(not r.is_zero() for r in rem):
            raise ValueError("division is not exact")
        return BiPoly(quot, self.outer)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs and (self.outer == o.outer or len(self.coeffs) <= 1)

    def __hash__(self):
        return hash((self.coeffs, self.outer if len(self.coeffs) > 1 else None))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        terms = ", ".join(f"{self.outer}^{k}: ({c})" for k, c in enumerate(self.coeffs))
        return f"BiPoly[{terms}]"


def bipoly_eval_tau(D: BiPoly, tau0):
    """Partial evaluation of the outer (tau) variable; exact."""
    return D.eval_outer(tau0)


def bipoly_eval_z(D: BiPoly, z0):
    """Partial evaluation of the inner (z) variable; exact."""
    return D.eval_inner(z0)


def laurent_from_bipoly(D: BiPoly, m: int) -> LaurentSym:
    """D(z,tau) / tau^m as a symmetric Laurent polynomial; validates the palindrome."""
    if D.degree != 2 * m:
        raise ValueError(f"expected outer degree {2*m}, got {D.degree}")
    return LaurentSym({k - m: D.coeff(k) for k in range(2 * m + 1)})


def laurent_to_bipoly(L: LaurentSym, m: int, outer="tau") -> BiPoly:
    """L * tau^m as an ordinary polynomial in tau (requires exponents >= -m)."""
    if L.max_exp() > m:
        raise ValueError("Laurent exponent exceeds the shift")
    coeffs = [L.coeff(k - m) for k in range(2 * m + 1)]
    return BiPoly(coeffs, outer)


def palindrome_to_nu(L: LaurentSym) -> BiPoly:
    """Rewrite a symmetric Laurent polynomial via tau^k + tau^-k = 2*T_k(nu).

    The result P satisfies P(z, (tau+1/tau)/2) = L(z, tau) identically.
    """
    out = BiPoly((L.coeff(0),), outer="nu")
    for k in sorted(L.coeffs):
        if k <= 0:
            continue
        cheb = chebyshev(k)
        term = BiPoly([2 * c * L.coeff(k) for c in cheb.coeffs], outer="nu")
        out = out + term
    return out


def det_ring(mat, zero, one):
    """Division-free determinant over any commutative ring (expansion with
    memoization on column subsets; fine for the small matrices used here)."""
    n = len(mat)
    if n == 0:
        return one
    states = {0: one}
    for i in range(n):
        nxt = {}
        for mask, val in states.items():
            pos = 0
            for j in range(n):
                bit = 1 << j
                if mask & bit:
                    pos += 1
                    continue
                entry = mat[i][j]
                if not entry:
                    continue
                term = val * entry
                if (i + pos) & 1:
                    term = -term
                key = mask | bit
                if key in nxt:
                    nxt[key] = nxt[key] + term
                else:
                    nxt[key] = term
        states = nxt
    return states.get((1 << n) - 1, zero)


def det_field(mat):
    """Exact determinant over a field (Fraction / CRational entries)."""
    n = len(mat)
    a = [list(row) for row in mat]
    sign = 1
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        pval = a[col][col]
        det = det * pval
        inv = 1 / pval if not isinstance(pval, CRational) else pval.inverse()
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if not f:
                continue
            for c in range(col, n):
                a[r][c] = a[r][c] - f * a[col][c]
    det = sign * det
    return det.demote() if isinstance(det, CRational) else det


def mat_identity(n, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_transpose(A):
    return [list(col) for col in zip(*A)]


def mat_inv(mat):
    """Exact inverse over a field; raises ZeroDivisionError when singular."""
    n = len(mat)
    a = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        pval = a[col][col]
        inv = 1 / pval if not isinstance(pval, CRational) else pval.inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if not f:
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _sylvester(fc, gc, n, s, zero):
    """Sylvester matrix rows from descending coefficient lists fc (deg n) and gc (deg s)."""
    size = n + s
    rows = []
    for i in range(s):
        row = [zero] * size
        for j, c in enumerate(fc):
            row[i + j] = c
        rows.append(row)
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(gc):
            row[i + j] = c
        rows.append(row)
    return rows


def resultant(f, g):
    """Resultant via the Sylvester determinant.

    RatPoly inputs give a scalar; BiPoly inputs (same outer variable) give a
    RatPoly in z. Sign convention follows the row layout: the f block on top.
    """
    if isinstance(f, BiPoly) and isinstance(g, BiPoly):
        f._check(g)
        if f.is_zero() or g.is_zero():
            raise ValueError("resultant of the zero polynomial")
        n, s = int(f.degree), int(g.degree)
        var = f._inner_var()
        zero, one = RatPoly.zero(var), RatPoly.one(var)
        if n == 0:
            return f.coeff(0) ** s
        if s == 0:
            return g.coeff(0) ** n
        fc = [f.coeff(n - k) for k in range(n + 1)]
        gc = [g.coeff(s - k) for k in range(s + 1)]
        return det_ring(_sylvester(fc, gc, n, s, zero), zero, one)
    if isinstance(f, RatPoly) and isinstance(g, RatPoly):
        if f.is_zero() or g.is_zero():
            raise ValueError("resultant of the zero polynomial")
        n, s = int(f.degree), int(g.degree)
        if n == 0:
            return f.coeff(0) ** s
        if s == 0:
            return g.coeff(0) ** n
        fc = [f.coeff(n - k) for k in range(n + 1)]
        gc = [g.coeff(s - k) for k in range(s + 1)]
        return det_field(_sylvester(fc, gc, n, s, Fraction(0)))
    raise TypeError("resultant expects two RatPoly or two BiPoly")


def discriminant(f):
    """(-1)^(n(n-1)/2) * R(f, f') / lc(f); product of squared root differences."""
    if isinstance(f, BiPoly):
        n = f.degree
        if not isinstance(n, int) or n < 1:
            raise ValueError("discriminant requires degree >= 1")
        r = resultant(f, f.derivative_outer())
        if (n * (n - 1) // 2) % 2:
            r = -r
        return r.exact_div(f.lc()) if not f.lc().is_constant() else r / f.lc().coeff(0)
    if isinstance(f, RatPoly):
        n = f.degree
        if not isinstance(n, int) or n < 1:
            raise ValueError("discriminant requires degree >= 1")
        r = resultant(f, f.derivative())
        if (n * (n - 1) // 2) % 2:
            r = -r
        return r / f.lc()
    raise TypeError("discriminant expects RatPoly or BiPoly")


def _bipoly_pseudo_rem(f: BiPoly, g: BiPoly) -> BiPoly:
    """Pseudo-remainder of f by g in the outer variable (f, g nonzero, deg f >= deg g)."""
    rem = f
    glc = g.lc()
    dg = int(g.degree)
    while not rem.is_zero() and int(rem.degree) >= dg:
        dr = int(rem.degree)
        lead = rem.lc()
        shifted = BiPoly((RatPoly.zero(g._inner_var()),) * (dr - dg) + tuple(g.coeffs), g.outer)
        rem = rem * glc - shifted * lead
        if not rem.is_zero() and int(rem.degree) >= dr:
            raise AssertionError("pseudo-division failed to reduce the degree")
    return rem


def bipoly_gcd(f: BiPoly, g: BiPoly) -> BiPoly:
    """Gcd in the outer variable via the primitive polynomial remainder sequence.

    Normalized so the leading RatPoly coefficient is monic. Intended for the
    deflation of monic surface polynomials (content handling included for
    general inputs).
    """
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if f.is_zero():
        return _bipoly_normalize(g)
    if g.is_zero():
        return _bipoly_normalize(f)
    f._check(g)
    cont = gcd(f.content(), g.content())
    a, b = f.primitive(), g.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        if b.degree == 0:
            a, b = b, BiPoly.zero(a.outer)
            continue
        a, b = b, _bipoly_pseudo_rem(a, b).primitive()
    if a.degree == 0:
        out = BiPoly((cont,), f.outer)
    else:
        out = a * cont
    return _bipoly_normalize(out)


def _bipoly_normalize(f: BiPoly) -> BiPoly:
    if f.is_zero():
        return f
    return BiPoly([c / f.lc().lc() for c in f.coeffs], f.outer)


def bipoly_squarefree_part(f: BiPoly) -> BiPoly:
    """f / gcd(f, df/d-outer), for f with constant leading coefficient."""
    if f.is_zero():
        raise ValueError("squarefree part of zero polynomial")
    if not isinstance(f.degree, int) or f.degree < 1:
        return BiPoly.one(f.outer)
    g = bipoly_gcd(f, f.derivative_outer())
    if not g.lc().is_constant():
        raise ValueError("deflation expects a gcd with constant leading coefficient")
    return _bipoly_normalize(f.exact_div(g))
