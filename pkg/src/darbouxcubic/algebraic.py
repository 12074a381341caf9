"""Exact real algebraic numbers and sign determination.

Everything downstream of equilibrium finding needs to answer one question
exactly: what is the sign of a polynomial expression evaluated at a point
whose coordinates are real algebraic numbers? This module provides that,
in three layers:

    1. a univariate toolkit over ``tuple[Fraction, ...]`` (low-to-high
       coefficients): division, gcd, Sturm chains, root counting, and
       certified isolation of real roots;
    2. :class:`RealAlgebraic` numbers (squarefree defining polynomial plus
       a certified isolating interval) with exact comparisons, and
       :class:`AlgebraicField` arithmetic in Q[t]/(m). The modulus is kept
       squarefree but is not factored into irreducibles up front; if an
       inversion or zero test meets a zero divisor, the modulus is split on
       the spot and restricted to the factor that vanishes at the tracked
       root (all previously reduced values stay correct, since reduction
       modulo a multiple of the new modulus preserves values at its roots);
    3. :class:`FieldPoly` univariate polynomials over such a field, with
       Sturm counting, and :class:`TowerContext` for points whose first
       coordinate is only known as the root of a polynomial over the field
       inside a certified interval.

:class:`AlgebraicPoint` packages a planar point in one of three shapes
(both coordinates rational; second coordinate algebraic with the first in
its field; or a field-plus-tower pair) and evaluates bivariate polynomials
at itself, returning either an exact `Fraction` or a :class:`PointValue`
that supports ring operations, exact sign queries, and certified floats.

The defining polynomial of a :class:`RealAlgebraic` is squarefree and
primitive but deliberately not guaranteed minimal; every exact decision is
made through interval certification and gcd zero tests, which are correct
for any squarefree annihilating polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, Sequence, Union

from .errors import PositiveDimensional
from .poly import RationalPoly, Scalar, _coerce

UniPoly = tuple[Fraction, ...]

_MAX_REFINE_STEPS = 20000


# -- univariate toolkit -------------------------------------------------------


def unipoly(coeffs: Iterable[Scalar]) -> UniPoly:
    """Normalize low-to-high coefficients: coerce and strip trailing zeros."""
    out = [_coerce(c) for c in coeffs]
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def udegree(p: UniPoly) -> int:
    return len(p) - 1


def uis_zero(p: UniPoly) -> bool:
    return not p


def uleading(p: UniPoly) -> Fraction:
    if not p:
        raise ValueError("zero polynomial has no leading coefficient")
    return p[-1]


def uadd(a: UniPoly, b: UniPoly) -> UniPoly:
    n = max(len(a), len(b))
    return unipoly(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    )


def uneg(a: UniPoly) -> UniPoly:
    return tuple(-c for c in a)


def usub(a: UniPoly, b: UniPoly) -> UniPoly:
    return uadd(a, uneg(b))


def umul(a: UniPoly, b: UniPoly) -> UniPoly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return unipoly(out)


def uscale(a: UniPoly, c: Scalar) -> UniPoly:
    k = _coerce(c)
    if not k:
        return ()
    return tuple(x * k for x in a)


def udivmod(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly]:
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    rem = list(a)
    quo = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    db = len(b) - 1
    while len(rem) >= len(b):
        while rem and not rem[-1]:
            rem.pop()
        if len(rem) < len(b):
            break
        factor = rem[-1] / lead
        shift = len(rem) - 1 - db
        quo[shift] = factor
        for i, c in enumerate(b):
            rem[shift + i] -= factor * c
        rem.pop()
    return unipoly(quo), unipoly(rem)


def umonic(a: UniPoly) -> UniPoly:
    if not a:
        return a
    return uscale(a, 1 / a[-1])


def ugcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over the rationals; gcd(0, 0) = 0."""
    while b:
        a, b = b, udivmod(a, b)[1]
    return umonic(a)


def uext_gcd(a: UniPoly, m: UniPoly) -> tuple[UniPoly, UniPoly, UniPoly]:
    """Extended Euclid: returns (g, s, t) monic g with s*a + t*m = g."""
    r0, r1 = a, m
    s0, s1 = unipoly([1]), ()
    t0, t1 = (), unipoly([1])
    while r1:
        q, r = udivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, usub(s0, umul(q, s1))
        t0, t1 = t1, usub(t0, umul(q, t1))
    if r0:
        lead = r0[-1]
        r0, s0, t0 = umonic(r0), uscale(s0, 1 / lead), uscale(t0, 1 / lead)
    return r0, s0, t0


def uderiv(a: UniPoly) -> UniPoly:
    return unipoly(c * i for i, c in enumerate(a) if i)


def uprimitive(a: UniPoly) -> UniPoly:
    """Coprime integer coefficients, positive leading coefficient."""
    if not a:
        return a
    nums = 0
    dens = 1
    for c in a:
        nums = int_gcd(nums, abs(c.numerator))
        dens = dens * c.denominator // int_gcd(dens, c.denominator)
    scaled = uscale(a, Fraction(dens, nums))
    return uneg(scaled) if scaled[-1] < 0 else scaled


def usquarefree(a: UniPoly) -> UniPoly:
    """Squarefree part (same real roots, multiplicity one), primitive."""
    if udegree(a) <= 0:
        return uprimitive(a)
    g = ugcd(a, uderiv(a))
    return uprimitive(udivmod(a, g)[0])


def ueval(a: UniPoly, x: Scalar) -> Fraction:
    xv = _coerce(x)
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * xv + c
    return acc


def ueval_float(a: UniPoly, x: float) -> float:
    acc = 0.0
    for c in reversed(a):
        acc = acc * x + float(c)
    return acc


def ucompose(a: UniPoly, b: UniPoly) -> UniPoly:
    """a(b(t))."""
    acc: UniPoly = ()
    for c in reversed(a):
        acc = uadd(umul(acc, b), unipoly([c]))
    return acc


def unipoly_str(a: UniPoly, var: str = "t") -> str:
    """Canonical text, highest degree first, matching the bivariate style."""
    if not a:
        return "0"
    chunks = []
    first = True
    for e in range(len(a) - 1, -1, -1):
        c = a[e]
        if not c:
            continue
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        if first:
            chunks.append(f"-{body}" if c < 0 else body)
            first = False
        else:
            chunks.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(chunks)


# -- Sturm machinery ----------------------------------------------------------


def sturm_chain(p: UniPoly) -> list[UniPoly]:
    """Standard Sturm chain of p (works best on squarefree input)."""
    chain = [p, uderiv(p)]
    while chain[-1]:
        rem = udivmod(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append(uneg(rem))
    return [c for c in chain if c]


def sign_variations(chain: Sequence[UniPoly], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = ueval(p, x)
        if v:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: UniPoly, lo: Fraction, hi: Fraction, chain: Sequence[UniPoly] | None = None) -> int:
    """Number of distinct real roots of p in the open interval (lo, hi).

    Endpoints must not be roots of p.
    """
    if ueval(p, lo) == 0 or ueval(p, hi) == 0:
        raise ValueError("count_roots endpoints must not be roots")
    if lo >= hi:
        return 0
    if chain is None:
        chain = sturm_chain(p)
    return sign_variations(chain, lo) - sign_variations(chain, hi)


def cauchy_bound(p: UniPoly) -> Fraction:
    """All real roots of p lie in (-B, B)."""
    if udegree(p) < 1:
        return Fraction(1)
    lead = abs(p[-1])
    return 1 + max(abs(c) for c in p[:-1]) / lead


def _rational_roots(p: UniPoly) -> list[Fraction]:
    """All rational roots of a nonzero polynomial (each once).

    Enumerates divisor candidates of the primitive integer form. Skipped
    (returns []) when the constant or leading integer coefficient exceeds
    the enumeration budget; interval isolation still certifies those roots,
    they are just reported as intervals rather than exact rationals.
    """
    q = uprimitive(p)
    shift = 0
    while q and q[0] == 0:
        q = q[1:]
        shift = 1
    roots = [Fraction(0)] if shift else []
    if udegree(q) < 1:
        return roots
    a0 = abs(int(q[0]))
    an = abs(int(q[-1]))
    if a0 > 10**12 or an > 10**12:
        return roots

    def divisors(n: int) -> list[int]:
        out = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.append(d)
                out.append(n // d)
            d += 1
        return sorted(set(out))

    for num in divisors(a0):
        for den in divisors(an):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if ueval(q, cand) == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)


class RealAlgebraic:
    """A real algebraic number: squarefree primitive defining polynomial
    plus a certified open isolating interval with a sign change.

    The defining polynomial annihilates the number but is not guaranteed
    minimal; all exact decisions go through interval refinement and gcd
    zero tests, which do not require minimality.
    """

    __slots__ = ("poly", "_lo", "_hi", "_chain")

    def __init__(self, poly: Iterable[Scalar], lo: Scalar, hi: Scalar) -> None:
        p = usquarefree(unipoly(poly))
        lo_f, hi_f = _coerce(lo), _coerce(hi)
        if udegree(p) < 1:
            raise ValueError("defining polynomial must be nonconstant")
        if not (lo_f < hi_f):
            raise ValueError("isolating interval is empty")
        if ueval(p, lo_f) == 0 or ueval(p, hi_f) == 0:
            raise ValueError("isolating interval endpoints must not be roots")
        self._chain = sturm_chain(p)
        if count_roots(p, lo_f, hi_f, self._chain) != 1:
            raise ValueError("interval does not isolate exactly one root")
        self.poly = p
        self._lo, self._hi = lo_f, hi_f

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self._lo, self._hi

    def refine(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """Shrink the isolating interval below the given width (bisection)."""
        lo, hi = self._lo, self._hi
        s_lo = 1 if ueval(self.poly, lo) > 0 else -1
        steps = 0
        while hi - lo >= width:
            steps += 1
            if steps > _MAX_REFINE_STEPS:
                raise RuntimeError("interval refinement did not converge")
            mid = (lo + hi) / 2
            v = ueval(self.poly, mid)
            if v == 0:
                # the root is exactly rational; pin a tiny interval around it
                quarter = (hi - lo) / 4
                lo, hi = mid - min(quarter, width / 4), mid + min(quarter, width / 4)
                while ueval(self.poly, lo) == 0:
                    lo = (lo + mid) / 2
                while ueval(self.poly, hi) == 0:
                    hi = (mid + hi) / 2
                break
            if (1 if v > 0 else -1) == s_lo:
                lo = mid
            else:
                hi = mid
        self._lo, self._hi = lo, hi
        return lo, hi

    def exact_rational(self) -> Fraction | None:
        """The exact value if the number is rational, else None."""
        for r in _rational_roots(self.poly):
            if self._lo < r < self._hi:
                return r
        return None

    def sign(self) -> int:
        lo, hi = self._lo, self._hi
        while lo < 0 < hi:
            if ueval(self.poly, Fraction(0)) == 0:
                # 0 is a root of the defining poly inside our interval, and
                # the interval isolates exactly one root, so the number is 0
                return 0
            lo, hi = self.refine((hi - lo) / 4)
        return 1 if lo >= 0 else -1

    def _cmp_rational(self, q: Fraction) -> int:
        if ueval(self.poly, q) == 0 and self._lo < q < self._hi:
            return 0
        lo, hi = self._lo, self._hi
        while lo < q < hi:
            lo, hi = self.refine((hi - lo) / 4)
        if hi <= q:
            return -1
        return 1

    def _cmp(self, other: "RealAlgebraic") -> int:
        common = ugcd(self.poly, other.poly)
        steps = 0
        while True:
            steps += 1
            if steps > _MAX_REFINE_STEPS:
                raise RuntimeError("comparison did not converge")
            lo = max(self._lo, other._lo)
            hi = min(self._hi, other._hi)
            if lo >= hi:
                return -1 if self._hi <= other._lo else 1
            if udegree(common) >= 1:
                safe_lo, safe_hi = lo, hi
                if ueval(common, safe_lo) == 0 or ueval(common, safe_hi) == 0:
                    # endpoint collision: a root of the common factor sits on
                    # the overlap boundary; perturb inward via refinement
                    self.refine((self._hi - self._lo) / 4)
                    other.refine((other._hi - other._lo) / 4)
                    continue
                if count_roots(common, safe_lo, safe_hi) >= 1:
                    # that common root lies in both isolating intervals, and
                    # each interval holds exactly one root of its own poly,
                    # so both numbers equal the common root
                    return 0
            self.refine((self._hi - self._lo) / 4)
            other.refine((other._hi - other._lo) / 4)

    def compare(self, other: "RealAlgebraic | Scalar") -> int:
        if isinstance(other, RealAlgebraic):
            return self._cmp(other)
        return self._cmp_rational(_coerce(other))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (RealAlgebraic, int, Fraction)):
            return self.compare(other) == 0
        return NotImplemented

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    __hash__ = None  # type: ignore[assignment]  # equality crosses representations

    def to_float(self, eps: float = 1e-15) -> float:
        width = Fraction(eps).limit_denominator(10**18) or Fraction(1, 10**15)
        lo, hi = self.refine(abs(width))
        return float((lo + hi) / 2)

    def __float__(self) -> float:
        return self.to_float(1e-17)

    def describe(self) -> dict:
        lo, hi = self._lo, self._hi
        return {
            "defining_poly": unipoly_str(self.poly),
            "interval": [str(lo), str(hi)],
            "approx": self.to_float(1e-12),
        }

    def __repr__(self) -> str:
        return f"RealAlgebraic({unipoly_str(self.poly)} = 0, ~{self.to_float(1e-9):.9g})"


def isolate_real_roots(p: Iterable[Scalar]) -> list[Union[Fraction, RealAlgebraic]]:
    """All distinct real roots of p, sorted ascending.

    Rational roots are returned as exact Fractions (when the divisor
    enumeration budget allows); the rest as certified RealAlgebraic numbers.

    Raises:
        PositiveDimensional: p is identically zero (every value is a root).
    """
    q = usquarefree(unipoly(p))
    if uis_zero(q):
        raise PositiveDimensional("the zero polynomial vanishes identically")
    if udegree(q) == 0:
        return []
    rational = _rational_roots(q)
    for r in rational:
        q = udivmod(q, unipoly([-r, 1]))[0]
    roots: list[Union[Fraction, RealAlgebraic]] = list(rational)
    if udegree(q) >= 1:
        chain = sturm_chain(q)
        bound = cauchy_bound(q)
        lo, hi = -bound - 1, bound + 1
        while ueval(q, lo) == 0:
            lo -= 1
        while ueval(q, hi) == 0:
            hi += 1
        stack = [(lo, hi)]
        while stack:
            a, b = stack.pop()
            n = count_roots(q, a, b, chain)
            if n == 0:
                continue
            if n == 1:
                roots.append(RealAlgebraic(q, a, b))
                continue
            mid = (a + b) / 2
            while ueval(q, mid) == 0:
                mid = (a + mid) / 2
            stack.append((a, mid))
            stack.append((mid, b))
    roots.sort(key=lambda r: r if isinstance(r, Fraction) else r.to_float(1e-18))
    # float sort keys are fine only when approximations are finer than the
    # separation; verify order exactly and fall back to pairwise comparison
    for a, b in zip(roots, roots[1:]):
        av = a if isinstance(a, Fraction) else None
        if isinstance(a, RealAlgebraic):
            ok = a.compare(b) < 0
        elif isinstance(b, RealAlgebraic):
            ok = b.compare(av) > 0
        else:
            ok = av < b
        if not ok:
            raise RuntimeError("root ordering certification failed")
    return roots


# -- interval arithmetic helpers ----------------------------------------------

Interval = tuple[Fraction, Fraction]


def _iv_add(a: Interval, b: Interval) -> Interval:
    return (a[0] + b[0], a[1] + b[1])


def _iv_mul(a: Interval, b: Interval) -> Interval:
    c = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(c), max(c))


def _iv_const(c: Fraction) -> Interval:
    return (c, c)


def _iv_eval(p: UniPoly, box: Interval) -> Interval:
    acc = _iv_const(Fraction(0))
    for c in reversed(p):
        acc = _iv_add(_iv_mul(acc, box), _iv_const(c))
    return acc


def _iv_sign(iv: Interval) -> int | None:
    if iv[0] > 0:
        return 1
    if iv[1] < 0:
        return -1
    if iv[0] == iv[1] == 0:
        return 0
    return None


# -- arithmetic in Q[t]/(m) with on-demand splitting ----------------------------


class AlgebraicField:
    """Q[t]/(m) tracking one real root beta of m in a certified interval.

    The modulus is squarefree. It is split lazily: when a zero divisor
    shows up in an inversion or a zero test, the modulus is replaced by its
    factor that vanishes at beta. Elements are plain UniPoly values reduced
    modulo the current modulus; earlier reductions remain valid because the
    new modulus divides the old one.
    """

    __slots__ = ("modulus", "_lo", "_hi")

    def __init__(self, modulus: Iterable[Scalar], lo: Scalar, hi: Scalar) -> None:
        m = usquarefree(unipoly(modulus))
        lo_f, hi_f = _coerce(lo), _coerce(hi)
        if udegree(m) < 1:
            raise ValueError("modulus must be nonconstant")
        if ueval(m, lo_f) == 0 or ueval(m, hi_f) == 0:
            raise ValueError("interval endpoints must not be roots of the modulus")
        if count_roots(m, lo_f, hi_f) != 1:
            raise ValueError("interval must isolate exactly one root of the modulus")
        self.modulus = m
        self._lo, self._hi = lo_f, hi_f

    @classmethod
    def from_real(cls, number: RealAlgebraic) -> "AlgebraicField":
        lo, hi = number.interval
        return cls(number.poly, lo, hi)

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self._lo, self._hi

    def beta_number(self) -> RealAlgebraic:
        return RealAlgebraic(self.modulus, self._lo, self._hi)

    def constant(self, c: Scalar) -> UniPoly:
        return unipoly([c])

    def generator(self) -> UniPoly:
        return self.reduce(unipoly([0, 1]))

    def reduce(self, f: Iterable[Scalar]) -> UniPoly:
        return udivmod(unipoly(f), self.modulus)[1]

    def add(self, a: UniPoly, b: UniPoly) -> UniPoly:
        return self.reduce(uadd(a, b))

    def sub(self, a: UniPoly, b: UniPoly) -> UniPoly:
        return self.reduce(usub(a, b))

    def mul(self, a: UniPoly, b: UniPoly) -> UniPoly:
        return self.reduce(umul(a, b))

    def refine(self, width: Fraction) -> tuple[Fraction, Fraction]:
        lo, hi = self._lo, self._hi
        s_lo = 1 if ueval(self.modulus, lo) > 0 else -1
        steps = 0
        while hi - lo >= width:
            steps += 1
            if steps > _MAX_REFINE_STEPS:
                raise RuntimeError("field interval refinement did not converge")
            mid = (lo + hi) / 2
            v = ueval(self.modulus, mid)
            if v == 0:
                # beta is exactly the rational midpoint; shrink around it
                delta = min((hi - lo) / 8, width / 8)
                lo, hi = mid - delta, mid + delta
                while ueval(self.modulus, lo) == 0:
                    lo = (lo + mid) / 2
                while ueval(self.modulus, hi) == 0:
                    hi = (mid + hi) / 2
                break
            if (1 if v > 0 else -1) == s_lo:
                lo = mid
            else:
                hi = mid
        self._lo, self._hi = lo, hi
        return lo, hi

    def _restrict_to_factor_at_root(self, g: UniPoly) -> None:
        """Replace the modulus by g or modulus/g, whichever vanishes at beta."""
        h = udivmod(self.modulus, g)[0]
        for cand in (g, h):
            lo, hi = self._lo, self._hi
            if ueval(cand, lo) == 0 or ueval(cand, hi) == 0:
                continue
            if udegree(cand) >= 1 and count_roots(cand, lo, hi) == 1:
                self.modulus = uprimitive(cand)
                return
        # an endpoint of the interval is a root of a factor: nudge inward
        self.refine((self._hi - self._lo) / 8)
        for cand in (g, h):
            lo, hi = self._lo, self._hi
            if udegree(cand) >= 1 and ueval(cand, lo) != 0 and ueval(cand, hi) != 0 and count_roots(cand, lo, hi) == 1:
                self.modulus = uprimitive(cand)
                return
        raise RuntimeError("modulus splitting failed to locate the tracked root")

    def is_zero(self, f: UniPoly) -> bool:
        return self.sign_of(f) == 0

    def sign_of(self, f: Iterable[Scalar]) -> int:
        """Exact sign of f(beta)."""
        r = self.reduce(f)
        if uis_zero(r):
            return 0
        g = ugcd(r, self.modulus)
        if udegree(g) >= 1:
            lo, hi = self._lo, self._hi
            while ueval(g, lo) == 0 or ueval(g, hi) == 0:
                lo, hi = self.refine((hi - lo) / 8)
            if count_roots(g, lo, hi) == 1:
                # beta is a common root, so f(beta) = 0; shrink the modulus
                self._restrict_to_factor_at_root(g)
                return 0
        steps = 0
        while True:
            steps += 1
            if steps > _MAX_REFINE_STEPS:
                raise RuntimeError("sign determination did not converge")
            s = _iv_sign(_iv_eval(r, (self._lo, self._hi)))
            if s is not None:
                return s
            self.refine((self._hi - self._lo) / 4)

    def inv(self, f: Iterable[Scalar]) -> UniPoly:
        """Multiplicative inverse of f(beta) in the field.

        Raises:
            ZeroDivisionError: f vanishes at beta.
        """
        steps = 0
        while True:
            steps += 1
            if steps > 200:
                raise RuntimeError("inversion splitting did not terminate")
            r = self.reduce(f)
            if uis_zero(r):
                raise ZeroDivisionError("inverting an element that vanishes at the root")
            g, s, _ = uext_gcd(r, self.modulus)
            if udegree(g) == 0:
                return self.reduce(s)
            # zero divisor met: the modulus factors as g * (modulus/g), and
            # beta is a root of exactly one factor. g divides r, so if g
            # vanishes at beta the element itself does (sign_of also shrinks
            # the modulus to g in that case before we raise).
            if self.sign_of(g) == 0:
                raise ZeroDivisionError("inverting an element that vanishes at the root")
            # beta lives in the cofactor: restrict the modulus and retry.
            # The degree strictly decreases, so this terminates.
            self._restrict_to_factor_at_root(g)

    def element_float(self, f: UniPoly, eps: float = 1e-15) -> float:
        r = self.reduce(f)
        steps = 0
        while True:
            steps += 1
            if steps > 80:
                break
            iv = _iv_eval(r, (self._lo, self._hi))
            mid = (iv[0] + iv[1]) / 2
            if iv[1] - iv[0] < Fraction(eps).limit_denominator(10**20) * max(1, abs(mid)):
                return float(mid)
            self.refine((self._hi - self._lo) / 16)
        iv = _iv_eval(r, (self._lo, self._hi))
        return float((iv[0] + iv[1]) / 2)

    def element_rational(self, f: UniPoly) -> Fraction | None:
        """Exact rational value of f(beta) when visible syntactically.

        A constant after reduction is certainly rational. Nonconstant
        residues may still be rational for reducible moduli; those are not
        detected here and return None.
        """
        r = self.reduce(f)
        if uis_zero(r):
            return Fraction(0)
        if udegree(r) == 0:
            return r[0]
        return None

    def eval_bivariate(self, poly: RationalPoly, x_elem: UniPoly, y_elem: UniPoly) -> UniPoly:
        """Value of poly(x_elem(beta), y_elem(beta)) as a field element."""
        result: UniPoly = ()
        pow_x: list[UniPoly] = [self.constant(1)]
        pow_y: list[UniPoly] = [self.constant(1)]
        for (i, j), c in poly.terms.items():
            while len(pow_x) <= i:
                pow_x.append(self.mul(pow_x[-1], x_elem))
            while len(pow_y) <= j:
                pow_y.append(self.mul(pow_y[-1], y_elem))
            result = self.add(result, uscale(self.mul(pow_x[i], pow_y[j]), c))
        return result

    def describe(self) -> dict:
        return {
            "modulus": unipoly_str(self.modulus),
            "interval": [str(self._lo), str(self._hi)],
        }


# -- univariate polynomials over an AlgebraicField -------------------------------


class FieldPoly:
    """Univariate polynomial in x with coefficients in an AlgebraicField."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: AlgebraicField, coeffs: Iterable[Iterable[Scalar]]) -> None:
        self.field = field
        reduced = [field.reduce(c) for c in coeffs]
        while reduced and uis_zero(reduced[-1]):
            reduced.pop()
        self.coeffs = tuple(reduced)

    @classmethod
    def from_rational_coeffs(cls, field: AlgebraicField, coeffs: Iterable[Scalar]) -> "FieldPoly":
        return cls(field, ([c] for c in coeffs))

    @classmethod
    def zero(cls, field: AlgebraicField) -> "FieldPoly":
        return cls(field, ())

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def normalized_nonzero(self) -> "FieldPoly":
        """Drop leading coefficients that vanish at beta (zero divisors)."""
        coeffs = list(self.coeffs)
        while coeffs and self.field.sign_of(coeffs[-1]) == 0:
            coeffs.pop()
            coeffs = [self.field.reduce(c) for c in coeffs]
        return FieldPoly(self.field, coeffs)

    def add(self, other: "FieldPoly") -> "FieldPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        f = self.field
        return FieldPoly(
            f,
            (
                uadd(
                    self.coeffs[i] if i < len(self.coeffs) else (),
                    other.coeffs[i] if i < len(other.coeffs) else (),
                )
                for i in range(n)
            ),
        )

    def neg(self) -> "FieldPoly":
        return FieldPoly(self.field, (uneg(c) for c in self.coeffs))

    def sub(self, other: "FieldPoly") -> "FieldPoly":
        return self.add(other.neg())

    def mul(self, other: "FieldPoly") -> "FieldPoly":
        if self.is_zero or other.is_zero:
            return FieldPoly.zero(self.field)
        out: list[UniPoly] = [() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        f = self.field
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = uadd(out[i + j], umul(a, b))
        return FieldPoly(f, out)

    def scale(self, elem: UniPoly) -> "FieldPoly":
        return FieldPoly(self.field, (umul(c, elem) for c in self.coeffs))

    def divmod(self, other: "FieldPoly") -> tuple["FieldPoly", "FieldPoly"]:
        den = other.normalized_nonzero()
        if den.is_zero:
            raise ZeroDivisionError("field polynomial division by zero")
        f = self.field
        inv_lead = f.inv(den.coeffs[-1])
        den = den.normalized_nonzero()  # modulus may have split during inv
        inv_lead = f.reduce(inv_lead)
        rem = [f.reduce(c) for c in self.coeffs]
        quo: list[UniPoly] = [() for _ in range(max(len(rem) - len(den.coeffs) + 1, 0))]
        while True:
            while rem and f.sign_of(rem[-1]) == 0:
                rem.pop()
            if len(rem) < len(den.coeffs):
                break
            factor = f.mul(rem[-1], inv_lead)
            shift = len(rem) - len(den.coeffs)
            quo[shift] = factor
            for i, c in enumerate(den.coeffs):
                rem[shift + i] = f.sub(rem[shift + i], f.mul(factor, c))
            rem.pop()
        return FieldPoly(f, quo), FieldPoly(f, rem)

    def monic(self) -> "FieldPoly":
        p = self.normalized_nonzero()
        if p.is_zero:
            return p
        inv_lead = self.field.inv(p.coeffs[-1])
        return p.scale(inv_lead).normalized_nonzero()

    def gcd(self, other: "FieldPoly") -> "FieldPoly":
        a, b = self.normalized_nonzero(), other.normalized_nonzero()
        while not b.is_zero:
            a, b = b, a.divmod(b)[1].normalized_nonzero()
        return a.monic()

    def deriv(self) -> "FieldPoly":
        return FieldPoly(self.field, (uscale(c, i) for i, c in enumerate(self.coeffs) if i))

    def eval_rational(self, x: Fraction) -> UniPoly:
        acc: UniPoly = ()
        f = self.field
        for c in reversed(self.coeffs):
            acc = f.add(f.reduce(uscale(acc, x)), c)
        return acc

    def sturm_count(self, lo: Fraction, hi: Fraction) -> int:
        """Distinct roots in the open interval (lo, hi); endpoints must not
        be roots."""
        p = self.monic()
        chain = [p, p.deriv()]
        while not chain[-1].normalized_nonzero().is_zero:
            rem = chain[-2].divmod(chain[-1])[1].normalized_nonzero()
            if rem.is_zero:
                break
            chain.append(rem.neg())
        chain = [c for c in chain if not c.normalized_nonzero().is_zero]

        def variations(x: Fraction) -> int:
            signs = []
            for q in chain:
                s = self.field.sign_of(q.eval_rational(x))
                if s:
                    signs.append(s)
            return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

        if self.field.sign_of(p.eval_rational(lo)) == 0 or self.field.sign_of(p.eval_rational(hi)) == 0:
            raise ValueError("sturm_count endpoints must not be roots")
        return variations(lo) - variations(hi)

    def squarefree_part(self) -> "FieldPoly":
        p = self.monic()
        if p.degree <= 1:
            return p
        g = p.gcd(p.deriv())
        if g.degree <= 0:
            return p
        return p.divmod(g)[0].monic()

    def root_bound(self) -> Fraction:
        """Rational B with all real roots of the (monic) poly in (-B, B)."""
        p = self.monic()
        if p.degree < 1:
            return Fraction(1)
        best = Fraction(0)
        for c in p.coeffs[:-1]:
            iv = _iv_eval(c, self.field.interval)
            best = max(best, abs(iv[0]), abs(iv[1]))
        return best + 1

    def isolate_real_roots(self) -> list[tuple[Fraction, Fraction]]:
        """Certified isolating intervals (rational endpoints) for all
        distinct real roots, sorted ascending."""
        p = self.squarefree_part()
        if p.degree < 1:
            return []
        bound = self.root_bound()
        lo, hi = -bound - 1, bound + 1
        while self.field.sign_of(p.eval_rational(lo)) == 0:
            lo -= 1
        while self.field.sign_of(p.eval_rational(hi)) == 0:
            hi += 1
        out: list[tuple[Fraction, Fraction]] = []
        stack = [(lo, hi)]
        while stack:
            a, b = stack.pop()
            n = p.sturm_count(a, b)
            if n == 0:
                continue
            if n == 1:
                out.append((a, b))
                continue
            mid = (a + b) / 2
            while self.field.sign_of(p.eval_rational(mid)) == 0:
                mid = (a + mid) / 2
            stack.append((a, mid))
            stack.append((mid, b))
        out.sort()
        return out

    def describe(self) -> dict:
        return {
            "coeffs": [unipoly_str(c) for c in self.coeffs],
            "field": self.field.describe(),
        }


# -- towers: x implicit over the field ------------------------------------------


class TowerContext:
    """A point (x0, beta): beta is the field root; x0 is the unique root of
    the monic field polynomial ``h`` inside a certified rational interval."""

    __slots__ = ("field", "h", "_xlo", "_xhi")

    def __init__(self, h: FieldPoly, xlo: Scalar, xhi: Scalar) -> None:
        self.field = h.field
        self.h = h.monic()
        self._xlo, self._xhi = _coerce(xlo), _coerce(xhi)
        if self.h.degree < 1:
            raise ValueError("tower polynomial must be nonconstant")
        if self.h.sturm_count(self._xlo, self._xhi) != 1:
            raise ValueError("interval must isolate exactly one root")

    @property
    def x_interval(self) -> tuple[Fraction, Fraction]:
        return self._xlo, self._xhi

    def refine_x(self) -> None:
        lo, hi = self._xlo, self._xhi
        mid = (lo + hi) / 2
        s_mid = self.field.sign_of(self.h.eval_rational(mid))
        if s_mid == 0:
            # x0 is exactly rational; hug it while keeping endpoints clean
            delta = (hi - lo) / 8
            nlo, nhi = mid - delta, mid + delta
            while self.field.sign_of(self.h.eval_rational(nlo)) == 0:
                nlo = (nlo + mid) / 2
            while self.field.sign_of(self.h.eval_rational(nhi)) == 0:
                nhi = (mid + nhi) / 2
            self._xlo, self._xhi = nlo, nhi
            return
        s_lo = self.field.sign_of(self.h.eval_rational(lo))
        if s_mid == s_lo:
            self._xlo = mid
        else:
            self._xhi = mid

    def _box_eval(self, v: FieldPoly) -> Interval:
        tbox = self.field.interval
        acc = _iv_const(Fraction(0))
        xbox = (self._xlo, self._xhi)
        for c in reversed(v.coeffs):
            acc = _iv_add(_iv_mul(acc, xbox), _iv_eval(c, tbox))
        return acc

    def sign_of(self, v: FieldPoly) -> int:
        """Exact sign of v(x0, beta)."""
        r = v.divmod(self.h)[1].normalized_nonzero()
        if r.is_zero:
            return 0
        g = r.gcd(self.h)
        if g.degree >= 1:
            lo, hi = self._xlo, self._xhi
            while self.field.sign_of(g.eval_rational(lo)) == 0 or self.field.sign_of(g.eval_rational(hi)) == 0:
                self.refine_x()
                lo, hi = self._xlo, self._xhi
            if g.sturm_count(lo, hi) >= 1:
                # the common root inside the isolating interval must be x0
                return 0
        steps = 0
        while True:
            steps += 1
            if steps > _MAX_REFINE_STEPS:
                raise RuntimeError("tower sign determination did not converge")
            s = _iv_sign(self._box_eval(r))
            if s is not None:
                return s
            self.refine_x()
            self.field.refine((self.field.interval[1] - self.field.interval[0]) / 4)

    def value_float(self, v: FieldPoly, eps: float = 1e-15) -> float:
        r = v.divmod(self.h)[1]
        target = Fraction(eps).limit_denominator(10**20)
        steps = 0
        while steps < 200:
            steps += 1
            iv = self._box_eval(r)
            mid = (iv[0] + iv[1]) / 2
            if iv[1] - iv[0] < target * max(1, abs(mid)):
                return float(mid)
            self.refine_x()
            self.field.refine((self.field.interval[1] - self.field.interval[0]) / 4)
        iv = self._box_eval(r)
        return float((iv[0] + iv[1]) / 2)

    def x_float(self, eps: float = 1e-15) -> float:
        target = Fraction(eps).limit_denominator(10**20)
        steps = 0
        while self._xhi - self._xlo >= target and steps < 200:
            self.refine_x()
            steps += 1
        return float((self._xlo + self._xhi) / 2)

    def describe(self) -> dict:
        return {
            "x_poly": self.h.describe()["coeffs"],
            "x_interval": [str(self._xlo), str(self._xhi)],
            "field": self.field.describe(),
        }


# -- point values ------------------------------------------------------------------


class PointValue:
    """The value of a polynomial expression at an algebraic point.

    Supports exact ring operations with other values at the same point and
    with rationals, exact sign queries, and certified floats. Use
    :func:`value_sign` / :func:`value_float` for code that handles Fractions
    and PointValues uniformly.
    """

    __slots__ = ("kind", "field", "tower", "elem", "fpoly")

    def __init__(
        self,
        kind: str,
        field: AlgebraicField | None = None,
        tower: TowerContext | None = None,
        elem: UniPoly | None = None,
        fpoly: FieldPoly | None = None,
    ) -> None:
        if kind not in ("field", "tower"):
            raise ValueError(f"unknown point value kind {kind!r}")
        self.kind = kind
        self.field = field if field is not None else (tower.field if tower else None)
        self.tower = tower
        self.elem = elem
        self.fpoly = fpoly

    @classmethod
    def in_field(cls, field: AlgebraicField, elem: UniPoly) -> "PointValue":
        return cls("field", field=field, elem=field.reduce(elem))

    @classmethod
    def in_tower(cls, tower: TowerContext, fpoly: FieldPoly) -> "PointValue":
        return cls("tower", tower=tower, fpoly=fpoly.divmod(tower.h)[1])

    def _lift(self, other: "PointValue | Scalar") -> "PointValue":
        if isinstance(other, PointValue):
            if other.kind == self.kind:
                return other
            if self.kind == "tower" and other.kind == "field":
                return PointValue.in_tower(self.tower, FieldPoly(self.field, [other.elem]))
            raise ValueError("cannot mix values from different point contexts")
        c = _coerce(other)
        if self.kind == "field":
            return PointValue.in_field(self.field, self.field.constant(c))
        return PointValue.in_tower(self.tower, FieldPoly.from_rational_coeffs(self.field, [c]))

    def _binary(self, other: "PointValue | Scalar", op: str) -> "PointValue":
        if isinstance(other, PointValue) and self.kind == "field" and other.kind == "tower":
            lifted = PointValue.in_tower(other.tower, FieldPoly(other.field, [self.elem]))
            return lifted._binary_same(other, op)
        o = self._lift(other)
        return self._binary_same(o, op)

    def _binary_same(self, o: "PointValue", op: str) -> "PointValue":
        if self.kind == "field":
            f = self.field
            table = {"add": f.add, "sub": f.sub, "mul": f.mul}
            return PointValue.in_field(f, table[op](self.elem, o.elem))
        a, b = self.fpoly, o.fpoly
        table2 = {"add": a.add, "sub": a.sub, "mul": a.mul}
        return PointValue.in_tower(self.tower, table2[op](b))

    def __add__(self, other):
        return self._binary(other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, "sub")

    def __rsub__(self, other):
        return self._lift(other)._binary(self, "sub")

    def __mul__(self, other):
        return self._binary(other, "mul")

    __rmul__ = __mul__

    def __neg__(self):
        return self._lift(0)._binary(self, "sub")

    def __pow__(self, n: int) -> "PointValue":
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = self._lift(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sign(self) -> int:
        if self.kind == "field":
            return self.field.sign_of(self.elem)
        return self.tower.sign_of(self.fpoly)

    def is_zero(self) -> bool:
        return self.sign() == 0

    def as_rational(self) -> Fraction | None:
        """Exact rational value when syntactically visible, else None.

        Values that are rational only by virtue of a reducible modulus are
        not recognized; use sign tests against candidate rationals instead.
        """
        if self.kind == "field":
            return self.field.element_rational(self.elem)
        r = self.fpoly.divmod(self.tower.h)[1].normalized_nonzero()
        if r.is_zero:
            return Fraction(0)
        if r.degree == 0:
            return self.field.element_rational(r.coeffs[0])
        return None

    def square_as_rational(self) -> Fraction | None:
        """Exact rational value of the square, when visible. Useful for
        entries of the form q * sqrt(r) whose squares rationalize."""
        return (self * self).as_rational()

    def to_float(self, eps: float = 1e-15) -> float:
        if self.kind == "field":
            return self.field.element_float(self.elem, eps)
        return self.tower.value_float(self.fpoly, eps)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (PointValue, int, Fraction)):
            return (self - other).sign() == 0
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def describe(self) -> dict:
        if self.kind == "field":
            return {"expr": unipoly_str(self.elem), "approx": self.to_float(1e-12)}
        return {
            "expr": [unipoly_str(c) for c in self.fpoly.coeffs],
            "approx": self.to_float(1e-12),
        }

    def __repr__(self) -> str:
        return f"PointValue(~{self.to_float(1e-9):.9g})"


NumberLike = Union[int, Fraction, PointValue]


def value_sign(v: NumberLike) -> int:
    if isinstance(v, PointValue):
        return v.sign()
    f = _coerce(v)
    return (f > 0) - (f < 0)


def value_float(v: NumberLike, eps: float = 1e-15) -> float:
    if isinstance(v, PointValue):
        return v.to_float(eps)
    return float(_coerce(v))


def value_rational(v: NumberLike) -> Fraction | None:
    if isinstance(v, PointValue):
        return v.as_rational()
    return _coerce(v)


# -- points -----------------------------------------------------------------------


class AlgebraicPoint:
    """A planar point with exactly representable coordinates.

    Shapes:
        * ``rational``: both coordinates are Fractions.
        * ``field``: one coordinate is the field root beta (selected by
          ``algebraic_index``) and the other is a polynomial expression in
          beta.
        * ``tower``: the second coordinate is beta and the first is an
          implicit root of a field polynomial in a certified interval.

    Coordinate order follows the ambient system's variable order, so for a
    chart in (u, w) the "first" coordinate is u.
    """

    __slots__ = ("shape", "_x", "_y", "field", "expr", "algebraic_index", "tower")

    def __init__(
        self,
        shape: str,
        x: Fraction | None = None,
        y: Fraction | None = None,
        field: AlgebraicField | None = None,
        expr: UniPoly | None = None,
        algebraic_index: int = 1,
        tower: TowerContext | None = None,
    ) -> None:
        if shape not in ("rational", "field", "tower"):
            raise ValueError(f"unknown point shape {shape!r}")
        if algebraic_index not in (0, 1):
            raise ValueError("algebraic_index must be 0 or 1")
        self.shape = shape
        self._x, self._y = x, y
        self.field = field if field is not None else (tower.field if tower else None)
        self.expr = expr
        self.algebraic_index = algebraic_index
        self.tower = tower

    @classmethod
    def rational(cls, x: Scalar, y: Scalar) -> "AlgebraicPoint":
        return cls("rational", x=_coerce(x), y=_coerce(y))

    @classmethod
    def with_field(
        cls,
        field: AlgebraicField,
        expr: Iterable[Scalar],
        algebraic_index: int = 1,
    ) -> "AlgebraicPoint":
        """Point whose coordinate ``algebraic_index`` is the field root and
        whose other coordinate is expr evaluated at that root."""
        return cls(
            "field",
            field=field,
            expr=field.reduce(unipoly(expr)),
            algebraic_index=algebraic_index,
        )

    @classmethod
    def with_tower(cls, tower: TowerContext) -> "AlgebraicPoint":
        return cls("tower", tower=tower)

    def evaluate(self, poly: RationalPoly) -> Fraction | PointValue:
        """Exact value of a bivariate polynomial at this point."""
        if self.shape == "rational":
            return poly.eval_exact(self._x, self._y)
        if self.shape == "field":
            gen = self.field.generator()
            if self.algebraic_index == 1:
                elem = self.field.eval_bivariate(poly, self.expr, gen)
            else:
                elem = self.field.eval_bivariate(poly, gen, self.expr)
            return PointValue.in_field(self.field, elem)
        f = self.field
        x_class = FieldPoly.from_rational_coeffs(f, [0, 1])
        beta = FieldPoly(f, [f.generator()])
        acc = FieldPoly.zero(f)
        pow_x: list[FieldPoly] = [FieldPoly.from_rational_coeffs(f, [1])]
        pow_y: list[FieldPoly] = [FieldPoly.from_rational_coeffs(f, [1])]
        for (i, j), c in poly.terms.items():
            while len(pow_x) <= i:
                pow_x.append(pow_x[-1].mul(x_class).divmod(self.tower.h)[1])
            while len(pow_y) <= j:
                pow_y.append(pow_y[-1].mul(beta).divmod(self.tower.h)[1])
            acc = acc.add(pow_x[i].mul(pow_y[j]).scale(f.constant(c)))
        return PointValue.in_tower(self.tower, acc)

    def x_value(self) -> "Fraction | PointValue":
        if self.shape == "rational":
            return self._x
        if self.shape == "field":
            elem = self.field.generator() if self.algebraic_index == 0 else self.expr
            return PointValue.in_field(self.field, elem)
        return PointValue.in_tower(
            self.tower, FieldPoly.from_rational_coeffs(self.field, [0, 1])
        )

    def y_value(self) -> "Fraction | PointValue":
        if self.shape == "rational":
            return self._y
        if self.shape == "field":
            elem = self.field.generator() if self.algebraic_index == 1 else self.expr
            return PointValue.in_field(self.field, elem)
        return PointValue.in_tower(
            self.tower, FieldPoly(self.field, [self.field.generator()])
        )

    def x_float(self, eps: float = 1e-15) -> float:
        return value_float(self.x_value(), eps)

    def y_float(self, eps: float = 1e-15) -> float:
        return value_float(self.y_value(), eps)

    def x_exact(self) -> Fraction | None:
        return value_rational(self.x_value())

    def y_exact(self) -> Fraction | None:
        return value_rational(self.y_value())

    def describe(self) -> dict:
        out: dict = {"shape": self.shape, "approx": [self.x_float(1e-12), self.y_float(1e-12)]}
        if self.shape == "rational":
            out["coords"] = [str(self._x), str(self._y)]
        elif self.shape == "field":
            out["field"] = self.field.describe()
            out["algebraic_coordinate"] = self.algebraic_index
            out["other_coordinate_expr"] = unipoly_str(self.expr)
        else:
            out["tower"] = self.tower.describe()
        return out

    def __repr__(self) -> str:
        return f"AlgebraicPoint(~({self.x_float(1e-9):.9g}, {self.y_float(1e-9):.9g}))"


# -- resultants ----------------------------------------------------------------------


def _poly_matrix_det(rows: list[list[UniPoly]]) -> UniPoly:
    """Fraction-free Bareiss determinant over Q[t] (entries UniPoly)."""
    n = len(rows)
    if n == 0:
        return unipoly([1])
    m = [row[:] for row in rows]
    sign = 1
    prev = unipoly([1])
    for k in range(n - 1):
        if uis_zero(m[k][k]):
            pivot_row = next((r for r in range(k + 1, n) if not uis_zero(m[r][k])), None)
            if pivot_row is None:
                return ()
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = usub(umul(m[i][j], m[k][k]), umul(m[i][k], m[k][j]))
                q, r = udivmod(num, prev)
                if not uis_zero(r):
                    raise ArithmeticError("fraction-free elimination left a remainder")
                m[i][j] = q
            m[i][k] = ()
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return uneg(det) if sign < 0 else det


def sylvester_resultant(p: RationalPoly, q: RationalPoly, eliminate: int | str) -> UniPoly:
    """Resultant of p and q with respect to one variable.

    Returns a univariate polynomial in the other variable whose roots
    contain every coordinate value at which p and q share a root in the
    eliminated variable.

    Raises:
        PositiveDimensional: either input is identically zero.
    """
    idx = p._var_index(eliminate)
    keep = 1 - idx
    if p.is_zero or q.is_zero:
        raise PositiveDimensional("resultant of a zero polynomial")

    def x_coeffs(poly: RationalPoly) -> list[UniPoly]:
        deg = poly.degree_in(idx)
        out: list[UniPoly] = [() for _ in range(deg + 1)]
        for e, c in poly.terms.items():
            k = e[idx]
            other = e[keep]
            cur = list(out[k])
            while len(cur) <= other:
                cur.append(Fraction(0))
            cur[other] += c
            out[k] = unipoly(cur)
        return out

    pc, qc = x_coeffs(p), x_coeffs(q)
    m, n = len(pc) - 1, len(qc) - 1
    if m == 0 and n == 0:
        return unipoly([1])
    if m == 0:
        # p is constant in the eliminated variable: Res = p^n
        out = unipoly([1])
        for _ in range(n):
            out = umul(out, pc[0])
        return out
    if n == 0:
        out = unipoly([1])
        for _ in range(m):
            out = umul(out, qc[0])
        return out
    size = m + n
    rows: list[list[UniPoly]] = []
    for i in range(n):
        row: list[UniPoly] = [() for _ in range(size)]
        for k, c in enumerate(reversed(pc)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [() for _ in range(size)]
        for k, c in enumerate(reversed(qc)):
            row[i + k] = c
        rows.append(row)
    return _poly_matrix_det(rows)
