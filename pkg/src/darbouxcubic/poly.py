"""Exact bivariate polynomial arithmetic over the rationals.

This module is the symbolic carrier for the whole pipeline: system
components, cofactors, chart transforms and blow-up substitutions are all
values of :class:`RationalPoly` or its half-integer-exponent extension
:class:`HalfPowerPoly`. Coefficients are arbitrary-precision rationals
(`fractions.Fraction`); there is no floating point anywhere in this module,
because every identity that the pipeline checks must be checked exactly.

Key conventions:
    * Terms are stored sparsely as ``{(i, j): coefficient}`` with ``i`` the
      exponent of the first variable. No zero coefficients are stored.
    * Canonical term order is graded lexicographic (total degree first,
      then first-variable exponent), so rendering and equality are
      structural and deterministic.
    * The half-power ring tracks the formal variable ``t = u^(1/2)`` on the
      ``u>0`` branch and ``t = (-u)^(1/2)`` on the ``u<0`` branch, with sign
      bookkeeping following ``u = -t^2`` on the negative branch. Only the
      square root of the first variable is ever introduced (no general
      Puiseux support).

Example:
    >>> P = parse_poly("x - x^2*y + p*x*y^2 + y^3", {"p": 1})
    >>> str(P)
    '-x^2*y + x*y^2 + y^3 + x'
    >>> str(P.diff("x"))
    '-2*x*y + y^2 + 1'
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    HalfPowerResidue,
    NonRationalLiteral,
    NotDivisible,
    ParseError,
    UnboundParameter,
)

Exponents = tuple[int, int]
Scalar = Union[int, Fraction, str]

#: Branch tags for the half-power ring.
BRANCH_POSITIVE = "u>0"
BRANCH_NEGATIVE = "u<0"
_BRANCHES = (BRANCH_POSITIVE, BRANCH_NEGATIVE)


def _coerce(value: Scalar) -> Fraction:
    """Convert a scalar to an exact Fraction, rejecting floats."""
    if isinstance(value, float):
        raise NonRationalLiteral(
            f"float {value!r} is not accepted as an exact coefficient; "
            "pass an int, Fraction, or a string like '1/2'"
        )
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise NonRationalLiteral(f"cannot interpret {value!r} as an exact rational") from exc


def _grlex_key(exps: Exponents) -> tuple[int, int]:
    """Sort key for graded lexicographic order (ascending)."""
    i, j = exps
    return (i + j, i)


class RationalPoly:
    """Immutable sparse bivariate polynomial with exact rational coefficients.

    Invariants:
        * no stored zero coefficients;
        * all exponents are nonnegative integers;
        * equality is structural (same variables, same term map).
    """

    __slots__ = ("_terms", "_vars", "_hash")

    def __init__(
        self,
        terms: Mapping[Exponents, Scalar] | Iterable[tuple[Exponents, Scalar]] = (),
        variables: tuple[str, str] = ("x", "y"),
    ) -> None:
        if isinstance(terms, Mapping):
            items: Iterable[tuple[Exponents, Scalar]] = terms.items()
        else:
            items = terms
        acc: dict[Exponents, Fraction] = {}
        for exps, coeff in items:
            i, j = exps
            if i < 0 or j < 0 or i != int(i) or j != int(j):
                raise ValueError(f"exponents must be nonnegative integers, got {exps}")
            c = _coerce(coeff)
            if c:
                key = (int(i), int(j))
                new = acc.get(key, Fraction(0)) + c
                if new:
                    acc[key] = new
                else:
                    acc.pop(key, None)
        self._terms: dict[Exponents, Fraction] = acc
        self._vars = (str(variables[0]), str(variables[1]))
        self._hash: int | None = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, variables: tuple[str, str] = ("x", "y")) -> "RationalPoly":
        return cls({}, variables)

    @classmethod
    def constant(cls, value: Scalar, variables: tuple[str, str] = ("x", "y")) -> "RationalPoly":
        return cls({(0, 0): value}, variables)

    @classmethod
    def one(cls, variables: tuple[str, str] = ("x", "y")) -> "RationalPoly":
        return cls.constant(1, variables)

    @classmethod
    def var(cls, name: str, variables: tuple[str, str] = ("x", "y")) -> "RationalPoly":
        if name == variables[0]:
            return cls({(1, 0): 1}, variables)
        if name == variables[1]:
            return cls({(0, 1): 1}, variables)
        raise ValueError(f"{name!r} is not one of the variables {variables}")

    @classmethod
    def monomial(
        cls,
        coeff: Scalar,
        exps: Exponents,
        variables: tuple[str, str] = ("x", "y"),
    ) -> "RationalPoly":
        return cls({exps: coeff}, variables)

    @classmethod
    def from_univariate(
        cls,
        coeffs: Sequence[Scalar],
        var_index: int,
        variables: tuple[str, str] = ("x", "y"),
    ) -> "RationalPoly":
        """Build from low-to-high univariate coefficients in one variable."""
        terms = {}
        for k, c in enumerate(coeffs):
            exps = (k, 0) if var_index == 0 else (0, k)
            terms[exps] = c
        return cls(terms, variables)

    # -- accessors -------------------------------------------------------

    @property
    def variables(self) -> tuple[str, str]:
        return self._vars

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return dict(self._terms)

    def coefficient(self, exps: Exponents) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(e == (0, 0) for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return self._terms.get((0, 0), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self._terms:
            return -1
        return max(i + j for i, j in self._terms)

    def degree_in(self, var: int | str) -> int:
        idx = self._var_index(var)
        if not self._terms:
            return -1
        return max(e[idx] for e in self._terms)

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in graded-lex descending order (the canonical order)."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple[Exponents, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms()[0]

    def _var_index(self, var: int | str) -> int:
        if isinstance(var, int):
            if var not in (0, 1):
                raise ValueError("variable index must be 0 or 1")
            return var
        try:
            return self._vars.index(var)
        except ValueError:
            raise ValueError(f"{var!r} is not one of the variables {self._vars}") from None

    # -- ring operations -------------------------------------------------

    def _check_same_ring(self, other: "RationalPoly") -> None:
        if self._vars != other._vars:
            raise ValueError(f"variable mismatch: {self._vars} vs {other._vars}")

    def __add__(self, other: "RationalPoly | Scalar") -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other, self._vars)
        self._check_same_ring(other)
        acc = dict(self._terms)
        for exps, c in other._terms.items():
            new = acc.get(exps, Fraction(0)) + c
            if new:
                acc[exps] = new
            else:
                acc.pop(exps, None)
        out = RationalPoly.zero(self._vars)
        out._terms = acc
        return out

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        out = RationalPoly.zero(self._vars)
        out._terms = {e: -c for e, c in self._terms.items()}
        return out

    def __sub__(self, other: "RationalPoly | Scalar") -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other, self._vars)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "RationalPoly":
        return RationalPoly.constant(other, self._vars) - self

    def __mul__(self, other: "RationalPoly | Scalar") -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            c = _coerce(other)
            out = RationalPoly.zero(self._vars)
            if c:
                out._terms = {e: k * c for e, k in self._terms.items()}
            return out
        self._check_same_ring(other)
        acc: dict[Exponents, Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                key = (i1 + i2, j1 + j2)
                new = acc.get(key, Fraction(0)) + c1 * c2
                if new:
                    acc[key] = new
                else:
                    acc.pop(key, None)
        out = RationalPoly.zero(self._vars)
        out._terms = acc
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        if n < 0 or n != int(n):
            raise ValueError("polynomial powers must be nonnegative integers")
        result = RationalPoly.one(self._vars)
        base = self
        n = int(n)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self._vars == other._vars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._vars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation ------------------------------------------

    def diff(self, var: int | str) -> "RationalPoly":
        idx = self._var_index(var)
        acc: dict[Exponents, Fraction] = {}
        for (i, j), c in self._terms.items():
            e = (i, j)[idx]
            if e == 0:
                continue
            new_exps = (i - 1, j) if idx == 0 else (i, j - 1)
            acc[new_exps] = acc.get(new_exps, Fraction(0)) + c * e
        out = RationalPoly.zero(self._vars)
        out._terms = {e: c for e, c in acc.items() if c}
        return out

    def eval_exact(self, first: Scalar, second: Scalar) -> Fraction:
        a, b = _coerce(first), _coerce(second)
        total = Fraction(0)
        for (i, j), c in self._terms.items():
            total += c * a**i * b**j
        return total

    def eval_float(self, first: float, second: float) -> float:
        total = 0.0
        for (i, j), c in self._terms.items():
            total += float(c) * first**i * second**j
        return total

    def compose(
        self,
        first_sub: "RationalPoly",
        second_sub: "RationalPoly",
    ) -> "RationalPoly":
        """Substitute polynomials for both variables.

        The result lives in the substituents' ring; both substituents must
        share one ring.
        """
        first_sub._check_same_ring(second_sub)
        target_vars = first_sub.variables
        # power caches keep repeated exponents cheap
        pows_a: list[RationalPoly] = [RationalPoly.one(target_vars)]
        pows_b: list[RationalPoly] = [RationalPoly.one(target_vars)]
        result = RationalPoly.zero(target_vars)
        for (i, j), c in self.sorted_terms():
            while len(pows_a) <= i:
                pows_a.append(pows_a[-1] * first_sub)
            while len(pows_b) <= j:
                pows_b.append(pows_b[-1] * second_sub)
            result = result + pows_a[i] * pows_b[j] * c
        return result

    def homogeneous_components(self) -> dict[int, "RationalPoly"]:
        """Split into homogeneous parts, keyed by total degree."""
        buckets: dict[int, dict[Exponents, Fraction]] = {}
        for (i, j), c in self._terms.items():
            buckets.setdefault(i + j, {})[(i, j)] = c
        out: dict[int, RationalPoly] = {}
        for d, terms in buckets.items():
            p = RationalPoly.zero(self._vars)
            p._terms = terms
            out[d] = p
        return out

    def truncate(self, max_total_degree: int) -> "RationalPoly":
        out = RationalPoly.zero(self._vars)
        out._terms = {e: c for e, c in self._terms.items() if e[0] + e[1] <= max_total_degree}
        return out

    def rename(self, variables: tuple[str, str]) -> "RationalPoly":
        """Same terms over a differently named variable pair."""
        out = RationalPoly.zero((str(variables[0]), str(variables[1])))
        out._terms = dict(self._terms)
        return out

    def swap_variables(self) -> "RationalPoly":
        """Exchange the roles of the two variables (names keep their slot)."""
        out = RationalPoly.zero(self._vars)
        out._terms = {(j, i): c for (i, j), c in self._terms.items()}
        return out

    # -- univariate bridging ----------------------------------------------

    def is_univariate_in(self, var: int | str) -> bool:
        idx = self._var_index(var)
        other = 1 - idx
        return all(e[other] == 0 for e in self._terms)

    def univariate_coeffs(self, var: int | str) -> tuple[Fraction, ...]:
        """Low-to-high coefficient tuple; requires the poly to be univariate."""
        idx = self._var_index(var)
        if not self.is_univariate_in(idx):
            raise ValueError(f"{self} is not univariate in {self._vars[idx]}")
        if not self._terms:
            return ()
        deg = max(e[idx] for e in self._terms)
        out = [Fraction(0)] * (deg + 1)
        for e, c in self._terms.items():
            out[e[idx]] = c
        return tuple(out)

    # -- normalization ----------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c such that self/c has coprime integer
        coefficients; zero polynomial reports 0."""
        if not self._terms:
            return Fraction(0)
        nums = 0
        dens = 1
        for c in self._terms.values():
            nums = gcd(nums, abs(c.numerator))
            dens = dens * c.denominator // gcd(dens, c.denominator)
        return Fraction(nums, dens)

    def primitive(self) -> "RationalPoly":
        """Scale to coprime integer coefficients with positive leading
        (graded-lex) coefficient. The canonical representative of the
        scalar-multiple class."""
        if not self._terms:
            return self
        c = self.content()
        p = self * (1 / c)
        if p.leading_term()[1] < 0:
            p = -p
        return p

    # -- rendering ---------------------------------------------------------

    def _monomial_str(self, exps: Exponents) -> str:
        parts = []
        for name, e in zip(self._vars, exps):
            if e == 0:
                continue
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks: list[str] = []
        for idx, (exps, coeff) in enumerate(self.sorted_terms()):
            mono = self._monomial_str(exps)
            mag = abs(coeff)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if idx == 0:
                chunks.append(f"-{body}" if coeff < 0 else body)
            else:
                chunks.append(f" - {body}" if coeff < 0 else f" + {body}")
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"RationalPoly({str(self)!r}, variables={self._vars!r})"


# -- exact division --------------------------------------------------------


def divide_exact(
    num: "RationalPoly | HalfPowerPoly",
    den: "RationalPoly | Scalar",
) -> "RationalPoly | HalfPowerPoly":
    """Exact quotient num/den in the respective ring.

    For :class:`RationalPoly` the divisor may be any nonzero polynomial
    (graded-lex reduction; the quotient is verified by re-multiplication).
    For :class:`HalfPowerPoly` the divisor must be a nonzero monomial of the
    underlying polynomial ring.

    Raises:
        NotDivisible: the division leaves a remainder, which signals that a
            time rescale or blow-down step is invalid for this field.
        ZeroDivisionError: den is zero.
    """
    if isinstance(num, HalfPowerPoly):
        return num._divide_monomial(den)
    if not isinstance(den, RationalPoly):
        den = RationalPoly.constant(den, num.variables)
    num._check_same_ring(den)
    if den.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    lead_exps, lead_coeff = den.leading_term()
    quotient = RationalPoly.zero(num.variables)
    rest = num
    while not rest.is_zero:
        (ri, rj), rc = rest.leading_term()
        di, dj = lead_exps
        if ri < di or rj < dj:
            raise NotDivisible(f"({num}) is not divisible by ({den}); stuck at term {rest.leading_term()}")
        mono = RationalPoly.monomial(rc / lead_coeff, (ri - di, rj - dj), num.variables)
        quotient = quotient + mono
        rest = rest - mono * den
    if quotient * den != num:
        # unreachable given the loop invariant, kept as a cheap self-check
        raise NotDivisible(f"internal division check failed for ({num}) / ({den})")
    return quotient


# -- half-power ring ---------------------------------------------------------


class HalfPowerPoly:
    """Polynomial in ``(t, v)`` where ``t`` is the formal square root of the
    first variable: ``t = u^(1/2)`` on the ``u>0`` branch, ``t = (-u)^(1/2)``
    on the ``u<0`` branch (so all stored quantities are real, and
    ``u = -t^2`` drives the sign bookkeeping there).

    Terms map ``(k, j) -> coefficient`` with ``k`` the integer t-exponent
    (may be negative, i.e. first-variable exponents are half-integers bounded
    below) and ``j >= 0`` the second-variable exponent.
    """

    __slots__ = ("_terms", "branch", "_vars")

    def __init__(
        self,
        terms: Mapping[Exponents, Scalar] | Iterable[tuple[Exponents, Scalar]],
        branch: str,
        variables: tuple[str, str],
    ) -> None:
        if branch not in _BRANCHES:
            raise ValueError(f"branch must be one of {_BRANCHES}, got {branch!r}")
        if isinstance(terms, Mapping):
            items: Iterable[tuple[Exponents, Scalar]] = terms.items()
        else:
            items = terms
        acc: dict[Exponents, Fraction] = {}
        for (k, j), coeff in items:
            if j < 0:
                raise ValueError(f"second-variable exponent must be nonnegative, got {(k, j)}")
            c = _coerce(coeff)
            if c:
                key = (int(k), int(j))
                new = acc.get(key, Fraction(0)) + c
                if new:
                    acc[key] = new
                else:
                    acc.pop(key, None)
        self._terms = acc
        self.branch = branch
        self._vars = (str(variables[0]), str(variables[1]))

    @property
    def variables(self) -> tuple[str, str]:
        return self._vars

    @property
    def terms(self) -> Mapping[Exponents, Fraction]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def min_half_exponent(self) -> Fraction:
        """Smallest first-variable exponent present, as an exact half-integer."""
        if not self._terms:
            raise ValueError("zero polynomial has no exponents")
        return Fraction(min(k for k, _ in self._terms), 2)

    def _check_compatible(self, other: "HalfPowerPoly") -> None:
        if self._vars != other._vars or self.branch != other.branch:
            raise ValueError("half-power operands must share variables and branch")

    def __add__(self, other: "HalfPowerPoly") -> "HalfPowerPoly":
        self._check_compatible(other)
        acc = dict(self._terms)
        for e, c in other._terms.items():
            new = acc.get(e, Fraction(0)) + c
            if new:
                acc[e] = new
            else:
                acc.pop(e, None)
        return HalfPowerPoly(acc, self.branch, self._vars)

    def __neg__(self) -> "HalfPowerPoly":
        return HalfPowerPoly({e: -c for e, c in self._terms.items()}, self.branch, self._vars)

    def __sub__(self, other: "HalfPowerPoly") -> "HalfPowerPoly":
        return self + (-other)

    def __mul__(self, other: "HalfPowerPoly | Scalar") -> "HalfPowerPoly":
        if not isinstance(other, HalfPowerPoly):
            c = _coerce(other)
            return HalfPowerPoly(
                {e: k * c for e, k in self._terms.items()} if c else {},
                self.branch,
                self._vars,
            )
        self._check_compatible(other)
        acc: dict[Exponents, Fraction] = {}
        for (k1, j1), c1 in self._terms.items():
            for (k2, j2), c2 in other._terms.items():
                key = (k1 + k2, j1 + j2)
                new = acc.get(key, Fraction(0)) + c1 * c2
                if new:
                    acc[key] = new
                else:
                    acc.pop(key, None)
        return HalfPowerPoly(acc, self.branch, self._vars)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HalfPowerPoly):
            return NotImplemented
        return (
            self._vars == other._vars
            and self.branch == other.branch
            and self._terms == other._terms
        )

    def __hash__(self) -> int:
        return hash((self._vars, self.branch, frozenset(self._terms.items())))

    def shift_half_power(self, k_delta: int) -> "HalfPowerPoly":
        """Multiply by t^k_delta (k_delta may be negative)."""
        return HalfPowerPoly(
            {(k + k_delta, j): c for (k, j), c in self._terms.items()},
            self.branch,
            self._vars,
        )

    def _divide_monomial(self, den: "RationalPoly | Scalar") -> "HalfPowerPoly":
        """Divide by a monomial of the underlying (u, v) polynomial ring."""
        if isinstance(den, RationalPoly):
            if den.is_zero:
                raise ZeroDivisionError("division by zero monomial")
            if len(den.terms) != 1:
                raise NotDivisible("half-power division supports only monomial divisors")
            ((a, b), d) = next(iter(den.terms.items()))
        else:
            d = _coerce(den)
            if not d:
                raise ZeroDivisionError("division by zero")
            a = b = 0
        sign = Fraction(-1) ** a if self.branch == BRANCH_NEGATIVE else Fraction(1)
        acc: dict[Exponents, Fraction] = {}
        for (k, j), c in self._terms.items():
            if j - b < 0:
                raise NotDivisible(
                    f"term t^{k}*{self._vars[1]}^{j} not divisible by {self._vars[1]}^{b}"
                )
            acc[(k - 2 * a, j - b)] = c / d * sign
        return HalfPowerPoly(acc, self.branch, self._vars)

    def to_rational_poly(self) -> RationalPoly:
        """Lossless conversion back to the polynomial ring.

        Raises:
            HalfPowerResidue: some first-variable exponent is odd (a genuine
                half power survives) or negative.
        """
        acc: dict[Exponents, Fraction] = {}
        for (k, j), c in self._terms.items():
            if k % 2 != 0 or k < 0:
                raise HalfPowerResidue(
                    f"exponent {Fraction(k, 2)} of {self._vars[0]} is not a nonnegative integer"
                )
            i = k // 2
            if self.branch == BRANCH_NEGATIVE and i % 2 == 1:
                acc[(i, j)] = -c
            else:
                acc[(i, j)] = c
        return RationalPoly(acc, self._vars)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        root = self._vars[0] if self.branch == BRANCH_POSITIVE else f"(-{self._vars[0]})"
        chunks = []
        ordered = sorted(self._terms.items(), key=lambda kv: (kv[0][0] + 2 * kv[0][1], kv[0][0]), reverse=True)
        for idx, ((k, j), coeff) in enumerate(ordered):
            parts = []
            if k:
                e = Fraction(k, 2)
                parts.append(f"{root}^({e})" if e.denominator != 1 or e < 0 else (root if e == 1 else f"{root}^{e}"))
            if j:
                parts.append(self._vars[1] if j == 1 else f"{self._vars[1]}^{j}")
            mono = "*".join(parts)
            mag = abs(coeff)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            if idx == 0:
                chunks.append(f"-{body}" if coeff < 0 else body)
            else:
                chunks.append(f" - {body}" if coeff < 0 else f" + {body}")
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"HalfPowerPoly({str(self)!r}, branch={self.branch!r}, variables={self._vars!r})"


def substitute_halfpower(
    poly: RationalPoly,
    branch: str,
    inverse: bool = False,
    out_second_var: str | None = None,
) -> HalfPowerPoly:
    """Apply the half-power substitution to a genuine polynomial.

    Forward (``inverse=False``): input in ``(u, z)``, substitute
    ``z = w * t`` where ``t = u^(1/2)`` (branch ``u>0``) or ``(-u)^(1/2)``
    (branch ``u<0``). Result is a half-power polynomial in ``(u, w)``.

    Inverse (``inverse=True``): input in ``(u, w)``, substitute
    ``w = z * t^(-1)``. Result is a half-power polynomial in ``(u, z)``.
    Applying forward then inverse is the identity on polynomials whose
    first-variable exponents stay integral.

    Args:
        poly: polynomial in the first variable and the variable being
            replaced.
        branch: BRANCH_POSITIVE or BRANCH_NEGATIVE.
        inverse: direction of the substitution.
        out_second_var: name for the new second variable; defaults to
            "w" (forward) / "z" (inverse).

    Returns:
        The exact substituted value; on the ``u<0`` branch powers of
        ``(-u)^(1/2)`` are tracked with the correct signs via ``u = -t^2``.
    """
    if branch not in _BRANCHES:
        raise ValueError(f"branch must be one of {_BRANCHES}, got {branch!r}")
    u_name = poly.variables[0]
    new_second = out_second_var if out_second_var is not None else ("z" if inverse else "w")
    negative = branch == BRANCH_NEGATIVE
    delta = -1 if inverse else 1
    acc: dict[Exponents, Fraction] = {}
    for (i, j), c in poly.terms.items():
        # u^i contributes t^(2i) with sign (-1)^i on the negative branch
        k = 2 * i + delta * j
        coeff = -c if (negative and i % 2 == 1) else c
        key = (k, j)
        new = acc.get(key, Fraction(0)) + coeff
        if new:
            acc[key] = new
        else:
            acc.pop(key, None)
    return HalfPowerPoly(acc, branch, (u_name, new_second))


# -- parsing -----------------------------------------------------------------


class _Tokenizer:
    """Hand-rolled tokenizer with position-reporting for parse errors."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_number(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            raise NonRationalLiteral(
                f"decimal literal at position {start} is not exact; write a fraction like 3/2"
            )
        return int(self.text[start : self.pos])

    def take_name(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start : self.pos]


def parse_poly(
    text: str,
    params: Mapping[str, Scalar] | None = None,
    variables: tuple[str, str] = ("x", "y"),
) -> RationalPoly:
    """Parse an expression into an exact polynomial.

    The grammar accepts ``+ - * / ^``, parentheses, integer literals, the
    two system variables, and parameter names bound in ``params``; ``/``
    only divides by a nonzero rational constant subexpression, and ``^``
    takes a nonnegative integer literal. Parameters are substituted by
    their exact rational values.

    Args:
        text: expression source.
        params: name -> rational value map (int, Fraction, or a string
            such as "1/2"; floats are rejected).
        variables: the variable pair of the target ring.

    Returns:
        The exact polynomial.

    Raises:
        ParseError: malformed syntax, with the offending position.
        UnboundParameter: a name that is neither variable nor parameter.
        NonRationalLiteral: a decimal literal, or a parameter value that is
            not exactly rational.
    """
    bound: dict[str, Fraction] = {}
    for name, value in (params or {}).items():
        bound[str(name)] = _coerce(value)
    tz = _Tokenizer(text)

    def parse_expr() -> RationalPoly:
        ch = tz.peek()
        if ch == "-":
            tz.pos += 1
            node = -parse_term()
        elif ch == "+":
            tz.pos += 1
            node = parse_term()
        else:
            node = parse_term()
        while True:
            ch = tz.peek()
            if ch == "+":
                tz.pos += 1
                node = node + parse_term()
            elif ch == "-":
                tz.pos += 1
                node = node - parse_term()
            else:
                return node

    def parse_term() -> RationalPoly:
        node = parse_unary()
        while True:
            ch = tz.peek()
            if ch == "*":
                tz.pos += 1
                node = node * parse_unary()
            elif ch == "/":
                op_pos = tz.pos
                tz.pos += 1
                divisor = parse_unary()
                if not divisor.is_constant:
                    raise ParseError("division is only supported by rational constants", op_pos)
                value = divisor.constant_value()
                if not value:
                    raise ParseError("division by zero", op_pos)
                node = node * (1 / value)
            else:
                return node

    def parse_unary() -> RationalPoly:
        ch = tz.peek()
        if ch == "-":
            tz.pos += 1
            return -parse_unary()
        return parse_power()

    def parse_power() -> RationalPoly:
        node = parse_atom()
        while tz.peek() == "^":
            op_pos = tz.pos
            tz.pos += 1
            ch = tz.peek()
            if not ch.isdigit():
                raise ParseError("exponent must be a nonnegative integer literal", op_pos + 1)
            node = node ** tz.take_number()
        return node

    def parse_atom() -> RationalPoly:
        ch = tz.peek()
        if ch == "(":
            tz.pos += 1
            node = parse_expr()
            if tz.peek() != ")":
                raise ParseError("expected ')'", tz.pos)
            tz.pos += 1
            return node
        if ch.isdigit():
            return RationalPoly.constant(tz.take_number(), variables)
        if ch.isalpha() or ch == "_":
            start = tz.pos
            name = tz.take_name()
            if name in variables:
                return RationalPoly.var(name, variables)
            if name in bound:
                return RationalPoly.constant(bound[name], variables)
            raise UnboundParameter(f"unbound name {name!r} at position {start}")
        if ch == "":
            raise ParseError("unexpected end of expression", tz.pos)
        raise ParseError(f"unexpected character {ch!r}", tz.pos)

    result = parse_expr()
    if tz.peek() != "":
        raise ParseError(f"unexpected trailing input {tz.peek()!r}", tz.pos)
    return result
