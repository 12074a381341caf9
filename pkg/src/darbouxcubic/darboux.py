"""Invariant algebraic curves, exponential factors, and first integrals.

A polynomial f is an invariant curve of the system (P, Q) when the
directional derivative X(f) = P*df/dx + Q*df/dy equals k*f for some
polynomial cofactor k with deg k <= deg(system) - 1. An exponential
factor exp(g) carries the cofactor X(g) under the same degree bound. If
exponents lambda_i, mu_j solve

    sum_i lambda_i * k_i + sum_j mu_j * l_j = 0

exactly, then H = prod f_i^lambda_i * prod exp(g_j)^mu_j is a first
integral: its derivative along the flow is H times the left-hand side.

The curve search fixes a monic leading monomial for f, leaves the other
coefficients of f and all coefficients of k unknown, and reduces
X(f) - k*f = 0 to a bilinear system over Q solved exactly by
substitution, factoring with case splits, and linear elimination; every
rational solution is found or SolverIncomplete is raised, never a
truncated answer presented as complete. The search is over rational
coefficients: curves that exist only with irrational coefficients are
out of scope and out of contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import (
    NotDivisible,
    NotInvariant,
    PoleOrBranch,
    RelationFails,
    SolverIncomplete,
)
from .poly import RationalPoly, Scalar, _coerce, divide_exact
from .system import PlanarSystem

Unknown = tuple[str, tuple[int, int]]
MonoKey = tuple[Unknown, ...]
Equation = dict[MonoKey, Fraction]


@dataclass
class InvariantCurve:
    """An invariant algebraic curve with its exact cofactor.

    pencil is True when the defining equations left free parameters, i.e.
    the curve belongs to a positive-dimensional family of invariant
    curves (the reported polynomial is the representative with the free
    coefficients set to zero).
    """

    poly: RationalPoly
    cofactor: RationalPoly
    pencil: bool = False

    @property
    def degree(self) -> int:
        return self.poly.total_degree()

    def describe(self) -> dict:
        out = {
            "curve": str(self.poly),
            "cofactor": str(self.cofactor),
            "degree": self.degree,
        }
        if self.pencil:
            out["pencil"] = True
        return out

    def __str__(self) -> str:
        return str(self.poly)


@dataclass
class ExponentialFactor:
    """exp(g) for a polynomial g, with cofactor X(g).

    note is None when deg X(g) <= deg(system) - 1, the degree bound every
    invariant-curve cofactor obeys; factors outside that space are still
    reported (the product rule holds regardless) but can never cancel in
    an exponent relation against algebraic cofactors alone.
    """

    exponent_poly: RationalPoly
    cofactor: RationalPoly
    note: str | None = None

    def describe(self) -> dict:
        return {
            "factor": str(self),
            "cofactor": str(self.cofactor),
            "note": self.note,
        }

    def __str__(self) -> str:
        return f"exp({self.exponent_poly})"


def directional_derivative(system: PlanarSystem, f: RationalPoly) -> RationalPoly:
    """X(f) = P * df/dx + Q * df/dy."""
    x, y = system.variables
    return system.p_comp * f.diff(x) + system.q_comp * f.diff(y)


def cofactor_of(system: PlanarSystem, f: RationalPoly) -> RationalPoly:
    """The exact cofactor X(f)/f.

    Raises:
        NotInvariant: f does not divide X(f).
    """
    if f.is_zero or f.total_degree() == 0:
        raise NotInvariant("invariant curves must be nonconstant polynomials")
    xf = directional_derivative(system, f)
    if xf.is_zero:
        return RationalPoly.zero(f.variables)
    try:
        return divide_exact(xf, f)
    except NotDivisible as exc:
        raise NotInvariant(f"({f}) is not an invariant curve: {exc}") from exc


# ---------------------------------------------------------------------------
# bilinear system solver


def _substitute(eq: Equation, values: Mapping[Unknown, Fraction]) -> Equation:
    out: Equation = {}
    for key, c in eq.items():
        coeff = c
        rest = []
        for u in key:
            if u in values:
                coeff *= values[u]
            else:
                rest.append(u)
        if coeff:
            k2 = tuple(sorted(rest))
            new = out.get(k2, Fraction(0)) + coeff
            if new:
                out[k2] = new
            else:
                out.pop(k2, None)
    return out


def _substitute_unknown(eq: Equation, u: Unknown, expr: Equation) -> Equation:
    """Replace u by a polynomial expression in other unknowns inside eq."""
    out: Equation = {}

    def add(key: MonoKey, c: Fraction) -> None:
        if not c:
            return
        k2 = tuple(sorted(key))
        new = out.get(k2, Fraction(0)) + c
        if new:
            out[k2] = new
        else:
            out.pop(k2, None)

    for key, c in eq.items():
        count = sum(1 for v in key if v == u)
        rest = tuple(v for v in key if v != u)
        if count == 0:
            add(key, c)
            continue
        partial: Equation = {rest: c}
        for _ in range(count):
            grown: Equation = {}
            for k1, c1 in partial.items():
                for k2, c2 in expr.items():
                    kk = tuple(sorted(k1 + k2))
                    grown[kk] = grown.get(kk, Fraction(0)) + c1 * c2
            partial = grown
        for k, v in partial.items():
            add(k, v)
    return out


def _format_equations(eqs: list[Equation]) -> str:
    def name(u: Unknown) -> str:
        return f"{u[0]}{u[1][0]}{u[1][1]}"

    rendered = []
    for e in eqs:
        parts = [
            f"{c}*{'*'.join(name(u) for u in key) or '1'}"
            for key, c in sorted(e.items())
        ]
        rendered.append(" + ".join(parts) + " = 0")
    return "; ".join(rendered)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            out.append(n // d)
    return sorted(set(out))


def _rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """All rational roots of sum c_i t^i, via the rational root theorem."""
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ValueError("the zero polynomial has every root")
    roots = []
    if cs[0] == 0:
        roots.append(Fraction(0))
        while cs and cs[0] == 0:
            cs.pop(0)
    if len(cs) <= 1:
        return roots
    scale = math.lcm(*(c.denominator for c in cs))
    ints = [int(c * scale) for c in cs]
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand in roots:
                    continue
                if sum(c * cand**i for i, c in enumerate(cs)) == 0:
                    roots.append(cand)
    return roots


def _poly_det(matrix: list[list[RationalPoly]]) -> RationalPoly:
    """Determinant of a polynomial matrix by fraction-free (Bareiss)
    elimination; every division along the way is exact."""
    n = len(matrix)
    m = [row[:] for row in matrix]
    vars_ = m[0][0].variables
    sign = 1
    prev = RationalPoly.one(vars_)
    for col in range(n - 1):
        pivot = next((i for i in range(col, n) if not m[i][col].is_zero), None)
        if pivot is None:
            return RationalPoly.zero(vars_)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        for i in range(col + 1, n):
            for j in range(col + 1, n):
                num = m[i][j] * m[col][col] - m[i][col] * m[col][j]
                m[i][j] = divide_exact(num, prev) if not num.is_zero else num
            m[i][col] = RationalPoly.zero(vars_)
        prev = m[col][col]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def _eq_to_poly(eq: Equation, u: Unknown, v: Unknown) -> RationalPoly:
    terms = {}
    for key, c in eq.items():
        exps = (sum(1 for w in key if w == u), sum(1 for w in key if w == v))
        terms[exps] = terms.get(exps, Fraction(0)) + c
    return RationalPoly(terms, ("s", "t"))


def _resultant_in_t(e1: RationalPoly, e2: RationalPoly) -> RationalPoly:
    """Sylvester resultant eliminating t; entries stay polynomial in s."""
    d1, d2 = e1.degree_in("t"), e2.degree_in("t")
    zero = RationalPoly.zero(("s", "t"))

    def t_coeff(e: RationalPoly, j: int) -> RationalPoly:
        terms = {(i, 0): c for (i, k), c in e.terms.items() if k == j}
        return RationalPoly(terms, ("s", "t")) if terms else zero

    size = d1 + d2
    rows = []
    for shift in range(d2):
        row = [zero] * size
        for j in range(d1 + 1):
            row[shift + j] = t_coeff(e1, d1 - j)
        rows.append(row)
    for shift in range(d1):
        row = [zero] * size
        for j in range(d2 + 1):
            row[shift + j] = t_coeff(e2, d2 - j)
        rows.append(row)
    return _poly_det(rows)


def _eq_mul(e1: Equation, e2: Equation) -> Equation:
    out: Equation = {}
    for k1, c1 in e1.items():
        for k2, c2 in e2.items():
            kk = tuple(sorted(k1 + k2))
            new = out.get(kk, Fraction(0)) + c1 * c2
            if new:
                out[kk] = new
            else:
                out.pop(kk, None)
    return out


def _eq_pow(e: Equation, n: int) -> Equation:
    out: Equation = {(): Fraction(1)}
    for _ in range(n):
        out = _eq_mul(out, e)
    return out


def _eval_equation(e: Equation, values: Mapping[Unknown, Fraction]) -> Fraction:
    total = Fraction(0)
    for key, c in e.items():
        prod = c
        for u in key:
            prod *= values[u]
        total += prod
    return total


def _solve_system(
    equations: list[Equation], unknowns: list[Unknown]
) -> list[tuple[dict[Unknown, Fraction], set[Unknown]]]:
    """All rational solutions of a system of polynomial equations over Q.

    Returns (values, free) pairs: free unknowns may take any value and are
    reported at zero in values. Branches come from case splits (common
    factors, rational roots, vanishing pseudo-division cofactors); every
    candidate is verified against the original equations before it is
    accepted, so aggressive rules stay sound.

    Raises:
        SolverIncomplete: no progress rule applies to some branch.
    """
    solutions: list[tuple[dict[Unknown, Fraction], set[Unknown]]] = []
    # each branch: (determined values, pending rewrites, remaining
    # equations); a rewrite (u, num, den) deferred-defines u = num/den
    stack: list[tuple[dict, list, list[Equation]]] = [({}, [], list(equations))]
    while stack:
        values, rewrites, eqs = stack.pop()
        dead = False
        while True:
            eqs = [_substitute(e, values) for e in eqs]
            eqs = [e for e in eqs if e]
            if any(set(e) == {()} for e in eqs):
                dead = True
                break
            if not eqs:
                break
            progressed = False
            # rule 1: linear in a single unknown
            for i, e in enumerate(eqs):
                keys = set(e) - {()}
                if len(keys) == 1 and len(next(iter(keys))) == 1:
                    (u,) = next(iter(keys))
                    values[u] = -e.get((), Fraction(0)) / e[(u,)]
                    del eqs[i]
                    progressed = True
                    break
            if progressed:
                continue
            # rule 2: polynomial in a single unknown -> branch on its
            # rational roots (none -> the branch dies)
            for i, e in enumerate(eqs):
                names = {u for key in e for u in key}
                if len(names) == 1 and any(len(key) >= 2 for key in e):
                    (u,) = names
                    coeffs = [Fraction(0)] * (max(len(key) for key in e) + 1)
                    for key, c in e.items():
                        coeffs[len(key)] += c
                    rest = eqs[:i] + eqs[i + 1 :]
                    for root in _rational_roots(coeffs):
                        branch_vals = dict(values)
                        branch_vals[u] = root
                        stack.append((branch_vals, list(rewrites), list(rest)))
                    dead = True  # this branch is replaced by its children
                    progressed = True
                    break
            if progressed:
                break
            # rule 3: common unknown factor -> case split
            for i, e in enumerate(eqs):
                common = None
                for u in next(iter(e)):
                    if all(u in key for key in e):
                        common = u
                        break
                if common is not None:
                    rest_eqs = eqs[:i] + eqs[i + 1 :]
                    zero_vals = dict(values)
                    zero_vals[common] = Fraction(0)
                    stack.append((zero_vals, list(rewrites), list(rest_eqs)))
                    reduced = {}
                    for key, c in e.items():
                        idx = key.index(common)
                        reduced[key[:idx] + key[idx + 1 :]] = c
                    stack.append((dict(values), list(rewrites), rest_eqs + [reduced]))
                    dead = True
                    progressed = True
                    break
            if progressed:
                break
            # rule 4: bilinear equation in two unknowns that splits into
            # linear factors: c*uv + d*u + e*v + g = c(u + e/c)(v + d/c)
            # exactly when g = d*e/c
            for i, e in enumerate(eqs):
                names = sorted({u for key in e for u in key})
                if len(names) != 2:
                    continue
                u, v = names
                c = e.get((u, v), Fraction(0))
                if not c or (u, u) in e or (v, v) in e:
                    continue
                d = e.get((u,), Fraction(0))
                ev = e.get((v,), Fraction(0))
                if e.get((), Fraction(0)) != d * ev / c:
                    continue
                rest = eqs[:i] + eqs[i + 1 :]
                left = dict(values)
                left[u] = -ev / c
                stack.append((left, list(rewrites), list(rest)))
                right = dict(values)
                right[v] = -d / c
                stack.append((right, list(rewrites), list(rest)))
                dead = True
                progressed = True
                break
            if progressed:
                break
            # rule 5: purely linear equation in several unknowns -> eliminate
            for i, e in enumerate(eqs):
                if all(len(key) <= 1 for key in e):
                    target = sorted(key[0] for key in e if key)[0]
                    c = e[(target,)]
                    expr: Equation = {
                        key: -v / c for key, v in e.items() if key != (target,)
                    }
                    rest = eqs[:i] + eqs[i + 1 :]
                    eqs = [_substitute_unknown(e2, target, expr) for e2 in rest]
                    rewrites.append((target, expr, None))
                    progressed = True
                    break
            if progressed:
                continue
            # rule 6: a system in exactly two unknowns -> eliminate one with
            # a Sylvester resultant; rational roots of the resultant are the
            # only candidates for a rational solution
            names_all = sorted({u for e in eqs for key in e for u in key})
            if len(names_all) == 2 and len(eqs) >= 2:
                u, v = names_all
                polys = [_eq_to_poly(e, u, v) for e in eqs]
                for e1, e2 in combinations(polys, 2):
                    if e1.degree_in("t") + e2.degree_in("t") == 0:
                        continue
                    res = _resultant_in_t(e1, e2)
                    if res.is_zero:
                        continue
                    for root in _rational_roots(res.univariate_coeffs("s")):
                        branch_vals = dict(values)
                        branch_vals[u] = root
                        stack.append((branch_vals, list(rewrites), list(eqs)))
                    dead = True
                    progressed = True
                    break
            if progressed:
                break
            # rule 7 (last resort): pseudo-division elimination. Pick an
            # equation u*A + B = 0 that is linear in u. If A is constant,
            # substitute u = -B/A directly. Otherwise split: either A = 0
            # (and then B = 0 too), or A != 0 and u = -B/A, clearing u from
            # every other equation by multiplying through with powers of A.
            best = None
            for i, e in enumerate(eqs):
                for u in {w for key in e for w in key}:
                    if any(sum(1 for w in key if w == u) > 1 for key in e):
                        continue
                    if not any(u in key for key in e):
                        continue
                    a_part: Equation = {}
                    b_part: Equation = {}
                    for key, c in e.items():
                        if u in key:
                            idx = key.index(u)
                            a_part[key[:idx] + key[idx + 1 :]] = c
                        else:
                            b_part[key] = c
                    cost = (len(a_part), len(e), u)
                    if best is None or cost < best[0]:
                        best = (cost, i, u, a_part, b_part)
            if best is not None:
                _, i, u, a_part, b_part = best
                rest = eqs[:i] + eqs[i + 1 :]
                neg_b: Equation = {k: -c for k, c in b_part.items()}
                if set(a_part) <= {()}:
                    scale = a_part.get((), Fraction(0))
                    expr = {k: c / scale for k, c in neg_b.items()}
                    eqs = [_substitute_unknown(e2, u, expr) for e2 in rest]
                    rewrites.append((u, expr, None))
                    progressed = True
                else:
                    # branch A = 0: the equation forces B = 0 as well
                    stack.append(
                        (
                            dict(values),
                            list(rewrites),
                            rest + [dict(a_part), dict(b_part)],
                        )
                    )
                    # branch A != 0: u = -B/A after clearing denominators
                    cleared = []
                    for e2 in rest:
                        deg_u = max(
                            (sum(1 for w in key if w == u) for key in e2),
                            default=0,
                        )
                        if deg_u == 0:
                            cleared.append(e2)
                            continue
                        out: Equation = {}
                        for key, c in e2.items():
                            cnt = sum(1 for w in key if w == u)
                            stripped = tuple(w for w in key if w != u)
                            term = _eq_mul(
                                {stripped: c},
                                _eq_mul(
                                    _eq_pow(neg_b, cnt),
                                    _eq_pow(a_part, deg_u - cnt),
                                ),
                            )
                            for kk, cc in term.items():
                                new = out.get(kk, Fraction(0)) + cc
                                if new:
                                    out[kk] = new
                                else:
                                    out.pop(kk, None)
                        cleared.append(out)
                    new_rewrites = list(rewrites)
                    new_rewrites.append((u, neg_b, dict(a_part)))
                    stack.append((dict(values), new_rewrites, cleared))
                    dead = True
                    progressed = True
            if progressed:
                if dead:
                    break
                continue
            raise SolverIncomplete(
                "no exact rule applies to the remaining invariant-curve "
                f"equations: {_format_equations(eqs)}"
            )
        if dead:
            continue
        # back-substitute rewrites, newest first; untouched unknowns are
        # free and get a representative value (0 where possible, else the
        # first small value that keeps every rewrite denominator nonzero)
        free = {u for u in unknowns if u not in values} - {
            t for t, _, _ in rewrites
        }
        for rep in (0, 1, -1, 2, -2, 3):
            full = dict(values)
            for u in free:
                full[u] = Fraction(rep)
            valid = True
            for target, num, den in reversed(rewrites):
                scale = (
                    _eval_equation(den, full) if den is not None else Fraction(1)
                )
                if scale == 0:
                    valid = False  # covered by the A = 0 branch
                    break
                full[target] = _eval_equation(num, full) / scale
            if valid and not any(_eval_equation(e, full) for e in equations):
                solutions.append((full, free))
                break
            if not free:
                break  # nothing to vary; the candidate is simply spurious
    return solutions


# ---------------------------------------------------------------------------
# invariant curve search


def _monomials_upto(degree: int) -> list[tuple[int, int]]:
    out = [
        (i, d - i)
        for d in range(degree + 1)
        for i in range(d, -1, -1)
    ]
    return out


def _grlex_less(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return (a[0] + a[1], a[0]) < (b[0] + b[1], b[0])


def find_algebraic_invariants(
    system: PlanarSystem, max_degree: int = 2
) -> list[InvariantCurve]:
    """All invariant algebraic curves of degree <= max_degree with rational
    coefficients, up to scaling, sorted by (degree, text form).

    For each candidate leading monomial (in graded-lex order) the curve is
    normalized monic, so every rational curve appears exactly once.
    Reducible solutions (products of lower-degree invariant curves) are
    dropped; if the equations admit a positive-dimensional family, one
    representative is returned with its pencil flag set.

    Raises:
        SolverIncomplete: the bilinear solver could not finish a branch.
    """
    x_name, y_name = system.variables
    sys_degree = max(system.p_comp.total_degree(), system.q_comp.total_degree())
    cof_monos = _monomials_upto(max(sys_degree - 1, 0))
    found: list[InvariantCurve] = []
    seen: set[RationalPoly] = set()
    for degree in range(1, max_degree + 1):
        for lead in [(i, degree - i) for i in range(degree, -1, -1)]:
            f_monos = [m for m in _monomials_upto(degree) if _grlex_less(m, lead)]
            f_unknowns: list[Unknown] = [("f", m) for m in f_monos]
            k_unknowns: list[Unknown] = [("k", m) for m in cof_monos]
            equations = _curve_equations(system, lead, f_monos, cof_monos)
            for sol, free in _solve_system(equations, f_unknowns + k_unknowns):
                terms = {lead: Fraction(1)}
                for m in f_monos:
                    terms[m] = sol[("f", m)]
                f = RationalPoly(terms, (x_name, y_name)).primitive()
                if f in seen:
                    continue
                if any(_divides(g.poly, f) for g in found):
                    continue
                seen.add(f)
                found.append(
                    InvariantCurve(
                        f,
                        cofactor_of(system, f),
                        pencil=any(u[0] == "f" for u in free),
                    )
                )
    found.sort(key=lambda c: (c.degree, str(c.poly)))
    return found


def _curve_equations(
    system: PlanarSystem,
    lead: tuple[int, int],
    f_monos: list[tuple[int, int]],
    cof_monos: list[tuple[int, int]],
) -> list[Equation]:
    """Coefficient equations of X(f) - k*f = 0 for the monic ansatz."""
    x_name, y_name = system.variables
    vars_ = (x_name, y_name)
    collected: dict[tuple[int, int], Equation] = {}

    def add(mono: tuple[int, int], key: MonoKey, c: Fraction) -> None:
        if not c:
            return
        eq = collected.setdefault(mono, {})
        k2 = tuple(sorted(key))
        new = eq.get(k2, Fraction(0)) + c
        if new:
            eq[k2] = new
        else:
            eq.pop(k2, None)

    def x_of_monomial(m: tuple[int, int]) -> RationalPoly:
        mono = RationalPoly.monomial(1, m, vars_)
        return directional_derivative(system, mono)

    # X(f): linear in the f unknowns, plus the known leading part
    for (i, j), c in x_of_monomial(lead).terms.items():
        add((i, j), (), c)
    for m in f_monos:
        for (i, j), c in x_of_monomial(m).terms.items():
            add((i, j), (("f", m),), c)
    # -k*f
    for km in cof_monos:
        add((km[0] + lead[0], km[1] + lead[1]), (("k", km),), Fraction(-1))
        for fm in f_monos:
            add(
                (km[0] + fm[0], km[1] + fm[1]),
                (("k", km), ("f", fm)),
                Fraction(-1),
            )
    return list(collected.values())


def _divides(g: RationalPoly, f: RationalPoly) -> bool:
    if g.total_degree() >= f.total_degree():
        return False
    try:
        divide_exact(f, g)
        return True
    except NotDivisible:
        return False


# ---------------------------------------------------------------------------
# exponential factors and exponent relations


def find_exponential_factors(
    system: PlanarSystem,
    max_degree: int = 2,
    candidates: Iterable[RationalPoly] | None = None,
) -> list[ExponentialFactor]:
    """Exponential factors exp(g) for monomial exponents g of degree
    <= max_degree, each with its cofactor X(g).

    Every nonconstant monomial g gives a formal factor (X(g) is always a
    polynomial); candidates whose cofactor is zero are first integrals,
    not factors, and are skipped. Cofactors of degree above
    deg(system) - 1 fall outside the space spanned by invariant-curve
    cofactors; those factors carry a note saying so instead of being
    dropped. An explicit candidates list overrides the monomial basis.
    """
    if candidates is None:
        if max_degree not in (1, 2):
            raise ValueError("max_degree must be 1 or 2")
        x_name, y_name = system.variables
        vars_ = (x_name, y_name)
        exponents = [(1, 0), (0, 1)]
        if max_degree == 2:
            exponents += [(2, 0), (1, 1), (0, 2)]
        candidates = [RationalPoly.monomial(1, m, vars_) for m in exponents]
    bound = max(system.p_comp.total_degree(), system.q_comp.total_degree()) - 1
    out = []
    for g in candidates:
        cof = directional_derivative(system, g)
        if cof.is_zero:
            continue
        note = None
        if cof.total_degree() > bound:
            note = (
                f"cofactor degree {cof.total_degree()} exceeds the "
                f"relation-space bound {bound}"
            )
        out.append(ExponentialFactor(g, cof, note))
    return out


def solve_exponent_relation(
    cofactors: Sequence[RationalPoly],
) -> list[tuple[Fraction, ...]]:
    """Basis of all exact exponent relations sum_i c_i * cofactor_i = 0.

    Vectors are normalized primitive integer with positive last nonzero
    entry; the empty list means only the trivial relation exists.
    """
    if not cofactors:
        return []
    monos = sorted({m for k in cofactors for m in k.terms})
    matrix = [[k.coefficient(m) for k in cofactors] for m in monos]
    return _nullspace(matrix, len(cofactors))


def _nullspace(matrix: list[list[Fraction]], width: int) -> list[tuple[Fraction, ...]]:
    rows = [list(map(Fraction, row)) for row in matrix]
    pivots: list[int] = []
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rows[r] = [v / rows[r][col] for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    basis = []
    free_cols = [c for c in range(width) if c not in pivots]
    for fc in free_cols:
        vec = [Fraction(0)] * width
        vec[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            vec[pc] = -rows[row_idx][fc]
        basis.append(_primitive_vector(vec))
    return basis


def _primitive_vector(vec: list[Fraction]) -> tuple[Fraction, ...]:
    denom = math.lcm(*(v.denominator for v in vec)) if vec else 1
    ints = [int(v * denom) for v in vec]
    g = math.gcd(*ints) if any(ints) else 1
    ints = [v // g for v in ints]
    last = next((v for v in reversed(ints) if v), 1)
    if last < 0:
        ints = [-v for v in ints]
    return tuple(Fraction(v) for v in ints)


# ---------------------------------------------------------------------------
# first integrals


@dataclass
class FirstIntegral:
    """H = prod curve_i^lambda_i * prod exp(g_j)^mu_j with exact exponents."""

    curve_factors: list[tuple[RationalPoly, Fraction]]
    exp_factors: list[tuple[RationalPoly, Fraction]] = field(default_factory=list)

    @property
    def is_algebraic(self) -> bool:
        return not self.exp_factors

    def evaluate(self, x: float, y: float) -> float:
        """Value at a point.

        Raises:
            PoleOrBranch: a factor with negative exponent vanishes, or a
                fractional power would have a negative base.
        """
        total = 1.0
        for poly, lam in self.curve_factors:
            base = poly.eval_float(x, y)
            if base == 0.0 and lam < 0:
                raise PoleOrBranch(f"pole: ({poly}) = 0 at ({x}, {y})")
            if base < 0.0 and lam.denominator != 1:
                raise PoleOrBranch(
                    f"branch point: ({poly}) < 0 under exponent {lam}"
                )
            total *= base ** float(lam)
        for g, mu in self.exp_factors:
            total *= math.exp(g.eval_float(x, y)) ** float(mu)
        return total

    def evaluate_exact(self, x: Scalar, y: Scalar) -> Fraction:
        """Exact value at a rational point; only for algebraic H with
        integer exponents."""
        if self.exp_factors:
            raise ValueError("exact evaluation needs an algebraic integral")
        total = Fraction(1)
        for poly, lam in self.curve_factors:
            if lam.denominator != 1:
                raise ValueError("exact evaluation needs integer exponents")
            base = poly.eval_exact(x, y)
            if base == 0 and lam < 0:
                raise PoleOrBranch(f"pole: ({poly}) = 0")
            total *= Fraction(base) ** int(lam)
        return total

    def rational_form(self) -> str | None:
        """Numerator/denominator text when every exponent is an integer."""
        if any(lam.denominator != 1 for _, lam in self.curve_factors) or any(
            mu.denominator != 1 for _, mu in self.exp_factors
        ):
            return None

        def chunk(text: str, power: Fraction) -> str:
            e = abs(int(power))
            return f"({text})" if e == 1 else f"({text})^{e}"

        nums = [chunk(str(p), lam) for p, lam in self.curve_factors if lam > 0]
        nums += [chunk(f"exp({g})", mu) for g, mu in self.exp_factors if mu > 0]
        dens = [chunk(str(p), lam) for p, lam in self.curve_factors if lam < 0]
        dens += [chunk(f"exp({g})", mu) for g, mu in self.exp_factors if mu < 0]
        top = "*".join(nums) if nums else "1"
        if not dens:
            return top
        bottom = "*".join(dens) if len(dens) == 1 else "(" + "*".join(dens) + ")"
        return f"{top}/{bottom}"

    def describe(self) -> dict:
        return {
            "curve_factors": [
                {"curve": str(p), "exponent": str(lam)}
                for p, lam in self.curve_factors
            ],
            "exponential_factors": [
                {"factor": f"exp({g})", "exponent": str(mu)}
                for g, mu in self.exp_factors
            ],
            "algebraic": self.is_algebraic,
            "text": str(self),
        }

    def __str__(self) -> str:
        form = self.rational_form()
        if form is not None:
            return form
        parts = []
        for p, lam in self.curve_factors:
            parts.append(f"({p})^({lam})" if lam != 1 else f"({p})")
        for g, mu in self.exp_factors:
            parts.append(f"exp({g})^({mu})" if mu != 1 else f"exp({g})")
        return "*".join(parts)


def build_first_integral(
    system: PlanarSystem,
    invariants: Sequence[InvariantCurve],
    exp_factors: Sequence[ExponentialFactor],
    exponents: Sequence[Scalar],
) -> FirstIntegral:
    """Assemble H from factor lists and one exponent vector, verifying the
    cofactor relation exactly.

    Raises:
        RelationFails: the exponents do not cancel the cofactors, or the
            vector is trivial.
    """
    vec = [_coerce(e) for e in exponents]
    if len(vec) != len(invariants) + len(exp_factors):
        raise RelationFails(
            f"expected {len(invariants) + len(exp_factors)} exponents, got {len(vec)}"
        )
    if not any(vec):
        raise RelationFails("the zero exponent vector builds no first integral")
    total = RationalPoly.zero(system.variables)
    for lam, inv in zip(vec, invariants):
        total = total + inv.cofactor * lam
    for mu, ef in zip(vec[len(invariants) :], exp_factors):
        total = total + ef.cofactor * mu
    if not total.is_zero:
        raise RelationFails(
            f"cofactor relation does not cancel: residual {total}"
        )
    curves = [
        (inv.poly, lam) for inv, lam in zip(invariants, vec[: len(invariants)]) if lam
    ]
    exps = [
        (ef.exponent_poly, mu)
        for ef, mu in zip(exp_factors, vec[len(invariants) :])
        if mu
    ]
    return FirstIntegral(curves, exps)


def minimal_support_relation(
    cofactors: Sequence[RationalPoly],
) -> tuple[Fraction, ...] | None:
    """The canonical exponent relation: among all exact relations, the one
    supported on the smallest factor subset, ties broken by earliest
    subset in lexicographic index order.

    Within a nontrivial relation space this pins a single representative,
    so a system with several independent first integrals still reports a
    deterministic one.
    """
    n = len(cofactors)
    for size in range(2, n + 1):
        for subset in combinations(range(n), size):
            basis = solve_exponent_relation([cofactors[i] for i in subset])
            for vec in basis:
                if not all(vec):
                    continue  # a smaller support was or will be tried
                full = [Fraction(0)] * n
                for idx, value in zip(subset, vec):
                    full[idx] = value
                return tuple(full)
    return None


def canonical_first_integral(
    system: PlanarSystem, max_degree: int = 2
) -> FirstIntegral:
    """The canonical first integral of the system.

    Strategy: find the invariant curves; if one has a zero cofactor it is
    itself a polynomial first integral. Otherwise look for a
    minimal-support exponent relation among the algebraic cofactors alone,
    then adjoin exponential factors one at a time (in finder order) until
    a relation appears.

    Raises:
        RelationFails: no relation exists within the searched factors.
        SolverIncomplete: propagated from the curve search.
    """
    invariants = find_algebraic_invariants(system, max_degree)
    for inv in invariants:
        if inv.cofactor.is_zero:
            return FirstIntegral([(inv.poly, Fraction(1))])
    exp_all = find_exponential_factors(system)
    for n_exp in range(len(exp_all) + 1):
        chosen = exp_all[:n_exp]
        cofs = [inv.cofactor for inv in invariants] + [e.cofactor for e in chosen]
        relation = minimal_support_relation(cofs)
        if relation is not None:
            return build_first_integral(system, invariants, chosen, relation)
    raise RelationFails(
        "no exponent relation among the invariant curves and exponential "
        f"factors found (degrees <= {max_degree})"
    )
