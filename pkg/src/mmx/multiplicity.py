"""Exact fitting of eventually polynomial functions and multiplicity extraction."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import DimensionMismatch, NonIntegerMultiplicity, StabilizationFailure
from .graded import (
    DerivedModule,
    GradedPiece,
    Instance,
    length_h_br,
    length_h_mixed,
    saturated_data,
)

log = logging.getLogger(__name__)

Point = Tuple[int, ...]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("MMX_THREADS", "0")) or (os.cpu_count() or 1))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FitPolicy:
    base_offset: Optional[int] = None  # default: degree bound + 2
    step: int = 2
    retries: int = 4


@dataclass
class EventualPolynomial:
    arity: int
    coefficients: Dict[Tuple[int, ...], Fraction]
    base_offset: int
    degree_bound: int
    validation_record: List[Tuple[Point, int, Fraction]] = field(default_factory=list)

    def __call__(self, *point: int) -> Fraction:
        total = Fraction(0)
        for e, c in self.coefficients.items():
            term = c
            for x, k in zip(point, e):
                term *= x ** k
            total += term
        return total

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.coefficients), default=-1)

    def top_form(self, degree: Optional[int] = None) -> Dict[Tuple[int, ...], Fraction]:
        degree = self.degree_bound if degree is None else degree
        return {e: c for e, c in self.coefficients.items() if sum(e) == degree}

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.coefficients.get(tuple(exps), Fraction(0))

    def restrict(self, values: Dict[int, int]) -> Dict[Tuple[int, ...], Fraction]:
        """Substitute fixed values for some variables; the rest stay free (in order)."""
        free = [i for i in range(self.arity) if i not in values]
        out: Dict[Tuple[int, ...], Fraction] = {}
        for e, c in self.coefficients.items():
            term = c
            for i, v in values.items():
                term *= v ** e[i]
            key = tuple(e[i] for i in free)
            out[key] = out.get(key, Fraction(0)) + term
        return {k: v for k, v in out.items() if v}

    def residuals(self) -> List[Fraction]:
        return [Fraction(v) - pred for _, v, pred in self.validation_record]


def _binomial_poly(a: int, shift: int) -> List[Fraction]:
    """Coefficients (low to high) of C(x - shift, a) as a polynomial in x."""
    poly = [Fraction(1)]
    for k in range(a):
        root = shift + k
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] += c
            nxt[i] -= c * root
        poly = [c / (k + 1) for c in nxt]
    return poly


def interpolate_tensor(values: Dict[Point, int], arity: int, u0: int, D: int) -> Dict[Tuple[int, ...], Fraction]:
    """Exact interpolation of grid data on {u0..u0+D}^arity, returned in the monomial basis."""
    diffs: Dict[Point, Fraction] = {a: Fraction(values[tuple(u0 + t for t in a)])
                                    for a in product(range(D + 1), repeat=arity)}
    # forward differences along each axis in place
    for axis in range(arity):
        for level in range(1, D + 1):
            for a in sorted(diffs, key=lambda t: -t[axis]):
                if a[axis] >= level:
                    prev = a[:axis] + (a[axis] - 1,) + a[axis + 1:]
                    diffs[a] = diffs[a] - diffs[prev]
        # after the loop, diffs[a] holds Delta^{a[axis]} along this axis at base point
    basis = [[_binomial_poly(k, u0) for k in range(D + 1)]]
    coeffs: Dict[Tuple[int, ...], Fraction] = {}
    for a, dv in diffs.items():
        if not dv:
            continue
        term = {(): dv}
        for k in a:
            b = basis[0][k]
            nxt = {}
            for e, c in term.items():
                for i, bc in enumerate(b):
                    if bc:
                        key = e + (i,)
                        nxt[key] = nxt.get(key, Fraction(0)) + c * bc
            term = nxt
        for e, c in term.items():
            coeffs[e] = coeffs.get(e, Fraction(0)) + c
    return {e: c for e, c in coeffs.items() if c}


def shell_points(arity: int, u0: int, D: int) -> List[Point]:
    far = u0 + D + 1
    pts = []
    for i in range(arity):
        pts.append(tuple(far if j == i else u0 for j in range(arity)))
    pts.append((far,) * arity)
    return pts


def fit_eventual_polynomial(evaluator: Callable[..., int], arity: int, degree_bound: int,
                            policy: FitPolicy = FitPolicy(), workers: Optional[int] = None) -> EventualPolynomial:
    """Fit an eventually polynomial integer function of total degree <= degree_bound.

    Interpolates on the tensor grid and validates on a shell of points just
    outside it; on mismatch the grid is shifted outward and the fit retried.
    """
    D = max(degree_bound, 0)
    u0 = policy.base_offset if policy.base_offset is not None else D + 2
    memo: Dict[Point, int] = {}
    workers = workers or worker_count()
    last_residuals: List = []

    def evaluate(points: Sequence[Point]) -> None:
        todo = [pt for pt in dict.fromkeys(points) if pt not in memo]
        if not todo:
            return
        if workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda pt: evaluator(*pt), todo))
        else:
            results = [evaluator(*pt) for pt in todo]
        for pt, v in zip(todo, results):
            memo[pt] = int(v)

    for attempt in range(policy.retries + 1):
        grid = [tuple(u0 + t for t in a) for a in product(range(D + 1), repeat=arity)]
        shell = shell_points(arity, u0, D)
        evaluate(grid + shell)
        coeffs = interpolate_tensor(memo, arity, u0, D)
        poly = EventualPolynomial(arity, coeffs, u0, degree_bound)
        record = [(pt, memo[pt], poly(*pt)) for pt in shell]
        residuals = [(pt, v - pred) for pt, v, pred in record if v != pred]
        too_high = poly.total_degree > degree_bound
        if not residuals and not too_high:
            poly.validation_record = record
            return poly
        last_residuals = residuals or [("total degree", poly.total_degree)]
        log.debug("fit attempt %d at u0=%d failed: %s", attempt, u0, last_residuals)
        u0 += policy.step
    raise StabilizationFailure(
        f"no polynomial of degree <= {degree_bound} fits after {policy.retries} retries", last_residuals)


def _integer(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise NonIntegerMultiplicity(f"{what} = {value} is not an integer")
    return int(value)


# ----------------------------------------------------------------------------
# Buchsbaum-Rim


def _as_state(obj) -> DerivedModule:
    return obj.module() if isinstance(obj, Instance) else obj


def br_polynomial(state, I: Optional[GradedPiece] = None, degree: Optional[int] = None,
                  policy: FitPolicy = FitPolicy()) -> EventualPolynomial:
    state = _as_state(state)
    r = state.base.proj_dim if degree is None else degree
    return fit_eventual_polynomial(lambda n, s: length_h_br(state, n, s, I), 2, r, policy)


def buchsbaum_rim_all(state, I: Optional[GradedPiece] = None, degree: Optional[int] = None,
                      policy: FitPolicy = FitPolicy()) -> List[int]:
    """[e^0, ..., e^r] where e^j = (r-j)! j! * coeff of n^(r-j) s^j in l(M_{n+s}/I^n M_s)."""
    state = _as_state(state)
    r = state.base.proj_dim if degree is None else degree
    poly = br_polynomial(state, I, r, policy)
    return [_integer(poly.coefficient((r - j, j)) * factorial(r - j) * factorial(j), f"e^{j}")
            for j in range(r + 1)]


def buchsbaum_rim(state, j: int = 0, I: Optional[GradedPiece] = None, degree: Optional[int] = None,
                  policy: FitPolicy = FitPolicy()) -> int:
    state = _as_state(state)
    r = state.base.proj_dim if degree is None else degree
    if not 0 <= j <= r:
        raise ValueError(f"j must lie in 0..{r}")
    return buchsbaum_rim_all(state, I, r, policy)[j]


# ----------------------------------------------------------------------------
# mixed multiplicities

Key = Tuple[int, int, Tuple[int, ...]]  # (j, k0, k)


def entry_label(j: int, k0: int, k: Sequence[int]) -> str:
    return f"e^{j}[{k0};{','.join(str(x) for x in k)}]"


@dataclass
class MultiplicityTable:
    D: int
    q: int
    entries: Dict[Key, int]
    polynomial: Optional[EventualPolynomial] = None

    def get(self, j: int, k0: int, k: Sequence[int]) -> int:
        return self.entries[(j, k0, tuple(k))]

    def keys_sorted(self) -> List[Key]:
        return sorted(self.entries, key=lambda t: (t[0], -t[1], tuple(-x for x in t[2])))

    def labelled(self) -> Dict[str, int]:
        return {entry_label(j, k0, k): self.entries[(j, k0, k)] for (j, k0, k) in self.keys_sorted()}

    def top_form(self) -> Dict[Tuple[int, ...], Fraction]:
        """Re-synthesise the degree-D part of the polynomial in (n, s, r_1..r_q)."""
        out = {}
        for (j, k0, k), e in self.entries.items():
            if e:
                denom = factorial(k0) * factorial(j)
                for x in k:
                    denom *= factorial(x)
                out[(k0, j) + k] = Fraction(e, denom)
        return out


def compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def mixed_polynomial(state, D: int, policy: FitPolicy = FitPolicy()) -> EventualPolynomial:
    state = _as_state(state)
    q = state.base.q

    def h(n, s, *r):
        return length_h_mixed(state, n, s, r)

    try:
        return fit_eventual_polynomial(h, q + 2, D, policy)
    except StabilizationFailure as exc:
        # diagnostic: does one degree more fit?  then the dimension is off
        try:
            alt = fit_eventual_polynomial(h, q + 2, D + 1, policy)
        except StabilizationFailure:
            raise exc
        if alt.total_degree != D:
            raise DimensionMismatch(f"fitted degree {alt.total_degree} differs from D = {D}") from exc
        return alt


def table_from_polynomial(poly: EventualPolynomial, D: int, q: int) -> MultiplicityTable:
    entries: Dict[Key, int] = {}
    for parts in compositions(D, q + 2):
        j, k0, k = parts[0], parts[1], parts[2:]
        coeff = poly.coefficient((k0, j) + k)
        scale = factorial(k0) * factorial(j)
        for x in k:
            scale *= factorial(x)
        value = _integer(coeff * scale, entry_label(j, k0, k))
        if value < 0:
            raise NonIntegerMultiplicity(f"{entry_label(j, k0, k)} = {value} is negative")
        entries[(j, k0, tuple(k))] = value
    return MultiplicityTable(D, q, entries, poly)


def mixed_multiplicities(inst, policy: FitPolicy = FitPolicy()) -> MultiplicityTable:
    """All e^j(J^[k0], I_1^[k1], ..., I_q^[kq]; M) with j + k0 + |k| = D."""
    state = _as_state(inst)
    D = saturated_data(state).D
    poly = mixed_polynomial(state, D, policy)
    return table_from_polynomial(poly, D, state.base.q)


# ----------------------------------------------------------------------------
# specializations


def _poly_of(obj) -> EventualPolynomial:
    if isinstance(obj, MultiplicityTable):
        return obj.polynomial
    if isinstance(obj, EventualPolynomial):
        return obj
    table = mixed_multiplicities(obj)
    return table.polynomial


def default_u(poly: EventualPolynomial) -> int:
    return poly.base_offset + poly.degree_bound + 7


def specialized_Q(obj, slot: int, u: Optional[int] = None) -> Tuple[Dict[int, Fraction], int]:
    """Q(r) = B(u, ..., r_slot, ..., u) for slot in 1..q; returns (coefficients, degree).

    The zero polynomial has degree -1.
    """
    poly = _poly_of(obj)
    q = poly.arity - 2
    if not 1 <= slot <= q:
        raise ValueError(f"slot must lie in 1..{q}")
    u = default_u(poly) if u is None else u
    fixed = {i: u for i in range(poly.arity) if i != slot + 1}
    restricted = poly.restrict(fixed)
    coeffs = {e[0]: c for e, c in restricted.items()}
    return coeffs, max(coeffs, default=-1)


def max_LU_degree(obj, u: Optional[int] = None) -> int:
    """deg Q(r_1..r_q) + 1 where Q = B(u, u, r)."""
    poly = _poly_of(obj)
    u = default_u(poly) if u is None else u
    restricted = poly.restrict({0: u, 1: u})
    return max((sum(e) for e in restricted), default=-1) + 1
