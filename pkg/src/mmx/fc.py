"""(FC)-element predicates, randomized sequence construction, reductions and analytic spread.

Checks are run against a family: by default (J, I_1, ..., I_q; M), where J takes
part in the window of the intersection condition and in the saturating ideal.
Passing ``with_J=False`` drops J and works with (I_1, ..., I_q; M).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import Exps, Polynomial, iter_monomials, poly_mul_raw
from .errors import (
    DegenerateInstance,
    DimensionDropFailure,
    ReductionCertificationFailure,
    SearchExhausted,
)
from .graded import (
    DerivedModule,
    GradedPiece,
    Instance,
    calI,
    piece_power,
    r_vectors,
    saturated_data,
    support_dim,
)
from .groebner import (
    Submodule,
    colon_by_element,
    hilbert_series_quotient,
    krull_dim,
    make_monic,
    minimal_generating_set,
    saturate,
)
from .multiplicity import FitPolicy, fit_eventual_polynomial

SEARCH_ATTEMPTS = 24


@dataclass(frozen=True)
class Window:
    r_start: int
    width: int = 2
    s_max: int = 2

    def enlarged(self) -> "Window":
        return Window(self.r_start + self.width + 1, self.width, self.s_max)

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.r_start, self.width, self.s_max)


@dataclass
class FcCertificate:
    element: Polynomial
    slot: int
    fc1_window: Tuple[int, int, int]
    fc1_points: int
    fc2_witness: int  # number of colon generators shown to lie in the saturation
    fc3_dims: Optional[Tuple[int, int]] = None
    seed: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "element": str(self.element),
            "slot": self.slot,
            "fc1_window": list(self.fc1_window),
            "fc1_points": self.fc1_points,
            "fc2_generators_checked": self.fc2_witness,
            "fc3_dims": list(self.fc3_dims) if self.fc3_dims else None,
            "seed": self.seed,
        }


@dataclass
class FcFailure:
    reason: str
    point: Optional[Tuple[int, ...]] = None

    def __bool__(self):
        return False


@dataclass
class FcSequence:
    certificates: List[FcCertificate]
    states: List[DerivedModule]
    maximal: bool
    with_J: bool = True

    @property
    def length(self) -> int:
        return len(self.certificates)

    @property
    def elements(self) -> List[Polynomial]:
        return [c.element for c in self.certificates]

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "maximal": self.maximal,
            "family": "J,I" if self.with_J else "I",
            "certificates": [c.to_json() for c in self.certificates],
        }


# ----------------------------------------------------------------------------
# helpers


def _state(obj) -> DerivedModule:
    return obj.module() if isinstance(obj, Instance) else obj


def family_pieces(inst: Instance, with_J: bool = True) -> Tuple[GradedPiece, ...]:
    return ((inst.J,) if with_J else ()) + inst.I_list


def family_ideal(inst: Instance, with_J: bool = True) -> Submodule:
    return calI(inst, family_pieces(inst, with_J))


def default_window(inst: Instance) -> Window:
    D = saturated_data(inst.module(), allow_degenerate=True).D
    return Window(max(D, 0) + 2)


def _hs_equal(a: Submodule, b: Submodule) -> bool:
    return hilbert_series_quotient(a) == hilbert_series_quotient(b)


def _require_linear(inst: Instance, i: int) -> GradedPiece:
    if not 1 <= i <= inst.q:
        raise ValueError(f"slot {i} outside 1..{inst.q}")
    piece = inst.I_list[i - 1]
    if piece.tdeg != 1:
        raise ValueError("(FC) machinery needs pieces of T-degree 1")
    return piece


def _poly_of(x) -> Dict[Exps, int]:
    return dict(x.terms) if isinstance(x, Polynomial) else dict(x)


def membership_clause(x: Polynomial, piece: GradedPiece, previous: Sequence[Polynomial] = ()) -> Optional[str]:
    """None when x lies in I and not in m*I + R*(previous); otherwise the reason."""
    ring = piece.ring
    if x.is_zero():
        return "x is zero"
    if not x.is_homogeneous() or x.tdeg != 1:
        return "x is not homogeneous of T-degree 1"
    amb, gens = r_vectors([dict(g.terms) for g in piece.generators], ring, 1, 1, scalar=True)
    _, (xv,) = r_vectors([dict(x.terms)], ring, 1, 1, scalar=True)
    if not Submodule(amb, gens).contains(xv):
        return "x is not in I"
    small = []
    for g in gens:
        for k in range(ring.d):
            small.append({(pos, e[:k] + (e[k] + 1,) + e[k + 1:]): c for (pos, e), c in g.items()})
    prev = [v for v in r_vectors([dict(y.terms) for y in previous if y.tdeg == 1], ring, 1, 1, scalar=True)[1]]
    if Submodule(amb, small + prev).contains(xv):
        return "x lies in m*I"
    return None


# ----------------------------------------------------------------------------
# predicates


def is_filter_regular(x: Polynomial, state, with_J: bool = True, ideal: Optional[Submodule] = None):
    """(FC2): (0 :_M x) inside (0 :_M I^inf).  Returns (flag, number of generators checked)."""
    state = _state(state)
    K = state.relations
    ideal = ideal or family_ideal(state.base, with_J)
    colon = colon_by_element(K, _poly_of(x))
    sat = saturate(K, ideal)
    gens = colon.generators
    for g in gens:
        if not sat.contains(g):
            return False, len(gens)
    return True, len(gens)


def window_points(q: int, i: int, window: Window, with_J: bool):
    """(j_power, r, s) over the window box.

    Slot i runs over r_start..r_start+width and the other I-slots over 0..width.
    The J-power runs over 0..r_start+width: order-raising elements such as
    y^3 + x^3 in (x^2, y^3) only break the intersection condition once the
    J-power passes the other exponents.
    """
    lo_hi = []
    if with_J:
        lo_hi.append(range(0, window.r_start + window.width + 1))
    for slot in range(1, q + 1):
        if slot == i:
            lo_hi.append(range(window.r_start, window.r_start + window.width + 1))
        else:
            lo_hi.append(range(0, window.width + 1))
    lo_hi.append(range(0, window.s_max + 1))
    for pt in product(*lo_hi):
        if with_J:
            yield pt[0], pt[1:-1], pt[-1]
        else:
            yield 0, pt[:-1], pt[-1]


def fc1_at(state: DerivedModule, x: Polynomial, i: int, a: int, r: Tuple[int, ...], s: int, with_J: bool) -> bool:
    """I^r M_s cap x M_{N-1} == x I^(r - delta(i)) M_s in the component N (J^a included)."""
    inst = state.base
    pieces = family_pieces(inst, with_J)
    exps = ((a,) if with_J else ()) + tuple(r)
    lower = list(exps)
    lower[i - 1 + (1 if with_J else 0)] -= 1
    N = sum(exps) + s
    A = state.component_submodule(piece_power(pieces, exps), s)
    X = state.component_submodule([_poly_of(x)], N - 1)
    xpolys = [poly_mul_raw(f, _poly_of(x), inst.ring.characteristic) for f in piece_power(pieces, tuple(lower))]
    xpolys = [f for f in xpolys if f]
    if xpolys:
        rhs = state.component_submodule(xpolys, s)
    else:
        rhs = state.relations_submodule(N)
    # HS(F/(A cap X)) = HS(F/A) + HS(F/X) - HS(F/(A+X)); rhs is contained in A cap X
    hs_cap = hilbert_series_quotient(A) + hilbert_series_quotient(X) - hilbert_series_quotient(A + X)
    return hs_cap == hilbert_series_quotient(rhs)


def satisfies_fc1(x: Polynomial, i: int, state, window: Optional[Window] = None, with_J: bool = True):
    """(FC1) on a window box.  Returns (flag, points checked, first failing point or None)."""
    state = _state(state)
    inst = state.base
    piece = _require_linear(inst, i)
    why = membership_clause(x, piece, state.quotient_by)
    if why:
        return False, 0, why
    window = window or default_window(inst)
    count = 0
    for a, r, s in window_points(inst.q, i, window, with_J):
        count += 1
        if not fc1_at(state, x, i, a, r, s, with_J):
            return False, count, (a,) + tuple(r) + (s,)
    return True, count, None


def _check_weak(x, i, state, window, with_J, enlarge=True):
    ok, count, where = satisfies_fc1(x, i, state, window, with_J)
    if not ok and enlarge and not isinstance(where, str):
        window = window.enlarged()
        ok, count, where = satisfies_fc1(x, i, state, window, with_J)
    if not ok:
        return FcFailure("FC1 fails" + (f": {where}" if isinstance(where, str) else ""),
                         None if isinstance(where, str) else where)
    reg, nchecked = is_filter_regular(x, state, with_J)
    if not reg:
        return FcFailure("FC2 fails: x is not filter-regular")
    return FcCertificate(x, i, window.as_tuple(), count, nchecked)


def is_weak_fc_element(x: Polynomial, i: int, state, window: Optional[Window] = None, with_J: bool = True,
                       seed: Optional[int] = None) -> Union[FcCertificate, FcFailure]:
    state = _state(state)
    window = window or default_window(state.base)
    out = _check_weak(x, i, state, window, with_J)
    if isinstance(out, FcCertificate):
        out.seed = seed
    return out


def fc3_dims(x: Polynomial, state, with_J: bool = True) -> Tuple[int, int]:
    """(dim Supp M*, dim Supp (M/xM : I^inf)) in Proj terms."""
    state = _state(state)
    ideal = family_ideal(state.base, with_J)
    before = support_dim(saturate(state.relations, ideal))
    after = support_dim(saturate(state.quotient([x]).relations, ideal))
    return before, after


def is_fc_element(x: Polynomial, i: int, state, window: Optional[Window] = None, with_J: bool = True,
                  seed: Optional[int] = None) -> FcCertificate:
    cert = is_weak_fc_element(x, i, state, window, with_J, seed)
    if not cert:
        raise DimensionDropFailure(f"not even weak-(FC): {cert.reason}")
    before, after = fc3_dims(x, state, with_J)
    cert.fc3_dims = (before, after)
    if after != before - 1:
        raise DimensionDropFailure(f"dimension goes {before} -> {after}, not down by one")
    return cert


# ----------------------------------------------------------------------------
# search


def minimal_piece_generators(piece: GradedPiece) -> List[Polynomial]:
    ring = piece.ring
    amb, vecs = r_vectors([dict(g.terms) for g in piece.generators], ring, 1, piece.tdeg, scalar=True)
    keep = minimal_generating_set(Submodule(amb, vecs))
    p = ring.characteristic
    index = {frozenset(make_monic(v, p).items()): g for v, g in zip(vecs, piece.generators)}
    return [index[frozenset(make_monic(v, p).items())] for v in keep]


def random_element(piece: GradedPiece, rng: random.Random) -> Polynomial:
    """A random homogeneous element of I outside m*I.

    An x-degree is chosen among those of the minimal generators; generators of
    that degree get random nonzero scalars and lower ones random forms.
    """
    ring = piece.ring
    p = ring.characteristic
    gens = minimal_piece_generators(piece)
    degrees = sorted({g.xdeg for g in gens})
    delta = rng.choice(degrees)
    total = Polynomial.zero(ring)
    for g in gens:
        if g.xdeg == delta:
            total = total + g.scale(rng.randrange(1, p))
        elif g.xdeg < delta:
            form = {}
            for e in iter_monomials(ring.d, delta - g.xdeg):
                form[e + (0,) * ring.p] = rng.randrange(p)
            total = total + Polynomial(ring, form) * g
    return total


def is_maximal(state, with_J: bool = True) -> bool:
    """True when the family ideal lies in the radical of Ann of the state."""
    state = _state(state)
    return saturate(state.relations, family_ideal(state.base, with_J)).is_whole()


def find_weak_fc_element(i: int, state, seed: int = 0, window: Optional[Window] = None, with_J: bool = True,
                         attempts: int = SEARCH_ATTEMPTS) -> FcCertificate:
    state = _state(state)
    inst = state.base
    piece = _require_linear(inst, i)
    if is_maximal(state, with_J):
        raise DegenerateInstance("the family ideal lies in the radical of the annihilator of the current module")
    window = window or default_window(inst)
    rng = random.Random(seed)
    reasons = []
    for _ in range(attempts):
        x = random_element(piece, rng)
        out = _check_weak(x, i, state, window, with_J)
        if isinstance(out, FcCertificate):
            out.seed = seed
            return out
        reasons.append(out.reason)
    raise SearchExhausted(f"no weak-(FC) element in slot {i} after {attempts} attempts: {reasons[-3:]}")


def build_maximal_weak_fc_sequence(inst, targets: Union[int, Sequence[int]] = 1, seed: int = 0,
                                   window: Optional[Window] = None, with_J: bool = True,
                                   check_fc3: bool = True) -> FcSequence:
    """Extend a weak-(FC) sequence until the family ideal becomes nilpotent on the quotient.

    ``targets`` is a slot (all elements from it) or a list of slots used in turn,
    the last one repeating.
    """
    state = _state(inst)
    base = state.base
    if is_maximal(state, with_J):
        raise DegenerateInstance("the family ideal lies in the radical of Ann M")
    window = window or default_window(base)
    slots = [targets] if isinstance(targets, int) else list(targets)
    certs: List[FcCertificate] = []
    states = [state]
    limit = base.ring.nvars + 1
    while not is_maximal(state, with_J):
        if len(certs) > limit:
            raise SearchExhausted("sequence exceeds the dimension bound")
        slot = slots[min(len(certs), len(slots) - 1)]
        cert = find_weak_fc_element(slot, state, seed * 1009 + len(certs), window, with_J)
        if check_fc3:
            cert.fc3_dims = fc3_dims(cert.element, state, with_J)
        certs.append(cert)
        state = state.quotient([cert.element])
        states.append(state)
    return FcSequence(certs, states, True, with_J)


# ----------------------------------------------------------------------------
# reductions, spread


def is_reduction(Ji: GradedPiece, i: int, inst, window: Optional[Window] = None):
    """I^r M_s == J_i I^(r - delta(i)) M_s on the window (family without J).

    Returns (flag, first failing point or None).
    """
    state = _state(inst)
    base = state.base
    piece = _require_linear(base, i)
    amb, big = r_vectors([dict(g.terms) for g in piece.generators], base.ring, 1, 1, scalar=True)
    _, small = r_vectors([dict(g.terms) for g in Ji.generators], base.ring, 1, 1, scalar=True)
    if not Submodule(amb, big).contains_module(Submodule(amb, small)):
        return False, "J_i is not contained in I_i"
    window = window or default_window(base)
    pieces = (Ji,) + base.I_list
    for _, r, s in window_points(base.q, i, window, False):
        lower = list(r)
        lower[i - 1] -= 1
        A = state.component_submodule(piece_power(base.I_list, r), s)
        B = state.component_submodule(piece_power(pieces, (1,) + tuple(lower)), s)
        if not _hs_equal(A, B):
            return False, tuple(r) + (s,)
    return True, None


def analytic_spread(I: GradedPiece, policy: FitPolicy = FitPolicy()) -> int:
    """1 + growth degree of n -> mu(I^n), the fiber-cone dimension."""
    mu = len(minimal_piece_generators(I))
    if mu == 0:
        return 0
    poly = fit_eventual_polynomial(lambda n: len(piece_power((I,), (n,))), 1, mu - 1, policy)
    return poly.total_degree + 1


def mu(piece: GradedPiece) -> int:
    return len(minimal_piece_generators(piece))


def reduction_number_N(inst, i: int, seed: int = 0, window: Optional[Window] = None):
    """Length of a certified reduction generated by a maximal weak-(FC) sequence in I_i.

    Returns (N, FcSequence, reduction piece).
    """
    state = _state(inst)
    base = state.base
    window = window or default_window(base)
    seq = build_maximal_weak_fc_sequence(state, i, seed, window, with_J=True)
    red = GradedPiece(f"{base.I_list[i - 1].name}-reduction", tuple(seq.elements), 1)
    ok, where = is_reduction(red, i, state, window)
    if not ok:
        ok, where = is_reduction(red, i, state, window.enlarged())
    if not ok:
        raise ReductionCertificationFailure(f"sequence does not generate a reduction (first failure at {where})")
    return seq.length, seq, red
