"""The graded setting: G = R[T_1..T_p] over R = k[x_1..x_d], M = G (x) N with N = R^e/L.

A module state is presented as F/K with F = G^e and K a bihomogeneous
G-submodule.  Its T-degree-n component is the R-module F_n/K_n where F_n is
free on (T-monomials of degree n) x (positions), and all lengths of graded
subquotients are computed there from Hilbert series.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (
    Exps,
    FreeElement,
    Polynomial,
    RingSpec,
    exps_add,
    iter_monomials,
    poly_mul_raw,
)
from .errors import DegenerateInstance, InputError, ResourceLimit
from .groebner import (
    Ambient,
    Submodule,
    Vector,
    hilbert_series_quotient,
    krull_dim,
    length_between,
    minimal_generating_set,
    saturate,
)

# generator-count guard for power products
GENERATOR_CAP = 50_000


@dataclass(frozen=True)
class GradedPiece:
    """An R-submodule of G_tdeg given by homogeneous generators."""

    name: str
    generators: Tuple[Polynomial, ...]
    tdeg: int = 1

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(g for g in self.generators if not g.is_zero()))
        for g in self.generators:
            if not g.is_homogeneous():
                raise InputError(f"generator {g} of {self.name} is not bihomogeneous")
            if g.tdeg != self.tdeg:
                raise InputError(f"generator {g} of {self.name} has T-degree {g.tdeg}, expected {self.tdeg}")

    @property
    def ring(self) -> RingSpec:
        return self.generators[0].ring

    def raw(self) -> Tuple[Dict[Exps, int], ...]:
        return tuple(dict(g.terms) for g in self.generators)


@dataclass(frozen=True)
class MultiIndex:
    components: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if any(c < 0 for c in self.components):
            raise ValueError("multi-index entries must be non-negative")

    @property
    def norm(self) -> int:
        return sum(self.components)

    @staticmethod
    def delta(i: int, q: int) -> "MultiIndex":
        return MultiIndex(tuple(1 if j == i else 0 for j in range(q)))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a - b for a, b in zip(self.components, other.components)))

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)


@dataclass(frozen=True, eq=False)
class Instance:
    ring: RingSpec
    module_rank: int
    presentation: Tuple[FreeElement, ...]
    J: GradedPiece
    I_list: Tuple[GradedPiece, ...]
    name: str = "instance"

    def __post_init__(self):
        object.__setattr__(self, "presentation", tuple(r for r in self.presentation if not r.is_zero()))
        object.__setattr__(self, "I_list", tuple(self.I_list))
        if self.module_rank < 1:
            raise InputError("module rank must be >= 1")
        if not self.I_list:
            raise InputError("at least one I-piece is required (q >= 1)")
        if self.J.tdeg != 1:
            raise InputError("J must live in T-degree 1")
        if not self.J.generators:
            raise InputError("J has no generators")
        for row in self.presentation:
            if row.rank != self.module_rank:
                raise InputError("presentation row has the wrong rank")
            if any(sum(e[self.ring.d:]) for (_, e) in row.terms):
                raise InputError("presentation rows must not involve T-variables")
            if not row.is_homogeneous():
                raise InputError(f"presentation row {row} is not homogeneous")
        for piece in (self.J,) + self.I_list:
            for g in piece.generators:
                if g.ring != self.ring:
                    raise InputError(f"{piece.name} lives over a different ring")
        if not is_finite_colength(self.J):
            raise InputError("J does not have finite colength in G_1 (l(G_1/J) is infinite)")

    @property
    def q(self) -> int:
        return len(self.I_list)

    @property
    def G_ambient(self) -> Ambient:
        return Ambient(self.ring.characteristic, self.ring.nvars, self.module_rank)

    @property
    def proj_dim(self) -> int:
        """r = dim Proj(G) = d + p - 1."""
        return self.ring.d + self.ring.p - 1

    def with_J(self, J: GradedPiece) -> "Instance":
        return Instance(self.ring, self.module_rank, self.presentation, J, self.I_list, self.name)

    def with_I(self, I_list: Sequence[GradedPiece], name: Optional[str] = None) -> "Instance":
        return Instance(self.ring, self.module_rank, self.presentation, self.J, tuple(I_list), name or self.name)

    def module(self) -> "DerivedModule":
        return DerivedModule(self, (), False)

    def fingerprint(self) -> str:
        import hashlib

        parts = [repr(self.ring), str(self.module_rank)]
        parts += sorted(str(r) for r in self.presentation)
        for piece in (self.J,) + self.I_list:
            parts.append(f"{piece.name}:{piece.tdeg}:" + ";".join(str(g) for g in piece.generators))
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]


def is_finite_colength(J: GradedPiece) -> bool:
    ring = J.ring
    amb, vecs = r_vectors([dict(g.terms) for g in J.generators], ring, 1, 1, scalar=True)
    return krull_dim(Submodule(amb, vecs)) <= 0


# ----------------------------------------------------------------------------
# graded components


@lru_cache(maxsize=None)
def t_monomials(p: int, n: int) -> Tuple[Exps, ...]:
    return tuple(iter_monomials(p, n)) if n >= 0 else ()


@lru_cache(maxsize=None)
def _t_index(p: int, n: int) -> Dict[Exps, int]:
    return {a: i for i, a in enumerate(t_monomials(p, n))}


def component_ambient(ring: RingSpec, rank: int, n: int) -> Ambient:
    return Ambient(ring.characteristic, ring.d, rank * comb(n + ring.p - 1, ring.p - 1))


def r_vectors(vectors: Sequence[Vector] | Sequence[Dict[Exps, int]], ring: RingSpec, rank: int, n: int, scalar=False):
    """Rewrite G-level elements of T-degree ``n`` as vectors over R in the component F_n.

    ``scalar=True`` treats inputs as polynomials (position 0).
    """
    amb = component_ambient(ring, rank, n)
    idx = _t_index(ring.p, n)
    ntm = len(idx)
    d = ring.d
    out = []
    for v in vectors:
        items = ((0, e) for e in v) if scalar else iter(v)
        w = {}
        for key in items:
            c = v[key[1]] if scalar else v[key]
            pos, e = key
            a = e[d:]
            if sum(a) != n:
                raise ValueError(f"term of T-degree {sum(a)} in component {n}")
            w[(pos * ntm + idx[a], e[:d])] = c
        out.append(w)
    return amb, out


@lru_cache(maxsize=4096)
def _piece_power(pieces: Tuple[GradedPiece, ...], exps: Tuple[int, ...]) -> Tuple[Tuple[Tuple[Exps, int], ...], ...]:
    """R-minimal generators of the product of pieces[i]^exps[i] inside G_N (as polynomials)."""
    if not any(exps):
        ring = pieces[0].ring
        return ((((0,) * ring.nvars, 1),),)
    last = max(i for i, e in enumerate(exps) if e)
    prev = list(exps)
    prev[last] -= 1
    base = _piece_power(pieces, tuple(prev))
    ring = pieces[last].ring
    p = ring.characteristic
    prods = {}
    for b in base:
        bd = dict(b)
        for g in pieces[last].generators:
            f = poly_mul_raw(bd, g.terms, p)
            if f:
                key = frozenset(_monic_poly(f, p).items())
                prods[key] = f
    if len(prods) > GENERATOR_CAP:
        raise ResourceLimit(f"power product has {len(prods)} generators (cap {GENERATOR_CAP})")
    N = sum(e * pc.tdeg for e, pc in zip(exps, pieces))
    polys = list(prods.values())
    if not polys:
        return ()
    amb, vecs = r_vectors(polys, ring, 1, N, scalar=True)
    sub = Submodule(amb, vecs)
    keep = minimal_generating_set(sub)
    # map back to polynomials
    inv = {i: a for a, i in _t_index(ring.p, N).items()}
    out = []
    for w in keep:
        poly = {}
        for (pos, xe), c in w.items():
            poly[xe + inv[pos]] = c
        out.append(tuple(sorted(poly.items())))
    return tuple(sorted(out))


def _monic_poly(f: Dict[Exps, int], p: int) -> Dict[Exps, int]:
    from .algebra import mono_key

    lead = max(f, key=mono_key)
    inv = pow(f[lead], -1, p)
    return {e: c * inv % p for e, c in f.items()}


def piece_power(pieces: Sequence[GradedPiece], exps: Sequence[int]) -> List[Dict[Exps, int]]:
    """Minimal generators of prod pieces[i]^exps[i] as polynomials of G."""
    return [dict(t) for t in _piece_power(tuple(pieces), tuple(exps))]


class DerivedModule:
    """M/(x_1..x_t)M, or M/((x_1..x_t)M : I^inf) when ``saturated``.

    ``relations`` may be supplied directly to describe an arbitrary quotient F/K.
    """

    def __init__(self, base: Instance, quotient_by: Sequence[Polynomial] = (), saturated: bool = False,
                 relations: Optional[Submodule] = None, saturate_by: Optional[Submodule] = None):
        self.base = base
        self.quotient_by = tuple(quotient_by)
        self.saturated = saturated
        self._saturate_by = saturate_by
        self._relations = relations
        self._component_cache: Dict[int, Tuple[Ambient, List[Vector]]] = {}
        self._relation_modules: Dict[int, Submodule] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        xs = ", ".join(str(x) for x in self.quotient_by)
        return f"DerivedModule({self.base.name}; quotient_by=[{xs}], saturated={self.saturated})"

    @property
    def ring(self) -> RingSpec:
        return self.base.ring

    @property
    def rank(self) -> int:
        return self.base.module_rank

    @property
    def relations(self) -> Submodule:
        """K with M_state = F/K, as a G-submodule of F = G^e."""
        if self._relations is None:
            amb = self.base.G_ambient
            gens = [dict(r.terms) for r in self.base.presentation]
            for x in self.quotient_by:
                for j in range(self.rank):
                    gens.append({(j, e): c for e, c in x.terms.items()})
            K = Submodule(amb, gens)
            if self.saturated:
                K = saturate(K, self._saturate_by or calI(self.base))
            self._relations = K
        return self._relations

    def quotient(self, xs: Sequence[Polynomial]) -> "DerivedModule":
        if not self.saturated and self._relations is None:
            return DerivedModule(self.base, self.quotient_by + tuple(xs), False)
        gens = list(self.relations.generators)
        for x in xs:
            for j in range(self.rank):
                gens.append({(j, e): c for e, c in x.terms.items()})
        return DerivedModule(self.base, self.quotient_by + tuple(xs), False,
                             relations=Submodule(self.base.G_ambient, gens))

    def saturation(self, ideal: Optional[Submodule] = None) -> "DerivedModule":
        K = saturate(self.relations, ideal or calI(self.base))
        return DerivedModule(self.base, self.quotient_by, True, relations=K, saturate_by=ideal)

    def relations_in_degree(self, n: int) -> Tuple[Ambient, List[Vector]]:
        """K_n as R-vectors in F_n."""
        with self._lock:
            hit = self._component_cache.get(n)
        if hit is not None:
            return hit
        ring = self.ring
        d = ring.d
        shifted = []
        for g in self.relations.generators:
            tdeg = {sum(e[d:]) for (_, e) in g}
            if len(tdeg) != 1:
                raise ValueError("relation is not T-homogeneous")
            t = tdeg.pop()
            if t > n:
                continue
            for a in t_monomials(ring.p, n - t):
                full = (0,) * d + a
                shifted.append({(pos, exps_add(e, full)): c for (pos, e), c in g.items()})
        out = r_vectors(shifted, ring, self.rank, n)
        with self._lock:
            self._component_cache[n] = out
        return out

    def relations_submodule(self, n: int) -> Submodule:
        """K_n as a submodule of F_n, shared so its basis is computed once."""
        with self._lock:
            hit = self._relation_modules.get(n)
        if hit is None:
            amb, rel = self.relations_in_degree(n)
            hit = Submodule(amb, rel)
            with self._lock:
                hit = self._relation_modules.setdefault(n, hit)
        return hit

    def graded_component(self, n: int) -> Tuple[Ambient, Submodule]:
        """(F_n, K_n): the presented R-module M_n = F_n/K_n."""
        K = self.relations_submodule(n)
        return K.ambient, K

    def component_submodule(self, polys: Sequence[Dict[Exps, int]], s: int, with_relations: bool = True) -> Submodule:
        """R-span of polys * M_s inside F_N (N = tdeg(polys) + s), plus K_N if requested."""
        ring = self.ring
        vecs = []
        seen = set()
        N = None
        for f in polys:
            tf = {sum(e[ring.d:]) for e in f}
            if len(tf) != 1:
                raise ValueError("product is not T-homogeneous")
            t = tf.pop()
            N = t + s if N is None else N
            if t + s != N:
                raise ValueError("products land in different components")
            for a in t_monomials(ring.p, s):
                full = (0,) * ring.d + a
                for j in range(self.rank):
                    v = {(j, exps_add(e, full)): c for e, c in f.items()}
                    key = frozenset(v.items())
                    if key not in seen:
                        seen.add(key)
                        vecs.append(v)
        if N is None:
            raise ValueError("empty product")
        amb, rvecs = r_vectors(vecs, ring, self.rank, N)
        if with_relations:
            return self.relations_submodule(N).extend(rvecs)
        return Submodule(amb, rvecs)


def calI(inst: Instance, pieces: Optional[Sequence[GradedPiece]] = None) -> Submodule:
    """The ideal of G generated by products of one generator from each piece."""
    pieces = tuple(pieces) if pieces is not None else inst.I_list
    ring = inst.ring
    p = ring.characteristic
    prods = [{(0,) * ring.nvars: 1}]
    for piece in pieces:
        prods = [poly_mul_raw(a, g.terms, p) for a in prods for g in piece.generators]
        prods = [f for f in prods if f]
    amb = Ambient(p, ring.nvars, 1)
    return Submodule(amb, [{(0, e): c for e, c in f.items()} for f in prods])


def ideal_times_free(I: Submodule, amb: Ambient) -> Submodule:
    gens = []
    for g in I.generators:
        for j in range(amb.rank):
            gens.append({(j, e): c for (_, e), c in g.items()})
    return Submodule(amb, gens)


# ----------------------------------------------------------------------------
# power products and lengths


def _pieces(inst: Instance) -> Tuple[GradedPiece, ...]:
    return (inst.J,) + inst.I_list


def power_product(state, r: Sequence[int], s: int, j_power: int = 0, with_relations: bool = False) -> Submodule:
    """The R-module J^j_power * I^r * M_s inside its T-degree component."""
    if isinstance(state, Instance):
        state = state.module()
    if s < 0:
        raise ValueError("s must be >= 0")
    inst = state.base
    r = tuple(r.components if isinstance(r, MultiIndex) else r)
    if len(r) != inst.q:
        raise ValueError(f"multi-index of length {len(r)} for q={inst.q}")
    polys = piece_power(_pieces(inst), (j_power,) + r)
    return state.component_submodule(polys, s, with_relations)


def length_h_mixed(state, n: int, s: int, r: Sequence[int]) -> int:
    """l(I^r M_{n+s} / J^n I^r M_s) for the state (default: M itself)."""
    if isinstance(state, Instance):
        state = state.module()
    r = tuple(r.components if isinstance(r, MultiIndex) else r)
    if n == 0:
        return 0
    pieces = _pieces(state.base)
    top = state.component_submodule(piece_power(pieces, (0,) + r), n + s)
    bottom = state.component_submodule(piece_power(pieces, (n,) + r), s)
    return length_between(top, bottom)


def length_h_br(state, n: int, s: int, I: Optional[GradedPiece] = None) -> int:
    """l(M_{n+s} / I^n M_s) for a finite-colength I in G_1 (default: the instance's J)."""
    if isinstance(state, Instance):
        state = state.module()
    I = I or state.base.J
    if I.tdeg != 1:
        raise ValueError("Buchsbaum-Rim lengths need a piece of G_1")
    if n == 0:
        return 0
    ring = state.ring
    top = state.component_submodule([{(0,) * ring.nvars: 1}], n + s)
    bottom = state.component_submodule(piece_power((I,), (n,)), s)
    return length_between(top, bottom)


# ----------------------------------------------------------------------------


@dataclass
class SaturatedData:
    M_star: DerivedModule
    D: int
    ht: int
    dim_M: int
    degenerate: bool


def support_dim(K: Submodule) -> int:
    """dim Supp(F/K) in Proj(G); -1 when the support is empty."""
    return max(krull_dim(K) - 1, -1)


def module_dim(state: DerivedModule) -> int:
    """Krull dimension of the G-module F/K (-1 for the zero module)."""
    return krull_dim(state.relations)


def saturated_data(inst, allow_degenerate: bool = False, pieces=None) -> SaturatedData:
    """M* = M/(0:I^inf), D = dim Supp M* in Proj(G), ht = dim M - dim M/IM."""
    state = inst.module() if isinstance(inst, Instance) else inst
    base = state.base
    ideal = calI(base, pieces)
    K = state.relations
    M_star = state.saturation(ideal)
    degenerate = M_star.relations.is_whole()
    if degenerate and not allow_degenerate:
        raise DegenerateInstance("the ideal generated by I_1...I_q lies in sqrt(Ann M)")
    dim_M = krull_dim(K)
    dim_IM = krull_dim(K + ideal_times_free(ideal, K.ambient))
    D = support_dim(M_star.relations)
    return SaturatedData(M_star, D, dim_M - dim_IM, dim_M, degenerate)


def height_modulo_ann(inst) -> int:
    return saturated_data(inst, allow_degenerate=True).ht
