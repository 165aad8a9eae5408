"""Buchberger-based submodule arithmetic over k[v_1..v_n] with k = GF(p).

Vectors are plain dicts ``{(position, exponents): coefficient}``; a
:class:`Submodule` bundles generators with their ambient free module and
memoizes its reduced Groebner basis.  The monomial order is graded reverse
lex on the variables, position over term (lower position index ranks higher).

Lengths and dimensions are read off Hilbert series of leading-term modules.
"""
from __future__ import annotations

import hashlib
import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import cache as _cache
from .algebra import Exps, Term, FreeElement, field_inverse, term_key
from .errors import AmbientMismatch, NotFiniteLength

Vector = Dict[Term, int]

# Set to True (or MMX_CHECK_GB=1) to re-verify every S-pair after each basis computation.
VERIFY_GB = False


@dataclass(frozen=True)
class Ambient:
    """Free module of ``rank`` over GF(p)[v_1..v_nvars]; ``shifts`` are degree offsets per position."""

    p: int
    nvars: int
    rank: int
    shifts: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.shifts:
            object.__setattr__(self, "shifts", (0,) * self.rank)
        if len(self.shifts) != self.rank:
            raise ValueError("one shift per position required")

    def basis_vector(self, pos: int) -> Vector:
        return {(pos, (0,) * self.nvars): 1}


# ----------------------------------------------------------------------------
# low level helpers


def _minkey(term: Term):
    # smallest value <=> largest term in the order
    pos, e = term
    return (pos, -sum(e), e[::-1])


def leading_term(v: Vector) -> Term:
    return min(v, key=_minkey)


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exps, b: Exps) -> Exps:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exps, b: Exps) -> Exps:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Exps, b: Exps) -> Exps:
    return tuple(x + y for x, y in zip(a, b))


def make_monic(v: Vector, p: int) -> Vector:
    if not v:
        return v
    lc = v[leading_term(v)]
    if lc == 1:
        return dict(v)
    inv = field_inverse(lc, p)
    return {t: c * inv % p for t, c in v.items()}


def shift_vector(v: Vector, mono: Exps, c: int, p: int) -> Vector:
    return {(pos, _add(e, mono)): cc * c % p for (pos, e), cc in v.items()}


def vector_degree(v: Vector, shifts: Sequence[int]) -> Optional[int]:
    """Common degree of a homogeneous vector, or None if inhomogeneous/zero."""
    degs = {sum(e) + shifts[pos] for pos, e in v}
    return degs.pop() if len(degs) == 1 else None


class _Reducer:
    """Lead-term index over a list of monic vectors."""

    def __init__(self, polys: Sequence[Vector], leads: Optional[Sequence[Term]] = None):
        self.by_pos: Dict[int, List[Tuple[Exps, Vector]]] = {}
        for f, lt in zip(polys, leads or [leading_term(f) for f in polys]):
            self.by_pos.setdefault(lt[0], []).append((lt[1], f))

    def add(self, f: Vector, lt: Term) -> None:
        self.by_pos.setdefault(lt[0], []).append((lt[1], f))

    def find(self, term: Term):
        for e, f in self.by_pos.get(term[0], ()):
            if _divides(e, term[1]):
                return e, f
        return None


def normal_form(v: Vector, basis: Sequence[Vector], p: int, reducer: Optional[_Reducer] = None) -> Vector:
    """Fully reduced remainder of ``v`` modulo the monic vectors ``basis``."""
    if not v:
        return {}
    red = reducer or _Reducer(basis)
    f = dict(v)
    heap = [(_minkey(t), t) for t in f]
    heapq.heapify(heap)
    rem: Vector = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = f.get(t)
        if c is None:
            continue
        hit = red.find(t)
        if hit is None:
            rem[t] = c
            del f[t]
            continue
        e, g = hit
        mono = _sub(t[1], e)
        for (gpos, ge), gc in g.items():
            k = (gpos, _add(ge, mono))
            nv = (f.get(k, 0) - c * gc) % p
            if nv:
                if k not in f:
                    heapq.heappush(heap, (_minkey(k), k))
                f[k] = nv
            else:
                f.pop(k, None)
    return rem


def s_vector(f: Vector, g: Vector, p: int) -> Vector:
    (pf, ef), (pg, eg) = leading_term(f), leading_term(g)
    assert pf == pg
    L = _lcm(ef, eg)
    out = shift_vector(f, _sub(L, ef), 1, p)
    for (pos, e), c in g.items():
        k = (pos, _add(e, _sub(L, eg)))
        nv = (out.get(k, 0) - c) % p
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


# ----------------------------------------------------------------------------
# Buchberger


def _monomial_basis(gens: Iterable[Vector]) -> List[Vector]:
    terms = sorted({next(iter(g)) for g in gens if g}, key=lambda t: (t[0], sum(t[1])))
    kept: List[Term] = []
    for t in terms:
        if not any(k[0] == t[0] and _divides(k[1], t[1]) for k in kept):
            kept.append(t)
    return [{t: 1} for t in kept]


class _Packed:
    """Terms (pos, exps) as single ints ordered like the monomial order.

    From the top: inverted position, total degree, then MAX - e_i for the
    variables from last to first.  Multiplying by a monomial adds a fixed
    offset, and divisibility is a guard-bit test on the exponent fields.
    """

    W = 16
    MAX = (1 << (W - 1)) - 1

    def __init__(self, nvars: int, rank: int):
        W = self.W
        self.nvars = nvars
        self.rank = rank
        self.deg_shift = W * nvars
        self.pos_shift = W * (nvars + 1)
        self.cmask = (1 << self.deg_shift) - 1
        self.guard = sum(1 << (W * i + W - 1) for i in range(nvars))
        self.base = sum(self.MAX << (W * i) for i in range(nvars))

    def pack(self, term: Term) -> int:
        pos, e = term
        W = self.W
        if any(x > self.MAX for x in e):
            raise OverflowError("exponent too large for the packed term encoding")
        c = self.base - sum(x << (W * i) for i, x in enumerate(e))
        return ((self.rank - 1 - pos) << self.pos_shift) | (sum(e) << self.deg_shift) | c

    def unpack(self, key: int) -> Term:
        W = self.W
        pos = self.rank - 1 - (key >> self.pos_shift)
        mask = (1 << W) - 1
        e = tuple(self.MAX - ((key >> (W * i)) & mask) for i in range(self.nvars))
        return pos, e

    def vec(self, v: Vector) -> Dict[int, int]:
        return {self.pack(t): c for t, c in v.items()}

    def unvec(self, v: Dict[int, int]) -> Vector:
        return {self.unpack(k): c for k, c in v.items()}


class _PackedReducer:
    def __init__(self, codec: _Packed):
        self.codec = codec
        self.by_pos: Dict[int, List[Tuple[int, int, Dict[int, int]]]] = {}

    def add(self, f: Dict[int, int], lt: int) -> None:
        c = self.codec
        self.by_pos.setdefault(lt >> c.pos_shift, []).append((lt & c.cmask | c.guard, lt, f))

    def find(self, t: int):
        c = self.codec
        ct = t & c.cmask
        g = c.guard
        for ce, e, f in self.by_pos.get(t >> c.pos_shift, ()):
            if (ce - ct) & g == g:
                return e, f
        return None


def _packed_nf(v: Dict[int, int], red: _PackedReducer, p: int) -> Dict[int, int]:
    f = dict(v)
    heap = [-k for k in f]
    heapq.heapify(heap)
    rem: Dict[int, int] = {}
    find = red.find
    while heap:
        t = -heapq.heappop(heap)
        c = f.get(t)
        if c is None:
            continue
        hit = find(t)
        if hit is None:
            rem[t] = c
            del f[t]
            continue
        e, g = hit
        delta = t - e
        for gk, gc in g.items():
            k = gk + delta
            old = f.get(k)
            if old is None:
                f[k] = -c * gc % p
                heapq.heappush(heap, -k)
            else:
                nv = (old - c * gc) % p
                if nv:
                    f[k] = nv
                else:
                    del f[k]
    return rem


def _packed_monic(v: Dict[int, int], p: int) -> Tuple[Dict[int, int], int]:
    lt = max(v)
    lc = v[lt]
    if lc != 1:
        inv = field_inverse(lc, p)
        v = {k: c * inv % p for k, c in v.items()}
    return v, lt


def buchberger(gens: Sequence[Vector], p: int, rank: int, initial_gb: Sequence[Vector] = ()) -> List[Vector]:
    """Reduced Groebner basis of the span of ``gens`` (plus an existing GB ``initial_gb``).

    Normal selection strategy with Gebauer-Moeller pair pruning; the product
    criterion is only applied for ideals (rank 1).
    """
    gens = [g for g in gens if g]
    if all(len(g) == 1 for g in gens) and all(len(g) == 1 for g in initial_gb):
        return _sorted_basis(_monomial_basis(list(initial_gb) + gens))
    sample = next(iter(gens[0] if gens else initial_gb[0]))
    codec = _Packed(len(sample[1]), rank)

    polys: List[Dict[int, int]] = []
    lkeys: List[int] = []
    leads: List[Term] = []
    active: List[int] = []
    pairs: Dict[Tuple[int, int], Term] = {}
    ideal = rank == 1

    def coprime(i, j):
        return ideal and all(a == 0 or b == 0 for a, b in zip(leads[i][1], leads[j][1]))

    lcm_memo: Dict[Tuple[int, int], Exps] = {}

    def plcm(i, j) -> Exps:
        key = (i, j) if i < j else (j, i)
        hit = lcm_memo.get(key)
        if hit is None:
            hit = lcm_memo[key] = _lcm(leads[i][1], leads[j][1])
        return hit

    new_pairs: List[Tuple[int, int]] = []

    def update(h: int):
        nonlocal active, pairs
        hp, he = leads[h]
        C = [g for g in active if leads[g][0] == hp]
        D: List[int] = []
        while C:
            g1 = C.pop()
            L1 = plcm(h, g1)
            if coprime(h, g1) or not any(_divides(plcm(h, g2), L1) for g2 in C + D):
                D.append(g1)
        E = [g for g in D if not coprime(h, g)]
        kept = {}
        for (g1, g2), L in pairs.items():
            if L[0] == hp and _divides(he, L[1]) and plcm(g1, h) != L[1] and plcm(g2, h) != L[1]:
                continue
            kept[(g1, g2)] = L
        for g in E:
            kept[(g, h)] = (hp, plcm(g, h))
            new_pairs.append((g, h))
        pairs = kept
        active = [g for g in active if not (leads[g][0] == hp and _divides(he, leads[g][1]))] + [h]

    reducer = _PackedReducer(codec)

    def add(v: Dict[int, int], run_update: bool = True) -> None:
        v, lt = _packed_monic(v, p)
        polys.append(v)
        lkeys.append(lt)
        leads.append(codec.unpack(lt))
        reducer.add(v, lt)
        if run_update:
            update(len(polys) - 1)
        else:
            active.append(len(polys) - 1)

    for g in initial_gb:
        add(codec.vec(g), run_update=False)

    queue: List = []

    def push_new_pairs():
        for key in new_pairs:
            if key in pairs:
                L = pairs[key]
                heapq.heappush(queue, (sum(L[1]), L[0], key))
        new_pairs.clear()

    for g in sorted(gens, key=lambda v: (sum(leading_term(v)[1]), _minkey(leading_term(v)))):
        r = _packed_nf(codec.vec(g), reducer, p)
        if r:
            add(r)
    push_new_pairs()

    while queue:
        # normal strategy: smallest lcm degree first
        _, _, key = heapq.heappop(queue)
        if key not in pairs:
            continue
        i, j = key
        del pairs[key]
        r = _packed_nf(_packed_spair(polys[i], lkeys[i], polys[j], lkeys[j], codec, p), reducer, p)
        if r:
            add(r)
            push_new_pairs()

    basis = _packed_interreduce([polys[i] for i in active], codec, p)
    basis = [codec.unvec(b) for b in basis]
    if VERIFY_GB:
        assert is_groebner(basis, p), "S-pair failed to reduce to zero"
    return _sorted_basis(basis)


def _packed_spair(f, lf, g, lg, codec: _Packed, p: int) -> Dict[int, int]:
    pos, ef = codec.unpack(lf)
    _, eg = codec.unpack(lg)
    L = codec.pack((pos, _lcm(ef, eg)))
    df, dg = L - lf, L - lg
    out = {k + df: c for k, c in f.items()}
    for k, c in g.items():
        k += dg
        nv = (out.get(k, 0) - c) % p
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _packed_interreduce(basis: List[Dict[int, int]], codec: _Packed, p: int) -> List[Dict[int, int]]:
    # leads are pairwise non-dividing and no lead divides its own tail,
    # so one reducer over the whole basis only ever uses the other elements
    red = _PackedReducer(codec)
    for g in basis:
        red.add(g, max(g))
    out = []
    for g in basis:
        lt = max(g)
        tail = {t: c for t, c in g.items() if t != lt}
        r = _packed_nf(tail, red, p)
        r[lt] = g[lt]
        out.append(_packed_monic(r, p)[0])
    return out


def _sorted_basis(basis: List[Vector]) -> List[Vector]:
    return sorted(basis, key=lambda v: _minkey(leading_term(v)))


def is_groebner(basis: Sequence[Vector], p: int) -> bool:
    """Check that every S-vector of ``basis`` reduces to zero."""
    basis = [make_monic(b, p) for b in basis if b]
    red = _Reducer(basis)
    for f, g in combinations(basis, 2):
        if leading_term(f)[0] != leading_term(g)[0]:
            continue
        if normal_form(s_vector(f, g, p), basis, p, red):
            return False
    return True


# ----------------------------------------------------------------------------


def canonical_text(v: Vector) -> str:
    return " ".join(
        f"{pos}|{','.join(map(str, e))}|{c}" for (pos, e), c in sorted(v.items(), key=lambda kv: _minkey(kv[0]))
    )


def parse_vector_text(line: str) -> Vector:
    v = {}
    for tok in line.split():
        pos, e, c = tok.split("|")
        v[(int(pos), tuple(int(x) for x in e.split(",")) if e else ())] = int(c)
    return v


class Submodule:
    """Finitely generated submodule of a free module, with a memoized reduced GB."""

    __slots__ = ("ambient", "generators", "_gb", "_key", "_lead_cache", "_base", "_extra")

    def __init__(self, ambient: Ambient, generators: Iterable[Vector] = ()):
        self.ambient = ambient
        gens = []
        for g in generators:
            g = {(pos, tuple(e)): c % ambient.p for (pos, e), c in g.items() if c % ambient.p}
            for (pos, e) in g:
                if not 0 <= pos < ambient.rank or len(e) != ambient.nvars:
                    raise AmbientMismatch(f"term {(pos, e)} does not live in {ambient}")
            if g:
                gens.append(g)
        self.generators: Tuple[Vector, ...] = tuple(gens)
        self._gb: Optional[List[Vector]] = None
        self._key: Optional[str] = None
        self._lead_cache = None
        self._base: Optional["Submodule"] = None
        self._extra: Tuple[Vector, ...] = ()

    def extend(self, extra: Iterable[Vector]) -> "Submodule":
        """self + span(extra); its basis is grown from the basis of self."""
        out = Submodule(self.ambient, list(extra))
        out._extra = out.generators
        out.generators = self.generators + out.generators
        out._base = self
        return out

    @classmethod
    def from_elements(cls, elements: Sequence[FreeElement], rank: Optional[int] = None) -> "Submodule":
        if not elements and rank is None:
            raise ValueError("need elements or an explicit rank")
        ring = elements[0].ring if elements else None
        rank = rank if rank is not None else elements[0].rank
        amb = Ambient(ring.characteristic, ring.nvars, rank)
        for el in elements:
            if el.rank != rank or el.ring != ring:
                raise AmbientMismatch("elements from different ambients")
        return cls(amb, [dict(el.terms) for el in elements])

    @classmethod
    def whole(cls, ambient: Ambient) -> "Submodule":
        return cls(ambient, [ambient.basis_vector(i) for i in range(ambient.rank)])

    def __repr__(self):
        return f"Submodule(rank={self.ambient.rank}, nvars={self.ambient.nvars}, gens={len(self.generators)})"

    @property
    def key(self) -> str:
        """Content hash of (order, ambient, canonical generators)."""
        if self._key is None:
            p = self.ambient.p
            lines = sorted({canonical_text(make_monic(g, p)) for g in self.generators})
            payload = f"grevlex-pot|{p}|{self.ambient.nvars}|{self.ambient.rank}\n" + "\n".join(lines)
            self._key = hashlib.sha256(payload.encode()).hexdigest()
        return self._key

    @property
    def gb(self) -> List[Vector]:
        if self._gb is None:
            amb = self.ambient
            cached = _cache.GB_CACHE.get(self.key, amb)
            if cached is None:
                if self._base is not None:
                    cached = buchberger(self._extra, amb.p, amb.rank, initial_gb=self._base.gb)
                else:
                    cached = buchberger(self.generators, amb.p, amb.rank)
                _cache.GB_CACHE.put(self.key, amb, cached)
            self._gb = cached
        return self._gb

    def with_gb(self, basis: List[Vector]) -> "Submodule":
        self._gb = basis
        return self

    def leads(self) -> Dict[int, List[Exps]]:
        if self._lead_cache is None:
            out: Dict[int, List[Exps]] = {}
            for g in self.gb:
                pos, e = leading_term(g)
                out.setdefault(pos, []).append(e)
            self._lead_cache = out
        return self._lead_cache

    def is_zero(self) -> bool:
        return not self.generators

    def check_ambient(self, other: "Submodule"):
        if other.ambient.p != self.ambient.p or other.ambient.nvars != self.ambient.nvars or other.ambient.rank != self.ambient.rank:
            raise AmbientMismatch(f"{self.ambient} vs {other.ambient}")

    def normal_form(self, v: Vector) -> Vector:
        return normal_form(v, self.gb, self.ambient.p)

    def contains(self, v) -> bool:
        if isinstance(v, FreeElement):
            if v.rank != self.ambient.rank:
                raise AmbientMismatch("element rank differs from ambient rank")
            v = dict(v.terms)
        return not self.normal_form(v)

    def contains_module(self, other: "Submodule") -> bool:
        self.check_ambient(other)
        basis = self.gb
        red = _Reducer(basis)
        return all(not normal_form(g, basis, self.ambient.p, red) for g in other.generators)

    def equals(self, other: "Submodule") -> bool:
        self.check_ambient(other)
        return [canonical_text(g) for g in self.gb] == [canonical_text(g) for g in other.gb]

    def __add__(self, other: "Submodule") -> "Submodule":
        self.check_ambient(other)
        if other._base is not None and self._base is not None and other._base is self._base:
            return self.extend(other._extra)
        return self.extend(other.generators)

    def is_whole(self) -> bool:
        zero = (0,) * self.ambient.nvars
        leads = self.leads()
        return all(zero in leads.get(i, ()) for i in range(self.ambient.rank))


def contains(A: Submodule, v) -> bool:
    return A.contains(v)


# ----------------------------------------------------------------------------
# colon, intersection, saturation


def preimage(A: Submodule, images: Sequence[Vector]) -> Submodule:
    """{c in S^k : sum_j c_j images[j] in A} as a submodule of S^k."""
    amb = A.ambient
    k = len(images)
    r = amb.rank
    shifts_img = []
    for v in images:
        d = vector_degree(v, amb.shifts) if v else 0
        shifts_img.append(d if d is not None else 0)
    big = Ambient(amb.p, amb.nvars, r + k, amb.shifts + tuple(shifts_img))
    zero = (0,) * amb.nvars
    gens = []
    for j, v in enumerate(images):
        g = dict(v)
        g[(r + j, zero)] = 1
        gens.append(g)
    gens.extend(dict(a) for a in A.generators)
    basis = Submodule(big, gens).gb
    kept = []
    for g in basis:
        if leading_term(g)[0] >= r:
            kept.append({(pos - r, e): c for (pos, e), c in g.items()})
    out = Submodule(Ambient(amb.p, amb.nvars, k, tuple(shifts_img)), kept)
    # the kept part of a POT basis is itself a reduced basis of the preimage
    return out.with_gb(_sorted_basis(kept))


def ideal_ambient(amb: Ambient) -> Ambient:
    return Ambient(amb.p, amb.nvars, 1)


def colon_element(A: Submodule, b: Vector) -> Submodule:
    """The ideal (A : b) = {f : f b in A}."""
    return preimage(A, [b])


def colon_by_element(A: Submodule, f: Dict[Exps, int]) -> Submodule:
    """The submodule (A :_F f) = {v in F : f v in A} for a ring element ``f``."""
    amb = A.ambient
    images = [{(i, e): c for e, c in f.items()} for i in range(amb.rank)]
    pre = preimage(A, images)
    return Submodule(amb, pre.generators).with_gb(pre.gb)


def intersect(A: Submodule, B: Submodule) -> Submodule:
    A.check_ambient(B)
    if not A.generators or not B.generators:
        return Submodule(A.ambient, [])
    gens = list(A.generators)
    pre = preimage(B, gens)
    p = A.ambient.p
    out = []
    for c in pre.gb:
        acc: Vector = {}
        for (j, e), cc in c.items():
            for (pos, ge), gc in gens[j].items():
                k = (pos, _add(ge, e))
                nv = (acc.get(k, 0) + cc * gc) % p
                if nv:
                    acc[k] = nv
                else:
                    acc.pop(k, None)
        if acc:
            out.append(acc)
    return Submodule(A.ambient, out)


def intersect_all(mods: Sequence[Submodule]) -> Submodule:
    out = mods[0]
    for m in mods[1:]:
        out = intersect(out, m)
    return out


def ideal_generators(H: Submodule) -> List[Dict[Exps, int]]:
    if H.ambient.rank != 1:
        raise AmbientMismatch("expected an ideal (rank-1 submodule)")
    return [{e: c for (_, e), c in g.items()} for g in H.generators]


def colon_by_ideal(A: Submodule, H: Submodule) -> Submodule:
    """(A :_F H) = intersection over generators h of H of (A : h)."""
    hs = ideal_generators(H)
    if not hs:
        return Submodule.whole(A.ambient)
    return intersect_all([colon_by_element(A, h) for h in hs])


def module_quotient(A: Submodule, B: Submodule) -> Submodule:
    """The ideal (A :_R B) = {f : f B in A}."""
    A.check_ambient(B)
    if not B.generators:
        return Submodule.whole(ideal_ambient(A.ambient))
    return intersect_all([colon_element(A, b) for b in B.generators])


def saturate(A: Submodule, H: Submodule, max_steps: int = 64) -> Submodule:
    """(A : H^inf): stable value of A:H, A:H^2, ..., certified by one extra equal step."""
    cur = colon_by_ideal(A, H)
    for _ in range(max_steps):
        nxt = colon_by_ideal(cur, H)
        if nxt.equals(cur):
            return cur
        cur = nxt
    raise RuntimeError("saturation chain did not stabilize")


def annihilator(L: Submodule) -> Submodule:
    """Ann(F/L) as an ideal: intersection over basis vectors e_i of (L : e_i)."""
    amb = L.ambient
    return intersect_all([colon_element(L, amb.basis_vector(i)) for i in range(amb.rank)])


# ----------------------------------------------------------------------------
# Hilbert series and dimension


@dataclass(frozen=True)
class HilbertSeries:
    """numerator(t) / (1 - t)^denominator_exponent with integer numerator."""

    numerator: Tuple[int, ...]
    denominator_exponent: int

    @classmethod
    def make(cls, numer: Dict[int, int], den: int) -> "HilbertSeries":
        top = max((k for k, v in numer.items() if v), default=-1)
        coeffs = [numer.get(i, 0) for i in range(top + 1)]
        # strip (1 - t) factors shared with the denominator
        while den > 0 and coeffs and sum(coeffs) == 0:
            q = []
            acc = 0
            for c in coeffs[:-1]:
                acc += c
                q.append(acc)
            coeffs = q
            den -= 1
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            den = 0
        return cls(tuple(coeffs), den)

    def is_polynomial(self) -> bool:
        return self.denominator_exponent == 0

    def value_at_one(self) -> int:
        if not self.is_polynomial():
            raise NotFiniteLength("Hilbert series has a pole at t=1")
        return sum(self.numerator)

    def __sub__(self, other: "HilbertSeries") -> "HilbertSeries":
        return _combine(self, other, -1)

    def __add__(self, other: "HilbertSeries") -> "HilbertSeries":
        return _combine(self, other, 1)

    def coefficients(self, upto: int) -> List[int]:
        """Expand the series through degree ``upto``."""
        c = list(self.numerator) + [0] * (upto + 1)
        c = c[: upto + 1]
        for _ in range(self.denominator_exponent):
            acc = 0
            for i in range(len(c)):
                acc += c[i]
                c[i] = acc
        return c

    @property
    def dimension(self) -> int:
        """Order of the pole at t=1 (Krull dimension); -1 for the zero series."""
        if not self.numerator:
            return -1
        return self.denominator_exponent


def _mul_one_minus_t(c: List[int], k: int) -> List[int]:
    for _ in range(k):
        c = [a - b for a, b in zip(c + [0], [0] + c)]
    return c


def _combine(a: HilbertSeries, b: HilbertSeries, sign: int) -> HilbertSeries:
    den = max(a.denominator_exponent, b.denominator_exponent)
    na = _mul_one_minus_t(list(a.numerator), den - a.denominator_exponent)
    nb = _mul_one_minus_t(list(b.numerator), den - b.denominator_exponent)
    n = max(len(na), len(nb))
    out = {i: (na[i] if i < len(na) else 0) + sign * (nb[i] if i < len(nb) else 0) for i in range(n)}
    return HilbertSeries.make(out, den)


def _minimalize(gens: Iterable[Exps]) -> Tuple[Exps, ...]:
    gens = sorted(set(gens), key=sum)
    kept: List[Exps] = []
    for g in gens:
        if not any(_divides(k, g) for k in kept):
            kept.append(g)
    return tuple(sorted(kept))


@lru_cache(maxsize=200_000)
def _hs_numerator(gens: Tuple[Exps, ...], nvars: int) -> Tuple[Tuple[int, int], ...]:
    """Numerator N of HS(S/I) = N(t)/(1-t)^nvars for the monomial ideal on ``gens`` (minimal)."""
    if not gens:
        return ((0, 1),)
    if any(sum(g) == 0 for g in gens):
        return ()
    # pairwise coprime generators: product of (1 - t^deg)
    support_seen = [0] * nvars
    coprime = True
    for g in gens:
        for i, e in enumerate(g):
            if e:
                if support_seen[i]:
                    coprime = False
                support_seen[i] = 1
    if coprime:
        poly = {0: 1}
        for g in gens:
            d = sum(g)
            nxt: Dict[int, int] = {}
            for k, v in poly.items():
                nxt[k] = nxt.get(k, 0) + v
                nxt[k + d] = nxt.get(k + d, 0) - v
            poly = nxt
        return tuple(sorted((k, v) for k, v in poly.items() if v))
    # pivot on the variable occurring in the most non-pure-power generators
    counts = [0] * nvars
    for g in gens:
        if sum(1 for e in g if e) > 1:
            for i, e in enumerate(g):
                if e:
                    counts[i] += 1
    v = max(range(nvars), key=lambda i: counts[i])
    exps = sorted(g[v] for g in gens if g[v] and sum(1 for e in g if e) > 1)
    a = exps[len(exps) // 2]
    pivot = tuple(a if i == v else 0 for i in range(nvars))
    plus = _minimalize(gens + (pivot,))
    colon = _minimalize(tuple(tuple(max(0, x - y) for x, y in zip(g, pivot)) for g in gens))
    out: Dict[int, int] = {}
    for k, c in _hs_numerator(plus, nvars):
        out[k] = out.get(k, 0) + c
    for k, c in _hs_numerator(colon, nvars):
        out[k + a] = out.get(k + a, 0) + c
    return tuple(sorted((k, c) for k, c in out.items() if c))


def monomial_hilbert_series(gens: Iterable[Exps], nvars: int, shift: int = 0) -> HilbertSeries:
    num = dict((k + shift, c) for k, c in _hs_numerator(_minimalize(gens), nvars))
    return HilbertSeries.make(num, nvars)


def hilbert_series_quotient(A: Submodule) -> HilbertSeries:
    """Hilbert series of F/A (A homogeneous w.r.t. standard degree plus position shifts)."""
    amb = A.ambient
    leads = A.leads()
    total = HilbertSeries.make({}, 0)
    for pos in range(amb.rank):
        total = total + monomial_hilbert_series(leads.get(pos, ()), amb.nvars, amb.shifts[pos])
    return total


def length_between(A: Submodule, B: Submodule) -> int:
    """ell(A/B) for B contained in A, via HS(F/B) - HS(F/A) (certified polynomial)."""
    diff = hilbert_series_quotient(B) - hilbert_series_quotient(A)
    if not diff.is_polynomial():
        raise NotFiniteLength("quotient is not of finite length")
    return diff.value_at_one()


def _monomial_dim(gens: Sequence[Exps], nvars: int) -> int:
    gens = _minimalize(gens)
    if any(sum(g) == 0 for g in gens):
        return -1
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in gens]
    best = 0
    for size in range(nvars, -1, -1):
        for S in combinations(range(nvars), size):
            s = frozenset(S)
            if all(not sup <= s for sup in supports):
                return size
    return best


def krull_dim(A: Submodule) -> int:
    """Krull dimension of F/A (-1 for the zero module)."""
    amb = A.ambient
    leads = A.leads()
    return max(_monomial_dim(leads.get(pos, ()), amb.nvars) for pos in range(amb.rank))


# ----------------------------------------------------------------------------
# minimal generators (graded Nakayama)


def _rank_select(vectors: Sequence[Vector], p: int) -> List[int]:
    """Indices of a maximal k-linearly independent subset (greedy, in order)."""
    pivots: Dict[Term, Vector] = {}
    chosen = []
    for idx, v in enumerate(vectors):
        w = dict(v)
        while w:
            t = leading_term(w)
            if t not in pivots:
                break
            piv = pivots[t]
            c = w[t]
            for k, pc in piv.items():
                nv = (w.get(k, 0) - c * pc) % p
                if nv:
                    w[k] = nv
                else:
                    w.pop(k, None)
        if w:
            pivots[leading_term(w)] = make_monic(w, p)
            chosen.append(idx)
    return chosen


def minimal_generating_set(A: Submodule) -> List[Vector]:
    """A minimal homogeneous generating set of A, chosen among its generators."""
    amb = A.ambient
    p = amb.p
    by_deg: Dict[int, List[Vector]] = {}
    for g in A.generators:
        d = vector_degree(g, amb.shifts)
        if d is None:
            raise ValueError("minimal generators need homogeneous generators")
        by_deg.setdefault(d, []).append(g)
    kept: List[Vector] = []
    gb: List[Vector] = []
    degrees = sorted(by_deg)
    for d in degrees:
        group = by_deg[d]
        if all(len(g) == 1 for g in group) and all(len(g) == 1 for g in gb):
            # monomial shortcut: keep distinct terms not divisible by earlier leads
            seen = set()
            chosen = []
            for g in group:
                t = next(iter(g))
                if t in seen:
                    continue
                seen.add(t)
                if not any(leading_term(h)[0] == t[0] and _divides(leading_term(h)[1], t[1]) for h in gb):
                    chosen.append({t: 1})
        else:
            red = _Reducer(gb)
            nfs = [normal_form(g, gb, p, red) for g in group]
            chosen = [group[i] for i in _rank_select(nfs, p)]
        kept.extend(chosen)
        if chosen and d != degrees[-1]:
            gb = buchberger(chosen, p, amb.rank, initial_gb=gb)
    return kept


def min_generators(A: Submodule) -> int:
    """mu(A) = dim_k A/mA."""
    return len(minimal_generating_set(A))
