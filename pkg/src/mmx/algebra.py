"""Exact arithmetic over GF(p) in the bigraded ring k[x_1..x_d][T_1..T_p].

Polynomials are sparse maps from exponent tuples (x-block followed by the
T-block) to nonzero residues.  Free-module elements are sparse maps from
``(position, exponents)`` to residues.  Everything is immutable once built.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import InputError, RingMismatch

DEFAULT_CHARACTERISTIC = 32003

Exps = Tuple[int, ...]
Term = Tuple[int, Exps]  # (position, exponents)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def field_inverse(a: int, p: int) -> int:
    """Inverse of ``a`` in GF(p)."""
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(%d)" % p)
    return pow(a, -1, p)


@dataclass(frozen=True)
class RingSpec:
    characteristic: int = DEFAULT_CHARACTERISTIC
    x_vars: Tuple[str, ...] = ("x", "y")
    t_rank: int = 1

    def __post_init__(self):
        object.__setattr__(self, "x_vars", tuple(self.x_vars))
        if not is_prime(self.characteristic):
            raise ValueError(f"characteristic {self.characteristic} is not prime")
        if len(self.x_vars) < 1:
            raise ValueError("need at least one x-variable")
        if self.t_rank < 1:
            raise ValueError("t_rank must be >= 1")
        names = self.x_vars + self.t_vars
        if len(set(names)) != len(names):
            raise ValueError(f"variable names are not distinct: {names}")

    @property
    def d(self) -> int:
        return len(self.x_vars)

    @property
    def p(self) -> int:
        return self.t_rank

    @property
    def t_vars(self) -> Tuple[str, ...]:
        return tuple(f"T{i + 1}" for i in range(self.t_rank))

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.x_vars + self.t_vars

    @property
    def nvars(self) -> int:
        return self.d + self.t_rank

    def split(self, exps: Exps) -> Tuple[Exps, Exps]:
        return exps[: self.d], exps[self.d:]

    def x_monomial(self, i: int) -> Exps:
        e = [0] * self.nvars
        e[i] = 1
        return tuple(e)

    def t_monomial(self, j: int) -> Exps:
        e = [0] * self.nvars
        e[self.d + j] = 1
        return tuple(e)


# ----------------------------------------------------------------------------
# monomial order: graded reverse lex on (x_1..x_d, T_1..T_p), position over term


def mono_key(exps: Exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def term_key(term: Term):
    pos, exps = term
    return (-pos, sum(exps), tuple(-e for e in reversed(exps)))


@dataclass(frozen=True)
class BigradedMonomial:
    x_exponents: Exps
    t_exponents: Exps = ()

    def __post_init__(self):
        object.__setattr__(self, "x_exponents", tuple(self.x_exponents))
        object.__setattr__(self, "t_exponents", tuple(self.t_exponents))
        if any(e < 0 for e in self.x_exponents + self.t_exponents):
            raise ValueError("negative exponent")

    @property
    def xdeg(self) -> int:
        return sum(self.x_exponents)

    @property
    def tdeg(self) -> int:
        return sum(self.t_exponents)

    @property
    def exponents(self) -> Exps:
        return self.x_exponents + self.t_exponents

    def __mul__(self, other: "BigradedMonomial") -> "BigradedMonomial":
        return BigradedMonomial(
            tuple(a + b for a, b in zip(self.x_exponents, other.x_exponents)),
            tuple(a + b for a, b in zip(self.t_exponents, other.t_exponents)),
        )


def monomial_compare(a: BigradedMonomial, b: BigradedMonomial) -> int:
    """Return 1, 0 or -1 as ``a`` is larger, equal or smaller than ``b``."""
    if len(a.x_exponents) != len(b.x_exponents) or len(a.t_exponents) != len(b.t_exponents):
        raise RingMismatch("monomials from different rings")
    ka, kb = mono_key(a.exponents), mono_key(b.exponents)
    return (ka > kb) - (ka < kb)


# ----------------------------------------------------------------------------
# raw sparse helpers (dicts), shared with the Groebner engine


def add_into(acc: Dict, other: Mapping, p: int, scale: int = 1) -> None:
    for k, c in other.items():
        v = (acc.get(k, 0) + scale * c) % p
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def exps_add(a: Exps, b: Exps) -> Exps:
    return tuple(x + y for x, y in zip(a, b))


def poly_mul_raw(a: Mapping[Exps, int], b: Mapping[Exps, int], p: int) -> Dict[Exps, int]:
    out: Dict[Exps, int] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = exps_add(ea, eb)
            v = (out.get(e, 0) + ca * cb) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def poly_times_vector(f: Mapping[Exps, int], v: Mapping[Term, int], p: int) -> Dict[Term, int]:
    out: Dict[Term, int] = {}
    for ef, cf in f.items():
        for (pos, ev), cv in v.items():
            k = (pos, exps_add(ef, ev))
            c = (out.get(k, 0) + cf * cv) % p
            if c:
                out[k] = c
            else:
                out.pop(k, None)
    return out


# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Sparse polynomial of G = k[x][T] with canonical (zero-free) storage."""

    ring: RingSpec
    terms: Mapping[Exps, int] = field(default_factory=dict)

    def __post_init__(self):
        p = self.ring.characteristic
        clean = {}
        for e, c in self.terms.items():
            e = tuple(e)
            if len(e) != self.ring.nvars:
                raise ValueError(f"exponent tuple {e} has wrong length")
            c %= p
            if c:
                clean[e] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: mono_key(kv[0]), reverse=True)))

    # constructors
    @classmethod
    def zero(cls, ring: RingSpec) -> "Polynomial":
        return cls(ring, {})

    @classmethod
    def constant(cls, ring: RingSpec, c: int) -> "Polynomial":
        return cls(ring, {(0,) * ring.nvars: c})

    @classmethod
    def monomial(cls, ring: RingSpec, exps: Exps, c: int = 1) -> "Polynomial":
        return cls(ring, {tuple(exps): c})

    @classmethod
    def var(cls, ring: RingSpec, name: str) -> "Polynomial":
        idx = ring.variables.index(name)
        e = [0] * ring.nvars
        e[idx] = 1
        return cls(ring, {tuple(e): 1})

    @classmethod
    def parse(cls, text: str, ring: RingSpec) -> "Polynomial":
        return parse_polynomial(text, ring)

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def leading(self) -> Tuple[Exps, int]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = next(iter(self.terms))
        return e, self.terms[e]

    def bidegrees(self):
        return {(sum(self.ring.split(e)[0]), sum(self.ring.split(e)[1])) for e in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1

    @property
    def xdeg(self) -> int:
        degs = self.bidegrees()
        if len(degs) != 1:
            raise ValueError("xdeg of zero or non-homogeneous polynomial")
        return next(iter(degs))[0]

    @property
    def tdeg(self) -> int:
        degs = {b[1] for b in self.bidegrees()}
        if len(degs) != 1:
            raise ValueError("tdeg of zero or T-inhomogeneous polynomial")
        return next(iter(degs))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # arithmetic
    def _check(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.ring, other)
        self._check(other)
        acc = dict(self.terms)
        add_into(acc, other.terms, self.ring.characteristic)
        return Polynomial(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.characteristic
        return Polynomial(self.ring, {e: -c % p for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        return Polynomial(self.ring, poly_mul_raw(self.terms, other.terms, self.ring.characteristic))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = Polynomial.constant(self.ring, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: int) -> "Polynomial":
        p = self.ring.characteristic
        return Polynomial(self.ring, {e: v * c % p for e, v in self.terms.items()})

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(field_inverse(self.leading()[1], self.ring.characteristic))

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.ring, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __str__(self):
        return format_polynomial(self.terms, self.ring.variables, self.ring.characteristic)

    def __repr__(self):
        return f"Polynomial({self})"


def poly_arith(a: Polynomial, b, op: str) -> Polynomial:
    """Apply ``op`` in {'add', 'mul', 'scale'}; for 'scale' ``b`` is an int."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(int(b))
    raise ValueError(f"unknown op {op!r}")


@dataclass(frozen=True, eq=False)
class FreeElement:
    """Element of a free module ``A^rank`` (A = G or R) stored as a sparse term map."""

    ring: RingSpec
    rank: int
    terms: Mapping[Term, int] = field(default_factory=dict)

    def __post_init__(self):
        p = self.ring.characteristic
        clean = {}
        for (pos, e), c in self.terms.items():
            if not 0 <= pos < self.rank:
                raise ValueError(f"position {pos} outside rank {self.rank}")
            c %= p
            if c:
                clean[(pos, tuple(e))] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), key=lambda kv: term_key(kv[0]), reverse=True)))

    @classmethod
    def from_entries(cls, entries: Sequence[Polynomial]) -> "FreeElement":
        if not entries:
            raise ValueError("need at least one entry")
        ring = entries[0].ring
        terms = {}
        for pos, f in enumerate(entries):
            if f.ring != ring:
                raise RingMismatch("entries from different rings")
            for e, c in f.terms.items():
                terms[(pos, e)] = c
        return cls(ring, len(entries), terms)

    @classmethod
    def basis(cls, ring: RingSpec, rank: int, pos: int) -> "FreeElement":
        return cls(ring, rank, {(pos, (0,) * ring.nvars): 1})

    @property
    def entries(self) -> Tuple[Polynomial, ...]:
        parts = [dict() for _ in range(self.rank)]
        for (pos, e), c in self.terms.items():
            parts[pos][e] = c
        return tuple(Polynomial(self.ring, t) for t in parts)

    def is_zero(self) -> bool:
        return not self.terms

    def bidegrees(self):
        d = self.ring.d
        return {(sum(e[:d]), sum(e[d:])) for (_, e) in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1

    def __add__(self, other: "FreeElement") -> "FreeElement":
        if other.ring != self.ring or other.rank != self.rank:
            raise RingMismatch("free elements from different ambients")
        acc = dict(self.terms)
        add_into(acc, other.terms, self.ring.characteristic)
        return FreeElement(self.ring, self.rank, acc)

    def scale(self, c: int) -> "FreeElement":
        p = self.ring.characteristic
        return FreeElement(self.ring, self.rank, {k: v * c % p for k, v in self.terms.items()})

    def times(self, f: Polynomial) -> "FreeElement":
        if f.ring != self.ring:
            raise RingMismatch("scalar from a different ring")
        return FreeElement(self.ring, self.rank, poly_times_vector(f.terms, self.terms, self.ring.characteristic))

    def __eq__(self, other):
        if not isinstance(other, FreeElement):
            return NotImplemented
        return self.ring == other.ring and self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, self.rank, frozenset(self.terms.items())))

    def __str__(self):
        return "(" + ", ".join(str(f) for f in self.entries) + ")"


# ----------------------------------------------------------------------------
# text syntax


def format_monomial(exps: Exps, names: Sequence[str]) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def format_polynomial(terms: Mapping[Exps, int], names: Sequence[str], p: int) -> str:
    if not terms:
        return "0"
    out = []
    for e, c in sorted(terms.items(), key=lambda kv: mono_key(kv[0]), reverse=True):
        # print residues in the symmetric range so -1 reads as -1
        if c > p // 2:
            c -= p
        mono = format_monomial(e, names)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\^)|(\*)|(\+)|(-)|(\()|(\)))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1
            while col <= len(text) and text[col - 1].isspace():
                col += 1
            raise InputError(f"unexpected character {text[col - 1]!r} in {text!r}", column=col)
        kinds = ("int", "name", "^", "*", "+", "-", "(", ")")
        for kind, val in zip(kinds, m.groups()):
            if val is not None:
                start = m.start(kinds.index(kind) + 1)
                toks.append((kind, val, start + 1))
                break
        pos = m.end()
    return toks


def _split_name(name: str, names: Sequence[str], col: int):
    """Split a juxtaposed identifier like ``xy2`` into known variable names."""
    if name in names:
        return [name]
    ordered = sorted(names, key=len, reverse=True)
    out = []
    i = 0
    while i < len(name):
        for n in ordered:
            if name.startswith(n, i):
                out.append(n)
                i += len(n)
                break
        else:
            raise InputError(f"unknown variable {name!r}", column=col)
    return out


class _Parser:
    def __init__(self, text: str, ring: RingSpec):
        self.ring = ring
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.names = list(ring.variables)
        if ring.t_rank == 1:
            self.names.append("T")

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text) + 1)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def var_poly(self, name: str) -> Polynomial:
        if name == "T" and self.ring.t_rank == 1:
            name = "T1"
        return Polynomial.var(self.ring, name)

    def parse(self) -> Polynomial:
        if not self.toks:
            raise InputError(f"empty polynomial", column=1)
        out = self.expr()
        kind, val, col = self.peek()
        if kind is not None:
            raise InputError(f"unexpected {val!r} in {self.text!r}", column=col)
        return out

    def expr(self) -> Polynomial:
        out = Polynomial.zero(self.ring)
        sign = 1
        kind, _, _ = self.peek()
        if kind in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        out = out + self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            out = out + self.term().scale(sign)
        return out

    def term(self) -> Polynomial:
        out = self.factor()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                self.take()
                out = out * self.factor()
            elif kind in ("int", "name", "("):
                out = out * self.factor()
            else:
                return out

    def factor(self) -> Polynomial:
        kind, val, col = self.take()
        if kind == "int":
            base = Polynomial.constant(self.ring, int(val))
        elif kind == "name":
            parts = _split_name(val, self.names, col)
            base = Polynomial.constant(self.ring, 1)
            for n in parts[:-1]:
                base = base * self.var_poly(n)
            last = self.var_poly(parts[-1])
            if self.peek()[0] == "^":
                self.take()
                k, kval, kcol = self.take()
                if k != "int":
                    raise InputError(f"exponent must be a non-negative integer in {self.text!r}", column=kcol)
                last = last ** int(kval)
            return base * last
        elif kind == "(":
            base = self.expr()
            k, kval, kcol = self.take()
            if k != ")":
                raise InputError(f"missing ')' in {self.text!r}", column=kcol)
        elif kind is None:
            raise InputError(f"unexpected end of input in {self.text!r}", column=col)
        else:
            raise InputError(f"unexpected {val!r} in {self.text!r}", column=col)
        if self.peek()[0] == "^":
            self.take()
            k, kval, kcol = self.take()
            if k != "int":
                raise InputError(f"exponent must be a non-negative integer in {self.text!r}", column=kcol)
            base = base ** int(kval)
        return base


def parse_polynomial(text: str, ring: RingSpec) -> Polynomial:
    """Parse ``x^2*y + 3y^3`` style text over ``ring`` (T-variables are T1..Tp)."""
    return _Parser(str(text), ring).parse()


def linear_form(ring: RingSpec, coords: Sequence[Polynomial]) -> Polynomial:
    """sum_j coords[j] * T_j; the coordinates must be x-only polynomials."""
    if len(coords) != ring.t_rank:
        raise ValueError(f"expected {ring.t_rank} coordinates, got {len(coords)}")
    out = Polynomial.zero(ring)
    for j, h in enumerate(coords):
        if any(sum(ring.split(e)[1]) for e in h.terms):
            raise ValueError("coordinates must not involve T-variables")
        out = out + h * Polynomial.monomial(ring, ring.t_monomial(j))
    return out


def iter_monomials(nvars: int, degree: int) -> Iterable[Exps]:
    """All exponent tuples of ``nvars`` variables with total degree ``degree``."""
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in iter_monomials(nvars - 1, degree - first):
            yield (first,) + rest
