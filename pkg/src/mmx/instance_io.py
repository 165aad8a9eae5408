"""Reading and writing instance files (TOML syntax).

Layout::

    name = "ex1"
    [ring]
    characteristic = 32003
    variables = ["x", "y"]
    [setup]
    p = 1
    [module]
    rank = 1
    presentation = []            # rows of `rank` polynomials in the x-variables
    [J]
    generators = [["x"], ["y"]]  # p-entry coordinate lists
    [[I]]
    name = "I1"
    tdeg = 1
    generators = [["x^2"], ["y^3"]]

A generator of a piece is either a p-entry list (T-degree 1) or a polynomial
string in the x-variables and T1..Tp.  Instead of ``[J]``/``[[I]]`` a file may
carry a ``[family]`` section with ``F`` and ``[[family.E]]`` columns of R^p.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence, Union

import tomli

from .algebra import FreeElement, Polynomial, RingSpec, format_polynomial
from .bridge import ModuleFamily, embed, to_instance
from .errors import InputError
from .graded import GradedPiece, Instance

CORPUS_PACKAGE = "mmx.corpus"


class _Source:
    """Raw text plus a best-effort lookup of where a string value sits in it."""

    def __init__(self, text: str):
        self.text = text

    def locate(self, value: str, column: Optional[int] = None):
        needle = '"' + value + '"'
        at = self.text.find(needle)
        if at < 0:
            needle = "'" + value + "'"
            at = self.text.find(needle)
        if at < 0:
            return None, None
        at += 1 + ((column or 1) - 1)
        line = self.text.count("\n", 0, at) + 1
        col = at - (self.text.rfind("\n", 0, at) + 1) + 1
        return line, col


def _poly(src: _Source, text, ring: RingSpec, where: str) -> Polynomial:
    if isinstance(text, int) and not isinstance(text, bool):
        return Polynomial.constant(ring, text)
    if not isinstance(text, str):
        raise InputError(f"{where}: expected a polynomial string, got {text!r}")
    try:
        return Polynomial.parse(text, ring)
    except InputError as exc:
        line, col = src.locate(text, exc.column)
        msg = str(exc).split(" (line")[0]
        raise InputError(f"{where}: {msg}", line=line, column=col) from None


def _x_only(f: Polynomial, src: _Source, where: str) -> Polynomial:
    if any(sum(e[f.ring.d:]) for e in f.terms):
        line, col = src.locate(str(f))
        raise InputError(f"{where}: entries must not involve T-variables", line=line, column=col)
    return f


def _column(src, entries, ring, where) -> tuple:
    if not isinstance(entries, list) or len(entries) != ring.p:
        raise InputError(f"{where}: expected a list of {ring.p} entries, got {entries!r}")
    return tuple(_x_only(_poly(src, e, ring, where), src, where) for e in entries)


def _generator(src, g, ring, where) -> Polynomial:
    if isinstance(g, list):
        return embed(_column(src, g, ring, where), ring)
    return _poly(src, g, ring, where)


def _require(table, key, where, kind):
    if key not in table:
        raise InputError(f"missing key {key!r} in {where}")
    val = table[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise InputError(f"{where}.{key} has the wrong type ({type(val).__name__})")
    return val


def _ring(doc) -> RingSpec:
    ring_t = doc.get("ring")
    if not isinstance(ring_t, dict):
        raise InputError("missing [ring] section")
    setup = doc.get("setup", {})
    p = setup.get("p", 1)
    if not isinstance(p, int) or isinstance(p, bool):
        raise InputError("setup.p must be an integer")
    char = ring_t.get("characteristic", 32003)
    names = _require(ring_t, "variables", "ring", list)
    try:
        return RingSpec(char, tuple(names), p)
    except (ValueError, TypeError) as exc:
        raise InputError(f"invalid [ring]/[setup]: {exc}") from None


def _module(src, doc, ring):
    mod = doc.get("module", {})
    rank = mod.get("rank", 1)
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        raise InputError("module.rank must be a positive integer")
    rows = []
    for i, row in enumerate(mod.get("presentation", [])):
        where = f"module.presentation[{i}]"
        if not isinstance(row, list) or len(row) != rank:
            raise InputError(f"{where}: expected a list of {rank} entries")
        entries = [_x_only(_poly(src, e, ring, where), src, where) for e in row]
        rows.append(FreeElement.from_entries(entries))
    return rank, tuple(rows)


def parse_family(doc, src: _Source, ring: RingSpec, rank, rows, name) -> ModuleFamily:
    fam = doc["family"]
    F = tuple(_column(src, c, ring, f"family.F[{i}]") for i, c in enumerate(_require(fam, "F", "family", list)))
    E_list = []
    for i, e in enumerate(fam.get("E", [])):
        ename = e.get("name", f"E{i + 1}")
        cols = tuple(
            _column(src, c, ring, f"family.E[{i}].generators[{k}]")
            for k, c in enumerate(_require(e, "generators", f"family.E[{i}]", list))
        )
        E_list.append((ename, cols))
    if not E_list:
        raise InputError("family needs at least one [[family.E]] entry (q >= 1)")
    return ModuleFamily(ring, F, tuple(E_list), rank, rows, name)


def loads_instance(text: str, name: Optional[str] = None) -> Instance:
    inst, _ = _loads(text, name)
    return inst


def _loads(text: str, name: Optional[str]):
    src = _Source(text)
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        msg = str(exc).split(" (at line")[0]
        raise InputError(f"TOML syntax error: {msg}", line=line, column=col) from None
    ring = _ring(doc)
    rank, rows = _module(src, doc, ring)
    name = doc.get("name", name or "instance")
    if "family" in doc:
        if "J" in doc or "I" in doc:
            raise InputError("give either [family] or [J]/[[I]], not both")
        fam = parse_family(doc, src, ring, rank, rows, name)
        return to_instance(fam), fam
    J_t = doc.get("J")
    if not isinstance(J_t, dict):
        raise InputError("missing [J] section")
    J = GradedPiece("J", tuple(_generator(src, g, ring, f"J.generators[{i}]")
                               for i, g in enumerate(_require(J_t, "generators", "J", list))), 1)
    I_list = []
    for i, piece in enumerate(doc.get("I", [])):
        tdeg = piece.get("tdeg", 1)
        gens = tuple(_generator(src, g, ring, f"I[{i}].generators[{k}]")
                     for k, g in enumerate(_require(piece, "generators", f"I[{i}]", list)))
        if not any(not g.is_zero() for g in gens):
            raise InputError(f"I[{i}] has no nonzero generators")
        I_list.append(GradedPiece(piece.get("name", f"I{i + 1}"), gens, tdeg))
    if not I_list:
        raise InputError("at least one [[I]] piece is required (q >= 1)")
    return Instance(ring, rank, rows, J, tuple(I_list), name), None


def resolve_path(path: Union[str, Path]) -> Path:
    """Return ``path`` if it exists, else the packaged corpus file of that name."""
    p = Path(path)
    if p.exists():
        return p
    corpus = resources.files(CORPUS_PACKAGE)
    for cand in (p.name, p.name + ".toml"):
        f = corpus / cand
        if f.is_file():
            return Path(str(f))
    raise InputError(f"instance file not found: {path}")


def read_instance(path: Union[str, Path]) -> Instance:
    p = resolve_path(path)
    return loads_instance(p.read_text(), p.stem)


def read_family(path: Union[str, Path]) -> Optional[ModuleFamily]:
    p = resolve_path(path)
    return _loads(p.read_text(), p.stem)[1]


def corpus_files() -> List[Path]:
    corpus = resources.files(CORPUS_PACKAGE)
    return sorted(Path(str(f)) for f in corpus.iterdir() if f.name.endswith(".toml"))


# ----------------------------------------------------------------------------
# emitting


def _q(s: str) -> str:
    return '"' + s + '"'


def _x_text(f: Polynomial) -> str:
    return format_polynomial(f.terms, f.ring.variables, f.ring.characteristic)


def _coords(g: Polynomial) -> List[Polynomial]:
    ring = g.ring
    d = ring.d
    out = [dict() for _ in range(ring.p)]
    for e, c in g.terms.items():
        t = e[d:]
        j = t.index(1)
        out[j][e[:d] + (0,) * ring.p] = c
    return [Polynomial(ring, o) for o in out]


def _gen_text(g: Polynomial, tdeg: int) -> str:
    if tdeg == 1:
        return "[" + ", ".join(_q(_x_text(h)) for h in _coords(g)) + "]"
    return _q(_x_text(g))


def _list(items: Sequence[str]) -> str:
    return "[" + ", ".join(items) + "]"


def dumps_instance(inst: Instance, family: Optional[ModuleFamily] = None) -> str:
    ring = inst.ring
    lines = [f"name = {_q(inst.name)}", "", "[ring]", f"characteristic = {ring.characteristic}",
             f"variables = {_list([_q(v) for v in ring.x_vars])}", "", "[setup]", f"p = {ring.p}", "",
             "[module]", f"rank = {inst.module_rank}"]
    rows = []
    for row in inst.presentation:
        ents = [dict() for _ in range(row.rank)]
        for (pos, e), c in row.terms.items():
            ents[pos][e] = c
        rows.append(_list([_q(_x_text(Polynomial(ring, t))) for t in ents]))
    lines.append(f"presentation = {_list(rows)}")
    if family is not None:
        col = lambda h: _list([_q(_x_text(x)) for x in h])
        lines += ["", "[family]", f"F = {_list([col(h) for h in family.F])}"]
        for ename, cols in family.E_list:
            lines += ["", "[[family.E]]", f"name = {_q(ename)}", f"generators = {_list([col(h) for h in cols])}"]
        return "\n".join(lines) + "\n"
    lines += ["", "[J]", f"generators = {_list([_gen_text(g, 1) for g in inst.J.generators])}"]
    for piece in inst.I_list:
        lines += ["", "[[I]]", f"name = {_q(piece.name)}", f"tdeg = {piece.tdeg}",
                  f"generators = {_list([_gen_text(g, piece.tdeg) for g in piece.generators])}"]
    return "\n".join(lines) + "\n"
