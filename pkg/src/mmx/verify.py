"""Instance-level checks of the structural results on mixed multiplicities and (FC)-sequences.

Every verifier computes both sides through separate code paths (a fitted
multiplicity table on one side, constructed sequences, Buchsbaum-Rim fits of
quotients or growth degrees on the other) and returns a report whose verdict
is the conjunction of its sub-checks.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import DimensionDropFailure, InputError
from .fc import (
    FcCertificate,
    analytic_spread,
    build_maximal_weak_fc_sequence,
    default_window,
    fc3_dims,
    find_weak_fc_element,
    mu,
    reduction_number_N,
)
from .graded import DerivedModule, GradedPiece, Instance, calI, piece_power, saturated_data
from .algebra import Polynomial
from .multiplicity import (
    MultiplicityTable,
    buchsbaum_rim_all,
    compositions,
    entry_label,
    max_LU_degree,
    mixed_multiplicities,
    specialized_Q,
)


@dataclass
class SubCheck:
    name: str
    lhs: Any
    rhs: Any
    relation: str
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": _jsonable(self.lhs), "relation": self.relation,
                "rhs": _jsonable(self.rhs), "pass": self.passed}


def _jsonable(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class VerificationReport:
    theorem: str
    instance: str
    instance_hash: str
    subchecks: List[SubCheck] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    elapsed_ms: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.subchecks)

    def check(self, name: str, lhs, rhs, relation: str = "==") -> bool:
        ok = {
            "==": lambda: lhs == rhs,
            "<=": lambda: lhs <= rhs,
            "!=": lambda: lhs != rhs,
            "iff": lambda: bool(lhs) == bool(rhs),
            "implies": lambda: (not lhs) or bool(rhs),
        }[relation]()
        self.subchecks.append(SubCheck(name, lhs, rhs, relation, ok))
        return ok

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "instance": self.instance,
            "instance_hash": self.instance_hash,
            "pass": self.passed,
            "subchecks": [c.to_json() for c in self.subchecks],
            "seeds": list(self.seeds),
            "notes": list(self.notes),
            "elapsed_ms": self.elapsed_ms,
        }

    def trace(self) -> str:
        lines = [f"{self.theorem} on {self.instance}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.subchecks:
            lines.append(f"  [{'ok' if c.passed else 'XX'}] {c.name}: {c.lhs} {c.relation} {c.rhs}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


class _Timer:
    def __init__(self, report: VerificationReport):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.elapsed_ms = int((time.perf_counter() - self.t0) * 1000)
        return False


def _report(theorem: str, inst: Instance) -> VerificationReport:
    return VerificationReport(theorem, inst.name, inst.fingerprint())


def product_piece(inst: Instance) -> GradedPiece:
    """I = I_1...I_q as a single piece of T-degree sum(d_i)."""
    polys = piece_power(inst.I_list, (1,) * inst.q)
    tdeg = sum(p.tdeg for p in inst.I_list)
    name = "*".join(p.name for p in inst.I_list)
    return GradedPiece(name, tuple(Polynomial(inst.ring, f) for f in polys), tdeg)


def maximal_ideal_piece(inst: Instance) -> GradedPiece:
    """m G_1, generated by x_i T_j."""
    ring = inst.ring
    gens = []
    for j in range(ring.p):
        for i in range(ring.d):
            gens.append(Polynomial.monomial(ring, tuple(
                1 if k == i or k == ring.d + j else 0 for k in range(ring.nvars))))
    return GradedPiece("mG1", tuple(gens), 1)


def default_alt_J(inst: Instance) -> GradedPiece:
    """The same module as J presented by (g_1 + g_2, g_2, ...)."""
    gens = list(inst.J.generators)
    if len(gens) >= 2:
        gens[0] = gens[0] + gens[1]
    return GradedPiece(inst.J.name + "'", tuple(gens), 1)


def is_free_G(inst: Instance) -> bool:
    return inst.module_rank == 1 and not inst.presentation


# ----------------------------------------------------------------------------


def fc_sequence_for(inst, k: Sequence[int], seed: int = 0):
    """Try to build an (FC)-sequence with k_i elements from I_i.

    Returns (certificates, final state, None) or (certificates so far, state, failing step).
    """
    state = inst.module() if isinstance(inst, Instance) else inst
    base = state.base
    window = default_window(base)
    slots = [i + 1 for i, ki in enumerate(k) for _ in range(ki)]
    certs: List[FcCertificate] = []
    for step, slot in enumerate(slots):
        cert = find_weak_fc_element(slot, state, seed * 1009 + step, window)
        before, after = fc3_dims(cert.element, state)
        cert.fc3_dims = (before, after)
        certs.append(cert)
        if after != before - 1:
            return certs, state, step
        state = state.quotient([cert.element])
    return certs, state, None


def verify_mixed_equals_br(inst: Instance, j: int, k0: Optional[int], k: Sequence[int], seed: int = 0,
                           table: Optional[MultiplicityTable] = None) -> VerificationReport:
    """Table entry e^j(J^[k0], I^[k]; M) against e^j_BR(J; M/((x_1..x_t)M : I^inf))."""
    rep = _report("teo12i", inst)
    rep.seeds = [seed]
    with _Timer(rep):
        table = table or mixed_multiplicities(inst)
        D = table.D
        k = tuple(k)
        t = sum(k)
        if k0 is None:
            k0 = D - j - t
        if k0 < 0 or j + k0 + t != D:
            raise InputError(f"j + k0 + |k| must equal D = {D}")
        entry = table.get(j, k0, k)
        certs, state, failed = fc_sequence_for(inst, k, seed)
        rep.notes.append("sequence: " + ", ".join(str(c.element) for c in certs))
        if failed is not None:
            rep.notes.append(f"no (FC)-sequence: element {failed + 1} fails the dimension drop {certs[-1].fc3_dims}")
            rep.check(f"no (FC)-sequence => {entry_label(j, k0, k)} = 0", entry, 0, "==")
            return rep
        sat = state.saturation(calI(inst))
        br = buchsbaum_rim_all(sat, inst.J, degree=D - t)[j]
        rep.check(f"{entry_label(j, k0, k)} = e^{j}_BR(J; saturated quotient)", entry, br, "==")
        if entry:
            rep.check("weak elements are (FC) when the entry is nonzero", sum(
                1 for c in certs if c.fc3_dims[1] == c.fc3_dims[0] - 1), len(certs), "==")
        ht = saturated_data(inst).ht
        if 0 < t <= ht - 1:
            plain = buchsbaum_rim_all(state, inst.J, degree=D - t)[j]
            rep.check(f"{entry_label(j, k0, k)} = e^{j}_BR(J; unsaturated quotient)", entry, plain, "==")
    return rep


# ----------------------------------------------------------------------------


def verify_positivity(inst: Instance, table: Optional[MultiplicityTable] = None) -> VerificationReport:
    """Vanishing above the analytic spread, non-vanishing below the height, and the
    J-exponent equivalence for nonvanishing."""
    rep = _report("cor2", inst)
    with _Timer(rep):
        table = table or mixed_multiplicities(inst)
        D, q = table.D, table.q
        h = saturated_data(inst).ht
        s = analytic_spread(product_piece(inst))
        rep.notes.append(f"D={D} ht={h} s(I)={s}")
        for (j, k0, kk), e in sorted(table.entries.items()):
            if sum(kk) >= s:
                rep.check(f"{entry_label(j, k0, kk)} vanishes (|k| >= s(I))", e, 0, "==")
        for (j, k0, kk), e in sorted(table.entries.items()):
            if j == 0 and h > 0 and sum(kk) <= h - 1:
                rep.check(f"{entry_label(j, k0, kk)} nonzero (|k| <= ht-1)", e, 0, "!=")
        # nonvanishing for fixed k is read off the j=0 entry
        for kk in sorted({kk for (_, _, kk) in table.entries}):
            top = D - sum(kk)
            if top <= 0:
                continue
            head = table.get(0, top, kk)
            some = any(table.get(sv, top - sv, kk) for sv in range(0, top))
            rep.check(f"e^0[{top};{','.join(map(str, kk))}] nonzero iff some e^s[{top}-s;...] (s<{top}) nonzero",
                      head != 0, some, "iff")
            every = all(table.get(sv, top - sv, kk) for sv in range(0, top + 1))
            if bool(head) != every:
                rep.notes.append(f"for k={list(kk)} not every e^s with the same k is nonzero")
        if is_free_G(inst) and h == s and h > 0:
            for (j, k0, kk), e in sorted(table.entries.items()):
                if j == 0:
                    rep.check(f"{entry_label(j, k0, kk)} nonzero iff |k| <= ht-1", e != 0, sum(kk) <= h - 1, "iff")
    return rep


# ----------------------------------------------------------------------------


def fc_prefix_length(seq) -> int:
    n = 0
    for c in seq.certificates:
        if c.fc3_dims is None or c.fc3_dims[1] != c.fc3_dims[0] - 1:
            break
        n += 1
    return n


def verify_length_and_spread(inst: Instance, seeds: Sequence[int] = (0, 1, 2),
                             alt_J: Optional[GradedPiece] = None,
                             table: Optional[MultiplicityTable] = None) -> VerificationReport:
    rep = _report("teo1", inst)
    rep.seeds = list(seeds)
    with _Timer(rep):
        table = table or mixed_multiplicities(inst)
        alt = inst.with_J(alt_J or default_alt_J(inst))
        sd = saturated_data(inst)
        I = product_piece(inst)
        sI = analytic_spread(I)
        lengths = {}
        for i in range(1, inst.q + 1):
            per_seed = [build_maximal_weak_fc_sequence(inst, i, sd_seed).length for sd_seed in seeds]
            alt_len = build_maximal_weak_fc_sequence(alt, i, seeds[0]).length
            _, degQ = specialized_Q(table, i)
            rep.check(f"slot {i}: maximal weak-(FC) length = deg Q(r)+1", per_seed[0], degQ + 1)
            rep.check(f"slot {i}: length invariant across seeds {list(seeds)}", tuple(per_seed),
                      (per_seed[0],) * len(per_seed))
            rep.check(f"slot {i}: length invariant under J -> {alt.J.name}", alt_len, per_seed[0])
            lengths[i] = per_seed[0]
        max_LU = max_LU_degree(table)
        union = build_maximal_weak_fc_sequence(inst, list(range(1, inst.q + 1)), seeds[0]).length
        rep.check("constructed union sequence length <= deg Q(r)+1", union, max_LU, "<=")
        rep.check("deg Q(r)+1 <= s(I_1...I_q)", max_LU, sI, "<=")
        if inst.q == 1 and is_free_G(inst):
            N, seq, red = reduction_number_N(inst, 1, seeds[0])
            sI1 = analytic_spread(inst.I_list[0])
            rep.check("l = N(I)", lengths[1], N)
            rep.check("N(I) = s(I)", N, sI1)
            rep.check("mu(generated reduction) = l", mu(red), lengths[1])
        nonzero = [sum(kk) for (j, k0, kk), e in table.entries.items() if e and k0 > 0]
        max_L_star = max(nonzero, default=0)
        rep.check("max L* <= s(I)-1", max_L_star, sI - 1, "<=")
        if inst.q == 1:
            fam = inst.with_J(maximal_ideal_piece(inst)).with_I([I])
            seq = build_maximal_weak_fc_sequence(fam, 1, seeds[0])
            rep.check("max L* = maximal (FC) length in I w.r.t. (mG_1, I; M)", max_L_star, fc_prefix_length(seq))
        rep.check("ht <= max L_U", sd.ht, max_LU, "<=")
        rep.check("ht - 1 <= max L*", sd.ht - 1, max_L_star, "<=")
        per_slot_fc = []
        for i in range(inst.q):
            per_slot_fc.append(max((kk[i] for (j, k0, kk), e in table.entries.items() if e and k0 > 0), default=0))
        min_L_star = min(per_slot_fc) if per_slot_fc else 0
        rep.notes.append(f"min-variant: ht-1 = {sd.ht - 1}, smallest per-slot maximal (FC) length = {min_L_star}"
                         f" ({'holds' if sd.ht - 1 <= min_L_star else 'fails'})")
    return rep


# ----------------------------------------------------------------------------


def verify_decomposition_identity(inst: Instance, j: int = 0,
                                  table: Optional[MultiplicityTable] = None) -> VerificationReport:
    """e^j(J^[D-j-i], I^[i]) for the product I against the multinomial sum over the table."""
    rep = _report("teo3ii", inst)
    with _Timer(rep):
        table = table or mixed_multiplicities(inst)
        D, q = table.D, table.q
        if not 0 <= j <= D:
            raise InputError(f"j must lie in 0..{D}")
        prod_inst = inst.with_I([product_piece(inst)], name=inst.name + "-product")
        prod_table = mixed_multiplicities(prod_inst)
        for i in range(0, D - j + 1):
            k0 = D - j - i
            lhs = prod_table.get(j, k0, (i,))
            rhs = Fraction(0)
            for kk in compositions(i, q):
                denom = 1
                for x in kk:
                    denom *= factorial(x)
                rhs += Fraction(factorial(i) * table.get(j, k0, kk), denom)
            rep.check(f"i={i}: e^{j}(J^[{k0}], I^[{i}]) = multinomial sum", lhs, rhs)
    return rep


# ----------------------------------------------------------------------------


def verify_monotonicity(inst: Instance, alt_J: Optional[GradedPiece] = None,
                        table: Optional[MultiplicityTable] = None) -> VerificationReport:
    """Nonzero entries stay nonzero for another J and any smaller k with positive J-exponent."""
    rep = _report("teo3i", inst)
    with _Timer(rep):
        table = table or mixed_multiplicities(inst)
        alt = inst.with_J(alt_J or default_alt_J(inst))
        alt_table = mixed_multiplicities(alt)
        rep.notes.append(f"J' = {alt.J.name}: " + ", ".join(str(g) for g in alt.J.generators))
        D = table.D
        for (j, k0, kk), e in sorted(table.entries.items()):
            if not e:
                continue
            for mm in product(*(range(x + 1) for x in kk)):
                m0 = D - j - sum(mm)
                if m0 <= 0:
                    continue
                rep.check(f"{entry_label(j, k0, kk)} != 0 => J' entry {entry_label(j, m0, mm)} != 0",
                          alt_table.get(j, m0, mm), 0, "!=")
    return rep


THEOREMS = {
    "teo12i": "mixed-equals-br",
    "cor2": "positivity",
    "teo1": "length-and-spread",
    "teo3i": "monotonicity",
    "teo3ii": "decomposition",
}
ALIASES = {v: k for k, v in THEOREMS.items()}


def canonical_theorem(name: str) -> str:
    if name in THEOREMS:
        return name
    if name in ALIASES:
        return ALIASES[name]
    raise KeyError(f"unknown theorem {name!r}; choose from {sorted(THEOREMS) + sorted(ALIASES)}")
