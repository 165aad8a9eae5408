"""Families of submodules of R^p as pieces of G_1 = R T_1 + ... + R T_p."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .algebra import FreeElement, Polynomial, RingSpec
from .errors import DegenerateInstance, DimensionMismatch, InputError
from .graded import GradedPiece, Instance, calI, saturated_data
from .groebner import Ambient, Submodule, krull_dim, saturate

Column = Tuple[Polynomial, ...]


def embed(h: Sequence[Polynomial], ring: Optional[RingSpec] = None) -> Polynomial:
    """h = (h_1..h_p) |-> h_1 T_1 + ... + h_p T_p."""
    h = tuple(h)
    ring = ring or (h[0].ring if h else None)
    if ring is None:
        raise ValueError("cannot infer the ring of an empty vector")
    if len(h) != ring.p:
        raise ValueError(f"vector of length {len(h)} for p = {ring.p}")
    out = Polynomial.zero(ring)
    for j, hj in enumerate(h):
        if any(sum(e[ring.d:]) for e in hj.terms):
            raise InputError("module coordinates must not involve T-variables")
        out = out + hj * Polynomial.var(ring, ring.t_vars[j])
    return out


@dataclass(frozen=True, eq=False)
class ModuleFamily:
    ring: RingSpec
    F: Tuple[Column, ...]
    E_list: Tuple[Tuple[str, Tuple[Column, ...]], ...]
    N_rank: int = 1
    N_relations: Tuple[FreeElement, ...] = ()
    name: str = "family"

    @property
    def p(self) -> int:
        return self.ring.p


def to_instance(fam: ModuleFamily, check: bool = True) -> Instance:
    ring = fam.ring
    J = GradedPiece("F", tuple(embed(h, ring) for h in fam.F), 1)
    I_list = tuple(GradedPiece(name, tuple(embed(h, ring) for h in cols), 1) for name, cols in fam.E_list)
    inst = Instance(ring, fam.N_rank, fam.N_relations, J, I_list, fam.name)
    if check:
        D_formula = family_dimension(fam, inst)
        D = saturated_data(inst).D
        if D != D_formula:
            raise DimensionMismatch(f"D = {D} from the saturation but {D_formula} from dim N/(0:I^inf) + p - 1")
    return inst


def content_ideal(inst: Instance) -> list:
    """x-coefficients of the generators of the ideal generated by I_1...I_q, as R-polynomials."""
    ring = inst.ring
    d = ring.d
    coeffs = {}
    for g in calI(inst).generators:
        for (_, e), c in g.items():
            coeffs.setdefault(e[d:], {})[e[:d]] = c
    return list(coeffs.values())


def family_dimension(fam: ModuleFamily, inst: Optional[Instance] = None) -> int:
    """dim(N/(0_N : I^inf)) + p - 1, saturating N by the content ideal of I."""
    inst = inst or to_instance(fam, check=False)
    ring = fam.ring
    d = ring.d
    amb = Ambient(ring.characteristic, d, fam.N_rank)
    L = Submodule(amb, [{(pos, e[:d]): c for (pos, e), c in row.terms.items()} for row in fam.N_relations])
    c = Submodule(Ambient(ring.characteristic, d, 1), [{(0, e): v for e, v in f.items()} for f in content_ideal(inst)])
    sat = saturate(L, c)
    dim = krull_dim(sat)
    if dim < 0:
        raise DegenerateInstance("N is killed by a power of the ideal generated by E_1...E_q")
    return dim + ring.p - 1


def module_mixed_multiplicities(fam: ModuleFamily):
    from .multiplicity import mixed_multiplicities

    table = mixed_multiplicities(to_instance(fam))
    labels = {}
    names = ["F"] + [name for name, _ in fam.E_list]
    for (j, k0, k), v in table.entries.items():
        parts = [f"{names[0]}^[{k0}]"] + [f"{n}^[{x}]" for n, x in zip(names[1:], k)]
        labels[f"e^{j}({','.join(parts)};N)"] = v
    return table, labels


def module_fc_sequence(fam: ModuleFamily, slot: int = 1, seed: int = 0):
    from .fc import build_maximal_weak_fc_sequence

    return build_maximal_weak_fc_sequence(to_instance(fam), slot, seed)
