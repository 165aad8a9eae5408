from itertools import product

import pytest
from hypothesis import given, strategies as st

from mmx.algebra import Polynomial
from mmx.bridge import (
    ModuleFamily,
    embed,
    family_dimension,
    module_fc_sequence,
    module_mixed_multiplicities,
    to_instance,
)
from mmx.errors import DegenerateInstance
from mmx.fc import mu
from mmx.graded import saturated_data
from mmx.instance_io import read_family
from mmx.multiplicity import buchsbaum_rim_all, mixed_multiplicities

import oracles
from builders import ring
from conftest import load

R2 = ring(p=2)


def col(*texts, R=R2):
    return tuple(Polynomial.parse(t, R) for t in texts)


def test_embed_examples():
    assert str(embed(col("x", "y"))) == "x*T1 + y*T2"
    assert embed(col("0", "0")).is_zero()
    assert str(embed(col("1", "0"))) == "T1"
    with pytest.raises(ValueError):
        embed(col("x", R=ring()), R2)


coeff = st.integers(0, 32002)
monos = st.sampled_from(["1", "x", "y", "x^2", "x*y", "y^3"])


@given(coeff, st.tuples(monos, monos), st.tuples(monos, monos))
def test_embed_is_linear(a, h, g):
    h, g = col(*h), col(*g)
    combo = tuple(hi.scale(a) + gi for hi, gi in zip(h, g))
    assert embed(combo) == embed(h).scale(a) + embed(g)


@pytest.mark.parametrize("name", ["family_mr2", "family_nonideal", "family_ex1"])
def test_dimension_formula_matches_saturation(name):
    fam = read_family(name)
    inst = to_instance(fam)
    assert family_dimension(fam) == saturated_data(inst).D


def test_dimension_values():
    assert family_dimension(read_family("family_mr2")) == 3
    assert family_dimension(read_family("family_nonideal")) == 3
    assert family_dimension(read_family("family_ex1")) == 2


def test_mr2_family_reproduces_ex3(ex3):
    table, labels = module_mixed_multiplicities(read_family("family_mr2"))
    assert labels["e^0(F^[3],E^[0];N)"] == 3 == buchsbaum_rim_all(ex3)[0]
    assert table.entries == mixed_multiplicities(ex3).entries


def test_ideal_family_reproduces_ex1(ex1):
    table, _ = module_mixed_multiplicities(read_family("family_ex1"))
    assert table.entries == mixed_multiplicities(ex1).entries


def _br_E_oracle(n):
    """l(S_n(R^2) / E^n) for E = <(x,0), (0,y), (y,x)> by dense rank counts."""
    E = [{0: (1, 0)}, {1: (0, 1)}, {0: (0, 1), 1: (1, 0)}]
    gens = []
    for combo in product(range(3), repeat=n):
        if list(combo) != sorted(combo):
            continue
        vec = {(0, (0, 0)): 1}  # (power of T1, x-monomial)
        for g in combo:
            new = {}
            for (a, m), c in vec.items():
                for t, u in E[g].items():
                    k = (a + (t == 0), (m[0] + u[0], m[1] + u[1]))
                    new[k] = new.get(k, 0) + c
            vec = new
        gens.append(vec)
    free = [{(a, (0, 0)): 1} for a in range(n + 1)]
    return oracles.length_quotient(free, gens, 2, n + 1, n + 6)


def test_nonideal_family():
    fam = read_family("family_nonideal")
    table, labels = module_mixed_multiplicities(fam)
    assert table.D == 3
    assert labels["e^0(F^[3],E^[0];N)"] == 3
    assert labels["e^0(F^[2],E^[1];N)"] == 3
    assert labels["e^0(F^[1],E^[2];N)"] == 2
    assert labels["e^0(F^[0],E^[3];N)"] == 0
    # the Buchsbaum-Rim multiplicity of E itself, from a length count
    vals = {(n,): _br_E_oracle(n) for n in range(3, 7)}
    lead = oracles.fit_top_coefficients(vals, 3)[(3,)]
    inst = to_instance(fam)
    assert buchsbaum_rim_all(inst, inst.I_list[0])[0] == 6 * lead == 3


def test_fc_sequence_of_mR2_family():
    fam = read_family("family_mr2")
    seq = module_fc_sequence(fam, 1, seed=0)
    E = to_instance(fam).I_list[0]
    assert seq.length == 3 <= mu(E) == 4


def test_torsion_family_is_degenerate():
    R = ring()
    fam = ModuleFamily(R, (col("x", R=R), col("y", R=R)), (("E", (col("x", R=R),)),), 1,
                       tuple(), "t")
    assert family_dimension(fam) == 2
    from mmx.algebra import FreeElement

    killed = ModuleFamily(R, fam.F, fam.E_list, 1,
                          (FreeElement.from_entries([Polynomial.parse("x", R)]),), "k")
    with pytest.raises(DegenerateInstance):
        family_dimension(killed)
