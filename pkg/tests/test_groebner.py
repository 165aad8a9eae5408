import random

import pytest
from hypothesis import given, strategies as st

from mmx import groebner as G
from mmx.algebra import Polynomial, RingSpec
from mmx.groebner import (
    Ambient,
    HilbertSeries,
    Submodule,
    annihilator,
    buchberger,
    canonical_text,
    colon_by_element,
    hilbert_series_quotient,
    intersect,
    is_groebner,
    krull_dim,
    length_between,
    min_generators,
    module_quotient,
    saturate,
)
from mmx.errors import NotFiniteLength

import oracles

P = 32003
RX = RingSpec(P, ("x", "y", "z"), 1)
AMB = Ambient(P, 2, 1)


def vec(text, pos=0, nvars=2):
    f = Polynomial.parse(text, RX)
    return {(pos, e[:nvars]): c for e, c in f.terms.items()}


def ideal(*texts, amb=AMB):
    return Submodule(amb, [vec(t, nvars=amb.nvars) for t in texts])


def gb_text(A):
    return [canonical_text(g) for g in A.gb]


def test_basis_of_the_maximal_ideal():
    assert gb_text(ideal("x", "y")) == gb_text(Submodule(AMB, [{(0, (1, 0)): 1}, {(0, (0, 1)): 1}]))
    assert len(ideal("x", "y").gb) == 2


def test_basis_of_zero():
    assert ideal().gb == []


def test_x2_plus_xy_and_y2():
    A = ideal("x^2+x*y", "y^2")
    assert is_groebner(A.gb, P)
    # the product x*y^2 lies in the ideal and reduces to zero
    assert A.contains(vec("x*y^2"))
    assert A.contains(vec("x^2+x*y")) and A.contains(vec("y^2"))
    assert not A.contains(vec("x*y"))


def test_membership_examples():
    prod = ideal("x^4", "x^3*y", "x^2*y^2", "x^2*y^2", "x*y^3", "y^4")
    assert prod.contains(vec("x^2*y^2"))
    assert not ideal("x^2", "x*y", "y^2").contains(vec("x"))
    assert ideal("x^2").contains({})


def test_colon_examples():
    assert gb_text(module_quotient(ideal("x^2"), ideal("x"))) == gb_text(ideal("x"))
    assert module_quotient(ideal(), ideal("x")).gb == []
    assert gb_text(module_quotient(ideal("x^2*y"), ideal("x*y"))) == gb_text(ideal("x"))
    assert gb_text(colon_by_element(ideal("x^2*y"), {e: c for (_, e), c in vec("x*y").items()})) == gb_text(ideal("x"))


def test_saturation_examples():
    free = Ambient(P, 2, 2)
    assert saturate(Submodule(free, []), ideal("x")).gb == []
    assert gb_text(saturate(ideal("x^2*y"), ideal("y"))) == gb_text(ideal("x^2"))
    assert gb_text(saturate(ideal("x"), ideal("1"))) == gb_text(ideal("x"))


def test_hilbert_series_examples():
    hs = hilbert_series_quotient(ideal("x", "y"))
    assert hs == HilbertSeries.make({0: 1}, 0)
    hs = hilbert_series_quotient(ideal("x^2", "y^3"))
    assert hs.is_polynomial() and hs.value_at_one() == 6 == oracles.staircase_count([(2, 0), (0, 3)])
    assert hilbert_series_quotient(ideal()) == HilbertSeries.make({0: 1}, 2)


def test_krull_dim_examples():
    assert krull_dim(ideal("x", "y")) == 0
    assert krull_dim(ideal("x^2", "y^3")) == 0
    assert krull_dim(ideal("x")) == 1
    assert krull_dim(ideal("1")) == -1


def test_min_generators_examples():
    assert min_generators(ideal("x", "y")) == 2
    assert min_generators(ideal("x^2", "x*y", "y^2", "x^2+x*y")) == 3
    assert min_generators(ideal()) == 0


def test_annihilator_examples():
    assert gb_text(annihilator(ideal("x^2"))) == gb_text(ideal("x^2"))
    L = Submodule(Ambient(P, 2, 2), [vec("x", 0), vec("y", 1)])
    assert gb_text(annihilator(L)) == gb_text(ideal("x*y"))
    assert annihilator(Submodule(Ambient(P, 2, 3), [])).gb == []


def test_intersection_of_principal_ideals():
    assert gb_text(intersect(ideal("x"), ideal("y"))) == gb_text(ideal("x*y"))


def test_length_between_needs_finite_length():
    assert length_between(Submodule.whole(AMB), ideal("x^2", "y^3")) == 6
    with pytest.raises(NotFiniteLength):
        length_between(Submodule.whole(AMB), ideal("x"))


def test_module_basis_with_shifts():
    amb = Ambient(P, 2, 2, (0, 1))
    A = Submodule(amb, [{(0, (1, 0)): 1, (1, (0, 0)): 1}, {(0, (0, 1)): 1}])
    assert is_groebner(A.gb, P)
    # F/A: rank 2 free minus two generators of degree 1
    hs = hilbert_series_quotient(A)
    assert hs.coefficients(4) == [1, 1, 1, 1, 1]


def test_packed_codec_round_trip():
    codec = G._Packed(3, 4)
    terms = [(pos, (a, b, c)) for pos in range(4) for a in range(3) for b in range(3) for c in range(3)]
    for t in terms:
        assert codec.unpack(codec.pack(t)) == t
    # integer order agrees with the term order
    by_int = sorted(terms, key=codec.pack, reverse=True)
    by_key = sorted(terms, key=G._minkey)
    assert by_int == by_key


# ----------------------------------------------------------------------------
# cross-checks against dense linear algebra


def _random_homogeneous(rng, nvars, rank, shifts, deg):
    v = {}
    for _ in range(rng.randint(1, 3)):
        pos = rng.randrange(rank)
        k = deg - shifts[pos]
        if k < 0:
            continue
        mons = oracles.monomials(nvars, k)
        v[(pos, rng.choice(mons))] = rng.randrange(1, P)
    return v


@pytest.mark.parametrize("seed", range(8))
def test_membership_agrees_with_linear_algebra(seed):
    rng = random.Random(seed)
    nvars, rank = 2, rng.choice([1, 2])
    shifts = (0,) * rank
    gens = [g for g in (_random_homogeneous(rng, nvars, rank, shifts, rng.randint(1, 3)) for _ in range(3)) if g]
    A = Submodule(Ambient(P, nvars, rank), gens)
    for deg in range(0, 7):
        for _ in range(4):
            v = _random_homogeneous(rng, nvars, rank, shifts, deg)
            if not v:
                continue
            assert A.contains(v) == oracles.in_span(v, gens, nvars, shifts)
        # spanned elements are members
        combo = {}
        for g in gens:
            gd = oracles._degree(g, shifts)
            if gd <= deg:
                m = rng.choice(oracles.monomials(nvars, deg - gd))
                for t, c in oracles._shift(g, m).items():
                    combo[t] = (combo.get(t, 0) + c) % P
        combo = {t: c for t, c in combo.items() if c}
        assert A.contains(combo)


@pytest.mark.parametrize("seed", range(6))
def test_hilbert_series_agrees_with_dimension_counts(seed):
    rng = random.Random(100 + seed)
    nvars, rank = 2, 2
    shifts = (0, 1)
    gens = [g for g in (_random_homogeneous(rng, nvars, rank, shifts, rng.randint(1, 3)) for _ in range(4)) if g]
    A = Submodule(Ambient(P, nvars, rank, shifts), gens)
    coeffs = hilbert_series_quotient(A).coefficients(7)
    for deg in range(8):
        expected = oracles.free_dim(rank, nvars, deg, shifts) - oracles.span_dim(gens, nvars, deg, shifts)
        assert coeffs[deg] == expected


# ----------------------------------------------------------------------------
# properties

term = st.tuples(st.integers(0, 1), st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)))


@st.composite
def homogeneous_gens(draw, nvars=3, rank=2):
    gens = []
    for _ in range(draw(st.integers(1, 4))):
        deg = draw(st.integers(1, 3))
        v = {}
        for _ in range(draw(st.integers(1, 3))):
            pos = draw(st.integers(0, rank - 1))
            a = draw(st.integers(0, deg))
            b = draw(st.integers(0, deg - a))
            v[(pos, (a, b, deg - a - b))] = draw(st.integers(1, P - 1))
        gens.append(v)
    return gens


AMB3 = Ambient(P, 3, 2)


@given(homogeneous_gens())
def test_s_pairs_reduce_to_zero(gens):
    basis = buchberger(gens, P, 2)
    assert is_groebner(basis, P)
    A = Submodule(AMB3, gens)
    assert all(A.contains(g) for g in gens)


@given(homogeneous_gens(), st.randoms(use_true_random=False))
def test_hilbert_series_independent_of_generators(gens, rnd):
    A = Submodule(AMB3, gens)
    # same module, different presentation: shuffled, rescaled, with redundant combinations
    alt = [{t: c * 3 % P for t, c in g.items()} for g in gens]
    rnd.shuffle(alt)
    for g in A.gb[:2]:
        alt.append(g)
    B = Submodule(AMB3, alt)
    assert hilbert_series_quotient(A) == hilbert_series_quotient(B)


@given(homogeneous_gens(), st.sampled_from(["x", "y", "x*z", "x+y"]))
def test_saturation_idempotent(gens, h):
    A = Submodule(AMB3, gens)
    H = Submodule(Ambient(P, 3, 1), [{(0, e): c for (_, e), c in vec(h, nvars=3).items()}])
    once = saturate(A, H)
    twice = saturate(once, H)
    assert gb_text(once) == gb_text(twice)


@given(homogeneous_gens())
def test_krull_dim_is_pole_order(gens):
    A = Submodule(AMB3, gens)
    assert krull_dim(A) == hilbert_series_quotient(A).dimension


@given(homogeneous_gens(), homogeneous_gens())
def test_extended_basis_matches_fresh_basis(gens, more):
    base = Submodule(AMB3, gens)
    _ = base.gb
    grown = base.extend(more)
    fresh = Submodule(AMB3, gens + more)
    assert gb_text(grown) == gb_text(fresh)
