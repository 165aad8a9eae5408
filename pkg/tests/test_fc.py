import pytest

from mmx.algebra import Polynomial
from mmx.errors import DegenerateInstance, DimensionDropFailure, InputError
from mmx.fc import (
    FcCertificate,
    Window,
    analytic_spread,
    build_maximal_weak_fc_sequence,
    fc3_dims,
    find_weak_fc_element,
    is_fc_element,
    is_filter_regular,
    is_maximal,
    is_reduction,
    is_weak_fc_element,
    membership_clause,
    mu,
    reduction_number_N,
    satisfies_fc1,
)
from mmx.graded import height_modulo_ann, support_dim
from mmx.groebner import saturate
from mmx.fc import family_ideal

import oracles
from builders import instance, m_piece, piece, ring
from conftest import load


def P(text, inst):
    return Polynomial.parse(text, inst.ring)


def principal_x():
    R = ring()
    return instance(R, m_piece(R), [piece(R, "I", "x*T1")])


# ----------------------------------------------------------------------------
# filter-regularity


def test_free_module_regular(ex2):
    assert is_filter_regular(P("x*T1", ex2), ex2.module())[0]


def test_filter_regular_on_nilpotent_quotient():
    R = ring()
    inst = instance(R, m_piece(R), [piece(R, "I", "x*T1")], rows=[["x^2"]])
    # (0 : x) = (x) and x is nilpotent, so the saturation is everything
    assert is_filter_regular(P("x*T1", inst), inst.module(), with_J=False)[0]


def test_filter_regular_on_two_lines():
    R = ring()
    inst = instance(R, m_piece(R), [piece(R, "I", "y*T1")], rows=[["x*y"]])
    # (0 : x) = (y); elements killed by a power of y form (x); y is not in (x)
    assert not is_filter_regular(P("x*T1", inst), inst.module(), with_J=False)[0]
    inst_x = instance(R, m_piece(R), [piece(R, "I", "x*T1")], rows=[["x*y"]])
    assert is_filter_regular(P("x*T1", inst_x), inst_x.module(), with_J=False)[0]
    # a nonzerodivisor is always fine
    assert is_filter_regular(P("x*T1 + y*T1", inst), inst.module(), with_J=False)[0]


def test_filter_regular_with_m_torsion_quotient():
    R = ring()
    inst = instance(R, m_piece(R), [m_piece(R, "I")], rows=[["x^2"]])
    # R/(x^2) has depth one: x is a zerodivisor with non-torsion annihilator
    assert not is_filter_regular(P("x*T1", inst), inst.module())[0]
    assert is_filter_regular(P("y*T1", inst), inst.module())[0]


# ----------------------------------------------------------------------------
# FC1 and certificates


def test_fc1_ex2_small_window(ex2):
    ok, count, where = satisfies_fc1(P("x*T1", ex2), 1, ex2.module(), Window(1, 2, 2))
    assert ok and where is None
    assert count == 4 * 3 * 3  # J-powers 0..3, slot 1..3, s 0..2


def test_membership_clause(ex2):
    I = ex2.I_list[0]
    assert membership_clause(P("x*T1", ex2), I) is None
    assert membership_clause(P("x^2*T1", ex2), I) == "x lies in m*I"
    assert membership_clause(Polynomial.zero(ex2.ring), I) == "x is zero"
    assert membership_clause(P("x", ex2), I) is not None


def test_fc1_rejects_elements_of_mI(ex2):
    ok, count, where = satisfies_fc1(P("x^2*T1", ex2), 1, ex2.module())
    assert not ok and count == 0 and "m*I" in where
    assert not is_weak_fc_element(Polynomial.zero(ex2.ring), 1, ex2.module())


def test_weak_fc_certificates(ex1, ex2):
    cert = is_weak_fc_element(P("x*T1", ex2), 1, ex2.module())
    assert isinstance(cert, FcCertificate) and cert.fc1_points > 0
    assert isinstance(is_weak_fc_element(P("x^2*T1", ex1), 1, ex1.module()), FcCertificate)
    assert isinstance(is_weak_fc_element(P("5*x^2*T1", ex1), 1, ex1.module()), FcCertificate)


def _monomial_power(a, r):
    gens = {(0, 0)}
    for step in [[(2, 0), (0, 3)]] * r + [[(1, 0), (0, 1)]] * a:
        gens = {(g[0] + h[0], g[1] + h[1]) for g in gens for h in step}
    return [{(0, g): 1} for g in gens]


def _intersection_defect(f, a, r, top=30):
    """Degrees where dim(m^a I^r cap fR) differs from dim(f m^a I^(r-1)), I = (x^2, y^3)."""
    A = _monomial_power(a, r)
    fB = []
    for g in _monomial_power(a, r - 1):
        ((_, e),) = g
        fB.append({(0, (e[0] + u[0], e[1] + u[1])): c for (_, u), c in f.items()})
    out = []
    for d in range(top):
        cap = (oracles.span_dim(A, 2, d, (0,)) + oracles.span_dim([f], 2, d, (0,))
               - oracles.span_dim(A + [f], 2, d, (0,)))
        if cap != oracles.span_dim(fB, 2, d, (0,)):
            out.append(d)
    return out


def test_degree_three_elements_fail_fc1_like_the_oracle(ex1):
    ok, _, where = satisfies_fc1(P("y^3*T1 + x^3*T1", ex1), 1, ex1.module())
    assert not ok and where == (3, 4, 0)
    assert _intersection_defect({(0, (0, 3)): 1, (0, (3, 0)): 1}, 3, 4) == [11]
    assert _intersection_defect({(0, (2, 0)): 1}, 3, 4) == []


def test_mixed_degree_sum_is_not_homogeneous(ex1):
    why = membership_clause(P("x^2*T1 + y^3*T1", ex1), ex1.I_list[0])
    assert why == "x is not homogeneous of T-degree 1"


def test_full_fc_and_dimension_drop(ex1, ex2):
    cert = is_fc_element(P("x*T1", ex2), 1, ex2.module())
    assert cert.fc3_dims == (2, 1)
    cert = is_fc_element(P("3*x^2*T1", ex1), 1, ex1.module())
    assert cert.fc3_dims == (2, 1)


def test_principal_piece_breaks_dimension_drop():
    inst = principal_x()
    with pytest.raises(DimensionDropFailure):
        is_fc_element(P("x*T1", inst), 1, inst.module())
    assert fc3_dims(P("x*T1", inst), inst.module()) == (2, -1)


# ----------------------------------------------------------------------------
# sequences


@pytest.mark.parametrize("name,length", [("ex1", 2), ("ex2", 2), ("ex4", 2)])
def test_maximal_sequence_lengths(name, length):
    seq = build_maximal_weak_fc_sequence(load(name), 1, seed=3)
    assert seq.length == length and seq.maximal
    assert is_maximal(seq.states[-1]) and not any(is_maximal(s) for s in seq.states[:-1])


def test_principal_piece_sequence():
    assert build_maximal_weak_fc_sequence(principal_x(), 1).length == 1


def test_sequence_of_maximal_state_is_degenerate(ex2):
    state = ex2.module().quotient([P("x*T1", ex2), P("y*T1", ex2)])
    assert is_maximal(state)
    with pytest.raises(DegenerateInstance):
        find_weak_fc_element(1, state)


@pytest.mark.parametrize("seed", [0, 1, 2, 11])
def test_length_independent_of_seed(ex1, seed):
    assert build_maximal_weak_fc_sequence(ex1, 1, seed).length == 2


def test_length_independent_of_J(ex1):
    R = ex1.ring
    alt = instance(R, piece(R, "J'", "x^2*T1", "x*y*T1", "y^2*T1"), list(ex1.I_list),
                   name="alt")
    assert build_maximal_weak_fc_sequence(alt, 1, 5).length == 2
    assert build_maximal_weak_fc_sequence(ex1, 1, 5, with_J=False).length == 2


def test_certificates_survive_dropping_J(ex1):
    seq = build_maximal_weak_fc_sequence(ex1, 1, seed=4)
    for cert, state in zip(seq.certificates, seq.states):
        assert isinstance(is_weak_fc_element(cert.element, 1, state, with_J=False), FcCertificate)


def test_dimension_chain_along_sequence(ex1, ex2):
    for inst in (ex1, ex2):
        seq = build_maximal_weak_fc_sequence(inst, 1, seed=1)
        ideal = family_ideal(inst)
        dims = [support_dim(saturate(s.relations, ideal)) for s in seq.states]
        assert all(dims[t] <= dims[0] - t for t in range(len(dims)))
        dropped = all(c.fc3_dims[1] == c.fc3_dims[0] - 1 for c in seq.certificates)
        assert dropped == (dims[-1] == dims[0] - seq.length)


def test_certificate_json(ex2):
    cert = find_weak_fc_element(1, ex2.module(), seed=9)
    js = cert.to_json()
    assert js["seed"] == 9 and js["slot"] == 1 and len(js["fc1_window"]) == 3


# ----------------------------------------------------------------------------
# reductions, spread, N


def test_reductions_of_m_squared(ex4):
    assert is_reduction(piece(ex4.ring, "R", "x^2*T1", "y^2*T1"), 1, ex4)[0]
    ok, where = is_reduction(piece(ex4.ring, "R", "x^2*T1"), 1, ex4)
    assert not ok and isinstance(where, tuple)
    ok, where = is_reduction(piece(ex4.ring, "R", "x*T1"), 1, ex4)
    assert not ok and "not contained" in where


def test_analytic_spreads(ex1, ex2, ex4):
    assert analytic_spread(ex2.I_list[0]) == 2
    assert analytic_spread(ex4.I_list[0]) == 2
    assert analytic_spread(ex1.I_list[0]) == 2
    assert analytic_spread(principal_x().I_list[0]) == 1
    assert mu(ex4.I_list[0]) == 3


@pytest.mark.parametrize("name,N", [("ex2", 2), ("ex4", 2), ("ex1", 2)])
def test_reduction_number(name, N):
    n, seq, red = reduction_number_N(load(name), 1, seed=2)
    assert n == N == mu(red)


def test_principal_reduction_number():
    n, _, red = reduction_number_N(principal_x(), 1)
    assert n == 1 == mu(red)


def test_heights(ex1, ex2):
    assert height_modulo_ann(ex1) == height_modulo_ann(ex2) == 1


def test_bad_slot(ex2):
    with pytest.raises((ValueError, InputError)):
        find_weak_fc_element(3, ex2.module())
