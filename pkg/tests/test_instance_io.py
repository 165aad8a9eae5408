import pytest

from mmx.errors import DegenerateInstance, InputError
from mmx.instance_io import (
    corpus_files,
    dumps_instance,
    loads_instance,
    read_family,
    read_instance,
    resolve_path,
    _loads,
)

HEADER = """
name = "t"
[ring]
characteristic = 32003
variables = ["x", "y"]
[setup]
p = 1
[module]
rank = 1
presentation = []
"""


def test_corpus_is_complete():
    names = {p.stem for p in corpus_files()}
    assert {"ex1", "ex2", "ex3", "ex4", "ex5", "family_mr2", "family_nonideal", "family_ex1",
            "degenerate_torsion", "degenerate_unit", "error_J_not_finite", "error_no_I"} <= names


def test_ex1_shape(ex1):
    assert (ex1.q, ex1.ring.d, ex1.ring.p) == (1, 2, 1)
    assert [str(g) for g in ex1.I_list[0].generators] == ["x^2*T1", "y^3*T1"]


@pytest.mark.parametrize("path", [p for p in corpus_files() if not p.stem.startswith("error")])
def test_round_trip(path):
    text = path.read_text()
    inst, fam = _loads(text, path.stem)
    again, fam2 = _loads(dumps_instance(inst, fam), path.stem)
    assert again.fingerprint() == inst.fingerprint()
    assert (fam is None) == (fam2 is None)


def test_polynomial_string_generators():
    inst = loads_instance(HEADER + '[J]\ngenerators = ["x*T1", "y*T1"]\n[[I]]\ntdeg = 2\n'
                                   'generators = ["x^2*T1^2", "y^2*T1^2"]\n')
    assert inst.I_list[0].tdeg == 2
    assert dumps_instance(inst).count("tdeg = 2") == 1


def test_J_must_have_finite_colength():
    with pytest.raises(InputError):
        read_instance("error_J_not_finite")


def test_missing_I():
    with pytest.raises(InputError, match="q >= 1"):
        read_instance("error_no_I")


def test_toml_syntax_error_position():
    with pytest.raises(InputError) as err:
        loads_instance(HEADER + "[J\n")
    assert (err.value.line, err.value.column) == (11, 3)


def test_polynomial_error_position():
    text = HEADER + '[J]\ngenerators = [["x"], ["y"]]\n[[I]]\ngenerators = [["x^2 +* y"]]\n'
    with pytest.raises(InputError) as err:
        loads_instance(text)
    # the stray '*' sits at column 22 of line 14
    assert (err.value.line, err.value.column) == (14, 22)


def test_unknown_variable():
    with pytest.raises(InputError):
        loads_instance(HEADER + '[J]\ngenerators = [["x"], ["z"]]\n[[I]]\ngenerators = [["x"]]\n')


def test_T_variables_not_allowed_in_coordinates():
    with pytest.raises(InputError, match="T-variables"):
        loads_instance(HEADER + '[J]\ngenerators = [["x*T1"], ["y"]]\n[[I]]\ngenerators = [["x"]]\n')


def test_wrong_column_length():
    with pytest.raises(InputError):
        loads_instance(HEADER + '[J]\ngenerators = [["x", "y"]]\n[[I]]\ngenerators = [["x"]]\n')


def test_missing_ring():
    with pytest.raises(InputError, match="ring"):
        loads_instance('[J]\ngenerators = [["x"]]\n')


def test_family_and_pieces_are_exclusive():
    with pytest.raises(InputError):
        loads_instance(HEADER + '[J]\ngenerators = [["x"]]\n[family]\nF = [["x"]]\n')


def test_family_files(ex3):
    fam = read_family("family_mr2")
    assert fam.p == 2 and len(fam.F) == 4
    assert read_family("ex1") is None


def test_degenerate_fixture_loads_but_is_degenerate():
    from mmx.graded import saturated_data

    inst = read_instance("degenerate_torsion")
    with pytest.raises(DegenerateInstance):
        saturated_data(inst)


def test_resolve_path(tmp_path):
    f = tmp_path / "mine.toml"
    f.write_text("x")
    assert resolve_path(f) == f
    assert resolve_path("ex2").name == "ex2.toml"
    assert resolve_path("ex2.toml").name == "ex2.toml"
    with pytest.raises(InputError):
        resolve_path("no_such_instance")


def test_user_file(tmp_path, ex2):
    f = tmp_path / "copy.toml"
    f.write_text(dumps_instance(ex2))
    assert read_instance(f).fingerprint() == ex2.fingerprint()
