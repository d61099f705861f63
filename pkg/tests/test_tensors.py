from fractions import Fraction

import pytest

from lichnerowicz.geometry import GeometryError, flat, hyperbolic
from lichnerowicz.operators import apply_g
from lichnerowicz.tensors import (
    SymTensorField,
    TensorSyntaxError,
    fock_pair,
    load_tensor,
    make_tensor,
    random_tensor,
)

F2, F3, H2 = flat(2), flat(3), hyperbolic(2)


def one(geo):
    return make_tensor(geo, "1")


def test_flat_metric_monomial():
    assert make_tensor(F2, "u1*u1 + u2*u2") == apply_g(one(F2))


def test_rank_one_component():
    psi = make_tensor(F3, "x1*u2")
    assert set(psi.by_rank()) == {1}
    assert psi.to_text() == "u2*x1"


def test_hyperbolic_metric_field():
    assert make_tensor(H2, "y^-2*(u1*u1+u2*u2)") == apply_g(one(H2))


def test_parse_errors():
    with pytest.raises(TensorSyntaxError):
        make_tensor(F2, "u3")
    with pytest.raises((TensorSyntaxError, GeometryError)):
        make_tensor(F2, "x1^-1")  # negative powers only for y on hyperbolic space
    with pytest.raises(TensorSyntaxError):
        make_tensor(F2, "u1 +")


def test_json_round_trip():
    psi = make_tensor(H2, "3/2*y^-1*x1*u1*u2 - u2")
    assert SymTensorField.from_json(psi.to_json()) == psi
    assert load_tensor(str(psi.to_json()).replace("'", '"')) == psi


def test_json_format():
    psi = make_tensor(F3, "u1^2")
    assert psi.to_json() == {
        "dim": 3,
        "signature": [3, 0],
        "geometry": "flat",
        "terms": [{"u": [2, 0, 0], "coeff": [{"x": [0, 0, 0], "q": "1"}]}],
    }


@pytest.mark.parametrize(
    "a, b, expected",
    [("u1", "u1", 1), ("u1*u1 + u2*u2", "u1*u1 + u2*u2", 4), ("u1", "u2", 0)],
)
def test_fock_pair(a, b, expected):
    point = [Fraction(3), Fraction(-1, 2)]
    assert fock_pair(make_tensor(F2, a), make_tensor(F2, b), point) == expected


def test_fock_pair_uses_inverse_metric():
    # on H^2 at y = 2: g^{11} = 4
    assert fock_pair(make_tensor(H2, "u1"), make_tensor(H2, "u1"), [0, 2]) == 4


def test_random_scalar_only():
    psi = random_tensor(F2, 1, 0, 0)
    assert not psi.is_zero()
    assert set(psi.by_rank()) == {0}
    assert psi.to_text().lstrip("-").replace("/", "").isdigit()


def test_random_deterministic():
    assert random_tensor(H2, 99, 3, 2) == random_tensor(H2, 99, 3, 2)
    assert random_tensor(H2, 99, 3, 2) != random_tensor(H2, 100, 3, 2)


def test_random_all_ranks():
    assert set(random_tensor(F3, 7, 2, 1).by_rank()) == {0, 1, 2}
