from fractions import Fraction

import numpy as np
import pytest

from polymonodromy.core.errors import InputError
from polymonodromy.core.utils import (
    complex_pair,
    fraction_str,
    one_based,
    parse_complex,
    parse_index_pair,
    parse_rational_list,
    to_jsonable,
)


def test_parse_rational_list():
    assert parse_rational_list(" 1/2, -3 ,0") == [Fraction(1, 2), Fraction(-3), Fraction(0)]


@pytest.mark.parametrize("text", ["", "  ", "1,,2", "1/0", "1.5"])
def test_parse_rational_list_rejects(text):
    with pytest.raises(InputError):
        parse_rational_list(text)


def test_parse_complex():
    assert parse_complex("0.3,-0.7") == complex(0.3, -0.7)
    with pytest.raises(InputError):
        parse_complex("1")
    with pytest.raises(InputError):
        parse_complex("a,b")


def test_parse_index_pair_is_made_zero_based():
    assert parse_index_pair("1,3") == [0, 2]
    with pytest.raises(InputError):
        parse_index_pair("0,1")
    with pytest.raises(InputError):
        parse_index_pair("1,x")


def test_fraction_str():
    assert fraction_str(Fraction(4, 2)) == "2"
    assert fraction_str(Fraction(-3, 4)) == "-3/4"


def test_to_jsonable():
    value = {"a": (Fraction(1, 2), 2j), 3: np.int64(5), "flag": True, "x": 0.1 + 0.2}
    assert to_jsonable(value) == {"a": ["1/2", [0.0, 2.0]], "3": 5, "flag": True, "x": 0.3}
    assert complex_pair(-0.0 + 1e-15j) == [0.0, 0.0]
    assert one_based([0, 4]) == [1, 5]
