"""Unit tests for the polynomial parser."""
import pytest

from src.freealg import NotMultilinear, lie_pair
from src.parser import PolySyntaxError, parse_poly, parse_words, variable_index


def test_aliases_and_indexed_names():
    assert variable_index("x") == 1
    assert variable_index("z") == 3
    assert variable_index("x8") == 8
    assert variable_index("x9") is None
    assert variable_index("w") is None


def test_lie_polynomial_text(qq):
    f = parse_poly("x*z*y - x*y*z + y*z*x - z*y*x", qq)
    assert f == lie_pair(1, 0, qq)
    assert f.coeff((1, 3, 2)) == 1
    assert f.coeff((3, 2, 1)) == -1


def test_brackets_expand_before_checks(qq):
    assert parse_poly("[x,[z,y]]", qq) == parse_poly("x*z*y - x*y*z + y*z*x - z*y*x", qq)
    assert parse_poly("[x*y, z]", qq) == parse_poly("x*y*z - z*x*y", qq)


def test_juxtaposition_and_parentheses(qq):
    assert parse_poly("x y z", qq) == parse_poly("x*y*z", qq)
    assert parse_poly("2(x*y - y*x)", qq) == parse_poly("2*x*y - 2*y*x", qq)
    assert parse_poly("(x*y)*z - x*(y*z)", qq).is_zero()


def test_rational_coefficients(qq, gf7):
    assert parse_poly("1/2*x*y", qq).coeff((1, 2)) == qq(1) / 2
    assert parse_poly("1/2*x*y", gf7).coeff((1, 2)) == 4


def test_parse_words_keeps_non_multilinear(qq):
    words = parse_words("x*x + 2*y", qq)
    assert words == {(1, 1): qq.canon(1), (2,): qq.canon(2)}


@pytest.mark.parametrize(
    "text,position",
    [
        ("x*y -", 5),
        ("x*y + $", 6),
        ("[x, y", 5),
    ],
)
def test_syntax_errors_carry_position(qq, text, position):
    with pytest.raises(PolySyntaxError) as info:
        parse_poly(text, qq)
    assert info.value.position == position


def test_unknown_variable(qq):
    with pytest.raises(PolySyntaxError, match="unknown variable 'w'") as info:
        parse_poly("x*w", qq)
    assert info.value.position == 2


def test_empty_input(qq):
    with pytest.raises(PolySyntaxError):
        parse_poly("   ", qq)


@pytest.mark.parametrize("text", ["x*x", "x*y + x", "x*y + x*y*z", "2"])
def test_not_multilinear(qq, text):
    with pytest.raises(NotMultilinear):
        parse_poly(text, qq)


def test_bad_rational_literal(gf7):
    with pytest.raises(PolySyntaxError):
        parse_poly("1/7*x", gf7)


@pytest.mark.parametrize(
    "text,message",
    [
        ("x*y + x", "monomial `x` is missing variable y"),
        ("x*y*z + x*y", "missing variable z"),
        ("x1*x2 + x1", "monomial `x1` is missing variable x2"),
        ("y*y", "repeats variable y"),
    ],
)
def test_multilinearity_errors_use_input_spelling(qq, text, message):
    with pytest.raises(NotMultilinear) as info:
        parse_poly(text, qq)
    assert message in str(info.value)
