"""Unit tests for multilinear polynomials."""
import pytest

from src.freealg import (
    InconsistentLieForm,
    MultilinearPoly,
    NotApplicable,
    NotMultilinear,
    Permutation,
    Verdict,
    canonical_lie_form,
    central_linearization,
    classify,
    coeff_sum,
    coeff_sum_alternating,
    commutator_poly,
    evaluate,
    fix_slot,
    lie_pair,
    nested_commutator,
    palindrome,
    render,
    rename,
    substitute_ones,
    symmetric_group,
    trace_witness_tuple,
)
from src.matrix import identity, matrix_unit
from src.parser import parse_poly
from src.ring import DimensionMismatch, FieldTooSmall, RingMismatch, RingSpec, UnsupportedRing


def E(n, i, j, ring):
    return matrix_unit(n, i, j, ring)


# -----------------------------------------------------------------------------
# permutations
# -----------------------------------------------------------------------------
def test_permutation_basics():
    s = Permutation((2, 3, 1))
    assert s(1) == 2
    assert s.sign == 1
    assert Permutation((2, 1, 3)).sign == -1
    assert s.compose(s.inverse()) == Permutation.identity(3)
    assert s.word() == "x2*x3*x1"
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))


def test_sign_is_multiplicative():
    group = symmetric_group(4)
    assert len(group) == 24
    for a in group[::5]:
        for b in group[::7]:
            assert a.compose(b).sign == a.sign * b.sign


# -----------------------------------------------------------------------------
# construction and rendering
# -----------------------------------------------------------------------------
def test_commutator_coefficients(gf5):
    f = parse_poly("x*y - y*x", gf5)
    assert f == commutator_poly(gf5)
    assert f.m == 2
    assert f.coeff((1, 2)) == 1
    assert f.coeff((2, 1)) == 4


def test_zero_coefficients_pruned(gf3):
    f = parse_poly("x*y + 3*y*x", gf3)
    assert len(f) == 1
    assert parse_poly("x*y - x*y", gf3).is_zero()


def test_missing_variable_rejected(qq):
    with pytest.raises(NotMultilinear, match="missing variable"):
        parse_poly("x*y + x", qq)


def test_repeated_variable_rejected(qq):
    with pytest.raises(NotMultilinear, match="repeats"):
        parse_poly("x*x", qq)


def test_degree_cap(qq):
    with pytest.raises(NotMultilinear):
        MultilinearPoly(9, {}, qq)


def test_render(gf5, qq):
    assert render(commutator_poly(qq)) == "x1*x2 - x2*x1"
    assert render(commutator_poly(gf5)) == "x1*x2 + 4*x2*x1"
    assert render(MultilinearPoly.zero(2, qq)) == "0*x1*x2"
    assert render(parse_poly("-1/2*x*y", qq)) == "-1/2*x1*x2"


@pytest.mark.parametrize("text", ["x*y - y*x", "[x,[z,y]]", "2*x1*x2*x3 - 1/3*x3*x1*x2", "x1*x2*x3*x4 - x4*x3*x2*x1"])
def test_render_parse_roundtrip(qq, text):
    f = parse_poly(text, qq)
    assert parse_poly(render(f), qq) == f


def test_arithmetic(qq):
    f = parse_poly("x*y", qq)
    g = parse_poly("y*x", qq)
    assert f - g == commutator_poly(qq)
    assert (f + g).scale(2) == parse_poly("2*x*y + 2*y*x", qq)
    with pytest.raises(DimensionMismatch):
        f + parse_poly("x*y*z", qq)


# -----------------------------------------------------------------------------
# evaluation
# -----------------------------------------------------------------------------
def test_evaluate_commutator(qq):
    f = commutator_poly(qq)
    assert evaluate(f, [E(2, 1, 2, qq), E(2, 2, 1, qq)]) == E(2, 1, 1, qq) - E(2, 2, 2, qq)


def test_evaluate_only_first_monomial_survives(gf7):
    f = parse_poly("x*y*z - z*y*x", gf7)
    assert f(E(2, 1, 1, gf7), E(2, 1, 2, gf7), E(2, 2, 2, gf7)) == E(2, 1, 2, gf7)


@pytest.mark.parametrize("ring", [RingSpec.gf(2), RingSpec.gf(3), RingSpec.rational()], ids=lambda r: r.flag)
def test_palindrome_value(ring):
    args = [E(2, 1, 1, ring), E(2, 1, 2, ring), E(2, 2, 2, ring), E(2, 2, 1, ring)]
    assert evaluate(palindrome(4, ring), args) == E(2, 1, 1, ring)


def test_evaluate_errors(gf5, gf7):
    f = commutator_poly(gf5)
    with pytest.raises(DimensionMismatch):
        evaluate(f, [identity(2, gf5)])
    with pytest.raises(DimensionMismatch):
        evaluate(f, [identity(2, gf5), identity(3, gf5)])
    with pytest.raises(RingMismatch):
        evaluate(f, [identity(2, gf7), identity(2, gf7)])


def test_zero_poly_evaluates_to_zero(gf5):
    Z = MultilinearPoly.zero(2, gf5)
    assert evaluate(Z, [identity(2, gf5), identity(2, gf5)]).is_zero()


# -----------------------------------------------------------------------------
# substitutions and sums
# -----------------------------------------------------------------------------
def test_substitute_ones(qq, rng, matrices):
    f = parse_poly("x*y*z - z*y*x", qq)
    assert substitute_ones(f, 1).is_zero()
    assert substitute_ones(f, 2) == commutator_poly(qq)
    assert substitute_ones(f, 3) == f
    assert substitute_ones(parse_poly("x*y + y*x", qq), 1) == parse_poly("2*x", qq)
    I = identity(2, qq)
    for _ in range(20):
        M = matrices.random(rng, 2, qq)
        assert f(M, I, I).is_zero()


def test_fix_slot(qq):
    f = parse_poly("x*y*z - y*x*z", qq)
    assert fix_slot(f, 1).is_zero()
    assert fix_slot(f, 3) == commutator_poly(qq)
    assert fix_slot(f, 2).is_zero()
    with pytest.raises(NotApplicable):
        fix_slot(parse_poly("x", qq), 1)


def test_rename_swaps_lie_pair(gf7):
    swap = Permutation((3, 2, 1))
    assert rename(lie_pair(1, 0, gf7), swap) == lie_pair(0, 1, gf7)
    assert rename(lie_pair(2, 3, gf7), swap) == lie_pair(3, 2, gf7)


def test_coefficient_sums(qq):
    lie = parse_poly("[x,[z,y]]", qq)
    assert coeff_sum(lie) == 0
    assert coeff_sum_alternating(lie) == 0
    xyz = parse_poly("x*y*z", qq)
    assert coeff_sum(xyz) == 1
    assert coeff_sum_alternating(xyz) == 1
    assert coeff_sum(commutator_poly(qq)) == 0


def test_trace_witness_tuple_reads_alternating_sum(gf7):
    for text in ["x*y*z - x*z*y", "2*y*z*x - 2*z*y*x + z*x*y - y*x*z", "[x,[z,y]]"]:
        f = parse_poly(text, gf7)
        value = evaluate(f, list(trace_witness_tuple(2, gf7)))
        assert value.trace() == coeff_sum_alternating(f)


def test_standard_polynomials(qq):
    assert nested_commutator(2, qq) == commutator_poly(qq)
    assert nested_commutator(3, qq) == parse_poly("[x1,[x2,x3]]", qq)
    f = central_linearization(qq)
    assert f.m == 4
    assert coeff_sum(f) == 0


# -----------------------------------------------------------------------------
# Lie form and classification
# -----------------------------------------------------------------------------
def test_canonical_lie_form(gf7):
    assert canonical_lie_form(parse_poly("[x,[z,y]]", gf7)) == (1, 0)
    assert canonical_lie_form(parse_poly("[z,[x,y]]", gf7)) == (0, 1)
    assert canonical_lie_form(parse_poly("2*[x,[z,y]] + 3*[z,[x,y]]", gf7)) == (2, 3)


def test_canonical_lie_form_preconditions(gf7):
    with pytest.raises(NotApplicable):
        canonical_lie_form(parse_poly("x*y*z", gf7))
    with pytest.raises(NotApplicable):
        canonical_lie_form(parse_poly("x*y*z - y*x*z", gf7))
    with pytest.raises(NotApplicable):
        canonical_lie_form(commutator_poly(gf7))


def test_inconsistent_lie_form_is_unreachable_for_valid_input(gf7):
    # every polynomial passing the unit-substitution checks solves the Lie system
    for b in range(3):
        for c in range(3):
            f = lie_pair(b, c, gf7)
            if f.is_zero():
                continue
            try:
                assert canonical_lie_form(f) == (b, c)
            except InconsistentLieForm:  # pragma: no cover
                pytest.fail(f"lie_pair({b}, {c}) rejected")


@pytest.mark.parametrize(
    "text,n,ring,verdict",
    [
        ("x*y - y*x", 2, RingSpec.gf(3), Verdict.TRACE_ZERO),
        ("x*y*z - z*y*x", 2, RingSpec.gf(5), Verdict.FULL),
        ("[x,[z,y]]", 3, RingSpec.gf(5), Verdict.TRACE_ZERO),
        ("x1*x2*x3*x4 - x4*x3*x2*x1", 2, RingSpec.gf(5), Verdict.UNKNOWN),
        ("x*y*z", 2, RingSpec.gf(3), Verdict.FULL),
        ("3*x", 2, RingSpec.rational(), Verdict.FULL),
        ("x*y + y*x", 2, RingSpec.gf(5), Verdict.FULL),
        ("x*y*z - x*z*y", 2, RingSpec.gf(3), Verdict.FULL),
    ],
)
def test_classify(text, n, ring, verdict):
    assert classify(parse_poly(text, ring), n, ring).verdict is verdict


def test_classify_zero_and_errors(gf2, gf5):
    assert classify(MultilinearPoly.zero(3, gf5), 2).verdict is Verdict.ZERO
    with pytest.raises(FieldTooSmall):
        classify(parse_poly("[x,[z,y]]", gf2), 3)
    with pytest.raises(UnsupportedRing):
        classify(commutator_poly(RingSpec.zmod(6)), 2)
    with pytest.raises(NotApplicable):
        classify(commutator_poly(gf5), 1)
    with pytest.raises(RingMismatch):
        classify(commutator_poly(gf5), 2, gf2)
