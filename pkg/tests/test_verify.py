import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imagepr.colouring import STAGED, Colour, ResidueTable, colour_of, staged_colour
from imagepr.linalg import ExactMatrix
from imagepr.systems import build_system, scale_to_second, variable_index
from imagepr.verify import (
    SCHUR_MATRIX,
    ColumnsCertificate,
    Exhausted,
    ObstructionReport,
    Witness,
    columns_condition,
    dependence_matrices_agree,
    find_monochromatic_image,
    outcome_from_json,
    truncated_obstruction_searches,
    schur_exhaustive,
    validate_certificate,
    validate_witness,
    verify_B_equality,
    verify_image_equality_over_Q,
    verify_obstruction,
)

from oracles import naive_search

ALL_RED = ResidueTable(1, (0,))


def staged(m):
    return staged_colour(m)


def test_schur_single_colour():
    out = find_monochromatic_image(SCHUR_MATRIX, ALL_RED, 5, 5)
    assert out == Witness({"x": 1, "y": 1}, (1, 1, 2), 0)


def test_depth_two_exhausted():
    s = build_system("1", 2)
    out = find_monochromatic_image(s, STAGED, 2, 64)
    assert out == Exhausted(2, 64, (2, 4, 4, 1))


def test_depth_two_boundary_witness():
    s = build_system("1", 2)
    out = find_monochromatic_image(s, STAGED, 3, 16)
    # lexicographically first, confirmed by the naive oracle
    assert out == Witness({"x1_1": 6, "x2_1": 8, "x2_2": 8, "y": 3}, (9, 19, 6, 8, 8, 3), Colour.BLUE)
    ref = naive_search([list(r) for r in s.matrix.rows()], s.divisibility, staged, 3, 16)
    assert ref[0] == (6, 8, 8, 3)
    assert validate_witness(s, STAGED, out)


def test_workers_give_same_answer():
    s = build_system("1", 2)
    serial = find_monochromatic_image(s, STAGED, 6, 16)
    parallel = find_monochromatic_image(s, STAGED, 6, 16, workers=3)
    assert serial == parallel
    assert isinstance(serial, Witness)


def test_validate_witness_rejects_tampering():
    s = build_system("1", 2)
    good = find_monochromatic_image(s, STAGED, 3, 16)
    bad_div = Witness({"x1_1": 3, "x2_1": 8, "x2_2": 8, "y": 3}, (6, 19, 3, 8, 8, 3), Colour.BLUE)
    bad_image = Witness(good.assignment, (9, 19, 6, 8, 8, 4), good.colour)
    bad_colour = Witness(good.assignment, good.image, Colour.RED)
    for w in (bad_div, bad_image, bad_colour):
        assert not validate_witness(s, STAGED, w)


def test_search_errors():
    with pytest.raises(ValueError):
        find_monochromatic_image(SCHUR_MATRIX, ALL_RED, 0, 5)
    with pytest.raises(ValueError):
        find_monochromatic_image(SCHUR_MATRIX, ALL_RED, 5, 5, divisibility=(1,))
    with pytest.raises(ValueError):
        find_monochromatic_image(SCHUR_MATRIX, ALL_RED, 5, 5, divisibility=(0, 1))
    with pytest.raises(ValueError):
        find_monochromatic_image(SCHUR_MATRIX, ALL_RED, 5, [1, 2])


def test_zero_row_never_positive():
    m = ExactMatrix.from_rows([[1, 0], [0, 0]])
    assert isinstance(find_monochromatic_image(m, ALL_RED, 3, 3), Exhausted)


def test_rational_entries_need_integral_image():
    m = ExactMatrix.from_rows([[Fraction(1, 2), 0], [0, 1]])
    out = find_monochromatic_image(m, ALL_RED, 1, 4)
    assert out.assignment == {"c0": 2, "c1": 1}


small_matrix = st.lists(st.lists(st.integers(-2, 3), min_size=3, max_size=3), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(small_matrix, st.lists(st.integers(1, 3), min_size=3, max_size=3), st.integers(1, 5), st.integers(1, 6))
def test_pruned_matches_naive(rows, div, yb, vb):
    for colour, spec in ((staged, STAGED), (lambda m: m % 3, ResidueTable(3, (0, 1, 2)))):
        m = ExactMatrix.from_rows(rows)
        out = find_monochromatic_image(m, spec, yb, vb, divisibility=div)
        ref = naive_search(rows, div, colour, yb, vb)
        if ref is None:
            assert isinstance(out, Exhausted)
        else:
            assert tuple(out.assignment.values()) == ref[0]
            assert list(out.image) == ref[1]
            assert validate_witness(m, spec, out, divisibility=div)


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_depth_monotone_obstruction(depth):
    first, second = truncated_obstruction_searches(depth, var_bound=32)
    assert isinstance(first, Exhausted)
    assert isinstance(second, Exhausted)


@pytest.mark.parametrize("depth,y_bound", [(1, 4), (2, 5), (3, 4)])
def test_searches_correspond_under_substitution(depth, y_bound):
    first, second = truncated_obstruction_searches(depth, var_bound=32, y_bound=y_bound)
    assert type(first) is type(second)
    if isinstance(first, Witness):
        idx = variable_index(depth)
        z = list(second.assignment.values())
        assert [v << i for v, (i, _) in zip(z, idx)] + [z[-1]] == list(first.assignment.values())
        assert first.image == second.image


def test_naive_depth_two_agrees_exhausted():
    s = build_system("1", 2)
    rows = [list(r) for r in s.matrix.rows()]
    assert naive_search(rows, s.divisibility, staged, 2, 32) is None


def test_outcome_json_round_trip():
    s = build_system("1", 2)
    for out in (find_monochromatic_image(s, STAGED, 3, 16), find_monochromatic_image(s, STAGED, 2, 16)):
        obj = json.loads(json.dumps(out.to_json()))
        assert outcome_from_json(obj) == out
    ex = Exhausted(2, (16, 4, 4), (1, 1, 1, 1))
    assert outcome_from_json(json.loads(json.dumps(ex.to_json()))) == ex


def test_obstruction_small():
    report = verify_obstruction(4)
    assert report.passed
    assert [r.c_n for r in report.rows] == [1, 1, 4, 2]
    assert [r.min_expression_value for r in report.rows] == [3, 10, 36, 72]


def test_obstruction_2000():
    assert verify_obstruction(2000).passed


def test_obstruction_fault_injection():
    report = verify_obstruction(5, coefficients=[1, 1, 1, 2, 16])
    assert not report.passed
    bad = report.failures()
    assert [r.n for r in bad] == [3]
    assert not bad[0].congruence_holds
    assert bad[0].class_opposite and bad[0].exception_cleared


def test_obstruction_report_json():
    report = verify_obstruction(30)
    assert ObstructionReport.from_json(json.loads(json.dumps(report.to_json()))) == report


@pytest.mark.parametrize("depth", range(1, 7))
def test_b_equality(depth):
    assert verify_B_equality(depth)


def test_b_equality_fault_injection():
    first = build_system("1", 2).matrix
    second = build_system("2", 2).matrix
    rows = [list(r) for r in second.rows()]
    rows[0][-1] += 2
    assert not dependence_matrices_agree(first, ExactMatrix.from_rows(rows))


@pytest.mark.parametrize("depth", range(1, 7))
def test_images_over_q(depth):
    assert verify_image_equality_over_Q(depth)


def test_images_over_q_negative_and_permuted():
    from imagepr.linalg import column_space_equal

    a = build_system("1", 3).matrix
    n = a.col_count
    assert not column_space_equal(a, a.select_columns(range(n - 1)))
    assert column_space_equal(a, a.select_columns(list(reversed(range(n)))))


def test_columns_condition_examples():
    m = ExactMatrix.from_rows([[1, 1, -1]])
    cert = columns_condition(m)
    assert cert.blocks == ((0, 2), (1,))
    assert cert.combinations == (((0, 1), (2, 0)),)
    assert validate_certificate(m, cert)
    assert columns_condition(ExactMatrix.from_rows([[1, 1]])) is None
    assert columns_condition(ExactMatrix.from_rows([[2, -1]])) is None


def brute_columns_condition(cols):
    """Try every ordered set partition directly."""
    import sympy

    n = len(cols)

    def in_span(vectors, target):
        if not vectors:
            return all(t == 0 for t in target)
        a = sympy.Matrix(vectors).T
        return a.rank() == a.row_join(sympy.Matrix(target)).rank()

    def partitions(items):
        if not items:
            yield []
            return
        for r in range(1, len(items) + 1):
            for first in itertools.combinations(items, r):
                rest = [i for i in items if i not in first]
                for tail in partitions(rest):
                    yield [list(first)] + tail

    for blocks in partitions(list(range(n))):
        sums = [[sum(cols[j][i] for j in b) for i in range(len(cols[0]))] for b in blocks]
        if any(s != 0 for s in sums[0]):
            continue
        used = list(blocks[0])
        ok = True
        for b, s in zip(blocks[1:], sums[1:]):
            if not in_span([cols[j] for j in used], s):
                ok = False
                break
            used += b
        if ok:
            return True
    return False


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=1, max_size=2))
def test_columns_condition_against_brute_force(rows):
    m = ExactMatrix.from_rows(rows)
    cert = columns_condition(m)
    assert (cert is not None) == brute_columns_condition(m.columns())
    if cert is not None:
        assert validate_certificate(m, cert)
        assert validate_certificate(m, ColumnsCertificate.from_json(json.loads(json.dumps(cert.to_json()))))


def test_columns_condition_limit():
    with pytest.raises(ValueError, match="limit of 10"):
        columns_condition(ExactMatrix.zeros(1, 11))


def test_columns_condition_on_empty_dependence_matrix():
    cert = columns_condition(ExactMatrix.zeros(0, 3))
    assert cert is not None and validate_certificate(ExactMatrix.zeros(0, 3), cert)


def test_validate_certificate_rejects_bad():
    m = ExactMatrix.from_rows([[1, 1, -1]])
    assert not validate_certificate(m, ColumnsCertificate(((0,), (1, 2)), (((0, Fraction(0)),),)))
    assert not validate_certificate(m, ColumnsCertificate(((0, 2), (1,)), (((0, Fraction(2)),),)))


def test_schur():
    assert schur_exhaustive(5, 2)
    assert not schur_exhaustive(4, 2)
    assert not schur_exhaustive(1, 1)
    with pytest.raises(ValueError):
        schur_exhaustive(30, 3)


def test_schur_three_colours_small():
    # S(3) = 13: some 3-colouring of 1..13 avoids triples, so 1..6 certainly does
    assert not schur_exhaustive(6, 3)
