from fractions import Fraction
import math

import mpmath
import pytest

from painleve_connection.critical import (SEPARATRIX, SUBCRITICAL_B, SUPERCRITICAL_A, UNDECIDED,
                                          classify, integrate_extended, limit_check,
                                          locate_critical)
from painleve_connection.errors import BracketingError, InvalidArgumentError


def test_classify_subcritical():
    r = classify(0.1, 100.0)
    assert r.label == SUBCRITICAL_B and r.X_used == 100.0
    assert r.witness[0] > math.pi / 2 and r.witness[1] > 0.5


def test_classify_supercritical():
    assert classify(1.0, 100.0).label == SUPERCRITICAL_A


def test_classify_separatrix_undecided():
    r = classify(SEPARATRIX, 100.0)
    assert r.label == UNDECIDED
    assert abs(r.a - 1 / math.pi) < 1e-16
    phi, dphi = r.witness
    assert abs(phi - math.pi / 2) < 0.02 and 0 < dphi < 1e-3


def test_classify_argument_check():
    with pytest.raises(InvalidArgumentError):
        classify(0.1, 10.0)


def test_classifier_monotone_in_a():
    labels = [classify(a, 100.0).label for a in (0.05, 0.15, 0.25, 0.35, 0.5, 1.0)]
    seen_a = False
    for lab in labels:
        seen_a = seen_a or lab == SUPERCRITICAL_A
        assert not (seen_a and lab == SUBCRITICAL_B)
    assert labels[0] == SUBCRITICAL_B and labels[-1] == SUPERCRITICAL_A


def test_extended_classification_of_exact_rationals():
    assert classify(Fraction(3, 10), 100.0).label == SUBCRITICAL_B
    assert classify(Fraction(1, 3), 100.0).label == SUPERCRITICAL_A


def test_invalid_bracket():
    with pytest.raises(BracketingError):
        locate_critical(0.5, 1.0)
    with pytest.raises(InvalidArgumentError):
        locate_critical(1.0, 0.5)


def test_locate_narrow_bracket_and_stability():
    r200 = locate_critical(0.318, 0.3185, X=200.0, bisection_tol=1e-6)
    r400 = locate_critical(0.318, 0.3185, X=400.0, bisection_tol=1e-6)
    assert abs(r200.a_star - 1 / math.pi) <= 1e-6
    assert abs(r200.a_star - r400.a_star) <= 1e-6
    assert float(r200) == r200.a_star
    assert [row[0] for row in r200.trace] == list(range(len(r200.trace)))


def test_continuity_at_separatrix():
    # perturbations grow like e^x; at x = 10 the response is still linear
    base = integrate_extended(SEPARATRIX, 10.0)[3][0]
    with mpmath.workprec(200):
        resp = {d: abs(integrate_extended(1 / mpmath.pi + mpmath.mpf(d), 10.0)[3][0] - base)
                for d in (1e-8, 1e-10)}
    assert resp[1e-8] < 1e-3
    assert 90 < resp[1e-8] / resp[1e-10] < 110


def test_limit_check_x100():
    lc = limit_check(100.0)
    assert lc.monotone
    assert lc.deviation <= 5e-2
    assert abs(lc.deviation - 1e-2) < 1e-5
    assert lc.tail_defect < 1e-8
    assert lc.precision_bits > 100 / math.log(2)


def test_limit_check_argument():
    with pytest.raises(InvalidArgumentError):
        limit_check(50.0)
    with pytest.raises(InvalidArgumentError):
        integrate_extended(SEPARATRIX, -1.0)
    with pytest.raises(InvalidArgumentError):
        integrate_extended("2/pi", 10.0)
