"""Degeneration witness verification."""

from fractions import Fraction

import pytest

from jsdeg.action import BasisChange
from jsdeg.degeneration import (
    Witness,
    WitnessStatus,
    orbit_equal_test,
    scaling_witness,
    verify_witness,
)
from jsdeg.exact import LaurentPoly, MPoly, parse_laurent
from jsdeg.superalgebra import SuperStructure


def unit11():
    return SuperStructure(1, 1, {(1, 1, 1): 1, (1, 2, 2): 1}, complete=True)


def laurent_diag(m, n, entries):
    ev = [[parse_laurent(entries[i]) if i == j else 0 for j in range(m)] for i in range(m)]
    od = [[parse_laurent(entries[m + i]) if i == j else 0 for j in range(n)] for i in range(n)]
    return BasisChange.make(m, n, ev, od, domain="laurent")


def test_scaling_witness_confirmed_everywhere():
    for J in (unit11(), SuperStructure.zero(2, 2),
              SuperStructure(2, 1, {(1, 1, 2): 1, (3, 3, 1): Fraction(-1, 2)}, complete=True)):
        report = verify_witness(scaling_witness(J))
        assert report.confirmed, report


def test_wrong_target_is_mismatch():
    w = Witness(unit11(), unit11(), BasisChange.scaling(1, 1, -1))
    report = verify_witness(w)
    assert report.status is WitnessStatus.LIMIT_MISMATCH
    assert report.failures


def test_pole_is_limit_missing():
    # scaling by t blows entries up as t -> 0 (c -> c/t)
    w = Witness(unit11(), SuperStructure.zero(1, 1), BasisChange.scaling(1, 1, 1))
    report = verify_witness(w)
    assert report.status is WitnessStatus.LIMIT_MISSING


def test_nontrivial_degeneration():
    # e1 idempotent, f1 with e1 f1 = 1/2 f1: rescaling the odd part alone by
    # t^-1 kills nothing; but c_22^1-type entries would scale by t^2.
    # Here: source has f1 f1 = e1; curve f1 -> t^-1 f1 sends it to
    # f1 f1 = t^-2... so the right curve for killing it is f1 -> t f1.
    source = SuperStructure(1, 1, {(2, 2, 1): 1}, complete=True)
    target = SuperStructure.zero(1, 1)
    curve = laurent_diag(1, 1, ["1", "t^-1"])
    # c_22^1 transforms by d_1 / (d_2 d_2) = 1 / t^-2 = t^2 -> 0
    report = verify_witness(Witness(source, target, curve))
    assert report.confirmed


def test_parametric_witness_checks_identically():
    g = MPoly.variable("gamma")
    source = SuperStructure(1, 1, {(1, 1, 1): g}, parameters=("gamma",))
    target = SuperStructure.zero(1, 1)
    report = verify_witness(scaling_witness(source))
    assert report.confirmed
    # and a parametric mismatch is caught as a polynomial disagreement
    wrong = SuperStructure(1, 1, {(1, 1, 1): g * 2}, parameters=("gamma",))
    w = Witness(source, wrong, BasisChange.make(1, 1, [[parse_laurent("1")]],
                                                [[parse_laurent("1")]], domain="laurent"))
    assert verify_witness(w).status is WitnessStatus.LIMIT_MISMATCH


def test_witness_requires_laurent_domain():
    with pytest.raises(ValueError):
        Witness(unit11(), unit11(), BasisChange.identity(1, 1))


def test_type_mismatch_rejected():
    with pytest.raises(ValueError):
        Witness(unit11(), SuperStructure.zero(2, 1), BasisChange.scaling(1, 1, -1))


def test_orbit_equal_test():
    J = SuperStructure(1, 0, {(1, 1, 1): 1})
    K = SuperStructure(1, 0, {(1, 1, 1): Fraction(1, 2)})
    g = BasisChange.make(1, 0, [[Fraction(2)]], [], domain="scalar")
    assert orbit_equal_test(g, J, K)
    assert not orbit_equal_test(g, J, J)
    assert orbit_equal_test(BasisChange.identity(1, 0), J, J)
