from fractions import Fraction

import pytest

from oracles import poincare_n1_betti
from worms.algebra import Ctx, Deriv
from worms.calculus import d_op, euler_op, r_op
from worms.cohomology import (
    CohomologyError,
    TruncationSpec,
    betti,
    expand,
    e11_trivial_on_r1,
    named_differential,
    op_matrix,
    pairing_report,
    rescaling_trivial_on_r1,
)


def _key(e):
    (k,) = expand(e)
    return k


def test_op_matrix_d_on_x_squared():
    ctx = Ctx(1, coords=["x"])
    M = op_matrix(d_op(ctx, 1), TruncationSpec(3))
    col = _key(ctx.parse("x^2"))
    row = _key(ctx.parse("x*d1(x)"))
    assert M.entry(row, col) == 2
    assert sum(1 for r in M.codomain if M.entry(r, col)) == 1


def test_op_matrix_r1_on_fiber():
    ctx = Ctx(2, 1)
    M = op_matrix(r_op(ctx, 1), TruncationSpec(2, 0))
    y, xx = _key(ctx.y(0)), _key(ctx.xi(0, 1) * ctx.xi(0, 2))
    assert M.entry(_key(ctx.xi(0, 1)), y) == 1
    assert not any(M.entry(r, xx) for r in M.codomain)


def test_zero_derivation_matrix():
    ctx = Ctx(2, 1)
    M = op_matrix(Deriv(ctx, 1, {}), TruncationSpec(2, 0))
    assert not any(M.entry(r, c) for r in M.codomain for c in M.domain)


def test_r1_fiber_betti():
    D, _ = named_differential("r1", 1)
    rep = betti(D, TruncationSpec(4, 0), "r1")
    assert rep.betti() == {(0, 0): 1, (0, 1): 1}
    assert rep.all_stable


def test_poincare_lemma_n1():
    D, _ = named_differential("d", 1)
    assert betti(D, TruncationSpec(5), "d").betti() == poincare_n1_betti(5)


def test_d1_contracts():
    D, _ = named_differential("d1", 1)
    assert betti(D, TruncationSpec(4), "d1").betti() == {(0, 0): 1}


def test_not_a_differential():
    ctx = Ctx(2, 1)
    with pytest.raises(CohomologyError, match="differential"):
        betti(euler_op(ctx, 1, 1), TruncationSpec(2, 0))


def test_induced_maps_on_r1_cohomology():
    for m in (1, 2):
        r = e11_trivial_on_r1(m, 4)
        assert r["commutes"] and r["induced_ok"]
        r = rescaling_trivial_on_r1(m, 4, Fraction(7, 2))
        assert r["commutes"] and r["induced_ok"]


def test_both_pairings_reported():
    pr = pairing_report(1, 4)
    assert pr["d2->d, d1->0"]["chain_map"] and pr["d2->d, d1->0"]["quasi_isomorphism"]
    assert pr["d1->d, d2->0"]["chain_map"] is False


def test_truncation_validation():
    with pytest.raises(CohomologyError):
        TruncationSpec(-1)
