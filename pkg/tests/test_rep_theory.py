import pytest
from hypothesis import given, settings, strategies as st

from oracles import count_ssyt
from worms.algebra import Ctx
from worms.calculus import d_op, r_op
from worms.rep_theory import (
    RepError,
    YoungTable,
    decompose_report,
    fiber_basis,
    hw_dim,
    hw_kernel,
    mat2_fiber_stable,
    mat2_support,
    raising_op,
    schur_dim,
    tetris_sequence,
    tilde_dim,
    tilde_dim_kernel,
    two_column_tables,
)


@pytest.mark.parametrize("rows, m, expect", [((1, 1), 3, 3), ((3,), 2, 4), ((2, 2), 2, 1), ((1, 1, 1), 2, 0)])
def test_schur_examples(rows, m, expect):
    assert schur_dim(YoungTable.of(*rows), m) == expect


partitions = st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=4).map(
    lambda r: tuple(sorted(r, reverse=True))
)


@settings(max_examples=40, deadline=None)
@given(partitions, st.integers(min_value=1, max_value=4))
def test_schur_matches_tableau_count(rows, m):
    assert schur_dim(YoungTable.of(*rows), m) == count_ssyt(rows, m)


@settings(max_examples=30, deadline=None)
@given(partitions)
def test_transpose_involutive(rows):
    t = YoungTable.of(*rows)
    assert t.transpose().transpose() == t


def test_young_table_validation():
    with pytest.raises(RepError):
        YoungTable.of(1, 2)
    assert YoungTable.parse("2,2,1").rows == (2, 2, 1)


def test_mat2_support_examples():
    assert mat2_support(9, 5, 4)
    assert not mat2_support(6, 1, 4)
    assert all(mat2_support(k, k, m) for k in range(5) for m in (1, 3))


def test_tetris_examples():
    assert [t.rows for t in tetris_sequence(YoungTable.of(2, 2))] == [(2, 2), (3,)]
    assert [t.rows for t in tetris_sequence(YoungTable.of(2, 2, 1))] == [(2, 2, 1), (3, 1)]
    assert [t.rows for t in tetris_sequence(YoungTable.of(2, 1))] == [(2, 1)]
    with pytest.raises(RepError, match="two-column"):
        tetris_sequence(YoungTable.of(1, 1))


def test_fiber_basis_examples():
    ctx = Ctx(2, 1)
    assert fiber_basis(ctx, 1, 1).dim == 2
    assert fiber_basis(ctx, 0, 0).dim == 1
    assert fiber_basis(ctx, 2, 0).dim == 0


def test_hw_kernel_examples():
    ctx = Ctx(2, 1)
    ops = [raising_op(ctx), r_op(ctx, 1), r_op(ctx, 2)]
    ker = hw_kernel(fiber_basis(ctx, 1, 1), ops)
    assert len(ker) == 1 and ker[0] == ctx.xi(0, 1) * ctx.xi(0, 2)
    assert hw_dim(2, 2, 2, generic=True) == 5
    assert hw_dim(1, 0, 0, generic=True) == 1


def test_hw_kernel_rejects_non_fiberwise_op():
    ctx = Ctx(2, 1)
    with pytest.raises(RepError, match="fiberwise"):
        hw_kernel(fiber_basis(ctx, 1, 0), [d_op(ctx, 1)])


def test_tilde_dim_examples():
    box = YoungTable.of(2, 2)
    assert tilde_dim(box, 2) == 5
    assert tilde_dim(box, 1) == 1
    assert tilde_dim(YoungTable.of(2), 3) == 6


def test_tilde_dim_equals_kernel_small():
    for m in (1, 2, 3):
        for ell in two_column_tables(2, m):
            assert tilde_dim(ell, m) == tilde_dim_kernel(ell, m), (ell, m)


def test_e21_convention_agrees():
    for m in (1, 2):
        for ell in two_column_tables(2, 2):
            assert tilde_dim_kernel(ell, m, "e21") == tilde_dim_kernel(ell, m, "e12")


def test_support_matches_kernel_nonvanishing():
    for m in (1, 2, 3):
        for p in range(6):
            for q in range(min(p, 5 - p) + 1):
                assert mat2_support(p, q, m) == (hw_dim(m, p, q) > 0), (p, q, m)


def test_decompose_report():
    rep = decompose_report(1, 2)
    assert rep.ok
    first = rep.rows[0]
    assert (first.p, first.q, first.total, first.generic, first.remainder) == (0, 0, 1, 1, 0)
    for m in (1, 2):
        rep = decompose_report(m, 5)
        assert rep.ok and all(r.remainder >= 0 for r in rep.rows)
        assert all(r.generic == 0 for r in rep.rows if not r.in_support)


def test_mat2_stability_diagonal():
    ctx = Ctx(2, 2)
    assert all(mat2_fiber_stable(ctx, p, q, [[2, 0], [0, 5]]) for p in range(3) for q in range(3))
