import pytest
from hypothesis import given, settings, strategies as st

from worms.algebra import AlgebraError, Ctx, apply_deriv, bracket, from_json, to_json, to_text
from worms.calculus import d_op, structure_ops


def test_generator_table_n2():
    ctx = Ctx(2, 2)
    labels = [g.label for g in ctx.gens]
    assert labels == ["d1(x1)", "d2(x1)", "d1(x2)", "d2(x2)", "d12(x1)", "d12(x2)"]
    assert ctx.ngens == 6


def test_odd_generators_anticommute_and_square_to_zero():
    ctx = Ctx(2, 1)
    a, b = ctx.xi(0, 1), ctx.xi(0, 2)
    assert a * b == -(b * a)
    assert a * a == ctx.zero()
    assert ctx.y(0) * a == a * ctx.y(0)


def test_parse_roundtrip():
    ctx = Ctx(2, coords=["u", "v"])
    e = ctx.parse("u*d1(u)*d2(v) - 3*d12(u)^2 + 1/(1+v^2)")
    assert ctx.parse(to_text(e)) == e
    assert from_json(to_json(e)) == e


def test_parse_errors():
    ctx = Ctx(2, 1)
    with pytest.raises(AlgebraError):
        ctx.parse("d3(x1)")
    with pytest.raises(AlgebraError):
        Ctx(0, 1)


def test_d_squares_to_zero_and_d1_d2_anticommute():
    ctx = Ctx(2, 2)
    d1, d2 = d_op(ctx, 1), d_op(ctx, 2)
    assert not bracket(d1, d1)
    assert not bracket(d2, d2)
    assert not bracket(d1, d2)


def test_d_sign_rule():
    ctx = Ctx(2, 1)
    d1 = d_op(ctx, 1)
    # d_1 d_2 x = y, so d_1 (ξ_2) = y; d_2 (ξ_1) = -y
    assert apply_deriv(d1, ctx.xi(0, 2)) == ctx.y(0)
    assert apply_deriv(d_op(ctx, 2), ctx.xi(0, 1)) == -ctx.y(0)


def test_d_on_coefficients():
    ctx = Ctx(1, coords=["u", "v"])
    e = ctx.parse("u^2*v")
    assert apply_deriv(d_op(ctx, 1), e) == ctx.parse("2*u*v*d1(u) + u^2*d1(v)")


CTX = Ctx(2, 2)
_gens = st.sampled_from(range(CTX.ngens))
_coef = st.integers(min_value=-3, max_value=3)


@st.composite
def elems(draw):
    e = CTX.zero()
    for _ in range(draw(st.integers(1, 3))):
        term = CTX.const(draw(_coef))
        for k in draw(st.lists(_gens, max_size=3)):
            term = term * CTX.gen(k)
        e = e + term * CTX.x(draw(st.integers(0, 1)))
    return e


@settings(max_examples=60, deadline=None)
@given(elems(), elems(), elems())
def test_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=60, deadline=None)
@given(st.lists(_gens, min_size=1, max_size=3), st.lists(_gens, min_size=1, max_size=3))
def test_graded_commutative(s, t):
    a = CTX.one()
    for k in s:
        a = a * CTX.gen(k)
    b = CTX.one()
    for k in t:
        b = b * CTX.gen(k)
    pa, pb = a.parity(), b.parity()
    if a and b:
        sign = -1 if pa * pb else 1
        assert a * b == (b * a).scale(sign)


@settings(max_examples=40, deadline=None)
@given(elems(), elems(), st.sampled_from(sorted(structure_ops(CTX))))
def test_derivation_leibniz(a, b, name):
    D = structure_ops(CTX)[name]
    pa = a.parity()
    if pa is None:
        return
    sign = -1 if (D.parity * pa) & 1 else 1
    assert apply_deriv(D, a * b) == apply_deriv(D, a) * b + (a * apply_deriv(D, b)).scale(sign)
