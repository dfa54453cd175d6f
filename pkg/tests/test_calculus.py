from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from worms.algebra import Ctx, apply_deriv, basis_deriv, bracket, restrict
from worms.calculus import (
    CalculusError,
    CoordChange,
    compose_changes,
    d_op,
    euler_op,
    fn_bracket,
    form_components,
    full_act,
    identity_morphism,
    iota_op,
    lie_op,
    mat2_act,
    param_coefficient,
    param_free_part,
    pullback,
    r_op,
    split_derivation_n1,
    structure_ops,
    theta_contract,
)
from worms.checks import _form_from_tensor, _two_form_components, nijenhuis_torsion
from worms.theta_fields import decompose_n2, standard_basis_n2, v_bracket

C1 = Ctx(2, coords=["x"])
N1 = Ctx(1, coords=["x"])


def _slot(ctx, S):
    return ctx.m + ctx.gen_id(0, S)


def test_structure_operators_on_generators():
    x, xi1, xi2, y = C1.x(0), C1.xi(0, 1), C1.xi(0, 2), C1.y(0)
    assert apply_deriv(d_op(C1, 1), x) == xi1
    assert apply_deriv(d_op(C1, 1), xi1) == C1.zero()
    assert apply_deriv(euler_op(C1, 1, 2), xi2) == xi1
    assert apply_deriv(euler_op(C1, 1, 1), y) == y
    assert apply_deriv(euler_op(C1, 1, 1), x) == C1.zero()
    assert apply_deriv(r_op(C1, 1), y) == xi1
    assert apply_deriv(r_op(C1, 1), y * xi2) == xi1 * xi2
    assert apply_deriv(r_op(C1, 1), x) == C1.zero()


def test_n1_euler_and_d():
    ctx = Ctx(1, 2)
    E, d = euler_op(ctx, 1, 1), d_op(ctx, 1)
    e = ctx.xi(0) * ctx.xi(1)
    assert apply_deriv(E, e) == e.scale(2)
    assert bracket(E, d) == d
    assert not bracket(d, d)


def test_r1_d2_bracket():
    assert bracket(r_op(C1, 1), d_op(C1, 2)) == -euler_op(C1, 1, 1)


def test_bracket_table_matches_vector_field_oracle():
    ctx = Ctx(2, 3)
    ops = structure_ops(ctx)
    fields = standard_basis_n2()
    for a, u in fields.items():
        for b, w in fields.items():
            expect = decompose_n2(v_bracket(u, w))
            got = bracket(ops[a], ops[b])
            rebuilt = None
            for name, c in expect.items():
                term = ops[name].scale(-c)
                rebuilt = term if rebuilt is None else rebuilt + term
            if rebuilt is None:
                assert not got, (a, b)
            else:
                assert got == rebuilt, (a, b)


def test_lie_derivative_examples():
    L = lie_op(C1, ["1"])
    assert apply_deriv(L, C1.parse("x^3")) == C1.parse("3*x^2")
    assert apply_deriv(L, C1.y(0)) == C1.zero()
    L = lie_op(C1, ["x"])
    assert apply_deriv(L, C1.xi(0, 1)) == C1.xi(0, 1)
    assert apply_deriv(L, C1.y(0)) == C1.y(0)
    L = lie_op(C1, ["x^2"])
    assert apply_deriv(L, C1.y(0)) == C1.parse("2*x*d12(x) + 2*d1(x)*d2(x)")


def test_contraction_and_gormula():
    assert apply_deriv(iota_op(C1, ["x"]), C1.y(0)) == C1.x(0)
    v = ["x^2"]
    lhs = bracket(d_op(C1, 1), bracket(d_op(C1, 2), iota_op(C1, v)))
    assert lhs == lie_op(C1, v)


def test_cartan_n1():
    v = ["x^2 + 1"]
    i_v = iota_op(N1, v)
    assert bracket(d_op(N1, 1), i_v) == lie_op(N1, v)


def test_theta_contraction_identities():
    dx = basis_deriv(C1, 0)
    assert theta_contract(C1, (1,), dx) == -basis_deriv(C1, _slot(C1, (1,)))
    assert theta_contract(C1, (2, 1), dx) == basis_deriv(C1, _slot(C1, (1, 2)))
    assert not theta_contract(N1, (1,), basis_deriv(N1, _slot(N1, (1,))))


def test_split_n1():
    dx, dxi = basis_deriv(N1, 0), basis_deriv(N1, _slot(N1, (1,)))
    w1, w2 = split_derivation_n1(dxi)
    assert not w1 and w2 == dxi
    w1, w2 = split_derivation_n1(dx)
    assert w1 == dx and not w2
    v = ["x^2"]
    w1, w2 = split_derivation_n1(lie_op(N1, v))
    assert w1 + w2 == lie_op(N1, v)


def test_fn_bracket_examples():
    F = N1.field
    x = F.var(0)
    # vector fields: FN bracket of 0-forms is the Lie bracket
    got = fn_bracket([N1.const(x)], [N1.one()])
    assert got == [N1.const(-1)]
    ident = [[F.one]]
    assert all(v == 0 for v in _two_form_components(N1, fn_bracket(_form_from_tensor(N1, ident), _form_from_tensor(N1, ident))).values())


def test_fn_bracket_against_nijenhuis_m2():
    ctx = Ctx(1, coords=["u", "v"])
    F = ctx.field
    u, v = F.gens
    K = [[u * v, F.one], [F.zero, u]]
    form = _form_from_tensor(ctx, K)
    got = _two_form_components(ctx, fn_bracket(form, form))
    N = nijenhuis_torsion(K)
    assert any(N.values())
    assert all(got[k] == 2 * N[k] for k in got)


def test_pullback_example():
    phi = pullback(C1, ["x^2"])
    assert phi(C1.xi(0, 1)) == C1.parse("2*x*d1(x)")
    assert phi(C1.y(0)) == C1.parse("2*x*d12(x) + 2*d1(x)*d2(x)")
    assert pullback(C1, ["x"]) == identity_morphism(C1)


def test_pullback_functoriality_example():
    phi, psi = CoordChange.of(C1, ["x^2"]), CoordChange.of(C1, ["x+1"])
    lhs = pullback(C1, compose_changes(phi, psi))
    assert lhs == pullback(C1, phi).then(pullback(C1, psi))


def test_pullback_commutes_with_d():
    ctx = Ctx(2, coords=["u", "v"])
    phi = pullback(ctx, ["u + v^2", "v*u + v"])
    e = ctx.parse("u*d1(v) + d12(u)*v^2")
    for a in (1, 2):
        D = d_op(ctx, a)
        assert phi(apply_deriv(D, e)) == apply_deriv(D, phi(e))


def test_singular_change_rejected():
    with pytest.raises(CalculusError):
        pullback(C1, ["1"])


def test_mat2_examples():
    assert mat2_act(C1, [[1, 0], [0, 1]]) == identity_morphism(C1)
    lam = Fraction(5)
    phi = mat2_act(C1, [[lam, 0], [0, 1]])
    assert phi(C1.xi(0, 1)) == C1.xi(0, 1).scale(lam)
    assert phi(C1.y(0)) == C1.y(0).scale(lam)
    swap = mat2_act(C1, [[0, 1], [1, 0]])
    assert swap(C1.xi(0, 1)) == C1.xi(0, 2)
    assert swap(C1.y(0)) == -C1.y(0)


def test_full_act_reduces_to_mat2():
    A = [[2, 1], [0, 3]]
    phi = full_act(C1, A)
    plain = mat2_act(C1, A)
    for e in (C1.x(0), C1.xi(0, 1), C1.xi(0, 2), C1.y(0)):
        assert restrict(param_free_part(phi(e)), C1) == plain(e)


def test_full_act_display_shift():
    tgt = full_act(C1, [[1, 0], [0, 1]]).tgt
    img = full_act(C1, [[1, 0], [0, 1]])(C1.x(0))
    b1, b2 = tgt.param("beta1"), tgt.param("beta2")
    expect = tgt.x(0) + b1 * tgt.xi(0, 1) + b2 * tgt.xi(0, 2) + b2 * b1 * tgt.y(0)
    assert img == expect


def test_full_act_beta_derivative_is_d1():
    phi = full_act(C1, [[1, 0], [0, 1]])
    for e in (C1.x(0), C1.xi(0, 2), C1.parse("x^2*d2(x)")):
        coeff = param_coefficient(phi(e), "beta1")
        assert restrict(param_free_part(coeff), C1) == apply_deriv(d_op(C1, 1), e)


def test_form_components():
    F = C1.field
    comps = form_components(C1, {(): F.var(0)})
    assert comps[((), (0, 0))] == C1.x(0)
    assert comps[((1,), (0, 0))] == C1.xi(0, 1)
    assert comps[((2, 1), (0, 0))] == C1.y(0)
    comps = form_components(C1, {(0,): F.one})
    assert comps[((), (1, 0))] == C1.xi(0, 1)
    assert comps[((2,), (1, 0))] == -C1.y(0)
    assert comps[((), (0, 1))] == C1.xi(0, 2)
    assert comps[((1,), (0, 1))] == C1.y(0)


_ints = st.integers(min_value=-3, max_value=3)


@settings(max_examples=15, deadline=None)
@given(_ints, _ints, _ints)
def test_pullback_functoriality_random(a, b, c):
    phi = CoordChange.of(C1, [f"x + {a}*x^2"]) if a else CoordChange.of(C1, ["2*x"])
    psi = CoordChange.of(C1, [f"{b or 1}*x + {c}"])
    assert pullback(C1, compose_changes(phi, psi)) == pullback(C1, phi).then(pullback(C1, psi))
