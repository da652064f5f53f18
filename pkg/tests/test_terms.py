import random

from hypothesis import given, strategies as st

from qcflp.syntax import parse_expr
from qcflp.terms import (App, Basic, BOTTOM, Signature, Var, apply_subst,
                         compose_subst, info_leq, is_ground, is_term, is_total,
                         term_glb, term_lub, vars_of)


def e(text):
    return parse_expr(text)


def test_info_leq_examples():
    assert info_leq(BOTTOM, e("f(A, 3)"))
    # deepening a partial list stays below the completed one
    assert info_leq(e("f(A:(B:_|_))"), e("f(A:(B:[]))"))
    assert not info_leq(e("c(1)"), e("c(2)"))
    assert info_leq(e("X"), e("X"))
    assert not info_leq(e("X"), e("Y"))


def test_apply_subst_examples():
    sigma = {"X": e("A"), "Xs": e("B:_|_")}
    assert apply_subst(e("f(X:Xs)"), sigma) == e("f(A:(B:_|_))")
    assert apply_subst(e("f(X:Xs)"), {}) == e("f(X:Xs)")


def test_composition_law():
    s1 = {"X": e("Y")}
    s2 = {"Y": e("3")}
    composed = compose_subst(s1, s2)
    x = e("X")
    assert apply_subst(apply_subst(x, s1), s2) == apply_subst(x, composed)
    assert apply_subst(x, composed) == Basic(3.0)


@given(st.integers(0, 10**6))
def test_composition_law_random(seed):
    rng = random.Random(seed)
    expr = _random_expr(rng, 3)
    s1 = {v: _random_expr(rng, 2) for v in list(vars_of(expr))[:2]}
    s2 = {v: _random_expr(rng, 1) for v in "XYZ"}
    assert apply_subst(apply_subst(expr, s1), s2) \
        == apply_subst(expr, compose_subst(s1, s2))


def _random_expr(rng, depth):
    roll = rng.random()
    if depth == 0 or roll < 0.3:
        return rng.choice([Var("X"), Var("Y"), Var("Z"), Basic(1.0),
                           App("a"), BOTTOM])
    sym = rng.choice(["c", "d"])
    return App(sym, tuple(_random_expr(rng, depth - 1)
                          for _ in range(rng.randint(1, 2))))


def test_info_leq_partial_order_sampled():
    rng = random.Random(11)
    samples = [_random_expr(rng, 3) for _ in range(60)]
    for x in samples:
        assert info_leq(x, x)
    for x in samples:
        for y in samples:
            if info_leq(x, y) and info_leq(y, x):
                assert x == y
            for z in samples:
                if info_leq(x, y) and info_leq(y, z):
                    assert info_leq(x, z)


def test_term_glb_lub():
    a, b = e("c(1, _|_)"), e("c(_|_, d(2))")
    assert term_glb(a, b) == e("c(_|_, _|_)")
    assert term_lub(a, b) == e("c(1, d(2))")
    assert term_lub(e("c(1)"), e("c(2)")) is None
    # glb and lub bracket their arguments
    assert info_leq(term_glb(a, b), a)
    assert info_leq(a, term_lub(a, b))


def test_classification():
    sig = Signature()
    sig.register_df("f", 1)
    sig.register_dc("c", 2)
    assert is_term(e("c(X, 1)"), sig)
    assert not is_term(App("f", (Var("X"),)), sig)
    assert is_ground(e("c(1)")) and not is_ground(e("c(X)"))
    assert is_total(e("c(1)")) and not is_total(e("c(_|_)"))


def test_signature_disjointness():
    sig = Signature()
    sig.register_dc("c", 2)
    import pytest
    from qcflp.terms import SignatureError
    with pytest.raises(SignatureError):
        sig.register_df("c", 1)
    with pytest.raises(SignatureError):
        sig.register_dc("c", 3)
