import random

import pytest

from qcflp.constraints import (Interval, entails, eval_primitive,
                               holds_under, iv_mul, propagate, satisfiable)
from qcflp.syntax import parse_constraints, parse_expr
from qcflp.terms import App, Basic, BOTTOM, FALSE, TRUE


def c(text):
    (out,) = parse_constraints(text)
    return out


def cs(text):
    return parse_constraints(text)


def test_eval_primitive_examples():
    out = eval_primitive("*", [Basic(0.9), Basic(0.8)])
    assert isinstance(out, Basic) and out.value == pytest.approx(0.72, abs=1e-9)
    assert eval_primitive("==", [Basic(65.0), Basic(65.0)]) == TRUE
    assert eval_primitive("<", [BOTTOM, Basic(200.0)]) == BOTTOM


def test_eval_primitive_strict_equality():
    assert eval_primitive("==", [parse_expr('"ab"'), parse_expr('"ab"')]) == TRUE
    assert eval_primitive("==", [parse_expr('"ab"'), parse_expr('"ax"')]) == FALSE
    # a clash at one position decides even when another is undefined
    assert eval_primitive("==", [parse_expr("c(_|_, 1)"), parse_expr("c(_|_, 2)")]) == FALSE
    assert eval_primitive("==", [parse_expr("c(_|_)"), parse_expr("c(_|_)")]) == BOTTOM


def test_eval_primitive_radicality():
    rng = random.Random(3)
    for _ in range(300):
        sym = rng.choice(["+", "-", "*", "<=", "<", ">=", ">", "=="])
        args = [Basic(rng.uniform(-5, 5)), Basic(rng.uniform(-5, 5))]
        out = eval_primitive(sym, args)
        assert out == BOTTOM or isinstance(out, Basic) \
            or (isinstance(out, App) and not out.args)


def test_eval_primitive_monotonicity_sampled():
    # undefined arguments never give more information than defined ones
    rng = random.Random(4)
    for _ in range(300):
        sym = rng.choice(["+", "*", "<=", "=="])
        full = [Basic(rng.uniform(-3, 3)), Basic(rng.uniform(-3, 3))]
        out = eval_primitive(sym, full)
        for i in range(2):
            partial = list(full)
            partial[i] = BOTTOM
            weaker = eval_primitive(sym, partial)
            assert weaker == BOTTOM or weaker == out


def test_eval_primitive_rejects_unknown_symbol():
    with pytest.raises(Exception):
        eval_primitive("frobnicate", [Basic(1.0)])


def test_satisfiable_examples():
    res = satisfiable(cs("W <= 0.7, W >= 0.65"))
    assert res.status == "sat"
    assert res.witness["W"] == pytest.approx(0.7)

    assert satisfiable(cs("W <= 0.3, W >= 0.5")).status == "unsat"

    res = satisfiable(cs("0 < W, W <= 1"))
    assert res.status == "sat"
    assert res.witness["W"] == pytest.approx(1.0)


def test_satisfiable_witness_is_pointwise_solution():
    rng = random.Random(9)
    for _ in range(50):
        lo = rng.uniform(0, 0.5)
        hi = lo + rng.uniform(0, 0.5)
        k = rng.uniform(0.1, 1.0)
        constraints = cs(f"W >= {lo}, W <= {hi}, V <= {k}*W, V >= 0")
        res = satisfiable(constraints)
        assert res.status == "sat"
        for item in constraints:
            assert holds_under(item, res.witness) is True


def test_entails_examples():
    assert entails(cs("A < 0"), c("A*A /= 0")).status == "entailed"
    assert entails([], c("3 == 3")).status == "entailed"

    res = entails(cs("A < 0"), c("A > 0"))
    assert res.status == "not_entailed"
    w = res.witness["A"]
    assert w < 0  # the counterexample satisfies the hypotheses, refutes the claim


def test_entails_unsat_hypotheses():
    assert entails(cs("A < 0, A > 1"), c("A == 5")).status == "entailed"


def test_entails_not_entailed_witness_valid():
    res = entails(cs("0 < W, W <= 1"), c("W >= 0.5"))
    assert res.status == "not_entailed"
    assert holds_under(c("W >= 0.5"), res.witness) is False
    assert all(holds_under(x, res.witness) for x in cs("0 < W, W <= 1"))


def test_entails_soundness_mass_sampling():
    # every valuation drawn from the propagated box must satisfy the claim
    rng = random.Random(17)
    cases = [
        (cs("A < 0"), c("A*A /= 0")),
        (cs("qVal(W), W <= 0.9"), c("W <= 1")),
        (cs("X >= 2, X <= 3"), c("X > 1")),
    ]
    for hyps, claim in cases:
        assert entails(hyps, claim).status == "entailed"
        box = propagate(hyps, {})
        names = sorted(set().union(*[_vars(h) for h in hyps]) | _vars(claim))
        for _ in range(10000):
            val = {}
            for n in names:
                iv = box.get(n, Interval())
                lo = iv.lo if iv.lo != float("-inf") else iv.hi - 100.0
                hi = iv.hi if iv.hi != float("inf") else iv.lo + 100.0
                val[n] = rng.uniform(lo, hi)
            if not all(holds_under(h, val) for h in hyps):
                continue
            assert holds_under(claim, val) is True


def _vars(x):
    from qcflp.terms import vars_of
    return vars_of(x)


def test_qval_shapes():
    assert eval_primitive("qVal", [Basic(0.5)]) == TRUE
    assert eval_primitive("qVal", [Basic(0.0)]) == FALSE
    assert eval_primitive("qBound", [Basic(0.5), Basic(0.9), Basic(0.6)]) == TRUE
    assert eval_primitive("qBound", [Basic(0.9), Basic(0.9), Basic(0.6)]) == FALSE


def test_propagation_chain():
    box = propagate(cs("qVal(W), qVal(V), W <= 0.9*V, W >= 0.65"), {})
    assert box is not None
    w, v = box["W"], box["V"]
    assert w.hi == pytest.approx(0.9)
    assert w.lo == pytest.approx(0.65)
    # the lower bound pushes through the factor onto the inner variable
    assert v.lo == pytest.approx(0.65 / 0.9)


def test_propagation_empty():
    assert propagate(cs("W >= 0.8, W <= 0.7"), {}) is None


def test_interval_multiplication_strictness():
    a = Interval(float("-inf"), 0.0, False, True)
    prod = iv_mul(a, a)
    assert prod.lo == 0.0 and prod.lo_open  # strictly negative reals square positive
